use crate::lane_math::{complex_mul, complex_mul_conj, hypot, neg, phase_with_abs, ComplexPair, Lanes};

use super::{permute_rows, Field, Mat2, TriangleSvd, UrvState};

/// Complex matrices with split real and imaginary lanes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Complex;

type C<V> = ComplexPair<V>;

impl Field for Complex {
    type Elem<V: Lanes> = C<V>;
    type Phase<V: Lanes> = C<V>;

    const NAME: &'static str = "complex";
    const COMPONENTS: usize = 2;

    #[inline(always)]
    fn map<V: Lanes>(e: C<V>, f: impl Fn(V) -> V) -> C<V> {
        C::new(f(e.re), f(e.im))
    }
    #[inline(always)]
    fn zip<V: Lanes>(a: C<V>, b: C<V>, f: impl Fn(V, V) -> V) -> C<V> {
        C::new(f(a.re, b.re), f(a.im, b.im))
    }
    #[inline(always)]
    fn from_real<V: Lanes>(x: V) -> C<V> {
        C::new(x, V::splat(0.0))
    }
    #[inline(always)]
    fn scale_exponent<V: Lanes>(a: &Mat2<C<V>>, h: V) -> V {
        let re = a.map(|x| h - x.re.getexp());
        let im = a.map(|x| h - x.im.getexp());
        let e_re = re.a11.min(re.a21).min(re.a12.min(re.a22));
        let e_im = im.a11.min(im.a21).min(im.a12.min(im.a22));
        V::splat(f64::MAX).min(e_re.min(e_im))
    }
    #[inline(always)]
    fn magnitude<V: Lanes>(e: C<V>) -> V {
        hypot(e.re, e.im)
    }
    #[inline(always)]
    fn phase<V: Lanes>(e: C<V>, mag: V) -> C<V> {
        phase_with_abs(e, mag)
    }
    #[inline(always)]
    fn unphase<V: Lanes>(e: C<V>, p: C<V>) -> C<V> {
        complex_mul_conj(p, e)
    }
    #[inline(always)]
    fn conj_phase<V: Lanes>(p: C<V>) -> C<V> {
        p.conj()
    }
    #[inline(always)]
    fn phase_elem<V: Lanes>(p: C<V>) -> C<V> {
        p
    }

    #[inline(always)]
    fn assemble_tangent<V: Lanes>(urv: &UrvState<Self, V>, tri: &TriangleSvd<V>) -> (Mat2<C<V>>, Mat2<C<V>>) {
        let one = V::splat(1.0);
        let (ta, tp, dh) = (urv.tan_alpha, tri.tan_phi, urv.dh22);
        let c = urv.cos_alpha * tri.cos_phi;
        let t = neg(ta) * tp;
        let w11 = C::new(dh.re.fmadd(t, one), dh.im * t);
        let w21 = C::new(dh.re.fmadd(tp, ta), dh.im * tp);
        let w12 = C::new(dh.re.fmadd(ta, tp), dh.im * ta);
        let w22 = C::new(ta.fnmadd(tp, dh.re), dh.im);
        let u = Mat2 {
            a11: complex_mul(urv.d11, w11).scale(c),
            a21: negate(complex_mul(urv.d22, w21).scale(c)),
            a12: complex_mul(urv.d11, w12).scale(c),
            a22: complex_mul(urv.d22, w22).scale(c),
        };
        let cp = tri.cos_psi;
        let m = cp * tri.tan_psi;
        let zero = V::splat(0.0);
        let v = Mat2 {
            a11: C::new(cp, zero),
            a21: negate(urv.dt22.scale(m)),
            a12: C::new(m, zero),
            a22: urv.dt22.scale(cp),
        };
        (permute_rows::<Self, V>(u, urv.perm_r), permute_rows::<Self, V>(v, urv.perm_c))
    }

    #[inline(always)]
    fn assemble_sine<V: Lanes>(urv: &UrvState<Self, V>, tri: &TriangleSvd<V>) -> (Mat2<C<V>>, Mat2<C<V>>) {
        let (ca, cp, dh) = (urv.cos_alpha, tri.cos_phi, urv.dh22);
        let sa = ca * urv.tan_alpha;
        let sp = cp * tri.tan_phi;
        let (p, q) = (ca * cp, sa * sp);
        let (p2, q2) = (ca * sp, sa * cp);
        let w11 = C::new(dh.re.fnmadd(q, p), neg(dh.im) * q);
        let w21 = C::new(dh.re.fmadd(p2, q2), dh.im * p2);
        let w12 = C::new(dh.re.fmadd(q2, p2), dh.im * q2);
        let w22 = C::new(dh.re.fmsub(p, q), dh.im * p);
        let u = Mat2 {
            a11: complex_mul(urv.d11, w11),
            a21: negate(complex_mul(urv.d22, w21)),
            a12: complex_mul(urv.d11, w12),
            a22: complex_mul(urv.d22, w22),
        };
        let cs = tri.cos_psi;
        let ss = cs * tri.tan_psi;
        let zero = V::splat(0.0);
        let v = Mat2 {
            a11: C::new(cs, zero),
            a21: negate(urv.dt22.scale(ss)),
            a12: C::new(ss, zero),
            a22: urv.dt22.scale(cs),
        };
        (permute_rows::<Self, V>(u, urv.perm_r), permute_rows::<Self, V>(v, urv.perm_c))
    }

    #[inline(always)]
    fn load<V: Lanes>(re: &[f64], im: &[f64]) -> C<V> {
        C::new(V::load(re), V::load(im))
    }
    #[inline(always)]
    fn store<V: Lanes>(e: C<V>, re: &mut [f64], im: &mut [f64]) {
        e.re.store(re);
        e.im.store(im);
    }
}

#[inline(always)]
fn negate<V: Lanes>(z: C<V>) -> C<V> {
    C::new(neg(z.re), neg(z.im))
}
