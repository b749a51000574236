use crate::lane_math::{abs, neg, signbit, Lanes};

use super::{permute_rows, Field, Mat2, TriangleSvd, UrvState};

/// Real matrices; phases are sign bits applied with `xor`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Real;

impl Field for Real {
    type Elem<V: Lanes> = V;
    type Phase<V: Lanes> = V;

    const NAME: &'static str = "real";
    const COMPONENTS: usize = 1;

    #[inline(always)]
    fn map<V: Lanes>(e: V, f: impl Fn(V) -> V) -> V {
        f(e)
    }
    #[inline(always)]
    fn zip<V: Lanes>(a: V, b: V, f: impl Fn(V, V) -> V) -> V {
        f(a, b)
    }
    #[inline(always)]
    fn from_real<V: Lanes>(x: V) -> V {
        x
    }
    #[inline(always)]
    fn scale_exponent<V: Lanes>(a: &Mat2<V>, h: V) -> V {
        let e = a.map(|x| h - x.getexp());
        let e_re = e.a11.min(e.a21).min(e.a12.min(e.a22));
        V::splat(f64::MAX).min(e_re)
    }
    #[inline(always)]
    fn magnitude<V: Lanes>(e: V) -> V {
        abs(e)
    }
    #[inline(always)]
    fn phase<V: Lanes>(e: V, _mag: V) -> V {
        signbit(e)
    }
    #[inline(always)]
    fn unphase<V: Lanes>(e: V, p: V) -> V {
        e.xor(p)
    }
    #[inline(always)]
    fn conj_phase<V: Lanes>(p: V) -> V {
        p
    }
    #[inline(always)]
    fn phase_elem<V: Lanes>(p: V) -> V {
        V::splat(1.0).or(p)
    }

    #[inline(always)]
    fn assemble_tangent<V: Lanes>(urv: &UrvState<Self, V>, tri: &TriangleSvd<V>) -> (Mat2<V>, Mat2<V>) {
        let one = V::splat(1.0);
        let (ta, tp, dh) = (urv.tan_alpha, tri.tan_phi, urv.dh22);
        let c = urv.cos_alpha * tri.cos_phi;
        let t = neg(ta) * tp;
        let u = Mat2 {
            a11: (c * (one + t.xor(dh))).xor(urv.d11),
            a21: neg((c * (ta + tp.xor(dh))).xor(urv.d22)),
            a12: (c * (tp + ta.xor(dh))).xor(urv.d11),
            a22: (c * ta.fnmadd(tp, one.or(dh))).xor(urv.d22),
        };
        let cp = tri.cos_psi;
        let m = cp * tri.tan_psi;
        let v = Mat2 { a11: cp, a21: neg(m.xor(urv.dt22)), a12: m, a22: cp.xor(urv.dt22) };
        (permute_rows::<Self, V>(u, urv.perm_r), permute_rows::<Self, V>(v, urv.perm_c))
    }

    #[inline(always)]
    fn assemble_sine<V: Lanes>(urv: &UrvState<Self, V>, tri: &TriangleSvd<V>) -> (Mat2<V>, Mat2<V>) {
        let (ca, cp) = (urv.cos_alpha, tri.cos_phi);
        let sa = ca * urv.tan_alpha;
        let sp = cp * tri.tan_phi;
        let rd = Self::phase_elem(urv.dh22);
        let (p, q) = (ca * cp, sa * sp);
        let (p2, q2) = (ca * sp, sa * cp);
        let u = Mat2 {
            a11: rd.fnmadd(q, p).xor(urv.d11),
            a21: neg(rd.fmadd(p2, q2).xor(urv.d22)),
            a12: rd.fmadd(q2, p2).xor(urv.d11),
            a22: rd.fmsub(p, q).xor(urv.d22),
        };
        let cs = tri.cos_psi;
        let ss = cs * tri.tan_psi;
        let v = Mat2 { a11: cs, a21: neg(ss.xor(urv.dt22)), a12: ss, a22: cs.xor(urv.dt22) };
        (permute_rows::<Self, V>(u, urv.perm_r), permute_rows::<Self, V>(v, urv.perm_c))
    }

    #[inline(always)]
    fn load<V: Lanes>(re: &[f64], _im: &[f64]) -> V {
        V::load(re)
    }
    #[inline(always)]
    fn store<V: Lanes>(e: V, re: &mut [f64], _im: &mut [f64]) {
        e.store(re)
    }
}
