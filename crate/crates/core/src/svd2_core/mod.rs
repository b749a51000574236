//! The four-phase SVD of 2×2 matrices: exact scaling, URV factorization,
//! SVD of the resulting triangle, and assembly of `U` and `V`.
//!
//! Every phase is a branch-free function of lane vectors generic over the
//! lane type `V` and the number field `F` ([`Real`] or [`Complex`]), so
//! the width-1 and width-8 instantiations execute the same sequence of
//! operations lane by lane.
//!
//! The result satisfies `U Σ' V* = 2^s A` with `Σ' = diag(σ'max, σ'min)`,
//! `σ'max ≥ σ'min ≥ 0`, and `U`, `V` unitary. [`backscale`] optionally
//! converts `Σ'` to the singular values of `A`.

use std::fmt::Debug;

use crate::lane_math::{hypot, invsqrt, neg, LaneMask, Lanes};

mod complex;
mod real;


pub use complex::Complex;
pub use real::Real;

/// `DBL_MAX_EXP - 3`: the largest exponent allowed for a scaled component.
pub const H: f64 = (f64::MAX_EXP - 3) as f64;

/// `sqrt(DBL_MAX)`, the bound on `|tan 2φ|`.
#[allow(clippy::excessive_precision)]
pub const SQRT_DBL_MAX: f64 = 1.34078079299425956E+154;

/// The entries of a 2×2 matrix in column-major order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2<E> {
    pub a11: E,
    pub a21: E,
    pub a12: E,
    pub a22: E,
}

impl<E: Copy> Mat2<E> {
    pub fn new(a11: E, a21: E, a12: E, a22: E) -> Self {
        Mat2 { a11, a21, a12, a22 }
    }

    pub fn map<T>(self, mut f: impl FnMut(E) -> T) -> Mat2<T> {
        Mat2 { a11: f(self.a11), a21: f(self.a21), a12: f(self.a12), a22: f(self.a22) }
    }

    /// Entries in storage order `a11, a21, a12, a22`.
    pub fn entries(self) -> [E; 4] {
        [self.a11, self.a21, self.a12, self.a22]
    }

    /// `(row, column)` entry, 0-based.
    pub fn get(&self, i: usize, j: usize) -> E {
        match (i, j) {
            (0, 0) => self.a11,
            (1, 0) => self.a21,
            (0, 1) => self.a12,
            (1, 1) => self.a22,
            _ => panic!("index ({i}, {j}) out of range"),
        }
    }

    fn swap_rows(self, mask: LaneMask, select: impl Fn(LaneMask, E, E) -> E) -> Self {
        Mat2 {
            a11: select(mask, self.a11, self.a21),
            a21: select(mask, self.a21, self.a11),
            a12: select(mask, self.a12, self.a22),
            a22: select(mask, self.a22, self.a12),
        }
    }
}

/// A number field over which the pipeline runs.
///
/// `Elem<V>` holds one matrix entry per lane. `Phase<V>` holds a unimodular
/// factor: a `(cos, sin)` pair for [`Complex`], and only the sign bit
/// (`±0`) for [`Real`].
pub trait Field: Copy + Debug + Default + Send + Sync + 'static {
    type Elem<V: Lanes>: Copy + Debug + Send + Sync;
    type Phase<V: Lanes>: Copy + Debug + Send + Sync;

    const NAME: &'static str;
    /// Number of binary64 components per entry.
    const COMPONENTS: usize;

    fn map<V: Lanes>(e: Self::Elem<V>, f: impl Fn(V) -> V) -> Self::Elem<V>;
    fn zip<V: Lanes>(a: Self::Elem<V>, b: Self::Elem<V>, f: impl Fn(V, V) -> V) -> Self::Elem<V>;
    /// Real lanes embedded as entries (zero imaginary part).
    fn from_real<V: Lanes>(x: V) -> Self::Elem<V>;

    /// `min(DBL_MAX, min over all components of h - getexp(component))`.
    fn scale_exponent<V: Lanes>(a: &Mat2<Self::Elem<V>>, h: V) -> V;
    /// `|e|`: hypot of the components, or the absolute value.
    fn magnitude<V: Lanes>(e: Self::Elem<V>) -> V;
    /// `e^{i arg e}` given `|e|`.
    fn phase<V: Lanes>(e: Self::Elem<V>, mag: V) -> Self::Phase<V>;
    /// `conj(p) * e`.
    fn unphase<V: Lanes>(e: Self::Elem<V>, p: Self::Phase<V>) -> Self::Elem<V>;
    fn conj_phase<V: Lanes>(p: Self::Phase<V>) -> Self::Phase<V>;
    /// The phase as a matrix entry (`±1` in the real case).
    fn phase_elem<V: Lanes>(p: Self::Phase<V>) -> Self::Elem<V>;

    /// Tangent-form `(U, V)`.
    fn assemble_tangent<V: Lanes>(urv: &UrvState<Self, V>, tri: &TriangleSvd<V>) -> (Mat2<Self::Elem<V>>, Mat2<Self::Elem<V>>);
    /// Sine-form `(U, V)`.
    fn assemble_sine<V: Lanes>(urv: &UrvState<Self, V>, tri: &TriangleSvd<V>) -> (Mat2<Self::Elem<V>>, Mat2<Self::Elem<V>>);

    /// Loads lanes from component trains; `im` is ignored by [`Real`].
    fn load<V: Lanes>(re: &[f64], im: &[f64]) -> Self::Elem<V>;
    /// Stores lanes to component trains; `im` is ignored by [`Real`].
    fn store<V: Lanes>(e: Self::Elem<V>, re: &mut [f64], im: &mut [f64]);

    fn select<V: Lanes>(mask: LaneMask, a: Self::Elem<V>, b: Self::Elem<V>) -> Self::Elem<V> {
        Self::zip(a, b, |x, y| V::select(mask, x, y))
    }
}

/// Scaling exponent and the scaled matrix `Â = 2^s A`.
#[derive(Clone, Copy, Debug)]
pub struct ScaleResult<F: Field, V: Lanes> {
    pub s: V,
    pub a_hat: Mat2<F::Elem<V>>,
}

/// Entry magnitudes and column norms of `Â`.
#[derive(Clone, Copy, Debug)]
pub struct ColumnNorms<V> {
    pub abs: Mat2<V>,
    pub norm1: V,
    pub norm2: V,
}

/// The matrix after column pivoting or row sorting, with its carried
/// magnitudes and column norms.
#[derive(Clone, Copy, Debug)]
pub struct Permuted<F: Field, V: Lanes> {
    pub a: Mat2<F::Elem<V>>,
    pub abs: Mat2<V>,
    pub norm1: V,
    pub norm2: V,
    pub mask: LaneMask,
}

/// `A''' = D* A''`: the first column is real and non-negative.
#[derive(Clone, Copy, Debug)]
pub struct PhaseReduced<F: Field, V: Lanes> {
    pub a11: V,
    pub a21: V,
    pub a12: F::Elem<V>,
    pub a22: F::Elem<V>,
    pub d11: F::Phase<V>,
    pub d22: F::Phase<V>,
}

/// `R'' = Q_α* A'''`, before the phases of the second column are removed.
#[derive(Clone, Copy, Debug)]
pub struct GivensQr<F: Field, V: Lanes> {
    pub tan_alpha: V,
    pub cos_alpha: V,
    pub r11: V,
    pub r12: F::Elem<V>,
    pub r22: F::Elem<V>,
}

/// The real non-negative triangle `R` and the factors relating it to `Â`.
#[derive(Clone, Copy, Debug)]
pub struct PhaseFixed<F: Field, V: Lanes> {
    pub r12: V,
    pub r22: V,
    pub dt22: F::Phase<V>,
    pub dh22: F::Phase<V>,
}

/// `R = U+* Â V+` with `U+* = D̂* Q_α* D* P_r*` and `V+ = P_c D̃`.
#[derive(Clone, Copy, Debug)]
pub struct UrvState<F: Field, V: Lanes> {
    pub perm_c: LaneMask,
    pub perm_r: LaneMask,
    pub d11: F::Phase<V>,
    pub d22: F::Phase<V>,
    pub tan_alpha: V,
    pub cos_alpha: V,
    pub dt22: F::Phase<V>,
    pub dh22: F::Phase<V>,
    pub r11: V,
    pub r12: V,
    pub r22: V,
}

/// Rotations `U_φ*`, `V_ψ` with `U_φ* R V_ψ = Σ'`.
#[derive(Clone, Copy, Debug)]
pub struct TriangleSvd<V> {
    pub tan_phi: V,
    pub cos_phi: V,
    pub sec2_phi: V,
    pub tan_psi: V,
    pub cos_psi: V,
    pub sec2_psi: V,
    pub sig_max: V,
    pub sig_min: V,
}

/// `U`, `V`, the singular values and the scale exponent per lane.
///
/// Unless backscaled, `sig_max`/`sig_min` are those of `2^s A`. A lane whose
/// singular values were backscaled reports `s = -0`.
#[derive(Clone, Copy, Debug)]
pub struct Svd2<F: Field, V: Lanes> {
    pub u: Mat2<F::Elem<V>>,
    pub v: Mat2<F::Elem<V>>,
    pub sig_max: V,
    pub sig_min: V,
    pub s: V,
}

/// All intermediate states of one run of the pipeline.
#[derive(Clone, Copy, Debug)]
pub struct Trace<F: Field, V: Lanes> {
    pub scale: ScaleResult<F, V>,
    pub urv: UrvState<F, V>,
    pub tri: TriangleSvd<V>,
    pub svd: Svd2<F, V>,
}

/// How `U` and `V` are formed from the rotation parameters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Assembly {
    /// Products of cosines with tangent expressions.
    #[default]
    Tangent,
    /// Sines and cosines, with `sin β = cos β · tan β`.
    Sine,
}

/// Conversion of `Σ'` back to the singular values of `A`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Backscale {
    /// Return `Σ'` and `s` as computed.
    #[default]
    None,
    /// Backscale a lane only when both values stay finite and `σmin` stays
    /// normal or zero.
    Safe,
    /// Always backscale; may overflow or underflow.
    Unconditional,
}

/// Pipeline options.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Options {
    pub assembly: Assembly,
    pub backscale: Backscale,
}

/// `s` and `Â = 2^s A`.
#[inline(always)]
pub fn compute_scale<F: Field, V: Lanes>(a: &Mat2<F::Elem<V>>) -> ScaleResult<F, V> {
    let s = F::scale_exponent(a, V::splat(H));
    ScaleResult { s, a_hat: a.map(|e| F::map(e, |x| x.scalef(s))) }
}

/// Entry magnitudes and `‖â_j‖_F = hypot(|â_1j|, |â_2j|)`.
#[inline(always)]
pub fn column_norms<F: Field, V: Lanes>(a_hat: &Mat2<F::Elem<V>>) -> ColumnNorms<V> {
    let abs = a_hat.map(F::magnitude);
    ColumnNorms { abs, norm1: hypot(abs.a11, abs.a21), norm2: hypot(abs.a12, abs.a22) }
}

/// Swaps the columns in lanes where `‖â_1‖ < ‖â_2‖`; `mask` is `P_c`.
#[inline(always)]
pub fn column_pivot<F: Field, V: Lanes>(a_hat: &Mat2<F::Elem<V>>, norms: &ColumnNorms<V>) -> Permuted<F, V> {
    let c = norms.norm1.lt(norms.norm2);
    let a = Mat2 {
        a11: F::select(c, a_hat.a11, a_hat.a12),
        a21: F::select(c, a_hat.a21, a_hat.a22),
        a12: F::select(c, a_hat.a12, a_hat.a11),
        a22: F::select(c, a_hat.a22, a_hat.a21),
    };
    let m = &norms.abs;
    let abs = Mat2 {
        a11: V::select(c, m.a11, m.a12),
        a21: V::select(c, m.a21, m.a22),
        a12: V::select(c, m.a12, m.a11),
        a22: V::select(c, m.a22, m.a21),
    };
    Permuted {
        a,
        abs,
        norm1: V::select(c, norms.norm1, norms.norm2),
        norm2: V::select(c, norms.norm2, norms.norm1),
        mask: c,
    }
}

/// Swaps the rows in lanes where `|a'_11| < |a'_21|`; `mask` becomes `P_r`.
#[inline(always)]
pub fn row_sort<F: Field, V: Lanes>(p: &Permuted<F, V>) -> Permuted<F, V> {
    let r = p.abs.a11.lt(p.abs.a21);
    Permuted {
        a: p.a.swap_rows(r, F::select),
        abs: p.abs.swap_rows(r, V::select),
        norm1: p.norm1,
        norm2: p.norm2,
        mask: r,
    }
}

/// `D*` from the phases of the first column, and `A''' = D* A''`.
#[inline(always)]
pub fn left_phase_reduce<F: Field, V: Lanes>(p: &Permuted<F, V>) -> PhaseReduced<F, V> {
    let d11 = F::phase(p.a.a11, p.abs.a11);
    let d22 = F::phase(p.a.a21, p.abs.a21);
    PhaseReduced {
        a11: p.abs.a11,
        a21: p.abs.a21,
        a12: F::unphase(p.a.a12, d11),
        a22: F::unphase(p.a.a22, d22),
        d11,
        d22,
    }
}

/// The Givens rotation annihilating `a'''_21`, and `R'' = Q_α* A'''`.
///
/// `r11` is the already known norm of the pivot column.
#[inline(always)]
pub fn givens_qr<F: Field, V: Lanes>(a: &PhaseReduced<F, V>, norm1: V) -> GivensQr<F, V> {
    let one = V::splat(1.0);
    let neg_tan = (a.a21 / a.a11).max(V::splat(0.0));
    let tan_alpha = neg(neg_tan);
    let cos_alpha = invsqrt(tan_alpha.fmadd(tan_alpha, one));
    let r12 = F::zip(a.a12, a.a22, |a12, a22| cos_alpha * neg_tan.fmadd(a22, a12));
    let r22 = F::zip(a.a12, a.a22, |a12, a22| cos_alpha * neg_tan.fnmadd(a12, a22));
    GivensQr { tan_alpha, cos_alpha, r11: norm1, r12, r22 }
}

/// `D̃` and `D̂` making `r12` and then `r22` real and non-negative.
#[inline(always)]
pub fn phase_fix_r<F: Field, V: Lanes>(r12c: F::Elem<V>, r22c: F::Elem<V>) -> PhaseFixed<F, V> {
    let r12 = F::magnitude(r12c);
    let p = F::phase(r12c, r12);
    let r22p = F::unphase(r22c, p);
    let r22 = F::magnitude(r22p);
    PhaseFixed { r12, r22, dt22: F::conj_phase(p), dh22: F::phase(r22p, r22) }
}

/// The URV factorization of a well-scaled `Â`.
#[inline(always)]
pub fn urv<F: Field, V: Lanes>(a_hat: &Mat2<F::Elem<V>>) -> UrvState<F, V> {
    let norms = column_norms::<F, V>(a_hat);
    let piv = column_pivot::<F, V>(a_hat, &norms);
    let sorted = row_sort(&piv);
    let reduced = left_phase_reduce(&sorted);
    let qr = givens_qr(&reduced, sorted.norm1);
    let fixed = phase_fix_r::<F, V>(qr.r12, qr.r22);
    UrvState {
        perm_c: piv.mask,
        perm_r: sorted.mask,
        d11: reduced.d11,
        d22: reduced.d22,
        tan_alpha: qr.tan_alpha,
        cos_alpha: qr.cos_alpha,
        dt22: fixed.dt22,
        dh22: fixed.dh22,
        r11: qr.r11,
        // pivoting gives r11 ≥ max(r12, r22) exactly; restore it after rounding
        r12: fixed.r12.min(qr.r11),
        r22: fixed.r22.min(qr.r11),
    }
}

/// SVD of `[[r11, r12], [0, r22]]` with `r11 ≥ max(r12, r22) ≥ 0`.
#[inline(always)]
pub fn triangular_svd<V: Lanes>(r11: V, r12: V, r22: V) -> TriangleSvd<V> {
    let zero = V::splat(0.0);
    let one = V::splat(1.0);
    let x = (r12 / r11).max(zero);
    let y = (r22 / r11).max(zero);
    let num = x.min(y).scalef(one) * x.max(y);
    let den = (x - y).fmadd(x + y, one);
    let tan_2phi = (num / den).max(zero).min(V::splat(SQRT_DBL_MAX)).or(V::splat(-0.0));
    let tan_phi = tan_2phi / (one + tan_2phi.fmadd(tan_2phi, one).sqrt());
    let sec2_phi = tan_phi.fmadd(tan_phi, one);
    let cos_phi = invsqrt(sec2_phi);
    let tan_psi = y.fmsub(tan_phi, x);
    let sec2_psi = tan_psi.fmadd(tan_psi, one);
    let cos_psi = invsqrt(sec2_psi);
    let c = cos_phi * cos_psi;
    TriangleSvd {
        tan_phi,
        cos_phi,
        sec2_phi,
        tan_psi,
        cos_psi,
        sec2_psi,
        sig_max: (c * sec2_psi) * r11,
        sig_min: (c * sec2_phi) * r22,
    }
}

/// `(σmax, σmin, s)` after the requested backscaling.
#[inline(always)]
pub fn backscale<V: Lanes>(sig_max: V, sig_min: V, s: V, mode: Backscale) -> (V, V, V) {
    let neg_zero = V::splat(-0.0);
    let minus_s = s.xor(neg_zero);
    match mode {
        Backscale::None => (sig_max, sig_min, s),
        Backscale::Unconditional => (sig_max.scalef(minus_s), sig_min.scalef(minus_s), neg_zero),
        Backscale::Safe => {
            let e_max = sig_max.getexp() - s;
            let e_min = sig_min.getexp() - s;
            let fits = e_max.le(V::splat(f64::MAX_EXP as f64 - 1.0));
            let normal = V::splat(f64::MIN_EXP as f64 - 1.0).le(e_min) | sig_min.eq(V::splat(0.0));
            let ok = fits & normal;
            (
                V::select(ok, sig_max, sig_max.scalef(minus_s)),
                V::select(ok, sig_min, sig_min.scalef(minus_s)),
                V::select(ok, s, neg_zero),
            )
        }
    }
}

/// Runs every phase and keeps the intermediate states.
#[inline(always)]
pub fn svd2_traced<F: Field, V: Lanes>(a: &Mat2<F::Elem<V>>, opts: Options) -> Trace<F, V> {
    let scale = compute_scale::<F, V>(a);
    let urv = urv::<F, V>(&scale.a_hat);
    let tri = triangular_svd(urv.r11, urv.r12, urv.r22);
    let (u, v) = match opts.assembly {
        Assembly::Tangent => F::assemble_tangent(&urv, &tri),
        Assembly::Sine => F::assemble_sine(&urv, &tri),
    };
    let (sig_max, sig_min, s) = backscale(tri.sig_max, tri.sig_min, scale.s, opts.backscale);
    Trace { scale, urv, tri, svd: Svd2 { u, v, sig_max, sig_min, s } }
}

/// The SVD of each lane's matrix.
#[inline(always)]
pub fn svd2<F: Field, V: Lanes>(a: &Mat2<F::Elem<V>>, opts: Options) -> Svd2<F, V> {
    svd2_traced::<F, V>(a, opts).svd
}

/// `P m` for a row permutation `P` given by `mask`.
#[inline(always)]
fn permute_rows<F: Field, V: Lanes>(m: Mat2<F::Elem<V>>, mask: LaneMask) -> Mat2<F::Elem<V>> {
    m.swap_rows(mask, F::select)
}
