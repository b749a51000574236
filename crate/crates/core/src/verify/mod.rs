//! Batch quality metrics in double-double arithmetic, and an independent
//! 2×2 SVD reference built from the eigendecomposition of `A*A`.
//!
//! For a lane with input `A` and output `(U, σmax, σmin, V, s)`:
//!
//! * `κ = fmin(σmax/σmin, ∞)`, so `0/0` counts as `∞`;
//! * `ρ = fmax(‖UΣV* − T‖_F / ‖T‖_F, 0)`, so `0/0` counts as `0`;
//! * `δ = ‖U*U − I‖_F` and `η = ‖V*V − I‖_F`.
//!
//! `T` is `A` when the lane was backscaled (`s` is `−0`) and `2^s·A`
//! otherwise. Lanes with a non-finite singular value are left out of `κ`
//! and `ρ` and counted instead. Batch metrics are lane-wise maxima.

mod wide;

pub use wide::{WideComplex, WideReal};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::batch_layout::{Batch2x2, SvdBatchOut, SvdRecord};
use crate::svd2_core::Mat2;

type M = [[WideComplex; 2]; 2];

fn wide_mat(a: &Mat2<Complex64>) -> M {
    let w = |i, j| WideComplex::from(a.get(i, j));
    [[w(0, 0), w(0, 1)], [w(1, 0), w(1, 1)]]
}

fn to_mat2(m: &M) -> Mat2<WideComplex> {
    Mat2::new(m[0][0], m[1][0], m[0][1], m[1][1])
}

fn frob_sqr(m: &M) -> WideReal {
    m.iter().flatten().fold(WideReal::ZERO, |s, z| s + z.norm_sqr())
}

/// `‖X*X − I‖_F`.
fn departure(x: &M) -> WideReal {
    let mut acc = WideReal::ZERO;
    for i in 0..2 {
        for j in 0..2 {
            let mut g = x[0][i].conj() * x[0][j] + x[1][i].conj() * x[1][j];
            if i == j {
                g = g - WideComplex::ONE;
            }
            acc = acc + g.norm_sqr();
        }
    }
    acc.sqrt()
}

/// `‖UΣV* − T‖_F / ‖T‖_F` with the `0/0 → 0` convention.
fn relative_residual(t: &M, u: &M, sig: [WideReal; 2], v: &M) -> WideReal {
    let mut num = WideReal::ZERO;
    for i in 0..2 {
        for j in 0..2 {
            let mut x = t[i][j];
            for (l, s) in sig.iter().enumerate() {
                x = x - (u[i][l] * v[j][l].conj()).scale(*s);
            }
            num = num + x.norm_sqr();
        }
    }
    let den = frob_sqr(t);
    if num.is_zero() {
        return WideReal::ZERO;
    }
    (num / den).sqrt()
}

/// Metrics of a single lane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LaneMetrics {
    /// `None` when a singular value is not finite.
    pub kappa: Option<WideReal>,
    pub rho: Option<WideReal>,
    pub delta: WideReal,
    pub eta: WideReal,
    /// Whether the output was compared against `A` itself.
    pub backscaled: bool,
}

pub fn lane_metrics(a: &Mat2<Complex64>, r: &SvdRecord<Complex64>) -> LaneMetrics {
    let backscaled = r.s == 0.0 && r.s.is_sign_negative();
    let u = wide_mat(&r.u);
    let v = wide_mat(&r.v);
    let delta = departure(&u);
    let eta = departure(&v);
    if !(r.sig_max.is_finite() && r.sig_min.is_finite()) {
        return LaneMetrics { kappa: None, rho: None, delta, eta, backscaled };
    }
    let (smax, smin) = (WideReal::from(r.sig_max), WideReal::from(r.sig_min));
    let kappa = if smin.is_zero() { WideReal::INFINITY } else { smax / smin };
    let mut t = wide_mat(a);
    // s is an integer; the all-zero input carries DBL_MAX and needs no scaling
    if !backscaled && r.s.abs() <= 1.0e6 {
        let s = r.s as i64;
        t = t.map(|row| row.map(|z| z.scalb(s)));
    }
    let rho = relative_residual(&t, &u, [smax, smin], &v);
    LaneMetrics { kappa: Some(kappa), rho: Some(rho), delta, eta, backscaled }
}

/// Lane-wise maxima over a batch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Metrics {
    pub kappa: WideReal,
    pub rho: WideReal,
    pub delta: WideReal,
    pub eta: WideReal,
    pub lanes: usize,
    /// Lanes left out of `κ` and `ρ` for a non-finite singular value.
    pub rho_excluded: usize,
    /// Lanes compared in the scaled domain.
    pub scaled_lanes: usize,
}

impl Default for Metrics {
    fn default() -> Self {
        Metrics {
            kappa: WideReal::ZERO,
            rho: WideReal::ZERO,
            delta: WideReal::ZERO,
            eta: WideReal::ZERO,
            lanes: 0,
            rho_excluded: 0,
            scaled_lanes: 0,
        }
    }
}

impl Metrics {
    pub fn from_lane(m: &LaneMetrics) -> Self {
        Metrics {
            kappa: m.kappa.unwrap_or(WideReal::ZERO),
            rho: m.rho.unwrap_or(WideReal::ZERO),
            delta: m.delta,
            eta: m.eta,
            lanes: 1,
            rho_excluded: m.rho.is_none() as usize,
            scaled_lanes: !m.backscaled as usize,
        }
    }

    /// The metrics of the union of the two underlying batches.
    pub fn merge(self, o: Self) -> Self {
        Metrics {
            kappa: self.kappa.max(o.kappa),
            rho: self.rho.max(o.rho),
            delta: self.delta.max(o.delta),
            eta: self.eta.max(o.eta),
            lanes: self.lanes + o.lanes,
            rho_excluded: self.rho_excluded + o.rho_excluded,
            scaled_lanes: self.scaled_lanes + o.scaled_lanes,
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("batch holds {batch} matrices but the output holds {out}")]
    Length { batch: usize, out: usize },
    #[error("batch is {batch} but the output is {out}")]
    Field { batch: &'static str, out: &'static str },
}

/// Metrics of `out` against the batch it was computed from.
///
/// Lanes are evaluated in parallel; the reduction is an exact maximum, so
/// the result does not depend on scheduling.
pub fn metrics(batch: &Batch2x2, out: &SvdBatchOut) -> Result<Metrics, MetricsError> {
    if batch.len() != out.len() {
        return Err(MetricsError::Length { batch: batch.len(), out: out.len() });
    }
    if batch.field() != out.field() {
        return Err(MetricsError::Field { batch: batch.field().name(), out: out.field().name() });
    }
    Ok((0..batch.len())
        .into_par_iter()
        .with_min_len(256)
        .map(|k| Metrics::from_lane(&lane_metrics(&batch.complex_matrix(k), &out.record(k))))
        .reduce(Metrics::default, Metrics::merge))
}

/// A reference SVD, `A = U diag(σmax, σmin) V*`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleSvd {
    pub sig_max: WideReal,
    pub sig_min: WideReal,
    pub u: Mat2<WideComplex>,
    pub v: Mat2<WideComplex>,
}

impl OracleSvd {
    /// `‖UΣV* − A‖_F / ‖A‖_F`.
    pub fn residual(&self, a: &Mat2<Complex64>) -> WideReal {
        let m = |x: &Mat2<WideComplex>| [[x.a11, x.a12], [x.a21, x.a22]];
        relative_residual(&wide_mat(a), &m(&self.u), [self.sig_max, self.sig_min], &m(&self.v))
    }
}

fn normalized(x: [WideComplex; 2]) -> Option<[WideComplex; 2]> {
    let n = (x[0].norm_sqr() + x[1].norm_sqr()).sqrt();
    if n.is_zero() {
        return None;
    }
    let r = WideReal::ONE / n;
    Some([x[0].scale(r), x[1].scale(r)])
}

/// The unit vector orthogonal to `x`, `(−conj x₂, conj x₁)`.
fn complement(x: [WideComplex; 2]) -> [WideComplex; 2] {
    [-x[1].conj(), x[0].conj()]
}

fn apply(a: &M, x: [WideComplex; 2]) -> [WideComplex; 2] {
    [a[0][0] * x[0] + a[0][1] * x[1], a[1][0] * x[0] + a[1][1] * x[1]]
}

/// Reference SVD of a complex matrix with finite components.
///
/// With `A*A = [[p, q], [q̄, r]]`, `σmax² = (p + r + √((p − r)² + 4|q|²))/2`
/// and `σmin = |det A| / σmax`. `V`'s first column is the `σmax²`
/// eigenvector, taken from whichever row of `A*A − σmax²I` avoids
/// cancellation. `U`'s columns are `Av₁/σmax` and its orthogonal
/// complement phased to match `Av₂`.
pub fn oracle_svd2(a: &Mat2<Complex64>) -> OracleSvd {
    let am = wide_mat(a);
    let col = |j: usize| [am[0][j], am[1][j]];
    let dot = |x: [WideComplex; 2], y: [WideComplex; 2]| x[0].conj() * y[0] + x[1].conj() * y[1];
    let (c1, c2) = (col(0), col(1));
    let p = c1[0].norm_sqr() + c1[1].norm_sqr();
    let r = c2[0].norm_sqr() + c2[1].norm_sqr();
    let q = dot(c1, c2);
    let two = WideReal::from(2.0);
    let disc = ((p - r).square() + q.norm_sqr() * WideReal::from(4.0)).sqrt();
    let lam = (p + r + disc) / two;
    let sig_max = lam.sqrt();
    let det = am[0][0] * am[1][1] - am[0][1] * am[1][0];
    let sig_min = if sig_max.is_zero() { WideReal::ZERO } else { det.abs() / sig_max };

    let e1 = [WideComplex::ONE, WideComplex::ZERO];
    let cand = if p >= r {
        [WideComplex::new((p - r + disc) / two, WideReal::ZERO), q.conj()]
    } else {
        [q, WideComplex::new((r - p + disc) / two, WideReal::ZERO)]
    };
    let v1 = normalized(cand).unwrap_or(e1);
    let v2 = complement(v1);
    let u1 = if sig_max.is_zero() {
        e1
    } else {
        let w = apply(&am, v1);
        normalized(w).unwrap_or(e1)
    };
    let mut u2 = complement(u1);
    let proj = dot(u2, apply(&am, v2));
    let mag = proj.abs();
    if !mag.is_zero() {
        let ph = proj.scale(WideReal::ONE / mag);
        u2 = [u2[0] * ph, u2[1] * ph];
    }
    OracleSvd {
        sig_max,
        sig_min,
        u: to_mat2(&[[u1[0], u2[0]], [u1[1], u2[1]]]),
        v: to_mat2(&[[v1[0], v2[0]], [v1[1], v2[1]]]),
    }
}

/// [`oracle_svd2`] for a real matrix.
pub fn oracle_svd2_real(a: &Mat2<f64>) -> OracleSvd {
    oracle_svd2(&a.map(|x| Complex64::new(x, 0.0)))
}
