//! Structure-of-arrays storage for batches of 2×2 matrices.
//!
//! Entry `(i, j)` of matrix `k` lives at index `k` of the train for
//! `(i, j)`; complex entries are split into a real and an imaginary train.
//! Trains are padded with zeros to `n̂ = ⌈n/S⌉·S` entries and start at
//! 64-byte boundaries, so each chunk of `S` consecutive matrices is one
//! aligned vector load per train.
//!
//! Entries are indexed in the order `a11, a21, a12, a22` throughout.

use num_complex::Complex64;

use crate::lane_math::S;
use crate::svd2_core::Mat2;

/// Number field of a batch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Real,
    Complex,
}

impl FieldKind {
    pub fn name(self) -> &'static str {
        match self {
            FieldKind::Real => "real",
            FieldKind::Complex => "complex",
        }
    }

    /// binary64 components per matrix entry.
    pub fn components(self) -> usize {
        match self {
            FieldKind::Real => 1,
            FieldKind::Complex => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LayoutError {
    #[error("matrix {index}: entry {entry} is not finite")]
    NonFinite { index: usize, entry: &'static str },
}

const ENTRY_NAMES: [&str; 4] = ["a11", "a21", "a12", "a22"];

/// Smallest multiple of [`S`] not below `n`.
pub fn padded_len(n: usize) -> usize {
    n.div_ceil(S) * S
}

#[derive(Clone, Copy, Default)]
#[repr(C, align(64))]
struct Block([f64; S]);

/// A zero-initialized, 64-byte-aligned run of binary64 values whose length
/// is a multiple of [`S`].
#[derive(Clone, Default)]
pub struct Train {
    blocks: Vec<Block>,
}

impl Train {
    pub fn zeros(n_hat: usize) -> Self {
        assert_eq!(n_hat % S, 0, "train length must be a multiple of S");
        Train { blocks: vec![Block::default(); n_hat / S] }
    }

    pub fn len(&self) -> usize {
        self.blocks.len() * S
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        // SAFETY: `Block` is `repr(C)` around `[f64; S]`, so the blocks are
        // `len()` contiguous, initialized f64 values.
        unsafe { std::slice::from_raw_parts(self.blocks.as_ptr().cast::<f64>(), self.len()) }
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        let len = self.len();
        // SAFETY: as in `as_slice`, with exclusive access through `&mut self`.
        unsafe { std::slice::from_raw_parts_mut(self.blocks.as_mut_ptr().cast::<f64>(), len) }
    }
}

impl std::fmt::Debug for Train {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.as_slice()).finish()
    }
}

impl PartialEq for Train {
    /// Bitwise equality.
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.as_slice().iter().zip(other.as_slice()).all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

fn trains(field: FieldKind, n_hat: usize, complex_only: bool) -> [Train; 4] {
    if complex_only && field == FieldKind::Real {
        Default::default()
    } else {
        std::array::from_fn(|_| Train::zeros(n_hat))
    }
}

/// `n` input matrices in train layout.
#[derive(Clone, Debug, PartialEq)]
pub struct Batch2x2 {
    field: FieldKind,
    n: usize,
    re: [Train; 4],
    im: [Train; 4],
}

impl Batch2x2 {
    /// `n` zero matrices.
    pub fn zeros(field: FieldKind, n: usize) -> Self {
        let n_hat = padded_len(n);
        Batch2x2 { field, n, re: trains(field, n_hat, false), im: trains(field, n_hat, true) }
    }

    pub fn pack_real(matrices: &[Mat2<f64>]) -> Result<Self, LayoutError> {
        let mut b = Self::zeros(FieldKind::Real, matrices.len());
        for (k, m) in matrices.iter().enumerate() {
            for (j, x) in m.entries().into_iter().enumerate() {
                if !x.is_finite() {
                    return Err(LayoutError::NonFinite { index: k, entry: ENTRY_NAMES[j] });
                }
                b.re[j].as_mut_slice()[k] = x;
            }
        }
        Ok(b)
    }

    pub fn pack_complex(matrices: &[Mat2<Complex64>]) -> Result<Self, LayoutError> {
        let mut b = Self::zeros(FieldKind::Complex, matrices.len());
        for (k, m) in matrices.iter().enumerate() {
            for (j, z) in m.entries().into_iter().enumerate() {
                if !z.is_finite() {
                    return Err(LayoutError::NonFinite { index: k, entry: ENTRY_NAMES[j] });
                }
                b.re[j].as_mut_slice()[k] = z.re;
                b.im[j].as_mut_slice()[k] = z.im;
            }
        }
        Ok(b)
    }

    pub fn field(&self) -> FieldKind {
        self.field
    }

    /// Number of genuine matrices.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Padded length of every train.
    pub fn padded_len(&self) -> usize {
        padded_len(self.n)
    }

    /// Real-part train of entry `j` (`0..4` for `a11, a21, a12, a22`).
    pub fn re(&self, j: usize) -> &[f64] {
        self.re[j].as_slice()
    }

    /// Imaginary-part train of entry `j`; empty for a real batch.
    pub fn im(&self, j: usize) -> &[f64] {
        self.im[j].as_slice()
    }

    pub fn re_mut(&mut self, j: usize) -> &mut [f64] {
        self.re[j].as_mut_slice()
    }

    pub fn im_mut(&mut self, j: usize) -> &mut [f64] {
        self.im[j].as_mut_slice()
    }

    pub fn real_matrix(&self, k: usize) -> Mat2<f64> {
        let e = |j: usize| self.re(j)[k];
        Mat2::new(e(0), e(1), e(2), e(3))
    }

    /// Matrix `k` as complex entries (zero imaginary parts for a real batch).
    pub fn complex_matrix(&self, k: usize) -> Mat2<Complex64> {
        let e = |j: usize| Complex64::new(self.re(j)[k], if self.field == FieldKind::Real { 0.0 } else { self.im(j)[k] });
        Mat2::new(e(0), e(1), e(2), e(3))
    }

    pub fn unpack_real(&self) -> Vec<Mat2<f64>> {
        (0..self.n).map(|k| self.real_matrix(k)).collect()
    }

    pub fn unpack_complex(&self) -> Vec<Mat2<Complex64>> {
        (0..self.n).map(|k| self.complex_matrix(k)).collect()
    }
}

/// One matrix's decomposition as returned by [`SvdBatchOut::record`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SvdRecord<E> {
    pub u: Mat2<E>,
    pub v: Mat2<E>,
    pub sig_max: f64,
    pub sig_min: f64,
    pub s: f64,
}

/// Output trains for `U`, `V`, `σ'max`, `σ'min` and `s`.
#[derive(Clone, Debug, PartialEq)]
pub struct SvdBatchOut {
    field: FieldKind,
    n: usize,
    pub(crate) u_re: [Train; 4],
    pub(crate) u_im: [Train; 4],
    pub(crate) v_re: [Train; 4],
    pub(crate) v_im: [Train; 4],
    pub(crate) sig_max: Train,
    pub(crate) sig_min: Train,
    pub(crate) s: Train,
}

impl SvdBatchOut {
    pub fn zeros(field: FieldKind, n: usize) -> Self {
        let n_hat = padded_len(n);
        SvdBatchOut {
            field,
            n,
            u_re: trains(field, n_hat, false),
            u_im: trains(field, n_hat, true),
            v_re: trains(field, n_hat, false),
            v_im: trains(field, n_hat, true),
            sig_max: Train::zeros(n_hat),
            sig_min: Train::zeros(n_hat),
            s: Train::zeros(n_hat),
        }
    }

    pub fn field(&self) -> FieldKind {
        self.field
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn padded_len(&self) -> usize {
        padded_len(self.n)
    }

    pub fn u_re(&self, j: usize) -> &[f64] {
        self.u_re[j].as_slice()
    }

    pub fn u_im(&self, j: usize) -> &[f64] {
        self.u_im[j].as_slice()
    }

    pub fn v_re(&self, j: usize) -> &[f64] {
        self.v_re[j].as_slice()
    }

    pub fn v_im(&self, j: usize) -> &[f64] {
        self.v_im[j].as_slice()
    }

    pub fn sig_max(&self) -> &[f64] {
        self.sig_max.as_slice()
    }

    pub fn sig_min(&self) -> &[f64] {
        self.sig_min.as_slice()
    }

    pub fn s(&self) -> &[f64] {
        self.s.as_slice()
    }

    /// Result `k` with complex entries (zero imaginary parts for a real
    /// batch). `k` may index a padding lane.
    pub fn record(&self, k: usize) -> SvdRecord<Complex64> {
        let pick = |re: &[Train; 4], im: &[Train; 4]| {
            let e = |j: usize| {
                let i = if self.field == FieldKind::Real { 0.0 } else { im[j].as_slice()[k] };
                Complex64::new(re[j].as_slice()[k], i)
            };
            Mat2::new(e(0), e(1), e(2), e(3))
        };
        SvdRecord {
            u: pick(&self.u_re, &self.u_im),
            v: pick(&self.v_re, &self.v_im),
            sig_max: self.sig_max()[k],
            sig_min: self.sig_min()[k],
            s: self.s()[k],
        }
    }

    pub fn real_record(&self, k: usize) -> SvdRecord<f64> {
        let pick = |re: &[Train; 4]| {
            let e = |j: usize| re[j].as_slice()[k];
            Mat2::new(e(0), e(1), e(2), e(3))
        };
        SvdRecord { u: pick(&self.u_re), v: pick(&self.v_re), sig_max: self.sig_max()[k], sig_min: self.sig_min()[k], s: self.s()[k] }
    }

    /// The `n` genuine results; padding lanes are dropped.
    pub fn unpack(&self) -> Vec<SvdRecord<Complex64>> {
        (0..self.n).map(|k| self.record(k)).collect()
    }

    pub fn unpack_real(&self) -> Vec<SvdRecord<f64>> {
        (0..self.n).map(|k| self.real_record(k)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn padded_len_examples() {
        assert_eq!(padded_len(0), 0);
        assert_eq!(padded_len(5), 8);
        assert_eq!(padded_len(8), 8);
        assert_eq!(padded_len(9), 16);
        for n in 0..100 {
            let p = padded_len(n);
            assert!(p >= n && p - n < S && p % S == 0);
        }
    }

    #[test]
    fn trains_are_aligned() {
        for n in [1, 8, 13, 1000] {
            let b = Batch2x2::zeros(FieldKind::Complex, n);
            for j in 0..4 {
                assert_eq!(b.re(j).as_ptr() as usize % 64, 0);
                assert_eq!(b.im(j).as_ptr() as usize % 64, 0);
                assert_eq!(b.re(j).len(), padded_len(n));
            }
            let o = SvdBatchOut::zeros(FieldKind::Real, n);
            assert_eq!(o.sig_max().as_ptr() as usize % 64, 0);
            assert_eq!(o.u_re(2).as_ptr() as usize % 64, 0);
            assert!(o.u_im(0).is_empty());
        }
    }

    #[test]
    fn pack_identity() {
        let b = Batch2x2::pack_real(&[Mat2::new(1.0, 0.0, 0.0, 1.0)]).unwrap();
        assert_eq!(b.re(0), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(b.re(1), &[0.0; 8]);
        assert_eq!(b.re(2), &[0.0; 8]);
        assert_eq!(b.re(3), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(b.im(0).is_empty());
    }

    #[test]
    fn pack_index_bookkeeping() {
        let ms: Vec<_> = (1..=8).map(|k| Mat2::new(k as f64, -1.0, -2.0, -3.0)).collect();
        let b = Batch2x2::pack_real(&ms).unwrap();
        assert_eq!(b.re(0), &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
        let z = Complex64::new(0.0, 0.0);
        let mut ms = vec![Mat2::new(z, z, z, z); 3];
        ms[1].a11 = Complex64::new(3.0, 4.0);
        let b = Batch2x2::pack_complex(&ms).unwrap();
        assert_eq!((b.re(0)[1], b.im(0)[1]), (3.0, 4.0));
        assert_eq!(b.padded_len(), 8);
    }

    #[test]
    fn pack_rejects_non_finite() {
        let err = Batch2x2::pack_real(&[Mat2::new(1.0, 0.0, 0.0, 1.0), Mat2::new(0.0, 0.0, f64::NAN, 0.0)]).unwrap_err();
        assert_eq!(err, LayoutError::NonFinite { index: 1, entry: "a12" });
        let bad = Complex64::new(0.0, f64::INFINITY);
        let z = Complex64::new(0.0, 0.0);
        assert!(Batch2x2::pack_complex(&[Mat2::new(z, z, z, bad)]).is_err());
    }

    #[test]
    fn unpack_drops_padding() {
        let o = SvdBatchOut::zeros(FieldKind::Complex, 5);
        assert_eq!(o.padded_len(), 8);
        assert_eq!(o.unpack().len(), 5);
        assert_eq!(o.unpack_real().len(), 5);
    }
}
