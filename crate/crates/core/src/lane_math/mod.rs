//! Branch-free lane-parallel binary64 primitives.
//!
//! Every kernel in [`crate::svd2_core`] is written once against the
//! [`Lanes`] trait and instantiated at width 1 ([`F64x1`]) and width
//! [`S`] ([`F64x8`]). Lane `i` of any result depends only on lane `i` of the
//! inputs, and the two widths agree bit for bit lane-wise.
//!
//! [`F64x8`] is backed by AVX-512F intrinsics when the crate is compiled
//! with that target feature, and by [`Portable8`] otherwise.

use std::fmt::Debug;
use std::ops::{Add, BitAnd, BitOr, Div, Mul, Not, Sub};

mod portable;
pub mod scalar;

#[cfg(all(target_arch = "x86_64", target_feature = "avx512f"))]
mod avx512;

pub use portable::{F64x1, Portable8};

#[cfg(all(target_arch = "x86_64", target_feature = "avx512f"))]
pub use avx512::Avx512x8;

/// The width-[`S`] lane type used by the vectorized path.
#[cfg(all(target_arch = "x86_64", target_feature = "avx512f"))]
pub type F64x8 = Avx512x8;
/// The width-[`S`] lane type used by the vectorized path.
#[cfg(not(all(target_arch = "x86_64", target_feature = "avx512f")))]
pub type F64x8 = Portable8;

/// Number of binary64 lanes in a 512-bit vector.
pub const S: usize = 8;

/// `DBL_TRUE_MIN`, the smallest positive subnormal.
pub const TRUE_MIN: f64 = f64::from_bits(1);

/// Outcome of a lane-wise predicate, bit `i` for lane `i`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct LaneMask(pub u8);

impl LaneMask {
    #[inline(always)]
    pub fn bits(self) -> u8 {
        self.0
    }

    #[inline(always)]
    pub fn test(self, lane: usize) -> bool {
        (self.0 >> lane) & 1 != 0
    }

    /// Mask with the low `width` bits set.
    #[inline(always)]
    pub fn full(width: usize) -> Self {
        LaneMask(((1u16 << width) - 1) as u8)
    }
}

impl Debug for LaneMask {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LaneMask({:08b})", self.0)
    }
}

impl BitAnd for LaneMask {
    type Output = Self;
    #[inline(always)]
    fn bitand(self, rhs: Self) -> Self {
        LaneMask(self.0 & rhs.0)
    }
}

impl BitOr for LaneMask {
    type Output = Self;
    #[inline(always)]
    fn bitor(self, rhs: Self) -> Self {
        LaneMask(self.0 | rhs.0)
    }
}

impl Not for LaneMask {
    type Output = Self;
    /// Complements every bit; callers mask with [`LaneMask::full`] when the
    /// unused high bits matter.
    #[inline(always)]
    fn not(self) -> Self {
        LaneMask(!self.0)
    }
}

/// A fixed-width vector of binary64 lanes.
///
/// Arithmetic (`+ - * /`, [`sqrt`](Lanes::sqrt), the fused forms) is IEEE-754
/// round-to-nearest-even with one rounding per operation.
pub trait Lanes:
    Copy
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    const WIDTH: usize;

    fn splat(x: f64) -> Self;
    /// Loads `WIDTH` values from the front of `src`.
    fn load(src: &[f64]) -> Self;
    /// Stores `WIDTH` values to the front of `dst`.
    fn store(self, dst: &mut [f64]);
    fn lane(self, i: usize) -> f64;

    fn sqrt(self) -> Self;
    /// `self * b + c`
    fn fmadd(self, b: Self, c: Self) -> Self;
    /// `self * b - c`
    fn fmsub(self, b: Self, c: Self) -> Self;
    /// `-(self * b) + c`
    fn fnmadd(self, b: Self, c: Self) -> Self;

    /// See [`scalar::relaxed_min`].
    fn min(self, b: Self) -> Self;
    /// See [`scalar::relaxed_max`].
    fn max(self, b: Self) -> Self;
    /// See [`scalar::getexp`].
    fn getexp(self) -> Self;
    /// See [`scalar::scalef`].
    fn scalef(self, e: Self) -> Self;

    fn and(self, b: Self) -> Self;
    /// `!self & b`
    fn andnot(self, b: Self) -> Self;
    fn or(self, b: Self) -> Self;
    fn xor(self, b: Self) -> Self;

    /// Ordered `<` (false on NaN).
    fn lt(self, b: Self) -> LaneMask;
    /// Ordered `<=` (false on NaN).
    fn le(self, b: Self) -> LaneMask;
    /// Ordered `==` (false on NaN).
    fn eq(self, b: Self) -> LaneMask;

    /// Lane `i` is `b`'s if bit `i` of `mask` is set, otherwise `a`'s.
    fn select(mask: LaneMask, a: Self, b: Self) -> Self;

    fn from_fn(mut f: impl FnMut(usize) -> f64) -> Self {
        let mut buf = [0.0; S];
        for (i, x) in buf.iter_mut().enumerate().take(Self::WIDTH) {
            *x = f(i);
        }
        Self::load(&buf)
    }

    fn to_array(self) -> [f64; S] {
        let mut buf = [0.0; S];
        self.store(&mut buf[..Self::WIDTH]);
        buf
    }
}

/// A complex value split into real and imaginary lanes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexPair<V> {
    pub re: V,
    pub im: V,
}

impl<V: Lanes> ComplexPair<V> {
    #[inline(always)]
    pub fn new(re: V, im: V) -> Self {
        ComplexPair { re, im }
    }

    #[inline(always)]
    pub fn splat(re: f64, im: f64) -> Self {
        ComplexPair { re: V::splat(re), im: V::splat(im) }
    }

    #[inline(always)]
    pub fn conj(self) -> Self {
        ComplexPair { re: self.re, im: neg(self.im) }
    }

    #[inline(always)]
    pub fn scale(self, c: V) -> Self {
        ComplexPair { re: c * self.re, im: c * self.im }
    }

    #[inline(always)]
    pub fn select(mask: LaneMask, a: Self, b: Self) -> Self {
        ComplexPair { re: V::select(mask, a.re, b.re), im: V::select(mask, a.im, b.im) }
    }
}

#[inline(always)]
fn neg_zero<V: Lanes>() -> V {
    V::splat(-0.0)
}

/// `|x|` as `andnot(-0, x)`.
#[inline(always)]
pub fn abs<V: Lanes>(x: V) -> V {
    neg_zero::<V>().andnot(x)
}

/// `-x` as `xor(x, -0)`.
#[inline(always)]
pub fn neg<V: Lanes>(x: V) -> V {
    x.xor(neg_zero())
}

/// The sign bit of `x` as `±0`.
#[inline(always)]
pub fn signbit<V: Lanes>(x: V) -> V {
    x.and(neg_zero())
}

/// `sqrt(a^2 + b^2)` without intermediate overflow.
///
/// `a' = max(|a|,|b|)`, `b' = min(|a|,|b|)`, `q = b' / max(a', TRUE_MIN)`,
/// result `a' * sqrt(fma(q, q, 1))`. Symmetric in its arguments and zero
/// exactly when both are zero.
#[inline(always)]
pub fn hypot<V: Lanes>(a: V, b: V) -> V {
    let (a, b) = (abs(a), abs(b));
    let hi = a.max(b);
    let lo = a.min(b);
    let q = lo / hi.max(V::splat(TRUE_MIN));
    hi * q.fmadd(q, V::splat(1.0)).sqrt()
}

/// `1 / sqrt(a)` with both operations correctly rounded.
#[inline(always)]
pub fn invsqrt<V: Lanes>(a: V) -> V {
    V::splat(1.0) / a.sqrt()
}

/// `a * b` with the fused groupings
/// `re = fma(re a, re b, -(im a * im b))`, `im = fma(re a, im b, im a * re b)`.
#[inline(always)]
pub fn complex_mul<V: Lanes>(a: ComplexPair<V>, b: ComplexPair<V>) -> ComplexPair<V> {
    ComplexPair {
        re: a.re.fmadd(b.re, neg(a.im * b.im)),
        im: a.re.fmadd(b.im, a.im * b.re),
    }
}

/// `conj(d) * z` with `re = fma(re d, re z, im d * im z)` and
/// `im = fms(re d, im z, im d * re z)`.
///
/// Bit-identical to `complex_mul(d.conj(), z)`.
#[inline(always)]
pub fn complex_mul_conj<V: Lanes>(d: ComplexPair<V>, z: ComplexPair<V>) -> ComplexPair<V> {
    ComplexPair {
        re: d.re.fmadd(z.re, d.im * z.im),
        im: d.re.fmsub(z.im, d.im * z.re),
    }
}

/// `e^{i arg z}` given a precomputed `|z|`.
///
/// `cos = min(|re z| / |z|, 1) | sign(re z)`, `sin = im z / max(|z|, TRUE_MIN)`.
/// For `z = ±0 ± 0i` this yields `(±1, ±0)` carrying the component signs.
#[inline(always)]
pub fn phase_with_abs<V: Lanes>(z: ComplexPair<V>, mag: V) -> ComplexPair<V> {
    let cos = (abs(z.re) / mag).min(V::splat(1.0)).or(signbit(z.re));
    let sin = z.im / mag.max(V::splat(TRUE_MIN));
    ComplexPair { re: cos, im: sin }
}

/// `(|z|, cos arg z, sin arg z)`.
#[inline(always)]
pub fn polar<V: Lanes>(z: ComplexPair<V>) -> (V, V, V) {
    let mag = hypot(z.re, z.im);
    let ph = phase_with_abs(z, mag);
    (mag, ph.re, ph.im)
}

/// Floating-point environment required by the kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum FpEnvError {
    #[error("subnormal results are flushed to zero")]
    FlushToZero,
    #[error("subnormal operands are treated as zero")]
    DenormalsAreZero,
    #[error("rounding mode is not round-to-nearest-even")]
    Rounding,
}

/// Checks round-to-nearest-even and gradual underflow at run time.
pub fn check_fp_env() -> Result<(), FpEnvError> {
    use std::hint::black_box;
    if black_box(f64::MIN_POSITIVE) / black_box(2.0) == 0.0 {
        return Err(FpEnvError::FlushToZero);
    }
    if black_box(TRUE_MIN) * black_box(2.0) != f64::from_bits(2) {
        return Err(FpEnvError::DenormalsAreZero);
    }
    let one = black_box(1.0f64);
    let ulp = f64::EPSILON;
    let ties_even = one + black_box(ulp / 2.0) == one
        && (one + ulp) + black_box(ulp / 2.0) == one + 2.0 * ulp;
    let nearest = one + black_box(0.75 * ulp) == one + ulp && -one - black_box(0.75 * ulp) == -one - ulp;
    if !(ties_even && nearest) {
        return Err(FpEnvError::Rounding);
    }
    Ok(())
}
