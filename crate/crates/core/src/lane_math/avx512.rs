//! AVX-512F realization of [`Lanes`] at width 8.
//!
//! Only compiled when `avx512f` is enabled for the whole crate, so every
//! intrinsic here is statically available; that is the safety argument for
//! each `unsafe` block below that only calls a register-to-register intrinsic.

use std::arch::x86_64::*;
use std::fmt;
use std::ops::{Add, Div, Mul, Sub};

use super::{LaneMask, Lanes};

#[derive(Clone, Copy)]
#[repr(transparent)]
pub struct Avx512x8(pub __m512d);

impl fmt::Debug for Avx512x8 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Avx512x8").field(&self.to_array()).finish()
    }
}

#[inline(always)]
fn bits(x: __m512d) -> __m512i {
    unsafe { _mm512_castpd_si512(x) }
}

#[inline(always)]
fn float(x: __m512i) -> __m512d {
    unsafe { _mm512_castsi512_pd(x) }
}

impl Add for Avx512x8 {
    type Output = Self;
    #[inline(always)]
    fn add(self, rhs: Self) -> Self {
        Avx512x8(unsafe { _mm512_add_pd(self.0, rhs.0) })
    }
}

impl Sub for Avx512x8 {
    type Output = Self;
    #[inline(always)]
    fn sub(self, rhs: Self) -> Self {
        Avx512x8(unsafe { _mm512_sub_pd(self.0, rhs.0) })
    }
}

impl Mul for Avx512x8 {
    type Output = Self;
    #[inline(always)]
    fn mul(self, rhs: Self) -> Self {
        Avx512x8(unsafe { _mm512_mul_pd(self.0, rhs.0) })
    }
}

impl Div for Avx512x8 {
    type Output = Self;
    #[inline(always)]
    fn div(self, rhs: Self) -> Self {
        Avx512x8(unsafe { _mm512_div_pd(self.0, rhs.0) })
    }
}

impl Lanes for Avx512x8 {
    const WIDTH: usize = 8;

    #[inline(always)]
    fn splat(x: f64) -> Self {
        Avx512x8(unsafe { _mm512_set1_pd(x) })
    }
    #[inline(always)]
    fn load(src: &[f64]) -> Self {
        let src = &src[..8];
        // SAFETY: `src` holds at least 8 readable f64 values.
        Avx512x8(unsafe { _mm512_loadu_pd(src.as_ptr()) })
    }
    #[inline(always)]
    fn store(self, dst: &mut [f64]) {
        let dst = &mut dst[..8];
        // SAFETY: `dst` holds at least 8 writable f64 values.
        unsafe { _mm512_storeu_pd(dst.as_mut_ptr(), self.0) }
    }
    #[inline(always)]
    fn lane(self, i: usize) -> f64 {
        let mut buf = [0.0; 8];
        self.store(&mut buf);
        buf[i]
    }
    #[inline(always)]
    fn sqrt(self) -> Self {
        Avx512x8(unsafe { _mm512_sqrt_pd(self.0) })
    }
    #[inline(always)]
    fn fmadd(self, b: Self, c: Self) -> Self {
        Avx512x8(unsafe { _mm512_fmadd_pd(self.0, b.0, c.0) })
    }
    #[inline(always)]
    fn fmsub(self, b: Self, c: Self) -> Self {
        Avx512x8(unsafe { _mm512_fmsub_pd(self.0, b.0, c.0) })
    }
    #[inline(always)]
    fn fnmadd(self, b: Self, c: Self) -> Self {
        Avx512x8(unsafe { _mm512_fnmadd_pd(self.0, b.0, c.0) })
    }
    #[inline(always)]
    fn min(self, b: Self) -> Self {
        Avx512x8(unsafe { _mm512_min_pd(self.0, b.0) })
    }
    #[inline(always)]
    fn max(self, b: Self) -> Self {
        Avx512x8(unsafe { _mm512_max_pd(self.0, b.0) })
    }
    #[inline(always)]
    fn getexp(self) -> Self {
        Avx512x8(unsafe { _mm512_getexp_pd(self.0) })
    }
    #[inline(always)]
    fn scalef(self, e: Self) -> Self {
        Avx512x8(unsafe { _mm512_scalef_pd(self.0, e.0) })
    }
    #[inline(always)]
    fn and(self, b: Self) -> Self {
        Avx512x8(float(unsafe { _mm512_and_epi64(bits(self.0), bits(b.0)) }))
    }
    #[inline(always)]
    fn andnot(self, b: Self) -> Self {
        Avx512x8(float(unsafe { _mm512_andnot_epi64(bits(self.0), bits(b.0)) }))
    }
    #[inline(always)]
    fn or(self, b: Self) -> Self {
        Avx512x8(float(unsafe { _mm512_or_epi64(bits(self.0), bits(b.0)) }))
    }
    #[inline(always)]
    fn xor(self, b: Self) -> Self {
        Avx512x8(float(unsafe { _mm512_xor_epi64(bits(self.0), bits(b.0)) }))
    }
    #[inline(always)]
    fn lt(self, b: Self) -> LaneMask {
        LaneMask(unsafe { _mm512_cmp_pd_mask::<_CMP_LT_OQ>(self.0, b.0) })
    }
    #[inline(always)]
    fn le(self, b: Self) -> LaneMask {
        LaneMask(unsafe { _mm512_cmp_pd_mask::<_CMP_LE_OQ>(self.0, b.0) })
    }
    #[inline(always)]
    fn eq(self, b: Self) -> LaneMask {
        LaneMask(unsafe { _mm512_cmp_pd_mask::<_CMP_EQ_OQ>(self.0, b.0) })
    }
    #[inline(always)]
    fn select(mask: LaneMask, a: Self, b: Self) -> Self {
        Avx512x8(unsafe { _mm512_mask_blend_pd(mask.0, a.0, b.0) })
    }
}
