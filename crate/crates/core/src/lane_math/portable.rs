use std::ops::{Add, Div, Mul, Sub};

use super::{scalar, LaneMask, Lanes};

/// One binary64 lane; the pointwise instantiation of every kernel.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
#[repr(transparent)]
pub struct F64x1(pub f64);

/// Eight binary64 lanes evaluated lane by lane with [`scalar`] semantics.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
#[repr(C, align(64))]
pub struct Portable8(pub [f64; 8]);

macro_rules! binop {
    ($t:ty, $tr:ident, $m:ident, $op:tt) => {
        impl $tr for $t {
            type Output = Self;
            #[inline(always)]
            fn $m(self, rhs: Self) -> Self {
                self.zip(rhs, |a, b| a $op b)
            }
        }
    };
}

impl F64x1 {
    #[inline(always)]
    fn zip(self, b: Self, f: impl Fn(f64, f64) -> f64) -> Self {
        F64x1(f(self.0, b.0))
    }
}

impl Portable8 {
    #[inline(always)]
    fn map(self, f: impl Fn(f64) -> f64) -> Self {
        let mut out = [0.0; 8];
        for i in 0..8 {
            out[i] = f(self.0[i]);
        }
        Portable8(out)
    }

    #[inline(always)]
    fn zip(self, b: Self, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut out = [0.0; 8];
        for i in 0..8 {
            out[i] = f(self.0[i], b.0[i]);
        }
        Portable8(out)
    }

    #[inline(always)]
    fn zip3(self, b: Self, c: Self, f: impl Fn(f64, f64, f64) -> f64) -> Self {
        let mut out = [0.0; 8];
        for i in 0..8 {
            out[i] = f(self.0[i], b.0[i], c.0[i]);
        }
        Portable8(out)
    }

    #[inline(always)]
    fn cmp(self, b: Self, f: impl Fn(f64, f64) -> bool) -> LaneMask {
        let mut bits = 0u8;
        for i in 0..8 {
            bits |= (f(self.0[i], b.0[i]) as u8) << i;
        }
        LaneMask(bits)
    }
}

binop!(F64x1, Add, add, +);
binop!(F64x1, Sub, sub, -);
binop!(F64x1, Mul, mul, *);
binop!(F64x1, Div, div, /);
binop!(Portable8, Add, add, +);
binop!(Portable8, Sub, sub, -);
binop!(Portable8, Mul, mul, *);
binop!(Portable8, Div, div, /);

impl Lanes for F64x1 {
    const WIDTH: usize = 1;

    #[inline(always)]
    fn splat(x: f64) -> Self {
        F64x1(x)
    }
    #[inline(always)]
    fn load(src: &[f64]) -> Self {
        F64x1(src[0])
    }
    #[inline(always)]
    fn store(self, dst: &mut [f64]) {
        dst[0] = self.0;
    }
    #[inline(always)]
    fn lane(self, i: usize) -> f64 {
        assert_eq!(i, 0);
        self.0
    }
    #[inline(always)]
    fn sqrt(self) -> Self {
        F64x1(self.0.sqrt())
    }
    #[inline(always)]
    fn fmadd(self, b: Self, c: Self) -> Self {
        F64x1(scalar::fmadd(self.0, b.0, c.0))
    }
    #[inline(always)]
    fn fmsub(self, b: Self, c: Self) -> Self {
        F64x1(scalar::fmsub(self.0, b.0, c.0))
    }
    #[inline(always)]
    fn fnmadd(self, b: Self, c: Self) -> Self {
        F64x1(scalar::fnmadd(self.0, b.0, c.0))
    }
    #[inline(always)]
    fn min(self, b: Self) -> Self {
        self.zip(b, scalar::relaxed_min)
    }
    #[inline(always)]
    fn max(self, b: Self) -> Self {
        self.zip(b, scalar::relaxed_max)
    }
    #[inline(always)]
    fn getexp(self) -> Self {
        F64x1(scalar::getexp(self.0))
    }
    #[inline(always)]
    fn scalef(self, e: Self) -> Self {
        self.zip(e, scalar::scalef)
    }
    #[inline(always)]
    fn and(self, b: Self) -> Self {
        self.zip(b, scalar::and)
    }
    #[inline(always)]
    fn andnot(self, b: Self) -> Self {
        self.zip(b, scalar::andnot)
    }
    #[inline(always)]
    fn or(self, b: Self) -> Self {
        self.zip(b, scalar::or)
    }
    #[inline(always)]
    fn xor(self, b: Self) -> Self {
        self.zip(b, scalar::xor)
    }
    #[inline(always)]
    fn lt(self, b: Self) -> LaneMask {
        LaneMask((self.0 < b.0) as u8)
    }
    #[inline(always)]
    fn le(self, b: Self) -> LaneMask {
        LaneMask((self.0 <= b.0) as u8)
    }
    #[inline(always)]
    fn eq(self, b: Self) -> LaneMask {
        LaneMask((self.0 == b.0) as u8)
    }
    #[inline(always)]
    fn select(mask: LaneMask, a: Self, b: Self) -> Self {
        if mask.test(0) {
            b
        } else {
            a
        }
    }
}

impl Lanes for Portable8 {
    const WIDTH: usize = 8;

    #[inline(always)]
    fn splat(x: f64) -> Self {
        Portable8([x; 8])
    }
    #[inline(always)]
    fn load(src: &[f64]) -> Self {
        let mut out = [0.0; 8];
        out.copy_from_slice(&src[..8]);
        Portable8(out)
    }
    #[inline(always)]
    fn store(self, dst: &mut [f64]) {
        dst[..8].copy_from_slice(&self.0);
    }
    #[inline(always)]
    fn lane(self, i: usize) -> f64 {
        self.0[i]
    }
    #[inline(always)]
    fn sqrt(self) -> Self {
        self.map(f64::sqrt)
    }
    #[inline(always)]
    fn fmadd(self, b: Self, c: Self) -> Self {
        self.zip3(b, c, scalar::fmadd)
    }
    #[inline(always)]
    fn fmsub(self, b: Self, c: Self) -> Self {
        self.zip3(b, c, scalar::fmsub)
    }
    #[inline(always)]
    fn fnmadd(self, b: Self, c: Self) -> Self {
        self.zip3(b, c, scalar::fnmadd)
    }
    #[inline(always)]
    fn min(self, b: Self) -> Self {
        self.zip(b, scalar::relaxed_min)
    }
    #[inline(always)]
    fn max(self, b: Self) -> Self {
        self.zip(b, scalar::relaxed_max)
    }
    #[inline(always)]
    fn getexp(self) -> Self {
        self.map(scalar::getexp)
    }
    #[inline(always)]
    fn scalef(self, e: Self) -> Self {
        self.zip(e, scalar::scalef)
    }
    #[inline(always)]
    fn and(self, b: Self) -> Self {
        self.zip(b, scalar::and)
    }
    #[inline(always)]
    fn andnot(self, b: Self) -> Self {
        self.zip(b, scalar::andnot)
    }
    #[inline(always)]
    fn or(self, b: Self) -> Self {
        self.zip(b, scalar::or)
    }
    #[inline(always)]
    fn xor(self, b: Self) -> Self {
        self.zip(b, scalar::xor)
    }
    #[inline(always)]
    fn lt(self, b: Self) -> LaneMask {
        self.cmp(b, |x, y| x < y)
    }
    #[inline(always)]
    fn le(self, b: Self) -> LaneMask {
        self.cmp(b, |x, y| x <= y)
    }
    #[inline(always)]
    fn eq(self, b: Self) -> LaneMask {
        self.cmp(b, |x, y| x == y)
    }
    #[inline(always)]
    fn select(mask: LaneMask, a: Self, b: Self) -> Self {
        let mut out = a.0;
        for (i, x) in out.iter_mut().enumerate() {
            if mask.test(i) {
                *x = b.0[i];
            }
        }
        Portable8(out)
    }
}
