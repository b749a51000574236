//! Per-lane reference semantics of every primitive.
//!
//! The portable lane types apply these functions lane by lane, and the
//! AVX-512 lane type is required to reproduce them bit for bit.

const SIGN: u64 = 0x8000_0000_0000_0000;
const EXP_MASK: u64 = 0x7ff0_0000_0000_0000;
const MANT_MASK: u64 = 0x000f_ffff_ffff_ffff;

/// `a` if `a < b`, else `b`.
///
/// A NaN in either argument makes the comparison false, so a NaN first
/// argument yields `b` and a NaN second argument is returned as is. Equal
/// values (including `+0`/`-0`) also yield `b`. This is the `VMINPD` rule.
#[inline(always)]
pub fn relaxed_min(a: f64, b: f64) -> f64 {
    if a < b {
        a
    } else {
        b
    }
}

/// `a` if `a > b`, else `b`; see [`relaxed_min`].
#[inline(always)]
pub fn relaxed_max(a: f64, b: f64) -> f64 {
    if a > b {
        a
    } else {
        b
    }
}

/// `floor(log2 |a|)` as a float, exact for subnormals; `-inf` for `±0`.
///
/// `±inf` maps to `+inf` and NaN stays NaN, following `VGETEXPPD`.
#[inline]
pub fn getexp(a: f64) -> f64 {
    let bits = a.to_bits();
    let biased = ((bits & EXP_MASK) >> 52) as i32;
    let mant = bits & MANT_MASK;
    match biased {
        0x7ff => {
            if mant == 0 {
                f64::INFINITY
            } else {
                a
            }
        }
        0 => {
            if mant == 0 {
                f64::NEG_INFINITY
            } else {
                // value = mant * 2^-1074
                (63 - mant.leading_zeros() as i32 - 1074) as f64
            }
        }
        _ => (biased - 1023) as f64,
    }
}

/// `a * 2^floor(e)`, correctly rounded, with gradual underflow.
///
/// Special operands follow `VSCALEFPD`: `0 * 2^inf` and `inf * 2^-inf` are
/// NaN. Finite `e` is clamped to a range wide enough that the clamp never
/// changes the result.
#[inline]
pub fn scalef(a: f64, e: f64) -> f64 {
    if a.is_nan() || e.is_nan() {
        return a + e;
    }
    if e.is_infinite() {
        return if e > 0.0 {
            if a == 0.0 {
                f64::NAN
            } else {
                a * f64::INFINITY
            }
        } else if a.is_infinite() {
            f64::NAN
        } else {
            f64::from_bits(a.to_bits() & SIGN)
        };
    }
    let n = e.floor().clamp(-2200.0, 2200.0) as i32;
    scalbn(a, n)
}

/// `x * 2^n` with a single rounding.
fn scalbn(x: f64, mut n: i32) -> f64 {
    let two_1023 = f64::from_bits(0x7fe0_0000_0000_0000);
    // 2^-1022 * 2^53; keeps the final step's exponent below -53 so that a
    // subnormal result is rounded once.
    let two_m969 = f64::from_bits(((0x3ff - 969) as u64) << 52);
    let mut y = x;
    if n > 1023 {
        y *= two_1023;
        n -= 1023;
        if n > 1023 {
            y *= two_1023;
            n -= 1023;
            if n > 1023 {
                n = 1023;
            }
        }
    } else if n < -1022 {
        y *= two_m969;
        n += 969;
        if n < -1022 {
            y *= two_m969;
            n += 969;
            if n < -1022 {
                n = -1022;
            }
        }
    }
    y * f64::from_bits(((0x3ff + n) as u64) << 52)
}

#[inline(always)]
pub fn and(a: f64, b: f64) -> f64 {
    f64::from_bits(a.to_bits() & b.to_bits())
}

/// `!a & b` on the bit patterns; `andnot(-0.0, x)` is `|x|`.
#[inline(always)]
pub fn andnot(a: f64, b: f64) -> f64 {
    f64::from_bits(!a.to_bits() & b.to_bits())
}

#[inline(always)]
pub fn or(a: f64, b: f64) -> f64 {
    f64::from_bits(a.to_bits() | b.to_bits())
}

#[inline(always)]
pub fn xor(a: f64, b: f64) -> f64 {
    f64::from_bits(a.to_bits() ^ b.to_bits())
}

/// `a * b + c` with one rounding.
#[inline(always)]
pub fn fmadd(a: f64, b: f64, c: f64) -> f64 {
    a.mul_add(b, c)
}

/// `a * b - c` with one rounding.
#[inline(always)]
pub fn fmsub(a: f64, b: f64, c: f64) -> f64 {
    a.mul_add(b, -c)
}

/// `-(a * b) + c` with one rounding.
#[inline(always)]
pub fn fnmadd(a: f64, b: f64, c: f64) -> f64 {
    (-a).mul_add(b, c)
}
