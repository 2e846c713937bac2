//! Arbitrary-precision reals for the few comparisons that land too close to
//! call in `f64`.

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;

/// Binary float with round-half-even.
pub type Real = FBig<HalfEven, 2>;

/// Default working precision in bits.
pub const DEFAULT_BITS: usize = 192;

/// Relative closeness below which an `f64` comparison is re-done here.
pub const RECHECK_WINDOW: f64 = 1e-6;

pub fn int(x: i64, bits: usize) -> Real {
    Real::from(x).with_precision(bits).value()
}

/// Exact conversion of an `f64` (every finite double is a dyadic rational).
pub fn from_f64(x: f64, bits: usize) -> Real {
    Real::try_from(x)
        .expect("finite input")
        .with_precision(bits)
        .value()
}

pub fn to_f64(x: &Real) -> f64 {
    x.to_f64().value()
}

pub fn sqrt_int(x: i64, bits: usize) -> Real {
    int(x, bits).sqrt()
}

/// `x * x`, kept at the operand precision.
pub fn square(x: &Real) -> Real {
    x * x
}

pub fn abs(x: &Real) -> Real {
    if x < &Real::ZERO {
        -x.clone()
    } else {
        x.clone()
    }
}

/// Bits needed for `digits` significant decimal digits, with a little slack.
pub fn digits_to_bits(digits: usize) -> usize {
    ((digits as f64 * std::f64::consts::LOG2_10).ceil() as usize).max(64) + 16
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_two_squared() {
        let r = sqrt_int(2, 256);
        let err = abs(&(square(&r) - int(2, 256)));
        assert!(err < from_f64(1e-70, 256));
        assert!((to_f64(&r) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn logs_agree_with_f64() {
        let x = from_f64(18906.0, 128);
        assert!((to_f64(&x.ln()) - 18906f64.ln()).abs() < 1e-13);
    }
}
