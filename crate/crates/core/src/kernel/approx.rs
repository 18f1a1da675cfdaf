//! Fixed-point exponential used by approximate evaluation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn pow10(d: u32) -> BigInt {
    num_traits::pow(BigInt::from(10u32), d as usize)
}

/// Rational approximation of `exp(x)` with absolute error well below 10^-digits
/// for arguments of moderate size.
pub(crate) fn exp_rational(x: &BigRational, digits: u32) -> BigRational {
    if x.is_zero() {
        return BigRational::one();
    }
    // halve until |x / 2^k| < 1/2
    let mut k = 0u32;
    let mut reduced = x.clone();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    while reduced.abs() >= half {
        reduced /= BigInt::from(2);
        k += 1;
    }
    // guard digits cover the error amplification of k squarings and the
    // magnitude of the result
    let magnitude = x.abs().to_integer().to_u32().unwrap_or(2000) / 2 + 1;
    let guard = 12 + k / 3 + 1 + magnitude;
    let scale = pow10(digits + guard);
    let y = (reduced * BigRational::from_integer(scale.clone())).round().to_integer();

    let mut sum = scale.clone();
    let mut term = scale.clone();
    let mut n = 1u32;
    loop {
        term = (&term * &y).div_floor(&(&scale * BigInt::from(n)));
        if term.is_zero() {
            break;
        }
        sum += &term;
        n += 1;
    }
    for _ in 0..k {
        sum = (&sum * &sum).div_floor(&scale);
    }
    BigRational::new(sum, scale)
}
