//! Fixed-point exponential on exact rational arguments.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::exact::{to_f64, Rational};

/// `e^t` as a dyadic rational with relative error below `2^{-prec}`.
///
/// The argument is halved `m` times until `|t / 2^m| ≤ 1/2`, the Taylor
/// series is summed in fixed point, and the result squared `m` times. Each
/// squaring at most doubles the relative error, so `m + 64` guard bits
/// cover both the series truncation and the squarings.
pub fn exp(t: &Rational, prec: u32) -> Rational {
    if t.is_zero() {
        return Rational::one();
    }
    let mag = to_f64(&t.abs());
    let m: u32 = if mag <= 0.5 { 0 } else { (mag.log2().ceil() as i64 + 1).max(0) as u32 };
    let p = prec as usize + m as usize + 64;
    let one = BigInt::one() << p;
    let scaled = t * Rational::from_integer(BigInt::one() << (p - m as usize));
    let r = scaled.round().to_integer();
    let mut sum = one.clone();
    let mut term = one;
    let mut k: u32 = 1;
    loop {
        term = (&term * &r >> p) / BigInt::from(k);
        if term.is_zero() {
            break;
        }
        sum += &term;
        k += 1;
    }
    for _ in 0..m {
        sum = &sum * &sum >> p;
    }
    Rational::new(sum, BigInt::one() << p)
}
