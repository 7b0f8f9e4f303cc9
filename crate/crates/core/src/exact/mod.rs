//! Exact scalars and the sup-norm ball / hyperplane-slab geometry shared by
//! every other module.

mod ball;
mod radical;

pub use ball::{Ball, HyperplaneNbhd};
pub use radical::{cmp_power, LinComb, PowerTerm, Radical};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Canonical arbitrary-precision rational (reduced, positive denominator).
pub type Rational = BigRational;

pub fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: &BigInt) -> Rational {
    Rational::from_integer(n.clone())
}

pub fn floor(r: &Rational) -> BigInt {
    r.numer().div_floor(r.denom())
}

pub fn ceil(r: &Rational) -> BigInt {
    -((-r.numer()).div_floor(r.denom()))
}

/// Integer power with a possibly negative exponent.
pub fn pow_i(r: &Rational, e: i64) -> Rational {
    if e == 0 {
        return Rational::one();
    }
    let mag = e.unsigned_abs();
    let n = num_traits::pow::pow(r.numer().clone(), mag as usize);
    let d = num_traits::pow::pow(r.denom().clone(), mag as usize);
    if e > 0 {
        Rational::new(n, d)
    } else {
        Rational::new(d, n)
    }
}

pub fn sup_norm(v: &[Rational]) -> Rational {
    v.iter().map(|x| x.abs()).max().unwrap_or_else(Rational::zero)
}

pub fn to_f64(r: &Rational) -> f64 {
    // Shift large operands so the quotient keeps full double precision.
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = (nb - db - 60).max(-1000).min(1000);
    let scaled = if shift > 0 {
        Rational::new(r.numer().clone(), r.denom() << shift as usize)
    } else {
        Rational::new(r.numer() << (-shift) as usize, r.denom().clone())
    };
    let q = floor(&scaled).to_f64().unwrap_or(f64::NAN);
    q * 2f64.powi(shift as i32)
}

/// Formats as `num/den`, the interchange form used in every JSON artifact.
pub fn fmt_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `a/b`, a bare integer, or a finite decimal such as `-0.125`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        let neg = ip.starts_with('-');
        let ip = ip.trim_start_matches(['-', '+']);
        if !fp.chars().all(|c| c.is_ascii_digit())
            || !ip.chars().all(|c| c.is_ascii_digit())
            || (ip.is_empty() && fp.is_empty())
        {
            return Err(bad());
        }
        let digits = format!("{}{}", if ip.is_empty() { "0" } else { ip }, fp);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow::pow(BigInt::from(10), fp.len());
        let r = Rational::new(n, d);
        return Ok(if neg { -r } else { r });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Decimal expansion truncated toward zero with `digits` fractional digits.
pub fn to_decimal(r: &Rational, digits: usize) -> String {
    let scale = num_traits::pow::pow(BigInt::from(10), digits);
    let scaled = (r.abs() * Rational::from_integer(scale.clone())).to_integer();
    let (ip, fp) = scaled.div_rem(&scale);
    let sign = if r.is_negative() && !scaled.is_zero() { "-" } else { "" };
    if digits == 0 {
        return format!("{sign}{ip}");
    }
    format!("{sign}{ip}.{:0>width$}", fp.to_string(), width = digits)
}

/// Largest rational `s = k / 2^bits` with `s^2 <= r`, for `r >= 0`.
pub fn sqrt_floor(r: &Rational, bits: usize) -> Rational {
    let scaled = floor(&(r * Rational::from_integer(BigInt::one() << (2 * bits))));
    Rational::new(scaled.sqrt(), BigInt::one() << bits)
}

/// Smallest rational `s = k / 2^bits` with `s^2 >= r`, for `r >= 0`.
pub fn sqrt_ceil(r: &Rational, bits: usize) -> Rational {
    let lo = sqrt_floor(r, bits);
    if &(&lo * &lo) >= r {
        lo
    } else {
        lo + Rational::new(BigInt::one(), BigInt::one() << bits)
    }
}

/// Exact square root when `r` is the square of a rational.
pub fn exact_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| Rational::new(n, d))
}
