//! Exact decisions about real numbers of the form `c * b^(m/w)`.
//!
//! Every bound in the windowed searches is such a power of a rational, so
//! comparisons reduce to integer powers after clearing the root index.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{floor, pow_i, Rational};

/// Upper precision for interval refinement of sums with several distinct
/// radicals; beyond this the sum is treated as exactly zero.
pub const MAX_REFINE_BITS: usize = 8192;

/// `base^exp` with a positive rational base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Radical {
    pub base: Rational,
    pub exp: Rational,
}

impl Radical {
    pub fn new(base: Rational, exp: Rational) -> Self {
        debug_assert!(base.is_positive(), "radical base must be positive");
        Radical { base, exp }
    }

    pub fn of_int(base: &BigInt, exp: &Rational) -> Self {
        Radical::new(Rational::from_integer(base.clone()), exp.clone())
    }

    fn index(&self) -> (i64, u32) {
        let n = self.exp.numer().to_i64().expect("exponent numerator fits i64");
        let w = self.exp.denom().to_u32().expect("root index fits u32");
        (n, w)
    }

    /// The value when it is rational.
    pub fn value_if_rational(&self) -> Option<Rational> {
        if self.base.is_one() || self.exp.is_zero() {
            return Some(Rational::one());
        }
        let (n, w) = self.index();
        let pw = pow_i(&self.base, n);
        if w == 1 {
            return Some(pw);
        }
        let rn = pw.numer().nth_root(w);
        let rd = pw.denom().nth_root(w);
        (num_traits::pow::pow(rn.clone(), w as usize) == *pw.numer()
            && num_traits::pow::pow(rd.clone(), w as usize) == *pw.denom())
        .then(|| Rational::new(rn, rd))
    }

    /// Rational enclosure `lo <= value <= hi` of width about `2^-bits` relative.
    pub fn bounds(&self, bits: usize) -> (Rational, Rational) {
        if let Some(v) = self.value_if_rational() {
            return (v.clone(), v);
        }
        let (n, w) = self.index();
        let pw = pow_i(&self.base, n.abs());
        // (a/b)^(1/w) = (a b^(w-1))^(1/w) / b
        let a = pw.numer();
        let b = pw.denom();
        let scale = BigInt::one() << (bits * w as usize);
        let radicand = a * num_traits::pow::pow(b.clone(), (w - 1) as usize) * scale;
        let r = radicand.nth_root(w);
        let den = b * (BigInt::one() << bits);
        let lo = Rational::new(r.clone(), den.clone());
        let hi = Rational::new(r + BigInt::one(), den);
        if n >= 0 {
            (lo, hi)
        } else {
            (hi.recip(), lo.recip())
        }
    }

    /// Splits off the integer part of the exponent: `b^e = b^floor(e) * b^frac`.
    fn normalized(&self) -> (Rational, Radical) {
        let ip = floor(&self.exp);
        let frac = &self.exp - Rational::from_integer(ip.clone());
        let factor = pow_i(&self.base, ip.to_i64().expect("exponent fits i64"));
        (factor, Radical::new(self.base.clone(), frac))
    }
}

/// Nonnegative quantity `coeff * radical`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerTerm {
    pub coeff: Rational,
    pub radical: Radical,
}

impl PowerTerm {
    pub fn new(coeff: Rational, radical: Radical) -> Self {
        debug_assert!(!coeff.is_negative());
        PowerTerm { coeff, radical }
    }

    pub fn rational(c: Rational) -> Self {
        PowerTerm::new(c, Radical::new(Rational::one(), Rational::zero()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn upper_bound(&self, bits: usize) -> Rational {
        &self.coeff * self.radical.bounds(bits).1
    }

    pub fn lower_bound(&self, bits: usize) -> Rational {
        &self.coeff * self.radical.bounds(bits).0
    }

    pub fn to_f64(&self) -> f64 {
        super::to_f64(&self.coeff)
            * super::to_f64(&self.radical.base).powf(super::to_f64(&self.radical.exp))
    }

    /// Exact comparison of two nonnegative power terms.
    pub fn cmp_term(&self, other: &PowerTerm) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        // (c1 b1^e1)^D vs (c2 b2^e2)^D with D clearing both root indices.
        let d = self.radical.exp.denom().lcm(other.radical.exp.denom());
        let dd = d.to_i64().expect("root index fits i64");
        let e1 = (&self.radical.exp * Rational::from_integer(d.clone())).to_integer();
        let e2 = (&other.radical.exp * Rational::from_integer(d)).to_integer();
        let lhs = pow_i(&self.coeff, dd) * pow_i(&self.radical.base, e1.to_i64().unwrap());
        let rhs = pow_i(&other.coeff, dd) * pow_i(&other.radical.base, e2.to_i64().unwrap());
        lhs.cmp(&rhs)
    }

    pub fn cmp_rational(&self, r: &Rational) -> Ordering {
        if r.is_negative() {
            return Ordering::Greater;
        }
        self.cmp_term(&PowerTerm::rational(r.clone()))
    }

    /// High-precision decimal rendering (truncated enclosure midpoint).
    pub fn to_decimal(&self, digits: usize) -> String {
        let bits = (digits as f64 * 3.33) as usize + 16;
        let (lo, hi) = self.radical.bounds(bits);
        let mid = &self.coeff * (lo + hi) / Rational::from_integer(BigInt::from(2));
        super::to_decimal(&mid, digits)
    }
}

/// A real number `constant + sum coeff_i * radical_i`.
#[derive(Clone, Debug, Default)]
pub struct LinComb {
    pub constant: Rational,
    pub terms: Vec<(Rational, Radical)>,
}

impl LinComb {
    pub fn rational(c: Rational) -> Self {
        LinComb { constant: c, terms: Vec::new() }
    }

    pub fn term(coeff: Rational, radical: Radical) -> Self {
        LinComb { constant: Rational::zero(), terms: vec![(coeff, radical)] }
    }

    pub fn add(mut self, other: &LinComb) -> Self {
        self.constant += &other.constant;
        self.terms.extend(other.terms.iter().cloned());
        self
    }

    pub fn sub(self, other: &LinComb) -> Self {
        let neg = other.scale(&-Rational::one());
        self.add(&neg)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        LinComb {
            constant: &self.constant * k,
            terms: self.terms.iter().map(|(c, r)| (c * k, r.clone())).collect(),
        }
    }

    /// Folds rational radicals into the constant and merges equal radicals.
    fn normalize(&self) -> LinComb {
        let mut constant = self.constant.clone();
        let mut terms: Vec<(Rational, Radical)> = Vec::new();
        for (c, r) in &self.terms {
            if c.is_zero() {
                continue;
            }
            let (factor, r) = r.normalized();
            let c = c * factor;
            if let Some(v) = r.value_if_rational() {
                constant += c * v;
                continue;
            }
            match terms.iter_mut().find(|(_, r2)| *r2 == r) {
                Some((c2, _)) => *c2 += c,
                None => terms.push((c, r)),
            }
        }
        terms.retain(|(c, _)| !c.is_zero());
        LinComb { constant, terms }
    }

    fn enclosure(&self, bits: usize) -> (Rational, Rational) {
        let mut lo = self.constant.clone();
        let mut hi = self.constant.clone();
        for (c, r) in &self.terms {
            let (rl, rh) = r.bounds(bits);
            if c.is_positive() {
                lo += c * rl;
                hi += c * rh;
            } else {
                lo += c * rh;
                hi += c * rl;
            }
        }
        (lo, hi)
    }

    /// Sign of the number. Exact for up to one radical (or two with no
    /// constant); otherwise decided by interval refinement, and an
    /// unresolved enclosure at `MAX_REFINE_BITS` is reported as zero.
    pub fn sign(&self) -> Ordering {
        let n = self.normalize();
        match n.terms.len() {
            0 => n.constant.cmp(&Rational::zero()),
            1 => {
                let (c, r) = &n.terms[0];
                signed_pair(&n.constant, c, r, &Rational::zero(), None)
            }
            2 if n.constant.is_zero() => {
                let (c1, r1) = &n.terms[0];
                let (c2, r2) = &n.terms[1];
                signed_pair(&Rational::zero(), c1, r1, c2, Some(r2))
            }
            _ => {
                let mut bits = 64;
                while bits <= MAX_REFINE_BITS {
                    let (lo, hi) = n.enclosure(bits);
                    if lo.is_positive() {
                        return Ordering::Greater;
                    }
                    if hi.is_negative() {
                        return Ordering::Less;
                    }
                    bits *= 2;
                }
                Ordering::Equal
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        let (lo, hi) = self.normalize().enclosure(64);
        super::to_f64(&((lo + hi) / Rational::from_integer(BigInt::from(2))))
    }
}

/// Sign of `k + c1 r1 + c2 r2` where either `k = 0` or `r2` is absent.
fn signed_pair(
    k: &Rational,
    c1: &Rational,
    r1: &Radical,
    c2: &Rational,
    r2: Option<&Radical>,
) -> Ordering {
    let first = PowerTerm::new(c1.abs(), r1.clone());
    let second = match r2 {
        Some(r2) => PowerTerm::new(c2.abs(), r2.clone()),
        None => PowerTerm::rational(k.abs()),
    };
    let s1 = c1.cmp(&Rational::zero());
    let s2 = match r2 {
        Some(_) => c2.cmp(&Rational::zero()),
        None => k.cmp(&Rational::zero()),
    };
    if s2 == Ordering::Equal || s1 == s2 {
        return s1;
    }
    if s1 == Ordering::Equal {
        return s2;
    }
    match first.cmp_term(&second) {
        Ordering::Greater => s1,
        Ordering::Less => s2,
        Ordering::Equal => Ordering::Equal,
    }
}

/// Order of `c` against `q^(m/w) + shift`, decided exactly.
pub fn cmp_power(c: &Rational, q: &BigInt, m: i64, w: u32, shift: &Rational) -> Ordering {
    assert!(q.is_positive() && w >= 1, "cmp_power needs q >= 1 and w >= 1");
    let rad = Radical::of_int(q, &Rational::new(BigInt::from(m), BigInt::from(w)));
    LinComb::rational(c - shift)
        .sub(&LinComb::term(Rational::one(), rad))
        .sign()
}
