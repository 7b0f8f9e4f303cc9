//! Orbits `g_t u_{x,y,z}^{-1} Z^{d+1}` and their systoles.
//!
//! `u_{x,y,z}` is the unipotent matrix with an identity block on the first
//! `d−1` coordinates, columns `z` and `x` above the `y` entry:
//!
//! ```text
//! [ I  z  x ]          [ I  −z  zy − x ]
//! [ 0  1  y ]   inv:   [ 0   1    −y   ]
//! [ 0  0  1 ]          [ 0   0     1   ]
//! ```
//!
//! and `g_t = diag(e^{λt}, …, e^{λt}, e^{μt}, e^{−t})`. Exponentials are
//! evaluated at a chosen binary precision, then the lattice is handled with
//! exact rational arithmetic, so every reported systole is within relative
//! error `2^{-prec}` of the true one.

mod lattice;
mod realexp;

pub use lattice::{lll, shortest_vector, Shortest};
pub use realexp::exp;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::diophantine::Weight;
use crate::error::{Error, Result};
use crate::exact::{to_f64, Rational};

pub const DEFAULT_PRECISION: u32 = 192;
pub const MAX_PRECISION: u32 = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnipotentParams {
    #[serde(with = "crate::serde_util::rational_vec")]
    pub x: Vec<Rational>,
    #[serde(with = "crate::serde_util::rational")]
    pub y: Rational,
    #[serde(with = "crate::serde_util::rational_vec")]
    pub z: Vec<Rational>,
}

impl UnipotentParams {
    pub fn new(x: Vec<Rational>, y: Rational, z: Vec<Rational>) -> Result<Self> {
        if x.len() != z.len() || x.is_empty() {
            return Err(Error::DimensionMismatch { expected: x.len().max(1), got: z.len() });
        }
        Ok(Self { x, y, z })
    }

    pub fn zero(d: usize) -> Self {
        Self { x: vec![Rational::zero(); d - 1], y: Rational::zero(), z: vec![Rational::zero(); d - 1] }
    }

    /// Builds the parameters from a point `(x, y, z)` of the game space.
    pub fn from_point(p: &[Rational]) -> Result<Self> {
        if p.len() < 3 || p.len() % 2 == 0 {
            return Err(Error::InvalidParameter(format!("point of dimension {} is not 2d-1", p.len())));
        }
        let n = (p.len() - 1) / 2;
        Self::new(p[..n].to_vec(), p[n].clone(), p[n + 1..].to_vec())
    }

    pub fn d(&self) -> usize {
        self.x.len() + 1
    }
}

fn identity(n: usize) -> Vec<Vec<Rational>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect()
}

/// `u_{x,y,z}` as rows.
pub fn u_matrix(p: &UnipotentParams) -> Vec<Vec<Rational>> {
    let d = p.d();
    let mut m = identity(d + 1);
    for i in 0..d - 1 {
        m[i][d - 1] = p.z[i].clone();
        m[i][d] = p.x[i].clone();
    }
    m[d - 1][d] = p.y.clone();
    m
}

/// `u_{x,y,z}^{-1}` as rows.
pub fn u_inverse(p: &UnipotentParams) -> Vec<Vec<Rational>> {
    let d = p.d();
    let mut m = identity(d + 1);
    for i in 0..d - 1 {
        m[i][d - 1] = -&p.z[i];
        m[i][d] = &p.z[i] * &p.y - &p.x[i];
    }
    m[d - 1][d] = -&p.y;
    m
}

pub fn mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = b[0].len();
    a.iter()
        .map(|row| (0..n).map(|j| row.iter().zip(b).map(|(x, r)| x * &r[j]).sum()).collect())
        .collect()
}

/// Diagonal of `g_t` at precision `prec`.
pub fn flow_diagonal(w: &Weight, t: &Rational, prec: u32) -> Vec<Rational> {
    let el = exp(&(&w.lambda * t), prec);
    let em = exp(&(&w.mu * t), prec);
    let et = exp(&-t, prec);
    let mut diag = vec![el; w.d - 1];
    diag.push(em);
    diag.push(et);
    diag
}

/// Generators (columns of `g_t u^{-1}`) of the lattice `g_t u^{-1} Z^{d+1}`.
pub fn orbit_generators(p: &UnipotentParams, w: &Weight, t: &Rational, prec: u32) -> Result<Vec<Vec<Rational>>> {
    if p.d() != w.d {
        return Err(Error::DimensionMismatch { expected: w.d, got: p.d() });
    }
    let diag = flow_diagonal(w, t, prec);
    let inv = u_inverse(p);
    let n = w.d + 1;
    Ok((0..n).map(|j| (0..n).map(|i| &diag[i] * &inv[i][j]).collect()).collect())
}

#[derive(Clone, Debug)]
pub struct SystoleSample {
    pub t: Rational,
    pub len_sq: Rational,
    pub length: f64,
    pub vector: Vec<Rational>,
    pub coeffs: Vec<BigInt>,
}

#[derive(Clone, Debug)]
pub struct SystoleTrace {
    pub samples: Vec<SystoleSample>,
    pub precision: u32,
}

impl SystoleTrace {
    pub fn min_length(&self) -> Option<f64> {
        self.samples.iter().map(|s| s.length).reduce(f64::min)
    }
}

/// Systole of a rational basis whose entries carry relative error
/// `2^{-precision}`; the precision only affects the reported bound.
pub fn systole(generators: &[Vec<Rational>]) -> Result<Shortest> {
    shortest_vector(generators)
}

pub fn orbit_trace(p: &UnipotentParams, w: &Weight, times: &[Rational], prec: u32) -> Result<SystoleTrace> {
    if times.iter().any(|t| t.is_negative()) || times.windows(2).any(|s| s[0] >= s[1]) {
        return Err(Error::InvalidParameter("times must be nonnegative and strictly increasing".into()));
    }
    let samples = times
        .iter()
        .map(|t| {
            let sv = shortest_vector(&orbit_generators(p, w, t, prec)?)?;
            Ok(SystoleSample {
                t: t.clone(),
                length: sv.length(),
                len_sq: sv.len_sq,
                vector: sv.vector,
                coeffs: sv.coeffs,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SystoleTrace { samples, precision: prec })
}

/// `n` equally spaced times from `0` to `horizon` inclusive.
pub fn time_grid(horizon: &Rational, n: usize) -> Vec<Rational> {
    if n <= 1 {
        return vec![Rational::zero()];
    }
    (0..n).map(|k| horizon * Rational::new(BigInt::from(k), BigInt::from(n - 1))).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    BoundedSoFar,
    Escaped(Rational),
}

/// Compares each sample against `floor`, accounting for the relative error
/// `2^{-precision}`. A sample whose uncertainty interval straddles the
/// floor yields `PrecisionExhausted`.
pub fn boundedness_verdict(trace: &SystoleTrace, floor: &Rational) -> Result<Verdict> {
    if !floor.is_positive() {
        return Err(Error::InvalidParameter("floor must be positive".into()));
    }
    let eps = Rational::new(BigInt::one(), BigInt::one() << (trace.precision as usize));
    let lo_f = (Rational::one() - &eps) * (Rational::one() - &eps);
    let hi_f = (Rational::one() + &eps) * (Rational::one() + &eps);
    let f2 = floor * floor;
    for s in &trace.samples {
        if &s.len_sq * &hi_f < f2 {
            return Ok(Verdict::Escaped(s.t.clone()));
        }
        if &s.len_sq * &lo_f < f2 {
            return Err(Error::PrecisionExhausted(trace.precision));
        }
    }
    Ok(Verdict::BoundedSoFar)
}

/// Recomputes the trace at doubled precision until the verdict is decided.
pub fn refined_verdict(
    p: &UnipotentParams,
    w: &Weight,
    times: &[Rational],
    floor: &Rational,
    prec: u32,
) -> Result<(Verdict, SystoleTrace)> {
    let mut prec = prec.max(16);
    loop {
        let trace = orbit_trace(p, w, times, prec)?;
        match boundedness_verdict(&trace, floor) {
            Ok(v) => return Ok((v, trace)),
            Err(Error::PrecisionExhausted(_)) if prec < MAX_PRECISION => prec *= 2,
            Err(e) => return Err(e),
        }
    }
}

/// One CSV line `t,systole,v_1,…,v_{d+1},precision_bits`.
pub fn csv_line(s: &SystoleSample, prec: u32) -> String {
    let mut fields = vec![format!("{}", to_f64(&s.t)), format!("{:.12e}", s.length)];
    fields.extend(s.vector.iter().map(|v| format!("{:.12e}", to_f64(v))));
    fields.push(prec.to_string());
    fields.join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn inverse_example() {
        let p = UnipotentParams::new(vec![rat(1, 2)], rat(1, 2), vec![rat(0, 1)]).unwrap();
        let inv = u_inverse(&p);
        assert_eq!(inv[0], vec![rat(1, 1), rat(0, 1), rat(-1, 2)]);
        assert_eq!(inv[1], vec![rat(0, 1), rat(1, 1), rat(-1, 2)]);
        assert_eq!(inv[2], vec![rat(0, 1), rat(0, 1), rat(1, 1)]);
        assert_eq!(u_inverse(&UnipotentParams::zero(3)), identity(4));
    }

    #[test]
    fn inverse_law() {
        let p = UnipotentParams::new(vec![rat(3, 7), rat(-2, 5)], rat(9, 4), vec![rat(1, 3), rat(5, 11)]).unwrap();
        assert_eq!(mat_mul(&u_matrix(&p), &u_inverse(&p)), identity(4));
        assert_eq!(mat_mul(&u_inverse(&p), &u_matrix(&p)), identity(4));
    }

    #[test]
    fn trace_at_zero_is_one() {
        let tr = orbit_trace(&UnipotentParams::zero(2), &Weight::uniform(2), &[rat(0, 1)], 64).unwrap();
        assert_eq!(tr.samples[0].len_sq, rat(1, 1));
    }

    #[test]
    fn collapse_at_ln20() {
        let p = UnipotentParams::new(vec![rat(1, 2)], rat(1, 2), vec![rat(0, 1)]).unwrap();
        let t = Rational::from_float(20f64.ln()).unwrap();
        let tr = orbit_trace(&p, &Weight::uniform(2), &[t], DEFAULT_PRECISION).unwrap();
        assert!(tr.samples[0].length <= 0.1 + 1e-12);
    }

    #[test]
    fn verdicts() {
        let mk = |lens: &[i64]| SystoleTrace {
            samples: lens
                .iter()
                .enumerate()
                .map(|(i, &l)| SystoleSample {
                    t: rat(i as i64, 1),
                    len_sq: rat(l * l, 100),
                    length: l as f64 / 10.0,
                    vector: vec![],
                    coeffs: vec![],
                })
                .collect(),
            precision: 64,
        };
        assert_eq!(boundedness_verdict(&mk(&[10, 10]), &rat(1, 2)).unwrap(), Verdict::BoundedSoFar);
        assert_eq!(boundedness_verdict(&mk(&[]), &rat(1, 2)).unwrap(), Verdict::BoundedSoFar);
        assert_eq!(boundedness_verdict(&mk(&[10, 4, 1]), &rat(1, 2)).unwrap(), Verdict::Escaped(rat(1, 1)));
        assert!(matches!(boundedness_verdict(&mk(&[5]), &rat(1, 2)), Err(Error::PrecisionExhausted(64))));
    }

    #[test]
    fn escape_time_for_decay() {
        let p = UnipotentParams::new(vec![rat(1, 2)], rat(1, 2), vec![rat(0, 1)]).unwrap();
        let times = time_grid(&rat(5, 1), 101);
        let (v, _) = refined_verdict(&p, &Weight::uniform(2), &times, &rat(1, 10), 64).unwrap();
        // 2e^{-t} = 1/10 at t = ln 20 ≈ 2.9957; first grid point beyond is 3.0
        assert_eq!(v, Verdict::Escaped(rat(3, 1)));
    }
}
