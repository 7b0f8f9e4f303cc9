//! Constants `κ`, `R`, `ε` and the height schedule `H_n`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{ceil, fmt_rational, pow_i, rat_int, Ball, LinComb, Radical, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[serde(rename = "paper")]
    Strict,
    Relaxed,
}

/// How `R` and `ε` are obtained.
#[derive(Clone, Debug)]
pub enum ParamMode {
    Strict,
    Relaxed { r: BigInt, eps: Rational },
}

pub const WAIVED_R_LOWER: &str = "R >= max(4/beta, 10^4 d^6 kappa^4)";
pub const WAIVED_GAMMA_SUM: &str = "(R^gamma - 1)^-1 <= (beta^2/3)^gamma";
pub const WAIVED_EPS: &str = "eps = 10^-2 d^-6 kappa^-2 R^(-20 d^2) rho0";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategyParams {
    pub d: usize,
    pub beta: Rational,
    pub gamma: Rational,
    pub rho0: Rational,
    pub kappa: Rational,
    pub r: BigInt,
    pub eps: Rational,
    pub mode: Mode,
    pub waived: Vec<&'static str>,
}

/// `κ = max over B₀ of max{‖x‖∞, |y|, ‖z‖∞} + 1` for the sup-norm ball.
pub fn kappa(b0: &Ball) -> Rational {
    b0.center.iter().map(|c| c.abs() + &b0.rho).max().expect("nonempty center") + Rational::one()
}

fn r_lower_holds(r: &Rational, d: usize, beta: &Rational, kappa: &Rational) -> bool {
    let four_over_beta = Rational::from_integer(4.into()) / beta;
    let big = Rational::from_integer(BigInt::from(10_000u32) * BigInt::from(d).pow(6)) * pow_i(kappa, 4);
    *r >= four_over_beta && *r >= big
}

/// `R^γ − (3/β²)^γ − 1 ≥ 0`, equivalent to `(R^γ − 1)^{-1} ≤ (β²/3)^γ`.
pub fn gamma_sum_holds(r: &Rational, beta: &Rational, gamma: &Rational) -> bool {
    let three = Rational::from_integer(3.into());
    let v = LinComb::term(Rational::one(), Radical::new(r.clone(), gamma.clone()))
        .sub(&LinComb::term(Rational::one(), Radical::new(three / (beta * beta), gamma.clone())))
        .sub(&LinComb::rational(Rational::one()));
    v.sign() != Ordering::Less
}

pub fn strict_eps(d: usize, kappa: &Rational, r: &BigInt, rho0: &Rational) -> Rational {
    let dd = Rational::from_integer(BigInt::from(d));
    Rational::new(1.into(), 100.into()) / pow_i(&dd, 6) / (kappa * kappa)
        / Rational::from_integer(r.pow((20 * d * d) as u32))
        * rho0
}

/// Least integer `R` meeting both conditions on `R`.
pub fn least_r(d: usize, beta: &Rational, gamma: &Rational, kappa: &Rational) -> BigInt {
    let four_over_beta = Rational::from_integer(4.into()) / beta;
    let big = Rational::from_integer(BigInt::from(10_000u32) * BigInt::from(d).pow(6)) * pow_i(kappa, 4);
    let r0 = std::cmp::max(ceil(&four_over_beta), ceil(&big));
    let holds = |r: &BigInt| gamma_sum_holds(&rat_int(r), beta, gamma);
    if holds(&r0) {
        return r0;
    }
    // (1 + (3/β²)^γ)^{1/γ} estimated in logs, then bracketed exactly.
    let g = crate::exact::to_f64(gamma);
    let b = crate::exact::to_f64(beta);
    let est = (1.0 + (3.0 / (b * b)).powf(g)).ln() / g;
    let mut hi = BigInt::from(2u32).pow(((est / std::f64::consts::LN_2).ceil().max(1.0) as u32) + 1);
    while !holds(&hi) {
        hi *= 2;
    }
    let mut lo = r0;
    // invariant: !holds(lo), holds(hi)
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi) / 2;
        if holds(&mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

pub fn derive_params(b0: &Ball, beta: &Rational, gamma: &Rational, mode: ParamMode) -> Result<StrategyParams> {
    if !beta.is_positive() || *beta >= Rational::one() {
        return Err(Error::InvalidParameter("beta must lie in (0, 1)".into()));
    }
    if !gamma.is_positive() {
        return Err(Error::InvalidParameter("gamma must be positive".into()));
    }
    let d = b0.d();
    if b0.rho > Rational::new(1.into(), BigInt::from(d)) {
        return Err(Error::InvalidParameter("initial radius must be at most 1/d".into()));
    }
    let kappa = kappa(b0);
    let rho0 = b0.rho.clone();
    match mode {
        ParamMode::Strict => {
            let r = least_r(d, beta, gamma, &kappa);
            let eps = strict_eps(d, &kappa, &r, &rho0);
            Ok(StrategyParams {
                d,
                beta: beta.clone(),
                gamma: gamma.clone(),
                rho0,
                kappa,
                r,
                eps,
                mode: Mode::Strict,
                waived: vec![],
            })
        }
        ParamMode::Relaxed { r, eps } => {
            if r <= BigInt::one() || !eps.is_positive() {
                return Err(Error::InvalidParameter("relaxed mode needs R > 1 and eps > 0".into()));
            }
            let rr = rat_int(&r);
            let mut waived = Vec::new();
            if !r_lower_holds(&rr, d, beta, &kappa) {
                waived.push(WAIVED_R_LOWER);
            }
            if !gamma_sum_holds(&rr, beta, gamma) {
                waived.push(WAIVED_GAMMA_SUM);
            }
            if eps != strict_eps(d, &kappa, &r, &rho0) {
                waived.push(WAIVED_EPS);
            }
            Ok(StrategyParams {
                d,
                beta: beta.clone(),
                gamma: gamma.clone(),
                rho0,
                kappa,
                r,
                eps,
                mode: Mode::Relaxed,
                waived,
            })
        }
    }
}

impl StrategyParams {
    pub fn r_rat(&self) -> Rational {
        rat_int(&self.r)
    }

    /// `R^e` for integer `e` of either sign.
    pub fn r_pow(&self, e: i64) -> Rational {
        pow_i(&self.r_rat(), e)
    }

    /// `H_n = 2d²εκρ₀^{-1}R^{n+1}`.
    pub fn h(&self, n: u64) -> Rational {
        let dd = Rational::from_integer(BigInt::from(2 * self.d * self.d));
        dd * &self.eps * &self.kappa / &self.rho0 * self.r_pow(n as i64 + 1)
    }

    /// `R^{-n}ρ₀`, the top radius of level `n`.
    pub fn level_radius(&self, n: u64) -> Rational {
        self.r_pow(-(n as i64)) * &self.rho0
    }

    /// `(βR^{-n}ρ₀, R^{-n}ρ₀]`.
    pub fn level_window(&self, n: u64) -> (Rational, Rational) {
        let top = self.level_radius(n);
        (&self.beta * &top, top)
    }

    /// Consecutive level windows are disjoint iff `βR ≥ 1`.
    pub fn windows_disjoint(&self) -> bool {
        &self.beta * self.r_rat() >= Rational::one()
    }

    pub fn two_h1_below_one(&self) -> bool {
        Rational::from_integer(2.into()) * self.h(1) < Rational::one()
    }

    /// `e_k`: `10d²` for `k = 1`, else `2d`.
    pub fn e_k(&self, k: u64) -> i64 {
        if k == 1 {
            10 * (self.d * self.d) as i64
        } else {
            2 * self.d as i64
        }
    }

    /// The smallness conditions that force `F_{B₂,P₂}(P₁) = 0` for members of
    /// `𝒞_{B,k,ε}`. For `k = 1`: `30d⁴κ²εR^{e_1+2} < 1`. For `k ≥ 2`:
    /// `120d⁶κ²εR^{2d+k+1}R^{-8d²-2kd+1} < 1`, `2d²R^{-8d²-(2k-2)d+1} ≤ 1/2`
    /// and `8d⁴R^{-4d-k+1} ≤ 1`.
    pub fn point_hyperplane_flags(&self, k: u64) -> bool {
        let d = self.d as i64;
        let k = k as i64;
        let c = |v: i64| Rational::from_integer(BigInt::from(v));
        let kk = &self.kappa * &self.kappa;
        if k == 1 {
            return c(30 * d.pow(4)) * kk * &self.eps * self.r_pow(self.e_k(1) + 2) < Rational::one();
        }
        let a = c(120 * d.pow(6)) * kk * &self.eps * self.r_pow(2 * d + k + 1 - 8 * d * d - 2 * k * d + 1);
        let b = c(2 * d * d) * self.r_pow(-8 * d * d - (2 * k - 2) * d + 1);
        let e = c(8 * d.pow(4)) * self.r_pow(-4 * d - k + 1);
        a < Rational::one() && b <= Rational::new(1.into(), 2.into()) && e <= Rational::one()
    }

    /// `(3R^{-n}ρ₀)^γ (R^γ − 1)^{-1} ≤ (βρ)^γ` for the ball radius `rho`.
    pub fn family_budget_holds(&self, n: u64, rho: &Rational) -> bool {
        let three = Rational::from_integer(3.into());
        let g = &self.gamma;
        let lhs = Radical::new(three * self.level_radius(n), g.clone());
        let brho = &self.beta * rho;
        let v = LinComb::term(Rational::one(), lhs)
            .sub(&LinComb::term(Rational::one(), Radical::new(&brho * self.r_rat(), g.clone())))
            .add(&LinComb::term(Rational::one(), Radical::new(brho, g.clone())));
        v.sign() != Ordering::Greater
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "d": self.d,
            "beta": fmt_rational(&self.beta),
            "gamma": fmt_rational(&self.gamma),
            "rho0": fmt_rational(&self.rho0),
            "kappa": fmt_rational(&self.kappa),
            "R": self.r.to_string(),
            "eps": fmt_rational(&self.eps),
            "eps_log10": log10_approx(&self.eps),
            "mode": self.mode,
            "waived": self.waived,
            "H1": fmt_rational(&self.h(1)),
            "two_H1_below_one": self.two_h1_below_one(),
            "windows_disjoint": self.windows_disjoint(),
        })
    }
}

/// `log10 |r|` from the bit lengths, for operands outside the f64 range.
pub fn log10_approx(r: &Rational) -> f64 {
    let bits = |n: &BigInt| -> f64 {
        let b = n.bits();
        let shift = b.saturating_sub(60);
        let top = (n.abs() >> shift).to_f64().unwrap_or(1.0);
        top.log2() + shift as f64
    };
    (bits(r.numer()) - bits(r.denom())) * std::f64::consts::LN_2 / std::f64::consts::LN_10
}
