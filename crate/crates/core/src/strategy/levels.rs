//! Ball levels `ℬ_n`, denominator windows `𝒱_B`, `𝒱_{B,k}`, the `ℬ_n′`
//! test and the hyperplanes `E_k(B)`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};
use serde::Serialize;

use super::params::{log10_approx, StrategyParams};
use crate::attachments::{attached_hyperplane, dual_search, AttachedHyperplane};
use crate::diophantine::{delta_intersects_ball, BallScan, Budget, RationalPoint, Weight};
use crate::error::{Error, Result};
use crate::exact::{exact_sqrt, fmt_rational, rat_int, sqrt_floor, Ball, HyperplaneNbhd, PowerTerm, Radical, Rational};

/// The unique `n ≥ 0` with `βR^{-n}ρ₀ < ρ(B) ≤ R^{-n}ρ₀`.
pub fn classify_ball(ball: &Ball, p: &StrategyParams) -> Option<u64> {
    if ball.rho > p.rho0 {
        return None;
    }
    let ratio = &p.rho0 / &ball.rho;
    let est = (log10_approx(&ratio) / log10_approx(&p.r_rat())).floor().max(0.0) as u64;
    (est.saturating_sub(1)..=est + 1).find(|&n| {
        let (lo, hi) = p.level_window(n);
        lo < ball.rho && ball.rho <= hi
    })
}

/// Compares `q^{1+λ}` with `h·R^{e(1+λ)}`.
fn cmp_q(q: &BigInt, h: &Rational, e: i64, p: &StrategyParams, w: &Weight) -> Ordering {
    let one_l = Rational::one() + &w.lambda;
    let lhs = PowerTerm::new(Rational::one(), Radical::of_int(q, &one_l));
    let rhs = PowerTerm::new(h.clone(), Radical::new(p.r_rat(), Rational::from_integer(e.into()) * one_l));
    lhs.cmp_term(&rhs)
}

/// `log10` of `(h R^{e(1+λ)})^{1/(1+λ)}`.
fn log_q_bound(h: &Rational, e: i64, p: &StrategyParams, w: &Weight) -> f64 {
    let l = crate::exact::to_f64(&w.lambda);
    log10_approx(h) / (1.0 + l) + e as f64 * log10_approx(&p.r_rat())
}

/// Least integer `q ≥ 1` with `q^{1+λ} ≥ h R^{e(1+λ)}`.
fn least_q(h: &Rational, e: i64, p: &StrategyParams, w: &Weight) -> BigInt {
    let est = 10f64.powf(log_q_bound(h, e, p, w)).floor().max(1.0);
    let mut q = BigInt::from_f64(est).unwrap_or_else(BigInt::one).max(BigInt::one());
    while q > BigInt::one() && cmp_q(&(&q - 1), h, e, p, w) != Ordering::Less {
        q -= 1;
    }
    while cmp_q(&q, h, e, p, w) == Ordering::Less {
        q += 1;
    }
    q
}

/// Greatest integer `q` with `q^{1+λ} ≤ h R^{e(1+λ)}` (possibly 0).
fn greatest_q(h: &Rational, e: i64, p: &StrategyParams, w: &Weight) -> BigInt {
    let est = 10f64.powf(log_q_bound(h, e, p, w)).floor().max(0.0);
    let mut q = BigInt::from_f64(est).unwrap_or_default();
    while q > BigInt::zero() && cmp_q(&q, h, e, p, w) == Ordering::Greater {
        q -= 1;
    }
    while cmp_q(&(&q + 1), h, e, p, w) != Ordering::Greater {
        q += 1;
    }
    q
}

/// Largest `log10 q` the enumerators will ever touch.
const Q_LOG_CAP: f64 = 15.0;

/// Integer denominators compatible with `𝒱_{B,k}` for `B ∈ ℬ_n`, or with
/// `𝒱_B` when `k = 0`; `None` when empty.
pub fn q_window(n: u64, k: u64, p: &StrategyParams, w: &Weight) -> Option<(BigInt, BigInt)> {
    let hn = p.h(n);
    let two_hn1 = Rational::from_integer(2.into()) * p.h(n + 1);
    let d2 = (p.d * p.d) as i64;
    let (e_lo, e_hi) = match k {
        0 => (0, None),
        1 => (0, Some(10 * d2)),
        k => (10 * d2 + (2 * k as i64 - 4) * p.d as i64, Some(10 * d2 + (2 * k as i64 - 2) * p.d as i64)),
    };
    let log_lo = log_q_bound(&hn, e_lo, p, w);
    let log_cap = log10_approx(&two_hn1);
    if log_lo > log_cap + 1.0 || log_cap < -1.0 {
        return None;
    }
    if log_lo > Q_LOG_CAP || log_cap.min(e_hi.map_or(f64::INFINITY, |e| log_q_bound(&hn, e, p, w))) > Q_LOG_CAP {
        // outside enumerable range; callers treat this as budget exhaustion
        let lo = BigInt::from(10u64).pow(Q_LOG_CAP as u32);
        return Some((lo.clone(), lo * 10));
    }
    let lo = least_q(&hn, e_lo, p, w);
    let mut hi = if two_hn1 < Rational::zero() { BigInt::zero() } else { two_hn1.floor().to_integer() };
    if let Some(e) = e_hi.filter(|&e| log_q_bound(&hn, e, p, w) <= log_cap + 1.0) {
        hi = hi.min(greatest_q(&hn, e, p, w));
    }
    (lo <= hi).then_some((lo, hi))
}

/// The bound `H_B(P)/q(P)^{1+λ} ≤ 2R^{-8d²-2kd+1}` for `P ∈ 𝒱_{B,k}`,
/// `k ≥ 2`, checked at the window endpoints: the largest height `2H_{n+1}`
/// over the smallest denominator `H_n^{1/(1+λ)}R^{e}` gives `2R^{1-e(1+λ)}`
/// whatever `n` is.
pub fn ine_qxi_holds(k: u64, p: &StrategyParams, w: &Weight) -> bool {
    assert!(k >= 2, "the bound is stated for k >= 2");
    let d = p.d as i64;
    let e = 10 * d * d + (2 * k as i64 - 4) * d;
    let two = Rational::from_integer(2.into());
    let endpoint = Rational::one() - Rational::from_integer(e.into()) * (Rational::one() + &w.lambda);
    let lhs = PowerTerm::new(two.clone(), Radical::new(p.r_rat(), endpoint));
    let rhs = PowerTerm::new(two, Radical::new(p.r_rat(), Rational::from_integer((-8 * d * d - 2 * k as i64 * d + 1).into())));
    lhs.cmp_term(&rhs) != Ordering::Greater
}

/// Whether `q(P)` satisfies the `𝒱_{B,k}` bounds (the height condition is separate).
pub fn q_in_window(q: &BigInt, n: u64, k: u64, p: &StrategyParams, w: &Weight) -> bool {
    let hn = p.h(n);
    let d2 = (p.d * p.d) as i64;
    let (e_lo, e_hi) = if k == 1 {
        (0, 10 * d2)
    } else {
        (10 * d2 + (2 * k as i64 - 4) * p.d as i64, 10 * d2 + (2 * k as i64 - 2) * p.d as i64)
    };
    cmp_q(q, &hn, e_lo, p, w) != Ordering::Less && cmp_q(q, &hn, e_hi, p, w) != Ordering::Greater
}

pub fn height_in_window(h: &Rational, n: u64, p: &StrategyParams) -> bool {
    p.h(n) <= *h && *h <= Rational::from_integer(2.into()) * p.h(n + 1)
}

/// Smallest `k` with `P ∈ 𝒱_{B,k}`, or `None` if `P ∉ 𝒱_B`.
pub fn vb_class(ball: &Ball, point: &RationalPoint, n: u64, p: &StrategyParams, w: &Weight) -> Result<Option<u64>> {
    let dual = dual_search(ball, point, w)?;
    let h = rat_int(&point.q) * &dual.xi;
    if !height_in_window(&h, n, p) {
        return Ok(None);
    }
    if cmp_q(&point.q, &p.h(n), 0, p, w) == Ordering::Less {
        return Ok(None);
    }
    let mut k = 1;
    loop {
        if q_in_window(&point.q, n, k, p, w) {
            return Ok(Some(k));
        }
        k += 1;
        if k > 1_000_000 {
            return Err(Error::Invariant("denominator window index diverged".into()));
        }
    }
}

/// A point of `𝒱_B` whose `Δ_ε` meets `B`, if any.
pub fn prime_witness(
    ball: &Ball,
    n: u64,
    p: &StrategyParams,
    w: &Weight,
    budget: &mut Budget,
) -> Result<Option<RationalPoint>> {
    let Some((lo, hi)) = q_window(n, 0, p, w) else {
        return Ok(None);
    };
    if lo.to_f64().unwrap_or(f64::INFINITY) >= 10f64.powf(Q_LOG_CAP) {
        return Err(Error::BudgetExceeded(budget.cap));
    }
    let scan = BallScan::new(ball, &p.eps, w);
    let mut q = lo;
    while q <= hi {
        let mut found = None;
        scan.scan(&q, budget, |pt| {
            if delta_intersects_ball(pt, &p.eps, ball, w)? {
                let dual = dual_search(ball, pt, w)?;
                if height_in_window(&(rat_int(&pt.q) * dual.xi), n, p) {
                    found = Some(pt.clone());
                    return Ok(true);
                }
            }
            Ok(false)
        })?;
        if found.is_some() {
            return Ok(found);
        }
        q += 1;
    }
    Ok(None)
}

/// `B ∈ ℬ_n′` given that its parent chain is in `ℬ′` (`parent_flag`).
pub fn prime_check(
    ball: &Ball,
    n: u64,
    p: &StrategyParams,
    w: &Weight,
    parent_flag: bool,
    budget: &mut Budget,
) -> Result<bool> {
    if n == 0 {
        return Ok(true);
    }
    if !parent_flag {
        return Ok(false);
    }
    Ok(prime_witness(ball, n, p, w, budget)?.is_none())
}

/// Hyperplane `E_k(B)` with the data it was built from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EkRecord {
    pub k: u64,
    pub e_k: i64,
    /// Normal `(a, b, 0, …, 0)` on `(x, y, z)`.
    #[serde(with = "crate::serde_util::bigint_vec")]
    pub normal: Vec<BigInt>,
    #[serde(with = "crate::serde_util::bigint")]
    pub offset: BigInt,
    pub source: RationalPoint,
    pub witness_ball: Ball,
    #[serde(with = "crate::serde_util::rational")]
    pub omega: Rational,
    /// The ball grid makes the search an approximation of the quantifier over `B′`.
    pub approximate: bool,
}

impl EkRecord {
    /// `E_k(B)^{(δ)}` as a neighborhood.
    pub fn neighborhood(&self, delta: Rational) -> Result<HyperplaneNbhd> {
        HyperplaneNbhd::new(self.normal.clone(), self.offset.clone(), delta)
    }

    pub fn hyperplane(&self) -> AttachedHyperplane {
        let d = self.source.d();
        AttachedHyperplane { a: self.normal[..d - 1].to_vec(), b: self.normal[d - 1].clone(), c: self.offset.clone() }
    }
}

/// Radius square root `σ′` with `σ′² ∈ (βR^{-m}ρ₀, R^{-m}ρ₀]`.
pub fn level_sigma(m: u64, p: &StrategyParams) -> Result<Rational> {
    let top = p.level_radius(m);
    let sigma = exact_sqrt(&top).unwrap_or_else(|| sqrt_floor(&top, 64));
    if &sigma * &sigma <= &p.beta * &top {
        return Err(Error::InvalidParameter("beta too close to 1 for the level grid".into()));
    }
    Ok(sigma)
}

/// Candidate balls `B′ ∈ ℬ_{n+k}`, `B′ ⊂ B`: the `x, y` center of `B`, `z`
/// on a grid of spacing `βR^{-(n+k)}ρ₀/2`.
pub fn sub_ball_grid(ball: &Ball, m: u64, p: &StrategyParams) -> Result<Vec<Ball>> {
    let sigma = level_sigma(m, p)?;
    let rho_sub = &sigma * &sigma;
    if rho_sub > ball.rho {
        return Ok(vec![]);
    }
    let d = ball.d();
    let slack = &ball.rho - &rho_sub;
    let step = &p.beta * p.level_radius(m) / Rational::from_integer(2.into());
    let steps = (&slack / &step).floor().to_integer();
    let steps = steps.to_u64().ok_or(Error::BudgetExceeded(u64::MAX))?;
    let offsets: Vec<Rational> = (0..=2 * steps)
        .map(|i| (Rational::from_integer(BigInt::from(i)) - Rational::from_integer(BigInt::from(steps))) * &step)
        .collect();
    let nz = d - 1;
    let count = (offsets.len() as u64).checked_pow(nz as u32).ok_or(Error::BudgetExceeded(u64::MAX))?;
    let mut out = Vec::with_capacity(count as usize);
    let mut idx = vec![0usize; nz];
    loop {
        let mut c = ball.center.clone();
        for (j, &i) in idx.iter().enumerate() {
            c[d + j] = &ball.center[d + j] + &offsets[i];
        }
        out.push(Ball::from_sqrt_radius(c, sigma.clone())?);
        let mut j = nz;
        loop {
            if j == 0 {
                return Ok(out);
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < offsets.len() {
                break;
            }
            idx[j] = 0;
        }
    }
}

/// A member `(B′, P)` of `𝒞_{B,k,ε}` found by the grid search.
#[derive(Clone, Debug)]
pub struct Member {
    pub ball: Ball,
    pub point: RationalPoint,
}

fn grid_witness(grid: &[Ball], point: &RationalPoint, m: u64, p: &StrategyParams, w: &Weight) -> Result<Option<Ball>> {
    for b in grid {
        let h = rat_int(&point.q) * dual_search(b, point, w)?.xi;
        if height_in_window(&h, m, p) {
            return Ok(Some(b.clone()));
        }
    }
    Ok(None)
}

/// Every member of the grid-approximated `𝒞_{B,k,ε}` (one witness ball per
/// point), in increasing `q`. `limit` stops after that many points.
pub fn candidate_members(
    ball: &Ball,
    n: u64,
    k: u64,
    p: &StrategyParams,
    w: &Weight,
    budget: &mut Budget,
    limit: usize,
) -> Result<Vec<Member>> {
    let m = n + k;
    let Some((lo, hi)) = q_window(m, k, p, w) else {
        return Ok(vec![]);
    };
    if lo.to_f64().unwrap_or(f64::INFINITY) >= 10f64.powf(Q_LOG_CAP) {
        return Err(Error::BudgetExceeded(budget.cap));
    }
    let scan = BallScan::new(ball, &p.eps, w);
    let mut grid = None;
    let mut out = Vec::new();
    let mut q = lo;
    while q <= hi && out.len() < limit {
        let mut err = None;
        scan.scan(&q, budget, |pt| {
            if !delta_intersects_ball(pt, &p.eps, ball, w)? {
                return Ok(false);
            }
            if grid.is_none() {
                grid = Some(sub_ball_grid(ball, m, p)?);
            }
            match grid_witness(grid.as_ref().expect("built"), pt, m, p, w) {
                Ok(Some(b)) => out.push(Member { ball: b, point: pt.clone() }),
                Ok(None) => {}
                Err(e) => err = Some(e),
            }
            Ok(out.len() >= limit || err.is_some())
        })?;
        if let Some(e) = err {
            return Err(e);
        }
        q += 1;
    }
    Ok(out)
}

/// `(d+1)(1+(d−1)κ)ε / H_m`.
pub fn omega_bound(m: u64, p: &StrategyParams) -> Rational {
    let d = Rational::from_integer(BigInt::from(p.d));
    (&d + Rational::one()) * (Rational::one() + (&d - Rational::one()) * &p.kappa) * &p.eps / p.h(m)
}

/// `E_k(B)` from the minimal-`q` member of `𝒞_{B,k,ε}`.
pub fn find_ek(
    ball: &Ball,
    n: u64,
    k: u64,
    p: &StrategyParams,
    w: &Weight,
    budget: &mut Budget,
) -> Result<Option<EkRecord>> {
    let members = candidate_members(ball, n, k, p, w, budget, 1)?;
    let Some(first) = members.into_iter().next() else {
        return Ok(None);
    };
    let dual = dual_search(&first.ball, &first.point, w)?;
    let h = attached_hyperplane(&dual, &first.point)?;
    let omega = omega_bound(n + k, p);
    if omega > p.level_radius(n + k) {
        return Err(Error::Invariant(format!("hyperplane width {} exceeds level radius", fmt_rational(&omega))));
    }
    let mut normal = h.a.clone();
    normal.push(h.b.clone());
    normal.extend(std::iter::repeat_n(BigInt::zero(), p.d - 1));
    Ok(Some(EkRecord {
        k,
        e_k: p.e_k(k),
        normal,
        offset: h.c,
        source: first.point,
        witness_ball: first.ball,
        omega,
        approximate: true,
    }))
}
