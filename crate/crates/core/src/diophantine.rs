//! Weighted approximation by rational points: the neighborhoods `Δ_ε(P)`,
//! the quality function `max{q^μ|qy−s|, q^λ‖qx−p−(qy−s)z‖∞}`, and
//! truncated certificates for membership in `S_ε(r)`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::attachments::floor_power;
use crate::error::{Error, Result};
use crate::exact::{ceil, floor, fmt_rational, sup_norm, Ball, LinComb, PowerTerm, Radical, Rational};

/// Precision used for the conservative rational enclosures that size
/// enumeration windows; membership is always re-decided exactly.
const WINDOW_BITS: usize = 32;

/// Weight `(λ, …, λ, μ)` with `d − 1` copies of `λ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Weight {
    pub d: usize,
    #[serde(with = "crate::serde_util::rational")]
    pub lambda: Rational,
    #[serde(with = "crate::serde_util::rational")]
    pub mu: Rational,
}

impl Weight {
    pub fn new(d: usize, lambda: Rational, mu: Rational) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidWeight(format!("d must be at least 2, got {d}")));
        }
        if !mu.is_positive() || lambda < mu {
            return Err(Error::InvalidWeight("need lambda >= mu > 0".into()));
        }
        let total = &lambda * Rational::from_integer(BigInt::from(d - 1)) + &mu;
        if !total.is_one() {
            return Err(Error::InvalidWeight(format!(
                "(d-1)*lambda + mu must be 1, got {}",
                fmt_rational(&total)
            )));
        }
        Ok(Weight { d, lambda, mu })
    }

    /// The weight with `μ = λ = 1/d`.
    pub fn uniform(d: usize) -> Self {
        let r = Rational::new(BigInt::one(), BigInt::from(d));
        Weight::new(d, r.clone(), r).expect("uniform weight is valid")
    }

    /// Parses `d:λ:μ`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("weight must be d:lambda:mu, got {s:?}")));
        }
        let d: usize = parts[0].trim().parse().map_err(|_| Error::Parse(format!("bad d in {s:?}")))?;
        let lambda = crate::exact::parse_rational(parts[1])?;
        let mu = crate::exact::parse_rational(parts[2])?;
        Weight::new(d, lambda, mu)
    }

    /// Dimension `2d − 1` of the game space.
    pub fn space_dim(&self) -> usize {
        2 * self.d - 1
    }

    pub fn q_pow(&self, q: &BigInt, e: &Rational) -> Radical {
        Radical::of_int(q, e)
    }
}

/// Reduced rational point `(p/q, s/q) ∈ Q^d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RationalPoint {
    #[serde(with = "crate::serde_util::bigint_vec")]
    pub p: Vec<BigInt>,
    #[serde(with = "crate::serde_util::bigint")]
    pub s: BigInt,
    #[serde(with = "crate::serde_util::bigint")]
    pub q: BigInt,
}

impl RationalPoint {
    pub fn reduce(p: Vec<BigInt>, s: BigInt, q: BigInt) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let mut g = q.abs();
        for a in p.iter().chain(std::iter::once(&s)) {
            g = g.gcd(a);
        }
        let sign = if q.is_negative() { -BigInt::one() } else { BigInt::one() };
        let k = &g * &sign;
        Ok(RationalPoint {
            p: p.iter().map(|a| a / &k).collect(),
            s: &s / &k,
            q: &q / &k,
        })
    }

    pub fn is_reduced(&self) -> bool {
        let mut g = self.q.clone();
        for a in self.p.iter().chain(std::iter::once(&self.s)) {
            g = g.gcd(a);
        }
        self.q.is_positive() && g.is_one()
    }

    pub fn d(&self) -> usize {
        self.p.len() + 1
    }

    /// Coordinates `(p/q, s/q)`.
    pub fn coords(&self) -> Vec<Rational> {
        self.p
            .iter()
            .chain(std::iter::once(&self.s))
            .map(|a| Rational::new(a.clone(), self.q.clone()))
            .collect()
    }

    /// Parses `p1,…,p_{d-1};s;q` e.g. `1;1;2` for `(1/2, 1/2)`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(';').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("point must be p1,..;s;q, got {s:?}")));
        }
        let bad = |_| Error::Parse(format!("bad integer in {s:?}"));
        let p = parts[0]
            .split(',')
            .map(|t| t.trim().parse::<BigInt>().map_err(bad))
            .collect::<Result<Vec<_>>>()?;
        let sv: BigInt = parts[1].trim().parse().map_err(bad)?;
        let q: BigInt = parts[2].trim().parse().map_err(bad)?;
        RationalPoint::reduce(p, sv, q)
    }
}

/// The two terms of the quality function at a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QualityWitness {
    pub point: RationalPoint,
    pub term_y: PowerTerm,
    pub term_x: PowerTerm,
}

impl QualityWitness {
    pub fn max_term(&self) -> &PowerTerm {
        match self.term_y.cmp_term(&self.term_x) {
            Ordering::Less => &self.term_x,
            _ => &self.term_y,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let term = |t: &PowerTerm| {
            serde_json::json!({
                "coeff": fmt_rational(&t.coeff),
                "power_of_q": fmt_rational(&t.radical.exp),
                "value": t.to_decimal(30),
            })
        };
        serde_json::json!({
            "p": self.point.p.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            "s": self.point.s.to_string(),
            "q": self.point.q.to_string(),
            "term_y": term(&self.term_y),
            "term_x": term(&self.term_x),
        })
    }
}

fn check_dims(pt: &[Rational], w: &Weight) -> Result<()> {
    if pt.len() != w.space_dim() {
        return Err(Error::DimensionMismatch { expected: w.space_dim(), got: pt.len() });
    }
    Ok(())
}

fn split(pt: &[Rational], d: usize) -> (&[Rational], &Rational, &[Rational]) {
    (&pt[..d - 1], &pt[d - 1], &pt[d..])
}

/// Quality terms of a (not necessarily reduced) triple `(p, s, q)`.
pub fn quality_raw(p: &[BigInt], s: &BigInt, q: &BigInt, pt: &[Rational], w: &Weight) -> (PowerTerm, PowerTerm) {
    let (x, y, z) = split(pt, w.d);
    let qr = Rational::from_integer(q.clone());
    let ty = &qr * y - Rational::from_integer(s.clone());
    let resid: Vec<Rational> = x
        .iter()
        .zip(z)
        .zip(p)
        .map(|((xi, zi), pi)| &qr * xi - Rational::from_integer(pi.clone()) - &ty * zi)
        .collect();
    (
        PowerTerm::new(ty.abs(), w.q_pow(q, &w.mu)),
        PowerTerm::new(sup_norm(&resid), w.q_pow(q, &w.lambda)),
    )
}

pub fn quality(point: &RationalPoint, pt: &[Rational], w: &Weight) -> Result<QualityWitness> {
    check_dims(pt, w)?;
    if point.d() != w.d {
        return Err(Error::DimensionMismatch { expected: w.d, got: point.d() });
    }
    let (term_y, term_x) = quality_raw(&point.p, &point.s, &point.q, pt, w);
    Ok(QualityWitness { point: point.clone(), term_y, term_x })
}

/// `pt ∈ Δ_ε(P)`: both quality terms strictly below `ε`.
pub fn delta_contains(point: &RationalPoint, eps: &Rational, pt: &[Rational], w: &Weight) -> Result<bool> {
    let qw = quality(point, pt, w)?;
    Ok(qw.term_y.cmp_rational(eps) == Ordering::Less && qw.term_x.cmp_rational(eps) == Ordering::Less)
}

#[derive(Clone, Debug)]
struct Bound {
    value: LinComb,
    strict: bool,
}

/// Exact decision of `Δ_ε(P) ∩ B ≠ ∅`.
///
/// With `t = y − s/q` the set is cut out by `|t| < η_y` and, per coordinate,
/// by the existence of `(x_i, z_i)` in the ball's box with
/// `|x_i − p_i/q − t z_i| < η_x`. On each sign piece of `t` the latter is a
/// pair of strict linear constraints on `t`, so feasibility reduces to
/// comparing every lower bound against every upper bound.
pub fn delta_intersects_ball(point: &RationalPoint, eps: &Rational, ball: &Ball, w: &Weight) -> Result<bool> {
    if ball.dim() != w.space_dim() {
        return Err(Error::DimensionMismatch { expected: w.space_dim(), got: ball.dim() });
    }
    if !eps.is_positive() {
        return Err(Error::InvalidParameter("epsilon must be positive".into()));
    }
    let d = w.d;
    let q = &point.q;
    let qr = Rational::from_integer(q.clone());
    let one = Rational::one();
    let eta_y = LinComb::term(eps.clone(), w.q_pow(q, &(-&one - &w.mu)));
    let eta_x = LinComb::term(eps.clone(), w.q_pow(q, &(-&one - &w.lambda)));
    let s_over_q = Rational::new(point.s.clone(), q.clone());
    let (ylo, yhi) = ball.range(d - 1);

    for nonneg in [true, false] {
        let mut lower = vec![
            Bound { value: LinComb::rational(&ylo - &s_over_q), strict: false },
            Bound { value: eta_y.scale(&-&one), strict: true },
        ];
        let mut upper = vec![
            Bound { value: LinComb::rational(&yhi - &s_over_q), strict: false },
            Bound { value: eta_y.clone(), strict: true },
        ];
        if nonneg {
            lower.push(Bound { value: LinComb::rational(Rational::zero()), strict: false });
        } else {
            upper.push(Bound { value: LinComb::rational(Rational::zero()), strict: false });
        }
        let mut feasible = true;
        for i in 0..d - 1 {
            let pq = Rational::new(point.p[i].clone(), qr.to_integer());
            let (xlo, xhi) = ball.range(i);
            let (zlo, zhi) = ball.range(d + i);
            let (zmax, zmin) = if nonneg { (zhi, zlo) } else { (zlo, zhi) };
            // t·zmax > xlo − p/q − η_x
            let beta_a = LinComb::rational(&xlo - &pq).sub(&eta_x);
            // t·zmin < xhi − p/q + η_x
            let beta_b = LinComb::rational(&xhi - &pq).add(&eta_x);
            for (alpha, beta, is_gt) in [(zmax, beta_a, true), (zmin, beta_b, false)] {
                match alpha.cmp(&Rational::zero()) {
                    Ordering::Equal => {
                        let sgn = beta.sign();
                        let ok = if is_gt { sgn == Ordering::Less } else { sgn == Ordering::Greater };
                        if !ok {
                            feasible = false;
                        }
                    }
                    ord => {
                        let b = Bound { value: beta.scale(&alpha.recip()), strict: true };
                        // dividing by a negative coefficient flips the inequality
                        if (ord == Ordering::Greater) == is_gt {
                            lower.push(b);
                        } else {
                            upper.push(b);
                        }
                    }
                }
            }
        }
        if !feasible {
            continue;
        }
        let ok = lower.iter().all(|l| {
            upper.iter().all(|u| {
                let gap = u.value.clone().sub(&l.value).sign();
                match gap {
                    Ordering::Greater => true,
                    Ordering::Equal => !l.strict && !u.strict,
                    Ordering::Less => false,
                }
            })
        });
        if ok {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Outcome of a truncated certificate search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    Holds,
    ViolatedBy(QualityWitness),
}

/// Integers `n` with `|center − n| < width`, padded by one guard integer.
fn window(center: &Rational, width: &Rational) -> impl Iterator<Item = BigInt> {
    let lo = floor(&(center - width)) - BigInt::one();
    let hi = ceil(&(center + width)) + BigInt::one();
    num_iter_range(lo, hi)
}

fn num_iter_range(lo: BigInt, hi: BigInt) -> impl Iterator<Item = BigInt> {
    let mut cur = lo;
    std::iter::from_fn(move || {
        if cur > hi {
            None
        } else {
            let v = cur.clone();
            cur += 1;
            Some(v)
        }
    })
}

/// Calls `visit` on every integer triple `(p, s, q)` for the given `q` whose
/// quality terms could be below `bound = coeff · (radical)`; candidates are
/// supersets of the true windows.
fn for_each_candidate<F>(
    q: &BigInt,
    pt: &[Rational],
    w: &Weight,
    bound_upper: &Rational,
    budget: &mut Budget,
    mut visit: F,
) -> Result<bool>
where
    F: FnMut(&[BigInt], &BigInt) -> Result<bool>,
{
    let (x, y, z) = split(pt, w.d);
    let qr = Rational::from_integer(q.clone());
    let wy = bound_upper * w.q_pow(q, &-&w.mu).bounds(WINDOW_BITS).1;
    let wx = bound_upper * w.q_pow(q, &-&w.lambda).bounds(WINDOW_BITS).1;
    let qy = &qr * y;
    for s in window(&qy, &wy) {
        let t = &qy - Rational::from_integer(s.clone());
        if t.abs() > wy {
            continue;
        }
        let centers: Vec<Rational> = x.iter().zip(z).map(|(xi, zi)| &qr * xi - &t * zi).collect();
        let ranges: Vec<Vec<BigInt>> = centers
            .iter()
            .map(|c| window(c, &wx).filter(|p| (c - Rational::from_integer(p.clone())).abs() <= wx).collect())
            .collect();
        if ranges.iter().any(|r| r.is_empty()) {
            continue;
        }
        let mut idx = vec![0usize; ranges.len()];
        'outer: loop {
            budget.charge()?;
            let p: Vec<BigInt> = idx.iter().zip(&ranges).map(|(&i, r)| r[i].clone()).collect();
            if visit(&p, &s)? {
                return Ok(true);
            }
            for k in (0..idx.len()).rev() {
                idx[k] += 1;
                if idx[k] < ranges[k].len() {
                    continue 'outer;
                }
                idx[k] = 0;
            }
            break;
        }
    }
    Ok(false)
}

/// Calls `visit` on every reduced point `P` of denominator `q` whose
/// `Δ_ε(P)` could meet `ball`; `visit` returning `true` stops the scan.
/// The windows are supersets, so callers confirm with
/// [`delta_intersects_ball`].
pub fn for_each_ball_candidate<F>(
    q: &BigInt,
    eps: &Rational,
    ball: &Ball,
    w: &Weight,
    budget: &mut Budget,
    visit: F,
) -> Result<bool>
where
    F: FnMut(&RationalPoint) -> Result<bool>,
{
    BallScan::new(ball, eps, w).scan(q, budget, visit)
}

/// Ball ranges cached for scanning many denominators against one ball.
pub struct BallScan {
    d: usize,
    eps: Rational,
    lambda: Rational,
    mu: Rational,
    ranges: Vec<(Rational, Rational)>,
}

/// `ceil(f - e)` for `0 <= e < 1`, without forming the difference.
fn ceil_minus(f: &Rational, e: &Rational) -> BigInt {
    scaled_ceil_minus(f.numer(), f.denom(), &BigInt::one(), e)
}

/// `floor(f + e)` for `0 <= e < 1`.
fn floor_plus(f: &Rational, e: &Rational) -> BigInt {
    -ceil_minus(&-f, e)
}

/// `ceil(q·n/den - e)` in integer arithmetic, `den > 0`.
fn scaled_ceil_minus(n: &BigInt, den: &BigInt, q: &BigInt, e: &Rational) -> BigInt {
    let (fl, r) = (q * n).div_mod_floor(den);
    // frac = r/den ≤ e
    if r * e.denom() <= e.numer() * den {
        fl
    } else {
        fl + 1
    }
}

impl BallScan {
    pub fn new(ball: &Ball, eps: &Rational, w: &Weight) -> Self {
        BallScan {
            d: w.d,
            eps: eps.clone(),
            lambda: w.lambda.clone(),
            mu: w.mu.clone(),
            ranges: (0..ball.dim()).map(|i| ball.range(i)).collect(),
        }
    }

    /// Visits reduced points of denominator `q` whose Δ_ε window can meet the ball.
    /// The windows use `ε/(q⌊q^μ⌋)` and `ε/(q⌊q^λ⌋)`, rational supersets of the
    /// weighted ones.
    pub fn scan<F>(&self, q: &BigInt, budget: &mut Budget, mut visit: F) -> Result<bool>
    where
        F: FnMut(&RationalPoint) -> Result<bool>,
    {
        let d = self.d;
        let qr = Rational::from_integer(q.clone());
        let (ylo, yhi) = &self.ranges[d - 1];
        // q(y - η_y) = qy - e_y
        let e_y = &self.eps / Rational::from_integer(floor_power(q, &self.mu));
        let s_lo = scaled_ceil_minus(ylo.numer(), ylo.denom(), q, &e_y);
        let s_hi = -scaled_ceil_minus(&-yhi.numer(), yhi.denom(), q, &e_y);
        if s_lo > s_hi {
            return Ok(false);
        }
        let eta = &e_y / &qr;
        let e_x = &self.eps / Rational::from_integer(floor_power(q, &self.lambda));
        for s in num_iter_range(s_lo, s_hi) {
            let sq = Rational::new(s.clone(), q.clone());
            let t_lo = std::cmp::max(ylo - &sq, -&eta);
            let t_hi = std::cmp::min(yhi - &sq, eta.clone());
            if t_lo > t_hi {
                continue;
            }
            let mut ranges = Vec::with_capacity(d - 1);
            for i in 0..d - 1 {
                let (xlo, xhi) = &self.ranges[i];
                let (zlo, zhi) = &self.ranges[d + i];
                let prods = [&t_lo * zlo, &t_lo * zhi, &t_hi * zlo, &t_hi * zhi];
                let pmin = prods.iter().min().expect("nonempty");
                let pmax = prods.iter().max().expect("nonempty");
                let lo = ceil_minus(&((xlo - pmax) * q), &e_x);
                let hi = floor_plus(&((xhi - pmin) * q), &e_x);
                ranges.push(num_iter_range(lo, hi).collect::<Vec<_>>());
            }
            if ranges.iter().any(|r| r.is_empty()) {
                continue;
            }
            let mut idx = vec![0usize; ranges.len()];
            'outer: loop {
                budget.charge()?;
                let p: Vec<BigInt> = idx.iter().zip(&ranges).map(|(&i, r)| r[i].clone()).collect();
                let g = p.iter().fold(s.gcd(q), |g, x| g.gcd(x));
                if g.is_one() && visit(&RationalPoint { p, s: s.clone(), q: q.clone() })? {
                    return Ok(true);
                }
                for k in (0..idx.len()).rev() {
                    idx[k] += 1;
                    if idx[k] < ranges[k].len() {
                        continue 'outer;
                    }
                    idx[k] = 0;
                }
                break;
            }
        }
        Ok(false)
    }
}

/// Candidate counter shared by the enumeration kernels.
#[derive(Clone, Debug)]
pub struct Budget {
    pub cap: u64,
    pub used: u64,
}

impl Budget {
    pub fn new(cap: u64) -> Self {
        Budget { cap, used: 0 }
    }

    pub fn charge(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.cap {
            Err(Error::BudgetExceeded(self.cap))
        } else {
            Ok(())
        }
    }
}

/// Checks that every `P` with `q(P) ≤ Q` has quality at least `ε` at `pt`.
/// Enumeration runs in increasing `q`, so the first witness is reduced.
pub fn bad_certificate(pt: &[Rational], w: &Weight, eps: &Rational, max_q: u64, budget: u64) -> Result<Certificate> {
    check_dims(pt, w)?;
    if !eps.is_positive() || max_q == 0 {
        return Err(Error::InvalidParameter("need eps > 0 and Q >= 1".into()));
    }
    let mut budget = Budget::new(budget);
    let mut found = None;
    for qi in 1..=max_q {
        let q = BigInt::from(qi);
        let hit = for_each_candidate(&q, pt, w, eps, &mut budget, |p, s| {
            let (ty, tx) = quality_raw(p, s, &q, pt, w);
            if ty.cmp_rational(eps) == Ordering::Less && tx.cmp_rational(eps) == Ordering::Less {
                found = Some((p.to_vec(), s.clone()));
                return Ok(true);
            }
            Ok(false)
        })?;
        if hit {
            let (p, s) = found.take().expect("witness recorded");
            let point = RationalPoint::reduce(p, s, q)?;
            return Ok(Certificate::ViolatedBy(quality(&point, pt, w)?));
        }
    }
    Ok(Certificate::Holds)
}

/// Minimum quality over `q(P) ≤ Q`, with its (reduced) minimizer.
#[derive(Clone, Debug)]
pub struct BestEpsilon {
    pub value: PowerTerm,
    pub witness: RationalPoint,
}

impl BestEpsilon {
    pub fn decimal(&self, digits: usize) -> String {
        self.value.to_decimal(digits)
    }
}

pub fn best_epsilon(pt: &[Rational], w: &Weight, max_q: u64, budget: u64) -> Result<BestEpsilon> {
    check_dims(pt, w)?;
    if max_q == 0 {
        return Err(Error::InvalidParameter("Q must be at least 1".into()));
    }
    let (x, y, z) = split(pt, w.d);
    let one = BigInt::one();
    // q = 1 nearest-integer seed keeps the first windows small.
    let s0 = floor(&(y + Rational::new(one.clone(), BigInt::from(2))));
    let t0 = y - Rational::from_integer(s0.clone());
    let p0: Vec<BigInt> = x
        .iter()
        .zip(z)
        .map(|(xi, zi)| floor(&(xi - &t0 * zi + Rational::new(one.clone(), BigInt::from(2)))))
        .collect();
    let (ty, tx) = quality_raw(&p0, &s0, &one, pt, w);
    let seed = if ty.cmp_term(&tx) == Ordering::Less { tx } else { ty };
    let mut best = (seed, RationalPoint::reduce(p0, s0, one)?);
    let mut budget = Budget::new(budget);
    for qi in 1..=max_q {
        if best.0.is_zero() {
            break;
        }
        let q = BigInt::from(qi);
        let bound = best.0.upper_bound(WINDOW_BITS);
        let mut improved: Option<(PowerTerm, Vec<BigInt>, BigInt)> = None;
        for_each_candidate(&q, pt, w, &bound, &mut budget, |p, s| {
            let (ty, tx) = quality_raw(p, s, &q, pt, w);
            let m = if ty.cmp_term(&tx) == Ordering::Less { tx } else { ty };
            let current = improved.as_ref().map(|c| &c.0).unwrap_or(&best.0);
            if m.cmp_term(current) == Ordering::Less {
                improved = Some((m, p.to_vec(), s.clone()));
            }
            Ok(false)
        })?;
        if let Some((m, p, s)) = improved {
            best = (m, RationalPoint::reduce(p, s, q)?);
        }
    }
    Ok(BestEpsilon { value: best.0, witness: best.1 })
}
