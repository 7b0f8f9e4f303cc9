//! Randomized property suites behind `schmidt verify-lemmas`.
//!
//! Each suite draws seeded instances, checks one family of exact
//! invariants and reports how many trials failed.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::attachments::{attach_line_with, attached_hyperplane, dual_search, floor_power, DualVector};
use crate::diophantine::{RationalPoint, Weight};
use crate::dynamics::{exp, orbit_generators, shortest_vector, systole, UnipotentParams, DEFAULT_PRECISION};
use crate::game::{run_game, validate, GameConfig, Variant};
use crate::strategy::alice::RandomAlice;
use crate::strategy::bob::RandomBob;
use crate::error::{Error, Result};
use crate::exact::{sup_norm, Ball, PowerTerm, Radical, Rational};

pub const SUITES: &[&str] = &["dual-exists", "heights", "xi-min", "line", "integrality", "collapse", "lattice", "referee"];

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Report {
    pub suite: String,
    pub trials: u64,
    pub failures: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

impl Report {
    fn new(suite: &str) -> Self {
        Report { suite: suite.to_string(), trials: 0, failures: 0, first_failure: None }
    }

    fn record(&mut self, outcome: std::result::Result<(), String>) {
        self.trials += 1;
        if let Err(why) = outcome {
            self.failures += 1;
            self.first_failure.get_or_insert(why);
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn r(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Weights with small denominators, `λ ≥ μ`.
pub fn random_weight<R: Rng>(rng: &mut R, d: usize) -> Weight {
    let den = rng.gen_range(d as i64..=6 * d as i64);
    // μ = k/den ≤ 1/d
    let k = rng.gen_range(1..=den / d as i64);
    let mu = r(k, den);
    let lambda = (Rational::one() - &mu) / Rational::from_integer(BigInt::from(d - 1));
    Weight::new(d, lambda, mu).expect("generated weight is valid")
}

/// Reduced point with `q ≤ max_q`.
pub fn random_point<R: Rng>(rng: &mut R, d: usize, max_q: i64) -> RationalPoint {
    let q = rng.gen_range(1..=max_q);
    let p = (0..d - 1).map(|_| BigInt::from(rng.gen_range(-q..=2 * q))).collect();
    let s = BigInt::from(rng.gen_range(-q..=2 * q));
    RationalPoint::reduce(p, s, BigInt::from(q)).expect("q > 0")
}

/// Ball with dyadic-ish center in `[-2, 2]^{2d-1}` and `σ = 1/k`.
pub fn random_ball<R: Rng>(rng: &mut R, d: usize) -> Ball {
    let center = (0..2 * d - 1)
        .map(|_| {
            let den = rng.gen_range(1..=64);
            r(rng.gen_range(-2 * den..=2 * den), den)
        })
        .collect();
    let sigma = r(1, rng.gen_range(2..=32));
    Ball::from_sqrt_radius(center, sigma).expect("positive radius")
}

fn q_power(q: &BigInt, e: &Rational) -> PowerTerm {
    PowerTerm::new(Rational::one(), Radical::of_int(q, e))
}

fn rational_of(n: &BigInt) -> Rational {
    Rational::from_integer(n.clone())
}

fn b_plus_za(dual: &DualVector, ball: &Ball) -> Rational {
    rational_of(&dual.b) + dual.a.iter().zip(ball.z()).map(|(a, z)| rational_of(a) * z).sum::<Rational>()
}

/// Membership of `dual` in the admissible set, plus its `ξ` value.
pub fn check_admissible(dual: &DualVector, ball: &Ball, pt: &RationalPoint, w: &Weight) -> std::result::Result<(), String> {
    if dual.b.is_zero() && dual.a.iter().all(Zero::is_zero) {
        return Err("zero dual vector".into());
    }
    let dot = dual.a.iter().zip(&pt.p).map(|(a, p)| a * p).sum::<BigInt>() + &dual.b * &pt.s;
    if !dot.mod_floor(&pt.q).is_zero() {
        return Err(format!("a·p + b·s = {dot} not divisible by q = {}", pt.q));
    }
    let amax = dual.a.iter().map(|a| a.abs()).max().unwrap_or_default();
    if amax > floor_power(&pt.q, &w.lambda) {
        return Err(format!("|a| = {amax} exceeds q^lambda"));
    }
    let lin = b_plus_za(dual, ball).abs();
    let over = &lin - &ball.sigma;
    if over.is_positive() && q_power(&pt.q, &w.mu).cmp_rational(&over) == Ordering::Less {
        return Err("|b + z·a| exceeds q^mu + sigma".into());
    }
    let xi = std::cmp::max(rational_of(&amax), lin);
    if xi != dual.xi {
        return Err(format!("stored xi {} differs from {}", dual.xi, xi));
    }
    Ok(())
}

/// `q ≤ H ≤ q^{1+λ}`.
pub fn check_height(dual: &DualVector, pt: &RationalPoint, w: &Weight) -> std::result::Result<(), String> {
    let h = rational_of(&pt.q) * &dual.xi;
    if h < rational_of(&pt.q) {
        return Err(format!("H = {h} below q"));
    }
    if q_power(&pt.q, &(Rational::one() + &w.lambda)).cmp_rational(&h) == Ordering::Less {
        return Err(format!("H = {h} above q^(1+lambda)"));
    }
    Ok(())
}

/// Re-enumerates every pair `(a, b)` in the admissible box and returns the
/// least `ξ`. No pruning and no ordering shortcuts.
pub fn xi_by_exhaustion(ball: &Ball, pt: &RationalPoint, w: &Weight) -> Option<Rational> {
    let amax = floor_power(&pt.q, &w.lambda);
    let mu_up = q_power(&pt.q, &w.mu).upper_bound(16);
    let zsum: Rational = ball.z().iter().map(|z| z.abs()).sum::<Rational>() * rational_of(&amax);
    let bmax = (&mu_up + &ball.sigma + zsum).ceil().to_integer();
    let n = pt.p.len();
    let mut a = vec![-amax.clone(); n];
    let mut best: Option<Rational> = None;
    loop {
        let mut b = -bmax.clone();
        while b <= bmax {
            let dual = DualVector { a: a.clone(), b: b.clone(), xi: Rational::zero() };
            let lin = b_plus_za(&dual, ball).abs();
            let xi = std::cmp::max(rational_of(&a.iter().map(|x| x.abs()).max().unwrap_or_default()), lin.clone());
            let dual = DualVector { xi, ..dual };
            if check_admissible(&dual, ball, pt, w).is_ok() && best.as_ref().is_none_or(|b| dual.xi < *b) {
                best = Some(dual.xi);
            }
            b += 1;
        }
        let mut k = 0;
        loop {
            if k == n {
                return best;
            }
            a[k] += 1;
            if a[k] <= amax {
                break;
            }
            a[k] = -amax.clone();
            k += 1;
        }
    }
}

fn dims<R: Rng>(rng: &mut R) -> usize {
    if rng.gen_bool(0.5) {
        2
    } else {
        3
    }
}

pub fn suite_dual_exists(trials: u64, seed: u64, max_q: i64) -> Report {
    let mut rep = Report::new("dual-exists");
    let mut g = rng(seed);
    for _ in 0..trials {
        let d = dims(&mut g);
        let (w, pt, ball) = (random_weight(&mut g, d), random_point(&mut g, d, max_q), random_ball(&mut g, d));
        rep.record(match dual_search(&ball, &pt, &w) {
            Ok(dual) => check_admissible(&dual, &ball, &pt, &w),
            Err(e) => Err(format!("dual_search failed on {pt:?}: {e}")),
        });
    }
    rep
}

pub fn suite_heights(trials: u64, seed: u64, max_q: i64) -> Report {
    let mut rep = Report::new("heights");
    let mut g = rng(seed);
    for _ in 0..trials {
        let d = dims(&mut g);
        let (w, pt, ball) = (random_weight(&mut g, d), random_point(&mut g, d, max_q), random_ball(&mut g, d));
        rep.record(
            dual_search(&ball, &pt, &w)
                .map_err(|e| e.to_string())
                .and_then(|dual| check_height(&dual, &pt, &w)),
        );
    }
    rep
}

pub fn suite_xi_min(trials: u64, seed: u64, max_q: i64) -> Report {
    let mut rep = Report::new("xi-min");
    let mut g = rng(seed);
    for _ in 0..trials {
        let d = dims(&mut g);
        let (w, pt, ball) = (random_weight(&mut g, d), random_point(&mut g, d, max_q), random_ball(&mut g, d));
        let got = dual_search(&ball, &pt, &w).map(|v| v.xi).ok();
        let want = xi_by_exhaustion(&ball, &pt, &w);
        rep.record(if got == want { Ok(()) } else { Err(format!("xi {got:?} vs exhaustive {want:?} at {pt:?}")) });
    }
    rep
}

pub fn check_line(ball: &Ball, pt: &RationalPoint, w: &Weight) -> std::result::Result<(), String> {
    let dual = dual_search(ball, pt, w).map_err(|e| e.to_string())?;
    let line = attach_line_with(ball, pt, w, &dual.xi).map_err(|e| e.to_string())?;
    if line.u.is_zero() && line.v.iter().all(Zero::is_zero) {
        return Err("zero line direction".into());
    }
    if !line.in_lattice(pt) {
        return Err("line direction outside the lattice".into());
    }
    let two_d = Rational::from_integer(BigInt::from(2 * w.d));
    let dev: Vec<Rational> = line.v.iter().zip(ball.z()).map(|(v, z)| v - &line.u * z).collect();
    let v_bound = PowerTerm::new(two_d.clone(), Radical::of_int(&pt.q, &-&w.lambda));
    if v_bound.cmp_rational(&sup_norm(&dev)) == Ordering::Less {
        return Err("|v - u z| bound fails".into());
    }
    let u_bound = PowerTerm::new(two_d * &dual.xi, Radical::of_int(&pt.q, &-(&w.lambda + &w.mu)));
    if u_bound.cmp_rational(&line.u.abs()) == Ordering::Less {
        return Err("|u| bound fails".into());
    }
    Ok(())
}

pub fn suite_line(trials: u64, seed: u64, max_q: i64) -> Report {
    let mut rep = Report::new("line");
    let mut g = rng(seed);
    for _ in 0..trials {
        let d = dims(&mut g);
        let (w, pt, ball) = (random_weight(&mut g, d), random_point(&mut g, d, max_q), random_ball(&mut g, d));
        rep.record(check_line(&ball, &pt, &w));
    }
    rep
}

/// `C ∈ Z`, `F(P) = 0` and `q'·F(P') ∈ Z` for a second random point `P'`.
pub fn check_integrality(ball: &Ball, pt: &RationalPoint, other: &RationalPoint, w: &Weight) -> std::result::Result<(), String> {
    let dual = dual_search(ball, pt, w).map_err(|e| e.to_string())?;
    let h = attached_hyperplane(&dual, pt).map_err(|e| e.to_string())?;
    let at = |p: &RationalPoint| h.eval(&p.coords()).map_err(|e| e.to_string());
    if !at(pt)?.is_zero() {
        return Err("F does not vanish at its defining point".into());
    }
    let scaled = rational_of(&other.q) * at(other)?;
    if !scaled.is_integer() {
        return Err(format!("q'F(P') = {scaled} is not an integer"));
    }
    Ok(())
}

pub fn suite_integrality(trials: u64, seed: u64, max_q: i64) -> Report {
    let mut rep = Report::new("integrality");
    let mut g = rng(seed);
    for _ in 0..trials {
        let d = dims(&mut g);
        let (w, pt, ball) = (random_weight(&mut g, d), random_point(&mut g, d, max_q), random_ball(&mut g, d));
        let other = random_point(&mut g, d, max_q);
        rep.record(check_integrality(&ball, &pt, &other, &w));
    }
    rep
}

/// `g_t u^{-1}` sends `(p, s, q)` to `(0, …, 0, q e^{-t})`, so the systole is
/// at most `q e^{-t}`, with `e^{-t}` the same approximation the lattice uses.
pub fn check_collapse(pt: &RationalPoint, z: &[Rational], w: &Weight, t: &Rational) -> std::result::Result<(), String> {
    let mut coords = pt.coords();
    let y = coords.pop().expect("d >= 2");
    let up = UnipotentParams::new(coords, y, z.to_vec()).map_err(|e| e.to_string())?;
    let gens = orbit_generators(&up, w, t, DEFAULT_PRECISION).map_err(|e| e.to_string())?;
    let m: Vec<Rational> = pt.p.iter().chain([&pt.s, &pt.q]).map(rational_of).collect();
    let image: Vec<Rational> = (0..=w.d).map(|i| gens.iter().zip(&m).map(|(g, c)| &g[i] * c).sum()).collect();
    let et = exp(&-t, DEFAULT_PRECISION);
    let expect_last = rational_of(&pt.q) * &et;
    if image[..w.d].iter().any(|v| !v.is_zero()) || image[w.d] != expect_last {
        return Err(format!("witness image {image:?} is not (0, .., q e^-t)"));
    }
    let short = systole(&gens).map_err(|e| e.to_string())?;
    if short.len_sq > &expect_last * &expect_last {
        return Err(format!("systole^2 {} exceeds (q e^-t)^2", short.len_sq));
    }
    Ok(())
}

pub fn suite_collapse(trials: u64, seed: u64, max_q: i64) -> Report {
    let mut rep = Report::new("collapse");
    let mut g = rng(seed);
    for _ in 0..trials {
        let d = dims(&mut g);
        let (w, pt) = (random_weight(&mut g, d), random_point(&mut g, d, max_q));
        let z: Vec<Rational> = (0..d - 1).map(|_| r(g.gen_range(-16..=16), 8)).collect();
        let t = r(g.gen_range(0..=48), 8);
        rep.record(check_collapse(&pt, &z, &w, &t));
    }
    rep
}

fn det3(m: &[Vec<Rational>]) -> Rational {
    &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1]) - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
        + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
}

/// Random unimodular 3x3 integer matrix as a product of shears and swaps.
fn random_unimodular<R: Rng>(rng: &mut R) -> Vec<Vec<i64>> {
    let mut u = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
    for _ in 0..6 {
        let (i, j) = (rng.gen_range(0..3), rng.gen_range(0..3));
        if i == j {
            u.swap(i, (i + 1) % 3);
            continue;
        }
        let k = rng.gen_range(-3..=3);
        for c in 0..3 {
            u[i][c] += k * u[j][c];
        }
    }
    u
}

/// Shortest length agrees on `B` and `UB`; `λ₁^6 ≤ 2 det²` (Hermite, n = 3).
pub fn check_lattice(basis: &[Vec<Rational>], u: &[Vec<i64>]) -> std::result::Result<(), String> {
    let det = det3(basis);
    if det.is_zero() {
        return Err("singular basis".into());
    }
    let mixed: Vec<Vec<Rational>> = u
        .iter()
        .map(|row| (0..3).map(|c| row.iter().zip(basis).map(|(&k, b)| r(k, 1) * &b[c]).sum()).collect())
        .collect();
    let a = shortest_vector(basis).map_err(|e| e.to_string())?;
    let b = shortest_vector(&mixed).map_err(|e| e.to_string())?;
    if a.len_sq != b.len_sq {
        return Err(format!("shortest {} vs {} after a unimodular change", a.len_sq, b.len_sq));
    }
    let l3 = &a.len_sq * &a.len_sq * &a.len_sq;
    if l3 > r(2, 1) * &det * &det {
        return Err(format!("Hermite bound fails: {l3} > 2 det^2"));
    }
    Ok(())
}

pub fn suite_lattice(trials: u64, seed: u64) -> Report {
    let mut rep = Report::new("lattice");
    let mut g = rng(seed);
    for _ in 0..trials {
        let basis: Vec<Vec<Rational>> = loop {
            let b: Vec<Vec<Rational>> = (0..3).map(|_| (0..3).map(|_| r(g.gen_range(-20..=20), g.gen_range(1..=8))).collect()).collect();
            if !det3(&b).is_zero() {
                break b;
            }
        };
        let u = random_unimodular(&mut g);
        rep.record(check_lattice(&basis, &u));
    }
    rep
}

/// Random Alice against random Bob, alternating HAG and HPG, re-validated
/// from the recorded trace.
pub fn suite_referee(trials: u64, seed: u64) -> Report {
    let mut rep = Report::new("referee");
    for i in 0..trials {
        let s = seed.wrapping_mul(1_000_003).wrapping_add(i);
        let mut g = rng(s);
        let variant = if i % 2 == 0 { Variant::Hag } else { Variant::Hpg };
        let beta = [r(1, 4), r(1, 5), r(1, 8), r(1, 16)][g.gen_range(0..4)].clone();
        let gamma = if variant == Variant::Hag { Rational::one() } else { [r(1, 1), r(1, 2)][g.gen_range(0..2)].clone() };
        let d = dims(&mut g);
        let b0 = Ball::from_sqrt_radius(vec![Rational::zero(); 2 * d - 1], r(1, 2)).expect("radius");
        let outcome = GameConfig::new(variant, beta.clone(), gamma, 24, r(1, 1 << 40))
            .map_err(|e| e.to_string())
            .and_then(|cfg| {
                let mut alice = RandomAlice::new(s);
                let mut bob = RandomBob::new(s, &beta);
                let trace = run_game(&mut alice, &mut bob, cfg, serde_json::Value::Null, b0);
                match validate(&trace).into_iter().next() {
                    Some(v) => Err(format!("game {i}: {v}")),
                    None => Ok(()),
                }
            });
        rep.record(outcome);
    }
    rep
}

/// Runs a suite by name.
pub fn run_suite(name: &str, trials: u64, seed: u64) -> Result<Report> {
    Ok(match name {
        "dual-exists" => suite_dual_exists(trials, seed, 60),
        "heights" => suite_heights(trials, seed, 60),
        "xi-min" => suite_xi_min(trials, seed, 25),
        "line" => suite_line(trials, seed, 40),
        "integrality" => suite_integrality(trials, seed, 40),
        "collapse" => suite_collapse(trials, seed, 30),
        "lattice" => suite_lattice(trials, seed),
        "referee" => suite_referee(trials, seed),
        _ => return Err(Error::InvalidParameter(format!("unknown suite {name:?}; known: {}", SUITES.join(", ")))),
    })
}
