//! Bob: adversaries for the referee and for Alice's strategy.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::{rat_int, sqrt_ceil, Ball, Rational};
use crate::game::{BobStrategy, Declared, GameTrace, Variant};

/// Smallest `g = k/64` with `g² ≥ β`.
pub fn min_factor(beta: &Rational) -> Rational {
    let mut k = 1i64;
    loop {
        let g = Rational::new(k.into(), 64.into());
        if &g * &g >= *beta {
            return g;
        }
        k += 1;
    }
}

fn clamp_into(current: &Ball, rho_next: &Rational, c: &[Rational]) -> Vec<Rational> {
    let h = &current.rho - rho_next;
    c.iter()
        .zip(&current.center)
        .map(|(ci, cc)| ci.clone().clamp(cc - &h, cc + &h))
        .collect()
}

/// Moves `preferred` (already inside the allowed box) off every declared
/// slab along the sign vector of the normal.
fn escape(current: &Ball, sigma: &Rational, preferred: Vec<Rational>, alice: &[Declared]) -> Result<Ball> {
    let rho = sigma * sigma;
    let mut c = preferred;
    for a in alice {
        let cand = Ball::from_sqrt_radius(c.clone(), sigma.clone())?;
        if cand.avoids(&a.nbhd) {
            continue;
        }
        let n = &a.nbhd.normal;
        let l1: BigInt = n.iter().map(|v| v.abs()).sum();
        let l2 = sqrt_ceil(&rat_int(&a.nbhd.normal_norm_sq()), 32);
        let need = &rho * rat_int(&l1) + &a.nbhd.delta * l2;
        let res = a.nbhd.signed_residual(&c);
        let dirs: [i64; 2] = if res.is_negative() { [-1, 1] } else { [1, -1] };
        let mut moved = None;
        for (j, s) in dirs.iter().enumerate() {
            let sr = Rational::from_integer((*s).into());
            let t = if j == 0 { ((&need - res.abs()) / rat_int(&l1)).max(Rational::zero()) } else { Rational::zero() };
            let target: Vec<Rational> = c
                .iter()
                .zip(n)
                .map(|(ci, ni)| {
                    if ni.is_zero() {
                        ci.clone()
                    } else if j == 0 {
                        ci + &sr * &t * Rational::from_integer(ni.signum())
                    } else {
                        // far corner of the allowed box on the other side
                        ci + &sr * &current.rho * Rational::from_integer(ni.signum())
                    }
                })
                .collect();
            let cc = clamp_into(current, &rho, &target);
            let cand = Ball::from_sqrt_radius(cc.clone(), sigma.clone())?;
            if cand.avoids(&a.nbhd) {
                moved = Some(cc);
                break;
            }
        }
        c = moved.ok_or_else(|| Error::Invariant("no ball avoids the declared neighborhood".into()))?;
    }
    Ball::from_sqrt_radius(c, sigma.clone())
}

/// Heads for `target`; shrinks the radius square root by `factor` each turn.
pub struct ChaserBob {
    pub target: Vec<Rational>,
    pub factor: Rational,
}

impl ChaserBob {
    pub fn new(target: Vec<Rational>, beta: &Rational) -> Self {
        ChaserBob { target, factor: min_factor(beta) }
    }
}

impl BobStrategy for ChaserBob {
    fn reply(&mut self, trace: &GameTrace, alice: &[Declared]) -> Result<Ball> {
        let cur = trace.current();
        let sigma = &cur.sigma * &self.factor;
        let rho = &sigma * &sigma;
        let c = clamp_into(cur, &rho, &self.target);
        match trace.config.variant {
            Variant::Hag => escape(cur, &sigma, c, alice),
            Variant::Hpg => Ball::from_sqrt_radius(c, sigma),
        }
    }
}

/// Random radius factor from a small menu and a random center in the
/// allowed box; in HAG it retries, then falls back to an escape move.
pub struct RandomBob {
    rng: ChaCha8Rng,
    pub factors: Vec<Rational>,
}

impl RandomBob {
    pub fn new(seed: u64, beta: &Rational) -> Self {
        let g0 = min_factor(beta);
        let factors = (0..4)
            .map(|j| &g0 + (Rational::from_integer(1.into()) - &g0) * Rational::new(j.into(), 8.into()))
            .collect();
        RandomBob { rng: ChaCha8Rng::seed_from_u64(seed), factors }
    }
}

impl BobStrategy for RandomBob {
    fn reply(&mut self, trace: &GameTrace, alice: &[Declared]) -> Result<Ball> {
        let cur = trace.current();
        let g = self.factors[self.rng.gen_range(0..self.factors.len())].clone();
        let sigma = &cur.sigma * &g;
        let rho = &sigma * &sigma;
        let h = &cur.rho - &rho;
        let pick = |rng: &mut ChaCha8Rng| -> Vec<Rational> {
            cur.center.iter().map(|c| c + &h * Rational::new(rng.gen_range(-256i64..=256).into(), 256.into())).collect()
        };
        if trace.config.variant == Variant::Hpg {
            return Ball::from_sqrt_radius(pick(&mut self.rng), sigma);
        }
        for _ in 0..20 {
            let b = Ball::from_sqrt_radius(pick(&mut self.rng), sigma.clone())?;
            if alice.iter().all(|a| b.avoids(&a.nbhd)) {
                return Ok(b);
            }
        }
        let g0 = self.factors[0].clone();
        let s0 = &cur.sigma * &g0;
        escape(cur, &s0, cur.center.clone(), alice)
    }
}
