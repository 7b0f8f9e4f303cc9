//! Alice: the hyperplane-family strategy and a random fuzzing opponent.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::levels::{classify_ball, find_ek, prime_witness, q_window, EkRecord};
use super::params::StrategyParams;
use crate::diophantine::{Budget, Weight};
use crate::error::Result;
use crate::exact::{HyperplaneNbhd, Rational};
use crate::game::{AliceStrategy, Declared, GameTrace, Variant};

/// At the first turn `i_n` spent in level `n`, if `B_{i_n} ∈ ℬ_n′`, declare
/// `{E_k(B_{i_n})^{(3R^{-(n+k)}ρ₀)}}` for every `k` whose search finds a
/// hyperplane; otherwise stay silent.
pub struct HyperplaneAlice {
    pub params: StrategyParams,
    pub w: Weight,
    pub budget: u64,
    /// Smallest level radius still worth a neighborhood.
    pub resolution: Rational,
    /// `n ↦ (i_n, B_{i_n} ∈ ℬ_n′)`.
    pub levels: BTreeMap<u64, (usize, bool)>,
    pub records: Vec<(u64, EkRecord)>,
}

impl HyperplaneAlice {
    pub fn new(params: StrategyParams, w: Weight, budget: u64, resolution: Rational) -> Self {
        HyperplaneAlice { params, w, budget, resolution, levels: BTreeMap::new(), records: vec![] }
    }

    /// The set `𝒩` observed so far.
    pub fn prime_levels(&self) -> Vec<u64> {
        self.levels.iter().filter(|(_, v)| v.1).map(|(n, _)| *n).collect()
    }

    /// Highest level reached, if any.
    pub fn top_level(&self) -> Option<u64> {
        self.levels.keys().next_back().copied()
    }

    /// The family for `B_{i_n}` in `ℬ_n′`.
    pub fn family(&mut self, trace: &GameTrace, n: u64) -> Result<Vec<Declared>> {
        let ball = trace.current().clone();
        let p = &self.params;
        let mut out = Vec::new();
        let mut k = 1;
        loop {
            let m = n + k;
            if p.level_radius(m) < self.resolution {
                break;
            }
            if k >= 2 && q_window(m, k, p, &self.w).is_none() {
                break;
            }
            let mut budget = Budget::new(self.budget);
            if let Some(rec) = find_ek(&ball, n, k, p, &self.w, &mut budget)? {
                let delta = Rational::from_integer(3.into()) * p.level_radius(m);
                out.push(Declared { nbhd: rec.neighborhood(delta)?, label: k });
                self.records.push((n, rec));
            }
            k += 1;
        }
        Ok(out)
    }
}

impl AliceStrategy for HyperplaneAlice {
    fn declare(&mut self, trace: &mut GameTrace) -> Result<Vec<Declared>> {
        let i = trace.turn_index();
        let ball = trace.current().clone();
        let level = classify_ball(&ball, &self.params);
        trace.turns[i].flags.level = level;
        let Some(n) = level else {
            return Ok(vec![]);
        };
        if self.levels.contains_key(&n) {
            return Ok(vec![]);
        }
        let prime = if n == 0 {
            true
        } else if !self.levels.get(&(n - 1)).is_some_and(|v| v.1) {
            false
        } else {
            let mut budget = Budget::new(self.budget);
            prime_witness(&ball, n, &self.params, &self.w, &mut budget)?.is_none()
        };
        self.levels.insert(n, (i, prime));
        let flags = &mut trace.turns[i].flags;
        flags.first_of_level = Some(n);
        flags.prime = Some(prime);
        if !prime {
            return Ok(vec![]);
        }
        let fam = self.family(trace, n)?;
        if !fam.is_empty() && !self.params.family_budget_holds(n, &ball.rho) {
            trace.turns[i].flags.note = Some("family budget display fails".into());
        }
        Ok(fam)
    }
}

/// Random neighborhoods around random points of the current ball, with
/// widths occasionally above the legal bound to exercise the referee.
pub struct RandomAlice {
    rng: ChaCha8Rng,
    pub max_family: usize,
}

impl RandomAlice {
    pub fn new(seed: u64) -> Self {
        RandomAlice { rng: ChaCha8Rng::seed_from_u64(seed), max_family: 4 }
    }

    fn one(&mut self, trace: &GameTrace, scale: &Rational) -> Result<HyperplaneNbhd> {
        let b = trace.current();
        let dim = b.dim();
        let mut normal: Vec<BigInt> = (0..dim).map(|_| BigInt::from(self.rng.gen_range(-3i64..=3))).collect();
        if normal.iter().all(|v| v == &BigInt::from(0)) {
            normal[self.rng.gen_range(0..dim)] = BigInt::from(1);
        }
        let point: Vec<Rational> = b
            .center
            .iter()
            .map(|c| c + &b.rho * Rational::new(self.rng.gen_range(-64i64..=64).into(), 64.into()))
            .collect();
        let frac = Rational::new(self.rng.gen_range(1i64..=40).into(), 32.into());
        HyperplaneNbhd::through_point(&normal, &point, frac * scale)
    }
}

impl AliceStrategy for RandomAlice {
    fn declare(&mut self, trace: &mut GameTrace) -> Result<Vec<Declared>> {
        let beta_rho = &trace.config.beta * &trace.current().rho;
        let count = match trace.config.variant {
            Variant::Hag => self.rng.gen_range(0..=1),
            Variant::Hpg => self.rng.gen_range(0..=self.max_family),
        };
        let scale = match trace.config.variant {
            Variant::Hag => beta_rho,
            Variant::Hpg => beta_rho / Rational::from_integer(BigInt::from(count.max(1))),
        };
        (0..count).map(|_| Ok(Declared { nbhd: self.one(trace, &scale)?, label: 0 })).collect()
    }
}
