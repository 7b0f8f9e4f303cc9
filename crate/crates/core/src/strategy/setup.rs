//! Game setups: which players, which constants, and how a finished game is
//! scored. Fields are plain strings so TOML files map onto them directly.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::alice::{HyperplaneAlice, RandomAlice};
use super::bob::{ChaserBob, RandomBob};
use super::params::{derive_params, ParamMode, StrategyParams};
use crate::diophantine::Weight;
use crate::error::{Error, Result};
use crate::exact::{parse_rational, Ball, PowerTerm, Radical, Rational};
use crate::game::{evaluate_win, run_game, AliceStrategy, BobStrategy, EmptyAlice, GameConfig, GameTrace, Variant};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlaySetup {
    /// `hag` or `hpg`.
    pub variant: String,
    /// `paper`, `random` or `empty`.
    pub alice: String,
    /// `chaser` or `random`.
    pub bob: String,
    pub weight: String,
    /// `relaxed` or `paper`.
    pub mode: String,
    pub beta: String,
    pub gamma: String,
    /// `σ₀` of the first ball, centered at the origin.
    pub sigma0: String,
    /// Relaxed-mode `R` and `ε`; `ε` also accepts `2^-k`.
    pub r: String,
    pub eps: String,
    /// Last level played; the game stops below `β R^{-levels} ρ₀`.
    pub levels: u64,
    pub max_turns: usize,
    pub seed: u64,
    /// Enumeration cap per strategy search and for the certificate.
    pub budget: u64,
    /// Chaser target; defaults to a random rational point drawn from `seed`.
    pub target: Option<Vec<String>>,
    /// Certificate bound `Q`; defaults to `⌊(2H_{levels+1})^{1/(1+λ)}⌋`.
    pub q_cert: Option<u64>,
}

impl Default for PlaySetup {
    fn default() -> Self {
        PlaySetup {
            variant: "hpg".into(),
            alice: "paper".into(),
            bob: "chaser".into(),
            weight: "2:1/2:1/2".into(),
            mode: "relaxed".into(),
            beta: "1/4".into(),
            gamma: "1".into(),
            sigma0: "1/2".into(),
            r: "64".into(),
            eps: "2^-262".into(),
            levels: 43,
            max_turns: 400,
            seed: 0,
            budget: 50_000_000,
            target: None,
            q_cert: None,
        }
    }
}

/// `a/b`, decimal, or `base^exp` with integer base and exponent.
pub fn parse_scalar(s: &str) -> Result<Rational> {
    if let Some((b, e)) = s.split_once('^') {
        let base = parse_rational(b)?;
        let exp: i64 = e.trim().parse().map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?;
        if base.is_zero() && exp < 0 {
            return Err(Error::ZeroDenominator);
        }
        return Ok(crate::exact::pow_i(&base, exp));
    }
    parse_rational(s)
}

/// Everything [`PlaySetup::play`] needs, validated.
pub struct Resolved {
    pub weight: Weight,
    pub params: StrategyParams,
    pub config: GameConfig,
    pub b0: Ball,
    pub q_cert: u64,
    pub target: Vec<Rational>,
}

impl PlaySetup {
    pub fn resolve(&self) -> Result<Resolved> {
        let weight = Weight::parse(&self.weight)?;
        let variant = match self.variant.to_ascii_lowercase().as_str() {
            "hag" => Variant::Hag,
            "hpg" => Variant::Hpg,
            v => return Err(Error::InvalidParameter(format!("unknown variant {v:?}"))),
        };
        let (beta, gamma) = (parse_scalar(&self.beta)?, parse_scalar(&self.gamma)?);
        let sigma0 = parse_scalar(&self.sigma0)?;
        let b0 = Ball::from_sqrt_radius(vec![Rational::zero(); weight.space_dim()], sigma0)?;
        let mode = match self.mode.as_str() {
            "paper" => ParamMode::Strict,
            "relaxed" => {
                let r = parse_scalar(&self.r)?;
                if !r.is_integer() {
                    return Err(Error::InvalidParameter("R must be an integer".into()));
                }
                ParamMode::Relaxed { r: r.to_integer(), eps: parse_scalar(&self.eps)? }
            }
            m => return Err(Error::InvalidParameter(format!("unknown mode {m:?}"))),
        };
        let params = derive_params(&b0, &beta, &gamma, mode)?;
        let resolution = &beta * params.level_radius(self.levels);
        let config = GameConfig::new(variant, beta, gamma, self.max_turns, resolution)?;
        let q_cert = match self.q_cert {
            Some(q) => q,
            None => certificate_bound(&params, &weight, self.levels + 1)?,
        };
        let target = match &self.target {
            Some(t) => t.iter().map(|s| parse_scalar(s)).collect::<Result<Vec<_>>>()?,
            None => random_target(self.seed, &weight),
        };
        if target.len() != weight.space_dim() {
            return Err(Error::DimensionMismatch { expected: weight.space_dim(), got: target.len() });
        }
        Ok(Resolved { weight, params, config, b0, q_cert, target })
    }

    /// Plays one game and stores the verdict in the trace.
    pub fn play(&self) -> Result<GameTrace> {
        let res = self.resolve()?;
        let beta = res.config.beta.clone();
        let mut alice: Box<dyn AliceStrategy> = match self.alice.as_str() {
            "paper" => Box::new(HyperplaneAlice::new(res.params.clone(), res.weight.clone(), self.budget, res.config.resolution.clone())),
            "random" => Box::new(RandomAlice::new(self.seed)),
            "empty" => Box::new(EmptyAlice),
            a => return Err(Error::InvalidParameter(format!("unknown alice {a:?}"))),
        };
        let mut bob: Box<dyn BobStrategy> = match self.bob.as_str() {
            "chaser" => Box::new(ChaserBob::new(res.target.clone(), &beta)),
            "random" => Box::new(RandomBob::new(self.seed, &beta)),
            b => return Err(Error::InvalidParameter(format!("unknown bob {b:?}"))),
        };
        let mut trace = run_game(alice.as_mut(), bob.as_mut(), res.config.clone(), res.params.to_json(), res.b0.clone());
        let eps = res.params.eps.clone();
        trace.verdict = Some(evaluate_win(&trace, &res.weight, res.q_cert, &eps, self.budget));
        Ok(trace)
    }
}

/// Largest `Q` with `Q^{1+λ} ≤ 2H_m`: every `P` of height window `m` or
/// below has `q(P) ≤ Q`.
pub fn certificate_bound(p: &StrategyParams, w: &Weight, m: u64) -> Result<u64> {
    let two_h = Rational::from_integer(BigInt::from(2)) * p.h(m);
    let e = Rational::one() + &w.lambda;
    let guess = crate::exact::to_f64(&two_h).powf(1.0 / crate::exact::to_f64(&e));
    if !guess.is_finite() || guess > 1e12 {
        return Err(Error::InvalidParameter("certificate bound beyond enumeration range".into()));
    }
    let fits = |q: u64| PowerTerm::new(Rational::one(), Radical::of_int(&BigInt::from(q), &e)).cmp_rational(&two_h) != std::cmp::Ordering::Greater;
    let mut q = guess.floor().to_u64().unwrap_or(0).max(1);
    while q > 1 && !fits(q) {
        q -= 1;
    }
    while fits(q + 1) {
        q += 1;
    }
    Ok(q)
}

/// Rational point with `q ≤ 48` inside `(-1/4, 1/4)^{2d-1}`.
pub fn random_target(seed: u64, w: &Weight) -> Vec<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7a26_1f3d);
    let q: i64 = rng.gen_range(2..=48);
    (0..w.space_dim())
        .map(|_| {
            let m = (q / 4 - 1).max(0);
            Rational::new(BigInt::from(rng.gen_range(-m..=m)), BigInt::from(q))
        })
        .collect()
}
