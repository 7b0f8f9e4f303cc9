//! Referee for the hyperplane absolute game (HAG) and the hyperplane
//! potential game (HPG) on `R^{2d-1}`.
//!
//! A trace records, for each turn `i`, Bob's ball `B_i` and the
//! neighborhoods Alice declared against it. Illegal Alice moves are voided
//! and flagged; an illegal Bob move ends the game.

use std::cmp::Ordering;

use serde::Serialize;

use crate::diophantine::{bad_certificate, Certificate, Weight};
use crate::error::{Error, Result};
use crate::exact::{Ball, HyperplaneNbhd, LinComb, Radical, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Variant {
    Hag,
    Hpg,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GameConfig {
    pub variant: Variant,
    #[serde(with = "crate::serde_util::rational")]
    pub beta: Rational,
    #[serde(with = "crate::serde_util::rational")]
    pub gamma: Rational,
    pub max_turns: usize,
    #[serde(with = "crate::serde_util::rational")]
    pub resolution: Rational,
    /// Turns allowed for the radius to shrink by `stall_factor`.
    pub stall_turns: usize,
    #[serde(with = "crate::serde_util::rational")]
    pub stall_factor: Rational,
}

impl GameConfig {
    pub fn new(variant: Variant, beta: Rational, gamma: Rational, max_turns: usize, resolution: Rational) -> Result<Self> {
        let zero = Rational::from_integer(0.into());
        let one = Rational::from_integer(1.into());
        let ok = match variant {
            Variant::Hag => beta > zero && beta < Rational::new(1.into(), 3.into()),
            Variant::Hpg => beta > zero && beta < one && gamma > zero,
        };
        if !ok {
            return Err(Error::InvalidParameter(format!("invalid beta/gamma for {variant:?}")));
        }
        if resolution <= zero {
            return Err(Error::InvalidParameter("resolution must be positive".into()));
        }
        Ok(GameConfig {
            variant,
            beta,
            gamma,
            max_turns,
            resolution,
            stall_turns: max_turns.max(1),
            stall_factor: Rational::from_integer(2.into()),
        })
    }

    pub fn with_stall(mut self, turns: usize, factor: Rational) -> Self {
        self.stall_turns = turns;
        self.stall_factor = factor;
        self
    }
}

/// One declared neighborhood together with the strategy's label for it
/// (the index `k` for the hyperplane strategy, 0 otherwise).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Declared {
    #[serde(flatten)]
    pub nbhd: HyperplaneNbhd,
    pub label: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TurnFlags {
    pub alice_voided: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_of_level: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prime: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BallRecord {
    #[serde(with = "crate::serde_util::rational_vec")]
    pub center: Vec<Rational>,
    #[serde(with = "crate::serde_util::rational")]
    pub rho: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Turn {
    #[serde(skip)]
    pub ball: Ball,
    #[serde(rename = "ball")]
    pub ball_record: BallRecord,
    pub alice: Vec<Declared>,
    pub flags: TurnFlags,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum End {
    MaxTurns,
    Resolution,
    BobForfeit { turn: usize, why: String },
    Degenerate { turn: usize },
    StrategyError { turn: usize, error: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Verdict {
    AliceByCertificate,
    AliceByNeighborhood { k: u64, turn: usize },
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GameTrace {
    pub config: GameConfig,
    pub params: serde_json::Value,
    pub turns: Vec<Turn>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub end: Option<End>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
}

impl GameTrace {
    pub fn start(config: GameConfig, params: serde_json::Value, b0: Ball) -> Self {
        GameTrace { config, params, turns: vec![turn(b0)], end: None, verdict: None }
    }

    pub fn current(&self) -> &Ball {
        &self.turns.last().expect("trace has a first ball").ball
    }

    pub fn turn_index(&self) -> usize {
        self.turns.len() - 1
    }

    pub fn finished(&self) -> bool {
        self.end.is_some()
    }

    /// Center of the last ball.
    pub fn final_point(&self) -> &[Rational] {
        &self.current().center
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }
}

fn turn(ball: Ball) -> Turn {
    let ball_record = BallRecord { center: ball.center.clone(), rho: ball.rho.clone() };
    Turn { ball, ball_record, alice: vec![], flags: TurnFlags::default() }
}

/// `Σ δ_k^γ ≤ (βρ)^γ`, exact up to the radical sign routine.
pub fn gamma_sum_ok(deltas: &[Rational], beta_rho: &Rational, gamma: &Rational) -> bool {
    let mut v = LinComb::term(Rational::from_integer((-1).into()), Radical::new(beta_rho.clone(), gamma.clone()));
    for d in deltas {
        v = v.add(&LinComb::term(Rational::from_integer(1.into()), Radical::new(d.clone(), gamma.clone())));
    }
    v.sign() != Ordering::Greater
}

/// Legality of Bob's ball against the current ball and the (non-voided)
/// neighborhoods, returning the reason on failure.
pub fn bob_violation(config: &GameConfig, current: &Ball, alice: &[Declared], next: &Ball) -> Option<String> {
    if next.dim() != current.dim() {
        return Some("dimension mismatch".into());
    }
    if !next.is_subset_of(current) {
        return Some("ball not nested".into());
    }
    if next.rho < &config.beta * &current.rho {
        return Some("radius below beta times current".into());
    }
    if config.variant == Variant::Hag && alice.iter().any(|a| !next.avoids(&a.nbhd)) {
        return Some("ball meets the declared neighborhood".into());
    }
    None
}

/// HAG turn: Alice declares one neighborhood with `δ ≤ βρ_i`.
pub fn hag_step(trace: &mut GameTrace, alice: Option<Declared>, bob: Ball) {
    let fam: Vec<Declared> = alice.into_iter().collect();
    step(trace, fam, bob);
}

/// HPG turn: Alice declares a family with `Σ δ^γ ≤ (βρ_i)^γ`.
pub fn hpg_step(trace: &mut GameTrace, alice: Vec<Declared>, bob: Ball) {
    step(trace, alice, bob);
}

/// Checks Alice's move against the current ball; returns the legal part.
pub fn alice_legal(config: &GameConfig, current: &Ball, alice: &[Declared]) -> bool {
    let beta_rho = &config.beta * &current.rho;
    match config.variant {
        Variant::Hag => alice.len() <= 1 && alice.iter().all(|a| a.nbhd.delta <= beta_rho),
        Variant::Hpg => {
            let deltas: Vec<Rational> = alice.iter().map(|a| a.nbhd.delta.clone()).collect();
            gamma_sum_ok(&deltas, &beta_rho, &config.gamma)
        }
    }
}

fn step(trace: &mut GameTrace, alice: Vec<Declared>, bob: Ball) {
    if trace.finished() {
        return;
    }
    let i = trace.turn_index();
    let legal = alice_legal(&trace.config, trace.current(), &alice);
    {
        let t = trace.turns.last_mut().expect("nonempty");
        if legal {
            t.alice = alice;
        } else {
            t.alice = vec![];
            t.flags.alice_voided = true;
        }
    }
    let cur = trace.current().clone();
    let declared = trace.turns[i].alice.clone();
    if let Some(why) = bob_violation(&trace.config, &cur, &declared, &bob) {
        trace.end = Some(End::BobForfeit { turn: i + 1, why });
        return;
    }
    trace.turns.push(turn(bob));
    let n = trace.turn_index();
    if trace.current().rho < trace.config.resolution {
        trace.end = Some(End::Resolution);
    } else if n >= trace.config.max_turns {
        trace.end = Some(End::MaxTurns);
    } else if n >= trace.config.stall_turns {
        let old = &trace.turns[n - trace.config.stall_turns].ball.rho;
        if &trace.current().rho * &trace.config.stall_factor > *old {
            trace.end = Some(End::Degenerate { turn: n });
        }
    }
}

/// A move source for Alice. `declare` sees the trace with the current ball
/// appended and may annotate that turn's flags.
pub trait AliceStrategy {
    fn declare(&mut self, trace: &mut GameTrace) -> Result<Vec<Declared>>;
}

pub trait BobStrategy {
    fn reply(&mut self, trace: &GameTrace, alice: &[Declared]) -> Result<Ball>;
}

/// Alice who never restricts Bob.
pub struct EmptyAlice;

impl AliceStrategy for EmptyAlice {
    fn declare(&mut self, _trace: &mut GameTrace) -> Result<Vec<Declared>> {
        Ok(vec![])
    }
}

pub fn run_game(
    alice: &mut dyn AliceStrategy,
    bob: &mut dyn BobStrategy,
    config: GameConfig,
    params: serde_json::Value,
    b0: Ball,
) -> GameTrace {
    let mut trace = GameTrace::start(config, params, b0);
    while !trace.finished() {
        let i = trace.turn_index();
        let fam = match alice.declare(&mut trace) {
            Ok(f) => f,
            Err(e) => {
                trace.end = Some(End::StrategyError { turn: i, error: e.to_string() });
                break;
            }
        };
        // illegal families are voided before Bob sees them
        let visible = if alice_legal(&trace.config, trace.current(), &fam) { fam.clone() } else { vec![] };
        let next = match bob.reply(&trace, &visible) {
            Ok(b) => b,
            Err(e) => {
                trace.end = Some(End::BobForfeit { turn: i + 1, why: e.to_string() });
                break;
            }
        };
        step(&mut trace, fam, next);
    }
    trace
}

/// Post-hoc re-validation of every recorded turn; returns the violations.
pub fn validate(trace: &GameTrace) -> Vec<String> {
    let mut out = Vec::new();
    for (i, pair) in trace.turns.windows(2).enumerate() {
        let (cur, next) = (&pair[0], &pair[1]);
        if !alice_legal(&trace.config, &cur.ball, &cur.alice) {
            out.push(format!("turn {i}: recorded Alice move is illegal"));
        }
        if let Some(why) = bob_violation(&trace.config, &cur.ball, &cur.alice, &next.ball) {
            out.push(format!("turn {}: {why}", i + 1));
        }
    }
    let fp = trace.final_point();
    for (i, t) in trace.turns.iter().enumerate() {
        if !t.ball.contains(fp).unwrap_or(false) {
            out.push(format!("turn {i}: final point outside ball"));
        }
    }
    out
}

/// Finite-horizon verdict: the final point lies in a declared neighborhood,
/// or passes the bad-approximability certificate to `(Q, ε)`.
pub fn evaluate_win(trace: &GameTrace, w: &Weight, max_q: u64, eps: &Rational, budget: u64) -> Verdict {
    let fp = trace.final_point();
    for (i, t) in trace.turns.iter().enumerate() {
        if let Some(a) = t.alice.iter().find(|a| a.nbhd.contains(fp)) {
            return Verdict::AliceByNeighborhood { k: a.label, turn: i };
        }
    }
    match bad_certificate(fp, w, eps, max_q, budget) {
        Ok(Certificate::Holds) => Verdict::AliceByCertificate,
        _ => Verdict::Undecided,
    }
}
