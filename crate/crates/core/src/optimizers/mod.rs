//! Population-based binary optimizers over feature masks.
//!
//! Each optimizer is a step-wise state machine: `new` draws and evaluates the
//! initial population, `step` runs one generation. [`drive`] repeats `step`
//! under a [`Termination`] rule and records the best fitness after every
//! generation.
//!
//! Randomness: agent `i` at generation `t` draws from the stream
//! `(seed, GENERATION, t, i)`; initial draws come from `(seed, INIT, i)`.
//! All movement happens in a sequential phase, then the population is
//! evaluated in parallel, so thread scheduling cannot change a run.

mod bpso;
mod bwoa;
mod ga;

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::FeatureMask;
use crate::error::{Error, Result};
use crate::fitness::{FitnessValue, Objective};
use crate::rng::{self, Rng};

pub use bpso::{decode_bit, Bpso, Particle, PsoParams, PsoVariant};
pub use bwoa::{encircle, explore, spiral, Bwoa, Move, WoaParams};
pub use ga::{crossover, Ga, GaChild, GaParams};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Termination {
    /// Run all configured generations.
    #[default]
    MaxGenerations,
    /// Stop once the best fitness reaches `target`.
    FitnessTarget { target: f64 },
    /// Stop after `generations` consecutive generations without improvement.
    Stagnation { generations: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub agents: usize,
    pub generations: usize,
    pub seed: u64,
    pub termination: Termination,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            agents: 20,
            generations: 100,
            seed: 0,
            termination: Termination::MaxGenerations,
        }
    }
}

impl RunConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.agents < 2 {
            return Err(Error::config("agents must be >= 2"));
        }
        if self.generations == 0 {
            return Err(Error::config("generations must be >= 1"));
        }
        if let Termination::Stagnation { generations: 0 } = self.termination {
            return Err(Error::config("stagnation window must be >= 1"));
        }
        Ok(())
    }
}

/// Best fitness after each generation plus the final best subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitnessHistory {
    pub algorithm: Algorithm,
    pub seed: u64,
    /// `best[t]` is the global best after generation `t + 1`.
    pub best: Vec<f64>,
    pub best_mask: FeatureMask,
    pub best_value: FitnessValue,
    /// Objective calls made, including the initial population.
    pub evaluations: usize,
}

impl FitnessHistory {
    pub fn generations(&self) -> usize {
        self.best.len()
    }

    pub fn is_monotone(&self) -> bool {
        self.best.windows(2).all(|w| w[1] >= w[0])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "ga")]
    Ga,
    #[serde(rename = "pso", alias = "bpso")]
    Bpso,
    #[serde(rename = "woa", alias = "bwoa")]
    Bwoa,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Ga, Algorithm::Bpso, Algorithm::Bwoa];

    /// Short name used in file names and report rows.
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ga => "ga",
            Algorithm::Bpso => "pso",
            Algorithm::Bwoa => "woa",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Algorithm::Ga => "GA",
            Algorithm::Bpso => "PSO",
            Algorithm::Bwoa => "WOA",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ga" => Ok(Algorithm::Ga),
            "pso" | "bpso" => Ok(Algorithm::Bpso),
            "woa" | "bwoa" => Ok(Algorithm::Bwoa),
            _ => Err(Error::UnknownAlgorithm(s.to_string())),
        }
    }
}

/// Per-algorithm parameters, all defaulted.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct AlgorithmParams {
    pub ga: GaParams,
    pub pso: PsoParams,
    pub woa: WoaParams,
}

/// One generation at a time.
pub trait Optimizer {
    fn step(&mut self) -> Result<()>;
    /// Generations completed so far.
    fn generation(&self) -> usize;
    fn best(&self) -> (&FeatureMask, &FitnessValue);
    fn evaluations(&self) -> usize;
}

/// Runs `opt` until `cfg` says stop.
pub fn drive<O: Optimizer>(opt: &mut O, algorithm: Algorithm, cfg: &RunConfig) -> Result<FitnessHistory> {
    let mut best = Vec::with_capacity(cfg.generations);
    let mut flat = 0usize;
    let mut last = opt.best().1.fitness;
    while opt.generation() < cfg.generations {
        opt.step()?;
        let now = opt.best().1.fitness;
        best.push(now);
        if now > last {
            flat = 0;
        } else {
            flat += 1;
        }
        last = now;
        match cfg.termination {
            Termination::MaxGenerations => {}
            Termination::FitnessTarget { target } if now >= target => break,
            Termination::Stagnation { generations } if flat >= generations => break,
            _ => {}
        }
    }
    let (mask, value) = opt.best();
    Ok(FitnessHistory {
        algorithm,
        seed: cfg.seed,
        best,
        best_mask: mask.clone(),
        best_value: *value,
        evaluations: opt.evaluations(),
    })
}

/// Dispatches to the named optimizer.
pub fn run_any<O: Objective + ?Sized>(
    algorithm: Algorithm,
    objective: &O,
    cfg: &RunConfig,
    params: &AlgorithmParams,
) -> Result<FitnessHistory> {
    match algorithm {
        Algorithm::Ga => drive(&mut Ga::new(objective, *cfg, params.ga)?, algorithm, cfg),
        Algorithm::Bpso => drive(&mut Bpso::new(objective, *cfg, params.pso)?, algorithm, cfg),
        Algorithm::Bwoa => drive(&mut Bwoa::new(objective, *cfg, params.woa)?, algorithm, cfg),
    }
}

/// Dispatch by name, for configs and the CLI.
pub fn run_named<O: Objective + ?Sized>(
    name: &str,
    objective: &O,
    cfg: &RunConfig,
    params: &AlgorithmParams,
) -> Result<FitnessHistory> {
    run_any(name.parse()?, objective, cfg, params)
}

pub(crate) fn agent_stream(seed: u64, generation: usize, agent: usize) -> Rng {
    rng::stream(seed, &[rng::tag::GENERATION, generation as u64, agent as u64])
}

pub(crate) fn init_stream(seed: u64, agent: usize) -> Rng {
    rng::stream(seed, &[rng::tag::INIT, agent as u64])
}

/// Bernoulli(0.5) bits, redrawn until at least one is set.
pub(crate) fn random_mask(n: usize, rng: &mut Rng) -> FeatureMask {
    loop {
        let m = FeatureMask::new((0..n).map(|_| rng.random::<bool>()).collect());
        if !m.is_all_zero() {
            return m;
        }
    }
}

/// Flips one uniformly chosen bit of an all-zero mask. Returns the bit.
pub(crate) fn repair(mask: &mut FeatureMask, rng: &mut Rng) -> Option<usize> {
    if !mask.is_all_zero() {
        return None;
    }
    let i = rng.random_range(0..mask.len());
    mask.flip(i);
    Some(i)
}

pub(crate) fn evaluate_all<O: Objective + ?Sized>(objective: &O, masks: &[FeatureMask]) -> Result<Vec<FitnessValue>> {
    masks.par_iter().map(|m| objective.evaluate(m)).collect()
}

/// Index of the first maximum.
pub(crate) fn argmax(values: &[FitnessValue]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if v.fitness > values[best].fitness {
            best = i;
        }
    }
    best
}

pub(crate) fn check_objective<O: Objective + ?Sized>(objective: &O, cfg: &RunConfig) -> Result<usize> {
    cfg.validate()?;
    let n = objective.n_features();
    if n == 0 {
        return Err(Error::config("objective has no features"));
    }
    Ok(n)
}
