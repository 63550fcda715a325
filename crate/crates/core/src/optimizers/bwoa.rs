use std::f64::consts::PI;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::dataset::FeatureMask;
use crate::error::{Error, Result};
use crate::fitness::{FitnessValue, Objective};

use super::{agent_stream, argmax, check_objective, decode_bit, evaluate_all, init_stream, repair, Optimizer, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WoaParams {
    /// Spiral shape constant.
    pub b: f64,
    /// Probability of the spiral move rather than encircling/exploring.
    pub branch_p: f64,
}

impl Default for WoaParams {
    fn default() -> Self {
        Self { b: 1.0, branch_p: 0.5 }
    }
}

impl WoaParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.branch_p) {
            return Err(Error::config(format!("branch_p {} outside [0, 1]", self.branch_p)));
        }
        Ok(())
    }
}

/// Which update an agent took in the last generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Move {
    Spiral,
    /// Per-component mix of encircling (|A_j| < 1) and exploration.
    Surround,
}

/// `X* − A·|C·X* − X|` for one component.
pub fn encircle(best: f64, x: f64, a_coef: f64, c_coef: f64) -> f64 {
    best - a_coef * (c_coef * best - x).abs()
}

/// Same as [`encircle`] but around a random agent.
pub fn explore(random: f64, x: f64, a_coef: f64, c_coef: f64) -> f64 {
    encircle(random, x, a_coef, c_coef)
}

/// `|X* − X|·e^{b·l}·cos(2πl) + X*` for one component.
pub fn spiral(best: f64, x: f64, b: f64, l: f64) -> f64 {
    (best - x).abs() * (b * l).exp() * (2.0 * PI * l).cos() + best
}

/// Binary whale optimizer: real-valued positions, sigmoid-sampled masks.
pub struct Bwoa<'o, O: ?Sized> {
    objective: &'o O,
    cfg: RunConfig,
    p: WoaParams,
    positions: Vec<Vec<f64>>,
    masks: Vec<FeatureMask>,
    fitness: Vec<FitnessValue>,
    moves: Vec<Move>,
    leader: Vec<f64>,
    best: (FeatureMask, FitnessValue),
    generation: usize,
    evaluations: usize,
}

impl<'o, O: Objective + ?Sized> Bwoa<'o, O> {
    pub fn new(objective: &'o O, cfg: RunConfig, p: WoaParams) -> Result<Self> {
        let n = check_objective(objective, &cfg)?;
        p.validate()?;
        let mut positions = Vec::with_capacity(cfg.agents);
        let mut masks = Vec::with_capacity(cfg.agents);
        for i in 0..cfg.agents {
            let mut rng = init_stream(cfg.seed, i);
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
            let mut m = FeatureMask::new(x.iter().map(|&v| decode_bit(v, &mut rng)).collect());
            repair(&mut m, &mut rng);
            positions.push(x);
            masks.push(m);
        }
        let fitness = evaluate_all(objective, &masks)?;
        let b = argmax(&fitness);
        Ok(Self {
            objective,
            cfg,
            p,
            leader: positions[b].clone(),
            best: (masks[b].clone(), fitness[b]),
            positions,
            masks,
            fitness,
            moves: Vec::new(),
            generation: 0,
            evaluations: cfg.agents,
        })
    }

    pub fn positions(&self) -> &[Vec<f64>] {
        &self.positions
    }

    pub fn masks(&self) -> &[FeatureMask] {
        &self.masks
    }

    /// Position of the best agent found so far (X*).
    pub fn leader(&self) -> &[f64] {
        &self.leader
    }

    pub fn last_moves(&self) -> &[Move] {
        &self.moves
    }

    /// Control parameter for generation `t`: 2 at the start, 0 at the last.
    pub fn a(&self, t: usize) -> f64 {
        2.0 * (1.0 - t as f64 / self.cfg.generations as f64)
    }
}

impl<O: Objective + ?Sized> Optimizer for Bwoa<'_, O> {
    fn step(&mut self) -> Result<()> {
        let t = self.generation + 1;
        let a = self.a(t);
        let old = self.positions.clone();
        let agents = old.len();
        let mut moves = Vec::with_capacity(agents);
        for (i, x) in self.positions.iter_mut().enumerate() {
            let mut rng = agent_stream(self.cfg.seed, t, i);
            let r: Vec<f64> = (0..x.len()).map(|_| rng.random()).collect();
            let q: f64 = rng.random();
            let l: f64 = rng.random();
            let partner = &old[rng.random_range(0..agents)];
            if q < self.p.branch_p {
                for (j, xj) in x.iter_mut().enumerate() {
                    *xj = spiral(self.leader[j], *xj, self.p.b, l);
                }
                moves.push(Move::Spiral);
            } else {
                for (j, xj) in x.iter_mut().enumerate() {
                    let a_coef = 2.0 * a * r[j] - a;
                    let c_coef = 2.0 * r[j];
                    *xj = if a_coef.abs() < 1.0 {
                        encircle(self.leader[j], *xj, a_coef, c_coef)
                    } else {
                        explore(partner[j], *xj, a_coef, c_coef)
                    };
                }
                moves.push(Move::Surround);
            }
            let mut m = FeatureMask::new(x.iter().map(|&v| decode_bit(v, &mut rng)).collect());
            repair(&mut m, &mut rng);
            self.masks[i] = m;
        }
        self.fitness = evaluate_all(self.objective, &self.masks)?;
        self.evaluations += agents;
        self.moves = moves;
        let b = argmax(&self.fitness);
        if self.fitness[b].fitness > self.best.1.fitness {
            self.best = (self.masks[b].clone(), self.fitness[b]);
            self.leader = self.positions[b].clone();
        }
        self.generation = t;
        Ok(())
    }

    fn generation(&self) -> usize {
        self.generation
    }

    fn best(&self) -> (&FeatureMask, &FitnessValue) {
        (&self.best.0, &self.best.1)
    }

    fn evaluations(&self) -> usize {
        self.evaluations
    }
}
