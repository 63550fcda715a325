use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::dataset::FeatureMask;
use crate::error::{Error, Result};
use crate::fitness::{FitnessValue, Objective};
use crate::rng::Rng;
use crate::scalar::sigmoid;

use super::{agent_stream, argmax, check_objective, evaluate_all, init_stream, repair, Optimizer, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsoVariant {
    /// Velocity accumulates into a real genotype; bits are sampled from it.
    #[default]
    GenotypePhenotype,
    /// Bits are sampled directly from the velocity.
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PsoParams {
    /// Inertia at the first generation.
    pub w_start: f64,
    /// Inertia at the last generation.
    pub w_end: f64,
    pub c1: f64,
    pub c2: f64,
    pub v_min: f64,
    pub v_max: f64,
    /// Per-particle probability of negating the whole velocity.
    pub p_m: f64,
    pub variant: PsoVariant,
}

impl Default for PsoParams {
    fn default() -> Self {
        Self {
            w_start: 0.9,
            w_end: 0.4,
            c1: 2.0,
            c2: 2.0,
            v_min: -4.0,
            v_max: 4.0,
            p_m: 0.1,
            variant: PsoVariant::GenotypePhenotype,
        }
    }
}

impl PsoParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.v_min < self.v_max) {
            return Err(Error::config("v_min must be below v_max"));
        }
        if !(0.0..=1.0).contains(&self.p_m) {
            return Err(Error::config(format!("p_m {} outside [0, 1]", self.p_m)));
        }
        Ok(())
    }

    /// Linearly decayed inertia at generation `t` of `generations`.
    pub fn inertia(&self, t: usize, generations: usize) -> f64 {
        self.w_start - (self.w_start - self.w_end) * t as f64 / generations as f64
    }
}

/// `1` with probability `S(g)`.
pub fn decode_bit(g: f64, rng: &mut Rng) -> bool {
    rng.random::<f64>() < sigmoid(g)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub genotype: Vec<f64>,
    pub velocity: Vec<f64>,
    pub phenotype: FeatureMask,
    pub fitness: FitnessValue,
    pub pbest: (FeatureMask, FitnessValue),
}

/// Binary particle swarm with the genotype/phenotype split and velocity
/// reversal mutation.
pub struct Bpso<'o, O: ?Sized> {
    objective: &'o O,
    cfg: RunConfig,
    p: PsoParams,
    particles: Vec<Particle>,
    gbest: (FeatureMask, FitnessValue),
    generation: usize,
    evaluations: usize,
}

impl<'o, O: Objective + ?Sized> Bpso<'o, O> {
    pub fn new(objective: &'o O, cfg: RunConfig, p: PsoParams) -> Result<Self> {
        let n = check_objective(objective, &cfg)?;
        p.validate()?;
        let mut drafts = Vec::with_capacity(cfg.agents);
        for i in 0..cfg.agents {
            let mut rng = init_stream(cfg.seed, i);
            let genotype: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
            let velocity: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
            let phenotype = super::random_mask(n, &mut rng);
            drafts.push((genotype, velocity, phenotype));
        }
        let masks: Vec<FeatureMask> = drafts.iter().map(|d| d.2.clone()).collect();
        let values = evaluate_all(objective, &masks)?;
        let particles: Vec<Particle> = drafts
            .into_iter()
            .zip(&values)
            .map(|((genotype, velocity, phenotype), &fitness)| Particle {
                genotype,
                velocity,
                pbest: (phenotype.clone(), fitness),
                phenotype,
                fitness,
            })
            .collect();
        let b = argmax(&values);
        Ok(Self {
            objective,
            cfg,
            p,
            gbest: (particles[b].phenotype.clone(), values[b]),
            particles,
            generation: 0,
            evaluations: cfg.agents,
        })
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn params(&self) -> &PsoParams {
        &self.p
    }

    fn bit(b: bool) -> f64 {
        if b {
            1.0
        } else {
            0.0
        }
    }
}

impl<O: Objective + ?Sized> Optimizer for Bpso<'_, O> {
    fn step(&mut self) -> Result<()> {
        let t = self.generation + 1;
        let w = self.p.inertia(t, self.cfg.generations);
        let p = self.p;
        let gbest = self.gbest.0.clone();
        for (i, particle) in self.particles.iter_mut().enumerate() {
            let mut rng = agent_stream(self.cfg.seed, t, i);
            for j in 0..particle.velocity.len() {
                let x = Self::bit(particle.phenotype.get(j));
                let r1: f64 = rng.random();
                let r2: f64 = rng.random();
                let v = w * particle.velocity[j]
                    + p.c1 * r1 * (Self::bit(particle.pbest.0.get(j)) - x)
                    + p.c2 * r2 * (Self::bit(gbest.get(j)) - x);
                particle.velocity[j] = v.clamp(p.v_min, p.v_max);
            }
            if rng.random::<f64>() < p.p_m {
                for v in &mut particle.velocity {
                    // Re-clamped so asymmetric bounds still hold.
                    *v = (-*v).clamp(p.v_min, p.v_max);
                }
            }
            let source = match p.variant {
                PsoVariant::GenotypePhenotype => {
                    for (g, v) in particle.genotype.iter_mut().zip(&particle.velocity) {
                        *g += v;
                    }
                    &particle.genotype
                }
                PsoVariant::Plain => &particle.velocity,
            };
            let mut mask = FeatureMask::new(source.iter().map(|&g| decode_bit(g, &mut rng)).collect());
            repair(&mut mask, &mut rng);
            particle.phenotype = mask;
        }

        let masks: Vec<FeatureMask> = self.particles.iter().map(|p| p.phenotype.clone()).collect();
        let values = evaluate_all(self.objective, &masks)?;
        self.evaluations += masks.len();
        for (particle, v) in self.particles.iter_mut().zip(&values) {
            particle.fitness = *v;
            if v.fitness > particle.pbest.1.fitness {
                particle.pbest = (particle.phenotype.clone(), *v);
            }
        }
        let b = argmax(&values);
        if values[b].fitness > self.gbest.1.fitness {
            self.gbest = (masks[b].clone(), values[b]);
        }
        self.generation = t;
        Ok(())
    }

    fn generation(&self) -> usize {
        self.generation
    }

    fn best(&self) -> (&FeatureMask, &FitnessValue) {
        (&self.gbest.0, &self.gbest.1)
    }

    fn evaluations(&self) -> usize {
        self.evaluations
    }
}
