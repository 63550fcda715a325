use rand::seq::index;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::dataset::FeatureMask;
use crate::error::{Error, Result};
use crate::fitness::{FitnessValue, Objective};

use super::{agent_stream, argmax, check_objective, evaluate_all, init_stream, random_mask, repair, Optimizer, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaParams {
    pub elite_count: usize,
    /// Bits flipped per child; `None` means `ceil(N / 2)`.
    pub mutation_genes: Option<usize>,
}

impl Default for GaParams {
    fn default() -> Self {
        Self {
            elite_count: 4,
            mutation_genes: None,
        }
    }
}

/// `p1[..cut] ++ p2[cut..]`.
pub fn crossover(p1: &FeatureMask, p2: &FeatureMask, cut: usize) -> FeatureMask {
    let bits = p1.bits()[..cut].iter().chain(&p2.bits()[cut..]).copied().collect();
    FeatureMask::new(bits)
}

/// How one child was made.
#[derive(Debug, Clone, PartialEq)]
pub struct GaChild {
    /// Population indices of the two parents (both elites).
    pub parents: (usize, usize),
    pub cut: usize,
    /// Crossover result before mutation.
    pub crossed: FeatureMask,
    /// Distinct mutated positions, in draw order.
    pub flipped: Vec<usize>,
    /// Bit set to rescue an all-zero child, if any.
    pub repaired: Option<usize>,
    pub child: FeatureMask,
}

/// Elitist genetic algorithm: the fittest `elite_count` individuals survive
/// unchanged and breed the rest of the next generation.
pub struct Ga<'o, O: ?Sized> {
    objective: &'o O,
    cfg: RunConfig,
    elite_count: usize,
    mutation_genes: usize,
    population: Vec<FeatureMask>,
    fitness: Vec<FitnessValue>,
    elites: Vec<usize>,
    children: Vec<GaChild>,
    best: (FeatureMask, FitnessValue),
    generation: usize,
    evaluations: usize,
}

impl<'o, O: Objective + ?Sized> Ga<'o, O> {
    pub fn new(objective: &'o O, cfg: RunConfig, p: GaParams) -> Result<Self> {
        let n = check_objective(objective, &cfg)?;
        if p.elite_count < 2 || p.elite_count >= cfg.agents {
            return Err(Error::config(format!(
                "elite_count {} must be in [2, agents)",
                p.elite_count
            )));
        }
        let mutation_genes = p.mutation_genes.unwrap_or(n.div_ceil(2));
        if mutation_genes > n {
            return Err(Error::config(format!("mutation_genes {mutation_genes} exceeds {n} features")));
        }
        let population: Vec<FeatureMask> = (0..cfg.agents)
            .map(|i| random_mask(n, &mut init_stream(cfg.seed, i)))
            .collect();
        let fitness = evaluate_all(objective, &population)?;
        let b = argmax(&fitness);
        Ok(Self {
            objective,
            cfg,
            elite_count: p.elite_count,
            mutation_genes,
            best: (population[b].clone(), fitness[b]),
            evaluations: population.len(),
            population,
            fitness,
            elites: Vec::new(),
            children: Vec::new(),
            generation: 0,
        })
    }

    pub fn population(&self) -> &[FeatureMask] {
        &self.population
    }

    pub fn fitness(&self) -> &[FitnessValue] {
        &self.fitness
    }

    /// Indices (into the current population) of the elites carried over by
    /// the last step. Elites occupy the first slots.
    pub fn last_elites(&self) -> &[usize] {
        &self.elites
    }

    /// Children bred by the last step, in population order after the elites.
    pub fn last_children(&self) -> &[GaChild] {
        &self.children
    }

    pub fn mutation_genes(&self) -> usize {
        self.mutation_genes
    }

    fn breed(&self, elites: &[FeatureMask], slot: usize) -> GaChild {
        let n = self.objective.n_features();
        let mut rng = agent_stream(self.cfg.seed, self.generation + 1, slot);
        let e = elites.len();
        let i = rng.random_range(0..e);
        let mut j = rng.random_range(0..e - 1);
        if j >= i {
            j += 1;
        }
        let cut = if n >= 2 { rng.random_range(1..n) } else { n };
        let crossed = crossover(&elites[i], &elites[j], cut);
        let flipped = index::sample(&mut rng, n, self.mutation_genes).into_vec();
        let mut child = crossed.clone();
        for &f in &flipped {
            child.flip(f);
        }
        let repaired = repair(&mut child, &mut rng);
        GaChild {
            parents: (i, j),
            cut,
            crossed,
            flipped,
            repaired,
            child,
        }
    }
}

impl<O: Objective + ?Sized> Optimizer for Ga<'_, O> {
    fn step(&mut self) -> Result<()> {
        let mut order: Vec<usize> = (0..self.population.len()).collect();
        order.sort_by(|&a, &b| self.fitness[b].fitness.total_cmp(&self.fitness[a].fitness));
        let elite_masks: Vec<FeatureMask> = order[..self.elite_count]
            .iter()
            .map(|&i| self.population[i].clone())
            .collect();
        let elite_fitness: Vec<FitnessValue> = order[..self.elite_count].iter().map(|&i| self.fitness[i]).collect();

        let children: Vec<GaChild> = (self.elite_count..self.cfg.agents)
            .map(|slot| self.breed(&elite_masks, slot))
            .collect();
        let child_masks: Vec<FeatureMask> = children.iter().map(|c| c.child.clone()).collect();
        let child_fitness = evaluate_all(self.objective, &child_masks)?;
        self.evaluations += child_masks.len();

        self.population = elite_masks.into_iter().chain(child_masks).collect();
        self.fitness = elite_fitness.into_iter().chain(child_fitness).collect();
        self.elites = (0..self.elite_count).collect();
        self.children = children;
        self.generation += 1;
        let b = argmax(&self.fitness);
        if self.fitness[b].fitness > self.best.1.fitness {
            self.best = (self.population[b].clone(), self.fitness[b]);
        }
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
