//! Wrapper fitness: KNN accuracy on the masked features, weighted against
//! the share of features removed.

use std::collections::HashMap;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifiers::knn_vote;
use crate::dataset::{Dataset, FeatureMask, Matrix, SplitSpec};
use crate::error::{Error, Result};
use crate::neighbors::k_smallest;
use crate::rng;
use crate::scalar::{sq_dist, Scalar};

/// Where the evaluator's accuracy is measured.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum Validation {
    /// Stratified split of the training data; accuracy on the held-out side.
    Holdout { fraction: f64, seed: u64 },
    /// Stratified k-fold; accuracy pooled over all folds.
    Kfold { folds: usize, seed: u64 },
}

impl Default for Validation {
    fn default() -> Self {
        Validation::Holdout {
            fraction: 0.7,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitnessConfig {
    pub alpha: f64,
    pub evaluator_k: usize,
    pub validation: Validation,
    /// `true`: the size term is `1 − #X/N` (fewer features score higher).
    /// `false`: the size term is `#X/N`.
    pub maximize_reduction: bool,
}

impl Default for FitnessConfig {
    fn default() -> Self {
        Self {
            alpha: 0.99,
            evaluator_k: 10,
            validation: Validation::default(),
            maximize_reduction: true,
        }
    }
}

impl FitnessConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::config(format!("alpha {} outside (0, 1]", self.alpha)));
        }
        if self.evaluator_k == 0 {
            return Err(Error::config("evaluator_k must be >= 1"));
        }
        match self.validation {
            Validation::Holdout { fraction, .. } if !(fraction > 0.0 && fraction < 1.0) => {
                Err(Error::config(format!("holdout fraction {fraction} outside (0, 1)")))
            }
            Validation::Kfold { folds, .. } if folds < 2 => Err(Error::config("k-fold needs at least 2 folds")),
            _ => Ok(()),
        }
    }

    /// Combines an accuracy with a subset size.
    pub fn score(&self, accuracy: f64, popcount: usize, n_total: usize) -> f64 {
        let share = popcount as f64 / n_total as f64;
        let size_term = if self.maximize_reduction { 1.0 - share } else { share };
        self.alpha * accuracy + (1.0 - self.alpha) * size_term
    }

    fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.alpha.to_bits().hash(&mut h);
        self.evaluator_k.hash(&mut h);
        self.maximize_reduction.hash(&mut h);
        match self.validation {
            Validation::Holdout { fraction, seed } => (0u8, fraction.to_bits(), seed).hash(&mut h),
            Validation::Kfold { folds, seed } => (1u8, folds as u64, seed).hash(&mut h),
        }
        h.finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitnessValue {
    pub fitness: f64,
    pub accuracy: f64,
    pub popcount: usize,
    pub n_total: usize,
}

/// Anything the optimizers can maximise over feature masks.
pub trait Objective: Sync {
    fn n_features(&self) -> usize;
    fn evaluate(&self, mask: &FeatureMask) -> Result<FitnessValue>;
}

/// Objective backed by a closure returning an accuracy for a mask.
pub struct AccuracyFn<F> {
    pub n_features: usize,
    pub config: FitnessConfig,
    pub accuracy: F,
}

impl<F: Fn(&FeatureMask) -> f64 + Sync> Objective for AccuracyFn<F> {
    fn n_features(&self) -> usize {
        self.n_features
    }

    fn evaluate(&self, mask: &FeatureMask) -> Result<FitnessValue> {
        mask.check_evaluable(self.n_features)?;
        let accuracy = (self.accuracy)(mask);
        Ok(FitnessValue {
            fitness: self.config.score(accuracy, mask.popcount(), self.n_features),
            accuracy,
            popcount: mask.popcount(),
            n_total: self.n_features,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct CacheKey {
    mask: FeatureMask,
    config: u64,
    data: u64,
}

/// Memo of computed fitness values, safe to share across evaluators and
/// threads. Racing writers store identical values.
#[derive(Debug, Default)]
pub struct FitnessCache {
    map: Mutex<HashMap<CacheKey, FitnessValue>>,
}

impl FitnessCache {
    pub fn new() -> Arc<Self> {
        Arc::new(Self::default())
    }

    pub fn len(&self) -> usize {
        self.map.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

struct Fold {
    train: Vec<usize>,
    valid: Vec<usize>,
}

/// Scores masks against one training dataset under one configuration.
pub struct FitnessEvaluator<T> {
    x: Matrix<T>,
    y: Vec<u8>,
    config: FitnessConfig,
    folds: Vec<Fold>,
    data_fingerprint: u64,
    config_fingerprint: u64,
    cache: Option<Arc<FitnessCache>>,
    computed: AtomicUsize,
    calls: AtomicUsize,
}

impl<T: Scalar> FitnessEvaluator<T> {
    /// Evaluator with a private cache.
    pub fn new(train: &Dataset<T>, config: FitnessConfig) -> Result<Self> {
        config.validate()?;
        let x = train.to_matrix()?;
        let y = train.labels().to_vec();
        let folds = make_folds(train, &config.validation)?;
        Ok(Self {
            x,
            y,
            config,
            folds,
            data_fingerprint: train.fingerprint(),
            config_fingerprint: config.fingerprint(),
            cache: Some(FitnessCache::new()),
            computed: AtomicUsize::new(0),
            calls: AtomicUsize::new(0),
        })
    }

    pub fn with_cache(mut self, cache: Arc<FitnessCache>) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn without_cache(mut self) -> Self {
        self.cache = None;
        self
    }

    pub fn config(&self) -> &FitnessConfig {
        &self.config
    }

    /// Evaluations actually computed (cache misses).
    pub fn computed(&self) -> usize {
        self.computed.load(Ordering::Relaxed)
    }

    /// All `evaluate` calls, hits included.
    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }

    /// KNN accuracy on the validation side(s) using only `columns`.
    pub fn accuracy(&self, columns: &[usize]) -> f64 {
        let x = self.x.select_columns(columns);
        let mut correct = 0usize;
        let mut total = 0usize;
        for fold in &self.folds {
            let k = self.config.evaluator_k.min(fold.train.len());
            for &v in &fold.valid {
                let q = x.row(v);
                let scored = fold.train.iter().map(|&t| (sq_dist(q, x.row(t)), t)).collect();
                let nearest = k_smallest(scored, k);
                if knn_vote(&nearest, &self.y) == self.y[v] {
                    correct += 1;
                }
                total += 1;
            }
        }
        correct as f64 / total as f64
    }

    fn compute(&self, mask: &FeatureMask) -> FitnessValue {
        self.computed.fetch_add(1, Ordering::Relaxed);
        let accuracy = self.accuracy(&mask.indices());
        FitnessValue {
            fitness: self.config.score(accuracy, mask.popcount(), mask.len()),
            accuracy,
            popcount: mask.popcount(),
            n_total: mask.len(),
        }
    }

    /// Every nonempty mask, scored; ties go to the smaller popcount, then the
    /// lexicographically smallest bit pattern.
    pub fn brute_force(&self, max_n: usize) -> Result<BruteForce> {
        let n = self.x.cols();
        if n > max_n || n >= 63 {
            return Err(Error::TooManyFeatures {
                features: n,
                limit: max_n.min(62),
            });
        }
        let before = self.calls();
        let all: Vec<(FeatureMask, FitnessValue)> = (1u64..(1u64 << n))
            .into_par_iter()
            .map(|p| {
                let m = FeatureMask::from_index(p, n);
                let v = self.evaluate(&m)?;
                Ok((m, v))
            })
            .collect::<Result<_>>()?;
        let (best_mask, best) = all
            .iter()
            .min_by(|a, b| {
                b.1.fitness
                    .total_cmp(&a.1.fitness)
                    .then(a.1.popcount.cmp(&b.1.popcount))
                    .then(a.0.cmp(&b.0))
            })
            .cloned()
            .expect("at least one mask");
        Ok(BruteForce {
            best_mask,
            best,
            evaluations: self.calls() - before,
            all,
        })
    }
}

impl<T: Scalar> Objective for FitnessEvaluator<T> {
    fn n_features(&self) -> usize {
        self.x.cols()
    }

    fn evaluate(&self, mask: &FeatureMask) -> Result<FitnessValue> {
        mask.check_evaluable(self.x.cols())?;
        self.calls.fetch_add(1, Ordering::Relaxed);
        let Some(cache) = &self.cache else {
            return Ok(self.compute(mask));
        };
        let key = CacheKey {
            mask: mask.clone(),
            config: self.config_fingerprint,
            data: self.data_fingerprint,
        };
        if let Some(v) = cache.map.lock().expect("cache lock").get(&key) {
            return Ok(*v);
        }
        let v = self.compute(mask);
        cache.map.lock().expect("cache lock").insert(key, v);
        Ok(v)
    }
}

/// Result of exhaustive enumeration.
#[derive(Debug, Clone)]
pub struct BruteForce {
    pub best_mask: FeatureMask,
    pub best: FitnessValue,
    pub evaluations: usize,
    /// Every nonempty mask in enumeration order (bit `i` of the index = feature `i`).
    pub all: Vec<(FeatureMask, FitnessValue)>,
}

pub fn brute_force_best<T: Scalar>(train: &Dataset<T>, cfg: FitnessConfig, max_n: usize) -> Result<BruteForce> {
    if train.n_features() > max_n {
        return Err(Error::TooManyFeatures {
            features: train.n_features(),
            limit: max_n,
        });
    }
    FitnessEvaluator::new(train, cfg)?.brute_force(max_n)
}

fn make_folds<T: Scalar>(train: &Dataset<T>, validation: &Validation) -> Result<Vec<Fold>> {
    let rows = train.n_rows();
    let counts = train.class_counts();
    let folds = match *validation {
        Validation::Holdout { fraction, seed } => {
            let spec = SplitSpec {
                train_fraction: fraction,
                seed: rng::derive(seed, &[rng::tag::HOLDOUT]),
                stratified: counts.iter().all(|&c| c >= 2),
            };
            let (tr, va) = train
                .split_indices(&spec)
                .map_err(|e| Error::TooFewRows(format!("validation holdout: {e}")))?;
            vec![Fold { train: tr, valid: va }]
        }
        Validation::Kfold { folds, seed } => {
            let mut rng = rng::stream(seed, &[rng::tag::FOLDS]);
            let mut assignment = vec![0usize; rows];
            let mut next = 0usize;
            for class in [0u8, 1] {
                let mut idx: Vec<usize> = (0..rows).filter(|&i| train.labels()[i] == class).collect();
                idx.shuffle(&mut rng);
                for i in idx {
                    assignment[i] = next % folds;
                    next += 1;
                }
            }
            (0..folds)
                .map(|f| Fold {
                    train: (0..rows).filter(|&i| assignment[i] != f).collect(),
                    valid: (0..rows).filter(|&i| assignment[i] == f).collect(),
                })
                .collect()
        }
    };
    if folds.iter().any(|f| f.train.is_empty() || f.valid.is_empty()) {
        return Err(Error::TooFewRows("validation partition has an empty side".into()));
    }
    Ok(folds)
}
