use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifiers::{self, confusion, metrics, ClassifierSpec, ConfusionMatrix, Metrics};
use crate::dataset::{Dataset, FeatureMask, SplitSpec, SYNTHETIC_ROW_ID};
use crate::error::{Error, Result, StageContext};
use crate::fitness::{FitnessCache, FitnessEvaluator};
use crate::optimizers::{run_any, Algorithm, FitnessHistory, RunConfig};
use crate::preprocess::{self, drop_duplicates, PreprocessConfig, PreprocessSummary};
use crate::rng::{self, tag};

use super::config::ExperimentConfig;
use super::report::{DatasetInfo, ExperimentReport, ReportRow, Stat, Timing, TimingRow};

/// Feature set label for the all-features baseline.
pub const NO_FS: &str = "none";

/// Outcome of one optimizer run on the selection view.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub selected_feature_names: Vec<String>,
    pub mask_bits: FeatureMask,
    pub fitness: f64,
    pub accuracy: f64,
    pub popcount: usize,
    pub n_total: usize,
    pub reduction_pct: f64,
    pub evaluations: usize,
    pub history: Vec<f64>,
}

impl Selection {
    pub fn from_history(h: &FitnessHistory, names: &[String]) -> Self {
        Self {
            algorithm: h.algorithm,
            seed: h.seed,
            selected_feature_names: h.best_mask.indices().into_iter().map(|i| names[i].clone()).collect(),
            mask_bits: h.best_mask.clone(),
            fitness: h.best_value.fitness,
            accuracy: h.best_value.accuracy,
            popcount: h.best_value.popcount,
            n_total: h.best_value.n_total,
            reduction_pct: h.best_mask.reduction_pct(),
            evaluations: h.evaluations,
            history: h.best.clone(),
        }
    }
}

/// Per-(repetition, feature set, classifier) measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawRecord {
    pub repetition: usize,
    pub feature_set: String,
    pub classifier: String,
    pub confusion: ConfusionMatrix,
    pub metrics: Metrics,
    pub train_cycles: usize,
    /// Wall-clock fit time; excluded from the deterministic report.
    #[serde(skip)]
    pub train_ms: f64,
}

pub fn load_dataset(cfg: &ExperimentConfig) -> Result<Dataset<f64>> {
    Dataset::load_csv(&cfg.dataset.path, &cfg.dataset.load).stage("load")
}

fn preprocess_config(cfg: &ExperimentConfig, path: &[u64]) -> PreprocessConfig {
    PreprocessConfig {
        seed: rng::derive(cfg.master_seed, path),
        ..cfg.preprocess
    }
}

fn split_spec(cfg: &ExperimentConfig, path: &[u64]) -> SplitSpec {
    SplitSpec {
        train_fraction: cfg.split.train_fraction,
        seed: rng::derive(cfg.master_seed, path),
        stratified: cfg.split.stratified,
    }
}

fn dedup(cfg: &ExperimentConfig, data: &Dataset<f64>) -> Dataset<f64> {
    if cfg.preprocess.dedup {
        drop_duplicates(data)
    } else {
        data.clone()
    }
}

/// The preprocessed training side of the dedicated selection split.
pub fn selection_view(cfg: &ExperimentConfig, data: &Dataset<f64>) -> Result<(Dataset<f64>, PreprocessSummary)> {
    let base = dedup(cfg, data);
    let (train, test) = base.split(&split_spec(cfg, &[tag::SELECTION])).stage("split")?;
    let pp = preprocess_config(cfg, &[tag::SELECTION, tag::SMOTE]);
    let (view, _, mut summary) = preprocess::fit_transform_split(&train, &test, &pp).stage("preprocess")?;
    summary.duplicates_removed = data.n_rows() - base.n_rows();
    Ok((view, summary))
}

/// Seed of `algorithm`'s run, independent of the order algorithms are listed.
pub fn algorithm_seed(master_seed: u64, algorithm: Algorithm) -> u64 {
    rng::derive(master_seed, &[tag::ALGORITHM, algorithm as u64])
}

/// Runs every configured optimizer once on `view`, sharing one fitness cache.
pub fn run_selection(cfg: &ExperimentConfig, view: &Dataset<f64>) -> Result<Vec<Selection>> {
    let cache = FitnessCache::new();
    let evaluator = FitnessEvaluator::new(view, cfg.fitness).stage("select")?.with_cache(cache);
    cfg.algorithms
        .iter()
        .map(|&a| {
            let run = RunConfig {
                seed: algorithm_seed(cfg.master_seed, a),
                ..cfg.run
            };
            let h = run_any(a, &evaluator, &run, &cfg.params).stage("select")?;
            Ok(Selection::from_history(&h, view.feature_names()))
        })
        .collect()
}

/// Full pipeline: selection once, then `repetitions` fresh splits with every
/// classifier on every feature set.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate().stage("config")?;
    let data = load_dataset(cfg)?;
    let (view, summary) = selection_view(cfg, &data)?;
    let selections = run_selection(cfg, &view)?;

    let mut feature_sets: Vec<(String, FeatureMask)> = vec![(NO_FS.to_string(), FeatureMask::ones(data.n_features()))];
    feature_sets.extend(selections.iter().map(|s| (s.algorithm.name().to_string(), s.mask_bits.clone())));

    let base = dedup(cfg, &data);
    let one = |r: usize| repetition(cfg, &base, &feature_sets, r);
    let per_rep: Vec<Vec<RawRecord>> = if cfg.parallel {
        (1..=cfg.repetitions).into_par_iter().map(one).collect::<Result<_>>()?
    } else {
        (1..=cfg.repetitions).map(one).collect::<Result<_>>()?
    };
    let raw: Vec<RawRecord> = per_rep.into_iter().flatten().collect();

    let (rows, timing) = aggregate(&raw, &feature_sets, &cfg.classifiers);
    Ok(ExperimentReport {
        dataset: DatasetInfo {
            source: data.source().to_string(),
            rows: data.n_rows(),
            features: data.n_features(),
            feature_names: data.feature_names().to_vec(),
            class_counts: data.class_counts(),
        },
        master_seed: cfg.master_seed,
        repetitions: cfg.repetitions,
        selection_preprocess: summary,
        selections,
        rows,
        raw,
        timing: Some(Timing {
            parallel: cfg.parallel,
            rows: timing,
        }),
    })
}

fn repetition(
    cfg: &ExperimentConfig,
    base: &Dataset<f64>,
    feature_sets: &[(String, FeatureMask)],
    r: usize,
) -> Result<Vec<RawRecord>> {
    let rep = r as u64;
    let (train, test) = base.split(&split_spec(cfg, &[tag::REPETITION, rep])).stage("split")?;
    let pp = preprocess_config(cfg, &[tag::REPETITION, rep, tag::SMOTE]);
    let (train, test, _) = preprocess::fit_transform_split(&train, &test, &pp).stage("preprocess")?;
    check_leakage(&train, &test).stage("preprocess")?;

    let mut out = Vec::with_capacity(feature_sets.len() * cfg.classifiers.len());
    for (name, mask) in feature_sets {
        let tr = train.project(mask).stage("train")?;
        let te = test.project(mask).stage("train")?;
        let x_test = te.to_matrix().stage("train")?;
        for (c, spec) in cfg.classifiers.iter().enumerate() {
            let seed = rng::derive(cfg.master_seed, &[tag::REPETITION, rep, tag::CLASSIFIER, c as u64]);
            let fitted = classifiers::fit(spec, &tr, seed).stage("train")?;
            let pred = fitted.model.predict(&x_test).stage("evaluate")?;
            let cm = confusion(te.labels(), &pred).stage("evaluate")?;
            out.push(RawRecord {
                repetition: r,
                feature_set: name.clone(),
                classifier: spec.short_name().to_string(),
                metrics: metrics(&cm).stage("evaluate")?,
                confusion: cm,
                train_cycles: fitted.train_cycles,
                train_ms: fitted.train_time.as_secs_f64() * 1e3,
            });
        }
    }
    Ok(out)
}

/// No original row of `test` may appear among the rows used for fitting.
pub fn check_leakage(train: &Dataset<f64>, test: &Dataset<f64>) -> Result<()> {
    let held_out: HashSet<u64> = test.row_ids().iter().copied().collect();
    match train
        .row_ids()
        .iter()
        .find(|&&id| id < SYNTHETIC_ROW_ID && held_out.contains(&id))
    {
        Some(&id) => Err(Error::Leakage(id)),
        None => Ok(()),
    }
}

fn aggregate(
    raw: &[RawRecord],
    feature_sets: &[(String, FeatureMask)],
    classifiers: &[ClassifierSpec],
) -> (Vec<ReportRow>, Vec<TimingRow>) {
    let mut groups: BTreeMap<(&str, &str), Vec<&RawRecord>> = BTreeMap::new();
    for rec in raw {
        groups
            .entry((rec.feature_set.as_str(), rec.classifier.as_str()))
            .or_default()
            .push(rec);
    }
    let mut rows = Vec::new();
    let mut timing = Vec::new();
    for spec in classifiers {
        let clf = spec.short_name();
        let base_ms = groups
            .get(&(NO_FS, clf))
            .map(|g| Stat::of(g.iter().map(|r| r.train_ms)).mean);
        for (fs, mask) in feature_sets {
            let Some(g) = groups.get(&(fs.as_str(), clf)) else {
                continue;
            };
            let stat = |f: fn(&RawRecord) -> f64| Stat::of(g.iter().map(|r| f(r)));
            rows.push(ReportRow {
                feature_set: fs.clone(),
                classifier: clf.to_string(),
                n_features: mask.popcount(),
                accuracy: stat(|r| r.metrics.accuracy),
                precision: stat(|r| r.metrics.precision),
                recall: stat(|r| r.metrics.recall),
                f1: stat(|r| r.metrics.f1),
                train_cycles: stat(|r| r.train_cycles as f64),
            });
            let ms = stat(|r| r.train_ms);
            timing.push(TimingRow {
                feature_set: fs.clone(),
                classifier: clf.to_string(),
                change_pct: base_ms.filter(|&b| b > 0.0).map(|b| 100.0 * (ms.mean - b) / b),
                train_ms: ms,
            });
        }
    }
    (rows, timing)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(ids: &[u64]) -> Dataset<f64> {
        let rows = ids.iter().map(|&i| vec![Some(i as f64)]).collect();
        let d = Dataset::new(vec!["a".into()], rows, vec![0; ids.len()], "t").unwrap();
        d.with_rows(d.values().to_vec(), d.labels().to_vec(), ids.to_vec())
    }

    #[test]
    fn leakage_guard() {
        assert!(check_leakage(&ds(&[0, 1, SYNTHETIC_ROW_ID | 2]), &ds(&[2, 3])).is_ok());
        assert!(matches!(check_leakage(&ds(&[0, 3]), &ds(&[2, 3])), Err(Error::Leakage(3))));
    }

    #[test]
    fn algorithm_seeds_differ() {
        let seeds: HashSet<u64> = Algorithm::ALL.iter().map(|&a| algorithm_seed(1, a)).collect();
        assert_eq!(seeds.len(), 3);
    }
}
