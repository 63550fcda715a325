use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preprocess::PreprocessSummary;

use super::experiment::{RawRecord, Selection, NO_FS};

/// Mean and sample standard deviation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
}

impl Stat {
    /// Two-pass, so the result does not depend on accumulation order tricks.
    pub fn of(values: impl Iterator<Item = f64> + Clone) -> Self {
        let n = values.clone().count();
        if n == 0 {
            return Self::default();
        }
        let mean = values.clone().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, std }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub source: String,
    pub rows: usize,
    pub features: usize,
    pub feature_names: Vec<String>,
    pub class_counts: [usize; 2],
}

/// Aggregates for one classifier on one feature set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub feature_set: String,
    pub classifier: String,
    pub n_features: usize,
    pub accuracy: Stat,
    pub precision: Stat,
    pub recall: Stat,
    pub f1: Stat,
    pub train_cycles: Stat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub feature_set: String,
    pub classifier: String,
    pub train_ms: Stat,
    /// `100·(t_fs − t_nofs)/t_nofs` on mean fit time.
    pub change_pct: Option<f64>,
}

/// Wall-clock measurements. Never identical across runs, so kept out of the
/// deterministic report and written to `timing.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    /// Repetitions ran concurrently, so times include contention.
    pub parallel: bool,
    pub rows: Vec<TimingRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub dataset: DatasetInfo,
    pub master_seed: u64,
    pub repetitions: usize,
    pub selection_preprocess: PreprocessSummary,
    pub selections: Vec<Selection>,
    pub rows: Vec<ReportRow>,
    pub raw: Vec<RawRecord>,
    #[serde(skip)]
    pub timing: Option<Timing>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    Csv,
    Json,
    Markdown,
    #[default]
    All,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "md" | "markdown" => Ok(Format::Markdown),
            "all" => Ok(Format::All),
            other => Err(Error::config(format!("unknown format `{other}`"))),
        }
    }
}

fn feature_set_label(fs: &str) -> String {
    match fs {
        NO_FS => "No FS".to_string(),
        other => other.to_ascii_uppercase(),
    }
}

/// `"99.3% (+0.2)"`: one-decimal percent, delta in points against the baseline.
pub fn accuracy_cell(value: f64, baseline: Option<f64>) -> String {
    match baseline {
        Some(b) => format!("{:.1}% ({:+.1})", 100.0 * value, 100.0 * (value - b)),
        None => format!("{:.1}%", 100.0 * value),
    }
}

impl ExperimentReport {
    /// Deterministic JSON: everything except timing.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    fn row(&self, fs: &str, classifier: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.feature_set == fs && r.classifier == classifier)
    }

    fn timing_row(&self, fs: &str, classifier: &str) -> Option<&TimingRow> {
        self.timing
            .as_ref()?
            .rows
            .iter()
            .find(|r| r.feature_set == fs && r.classifier == classifier)
    }

    fn classifiers(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.classifier.as_str()) {
                out.push(&r.classifier);
            }
        }
        out
    }

    /// No FS first, then feature sets in report order.
    fn feature_sets(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.feature_set.as_str()) {
                out.push(&r.feature_set);
            }
        }
        out
    }

    /// One flat record per (classifier, feature set).
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "classifier",
            "feature_set",
            "n_features",
            "accuracy_mean",
            "accuracy_std",
            "precision_mean",
            "precision_std",
            "recall_mean",
            "recall_std",
            "f1_mean",
            "f1_std",
            "train_cycles_mean",
            "train_ms_mean",
            "train_time_change_pct",
        ])?;
        for r in &self.rows {
            let t = self.timing_row(&r.feature_set, &r.classifier);
            w.write_record([
                r.classifier.clone(),
                r.feature_set.clone(),
                r.n_features.to_string(),
                r.accuracy.mean.to_string(),
                r.accuracy.std.to_string(),
                r.precision.mean.to_string(),
                r.precision.std.to_string(),
                r.recall.mean.to_string(),
                r.recall.std.to_string(),
                r.f1.mean.to_string(),
                r.f1.std.to_string(),
                r.train_cycles.mean.to_string(),
                t.map(|t| t.train_ms.mean.to_string()).unwrap_or_default(),
                t.and_then(|t| t.change_pct).map(|c| c.to_string()).unwrap_or_default(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::config(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# Feature selection report\n");
        let _ = writeln!(
            s,
            "Dataset `{}`: {} rows, {} features, classes {}/{}. {} repetitions, master seed {}.\n",
            self.dataset.source,
            self.dataset.rows,
            self.dataset.features,
            self.dataset.class_counts[0],
            self.dataset.class_counts[1],
            self.repetitions,
            self.master_seed
        );

        if !self.selections.is_empty() {
            let _ = writeln!(s, "## Feature reduction\n");
            let _ = writeln!(s, "| Algorithm | Fitness | Features | Reduction | Selected |");
            let _ = writeln!(s, "|---|---|---|---|---|");
            for sel in &self.selections {
                let _ = writeln!(
                    s,
                    "| {} | {:.4} | {} | {:.1}% | {} |",
                    sel.algorithm.label(),
                    sel.fitness,
                    sel.popcount,
                    sel.reduction_pct,
                    sel.selected_feature_names.join(", ")
                );
            }
            s.push('\n');
        }

        let _ = writeln!(s, "## Accuracy\n");
        let _ = writeln!(s, "| Model | Features | Accuracy | Precision | Recall | F1 |");
        let _ = writeln!(s, "|---|---|---|---|---|---|");
        for clf in self.classifiers() {
            let base = self.row(NO_FS, clf);
            for fs in self.feature_sets() {
                let Some(r) = self.row(fs, clf) else { continue };
                let b = |f: fn(&ReportRow) -> f64| base.filter(|_| fs != NO_FS).map(f);
                let _ = writeln!(
                    s,
                    "| {} | {} | {} | {} | {} | {} |",
                    clf,
                    feature_set_label(fs),
                    accuracy_cell(r.accuracy.mean, b(|x| x.accuracy.mean)),
                    accuracy_cell(r.precision.mean, b(|x| x.precision.mean)),
                    accuracy_cell(r.recall.mean, b(|x| x.recall.mean)),
                    accuracy_cell(r.f1.mean, b(|x| x.f1.mean)),
                );
            }
        }
        s.push('\n');

        if let Some(timing) = &self.timing {
            let _ = writeln!(s, "## Processing time\n");
            if timing.parallel {
                let _ = writeln!(s, "Repetitions ran in parallel; times include contention.\n");
            }
            let _ = writeln!(s, "| Model | Features | Mean fit time (ms) | Change |");
            let _ = writeln!(s, "|---|---|---|---|");
            for clf in self.classifiers() {
                for fs in self.feature_sets() {
                    let Some(t) = self.timing_row(fs, clf) else { continue };
                    let change = match (fs, t.change_pct) {
                        (NO_FS, _) | (_, None) => "-".to_string(),
                        (_, Some(c)) => format!("{c:+.1}%"),
                    };
                    let _ = writeln!(
                        s,
                        "| {} | {} | {:.3} | {} |",
                        clf,
                        feature_set_label(fs),
                        t.train_ms.mean,
                        change
                    );
                }
            }
            s.push('\n');
        }

        if self.classifiers().contains(&"NN") {
            let _ = writeln!(s, "## Average number of NN cycles\n");
            let _ = writeln!(s, "| Features | Epochs |");
            let _ = writeln!(s, "|---|---|");
            for fs in self.feature_sets() {
                if let Some(r) = self.row(fs, "NN") {
                    let _ = writeln!(s, "| {} | {:.1} |", feature_set_label(fs), r.train_cycles.mean);
                }
            }
        }
        s
    }
}

/// `generation,best_fitness` rows.
pub fn history_csv(history: &[f64]) -> String {
    let mut s = String::from("generation,best_fitness\n");
    for (g, f) in history.iter().enumerate() {
        let _ = writeln!(s, "{},{}", g + 1, f);
    }
    s
}

fn write(dir: &Path, name: &str, text: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(())
}

/// Writes the report tables plus histories, masks and a summary into `dir`.
pub fn emit_report(r: &ExperimentReport, dir: &Path, format: Format) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    if matches!(format, Format::Json | Format::All) {
        write(dir, "report.json", &r.to_json()?, &mut written)?;
        if let Some(t) = &r.timing {
            write(dir, "timing.json", &serde_json::to_string_pretty(t)?, &mut written)?;
        }
    }
    if matches!(format, Format::Csv | Format::All) {
        write(dir, "report.csv", &r.to_csv()?, &mut written)?;
    }
    if matches!(format, Format::Markdown | Format::All) {
        write(dir, "report.md", &r.to_markdown(), &mut written)?;
    }
    for sel in &r.selections {
        write(
            dir,
            &format!("history_{}.csv", sel.algorithm.name()),
            &history_csv(&sel.history),
            &mut written,
        )?;
    }
    let masks: serde_json::Map<String, serde_json::Value> = r
        .selections
        .iter()
        .map(|s| {
            (
                s.algorithm.name().to_string(),
                serde_json::json!({
                    "mask_bits": s.mask_bits,
                    "features": s.selected_feature_names,
                }),
            )
        })
        .collect();
    write(dir, "masks.json", &serde_json::to_string_pretty(&masks)?, &mut written)?;
    let summary = serde_json::json!({
        "dataset": r.dataset,
        "master_seed": r.master_seed,
        "repetitions": r.repetitions,
        "selection_preprocess": r.selection_preprocess,
        "selections": r.selections.iter().map(|s| serde_json::json!({
            "algorithm": s.algorithm,
            "fitness": s.fitness,
            "accuracy": s.accuracy,
            "popcount": s.popcount,
            "reduction_pct": s.reduction_pct,
        })).collect::<Vec<_>>(),
    });
    write(dir, "summary.json", &serde_json::to_string_pretty(&summary)?, &mut written)?;
    Ok(written)
}

/// Reads `report.json` and, when present, the neighbouring `timing.json`.
pub fn read_report(path: &Path) -> Result<ExperimentReport> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut report = ExperimentReport::from_json(&text)?;
    let timing_path = path.with_file_name("timing.json");
    if let Ok(t) = fs::read_to_string(&timing_path) {
        report.timing = Some(serde_json::from_str(&t)?);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_format() {
        assert_eq!(accuracy_cell(0.993, Some(0.991)), "99.3% (+0.2)");
        assert_eq!(accuracy_cell(0.75, Some(0.8)), "75.0% (-5.0)");
        assert_eq!(accuracy_cell(0.5, None), "50.0%");
    }

    #[test]
    fn stat_two_pass() {
        let s = Stat::of([2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0].into_iter());
        assert_eq!(s.mean, 5.0);
        assert!((s.std - (32.0f64 / 7.0).sqrt()).abs() < 1e-12);
        assert_eq!(Stat::of([3.0].into_iter()), Stat { mean: 3.0, std: 0.0 });
    }

    #[test]
    fn history_rows() {
        assert_eq!(history_csv(&[0.5, 0.75]), "generation,best_fitness\n1,0.5\n2,0.75\n");
    }

    #[test]
    fn formats_parse() {
        assert_eq!("md".parse::<Format>().unwrap(), Format::Markdown);
        assert!("xml".parse::<Format>().is_err());
    }
}
