use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bioselect::error::StageContext;
use bioselect::fitness::brute_force_best;
use bioselect::harness::{
    emit_report, history_csv, load_dataset, read_report, run_experiment, run_selection, selection_view,
    ExperimentConfig, Format,
};
use bioselect::{preprocess, Algorithm, Error, Result};

#[derive(Parser)]
#[command(name = "bioselect", version, about = "Wrapper feature selection with GA, PSO and WOA")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Overrides `master_seed`.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// csv, json, markdown or all.
    #[arg(long, default_value = "all")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Clean the whole dataset and write it out.
    Preprocess(Common),
    /// Run the optimizers on the selection view.
    Select {
        #[command(flatten)]
        common: Common,
        /// Restrict to these algorithms (ga, pso, woa).
        #[arg(long = "algorithm")]
        algorithms: Vec<String>,
    },
    /// Exhaustive search over every feature subset (N <= 16).
    Oracle {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 16)]
        max_n: usize,
    },
    /// Selection plus the repeated train/test evaluation.
    Benchmark {
        #[command(flatten)]
        common: Common,
        /// Overrides `repetitions`.
        #[arg(long)]
        repetitions: Option<usize>,
    },
    /// Re-render tables from an existing report.json.
    Report {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
        #[arg(long, default_value = "all")]
        format: Format,
    },
}

fn load_config(c: &Common) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(&c.config).stage("config")?;
    if let Some(seed) = c.seed {
        cfg.master_seed = seed;
    }
    Ok(cfg)
}

fn write(dir: &Path, name: &str, text: &str) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| Error::Io { path, source: e })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Preprocess(c) => {
            let cfg = load_config(&c)?;
            let data = load_dataset(&cfg)?;
            let pp = preprocess::PreprocessConfig {
                seed: cfg.master_seed,
                ..cfg.preprocess
            };
            let (clean, summary) = preprocess::run(&data, &pp).stage("preprocess")?;
            fs::create_dir_all(&c.out_dir).map_err(|e| Error::Io {
                path: c.out_dir.clone(),
                source: e,
            })?;
            clean.save_csv(c.out_dir.join("preprocessed.csv")).stage("write")?;
            let json = serde_json::to_string_pretty(&summary)?;
            write(&c.out_dir, "preprocess_summary.json", &json).stage("write")?;
            println!("{json}");
        }
        Command::Select { common, algorithms } => {
            let mut cfg = load_config(&common)?;
            if !algorithms.is_empty() {
                cfg.algorithms = algorithms
                    .iter()
                    .map(|a| a.parse::<Algorithm>())
                    .collect::<Result<_>>()
                    .stage("config")?;
            }
            let data = load_dataset(&cfg)?;
            let (view, _) = selection_view(&cfg, &data)?;
            let selections = run_selection(&cfg, &view)?;
            for s in &selections {
                let name = s.algorithm.name();
                write(&common.out_dir, &format!("select_{name}.json"), &serde_json::to_string_pretty(s)?)
                    .stage("write")?;
                write(&common.out_dir, &format!("history_{name}.csv"), &history_csv(&s.history)).stage("write")?;
            }
            println!("{}", serde_json::to_string_pretty(&selections)?);
        }
        Command::Oracle { common, max_n } => {
            let cfg = load_config(&common)?;
            let data = load_dataset(&cfg)?;
            let (view, _) = selection_view(&cfg, &data)?;
            let bf = brute_force_best(&view, cfg.fitness, max_n).stage("oracle")?;
            let mut dump = String::from("mask,accuracy,fitness\n");
            for (m, v) in &bf.all {
                dump.push_str(&format!("{m},{},{}\n", v.accuracy, v.fitness));
            }
            write(&common.out_dir, "oracle.csv", &dump).stage("write")?;
            let names: Vec<&String> = bf.best_mask.indices().iter().map(|&i| &view.feature_names()[i]).collect();
            let best = serde_json::json!({
                "mask_bits": bf.best_mask,
                "selected_feature_names": names,
                "fitness": bf.best.fitness,
                "accuracy": bf.best.accuracy,
                "popcount": bf.best.popcount,
                "evaluations": bf.evaluations,
            });
            println!("{}", serde_json::to_string_pretty(&best)?);
        }
        Command::Benchmark { common, repetitions } => {
            let mut cfg = load_config(&common)?;
            if let Some(r) = repetitions {
                cfg.repetitions = r;
            }
            let report = run_experiment(&cfg)?;
            let files = emit_report(&report, &common.out_dir, common.format).stage("write")?;
            for f in files {
                println!("{}", f.display());
            }
        }
        Command::Report {
            input,
            out_dir,
            format,
        } => {
            let report = read_report(&input).stage("report")?;
            let files = emit_report(&report, &out_dir, format).stage("write")?;
            for f in files {
                println!("{}", f.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
