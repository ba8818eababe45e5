//! Sweeps over template counts and seeds.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::ResultsTable;
use super::taskfile::parse_task_file;
use super::tasks::{generate_task, task_spec, DomainSpec, TaskFile};
use crate::domain::{CompileOptions, Domain};
use crate::engine::write_checkpoint;
use crate::error::{Error, Result};
use crate::eval::{classify_outcome, extract_program, program_dot, write_program, Category, EvalConfig, Outcome, Program};
use crate::hypothesis::PruneConfig;
use crate::oracle::OracleTask;
use crate::train::{train, StopReason, TrainConfig};

/// Environment variable capping the number of parallel runs.
pub const WORKERS_ENV: &str = "DILP_WORKERS";

/// Train and test domains compiled for one template count.
#[derive(Debug)]
pub struct CompiledTask {
    pub name: String,
    /// Number of invented predicates.
    pub templates: usize,
    pub train: Domain,
    pub test: Domain,
}

fn compile_domain(d: &DomainSpec, options: &CompileOptions) -> Result<Domain> {
    Domain::compile(&d.predicates, &d.constants, &d.facts, &d.positive, &d.negative, options)
}

impl CompiledTask {
    /// `templates` invented predicates are added to both domains.
    pub fn compile(task: &TaskFile, templates: usize, prune: &PruneConfig, build_index: bool) -> Result<Self> {
        let options = CompileOptions { invented: templates, prune: prune.clone(), build_index, ..CompileOptions::default() };
        Ok(CompiledTask {
            name: task.name.clone(),
            templates,
            train: compile_domain(&task.train, &options)?,
            test: compile_domain(&task.test, &options)?,
        })
    }

    pub fn train_and_evaluate(&self, config: &TrainConfig, eval: &EvalConfig) -> Result<RunOutcome> {
        let result = train(self.train.problem(), config, None)?;
        let program = extract_program(&self.train.space, &result.weights);
        let outcome = if result.stop_reason == StopReason::Diverged {
            Outcome::default()
        } else {
            classify_outcome(&result.weights, &program, &self.train, &self.test, eval)
        };
        Ok(RunOutcome { result, program, outcome })
    }
}

/// The train domain of `task` as an oracle problem.
pub fn oracle_task(task: &DomainSpec, invented: usize) -> Result<OracleTask> {
    let d = compile_domain(task, &CompileOptions { invented, ..CompileOptions::default() })?;
    let (positive, negative): (Vec<_>, Vec<_>) = d.examples.iter().partition(|&(_, pos)| pos);
    Ok(OracleTask {
        language: d.language().clone(),
        facts: d.facts.clone(),
        positive: positive.into_iter().map(|(a, _)| a).collect(),
        negative: negative.into_iter().map(|(a, _)| a).collect(),
    })
}

pub struct RunOutcome {
    pub result: crate::train::TrainResult,
    pub program: Program,
    pub outcome: Outcome,
}

/// A task given by registry name or by task file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TaskSource {
    File { task_file: PathBuf },
    Named { task: String },
}

impl TaskSource {
    pub fn load(&self) -> Result<TaskFile> {
        match self {
            TaskSource::Named { task } => generate_task(&task_spec(task)?),
            TaskSource::File { task_file } => {
                let text = fs::read_to_string(task_file)?;
                let stem = task_file.file_stem().and_then(|s| s.to_str()).unwrap_or("task");
                parse_task_file(&text, stem)
            }
        }
    }
}

/// A sweep: every template count crossed with seeds
/// `first_seed..first_seed + seeds`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub source: TaskSource,
    /// Invented-predicate counts to sweep.
    pub templates: Vec<usize>,
    pub seeds: u64,
    #[serde(default)]
    pub first_seed: u64,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default)]
    pub threshold: Option<f64>,
    #[serde(default)]
    pub prune: PruneConfig,
    /// Write a weight checkpoint per run.
    #[serde(default)]
    pub save_weights: bool,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.templates.is_empty() {
            return Err(Error::Config("templates must list at least one count".into()));
        }
        if self.seeds == 0 {
            return Err(Error::Config("seeds must be positive".into()));
        }
        if let Some(t) = self.threshold {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::Config("threshold must lie in [0, 1]".into()));
            }
        }
        self.train.validate()
    }

    pub fn eval_config(&self) -> EvalConfig {
        EvalConfig {
            threshold: self.threshold.unwrap_or(EvalConfig::default().threshold),
            infer_steps: self.train.infer_steps,
            tnorms: self.train.tnorms,
        }
    }
}

/// One persisted run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub task: String,
    pub templates: usize,
    pub seed: u64,
    pub outcome: Outcome,
    pub category: Category,
    pub steps: usize,
    pub stop_reason: Option<StopReason>,
    pub final_loss: f64,
    /// Sampled-batch loss of every update.
    pub losses: Vec<f64>,
    pub full_losses: Vec<(usize, f64)>,
    /// The extracted program, one clause per line.
    pub program: String,
    /// The program's dependency graph in DOT.
    pub dot: String,
    /// Set when the run could not complete; such runs count as FAIL.
    pub error: Option<String>,
}

impl RunRecord {
    pub fn id(&self) -> String {
        run_id(&self.task, self.templates, self.seed)
    }
}

pub fn run_id(task: &str, templates: usize, seed: u64) -> String {
    format!("{task}-t{templates}-s{seed}")
}

/// Worker count from [`WORKERS_ENV`], else rayon's default.
pub fn worker_count() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&n: &usize| n > 0)
        .unwrap_or_else(rayon::current_num_threads)
}

/// Runs one seed on a compiled task. Failures become FAIL records.
pub fn run_one(task: &CompiledTask, seed: u64, train_cfg: &TrainConfig, eval: &EvalConfig) -> (RunRecord, Option<crate::engine::WeightStore>) {
    let cfg = TrainConfig { seed, ..train_cfg.clone() };
    match task.train_and_evaluate(&cfg, eval) {
        Ok(run) => {
            let record = RunRecord {
                task: task.name.clone(),
                templates: task.templates,
                seed,
                outcome: run.outcome,
                category: run.outcome.category(),
                steps: run.result.steps_used,
                stop_reason: Some(run.result.stop_reason),
                final_loss: run.result.final_loss,
                losses: run.result.losses,
                full_losses: run.result.full_losses,
                program: write_program(&run.program, task.train.language()),
                dot: program_dot(&run.program, task.train.language()),
                error: None,
            };
            (record, Some(run.result.weights))
        }
        Err(e) => (failed_record(&task.name, task.templates, seed, &e), None),
    }
}

/// Records of a finished sweep.
#[derive(Debug, Clone)]
pub struct ExperimentResults {
    pub records: Vec<RunRecord>,
    pub table: ResultsTable,
}

/// Runs every cell of `config`. With `out_dir`, records are appended to
/// `runs.jsonl` as they finish and the report files are written at the end.
/// `progress` receives one line per finished run.
pub fn run_experiment(
    config: &ExperimentConfig,
    out_dir: Option<&Path>,
    progress: Option<&(dyn Fn(&RunRecord) + Sync)>,
) -> Result<ExperimentResults> {
    config.validate()?;
    let task = config.source.load()?;
    let eval = config.eval_config();
    let needs_index = config.train.weight_mode != crate::engine::WeightMode::PerLiteral;
    let writer = match out_dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            if config.save_weights {
                fs::create_dir_all(dir.join("checkpoints"))?;
            }
            Some(Mutex::new(BufWriter::new(File::create(dir.join("runs.jsonl"))?)))
        }
        None => None,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let mut records = Vec::new();
    for &templates in &config.templates {
        let compiled = CompiledTask::compile(&task, templates, &config.prune, needs_index);
        let seeds: Vec<u64> = (config.first_seed..config.first_seed + config.seeds).collect();
        let cell: Vec<RunRecord> = pool.install(|| {
            seeds
                .par_iter()
                .map(|&seed| -> Result<RunRecord> {
                    let (record, weights) = match &compiled {
                        Ok(c) => run_one(c, seed, &config.train, &eval),
                        Err(e) => (failed_record(&task.name, templates, seed, e), None),
                    };
                    if let (Some(dir), Some(w)) = (out_dir, weights.as_ref().filter(|_| config.save_weights)) {
                        let f = File::create(dir.join("checkpoints").join(format!("{}.weights", record.id())))?;
                        write_checkpoint(w, BufWriter::new(f))?;
                    }
                    if let Some(w) = &writer {
                        let mut w = w.lock().expect("writer lock");
                        serde_json::to_writer(&mut *w, &record)?;
                        writeln!(w)?;
                        w.flush()?;
                    }
                    if let Some(p) = progress {
                        p(&record);
                    }
                    Ok(record)
                })
                .collect::<Result<_>>()
        })?;
        records.extend(cell);
    }
    records.sort_by_key(|r| (r.templates, r.seed));
    let table = ResultsTable::from_records(&records);
    if let Some(dir) = out_dir {
        super::report::write_report(&records, dir)?;
    }
    Ok(ExperimentResults { records, table })
}

fn failed_record(task: &str, templates: usize, seed: u64, e: &Error) -> RunRecord {
    RunRecord {
        task: task.to_string(),
        templates,
        seed,
        outcome: Outcome::default(),
        category: Category::Fail,
        steps: 0,
        stop_reason: None,
        final_loss: f64::NAN,
        losses: Vec::new(),
        full_losses: Vec::new(),
        program: String::new(),
        dot: String::new(),
        error: Some(e.to_string()),
    }
}

/// Reads `runs.jsonl` from a results directory.
pub fn read_records(dir: &Path) -> Result<Vec<RunRecord>> {
    let file = File::open(dir.join("runs.jsonl"))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::Parse { line: i + 1, message: e.to_string() })?);
    }
    Ok(out)
}
