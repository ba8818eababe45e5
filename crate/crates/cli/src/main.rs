use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use dilp::engine::{write_checkpoint, TNorm, TNormConfig, WeightMode, WeightShape};
use dilp::eval::{extract_program, program_dot, write_program, EvalConfig};
use dilp::hypothesis::PruneConfig;
use dilp::oracle::{exhaustive_count, exhaustive_solve, DEFAULT_CAP};
use dilp::train::TrainConfig;
use dilp::workbench::{
    oracle_task, read_records, run_experiment, run_id, task_names, write_report, write_task_file, CompiledTask,
    ExperimentConfig, TaskFile, TaskSource, WORKERS_ENV,
};

/// Differentiable inductive logic programming workbench.
#[derive(Parser)]
#[command(name = "dilp", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a task and print its size; optionally write the task file.
    Compile {
        #[command(flatten)]
        task: TaskArg,
        /// Invented predicates to size the hypothesis space for.
        #[arg(long, default_value_t = 0)]
        templates: usize,
        /// Write the task file here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train once and report the extracted program and outcome.
    Train(TrainArgs),
    /// Run a sweep described by a TOML file.
    Sweep {
        config: PathBuf,
        /// Results directory.
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Rebuild report files from a results directory.
    Report { results: PathBuf },
    /// Print the program of one sweep run.
    ExportProgram {
        /// Run id such as `mod3-t30-s4`.
        run_id: String,
        #[arg(long, default_value = "results")]
        results: PathBuf,
        /// Print the dependency graph in DOT instead.
        #[arg(long)]
        dot: bool,
    },
    /// List registered tasks.
    Tasks,
    /// Exhaustive symbolic search over a tiny hypothesis space.
    #[command(hide = true)]
    Oracle {
        #[command(flatten)]
        task: TaskArg,
        #[arg(long, default_value_t = 0)]
        templates: usize,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u128,
        /// Solutions to print.
        #[arg(long, default_value_t = 5)]
        show: usize,
    },
}

#[derive(Args)]
struct TaskArg {
    /// Registered task name (see `dilp tasks`).
    #[arg(required_unless_present = "task_file")]
    task: Option<String>,
    /// Read the task from a task file instead.
    #[arg(long, conflicts_with = "task")]
    task_file: Option<PathBuf>,
}

impl TaskArg {
    fn source(&self) -> TaskSource {
        match (&self.task_file, &self.task) {
            (Some(path), _) => TaskSource::File { task_file: path.clone() },
            (None, Some(name)) => TaskSource::Named { task: name.clone() },
            (None, None) => unreachable!("clap requires one of them"),
        }
    }

    fn load(&self) -> Result<TaskFile> {
        Ok(self.source().load()?)
    }
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    task: TaskArg,
    /// Invented predicates; the target always has its own template too.
    #[arg(long, default_value_t = 10)]
    templates: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "per_literal")]
    weight_mode: WeightMode,
    /// Disjunction combining successive inference steps.
    #[arg(long, default_value = "max")]
    tnorm_step: TNorm,
    #[arg(long)]
    max_steps: Option<usize>,
    #[arg(long)]
    infer_steps: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    batch_probability: Option<f64>,
    #[arg(long)]
    init_std: Option<f64>,
    #[arg(long)]
    early_stop_loss: Option<f64>,
    /// Fuzzy prediction threshold.
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    /// Per-step loss log.
    #[arg(long)]
    log: Option<PathBuf>,
    /// Write the trained weights here.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Write the program's dependency graph here.
    #[arg(long)]
    dot: Option<PathBuf>,
}

impl TrainArgs {
    fn config(&self) -> TrainConfig {
        let d = TrainConfig::default();
        let mut cfg = TrainConfig {
            max_steps: self.max_steps.unwrap_or(d.max_steps),
            early_stop_loss: self.early_stop_loss.unwrap_or(d.early_stop_loss),
            infer_steps: self.infer_steps.unwrap_or(d.infer_steps),
            batch_probability: self.batch_probability.unwrap_or(d.batch_probability),
            init_std: self.init_std.unwrap_or(d.init_std),
            seed: self.seed,
            weight_mode: self.weight_mode,
            tnorms: TNormConfig { or_step: self.tnorm_step, ..TNormConfig::default() },
            ..d
        };
        if let Some(lr) = self.learning_rate {
            cfg.optimizer.learning_rate = lr;
        }
        cfg
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Compile { task, templates, out } => compile(&task, templates, out.as_deref()),
        Command::Train(args) => train(&args),
        Command::Sweep { config, out } => sweep(&config, &out),
        Command::Report { results } => {
            let records = read_records(&results)?;
            let table = write_report(&records, &results)?;
            print!("{}", table.render());
            Ok(())
        }
        Command::ExportProgram { run_id, results, dot } => {
            let records = read_records(&results)?;
            let Some(r) = records.iter().find(|r| r.id() == run_id) else {
                bail!("no run `{run_id}` in {}", results.display());
            };
            if let Some(e) = &r.error {
                bail!("run `{run_id}` failed: {e}");
            }
            print!("{}", if dot { &r.dot } else { &r.program });
            Ok(())
        }
        Command::Tasks => {
            for name in task_names() {
                println!("{name}");
            }
            Ok(())
        }
        Command::Oracle { task, templates, cap, show } => oracle(&task, templates, cap, show),
    }
}

fn compile(task: &TaskArg, templates: usize, out: Option<&Path>) -> Result<()> {
    let file = task.load()?;
    let compiled = CompiledTask::compile(&file, templates, &PruneConfig::default(), false)?;
    for (label, d) in [("train", &compiled.train), ("test", &compiled.test)] {
        let lang = d.language();
        let pos = d.examples.positive.iter().filter(|&&p| p).count();
        println!(
            "{label}: {} constants, {} ground atoms, {} facts, {} positive / {} negative examples",
            lang.num_constants(),
            lang.atom_count(),
            d.facts.len(),
            pos,
            d.examples.len() - pos
        );
    }
    let space = &compiled.train.space;
    println!("literal candidates: {}", space.literals().len());
    for mode in [WeightMode::PerLiteral, WeightMode::PerClause, WeightMode::PerTemplate] {
        println!("{mode} parameters: {}", WeightShape::for_space(space, mode).param_count());
    }
    if let Some(path) = out {
        fs::write(path, write_task_file(&file)).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn train(args: &TrainArgs) -> Result<()> {
    let file = args.task.load()?;
    let cfg = args.config();
    cfg.validate()?;
    let needs_index = cfg.weight_mode != WeightMode::PerLiteral;
    let compiled = CompiledTask::compile(&file, args.templates, &PruneConfig::default(), needs_index)?;
    let mut log: Option<Box<dyn Write>> = match &args.log {
        Some(p) => Some(Box::new(BufWriter::new(File::create(p)?))),
        None => None,
    };
    let result = dilp::train::train(compiled.train.problem(), &cfg, log.as_mut().map(|w| w.as_mut() as &mut dyn Write))?;
    if let Some(w) = log.as_mut() {
        w.flush()?;
    }
    let program = extract_program(&compiled.train.space, &result.weights);
    let eval = EvalConfig { threshold: args.threshold, infer_steps: cfg.infer_steps, tnorms: cfg.tnorms };
    let outcome = dilp::eval::classify_outcome(&result.weights, &program, &compiled.train, &compiled.test, &eval);
    let lang = compiled.train.language();
    println!("run {}", run_id(&file.name, args.templates, args.seed));
    println!("stop {:?} after {} steps, final loss {:.4e}", result.stop_reason, result.steps_used, result.final_loss);
    println!("outcome {} (C={} F={} CT={} FT={})", outcome.category(), outcome.c, outcome.f, outcome.ct, outcome.ft);
    print!("{}", write_program(&program, lang));
    if let Some(p) = &args.checkpoint {
        write_checkpoint(&result.weights, BufWriter::new(File::create(p)?))?;
    }
    if let Some(p) = &args.dot {
        fs::write(p, program_dot(&program, lang))?;
    }
    Ok(())
}

fn sweep(config: &Path, out: &Path) -> Result<()> {
    let text = fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?;
    let cfg = ExperimentConfig::from_toml(&text)?;
    eprintln!("workers: {} (set {WORKERS_ENV} to change)", dilp::workbench::worker_count());
    let progress = |r: &dilp::workbench::RunRecord| {
        let mut err = io::stderr().lock();
        let _ = writeln!(err, "{} {} steps={} loss={:.3e}", r.id(), r.category, r.steps, r.final_loss);
    };
    let results = run_experiment(&cfg, Some(out), Some(&progress))?;
    print!("{}", results.table.render());
    Ok(())
}

fn oracle(task: &TaskArg, templates: usize, cap: u128, show: usize) -> Result<()> {
    let file = task.load()?;
    let otask = oracle_task(&file.train, templates)?;
    let prune = PruneConfig::default();
    println!("programs to check: {}", exhaustive_count(&otask.language, &prune));
    let solutions = exhaustive_solve(&otask, &prune, cap)?;
    println!("solutions: {}", solutions.len());
    for program in solutions.iter().take(show) {
        println!("--");
        for c in program {
            println!("{}", c.display(&otask.language));
        }
    }
    Ok(())
}
