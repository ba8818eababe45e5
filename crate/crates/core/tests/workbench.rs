use std::fs;

use dilp::eval::Category;
use dilp::train::TrainConfig;
use dilp::workbench::{
    generate_task, parse_task_file, read_records, registry, run_experiment, task_spec, write_task_file,
    ExperimentConfig, ResultsTable, TaskSource, CSV_HEADER,
};

fn names(atoms: &[dilp::logic::SymbolicAtom]) -> Vec<String> {
    atoms.iter().map(|a| a.to_string()).collect()
}

#[test]
fn even_examples_split_by_parity() {
    let t = generate_task(&task_spec("even").unwrap()).unwrap();
    let evens: Vec<String> = (0..=10).step_by(2).map(|i| format!("even({i})")).collect();
    let odds: Vec<String> = (1..=9).step_by(2).map(|i| format!("even({i})")).collect();
    assert_eq!(names(&t.train.positive), evens);
    assert_eq!(names(&t.train.negative), odds);
}

#[test]
fn predecessor_has_ten_positive_examples() {
    let t = generate_task(&task_spec("predecessor").unwrap()).unwrap();
    let expected: Vec<String> = (1..=10).map(|i| format!("predecessor({i},{})", i - 1)).collect();
    assert_eq!(names(&t.train.positive), expected);
}

#[test]
fn mod5_hard_has_only_successor_background() {
    let t = generate_task(&task_spec("mod5-hard").unwrap()).unwrap();
    let bk: Vec<&str> = t.train.predicates.iter().filter(|p| !p.kind.is_intensional()).map(|p| p.name.as_str()).collect();
    assert_eq!(bk, ["zero", "succ"]);
    assert_eq!(names(&t.train.positive), ["mod5(0)", "mod5(5)", "mod5(10)"]);
}

#[test]
fn task_files_are_byte_identical_across_generations() {
    for spec in registry() {
        let a = write_task_file(&generate_task(&spec).unwrap());
        let b = write_task_file(&generate_task(&spec).unwrap());
        assert_eq!(a, b, "{}", spec.name);
        assert_eq!(write_task_file(&parse_task_file(&a, "x").unwrap()), a);
    }
}

/// Minimal structural check in place of an external DOT parser.
fn check_dot(dot: &str) {
    let lines: Vec<&str> = dot.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
    assert_eq!(lines.first(), Some(&"digraph program {"), "{dot}");
    assert_eq!(lines.last(), Some(&"}"), "{dot}");
    for l in &lines[1..lines.len() - 1] {
        assert!(l.ends_with(';'), "statement without terminator: {l}");
        assert_eq!(l.matches('"').count() % 2, 0, "unbalanced quotes: {l}");
        assert_eq!(l.matches('[').count(), l.matches(']').count(), "{l}");
    }
}

fn tiny_config(task: TaskSource) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::from_toml("task = \"predecessor\"\ntemplates = [0, 1]\nseeds = 2\n").unwrap();
    cfg.source = task;
    cfg.train = TrainConfig { max_steps: 300, ..TrainConfig::default() };
    cfg
}

#[test]
fn sweep_writes_reports_and_reruns_reproduce() {
    let dir = tempfile::tempdir().unwrap();
    let task_path = dir.path().join("predecessor.task");
    fs::write(&task_path, write_task_file(&generate_task(&task_spec("predecessor").unwrap()).unwrap())).unwrap();
    let out = dir.path().join("out");
    let cfg = tiny_config(TaskSource::File { task_file: task_path });
    let first = run_experiment(&cfg, Some(&out), None).unwrap();
    assert_eq!(first.records.len(), 4);
    for f in ["runs.jsonl", "results.csv", "table.txt", "sweep.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let csv = fs::read_to_string(out.join("results.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some(CSV_HEADER));
    assert_eq!(csv.lines().count(), 5);

    let records = read_records(&out).unwrap();
    assert_eq!(ResultsTable::from_records(&records), first.table);
    for r in &records {
        assert_eq!(r.category, r.outcome.category());
        assert!(!r.outcome.c || r.outcome.ct);
        check_dot(&r.dot);
    }
    let correct = records.iter().filter(|r| r.category == Category::C).count();
    let dots = fs::read_dir(out.join("dot")).map(|d| d.count()).unwrap_or(0);
    assert_eq!(dots, correct);

    // a single cell rerun without an output directory gives the same records
    let mut cell = cfg.clone();
    cell.templates = vec![1];
    let again = run_experiment(&cell, None, None).unwrap();
    let original: Vec<_> = records.iter().filter(|r| r.templates == 1).collect();
    assert_eq!(again.records.len(), original.len());
    for (a, b) in again.records.iter().zip(original) {
        assert_eq!((a.seed, a.category, a.steps, &a.losses, &a.program), (b.seed, b.category, b.steps, &b.losses, &b.program));
    }
}

#[test]
fn checked_in_experiment_configs_parse() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../experiments");
    let mut seen = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let cfg = ExperimentConfig::from_toml(&fs::read_to_string(&path).unwrap()).unwrap();
            cfg.source.load().unwrap();
            seen += 1;
        }
    }
    assert!(seen >= 4);
}

#[test]
fn unknown_tasks_become_failed_loads() {
    let cfg = tiny_config(TaskSource::Named { task: "nope".into() });
    assert!(run_experiment(&cfg, None, None).is_err());
}
