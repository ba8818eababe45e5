//! Aggregation and report files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::experiment::RunRecord;
use super::significance::{significance, Significance};
use crate::error::Result;
use crate::eval::Category;

/// Column header of `results.csv`.
pub const CSV_HEADER: &str = "task,templates,seed,outcome,C,F,CT,FT,steps,final_loss";

/// Correct programs exported as DOT per cell.
const DOT_SAMPLES: usize = 3;

/// Outcome counts of one (task, template count) cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellSummary {
    pub task: String,
    pub templates: usize,
    pub runs: usize,
    /// Runs per category, in [`Category::ALL`] order.
    pub categories: [usize; 5],
    /// Runs with each flag set, independently: C, F, CT, FT.
    pub flags: [usize; 4],
}

impl CellSummary {
    pub fn count(&self, category: Category) -> usize {
        self.categories[Category::ALL.iter().position(|&c| c == category).expect("known category")]
    }

    /// Share of runs in `category`, in percent.
    pub fn percent(&self, category: Category) -> f64 {
        100.0 * self.count(category) as f64 / self.runs.max(1) as f64
    }

    /// Runs whose category is `category` or precedes it.
    pub fn cumulative(&self, category: Category) -> usize {
        let k = Category::ALL.iter().position(|&c| c == category).expect("known category");
        self.categories[..=k].iter().sum()
    }

    pub fn cumulative_percent(&self, category: Category) -> f64 {
        100.0 * self.cumulative(category) as f64 / self.runs.max(1) as f64
    }
}

/// Significance of the C-or-F rate between two cells of the same task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub task: String,
    pub templates_a: usize,
    pub templates_b: usize,
    pub significance: Significance,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ResultsTable {
    pub cells: Vec<CellSummary>,
    /// Consecutive template counts of each task.
    pub comparisons: Vec<Comparison>,
}

impl ResultsTable {
    pub fn from_records(records: &[RunRecord]) -> Self {
        let mut cells: Vec<CellSummary> = Vec::new();
        for r in records {
            let cell = match cells.iter_mut().position(|c| c.task == r.task && c.templates == r.templates) {
                Some(i) => &mut cells[i],
                None => {
                    cells.push(CellSummary {
                        task: r.task.clone(),
                        templates: r.templates,
                        runs: 0,
                        categories: [0; 5],
                        flags: [0; 4],
                    });
                    cells.last_mut().expect("just pushed")
                }
            };
            cell.runs += 1;
            cell.categories[Category::ALL.iter().position(|&c| c == r.category).expect("known category")] += 1;
            let o = r.outcome;
            for (f, set) in cell.flags.iter_mut().zip([o.c, o.f, o.ct, o.ft]) {
                *f += set as usize;
            }
        }
        cells.sort_by(|a, b| (&a.task, a.templates).cmp(&(&b.task, b.templates)));
        let mut comparisons = Vec::new();
        for pair in cells.windows(2).filter(|w| w[0].task == w[1].task) {
            let (a, b) = (&pair[0], &pair[1]);
            if let Ok(s) = significance(
                a.cumulative(Category::F) as u64,
                a.runs as u64,
                b.cumulative(Category::F) as u64,
                b.runs as u64,
            ) {
                comparisons.push(Comparison { task: a.task.clone(), templates_a: a.templates, templates_b: b.templates, significance: s });
            }
        }
        ResultsTable { cells, comparisons }
    }

    pub fn cell(&self, task: &str, templates: usize) -> Option<&CellSummary> {
        self.cells.iter().find(|c| c.task == task && c.templates == templates)
    }

    /// Human-readable table. Percentages are cumulative: the F column counts
    /// runs in C or F, and so on, so columns never decrease left to right.
    pub fn render(&self) -> String {
        let width = self.cells.iter().map(|c| c.task.len()).max().unwrap_or(4).max(4);
        let mut out = String::new();
        let _ = writeln!(out, "{:<width$}  {:>9}  {:>4}  {:>6}  {:>6}  {:>6}  {:>6}  {:>6}", "task", "templates", "runs", "C", "F", "CT", "FT", "FAIL");
        for c in &self.cells {
            let _ = writeln!(
                out,
                "{:<width$}  {:>9}  {:>4}  {:>6.1}  {:>6.1}  {:>6.1}  {:>6.1}  {:>6.1}",
                c.task,
                c.templates,
                c.runs,
                c.cumulative_percent(Category::C),
                c.cumulative_percent(Category::F),
                c.cumulative_percent(Category::CT),
                c.cumulative_percent(Category::FT),
                c.percent(Category::Fail),
            );
        }
        if !self.comparisons.is_empty() {
            let _ = writeln!(out, "\nC-or-F rate differences:");
            for cmp in &self.comparisons {
                let _ = writeln!(
                    out,
                    "{}: {} vs {} templates, p = {:.3e} ({:?})",
                    cmp.task, cmp.templates_a, cmp.templates_b, cmp.significance.p_value, cmp.significance.test
                );
            }
        }
        out
    }

    /// Per-category sweep series: one row per cell, category shares as fractions.
    pub fn sweep_csv(&self) -> String {
        let mut out = String::from("task,templates,runs,C,F,CT,FT,FAIL\n");
        for c in &self.cells {
            let _ = write!(out, "{},{},{}", c.task, c.templates, c.runs);
            for cat in Category::ALL {
                let _ = write!(out, ",{:.6}", c.percent(cat) / 100.0);
            }
            out.push('\n');
        }
        out
    }
}

/// One row per run under [`CSV_HEADER`].
pub fn results_csv(records: &[RunRecord]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for r in records {
        let o = r.outcome;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.task, r.templates, r.seed, r.category, o.c as u8, o.f as u8, o.ct as u8, o.ft as u8, r.steps, r.final_loss
        );
    }
    out
}

/// Writes `results.csv`, `table.txt`, `sweep.csv` and DOT files for a few
/// correct programs per cell into `dir`.
pub fn write_report(records: &[RunRecord], dir: &Path) -> Result<ResultsTable> {
    fs::create_dir_all(dir)?;
    let table = ResultsTable::from_records(records);
    fs::write(dir.join("results.csv"), results_csv(records))?;
    fs::write(dir.join("table.txt"), table.render())?;
    fs::write(dir.join("sweep.csv"), table.sweep_csv())?;
    let dot_dir = dir.join("dot");
    for cell in &table.cells {
        let correct = records
            .iter()
            .filter(|r| r.task == cell.task && r.templates == cell.templates && r.category == Category::C && !r.dot.is_empty())
            .take(DOT_SAMPLES);
        for r in correct {
            fs::create_dir_all(&dot_dir)?;
            fs::write(dot_dir.join(format!("{}.dot", r.id())), &r.dot)?;
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::Outcome;

    fn record(templates: usize, seed: u64, outcome: Outcome) -> RunRecord {
        RunRecord {
            task: "even".into(),
            templates,
            seed,
            outcome,
            category: outcome.category(),
            steps: 10,
            stop_reason: None,
            final_loss: 0.5,
            losses: vec![],
            full_losses: vec![],
            program: String::new(),
            dot: "digraph program {\n}\n".into(),
            error: None,
        }
    }

    fn ok() -> Outcome {
        Outcome { c: true, f: true, ct: true, ft: true }
    }

    #[test]
    fn csv_columns_are_fixed() {
        let csv = results_csv(&[record(3, 0, ok())]);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("task,templates,seed,outcome,C,F,CT,FT,steps,final_loss"));
        assert_eq!(lines.next(), Some("even,3,0,C,1,1,1,1,10,0.5"));
    }

    #[test]
    fn table_counts_and_cumulative_columns() {
        let fuzzy = Outcome { f: true, ..Outcome::default() };
        let records = vec![record(3, 0, ok()), record(3, 1, fuzzy), record(3, 2, Outcome::default()), record(5, 0, ok())];
        let t = ResultsTable::from_records(&records);
        let c = t.cell("even", 3).unwrap();
        assert_eq!(c.runs, 3);
        assert_eq!(c.count(Category::C), 1);
        assert_eq!(c.cumulative(Category::F), 2);
        assert_eq!(c.count(Category::Fail), 1);
        assert_eq!(c.flags, [1, 2, 1, 1]);
        assert_eq!(t.comparisons.len(), 1);
        let text = t.render();
        assert!(text.lines().next().unwrap().contains("task"));
        assert!(text.contains("66.7"));
    }

    #[test]
    fn every_run_lands_in_exactly_one_category() {
        let records: Vec<_> = (0..16u64)
            .map(|s| record(1, s, Outcome { c: s & 1 != 0, f: s & 2 != 0, ct: s & 4 != 0, ft: s & 8 != 0 }))
            .collect();
        let t = ResultsTable::from_records(&records);
        assert_eq!(t.cells[0].categories.iter().sum::<usize>(), 16);
    }

    #[test]
    fn report_files_are_written() {
        let dir = tempfile::tempdir().unwrap();
        write_report(&[record(3, 0, ok())], dir.path()).unwrap();
        for f in ["results.csv", "table.txt", "sweep.csv", "dot/even-t3-s0.dot"] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
    }
}
