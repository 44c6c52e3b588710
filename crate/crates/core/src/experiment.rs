//! Batch experiments over many seeds and their CSV forms.
//!
//! Trials run in parallel; results are always reduced in trial-index order so
//! output is byte-identical across worker counts.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{run_conjecture_campaign, Conjecture, ConjectureEvidence, TrialRecord};
use crate::constraints::sudoku_constraints;
use crate::error::{Result, SudoqError};
use crate::fixtures;
use crate::grid::ClassicalGrid;
use crate::solver::{solve, SolverConfig, SolverStatus};

/// Bumped whenever a CSV schema changes.
pub const CSV_VERSION: u32 = 1;

/// Iteration histogram bucket width.
pub const HISTOGRAM_WIDTH: usize = 10;

/// 17 significant digits, enough to round-trip an `f64`.
pub fn csv_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaRow {
    pub sigma: f64,
    pub trials: usize,
    pub successes: usize,
    /// Iterations of solved runs; bucket `b` covers `[10b, 10b + 10)`, the last
    /// one is closed at `i_max`.
    pub histogram: Vec<usize>,
    /// Iteration count of every run, in seed order.
    pub iterations: Vec<usize>,
}

impl SigmaRow {
    pub fn success_rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }
}

fn bucket_count(i_max: usize) -> usize {
    i_max.div_ceil(HISTOGRAM_WIDTH).max(1)
}

/// For each σ, `trials` solver runs on `g` with seeds `cfg.seed + i`.
pub fn sweep_sigma(g: &ClassicalGrid, sigmas: &[f64], trials: usize, cfg: &SolverConfig) -> Result<Vec<SigmaRow>> {
    if trials == 0 {
        return Err(SudoqError::InvalidConfig("trials must be at least 1".into()));
    }
    let cl = sudoku_constraints(g.dim().block());
    let buckets = bucket_count(cfg.i_max);
    sigmas
        .iter()
        .map(|&sigma| {
            let sigma_cfg = cfg.with_sigma(sigma);
            sigma_cfg.validate()?;
            let runs: Vec<(SolverStatus, usize)> = (0..trials as u64)
                .into_par_iter()
                .map(|i| {
                    let outcome = solve::<f64>(g, &cl, &sigma_cfg.with_seed(cfg.seed.wrapping_add(i)))?;
                    Ok((outcome.status, outcome.iterations))
                })
                .collect::<Result<_>>()?;
            let mut row = SigmaRow {
                sigma,
                trials,
                successes: 0,
                histogram: vec![0; buckets],
                iterations: runs.iter().map(|&(_, it)| it).collect(),
            };
            for (status, it) in runs {
                if status == SolverStatus::Solved {
                    row.successes += 1;
                    row.histogram[(it / HISTOGRAM_WIDTH).min(buckets - 1)] += 1;
                }
            }
            Ok(row)
        })
        .collect()
}

pub fn sigma_csv(rows: &[SigmaRow]) -> String {
    let buckets = rows.first().map_or(0, |r| r.histogram.len());
    let mut out = format!("# sudoq sweep-sigma csv v{CSV_VERSION}; histogram bucket width {HISTOGRAM_WIDTH}\n");
    out.push_str("sigma,trials,successes,success_rate");
    for b in 0..buckets {
        out.push_str(&format!(",hist_{}", b * HISTOGRAM_WIDTH));
    }
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}",
            csv_float(r.sigma),
            r.trials,
            r.successes,
            csv_float(r.success_rate())
        ));
        for h in &r.histogram {
            out.push_str(&format!(",{h}"));
        }
        out.push('\n');
    }
    out
}

/// Uniqueness campaign on each of the 13 minimal Shidoku fixtures.
pub fn shidoku_suite(trials: usize, cfg: &SolverConfig) -> Result<Vec<ConjectureEvidence>> {
    fixtures::shidoku_minimal()
        .iter()
        .map(|(id, g)| run_conjecture_campaign(g, id, Conjecture::Two, trials, cfg))
        .collect()
}

pub const RECORDS_CSV_HEADER: &str = "grid_id,seed,status,iterations,classical,max_residual";

pub fn records_csv<'a>(records: impl IntoIterator<Item = &'a TrialRecord>) -> String {
    let mut out = format!("# sudoq trial records csv v{CSV_VERSION}\n{RECORDS_CSV_HEADER}\n");
    for r in records {
        let status = match r.status {
            SolverStatus::Solved => "solved",
            SolverStatus::Failure => "failure",
        };
        let classical = match r.classical {
            Some(true) => "true",
            Some(false) => "false",
            None => "",
        };
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.grid_id,
            r.seed,
            status,
            r.iterations,
            classical,
            csv_float(r.max_residual)
        ));
    }
    out
}

pub const SUMMARY_CSV_HEADER: &str = "grid_id,trials,solved,classical,nonclassical,mismatched,counterexample";

pub fn evidence_summary_csv(evidence: &[ConjectureEvidence]) -> String {
    let mut out = format!("# sudoq campaign summary csv v{CSV_VERSION}\n{SUMMARY_CSV_HEADER}\n");
    for e in evidence {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            e.grid_id,
            e.trials,
            e.solved,
            e.classical_outcomes,
            e.nonclassical_outcomes,
            e.mismatched_classical,
            e.has_counterexample()
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::shift_copy_square;
    use crate::constraints::CellIndex;

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, 0.6060606060606061, 1e-300, 0.0] {
            let s = csv_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(csv_float(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn single_blank_at_full_strength() {
        let mut g = shift_copy_square(3);
        g.set(CellIndex::new(5, 7), 0);
        let rows = sweep_sigma(&g, &[1.0], 5, &SolverConfig::default()).unwrap();
        assert_eq!(rows[0].success_rate(), 1.0);
        assert_eq!(rows[0].histogram.len(), 50);
        assert_eq!(rows[0].histogram.iter().sum::<usize>(), 5);
        assert!(sweep_sigma(&g, &[1.0], 0, &SolverConfig::default()).is_err());
    }

    #[test]
    fn histogram_closes_at_i_max() {
        assert_eq!(bucket_count(500), 50);
        assert_eq!(bucket_count(5), 1);
        assert_eq!(bucket_count(11), 2);
    }

    #[test]
    fn csv_is_deterministic() {
        let g = fixtures::g05();
        let cfg = SolverConfig::default().with_seed(11);
        let a = sigma_csv(&sweep_sigma(&g, &[0.5, 1.0], 4, &cfg).unwrap());
        let b = sigma_csv(&sweep_sigma(&g, &[0.5, 1.0], 4, &cfg).unwrap());
        assert_eq!(a, b);
        assert!(a.starts_with("# sudoq sweep-sigma csv v1"));
        assert_eq!(a.lines().count(), 4);
    }

    #[test]
    fn suite_covers_all_fixtures() {
        let suite = shidoku_suite(1, &SolverConfig::default()).unwrap();
        assert_eq!(suite.len(), 13);
        let csv = records_csv(suite.iter().flat_map(|e| &e.records));
        assert_eq!(csv.lines().count(), 2 + 13);
        assert!(suite.iter().all(|e| !e.has_counterexample()));
    }
}
