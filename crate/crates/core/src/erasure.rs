//! Sudoku erasure code: codewords are valid squares, the channel erases cells,
//! and the decoder refills erased cells with the solver.
//!
//! The channel acts on symbols. A lost symbol is [`ReceivedCell::Erased`],
//! standing for the flag ket of the extended space `C^{N+1}`; that extra
//! dimension carries nothing the decoder can use and is not materialized.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classical::{count_solutions, shift_copy_square};
use crate::constraints::sudoku_constraints;
use crate::error::{Result, SudoqError};
use crate::experiment::{csv_float, CSV_VERSION};
use crate::grid::{classify, ClassicalGrid, GridDimension, QuantumGrid, DEFAULT_CLASSICAL_TOLERANCE};
use crate::solver::{solve, SolverConfig};

/// Solver restarts after a failed decode attempt.
pub const DECODE_RESTARTS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    /// Probability that a cell is erased, in `[0, 1]`.
    pub p_erase: f64,
    pub seed: u64,
}

impl ChannelParams {
    pub fn new(p_erase: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_erase) {
            return Err(SudoqError::InvalidConfig(format!(
                "p_erase must lie in [0, 1], got {p_erase}"
            )));
        }
        Ok(ChannelParams { p_erase, seed })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReceivedCell {
    Symbol(usize),
    Erased,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReceivedGrid {
    dim: GridDimension,
    cells: Vec<ReceivedCell>,
}

impl ReceivedGrid {
    /// Blank cells of `g` become erasures.
    pub fn from_classical(g: &ClassicalGrid) -> Self {
        let cells = g
            .entries()
            .iter()
            .map(|&e| {
                if e == 0 {
                    ReceivedCell::Erased
                } else {
                    ReceivedCell::Symbol(e)
                }
            })
            .collect();
        ReceivedGrid { dim: g.dim(), cells }
    }

    pub fn dim(&self) -> GridDimension {
        self.dim
    }

    pub fn cells(&self) -> &[ReceivedCell] {
        &self.cells
    }

    pub fn erased_count(&self) -> usize {
        self.cells.iter().filter(|c| **c == ReceivedCell::Erased).count()
    }

    /// Partial grid with erasures left blank.
    pub fn to_classical(&self) -> ClassicalGrid {
        let entries = self
            .cells
            .iter()
            .map(|c| match c {
                ReceivedCell::Symbol(k) => *k,
                ReceivedCell::Erased => 0,
            })
            .collect();
        ClassicalGrid::new(self.dim, entries).expect("symbols stay in range")
    }
}

impl fmt::Display for ReceivedGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_classical().fmt(f)
    }
}

/// Symmetry of the square applied to the shift-copy construction: a symbol
/// relabeling plus row permutations inside each band and column permutations
/// inside each stack.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodewordTransform {
    /// `relabel[k - 1]` is the new name of symbol `k`.
    pub relabel: Vec<usize>,
    /// Output row `i` is source row `rows[i]` (0-based).
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl CodewordTransform {
    pub fn identity(n: usize) -> Self {
        let side = n * n;
        CodewordTransform {
            relabel: (1..=side).collect(),
            rows: (0..side).collect(),
            cols: (0..side).collect(),
        }
    }

    pub fn random<G: Rng>(n: usize, rng: &mut G) -> Self {
        let mut t = Self::identity(n);
        t.relabel.shuffle(rng);
        for band in 0..n {
            t.rows[band * n..(band + 1) * n].shuffle(rng);
        }
        for stack in 0..n {
            t.cols[stack * n..(stack + 1) * n].shuffle(rng);
        }
        t
    }

    pub fn apply(&self, g: &ClassicalGrid) -> ClassicalGrid {
        let side = g.side();
        let src = g.entries();
        let entries = (0..side * side)
            .map(|o| {
                let e = src[self.rows[o / side] * side + self.cols[o % side]];
                if e == 0 {
                    0
                } else {
                    self.relabel[e - 1]
                }
            })
            .collect();
        ClassicalGrid::new(g.dim(), entries).expect("permutation keeps symbols in range")
    }
}

/// Random valid square: the shift-copy square under a seeded [`CodewordTransform`].
pub fn generate_codeword(n: usize, seed: u64) -> ClassicalGrid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CodewordTransform::random(n, &mut rng).apply(&shift_copy_square(n))
}

/// Erases each cell independently with probability `p_erase`.
pub fn erase(code: &ClassicalGrid, ch: &ChannelParams) -> ReceivedGrid {
    let mut rng = ChaCha8Rng::seed_from_u64(ch.seed);
    // separate stream from codeword generation under the same seed
    rng.set_stream(1);
    let cells = code
        .entries()
        .iter()
        .map(|&e| {
            if rng.random::<f64>() < ch.p_erase {
                ReceivedCell::Erased
            } else {
                ReceivedCell::Symbol(e)
            }
        })
        .collect();
    ReceivedGrid { dim: code.dim(), cells }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeReport {
    /// Solver output of the successful attempt.
    pub decoded: Option<QuantumGrid<f64>>,
    /// Symbols read off `decoded` when it is classical.
    pub classical: Option<ClassicalGrid>,
    /// `classical` equals the transmitted codeword.
    pub exact_recovery: bool,
    /// The received symbols have exactly one classical completion.
    pub unique_completion: bool,
    /// Solver runs spent, at most `1 + DECODE_RESTARTS`.
    pub attempts: usize,
    /// Unique completion, solved and classical, yet not the codeword.
    pub conjecture_violation: bool,
}

impl DecodeReport {
    pub fn solved(&self) -> bool {
        self.decoded.is_some()
    }
}

/// Refills erased cells with the solver. Attempt `a` uses seed
/// `cfg.seed + a · 2^32`.
pub fn decode(rx: &ReceivedGrid, cfg: &SolverConfig, transmitted: Option<&ClassicalGrid>) -> Result<DecodeReport> {
    let clues = rx.to_classical();
    let cl = sudoku_constraints(rx.dim().block());
    let oracle = count_solutions(&clues, 2)?;
    let unique_completion = oracle.count == 1;
    let mut report = DecodeReport {
        decoded: None,
        classical: None,
        exact_recovery: false,
        unique_completion,
        attempts: 0,
        conjecture_violation: false,
    };
    for attempt in 0..=DECODE_RESTARTS as u64 {
        report.attempts += 1;
        let run_cfg = cfg.with_seed(cfg.seed.wrapping_add(attempt << 32));
        let outcome = solve::<f64>(&clues, &cl, &run_cfg)?;
        if outcome.is_solved() {
            let verdict = classify(&outcome.grid, DEFAULT_CLASSICAL_TOLERANCE)?;
            report.classical = verdict.classical_grid().cloned();
            report.decoded = Some(outcome.grid);
            break;
        }
    }
    if let (Some(found), Some(sent)) = (&report.classical, transmitted) {
        report.exact_recovery = found == sent;
    }
    if unique_completion
        && report
            .classical
            .as_ref()
            .is_some_and(|g| Some(g) != oracle.solutions.first())
    {
        report.conjecture_violation = true;
        log::warn!("decode reached a classical square other than the unique completion of\n{clues}");
    }
    if unique_completion && report.solved() && report.classical.is_none() {
        report.conjecture_violation = true;
        log::warn!("decode reached a non-classical solution of a uniquely completable grid\n{clues}");
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelRow {
    pub n: usize,
    pub p_erase: f64,
    pub trials: usize,
    pub decoded: usize,
    pub exact: usize,
    pub unique: usize,
    /// Trials where unique completion plus a solved decode did not recover the codeword.
    pub violations: usize,
}

impl ChannelRow {
    pub fn decoded_rate(&self) -> f64 {
        self.decoded as f64 / self.trials as f64
    }

    pub fn exact_rate(&self) -> f64 {
        self.exact as f64 / self.trials as f64
    }

    pub fn unique_rate(&self) -> f64 {
        self.unique as f64 / self.trials as f64
    }
}

/// Trial `t` sends `generate_codeword(n, s)` through the channel with seed `s`
/// and decodes with seed `s`, where `s = cfg.seed + t`.
pub fn simulate_channel(n: usize, p_erase: &[f64], trials: usize, cfg: &SolverConfig) -> Result<Vec<ChannelRow>> {
    if trials == 0 {
        return Err(SudoqError::InvalidConfig("trials must be at least 1".into()));
    }
    GridDimension::new(n)?;
    cfg.validate()?;
    p_erase
        .iter()
        .map(|&p| {
            ChannelParams::new(p, 0)?;
            let reports: Vec<DecodeReport> = (0..trials as u64)
                .into_par_iter()
                .map(|t| {
                    let seed = cfg.seed.wrapping_add(t);
                    let code = generate_codeword(n, seed);
                    let rx = erase(&code, &ChannelParams { p_erase: p, seed });
                    decode(&rx, &cfg.with_seed(seed), Some(&code))
                })
                .collect::<Result<_>>()?;
            let mut row = ChannelRow {
                n,
                p_erase: p,
                trials,
                decoded: 0,
                exact: 0,
                unique: 0,
                violations: 0,
            };
            for r in &reports {
                row.decoded += r.solved() as usize;
                row.exact += r.exact_recovery as usize;
                row.unique += r.unique_completion as usize;
                row.violations += (r.unique_completion && r.solved() && !r.exact_recovery) as usize;
            }
            Ok(row)
        })
        .collect()
}

pub const CHANNEL_CSV_HEADER: &str = "n,p_erase,trials,decoded_rate,exact_rate,unique_rate";

pub fn channel_csv(rows: &[ChannelRow]) -> String {
    let mut out = format!("# sudoq erasure-sim csv v{CSV_VERSION}\n{CHANNEL_CSV_HEADER}\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.n,
            csv_float(r.p_erase),
            r.trials,
            csv_float(r.decoded_rate()),
            csv_float(r.exact_rate()),
            csv_float(r.unique_rate())
        ));
    }
    out
}
