//! SudoQ error and score, conjecture campaigns, and structural checks on
//! solver outputs.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classical::{classify_classical, count_solutions, ClassicalClass};
use crate::constraints::{sudoku_constraints, CellIndex, ConstraintList};
use crate::error::{Result, SudoqError};
use crate::grid::{
    classify, CellState, ClassicalGrid, QuantumGrid, QuantumGridJson, StateVector, DEFAULT_CLASSICAL_TOLERANCE,
};
use crate::linalg::identity_residual;
use crate::scalar::{to_f64, Real, C};
use crate::solver::{solve, SolverConfig, SolverOutcome, SolverStatus};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    /// `(constraint id, ‖Σ|x⟩⟨x| - I‖_F)` in list order.
    pub per_constraint: Vec<(usize, f64)>,
    pub max_residual: f64,
}

/// Largest Frobenius distance between a constraint's projector sum and the identity.
pub fn sudoq_error<R: Real>(q: &QuantumGrid<R>, cl: &ConstraintList) -> Result<ErrorReport> {
    if !q.is_full() {
        return Err(SudoqError::NotFull);
    }
    if q.side() != cl.side() {
        return Err(SudoqError::DimensionMismatch(q.side(), cl.side()));
    }
    let side = q.side();
    let per_constraint: Vec<(usize, f64)> = cl
        .iter()
        .map(|c| {
            let vectors = c
                .cells
                .iter()
                .map(|&cell| q.vector(cell).expect("grid is full").amplitudes());
            (c.id, to_f64(identity_residual(side, vectors)))
        })
        .collect();
    let max_residual = per_constraint.iter().map(|&(_, r)| r).fold(0.0, f64::max);
    Ok(ErrorReport {
        per_constraint,
        max_residual,
    })
}

/// Fills the empty cells of `g` (row-major order) with `fill`, quantizing the clues.
pub fn complete_with(g: &ClassicalGrid, fill: &[StateVector<f64>]) -> QuantumGrid<f64> {
    let side = g.side();
    let mut fill = fill.iter();
    let cells = g
        .entries()
        .iter()
        .map(|&e| {
            if e == 0 {
                CellState::Occupied(fill.next().expect("one vector per empty cell").clone())
            } else {
                CellState::Occupied(StateVector::basis(side, e))
            }
        })
        .collect();
    QuantumGrid::from_cells(g.dim(), cells).expect("consistent dimensions")
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScoreEstimate {
    /// Upper bound on the quantum score.
    pub value: f64,
    /// Completion achieving `value`.
    pub grid: QuantumGrid<f64>,
    /// Whether the parameter search over the free cells ran.
    pub dense_search: bool,
}

/// Grid points per parameter in the free-cell search.
pub const DENSE_RESOLUTION: usize = 200;

/// Hyperspherical angles: `N-1` moduli angles in `[0, π/2]` and `N-1` relative phases.
fn unit_from_params(params: &[f64]) -> StateVector<f64> {
    let m = params.len() / 2;
    let (moduli, phases) = params.split_at(m);
    let mut amps = Vec::with_capacity(m + 1);
    let mut remaining = 1.0;
    for k in 0..=m {
        let modulus = if k < m { remaining * moduli[k].cos() } else { remaining };
        if k < m {
            remaining *= moduli[k].sin();
        }
        let phase = if k == 0 { 0.0 } else { phases[k - 1] };
        amps.push(C::from_polar(modulus, phase));
    }
    StateVector::from_slice(&amps)
}

fn params_from_unit(v: &StateVector<f64>) -> Vec<f64> {
    let v = v.canonical();
    let amps = v.amplitudes();
    let m = amps.len() - 1;
    let mut moduli = Vec::with_capacity(m);
    let mut remaining: f64 = 1.0;
    for amp in amps.iter().take(m) {
        let ratio = if remaining > 1e-300 {
            (amp.norm() / remaining).clamp(0.0, 1.0)
        } else {
            1.0
        };
        let angle = ratio.acos();
        moduli.push(angle);
        remaining *= angle.sin();
    }
    let phases = amps.iter().skip(1).map(|a| a.arg().rem_euclid(std::f64::consts::TAU));
    moduli.into_iter().chain(phases).collect()
}

fn param_range(index: usize, per_cell: usize) -> (f64, f64) {
    if index % per_cell < per_cell / 2 {
        (0.0, std::f64::consts::FRAC_PI_2)
    } else {
        (0.0, std::f64::consts::TAU)
    }
}

/// Residual vector of a completion given as flattened parameters.
fn residuals(g: &ClassicalGrid, cl: &ConstraintList, params: &[f64]) -> Vec<f64> {
    let per_cell = 2 * (g.side() - 1);
    let fill: Vec<StateVector<f64>> = params.chunks(per_cell).map(unit_from_params).collect();
    let q = complete_with(g, &fill);
    sudoq_error(&q, cl)
        .expect("completion is full")
        .per_constraint
        .into_iter()
        .map(|(_, r)| r)
        .collect()
}

/// Derivative-free coordinate search: full scans of each parameter on a
/// `DENSE_RESOLUTION` grid until no scan improves, then local halving steps.
fn coordinate_search(objective: &dyn Fn(&[f64]) -> f64, mut p: Vec<f64>, per_cell: usize) -> (f64, Vec<f64>) {
    let mut best = objective(&p);
    for _ in 0..50 {
        let mut improved = false;
        for i in 0..p.len() {
            let (lo, hi) = param_range(i, per_cell);
            let mut arg = p[i];
            for k in 0..=DENSE_RESOLUTION {
                p[i] = lo + (hi - lo) * k as f64 / DENSE_RESOLUTION as f64;
                let value = objective(&p);
                if value < best - 1e-15 {
                    best = value;
                    arg = p[i];
                    improved = true;
                }
            }
            p[i] = arg;
        }
        if !improved {
            break;
        }
    }
    let mut step = std::f64::consts::FRAC_PI_2 / DENSE_RESOLUTION as f64;
    for _ in 0..30 {
        step /= 2.0;
        let mut improved = true;
        while improved {
            improved = false;
            for i in 0..p.len() {
                for delta in [step, -step] {
                    let old = p[i];
                    p[i] = old + delta;
                    let value = objective(&p);
                    if value < best - 1e-15 {
                        best = value;
                        improved = true;
                    } else {
                        p[i] = old;
                    }
                }
            }
        }
    }
    (best, p)
}

fn dense_search(g: &ClassicalGrid, cl: &ConstraintList, seed: u64, extra_starts: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let side = g.side();
    let free = g.entries().iter().filter(|&&e| e == 0).count();
    let per_cell = 2 * (side - 1);
    let mut starts: Vec<Vec<f64>> = extra_starts.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..6 {
        starts.push(
            (0..free * per_cell)
                .map(|i| {
                    let (lo, hi) = param_range(i, per_cell);
                    rng.random_range(lo..hi)
                })
                .collect(),
        );
    }
    let mut best = (f64::INFINITY, Vec::new());
    for start in starts {
        // smooth surrogates first, then the true maximum
        let mut p = start;
        for power in [4.0, 16.0, 64.0] {
            let surrogate = |x: &[f64]| -> f64 {
                residuals(g, cl, x)
                    .iter()
                    .map(|r| r.powf(power))
                    .sum::<f64>()
                    .powf(1.0 / power)
            };
            p = coordinate_search(&surrogate, p, per_cell).1;
        }
        let max = |x: &[f64]| -> f64 { residuals(g, cl, x).into_iter().fold(0.0, f64::max) };
        let (value, p) = coordinate_search(&max, p, per_cell);
        if value < best.0 {
            best = (value, p);
        }
    }
    best
}

/// Upper bound on the SudoQ score: the smallest SudoQ error among `trials`
/// normalized solver outputs, refined by a parameter search over the free
/// vectors when at most two cells are empty.
pub fn quantum_score_estimate(g: &ClassicalGrid, trials: usize, cfg: &SolverConfig) -> Result<ScoreEstimate> {
    if trials == 0 {
        return Err(SudoqError::InvalidConfig("trials must be at least 1".into()));
    }
    let cl = sudoku_constraints(g.dim().block());
    let outcomes: Vec<SolverOutcome<f64>> = (0..trials as u64)
        .into_par_iter()
        .map(|i| solve::<f64>(g, &cl, &cfg.with_seed(cfg.seed.wrapping_add(i))))
        .collect::<Result<_>>()?;
    let mut best: Option<(f64, QuantumGrid<f64>)> = None;
    for outcome in outcomes {
        let e = sudoq_error(&outcome.grid, &cl)?.max_residual;
        if best.as_ref().is_none_or(|(b, _)| e < *b) {
            best = Some((e, outcome.grid));
        }
    }
    let (mut value, mut grid) = best.expect("trials >= 1");
    let free: Vec<usize> = (0..g.dim().cells()).filter(|&o| g.entries()[o] == 0).collect();
    let dense = !free.is_empty() && free.len() <= 2;
    if dense {
        let side = g.side();
        let seed_start: Vec<f64> = free
            .iter()
            .flat_map(|&o| params_from_unit(grid.vector(CellIndex::from_offset(o, side)).expect("full")))
            .collect();
        let (found, params) = dense_search(g, &cl, cfg.seed, &[seed_start]);
        if found < value {
            value = found;
            let fill: Vec<StateVector<f64>> = params.chunks(2 * (side - 1)).map(unit_from_params).collect();
            grid = complete_with(g, &fill).canonicalized();
        }
    }
    Ok(ScoreEstimate {
        value,
        grid,
        dense_search: dense,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Conjecture {
    /// Classically unsolvable grids have no quantum solution.
    One,
    /// Uniquely solvable grids have no purely quantum solution.
    Two,
}

impl std::fmt::Display for Conjecture {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Conjecture::One => "one",
            Conjecture::Two => "two",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub grid_id: String,
    pub seed: u64,
    pub status: SolverStatus,
    pub iterations: usize,
    /// `None` unless the run was solved.
    pub classical: Option<bool>,
    pub max_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjectureEvidence {
    pub conjecture: Conjecture,
    pub grid_id: String,
    pub trials: usize,
    pub solved: usize,
    pub classical_outcomes: usize,
    pub nonclassical_outcomes: usize,
    /// Classical outcomes that differ from the oracle's unique solution.
    pub mismatched_classical: usize,
    pub counterexample: Option<QuantumGridJson>,
    pub records: Vec<TrialRecord>,
}

impl ConjectureEvidence {
    pub fn has_counterexample(&self) -> bool {
        self.counterexample.is_some()
    }
}

/// Runs `trials` solver runs (seeds `cfg.seed + i`) and looks for outcomes that
/// contradict the conjecture.
pub fn run_conjecture_campaign(
    g: &ClassicalGrid,
    grid_id: &str,
    conjecture: Conjecture,
    trials: usize,
    cfg: &SolverConfig,
) -> Result<ConjectureEvidence> {
    let class = classify_classical(g);
    let expected = match conjecture {
        Conjecture::One => ClassicalClass::Unsolvable,
        Conjecture::Two => ClassicalClass::Unique,
    };
    if class != expected {
        return Err(SudoqError::WrongClass {
            expected: expected.to_string(),
            found: class.to_string(),
        });
    }
    let oracle = count_solutions(g, 2)?.solutions.into_iter().next();
    let cl = sudoku_constraints(g.dim().block());
    let runs: Vec<(TrialRecord, Option<QuantumGrid<f64>>, bool)> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let seed = cfg.seed.wrapping_add(i);
            let outcome = solve::<f64>(g, &cl, &cfg.with_seed(seed))?;
            let max_residual = sudoq_error(&outcome.grid, &cl)?.max_residual;
            let (classical, mismatch) = if outcome.is_solved() {
                let verdict = classify(&outcome.grid, DEFAULT_CLASSICAL_TOLERANCE)?;
                let mismatch = match (verdict.classical_grid(), &oracle) {
                    (Some(found), Some(expected)) => found != expected,
                    _ => false,
                };
                (Some(verdict.is_classical()), mismatch)
            } else {
                (None, false)
            };
            let record = TrialRecord {
                grid_id: grid_id.to_string(),
                seed,
                status: outcome.status,
                iterations: outcome.iterations,
                classical,
                max_residual,
            };
            let solved_grid = outcome.is_solved().then_some(outcome.grid);
            Ok((record, solved_grid, mismatch))
        })
        .collect::<Result<_>>()?;

    let mut evidence = ConjectureEvidence {
        conjecture,
        grid_id: grid_id.to_string(),
        trials,
        solved: 0,
        classical_outcomes: 0,
        nonclassical_outcomes: 0,
        mismatched_classical: 0,
        counterexample: None,
        records: Vec::with_capacity(trials),
    };
    for (record, grid, mismatch) in runs {
        if let Some(grid) = grid {
            evidence.solved += 1;
            let classical = record.classical == Some(true);
            if classical {
                evidence.classical_outcomes += 1;
            } else {
                evidence.nonclassical_outcomes += 1;
            }
            if mismatch {
                evidence.mismatched_classical += 1;
            }
            let violates = match conjecture {
                Conjecture::One => true,
                Conjecture::Two => !classical || mismatch,
            };
            if violates && evidence.counterexample.is_none() {
                log::warn!(
                    "conjecture {conjecture} counterexample candidate on {grid_id}, seed {}",
                    record.seed
                );
                evidence.counterexample = Some(grid.to_json());
            }
        }
        evidence.records.push(record);
    }
    Ok(evidence)
}

/// Does every cell of `q` match `|g_ij⟩` to fidelity `1 - tol`?
pub fn matches_classical(q: &QuantumGrid<f64>, g: &ClassicalGrid, tol: f64) -> bool {
    let side = g.side();
    g.entries().iter().enumerate().all(|(o, &e)| {
        e != 0
            && q.vector(CellIndex::from_offset(o, side))
                .is_some_and(|v| v.basis_fidelities()[e - 1] >= 1.0 - tol)
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigidityReport {
    pub trials: usize,
    pub solved: usize,
    pub first_completion: usize,
    pub second_completion: usize,
    pub unmatched: usize,
    pub unmatched_example: Option<QuantumGridJson>,
    pub records: Vec<TrialRecord>,
}

/// On the 9×9 grid with exactly two classical completions, checks that every
/// solved run lands on one of those two completions.
pub fn verify_two_solution_rigidity(trials: usize, cfg: &SolverConfig) -> Result<RigidityReport> {
    let g = crate::fixtures::two_solution_9x9();
    let completions = count_solutions(&g, 3)?.solutions;
    debug_assert_eq!(completions.len(), 2);
    let cl = sudoku_constraints(3);
    let runs: Vec<(TrialRecord, Option<QuantumGrid<f64>>)> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let seed = cfg.seed.wrapping_add(i);
            let outcome = solve::<f64>(&g, &cl, &cfg.with_seed(seed))?;
            let max_residual = sudoq_error(&outcome.grid, &cl)?.max_residual;
            let classical = if outcome.is_solved() {
                Some(classify(&outcome.grid, DEFAULT_CLASSICAL_TOLERANCE)?.is_classical())
            } else {
                None
            };
            let record = TrialRecord {
                grid_id: "two-solution-9x9".into(),
                seed,
                status: outcome.status,
                iterations: outcome.iterations,
                classical,
                max_residual,
            };
            Ok((record, outcome.is_solved().then_some(outcome.grid)))
        })
        .collect::<Result<_>>()?;
    let mut report = RigidityReport {
        trials,
        solved: 0,
        first_completion: 0,
        second_completion: 0,
        unmatched: 0,
        unmatched_example: None,
        records: Vec::with_capacity(trials),
    };
    for (record, grid) in runs {
        if let Some(grid) = grid {
            report.solved += 1;
            if matches_classical(&grid, &completions[0], DEFAULT_CLASSICAL_TOLERANCE) {
                report.first_completion += 1;
            } else if matches_classical(&grid, &completions[1], DEFAULT_CLASSICAL_TOLERANCE) {
                report.second_completion += 1;
            } else {
                report.unmatched += 1;
                report.unmatched_example.get_or_insert_with(|| grid.to_json());
            }
        }
        report.records.push(record);
    }
    Ok(report)
}

/// Structure of a solution of the 4×4 grid `1234 / 34.. / 43.. / 2143`: the
/// free block must be `[[x, y], [y, x]]` with `{x, y}` an orthonormal basis of
/// `span{|1⟩, |2⟩}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockFamilyCheck {
    /// Largest norm of a free vector's component outside `span{|1⟩, |2⟩}`.
    pub span_leakage: f64,
    /// `|⟨x, y⟩|` plus the worst deviation from unit norm.
    pub orthonormality_error: f64,
    /// `min(F(x₂₃, x₃₄), F(x₂₄, x₃₃))`.
    pub cross_fidelity: f64,
    /// Largest fidelity of a free vector to a computational-basis ket.
    pub max_basis_fidelity: f64,
}

impl BlockFamilyCheck {
    pub fn satisfied(&self, tol: f64) -> bool {
        self.span_leakage < tol && self.orthonormality_error < tol && self.cross_fidelity >= 1.0 - tol
    }

    pub fn purely_quantum(&self, margin: f64) -> bool {
        self.max_basis_fidelity < 1.0 - margin
    }
}

pub fn purely_quantum_block_check(q: &QuantumGrid<f64>) -> BlockFamilyCheck {
    let v = |r, c| -> DVector<C<f64>> { q.vector(CellIndex::new(r, c)).expect("full grid").amplitudes().clone() };
    let cells = [v(2, 3), v(2, 4), v(3, 3), v(3, 4)];
    let span_leakage = cells
        .iter()
        .map(|x| x.iter().skip(2).map(|a| a.norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let norm_error = cells.iter().map(|x| (x.norm() - 1.0).abs()).fold(0.0, f64::max);
    let orthonormality_error = cells[0].dotc(&cells[1]).norm() + norm_error;
    let fid = |a: &DVector<C<f64>>, b: &DVector<C<f64>>| a.dotc(b).norm_sqr() / (a.norm_squared() * b.norm_squared());
    let cross_fidelity = fid(&cells[0], &cells[3]).min(fid(&cells[1], &cells[2]));
    let max_basis_fidelity = cells
        .iter()
        .flat_map(|x| StateVector::new(x.clone()).basis_fidelities())
        .fold(0.0, f64::max);
    BlockFamilyCheck {
        span_leakage,
        orthonormality_error,
        cross_fidelity,
        max_basis_fidelity,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::shift_copy_square;
    use crate::fixtures;
    use crate::grid::quantize;

    fn plus() -> StateVector<f64> {
        StateVector::real_combination(&[1.0, 1.0, 0.0, 0.0])
    }

    fn minus() -> StateVector<f64> {
        StateVector::real_combination(&[1.0, -1.0, 0.0, 0.0])
    }

    #[test]
    fn classical_square_has_zero_error() {
        let q = quantize::<f64>(&shift_copy_square(3));
        let report = sudoq_error(&q, &sudoku_constraints(3)).unwrap();
        assert_eq!(report.per_constraint.len(), 27);
        assert!(report.max_residual < 1e-12);
    }

    #[test]
    fn unsolvable_grid_quantum_completion() {
        let g = fixtures::unsolvable_4x4();
        let q = complete_with(&g, &[plus(), minus()]);
        let report = sudoq_error(&q, &sudoku_constraints(2)).unwrap();
        assert!((report.max_residual - 1.0).abs() < 1e-12);
        // rows 1, 2, columns 1, 2 and block 1 see the free cells
        let touched: Vec<f64> = [1, 2, 5, 6, 9]
            .iter()
            .map(|&id| report.per_constraint[id - 1].1)
            .collect();
        let mut sorted = touched.clone();
        sorted.sort_by(f64::total_cmp);
        assert!(sorted[0].abs() < 1e-12, "{touched:?}");
        assert!(sorted[1..].iter().all(|r| (r - 1.0).abs() < 1e-12), "{touched:?}");
        for (id, r) in &report.per_constraint {
            if ![1, 2, 5, 6, 9].contains(id) {
                assert!(r.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn unsolvable_grid_classical_completion() {
        let g = fixtures::unsolvable_4x4();
        let two = StateVector::basis(4, 2);
        let q = complete_with(&g, &[two.clone(), two]);
        let report = sudoq_error(&q, &sudoku_constraints(2)).unwrap();
        assert!((report.max_residual - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn not_full_rejected() {
        let q = quantize::<f64>(&fixtures::g05());
        assert_eq!(
            sudoq_error(&q, &sudoku_constraints(2)).unwrap_err(),
            SudoqError::NotFull
        );
    }

    #[test]
    fn parameterization_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let p: Vec<f64> = (0..6)
                .map(|i| rng.random_range(param_range(i, 6).0..param_range(i, 6).1))
                .collect();
            let v = unit_from_params(&p);
            assert!((v.norm() - 1.0).abs() < 1e-12);
            let back = unit_from_params(&params_from_unit(&v));
            assert!((v.inner(&back).norm_sqr() - 1.0).abs() < 1e-10);
        }
        let e3 = StateVector::basis(4, 3);
        assert!((unit_from_params(&params_from_unit(&e3)).inner(&e3).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quantum_score_of_unsolvable_grid_is_one() {
        let g = fixtures::unsolvable_4x4();
        let estimate = quantum_score_estimate(&g, 4, &SolverConfig::default()).unwrap();
        assert!(estimate.dense_search);
        assert!((estimate.value - 1.0).abs() < 1e-3, "{}", estimate.value);
        assert!(estimate.value >= 1.0 - 1e-9);
        let check = sudoq_error(&estimate.grid, &sudoku_constraints(2)).unwrap();
        assert!((check.max_residual - estimate.value).abs() < 1e-9);
    }

    #[test]
    fn quantum_score_of_solvable_grid_is_zero() {
        let mut g = shift_copy_square(2);
        g.set(CellIndex::new(2, 2), 0);
        g.set(CellIndex::new(4, 1), 0);
        g.set(CellIndex::new(1, 4), 0);
        let cfg = SolverConfig::default();
        let estimate = quantum_score_estimate(&g, 3, &cfg).unwrap();
        assert!(!estimate.dense_search);
        assert!(estimate.value < 10.0 * cfg.epsilon);
    }

    #[test]
    fn campaign_rejects_wrong_class() {
        let err = run_conjecture_campaign(&fixtures::g05(), "g05", Conjecture::One, 1, &SolverConfig::default());
        assert!(matches!(err, Err(SudoqError::WrongClass { .. })));
        let err = run_conjecture_campaign(
            &fixtures::unsolvable_4x4(),
            "g",
            Conjecture::Two,
            1,
            &SolverConfig::default(),
        );
        assert!(matches!(err, Err(SudoqError::WrongClass { .. })));
    }

    #[test]
    fn campaign_on_unsolvable_grid_never_solves() {
        let ev = run_conjecture_campaign(
            &fixtures::unsolvable_4x4(),
            "g",
            Conjecture::One,
            10,
            &SolverConfig::default(),
        )
        .unwrap();
        assert_eq!(ev.solved, 0);
        assert!(!ev.has_counterexample());
        assert_eq!(ev.records.len(), 10);
        assert!(ev.records.iter().all(|r| r.max_residual >= 1.0 - 1e-9));
    }

    #[test]
    fn campaign_on_g05() {
        let ev =
            run_conjecture_campaign(&fixtures::g05(), "g05", Conjecture::Two, 10, &SolverConfig::default()).unwrap();
        assert_eq!(ev.solved, ev.classical_outcomes + ev.nonclassical_outcomes);
        assert_eq!(ev.nonclassical_outcomes, 0);
        assert_eq!(ev.mismatched_classical, 0);
        assert!(ev.solved > 0);
    }

    #[test]
    fn rigidity_with_no_trials() {
        let report = verify_two_solution_rigidity(0, &SolverConfig::default()).unwrap();
        assert_eq!(report.solved, 0);
        assert!(report.records.is_empty());
    }

    #[test]
    fn block_check_on_exact_family() {
        let g = fixtures::purely_quantum_4x4();
        let x = StateVector::from_slice(&[C::new(0.6, 0.0), C::new(0.0, 0.8), C::new(0.0, 0.0), C::new(0.0, 0.0)]);
        let y = StateVector::from_slice(&[C::new(0.0, 0.8), C::new(0.6, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0)]);
        let q = complete_with(&g, &[x.clone(), y.clone(), y, x]);
        assert!(sudoq_error(&q, &sudoku_constraints(2)).unwrap().max_residual < 1e-12);
        let check = purely_quantum_block_check(&q);
        assert!(check.satisfied(1e-9));
        assert!((check.max_basis_fidelity - 0.64).abs() < 1e-12);
        assert!(check.purely_quantum(1e-3));
    }
}
