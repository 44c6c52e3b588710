//! Sinkhorn-like alternating normalization solver.
//!
//! Empty cells start as complex Gaussian vectors. Each sweep visits the
//! constraints in list order; for constraint `c` with empty-cell projector sum
//! `S` and target `T = I - Σ_clues |x⟩⟨x|`, the empty vectors are moved by
//! `σR + (1-σ)I` where `R S R* = T`. Convergence is tested once per sweep with the
//! largest Frobenius residual over all constraints.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::constraints::ConstraintList;
use crate::error::{Result, SudoqError};
use crate::grid::{CellState, ClassicalGrid, GridDimension, QuantumGrid, QuantumGridJson, StateVector};
use crate::linalg::{identity_residual, projector_sum, transformation_between, PsdFactor};
use crate::scalar::{c, from_f64, to_f64, Real, C};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Step strength σ in (0, 1].
    pub sigma: f64,
    /// Target precision on the largest constraint residual.
    pub epsilon: f64,
    /// Maximum number of sweeps.
    pub i_max: usize,
    pub seed: u64,
    /// Relative eigenvalue threshold for ranks and supports.
    pub rank_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            sigma: 0.6,
            epsilon: 1e-8,
            i_max: 500,
            seed: 0,
            rank_tol: 1e-12,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma <= 1.0) {
            return Err(SudoqError::InvalidConfig(format!(
                "sigma must lie in (0, 1], got {}",
                self.sigma
            )));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(SudoqError::InvalidConfig(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.i_max == 0 {
            return Err(SudoqError::InvalidConfig("i_max must be positive".into()));
        }
        if !(self.rank_tol >= 0.0 && self.rank_tol < 1.0) {
            return Err(SudoqError::InvalidConfig(format!(
                "rank_tol must lie in [0, 1), got {}",
                self.rank_tol
            )));
        }
        Ok(())
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        SolverConfig { seed, ..self.clone() }
    }

    pub fn with_sigma(&self, sigma: f64) -> Self {
        SolverConfig { sigma, ..self.clone() }
    }
}

/// Working state of one run. Clue vectors never change.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverState<R: Real> {
    dim: GridDimension,
    clue_mask: Vec<bool>,
    vectors: Vec<DVector<C<R>>>,
    iter: usize,
    rng: ChaCha8Rng,
}

impl<R: Real> SolverState<R> {
    pub fn dim(&self) -> GridDimension {
        self.dim
    }

    pub fn clue_mask(&self) -> &[bool] {
        &self.clue_mask
    }

    /// Row-major working vectors, not normalized.
    pub fn vectors(&self) -> &[DVector<C<R>>] {
        &self.vectors
    }

    pub fn vectors_mut(&mut self) -> &mut [DVector<C<R>>] {
        &mut self.vectors
    }

    pub fn iter(&self) -> usize {
        self.iter
    }

    pub fn empty_count(&self) -> usize {
        self.clue_mask.iter().filter(|&&m| !m).count()
    }

    fn gaussian(&mut self) -> DVector<C<R>> {
        let side = self.dim.side();
        let scale = std::f64::consts::FRAC_1_SQRT_2;
        DVector::from_fn(side, |_, _| {
            let re: f64 = StandardNormal.sample(&mut self.rng);
            let im: f64 = StandardNormal.sample(&mut self.rng);
            c(from_f64(re * scale), from_f64(im * scale))
        })
    }

    fn redraw(&mut self, offsets: &[usize]) {
        for &o in offsets {
            self.vectors[o] = self.gaussian();
        }
    }

    /// Every cell normalized, with canonical global phase.
    pub fn to_grid(&self) -> QuantumGrid<R> {
        let cells = self
            .vectors
            .iter()
            .map(|v| CellState::Occupied(StateVector::new(v.clone()).canonical()))
            .collect();
        QuantumGrid::from_cells(self.dim, cells).expect("state has one vector per cell")
    }
}

/// Clue cells get `|k⟩`; empty cells get i.i.d. standard complex Gaussian
/// coordinates (real and imaginary parts of variance 1/2) from a generator
/// seeded with `cfg.seed`.
pub fn initialize<R: Real>(a: &ClassicalGrid, cl: &ConstraintList, cfg: &SolverConfig) -> Result<SolverState<R>> {
    cfg.validate()?;
    if a.side() != cl.side() {
        return Err(SudoqError::DimensionMismatch(a.side(), cl.side()));
    }
    if let Some((constraint, symbol)) = a.first_conflict(cl) {
        return Err(SudoqError::InfeasibleClues { constraint, symbol });
    }
    let side = a.side();
    let mut state = SolverState {
        dim: a.dim(),
        clue_mask: a.entries().iter().map(|&e| e != 0).collect(),
        vectors: Vec::with_capacity(a.entries().len()),
        iter: 0,
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
    };
    for &e in a.entries() {
        let v = if e == 0 {
            state.gaussian()
        } else {
            StateVector::<R>::basis(side, e).into_inner()
        };
        state.vectors.push(v);
    }
    Ok(state)
}

#[derive(Clone, Debug)]
struct PlannedConstraint<R: Real> {
    id: usize,
    empties: Vec<usize>,
    target: PsdFactor<R>,
    target_norm: f64,
}

/// Per-constraint data that stays fixed during a run: the empty cells and the
/// factorized target `T`, which only depends on the clues.
#[derive(Clone, Debug)]
pub struct SweepPlan<R: Real> {
    side: usize,
    rank_tol: f64,
    constraints: Vec<PlannedConstraint<R>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepStats {
    /// Constraints whose empty cells were re-drawn after `rank(S) != rank(T)`.
    pub rank_events: usize,
    /// Fully clued constraints whose clues do not sum to the identity.
    pub infeasible: usize,
}

impl std::ops::AddAssign for SweepStats {
    fn add_assign(&mut self, other: Self) {
        self.rank_events += other.rank_events;
        self.infeasible += other.infeasible;
    }
}

impl<R: Real> SweepPlan<R> {
    pub fn new(state: &SolverState<R>, cl: &ConstraintList, rank_tol: f64) -> Result<Self> {
        let side = state.dim.side();
        let mut constraints = Vec::with_capacity(cl.len());
        for (constraint, offsets) in cl.iter().zip(cl.offsets()) {
            let (clues, empties): (Vec<usize>, Vec<usize>) = offsets.into_iter().partition(|&o| state.clue_mask[o]);
            let mut t = projector_sum(side, clues.iter().map(|&o| &state.vectors[o]));
            t.neg_mut();
            for i in 0..side {
                t[(i, i)] += C::new(R::one(), R::zero());
            }
            let target_norm = to_f64(t.norm());
            constraints.push(PlannedConstraint {
                id: constraint.id,
                empties,
                target: PsdFactor::new(&t, rank_tol)?,
                target_norm,
            });
        }
        Ok(SweepPlan {
            side,
            rank_tol,
            constraints,
        })
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// Moves the empty vectors of constraint `k` (list position) one σ-step toward
    /// satisfying it.
    pub fn repair_constraint(&self, state: &mut SolverState<R>, k: usize, cfg: &SolverConfig) -> Result<SweepStats> {
        let plan = &self.constraints[k];
        let mut stats = SweepStats::default();
        if plan.empties.is_empty() {
            if plan.target_norm >= cfg.epsilon {
                log::debug!("constraint {} is fully clued but violated", plan.id);
                stats.infeasible += 1;
            }
            return Ok(stats);
        }
        let mut transform: Option<DMatrix<C<R>>> = None;
        for attempt in 0..2 {
            let s = projector_sum(self.side, plan.empties.iter().map(|&o| &state.vectors[o]));
            let source = PsdFactor::new(&s, self.rank_tol)?;
            match transformation_between(&source, &plan.target) {
                Ok(r) => {
                    transform = Some(r);
                    break;
                }
                Err(SudoqError::RankMismatch { .. }) => {
                    stats.rank_events += 1;
                    if attempt == 0 {
                        state.redraw(&plan.empties);
                    }
                }
                Err(e) => return Err(e),
            }
        }
        let Some(r) = transform else {
            return Ok(stats);
        };
        let sigma = from_f64::<R>(cfg.sigma);
        let keep = R::one() - sigma;
        for &o in &plan.empties {
            let x = &state.vectors[o];
            let moved = &r * x;
            state.vectors[o] = moved.map(|z| z.scale(sigma)) + x.map(|z| z.scale(keep));
        }
        Ok(stats)
    }

    /// One pass over every constraint in order.
    pub fn sweep(&self, state: &mut SolverState<R>, cfg: &SolverConfig) -> Result<SweepStats> {
        let mut stats = SweepStats::default();
        for k in 0..self.constraints.len() {
            stats += self.repair_constraint(state, k, cfg)?;
        }
        state.iter += 1;
        Ok(stats)
    }
}

/// One sweep without a reusable plan.
pub fn sweep<R: Real>(state: &mut SolverState<R>, cl: &ConstraintList, cfg: &SolverConfig) -> Result<SweepStats> {
    SweepPlan::new(state, cl, cfg.rank_tol)?.sweep(state, cfg)
}

/// Largest `‖I - Σ_c |x⟩⟨x|‖_F` over constraints, on raw working vectors.
pub fn sinkhorn_error<R: Real>(state: &SolverState<R>, cl: &ConstraintList) -> R {
    let side = state.dim.side();
    cl.offsets()
        .iter()
        .map(|offsets| identity_residual(side, offsets.iter().map(|&o| &state.vectors[o])))
        .fold(R::zero(), |a, b| a.max(b))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverStatus {
    Solved,
    Failure,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverOutcome<R: Real> {
    pub status: SolverStatus,
    /// Final state, cell-normalized.
    pub grid: QuantumGrid<R>,
    /// Number of sweeps performed.
    pub iterations: usize,
    pub final_error: f64,
    /// Sinkhorn error after each sweep.
    pub error_trace: Vec<f64>,
    pub stats: SweepStats,
}

/// Wire form `{status, iterations, final_error, error_trace, grid, ...}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOutcomeJson {
    pub status: SolverStatus,
    pub iterations: usize,
    pub final_error: f64,
    pub error_trace: Vec<f64>,
    pub grid: QuantumGridJson,
    pub rank_events: usize,
    pub infeasible_constraints: usize,
}

impl<R: Real> SolverOutcome<R> {
    pub fn is_solved(&self) -> bool {
        self.status == SolverStatus::Solved
    }

    pub fn to_json(&self) -> SolverOutcomeJson {
        SolverOutcomeJson {
            status: self.status,
            iterations: self.iterations,
            final_error: self.final_error,
            error_trace: self.error_trace.clone(),
            grid: self.grid.to_json(),
            rank_events: self.stats.rank_events,
            infeasible_constraints: self.stats.infeasible,
        }
    }
}

/// Runs sweeps until the Sinkhorn error drops below `epsilon` or `i_max` sweeps
/// have been spent.
pub fn solve<R: Real>(a: &ClassicalGrid, cl: &ConstraintList, cfg: &SolverConfig) -> Result<SolverOutcome<R>> {
    let mut state = initialize::<R>(a, cl, cfg)?;
    let plan = SweepPlan::new(&state, cl, cfg.rank_tol)?;
    let mut stats = SweepStats::default();
    let mut error = to_f64(sinkhorn_error(&state, cl));
    let mut trace = Vec::new();
    // NaN error keeps the run unsolved
    while (error.is_nan() || error >= cfg.epsilon) && state.iter < cfg.i_max {
        stats += plan.sweep(&mut state, cfg)?;
        error = to_f64(sinkhorn_error(&state, cl));
        trace.push(error);
    }
    let status = if error < cfg.epsilon {
        SolverStatus::Solved
    } else {
        SolverStatus::Failure
    };
    Ok(SolverOutcome {
        status,
        grid: state.to_grid(),
        iterations: state.iter,
        final_error: error,
        error_trace: trace,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::shift_copy_square;
    use crate::constraints::{latin_constraints, sudoku_constraints, CellIndex};
    use crate::fixtures;
    use crate::grid::{cell_fidelity, classify};

    fn cfg(seed: u64) -> SolverConfig {
        SolverConfig::default().with_seed(seed)
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        assert!(cfg(0).with_sigma(0.0).validate().is_err());
        assert!(cfg(0).with_sigma(1.5).validate().is_err());
        assert!(SolverConfig { epsilon: 0.0, ..cfg(0) }.validate().is_err());
        assert!(SolverConfig { i_max: 0, ..cfg(0) }.validate().is_err());
    }

    #[test]
    fn full_square_has_no_empty_cells_and_solves_immediately() {
        let square = shift_copy_square(2);
        let cl = sudoku_constraints(2);
        let state = initialize::<f64>(&square, &cl, &cfg(1)).unwrap();
        assert_eq!(state.empty_count(), 0);
        assert!(sinkhorn_error(&state, &cl) < 1e-12);

        let mut swept = state.clone();
        let stats = sweep(&mut swept, &cl, &cfg(1)).unwrap();
        assert_eq!(stats, SweepStats::default());
        assert_eq!(swept.vectors(), state.vectors());

        let outcome = solve::<f64>(&square, &cl, &cfg(1)).unwrap();
        assert!(outcome.is_solved());
        assert_eq!(outcome.iterations, 0);
        assert!(outcome.error_trace.is_empty());
    }

    #[test]
    fn initialization_is_deterministic() {
        let g = fixtures::experiment_9x9();
        let cl = sudoku_constraints(3);
        let a = initialize::<f64>(&g, &cl, &cfg(42)).unwrap();
        let b = initialize::<f64>(&g, &cl, &cfg(42)).unwrap();
        assert_eq!(a, b);
        let other = initialize::<f64>(&g, &cl, &cfg(43)).unwrap();
        assert_ne!(a.vectors(), other.vectors());
    }

    #[test]
    fn gaussian_moments() {
        let g = ClassicalGrid::empty(GridDimension::new(3).unwrap());
        let state = initialize::<f64>(&g, &sudoku_constraints(3), &cfg(5)).unwrap();
        let parts: Vec<f64> = state
            .vectors()
            .iter()
            .flat_map(|v| v.iter().flat_map(|z| [z.re, z.im]))
            .collect();
        let m = parts.len() as f64;
        let mean = parts.iter().sum::<f64>() / m;
        let var = parts.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / m;
        // 1458 samples: standard error of the variance is about 0.019
        assert!(mean.abs() < 0.06, "{mean}");
        assert!((var - 0.5).abs() < 0.08, "{var}");
    }

    #[test]
    fn conflicting_clues_rejected() {
        let mut g = ClassicalGrid::empty(GridDimension::new(2).unwrap());
        g.set(CellIndex::new(1, 1), 1);
        g.set(CellIndex::new(1, 3), 1);
        let err = initialize::<f64>(&g, &sudoku_constraints(2), &cfg(0)).unwrap_err();
        assert_eq!(
            err,
            SudoqError::InfeasibleClues {
                constraint: 1,
                symbol: 1
            }
        );
    }

    #[test]
    fn sigma_one_repairs_single_constraint_exactly() {
        let g = ClassicalGrid::empty(GridDimension::new(2).unwrap());
        let cl = sudoku_constraints(2);
        let one = cfg(9).with_sigma(1.0);
        let mut state = initialize::<f64>(&g, &cl, &one).unwrap();
        let plan = SweepPlan::new(&state, &cl, one.rank_tol).unwrap();
        let offsets = cl.offsets();
        assert_eq!(plan.len(), offsets.len());
        for (k, cells) in offsets.iter().enumerate() {
            let stats = plan.repair_constraint(&mut state, k, &one).unwrap();
            assert_eq!(stats.rank_events, 0);
            let residual = identity_residual(4, cells.iter().map(|&o| &state.vectors()[o]));
            assert!(residual < 1e-9, "constraint {k}: {residual}");
        }
    }

    #[test]
    fn clues_never_move() {
        let g = fixtures::experiment_9x9();
        let cl = sudoku_constraints(3);
        let config = cfg(2);
        let mut state = initialize::<f64>(&g, &cl, &config).unwrap();
        let before = state.clone();
        let plan = SweepPlan::new(&state, &cl, config.rank_tol).unwrap();
        for _ in 0..5 {
            plan.sweep(&mut state, &config).unwrap();
        }
        for (o, &clue) in state.clue_mask().iter().enumerate() {
            if clue {
                assert_eq!(state.vectors()[o], before.vectors()[o]);
            } else {
                assert_ne!(state.vectors()[o], before.vectors()[o]);
            }
        }
        assert_eq!(state.iter(), 5);
    }

    #[test]
    fn zero_row_has_large_error() {
        let g = ClassicalGrid::empty(GridDimension::new(2).unwrap());
        let cl = sudoku_constraints(2);
        let mut state = initialize::<f64>(&g, &cl, &cfg(0)).unwrap();
        for v in state.vectors_mut().iter_mut().take(4) {
            v.fill(C::new(0.0, 0.0));
        }
        assert!(sinkhorn_error(&state, &cl) >= 2.0);
    }

    #[test]
    fn solves_unique_shidoku_to_its_classical_solution() {
        let g = fixtures::shidoku_minimal()[0].1.clone();
        let expected = crate::classical::unique_solution(&g).unwrap();
        let cl = sudoku_constraints(2);
        let mut solved = 0;
        for seed in 0..10 {
            let outcome = solve::<f64>(&g, &cl, &cfg(seed)).unwrap();
            if outcome.is_solved() {
                solved += 1;
                let verdict = classify(&outcome.grid, 1e-6).unwrap();
                assert_eq!(verdict.classical_grid(), Some(&expected));
                assert_eq!(outcome.iterations, outcome.error_trace.len());
            }
        }
        assert!(solved >= 5, "{solved}/10");
    }

    #[test]
    fn solve_is_deterministic() {
        let g = fixtures::g05();
        let cl = sudoku_constraints(2);
        let a = solve::<f64>(&g, &cl, &cfg(17)).unwrap();
        let b = solve::<f64>(&g, &cl, &cfg(17)).unwrap();
        assert_eq!(
            serde_json::to_string(&a.to_json()).unwrap(),
            serde_json::to_string(&b.to_json()).unwrap()
        );
    }

    #[test]
    fn purely_quantum_block() {
        let g = fixtures::purely_quantum_4x4();
        let cl = sudoku_constraints(2);
        let outcome = (0..10)
            .map(|seed| solve::<f64>(&g, &cl, &cfg(seed)).unwrap())
            .find(SolverOutcome::is_solved)
            .expect("some run converges");
        let v = |r, c| outcome.grid.vector(CellIndex::new(r, c)).unwrap().clone();
        assert!(cell_fidelity(&v(2, 3), &v(3, 4)).unwrap() > 1.0 - 1e-6);
        assert!(cell_fidelity(&v(2, 4), &v(3, 3)).unwrap() > 1.0 - 1e-6);
        assert!(cell_fidelity(&v(2, 3), &v(2, 4)).unwrap() < 1e-6);
    }

    #[test]
    fn latin_constraints_work_too() {
        let g = ClassicalGrid::empty(GridDimension::new(2).unwrap());
        let cl = latin_constraints(4);
        let outcome = solve::<f64>(&g, &cl, &cfg(4)).unwrap();
        assert!(outcome.is_solved(), "{}", outcome.final_error);
    }

    #[test]
    fn single_precision_run() {
        let mut g = shift_copy_square(2);
        g.set(CellIndex::new(1, 1), 0);
        g.set(CellIndex::new(2, 3), 0);
        let config = SolverConfig {
            epsilon: 1e-4,
            ..cfg(3)
        };
        let outcome = solve::<f32>(&g, &sudoku_constraints(2), &config).unwrap();
        assert!(outcome.is_solved());
        let verdict = classify(&outcome.grid, 1e-4).unwrap();
        assert_eq!(verdict.classical_grid(), Some(&shift_copy_square(2)));
    }
}
