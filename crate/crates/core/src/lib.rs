//! Quantum Sudoku.
//!
//! A quantum Sudoku grid of side `N = n²` holds a unit vector of `C^N` in
//! every cell. It is solved when, for every row, column and block, the rank-one
//! projectors of its cells sum to the identity. A classical grid embeds by
//! sending symbol `k` to the basis ket `|k⟩`.
//!
//! The crate provides:
//!
//! * [`grid`] and [`constraints`]: grids, parsing, constraint lists;
//! * [`classical`]: a backtracking oracle, classical error and score, the
//!   Shidoku symmetry reduction;
//! * [`solver`]: the alternating rescaling solver built on
//!   [`linalg::optimal_transformation`];
//! * [`analysis`]: SudoQ error and score, conjecture campaigns;
//! * [`erasure`]: the Sudoku erasure code;
//! * [`experiment`]: seeded batch runs and CSV output.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the `*F64` and
//! `*F32` aliases below fix the precision.
//!
//! ```
//! use sudoq::{fixtures, solve, sudoku_constraints, SolverConfig};
//!
//! let g = fixtures::g05();
//! let outcome = solve::<f64>(&g, &sudoku_constraints(2), &SolverConfig::default().with_seed(1)).unwrap();
//! assert!(outcome.iterations <= 500);
//! ```

pub mod analysis;
pub mod classical;
pub mod constraints;
pub mod erasure;
pub mod error;
pub mod experiment;
pub mod fixtures;
pub mod grid;
pub mod linalg;
pub mod scalar;
pub mod solver;

pub use analysis::{
    quantum_score_estimate, run_conjecture_campaign, sudoq_error, verify_two_solution_rigidity, Conjecture,
    ConjectureEvidence, ErrorReport,
};
pub use classical::{classical_score, count_solutions, shift_copy_square, ClassicalClass};
pub use constraints::{latin_constraints, sudoku_constraints, CellIndex, Constraint, ConstraintKind, ConstraintList};
pub use erasure::{decode, erase, generate_codeword, simulate_channel, ChannelParams, DecodeReport, ReceivedGrid};
pub use error::{Result, SudoqError};
pub use grid::{classify, parse_classical_grid, quantize, ClassicalGrid, GridDimension, QuantumGrid, StateVector};
pub use linalg::optimal_transformation;
pub use scalar::{Real, C};
pub use solver::{solve, SolverConfig, SolverOutcome, SolverState, SolverStatus};

pub type StateVectorF64 = StateVector<f64>;
pub type StateVectorF32 = StateVector<f32>;
pub type QuantumGridF64 = QuantumGrid<f64>;
pub type QuantumGridF32 = QuantumGrid<f32>;
pub type SolverStateF64 = SolverState<f64>;
pub type SolverStateF32 = SolverState<f32>;
pub type SolverOutcomeF64 = SolverOutcome<f64>;
pub type SolverOutcomeF32 = SolverOutcome<f32>;
