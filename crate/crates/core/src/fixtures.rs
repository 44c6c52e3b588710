//! Reference grids used by tests, the acceptance suite and the CLI campaigns.

use crate::grid::{parse_classical_grid, ClassicalGrid, GridDimension};

fn parse(text: &str, n: usize) -> ClassicalGrid {
    parse_classical_grid(text, GridDimension::new(n).expect("positive")).expect("fixture parses")
}

/// 9×9 grid with a unique classical solution, used for the σ sweep.
pub const EXPERIMENT_9X9: &str = "..3.2.6..9..3.5..1..18.64....81.29..7.......8..67.82....26.95..8..2.3..9..5.1.3..";

/// 9×9 grid with exactly two classical completions (blanks at rows 1, 4, 7, columns 2, 3).
pub const TWO_SOLUTION_9X9: &str = "\
1..456789\
456789123\
789123456\
2..564897\
564897231\
897231564\
3..645978\
645978312\
978312645";

/// Classically unsolvable 4×4 grid whose classical score is √2 and quantum score is 1.
pub const UNSOLVABLE_4X4: &str = "3.14 .432 1243 4321";

/// 4×4 grid whose completions include a whole family of purely quantum ones.
pub const PURELY_QUANTUM_4X4: &str = "1234 34.. 43.. 2143";

/// Minimal 4-clue Shidoku grid that the solver finds hardest.
pub const G05: &str = ".... ...1 .2.. 3.4.";

/// 4×4 codeword sent through the erasure channel.
pub const ERASURE_CODEWORD_4X4: &str = "1234 3421 4312 2143";

/// The same codeword after erasing 8 cells (`.` marks an erasure).
pub const ERASURE_RECEIVED_4X4: &str = ".23. 3..1 4..2 .14.";

/// Canonical representatives of the 13 symmetry classes of minimal 4-clue
/// Shidoku grids, sorted, as produced by `classical::minimal_shidoku_scan(4)`.
/// Entry 5 is [`G05`], which is already in canonical form.
pub const SHIDOKU_MINIMAL: [&str; 13] = [
    ".......1.1.23...",
    ".......1.12..3..",
    ".......1.2...3.4",
    ".......1.2...32.",
    ".......1.2..3.4.",
    "......12....13..",
    ".....1.2.....34.",
    ".....1.2....1.3.",
    ".....1.2....2.3.",
    ".....1.2....3.4.",
    ".....1.2..3.4...",
    "...1.1....2.3...",
    "...1.2....3.4...",
];

pub fn experiment_9x9() -> ClassicalGrid {
    parse(EXPERIMENT_9X9, 3)
}

pub fn two_solution_9x9() -> ClassicalGrid {
    parse(TWO_SOLUTION_9X9, 3)
}

pub fn unsolvable_4x4() -> ClassicalGrid {
    parse(UNSOLVABLE_4X4, 2)
}

pub fn purely_quantum_4x4() -> ClassicalGrid {
    parse(PURELY_QUANTUM_4X4, 2)
}

pub fn g05() -> ClassicalGrid {
    parse(G05, 2)
}

pub fn erasure_codeword_4x4() -> ClassicalGrid {
    parse(ERASURE_CODEWORD_4X4, 2)
}

pub fn erasure_received_4x4() -> ClassicalGrid {
    parse(ERASURE_RECEIVED_4X4, 2)
}

/// The 13 minimal Shidoku fixtures with their ids (`shidoku-01` ..).
pub fn shidoku_minimal() -> Vec<(String, ClassicalGrid)> {
    SHIDOKU_MINIMAL
        .iter()
        .enumerate()
        .map(|(i, text)| (format!("shidoku-{:02}", i + 1), parse(text, 2)))
        .collect()
}
