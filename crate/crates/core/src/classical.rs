//! Classical Sudoku oracle.
//!
//! Backtracking solution counting, uniqueness and minimality tests, the
//! shift-and-copy square, exhaustive classical scores, and the Shidoku
//! minimal-grid scan.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::constraints::{sudoku_constraints, CellIndex, ConstraintList};
use crate::error::{Result, SudoqError};
use crate::grid::{ClassicalGrid, GridDimension};

/// Candidate fillings `classical_score` will enumerate before giving up.
pub const DEFAULT_SCORE_BUDGET: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SearchOrder {
    /// Empty cells in row-major order; enumeration order is stable.
    #[default]
    RowMajor,
    /// Always branch on the empty cell with the fewest candidates.
    MostConstrained,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionCount {
    pub count: u64,
    pub capped: bool,
    /// Clues already repeat a symbol inside some constraint.
    pub conflict: bool,
    pub solutions: Vec<ClassicalGrid>,
}

#[derive(Serialize)]
struct CountJson {
    count: u64,
    capped: bool,
}

impl SolutionCount {
    /// `{"count": .., "capped": ..}`
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(CountJson {
            count: self.count,
            capped: self.capped,
        })
        .expect("plain struct serializes")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassicalClass {
    Unsolvable,
    Unique,
    Multiple,
}

impl std::fmt::Display for ClassicalClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ClassicalClass::Unsolvable => "unsolvable",
            ClassicalClass::Unique => "unique",
            ClassicalClass::Multiple => "multiple",
        })
    }
}

struct Search {
    n: usize,
    side: usize,
    entries: Vec<usize>,
    rows: Vec<u64>,
    cols: Vec<u64>,
    blocks: Vec<u64>,
    empties: Vec<usize>,
    order: SearchOrder,
    cap: u64,
    count: u64,
    solutions: Vec<ClassicalGrid>,
    dim: GridDimension,
}

impl Search {
    /// Returns `None` when the clues conflict.
    fn new(g: &ClassicalGrid, cap: u64, order: SearchOrder) -> Option<Self> {
        let dim = g.dim();
        let n = dim.block();
        let side = dim.side();
        assert!(side < 64, "bitmask search supports N < 64");
        let mut s = Search {
            n,
            side,
            entries: g.entries().to_vec(),
            rows: vec![0; side],
            cols: vec![0; side],
            blocks: vec![0; side],
            empties: Vec::new(),
            order,
            cap,
            count: 0,
            solutions: Vec::new(),
            dim,
        };
        for offset in 0..side * side {
            let e = s.entries[offset];
            if e == 0 {
                s.empties.push(offset);
                continue;
            }
            let bit = 1u64 << (e - 1);
            let (r, c, b) = s.units(offset);
            if (s.rows[r] | s.cols[c] | s.blocks[b]) & bit != 0 {
                return None;
            }
            s.rows[r] |= bit;
            s.cols[c] |= bit;
            s.blocks[b] |= bit;
        }
        Some(s)
    }

    #[inline]
    fn units(&self, offset: usize) -> (usize, usize, usize) {
        let r = offset / self.side;
        let c = offset % self.side;
        (r, c, (r / self.n) * self.n + c / self.n)
    }

    #[inline]
    fn candidates(&self, offset: usize) -> u64 {
        let (r, c, b) = self.units(offset);
        let full = (1u64 << self.side) - 1;
        full & !(self.rows[r] | self.cols[c] | self.blocks[b])
    }

    fn place(&mut self, offset: usize, symbol: usize, on: bool) {
        let bit = 1u64 << (symbol - 1);
        let (r, c, b) = self.units(offset);
        self.rows[r] ^= bit;
        self.cols[c] ^= bit;
        self.blocks[b] ^= bit;
        self.entries[offset] = if on { symbol } else { 0 };
    }

    fn run(&mut self, depth: usize) -> bool {
        if depth == self.empties.len() {
            self.count += 1;
            self.solutions
                .push(ClassicalGrid::new(self.dim, self.entries.clone()).expect("valid symbols"));
            return self.count >= self.cap;
        }
        if self.order == SearchOrder::MostConstrained {
            let best = (depth..self.empties.len())
                .min_by_key(|&i| (self.candidates(self.empties[i]).count_ones(), self.empties[i]))
                .expect("non-empty range");
            self.empties.swap(depth, best);
        }
        let offset = self.empties[depth];
        let mut mask = self.candidates(offset);
        while mask != 0 {
            let symbol = mask.trailing_zeros() as usize + 1;
            mask &= mask - 1;
            self.place(offset, symbol, true);
            let stop = self.run(depth + 1);
            self.place(offset, symbol, false);
            if stop {
                return true;
            }
        }
        false
    }
}

/// Counts classical completions up to `cap`.
pub fn count_solutions(g: &ClassicalGrid, cap: u64) -> Result<SolutionCount> {
    count_solutions_with(g, cap, SearchOrder::RowMajor)
}

pub fn count_solutions_with(g: &ClassicalGrid, cap: u64, order: SearchOrder) -> Result<SolutionCount> {
    if cap == 0 {
        return Err(SudoqError::InvalidConfig("solution cap must be at least 1".into()));
    }
    let Some(mut search) = Search::new(g, cap, order) else {
        return Ok(SolutionCount {
            count: 0,
            capped: false,
            conflict: true,
            solutions: Vec::new(),
        });
    };
    search.run(0);
    Ok(SolutionCount {
        count: search.count,
        capped: search.count >= cap,
        conflict: false,
        solutions: search.solutions,
    })
}

pub fn classify_classical(g: &ClassicalGrid) -> ClassicalClass {
    let count = count_solutions(g, 2).expect("cap 2 is valid").count;
    match count {
        0 => ClassicalClass::Unsolvable,
        1 => ClassicalClass::Unique,
        _ => ClassicalClass::Multiple,
    }
}

/// The unique completion, if there is exactly one.
pub fn unique_solution(g: &ClassicalGrid) -> Option<ClassicalGrid> {
    let mut result = count_solutions(g, 2).expect("cap 2 is valid");
    (result.count == 1).then(|| result.solutions.remove(0))
}

/// Uniquely solvable, and deleting any single clue breaks uniqueness.
pub fn is_minimal(g: &ClassicalGrid) -> bool {
    if classify_classical(g) != ClassicalClass::Unique {
        return false;
    }
    let side = g.side();
    (0..g.dim().cells())
        .map(|offset| CellIndex::from_offset(offset, side))
        .filter(|&cell| g.get(cell) != 0)
        .all(|cell| {
            let mut reduced = g.clone();
            reduced.set(cell, 0);
            classify_classical(&reduced) != ClassicalClass::Unique
        })
}

/// Full Sudoku square built by shifting and copying the cyclic Latin square
/// `S[i][j] = (j - i) mod n + 1`: `G[(i,a),(b,j)] = S[i][j] + n (S[a][b] - 1)`,
/// where row `(i,a)` is `(i-1) n + a` and column `(b,j)` is `(b-1) n + j`.
pub fn shift_copy_square(n: usize) -> ClassicalGrid {
    let dim = GridDimension::new(n).expect("block side must be positive");
    let latin = |i: usize, j: usize| (j + n - i) % n + 1;
    let side = dim.side();
    let mut entries = vec![0; side * side];
    for i in 0..n {
        for a in 0..n {
            for b in 0..n {
                for j in 0..n {
                    let row = i * n + a;
                    let col = b * n + j;
                    entries[row * side + col] = latin(i, j) + n * (latin(a, b) - 1);
                }
            }
        }
    }
    ClassicalGrid::new(dim, entries).expect("symbols in range")
}

/// Frobenius residual `‖Σ|k⟩⟨k| - I‖` of a full classical constraint, computed
/// from symbol multiplicities: the projector sum is `diag(counts)`.
pub fn classical_residual(g: &ClassicalGrid, cells: &[CellIndex]) -> f64 {
    let mut counts = vec![0i64; g.side() + 1];
    for &cell in cells {
        counts[g.get(cell)] += 1;
    }
    let squares: i64 = counts[1..].iter().map(|&k| (k - 1) * (k - 1)).sum();
    (squares as f64).sqrt()
}

/// SudoQ error of a full classical grid (quantized), via symbol counts.
pub fn classical_error(g: &ClassicalGrid, cl: &ConstraintList) -> f64 {
    cl.iter().map(|c| classical_residual(g, &c.cells)).fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalScore {
    pub score: f64,
    /// First filling (odometer order) reaching the minimum.
    pub best: ClassicalGrid,
    pub fillings: u64,
}

/// Minimum SudoQ error over every assignment of symbols to the empty cells,
/// constraint-satisfying or not.
pub fn classical_score(g: &ClassicalGrid, budget: u64) -> Result<ClassicalScore> {
    let cl = sudoku_constraints(g.dim().block());
    let side = g.side();
    let empties: Vec<usize> = (0..g.dim().cells()).filter(|&o| g.entries()[o] == 0).collect();
    let needed = (side as f64).powi(empties.len() as i32);
    if needed > budget as f64 {
        return Err(SudoqError::BudgetExceeded { needed, budget });
    }
    let mut current = g.clone();
    for &o in &empties {
        current.set(CellIndex::from_offset(o, side), 1);
    }
    let mut best = (classical_error(&current, &cl), current.clone());
    let mut fillings = 1u64;
    'odometer: loop {
        for &o in &empties {
            let cell = CellIndex::from_offset(o, side);
            let v = current.get(cell);
            if v < side {
                current.set(cell, v + 1);
                break;
            }
            current.set(cell, 1);
            if o == *empties.last().expect("loop only runs with empties") {
                break 'odometer;
            }
        }
        if empties.is_empty() {
            break;
        }
        fillings += 1;
        let e = classical_error(&current, &cl);
        if e < best.0 {
            best = (e, current.clone());
        }
    }
    Ok(ClassicalScore {
        score: best.0,
        best: best.1,
        fillings,
    })
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

/// Line permutations preserving the band structure: permute bands, then lines within each band.
fn band_permutations(n: usize) -> Vec<Vec<usize>> {
    let perms = permutations(n);
    let mut out = Vec::new();
    let mut inner_choices: Vec<Vec<&Vec<usize>>> = vec![Vec::new()];
    for _ in 0..n {
        inner_choices = inner_choices
            .into_iter()
            .flat_map(|prefix| {
                perms.iter().map(move |p| {
                    let mut next = prefix.clone();
                    next.push(p);
                    next
                })
            })
            .collect();
    }
    for bands in &perms {
        for inner in &inner_choices {
            let mut line = Vec::with_capacity(n * n);
            for (slot, &band) in bands.iter().enumerate() {
                for &within in inner[slot] {
                    line.push(band * n + within);
                }
            }
            out.push(line);
        }
    }
    out
}

/// Canonical representative of a grid under the Sudoku symmetry group
/// (band/stack and line permutations, transposition, symbol relabeling).
/// The group has `2 (n!)^{2n+2}` geometric elements, so this is only practical
/// for `n = 2`.
pub fn canonical_form(g: &ClassicalGrid) -> ClassicalGrid {
    let side = g.side();
    let lines = band_permutations(g.dim().block());
    let mut best: Option<Vec<usize>> = None;
    let mut image = vec![0; side * side];
    for transpose in [false, true] {
        for rows in &lines {
            for cols in &lines {
                let mut relabel = vec![0usize; side + 1];
                let mut next = 1;
                for r in 0..side {
                    for c in 0..side {
                        let (sr, sc) = if transpose {
                            (cols[c], rows[r])
                        } else {
                            (rows[r], cols[c])
                        };
                        let e = g.entries()[sr * side + sc];
                        image[r * side + c] = if e == 0 {
                            0
                        } else {
                            if relabel[e] == 0 {
                                relabel[e] = next;
                                next += 1;
                            }
                            relabel[e]
                        };
                    }
                }
                if best.as_ref().is_none_or(|b| image < *b) {
                    best = Some(image.clone());
                }
            }
        }
    }
    ClassicalGrid::new(g.dim(), best.expect("group is non-empty")).expect("symbols in range")
}

/// Every uniquely solvable Shidoku grid with `clues` clues that is minimal,
/// reduced to canonical forms.
pub fn minimal_shidoku_scan(clues: usize) -> BTreeSet<Vec<usize>> {
    let dim = GridDimension::new(2).expect("n = 2");
    let cells = dim.cells();
    let mut classes = BTreeSet::new();
    let mut positions: Vec<usize> = (0..clues).collect();
    loop {
        let total = 4usize.pow(clues as u32);
        for code in 0..total {
            let mut entries = vec![0; cells];
            let mut rest = code;
            for &p in &positions {
                entries[p] = rest % 4 + 1;
                rest /= 4;
            }
            let g = ClassicalGrid::new(dim, entries).expect("symbols in range");
            if is_minimal(&g) {
                classes.insert(canonical_form(&g).entries().to_vec());
            }
        }
        // next combination of positions
        let mut i = clues;
        loop {
            if i == 0 {
                return classes;
            }
            i -= 1;
            if positions[i] < cells - clues + i {
                positions[i] += 1;
                for j in i + 1..clues {
                    positions[j] = positions[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn two_solution_grid() {
        let g = fixtures::two_solution_9x9();
        let result = count_solutions(&g, 10).unwrap();
        assert_eq!(result.count, 2);
        assert!(!result.capped);
        let blanks = |s: &ClassicalGrid| -> Vec<[usize; 2]> {
            [1, 4, 7]
                .iter()
                .map(|&r| [s.get(CellIndex::new(r, 2)), s.get(CellIndex::new(r, 3))])
                .collect()
        };
        assert_eq!(blanks(&result.solutions[0]), vec![[2, 3], [3, 1], [1, 2]]);
        assert_eq!(blanks(&result.solutions[1]), vec![[3, 2], [1, 3], [2, 1]]);
        assert_eq!(classify_classical(&g), ClassicalClass::Multiple);
    }

    #[test]
    fn unsolvable_grid() {
        let g = fixtures::unsolvable_4x4();
        let result = count_solutions(&g, 2).unwrap();
        assert_eq!(result.count, 0);
        assert!(!result.conflict);
        assert_eq!(classify_classical(&g), ClassicalClass::Unsolvable);
    }

    #[test]
    fn experiment_grid_is_unique() {
        let g = fixtures::experiment_9x9();
        assert_eq!(count_solutions(&g, 5).unwrap().count, 1);
        let most = count_solutions_with(&g, 5, SearchOrder::MostConstrained).unwrap();
        assert_eq!(most.count, 1);
        assert_eq!(most.solutions[0], unique_solution(&g).unwrap());
    }

    #[test]
    fn conflicting_clues_flagged() {
        let mut g = ClassicalGrid::empty(GridDimension::new(2).unwrap());
        g.set(CellIndex::new(1, 1), 1);
        g.set(CellIndex::new(1, 4), 1);
        let result = count_solutions(&g, 2).unwrap();
        assert!(result.conflict);
        assert_eq!(result.count, 0);
        assert!(count_solutions(&g, 0).is_err());
    }

    #[test]
    fn g05_unique_and_minimal() {
        let g = fixtures::g05();
        assert_eq!(classify_classical(&g), ClassicalClass::Unique);
        assert!(is_minimal(&g));
    }

    #[test]
    fn minimality_negative_cases() {
        let full = shift_copy_square(2);
        assert!(!is_minimal(&full));
        assert!(!is_minimal(&ClassicalGrid::empty(full.dim())));
        assert_eq!(
            classify_classical(&ClassicalGrid::empty(full.dim())),
            ClassicalClass::Multiple
        );
    }

    #[test]
    fn shift_copy_three_matches_display() {
        let expected = [
            [1, 2, 3, 4, 5, 6, 7, 8, 9],
            [7, 8, 9, 1, 2, 3, 4, 5, 6],
            [4, 5, 6, 7, 8, 9, 1, 2, 3],
            [3, 1, 2, 6, 4, 5, 9, 7, 8],
            [9, 7, 8, 3, 1, 2, 6, 4, 5],
            [6, 4, 5, 9, 7, 8, 3, 1, 2],
            [2, 3, 1, 5, 6, 4, 8, 9, 7],
            [8, 9, 7, 2, 3, 1, 5, 6, 4],
            [5, 6, 4, 8, 9, 7, 2, 3, 1],
        ];
        let g = shift_copy_square(3);
        let rows: Vec<Vec<usize>> = expected.iter().map(|r| r.to_vec()).collect();
        assert_eq!(g.rows(), rows);
        assert_eq!(shift_copy_square(1).entries(), &[1]);
        for n in 1..=5 {
            assert!(shift_copy_square(n).is_valid_square(&sudoku_constraints(n)), "n = {n}");
        }
    }

    #[test]
    fn relabeling_preserves_count() {
        let g = fixtures::two_solution_9x9();
        let perm = [0, 5, 3, 9, 1, 7, 2, 8, 4, 6];
        let relabeled = ClassicalGrid::new(g.dim(), g.entries().iter().map(|&e| perm[e]).collect()).unwrap();
        assert_eq!(count_solutions(&relabeled, 10).unwrap().count, 2);
    }

    #[test]
    fn shidoku_square_total() {
        let empty = ClassicalGrid::empty(GridDimension::new(2).unwrap());
        let rm = count_solutions(&empty, 10_000).unwrap();
        let mc = count_solutions_with(&empty, 10_000, SearchOrder::MostConstrained).unwrap();
        assert_eq!(rm.count, 288);
        assert_eq!(mc.count, 288);
        let cl = sudoku_constraints(2);
        assert!(rm.solutions.iter().all(|s| s.is_valid_square(&cl)));
    }

    #[test]
    fn classical_score_of_unsolvable_grid() {
        let g = fixtures::unsolvable_4x4();
        let score = classical_score(&g, DEFAULT_SCORE_BUDGET).unwrap();
        assert_eq!(score.fillings, 16);
        assert_eq!(score.score, 2f64.sqrt());

        let mut filled = g.clone();
        filled.set(CellIndex::new(1, 2), 2);
        filled.set(CellIndex::new(2, 1), 2);
        assert_eq!(classical_error(&filled, &sudoku_constraints(2)), 2f64.sqrt());
    }

    #[test]
    fn classical_score_zero_when_solvable() {
        let g = fixtures::g05();
        assert!(matches!(
            classical_score(&g, DEFAULT_SCORE_BUDGET),
            Err(SudoqError::BudgetExceeded { .. })
        ));
        let mut nearly = shift_copy_square(2);
        nearly.set(CellIndex::new(1, 1), 0);
        nearly.set(CellIndex::new(3, 2), 0);
        let score = classical_score(&nearly, DEFAULT_SCORE_BUDGET).unwrap();
        assert_eq!(score.score, 0.0);
        assert_eq!(score.best, shift_copy_square(2));
        let full = shift_copy_square(2);
        assert_eq!(classical_score(&full, 1).unwrap().score, 0.0);
    }

    #[test]
    fn canonical_form_is_invariant() {
        let g = fixtures::g05();
        let canon = canonical_form(&g);
        let transposed =
            ClassicalGrid::new(g.dim(), (0..16).map(|o| g.entries()[(o % 4) * 4 + o / 4]).collect()).unwrap();
        let relabeled = ClassicalGrid::new(g.dim(), g.entries().iter().map(|&e| [0, 4, 3, 2, 1][e]).collect()).unwrap();
        assert_eq!(canonical_form(&transposed), canon);
        assert_eq!(canonical_form(&relabeled), canon);
        assert_eq!(band_permutations(2).len(), 8);
        assert_eq!(band_permutations(3).len(), 1296);
    }
}
