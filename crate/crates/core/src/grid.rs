//! Classical and quantum grids.
//!
//! A classical grid holds symbols `1..=N` (0 = empty). A quantum grid holds, per
//! cell, either nothing or a vector in `C^N` standing for the rank-one projector
//! onto it. Projectors are never stored as matrices.

use std::fmt;

use nalgebra::{ComplexField, DVector};
use serde::{Deserialize, Serialize};

use crate::constraints::{CellIndex, ConstraintList};
use crate::error::{Result, SudoqError};
use crate::scalar::{c, from_f64, to_f64, Real, C};

/// Default classification threshold on `1 - max fidelity`.
pub const DEFAULT_CLASSICAL_TOLERANCE: f64 = 1e-6;

/// Block side `n`; the grid side is `N = n²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridDimension {
    n: usize,
}

impl GridDimension {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(SudoqError::BadDimension(n));
        }
        Ok(GridDimension { n })
    }

    /// Block side `n`.
    pub fn block(self) -> usize {
        self.n
    }

    /// Grid side `N = n²`, also the Hilbert-space dimension.
    pub fn side(self) -> usize {
        self.n * self.n
    }

    pub fn cells(self) -> usize {
        self.side() * self.side()
    }

    /// Recovers the dimension from a cell count `N²`, if it is a fourth power.
    pub fn from_cell_count(count: usize) -> Option<Self> {
        let side = (count as f64).sqrt().round() as usize;
        let n = (side as f64).sqrt().round() as usize;
        (n >= 1 && n * n == side && side * side == count).then_some(GridDimension { n })
    }
}

/// Grid of symbols; 0 marks an empty cell.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClassicalGrid {
    dim: GridDimension,
    entries: Vec<usize>,
}

impl ClassicalGrid {
    pub fn new(dim: GridDimension, entries: Vec<usize>) -> Result<Self> {
        if entries.len() != dim.cells() {
            return Err(SudoqError::BadLength {
                expected: dim.cells(),
                found: entries.len(),
            });
        }
        if let Some((position, &e)) = entries.iter().enumerate().find(|(_, &e)| e > dim.side()) {
            return Err(SudoqError::BadToken {
                token: e.to_string(),
                position,
                max: dim.side(),
            });
        }
        Ok(ClassicalGrid { dim, entries })
    }

    pub fn empty(dim: GridDimension) -> Self {
        ClassicalGrid {
            dim,
            entries: vec![0; dim.cells()],
        }
    }

    /// Builds a grid from nested rows; the dimension is inferred.
    pub fn from_rows(rows: &[Vec<usize>]) -> Result<Self> {
        let entries: Vec<usize> = rows.iter().flatten().copied().collect();
        let dim = GridDimension::from_cell_count(entries.len()).ok_or(SudoqError::BadLength {
            expected: rows.len() * rows.len(),
            found: entries.len(),
        })?;
        ClassicalGrid::new(dim, entries)
    }

    pub fn dim(&self) -> GridDimension {
        self.dim
    }

    pub fn side(&self) -> usize {
        self.dim.side()
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn get(&self, cell: CellIndex) -> usize {
        self.entries[cell.offset(self.side())]
    }

    pub fn set(&mut self, cell: CellIndex, value: usize) {
        assert!(value <= self.side(), "symbol {value} out of range");
        let side = self.side();
        self.entries[cell.offset(side)] = value;
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.entries.chunks(self.side()).map(|r| r.to_vec()).collect()
    }

    pub fn clue_count(&self) -> usize {
        self.entries.iter().filter(|&&e| e != 0).count()
    }

    pub fn is_full(&self) -> bool {
        self.entries.iter().all(|&e| e != 0)
    }

    /// First constraint (1-based id) in which a symbol repeats, with that symbol.
    pub fn first_conflict(&self, cl: &ConstraintList) -> Option<(usize, usize)> {
        for constraint in cl.iter() {
            let mut seen = vec![false; self.side() + 1];
            for cell in &constraint.cells {
                let e = self.get(*cell);
                if e == 0 {
                    continue;
                }
                if seen[e] {
                    return Some((constraint.id, e));
                }
                seen[e] = true;
            }
        }
        None
    }

    /// Full grid with every constraint a permutation of `1..=N`.
    pub fn is_valid_square(&self, cl: &ConstraintList) -> bool {
        self.is_full() && self.first_conflict(cl).is_none()
    }

    /// `true` if every clue of `self` appears unchanged in `other`.
    pub fn is_extended_by(&self, other: &ClassicalGrid) -> bool {
        self.dim == other.dim && self.entries.iter().zip(&other.entries).all(|(&a, &b)| a == 0 || a == b)
    }

    /// Compact single-character format; only defined for `N <= 9`.
    pub fn to_compact(&self) -> Option<String> {
        (self.side() <= 9).then(|| {
            self.entries
                .iter()
                .map(|&e| if e == 0 { '.' } else { char::from(b'0' + e as u8) })
                .collect()
        })
    }

    /// General format: `N` lines of space-separated tokens, `.` for empty.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in self.entries.chunks(self.side()) {
            let line: Vec<String> = row
                .iter()
                .map(|&e| if e == 0 { ".".to_string() } else { e.to_string() })
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for ClassicalGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn parse_token(token: &str, position: usize, side: usize) -> Result<usize> {
    let bad = || SudoqError::BadToken {
        token: token.to_string(),
        position,
        max: side,
    };
    if token == "." {
        return Ok(0);
    }
    let value: usize = token.parse().map_err(|_| bad())?;
    if value > side {
        return Err(bad());
    }
    Ok(value)
}

/// Parses either the compact format (one character per cell, `N <= 9`) or the
/// general whitespace-separated format. `.` and `0` both mean empty.
pub fn parse_classical_grid(text: &str, dim: GridDimension) -> Result<ClassicalGrid> {
    let side = dim.side();
    let expected = dim.cells();
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.len() == expected {
        let entries = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| parse_token(t, i, side))
            .collect::<Result<Vec<_>>>()?;
        return ClassicalGrid::new(dim, entries);
    }
    let chars: Vec<char> = text.chars().filter(|ch| !ch.is_whitespace()).collect();
    if side > 9 || chars.len() != expected {
        return Err(SudoqError::BadLength {
            expected,
            found: if side > 9 { tokens.len() } else { chars.len() },
        });
    }
    let entries = chars
        .iter()
        .enumerate()
        .map(|(i, ch)| parse_token(&ch.to_string(), i, side))
        .collect::<Result<Vec<_>>>()?;
    ClassicalGrid::new(dim, entries)
}

/// Like [`parse_classical_grid`], inferring `n` from the number of cells.
pub fn parse_classical_grid_auto(text: &str) -> Result<ClassicalGrid> {
    let tokens = text.split_whitespace().count();
    let chars = text.chars().filter(|ch| !ch.is_whitespace()).count();
    let dim = GridDimension::from_cell_count(tokens)
        .filter(|d| d.cells() > 1 || chars == 1)
        .or_else(|| GridDimension::from_cell_count(chars).filter(|d| d.side() <= 9))
        .ok_or(SudoqError::BadLength {
            expected: 0,
            found: tokens,
        })?;
    parse_classical_grid(text, dim)
}

/// Ket of one cell. Working vectors inside the solver may have any norm;
/// finished grids hold unit vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<R: Real> {
    amplitudes: DVector<C<R>>,
}

impl<R: Real> StateVector<R> {
    pub fn new(amplitudes: DVector<C<R>>) -> Self {
        StateVector { amplitudes }
    }

    pub fn from_slice(amplitudes: &[C<R>]) -> Self {
        StateVector {
            amplitudes: DVector::from_column_slice(amplitudes),
        }
    }

    /// Computational-basis ket `|k⟩`, `k` in `1..=dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k >= 1 && k <= dim, "basis index {k} out of 1..={dim}");
        let mut amplitudes = DVector::zeros(dim);
        amplitudes[k - 1] = C::new(R::one(), R::zero());
        StateVector { amplitudes }
    }

    /// Real-amplitude superposition, normalized.
    pub fn real_combination(coeffs: &[f64]) -> Self {
        let norm = coeffs.iter().map(|x| x * x).sum::<f64>().sqrt();
        StateVector {
            amplitudes: DVector::from_iterator(coeffs.len(), coeffs.iter().map(|&x| c(from_f64(x / norm), R::zero()))),
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C<R>> {
        &self.amplitudes
    }

    pub fn into_inner(self) -> DVector<C<R>> {
        self.amplitudes
    }

    pub fn norm(&self) -> R {
        self.amplitudes.norm()
    }

    /// `⟨self, other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &StateVector<R>) -> C<R> {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// Unit vector with the first non-negligible amplitude real and positive.
    pub fn canonical(&self) -> Self {
        let norm = self.norm();
        if norm == R::zero() {
            return self.clone();
        }
        let scaled = self.amplitudes.unscale(norm);
        let threshold = from_f64::<R>(1e-12);
        let phase = scaled
            .iter()
            .find(|a| a.modulus() > threshold)
            .map(|a| a.unscale(a.modulus()).conj())
            .unwrap_or_else(|| C::new(R::one(), R::zero()));
        StateVector {
            amplitudes: scaled * phase,
        }
    }

    /// Squared overlap with `|k⟩` for each `k`, divided by the squared norm.
    pub fn basis_fidelities(&self) -> Vec<R> {
        let norm2 = self.amplitudes.norm_squared();
        self.amplitudes.iter().map(|a| a.norm_sqr() / norm2).collect()
    }

    pub fn cast<S: Real>(&self) -> StateVector<S> {
        StateVector {
            amplitudes: self
                .amplitudes
                .map(|a| c(from_f64(to_f64(a.re)), from_f64(to_f64(a.im)))),
        }
    }
}

fn check_unit<R: Real>(x: &StateVector<R>, cell: CellIndex, tol: f64) -> Result<()> {
    let norm = to_f64(x.norm());
    if (norm - 1.0).abs() > tol {
        return Err(SudoqError::NotNormalized {
            row: cell.row,
            col: cell.col,
            norm,
        });
    }
    Ok(())
}

/// `|⟨x, y⟩|²` for unit vectors: 1 iff the projectors coincide.
pub fn cell_fidelity<R: Real>(x: &StateVector<R>, y: &StateVector<R>) -> Result<R> {
    if x.dim() != y.dim() {
        return Err(SudoqError::DimensionMismatch(x.dim(), y.dim()));
    }
    check_unit(x, CellIndex::new(0, 0), 1e-6)?;
    check_unit(y, CellIndex::new(0, 0), 1e-6)?;
    Ok(x.inner(y).norm_sqr())
}

#[derive(Clone, Debug, PartialEq)]
pub enum CellState<R: Real> {
    Empty,
    Occupied(StateVector<R>),
}

impl<R: Real> CellState<R> {
    pub fn vector(&self) -> Option<&StateVector<R>> {
        match self {
            CellState::Empty => None,
            CellState::Occupied(v) => Some(v),
        }
    }
}

/// Partial matrix of rank-one projectors, stored as vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumGrid<R: Real> {
    dim: GridDimension,
    cells: Vec<CellState<R>>,
}

impl<R: Real> QuantumGrid<R> {
    pub fn empty(dim: GridDimension) -> Self {
        QuantumGrid {
            dim,
            cells: vec![CellState::Empty; dim.cells()],
        }
    }

    pub fn from_cells(dim: GridDimension, cells: Vec<CellState<R>>) -> Result<Self> {
        if cells.len() != dim.cells() {
            return Err(SudoqError::BadLength {
                expected: dim.cells(),
                found: cells.len(),
            });
        }
        for cell in cells.iter().filter_map(CellState::vector) {
            if cell.dim() != dim.side() {
                return Err(SudoqError::DimensionMismatch(cell.dim(), dim.side()));
            }
        }
        Ok(QuantumGrid { dim, cells })
    }

    pub fn dim(&self) -> GridDimension {
        self.dim
    }

    pub fn side(&self) -> usize {
        self.dim.side()
    }

    pub fn cells(&self) -> &[CellState<R>] {
        &self.cells
    }

    pub fn cell(&self, index: CellIndex) -> &CellState<R> {
        &self.cells[index.offset(self.side())]
    }

    pub fn vector(&self, index: CellIndex) -> Option<&StateVector<R>> {
        self.cell(index).vector()
    }

    pub fn set(&mut self, index: CellIndex, state: CellState<R>) {
        if let CellState::Occupied(v) = &state {
            assert_eq!(v.dim(), self.side(), "vector dimension must equal the grid side");
        }
        let side = self.side();
        self.cells[index.offset(side)] = state;
    }

    pub fn is_full(&self) -> bool {
        self.cells.iter().all(|c| matches!(c, CellState::Occupied(_)))
    }

    /// All occupied cells as unit vectors with canonical global phase.
    pub fn canonicalized(&self) -> Self {
        QuantumGrid {
            dim: self.dim,
            cells: self
                .cells
                .iter()
                .map(|cell| match cell {
                    CellState::Empty => CellState::Empty,
                    CellState::Occupied(v) => CellState::Occupied(v.canonical()),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> QuantumGridJson {
        QuantumGridJson {
            n: self.dim.block(),
            cells: self
                .cells
                .iter()
                .map(|cell| {
                    cell.vector()
                        .map(|v| v.amplitudes().iter().map(|a| [to_f64(a.re), to_f64(a.im)]).collect())
                })
                .collect(),
        }
    }

    pub fn from_json(json: &QuantumGridJson) -> Result<Self> {
        let dim = GridDimension::new(json.n)?;
        let cells = json
            .cells
            .iter()
            .map(|cell| match cell {
                None => CellState::Empty,
                Some(amps) => CellState::Occupied(StateVector::from_slice(
                    &amps
                        .iter()
                        .map(|[re, im]| c(from_f64(*re), from_f64(*im)))
                        .collect::<Vec<_>>(),
                )),
            })
            .collect();
        QuantumGrid::from_cells(dim, cells)
    }
}

/// Wire form of a quantum grid: `{"n": n, "cells": [null | [[re, im], ...]]}`, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantumGridJson {
    pub n: usize,
    pub cells: Vec<Option<Vec<[f64; 2]>>>,
}

/// Canonical quantization: symbol `k` becomes `|k⟩`, 0 stays empty.
pub fn quantize<R: Real>(g: &ClassicalGrid) -> QuantumGrid<R> {
    let side = g.side();
    QuantumGrid {
        dim: g.dim(),
        cells: g
            .entries()
            .iter()
            .map(|&e| {
                if e == 0 {
                    CellState::Empty
                } else {
                    CellState::Occupied(StateVector::basis(side, e))
                }
            })
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Classicality {
    Classical(ClassicalGrid),
    NonClassical,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalityVerdict<R: Real> {
    pub kind: Classicality,
    /// Row-major `max_k |⟨k, x⟩|²`.
    pub per_cell_max_fidelity: Vec<R>,
}

impl<R: Real> ClassicalityVerdict<R> {
    pub fn is_classical(&self) -> bool {
        matches!(self.kind, Classicality::Classical(_))
    }

    pub fn classical_grid(&self) -> Option<&ClassicalGrid> {
        match &self.kind {
            Classicality::Classical(g) => Some(g),
            Classicality::NonClassical => None,
        }
    }

    pub fn min_max_fidelity(&self) -> R {
        self.per_cell_max_fidelity
            .iter()
            .copied()
            .fold(R::one(), |a, b| a.min(b))
    }
}

/// Decides whether a full grid is (up to `tolerance`) a quantized classical square.
pub fn classify<R: Real>(q: &QuantumGrid<R>, tolerance: f64) -> Result<ClassicalityVerdict<R>> {
    let side = q.side();
    let threshold = from_f64::<R>(1.0 - tolerance);
    let mut fidelities = Vec::with_capacity(q.cells.len());
    let mut symbols = Vec::with_capacity(q.cells.len());
    let mut classical = true;
    for (offset, cell) in q.cells.iter().enumerate() {
        let index = CellIndex::from_offset(offset, side);
        let v = cell.vector().ok_or(SudoqError::NotFull)?;
        check_unit(v, index, 1e-6)?;
        let (k, best) = v
            .basis_fidelities()
            .into_iter()
            .enumerate()
            .fold((0, R::zero()), |acc, (k, f)| if f > acc.1 { (k, f) } else { acc });
        if best < threshold {
            classical = false;
        }
        fidelities.push(best);
        symbols.push(k + 1);
    }
    let kind = if classical {
        Classicality::Classical(ClassicalGrid::new(q.dim, symbols)?)
    } else {
        Classicality::NonClassical
    };
    Ok(ClassicalityVerdict {
        kind,
        per_cell_max_fidelity: fidelities,
    })
}
