//! Latin (rook) and Sudoku constraint lists, plus their Tanner-graph export.
//!
//! A constraint is a set of `N` cells whose projectors must sum to the identity.
//! Cells are 1-based. Lists are ordered rows, then columns, then blocks; the
//! solver sweeps them in that order.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::grid::GridDimension;

/// 1-based cell coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellIndex {
    pub row: usize,
    pub col: usize,
}

impl CellIndex {
    pub const fn new(row: usize, col: usize) -> Self {
        CellIndex { row, col }
    }

    /// Row-major 0-based offset in a grid of the given side.
    #[inline]
    pub fn offset(self, side: usize) -> usize {
        debug_assert!(self.row >= 1 && self.col >= 1 && self.row <= side && self.col <= side);
        (self.row - 1) * side + (self.col - 1)
    }

    #[inline]
    pub fn from_offset(offset: usize, side: usize) -> Self {
        CellIndex::new(offset / side + 1, offset % side + 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintKind {
    Row,
    Col,
    Block,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    /// 1-based ordinal within its list.
    pub id: usize,
    pub kind: ConstraintKind,
    pub cells: Vec<CellIndex>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintList {
    side: usize,
    constraints: Vec<Constraint>,
}

impl ConstraintList {
    pub fn side(&self) -> usize {
        self.side
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Constraint> {
        self.constraints.iter()
    }

    /// Row-major offsets of each constraint's cells.
    pub fn offsets(&self) -> Vec<Vec<usize>> {
        self.constraints
            .iter()
            .map(|c| c.cells.iter().map(|cell| cell.offset(self.side)).collect())
            .collect()
    }

    /// Keeps only the constraints of the given kinds, renumbering ids.
    pub fn restricted_to(&self, kinds: &[ConstraintKind]) -> ConstraintList {
        let constraints = self
            .constraints
            .iter()
            .filter(|c| kinds.contains(&c.kind))
            .enumerate()
            .map(|(i, c)| Constraint {
                id: i + 1,
                kind: c.kind,
                cells: c.cells.clone(),
            })
            .collect();
        ConstraintList {
            side: self.side,
            constraints,
        }
    }

    /// Number of constraints each cell belongs to, row-major.
    pub fn cell_multiplicity(&self) -> Vec<usize> {
        let mut counts = vec![0; self.side * self.side];
        for c in &self.constraints {
            for cell in &c.cells {
                counts[cell.offset(self.side)] += 1;
            }
        }
        counts
    }

    /// Number of (constraint, cell) incidences, i.e. Tanner-graph edges.
    pub fn edge_count(&self) -> usize {
        self.constraints.iter().map(|c| c.cells.len()).sum()
    }

    /// DOT rendering of the bipartite constraint/cell graph.
    pub fn export_tanner(&self) -> String {
        let mut out = String::new();
        out.push_str("graph tanner {\n");
        out.push_str("  node [style=filled];\n");
        for c in &self.constraints {
            let _ = writeln!(
                out,
                "  C{} [shape=box, fillcolor=\"#5050a0\", label=\"C{}\"];",
                c.id, c.id
            );
        }
        for row in 1..=self.side {
            for col in 1..=self.side {
                let _ = writeln!(
                    out,
                    "  {} [shape=circle, fillcolor=\"#50a050\", label=\"P{}{}\"];",
                    cell_node(row, col),
                    row,
                    col
                );
            }
        }
        for c in &self.constraints {
            for cell in &c.cells {
                let _ = writeln!(out, "  C{} -- {};", c.id, cell_node(cell.row, cell.col));
            }
        }
        out.push_str("}\n");
        out
    }

    /// JSON export: `{"side": N, "constraints": [{"id", "kind", "cells": [[r, c], ...]}]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let constraints: Vec<serde_json::Value> = self
            .constraints
            .iter()
            .map(|c| {
                serde_json::json!({
                    "id": c.id,
                    "kind": c.kind,
                    "cells": c.cells.iter().map(|x| [x.row, x.col]).collect::<Vec<_>>(),
                })
            })
            .collect();
        serde_json::json!({ "side": self.side, "constraints": constraints })
    }
}

fn cell_node(row: usize, col: usize) -> String {
    format!("P{row}_{col}")
}

fn push_rook(side: usize, constraints: &mut Vec<Constraint>) {
    for row in 1..=side {
        constraints.push(Constraint {
            id: constraints.len() + 1,
            kind: ConstraintKind::Row,
            cells: (1..=side).map(|col| CellIndex::new(row, col)).collect(),
        });
    }
    for col in 1..=side {
        constraints.push(Constraint {
            id: constraints.len() + 1,
            kind: ConstraintKind::Col,
            cells: (1..=side).map(|row| CellIndex::new(row, col)).collect(),
        });
    }
}

/// Rook hypergraph on an `side × side` board: rows then columns.
pub fn latin_constraints(side: usize) -> ConstraintList {
    let mut constraints = Vec::with_capacity(2 * side);
    push_rook(side, &mut constraints);
    ConstraintList { side, constraints }
}

/// Sudoku hypergraph for block side `n`: rows, columns, then the `n²` blocks in
/// row-major block order. Block `(I, J)` holds cells `((I-1)n+i, (J-1)n+j)`.
pub fn sudoku_constraints(n: usize) -> ConstraintList {
    let side = n * n;
    let mut constraints = Vec::with_capacity(3 * side);
    push_rook(side, &mut constraints);
    for big_row in 0..n {
        for big_col in 0..n {
            let cells = (0..n)
                .flat_map(|i| (0..n).map(move |j| CellIndex::new(big_row * n + i + 1, big_col * n + j + 1)))
                .collect();
            constraints.push(Constraint {
                id: constraints.len() + 1,
                kind: ConstraintKind::Block,
                cells,
            });
        }
    }
    ConstraintList { side, constraints }
}

impl From<GridDimension> for ConstraintList {
    fn from(dim: GridDimension) -> Self {
        sudoku_constraints(dim.block())
    }
}
