//! Tour representation, the authoritative verifier, and coverage stats.
//!
//! The verifier is the trust anchor: it is total (any cell sequence yields
//! a report, never an abort) and uses the naive all-pairs conflict check,
//! deliberately independent of the search's incremental crossing index.

use crate::geometry::{segments_conflict, Rational, Segment};
use crate::lattice::{Box3, Cell, MoveOffset};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

/// Ordered sequence of cells with a closed flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tour {
    pub bx: Box3,
    pub cells: Vec<Cell>,
    pub closed: bool,
}

impl Tour {
    pub fn new(bx: Box3, cells: Vec<Cell>, closed: bool) -> Self {
        Tour { bx, cells, closed }
    }

    /// Number of knight moves: |cells| - 1 open, |cells| closed.
    pub fn length(&self) -> usize {
        if self.cells.is_empty() {
            return 0;
        }
        if self.closed {
            self.cells.len()
        } else {
            self.cells.len() - 1
        }
    }

    /// Consecutive-cell segments in visit order, plus the closing segment
    /// for closed tours. Degenerate (repeated-cell) steps are skipped;
    /// they are already reported as violations by `verify`.
    pub fn segments(&self) -> Vec<Segment> {
        segments_of(self)
    }
}

/// Verification failure, with the cell/segment indices involved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    /// Cell at index lies outside the box.
    OutOfBounds { index: usize },
    /// Same cell appears at both indices.
    RepeatedCell { first: usize, second: usize },
    /// Step from cell `index` to `index + 1` is not a knight move.
    NotKnightStep { index: usize },
    /// Closing step (last cell back to first) is not a knight move.
    ClosureNotKnightStep,
    /// Segments at the two indices share a forbidden point.
    Crossing { seg_a: usize, seg_b: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OutOfBounds { index } => write!(f, "cell {index} out of bounds"),
            Violation::RepeatedCell { first, second } => {
                write!(f, "cell {second} repeats cell {first}")
            }
            Violation::NotKnightStep { index } => {
                write!(f, "step {index} -> {} is not a knight move", index + 1)
            }
            Violation::ClosureNotKnightStep => write!(f, "closing step is not a knight move"),
            Violation::Crossing { seg_a, seg_b } => {
                write!(f, "segments {seg_a} and {seg_b} cross")
            }
        }
    }
}

/// Full verdict of the verifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub ok: bool,
    pub length: usize,
    pub cells_visited: usize,
    pub coverage: Rational,
    pub coverage_percent: u32,
    pub violations: Vec<Violation>,
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "ok: {}  length: {}  cells: {}  coverage: {} ({}%)",
            self.ok, self.length, self.cells_visited, self.coverage, self.coverage_percent
        )?;
        for v in &self.violations {
            writeln!(f, "violation: {v}")?;
        }
        Ok(())
    }
}

/// Check bounds, distinctness, knight steps (including closure) and
/// all-pairs non-crossing. Reports every violation found.
pub fn verify(tour: &Tour) -> VerifyReport {
    let mut violations = Vec::new();

    for (i, &c) in tour.cells.iter().enumerate() {
        if !tour.bx.contains(c) {
            violations.push(Violation::OutOfBounds { index: i });
        }
    }

    let mut seen: HashMap<Cell, usize> = HashMap::new();
    for (i, &c) in tour.cells.iter().enumerate() {
        if let Some(&first) = seen.get(&c) {
            violations.push(Violation::RepeatedCell { first, second: i });
        } else {
            seen.insert(c, i);
        }
    }

    for i in 0..tour.cells.len().saturating_sub(1) {
        if !step_is_knight(tour.cells[i], tour.cells[i + 1]) {
            violations.push(Violation::NotKnightStep { index: i });
        }
    }
    if tour.closed && tour.cells.len() >= 2 {
        let last = *tour.cells.last().unwrap();
        if !step_is_knight(last, tour.cells[0]) {
            violations.push(Violation::ClosureNotKnightStep);
        }
    }

    // All-pairs crossing check over the valid (non-degenerate) segments.
    let segs = indexed_segments(tour);
    let n_steps = if tour.closed {
        tour.cells.len()
    } else {
        tour.cells.len().saturating_sub(1)
    };
    for ai in 0..segs.len() {
        for bi in ai + 1..segs.len() {
            let (ia, sa) = &segs[ai];
            let (ib, sb) = &segs[bi];
            let allowed = consecutive_joint(tour, *ia, *ib, n_steps);
            if segments_conflict(sa, sb, allowed) {
                violations.push(Violation::Crossing { seg_a: *ia, seg_b: *ib });
            }
        }
    }

    let cells_visited = seen.len();
    let (coverage, coverage_percent) = coverage_of(&tour.bx, cells_visited);
    VerifyReport {
        ok: violations.is_empty(),
        length: tour.length(),
        cells_visited,
        coverage,
        coverage_percent,
        violations,
    }
}

fn step_is_knight(a: Cell, b: Cell) -> bool {
    MoveOffset {
        dx: b.x - a.x,
        dy: b.y - a.y,
        dz: b.z - a.z,
    }
    .is_knight()
}

/// The shared cell of two consecutive step indices, if any.
fn consecutive_joint(tour: &Tour, i: usize, j: usize, n_steps: usize) -> Option<Cell> {
    debug_assert!(i < j);
    if j == i + 1 {
        Some(tour.cells[j])
    } else if tour.closed && i == 0 && j == n_steps - 1 {
        Some(tour.cells[0])
    } else {
        None
    }
}

fn indexed_segments(tour: &Tour) -> Vec<(usize, Segment)> {
    let mut out = Vec::new();
    if tour.cells.len() < 2 {
        return out;
    }
    for i in 0..tour.cells.len() - 1 {
        if let Ok(s) = Segment::new(tour.cells[i], tour.cells[i + 1]) {
            out.push((i, s));
        }
    }
    if tour.closed {
        if let Ok(s) = Segment::new(*tour.cells.last().unwrap(), tour.cells[0]) {
            out.push((tour.cells.len() - 1, s));
        }
    }
    out
}

/// Consecutive-cell segments in visit order.
pub fn segments_of(tour: &Tour) -> Vec<Segment> {
    indexed_segments(tour).into_iter().map(|(_, s)| s).collect()
}

/// Coverage as an exact rational plus nearest-integer percent (half up).
pub fn coverage(tour: &Tour) -> (Rational, u32) {
    let distinct: std::collections::HashSet<_> = tour.cells.iter().collect();
    coverage_of(&tour.bx, distinct.len())
}

fn coverage_of(bx: &Box3, cells_visited: usize) -> (Rational, u32) {
    let vol = bx.volume() as i128;
    let v = cells_visited as i128;
    let frac = Rational::new(v, vol);
    // nearest integer percent, half rounds up
    let percent = ((200 * v + vol) / (2 * vol)) as u32;
    (frac, percent)
}
