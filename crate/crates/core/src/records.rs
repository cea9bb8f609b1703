//! Registry of the published record lengths and comparison against it.
//!
//! Only lengths and closed flags are registry data; the published tour
//! tables themselves are not embedded.

use crate::lattice::Box3;
use crate::search::SearchResult;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordEntry {
    /// Extents sorted ascending; shape identity is unordered.
    pub dims: [i64; 3],
    pub length: usize,
    pub closed: bool,
    pub source: &'static str,
}

/// The published records: five cuboids and six cubes.
pub fn builtin_records() -> Vec<RecordEntry> {
    let e = |dims, length, closed, source| RecordEntry {
        dims,
        length,
        closed,
        source,
    };
    vec![
        e([2, 2, 3], 4, true, "Fig.3"),
        e([2, 3, 3], 8, true, "Fig.4"),
        e([2, 4, 4], 14, false, "Fig.5"),
        e([3, 3, 4], 20, false, "Fig.6"),
        e([3, 4, 4], 27, false, "Fig.7"),
        e([3, 3, 3], 15, false, "Fig.8"),
        e([4, 4, 4], 46, false, "Fig.9"),
        e([5, 5, 5], 88, false, "Fig.10"),
        e([6, 6, 6], 159, false, "Fig.11"),
        e([7, 7, 7], 258, false, "Fig.12"),
        e([8, 8, 8], 395, false, "Fig.13"),
    ]
}

/// Record length for a shape, invariant under axis permutation.
pub fn lookup(bx: &Box3, closed: bool) -> Option<RecordEntry> {
    let dims = bx.sorted_dims();
    builtin_records()
        .into_iter()
        .find(|r| r.dims == dims && r.closed == closed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareStatus {
    /// Shorter than the registry entry by this many moves.
    Below(usize),
    Matches,
    /// Longer than the registry entry by this many moves.
    Improves(usize),
    Unlisted,
}

impl fmt::Display for CompareStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CompareStatus::Below(d) => write!(f, "below({d})"),
            CompareStatus::Matches => write!(f, "matches"),
            CompareStatus::Improves(d) => write!(f, "improves({d})"),
            CompareStatus::Unlisted => write!(f, "unlisted"),
        }
    }
}

/// Compare a certified result against the registry entry for its shape.
pub fn compare(result: &SearchResult) -> CompareStatus {
    compare_length(&result.best.bx, result.best.closed, result.length)
}

pub fn compare_length(bx: &Box3, closed: bool, length: usize) -> CompareStatus {
    match lookup(bx, closed) {
        None => CompareStatus::Unlisted,
        Some(entry) => {
            if length < entry.length {
                CompareStatus::Below(entry.length - length)
            } else if length == entry.length {
                CompareStatus::Matches
            } else {
                CompareStatus::Improves(length - entry.length)
            }
        }
    }
}
