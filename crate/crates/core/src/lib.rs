//! Solver and verifier for longest non-crossing knight's paths in 3D
//! boxes.
//!
//! A 3D knight step is any signed permutation of (0, 1, 2). A tour is a
//! sequence of distinct cells joined by knight steps whose connecting
//! segments never share a point, except the single joint of consecutive
//! steps. This crate provides:
//!
//! - exact integer/rational segment intersection ([`geometry`]),
//! - an authoritative all-pairs verifier with coverage stats ([`tour`]),
//! - a spatial-hash crossing index for search inner loops
//!   ([`crossing_index`]),
//! - exhaustive branch-and-bound and multi-start heuristic search
//!   ([`search`]),
//! - the published record registry ([`records`]),
//! - layer-table / JSON / polyline serialization ([`codec`]).

pub mod codec;
pub mod crossing_index;
pub mod geometry;
pub mod lattice;
pub mod records;
pub mod search;
pub mod tour;

pub use crossing_index::CrossingIndex;
pub use geometry::{classify_intersection, segments_conflict, IntersectionKind, Segment};
pub use lattice::{Box3, BoxTransform, Cell, MoveOffset};
pub use records::{builtin_records, CompareStatus, RecordEntry};
pub use search::{solve, solve_exhaustive, solve_heuristic, Mode, SearchConfig, SearchResult};
pub use tour::{verify, Tour, VerifyReport, Violation};
