//! Incremental broad-phase index over committed tour segments.
//!
//! Segments register in every unit cube [i,i+1]x[j,j+1]x[k,k+1] their
//! closed AABB touches, keyed by (i,j,k). Any point shared by two
//! segments has a floor key inside both covers, so a bucket miss proves
//! disjointness; bucket hits are narrow-phase checked with the exact
//! predicate. Removal is strictly LIFO, matching DFS backtracking.

use crate::geometry::{segments_conflict, Segment};
use crate::lattice::{Box3, Cell};
use std::collections::HashMap;

type BucketKey = (i64, i64, i64);

#[derive(Debug, Clone)]
pub struct CrossingIndex {
    bx: Box3,
    segments: Vec<Segment>,
    buckets: HashMap<BucketKey, Vec<usize>>,
}

impl CrossingIndex {
    pub fn new(bx: Box3) -> Self {
        CrossingIndex {
            bx,
            segments: Vec::new(),
            buckets: HashMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Commit a segment; returns its id (insertion count so far).
    ///
    /// Panics if an endpoint lies outside the box.
    pub fn insert(&mut self, s: Segment) -> usize {
        assert!(
            self.bx.contains(s.a) && self.bx.contains(s.b),
            "segment {s} outside box {}",
            self.bx
        );
        let id = self.segments.len();
        for key in bucket_cover(&s) {
            self.buckets.entry(key).or_default().push(id);
        }
        self.segments.push(s);
        id
    }

    /// Remove the most recently inserted segment.
    ///
    /// Panics on an empty index.
    pub fn remove_last(&mut self) {
        let s = self.segments.pop().expect("remove_last on empty index");
        let id = self.segments.len();
        for key in bucket_cover(&s) {
            let bucket = self.buckets.get_mut(&key).expect("bucket must exist");
            debug_assert_eq!(bucket.last(), Some(&id));
            bucket.pop();
            if bucket.is_empty() {
                self.buckets.remove(&key);
            }
        }
    }

    /// Does `candidate` conflict with any committed segment?
    ///
    /// Only segments sharing a bucket with the candidate's AABB cover are
    /// narrow-phase tested.
    pub fn conflicts(&self, candidate: &Segment, allowed_shared: Option<Cell>) -> bool {
        let mut tested = [false; 64];
        let mut tested_overflow = Vec::new();
        for key in bucket_cover(candidate) {
            let Some(bucket) = self.buckets.get(&key) else {
                continue;
            };
            for &id in bucket {
                let seen = if id < 64 {
                    std::mem::replace(&mut tested[id], true)
                } else if tested_overflow.contains(&id) {
                    true
                } else {
                    tested_overflow.push(id);
                    false
                };
                if seen {
                    continue;
                }
                if segments_conflict(&self.segments[id], candidate, allowed_shared) {
                    return true;
                }
            }
        }
        false
    }
}

/// Unit-cube keys whose closed cube intersects the segment's closed AABB:
/// key i ranges over [min, max] per axis, so a point with coordinate c is
/// covered by key floor(c) on that axis.
fn bucket_cover(s: &Segment) -> impl Iterator<Item = BucketKey> {
    let lo = [s.a.x.min(s.b.x), s.a.y.min(s.b.y), s.a.z.min(s.b.z)];
    let hi = [s.a.x.max(s.b.x), s.a.y.max(s.b.y), s.a.z.max(s.b.z)];
    (lo[0]..=hi[0]).flat_map(move |i| {
        (lo[1]..=hi[1]).flat_map(move |j| (lo[2]..=hi[2]).map(move |k| (i, j, k)))
    })
}
