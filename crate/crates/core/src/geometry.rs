//! Exact classification of how two 3D lattice segments meet.
//!
//! All decisions use integer and rational arithmetic only; there is no
//! floating point anywhere on the decision path. Segments are closed, so
//! endpoint contact counts as a `Point` intersection. Input coordinates
//! must satisfy |c| <= 2^15 so every intermediate product fits in i128.

use crate::lattice::Cell;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Coordinate magnitude bound keeping all intermediates exact in i128.
pub const COORD_BOUND: i64 = 1 << 15;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeometryError {
    #[error("zero-length segment at {0}")]
    ZeroLengthSegment(Cell),
    #[error("coordinate {0} exceeds bound {COORD_BOUND}")]
    CoordinateOutOfBounds(i64),
}

/// Straight segment between two distinct lattice points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Segment {
    pub a: Cell,
    pub b: Cell,
}

impl Segment {
    pub fn new(a: Cell, b: Cell) -> Result<Self, GeometryError> {
        if a == b {
            return Err(GeometryError::ZeroLengthSegment(a));
        }
        for v in [a.x, a.y, a.z, b.x, b.y, b.z] {
            if v.abs() > COORD_BOUND {
                return Err(GeometryError::CoordinateOutOfBounds(v));
            }
        }
        Ok(Segment { a, b })
    }

    pub fn endpoints(&self) -> [Cell; 2] {
        [self.a, self.b]
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.a, self.b)
    }
}

/// Exact rational, reduced, denominator > 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rational {
    pub num: i128,
    pub den: i128,
}

impl Rational {
    pub fn new(num: i128, den: i128) -> Self {
        assert!(den != 0, "rational with zero denominator");
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()) as i128;
        let sign = if den < 0 { -1 } else { 1 };
        Rational {
            num: sign * num / g,
            den: sign * den / g,
        }
    }

    pub fn from_int(v: i128) -> Self {
        Rational { num: v, den: 1 }
    }

    pub fn as_integer(&self) -> Option<i128> {
        (self.den == 1).then_some(self.num)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    if a == 0 && b == 0 {
        return 1;
    }
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

/// Rational point in 3-space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalPoint {
    pub x: Rational,
    pub y: Rational,
    pub z: Rational,
}

impl RationalPoint {
    pub fn from_cell(c: Cell) -> Self {
        RationalPoint {
            x: Rational::from_int(c.x as i128),
            y: Rational::from_int(c.y as i128),
            z: Rational::from_int(c.z as i128),
        }
    }

    pub fn as_cell(&self) -> Option<Cell> {
        Some(Cell::new(
            i64::try_from(self.x.as_integer()?).ok()?,
            i64::try_from(self.y.as_integer()?).ok()?,
            i64::try_from(self.z.as_integer()?).ok()?,
        ))
    }
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.x, self.y, self.z)
    }
}

/// How two closed segments meet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntersectionKind {
    Disjoint,
    Point(RationalPoint),
    Overlap,
}

type V3 = [i128; 3];

fn sub(p: Cell, q: Cell) -> V3 {
    [
        (p.x - q.x) as i128,
        (p.y - q.y) as i128,
        (p.z - q.z) as i128,
    ]
}

fn cross(u: V3, v: V3) -> V3 {
    [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]
}

fn dot(u: V3, v: V3) -> i128 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

fn is_zero(v: V3) -> bool {
    v == [0, 0, 0]
}

/// Classify the intersection of two closed segments exactly.
///
/// Skew pairs are detected by the scalar triple product; coplanar
/// non-parallel pairs by an integer cross-product parameter solve;
/// collinear pairs by integer interval overlap.
pub fn classify_intersection(s: &Segment, t: &Segment) -> IntersectionKind {
    let u = sub(s.b, s.a); // direction of s
    let v = sub(t.b, t.a); // direction of t
    let w = sub(t.a, s.a); // offset between anchors

    let n = cross(u, v);
    if !is_zero(n) {
        // Lines are non-parallel; skew unless the triple product vanishes.
        if dot(n, w) != 0 {
            return IntersectionKind::Disjoint;
        }
        // Coplanar, non-parallel: solve a + p*u = c + q*v with
        // p = ((w x v) . n) / |n|^2, q = ((w x u) . n) / |n|^2.
        let den = dot(n, n);
        let p_num = dot(cross(w, v), n);
        let q_num = dot(cross(w, u), n);
        if p_num < 0 || p_num > den || q_num < 0 || q_num > den {
            return IntersectionKind::Disjoint;
        }
        let coord = |anchor: i64, dir: i128| {
            Rational::new(anchor as i128 * den + p_num * dir, den)
        };
        return IntersectionKind::Point(RationalPoint {
            x: coord(s.a.x, u[0]),
            y: coord(s.a.y, u[1]),
            z: coord(s.a.z, u[2]),
        });
    }

    // Parallel directions. Distinct parallel lines cannot meet.
    if !is_zero(cross(u, w)) {
        return IntersectionKind::Disjoint;
    }

    // Collinear: compare parameter intervals along u (dot products with u
    // order points on the common line monotonically).
    let proj = |c: Cell| dot(sub(c, s.a), u);
    let (s_lo, s_hi) = (0, dot(u, u)); // projections of s.a, s.b
    let (mut t_lo, mut t_hi) = (proj(t.a), proj(t.b));
    if t_lo > t_hi {
        std::mem::swap(&mut t_lo, &mut t_hi);
    }
    let lo = s_lo.max(t_lo);
    let hi = s_hi.min(t_hi);
    if lo > hi {
        IntersectionKind::Disjoint
    } else if lo == hi {
        // Single shared point; it is an endpoint of one of the segments.
        let p = [s.a, s.b, t.a, t.b]
            .into_iter()
            .find(|&c| proj(c) == lo)
            .expect("touch point must be an endpoint");
        IntersectionKind::Point(RationalPoint::from_cell(p))
    } else {
        IntersectionKind::Overlap
    }
}

/// True iff `s` and `t` share any point other than exactly the single
/// point `allowed_shared` (the joint of consecutive tour segments).
pub fn segments_conflict(s: &Segment, t: &Segment, allowed_shared: Option<Cell>) -> bool {
    match classify_intersection(s, t) {
        IntersectionKind::Disjoint => false,
        IntersectionKind::Overlap => true,
        IntersectionKind::Point(p) => match allowed_shared {
            Some(joint) => p.as_cell() != Some(joint),
            None => true,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::knight_offsets;

    fn seg(a: (i64, i64, i64), b: (i64, i64, i64)) -> Segment {
        Segment::new(Cell::new(a.0, a.1, a.2), Cell::new(b.0, b.1, b.2)).unwrap()
    }

    fn rat(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn crossing_knight_segments_meet_at_half_point() {
        let k = classify_intersection(&seg((0, 0, 0), (1, 2, 0)), &seg((1, 0, 0), (0, 2, 0)));
        assert_eq!(
            k,
            IntersectionKind::Point(RationalPoint {
                x: rat(1, 2),
                y: rat(1, 1),
                z: rat(0, 1),
            })
        );
    }

    #[test]
    fn skew_segments_are_disjoint() {
        let k = classify_intersection(&seg((0, 0, 0), (0, 1, 2)), &seg((1, 1, 1), (2, 1, 3)));
        assert_eq!(k, IntersectionKind::Disjoint);
    }

    #[test]
    fn collinear_overlap() {
        let k = classify_intersection(&seg((0, 0, 0), (2, 4, 0)), &seg((1, 2, 0), (3, 6, 0)));
        assert_eq!(k, IntersectionKind::Overlap);
    }

    #[test]
    fn collinear_endpoint_touch_is_a_point() {
        let k = classify_intersection(&seg((0, 0, 0), (1, 2, 0)), &seg((1, 2, 0), (2, 4, 0)));
        assert_eq!(
            k,
            IntersectionKind::Point(RationalPoint::from_cell(Cell::new(1, 2, 0)))
        );
    }

    #[test]
    fn zero_length_segment_rejected() {
        let c = Cell::new(1, 1, 1);
        assert_eq!(
            Segment::new(c, c),
            Err(GeometryError::ZeroLengthSegment(c))
        );
    }

    #[test]
    fn conflict_respects_allowed_joint() {
        let s = seg((0, 0, 0), (1, 2, 0));
        assert!(!segments_conflict(
            &s,
            &seg((1, 2, 0), (2, 0, 0)),
            Some(Cell::new(1, 2, 0))
        ));
        assert!(segments_conflict(&s, &seg((1, 0, 0), (0, 2, 0)), None));
        assert!(!segments_conflict(&s, &seg((0, 0, 1), (1, 2, 1)), None));
    }

    #[test]
    fn endpoint_touch_without_permission_conflicts() {
        let s = seg((0, 0, 0), (1, 2, 0));
        let t = seg((1, 2, 0), (2, 0, 0));
        assert!(segments_conflict(&s, &t, None));
        // permission for a different point does not help
        assert!(segments_conflict(&s, &t, Some(Cell::new(0, 0, 0))));
    }

    #[test]
    fn classification_is_symmetric_and_orientation_free() {
        let pairs = [
            (seg((0, 0, 0), (1, 2, 0)), seg((1, 0, 0), (0, 2, 0))),
            (seg((0, 0, 0), (0, 1, 2)), seg((1, 1, 1), (2, 1, 3))),
            (seg((0, 0, 0), (2, 4, 0)), seg((1, 2, 0), (3, 6, 0))),
        ];
        for (s, t) in pairs {
            let base = classify_intersection(&s, &t);
            assert_eq!(classify_intersection(&t, &s), base);
            let s_rev = Segment::new(s.b, s.a).unwrap();
            let t_rev = Segment::new(t.b, t.a).unwrap();
            assert_eq!(classify_intersection(&s_rev, &t), base);
            assert_eq!(classify_intersection(&s_rev, &t_rev), base);
        }
    }

    #[test]
    fn knight_segment_interior_has_no_lattice_point() {
        // gcd of the nonzero components of every knight offset is 1, so the
        // open segment contains no lattice point.
        for o in knight_offsets() {
            let g = [o.dx, o.dy, o.dz]
                .into_iter()
                .filter(|&v| v != 0)
                .fold(0i64, |acc, v| {
                    let mut a = acc.unsigned_abs();
                    let mut b = v.unsigned_abs();
                    while b != 0 {
                        let t = a % b;
                        a = b;
                        b = t;
                    }
                    a as i64
                });
            assert_eq!(g, 1, "offset {o:?}");
        }
    }

    #[test]
    fn parallel_non_collinear_disjoint() {
        let k = classify_intersection(&seg((0, 0, 0), (1, 2, 0)), &seg((5, 0, 0), (6, 2, 0)));
        assert_eq!(k, IntersectionKind::Disjoint);
    }

    #[test]
    fn coplanar_nonparallel_miss() {
        // coplanar lines cross outside both parameter ranges
        let k = classify_intersection(&seg((0, 0, 0), (1, 2, 0)), &seg((5, 0, 0), (4, 2, 0)));
        assert_eq!(k, IntersectionKind::Disjoint);
    }
}
