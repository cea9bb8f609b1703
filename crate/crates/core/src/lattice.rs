//! Boxes, cells, 3D knight moves and box symmetries.
//!
//! A knight step in 3D is any signed permutation of (0, 1, 2); there are
//! 24 of them. Box symmetries (axis permutations that respect extents,
//! times per-axis reflections) are used to deduplicate search roots.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Axis-aligned box of unit cells, extents `nx x ny x nz`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Box3 {
    pub nx: i64,
    pub ny: i64,
    pub nz: i64,
}

impl Box3 {
    pub fn new(nx: i64, ny: i64, nz: i64) -> Self {
        assert!(nx >= 1 && ny >= 1 && nz >= 1, "box extents must be >= 1");
        Box3 { nx, ny, nz }
    }

    pub fn volume(&self) -> i64 {
        self.nx * self.ny * self.nz
    }

    pub fn extent(&self, axis: usize) -> i64 {
        match axis {
            0 => self.nx,
            1 => self.ny,
            2 => self.nz,
            _ => panic!("axis out of range"),
        }
    }

    pub fn contains(&self, c: Cell) -> bool {
        (0..self.nx).contains(&c.x) && (0..self.ny).contains(&c.y) && (0..self.nz).contains(&c.z)
    }

    /// All cells in lexicographic (x, y, z) order.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        let (nx, ny, nz) = (self.nx, self.ny, self.nz);
        (0..nx).flat_map(move |x| {
            (0..ny).flat_map(move |y| (0..nz).map(move |z| Cell::new(x, y, z)))
        })
    }

    /// Extents sorted ascending; shape identity for record lookup.
    pub fn sorted_dims(&self) -> [i64; 3] {
        let mut d = [self.nx, self.ny, self.nz];
        d.sort_unstable();
        d
    }

    /// Dense index of a cell, row-major in (x, y, z).
    pub fn index_of(&self, c: Cell) -> usize {
        debug_assert!(self.contains(c));
        ((c.x * self.ny + c.y) * self.nz + c.z) as usize
    }
}

impl fmt::Display for Box3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.nx, self.ny, self.nz)
    }
}

/// Lattice point at a cell center (unit spacing, zero-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub x: i64,
    pub y: i64,
    pub z: i64,
}

impl Cell {
    pub fn new(x: i64, y: i64, z: i64) -> Self {
        Cell { x, y, z }
    }

    pub fn coord(&self, axis: usize) -> i64 {
        match axis {
            0 => self.x,
            1 => self.y,
            2 => self.z,
            _ => panic!("axis out of range"),
        }
    }

    pub fn offset_by(&self, o: MoveOffset) -> Cell {
        Cell::new(self.x + o.dx, self.y + o.dy, self.z + o.dz)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.x, self.y, self.z)
    }
}

/// Knight move delta: component magnitudes are a permutation of {0, 1, 2}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MoveOffset {
    pub dx: i64,
    pub dy: i64,
    pub dz: i64,
}

impl MoveOffset {
    pub fn is_knight(&self) -> bool {
        let mut m = [self.dx.abs(), self.dy.abs(), self.dz.abs()];
        m.sort_unstable();
        m == [0, 1, 2]
    }
}

/// The 24 knight offsets in lexicographic (dx, dy, dz) order.
pub fn knight_offsets() -> &'static [MoveOffset; 24] {
    static OFFSETS: std::sync::OnceLock<[MoveOffset; 24]> = std::sync::OnceLock::new();
    OFFSETS.get_or_init(|| {
        let mut v = Vec::with_capacity(24);
        for dx in -2i64..=2 {
            for dy in -2i64..=2 {
                for dz in -2i64..=2 {
                    let o = MoveOffset { dx, dy, dz };
                    if o.is_knight() {
                        v.push(o);
                    }
                }
            }
        }
        v.sort_unstable();
        v.try_into().expect("exactly 24 knight offsets")
    })
}

/// Legal knight destinations from `from`, in canonical offset order.
///
/// Panics if `from` lies outside the box (contract violation).
pub fn knight_moves(bx: &Box3, from: Cell) -> Vec<Cell> {
    assert!(bx.contains(from), "knight_moves: from-cell {from} outside box {bx}");
    knight_offsets()
        .iter()
        .map(|&o| from.offset_by(o))
        .filter(|&c| bx.contains(c))
        .collect()
}

/// Box self-map: output coordinate `i` is taken from input axis `perm[i]`,
/// reflected when `flip[i]` is set. Valid only when extents agree:
/// `extent(i) == extent(perm[i])`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoxTransform {
    pub perm: [usize; 3],
    pub flip: [bool; 3],
}

impl BoxTransform {
    pub const IDENTITY: BoxTransform = BoxTransform {
        perm: [0, 1, 2],
        flip: [false, false, false],
    };

    pub fn apply(&self, bx: &Box3, c: Cell) -> Cell {
        let mut out = [0i64; 3];
        for i in 0..3 {
            let v = c.coord(self.perm[i]);
            out[i] = if self.flip[i] {
                bx.extent(self.perm[i]) - 1 - v
            } else {
                v
            };
        }
        Cell::new(out[0], out[1], out[2])
    }

    /// `self` after `first`: returns the transform equal to applying
    /// `first`, then `self`.
    pub fn compose(&self, first: &BoxTransform) -> BoxTransform {
        let mut perm = [0usize; 3];
        let mut flip = [false; 3];
        for i in 0..3 {
            perm[i] = first.perm[self.perm[i]];
            flip[i] = self.flip[i] ^ first.flip[self.perm[i]];
        }
        BoxTransform { perm, flip }
    }
}

/// All symmetries of the box: axis permutations preserving extents,
/// combined with the 8 reflection patterns. Contains the identity.
pub fn symmetries(bx: &Box3) -> Vec<BoxTransform> {
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut out = Vec::new();
    for perm in PERMS {
        if (0..3).any(|i| bx.extent(i) != bx.extent(perm[i])) {
            continue;
        }
        for bits in 0..8u8 {
            let flip = [bits & 1 != 0, bits & 2 != 0, bits & 4 != 0];
            out.push(BoxTransform { perm, flip });
        }
    }
    out
}

/// One representative cell per orbit under `symmetries(box)`:
/// the lexicographically least member. Sorted output.
pub fn canonical_start_cells(bx: &Box3) -> Vec<Cell> {
    let syms = symmetries(bx);
    let mut reps = Vec::new();
    for c in bx.cells() {
        let rep = syms.iter().map(|t| t.apply(bx, c)).min().unwrap();
        if rep == c {
            reps.push(c);
        }
    }
    reps.sort_unstable();
    reps
}

/// Orbit size of each canonical representative, in the same order as
/// `canonical_start_cells`.
pub fn orbit_sizes(bx: &Box3) -> Vec<(Cell, usize)> {
    let syms = symmetries(bx);
    canonical_start_cells(bx)
        .into_iter()
        .map(|rep| {
            let mut orbit: Vec<Cell> = syms.iter().map(|t| t.apply(bx, rep)).collect();
            orbit.sort_unstable();
            orbit.dedup();
            (rep, orbit.len())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn offsets_are_24_signed_permutations() {
        let offs = knight_offsets();
        assert_eq!(offs.len(), 24);
        for o in offs {
            assert!(o.is_knight());
        }
        assert!(offs.contains(&MoveOffset { dx: 0, dy: 1, dz: 2 }));
        assert!(offs.contains(&MoveOffset { dx: 2, dy: -1, dz: 0 }));
        assert!(!offs.iter().any(|o| o.dx.abs() == 1 && o.dy.abs() == 1));
        // closed under negation
        let set: HashSet<_> = offs.iter().copied().collect();
        for o in offs {
            assert!(set.contains(&MoveOffset { dx: -o.dx, dy: -o.dy, dz: -o.dz }));
        }
        let mut sorted = offs.to_vec();
        sorted.sort_unstable();
        assert_eq!(&sorted[..], &offs[..], "canonical order is lexicographic");
    }

    #[test]
    fn moves_from_center_of_5x5x5() {
        let bx = Box3::new(5, 5, 5);
        assert_eq!(knight_moves(&bx, Cell::new(2, 2, 2)).len(), 24);
    }

    #[test]
    fn moves_from_corner_of_2x2x3() {
        let bx = Box3::new(2, 2, 3);
        let got = knight_moves(&bx, Cell::new(0, 0, 0));
        let want = vec![Cell::new(0, 1, 2), Cell::new(1, 0, 2)];
        let got_set: HashSet<_> = got.iter().copied().collect();
        assert_eq!(got_set, want.into_iter().collect());
    }

    #[test]
    fn no_moves_in_2x2x2() {
        let bx = Box3::new(2, 2, 2);
        for c in bx.cells() {
            assert!(knight_moves(&bx, c).is_empty());
        }
    }

    #[test]
    #[should_panic]
    fn out_of_box_from_cell_rejected() {
        knight_moves(&Box3::new(2, 2, 2), Cell::new(5, 0, 0));
    }

    #[test]
    fn move_symmetry() {
        let bx = Box3::new(3, 4, 5);
        for c in bx.cells() {
            for d in knight_moves(&bx, c) {
                assert!(knight_moves(&bx, d).contains(&c));
            }
        }
    }

    #[test]
    fn symmetry_counts() {
        assert_eq!(symmetries(&Box3::new(4, 4, 4)).len(), 48);
        assert_eq!(symmetries(&Box3::new(2, 3, 4)).len(), 8);
        assert_eq!(symmetries(&Box3::new(3, 3, 4)).len(), 16);
    }

    #[test]
    fn symmetries_map_box_onto_itself_and_close() {
        for bx in [Box3::new(3, 3, 3), Box3::new(2, 3, 4), Box3::new(3, 3, 4)] {
            let syms = symmetries(&bx);
            assert!(syms.contains(&BoxTransform::IDENTITY));
            for t in &syms {
                for c in bx.cells() {
                    assert!(bx.contains(t.apply(&bx, c)));
                }
            }
            // closure under composition
            for a in &syms {
                for b in &syms {
                    let ab = a.compose(b);
                    assert!(syms.contains(&ab), "composition must stay in the group");
                    // composition agrees with sequential application
                    let c = Cell::new(
                        bx.nx.min(2) - 1,
                        bx.ny.min(2) - 1,
                        bx.nz.min(3) - 1,
                    );
                    assert_eq!(ab.apply(&bx, c), a.apply(&bx, b.apply(&bx, c)));
                }
            }
        }
    }

    #[test]
    fn canonical_cells_small_boxes() {
        assert_eq!(canonical_start_cells(&Box3::new(2, 2, 2)).len(), 1);
        assert_eq!(canonical_start_cells(&Box3::new(1, 1, 1)).len(), 1);
        // 3x3x3: corner, edge-center, face-center, body-center
        assert_eq!(canonical_start_cells(&Box3::new(3, 3, 3)).len(), 4);
    }

    #[test]
    fn orbits_partition_box() {
        for bx in [
            Box3::new(2, 2, 3),
            Box3::new(3, 3, 3),
            Box3::new(2, 3, 4),
            Box3::new(3, 3, 4),
        ] {
            let total: usize = orbit_sizes(&bx).iter().map(|(_, n)| n).sum();
            assert_eq!(total as i64, bx.volume());
        }
    }
}
