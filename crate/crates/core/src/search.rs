//! Longest-tour search: exhaustive branch-and-bound on small boxes,
//! multi-start Warnsdorf-style heuristic on larger ones.
//!
//! Both searches certify the returned tour with the independent verifier
//! before returning. Exhaustive search reduces the root set to canonical
//! start cells (and, for closed tours, anchors the cycle at its
//! lexicographically least cell) and prunes with an admissible
//! reachability bound.

use crate::crossing_index::CrossingIndex;
use crate::geometry::{segments_conflict, Segment};
use crate::lattice::{canonical_start_cells, knight_moves, Box3, Cell, MoveOffset};
use crate::tour::{self, Tour};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;
use std::sync::atomic::{AtomicBool, AtomicI64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

/// Name of the tie-breaking generator, recorded in output metadata.
pub const GENERATOR_NAME: &str = "ChaCha8Rng";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exhaustive,
    Heuristic,
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub mode: Mode,
    pub closed: bool,
    pub time_limit: Option<Duration>,
    pub seed: u64,
    pub restarts: usize,
    pub beam_width: usize,
    pub threads: usize,
    pub target_length: Option<usize>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            mode: Mode::Heuristic,
            closed: false,
            time_limit: None,
            seed: 0,
            restarts: 64,
            beam_width: 1,
            threads: 1,
            target_length: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Completed,
    TimeLimit,
    TargetReached,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::Completed => "completed",
            StopReason::TimeLimit => "time_limit",
            StopReason::TargetReached => "target_reached",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub best: Tour,
    pub length: usize,
    pub optimal: bool,
    pub nodes_expanded: u64,
    pub restarts_done: usize,
    pub elapsed: Duration,
    pub stopped_by: StopReason,
}

/// Dispatch on `config.mode`.
pub fn solve(bx: &Box3, config: &SearchConfig) -> SearchResult {
    match config.mode {
        Mode::Exhaustive => solve_exhaustive(bx, config),
        Mode::Heuristic => solve_heuristic(bx, config),
    }
}

/// Admissible bound on additional moves from `head`: the number of cells
/// reachable from it through unvisited cells, ignoring crossings
/// (crossings only shrink the feasible set).
pub fn upper_bound(bx: &Box3, visited: &HashSet<Cell>, head: Cell) -> usize {
    let mut bits = vec![false; bx.volume() as usize];
    for &c in visited {
        if bx.contains(c) {
            bits[bx.index_of(c)] = true;
        }
    }
    upper_bound_bits(bx, &bits, head)
}

fn upper_bound_bits(bx: &Box3, visited: &[bool], head: Cell) -> usize {
    let mut seen = vec![false; bx.volume() as usize];
    seen[bx.index_of(head)] = true;
    let mut queue = vec![head];
    let mut count = 0usize;
    while let Some(c) = queue.pop() {
        for n in knight_moves(bx, c) {
            let idx = bx.index_of(n);
            if !seen[idx] && !visited[idx] {
                seen[idx] = true;
                count += 1;
                queue.push(n);
            }
        }
    }
    count
}

/// Shared best across work units: a longer certified tour replaces a
/// shorter one; equal lengths keep the first committed.
struct SharedBest {
    len: AtomicI64,
    tour: Mutex<Option<Tour>>,
}

impl SharedBest {
    fn new() -> Self {
        SharedBest {
            len: AtomicI64::new(-1),
            tour: Mutex::new(None),
        }
    }

    fn best_len(&self) -> i64 {
        self.len.load(Ordering::Relaxed)
    }

    fn offer(&self, len: usize, make: impl FnOnce() -> Tour) {
        if (len as i64) <= self.best_len() {
            return;
        }
        let mut slot = self.tour.lock().unwrap();
        if (len as i64) > self.len.load(Ordering::Relaxed) {
            *slot = Some(make());
            self.len.store(len as i64, Ordering::Relaxed);
        }
    }

    fn into_tour(self) -> Option<Tour> {
        self.tour.into_inner().unwrap()
    }
}

fn is_knight_step(a: Cell, b: Cell) -> bool {
    MoveOffset {
        dx: b.x - a.x,
        dy: b.y - a.y,
        dz: b.z - a.z,
    }
    .is_knight()
}

/// Can the path close back to its start without crossing? Checked
/// pairwise against the path's own segments because the closing segment
/// legitimately shares one point with the first segment and a different
/// one with the last.
fn can_close(path: &[Cell]) -> bool {
    let n = path.len();
    if n < 4 {
        return false;
    }
    let head = path[n - 1];
    let start = path[0];
    if !is_knight_step(head, start) {
        return false;
    }
    let closing = Segment::new(head, start).expect("distinct cells");
    for i in 0..n - 1 {
        let s = Segment::new(path[i], path[i + 1]).expect("distinct cells");
        let allowed = if i == 0 {
            Some(start)
        } else if i == n - 2 {
            Some(head)
        } else {
            None
        };
        if segments_conflict(&s, &closing, allowed) {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------
// Exhaustive search
// ---------------------------------------------------------------------

struct ExhaustiveShared {
    best: SharedBest,
    stop: AtomicBool,
    timed_out: AtomicBool,
    nodes: AtomicI64,
    deadline: Option<Instant>,
    target: Option<usize>,
}

struct ExhaustiveWorker<'a> {
    bx: Box3,
    closed: bool,
    start: Cell,
    path: Vec<Cell>,
    visited: Vec<bool>,
    index: CrossingIndex,
    nodes: u64,
    shared: &'a ExhaustiveShared,
    halted: bool,
}

impl<'a> ExhaustiveWorker<'a> {
    fn new(bx: Box3, closed: bool, start: Cell, shared: &'a ExhaustiveShared) -> Self {
        let mut visited = vec![false; bx.volume() as usize];
        visited[bx.index_of(start)] = true;
        ExhaustiveWorker {
            bx,
            closed,
            start,
            path: vec![start],
            visited,
            index: CrossingIndex::new(bx),
            nodes: 0,
            shared,
            halted: false,
        }
    }

    fn record(&mut self) {
        if self.closed {
            let len = self.path.len();
            if (len as i64) > self.shared.best.best_len() && can_close(&self.path) {
                // cycle orientation canonicalization: second cell below last
                if self.path[1] < self.path[len - 1] {
                    let (bx, cells) = (self.bx, self.path.clone());
                    self.shared.best.offer(len, || Tour::new(bx, cells, true));
                    self.check_target(len);
                }
            }
        } else {
            // unconstrained search: a reentrant tour is also a tour, and
            // closing gains one move over the open path on the same cells
            let open_len = self.path.len() - 1;
            if (open_len as i64) > self.shared.best.best_len() {
                let (bx, cells) = (self.bx, self.path.clone());
                self.shared.best.offer(open_len, || Tour::new(bx, cells, false));
                self.check_target(open_len);
            }
            let closed_len = self.path.len();
            if (closed_len as i64) > self.shared.best.best_len() && can_close(&self.path) {
                let (bx, cells) = (self.bx, self.path.clone());
                self.shared.best.offer(closed_len, || Tour::new(bx, cells, true));
                self.check_target(closed_len);
            }
        }
    }

    fn check_target(&self, len: usize) {
        if let Some(t) = self.shared.target {
            if len >= t {
                self.shared.stop.store(true, Ordering::Relaxed);
            }
        }
    }

    fn dfs(&mut self) {
        self.nodes += 1;
        if self.nodes & 0xFFF == 0 {
            if self.shared.stop.load(Ordering::Relaxed) {
                self.halted = true;
            }
            if let Some(d) = self.shared.deadline {
                if Instant::now() >= d {
                    self.shared.timed_out.store(true, Ordering::Relaxed);
                    self.shared.stop.store(true, Ordering::Relaxed);
                    self.halted = true;
                }
            }
        }
        if self.halted {
            return;
        }

        self.record();

        let head = *self.path.last().unwrap();
        let reach = upper_bound_bits(&self.bx, &self.visited, head);
        // path.len() + reach covers the reentrant outcome; the open
        // outcome is one move shorter, so the bound stays admissible
        let potential = (self.path.len() + reach) as i64;
        if potential <= self.shared.best.best_len() {
            return;
        }

        for next in knight_moves(&self.bx, head) {
            if self.visited[self.bx.index_of(next)] {
                continue;
            }
            // closed cycles are anchored at their lex-least cell
            if self.closed && next < self.start {
                continue;
            }
            let seg = Segment::new(head, next).expect("distinct cells");
            if self.index.conflicts(&seg, Some(head)) {
                continue;
            }
            self.index.insert(seg);
            self.visited[self.bx.index_of(next)] = true;
            self.path.push(next);
            self.dfs();
            self.path.pop();
            self.visited[self.bx.index_of(next)] = false;
            self.index.remove_last();
            if self.halted {
                return;
            }
        }
    }
}

/// Depth-first proof search. `optimal` is true only when the full
/// (symmetry-reduced) space was exhausted without hitting the time limit
/// or an early target stop.
pub fn solve_exhaustive(bx: &Box3, config: &SearchConfig) -> SearchResult {
    assert!(config.mode == Mode::Exhaustive, "config.mode must be exhaustive");
    let t0 = Instant::now();
    let shared = ExhaustiveShared {
        best: SharedBest::new(),
        stop: AtomicBool::new(false),
        timed_out: AtomicBool::new(false),
        nodes: AtomicI64::new(0),
        deadline: config.time_limit.map(|d| t0 + d),
        target: config.target_length,
    };

    let roots = canonical_start_cells(bx);
    // baseline: a single-cell open tour always verifies with length 0
    if !config.closed {
        let c0 = roots[0];
        shared.best.offer(0, || Tour::new(*bx, vec![c0], false));
    }

    // work units: start cell x first move
    let mut units: Vec<(Cell, Cell)> = Vec::new();
    for &root in &roots {
        for next in knight_moves(bx, root) {
            if config.closed && next < root {
                continue;
            }
            units.push((root, next));
        }
    }

    let run_unit = |&(root, first): &(Cell, Cell), shared: &ExhaustiveShared| {
        let mut w = ExhaustiveWorker::new(*bx, config.closed, root, shared);
        let seg = Segment::new(root, first).expect("distinct cells");
        w.index.insert(seg);
        w.visited[bx.index_of(first)] = true;
        w.path.push(first);
        w.dfs();
        shared.nodes.fetch_add(w.nodes as i64, Ordering::Relaxed);
    };

    let threads = config.threads.max(1);
    if threads == 1 {
        for unit in &units {
            if shared.stop.load(Ordering::Relaxed) {
                break;
            }
            run_unit(unit, &shared);
        }
    } else {
        let next_unit = AtomicUsize::new(0);
        std::thread::scope(|scope| {
            for _ in 0..threads {
                scope.spawn(|| loop {
                    if shared.stop.load(Ordering::Relaxed) {
                        break;
                    }
                    let i = next_unit.fetch_add(1, Ordering::Relaxed);
                    if i >= units.len() {
                        break;
                    }
                    run_unit(&units[i], &shared);
                });
            }
        });
    }

    let timed_out = shared.timed_out.load(Ordering::Relaxed);
    let target_hit = shared.stop.load(Ordering::Relaxed) && !timed_out;
    let nodes = shared.nodes.load(Ordering::Relaxed) as u64;
    let best = shared
        .best
        .into_tour()
        .unwrap_or_else(|| Tour::new(*bx, vec![roots[0]], false));
    finish_result(
        best,
        !timed_out && !target_hit,
        nodes,
        0,
        t0.elapsed(),
        if timed_out {
            StopReason::TimeLimit
        } else if target_hit {
            StopReason::TargetReached
        } else {
            StopReason::Completed
        },
    )
}

// ---------------------------------------------------------------------
// Heuristic search
// ---------------------------------------------------------------------

/// One beam state of the constructive search.
#[derive(Clone)]
struct BeamState {
    path: Vec<Cell>,
    visited: Vec<bool>,
    index: CrossingIndex,
}

impl BeamState {
    fn seeded(bx: &Box3, start: Cell) -> Self {
        let mut visited = vec![false; bx.volume() as usize];
        visited[bx.index_of(start)] = true;
        BeamState {
            path: vec![start],
            visited,
            index: CrossingIndex::new(*bx),
        }
    }

    /// Number of legal non-crossing onward moves from `head`, with the
    /// candidate segment already committed in `self.index`.
    fn onward_degree(&self, bx: &Box3, head: Cell) -> usize {
        knight_moves(bx, head)
            .into_iter()
            .filter(|&m| {
                !self.visited[bx.index_of(m)]
                    && !self
                        .index
                        .conflicts(&Segment::new(head, m).expect("distinct"), Some(head))
            })
            .count()
    }
}

struct RestartOutcome {
    best: Option<Tour>,
    nodes: u64,
}

/// One seeded restart: grow up to `beam_width` partial paths, always
/// extending by the Warnsdorf choice (fewest onward continuations),
/// ties broken by the restart's own random stream.
fn run_restart(bx: &Box3, closed: bool, beam_width: usize, rng: &mut ChaCha8Rng) -> RestartOutcome {
    let all_cells: Vec<Cell> = bx.cells().collect();
    let start = all_cells[rng.gen_range(0..all_cells.len())];
    let mut beam = vec![BeamState::seeded(bx, start)];
    let mut nodes = 0u64;
    let mut best: Option<Tour> = None;

    let consider = |state: &BeamState, best: &mut Option<Tour>| {
        let mut offer = |t: Tour| {
            if best.as_ref().map_or(true, |b| t.length() > b.length()) {
                *best = Some(t);
            }
        };
        if !closed {
            offer(Tour::new(*bx, state.path.clone(), false));
        }
        // a closable path yields a reentrant tour, one move longer than
        // the open path on the same cells
        if can_close(&state.path) {
            offer(Tour::new(*bx, state.path.clone(), true));
        }
    };
    consider(&beam[0], &mut best);

    loop {
        // (onward degree, random tiebreak, parent, move)
        let mut candidates: Vec<(usize, u64, usize, Cell)> = Vec::new();
        for (si, state) in beam.iter_mut().enumerate() {
            nodes += 1;
            let head = *state.path.last().unwrap();
            for next in knight_moves(bx, head) {
                if state.visited[bx.index_of(next)] {
                    continue;
                }
                let seg = Segment::new(head, next).expect("distinct cells");
                if state.index.conflicts(&seg, Some(head)) {
                    continue;
                }
                state.index.insert(seg);
                state.visited[bx.index_of(next)] = true;
                let deg = state.onward_degree(bx, next);
                state.visited[bx.index_of(next)] = false;
                state.index.remove_last();
                candidates.push((deg, rng.gen(), si, next));
            }
        }
        if candidates.is_empty() {
            break;
        }
        candidates.sort_unstable();
        candidates.truncate(beam_width.max(1));
        let mut next_beam = Vec::with_capacity(candidates.len());
        for (_, _, si, next) in candidates {
            let mut state = beam[si].clone();
            let head = *state.path.last().unwrap();
            state
                .index
                .insert(Segment::new(head, next).expect("distinct cells"));
            state.visited[bx.index_of(next)] = true;
            state.path.push(next);
            consider(&state, &mut best);
            next_beam.push(state);
        }
        beam = next_beam;
    }

    RestartOutcome { best, nodes }
}

/// Multi-start constructive search. Each restart owns an independent
/// random stream (`set_stream(restart)`), so the per-restart trajectory
/// is reproducible regardless of scheduling; the winner is the longest
/// tour, earliest restart on ties. Never claims optimality.
pub fn solve_heuristic(bx: &Box3, config: &SearchConfig) -> SearchResult {
    assert!(config.mode == Mode::Heuristic, "config.mode must be heuristic");
    assert!(config.restarts >= 1, "restarts must be positive");
    assert!(config.beam_width >= 1, "beam_width must be positive");
    let t0 = Instant::now();
    let deadline = config.time_limit.map(|d| t0 + d);

    // (restart index, tour) — smaller index wins among equal lengths
    let best: Mutex<Option<(usize, Tour)>> = Mutex::new(None);
    let nodes = AtomicI64::new(0);
    let restarts_done = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let timed_out = AtomicBool::new(false);

    let run_one = |r: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(r as u64);
        let outcome = run_restart(bx, config.closed, config.beam_width, &mut rng);
        nodes.fetch_add(outcome.nodes as i64, Ordering::Relaxed);
        restarts_done.fetch_add(1, Ordering::Relaxed);
        if let Some(t) = outcome.best {
            let mut slot = best.lock().unwrap();
            let better = match slot.as_ref() {
                None => true,
                Some((ri, bt)) => {
                    t.length() > bt.length() || (t.length() == bt.length() && r < *ri)
                }
            };
            if better {
                let len = t.length();
                *slot = Some((r, t));
                if config.target_length.map_or(false, |tl| len >= tl) {
                    stop.store(true, Ordering::Relaxed);
                }
            }
        }
        if let Some(d) = deadline {
            if Instant::now() >= d {
                timed_out.store(true, Ordering::Relaxed);
                stop.store(true, Ordering::Relaxed);
            }
        }
    };

    let threads = config.threads.max(1);
    if threads == 1 {
        for r in 0..config.restarts {
            if stop.load(Ordering::Relaxed) {
                break;
            }
            run_one(r);
        }
    } else {
        let next = AtomicUsize::new(0);
        std::thread::scope(|scope| {
            for _ in 0..threads {
                scope.spawn(|| loop {
                    if stop.load(Ordering::Relaxed) {
                        break;
                    }
                    let r = next.fetch_add(1, Ordering::Relaxed);
                    if r >= config.restarts {
                        break;
                    }
                    run_one(r);
                });
            }
        });
    }

    let was_timed_out = timed_out.load(Ordering::Relaxed);
    let target_hit = stop.load(Ordering::Relaxed) && !was_timed_out;
    let best_tour = best
        .into_inner()
        .unwrap()
        .map(|(_, t)| t)
        // closed search may find no cycle at all; fall back to a trivial
        // certified open tour so the result contract still holds
        .unwrap_or_else(|| Tour::new(*bx, vec![Cell::new(0, 0, 0)], false));
    finish_result(
        best_tour,
        false,
        nodes.load(Ordering::Relaxed) as u64,
        restarts_done.load(Ordering::Relaxed),
        t0.elapsed(),
        if was_timed_out {
            StopReason::TimeLimit
        } else if target_hit {
            StopReason::TargetReached
        } else {
            StopReason::Completed
        },
    )
}

fn finish_result(
    best: Tour,
    optimal: bool,
    nodes_expanded: u64,
    restarts_done: usize,
    elapsed: Duration,
    stopped_by: StopReason,
) -> SearchResult {
    let report = tour::verify(&best);
    assert!(report.ok, "search produced an uncertified tour: {report}");
    SearchResult {
        length: best.length(),
        best,
        optimal,
        nodes_expanded,
        restarts_done,
        elapsed,
        stopped_by,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exhaustive_cfg(closed: bool) -> SearchConfig {
        SearchConfig {
            mode: Mode::Exhaustive,
            closed,
            ..SearchConfig::default()
        }
    }

    #[test]
    fn open_optimum_2x2x3_is_4() {
        let r = solve_exhaustive(&Box3::new(2, 2, 3), &exhaustive_cfg(false));
        assert_eq!(r.length, 4);
        assert!(r.optimal);
        assert_eq!(r.stopped_by, StopReason::Completed);
    }

    #[test]
    fn closed_optimum_2x2x3_is_4() {
        let r = solve_exhaustive(&Box3::new(2, 2, 3), &exhaustive_cfg(true));
        assert_eq!(r.length, 4);
        assert!(r.optimal);
        assert!(r.best.closed);
    }

    #[test]
    fn open_optimum_1x2x3_is_1() {
        let r = solve_exhaustive(&Box3::new(1, 2, 3), &exhaustive_cfg(false));
        assert_eq!(r.length, 1);
        assert!(r.optimal);
    }

    #[test]
    fn open_optimum_2x2x2_is_0() {
        let r = solve_exhaustive(&Box3::new(2, 2, 2), &exhaustive_cfg(false));
        assert_eq!(r.length, 0);
        assert!(r.optimal);
    }

    #[test]
    fn closed_2x3x3_reaches_8() {
        let r = solve_exhaustive(&Box3::new(2, 3, 3), &exhaustive_cfg(true));
        assert_eq!(r.length, 8);
        assert!(r.optimal);
        assert!(r.best.closed);
    }

    #[test]
    fn upper_bound_examples() {
        let bx = Box3::new(2, 2, 2);
        assert_eq!(upper_bound(&bx, &HashSet::new(), Cell::new(0, 0, 0)), 0);
        let bx = Box3::new(2, 2, 3);
        assert_eq!(upper_bound(&bx, &HashSet::new(), Cell::new(0, 0, 0)), 3);
    }

    #[test]
    fn heuristic_2x2x2_returns_zero() {
        let cfg = SearchConfig {
            restarts: 4,
            ..SearchConfig::default()
        };
        let r = solve_heuristic(&Box3::new(2, 2, 2), &cfg);
        assert_eq!(r.length, 0);
        assert!(!r.optimal);
    }

    #[test]
    fn heuristic_2x2x3_reaches_4() {
        let cfg = SearchConfig {
            restarts: 16,
            seed: 123,
            ..SearchConfig::default()
        };
        let r = solve_heuristic(&Box3::new(2, 2, 3), &cfg);
        assert_eq!(r.length, 4);
    }

    #[test]
    fn heuristic_is_deterministic_single_thread() {
        let cfg = SearchConfig {
            restarts: 8,
            seed: 42,
            beam_width: 2,
            ..SearchConfig::default()
        };
        let bx = Box3::new(3, 3, 3);
        let a = solve_heuristic(&bx, &cfg);
        let b = solve_heuristic(&bx, &cfg);
        assert_eq!(a.best, b.best);
        assert_eq!(a.nodes_expanded, b.nodes_expanded);
    }

    #[test]
    fn target_stops_early() {
        let cfg = SearchConfig {
            mode: Mode::Exhaustive,
            target_length: Some(1),
            ..exhaustive_cfg(false)
        };
        let r = solve_exhaustive(&Box3::new(2, 2, 3), &cfg);
        assert!(r.length >= 1);
        assert!(!r.optimal);
        assert_eq!(r.stopped_by, StopReason::TargetReached);
    }

    #[test]
    fn time_limit_returns_best_so_far() {
        let cfg = SearchConfig {
            mode: Mode::Exhaustive,
            time_limit: Some(Duration::from_millis(0)),
            ..exhaustive_cfg(false)
        };
        let r = solve_exhaustive(&Box3::new(3, 3, 4), &cfg);
        assert!(!r.optimal);
        assert_eq!(r.stopped_by, StopReason::TimeLimit);
    }

    #[test]
    fn parallel_exhaustive_agrees_with_sequential() {
        let bx = Box3::new(2, 3, 3);
        let seq = solve_exhaustive(&bx, &exhaustive_cfg(false));
        let par = solve_exhaustive(
            &bx,
            &SearchConfig {
                threads: 4,
                ..exhaustive_cfg(false)
            },
        );
        assert_eq!(seq.length, par.length);
    }
}
