//! First-entry random walks: the plain Aldous–Broder process, its
//! edge- and vertex-shortcut accelerations, and the Wilson baseline.
//!
//! All three first-entry variants run through one engine so that a walk
//! with nothing to shortcut consumes the generator step-for-step like
//! the plain walk. The engine simulates verbatim steps inside `S` and
//! inside any component that still has unvisited vertices; on entering
//! a fully covered component it replaces the excursion with a single
//! table draw — the exit edge (keeping first-entry arcs exact) or the
//! exit vertex (leaving a gap to be filled by forest completion).
//!
//! Past the fallback threshold the engine stops shortcutting and
//! finishes as the plain walk, which keeps the sampled tree exact at
//! the cost of speed.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::arborescence::{extract, Arborescence};
use crate::decompose::Decomposition;
use crate::graph::Graph;
use crate::tables::{ExitKind, TableError, TableSet};

/// Sentinel for "no arc recorded".
pub const UNSET: u32 = u32::MAX;

/// Which walk the engine is simulating.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkMode {
    /// Plain first-entry walk.
    Plain,
    /// Covered-component excursions compressed to their exit edge.
    EdgeShortcut,
    /// Covered-component excursions compressed to their exit vertex.
    VertexShortcut,
}

/// First-entry arcs accumulated by a walk. A complete forest (no gaps)
/// is an arborescence toward the root; vertex-shortcut walks leave the
/// arcs of jump targets unknown.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialForest {
    pub root: u32,
    /// `entered_from[v]` is the vertex the walk stood on when it first
    /// visited `v`; `UNSET` for the root and for gap vertices.
    pub entered_from: Vec<u32>,
    /// Vertices first reached by a vertex jump, ascending.
    pub gaps: Vec<u32>,
}

impl PartialForest {
    /// The arc into `v` as `(from, v)`, if recorded.
    pub fn arc(&self, v: u32) -> Option<(u32, u32)> {
        let from = self.entered_from[v as usize];
        if from == UNSET {
            None
        } else {
            Some((from, v))
        }
    }

    pub fn is_complete(&self) -> bool {
        self.gaps.is_empty()
    }
}

/// Transcript accounting for one simulation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub verbatim_steps: u64,
    pub shortcut_jumps: u64,
    /// True once the walk passed the threshold and stopped shortcutting.
    pub fallback: bool,
}

impl StepStats {
    /// Transcript length: verbatim steps plus jumps.
    pub fn transcript_len(&self) -> u64 {
        self.verbatim_steps + self.shortcut_jumps
    }
}

/// Failures during a shortcut simulation.
#[derive(Debug, Clone, PartialEq)]
pub enum WalkError {
    /// A table lookup failed: the tables were built for a different
    /// decomposition than the one being walked.
    Table(TableError),
}

impl fmt::Display for WalkError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WalkError::Table(e) => write!(f, "table mismatch: {e}"),
        }
    }
}

impl From<TableError> for WalkError {
    fn from(e: TableError) -> WalkError {
        WalkError::Table(e)
    }
}

/// Mutable state of one walk simulation.
#[derive(Debug, Clone)]
pub struct WalkState {
    pub mode: WalkMode,
    pub current: u32,
    pub verbatim_steps: u64,
    pub shortcut_jumps: u64,
    pub fallback: bool,
    pub visited: Vec<bool>,
    pub unvisited_total: usize,
    /// Unvisited vertices per decomposition component; empty in plain mode.
    pub comp_unvisited: Vec<u32>,
    pub forest: PartialForest,
}

impl WalkState {
    fn new(g: &Graph, d: Option<&Decomposition>, mode: WalkMode, start: u32) -> WalkState {
        let n = g.vertex_count();
        let mut visited = vec![false; n];
        visited[start as usize] = true;
        let mut comp_unvisited: Vec<u32> = match d {
            Some(d) => (0..d.component_count()).map(|i| d.component(i).len() as u32).collect(),
            None => Vec::new(),
        };
        if let Some(c) = d.and_then(|d| d.component_of(start)) {
            comp_unvisited[c] -= 1;
        }
        WalkState {
            mode,
            current: start,
            verbatim_steps: 0,
            shortcut_jumps: 0,
            fallback: false,
            visited,
            unvisited_total: n - 1,
            comp_unvisited,
            forest: PartialForest { root: start, entered_from: vec![UNSET; n], gaps: Vec::new() },
        }
    }

    /// Total transcript length so far, jumps counting as one step.
    pub fn steps(&self) -> u64 {
        self.verbatim_steps + self.shortcut_jumps
    }

    fn visit_with_arc(&mut self, v: u32, from: u32, d: Option<&Decomposition>) {
        debug_assert!(!self.visited[v as usize]);
        self.visited[v as usize] = true;
        self.unvisited_total -= 1;
        self.forest.entered_from[v as usize] = from;
        if let Some(c) = d.and_then(|d| d.component_of(v)) {
            self.comp_unvisited[c] -= 1;
        }
    }

    fn visit_gap(&mut self, v: u32) {
        debug_assert!(!self.visited[v as usize]);
        self.visited[v as usize] = true;
        self.unvisited_total -= 1;
        self.forest.gaps.push(v);
    }
}

/// Default fallback threshold: `m * n` transcript steps.
pub fn default_fallback_threshold(g: &Graph) -> u64 {
    g.edge_count() as u64 * g.vertex_count() as u64
}

fn run<R: Rng + ?Sized>(
    g: &Graph,
    shortcut: Option<(&Decomposition, &TableSet)>,
    threshold: u64,
    rng: &mut R,
) -> Result<(PartialForest, StepStats), WalkError> {
    if g.vertex_count() == 1 {
        return Ok((
            PartialForest { root: 0, entered_from: vec![UNSET], gaps: Vec::new() },
            StepStats::default(),
        ));
    }
    let start = g.stationary_sample(rng);
    let mode = match shortcut {
        None => WalkMode::Plain,
        Some((_, t)) => match t.kind() {
            ExitKind::Edge => WalkMode::EdgeShortcut,
            ExitKind::Vertex => WalkMode::VertexShortcut,
        },
    };
    let d = shortcut.map(|(d, _)| d);
    let mut st = WalkState::new(g, d, mode, start);
    // The start position counts as a block entry.
    let mut just_entered = d.and_then(|d| d.component_of(start)).is_some();

    while st.unvisited_total > 0 {
        if let Some((d, tables)) = shortcut {
            if !st.fallback && st.steps() >= threshold {
                st.fallback = true;
            }
            if !st.fallback && just_entered {
                let c = d.component_of(st.current).expect("entry implies a component");
                if st.comp_unvisited[c] == 0 {
                    if let Some(table) = tables.table(c) {
                        st.shortcut_jumps += 1;
                        match tables.kind() {
                            ExitKind::Edge => {
                                let e = table.sample_exit(st.current, rng)?;
                                let (x, y) = g.edge_endpoints(e);
                                let (inside, outside) = if d.component_of(x) == Some(c) {
                                    (x, y)
                                } else {
                                    (y, x)
                                };
                                if !st.visited[outside as usize] {
                                    st.visit_with_arc(outside, inside, Some(d));
                                }
                                let landing = d.component_of(outside);
                                just_entered = landing.is_some() && landing != Some(c);
                                st.current = outside;
                            }
                            ExitKind::Vertex => {
                                let u = table.sample_exit(st.current, rng)?;
                                debug_assert!(d.component_of(u).is_none(), "exit vertex lies in S");
                                if !st.visited[u as usize] {
                                    st.visit_gap(u);
                                }
                                just_entered = false;
                                st.current = u;
                            }
                        }
                        continue;
                    }
                }
            }
        }
        let k = rng.gen_range(0..g.degree(st.current));
        let nxt = g.neighbors(st.current)[k];
        st.verbatim_steps += 1;
        if !st.visited[nxt as usize] {
            st.visit_with_arc(nxt, st.current, d);
        }
        just_entered = match d {
            Some(d) => {
                let landing = d.component_of(nxt);
                landing.is_some() && landing != d.component_of(st.current)
            }
            None => false,
        };
        st.current = nxt;
    }

    let stats = StepStats {
        verbatim_steps: st.verbatim_steps,
        shortcut_jumps: st.shortcut_jumps,
        fallback: st.fallback,
    };
    let mut forest = st.forest;
    forest.gaps.sort_unstable();
    Ok((forest, stats))
}

/// Plain first-entry walk from a stationary start; the resulting
/// arborescence's underlying tree is uniform over spanning trees.
pub fn aldous_broder<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> Arborescence {
    aldous_broder_with_stats(g, rng).0
}

/// [`aldous_broder`] plus transcript accounting for benchmarking.
pub fn aldous_broder_with_stats<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> (Arborescence, StepStats) {
    let (forest, stats) = run(g, None, u64::MAX, rng).expect("plain walk touches no tables");
    let a = extract(g, &forest).expect("plain walk leaves no gaps");
    (a, stats)
}

/// Shortcut first-entry walk with the default `m * n` fallback
/// threshold. The walk mode follows the table kind: edge tables run the
/// edge-shortcut walk, vertex tables the vertex-shortcut walk (gaps in
/// the returned forest must then be filled by completion).
pub fn simulate_shortcut<R: Rng + ?Sized>(
    g: &Graph,
    d: &Decomposition,
    tables: &TableSet,
    rng: &mut R,
) -> Result<(PartialForest, StepStats), WalkError> {
    run(g, Some((d, tables)), default_fallback_threshold(g), rng)
}

/// [`simulate_shortcut`] with an explicit fallback threshold, mainly to
/// force the fallback path under test.
pub fn simulate_shortcut_with_threshold<R: Rng + ?Sized>(
    g: &Graph,
    d: &Decomposition,
    tables: &TableSet,
    threshold: u64,
    rng: &mut R,
) -> Result<(PartialForest, StepStats), WalkError> {
    run(g, Some((d, tables)), threshold, rng)
}

/// Wilson's loop-erased walk: an independent uniform spanning tree
/// sampler used as a distribution oracle. Returns sorted edge ids.
pub fn wilson<R: Rng + ?Sized>(g: &Graph, root: u32, rng: &mut R) -> Vec<u32> {
    let n = g.vertex_count();
    assert!((root as usize) < n, "root out of range");
    let mut in_tree = vec![false; n];
    in_tree[root as usize] = true;
    let mut next = vec![UNSET; n];
    let mut edges: Vec<u32> = Vec::with_capacity(n.saturating_sub(1));
    for v0 in 0..n as u32 {
        if in_tree[v0 as usize] {
            continue;
        }
        // Walk to the tree; overwriting `next` erases loops implicitly.
        let mut u = v0;
        while !in_tree[u as usize] {
            let k = rng.gen_range(0..g.degree(u));
            let w = g.neighbors(u)[k];
            next[u as usize] = w;
            u = w;
        }
        let mut u = v0;
        while !in_tree[u as usize] {
            in_tree[u as usize] = true;
            let w = next[u as usize];
            edges.push(g.edge_id_between(u, w).expect("walk follows edges"));
            u = w;
        }
    }
    edges.sort_unstable();
    edges
}

/// Cover-time measurement of the plain walk: steps until every vertex
/// has been visited and, when a decomposition is given, how many of
/// those steps crossed cut edges.
pub fn measure_cover_walk<R: Rng + ?Sized>(
    g: &Graph,
    d: Option<&Decomposition>,
    rng: &mut R,
) -> (u64, u64) {
    if g.vertex_count() == 1 {
        return (0, 0);
    }
    let mut cur = g.stationary_sample(rng);
    let mut visited = vec![false; g.vertex_count()];
    visited[cur as usize] = true;
    let mut left = g.vertex_count() - 1;
    let mut steps = 0u64;
    let mut cut_crossings = 0u64;
    while left > 0 {
        let k = rng.gen_range(0..g.degree(cur));
        let (nxt, e) = g.neighbor_edges(cur).nth(k).expect("degree bounds the slot");
        steps += 1;
        if let Some(d) = d {
            if d.is_cut_edge(e) {
                cut_crossings += 1;
            }
        }
        if !visited[nxt as usize] {
            visited[nxt as usize] = true;
            left -= 1;
        }
        cur = nxt;
    }
    (steps, cut_crossings)
}
