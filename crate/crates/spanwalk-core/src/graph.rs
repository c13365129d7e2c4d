//! Undirected simple graphs in compressed adjacency form.
//!
//! Vertices are dense ids `0..n`. Edges carry canonical ids: the edge list
//! is sorted lexicographically as `(u, v)` pairs with `u < v` and an edge's
//! id is its position in that list. Loaders reject self loops, duplicate
//! edges and disconnected inputs, each with a distinct diagnostic.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

/// Validation and parse failures for graph construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    /// A line of edge-list text could not be tokenized into two labels.
    Parse { line: usize, reason: String },
    /// An edge joins a vertex to itself.
    SelfLoop { line: Option<usize>, label: u64 },
    /// The same undirected pair appears twice.
    DuplicateEdge { line: Option<usize>, u: u64, v: u64 },
    /// A vertex label is outside the declared id range.
    VertexOutOfRange { label: u64, bound: u64 },
    /// The graph has no vertices.
    Empty,
    /// Some vertex is unreachable from vertex 0.
    Disconnected { unreachable: u32 },
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::Parse { line, reason } => {
                write!(f, "parse error on line {line}: {reason}")
            }
            GraphError::SelfLoop { line: Some(line), label } => {
                write!(f, "self loop at vertex {label} on line {line}")
            }
            GraphError::SelfLoop { line: None, label } => {
                write!(f, "self loop at vertex {label}")
            }
            GraphError::DuplicateEdge { line: Some(line), u, v } => {
                write!(f, "duplicate edge {u} {v} on line {line}")
            }
            GraphError::DuplicateEdge { line: None, u, v } => {
                write!(f, "duplicate edge {u} {v}")
            }
            GraphError::VertexOutOfRange { label, bound } => {
                write!(f, "vertex {label} out of range (expected < {bound})")
            }
            GraphError::Empty => write!(f, "graph has no vertices"),
            GraphError::Disconnected { unreachable } => {
                write!(f, "graph is disconnected: vertex {unreachable} unreachable from 0")
            }
        }
    }
}

/// Connected undirected simple graph with canonical vertex and edge ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    row_ptr: Vec<u32>,
    neighbors: Vec<u32>,
    /// Canonical edge id for each adjacency slot, parallel to `neighbors`.
    slot_edge: Vec<u32>,
    /// Canonical edge list, sorted, `u < v`; index is the edge id.
    edges: Vec<(u32, u32)>,
}

impl Graph {
    /// Builds a graph over vertex ids `0..n` from an undirected edge list.
    ///
    /// Pairs may appear in either orientation. Rejects out-of-range ids,
    /// self loops, duplicate pairs and disconnected results.
    pub fn from_edge_list(n: u32, pairs: &[(u32, u32)]) -> Result<Graph, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut canonical = Vec::with_capacity(pairs.len());
        let mut seen = BTreeSet::new();
        for &(a, b) in pairs {
            for x in [a, b] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange { label: x as u64, bound: n as u64 });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop { line: None, label: a as u64 });
            }
            let e = (a.min(b), a.max(b));
            if !seen.insert(e) {
                return Err(GraphError::DuplicateEdge { line: None, u: a as u64, v: b as u64 });
            }
            canonical.push(e);
        }
        canonical.sort_unstable();
        Graph::build(n, canonical)
    }

    /// Parses whitespace-separated `u v` lines; `#` starts a comment.
    ///
    /// Input labels are arbitrary non-negative integers and are mapped to
    /// canonical ids `0..n` in order of first appearance.
    pub fn parse(text: &str) -> Result<Graph, GraphError> {
        let mut ids: BTreeMap<u64, u32> = BTreeMap::new();
        let mut order = 0u32;
        let mut intern = |label: u64| -> u32 {
            *ids.entry(label).or_insert_with(|| {
                let id = order;
                order += 1;
                id
            })
        };
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        let mut seen: BTreeSet<(u32, u32)> = BTreeSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let mut tokens = body.split_whitespace();
            let take = |tokens: &mut core::str::SplitWhitespace<'_>| -> Result<u64, GraphError> {
                let tok = tokens.next().ok_or_else(|| GraphError::Parse {
                    line,
                    reason: String::from("expected two vertex labels"),
                })?;
                tok.parse::<u64>().map_err(|_| GraphError::Parse {
                    line,
                    reason: alloc::format!("invalid vertex label {tok:?}"),
                })
            };
            let u = take(&mut tokens)?;
            let v = take(&mut tokens)?;
            if tokens.next().is_some() {
                return Err(GraphError::Parse {
                    line,
                    reason: String::from("expected exactly two vertex labels"),
                });
            }
            if u == v {
                return Err(GraphError::SelfLoop { line: Some(line), label: u });
            }
            let ui = intern(u);
            let vi = intern(v);
            let e = (ui.min(vi), ui.max(vi));
            if !seen.insert(e) {
                return Err(GraphError::DuplicateEdge { line: Some(line), u, v });
            }
            pairs.push(e);
        }
        if pairs.is_empty() {
            return Err(GraphError::Empty);
        }
        pairs.sort_unstable();
        Graph::build(order, pairs)
    }

    /// `canonical` must be sorted, deduplicated, loop-free and in range.
    fn build(n: u32, canonical: Vec<(u32, u32)>) -> Result<Graph, GraphError> {
        let mut adj: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n as usize];
        for (id, &(u, v)) in canonical.iter().enumerate() {
            adj[u as usize].push((v, id as u32));
            adj[v as usize].push((u, id as u32));
        }
        let mut row_ptr = Vec::with_capacity(n as usize + 1);
        let mut neighbors = Vec::with_capacity(2 * canonical.len());
        let mut slot_edge = Vec::with_capacity(2 * canonical.len());
        row_ptr.push(0u32);
        for row in &mut adj {
            row.sort_unstable();
            for &(nbr, eid) in row.iter() {
                neighbors.push(nbr);
                slot_edge.push(eid);
            }
            row_ptr.push(neighbors.len() as u32);
        }
        let g = Graph { row_ptr, neighbors, slot_edge, edges: canonical };
        if let Some(v) = g.first_unreachable() {
            return Err(GraphError::Disconnected { unreachable: v });
        }
        Ok(g)
    }

    fn first_unreachable(&self) -> Option<u32> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut queue = vec![0u32];
        seen[0] = true;
        while let Some(v) = queue.pop() {
            for &w in self.neighbors(v) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    queue.push(w);
                }
            }
        }
        seen.iter().position(|&s| !s).map(|v| v as u32)
    }

    pub fn vertex_count(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, v: u32) -> usize {
        (self.row_ptr[v as usize + 1] - self.row_ptr[v as usize]) as usize
    }

    /// Neighbor ids of `v` in ascending order.
    pub fn neighbors(&self, v: u32) -> &[u32] {
        let lo = self.row_ptr[v as usize] as usize;
        let hi = self.row_ptr[v as usize + 1] as usize;
        &self.neighbors[lo..hi]
    }

    /// `(neighbor, edge id)` pairs for `v`, ascending by neighbor.
    pub fn neighbor_edges(&self, v: u32) -> impl Iterator<Item = (u32, u32)> + '_ {
        let lo = self.row_ptr[v as usize] as usize;
        let hi = self.row_ptr[v as usize + 1] as usize;
        self.neighbors[lo..hi].iter().copied().zip(self.slot_edge[lo..hi].iter().copied())
    }

    /// Canonical edge list; the index of a pair is its edge id.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn edge_endpoints(&self, e: u32) -> (u32, u32) {
        self.edges[e as usize]
    }

    /// Canonical id of the edge between `u` and `v`, if present.
    pub fn edge_id_between(&self, u: u32, v: u32) -> Option<u32> {
        let row = self.neighbors(u);
        let lo = self.row_ptr[u as usize] as usize;
        row.binary_search(&v).ok().map(|k| self.slot_edge[lo + k])
    }

    /// Samples a vertex with probability `deg(v) / 2m` (the stationary law
    /// of the simple random walk) by binary search over degree prefix sums.
    pub fn stationary_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let r = rng.gen_range(0..self.neighbors.len() as u32);
        // row_ptr is nondecreasing; find the row whose slot range holds r.
        (self.row_ptr.partition_point(|&p| p <= r) - 1) as u32
    }

    /// Serializes to canonical edge-list text, one `u v` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for &(u, v) in &self.edges {
            out.push_str(&alloc::format!("{u} {v}\n"));
        }
        out
    }

    /// Diameter of the subgraph induced by `sub`, or `None` if `sub` is
    /// empty or not connected within itself.
    ///
    /// Panics if `sub` was built for a different vertex count.
    pub fn induced_diameter(&self, sub: &VertexSubset) -> Option<u32> {
        assert_eq!(sub.universe() as usize, self.vertex_count(), "subset universe mismatch");
        if sub.is_empty() {
            return None;
        }
        let mut best = 0u32;
        let mut dist = vec![u32::MAX; self.vertex_count()];
        let mut queue = Vec::new();
        for &src in sub.ids() {
            for d in dist.iter_mut() {
                *d = u32::MAX;
            }
            dist[src as usize] = 0;
            queue.clear();
            queue.push(src);
            let mut head = 0;
            let mut reached = 1usize;
            while head < queue.len() {
                let v = queue[head];
                head += 1;
                for &w in self.neighbors(v) {
                    if sub.contains(w) && dist[w as usize] == u32::MAX {
                        dist[w as usize] = dist[v as usize] + 1;
                        best = best.max(dist[w as usize]);
                        reached += 1;
                        queue.push(w);
                    }
                }
            }
            if reached < sub.len() {
                return None;
            }
        }
        Some(best)
    }
}

/// Subset of a graph's vertices: sorted id list plus membership bitmap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSubset {
    universe: u32,
    ids: Vec<u32>,
    mask: Vec<bool>,
}

impl VertexSubset {
    /// Builds a subset of `0..universe`; ids may arrive unsorted but must
    /// be unique and in range.
    pub fn from_ids(universe: u32, mut ids: Vec<u32>) -> Result<VertexSubset, GraphError> {
        ids.sort_unstable();
        let mut mask = vec![false; universe as usize];
        for &v in &ids {
            if v >= universe {
                return Err(GraphError::VertexOutOfRange { label: v as u64, bound: universe as u64 });
            }
            if mask[v as usize] {
                return Err(GraphError::DuplicateEdge { line: None, u: v as u64, v: v as u64 });
            }
            mask[v as usize] = true;
        }
        Ok(VertexSubset { universe, ids, mask })
    }

    /// Builds a subset from a membership bitmap of length `universe`.
    pub fn from_mask(mask: Vec<bool>) -> VertexSubset {
        let ids = mask
            .iter()
            .enumerate()
            .filter_map(|(v, &m)| if m { Some(v as u32) } else { None })
            .collect();
        VertexSubset { universe: mask.len() as u32, ids, mask }
    }

    pub fn empty(universe: u32) -> VertexSubset {
        VertexSubset { universe, ids: Vec::new(), mask: vec![false; universe as usize] }
    }

    pub fn universe(&self) -> u32 {
        self.universe
    }

    pub fn contains(&self, v: u32) -> bool {
        self.mask[v as usize]
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Member ids in ascending order.
    pub fn ids(&self) -> &[u32] {
        &self.ids
    }
}


/// Random connected graph for tests: spanning tree skeleton plus extra
/// edges.
#[cfg(test)]
pub(crate) fn random_connected(n: u32, extra: usize, seed: u64) -> Graph {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut pairs = Vec::new();
        for v in 1..n {
            pairs.push((rng.gen_range(0..v), v));
        }
        let mut attempts = 0;
        while pairs.len() < (n - 1) as usize + extra && attempts < 10 * extra + 10 {
            attempts += 1;
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a != b && !pairs.contains(&(a.min(b), a.max(b))) {
                pairs.push((a.min(b), a.max(b)));
            }
        }
    Graph::from_edge_list(n, &pairs).unwrap()
}
