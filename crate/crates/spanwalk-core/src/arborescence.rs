//! Arborescences and forest completion.
//!
//! A first-entry walk yields an arborescence directly; the
//! vertex-shortcut walk yields a partial forest whose gap vertices have
//! no recorded arc. Completion contracts the forest's weakly connected
//! components into a quotient digraph, counts its arborescences with an
//! exact integer determinant, and samples one uniformly by sequential
//! conditioning — choose an incoming arc class for each gap with
//! probability proportional to the number of arborescences containing
//! it, then a concrete graph edge uniformly within the class.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rand::Rng;

use crate::exact::nonnegative_determinant;
use crate::graph::Graph;
use crate::walk::{PartialForest, UNSET};

/// Failures in extraction, quotient construction, or completion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArborescenceError {
    /// Extraction requires a gap-free forest.
    GapsPresent { count: usize },
    /// Quotient construction requires at least one gap.
    NoGaps,
    /// The forest's arc structure is broken.
    MalformedForest { reason: &'static str },
    /// The arc map does not describe an arborescence of the graph.
    NotAnArborescence { reason: &'static str },
    /// The quotient admits no arborescence — impossible for genuine
    /// walk output.
    InconsistentForest,
    /// Completion choices do not cover the gap set exactly.
    ChoiceMismatch,
}

impl fmt::Display for ArborescenceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArborescenceError::GapsPresent { count } => {
                write!(f, "forest has {count} unresolved gaps")
            }
            ArborescenceError::NoGaps => write!(f, "forest has no gaps; extract it directly"),
            ArborescenceError::MalformedForest { reason } => write!(f, "malformed forest: {reason}"),
            ArborescenceError::NotAnArborescence { reason } => {
                write!(f, "not an arborescence: {reason}")
            }
            ArborescenceError::InconsistentForest => {
                write!(f, "forest admits no completion")
            }
            ArborescenceError::ChoiceMismatch => {
                write!(f, "completion choices do not match the gap set")
            }
        }
    }
}

/// Rooted spanning arborescence: every vertex except the root carries
/// exactly one incoming arc from its parent, and the arcs trace back to
/// the root without cycles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arborescence {
    root: u32,
    parent: Vec<u32>,
}

impl Arborescence {
    /// Validates the arc map against `g`: arcs must be graph edges, the
    /// root must be the unique arcless vertex, and parent chains must
    /// reach the root.
    pub fn new(g: &Graph, root: u32, parent: Vec<u32>) -> Result<Arborescence, ArborescenceError> {
        let n = g.vertex_count();
        if parent.len() != n || (root as usize) >= n {
            return Err(ArborescenceError::NotAnArborescence { reason: "shape mismatch" });
        }
        if parent[root as usize] != UNSET {
            return Err(ArborescenceError::NotAnArborescence { reason: "root has an incoming arc" });
        }
        for v in 0..n as u32 {
            if v == root {
                continue;
            }
            let p = parent[v as usize];
            if p == UNSET {
                return Err(ArborescenceError::NotAnArborescence { reason: "missing arc" });
            }
            if p == v || (p as usize) >= n || g.edge_id_between(p, v).is_none() {
                return Err(ArborescenceError::NotAnArborescence { reason: "arc is not a graph edge" });
            }
        }
        // Chains must reach the root; a chain longer than n has looped.
        let mut ok = vec![false; n];
        ok[root as usize] = true;
        let mut path: Vec<u32> = Vec::new();
        for v in 0..n as u32 {
            let mut cur = v;
            while !ok[cur as usize] {
                path.push(cur);
                if path.len() > n {
                    return Err(ArborescenceError::NotAnArborescence { reason: "cycle" });
                }
                cur = parent[cur as usize];
            }
            for &u in &path {
                ok[u as usize] = true;
            }
            path.clear();
        }
        Ok(Arborescence { root, parent })
    }

    pub fn root(&self) -> u32 {
        self.root
    }

    /// Parent of `v`, or `None` at the root.
    pub fn parent_of(&self, v: u32) -> Option<u32> {
        let p = self.parent[v as usize];
        if p == UNSET {
            None
        } else {
            Some(p)
        }
    }

    /// Arcs as `(parent, child)`, child ascending.
    pub fn arcs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.parent
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != UNSET)
            .map(|(v, &p)| (p, v as u32))
    }
}

/// Reads the arborescence out of a completed forest.
pub fn extract(g: &Graph, pf: &PartialForest) -> Result<Arborescence, ArborescenceError> {
    if !pf.gaps.is_empty() {
        return Err(ArborescenceError::GapsPresent { count: pf.gaps.len() });
    }
    Arborescence::new(g, pf.root, pf.entered_from.clone())
}

/// Undirected spanning tree of an arborescence as sorted edge ids.
pub fn to_tree(a: &Arborescence, g: &Graph) -> Vec<u32> {
    let mut edges: Vec<u32> = a
        .arcs()
        .map(|(p, v)| g.edge_id_between(p, v).expect("arcs validated as edges"))
        .collect();
    edges.sort_unstable();
    edges
}

/// One incoming-arc class of the quotient digraph, with the concrete
/// graph edges that realize it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientArc {
    /// Source node index.
    pub from: usize,
    /// Target node index; the arc enters that node's gap vertex.
    pub to: usize,
    /// Parent endpoints in the source node; multiplicity is the length.
    pub parents: Vec<u32>,
}

/// Forest contracted to its weakly connected components: node 0 holds
/// the forest root, every other node is rooted at a single gap vertex,
/// and arcs record how graph edges can re-parent those gaps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientDigraph {
    /// Vertex sets of the components, node 0 first.
    pub members: Vec<Vec<u32>>,
    /// Gap vertex rooting each node; `None` exactly at node 0.
    pub gap_of: Vec<Option<u32>>,
    pub arcs: Vec<QuotientArc>,
}

impl QuotientDigraph {
    pub fn node_count(&self) -> usize {
        self.members.len()
    }

    /// Total multiplicity matrix `m[from][to]`.
    fn multiplicities(&self) -> Vec<Vec<u64>> {
        let r = self.node_count();
        let mut m = vec![vec![0u64; r]; r];
        for arc in &self.arcs {
            m[arc.from][arc.to] += arc.parents.len() as u64;
        }
        m
    }
}

/// Contracts a gapped forest into its quotient digraph.
pub fn build_quotient(g: &Graph, pf: &PartialForest) -> Result<QuotientDigraph, ArborescenceError> {
    if pf.gaps.is_empty() {
        return Err(ArborescenceError::NoGaps);
    }
    let n = g.vertex_count();
    let is_gap = |v: u32| pf.gaps.binary_search(&v).is_ok();
    if is_gap(pf.root) {
        return Err(ArborescenceError::MalformedForest { reason: "root listed as a gap" });
    }

    // Every vertex belongs to the component of the arcless vertex its
    // parent chain ends at: the root, or one gap each.
    let mut terminal = vec![UNSET; n];
    let mut path: Vec<u32> = Vec::new();
    for v in 0..n as u32 {
        let mut cur = v;
        while terminal[cur as usize] == UNSET {
            let p = pf.entered_from[cur as usize];
            if p == UNSET {
                if cur != pf.root && !is_gap(cur) {
                    return Err(ArborescenceError::MalformedForest { reason: "arcless vertex is neither root nor gap" });
                }
                terminal[cur as usize] = cur;
                break;
            }
            path.push(cur);
            if path.len() > n {
                return Err(ArborescenceError::MalformedForest { reason: "cycle" });
            }
            cur = p;
        }
        let t = terminal[cur as usize];
        for &u in &path {
            terminal[u as usize] = t;
        }
        path.clear();
    }
    for &u in &pf.gaps {
        if terminal[u as usize] != u {
            return Err(ArborescenceError::MalformedForest { reason: "gap vertex has an arc" });
        }
    }

    // Node 0 is the root's component; gap components follow in gap order.
    let mut node_of_terminal = vec![usize::MAX; n];
    node_of_terminal[pf.root as usize] = 0;
    for (i, &u) in pf.gaps.iter().enumerate() {
        node_of_terminal[u as usize] = i + 1;
    }
    let r = pf.gaps.len() + 1;
    let mut members: Vec<Vec<u32>> = vec![Vec::new(); r];
    for v in 0..n as u32 {
        members[node_of_terminal[terminal[v as usize] as usize]].push(v);
    }
    let mut gap_of: Vec<Option<u32>> = vec![None];
    gap_of.extend(pf.gaps.iter().map(|&u| Some(u)));

    let mut arcs: Vec<QuotientArc> = Vec::new();
    for (i, &u) in pf.gaps.iter().enumerate() {
        let to = i + 1;
        let mut by_from: Vec<(usize, Vec<u32>)> = Vec::new();
        for &w in g.neighbors(u) {
            let from = node_of_terminal[terminal[w as usize] as usize];
            if from == to {
                continue; // re-parenting inside the component would close a cycle
            }
            match by_from.iter_mut().find(|(f, _)| *f == from) {
                Some((_, parents)) => parents.push(w),
                None => by_from.push((from, vec![w])),
            }
        }
        for (from, parents) in by_from {
            arcs.push(QuotientArc { from, to, parents });
        }
    }
    Ok(QuotientDigraph { members, gap_of, arcs })
}

/// Arborescence count of the contracted multigraph spanned by `alive`
/// nodes, rooted at `root_rep`: determinant of the in-degree Laplacian
/// minor, exact.
fn contracted_count(m: &[Vec<u64>], alive: &[usize], root_rep: usize) -> BigUint {
    let idx: Vec<usize> = alive.iter().copied().filter(|&x| x != root_rep).collect();
    let k = idx.len();
    let mut l = vec![vec![BigInt::zero(); k]; k];
    for (bi, &b) in idx.iter().enumerate() {
        let mut indeg = 0u64;
        for &a in alive {
            if a != b {
                indeg += m[a][b];
            }
        }
        l[bi][bi] = BigInt::from(indeg);
        for (ai, &a) in idx.iter().enumerate() {
            if a != b {
                l[ai][bi] -= BigInt::from(m[a][b]);
            }
        }
    }
    nonnegative_determinant(l)
}

/// Number of arborescences of the quotient rooted at `root`, counting
/// multiplicity products. Zero when none exist.
pub fn count_arborescences(q: &QuotientDigraph, root: usize) -> BigUint {
    let alive: Vec<usize> = (0..q.node_count()).collect();
    contracted_count(&q.multiplicities(), &alive, root)
}

/// One completion decision: gap vertex `gap` of quotient node `node`
/// re-parented onto `parent` through arc class `arc_index`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArcChoice {
    pub node: usize,
    pub arc_index: usize,
    pub gap: u32,
    pub parent: u32,
}

/// Draws an exactly-uniform random value below `n` by masked rejection.
fn uniform_below<R: Rng + ?Sized>(n: &BigUint, rng: &mut R) -> BigUint {
    debug_assert!(!n.is_zero());
    let bits = n.bits();
    let bytes = ((bits + 7) / 8) as usize;
    let mask = 0xFFu8 >> (bytes as u64 * 8 - bits);
    let mut buf = vec![0u8; bytes];
    loop {
        rng.fill_bytes(&mut buf);
        buf[0] &= mask;
        let x = BigUint::from_bytes_be(&buf);
        if &x < n {
            return x;
        }
    }
}

/// Uniform arborescence of the quotient by sequential conditioning;
/// also returns the per-step conditional fractions
/// `(count after forcing, count before)` whose product telescopes to
/// `1 / count_arborescences`.
pub fn sample_quotient_arborescence_traced<R: Rng + ?Sized>(
    q: &QuotientDigraph,
    root: usize,
    rng: &mut R,
) -> Result<(Vec<ArcChoice>, Vec<(BigUint, BigUint)>), ArborescenceError> {
    let r = q.node_count();
    let mut m = q.multiplicities();
    let mut rep: Vec<usize> = (0..r).collect();
    let mut alive: Vec<usize> = (0..r).collect();
    let find = |rep: &[usize], mut x: usize| {
        while rep[x] != x {
            x = rep[x];
        }
        x
    };

    let mut total = contracted_count(&m, &alive, find(&rep, root));
    if total.is_zero() {
        return Err(ArborescenceError::InconsistentForest);
    }
    let mut choices: Vec<ArcChoice> = Vec::with_capacity(r.saturating_sub(1));
    let mut trace: Vec<(BigUint, BigUint)> = Vec::with_capacity(r.saturating_sub(1));

    for node in (0..r).filter(|&l| l != root) {
        // Candidate classes into `node`, each scored by multiplicity
        // times the arborescence count with that class forced.
        let mut weights: Vec<(usize, BigUint, BigUint)> = Vec::new(); // (arc idx, weight, count after)
        let mut sum = BigUint::zero();
        for (ai, arc) in q.arcs.iter().enumerate() {
            if arc.to != node {
                continue;
            }
            let from_rep = find(&rep, arc.from);
            if from_rep == node {
                continue; // arc from the node's own group: would close a cycle
            }
            let mut m2 = m.clone();
            merge(&mut m2, from_rep, node);
            let alive2: Vec<usize> = alive.iter().copied().filter(|&x| x != node).collect();
            let after = contracted_count(&m2, &alive2, find(&rep, root));
            let w = BigUint::from(arc.parents.len() as u64) * &after;
            sum += &w;
            weights.push((ai, w, after));
        }
        debug_assert_eq!(sum, total, "conditional weights must partition the count");
        if sum.is_zero() {
            return Err(ArborescenceError::InconsistentForest);
        }
        let mut draw = uniform_below(&sum, rng);
        let mut picked = None;
        for (ai, w, after) in weights {
            if draw < w {
                picked = Some((ai, draw / &after, after));
                break;
            }
            draw -= &w;
        }
        let (ai, parent_idx, after) = picked.expect("draw below the total weight");
        let arc = &q.arcs[ai];
        let parent_idx = parent_idx.to_u64_digits().first().copied().unwrap_or(0) as usize;
        choices.push(ArcChoice {
            node,
            arc_index: ai,
            gap: q.gap_of[node].ok_or(ArborescenceError::MalformedForest { reason: "non-root node without gap" })?,
            parent: arc.parents[parent_idx],
        });
        trace.push((after.clone(), total.clone()));
        let from_rep = find(&rep, arc.from);
        merge(&mut m, from_rep, node);
        rep[node] = from_rep;
        alive.retain(|&x| x != node);
        total = after;
    }
    debug_assert!(total.is_one());
    Ok((choices, trace))
}

/// Forces node `child`'s parent group to be `target`: the child's
/// outgoing multiplicities move to the target group and its incoming
/// arcs disappear with it.
fn merge(m: &mut [Vec<u64>], target: usize, child: usize) {
    for x in 0..m.len() {
        let w = m[child][x];
        m[child][x] = 0;
        if w > 0 && x != target {
            m[target][x] += w;
        }
    }
    for r in m.iter_mut() {
        r[child] = 0;
    }
}

/// Uniform arborescence of the quotient rooted at `root`.
pub fn sample_quotient_arborescence<R: Rng + ?Sized>(
    q: &QuotientDigraph,
    root: usize,
    rng: &mut R,
) -> Result<Vec<ArcChoice>, ArborescenceError> {
    sample_quotient_arborescence_traced(q, root, rng).map(|(choices, _)| choices)
}

/// Fills the forest's gaps with the sampled parents and validates the
/// result.
pub fn complete(
    g: &Graph,
    pf: &PartialForest,
    choices: &[ArcChoice],
) -> Result<Arborescence, ArborescenceError> {
    if choices.len() != pf.gaps.len() {
        return Err(ArborescenceError::ChoiceMismatch);
    }
    let mut parent = pf.entered_from.clone();
    for c in choices {
        if pf.gaps.binary_search(&c.gap).is_err() || parent[c.gap as usize] != UNSET {
            return Err(ArborescenceError::ChoiceMismatch);
        }
        parent[c.gap as usize] = c.parent;
    }
    Arborescence::new(g, pf.root, parent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::oracle::enumerate_quotient_arborescences;
    use crate::walk;
    use alloc::collections::BTreeMap;
    use num_traits::ToPrimitive;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn forest(root: u32, arcs: &[(u32, u32)], gaps: &[u32], n: usize) -> PartialForest {
        let mut entered_from = vec![UNSET; n];
        for &(p, v) in arcs {
            entered_from[v as usize] = p;
        }
        PartialForest { root, entered_from, gaps: gaps.to_vec() }
    }

    #[test]
    fn extracts_a_walk_transcript() {
        // Walk 0 → 1 → 2 on the triangle.
        let g = generators::cycle(3);
        let pf = forest(0, &[(0, 1), (1, 2)], &[], 3);
        let a = extract(&g, &pf).unwrap();
        assert_eq!(a.root(), 0);
        assert_eq!(a.parent_of(1), Some(0));
        assert_eq!(a.parent_of(2), Some(1));
        assert_eq!(a.parent_of(0), None);
        let e01 = g.edge_id_between(0, 1).unwrap();
        let e12 = g.edge_id_between(1, 2).unwrap();
        assert_eq!(to_tree(&a, &g), vec![e01.min(e12), e01.max(e12)]);
    }

    #[test]
    fn extraction_rejects_gaps_and_bad_arcs() {
        let g = generators::path(4);
        assert_eq!(
            extract(&g, &forest(0, &[(0, 1), (1, 2)], &[3], 4)),
            Err(ArborescenceError::GapsPresent { count: 1 })
        );
        // Arc (0,2) is not an edge of the path.
        assert!(matches!(
            extract(&g, &forest(0, &[(0, 1), (0, 2), (2, 3)], &[], 4)),
            Err(ArborescenceError::NotAnArborescence { .. })
        ));
        // 1 and 2 parent each other: a cycle unreachable from the root.
        assert!(matches!(
            extract(&g, &forest(0, &[(2, 1), (1, 2), (2, 3)], &[], 4)),
            Err(ArborescenceError::NotAnArborescence { .. })
        ));
        // Missing arc for vertex 3.
        assert!(matches!(
            extract(&g, &forest(0, &[(0, 1), (1, 2)], &[], 4)),
            Err(ArborescenceError::NotAnArborescence { .. })
        ));
    }

    #[test]
    fn tree_orientation_round_trips() {
        let g = crate::graph::random_connected(12, 10, 31);
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        for _ in 0..20 {
            let a = walk::aldous_broder(&g, &mut rng);
            let edges = to_tree(&a, &g);
            assert_eq!(edges.len(), g.vertex_count() - 1);
            assert_eq!(orient_toward_root(&g, &edges, a.root()), a);
        }
    }

    /// Orientation oracle: parent = BFS predecessor from the root over
    /// the tree's edges.
    fn orient_toward_root(g: &Graph, edges: &[u32], root: u32) -> Arborescence {
        let n = g.vertex_count();
        let mut adj = vec![Vec::new(); n];
        for &e in edges {
            let (u, v) = g.edge_endpoints(e);
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        let mut parent = vec![UNSET; n];
        let mut queue = alloc::collections::VecDeque::from([root]);
        let mut seen = vec![false; n];
        seen[root as usize] = true;
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u as usize] {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    parent[w as usize] = u;
                    queue.push_back(w);
                }
            }
        }
        Arborescence::new(g, root, parent).unwrap()
    }

    #[test]
    fn quotient_of_single_gap_path() {
        // Path 0-1-2-3 with arcs 1←0, 3←2 and gap 2: two components,
        // and the only candidate parent for 2 is vertex 1.
        let g = generators::path(4);
        let pf = forest(0, &[(0, 1), (2, 3)], &[2], 4);
        let q = build_quotient(&g, &pf).unwrap();
        assert_eq!(q.members, vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(q.gap_of, vec![None, Some(2)]);
        assert_eq!(q.arcs, vec![QuotientArc { from: 0, to: 1, parents: vec![1] }]);
        assert_eq!(count_arborescences(&q, 0), BigUint::from(1u32));
        // The unique completion is forced.
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        for _ in 0..5 {
            let choices = sample_quotient_arborescence(&q, 0, &mut rng).unwrap();
            assert_eq!(choices.len(), 1);
            assert_eq!((choices[0].gap, choices[0].parent), (2, 1));
            let a = complete(&g, &pf, &choices).unwrap();
            assert_eq!(a.parent_of(2), Some(1));
        }
    }

    #[test]
    fn quotient_rejects_gapless_and_malformed_forests() {
        let g = generators::path(4);
        assert_eq!(
            build_quotient(&g, &forest(0, &[(0, 1), (1, 2), (2, 3)], &[], 4)),
            Err(ArborescenceError::NoGaps)
        );
        // Vertex 3 has no arc but is not declared a gap.
        assert!(matches!(
            build_quotient(&g, &forest(0, &[(0, 1)], &[2], 4)),
            Err(ArborescenceError::MalformedForest { .. })
        ));
        // Gap vertex carrying an arc.
        assert!(matches!(
            build_quotient(&g, &forest(0, &[(0, 1), (1, 2), (2, 3)], &[2], 4)),
            Err(ArborescenceError::MalformedForest { .. })
        ));
    }

    #[test]
    fn parallel_candidates_split_evenly() {
        // Cycle 0-1-2-3: gap 2 can hang off 1 or 3, both in node 0.
        let g = generators::cycle(4);
        let pf = forest(0, &[(0, 1), (0, 3)], &[2], 4);
        let q = build_quotient(&g, &pf).unwrap();
        assert_eq!(q.arcs.len(), 1);
        assert_eq!(q.arcs[0].parents, vec![1, 3]);
        assert_eq!(count_arborescences(&q, 0), BigUint::from(2u32));
        let n = 10_000;
        let mut hits = 0usize;
        let mut rng = ChaCha12Rng::seed_from_u64(77);
        for _ in 0..n {
            let choices = sample_quotient_arborescence(&q, 0, &mut rng).unwrap();
            if choices[0].parent == 1 {
                hits += 1;
            }
        }
        let freq = hits as f64 / n as f64;
        let sigma = libm::sqrt(0.25 / n as f64);
        assert!((freq - 0.5).abs() < 4.0 * sigma, "freq {freq}");
    }

    /// Hand-checkable synthetic quotient: node j stands in for gap j.
    fn synthetic(r: usize, arcs: &[(usize, usize, &[u32])]) -> QuotientDigraph {
        QuotientDigraph {
            members: (0..r).map(|j| vec![j as u32]).collect(),
            gap_of: (0..r).map(|j| if j == 0 { None } else { Some(j as u32) }).collect(),
            arcs: arcs
                .iter()
                .map(|&(from, to, parents)| QuotientArc { from, to, parents: parents.to_vec() })
                .collect(),
        }
    }

    #[test]
    fn counts_match_hand_values() {
        // Single arc of multiplicity 3 into the only non-root node.
        let q = synthetic(2, &[(0, 1, &[5, 6, 7])]);
        assert_eq!(count_arborescences(&q, 0), BigUint::from(3u32));
        // Directed 3-cycle has exactly one arborescence per root.
        let q = synthetic(3, &[(0, 1, &[9]), (1, 2, &[9]), (2, 0, &[9])]);
        assert_eq!(count_arborescences(&q, 0), BigUint::from(1u32));
        // Complete digraph on 4 nodes: 4^2 arborescences per root.
        let mut arcs: Vec<(usize, usize, &[u32])> = Vec::new();
        for a in 0..4 {
            for b in 0..4 {
                if a != b {
                    arcs.push((a, b, &[1]));
                }
            }
        }
        let q = synthetic(4, &arcs);
        assert_eq!(count_arborescences(&q, 0), BigUint::from(16u32));
        // No path to node 2 at all: count 0 and sampling errors out.
        let q = synthetic(3, &[(0, 1, &[9])]);
        assert_eq!(count_arborescences(&q, 2), BigUint::zero());
        assert!(count_arborescences(&q, 0).is_zero());
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        assert_eq!(
            sample_quotient_arborescence(&q, 0, &mut rng),
            Err(ArborescenceError::InconsistentForest)
        );
    }

    #[test]
    fn counts_match_enumeration_on_random_quotients() {
        let mut rng = ChaCha12Rng::seed_from_u64(2024);
        for _ in 0..12 {
            let r = rng.gen_range(2..=5);
            let mut arcs: Vec<QuotientArc> = Vec::new();
            for a in 0..r {
                for b in 0..r {
                    if a != b && rng.gen_bool(0.6) {
                        let mult = rng.gen_range(1..=3);
                        arcs.push(QuotientArc {
                            from: a,
                            to: b,
                            parents: (0..mult).map(|i| 100 + i as u32).collect(),
                        });
                    }
                }
            }
            let q = QuotientDigraph {
                members: (0..r).map(|j| vec![j as u32]).collect(),
                gap_of: (0..r).map(|j| if j == 0 { None } else { Some(j as u32) }).collect(),
                arcs,
            };
            let listed = enumerate_quotient_arborescences(&q, 0);
            assert_eq!(count_arborescences(&q, 0), BigUint::from(listed.len()));
        }
    }

    #[test]
    fn conditional_probabilities_telescope() {
        // Product of (after/before) fractions must equal 1/count on
        // instances with distinct branching structure.
        let instances = vec![
            synthetic(2, &[(0, 1, &[5, 6, 7])]),
            synthetic(3, &[(0, 1, &[1]), (0, 2, &[2, 3]), (1, 2, &[4])]),
            synthetic(4, &[
                (0, 1, &[1]),
                (1, 2, &[2]),
                (2, 3, &[3, 4]),
                (0, 3, &[5]),
                (3, 1, &[6]),
            ]),
        ];
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for q in &instances {
            let count = count_arborescences(q, 0);
            for _ in 0..20 {
                let (_, trace) = sample_quotient_arborescence_traced(q, 0, &mut rng).unwrap();
                let num: BigUint = trace.iter().map(|(a, _)| a).product();
                let den: BigUint = trace.iter().map(|(_, b)| b).product();
                assert_eq!(den, &count * &num);
            }
        }
    }

    #[test]
    fn sampled_completions_are_uniform() {
        // Three outcomes: gap 2 parented from node 0 via either of two
        // edges, or from node 1; all equally likely.
        let q = synthetic(3, &[(0, 1, &[1]), (0, 2, &[2, 3]), (1, 2, &[4])]);
        assert_eq!(count_arborescences(&q, 0), BigUint::from(3u32));
        let n = 9_000;
        let mut counts: BTreeMap<Vec<(usize, u32)>, usize> = BTreeMap::new();
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        for _ in 0..n {
            let choices = sample_quotient_arborescence(&q, 0, &mut rng).unwrap();
            let key: Vec<(usize, u32)> = choices.iter().map(|c| (c.arc_index, c.parent)).collect();
            *counts.entry(key).or_insert(0) += 1;
        }
        assert_eq!(counts.len(), 3);
        let sigma = libm::sqrt((1.0 / 3.0) * (2.0 / 3.0) / n as f64);
        for &c in counts.values() {
            let freq = c as f64 / n as f64;
            assert!((freq - 1.0 / 3.0).abs() < 4.0 * sigma, "freq {freq}");
        }
    }

    #[test]
    fn sampler_tracks_enumeration_on_a_random_quotient() {
        let mut rng = ChaCha12Rng::seed_from_u64(555);
        let q = synthetic(
            4,
            &[
                (0, 1, &[1, 2]),
                (1, 2, &[3]),
                (0, 2, &[4]),
                (2, 3, &[5]),
                (0, 3, &[6, 7]),
                (3, 1, &[8]),
            ],
        );
        let listed = enumerate_quotient_arborescences(&q, 0);
        let count = count_arborescences(&q, 0).to_usize().unwrap();
        assert_eq!(listed.len(), count);
        let n = 20_000;
        let mut counts: BTreeMap<Vec<(usize, usize, u32)>, usize> = BTreeMap::new();
        for _ in 0..n {
            let choices = sample_quotient_arborescence(&q, 0, &mut rng).unwrap();
            let key: Vec<(usize, usize, u32)> =
                choices.iter().map(|c| (c.node, c.arc_index, c.parent)).collect();
            *counts.entry(key).or_insert(0) += 1;
        }
        for key in counts.keys() {
            assert!(listed.contains(key), "sampled completion not in enumeration");
        }
        let tv: f64 = listed
            .iter()
            .map(|key| {
                let c = counts.get(key).copied().unwrap_or(0);
                (c as f64 / n as f64 - 1.0 / count as f64).abs()
            })
            .sum::<f64>()
            / 2.0;
        assert!(tv < 0.05, "tv {tv}");
    }

    #[test]
    fn completion_validates_choice_coverage() {
        let g = generators::cycle(4);
        let pf = forest(0, &[(0, 1), (0, 3)], &[2], 4);
        assert_eq!(complete(&g, &pf, &[]), Err(ArborescenceError::ChoiceMismatch));
        let bogus = ArcChoice { node: 1, arc_index: 0, gap: 3, parent: 0 };
        assert_eq!(complete(&g, &pf, &[bogus]), Err(ArborescenceError::ChoiceMismatch));
        let ok = ArcChoice { node: 1, arc_index: 0, gap: 2, parent: 3 };
        let a = complete(&g, &pf, &[ok]).unwrap();
        assert_eq!(a.parent_of(2), Some(3));
    }
}
