//! Partitioning a graph into low-diameter components plus a small cut.
//!
//! `strong_decompose` repeatedly grows a ball around the lowest remaining
//! vertex id until its frontier stops expanding by a factor tied to `phi`,
//! then moves the frontier shell into the cut vertex set `S`, the edges
//! touching the shell into the cut edge set `C`, and keeps the ball as a
//! component. A fixup pass dissolves components with fewer internal edges
//! than incident cut edges. The construction never leaves an edge between
//! two distinct components, so the weak variant differs only in which
//! clauses [`verify_decomposition`] enforces.
//!
//! Guarantees checked by the verifier: `|C| <= 3*phi*m`, `|C(S)| <= phi*n`,
//! each component diameter is at most [`gamma_bound`], and each component
//! has at least as many internal edges as incident cut edges.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::{Graph, VertexSubset};

const NO_COMPONENT: u32 = u32::MAX;

/// Failures constructing a decomposition.
#[derive(Debug, Clone, PartialEq)]
pub enum DecomposeError {
    /// `phi` must lie strictly between 0 and 1.
    InvalidPhi { phi: f64 },
    /// A vertex id exceeds the graph's vertex count.
    OutOfRange { v: u32 },
    /// A vertex appears in two components.
    Overlap { v: u32 },
    /// A component has no vertices.
    EmptyComponent { index: usize },
}

impl fmt::Display for DecomposeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecomposeError::InvalidPhi { phi } => {
                write!(f, "phi must be in (0, 1), got {phi}")
            }
            DecomposeError::OutOfRange { v } => write!(f, "vertex {v} out of range"),
            DecomposeError::Overlap { v } => {
                write!(f, "vertex {v} appears in two components")
            }
            DecomposeError::EmptyComponent { index } => {
                write!(f, "component {index} is empty")
            }
        }
    }
}

/// Partition of a graph into components `D_i`, cut vertices `S` and cut
/// edges `C`, with the derived index structures the walk and the exit
/// tables need.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    components: Vec<VertexSubset>,
    cut_vertices: VertexSubset,
    /// Edge ids of `C`, ascending.
    cut_edges: Vec<u32>,
    /// Per vertex: component index, or `NO_COMPONENT` for members of `S`.
    component_index: Vec<u32>,
    /// Per edge: true iff the edge is in `C`.
    cut_edge_mask: Vec<bool>,
    /// `U(D_i)`: component vertices incident to a cut edge, ascending.
    boundary: Vec<Vec<u32>>,
    /// `C(D_i)`: cut edge ids incident to component `i`, ascending.
    incident_cut_edges: Vec<Vec<u32>>,
    /// `C(S)`: members of `S` adjacent to at least one component vertex.
    boundary_cut_vertices: VertexSubset,
    phi: f64,
    strong: bool,
}

impl Decomposition {
    /// Assembles a decomposition from explicit component vertex lists.
    ///
    /// `S` becomes every vertex not listed, `C` every edge not internal to
    /// a single component. Shape is validated; the quality clauses are the
    /// verifier's job.
    pub fn from_parts(
        g: &Graph,
        components: Vec<Vec<u32>>,
        phi: f64,
        strong: bool,
    ) -> Result<Decomposition, DecomposeError> {
        check_phi(phi)?;
        let n = g.vertex_count();
        let mut component_index = vec![NO_COMPONENT; n];
        for (i, comp) in components.iter().enumerate() {
            if comp.is_empty() {
                return Err(DecomposeError::EmptyComponent { index: i });
            }
            for &v in comp {
                if v as usize >= n {
                    return Err(DecomposeError::OutOfRange { v });
                }
                if component_index[v as usize] != NO_COMPONENT {
                    return Err(DecomposeError::Overlap { v });
                }
                component_index[v as usize] = i as u32;
            }
        }
        Ok(Decomposition::derive(g, components, component_index, phi, strong))
    }

    /// `component_index` must agree with `components`.
    fn derive(
        g: &Graph,
        components: Vec<Vec<u32>>,
        component_index: Vec<u32>,
        phi: f64,
        strong: bool,
    ) -> Decomposition {
        let n = g.vertex_count();
        let k = components.len();
        let mut cut_edges = Vec::new();
        let mut cut_edge_mask = vec![false; g.edge_count()];
        let mut incident_cut_edges = vec![Vec::new(); k];
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            let cu = component_index[u as usize];
            let cv = component_index[v as usize];
            if cu != NO_COMPONENT && cu == cv {
                continue;
            }
            cut_edges.push(e as u32);
            cut_edge_mask[e] = true;
            for x in [u, v] {
                let cx = component_index[x as usize];
                if cx != NO_COMPONENT {
                    incident_cut_edges[cx as usize].push(e as u32);
                }
            }
        }
        let mut comp_subsets = Vec::with_capacity(k);
        for mut comp in components {
            comp.sort_unstable();
            comp_subsets.push(VertexSubset::from_ids(n as u32, comp).expect("validated ids"));
        }
        let boundary: Vec<Vec<u32>> = comp_subsets
            .iter()
            .map(|subset| {
                subset
                    .ids()
                    .iter()
                    .copied()
                    .filter(|&v| g.neighbor_edges(v).any(|(_, e)| cut_edge_mask[e as usize]))
                    .collect()
            })
            .collect();
        let mut s_mask = vec![false; n];
        let mut cs_mask = vec![false; n];
        for v in 0..n {
            if component_index[v] == NO_COMPONENT {
                s_mask[v] = true;
                cs_mask[v] = g
                    .neighbors(v as u32)
                    .iter()
                    .any(|&w| component_index[w as usize] != NO_COMPONENT);
            }
        }
        Decomposition {
            components: comp_subsets,
            cut_vertices: VertexSubset::from_mask(s_mask),
            cut_edges,
            component_index,
            cut_edge_mask,
            boundary,
            incident_cut_edges,
            boundary_cut_vertices: VertexSubset::from_mask(cs_mask),
            phi,
            strong,
        }
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[VertexSubset] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &VertexSubset {
        &self.components[i]
    }

    /// Component index of `v`, or `None` if `v` is a cut vertex.
    pub fn component_of(&self, v: u32) -> Option<usize> {
        let c = self.component_index[v as usize];
        if c == NO_COMPONENT {
            None
        } else {
            Some(c as usize)
        }
    }

    /// `S`: the cut vertex set.
    pub fn cut_vertices(&self) -> &VertexSubset {
        &self.cut_vertices
    }

    /// `C`: cut edge ids, ascending.
    pub fn cut_edges(&self) -> &[u32] {
        &self.cut_edges
    }

    pub fn is_cut_edge(&self, e: u32) -> bool {
        self.cut_edge_mask[e as usize]
    }

    /// `U(D_i)`: vertices of component `i` incident to a cut edge.
    pub fn boundary(&self, i: usize) -> &[u32] {
        &self.boundary[i]
    }

    /// `C(D_i)`: cut edge ids incident to component `i`, ascending.
    pub fn incident_cut_edges(&self, i: usize) -> &[u32] {
        &self.incident_cut_edges[i]
    }

    /// `C(S)`: cut vertices adjacent to at least one component vertex.
    pub fn boundary_cut_vertices(&self) -> &VertexSubset {
        &self.boundary_cut_vertices
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn is_strong(&self) -> bool {
        self.strong
    }
}

fn check_phi(phi: f64) -> Result<(), DecomposeError> {
    if phi.is_finite() && phi > 0.0 && phi < 1.0 {
        Ok(())
    } else {
        Err(DecomposeError::InvalidPhi { phi })
    }
}

/// Diameter allowance for components produced at sharpness `phi` on a
/// graph with `m` edges: `6 * (1 + ln m / ln(1 + t))`, `t = phi/(1-phi)`.
pub fn gamma_bound(phi: f64, m: usize) -> f64 {
    let t = phi / (1.0 - phi);
    6.0 * (1.0 + libm::log(m.max(1) as f64) / libm::log(1.0 + t))
}

/// Strong variant: additionally promises `S` separates the components
/// (no component-to-component edges) and `|C(S)| <= phi * n`.
pub fn strong_decompose(g: &Graph, phi: f64) -> Result<Decomposition, DecomposeError> {
    decompose(g, phi, true)
}

/// Weak variant: same construction, verified only against the weak
/// clauses.
pub fn weak_decompose(g: &Graph, phi: f64) -> Result<Decomposition, DecomposeError> {
    decompose(g, phi, false)
}

fn decompose(g: &Graph, phi: f64, strong: bool) -> Result<Decomposition, DecomposeError> {
    check_phi(phi)?;
    let n = g.vertex_count();
    let m = g.edge_count();
    let t = phi / (1.0 - phi);

    let mut alive = vec![true; n];
    let mut alive_count = n;
    let mut balls: Vec<Vec<u32>> = Vec::new();
    let mut in_s = vec![false; n];
    let mut in_c = vec![false; m];

    // Scratch for layered BFS, reused across balls.
    let mut layer_of = vec![u32::MAX; n];
    let mut next_center = 0usize;
    while alive_count > 0 {
        while !alive[next_center] {
            next_center += 1;
        }
        let center = next_center as u32;

        // Full BFS layering of center's alive component; layer_of doubles
        // as the visited mark and is cleared again before the next ball.
        let mut layers: Vec<Vec<u32>> = vec![vec![center]];
        layer_of[center as usize] = 0;
        loop {
            let last = layers.last().unwrap();
            let depth = layers.len() as u32;
            let mut next = Vec::new();
            for &v in last {
                for &w in g.neighbors(v) {
                    if alive[w as usize] && layer_of[w as usize] == u32::MAX {
                        layer_of[w as usize] = depth;
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            next.sort_unstable();
            layers.push(next);
        }
        // edge_bucket[j] = number of alive edges whose deeper endpoint sits
        // in layer j, so prefix sums give |E(B(center, j))|.
        let mut edge_bucket = vec![0usize; layers.len()];
        for layer in &layers {
            for &v in layer {
                for &w in g.neighbors(v) {
                    if w > v && alive[w as usize] && layer_of[w as usize] != u32::MAX {
                        let deeper = layer_of[v as usize].max(layer_of[w as usize]);
                        edge_bucket[deeper as usize] += 1;
                    }
                }
            }
        }
        let edges_upto = |j: usize| -> usize {
            edge_bucket[..layers.len().min(j + 1)].iter().sum()
        };
        let layer_len = |j: usize| -> usize { layers.get(j).map_or(0, Vec::len) };

        let mut ball_vertices = 1usize;
        let mut j = 0usize;
        loop {
            let shell = layer_len(j + 1) as f64;
            let e_ball = edges_upto(j) as f64;
            let gained_next = (edges_upto(j + 1) - edges_upto(j)) as f64;
            let gained_after = (edges_upto(j + 2) - edges_upto(j + 1)) as f64;
            if shell > t * ball_vertices as f64
                || gained_after > t * e_ball
                || gained_next > t * e_ball
            {
                j += 1;
                ball_vertices += layer_len(j);
            } else {
                break;
            }
        }

        let mut ball = Vec::with_capacity(ball_vertices);
        for layer in &layers[..=j] {
            ball.extend_from_slice(layer);
        }
        // Shell joins S; alive edges touching it join C. Every alive edge
        // leaving the ball ends in the shell, so removing ball and shell
        // strands no edges.
        if let Some(shell) = layers.get(j + 1) {
            for &w in shell {
                in_s[w as usize] = true;
                for (x, e) in g.neighbor_edges(w) {
                    if alive[x as usize] {
                        in_c[e as usize] = true;
                    }
                }
            }
            for &w in shell {
                alive[w as usize] = false;
                alive_count -= 1;
            }
        }
        for &w in &ball {
            alive[w as usize] = false;
            alive_count -= 1;
        }
        for layer in &layers {
            for &v in layer {
                layer_of[v as usize] = u32::MAX;
            }
        }
        balls.push(ball);
    }

    // Fixup: dissolve balls with fewer internal edges than incident cut
    // edges. Internal edges of one ball touch no other ball, so the counts
    // below stay valid as balls dissolve.
    let mut ball_of = vec![NO_COMPONENT; n];
    for (i, ball) in balls.iter().enumerate() {
        for &v in ball {
            ball_of[v as usize] = i as u32;
        }
    }
    let mut internal = vec![0usize; balls.len()];
    let mut incident_cut = vec![0usize; balls.len()];
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let bu = ball_of[u as usize];
        let bv = ball_of[v as usize];
        if in_c[e] {
            for b in [bu, bv] {
                if b != NO_COMPONENT {
                    incident_cut[b as usize] += 1;
                }
            }
        } else {
            debug_assert!(bu == bv && bu != NO_COMPONENT, "non-cut edge must be internal");
            internal[bu as usize] += 1;
        }
    }
    let mut surviving = Vec::new();
    let mut component_index = vec![NO_COMPONENT; n];
    for (i, ball) in balls.into_iter().enumerate() {
        if internal[i] < incident_cut[i] {
            for &v in &ball {
                for (_, e) in g.neighbor_edges(v) {
                    in_c[e as usize] = true;
                }
            }
            continue;
        }
        let idx = surviving.len() as u32;
        for &v in &ball {
            component_index[v as usize] = idx;
        }
        surviving.push(ball);
    }

    Ok(Decomposition::derive(g, surviving, component_index, phi, strong))
}

/// One verified clause of a decomposition report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseCheck {
    pub name: &'static str,
    pub pass: bool,
    /// Measured quantities, or a witness when the clause fails.
    pub detail: String,
}

/// Clause-by-clause verification outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionReport {
    pub clauses: Vec<ClauseCheck>,
}

impl DecompositionReport {
    pub fn pass(&self) -> bool {
        self.clauses.iter().all(|c| c.pass)
    }
}

/// Checks every definitional clause of `d` against `g` from scratch.
///
/// Weak decompositions are held to the partition, cut-set, cut-size,
/// diameter and edge-balance clauses; strong ones additionally to the
/// separator clause and the `|C(S)| <= phi * n` bound.
pub fn verify_decomposition(g: &Graph, d: &Decomposition) -> DecompositionReport {
    let n = g.vertex_count();
    let m = g.edge_count();
    let mut clauses = Vec::new();

    // Every vertex lies in exactly one component or in S.
    let mut cover = vec![0u32; n];
    for comp in d.components() {
        for &v in comp.ids() {
            cover[v as usize] += 1;
        }
    }
    for &v in d.cut_vertices().ids() {
        cover[v as usize] += 1;
    }
    let bad = cover.iter().position(|&c| c != 1);
    clauses.push(ClauseCheck {
        name: "partition",
        pass: bad.is_none(),
        detail: match bad {
            None => alloc::format!("{} components + |S|={}", d.component_count(), d.cut_vertices().len()),
            Some(v) => alloc::format!("vertex {v} covered {} times", cover[v]),
        },
    });

    // C is exactly the set of edges not internal to a single component.
    let mut cut_mismatch = None;
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let internal = match (d.component_of(u), d.component_of(v)) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        };
        if internal == d.is_cut_edge(e as u32) {
            cut_mismatch = Some((e, u, v));
            break;
        }
    }
    clauses.push(ClauseCheck {
        name: "cut-edge-set",
        pass: cut_mismatch.is_none(),
        detail: match cut_mismatch {
            None => alloc::format!("|C|={}", d.cut_edges().len()),
            Some((e, u, v)) => alloc::format!("edge {e} ({u},{v}) misclassified"),
        },
    });

    let cut_budget = 3.0 * d.phi() * m as f64;
    clauses.push(ClauseCheck {
        name: "cut-size",
        pass: d.cut_edges().len() as f64 <= cut_budget,
        detail: alloc::format!("|C|={} vs 3*phi*m={:.3}", d.cut_edges().len(), cut_budget),
    });

    let bound = gamma_bound(d.phi(), m);
    let mut worst: f64 = 0.0;
    let mut diameter_witness = None;
    for (i, comp) in d.components().iter().enumerate() {
        match g.induced_diameter(comp) {
            Some(dia) => {
                worst = worst.max(dia as f64);
                if dia as f64 > bound {
                    diameter_witness = Some(alloc::format!("component {i} diameter {dia} > {bound:.3}"));
                    break;
                }
            }
            None => {
                diameter_witness = Some(alloc::format!("component {i} not connected"));
                break;
            }
        }
    }
    clauses.push(ClauseCheck {
        name: "diameter",
        pass: diameter_witness.is_none(),
        detail: diameter_witness
            .unwrap_or_else(|| alloc::format!("max diameter {worst} vs bound {bound:.3}")),
    });

    let mut balance_witness = None;
    for (i, comp) in d.components().iter().enumerate() {
        let mut internal = 0usize;
        for &v in comp.ids() {
            for &w in g.neighbors(v) {
                if w > v && comp.contains(w) {
                    internal += 1;
                }
            }
        }
        let incident = d.incident_cut_edges(i).len();
        if internal < incident {
            balance_witness =
                Some(alloc::format!("component {i}: |E(D)|={internal} < |C(D)|={incident}"));
            break;
        }
    }
    clauses.push(ClauseCheck {
        name: "edge-balance",
        pass: balance_witness.is_none(),
        detail: balance_witness.unwrap_or_else(|| String::from("|E(D_i)| >= |C(D_i)| for all i")),
    });

    if d.is_strong() {
        let mut separator_witness = None;
        for &(u, v) in g.edges() {
            if let (Some(a), Some(b)) = (d.component_of(u), d.component_of(v)) {
                if a != b {
                    separator_witness = Some(alloc::format!("edge ({u},{v}) joins components {a} and {b}"));
                    break;
                }
            }
        }
        clauses.push(ClauseCheck {
            name: "separator",
            pass: separator_witness.is_none(),
            detail: separator_witness.unwrap_or_else(|| String::from("no component-to-component edge")),
        });

        // Recompute C(S) instead of trusting the stored set.
        let mut cs = 0usize;
        let mut stale = None;
        for &v in d.cut_vertices().ids() {
            let adjacent = g
                .neighbors(v)
                .iter()
                .any(|&w| d.component_of(w).is_some());
            if adjacent {
                cs += 1;
            }
            if adjacent != d.boundary_cut_vertices().contains(v) {
                stale = Some(v);
            }
        }
        let budget = d.phi() * n as f64;
        let pass = stale.is_none() && cs as f64 <= budget;
        clauses.push(ClauseCheck {
            name: "cut-vertex-bound",
            pass,
            detail: match stale {
                Some(v) => alloc::format!("stored C(S) wrong at vertex {v}"),
                None => alloc::format!("|C(S)|={cs} vs phi*n={budget:.3}"),
            },
        });
    }

    DecompositionReport { clauses }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    fn assert_verified(g: &Graph, d: &Decomposition) {
        let report = verify_decomposition(g, d);
        assert!(
            report.pass(),
            "verification failed: {:?}",
            report.clauses.iter().filter(|c| !c.pass).collect::<Vec<_>>()
        );
    }

    #[test]
    fn single_vertex_is_one_component() {
        let g = Graph::from_edge_list(1, &[]).unwrap();
        let d = strong_decompose(&g, 0.5).unwrap();
        assert_eq!(d.component_count(), 1);
        assert_eq!(d.component(0).ids(), &[0]);
        assert!(d.cut_vertices().is_empty());
        assert!(d.cut_edges().is_empty());
        assert_verified(&g, &d);
    }

    #[test]
    fn complete_graph_stays_whole_at_small_phi() {
        let g = generators::complete(5);
        let d = strong_decompose(&g, 0.3).unwrap();
        assert_eq!(d.component_count(), 1);
        assert_eq!(d.component(0).len(), 5);
        assert!(d.cut_edges().is_empty());
        assert!(d.boundary(0).is_empty());
        assert_verified(&g, &d);
    }

    #[test]
    fn ball_always_reaches_radius_one() {
        // B(v, 0) has no edges, so the edge-gain condition fires at j = 0
        // whatever t is; even at phi = 0.99 the triangle stays whole.
        let g = generators::complete(3);
        let d = strong_decompose(&g, 0.99).unwrap();
        assert_eq!(d.component_count(), 1);
        assert!(d.cut_vertices().is_empty());
        assert_verified(&g, &d);
    }

    #[test]
    fn stranded_vertex_is_dissolved_into_cut() {
        // Cycle of 6 at t = 1: the first ball takes {0,1,5} with shell
        // {2,4}, stranding vertex 3 as a ball with 0 internal edges and 2
        // incident cut edges, which the fixup dissolves into S.
        let g = generators::cycle(6);
        let d = strong_decompose(&g, 0.5).unwrap();
        assert_eq!(d.component_count(), 1);
        assert_eq!(d.component(0).ids(), &[0, 1, 5]);
        assert_eq!(d.cut_vertices().ids(), &[2, 3, 4]);
        assert_eq!(d.cut_edges().len(), 4);
        assert_eq!(d.boundary_cut_vertices().ids(), &[2, 4]);
        assert_verified(&g, &d);
    }

    #[test]
    fn grid_3x3_splits_off_far_corner() {
        let g = generators::grid(3, 3);
        let d = strong_decompose(&g, 1.0 / 3.0).unwrap();
        assert_eq!(d.component_count(), 1);
        assert_eq!(d.component(0).ids(), &[0, 1, 2, 3, 4, 5, 6, 7]);
        assert_eq!(d.cut_vertices().ids(), &[8]);
        let cut: Vec<(u32, u32)> =
            d.cut_edges().iter().map(|&e| g.edge_endpoints(e)).collect();
        assert_eq!(cut, alloc::vec![(5, 8), (7, 8)]);
        assert_eq!(d.boundary(0), &[5, 7]);
        assert_eq!(d.boundary_cut_vertices().ids(), &[8]);
        assert_verified(&g, &d);
    }

    #[test]
    fn decomposition_is_deterministic() {
        let g = generators::grid(6, 7);
        let a = strong_decompose(&g, 0.2).unwrap();
        let b = strong_decompose(&g, 0.2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn lollipop_splits_tail_into_segments() {
        let g = generators::lollipop(20, 400);
        let phi = 1.0 / libm::sqrt(g.vertex_count() as f64);
        let d = strong_decompose(&g, phi).unwrap();
        assert!(d.component_count() > 2, "tail should split into several segments");
        assert_verified(&g, &d);
    }

    #[test]
    fn rejects_bad_phi() {
        let g = generators::complete(3);
        for phi in [0.0, 1.0, -0.5, f64::NAN] {
            assert!(matches!(
                strong_decompose(&g, phi),
                Err(DecomposeError::InvalidPhi { .. })
            ));
        }
    }

    #[test]
    fn from_parts_validates_shape() {
        let g = generators::path(4);
        assert!(matches!(
            Decomposition::from_parts(&g, alloc::vec![alloc::vec![0, 1], alloc::vec![1, 2]], 0.5, true),
            Err(DecomposeError::Overlap { v: 1 })
        ));
        assert!(matches!(
            Decomposition::from_parts(&g, alloc::vec![alloc::vec![9]], 0.5, true),
            Err(DecomposeError::OutOfRange { v: 9 })
        ));
        assert!(matches!(
            Decomposition::from_parts(&g, alloc::vec![alloc::vec![]], 0.5, true),
            Err(DecomposeError::EmptyComponent { index: 0 })
        ));
    }

    #[test]
    fn verifier_flags_component_to_component_edge() {
        let g = generators::path(4);
        let d = Decomposition::from_parts(
            &g,
            alloc::vec![alloc::vec![0, 1], alloc::vec![2, 3]],
            0.5,
            true,
        )
        .unwrap();
        let report = verify_decomposition(&g, &d);
        assert!(!report.pass());
        let failed: Vec<_> =
            report.clauses.iter().filter(|c| !c.pass).map(|c| c.name).collect();
        assert_eq!(failed, alloc::vec!["separator"]);
    }

    #[test]
    fn verifier_flags_edge_balance() {
        // Star leaves as singleton components: 0 internal edges, 1 cut edge.
        let g = generators::star(3);
        let d = Decomposition::from_parts(
            &g,
            alloc::vec![alloc::vec![1], alloc::vec![2], alloc::vec![3]],
            0.5,
            false,
        )
        .unwrap();
        let report = verify_decomposition(&g, &d);
        let failed: Vec<_> =
            report.clauses.iter().filter(|c| !c.pass).map(|c| c.name).collect();
        assert!(failed.contains(&"edge-balance"), "failed clauses: {failed:?}");
    }

    #[test]
    fn verifier_flags_disconnected_component() {
        let g = generators::path(4);
        let d = Decomposition::from_parts(&g, alloc::vec![alloc::vec![0, 2]], 0.5, false).unwrap();
        let report = verify_decomposition(&g, &d);
        let diameter = report.clauses.iter().find(|c| c.name == "diameter").unwrap();
        assert!(!diameter.pass);
        assert!(diameter.detail.contains("not connected"));
    }

    #[test]
    fn weak_report_skips_strong_clauses() {
        let g = generators::grid(3, 3);
        let d = weak_decompose(&g, 1.0 / 3.0).unwrap();
        let report = verify_decomposition(&g, &d);
        assert!(report.pass());
        assert!(report.clauses.iter().all(|c| c.name != "separator"));
    }

    #[test]
    fn gamma_bound_handles_edgeless_graphs() {
        assert!(gamma_bound(0.5, 0) >= 0.0);
        assert!(gamma_bound(0.5, 12) > 6.0);
    }
}
