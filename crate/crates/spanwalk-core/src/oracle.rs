//! Independent exact references the samplers are validated against.
//!
//! Nothing here shares code with the production path: tree counts come
//! from integer determinants, exit probabilities from dense LU solves of
//! absorbing Markov chains (not from electrical flows), and goodness-of-fit
//! machinery is self-contained. Everything is small-scale and exact or
//! near machine precision by construction.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};

use crate::decompose::Decomposition;
use crate::exact;
use crate::graph::{Graph, VertexSubset};

#[derive(Debug, Clone, PartialEq)]
pub enum OracleError {
    /// Enumeration would exceed the configured cap.
    CapExceeded { cap: usize },
    /// A linear system had no usable pivot.
    Singular,
    /// A submitted sample is not a spanning tree of the graph.
    NotASpanningTree { index: usize },
    /// Exit probabilities toward cut vertices need a strong decomposition.
    NotStrong { vertex: u32 },
    /// Parameter outside its domain.
    InvalidInput { reason: &'static str },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::CapExceeded { cap } => {
                write!(f, "spanning tree enumeration exceeds cap {cap}")
            }
            OracleError::Singular => write!(f, "singular linear system"),
            OracleError::NotASpanningTree { index } => {
                write!(f, "sample {index} is not a spanning tree")
            }
            OracleError::NotStrong { vertex } => {
                write!(f, "cut edge endpoint {vertex} is not a cut vertex")
            }
            OracleError::InvalidInput { reason } => write!(f, "{reason}"),
        }
    }
}

/// Number of spanning trees by the matrix-tree theorem: any cofactor of
/// the integer Laplacian, evaluated exactly.
pub fn count_spanning_trees(g: &Graph) -> BigUint {
    let n = g.vertex_count();
    if n == 1 {
        return BigUint::from(1u32);
    }
    // Minor that deletes the last row and column.
    let k = n - 1;
    let mut rows = vec![vec![BigInt::from(0); k]; k];
    for v in 0..k {
        rows[v][v] = BigInt::from(g.degree(v as u32) as i64);
    }
    for &(u, v) in g.edges() {
        let (u, v) = (u as usize, v as usize);
        if u < k && v < k {
            rows[u][v] = BigInt::from(-1);
            rows[v][u] = BigInt::from(-1);
        }
    }
    exact::nonnegative_determinant(rows)
}

/// Union-find with union by size; no path compression so unions can be
/// undone in reverse order.
struct RollbackDsu {
    parent: Vec<u32>,
    size: Vec<u32>,
    log: Vec<(u32, u32)>,
}

impl RollbackDsu {
    fn new(n: usize) -> RollbackDsu {
        RollbackDsu { parent: (0..n as u32).collect(), size: vec![1; n], log: Vec::new() }
    }

    fn find(&self, mut v: u32) -> u32 {
        while self.parent[v as usize] != v {
            v = self.parent[v as usize];
        }
        v
    }

    /// Returns false if already joined; otherwise unions and logs.
    fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (small, big) = if self.size[ra as usize] <= self.size[rb as usize] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small as usize] = big;
        self.size[big as usize] += self.size[small as usize];
        self.log.push((small, big));
        true
    }

    fn checkpoint(&self) -> usize {
        self.log.len()
    }

    fn rollback(&mut self, checkpoint: usize) {
        while self.log.len() > checkpoint {
            let (small, big) = self.log.pop().unwrap();
            self.parent[small as usize] = small;
            self.size[big as usize] -= self.size[small as usize];
        }
    }
}

/// All spanning trees of `g`, each a sorted edge-id list, in lexicographic
/// order. Output-sensitive include/exclude search; fails fast once more
/// than `cap` trees exist.
pub fn enumerate_spanning_trees(g: &Graph, cap: usize) -> Result<Vec<Vec<u32>>, OracleError> {
    let n = g.vertex_count();
    let mut out: Vec<Vec<u32>> = Vec::new();
    let mut chosen: Vec<u32> = Vec::new();
    let mut dsu = RollbackDsu::new(n);

    // Viability: the chosen forest plus all not-yet-decided edges must
    // still connect the graph.
    fn viable(g: &Graph, dsu: &mut RollbackDsu, next: usize, components: usize) -> bool {
        let mark = dsu.checkpoint();
        let mut comps = components;
        for e in next..g.edge_count() {
            let (u, v) = g.edge_endpoints(e as u32);
            if dsu.union(u, v) {
                comps -= 1;
                if comps == 1 {
                    break;
                }
            }
        }
        dsu.rollback(mark);
        comps == 1
    }

    fn rec(
        g: &Graph,
        cap: usize,
        next: usize,
        components: usize,
        dsu: &mut RollbackDsu,
        chosen: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) -> Result<(), OracleError> {
        if components == 1 {
            if out.len() == cap {
                return Err(OracleError::CapExceeded { cap });
            }
            out.push(chosen.clone());
            return Ok(());
        }
        if next == g.edge_count() {
            return Ok(());
        }
        let (u, v) = g.edge_endpoints(next as u32);
        let mark = dsu.checkpoint();
        if dsu.union(u, v) {
            chosen.push(next as u32);
            rec(g, cap, next + 1, components - 1, dsu, chosen, out)?;
            chosen.pop();
            dsu.rollback(mark);
        }
        if viable(g, dsu, next + 1, components) {
            rec(g, cap, next + 1, components, dsu, chosen, out)?;
        }
        Ok(())
    }

    rec(g, cap, 0, n, &mut dsu, &mut chosen, &mut out)?;
    Ok(out)
}

/// Dense LU with partial pivoting; `a` is row-major `n x n`, `rhs` holds
/// column vectors. Solves all columns with one factorization.
fn lu_solve(mut a: Vec<f64>, n: usize, mut rhs: Vec<Vec<f64>>) -> Result<Vec<Vec<f64>>, OracleError> {
    for k in 0..n {
        let mut pivot = k;
        let mut best = libm::fabs(a[k * n + k]);
        for i in k + 1..n {
            let mag = libm::fabs(a[i * n + k]);
            if mag > best {
                best = mag;
                pivot = i;
            }
        }
        if best < 1e-300 {
            return Err(OracleError::Singular);
        }
        if pivot != k {
            for j in 0..n {
                a.swap(k * n + j, pivot * n + j);
            }
            for col in rhs.iter_mut() {
                col.swap(k, pivot);
            }
        }
        for i in k + 1..n {
            let f = a[i * n + k] / a[k * n + k];
            if f == 0.0 {
                continue;
            }
            a[i * n + k] = 0.0;
            for j in k + 1..n {
                a[i * n + j] -= f * a[k * n + j];
            }
            for col in rhs.iter_mut() {
                col[i] -= f * col[k];
            }
        }
    }
    for col in rhs.iter_mut() {
        for k in (0..n).rev() {
            let mut acc = col[k];
            for j in k + 1..n {
                acc -= a[k * n + j] * col[j];
            }
            col[k] = acc / a[k * n + k];
        }
    }
    Ok(rhs)
}

/// Probability, for every start vertex, that the simple random walk hits
/// `target` before any other vertex of `absorbing`.
pub fn absorbing_hit_probabilities(
    g: &Graph,
    absorbing: &VertexSubset,
    target: u32,
) -> Result<Vec<f64>, OracleError> {
    let n = g.vertex_count();
    if absorbing.is_empty() {
        return Err(OracleError::InvalidInput { reason: "absorbing set is empty" });
    }
    if !absorbing.contains(target) {
        return Err(OracleError::InvalidInput { reason: "target must be absorbing" });
    }
    let transient: Vec<u32> = (0..n as u32).filter(|&v| !absorbing.contains(v)).collect();
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in transient.iter().enumerate() {
        pos[v as usize] = i;
    }
    let nt = transient.len();
    let mut a = vec![0.0f64; nt * nt];
    let mut b = vec![0.0f64; nt];
    for (i, &v) in transient.iter().enumerate() {
        a[i * nt + i] = 1.0;
        let p = 1.0 / g.degree(v) as f64;
        for &w in g.neighbors(v) {
            if absorbing.contains(w) {
                if w == target {
                    b[i] += p;
                }
            } else {
                a[i * nt + pos[w as usize]] -= p;
            }
        }
    }
    let sol = if nt == 0 { Vec::new() } else { lu_solve(a, nt, vec![b])?.remove(0) };
    let mut h = vec![0.0f64; n];
    h[target as usize] = 1.0;
    for (i, &v) in transient.iter().enumerate() {
        h[v as usize] = sol[i];
    }
    Ok(h)
}

/// Exit probability matrix for one decomposition component: `rows[i][t]`
/// is the probability that the walk started at `vertices[i]` first leaves
/// the component via `targets[t]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExitMatrix {
    /// Component vertices, ascending.
    pub vertices: Vec<u32>,
    /// Target ids: cut edge ids, or cut vertex ids, ascending.
    pub targets: Vec<u32>,
    pub rows: Vec<Vec<f64>>,
}

/// Absorbing-chain solve with one absorbing state per incident cut edge:
/// the first cut edge the walk traverses out of component `comp`.
pub fn exit_edge_probabilities(
    g: &Graph,
    d: &Decomposition,
    comp: usize,
) -> Result<ExitMatrix, OracleError> {
    let member = d.component(comp);
    let targets: Vec<u32> = d.incident_cut_edges(comp).to_vec();
    chain_solve(g, member.ids(), &targets, |x, e| {
        if member.contains(x) {
            None
        } else {
            Some(e)
        }
    })
}

/// Absorbing-chain solve with one absorbing state per adjacent cut
/// vertex: the vertex through which the walk first leaves component
/// `comp`. Requires every neighbor outside the component to be a cut
/// vertex, i.e. a strong decomposition.
pub fn exit_vertex_probabilities(
    g: &Graph,
    d: &Decomposition,
    comp: usize,
) -> Result<ExitMatrix, OracleError> {
    let member = d.component(comp);
    let mut targets: Vec<u32> = Vec::new();
    for &e in d.incident_cut_edges(comp) {
        let (u, v) = g.edge_endpoints(e);
        let outside = if member.contains(u) { v } else { u };
        if d.component_of(outside).is_some() {
            return Err(OracleError::NotStrong { vertex: outside });
        }
        targets.push(outside);
    }
    targets.sort_unstable();
    targets.dedup();
    chain_solve(g, member.ids(), &targets, |x, _| {
        if member.contains(x) {
            None
        } else {
            Some(x)
        }
    })
}

/// `classify(neighbor, edge_id)` returns the absorbing target id for a
/// transition that leaves the transient set, `None` for internal moves.
fn chain_solve(
    g: &Graph,
    transient: &[u32],
    targets: &[u32],
    classify: impl Fn(u32, u32) -> Option<u32>,
) -> Result<ExitMatrix, OracleError> {
    let nt = transient.len();
    let mut pos = vec![usize::MAX; g.vertex_count()];
    for (i, &v) in transient.iter().enumerate() {
        pos[v as usize] = i;
    }
    let mut a = vec![0.0f64; nt * nt];
    let mut rhs: Vec<Vec<f64>> = vec![vec![0.0; nt]; targets.len()];
    for (i, &v) in transient.iter().enumerate() {
        a[i * nt + i] = 1.0;
        let p = 1.0 / g.degree(v) as f64;
        for (x, e) in g.neighbor_edges(v) {
            match classify(x, e) {
                None => a[i * nt + pos[x as usize]] -= p,
                Some(t) => {
                    let col = targets.binary_search(&t).expect("classified target must be listed");
                    rhs[col][i] += p;
                }
            }
        }
    }
    let sols = if nt == 0 || targets.is_empty() { rhs } else { lu_solve(a, nt, rhs)? };
    let rows = (0..nt).map(|i| sols.iter().map(|col| col[i]).collect()).collect();
    Ok(ExitMatrix { vertices: transient.to_vec(), targets: targets.to_vec(), rows })
}

/// Regularized lower incomplete gamma `P(s, x)`: series expansion below
/// `s + 1`, continued fraction above.
fn regularized_lower_gamma(s: f64, x: f64) -> f64 {
    debug_assert!(s > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    let log_prefactor = s * libm::log(x) - x - libm::lgamma(s);
    if x < s + 1.0 {
        let mut term = 1.0 / s;
        let mut sum = term;
        let mut denom = s;
        for _ in 0..500 {
            denom += 1.0;
            term *= x / denom;
            sum += term;
            if libm::fabs(term) < libm::fabs(sum) * 1e-16 {
                break;
            }
        }
        sum * libm::exp(log_prefactor)
    } else {
        // Modified Lentz evaluation of the upper-tail continued fraction.
        let tiny = 1e-300;
        let mut b = x + 1.0 - s;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -(i as f64) * (i as f64 - s);
            b += 2.0;
            d = an * d + b;
            if libm::fabs(d) < tiny {
                d = tiny;
            }
            c = b + an / c;
            if libm::fabs(c) < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if libm::fabs(del - 1.0) < 1e-16 {
                break;
            }
        }
        1.0 - libm::exp(log_prefactor) * h
    }
}

/// Chi-square CDF with `df` degrees of freedom.
fn chi_square_cdf(df: usize, x: f64) -> f64 {
    regularized_lower_gamma(df as f64 / 2.0, x / 2.0)
}

/// Upper critical value: the `x` with `P[X > x] = alpha` for a chi-square
/// variable with `df` degrees of freedom. Bisection to ~1e-10 relative.
pub fn chi_square_critical(df: usize, alpha: f64) -> f64 {
    assert!(df >= 1 && alpha > 0.0 && alpha < 1.0, "invalid critical value query");
    let target = 1.0 - alpha;
    let mut hi = df as f64 + 16.0;
    while chi_square_cdf(df, hi) < target {
        hi *= 2.0;
    }
    let mut lo = 0.0f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if chi_square_cdf(df, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Pearson statistic of `counts` against the uniform distribution over
/// its cells.
pub fn chi_square_statistic(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum()
}

/// Total variation distance between the empirical distribution of
/// `counts` and the uniform distribution over its cells.
pub fn tv_distance_uniform(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let uniform = 1.0 / counts.len() as f64;
    0.5 * counts
        .iter()
        .map(|&c| libm::fabs(c as f64 / total as f64 - uniform))
        .sum::<f64>()
}

/// Uniformity verdict for a batch of sampled spanning trees.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionReport {
    /// Number of distinct spanning trees of the graph.
    pub support: usize,
    pub samples: usize,
    /// Occurrences per spanning tree, indexed like the enumeration order.
    pub counts: Vec<u64>,
    pub observed_distinct: usize,
    pub chi_square: f64,
    pub degrees_of_freedom: usize,
    pub alpha: f64,
    pub critical_value: f64,
    pub tv_distance: f64,
    pub tv_threshold: f64,
}

impl DistributionReport {
    pub fn passes(&self) -> bool {
        self.chi_square < self.critical_value && self.tv_distance <= self.tv_threshold
    }
}

/// Tests sampled trees (sorted edge-id lists) for uniformity over all
/// spanning trees of `g`. Any sample that is not a spanning tree is a
/// hard error, not a statistical failure.
pub fn uniformity_test(
    g: &Graph,
    samples: &[Vec<u32>],
    alpha: f64,
    tv_threshold: f64,
    cap: usize,
) -> Result<DistributionReport, OracleError> {
    if samples.is_empty() {
        return Err(OracleError::InvalidInput { reason: "no samples" });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(OracleError::InvalidInput { reason: "alpha must be in (0, 1)" });
    }
    let trees = enumerate_spanning_trees(g, cap)?;
    let index: BTreeMap<&[u32], usize> =
        trees.iter().enumerate().map(|(i, t)| (t.as_slice(), i)).collect();
    let mut counts = vec![0u64; trees.len()];
    let mut sorted = Vec::new();
    for (i, sample) in samples.iter().enumerate() {
        sorted.clear();
        sorted.extend_from_slice(sample);
        sorted.sort_unstable();
        match index.get(sorted.as_slice()) {
            Some(&t) => counts[t] += 1,
            None => return Err(OracleError::NotASpanningTree { index: i }),
        }
    }
    let df = trees.len() - 1;
    let chi_square = chi_square_statistic(&counts);
    let tv_distance = tv_distance_uniform(&counts);
    let observed_distinct = counts.iter().filter(|&&c| c > 0).count();
    Ok(DistributionReport {
        support: trees.len(),
        samples: samples.len(),
        counts,
        observed_distinct,
        chi_square,
        degrees_of_freedom: df,
        alpha,
        critical_value: chi_square_critical(df.max(1), alpha),
        tv_distance,
        tv_threshold,
    })
}

/// Exhaustively lists the arborescences of a quotient digraph rooted at
/// `root`, down to the concrete parent edge per gap: each completion is
/// the ascending-node list of `(node, arc index, parent vertex)`.
/// Brute force over all incoming choices, keeping the acyclic ones.
pub fn enumerate_quotient_arborescences(
    q: &crate::arborescence::QuotientDigraph,
    root: usize,
) -> Vec<Vec<(usize, usize, u32)>> {
    let r = q.node_count();
    let nodes: Vec<usize> = (0..r).filter(|&l| l != root).collect();
    // (arc index, parent vertex, source node) per non-root node.
    let options: Vec<Vec<(usize, u32, usize)>> = nodes
        .iter()
        .map(|&l| {
            q.arcs
                .iter()
                .enumerate()
                .filter(|(_, a)| a.to == l)
                .flat_map(|(ai, a)| a.parents.iter().map(move |&p| (ai, p, a.from)))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    if options.iter().any(Vec::is_empty) {
        return out;
    }
    let mut pick = vec![0usize; nodes.len()];
    loop {
        let mut parent_node = vec![usize::MAX; r];
        for (i, &l) in nodes.iter().enumerate() {
            parent_node[l] = options[i][pick[i]].2;
        }
        let acyclic = nodes.iter().all(|&l| {
            let mut cur = l;
            let mut hops = 0;
            while cur != root {
                cur = parent_node[cur];
                hops += 1;
                if hops > r {
                    return false;
                }
            }
            true
        });
        if acyclic {
            out.push(
                nodes
                    .iter()
                    .enumerate()
                    .map(|(i, &l)| (l, options[i][pick[i]].0, options[i][pick[i]].1))
                    .collect(),
            );
        }
        // Odometer over the choice space.
        let mut i = 0;
        loop {
            if i == pick.len() {
                out.sort();
                return out;
            }
            pick[i] += 1;
            if pick[i] < options[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}
