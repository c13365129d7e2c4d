//! Electrical-flow solves on weighted auxiliary graphs.
//!
//! Exit probabilities reduce to two-terminal voltage problems: fix the
//! source at 1 and the sink at 0 and read harmonic voltages everywhere
//! else. Gadget graphs are built by accumulating edge weights (parallel
//! contributions merge by summation), and solved either by dense Cholesky
//! on the reduced system or, past [`DIRECT_SOLVE_LIMIT`] vertices, by
//! Jacobi-preconditioned conjugate gradients on the same operator.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Largest gadget handed to the dense Cholesky path; bigger systems use
/// conjugate gradients. Dense factorization is exact to rounding and
/// cheap at this scale.
pub const DIRECT_SOLVE_LIMIT: usize = 2000;

/// Iteration allowance for conjugate gradients, as a multiple of the
/// system size.
const CG_ITERATION_FACTOR: usize = 20;

/// Relative-residual floor for conjugate gradients; requested tolerances
/// looser than this are tightened to it.
const CG_RESIDUAL_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum SolverError {
    /// Source or sink invalid (equal, or out of range).
    InvalidTerminals { source: u32, sink: u32 },
    /// The system has no unique solution; for gadgets this means a
    /// disconnected graph.
    Singular,
    /// Conjugate gradients missed the residual target within its
    /// iteration budget.
    NonConvergence { iterations: usize, residual: f64 },
}

impl fmt::Display for SolverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverError::InvalidTerminals { source, sink } => {
                write!(f, "invalid terminal pair ({source}, {sink})")
            }
            SolverError::Singular => write!(f, "singular system (gadget not connected)"),
            SolverError::NonConvergence { iterations, residual } => {
                write!(f, "no convergence after {iterations} iterations (residual {residual:.3e})")
            }
        }
    }
}

/// Accumulates weighted edges; parallel contributions to the same vertex
/// pair sum into one conductance.
pub struct GadgetBuilder {
    n: u32,
    weights: BTreeMap<(u32, u32), f64>,
}

impl GadgetBuilder {
    pub fn new(n: u32) -> GadgetBuilder {
        GadgetBuilder { n, weights: BTreeMap::new() }
    }

    /// Adds `w > 0` of conductance between distinct vertices `u` and `v`.
    pub fn add_edge(&mut self, u: u32, v: u32, w: f64) {
        assert!(u < self.n && v < self.n && u != v, "bad gadget edge ({u}, {v})");
        assert!(w > 0.0, "gadget weights must be positive");
        *self.weights.entry((u.min(v), u.max(v))).or_insert(0.0) += w;
    }

    pub fn build(self) -> WeightedGadget {
        let n = self.n as usize;
        let mut adj: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
        let mut weighted_degree = vec![0.0f64; n];
        for (&(u, v), &w) in &self.weights {
            adj[u as usize].push((v, w));
            adj[v as usize].push((u, w));
            weighted_degree[u as usize] += w;
            weighted_degree[v as usize] += w;
        }
        WeightedGadget { adj, weighted_degree }
    }
}

/// Weighted undirected graph in adjacency form, with cached weighted
/// degrees (the Laplacian diagonal).
#[derive(Debug, Clone)]
pub struct WeightedGadget {
    adj: Vec<Vec<(u32, f64)>>,
    weighted_degree: Vec<f64>,
}

impl WeightedGadget {
    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: u32) -> &[(u32, f64)] {
        &self.adj[v as usize]
    }

    pub fn weighted_degree(&self, v: u32) -> f64 {
        self.weighted_degree[v as usize]
    }

    fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0u32];
        seen[0] = true;
        let mut reached = 1;
        while let Some(v) = stack.pop() {
            for &(w, _) in self.neighbors(v) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    reached += 1;
                    stack.push(w);
                }
            }
        }
        reached == n
    }
}

/// Graph Laplacian `L = D - W` as a dense matrix, mostly for inspection
/// and tests; the solvers work on the adjacency form directly.
pub fn build_laplacian(g: &WeightedGadget) -> Vec<Vec<f64>> {
    let n = g.vertex_count();
    let mut rows = vec![vec![0.0; n]; n];
    for v in 0..n {
        rows[v][v] = g.weighted_degree(v as u32);
        for &(w, wt) in g.neighbors(v as u32) {
            rows[v][w as usize] -= wt;
        }
    }
    rows
}

/// Voltages indexed by gadget vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct VoltageVector {
    pub values: Vec<f64>,
}

impl VoltageVector {
    pub fn value(&self, v: u32) -> f64 {
        self.values[v as usize]
    }
}

/// Harmonic voltages with `source` pinned to 1 and `sink` to 0.
///
/// Solves the reduced system `L' x = e_source` (sink row and column
/// deleted) and normalizes by `x[source]`, which grounds the sink; `tol`
/// is the relative-residual target for the iterative path and is ignored
/// by the direct one.
pub fn solve_two_terminal(
    g: &WeightedGadget,
    source: u32,
    sink: u32,
    tol: f64,
) -> Result<VoltageVector, SolverError> {
    let n = g.vertex_count();
    if source == sink || source as usize >= n || sink as usize >= n {
        return Err(SolverError::InvalidTerminals { source, sink });
    }
    if !g.is_connected() {
        return Err(SolverError::Singular);
    }
    // Reduced index space: every vertex except the sink keeps its order.
    let reduced: Vec<u32> = (0..n as u32).filter(|&v| v != sink).collect();
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in reduced.iter().enumerate() {
        pos[v as usize] = i;
    }
    let k = reduced.len();
    let mut b = vec![0.0f64; k];
    b[pos[source as usize]] = 1.0;

    let x = if n <= DIRECT_SOLVE_LIMIT {
        cholesky_solve(g, &reduced, &pos, b)?
    } else {
        cg_solve(g, &reduced, &pos, b, tol.min(CG_RESIDUAL_FLOOR))?
    };

    let scale = x[pos[source as usize]];
    if !(scale > 0.0) {
        return Err(SolverError::Singular);
    }
    let mut values = vec![0.0f64; n];
    for (i, &v) in reduced.iter().enumerate() {
        // Rounding can leave dust a hair outside [0, 1]; voltages between
        // grounded terminals are physically inside it.
        values[v as usize] = (x[i] / scale).clamp(0.0, 1.0);
    }
    Ok(VoltageVector { values })
}

/// Dense Cholesky on the reduced Laplacian. The reduced matrix of a
/// connected gadget is positive definite, so a nonpositive pivot means
/// singularity.
fn cholesky_solve(
    g: &WeightedGadget,
    reduced: &[u32],
    pos: &[usize],
    mut b: Vec<f64>,
) -> Result<Vec<f64>, SolverError> {
    let k = reduced.len();
    let mut a = vec![0.0f64; k * k];
    for (i, &v) in reduced.iter().enumerate() {
        a[i * k + i] = g.weighted_degree(v);
        for &(w, wt) in g.neighbors(v) {
            let j = pos[w as usize];
            if j != usize::MAX {
                a[i * k + j] -= wt;
            }
        }
    }
    // In-place LL^T factorization of the lower triangle.
    for j in 0..k {
        let mut d = a[j * k + j];
        for t in 0..j {
            d -= a[j * k + t] * a[j * k + t];
        }
        if d <= 0.0 {
            return Err(SolverError::Singular);
        }
        let ljj = libm::sqrt(d);
        a[j * k + j] = ljj;
        for i in j + 1..k {
            let mut s = a[i * k + j];
            for t in 0..j {
                s -= a[i * k + t] * a[j * k + t];
            }
            a[i * k + j] = s / ljj;
        }
    }
    // Forward then backward substitution, reusing b.
    for i in 0..k {
        let mut s = b[i];
        for t in 0..i {
            s -= a[i * k + t] * b[t];
        }
        b[i] = s / a[i * k + i];
    }
    for i in (0..k).rev() {
        let mut s = b[i];
        for t in i + 1..k {
            s -= a[t * k + i] * b[t];
        }
        b[i] = s / a[i * k + i];
    }
    Ok(b)
}

/// Jacobi-preconditioned conjugate gradients on the reduced Laplacian,
/// applied matrix-free from the adjacency lists.
fn cg_solve(
    g: &WeightedGadget,
    reduced: &[u32],
    pos: &[usize],
    b: Vec<f64>,
    tol: f64,
) -> Result<Vec<f64>, SolverError> {
    let k = reduced.len();
    let matvec = |x: &[f64], y: &mut [f64]| {
        for (i, &v) in reduced.iter().enumerate() {
            let mut acc = g.weighted_degree(v) * x[i];
            for &(w, wt) in g.neighbors(v) {
                let j = pos[w as usize];
                if j != usize::MAX {
                    acc -= wt * x[j];
                }
            }
            y[i] = acc;
        }
    };
    let inv_diag: Vec<f64> = reduced.iter().map(|&v| 1.0 / g.weighted_degree(v)).collect();
    let norm_b = libm::sqrt(b.iter().map(|&x| x * x).sum::<f64>());

    let mut x = vec![0.0f64; k];
    let mut r = b;
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(&ri, &di)| ri * di).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(&a, &b)| a * b).sum();
    let mut ap = vec![0.0f64; k];
    let cap = CG_ITERATION_FACTOR * k;
    for iter in 0..=cap {
        let rnorm = libm::sqrt(r.iter().map(|&v| v * v).sum::<f64>());
        if rnorm <= tol * norm_b {
            return Ok(x);
        }
        if iter == cap {
            return Err(SolverError::NonConvergence { iterations: cap, residual: rnorm / norm_b });
        }
        matvec(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(&a, &b)| a * b).sum();
        if !(pap > 0.0) {
            return Err(SolverError::Singular);
        }
        let alpha = rz / pap;
        for i in 0..k {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..k {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_next: f64 = r.iter().zip(&z).map(|(&a, &b)| a * b).sum();
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..k {
            p[i] = z[i] + beta * p[i];
        }
    }
    unreachable!("loop returns before exhausting the range")
}
