//! Exit distributions for decomposition components and the cumulative
//! tables the shortcut walk samples from.
//!
//! For a component vertex `v`, the edge-exit distribution gives the
//! probability that the walk leaving the component first crosses each
//! incident cut edge; the vertex-exit distribution gives the cut vertex
//! through which it first leaves. Both reduce to two-terminal voltage
//! problems on a gadget built from the component: the probed exit keeps
//! its identity as the source while every competing exit is rewired into
//! a shared sink.
//!
//! Solved rows are renormalized to sum to exactly 1; a raw sum outside
//! `1 ± 10 * tol * row_len` signals a broken solve and is an error, not
//! something to silently rescale away.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::decompose::Decomposition;
use crate::graph::Graph;
use crate::laplacian::{solve_two_terminal, GadgetBuilder, SolverError};

/// Failures while building or sampling exit tables.
#[derive(Debug, Clone, PartialEq)]
pub enum TableError {
    /// The underlying voltage solve failed.
    Solver(SolverError),
    /// A renormalization guard tripped: the raw row sum strayed too far
    /// from 1 for the requested accuracy.
    RowSumOutOfRange { vertex: u32, sum: f64 },
    /// Vertex-exit distributions need a strong decomposition.
    NeedsStrong,
    /// Sampled vertex is not covered by this table.
    UnknownVertex { vertex: u32 },
    /// The component has no exits to sample.
    NoExits { component: usize },
    /// `eps` must be a positive finite accuracy budget.
    InvalidEps { eps: f64 },
}

impl fmt::Display for TableError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableError::Solver(e) => write!(f, "exit solve failed: {e}"),
            TableError::RowSumOutOfRange { vertex, sum } => {
                write!(f, "row sum {sum} at vertex {vertex} outside tolerance band")
            }
            TableError::NeedsStrong => {
                write!(f, "vertex-exit tables require a strong decomposition")
            }
            TableError::UnknownVertex { vertex } => {
                write!(f, "vertex {vertex} not in table")
            }
            TableError::NoExits { component } => {
                write!(f, "component {component} has no exits")
            }
            TableError::InvalidEps { eps } => write!(f, "invalid eps {eps}"),
        }
    }
}

impl From<SolverError> for TableError {
    fn from(e: SolverError) -> TableError {
        TableError::Solver(e)
    }
}

/// Per-sample accuracy budget sized so that a whole run of table lookups
/// stays within `delta`: `eps = delta / (m * n)`.
pub fn default_epsilon(delta: f64, g: &Graph) -> f64 {
    delta / (g.edge_count() as f64 * g.vertex_count() as f64)
}

/// More conservative budget `eps = delta / n^5`, for runs where the
/// number of table lookups cannot be bounded by the step count.
pub fn conservative_epsilon(delta: f64, g: &Graph) -> f64 {
    let n = g.vertex_count() as f64;
    delta / (n * n * n * n * n)
}

fn solver_tolerance(eps: f64, g: &Graph) -> Result<f64, TableError> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(TableError::InvalidEps { eps });
    }
    Ok(eps / (4.0 * g.vertex_count() as f64))
}

/// Edge-exit probabilities for one component: `rows[i][t]` is the chance
/// that the walk at `vertices[i]` leaves the component through cut edge
/// `targets[t]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExitDistributionP {
    pub component: usize,
    /// Component vertices, ascending.
    pub vertices: Vec<u32>,
    /// Incident cut edge ids, ascending.
    pub targets: Vec<u32>,
    /// Renormalized rows; each sums to 1 within rounding.
    pub rows: Vec<Vec<f64>>,
    /// Row sums before renormalization, kept for diagnostics.
    pub raw_row_sums: Vec<f64>,
}

/// Vertex-exit probabilities for one component: `rows[i][t]` is the
/// chance that the walk at `vertices[i]` first leaves the component into
/// cut vertex `targets[t]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExitDistributionQ {
    pub component: usize,
    pub vertices: Vec<u32>,
    /// Adjacent cut vertices, ascending.
    pub targets: Vec<u32>,
    pub rows: Vec<Vec<f64>>,
    pub raw_row_sums: Vec<f64>,
}

/// Edge-exit distribution of component `comp` via one voltage solve per
/// incident cut edge.
pub fn compute_p(
    g: &Graph,
    d: &Decomposition,
    comp: usize,
    eps: f64,
) -> Result<ExitDistributionP, TableError> {
    let tol = solver_tolerance(eps, g)?;
    let member = d.component(comp);
    let vertices: Vec<u32> = member.ids().to_vec();
    let targets: Vec<u32> = d.incident_cut_edges(comp).to_vec();
    let nv = vertices.len();

    if targets.is_empty() {
        return Ok(ExitDistributionP {
            component: comp,
            vertices,
            targets,
            rows: vec![Vec::new(); nv],
            raw_row_sums: vec![0.0; nv],
        });
    }
    if targets.len() == 1 {
        // The only exit is certain; no solve needed.
        return Ok(ExitDistributionP {
            component: comp,
            vertices,
            targets,
            rows: vec![vec![1.0]; nv],
            raw_row_sums: vec![1.0; nv],
        });
    }

    let mut pos = vec![usize::MAX; g.vertex_count()];
    for (i, &v) in vertices.iter().enumerate() {
        pos[v as usize] = i;
    }
    let source = nv as u32;
    let sink = nv as u32 + 1;
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(targets.len());
    for &probe in &targets {
        let mut b = GadgetBuilder::new(nv as u32 + 2);
        for (i, &v) in vertices.iter().enumerate() {
            for &w in g.neighbors(v) {
                if w > v && member.contains(w) {
                    b.add_edge(i as u32, pos[w as usize] as u32, 1.0);
                }
            }
        }
        for &e in &targets {
            let (x, y) = g.edge_endpoints(e);
            let inside = if member.contains(x) { x } else { y };
            let local = pos[inside as usize] as u32;
            // The probed exit stays distinct as the source; every rival
            // exit is rewired into the shared sink.
            b.add_edge(local, if e == probe { source } else { sink }, 1.0);
        }
        let v = solve_two_terminal(&b.build(), source, sink, tol)?;
        columns.push((0..nv).map(|i| v.values[i]).collect());
    }
    let (rows, raw_row_sums) = renormalize(&vertices, &columns, nv, tol)?;
    Ok(ExitDistributionP { component: comp, vertices, targets, rows, raw_row_sums })
}

/// Vertex-exit distribution of component `comp` via one voltage solve per
/// adjacent cut vertex. Requires a strong decomposition, where every exit
/// lands on a cut vertex.
pub fn compute_q(
    g: &Graph,
    d: &Decomposition,
    comp: usize,
    eps: f64,
) -> Result<ExitDistributionQ, TableError> {
    let tol = solver_tolerance(eps, g)?;
    if !d.is_strong() {
        return Err(TableError::NeedsStrong);
    }
    let member = d.component(comp);
    let vertices: Vec<u32> = member.ids().to_vec();
    let cut_edges = d.incident_cut_edges(comp);
    let nv = vertices.len();

    let mut targets: Vec<u32> = Vec::new();
    for &e in cut_edges {
        let (x, y) = g.edge_endpoints(e);
        targets.push(if member.contains(x) { y } else { x });
    }
    targets.sort_unstable();
    targets.dedup();

    if targets.is_empty() {
        return Ok(ExitDistributionQ {
            component: comp,
            vertices,
            targets,
            rows: vec![Vec::new(); nv],
            raw_row_sums: vec![0.0; nv],
        });
    }
    if targets.len() == 1 {
        return Ok(ExitDistributionQ {
            component: comp,
            vertices,
            targets,
            rows: vec![vec![1.0]; nv],
            raw_row_sums: vec![1.0; nv],
        });
    }

    let mut pos = vec![usize::MAX; g.vertex_count()];
    for (i, &v) in vertices.iter().enumerate() {
        pos[v as usize] = i;
    }
    let source = nv as u32;
    let sink = nv as u32 + 1;
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(targets.len());
    for &probe in &targets {
        let mut b = GadgetBuilder::new(nv as u32 + 2);
        for (i, &v) in vertices.iter().enumerate() {
            for &w in g.neighbors(v) {
                if w > v && member.contains(w) {
                    b.add_edge(i as u32, pos[w as usize] as u32, 1.0);
                }
            }
        }
        for &e in cut_edges {
            let (x, y) = g.edge_endpoints(e);
            let (inside, outside) = if member.contains(x) { (x, y) } else { (y, x) };
            let local = pos[inside as usize] as u32;
            // Cut edges into the probed vertex feed the source; the rest
            // of the cut boundary merges into the sink.
            b.add_edge(local, if outside == probe { source } else { sink }, 1.0);
        }
        let v = solve_two_terminal(&b.build(), source, sink, tol)?;
        columns.push((0..nv).map(|i| v.values[i]).collect());
    }
    let (rows, raw_row_sums) = renormalize(&vertices, &columns, nv, tol)?;
    Ok(ExitDistributionQ { component: comp, vertices, targets, rows, raw_row_sums })
}

/// Transposes solve columns into per-vertex rows, guards the raw sums
/// against drift beyond `10 * tol * row_len`, and scales each row to sum
/// to exactly 1.
fn renormalize(
    vertices: &[u32],
    columns: &[Vec<f64>],
    nv: usize,
    tol: f64,
) -> Result<(Vec<Vec<f64>>, Vec<f64>), TableError> {
    let band = 10.0 * tol * columns.len() as f64;
    let mut rows = Vec::with_capacity(nv);
    let mut raw = Vec::with_capacity(nv);
    for i in 0..nv {
        let mut row: Vec<f64> = columns.iter().map(|c| c[i]).collect();
        let sum: f64 = row.iter().sum();
        if !((sum - 1.0).abs() <= band) {
            return Err(TableError::RowSumOutOfRange { vertex: vertices[i], sum });
        }
        for p in row.iter_mut() {
            *p /= sum;
        }
        raw.push(sum);
        rows.push(row);
    }
    Ok((rows, raw))
}

/// What a table's targets mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    /// Targets are cut edge ids.
    Edge,
    /// Targets are cut vertex ids.
    Vertex,
}

/// Cumulative sampling table for one component: row per component
/// vertex, binary-searched with one uniform draw per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionTable {
    kind: ExitKind,
    component: usize,
    vertices: Vec<u32>,
    targets: Vec<u32>,
    /// Per vertex: nondecreasing partial sums ending at exactly 1.
    cumulative: Vec<Vec<f64>>,
}

impl TransitionTable {
    pub fn from_p(dist: &ExitDistributionP) -> TransitionTable {
        TransitionTable::build(ExitKind::Edge, dist.component, &dist.vertices, &dist.targets, &dist.rows)
    }

    pub fn from_q(dist: &ExitDistributionQ) -> TransitionTable {
        TransitionTable::build(ExitKind::Vertex, dist.component, &dist.vertices, &dist.targets, &dist.rows)
    }

    fn build(
        kind: ExitKind,
        component: usize,
        vertices: &[u32],
        targets: &[u32],
        rows: &[Vec<f64>],
    ) -> TransitionTable {
        let cumulative = rows
            .iter()
            .map(|row| {
                let mut acc = 0.0;
                let mut cum: Vec<f64> = row
                    .iter()
                    .map(|&p| {
                        acc += p;
                        acc
                    })
                    .collect();
                if let Some(last) = cum.last_mut() {
                    // Pin the tail so a draw of r close to 1 cannot fall off.
                    *last = 1.0;
                }
                cum
            })
            .collect();
        TransitionTable {
            kind,
            component,
            vertices: vertices.to_vec(),
            targets: targets.to_vec(),
            cumulative,
        }
    }

    pub fn kind(&self) -> ExitKind {
        self.kind
    }

    pub fn component(&self) -> usize {
        self.component
    }

    pub fn targets(&self) -> &[u32] {
        &self.targets
    }

    pub fn vertices(&self) -> &[u32] {
        &self.vertices
    }

    /// Cumulative row for `v`, if `v` belongs to the component.
    pub fn cumulative_row(&self, v: u32) -> Option<&[f64]> {
        self.vertices.binary_search(&v).ok().map(|i| self.cumulative[i].as_slice())
    }

    /// Draws an exit target for the walk sitting at `v`: one uniform
    /// variate, one binary search.
    pub fn sample_exit<R: Rng + ?Sized>(&self, v: u32, rng: &mut R) -> Result<u32, TableError> {
        let row = match self.vertices.binary_search(&v) {
            Ok(i) => &self.cumulative[i],
            Err(_) => return Err(TableError::UnknownVertex { vertex: v }),
        };
        if row.is_empty() {
            return Err(TableError::NoExits { component: self.component });
        }
        let r = rng.gen::<f64>();
        let idx = row.partition_point(|&c| c <= r);
        Ok(self.targets[idx.min(row.len() - 1)])
    }
}

/// Sampling tables for every component of a decomposition; components
/// without exits carry no table.
#[derive(Debug, Clone, PartialEq)]
pub struct TableSet {
    kind: ExitKind,
    tables: Vec<Option<TransitionTable>>,
}

impl TableSet {
    /// Edge-exit tables for all components.
    pub fn build_edge_tables(g: &Graph, d: &Decomposition, eps: f64) -> Result<TableSet, TableError> {
        let mut tables = Vec::with_capacity(d.component_count());
        for comp in 0..d.component_count() {
            if d.incident_cut_edges(comp).is_empty() {
                tables.push(None);
            } else {
                tables.push(Some(TransitionTable::from_p(&compute_p(g, d, comp, eps)?)));
            }
        }
        Ok(TableSet { kind: ExitKind::Edge, tables })
    }

    /// Vertex-exit tables for all components.
    pub fn build_vertex_tables(g: &Graph, d: &Decomposition, eps: f64) -> Result<TableSet, TableError> {
        let mut tables = Vec::with_capacity(d.component_count());
        for comp in 0..d.component_count() {
            if d.incident_cut_edges(comp).is_empty() {
                tables.push(None);
            } else {
                tables.push(Some(TransitionTable::from_q(&compute_q(g, d, comp, eps)?)));
            }
        }
        Ok(TableSet { kind: ExitKind::Vertex, tables })
    }

    pub fn kind(&self) -> ExitKind {
        self.kind
    }

    pub fn table(&self, comp: usize) -> Option<&TransitionTable> {
        self.tables.get(comp).and_then(Option::as_ref)
    }
}
