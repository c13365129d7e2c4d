//! End-to-end tree samplers: decompose once, solve the exit tables
//! once, then draw trees by repeated walks.
//!
//! The vertex-shortcut sampler finishes each walk with forest
//! completion. The arcs of every boundary cut vertex except the root
//! are unknowable from that walk's transcript — not just the ones that
//! happened to be jumped into — so completion drops them all and
//! resamples the whole set jointly through the quotient digraph.
//! Resampling only the actual gap set would condition on which vertices
//! were jumped into and bias the tree distribution.

use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::arborescence::{
    build_quotient, complete, extract, sample_quotient_arborescence, Arborescence,
    ArborescenceError,
};
use crate::decompose::{strong_decompose, Decomposition, DecomposeError};
use crate::graph::Graph;
use crate::tables::{conservative_epsilon, default_epsilon, TableError, TableSet};
use crate::walk::{
    self, default_fallback_threshold, PartialForest, StepStats, WalkError, UNSET,
};

/// Tree-sampling algorithms offered by the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    AldousBroder,
    Wilson,
    ShortcutEdge,
    ShortcutVertex,
}

/// Knobs for building a [`TreeSampler`]. `None` fields take the
/// defaults: `phi = 1/sqrt(n)`, `eps = delta/(m*n)` (or `delta/n^5`
/// when `conservative_eps` is set), fallback threshold `m*n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    pub algorithm: Algorithm,
    pub delta: f64,
    pub phi: Option<f64>,
    pub eps: Option<f64>,
    pub conservative_eps: bool,
    pub fallback_threshold: Option<u64>,
}

impl SamplerConfig {
    pub fn new(algorithm: Algorithm) -> SamplerConfig {
        SamplerConfig {
            algorithm,
            delta: 0.01,
            phi: None,
            eps: None,
            conservative_eps: false,
            fallback_threshold: None,
        }
    }
}

/// Pipeline failures, wrapping the stage that broke.
#[derive(Debug, Clone, PartialEq)]
pub enum PipelineError {
    InvalidConfig { reason: &'static str },
    Decompose(DecomposeError),
    Table(TableError),
    Walk(WalkError),
    Completion(ArborescenceError),
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PipelineError::InvalidConfig { reason } => write!(f, "invalid config: {reason}"),
            PipelineError::Decompose(e) => write!(f, "decomposition failed: {e}"),
            PipelineError::Table(e) => write!(f, "table construction failed: {e}"),
            PipelineError::Walk(e) => write!(f, "walk failed: {e}"),
            PipelineError::Completion(e) => write!(f, "completion failed: {e}"),
        }
    }
}

impl From<DecomposeError> for PipelineError {
    fn from(e: DecomposeError) -> PipelineError {
        PipelineError::Decompose(e)
    }
}
impl From<TableError> for PipelineError {
    fn from(e: TableError) -> PipelineError {
        PipelineError::Table(e)
    }
}
impl From<WalkError> for PipelineError {
    fn from(e: WalkError) -> PipelineError {
        PipelineError::Walk(e)
    }
}
impl From<ArborescenceError> for PipelineError {
    fn from(e: ArborescenceError) -> PipelineError {
        PipelineError::Completion(e)
    }
}

/// Default decomposition radius parameter `1/sqrt(n)`, nudged into the
/// valid open interval for degenerate single-vertex inputs.
pub fn default_phi(g: &Graph) -> f64 {
    let n = g.vertex_count();
    if n <= 1 {
        0.5
    } else {
        1.0 / libm::sqrt(n as f64)
    }
}

/// Generator for sample `index` of a batch: stream `index` of the
/// master-seeded generator, so batches can run concurrently and still
/// reproduce byte-for-byte.
pub fn rng_for_sample(master_seed: u64, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

enum SamplerKind {
    AldousBroder,
    Wilson { root: u32 },
    Shortcut { d: Decomposition, tables: TableSet, vertex_mode: bool, threshold: u64 },
}

/// A configured sampler: decomposition and tables are built once in the
/// constructor and shared by every draw.
pub struct TreeSampler<'a> {
    g: &'a Graph,
    eps: Option<f64>,
    kind: SamplerKind,
}

impl<'a> TreeSampler<'a> {
    pub fn new(g: &'a Graph, config: &SamplerConfig) -> Result<TreeSampler<'a>, PipelineError> {
        if !(config.delta.is_finite() && config.delta > 0.0) {
            return Err(PipelineError::InvalidConfig { reason: "delta must be positive and finite" });
        }
        let kind = match config.algorithm {
            Algorithm::AldousBroder => SamplerKind::AldousBroder,
            Algorithm::Wilson => SamplerKind::Wilson { root: 0 },
            Algorithm::ShortcutEdge | Algorithm::ShortcutVertex => {
                let phi = config.phi.unwrap_or_else(|| default_phi(g));
                let d = strong_decompose(g, phi)?;
                return TreeSampler::with_decomposition(g, d, config);
            }
        };
        Ok(TreeSampler { g, eps: None, kind })
    }

    /// Builds a shortcut sampler over a caller-supplied decomposition
    /// instead of the ball-growing default.
    pub fn with_decomposition(
        g: &'a Graph,
        d: Decomposition,
        config: &SamplerConfig,
    ) -> Result<TreeSampler<'a>, PipelineError> {
        let vertex_mode = match config.algorithm {
            Algorithm::ShortcutEdge => false,
            Algorithm::ShortcutVertex => true,
            _ => {
                return Err(PipelineError::InvalidConfig {
                    reason: "decomposition applies only to shortcut algorithms",
                })
            }
        };
        if let Some(eps) = config.eps {
            if !(eps.is_finite() && eps > 0.0) {
                return Err(PipelineError::InvalidConfig { reason: "eps must be positive and finite" });
            }
        }
        let eps = config.eps.unwrap_or_else(|| {
            if config.conservative_eps {
                conservative_epsilon(config.delta, g)
            } else {
                default_epsilon(config.delta, g)
            }
        });
        let tables = if vertex_mode {
            TableSet::build_vertex_tables(g, &d, eps)?
        } else {
            TableSet::build_edge_tables(g, &d, eps)?
        };
        let threshold = config.fallback_threshold.unwrap_or_else(|| default_fallback_threshold(g));
        Ok(TreeSampler {
            g,
            eps: Some(eps),
            kind: SamplerKind::Shortcut { d, tables, vertex_mode, threshold },
        })
    }

    pub fn graph(&self) -> &Graph {
        self.g
    }

    /// Accuracy budget actually used for the tables, for shortcut
    /// samplers.
    pub fn epsilon(&self) -> Option<f64> {
        self.eps
    }

    pub fn decomposition(&self) -> Option<&Decomposition> {
        match &self.kind {
            SamplerKind::Shortcut { d, .. } => Some(d),
            _ => None,
        }
    }

    pub fn tables(&self) -> Option<&TableSet> {
        match &self.kind {
            SamplerKind::Shortcut { tables, .. } => Some(tables),
            _ => None,
        }
    }

    /// Draws one spanning tree as sorted edge ids.
    pub fn sample_tree<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<u32>, PipelineError> {
        self.sample_tree_with_stats(rng).map(|(tree, _)| tree)
    }

    /// Draws one spanning tree plus the walk's transcript accounting
    /// (zeroed for the Wilson baseline, which is not a first-entry walk).
    pub fn sample_tree_with_stats<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Result<(Vec<u32>, StepStats), PipelineError> {
        match &self.kind {
            SamplerKind::AldousBroder => {
                let (a, stats) = walk::aldous_broder_with_stats(self.g, rng);
                Ok((crate::arborescence::to_tree(&a, self.g), stats))
            }
            SamplerKind::Wilson { root } => {
                Ok((walk::wilson(self.g, *root, rng), StepStats::default()))
            }
            SamplerKind::Shortcut { d, tables, vertex_mode, threshold } => {
                let (forest, stats) =
                    walk::simulate_shortcut_with_threshold(self.g, d, tables, *threshold, rng)?;
                let a = if *vertex_mode {
                    complete_vertex_forest(self.g, d, forest, rng)?
                } else {
                    extract(self.g, &forest)?
                };
                Ok((crate::arborescence::to_tree(&a, self.g), stats))
            }
        }
    }
}

/// Completion for vertex-shortcut walks: forget the arcs of every
/// boundary cut vertex other than the root, then draw the whole set
/// uniformly from the completions of the remaining forest.
fn complete_vertex_forest<R: Rng + ?Sized>(
    g: &Graph,
    d: &Decomposition,
    mut pf: PartialForest,
    rng: &mut R,
) -> Result<Arborescence, PipelineError> {
    let gaps: Vec<u32> = d
        .boundary_cut_vertices()
        .ids()
        .iter()
        .copied()
        .filter(|&v| v != pf.root)
        .collect();
    for &v in &gaps {
        pf.entered_from[v as usize] = UNSET;
    }
    pf.gaps = gaps;
    if pf.gaps.is_empty() {
        return Ok(extract(g, &pf)?);
    }
    let q = build_quotient(g, &pf)?;
    let choices = sample_quotient_arborescence(&q, 0, rng)?;
    Ok(complete(g, &pf, &choices)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::Decomposition;
    use crate::generators;
    use crate::oracle;
    use alloc::collections::BTreeMap;
    use alloc::vec;

    fn sampler_cfg(algorithm: Algorithm) -> SamplerConfig {
        SamplerConfig::new(algorithm)
    }

    fn distribution(
        sampler: &TreeSampler,
        n: usize,
        seed: u64,
    ) -> BTreeMap<Vec<u32>, u64> {
        let mut counts = BTreeMap::new();
        for i in 0..n {
            let mut rng = rng_for_sample(seed, i as u64);
            let tree = sampler.sample_tree(&mut rng).unwrap();
            *counts.entry(tree).or_insert(0u64) += 1;
        }
        counts
    }

    fn assert_uniform(counts: &BTreeMap<Vec<u32>, u64>, support: usize, samples: usize) {
        assert_eq!(counts.len(), support);
        let raw: Vec<u64> = counts.values().copied().collect();
        let chi = oracle::chi_square_statistic(&raw);
        let crit = oracle::chi_square_critical(support - 1, 0.001);
        assert!(chi < crit, "chi-square {chi} over critical {crit}");
        let tv = oracle::tv_distance_uniform(&raw);
        assert!(tv < 0.03, "tv {tv}");
        assert_eq!(raw.iter().sum::<u64>(), samples as u64);
    }

    #[test]
    fn vertex_shortcut_with_completion_is_uniform_on_k4() {
        // Single-vertex component forces a jump on every re-entry, so
        // almost every tree goes through quotient completion; the
        // frequencies over all 16 trees must stay uniform.
        let g = generators::complete(4);
        let d = Decomposition::from_parts(&g, vec![vec![0]], 0.4, true).unwrap();
        let mut cfg = sampler_cfg(Algorithm::ShortcutVertex);
        cfg.phi = Some(0.4);
        let sampler = TreeSampler::with_decomposition(&g, d, &cfg).unwrap();
        let counts = distribution(&sampler, 20_000, 424242);
        assert_uniform(&counts, 16, 20_000);
    }

    #[test]
    fn edge_shortcut_is_uniform_on_the_cycle() {
        let g = generators::cycle(6);
        let sampler = TreeSampler::new(&g, &{
            let mut c = sampler_cfg(Algorithm::ShortcutEdge);
            c.phi = Some(0.5);
            c
        })
        .unwrap();
        assert!(sampler.decomposition().unwrap().component_count() >= 1);
        let counts = distribution(&sampler, 18_000, 7);
        assert_uniform(&counts, 6, 18_000);
    }

    #[test]
    fn all_four_algorithms_agree_on_the_path() {
        let g = generators::path(5);
        let unique: Vec<u32> = (0..4).collect();
        for alg in [
            Algorithm::AldousBroder,
            Algorithm::Wilson,
            Algorithm::ShortcutEdge,
            Algorithm::ShortcutVertex,
        ] {
            let sampler = TreeSampler::new(&g, &sampler_cfg(alg)).unwrap();
            let mut rng = rng_for_sample(1, 0);
            assert_eq!(sampler.sample_tree(&mut rng).unwrap(), unique, "{alg:?}");
        }
    }

    #[test]
    fn trivial_decomposition_runs_both_shortcut_modes() {
        // K4 at the default phi decomposes into one exitless component,
        // so shortcut samplers degrade gracefully to the plain walk.
        let g = generators::complete(4);
        for alg in [Algorithm::ShortcutEdge, Algorithm::ShortcutVertex] {
            let sampler = TreeSampler::new(&g, &sampler_cfg(alg)).unwrap();
            let d = sampler.decomposition().unwrap();
            assert_eq!(d.component_count(), 1);
            assert!(d.cut_edges().is_empty());
            let mut rng = rng_for_sample(3, 1);
            let (tree, stats) = sampler.sample_tree_with_stats(&mut rng).unwrap();
            assert_eq!(tree.len(), 3);
            assert_eq!(stats.shortcut_jumps, 0);
        }
    }

    #[test]
    fn forced_fallback_still_samples_valid_trees() {
        let g = generators::grid(3, 3);
        let mut cfg = sampler_cfg(Algorithm::ShortcutVertex);
        cfg.phi = Some(1.0 / 3.0);
        cfg.fallback_threshold = Some(3);
        let sampler = TreeSampler::new(&g, &cfg).unwrap();
        let mut saw_fallback = false;
        for i in 0..50 {
            let mut rng = rng_for_sample(11, i);
            let (tree, stats) = sampler.sample_tree_with_stats(&mut rng).unwrap();
            assert_eq!(tree.len(), 8);
            saw_fallback |= stats.fallback;
        }
        assert!(saw_fallback);
    }

    #[test]
    fn batch_streams_reproduce_and_differ() {
        let g = generators::grid(3, 3);
        let sampler = TreeSampler::new(&g, &sampler_cfg(Algorithm::ShortcutEdge)).unwrap();
        let draw = |seed, index| {
            let mut rng = rng_for_sample(seed, index);
            sampler.sample_tree(&mut rng).unwrap()
        };
        assert_eq!(draw(99, 5), draw(99, 5));
        let base = draw(99, 0);
        assert!((1..40).any(|i| draw(99, i) != base), "streams never diverged");
    }

    #[test]
    fn config_validation() {
        let g = generators::complete(4);
        let mut cfg = sampler_cfg(Algorithm::ShortcutEdge);
        cfg.delta = 0.0;
        assert!(matches!(
            TreeSampler::new(&g, &cfg),
            Err(PipelineError::InvalidConfig { .. })
        ));
        let mut cfg = sampler_cfg(Algorithm::ShortcutEdge);
        cfg.phi = Some(1.5);
        assert!(matches!(TreeSampler::new(&g, &cfg), Err(PipelineError::Decompose(_))));
        let mut cfg = sampler_cfg(Algorithm::ShortcutVertex);
        cfg.eps = Some(-1.0);
        assert!(matches!(
            TreeSampler::new(&g, &cfg),
            Err(PipelineError::InvalidConfig { .. })
        ));
        let cfg = sampler_cfg(Algorithm::AldousBroder);
        let d = crate::decompose::strong_decompose(&g, 0.5).unwrap();
        assert!(matches!(
            TreeSampler::with_decomposition(&g, d, &cfg),
            Err(PipelineError::InvalidConfig { .. })
        ));
    }

    #[test]
    fn single_vertex_graph_samples_the_empty_tree() {
        let g = crate::graph::Graph::from_edge_list(1, &[]).unwrap();
        for alg in [
            Algorithm::AldousBroder,
            Algorithm::Wilson,
            Algorithm::ShortcutEdge,
            Algorithm::ShortcutVertex,
        ] {
            let sampler = TreeSampler::new(&g, &sampler_cfg(alg)).unwrap();
            let mut rng = rng_for_sample(0, 0);
            assert_eq!(sampler.sample_tree(&mut rng).unwrap(), Vec::<u32>::new());
        }
    }
}
