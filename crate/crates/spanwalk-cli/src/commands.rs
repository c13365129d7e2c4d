//! Subcommand implementations.

use std::io::{self, BufWriter, Read, Write};

use rayon::prelude::*;
use serde::Serialize;

use spanwalk_core::decompose::{gamma_bound, strong_decompose, verify_decomposition};
use spanwalk_core::graph::Graph;
use spanwalk_core::oracle::{self, OracleError};
use spanwalk_core::pipeline::{
    default_phi, rng_for_sample, Algorithm, PipelineError, SamplerConfig, TreeSampler,
};
use spanwalk_core::walk::{measure_cover_walk, StepStats};

use crate::{BenchArgs, CliError, CountArgs, DecomposeArgs, FormatArg, SampleArgs, VerifyArgs};

/// Reads an edge-list graph from a file path, or standard input for `-`.
fn read_graph(input: &str) -> Result<Graph, CliError> {
    let text = if input == "-" {
        let mut buf = String::new();
        io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| CliError::Parse(format!("standard input: {e}")))?;
        buf
    } else {
        std::fs::read_to_string(input).map_err(|e| CliError::Parse(format!("{input}: {e}")))?
    };
    Graph::parse(&text).map_err(|e| CliError::Parse(e.to_string()))
}

fn write_failed(e: io::Error) -> CliError {
    // The consumer closing the pipe early (e.g. `| head`) is not an error.
    if e.kind() == io::ErrorKind::BrokenPipe {
        std::process::exit(0);
    }
    CliError::Parse(format!("writing output: {e}"))
}

/// `writeln!` onto a command's output with the error mapping applied.
macro_rules! emit {
    ($out:expr $(, $($arg:tt)*)?) => {
        writeln!($out $(, $($arg)*)?).map_err(write_failed)?
    };
}

pub fn cmd_sample(args: &SampleArgs) -> Result<(), CliError> {
    if args.samples == 0 {
        return Err(CliError::Usage(String::from("sample count must be at least 1")));
    }
    let g = read_graph(&args.input)?;
    let mut config = SamplerConfig::new(args.algorithm.to_algorithm());
    config.delta = args.delta;
    config.phi = args.phi;
    config.eps = args.eps;
    config.fallback_threshold = args.fallback_threshold;
    let sampler = TreeSampler::new(&g, &config)?;

    let results: Result<Vec<(Vec<u32>, StepStats)>, _> = (0..args.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for_sample(args.seed, i);
            sampler.sample_tree_with_stats(&mut rng)
        })
        .collect();
    let results = results.map_err(CliError::from)?;

    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    for (i, (tree, stats)) in results.iter().enumerate() {
        if i > 0 {
            emit!(out);
        }
        match args.format {
            FormatArg::Edges => {
                for &e in tree {
                    let (u, v) = g.edge_endpoints(e);
                    emit!(out, "{u} {v}");
                }
            }
            FormatArg::Stats => {
                emit!(out, "sample_index={i}");
                emit!(out, "verbatim_steps={}", stats.verbatim_steps);
                emit!(out, "shortcut_jumps={}", stats.shortcut_jumps);
                emit!(out, "fallback={}", stats.fallback as u8);
                emit!(out, "transcript_length={}", stats.transcript_len());
            }
        }
    }
    out.flush().map_err(write_failed)
}

#[derive(Serialize)]
struct ClauseDoc {
    name: &'static str,
    pass: bool,
    detail: String,
}

#[derive(Serialize)]
struct VerificationDoc {
    pass: bool,
    clauses: Vec<ClauseDoc>,
}

#[derive(Serialize)]
struct DecompositionDoc {
    phi: f64,
    strong: bool,
    vertices: usize,
    edges: usize,
    components: Vec<Vec<u32>>,
    separator: Vec<u32>,
    cut_edges: Vec<[u32; 2]>,
    boundary_cut_vertices: Vec<u32>,
    component_diameter_bound: f64,
    verification: VerificationDoc,
}

pub fn cmd_decompose(args: &DecomposeArgs) -> Result<(), CliError> {
    let g = read_graph(&args.input)?;
    let phi = args.phi.unwrap_or_else(|| default_phi(&g));
    let d = strong_decompose(&g, phi).map_err(|e| CliError::Validation(e.to_string()))?;
    let report = verify_decomposition(&g, &d);
    let doc = DecompositionDoc {
        phi,
        strong: d.is_strong(),
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        components: d.components().iter().map(|c| c.ids().to_vec()).collect(),
        separator: (0..g.vertex_count() as u32).filter(|&v| d.component_of(v).is_none()).collect(),
        cut_edges: d
            .cut_edges()
            .iter()
            .map(|&e| {
                let (u, v) = g.edge_endpoints(e);
                [u, v]
            })
            .collect(),
        boundary_cut_vertices: d.boundary_cut_vertices().ids().to_vec(),
        component_diameter_bound: gamma_bound(phi, g.edge_count()),
        verification: VerificationDoc {
            pass: report.pass(),
            clauses: report
                .clauses
                .iter()
                .map(|c| ClauseDoc { name: c.name, pass: c.pass, detail: c.detail.clone() })
                .collect(),
        },
    };
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    emit!(out, "{}", serde_json::to_string_pretty(&doc).expect("decomposition document serializes"));
    out.flush().map_err(write_failed)?;
    if !report.pass() {
        return Err(CliError::Validation(String::from("decomposition failed verification")));
    }
    Ok(())
}

/// Parses blank-line-separated `u v` tree blocks over the graph's
/// canonical vertex ids, returning each tree as sorted edge ids.
fn parse_trees(g: &Graph, text: &str) -> Result<Vec<Vec<u32>>, CliError> {
    let n = g.vertex_count() as u32;
    let mut trees: Vec<Vec<u32>> = Vec::new();
    let mut current: Vec<u32> = Vec::new();
    let mut open = false;
    let close = |current: &mut Vec<u32>, trees: &mut Vec<Vec<u32>>| {
        let mut tree = core::mem::take(current);
        tree.sort_unstable();
        trees.push(tree);
    };
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            if open {
                close(&mut current, &mut trees);
                open = false;
            }
            continue;
        }
        let mut tokens = body.split_whitespace();
        let mut take = || -> Result<u32, CliError> {
            let tok = tokens
                .next()
                .ok_or_else(|| CliError::Parse(format!("line {line}: expected `u v`")))?;
            tok.parse::<u32>()
                .map_err(|_| CliError::Parse(format!("line {line}: invalid vertex {tok:?}")))
        };
        let u = take()?;
        let v = take()?;
        if tokens.next().is_some() {
            return Err(CliError::Parse(format!("line {line}: expected exactly two vertices")));
        }
        if u >= n || v >= n {
            return Err(CliError::Validation(format!(
                "line {line}: vertex {} outside the graph",
                u.max(v)
            )));
        }
        open = true;
        let e = g.edge_id_between(u, v).ok_or_else(|| {
            CliError::Validation(format!("line {line}: {u} {v} is not an edge of the graph"))
        })?;
        current.push(e);
    }
    if open {
        close(&mut current, &mut trees);
    }
    Ok(trees)
}

/// `n-1` edges and no cycle makes a spanning tree.
fn validate_spanning_tree(g: &Graph, tree: &[u32]) -> Result<(), String> {
    let n = g.vertex_count();
    if tree.len() != n - 1 {
        return Err(format!("{} edges where a spanning tree has {}", tree.len(), n - 1));
    }
    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            parent[x as usize] = parent[parent[x as usize] as usize];
            x = parent[x as usize];
        }
        x
    }
    let mut parent: Vec<u32> = (0..n as u32).collect();
    for &e in tree {
        let (u, v) = g.edge_endpoints(e);
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru == rv {
            return Err(String::from("contains a cycle"));
        }
        parent[ru as usize] = rv;
    }
    Ok(())
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<(), CliError> {
    if args.input == "-" {
        return Err(CliError::Usage(String::from(
            "standard input carries the trees; pass the graph as a file path",
        )));
    }
    let g = read_graph(&args.input)?;
    let mut text = String::new();
    io::stdin()
        .read_to_string(&mut text)
        .map_err(|e| CliError::Parse(format!("standard input: {e}")))?;
    let trees = parse_trees(&g, &text)?;
    if trees.is_empty() {
        return Err(CliError::Validation(String::from("no trees on standard input")));
    }
    for (i, tree) in trees.iter().enumerate() {
        validate_spanning_tree(&g, tree)
            .map_err(|why| CliError::Validation(format!("tree {i}: {why}")))?;
    }
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    emit!(out, "vertices={}", g.vertex_count());
    emit!(out, "edges={}", g.edge_count());
    emit!(out, "trees={}", trees.len());
    emit!(out, "valid={}", trees.len());
    if args.uniformity {
        let rep = oracle::uniformity_test(&g, &trees, args.alpha, args.tv_threshold, args.cap)
            .map_err(|e| match e {
                OracleError::CapExceeded { cap } => CliError::Validation(format!(
                    "graph has more than {cap} spanning trees; raise --cap"
                )),
                OracleError::InvalidInput { .. } => CliError::Usage(e.to_string()),
                other => CliError::Validation(other.to_string()),
            })?;
        emit!(out, "support={}", rep.support);
        emit!(out, "observed_distinct={}", rep.observed_distinct);
        emit!(out, "chi_square={:.6}", rep.chi_square);
        emit!(out, "degrees_of_freedom={}", rep.degrees_of_freedom);
        emit!(out, "critical_value={:.6}", rep.critical_value);
        emit!(out, "tv_distance={:.6}", rep.tv_distance);
        emit!(out, "tv_threshold={:.6}", rep.tv_threshold);
        emit!(out, "uniform={}", rep.passes() as u8);
        out.flush().map_err(write_failed)?;
        if !rep.passes() {
            return Err(CliError::Statistical(format!(
                "chi_square={:.3} (critical {:.3}), tv_distance={:.4} (threshold {:.4})",
                rep.chi_square, rep.critical_value, rep.tv_distance, rep.tv_threshold
            )));
        }
    }
    out.flush().map_err(write_failed)
}

pub fn cmd_count(args: &CountArgs) -> Result<(), CliError> {
    let g = read_graph(&args.input)?;
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    emit!(out, "{}", oracle::count_spanning_trees(&g));
    out.flush().map_err(write_failed)
}

pub fn cmd_bench(args: &BenchArgs) -> Result<(), CliError> {
    if args.samples == 0 {
        return Err(CliError::Usage(String::from("sample count must be at least 1")));
    }
    let g = read_graph(&args.input)?;
    let phi = args.phi.unwrap_or_else(|| default_phi(&g));
    let d = strong_decompose(&g, phi).map_err(|e| CliError::Validation(e.to_string()))?;
    let mut config = SamplerConfig::new(args.algorithm.to_algorithm());
    config.delta = args.delta;
    config.phi = Some(phi);
    config.fallback_threshold = args.fallback_threshold;
    let shortcut = matches!(config.algorithm, Algorithm::ShortcutEdge | Algorithm::ShortcutVertex);
    let sampler = if shortcut {
        TreeSampler::with_decomposition(&g, d.clone(), &config)?
    } else {
        TreeSampler::new(&g, &config)?
    };

    // Run i pairs the plain cover walk and the configured sampler on
    // the same stream, so both see identical randomness.
    let results: Result<Vec<(u64, u64, StepStats)>, PipelineError> = (0..args.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for_sample(args.seed, i);
            let (tau, z) = measure_cover_walk(&g, Some(&d), &mut rng);
            let mut rng = rng_for_sample(args.seed, i);
            let (_, stats) = sampler.sample_tree_with_stats(&mut rng)?;
            Ok((tau, z, stats))
        })
        .collect();
    let results = results.map_err(CliError::from)?;

    let runs = results.len() as f64;
    let mean_tau = results.iter().map(|r| r.0 as f64).sum::<f64>() / runs;
    let mean_z = results.iter().map(|r| r.1 as f64).sum::<f64>() / runs;
    let mean_verbatim = results.iter().map(|r| r.2.verbatim_steps as f64).sum::<f64>() / runs;
    let mean_jumps = results.iter().map(|r| r.2.shortcut_jumps as f64).sum::<f64>() / runs;
    let mean_transcript = results.iter().map(|r| r.2.transcript_len() as f64).sum::<f64>() / runs;
    let fallback_rate = results.iter().filter(|r| r.2.fallback).count() as f64 / runs;

    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    emit!(out, "vertices={}", g.vertex_count());
    emit!(out, "edges={}", g.edge_count());
    emit!(out, "phi={phi:.6}");
    emit!(out, "components={}", d.component_count());
    emit!(out, "cut_edges={}", d.cut_edges().len());
    emit!(out, "algorithm={}", args.algorithm.name());
    emit!(out, "samples={}", args.samples);
    emit!(out, "mean_cover_steps={mean_tau:.2}");
    emit!(out, "mean_cut_crossings={mean_z:.2}");
    emit!(out, "mean_verbatim_steps={mean_verbatim:.2}");
    emit!(out, "mean_shortcut_jumps={mean_jumps:.2}");
    emit!(out, "mean_transcript_length={mean_transcript:.2}");
    emit!(out, "fallback_rate={fallback_rate:.3}");
    emit!(out, "transcript_to_cover_ratio={:.4}", mean_transcript / mean_tau);
    out.flush().map_err(write_failed)
}
