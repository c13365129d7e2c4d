//! Acceptance gate: every stated guarantee of the sampler stack, each
//! reported as a single PASS/FAIL line with its measured detail.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::Rng;

use spanwalk_core::arborescence::{
    count_arborescences, sample_quotient_arborescence, QuotientArc, QuotientDigraph,
};
use spanwalk_core::decompose::{strong_decompose, verify_decomposition, Decomposition};
use spanwalk_core::generators;
use spanwalk_core::graph::Graph;
use spanwalk_core::oracle;
use spanwalk_core::pipeline::{rng_for_sample, Algorithm, SamplerConfig, TreeSampler};
use spanwalk_core::tables::{compute_p, compute_q};

fn report(name: &str, pass: bool, detail: &str) {
    println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{name}: {detail}");
}

#[test]
fn counting_oracle_exact_values() {
    let t0 = Instant::now();
    let cases: Vec<(&str, Graph, &str)> = vec![
        ("triangle", generators::cycle(3), "3"),
        ("K4", generators::complete(4), "16"),
        ("K5", generators::complete(5), "125"),
        ("grid-3x3", generators::grid(3, 3), "192"),
        ("grid-2x3", generators::grid(2, 3), "15"),
    ];
    let mut bad = Vec::new();
    for (name, g, want) in &cases {
        let got = oracle::count_spanning_trees(g).to_string();
        if got != *want {
            bad.push(format!("{name}: {got} != {want}"));
        }
    }
    let elapsed = t0.elapsed();
    let pass = bad.is_empty() && elapsed.as_secs_f64() < 1.0;
    report(
        "counting oracle",
        pass,
        &format!("5 closed-form counts in {:.3}s {}", elapsed.as_secs_f64(), bad.join("; ")),
    );
}

/// Connected vertex subset: BFS from `start`, capped at `limit`
/// vertices, avoiding `forbidden`.
fn bfs_subset(g: &Graph, start: u32, limit: usize, forbidden: &BTreeSet<u32>) -> Vec<u32> {
    let mut seen = BTreeSet::new();
    let mut queue = std::collections::VecDeque::from([start]);
    seen.insert(start);
    while let Some(u) = queue.pop_front() {
        if seen.len() >= limit {
            break;
        }
        for &w in g.neighbors(u) {
            if seen.len() >= limit {
                break;
            }
            if !seen.contains(&w) && !forbidden.contains(&w) {
                seen.insert(w);
                queue.push_back(w);
            }
        }
    }
    seen.into_iter().collect()
}

#[test]
fn exit_probability_fidelity() {
    let t0 = Instant::now();
    let mut components_checked = 0usize;
    let mut max_err = 0.0f64;
    let mut inst = 0u64;
    while components_checked < 10 {
        inst += 1;
        let mut rng = rng_for_sample(7100, inst);
        let n: u32 = rng.gen_range(40..=240);
        let p = 2.0 * (n as f64).ln() / n as f64;
        let g = generators::erdos_renyi_connected(n, p, 7100 + inst);
        // One or two mutually non-adjacent components; the rest is S.
        let comp1 = bfs_subset(&g, rng.gen_range(0..n), (n as usize / 3).min(200), &BTreeSet::new());
        let mut forbidden: BTreeSet<u32> = comp1.iter().copied().collect();
        for &v in &comp1 {
            forbidden.extend(g.neighbors(v).iter().copied());
        }
        let mut comps = vec![comp1];
        if let Some(seed_vertex) = (0..n).find(|v| !forbidden.contains(v)) {
            let comp2 = bfs_subset(&g, seed_vertex, n as usize / 5, &forbidden);
            if !comp2.is_empty() {
                comps.push(comp2);
            }
        }
        let d = match Decomposition::from_parts(&g, comps, 0.3, true) {
            Ok(d) => d,
            Err(_) => continue,
        };
        for c in 0..d.component_count() {
            if d.incident_cut_edges(c).is_empty() {
                continue;
            }
            let p_rows = compute_p(&g, &d, c, 1e-6).unwrap();
            let p_oracle = oracle::exit_edge_probabilities(&g, &d, c).unwrap();
            assert_eq!(p_rows.targets, p_oracle.targets);
            for (row, oracle_row) in p_rows.rows.iter().zip(&p_oracle.rows) {
                for (a, b) in row.iter().zip(oracle_row) {
                    max_err = max_err.max((a - b).abs());
                }
            }
            let q_rows = compute_q(&g, &d, c, 1e-6).unwrap();
            let q_oracle = oracle::exit_vertex_probabilities(&g, &d, c).unwrap();
            assert_eq!(q_rows.targets, q_oracle.targets);
            for (row, oracle_row) in q_rows.rows.iter().zip(&q_oracle.rows) {
                for (a, b) in row.iter().zip(oracle_row) {
                    max_err = max_err.max((a - b).abs());
                }
            }
            components_checked += 1;
        }
    }
    let elapsed = t0.elapsed();
    let pass = max_err <= 1e-8 && elapsed.as_secs_f64() < 30.0;
    report(
        "exit probability fidelity",
        pass,
        &format!(
            "{components_checked} components, max |table - chain oracle| = {max_err:.2e} in {:.2}s",
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn gamblers_ruin_exact() {
    let mut max_err = 0.0f64;
    for n in [4u32, 10, 50] {
        let g = generators::path(n + 1);
        let interior: Vec<u32> = (1..n).collect();
        let d = Decomposition::from_parts(&g, vec![interior], 0.3, true).unwrap();
        let p = compute_p(&g, &d, 0, 1e-6).unwrap();
        let far = g.edge_id_between(n - 1, n).unwrap();
        let col = p.targets.iter().position(|&t| t == far).unwrap();
        for (i, &v) in p.vertices.iter().enumerate() {
            let want = v as f64 / n as f64;
            max_err = max_err.max((p.rows[i][col] - want).abs());
        }
    }
    let pass = max_err <= 1e-10;
    report(
        "gambler's ruin",
        pass,
        &format!("paths n in {{4,10,50}}, max |P_k - k/n| = {max_err:.2e}"),
    );
}

#[test]
fn decomposition_invariants_on_the_corpus() {
    let t0 = Instant::now();
    let corpus: Vec<(&str, Graph)> = vec![
        ("K4", generators::complete(4)),
        ("grid-3x3", generators::grid(3, 3)),
        ("grid-5x5", generators::grid(5, 5)),
        ("grid-10x10", generators::grid(10, 10)),
        ("grid-20x20", generators::grid(20, 20)),
        ("er-500", generators::erdos_renyi_connected(500, 0.02, 1234)),
        ("lollipop-420", generators::lollipop(20, 400)),
    ];
    let mut failures = Vec::new();
    let mut checked = 0usize;
    for (name, g) in &corpus {
        let n = g.vertex_count() as f64;
        for phi in [0.1, 0.25, 1.0 / n.sqrt()] {
            let d = strong_decompose(g, phi).unwrap();
            let rep = verify_decomposition(g, &d);
            checked += 1;
            if !rep.pass() {
                for clause in rep.clauses {
                    if !clause.pass {
                        failures.push(format!("{name} phi={phi:.3} {}: {}", clause.name, clause.detail));
                    }
                }
            }
        }
    }
    let elapsed = t0.elapsed();
    let pass = failures.is_empty() && elapsed.as_secs_f64() < 10.0;
    report(
        "decomposition invariants",
        pass,
        &format!(
            "{checked} graph/phi cells verified in {:.2}s {}",
            elapsed.as_secs_f64(),
            failures.join("; ")
        ),
    );
}

const ALGORITHMS: [(Algorithm, &str); 4] = [
    (Algorithm::AldousBroder, "aldous-broder"),
    (Algorithm::Wilson, "wilson"),
    (Algorithm::ShortcutEdge, "shortcut-edge"),
    (Algorithm::ShortcutVertex, "shortcut-vertex"),
];

/// Runs `seeds.len()` batches of `n` samples through the sampler and
/// counts how many batches pass the chi-square + TV gates.
fn seed_batch_passes(g: &Graph, sampler: &TreeSampler, seeds: &[u64], n: usize) -> usize {
    let mut passes = 0;
    for &seed in seeds {
        let mut samples = Vec::with_capacity(n);
        for i in 0..n {
            let mut rng = rng_for_sample(seed, i as u64);
            samples.push(sampler.sample_tree(&mut rng).unwrap());
        }
        let rep = oracle::uniformity_test(g, &samples, 0.001, 0.02, 1000).unwrap();
        if rep.passes() {
            passes += 1;
        }
    }
    passes
}

#[test]
fn end_to_end_uniformity() {
    let t0 = Instant::now();
    let graphs: Vec<(&str, Graph)> = vec![
        ("K4", generators::complete(4)),
        ("grid-3x3", generators::grid(3, 3)),
        ("K23", generators::complete_bipartite(2, 3)),
    ];
    let seeds = [201u64, 202, 203, 204, 205];
    let n = 100_000;
    let mut cells = Vec::new();
    let mut worst = 5usize;
    for (gname, g) in &graphs {
        for (alg, aname) in ALGORITHMS {
            let sampler = TreeSampler::new(g, &SamplerConfig::new(alg)).unwrap();
            let passes = seed_batch_passes(g, &sampler, &seeds, n);
            worst = worst.min(passes);
            cells.push(format!("{gname}/{aname}={passes}/5"));
        }
    }
    let pass = worst >= 4;
    report(
        "end-to-end uniformity",
        pass,
        &format!(
            "10^5 samples per cell, seed passes [{}] in {:.0}s",
            cells.join(" "),
            t0.elapsed().as_secs_f64()
        ),
    );
}

#[test]
fn quotient_sampler_matches_enumeration() {
    let mut rng = rng_for_sample(606, 0);
    let mut tested = 0usize;
    let mut worst_tv = 0.0f64;
    let mut count_mismatch = false;
    while tested < 20 {
        let r = rng.gen_range(3..=6usize);
        let mut arcs: Vec<QuotientArc> = Vec::new();
        let mut next_label = 100u32;
        for l in 1..r {
            // A guaranteed incoming arc from a lower node keeps the
            // instance completable.
            let mut take = |from: usize, to: usize, rng: &mut dyn rand::RngCore| {
                let mult = (rng.next_u32() % 2 + 1) as usize;
                let parents: Vec<u32> = (0..mult)
                    .map(|_| {
                        next_label += 1;
                        next_label
                    })
                    .collect();
                QuotientArc { from, to, parents }
            };
            let forced_from = rng.gen_range(0..l);
            arcs.push(take(forced_from, l, &mut rng));
            for from in 0..r {
                if from != l && from != forced_from && rng.gen_bool(0.35) {
                    arcs.push(take(from, l, &mut rng));
                }
            }
        }
        let q = QuotientDigraph {
            members: (0..r).map(|j| vec![j as u32]).collect(),
            gap_of: (0..r).map(|j| if j == 0 { None } else { Some(j as u32) }).collect(),
            arcs,
        };
        let listed = oracle::enumerate_quotient_arborescences(&q, 0);
        if listed.is_empty() || listed.len() > 150 {
            continue;
        }
        if count_arborescences(&q, 0).to_string() != listed.len().to_string() {
            count_mismatch = true;
        }
        let n = 20_000;
        let mut counts = std::collections::BTreeMap::new();
        for i in 0..n {
            let mut srng = rng_for_sample(777, tested as u64 * n as u64 + i as u64);
            let choices = sample_quotient_arborescence(&q, 0, &mut srng).unwrap();
            let key: Vec<(usize, usize, u32)> =
                choices.iter().map(|c| (c.node, c.arc_index, c.parent)).collect();
            *counts.entry(key).or_insert(0u64) += 1;
        }
        for key in counts.keys() {
            assert!(listed.contains(key), "sampled completion outside enumeration");
        }
        let tv: f64 = listed
            .iter()
            .map(|key| {
                let c = counts.get(key).copied().unwrap_or(0);
                (c as f64 / n as f64 - 1.0 / listed.len() as f64).abs()
            })
            .sum::<f64>()
            / 2.0;
        worst_tv = worst_tv.max(tv);
        tested += 1;
    }
    let pass = !count_mismatch && worst_tv <= 0.05;
    report(
        "quotient sampler",
        pass,
        &format!("20 random quotients, counts exact, worst TV = {worst_tv:.4} at 2*10^4 samples"),
    );
}

#[test]
fn forced_fallback_stays_uniform() {
    let t0 = Instant::now();
    let g = generators::complete(4);
    let seeds = [301u64, 302, 303, 304, 305];
    let n = 100_000;
    let mut cells = Vec::new();
    let mut worst = 5usize;
    for (alg, aname) in [
        (Algorithm::ShortcutEdge, "shortcut-edge"),
        (Algorithm::ShortcutVertex, "shortcut-vertex"),
    ] {
        // A real component/S split so shortcuts would normally fire,
        // with the threshold forced down to 10 transcript steps.
        let d = Decomposition::from_parts(&g, vec![vec![0]], 0.4, true).unwrap();
        let mut cfg = SamplerConfig::new(alg);
        cfg.fallback_threshold = Some(10);
        let sampler = TreeSampler::with_decomposition(&g, d, &cfg).unwrap();
        let mut saw_fallback = false;
        for i in 0..200 {
            let mut rng = rng_for_sample(300, i);
            let (_, stats) = sampler.sample_tree_with_stats(&mut rng).unwrap();
            saw_fallback |= stats.fallback;
        }
        assert!(saw_fallback, "threshold 10 never engaged the fallback");
        let passes = seed_batch_passes(&g, &sampler, &seeds, n);
        worst = worst.min(passes);
        cells.push(format!("{aname}={passes}/5"));
    }
    let pass = worst >= 4;
    report(
        "fallback correctness",
        pass,
        &format!(
            "threshold 10 on K4, seed passes [{}] in {:.0}s",
            cells.join(" "),
            t0.elapsed().as_secs_f64()
        ),
    );
}

#[test]
fn shortcutting_reduces_transcripts_on_the_lollipop() {
    let g = generators::lollipop(20, 400);
    let ab = TreeSampler::new(&g, &SamplerConfig::new(Algorithm::AldousBroder)).unwrap();
    let sv = TreeSampler::new(&g, &SamplerConfig::new(Algorithm::ShortcutVertex)).unwrap();
    let pairs = 100u64;
    let mut sum_ab = 0f64;
    let mut sum_sv = 0f64;
    for i in 0..pairs {
        let mut rng = rng_for_sample(8000, i);
        let (_, stats) = ab.sample_tree_with_stats(&mut rng).unwrap();
        sum_ab += stats.transcript_len() as f64;
        let mut rng = rng_for_sample(8000, i);
        let (_, stats) = sv.sample_tree_with_stats(&mut rng).unwrap();
        sum_sv += stats.transcript_len() as f64;
    }
    let mean_ab = sum_ab / pairs as f64;
    let mean_sv = sum_sv / pairs as f64;
    let pass = mean_sv < mean_ab;
    report(
        "shortcutting direction",
        pass,
        &format!(
            "lollipop(K20+400): mean shortcut transcript {mean_sv:.0} vs plain {mean_ab:.0}, ratio {:.3}",
            mean_sv / mean_ab
        ),
    );
}
