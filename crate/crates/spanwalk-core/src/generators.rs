//! Constructors for the standard test and benchmark graphs.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::graph::Graph;

/// Complete graph on `n >= 1` vertices.
pub fn complete(n: u32) -> Graph {
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            pairs.push((u, v));
        }
    }
    Graph::from_edge_list(n, &pairs).expect("complete graph is valid")
}

/// Path on `n >= 1` vertices: `0 - 1 - ... - n-1`.
pub fn path(n: u32) -> Graph {
    let pairs: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
    Graph::from_edge_list(n, &pairs).expect("path is valid")
}

/// Cycle on `n >= 3` vertices.
pub fn cycle(n: u32) -> Graph {
    assert!(n >= 3, "cycle needs at least 3 vertices");
    let mut pairs: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
    pairs.push((0, n - 1));
    Graph::from_edge_list(n, &pairs).expect("cycle is valid")
}

/// Star with center 0 and `leaves >= 1` leaves.
pub fn star(leaves: u32) -> Graph {
    let pairs: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
    Graph::from_edge_list(leaves + 1, &pairs).expect("star is valid")
}

/// `rows x cols` grid, vertices numbered row-major.
pub fn grid(rows: u32, cols: u32) -> Graph {
    assert!(rows >= 1 && cols >= 1);
    let mut pairs = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                pairs.push((v, v + 1));
            }
            if r + 1 < rows {
                pairs.push((v, v + cols));
            }
        }
    }
    Graph::from_edge_list(rows * cols, &pairs).expect("grid is valid")
}

/// Complete bipartite graph with sides `{0..a}` and `{a..a+b}`.
pub fn complete_bipartite(a: u32, b: u32) -> Graph {
    let mut pairs = Vec::new();
    for u in 0..a {
        for v in a..a + b {
            pairs.push((u, v));
        }
    }
    Graph::from_edge_list(a + b, &pairs).expect("complete bipartite graph is valid")
}

/// Clique on `{0..clique}` with a path of `tail` extra vertices attached
/// to vertex 0.
pub fn lollipop(clique: u32, tail: u32) -> Graph {
    assert!(clique >= 1);
    let mut pairs = Vec::new();
    for u in 0..clique {
        for v in u + 1..clique {
            pairs.push((u, v));
        }
    }
    let mut prev = 0u32;
    for v in clique..clique + tail {
        pairs.push((prev, v));
        prev = v;
    }
    Graph::from_edge_list(clique + tail, &pairs).expect("lollipop is valid")
}

/// Erdos-Renyi graph `G(n, p)`, resampled until connected.
///
/// Deterministic in `(n, p, seed)`; panics if 1000 draws all come out
/// disconnected, which signals an unreasonably small `p`.
pub fn erdos_renyi_connected(n: u32, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    for _ in 0..1000 {
        let mut pairs = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    pairs.push((u, v));
                }
            }
        }
        match Graph::from_edge_list(n, &pairs) {
            Ok(g) => return g,
            Err(_) => continue,
        }
    }
    panic!("no connected G({n}, {p}) sample in 1000 draws");
}
