#![allow(dead_code)]

use lobster_core::graph::{build_lobster, random_lobster};
use lobster_core::Graph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random labelled tree on `n` vertices (random parent for each vertex).
pub fn random_tree(n: usize, rng: &mut ChaCha8Rng) -> Graph {
    let edges: Vec<(usize, usize)> = (2..=n).map(|v| (rng.random_range(1..v), v)).collect();
    Graph::new(n, edges).unwrap()
}

/// Random connected graph: a random tree plus each other pair with probability `p`.
pub fn random_connected(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
    let tree = random_tree(n, rng);
    let mut edges = tree.edges().to_vec();
    for i in 1..=n {
        for j in i + 1..=n {
            if !tree.has_edge(i, j) && rng.random_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Graph::new(n, edges).unwrap()
}

/// Random lobster from the default generator with at most `max_vertices` vertices.
pub fn small_lobster(seed: u64, max_vertices: usize) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let spine = rng.random_range(3..=max_vertices / 2 + 1);
        let g = build_lobster(&random_lobster(spine, rng.random(), 2).unwrap()).unwrap();
        if g.n() <= max_vertices {
            return g;
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Nonempty leader sets of `1..=n` as sorted vertex lists, from bitmasks.
pub fn all_leader_sets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..(1 << n)).map(move |m| (1..=n).filter(|v| m >> (v - 1) & 1 == 1).collect())
}
