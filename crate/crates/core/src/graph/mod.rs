//! Undirected simple graphs with 1-based vertex ids, and their Laplacians.

mod io;
mod lobster;

use std::collections::{BTreeSet, VecDeque};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::Vertex;

pub use io::{parse_dot, parse_graph, parse_graph_json, read_graph_file, serialize_graph};
pub use lobster::{
    attachment_profile, build_lobster, find_spine, random_lobster, AttachmentProfile, LobsterSpec,
    SpineLoad, ATTACH_CONFIGS,
};

/// Undirected, unweighted simple graph on vertices `1..=n`.
///
/// Edges are stored canonically as `(i, j)` with `i < j`, sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
    adj: Vec<Vec<Vertex>>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicate edges (in either
    /// orientation) and out-of-range ids.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (i, j) in edges {
            if i == j {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {i}")));
            }
            for v in [i, j] {
                if v == 0 || v > n {
                    return Err(Error::InvalidGraph(format!(
                        "edge [{i},{j}]: vertex id {v} out of range 1..={n}"
                    )));
                }
            }
            let e = (i.min(j), i.max(j));
            if !set.insert(e) {
                return Err(Error::InvalidGraph(format!("duplicate edge [{i},{j}]")));
            }
        }
        let mut adj = vec![Vec::new(); n];
        for &(i, j) in &set {
            adj[i - 1].push(j);
            adj[j - 1].push(i);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph {
            n,
            edges: set.into_iter().collect(),
            adj,
        })
    }

    pub fn path(n: usize) -> Self {
        Graph::new(n, (1..n).map(|i| (i, i + 1))).expect("path edges are valid")
    }

    pub fn complete(n: usize) -> Self {
        let edges = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j)));
        Graph::new(n, edges).expect("complete graph edges are valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        1..=self.n
    }

    /// Sorted neighbour list of `v`.
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v - 1]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v - 1].len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj[u - 1].binary_search(&v).is_ok()
    }

    /// BFS distances from `src`; `None` for unreachable vertices. Index `v - 1`.
    /// Neighbours are expanded in increasing id order.
    pub fn bfs(&self, src: Vertex) -> (Vec<Option<usize>>, Vec<Option<Vertex>>) {
        let mut dist = vec![None; self.n];
        let mut parent = vec![None; self.n];
        let mut queue = VecDeque::new();
        dist[src - 1] = Some(0);
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            let du = dist[u - 1].unwrap();
            for &w in self.neighbors(u) {
                if dist[w - 1].is_none() {
                    dist[w - 1] = Some(du + 1);
                    parent[w - 1] = Some(u);
                    queue.push_back(w);
                }
            }
        }
        (dist, parent)
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.bfs(1).0.iter().all(Option::is_some)
    }

    pub fn is_tree(&self) -> bool {
        self.n >= 1 && self.edges.len() == self.n - 1 && self.is_connected()
    }

    /// Vertices of `s` adjacent to `v` (the neighbourhood of `v` restricted to `s`).
    pub fn neighbors_in(&self, v: Vertex, s: &[Vertex]) -> Vec<Vertex> {
        s.iter().copied().filter(|&u| self.has_edge(v, u)).collect()
    }

    /// FNV-1a hash over `n` and the canonical edge list.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |x: u64| {
            for b in x.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        };
        eat(self.n as u64);
        for &(i, j) in &self.edges {
            eat(i as u64);
            eat(j as u64);
        }
        h
    }
}

/// `L = Δ − D`: degrees on the diagonal, −1 on edges.
pub fn laplacian(g: &Graph) -> DMatrix<i64> {
    let n = g.n();
    let mut l = DMatrix::<i64>::zeros(n, n);
    for &(i, j) in g.edges() {
        l[(i - 1, j - 1)] = -1;
        l[(j - 1, i - 1)] = -1;
        l[(i - 1, i - 1)] += 1;
        l[(j - 1, j - 1)] += 1;
    }
    l
}
