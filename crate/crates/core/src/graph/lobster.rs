//! Lobsters (2-distant trees): construction from a spine description, seeded
//! random generation, spine extraction and per-spine-vertex attachment profiles.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};
use crate::Vertex;

/// The six attachment configurations a spine vertex can carry (multisets of
/// pasted path lengths), in the order the generator indexes them.
pub const ATTACH_CONFIGS: [&[u8]; 6] = [&[], &[1], &[2], &[1, 1], &[1, 2], &[2, 2]];

/// Generative description of a lobster: a spine path `v1..v_spine_len` and, per
/// spine vertex, the lengths (1 or 2) of the paths pasted onto it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct LobsterSpec {
    attach: Vec<Vec<u8>>,
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    spine_len: usize,
    attach: Vec<Vec<u8>>,
}

impl TryFrom<RawSpec> for LobsterSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        if raw.attach.len() != raw.spine_len {
            return Err(Error::InvalidSpec(format!(
                "spine_len is {} but attach has {} entries",
                raw.spine_len,
                raw.attach.len()
            )));
        }
        LobsterSpec::new(raw.attach)
    }
}

impl From<LobsterSpec> for RawSpec {
    fn from(spec: LobsterSpec) -> Self {
        RawSpec {
            spine_len: spec.attach.len(),
            attach: spec.attach,
        }
    }
}

impl LobsterSpec {
    pub fn new(attach: Vec<Vec<u8>>) -> Result<Self> {
        if attach.len() < 2 {
            return Err(Error::InvalidSpec(format!(
                "spine_len must be at least 2, got {}",
                attach.len()
            )));
        }
        for (i, paths) in attach.iter().enumerate() {
            if let Some(bad) = paths.iter().find(|&&l| l != 1 && l != 2) {
                return Err(Error::InvalidSpec(format!(
                    "spine vertex {}: path length {bad} is not 1 or 2",
                    i + 1
                )));
            }
        }
        let attach = attach
            .into_iter()
            .map(|mut p| {
                p.sort_unstable();
                p
            })
            .collect();
        Ok(LobsterSpec { attach })
    }

    /// A bare spine.
    pub fn bare(spine_len: usize) -> Result<Self> {
        LobsterSpec::new(vec![Vec::new(); spine_len])
    }

    pub fn spine_len(&self) -> usize {
        self.attach.len()
    }

    pub fn attach(&self) -> &[Vec<u8>] {
        &self.attach
    }

    /// Total vertex count of the realised tree.
    pub fn vertex_count(&self) -> usize {
        self.spine_len() + self.attach.iter().flatten().map(|&l| l as usize).sum::<usize>()
    }
}

/// Realises a spec as a tree. Spine vertices get ids `1..=spine_len` in path
/// order; attachment vertices follow, spine vertex by spine vertex, a 2-path
/// numbered inner vertex first, then its tip.
pub fn build_lobster(spec: &LobsterSpec) -> Result<Graph> {
    let k = spec.spine_len();
    let mut edges: Vec<(Vertex, Vertex)> = (1..k).map(|i| (i, i + 1)).collect();
    let mut next = k + 1;
    for (i, paths) in spec.attach().iter().enumerate() {
        let v = i + 1;
        for &len in paths {
            edges.push((v, next));
            if len == 2 {
                edges.push((next, next + 1));
            }
            next += len as usize;
        }
    }
    Graph::new(next - 1, edges)
}

/// Draws a spec whose interior spine vertices carry a configuration chosen
/// uniformly among [`ATTACH_CONFIGS`] with total pasted length `<= max_load`.
/// The two end vertices are left bare.
pub fn random_lobster(spine_len: usize, seed: u64, max_load: usize) -> Result<LobsterSpec> {
    if spine_len < 2 {
        return Err(Error::InvalidSpec(format!(
            "spine_len must be at least 2, got {spine_len}"
        )));
    }
    let legal: Vec<&[u8]> = ATTACH_CONFIGS
        .iter()
        .copied()
        .filter(|c| c.iter().map(|&l| l as usize).sum::<usize>() <= max_load)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let attach = (0..spine_len)
        .map(|i| {
            if i == 0 || i + 1 == spine_len {
                Vec::new()
            } else {
                legal[rng.random_range(0..legal.len())].to_vec()
            }
        })
        .collect();
    LobsterSpec::new(attach)
}

/// A longest path of a tree. Among all longest paths the one with the
/// lexicographically smallest `(start, end)` pair, `start < end`, is returned,
/// ordered from `start`.
pub fn find_spine(g: &Graph) -> Result<Vec<Vertex>> {
    if !g.is_tree() {
        return Err(Error::NotATree(format!(
            "{} vertices, {} edges, connected = {}",
            g.n(),
            g.edge_count(),
            g.is_connected()
        )));
    }
    if g.n() == 1 {
        return Ok(vec![1]);
    }
    // Diameter by double BFS, then the smallest endpoint pair attaining it.
    let far = |dist: &[Option<usize>]| {
        let mut best = (0, 1);
        for (i, d) in dist.iter().enumerate() {
            let d = d.unwrap();
            if d > best.0 {
                best = (d, i + 1);
            }
        }
        best
    };
    let (_, a) = far(&g.bfs(1).0);
    let (diameter, _) = far(&g.bfs(a).0);
    for start in g.vertices().filter(|&v| g.degree(v) <= 1) {
        let (dist, parent) = g.bfs(start);
        let (d, end) = far(&dist);
        if d == diameter && start < end {
            let mut path = vec![end];
            let mut cur = end;
            while let Some(p) = parent[cur - 1] {
                path.push(p);
                cur = p;
            }
            path.reverse();
            return Ok(path);
        }
    }
    unreachable!("some leaf starts a diameter path toward a larger id")
}

/// Off-spine load of one spine vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpineLoad {
    pub vertex: Vertex,
    /// Off-spine vertices at distance 1.
    pub p1: usize,
    /// Off-spine vertices at distance 2.
    pub p2: usize,
    /// Pendant vertices adjacent to this spine vertex.
    pub s1: Vec<Vertex>,
    /// Tips of attached 2-paths.
    pub s2: Vec<Vertex>,
}

impl SpineLoad {
    pub fn load(&self) -> usize {
        self.p1 + self.p2
    }
}

/// Attachment profile of a lobster, aligned with the spine order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttachmentProfile {
    pub loads: Vec<SpineLoad>,
}

impl AttachmentProfile {
    pub fn spine(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.loads.iter().map(|l| l.vertex)
    }
}

/// Computes `p1, p2, S1, S2` for every spine vertex. Fails with
/// [`Error::NotALobster`] if some vertex lies farther than 2 from the spine.
pub fn attachment_profile(g: &Graph, spine: &[Vertex]) -> Result<AttachmentProfile> {
    let n = g.n();
    let mut on_spine = vec![false; n];
    for (idx, &v) in spine.iter().enumerate() {
        if v == 0 || v > n || on_spine[v - 1] {
            return Err(Error::InvalidVertexSet(format!(
                "spine entry {v} is out of range or repeated"
            )));
        }
        if idx > 0 && !g.has_edge(spine[idx - 1], v) {
            return Err(Error::InvalidVertexSet(format!(
                "spine is not a path: {} and {v} are not adjacent",
                spine[idx - 1]
            )));
        }
        on_spine[v - 1] = true;
    }
    // Multi-source BFS recording which spine position each vertex hangs from.
    let mut dist = vec![usize::MAX; n];
    let mut root = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for (idx, &v) in spine.iter().enumerate() {
        dist[v - 1] = 0;
        root[v - 1] = idx;
        queue.push_back(v);
    }
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if dist[w - 1] == usize::MAX {
                dist[w - 1] = dist[u - 1] + 1;
                root[w - 1] = root[u - 1];
                queue.push_back(w);
            }
        }
    }
    let mut loads: Vec<SpineLoad> = spine
        .iter()
        .map(|&vertex| SpineLoad {
            vertex,
            p1: 0,
            p2: 0,
            s1: Vec::new(),
            s2: Vec::new(),
        })
        .collect();
    for v in g.vertices() {
        let load = match dist[v - 1] {
            0 => continue,
            usize::MAX => return Err(Error::Disconnected),
            d if d > 2 => {
                return Err(Error::NotALobster {
                    vertex: v,
                    distance: d,
                })
            }
            _ => &mut loads[root[v - 1]],
        };
        if dist[v - 1] == 1 {
            load.p1 += 1;
            if g.degree(v) == 1 {
                load.s1.push(v);
            }
        } else {
            load.p2 += 1;
            if g.degree(v) == 1 {
                load.s2.push(v);
            }
        }
    }
    Ok(AttachmentProfile { loads })
}
