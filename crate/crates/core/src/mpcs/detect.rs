//! Structural MPCS detectors for trees: twins, quads and spine patterns.
//!
//! Quad and spine candidates are always confirmed spectrally before being
//! returned, so every emitted record is an MPCS of the analysed graph.

use std::collections::{BTreeSet, HashMap};

use super::{verify_mpcs, CriticalRecord, Kind, Origin, BRUTE_N_CAP};
use crate::analysis::Analysis;
use crate::error::Result;
use crate::Vertex;

/// Smaller root of `(x - 1)(x - 2) = 1`, the eigenvalue carried by a 2-path.
pub const GOLDEN_LOW: f64 = 0.381_966_011_250_105_15;
/// Larger root of `(x - 1)(x - 2) = 1`.
pub const GOLDEN_HIGH: f64 = 2.618_033_988_749_895;

/// Cap on spine-pattern variants explored from a single left anchor.
const VARIANT_CAP: usize = 4096;

fn mark_verified(an: &Analysis, rec: &mut CriticalRecord) {
    if an.n() <= BRUTE_N_CAP {
        rec.verified_exact = an.brute_catalog().is_some_and(|c| c.contains(&rec.vertices));
    }
}

/// Pairs of vertices that every other vertex sees both or neither of.
/// The witness is `e_u - e_w` with eigenvalue `deg(u)` (plus one if adjacent).
pub fn detect_twins(an: &Analysis) -> Result<Vec<CriticalRecord>> {
    let g = an.graph();
    let n = g.n();
    let mut open: HashMap<Vec<Vertex>, Vec<Vertex>> = HashMap::new();
    let mut closed: HashMap<Vec<Vertex>, Vec<Vertex>> = HashMap::new();
    for v in g.vertices() {
        let nb = g.neighbors(v).to_vec();
        let mut cl = nb.clone();
        cl.push(v);
        cl.sort_unstable();
        open.entry(nb).or_default().push(v);
        closed.entry(cl).or_default().push(v);
    }
    let mut out = Vec::new();
    for (groups, adjacent) in [(open, false), (closed, true)] {
        for members in groups.into_values() {
            for (i, &u) in members.iter().enumerate() {
                for &w in &members[i + 1..] {
                    let mut vector = vec![0.0; n];
                    vector[u - 1] = 1.0;
                    vector[w - 1] = -1.0;
                    let mut rec = CriticalRecord {
                        vertices: vec![u, w],
                        kind: Kind::Minimum,
                        origin: Origin::Twin,
                        lambda: (g.degree(u) + usize::from(adjacent)) as f64,
                        witness: vector,
                        verified_exact: false,
                    };
                    mark_verified(an, &mut rec);
                    out.push(rec);
                }
            }
        }
    }
    out.sort_by(|a, b| a.vertices.cmp(&b.vertices));
    Ok(out)
}

/// 2-paths hanging at `v`: `(inner, tip)` with `inner` of degree 2 adjacent to
/// `v` and `tip` a leaf. Inner vertices listed in `exclude` are skipped.
pub fn two_paths_at(an: &Analysis, v: Vertex, exclude: &[Vertex]) -> Vec<(Vertex, Vertex)> {
    let g = an.graph();
    g.neighbors(v)
        .iter()
        .filter(|x| !exclude.contains(x) && g.degree(**x) == 2)
        .filter_map(|&x| {
            let t = *g.neighbors(x).iter().find(|&&t| t != v)?;
            (g.degree(t) == 1).then_some((x, t))
        })
        .collect()
}

/// Two 2-paths at a common vertex, eigenvalue `(3 - sqrt 5) / 2`.
pub fn detect_quads(an: &Analysis) -> Result<Vec<CriticalRecord>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for v in an.graph().vertices() {
        let paths = two_paths_at(an, v, &[]);
        for (i, &(x1, t1)) in paths.iter().enumerate() {
            for &(x2, t2) in &paths[i + 1..] {
                let mut set = vec![x1, t1, x2, t2];
                set.sort_unstable();
                if !seen.insert(set.clone()) {
                    continue;
                }
                if let Some(rec) = verify_mpcs(an, &set, &[GOLDEN_LOW], Origin::Quad)? {
                    out.push(rec);
                }
            }
        }
    }
    Ok(out)
}

struct SpineScan<'a> {
    an: &'a Analysis,
    spine: &'a [Vertex],
    on_spine: Vec<bool>,
    candidates: Vec<(Vec<Vertex>, usize)>,
}

impl SpineScan<'_> {
    /// Pendant of a spine vertex whose only attachment is a single leaf.
    fn pair_pendant(&self, i: usize) -> Option<Vertex> {
        let g = self.an.graph();
        let v = self.spine[i];
        let mut off = g.neighbors(v).iter().filter(|&&x| !self.on_spine[x]);
        let p = *off.next()?;
        (off.next().is_none() && g.degree(p) == 1).then_some(p)
    }

    fn neighbours_on_spine(&self, i: usize) -> Vec<Vertex> {
        let mut out = Vec::new();
        if i > 0 {
            out.push(self.spine[i - 1]);
        }
        if i + 1 < self.spine.len() {
            out.push(self.spine[i + 1]);
        }
        out
    }

    /// Extends a partial pattern with the pair starting at spine index `j`.
    fn extend(&mut self, j: usize, partial: Vec<Vertex>, pairs: usize) {
        let len = self.spine.len();
        if self.candidates.len() >= VARIANT_CAP || j + 2 >= len {
            return;
        }
        let (Some(pa), Some(pb)) = (self.pair_pendant(j), self.pair_pendant(j + 1)) else {
            return;
        };
        let mut next = partial;
        next.extend([self.spine[j], pa, self.spine[j + 1], pb]);
        let r = j + 2;
        for (x, t) in two_paths_at(self.an, self.spine[r], &[self.spine[r - 1]]) {
            let mut cand = next.clone();
            cand.extend([x, t]);
            self.candidates.push((cand, pairs + 1));
        }
        let sep_paths = two_paths_at(self.an, self.spine[r], &self.neighbours_on_spine(r));
        self.extend(r + 1, next.clone(), pairs + 1);
        for (x, t) in sep_paths {
            let mut with_path = next.clone();
            with_path.extend([x, t]);
            self.extend(r + 1, with_path, pairs + 1);
        }
    }
}

/// Spine patterns: an excluded anchor with a 2-path, runs of adjacent spine
/// pairs each carrying one pendant leaf, single excluded spine separators, and
/// a closing anchor with a 2-path. One pair gives the 8-vertex pattern, `m`
/// pairs give `4 + 4m` vertices (more if separator 2-paths are included).
/// Both spine orientations are scanned and each candidate is verified.
pub fn detect_spine_patterns(an: &Analysis, spine: &[Vertex]) -> Result<Vec<CriticalRecord>> {
    let mut on_spine = vec![false; an.n() + 1];
    for &v in spine {
        on_spine[v] = true;
    }
    let reversed: Vec<Vertex> = spine.iter().rev().copied().collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for orientation in [spine, &reversed[..]] {
        let mut scan = SpineScan {
            an,
            spine: orientation,
            on_spine: on_spine.clone(),
            candidates: Vec::new(),
        };
        for i in 0..orientation.len().saturating_sub(3) {
            for (x, t) in two_paths_at(an, orientation[i], &[orientation[i + 1]]) {
                scan.extend(i + 1, vec![x, t], 0);
            }
        }
        for (mut set, pairs) in scan.candidates {
            set.sort_unstable();
            if !seen.insert(set.clone()) {
                continue;
            }
            let origin = if pairs == 1 { Origin::Spine8 } else { Origin::Spine4n };
            if let Some(rec) = verify_mpcs(an, &set, &[GOLDEN_LOW, GOLDEN_HIGH], origin)? {
                out.push(rec);
            }
        }
    }
    out.sort_by(|a, b| a.vertices.cmp(&b.vertices));
    Ok(out)
}
