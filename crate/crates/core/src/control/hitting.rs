//! Exact minimum hitting sets by branch and bound.
//!
//! The catalog is split into connected components (sets sharing a vertex); each
//! component is solved independently, so sizes add and counts multiply.
//! Branching picks the unhit set with the fewest free vertices `{e1, …, ek}` and
//! explores "take e_i, exclude e_1..e_{i−1}" for each `i`. Those branches
//! partition the search space, so every optimal hitting set is reached exactly
//! once and leaf counting is exact.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::Vertex;

/// Enumeration stops once this many optimal hitting sets have been counted.
pub const COUNT_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum Count {
    Exact(u64),
    AtLeast(u64),
}

impl Count {
    pub fn exact(self) -> Option<u64> {
        match self {
            Count::Exact(c) => Some(c),
            Count::AtLeast(_) => None,
        }
    }
}

impl std::fmt::Display for Count {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Count::Exact(c) => write!(f, "{c}"),
            Count::AtLeast(c) => write!(f, ">= {c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HittingSet {
    pub size: usize,
    /// One optimal hitting set, sorted.
    pub set: Vec<Vertex>,
    /// Number of optimal hitting sets; `None` when counting was not requested.
    pub count: Option<Count>,
}

/// Minimum hitting set of `catalog`, with the number of optimal solutions.
pub fn minimum_hitting_set(catalog: &[Vec<Vertex>]) -> HittingSet {
    solve(catalog, true)
}

/// Minimum hitting set without counting the optimal solutions.
pub fn minimum_hitting_set_uncounted(catalog: &[Vec<Vertex>]) -> HittingSet {
    solve(catalog, false)
}

fn solve(catalog: &[Vec<Vertex>], count: bool) -> HittingSet {
    let mut total_size = 0;
    let mut total_set = Vec::new();
    let mut total_count = Count::Exact(1);
    for comp in components(catalog) {
        let mut bb = Component::new(&comp);
        let (size, set) = bb.minimum();
        total_size += size;
        total_set.extend(set);
        if count {
            let c = bb.count(size);
            total_count = match (total_count, c) {
                (Count::Exact(a), Count::Exact(b)) => match a.checked_mul(b) {
                    Some(p) if p < COUNT_CAP => Count::Exact(p),
                    _ => Count::AtLeast(COUNT_CAP),
                },
                _ => Count::AtLeast(COUNT_CAP),
            };
        }
    }
    total_set.sort_unstable();
    HittingSet {
        size: total_size,
        set: total_set,
        count: count.then_some(total_count),
    }
}

/// Groups sets into connected components by shared vertices (union-find).
fn components(catalog: &[Vec<Vertex>]) -> Vec<Vec<Vec<Vertex>>> {
    let sets: Vec<&Vec<Vertex>> = catalog.iter().filter(|s| !s.is_empty()).collect();
    let mut parent: Vec<usize> = (0..sets.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut owner: BTreeMap<Vertex, usize> = BTreeMap::new();
    for (i, s) in sets.iter().enumerate() {
        for &v in s.iter() {
            match owner.get(&v) {
                Some(&j) => {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a.max(b)] = a.min(b);
                }
                None => {
                    owner.insert(v, i);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<Vec<Vertex>>> = BTreeMap::new();
    for (i, s) in sets.iter().enumerate() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push((*s).clone());
    }
    groups.into_values().collect()
}

struct Component {
    /// Local id -> vertex.
    vertices: Vec<Vertex>,
    /// Sets over local ids.
    sets: Vec<Vec<usize>>,
    /// Local id -> indices of sets containing it.
    member_of: Vec<Vec<usize>>,
    included: Vec<bool>,
    excluded: Vec<bool>,
    hits: Vec<usize>,
    chosen: Vec<usize>,
}

impl Component {
    fn new(sets: &[Vec<Vertex>]) -> Self {
        let mut vertices: Vec<Vertex> = sets.iter().flatten().copied().collect();
        vertices.sort_unstable();
        vertices.dedup();
        let local = |v: Vertex| vertices.binary_search(&v).unwrap();
        let mut local_sets: Vec<Vec<usize>> = sets
            .iter()
            .map(|s| {
                let mut l: Vec<usize> = s.iter().map(|&v| local(v)).collect();
                l.sort_unstable();
                l.dedup();
                l
            })
            .collect();
        local_sets.sort();
        local_sets.dedup();
        let mut member_of = vec![Vec::new(); vertices.len()];
        for (i, s) in local_sets.iter().enumerate() {
            for &e in s {
                member_of[e].push(i);
            }
        }
        let m = vertices.len();
        let k = local_sets.len();
        Component {
            vertices,
            sets: local_sets,
            member_of,
            included: vec![false; m],
            excluded: vec![false; m],
            hits: vec![0; k],
            chosen: Vec::new(),
        }
    }

    fn take(&mut self, e: usize) {
        self.included[e] = true;
        self.chosen.push(e);
        for &s in &self.member_of[e] {
            self.hits[s] += 1;
        }
    }

    fn untake(&mut self, e: usize) {
        self.included[e] = false;
        self.chosen.pop();
        for &s in &self.member_of[e] {
            self.hits[s] -= 1;
        }
    }

    /// Greedy packing of pairwise-disjoint unhit sets (over free vertices): each
    /// needs its own vertex, so their number bounds the remaining cost.
    /// Returns `None` if some unhit set has no free vertex left.
    fn lower_bound(&self) -> Option<usize> {
        let mut used = vec![false; self.vertices.len()];
        let mut order: Vec<(usize, usize)> = Vec::new();
        for (i, s) in self.sets.iter().enumerate() {
            if self.hits[i] > 0 {
                continue;
            }
            let free = s.iter().filter(|&&e| !self.excluded[e]).count();
            if free == 0 {
                return None;
            }
            order.push((free, i));
        }
        order.sort_unstable();
        let mut lb = 0;
        for (_, i) in order {
            let free: Vec<usize> = self.sets[i]
                .iter()
                .copied()
                .filter(|&e| !self.excluded[e])
                .collect();
            if free.iter().all(|&e| !used[e]) {
                free.iter().for_each(|&e| used[e] = true);
                lb += 1;
            }
        }
        Some(lb)
    }

    /// The unhit set with the fewest free vertices, as its free vertex list.
    fn branch_set(&self) -> Option<Vec<usize>> {
        self.sets
            .iter()
            .enumerate()
            .filter(|(i, _)| self.hits[*i] == 0)
            .map(|(_, s)| {
                s.iter()
                    .copied()
                    .filter(|&e| !self.excluded[e])
                    .collect::<Vec<_>>()
            })
            .min_by_key(|free| free.len())
    }

    fn minimum(&mut self) -> (usize, Vec<Vertex>) {
        let mut best: Option<Vec<usize>> = None;
        self.search_min(&mut best);
        let best = best.expect("every component has a hitting set");
        let mut set: Vec<Vertex> = best.iter().map(|&e| self.vertices[e]).collect();
        set.sort_unstable();
        (set.len(), set)
    }

    fn search_min(&mut self, best: &mut Option<Vec<usize>>) {
        let Some(lb) = self.lower_bound() else { return };
        if let Some(b) = best {
            if self.chosen.len() + lb >= b.len() {
                return;
            }
        }
        let Some(free) = self.branch_set() else {
            *best = Some(self.chosen.clone());
            return;
        };
        let mut excluded_here = Vec::new();
        for e in free {
            self.take(e);
            self.search_min(best);
            self.untake(e);
            self.excluded[e] = true;
            excluded_here.push(e);
        }
        for e in excluded_here {
            self.excluded[e] = false;
        }
    }

    fn count(&mut self, opt: usize) -> Count {
        let mut n = 0u64;
        self.search_count(opt, &mut n);
        if n >= COUNT_CAP {
            Count::AtLeast(COUNT_CAP)
        } else {
            Count::Exact(n)
        }
    }

    fn search_count(&mut self, opt: usize, n: &mut u64) {
        if *n >= COUNT_CAP {
            return;
        }
        let Some(lb) = self.lower_bound() else { return };
        if self.chosen.len() + lb > opt {
            return;
        }
        let Some(free) = self.branch_set() else {
            *n += 1;
            return;
        };
        let mut excluded_here = Vec::new();
        for e in free {
            self.take(e);
            self.search_count(opt, n);
            self.untake(e);
            self.excluded[e] = true;
            excluded_here.push(e);
        }
        for e in excluded_here {
            self.excluded[e] = false;
        }
    }
}
