//! Controllability of Laplacian leader-follower dynamics.
//!
//! Followers `F` evolve as `x' = A x + B u` with `A = L[F, F]` and `B = L[F, F̄]`
//! where `F̄` is the leader set. Two independent verdicts are provided:
//!
//! * [`pbh_controllable`]: floating point, eigenspace by eigenspace. The system is
//!   controllable iff, for every eigenspace with basis `U` (n × k), the leader rows
//!   `U[F̄, :]` have rank `k`; a rank drop yields an eigenvector vanishing on all
//!   leaders.
//! * [`kalman_controllable_exact`]: `rank [B, AB, …, A^{N−1}B] = |F|` decided in
//!   exact integer arithmetic (see [`exact`]).

pub mod exact;
mod hitting;

use nalgebra::{DMatrix, SVD};
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::analysis::{normalize_set, Analysis};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::par::{self, Execution};
use crate::spectral::vanishing_subspace;
use crate::Vertex;
use exact::SparseMatrix;

pub use hitting::{minimum_hitting_set, minimum_hitting_set_uncounted, Count, HittingSet, COUNT_CAP};

/// Largest graph accepted by [`min_leader_bruteforce`].
pub const BRUTEFORCE_MAX_N: usize = 25;
/// Brute-force searches list the optimal leader sets when there are at most this many.
pub const LIST_CAP: usize = 10_000;
/// PBH verdicts with an eigenspace margin within this factor of the zero
/// tolerance (either side) are flagged as marginal.
pub const MARGIN_FACTOR: f64 = 10.0;

/// Nonempty set of leader vertices, sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct LeaderSet(Vec<Vertex>);

impl LeaderSet {
    pub fn new(n: usize, vertices: &[Vertex]) -> Result<Self> {
        let set = normalize_set(n, vertices)?;
        if set.is_empty() {
            return Err(Error::InvalidVertexSet("leader set is empty".into()));
        }
        Ok(LeaderSet(set))
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Followers: the complement in `1..=n`.
    pub fn followers(&self, n: usize) -> Vec<Vertex> {
        (1..=n).filter(|v| self.0.binary_search(v).is_err()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictMethod {
    PbhFloat,
    KalmanExact,
}

/// Eigenvector vanishing on every leader.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UncontrollableWitness {
    pub lambda: f64,
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ControllabilityVerdict {
    pub controllable: bool,
    pub method: VerdictMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<UncontrollableWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    /// PBH only: smallest per-eigenspace measure of leader-row rank (entry
    /// max-norm for simple eigenvalues, least singular value otherwise).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    /// PBH only: some eigenspace margin lies within a factor [`MARGIN_FACTOR`] of the zero tolerance.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub marginal: bool,
}

impl Analysis {
    /// PBH verdict for `leaders` on this (connected) graph.
    pub fn pbh(&self, leaders: &LeaderSet) -> Result<ControllabilityVerdict> {
        if !self.graph().is_connected() {
            return Err(Error::Disconnected);
        }
        let tol = self.zero_tol();
        let rows = leaders.vertices();
        let mut margin = f64::INFINITY;
        let mut marginal = false;
        let mut witness = None;
        for space in &self.decomposition().spaces {
            let u = &space.basis;
            let k = u.ncols();
            let m = if k == 1 {
                rows.iter().map(|&v| u[(v - 1, 0)].abs()).fold(0.0, f64::max)
            } else if rows.len() < k {
                0.0
            } else {
                let sub = DMatrix::from_fn(rows.len(), k, |r, c| u[(rows[r] - 1, c)]);
                SVD::new(sub, false, false).singular_values.min()
            };
            margin = margin.min(m);
            marginal |= (tol / MARGIN_FACTOR..=tol * MARGIN_FACTOR).contains(&m);
            if witness.is_none() {
                let null = vanishing_subspace(space, rows, tol);
                if null.ncols() > 0 {
                    let mut y = u * null.column(0);
                    let scale = y.amax();
                    y.unscale_mut(scale);
                    witness = Some(UncontrollableWitness {
                        lambda: space.value,
                        vector: y.iter().copied().collect(),
                    });
                }
            }
        }
        Ok(ControllabilityVerdict {
            controllable: witness.is_none(),
            method: VerdictMethod::PbhFloat,
            witness,
            rank: None,
            margin: Some(margin),
            marginal,
        })
    }

    /// Exact Kalman verdict for `leaders`.
    pub fn kalman_exact(&self, leaders: &LeaderSet) -> Result<ControllabilityVerdict> {
        kalman_controllable_exact(self.graph(), leaders)
    }

    /// PBH verdict, escalated to the exact oracle when marginal.
    pub fn controllable(&self, leaders: &LeaderSet) -> Result<ControllabilityVerdict> {
        let v = self.pbh(leaders)?;
        if v.marginal {
            return self.kalman_exact(leaders);
        }
        Ok(v)
    }
}

/// PBH (eigenspace rank) verdict. The graph must be connected.
pub fn pbh_controllable(g: &Graph, leaders: &LeaderSet) -> Result<ControllabilityVerdict> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    Analysis::new(g.clone())?.pbh(leaders)
}

/// `A = L[F, F]` as a sparse matrix and the columns of `B = L[F, F̄]`, both
/// indexed by position in `followers`.
pub fn follower_system(g: &Graph, leaders: &LeaderSet) -> (SparseMatrix, Vec<Vec<i64>>) {
    let n = g.n();
    let followers = leaders.followers(n);
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in followers.iter().enumerate() {
        pos[v - 1] = i;
    }
    let rows = followers
        .iter()
        .map(|&v| {
            let mut row = vec![(pos[v - 1], g.degree(v) as i64)];
            row.extend(
                g.neighbors(v)
                    .iter()
                    .filter(|&&w| pos[w - 1] != usize::MAX)
                    .map(|&w| (pos[w - 1], -1)),
            );
            row.sort_unstable();
            row
        })
        .collect();
    let b_cols = leaders
        .vertices()
        .iter()
        .map(|&l| {
            followers
                .iter()
                .map(|&v| if g.has_edge(v, l) { -1 } else { 0 })
                .collect()
        })
        .collect();
    (SparseMatrix { rows }, b_cols)
}

/// Exact rank of the controllability matrix: a full rank modulo `2^61 − 1`
/// certifies full rank outright, otherwise the rank is computed over the integers.
pub fn kalman_rank(g: &Graph, leaders: &LeaderSet) -> usize {
    let (a, b) = follower_system(g, leaders);
    if a.dim() == 0 {
        return 0;
    }
    if exact::krylov_rank_mod_p(&a, &b) == a.dim() {
        return a.dim();
    }
    exact::krylov_rank(&a, &b)
}

/// Exact Kalman rank verdict: controllable iff `rank C = |F|`.
pub fn kalman_controllable_exact(g: &Graph, leaders: &LeaderSet) -> Result<ControllabilityVerdict> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let followers = g.n() - leaders.len();
    let rank = kalman_rank(g, leaders);
    Ok(ControllabilityVerdict {
        controllable: rank == followers,
        method: VerdictMethod::KalmanExact,
        witness: None,
        rank: Some(rank),
        margin: None,
        marginal: false,
    })
}

/// Outcome of an exhaustive minimum-leader search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinLeaders {
    /// Smallest controllable leader-set size; `None` if none up to `k_max`.
    pub k_min: Option<usize>,
    pub k_max: usize,
    /// Number of controllable leader sets of size `k_min`.
    pub count: u64,
    /// All of them, when `count <= LIST_CAP`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sets: Option<Vec<Vec<Vertex>>>,
}

/// All `k`-subsets of `0..n` as bitmasks, in increasing numeric order.
pub(crate) fn k_subsets(n: usize, k: usize) -> Vec<u32> {
    if k == 0 {
        return vec![0];
    }
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut x: u64 = (1 << k) - 1;
    while x < (1 << n) {
        out.push(x as u32);
        // Gosper's hack: next integer with the same popcount
        let c = x & x.wrapping_neg();
        let r = x + c;
        x = (((r ^ x) >> 2) / c) | r;
    }
    out
}

pub(crate) fn mask_to_set(mask: u32) -> Vec<Vertex> {
    (0..32).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect()
}

/// Smallest controllable leader-set size found by trying every subset of size
/// `1, 2, …, k_max` against the exact oracle.
pub fn min_leader_bruteforce(g: &Graph, k_max: usize, exec: Execution) -> Result<MinLeaders> {
    let n = g.n();
    if n > BRUTEFORCE_MAX_N {
        return Err(Error::TooLarge {
            what: "vertex count for brute-force leader search",
            got: n,
            limit: BRUTEFORCE_MAX_N,
        });
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    for k in 1..=k_max.min(n) {
        let masks = k_subsets(n, k);
        let good = par::filter(exec, &masks, |&m| {
            let leaders = LeaderSet(mask_to_set(m));
            kalman_rank(g, &leaders) == n - k
        });
        if !good.is_empty() {
            let count = good.len() as u64;
            let sets = (good.len() <= LIST_CAP).then(|| good.iter().map(|&m| mask_to_set(m)).collect());
            return Ok(MinLeaders {
                k_min: Some(k),
                k_max,
                count,
                sets,
            });
        }
    }
    Ok(MinLeaders {
        k_min: None,
        k_max,
        count: 0,
        sets: None,
    })
}

/// `count / C(n, k)` as a reduced fraction and a 4-significant-digit rendering.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Probability {
    pub numerator: String,
    pub denominator: String,
    pub value: f64,
    pub display: String,
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    let k = k.min(n - k);
    (0..k).fold(BigUint::from(1u32), |acc, i| acc * (n - i) / (i + 1))
}

/// Renders `x` with four significant digits.
pub fn four_significant(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let decimals = (3 - x.abs().log10().floor() as i32).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn count_to_probability(count: u64, n: u64, k: u64) -> Result<Probability> {
    if k > n {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds n = {n}")));
    }
    let total = binomial(n, k);
    let count_big = BigUint::from(count);
    if count_big > total {
        return Err(Error::InvalidArgument(format!(
            "count {count} exceeds C({n}, {k}) = {total}"
        )));
    }
    let g = count_big.gcd(&total);
    let (num, den) = if count_big.is_zero() {
        (BigUint::zero(), BigUint::from(1u32))
    } else {
        (&count_big / &g, &total / &g)
    };
    // 53-bit mantissas are enough for the sizes this is used with.
    let value = num.to_f64().unwrap_or(f64::NAN) / den.to_f64().unwrap_or(f64::NAN);
    Ok(Probability {
        numerator: num.to_string(),
        denominator: den.to_string(),
        value,
        display: four_significant(value),
    })
}
