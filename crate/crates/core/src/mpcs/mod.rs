//! Critical sets of the Laplacian: vertex sets carrying eigenvector supports.
//!
//! * critical set (CS): contains the support of some eigenvector;
//! * perfect critical set (PCS): is exactly the support of some eigenvector;
//! * minimum perfect critical set (MPCS): a PCS with no proper subset that is a PCS.
//!
//! A leader set makes the network controllable iff it meets every MPCS.
//!
//! Minimality is decided per eigenspace: let `K` be the eigenvectors of a space
//! that vanish outside `S`. If `dim K >= 2`, some nonzero vector of `K` also
//! vanishes at a chosen vertex of `S`, so a strictly smaller support exists. If
//! `dim K == 1`, its support is either all of `S` or a proper subset. Hence `S` is
//! an MPCS iff every eigenspace has `dim K <= 1`, every one-dimensional `K` is
//! nonzero on all of `S`, and at least one `K` is nonzero.
//! [`is_mpcs_by_subsets`] checks the literal definition instead.

mod detect;

use serde::Serialize;

use crate::analysis::Analysis;
use crate::control::k_subsets;
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::spectral::{exists_support_exactly, Witness};
use crate::Vertex;

pub use detect::{detect_quads, detect_spine_patterns, detect_twins, two_paths_at, GOLDEN_HIGH, GOLDEN_LOW};

/// Default vertex-count cap for [`enumerate_mpcs_bruteforce`].
pub const BRUTE_N_CAP: usize = 16;
/// Largest set [`is_mpcs_by_subsets`] will enumerate.
pub const SUBSET_MINIMALITY_CAP: usize = 20;
/// Eigenvalue agreement required by [`verify_mpcs`].
pub const LAMBDA_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Kind {
    #[serde(rename = "CS")]
    Critical,
    #[serde(rename = "PCS")]
    Perfect,
    #[serde(rename = "MPCS")]
    Minimum,
}

/// Which detector (or the exhaustive search) produced a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    Twin,
    Quad,
    Spine8,
    Spine4n,
    BruteForce,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalRecord {
    pub vertices: Vec<Vertex>,
    pub kind: Kind,
    pub origin: Origin,
    pub lambda: f64,
    /// Inducing eigenvector, unit max-norm, indexed by `vertex - 1`.
    #[serde(skip)]
    pub witness: Vec<f64>,
    pub verified_exact: bool,
}

impl CriticalRecord {
    pub(crate) fn from_witness(vertices: Vec<Vertex>, kind: Kind, origin: Origin, w: &Witness) -> Self {
        CriticalRecord {
            vertices,
            kind,
            origin,
            lambda: w.value,
            witness: w.vector.iter().copied().collect(),
            verified_exact: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MpcsCatalog {
    pub records: Vec<CriticalRecord>,
    /// `true` only for exhaustive enumeration.
    pub complete: bool,
}

impl MpcsCatalog {
    pub fn sets(&self) -> Vec<Vec<Vertex>> {
        self.records.iter().map(|r| r.vertices.clone()).collect()
    }

    pub fn contains(&self, set: &[Vertex]) -> bool {
        self.records.iter().any(|r| r.vertices == set)
    }

    /// Appends records whose vertex sets are not present yet.
    pub fn extend_unique(&mut self, records: impl IntoIterator<Item = CriticalRecord>) {
        for r in records {
            if !self.contains(&r.vertices) {
                self.records.push(r);
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.records).expect("records are serialisable")
    }
}

fn check_nonempty(set: &[Vertex]) -> Result<()> {
    if set.is_empty() {
        return Err(Error::InvalidVertexSet("critical-set queries need a nonempty set".into()));
    }
    Ok(())
}

impl Analysis {
    /// An eigenvector whose support lies inside `set`.
    pub fn is_critical(&self, set: &[Vertex]) -> Result<Option<Witness>> {
        let set = self.normalize_set(set)?;
        check_nonempty(&set)?;
        Ok(self.decomposition().critical_witness(&set, self.zero_tol()))
    }

    /// An eigenvector whose support is exactly `set`.
    pub fn is_perfect_critical(&self, set: &[Vertex]) -> Result<Option<Witness>> {
        let set = self.normalize_set(set)?;
        check_nonempty(&set)?;
        exists_support_exactly(self.decomposition(), &set, self.zero_tol())
    }

    /// An inducing eigenvector if `set` is an MPCS (decided per eigenspace, see
    /// the module docs). With `expected`, only a witness whose eigenvalue is
    /// within [`LAMBDA_TOL`] of one of the given values counts.
    pub fn mpcs_witness(&self, set: &[Vertex], expected: &[f64]) -> Result<Option<Witness>> {
        let set = self.normalize_set(set)?;
        check_nonempty(&set)?;
        let decomp = self.decomposition();
        let mut found = None;
        for space in &decomp.spaces {
            let q = decomp.support_query(space, &set, self.zero_tol())?;
            match (q.dim, q.exact) {
                (0, _) => {}
                (1, Some(vector)) => {
                    let matches = expected.is_empty()
                        || expected.iter().any(|&e| (e - space.value).abs() <= LAMBDA_TOL);
                    if matches && found.is_none() {
                        found = Some(Witness {
                            value: space.value,
                            vector,
                        });
                    }
                }
                _ => return Ok(None),
            }
        }
        Ok(found)
    }

    pub fn is_mpcs(&self, set: &[Vertex]) -> Result<Option<Witness>> {
        self.mpcs_witness(set, &[])
    }

    /// The cached exhaustive catalog, when `n <= BRUTE_N_CAP`.
    pub fn brute_catalog(&self) -> Option<&MpcsCatalog> {
        self.brute_catalog
            .get_or_init(|| enumerate_mpcs_bruteforce(self, BRUTE_N_CAP, Execution::Parallel).ok())
            .as_ref()
    }
}

/// Literal minimality check: `set` is a PCS and none of its proper nonempty
/// subsets is. Refuses sets larger than [`SUBSET_MINIMALITY_CAP`].
pub fn is_mpcs_by_subsets(an: &Analysis, set: &[Vertex]) -> Result<bool> {
    let set = an.normalize_set(set)?;
    check_nonempty(&set)?;
    if set.len() > SUBSET_MINIMALITY_CAP {
        return Err(Error::MinimalityUnverified(set.len()));
    }
    if an.is_perfect_critical(&set)?.is_none() {
        return Ok(false);
    }
    let full: u32 = (1 << set.len()) - 1;
    for mask in 1..full {
        let sub: Vec<Vertex> = (0..set.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| set[i])
            .collect();
        if an.is_critical(&sub)?.is_none() {
            continue;
        }
        if an.is_perfect_critical(&sub)?.is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Certifies `set` as an MPCS, optionally requiring one of the `expected`
/// eigenvalues. `verified_exact` is set when the graph is small enough for the
/// exhaustive catalog and that catalog contains the set.
pub fn verify_mpcs(
    an: &Analysis,
    set: &[Vertex],
    expected: &[f64],
    origin: Origin,
) -> Result<Option<CriticalRecord>> {
    let set = an.normalize_set(set)?;
    let Some(w) = an.mpcs_witness(&set, expected)? else {
        return Ok(None);
    };
    let mut rec = CriticalRecord::from_witness(set, Kind::Minimum, origin, &w);
    if an.n() <= BRUTE_N_CAP {
        rec.verified_exact = an.brute_catalog().is_some_and(|c| c.contains(&rec.vertices));
    }
    Ok(Some(rec))
}

/// All MPCS of a graph with at most `n_cap` vertices, by increasing cardinality.
/// A set qualifies when it is a PCS and contains no MPCS recorded earlier (any
/// PCS strictly inside it would contain one).
pub fn enumerate_mpcs_bruteforce(an: &Analysis, n_cap: usize, exec: Execution) -> Result<MpcsCatalog> {
    let n = an.n();
    if n > n_cap || n > 31 {
        return Err(Error::TooLarge {
            what: "vertex count for brute-force MPCS enumeration",
            got: n,
            limit: n_cap.min(31),
        });
    }
    let mut found: Vec<u32> = Vec::new();
    let mut records: Vec<CriticalRecord> = Vec::new();
    for k in 1..=n {
        let candidates: Vec<u32> = k_subsets(n, k)
            .into_iter()
            .filter(|&m| found.iter().all(|&f| f & m != f))
            .collect();
        let results = par::map(exec, &candidates, |&m| -> Result<Option<(u32, Witness)>> {
            let set = crate::control::mask_to_set(m);
            if an.decomposition().critical_witness(&set, an.zero_tol()).is_none() {
                return Ok(None);
            }
            Ok(exists_support_exactly(an.decomposition(), &set, an.zero_tol())?.map(|w| (m, w)))
        });
        for r in results {
            if let Some((m, w)) = r? {
                found.push(m);
                let mut rec = CriticalRecord::from_witness(
                    crate::control::mask_to_set(m),
                    Kind::Minimum,
                    Origin::BruteForce,
                    &w,
                );
                rec.verified_exact = true;
                records.push(rec);
            }
        }
    }
    records.sort_by(|a, b| (a.vertices.len(), &a.vertices).cmp(&(b.vertices.len(), &b.vertices)));
    Ok(MpcsCatalog {
        records,
        complete: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::twin_tree;
    use crate::graph::Graph;

    fn analysed() -> Analysis {
        Analysis::new(twin_tree()).unwrap()
    }

    #[test]
    fn twin_tree_classifications() {
        let an = analysed();
        assert!(an.is_critical(&[3, 5]).unwrap().is_none());
        let w = an.is_critical(&[1, 2, 3, 5, 6, 7]).unwrap().unwrap();
        assert!((w.value - 1.0).abs() < 1e-9);
        assert!(an.is_perfect_critical(&[1, 2, 3, 5, 6, 7]).unwrap().is_none());
        let w = an.is_perfect_critical(&[1, 3, 5, 6, 7]).unwrap().unwrap();
        assert!((w.value - 1.0).abs() < 1e-9);
        assert!(an.is_mpcs(&[1, 3, 5, 6, 7]).unwrap().is_none());
        let w = an.is_perfect_critical(&[5, 6]).unwrap().unwrap();
        assert!((w.vector[4] + w.vector[5]).abs() < 1e-9);
        assert!(an.is_mpcs(&[1, 3]).unwrap().is_some());
        let all: Vec<Vertex> = (1..=7).collect();
        assert!(an.is_critical(&all).unwrap().unwrap().value.abs() < 1e-9);
    }

    #[test]
    fn twin_tree_bruteforce_catalog() {
        let cat = enumerate_mpcs_bruteforce(&analysed(), BRUTE_N_CAP, Execution::Sequential).unwrap();
        assert!(cat.complete);
        assert_eq!(cat.sets(), vec![vec![1, 3], vec![5, 6], vec![5, 7], vec![6, 7]]);
    }

    #[test]
    fn k2_and_p5_catalogs() {
        let k2 = Analysis::new(Graph::path(2)).unwrap();
        let cat = enumerate_mpcs_bruteforce(&k2, BRUTE_N_CAP, Execution::Sequential).unwrap();
        assert_eq!(cat.sets(), vec![vec![1, 2]]);
        let p5 = Analysis::new(Graph::path(5)).unwrap();
        let cat = enumerate_mpcs_bruteforce(&p5, BRUTE_N_CAP, Execution::Parallel).unwrap();
        assert!(cat.contains(&[1, 2, 4, 5]));
        assert!(cat.records.iter().all(|r| r.vertices.len() != 3));
    }

    #[test]
    fn verify_examples() {
        let an = analysed();
        let rec = verify_mpcs(&an, &[1, 3], &[1.0], Origin::Twin).unwrap().unwrap();
        assert!(rec.verified_exact);
        assert!(verify_mpcs(&an, &[1, 3], &[2.0], Origin::Twin).unwrap().is_none());
        assert!(verify_mpcs(&an, &[1, 3, 5], &[], Origin::BruteForce).unwrap().is_none());
        let p5 = Analysis::new(Graph::path(5)).unwrap();
        let rec = verify_mpcs(&p5, &[1, 2, 4, 5], &[GOLDEN_LOW], Origin::Quad).unwrap().unwrap();
        assert!((rec.lambda - GOLDEN_LOW).abs() < 1e-9);
    }

    #[test]
    fn subset_minimality_agrees_and_is_capped() {
        let an = analysed();
        assert!(is_mpcs_by_subsets(&an, &[1, 3]).unwrap());
        assert!(!is_mpcs_by_subsets(&an, &[1, 3, 5, 6, 7]).unwrap());
        let big = Analysis::new(Graph::path(22)).unwrap();
        let all: Vec<Vertex> = (1..=21).collect();
        assert!(matches!(is_mpcs_by_subsets(&big, &all), Err(Error::MinimalityUnverified(21))));
    }

    #[test]
    fn bruteforce_refuses_large_graphs() {
        let an = Analysis::new(Graph::path(17)).unwrap();
        assert!(matches!(
            enumerate_mpcs_bruteforce(&an, BRUTE_N_CAP, Execution::Sequential),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn catalog_json_shape() {
        let cat = enumerate_mpcs_bruteforce(&analysed(), BRUTE_N_CAP, Execution::Sequential).unwrap();
        let v: serde_json::Value = serde_json::from_str(&cat.to_json()).unwrap();
        assert_eq!(v[0]["vertices"], serde_json::json!([1, 3]));
        assert_eq!(v[0]["kind"], "MPCS");
        assert_eq!(v[0]["origin"], "brute-force");
        assert!((v[0]["lambda"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    }
}
