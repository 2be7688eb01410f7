//! Symmetric eigendecomposition of Laplacians grouped into eigenspaces, and
//! queries about which vertex sets carry the support of an eigenvector.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::Vertex;

/// Relative tolerance under which neighbouring eigenvalues share an eigenspace.
pub const DEFAULT_GROUP_TOL: f64 = 1e-8;
/// Entries of unit-scale eigenvectors below this are treated as zero.
pub const DEFAULT_ZERO_TOL: f64 = 1e-8;
/// Relative gaps in this window are reported as near-misses of the grouping rule.
pub const NEAR_MISS_WINDOW: (f64, f64) = (1e-10, 1e-6);

const WITNESS_RETRIES: u64 = 8;

/// One eigenvalue with an orthonormal basis (columns) of its eigenspace.
#[derive(Debug, Clone)]
pub struct Eigenspace {
    pub value: f64,
    pub basis: DMatrix<f64>,
}

impl Eigenspace {
    pub fn multiplicity(&self) -> usize {
        self.basis.ncols()
    }
}

/// Two consecutive eigenvalue groups closer than [`NEAR_MISS_WINDOW`]`.1`
/// (relative) but kept apart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NearMiss {
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub spaces: Vec<Eigenspace>,
    pub group_tol: f64,
    pub near_misses: Vec<NearMiss>,
}

/// An eigenvector together with its eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub value: f64,
    pub vector: DVector<f64>,
}

impl Witness {
    /// Vertices (1-based) where the vector is nonzero relative to its max-norm.
    pub fn support(&self, zero_tol: f64) -> Vec<Vertex> {
        let scale = self.vector.amax();
        (0..self.vector.len())
            .filter(|&i| self.vector[i].abs() > zero_tol * scale)
            .map(|i| i + 1)
            .collect()
    }

    /// `max |L y − λ y|`.
    pub fn residual(&self, l: &DMatrix<i64>) -> f64 {
        let lf = l.map(|x| x as f64);
        (lf * &self.vector - &self.vector * self.value).amax()
    }
}

fn fingerprint(l: &DMatrix<i64>) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &x in l.iter() {
        for b in x.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

/// Modified Gram-Schmidt, two passes.
fn orthonormalize(mut m: DMatrix<f64>) -> DMatrix<f64> {
    for _ in 0..2 {
        for j in 0..m.ncols() {
            for i in 0..j {
                let proj = m.column(i).dot(&m.column(j));
                let ci = m.column(i).clone_owned();
                m.column_mut(j).axpy(-proj, &ci, 1.0);
            }
            let norm = m.column(j).norm();
            m.column_mut(j).unscale_mut(norm);
        }
    }
    m
}

/// Eigendecomposition of a symmetric integer matrix. Sorted eigenvalues `a < b`
/// are grouped together when `b − a <= group_tol · max(1, |b|)`; each group's
/// basis is re-orthonormalised.
pub fn eigen_decompose(l: &DMatrix<i64>, group_tol: f64) -> Result<SpectralDecomposition> {
    let n = l.nrows();
    let lf = l.map(|x| x as f64);
    let eig = SymmetricEigen::try_new(lf, f64::EPSILON, 100_000).ok_or(Error::EigenSolver {
        n,
        fingerprint: fingerprint(l),
    })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut near_misses = Vec::new();
    for &i in &order {
        let value = eig.eigenvalues[i];
        if let Some(group) = groups.last_mut() {
            let prev = eig.eigenvalues[*group.last().unwrap()];
            let rel = (value - prev) / value.abs().max(1.0);
            if rel <= group_tol {
                group.push(i);
                continue;
            }
            if rel >= NEAR_MISS_WINDOW.0 && rel <= NEAR_MISS_WINDOW.1 {
                near_misses.push(NearMiss {
                    lower: prev,
                    upper: value,
                });
            }
        }
        groups.push(vec![i]);
    }

    let spaces = groups
        .into_iter()
        .map(|cols| {
            let value = cols.iter().map(|&c| eig.eigenvalues[c]).sum::<f64>() / cols.len() as f64;
            let basis = DMatrix::from_columns(
                &cols.iter().map(|&c| eig.eigenvectors.column(c)).collect::<Vec<_>>(),
            );
            Eigenspace {
                value,
                basis: orthonormalize(basis),
            }
        })
        .collect();
    Ok(SpectralDecomposition {
        spaces,
        group_tol,
        near_misses,
    })
}

/// Orthonormal basis (as `k × d` coefficient columns) of the coefficient vectors
/// `c` with `(U c)_v = 0` for every `v` in `zeros`.
pub fn vanishing_subspace(space: &Eigenspace, zeros: &[Vertex], zero_tol: f64) -> DMatrix<f64> {
    let u = &space.basis;
    let k = u.ncols();
    if k == 1 {
        let vanishes = zeros.iter().all(|&v| u[(v - 1, 0)].abs() <= zero_tol);
        return if vanishes {
            DMatrix::from_element(1, 1, 1.0)
        } else {
            DMatrix::zeros(1, 0)
        };
    }
    if zeros.is_empty() {
        return DMatrix::identity(k, k);
    }
    // Pad with zero rows so the SVD yields a full k × k right factor.
    let rows = zeros.len().max(k);
    let mut m = DMatrix::<f64>::zeros(rows, k);
    for (r, &v) in zeros.iter().enumerate() {
        m.row_mut(r).copy_from(&u.row(v - 1));
    }
    let svd = SVD::new(m, false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let null: Vec<_> = (0..k)
        .filter(|&i| svd.singular_values[i] <= zero_tol)
        .map(|i| v_t.row(i).transpose())
        .collect();
    if null.is_empty() {
        DMatrix::zeros(k, 0)
    } else {
        DMatrix::from_columns(&null)
    }
}

/// Result of restricting one eigenspace to vectors supported inside a set.
#[derive(Debug, Clone)]
pub struct SupportQuery {
    /// Dimension of the eigenvectors (plus zero) vanishing outside the set.
    pub dim: usize,
    /// A vector of that subspace nonzero on every vertex of the set, if one exists.
    pub exact: Option<DVector<f64>>,
}

impl SpectralDecomposition {
    pub fn n(&self) -> usize {
        self.spaces.first().map_or(0, |s| s.basis.nrows())
    }

    /// Restricts `space` to eigenvectors supported inside `set`.
    pub fn support_query(
        &self,
        space: &Eigenspace,
        set: &[Vertex],
        zero_tol: f64,
    ) -> Result<SupportQuery> {
        let n = self.n();
        let mut inside = vec![false; n];
        for &v in set {
            inside[v - 1] = true;
        }
        let outside: Vec<Vertex> = (1..=n).filter(|&v| !inside[v - 1]).collect();
        let coeffs = vanishing_subspace(space, &outside, zero_tol);
        let dim = coeffs.ncols();
        if dim == 0 {
            return Ok(SupportQuery { dim, exact: None });
        }
        let y = &space.basis * &coeffs;
        let scale = y.amax();
        // A vertex whose row vanishes on the whole subspace can never be nonzero.
        let blocked = set
            .iter()
            .any(|&v| y.row(v - 1).amax() <= zero_tol * scale);
        if blocked {
            return Ok(SupportQuery { dim, exact: None });
        }
        // Otherwise a generic combination works; try 1, 3, 9, ... then seeded draws.
        let mut weights = DVector::from_fn(dim, |i, _| 3f64.powi(i as i32));
        for attempt in 0..=WITNESS_RETRIES {
            if attempt > 0 {
                let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + attempt);
                weights = DVector::from_fn(dim, |_, _| {
                    let w: f64 = rng.random_range(1.0..2.0);
                    if rng.random::<bool>() { w } else { -w }
                });
            }
            let mut cand = &y * &weights;
            let norm = cand.amax();
            cand.unscale_mut(norm);
            if set.iter().all(|&v| cand[v - 1].abs() > zero_tol) {
                return Ok(SupportQuery {
                    dim,
                    exact: Some(cand),
                });
            }
        }
        Err(Error::WitnessConstruction(set.to_vec()))
    }

    /// Some eigenvector whose support is contained in `set`.
    pub fn critical_witness(&self, set: &[Vertex], zero_tol: f64) -> Option<Witness> {
        let n = self.n();
        let mut inside = vec![false; n];
        for &v in set {
            inside[v - 1] = true;
        }
        let outside: Vec<Vertex> = (1..=n).filter(|&v| !inside[v - 1]).collect();
        self.spaces.iter().find_map(|space| {
            let k = vanishing_subspace(space, &outside, zero_tol);
            (k.ncols() > 0).then(|| {
                let mut y = &space.basis * k.column(0);
                let norm = y.amax();
                y.unscale_mut(norm);
                Witness {
                    value: space.value,
                    vector: y,
                }
            })
        })
    }
}

/// An eigenvector whose support is exactly `set`, if one exists.
pub fn exists_support_exactly(
    decomp: &SpectralDecomposition,
    set: &[Vertex],
    zero_tol: f64,
) -> Result<Option<Witness>> {
    for space in &decomp.spaces {
        if let Some(vector) = decomp.support_query(space, set, zero_tol)?.exact {
            return Ok(Some(Witness {
                value: space.value,
                vector,
            }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::twin_tree;
    use crate::graph::{laplacian, Graph};

    fn decompose(g: &Graph) -> SpectralDecomposition {
        eigen_decompose(&laplacian(g), DEFAULT_GROUP_TOL).unwrap()
    }

    fn space_near(d: &SpectralDecomposition, value: f64) -> &Eigenspace {
        d.spaces.iter().find(|s| (s.value - value).abs() < 1e-9).unwrap()
    }

    #[test]
    fn k2_spectrum() {
        let d = decompose(&Graph::path(2));
        let values: Vec<f64> = d.spaces.iter().map(|s| s.value).collect();
        assert_eq!(d.spaces.len(), 2);
        assert!(values[0].abs() < 1e-12 && (values[1] - 2.0).abs() < 1e-12);
        assert!(d.spaces.iter().all(|s| s.multiplicity() == 1));
    }

    #[test]
    fn twin_tree_unit_eigenvalue_has_multiplicity_three() {
        // (λ−1)^3 divides the characteristic polynomial: the λ=1 eigenspace is
        // {y2 = y4 = 0, y1 + y3 = 0, y5 + y6 + y7 = 0}.
        let d = decompose(&twin_tree());
        let one = space_near(&d, 1.0);
        assert_eq!(one.multiplicity(), 3);
        assert_eq!(d.spaces.iter().map(|s| s.multiplicity()).sum::<usize>(), 7);
        let rows24 = vanishing_subspace(one, &[2, 4], DEFAULT_ZERO_TOL);
        assert_eq!(rows24.ncols(), 3);
        assert_eq!(vanishing_subspace(one, &[], DEFAULT_ZERO_TOL).ncols(), 3);
        assert_eq!(vanishing_subspace(one, &[1, 2, 3, 4, 5, 6, 7], DEFAULT_ZERO_TOL).ncols(), 0);
    }

    #[test]
    fn p5_contains_golden_eigenvalue() {
        let d = decompose(&Graph::path(5));
        let target = (3.0 - 5f64.sqrt()) / 2.0;
        assert!(d.spaces.iter().any(|s| (s.value - target).abs() < 1e-9));
    }

    #[test]
    fn decomposition_invariants() {
        let g = twin_tree();
        let l = laplacian(&g);
        let d = decompose(&g);
        let lf = l.map(|x| x as f64);
        let mut recon = DMatrix::<f64>::zeros(7, 7);
        for s in &d.spaces {
            let u = &s.basis;
            assert!((&lf * u - u * s.value).amax() <= 1e-9 * s.value.max(1.0));
            assert!((u.transpose() * u - DMatrix::identity(u.ncols(), u.ncols())).amax() <= 1e-10);
            if s.value.abs() > 1e-9 {
                assert!(u.row_sum().amax() <= 1e-8);
            }
            recon += u * u.transpose() * s.value;
        }
        assert!((recon - lf).amax() <= 1e-7 * 4.0);
        assert!(d.spaces[0].value.abs() < 1e-9 && d.spaces[0].multiplicity() == 1);
        for w in d.spaces.windows(2) {
            assert!(w[1].value - w[0].value > d.group_tol);
        }
    }

    #[test]
    fn exact_support_examples() {
        let d = decompose(&twin_tree());
        let w = exists_support_exactly(&d, &[1, 3], DEFAULT_ZERO_TOL).unwrap().unwrap();
        assert!((w.value - 1.0).abs() < 1e-9);
        assert!((w.vector[0] + w.vector[2]).abs() < 1e-9);
        assert_eq!(w.support(DEFAULT_ZERO_TOL), vec![1, 3]);
        assert!(exists_support_exactly(&d, &[3, 5], DEFAULT_ZERO_TOL).unwrap().is_none());
        assert!(exists_support_exactly(&d, &[1, 2, 3, 5, 6, 7], DEFAULT_ZERO_TOL).unwrap().is_none());
    }

    #[test]
    fn full_vertex_set_is_supported_by_constant_vector() {
        let g = twin_tree();
        let d = decompose(&g);
        let all: Vec<usize> = g.vertices().collect();
        let w = exists_support_exactly(&d, &all, DEFAULT_ZERO_TOL).unwrap().unwrap();
        assert!(w.value.abs() < 1e-9);
        assert!(w.residual(&laplacian(&g)) <= 1e-7);
    }
}
