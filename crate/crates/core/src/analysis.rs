//! A graph bundled with its Laplacian and eigendecomposition, so that repeated
//! controllability and critical-set queries share one spectral computation.

use std::sync::OnceLock;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::{laplacian, Graph};
use crate::mpcs::MpcsCatalog;
use crate::spectral::{eigen_decompose, SpectralDecomposition, DEFAULT_GROUP_TOL, DEFAULT_ZERO_TOL};
use crate::Vertex;

#[derive(Debug)]
pub struct Analysis {
    graph: Graph,
    laplacian: DMatrix<i64>,
    decomp: SpectralDecomposition,
    zero_tol: f64,
    pub(crate) brute_catalog: OnceLock<Option<MpcsCatalog>>,
}

impl Analysis {
    pub fn new(graph: Graph) -> Result<Self> {
        Self::with_tolerances(graph, DEFAULT_GROUP_TOL, DEFAULT_ZERO_TOL)
    }

    pub fn with_tolerances(graph: Graph, group_tol: f64, zero_tol: f64) -> Result<Self> {
        let laplacian = laplacian(&graph);
        let decomp = eigen_decompose(&laplacian, group_tol)?;
        Ok(Analysis {
            graph,
            laplacian,
            decomp,
            zero_tol,
            brute_catalog: OnceLock::new(),
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn laplacian(&self) -> &DMatrix<i64> {
        &self.laplacian
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.decomp
    }

    pub fn zero_tol(&self) -> f64 {
        self.zero_tol
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// Sorted, deduplicated copy of `set`, validated against `1..=n`.
    pub(crate) fn normalize_set(&self, set: &[Vertex]) -> Result<Vec<Vertex>> {
        normalize_set(self.n(), set)
    }
}

pub(crate) fn normalize_set(n: usize, set: &[Vertex]) -> Result<Vec<Vertex>> {
    let mut s = set.to_vec();
    s.sort_unstable();
    s.dedup();
    if let Some(&bad) = s.iter().find(|&&v| v == 0 || v > n) {
        return Err(Error::InvalidVertexSet(format!(
            "vertex {bad} out of range 1..={n}"
        )));
    }
    Ok(s)
}
