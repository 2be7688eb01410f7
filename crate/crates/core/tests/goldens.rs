//! Catalogs frozen from an independent 50-digit enumeration.

use lobster_core::fixtures::{twin_tree, spine8, star_of_three_2paths};
use lobster_core::mpcs::{enumerate_mpcs_bruteforce, BRUTE_N_CAP};
use lobster_core::par::Execution;
use lobster_core::{Analysis, Graph};

fn catalog(g: Graph) -> Vec<(Vec<usize>, f64)> {
    let an = Analysis::new(g).unwrap();
    enumerate_mpcs_bruteforce(&an, BRUTE_N_CAP, Execution::Sequential)
        .unwrap()
        .records
        .into_iter()
        .map(|r| (r.vertices, r.lambda))
        .collect()
}

fn assert_catalog(g: Graph, want: &[(&[usize], f64)]) {
    let got = catalog(g);
    assert_eq!(got.len(), want.len(), "{got:?}");
    for ((set, lambda), (wset, wlambda)) in got.iter().zip(want) {
        assert_eq!(set.as_slice(), *wset);
        assert!((lambda - wlambda).abs() < 1e-9, "{set:?}: {lambda} vs {wlambda}");
    }
}

const LOW: f64 = 0.381966011250105;

#[test]
fn twin_tree_catalog() {
    assert_catalog(twin_tree(), &[(&[1, 3], 1.0), (&[5, 6], 1.0), (&[5, 7], 1.0), (&[6, 7], 1.0)]);
}

#[test]
fn p5_catalog() {
    assert_catalog(Graph::path(5), &[(&[1, 2, 4, 5], LOW)]);
}

#[test]
fn eight_vertex_pattern_catalog() {
    assert_catalog(spine8(), &[(&[2, 3, 5, 6, 7, 8, 9, 10], LOW)]);
}

#[test]
fn star_of_two_paths_catalog() {
    assert_catalog(
        star_of_three_2paths(),
        &[(&[2, 3, 4, 5], LOW), (&[2, 3, 6, 7], LOW), (&[4, 5, 6, 7], LOW)],
    );
}
