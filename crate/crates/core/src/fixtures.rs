//! Small named graphs used throughout the tests, benches and CLI examples.

use crate::graph::{build_lobster, Graph, LobsterSpec};

/// Seven-vertex tree whose leaves form twin groups {1, 3} and {5, 6, 7}
/// (edges 1-2, 2-3, 2-4, 4-5, 4-6, 4-7).
pub fn twin_tree() -> Graph {
    Graph::new(7, [(1, 2), (2, 3), (2, 4), (4, 5), (4, 6), (4, 7)]).expect("static edges")
}

/// Spine `a-b-c-d` (ids 1..4) with a 2-path on `a` and `d` and one pendant on
/// `b` and on `c`: the smallest lobster carrying an 8-vertex spine pattern.
pub fn spine8() -> Graph {
    build_lobster(&LobsterSpec::new(vec![vec![2], vec![1], vec![1], vec![2]]).expect("static spec"))
        .expect("static spec")
}

/// Three 2-paths glued at vertex 1: 1-2-3, 1-4-5, 1-6-7.
pub fn star_of_three_2paths() -> Graph {
    Graph::new(7, [(1, 2), (2, 3), (1, 4), (4, 5), (1, 6), (6, 7)]).expect("static edges")
}
