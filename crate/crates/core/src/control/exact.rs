//! Exact rank computations for the Kalman controllability test.
//!
//! Three routes, all tolerance-free:
//!
//! * [`bareiss_rank`] on the literal controllability matrix `[B, AB, …, A^{N−1}B]`
//!   (fraction-free elimination over big integers). Only practical for small `N`
//!   since entries grow like `‖A‖^{N−1}`.
//! * [`krylov_rank`]: the dimension of the smallest `A`-invariant subspace
//!   containing the columns of `B`, which equals `rank C`. Vectors are kept as
//!   primitive integer vectors (content divided out) in echelon form.
//! * [`krylov_rank_mod_p`]: the same iteration over `Z/pZ`. Reduction mod `p`
//!   can only lose rank, so a full rank mod `p` certifies full rank over `Q`.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// The Mersenne prime `2^61 − 1`.
const P: u64 = (1 << 61) - 1;

/// Sparse integer square matrix in row-list form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    pub rows: Vec<Vec<(usize, i64)>>,
}

impl SparseMatrix {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let n = self.dim();
        let mut m = vec![vec![0; n]; n];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, x) in row {
                m[i][j] = x;
            }
        }
        m
    }
}

/// Fraction-free Gaussian elimination; returns the rank. Stops early once the
/// rank reaches the row count.
pub fn bareiss_rank(mut m: Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        for i in rank + 1..rows {
            for j in col + 1..cols {
                let t = &m[rank][col] * &m[i][j] - &m[i][col] * &m[rank][j];
                debug_assert!((&t % &prev).is_zero(), "Bareiss division must be exact");
                m[i][j] = t / &prev;
            }
            m[i][col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
    }
    rank
}

/// `[B, AB, A²B, …, A^{N−1}B]` with `N = dim A`, as big-integer rows.
pub fn controllability_matrix(a: &SparseMatrix, b_cols: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    let n = a.dim();
    let mut blocks: Vec<Vec<BigInt>> = b_cols
        .iter()
        .map(|c| c.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut all = blocks.clone();
    for _ in 1..n {
        blocks = blocks.iter().map(|v| matvec(a, v)).collect();
        all.extend(blocks.iter().cloned());
    }
    // columns -> rows
    (0..n)
        .map(|i| all.iter().map(|col| col[i].clone()).collect())
        .collect()
}

fn matvec(a: &SparseMatrix, v: &[BigInt]) -> Vec<BigInt> {
    a.rows
        .iter()
        .map(|row| {
            row.iter()
                .fold(BigInt::zero(), |acc, &(j, x)| acc + &v[j] * x)
        })
        .collect()
}

fn make_primitive(v: &mut [BigInt]) {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x /= &g;
        }
    }
}

/// Exact `rank [B, AB, …]` via Krylov closure over the integers.
pub fn krylov_rank(a: &SparseMatrix, b_cols: &[Vec<i64>]) -> usize {
    let n = a.dim();
    let mut basis: Vec<(usize, Vec<BigInt>)> = Vec::new();
    let mut queue: VecDeque<Vec<BigInt>> = b_cols
        .iter()
        .map(|c| c.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    while let Some(mut v) = queue.pop_front() {
        if basis.len() == n {
            break;
        }
        for (p, b) in &basis {
            if v[*p].is_zero() {
                continue;
            }
            let (bp, vp) = (b[*p].clone(), v[*p].clone());
            for (x, y) in v.iter_mut().zip(b) {
                *x = &bp * &*x - &vp * y;
            }
            make_primitive(&mut v);
        }
        if let Some(p) = v.iter().position(|x| !x.is_zero()) {
            if v[p].is_negative() {
                v.iter_mut().for_each(|x| *x = -&*x);
            }
            queue.push_back(matvec(a, &v));
            basis.push((p, v));
        }
    }
    basis.len()
}

fn to_mod(x: i64) -> u64 {
    x.rem_euclid(P as i64) as u64
}

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a);
        }
        a = mul_mod(a, a);
        e >>= 1;
    }
    r
}

/// `rank [B, AB, …]` over `Z/pZ`, `p = 2^61 − 1`. Never exceeds the rational rank.
pub fn krylov_rank_mod_p(a: &SparseMatrix, b_cols: &[Vec<i64>]) -> usize {
    let n = a.dim();
    let matvec_mod = |v: &[u64]| -> Vec<u64> {
        a.rows
            .iter()
            .map(|row| {
                row.iter()
                    .fold(0u64, |acc, &(j, x)| (acc + mul_mod(v[j], to_mod(x))) % P)
            })
            .collect()
    };
    // Basis vectors are normalised to 1 at their pivot.
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut queue: VecDeque<Vec<u64>> = b_cols
        .iter()
        .map(|c| c.iter().map(|&x| to_mod(x)).collect())
        .collect();
    while let Some(mut v) = queue.pop_front() {
        if basis.len() == n {
            break;
        }
        for (p, b) in &basis {
            let f = v[*p];
            if f == 0 {
                continue;
            }
            for (x, &y) in v.iter_mut().zip(b) {
                *x = (*x + P - mul_mod(f, y)) % P;
            }
        }
        if let Some(p) = v.iter().position(|&x| x != 0) {
            let inv = pow_mod(v[p], P - 2);
            v.iter_mut().for_each(|x| *x = mul_mod(*x, inv));
            queue.push_back(matvec_mod(&v));
            basis.push((p, v));
        }
    }
    basis.len()
}
