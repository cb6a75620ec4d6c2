//! Exact arithmetic helpers: rationals, permutation and Koszul signs, and
//! small exact linear algebra used for homology ranks.

pub use num::rational::Rational64;
use num::{One, Signed, Zero};

/// Parity of the permutation sending position `i` to `perm[i]`.
pub fn permutation_sign(perm: &[usize]) -> i64 {
    let mut sign = 1i64;
    let mut seen = vec![false; perm.len()];
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// Koszul sign of reordering graded elements. `new_order[k]` is the original
/// position of the element now at position `k`; `degrees` are indexed by the
/// original positions. Every inversion of a pair with odd degrees contributes
/// a factor `-1`.
pub fn koszul_sign(new_order: &[usize], degrees: &[usize]) -> i64 {
    let mut sign = 1i64;
    for k in 0..new_order.len() {
        for l in k + 1..new_order.len() {
            if new_order[k] > new_order[l]
                && degrees[new_order[k]] % 2 == 1
                && degrees[new_order[l]] % 2 == 1
            {
                sign = -sign;
            }
        }
    }
    sign
}

/// Rank of a rational matrix (rows of equal length) by Gaussian elimination.
pub fn rational_rank(rows: &[Vec<Rational64>]) -> usize {
    let mut m: Vec<Vec<Rational64>> = rows.to_vec();
    let nrows = m.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = m[0].len();
    let mut rank = 0;
    let mut col = 0;
    while rank < nrows && col < ncols {
        let Some(pivot) = (rank..nrows).find(|&r| !m[r][col].is_zero()) else {
            col += 1;
            continue;
        };
        m.swap(rank, pivot);
        let p = m[rank][col];
        for c in col..ncols {
            m[rank][c] /= p;
        }
        for r in 0..nrows {
            if r != rank && !m[r][col].is_zero() {
                let f = m[r][col];
                for c in col..ncols {
                    let x = m[rank][c];
                    m[r][c] -= f * x;
                }
            }
        }
        rank += 1;
        col += 1;
    }
    rank
}

/// Rank of an integer matrix.
pub fn integer_rank(rows: &[Vec<i64>]) -> usize {
    let rat: Vec<Vec<Rational64>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| Rational64::from_integer(x)).collect())
        .collect();
    rational_rank(&rat)
}

/// Determinant of a square integer matrix, exact.
pub fn integer_det(rows: &[Vec<i64>]) -> Rational64 {
    let n = rows.len();
    let mut m: Vec<Vec<Rational64>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| Rational64::from_integer(x)).collect())
        .collect();
    let mut det = Rational64::one();
    for k in 0..n {
        let Some(pivot) = (k..n).find(|&r| !m[r][k].is_zero()) else {
            return Rational64::zero();
        };
        if pivot != k {
            m.swap(k, pivot);
            det = -det;
        }
        det *= m[k][k];
        let p = m[k][k];
        for r in k + 1..n {
            if !m[r][k].is_zero() {
                let f = m[r][k] / p;
                for c in k..n {
                    let x = m[k][c];
                    m[r][c] -= f * x;
                }
            }
        }
    }
    det
}

/// Solves `A x = b` over the rationals if `A` is square and invertible.
pub fn rational_solve(a: &[Vec<Rational64>], b: &[Rational64]) -> Option<Vec<Rational64>> {
    let n = a.len();
    let mut m: Vec<Vec<Rational64>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(*rhs);
            r
        })
        .collect();
    for k in 0..n {
        let pivot = (k..n).find(|&r| !m[r][k].is_zero())?;
        m.swap(k, pivot);
        let p = m[k][k];
        for c in k..=n {
            m[k][c] /= p;
        }
        for r in 0..n {
            if r != k && !m[r][k].is_zero() {
                let f = m[r][k];
                for c in k..=n {
                    let x = m[k][c];
                    m[r][c] -= f * x;
                }
            }
        }
    }
    Some((0..n).map(|r| m[r][n]).collect())
}

/// Signum helper for rationals.
pub fn sign_of(x: Rational64) -> i64 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_sign_matches_inversion_parity() {
        assert_eq!(permutation_sign(&[0, 1, 2]), 1);
        assert_eq!(permutation_sign(&[1, 0, 2]), -1);
        assert_eq!(permutation_sign(&[1, 2, 0]), 1);
        assert_eq!(permutation_sign(&[3, 2, 1, 0]), 1);
    }

    #[test]
    fn koszul_reduces_to_parity_for_odd_degrees() {
        let order = [2usize, 0, 1];
        assert_eq!(koszul_sign(&order, &[1, 1, 1]), 1);
        assert_eq!(koszul_sign(&[1, 0], &[1, 1]), -1);
        // Even-degree elements commute freely.
        assert_eq!(koszul_sign(&[1, 0], &[2, 1]), 1);
        assert_eq!(koszul_sign(&[1, 0], &[2, 2]), 1);
    }

    #[test]
    fn rank_and_det() {
        let rows = vec![vec![1i64, 2, 3], vec![2, 4, 6], vec![0, 1, 1]];
        assert_eq!(integer_rank(&rows), 2);
        let sq = vec![vec![2i64, 0], vec![1, 3]];
        assert_eq!(integer_det(&sq), Rational64::from_integer(6));
    }
}
