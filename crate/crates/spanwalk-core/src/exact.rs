//! Exact integer linear algebra shared by the tree counters.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Determinant by fraction-free (Bareiss) elimination. Every division is
/// exact, so the result is the true integer determinant.
pub(crate) fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    debug_assert!(m.iter().all(|row| row.len() == n), "matrix must be square");
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = num / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let det = core::mem::replace(&mut m[n - 1][n - 1], BigInt::zero());
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// Convenience wrapper over integer entries.
#[cfg(test)]
pub(crate) fn determinant_i64(rows: &[Vec<i64>]) -> BigInt {
    let m: Vec<Vec<BigInt>> =
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    bareiss_determinant(m)
}

/// Nonnegative determinants (Laplacian minors count objects) as `BigUint`.
pub(crate) fn nonnegative_determinant(rows: Vec<Vec<BigInt>>) -> num_bigint::BigUint {
    let det = bareiss_determinant(rows);
    debug_assert!(!det.is_negative(), "determinant expected to be nonnegative");
    det.magnitude().clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn small_determinants() {
        assert_eq!(determinant_i64(&[]), BigInt::from(1));
        assert_eq!(determinant_i64(&[vec![7]]), BigInt::from(7));
        assert_eq!(determinant_i64(&[vec![1, 2], vec![3, 4]]), BigInt::from(-2));
        assert_eq!(
            determinant_i64(&[vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]]),
            BigInt::from(4)
        );
    }

    #[test]
    fn singular_matrix_is_zero() {
        assert_eq!(
            determinant_i64(&[vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]]),
            BigInt::from(0)
        );
    }

    #[test]
    fn pivot_swap_tracks_sign() {
        assert_eq!(determinant_i64(&[vec![0, 1], vec![1, 0]]), BigInt::from(-1));
        assert_eq!(
            determinant_i64(&[vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]),
            BigInt::from(-1)
        );
    }

    /// Cofactor expansion reference for cross-checking.
    fn naive_det(m: &[Vec<i64>]) -> i128 {
        let n = m.len();
        if n == 0 {
            return 1;
        }
        if n == 1 {
            return m[0][0] as i128;
        }
        let mut acc = 0i128;
        for (c, &head) in m[0].iter().enumerate() {
            if head == 0 {
                continue;
            }
            let minor: Vec<Vec<i64>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter_map(|(j, &x)| if j != c { Some(x) } else { None })
                        .collect()
                })
                .collect();
            let term = head as i128 * naive_det(&minor);
            if c % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    #[test]
    fn matches_cofactor_expansion_on_random_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(3);
        for n in 1..=5usize {
            for _ in 0..20 {
                let m: Vec<Vec<i64>> = (0..n)
                    .map(|_| (0..n).map(|_| rng.gen_range(-6i64..=6)).collect())
                    .collect();
                assert_eq!(determinant_i64(&m), BigInt::from(naive_det(&m)));
            }
        }
    }
}
