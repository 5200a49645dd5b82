//! Matrix permanents by Ryser's inclusion-exclusion formula.

use num_complex::Complex64;

/// Permanent of a square `dim x dim` matrix stored row-major.
///
/// Uses Ryser's formula
/// `perm(A) = (-1)^n sum_{S} (-1)^{|S|} prod_i sum_{j in S} a_ij`
/// with the column subsets visited in Gray-code order, so each step adds or
/// removes a single column from the running row sums: `O(2^n n)` work.
/// The permanent of the empty matrix is 1.
pub fn permanent(dim: usize, entries: &[Complex64]) -> Complex64 {
    assert_eq!(entries.len(), dim * dim, "permanent: expected a {dim}x{dim} matrix");
    assert!(dim < 64, "permanent: dimension {dim} too large");
    match dim {
        0 => return Complex64::new(1.0, 0.0),
        1 => return entries[0],
        _ => {}
    }

    let mut row_sums = vec![Complex64::default(); dim];
    let mut total = Complex64::default();
    let mut gray: u64 = 0;
    for k in 1u64..(1 << dim) {
        let col = k.trailing_zeros() as usize;
        let bit = 1u64 << col;
        let adding = gray & bit == 0;
        gray ^= bit;
        for (i, sum) in row_sums.iter_mut().enumerate() {
            let a = entries[i * dim + col];
            if adding {
                *sum += a;
            } else {
                *sum -= a;
            }
        }
        let prod: Complex64 = row_sums.iter().product();
        if gray.count_ones().is_multiple_of(2) {
            total += prod;
        } else {
            total -= prod;
        }
    }
    if dim % 2 == 1 {
        -total
    } else {
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;
    use proptest::prelude::*;

    // Reference permanent: direct sum over all n! permutations.
    fn permanent_by_definition(dim: usize, entries: &[Complex64]) -> Complex64 {
        (0..dim)
            .permutations(dim)
            .map(|p| p.iter().enumerate().map(|(i, &j)| entries[i * dim + j]).product::<Complex64>())
            .sum()
    }

    #[test]
    fn small_cases() {
        assert_eq!(permanent(0, &[]), Complex64::new(1.0, 0.0));
        let a = Complex64::new(0.3, -2.0);
        assert_eq!(permanent(1, &[a]), a);
        // [[1,2],[3,4]] -> 1*4 + 2*3
        let m: Vec<_> = [1.0, 2.0, 3.0, 4.0].iter().map(|&x| Complex64::new(x, 0.0)).collect();
        assert!((permanent(2, &m) - Complex64::new(10.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn all_ones_gives_factorial() {
        for dim in 0..=8 {
            let ones = vec![Complex64::new(1.0, 0.0); dim * dim];
            let expected: f64 = (1..=dim).map(|x| x as f64).product();
            assert!((permanent(dim, &ones) - Complex64::new(expected, 0.0)).norm() < 1e-9 * expected.max(1.0));
        }
    }

    proptest! {
        #[test]
        fn matches_definition(dim in 1usize..=6, seed in prop::collection::vec(-3.0f64..3.0, 72)) {
            let entries: Vec<Complex64> = (0..dim * dim)
                .map(|i| Complex64::from_polar(1.0, seed[i] + seed[36 + i] * 0.5))
                .collect();
            let fast = permanent(dim, &entries);
            let slow = permanent_by_definition(dim, &entries);
            prop_assert!((fast - slow).norm() <= 1e-9 * slow.norm().max(1.0));
        }
    }
}
