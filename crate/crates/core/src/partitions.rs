//! Counting of l-regular partitions and bipartitions, by generating
//! function and by an independent brute-force route.
//!
//! The generating-function route expands f_l^2 / f_1^2 with the series
//! engine. The brute-force route is a bounded-part dynamic program over
//! parts not divisible by l, self-convolved for bipartitions; it shares
//! no code with the series engine and acts as the trust anchor for every
//! congruence scan downstream.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::series::{euler_product, pentagonal_series, TruncatedSeries};

/// Generating series whose q^n coefficient counts l-regular bipartitions
/// of n.
#[derive(Clone, Debug)]
pub struct BipartitionSeries {
    pub ell: u64,
    pub series: TruncatedSeries,
}

/// Expansion of f_l^2 / f_1^2 to the given truncation, exact or mod m.
///
/// Computed as (f_l)^2 divided twice by the sparse pentagonal series f_1,
/// which is equivalent to multiplying by the inverse of f_1^2 but runs in
/// O(N sqrt N) instead of O(N^2).
pub fn bipartition_series(ell: u64, truncation: usize, modulus: Option<u64>) -> BipartitionSeries {
    assert!(ell >= 2, "l-regular bipartitions need l >= 2");
    let f1 = pentagonal_series(1, truncation, modulus);
    let numerator = euler_product(ell, 2, truncation, modulus);
    let series = numerator
        .div(&f1)
        .and_then(|s| s.div(&f1))
        .expect("pentagonal series has unit constant term");
    debug_assert!(!series.coeff(0).is_zero(), "B_l(0) = 1");
    debug_assert!(
        series
            .exact_coeffs()
            .map_or(true, |c| c.iter().all(|v| !v.is_negative())),
        "exact bipartition counts are nonnegative"
    );
    BipartitionSeries { ell, series }
}

/// Expansion of f_l / f_1: coefficient n is b_l(n), the number of
/// l-regular partitions of n.
pub fn regular_series(ell: u64, truncation: usize, modulus: Option<u64>) -> TruncatedSeries {
    assert!(ell >= 2);
    let f1 = pentagonal_series(1, truncation, modulus);
    euler_product(ell, 1, truncation, modulus)
        .div(&f1)
        .expect("unit constant term")
}

/// Table of b_l(0..=n_max) by bounded-part dynamic programming over parts
/// not divisible by l. Exact integers; practical up to n_max ~ 10^4.
pub fn brute_force_regular(ell: u64, n_max: usize) -> Vec<BigInt> {
    assert!(ell >= 2);
    let mut dp = vec![BigInt::zero(); n_max + 1];
    dp[0] = BigInt::one();
    for part in 1..=n_max {
        if part as u64 % ell == 0 {
            continue;
        }
        for s in part..=n_max {
            let (lo, hi) = dp.split_at_mut(s);
            hi[0] += &lo[s - part];
        }
    }
    dp
}

/// B_l(n) by brute force: DP table for b_l, then one self-convolution.
pub fn brute_force_bipartition(ell: u64, n: usize) -> BigInt {
    let table = brute_force_regular(ell, n);
    convolve_at(&table, n)
}

/// Table of B_l(0..=n_max) by brute force.
pub fn brute_force_bipartition_table(ell: u64, n_max: usize) -> Vec<BigInt> {
    let table = brute_force_regular(ell, n_max);
    (0..=n_max).map(|n| convolve_at(&table, n)).collect()
}

/// Self-convolution of a table at index n: sum_k t[k] * t[n-k].
pub(crate) fn convolve_at(table: &[BigInt], n: usize) -> BigInt {
    let mut acc = BigInt::zero();
    for k in 0..=n {
        acc += &table[k] * &table[n - k];
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Coefficient;

    /// Recursive enumeration of l-regular partitions of n with parts
    /// at most `max_part`. A second, even more naive oracle used to
    /// validate the DP itself on small inputs.
    fn count_by_enumeration(ell: u64, n: usize, max_part: usize) -> u64 {
        if n == 0 {
            return 1;
        }
        let mut total = 0;
        for part in (1..=max_part.min(n)).rev() {
            if part as u64 % ell == 0 {
                continue;
            }
            total += count_by_enumeration(ell, n - part, part);
        }
        total
    }

    #[test]
    fn dp_matches_enumeration_on_small_inputs() {
        for ell in [2u64, 3, 4, 6] {
            let table = brute_force_regular(ell, 24);
            for n in 0..=24usize {
                assert_eq!(
                    table[n],
                    BigInt::from(count_by_enumeration(ell, n, n)),
                    "ell={ell} n={n}"
                );
            }
        }
    }

    #[test]
    fn known_small_counts() {
        // odd-part partitions of 5: 5, 3+1+1, 1^5
        assert_eq!(brute_force_regular(2, 5)[5], BigInt::from(3));
        // 3-regular partitions of 3: 2+1, 1+1+1
        assert_eq!(brute_force_regular(3, 3)[3], BigInt::from(2));
        assert_eq!(brute_force_bipartition(2, 0), BigInt::from(1));
        assert_eq!(brute_force_bipartition(2, 1), BigInt::from(2));
        assert_eq!(brute_force_bipartition(2, 2), BigInt::from(3));
        // 4-regular bipartitions of 2: (2,-), (11,-), (-,2), (-,11), (1,1)
        assert_eq!(brute_force_bipartition(4, 2), BigInt::from(5));
    }

    #[test]
    fn series_agrees_with_brute_force() {
        for ell in [2u64, 4, 9] {
            let n = 100;
            let series = bipartition_series(ell, n, None);
            let oracle = brute_force_bipartition_table(ell, n);
            for i in 0..=n {
                assert_eq!(
                    series.series.coeff(i),
                    Coefficient::Exact(oracle[i].clone()),
                    "ell={ell} n={i}"
                );
            }
        }
    }

    #[test]
    fn regular_series_matches_dp() {
        for ell in [2u64, 3, 5] {
            let n = 150;
            let series = regular_series(ell, n, None);
            let table = brute_force_regular(ell, n);
            for i in 0..=n {
                assert_eq!(series.coeff(i), Coefficient::Exact(table[i].clone()));
            }
        }
    }

    #[test]
    fn division_route_equals_literal_formula() {
        // f_l^2 * (f_1^2)^{-1} computed the slow way must agree with the
        // two-division route used by bipartition_series.
        for ell in [2u64, 4] {
            let n = 600;
            let m = Some(4);
            let literal = euler_product(ell, 2, n, m)
                .mul(&euler_product(1, 2, n, m).invert().unwrap())
                .unwrap();
            assert_eq!(bipartition_series(ell, n, m).series, literal);
        }
    }

    #[test]
    fn reduction_consistency() {
        let n = 500;
        for m in [4u64, 8, 9, 27] {
            for ell in [2u64, 3] {
                let exact = bipartition_series(ell, n, None).series;
                let modular = bipartition_series(ell, n, Some(m)).series;
                assert_eq!(exact.reduce_mod(m).unwrap(), modular, "ell={ell} m={m}");
            }
        }
    }

    #[test]
    fn mod_four_eta_power_identities() {
        // sum B_2(n) q^n = (q;q)_inf^2 and sum B_4(n) q^n = (q;q)_inf^6, mod 4
        let n = 2000;
        let b2 = bipartition_series(2, n, Some(4)).series;
        assert_eq!(b2, euler_product(1, 1, n, Some(4)).pow(2));
        let b4 = bipartition_series(4, n, Some(4)).series;
        assert_eq!(b4, euler_product(1, 1, n, Some(4)).pow(6));
    }
}
