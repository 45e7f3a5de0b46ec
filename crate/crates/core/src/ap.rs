//! Sums and averages of `a_n` over `[1, x]` and over arithmetic progressions.
//!
//! `A(b, q, x)` divides by `x`, not by the number of indices in the
//! progression, so its main term carries the factor `1/q`.

use serde::{Deserialize, Serialize};

use crate::consts::SQRT_3;
use crate::error::{Error, Result};
use crate::exact::{self, ATable};
use crate::parallel;

/// Where the terms `a_n` come from.
pub trait ASource: Sync {
    fn a(&self, n: u64) -> u64;
}

/// Computes each term from scratch.
#[derive(Debug, Clone, Copy, Default)]
pub struct OnTheFly;

impl ASource for OnTheFly {
    fn a(&self, n: u64) -> u64 {
        exact::a_u64(n).expect("index below 2^42")
    }
}

impl ASource for ATable {
    fn a(&self, n: u64) -> u64 {
        self.get(n)
    }
}

/// Residue class `b mod q` cut off at `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApQuery {
    b: u64,
    q: u64,
    x: u64,
}

impl ApQuery {
    /// Normalizes `b` into `[0, q)`.
    pub fn new(b: u64, q: u64, x: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::param("modulus q must be at least 1"));
        }
        if x == 0 {
            return Err(Error::param("cutoff x must be at least 1"));
        }
        if x >= exact::FAST_LIMIT {
            return Err(Error::param("cutoff x must stay below 2^42"));
        }
        Ok(Self { b: b % q, q, x })
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    /// Smallest `n >= 1` in the class.
    pub fn first_index(&self) -> u64 {
        if self.b == 0 {
            self.q
        } else {
            self.b
        }
    }

    /// Number of `n` in `[1, x]` with `n = b mod q`.
    pub fn count(&self) -> u64 {
        let first = self.first_index();
        if first > self.x {
            0
        } else {
            (self.x - first) / self.q + 1
        }
    }
}

/// One row of the averages table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AverageReport {
    pub x: u64,
    pub q: u64,
    pub b: u64,
    pub raw_sum: u128,
    pub average: f64,
    pub main_term: f64,
    pub residual: f64,
    pub ratio: f64,
    pub count: u64,
}

/// `x^{3/2} / (5 q sqrt 3)`.
pub fn main_term_average(x: u64, q: u64) -> f64 {
    exact::three_halves_power(x) / (5.0 * q as f64 * SQRT_3)
}

/// `x^{5/2} / (5 q sqrt 3)`, the main term of `M(b, q, x) = x A(b, q, x)`.
pub fn main_term_sum(x: u64, q: u64) -> f64 {
    x as f64 * main_term_average(x, q)
}

pub fn sum_a(x: u64) -> Result<u128> {
    sum_a_with(&OnTheFly, x)
}

pub fn sum_a_with(source: &dyn ASource, x: u64) -> Result<u128> {
    let query = ApQuery::new(0, 1, x)?;
    Ok(sum_a_ap_with(source, &query))
}

pub fn average_a(x: u64) -> Result<AverageReport> {
    average_a_with(&OnTheFly, x)
}

pub fn average_a_with(source: &dyn ASource, x: u64) -> Result<AverageReport> {
    let query = ApQuery::new(0, 1, x)?;
    Ok(average_a_ap_with(source, &query))
}

/// `M(b, q, x) = sum of a_n over 1 <= n <= x, n = b mod q`.
pub fn sum_a_ap(query: &ApQuery) -> u128 {
    sum_a_ap_with(&OnTheFly, query)
}

pub fn sum_a_ap_with(source: &dyn ASource, query: &ApQuery) -> u128 {
    let count = query.count();
    if count == 0 {
        return 0;
    }
    let first = query.first_index();
    let q = query.q;
    parallel::sum_u128(0, count - 1, |i| source.a(first + i * q) as u128)
}

pub fn average_a_ap(query: &ApQuery) -> AverageReport {
    average_a_ap_with(&OnTheFly, query)
}

pub fn average_a_ap_with(source: &dyn ASource, query: &ApQuery) -> AverageReport {
    let raw_sum = sum_a_ap_with(source, query);
    report(query, raw_sum)
}

fn report(query: &ApQuery, raw_sum: u128) -> AverageReport {
    let average = raw_sum as f64 / query.x as f64;
    let main_term = main_term_average(query.x, query.q);
    AverageReport {
        x: query.x,
        q: query.q,
        b: query.b,
        raw_sum,
        average,
        main_term,
        residual: average - main_term,
        ratio: average / main_term,
        count: query.count(),
    }
}

/// Per-residue sums for one modulus and whether they add up to the full sum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionReport {
    pub q: u64,
    pub x: u64,
    pub total: u128,
    pub residue_sums: Vec<u128>,
    pub holds: bool,
}

pub fn partition_check(q: u64, x: u64) -> Result<PartitionReport> {
    partition_check_with(&OnTheFly, q, x)
}

pub fn partition_check_with(source: &dyn ASource, q: u64, x: u64) -> Result<PartitionReport> {
    let total = sum_a_with(source, x)?;
    let residue_sums = (0..q)
        .map(|b| ApQuery::new(b, q, x).map(|query| sum_a_ap_with(source, &query)))
        .collect::<Result<Vec<_>>>()?;
    let holds = residue_sums.iter().sum::<u128>() == total;
    Ok(PartitionReport {
        q,
        x,
        total,
        residue_sums,
        holds,
    })
}

/// `(x, |M(b, q, x) - x^{5/2} / (5 q sqrt 3)|)` for each cutoff.
pub fn residual_table(xs: &[u64], b: u64, q: u64) -> Result<Vec<(u64, f64)>> {
    residual_table_with(&OnTheFly, xs, b, q)
}

pub fn residual_table_with(source: &dyn ASource, xs: &[u64], b: u64, q: u64) -> Result<Vec<(u64, f64)>> {
    if xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::param("cutoffs must be strictly increasing"));
    }
    xs.iter()
        .map(|&x| {
            let query = ApQuery::new(b, q, x)?;
            let m = sum_a_ap_with(source, &query);
            Ok((x, (m as f64 - main_term_sum(x, q)).abs()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::MemoryBudget;

    fn brute(b: u64, q: u64, x: u64) -> u128 {
        (1..=x)
            .filter(|n| n % q == b % q)
            .map(|n| exact::a_u64(n).unwrap() as u128)
            .sum()
    }

    #[test]
    fn sum_a_examples() {
        assert_eq!(sum_a(1).unwrap(), 0);
        assert_eq!(sum_a(3).unwrap(), 3);
        assert_eq!(sum_a(24).unwrap(), brute(0, 1, 24));
        assert_eq!(sum_a(24).unwrap(), sum_a(23).unwrap());
        assert!(sum_a(0).is_err());
    }

    #[test]
    fn average_examples() {
        let r = average_a(1).unwrap();
        assert_eq!(r.average, 0.0);
        assert!((r.main_term - 0.115_470_053_837_925_15).abs() < 1e-15);
        assert!(average_a(0).is_err());
    }

    #[test]
    fn ap_examples() {
        assert_eq!(sum_a_ap(&ApQuery::new(0, 1, 3).unwrap()), 3);
        let expected = exact::a_u64(2).unwrap() + exact::a_u64(7).unwrap();
        assert_eq!(sum_a_ap(&ApQuery::new(2, 5, 10).unwrap()), expected as u128);
        assert_eq!(sum_a_ap(&ApQuery::new(24, 100, 24).unwrap()), 0);
        assert_eq!(ApQuery::new(24, 5, 10).unwrap().b(), 4);
        assert!(ApQuery::new(0, 0, 10).is_err());
    }

    #[test]
    fn ap_average_conventions() {
        let r = average_a_ap(&ApQuery::new(1, 2, 10_000).unwrap());
        assert!((r.main_term - 1e6 / (10.0 * 3f64.sqrt())).abs() < 1e-12 * r.main_term);
        // q > x: a single term b, divided by x
        let r = average_a_ap(&ApQuery::new(7, 50, 20).unwrap());
        assert_eq!(r.count, 1);
        assert_eq!(r.average, exact::a_u64(7).unwrap() as f64 / 20.0);
        let r = average_a_ap(&ApQuery::new(30, 50, 20).unwrap());
        assert_eq!(r.count, 0);
        assert_eq!(r.average, 0.0);
    }

    #[test]
    fn q_one_matches_full_average() {
        for x in [1, 10, 999, 12_345] {
            assert_eq!(average_a_ap(&ApQuery::new(0, 1, x).unwrap()), average_a(x).unwrap());
        }
    }

    #[test]
    fn ap_sums_match_brute_force() {
        for q in 1..=9 {
            for b in 0..q {
                assert_eq!(sum_a_ap(&ApQuery::new(b, q, 2_000).unwrap()), brute(b, q, 2_000));
            }
        }
    }

    #[test]
    fn table_source_agrees() {
        let table = ATable::build(50_000, MemoryBudget::default()).unwrap();
        let q = ApQuery::new(3, 8, 50_000).unwrap();
        assert_eq!(sum_a_ap_with(&table, &q), sum_a_ap(&q));
    }

    #[test]
    fn partition_examples() {
        assert!(partition_check(1, 10).unwrap().holds);
        assert!(partition_check(7, 1_000).unwrap().holds);
        let r = partition_check(12, 10_000).unwrap();
        assert!(r.holds);
        assert_eq!(r.residue_sums.len(), 12);
    }

    #[test]
    fn average_times_x_is_raw_sum() {
        for (b, q, x) in [(0, 1, 1000), (2, 5, 7777), (3, 8, 10_000)] {
            let r = average_a_ap(&ApQuery::new(b, q, x).unwrap());
            let back = r.average * x as f64;
            assert!((back - r.raw_sum as f64).abs() <= f64::EPSILON * r.raw_sum as f64 * 2.0);
        }
    }

    #[test]
    fn residual_table_shape() {
        let t = residual_table(&[1000], 0, 1).unwrap();
        assert_eq!(t.len(), 1);
        assert!(residual_table(&[100, 100], 0, 1).is_err());
    }
}
