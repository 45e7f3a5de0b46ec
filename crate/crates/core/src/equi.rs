//! Fractional parts of `sqrt(P_n)` along progressions, their discrepancy,
//! exponential sums, and the two bounds that control them: Erdős–Turán and
//! the second-derivative (Kuipers–Niederreiter) estimate for `h(t) = sqrt(P(t))`.
//!
//! Points are held as 64-bit fixed-point fractions, so `m * x mod 1` is an
//! exact wrapping multiplication before any trigonometry happens.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, DEFAULT_SCALE_BITS};
use crate::parallel;

const TWO_POW_64: f64 = 18_446_744_073_709_551_616.0;

#[inline]
fn fixed_to_f64(v: u64) -> f64 {
    (v >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Where a sample came from: the first `count` indices `n >= start` with
/// `n = b mod q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleMeta {
    pub start: u64,
    pub q: u64,
    pub b: u64,
    pub count: u64,
}

/// A finite multiset of points in `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitSample {
    fixed: Vec<u64>,
    meta: Option<SampleMeta>,
}

impl UnitSample {
    /// Builds a sample from reals in `[0, 1)`.
    pub fn from_reals(points: &[f64]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::param("a sample needs at least one point"));
        }
        let fixed = points
            .iter()
            .map(|&x| {
                if (0.0..1.0).contains(&x) {
                    Ok((x * TWO_POW_64) as u64)
                } else {
                    Err(Error::param(format!("point {x} outside [0, 1)")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { fixed, meta: None })
    }

    /// Builds a sample from 64-bit fractions `v / 2^64`.
    pub fn from_fixed(fixed: Vec<u64>) -> Result<Self> {
        if fixed.is_empty() {
            return Err(Error::param("a sample needs at least one point"));
        }
        Ok(Self { fixed, meta: None })
    }

    pub fn len(&self) -> usize {
        self.fixed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fixed.is_empty()
    }

    pub fn meta(&self) -> Option<SampleMeta> {
        self.meta
    }

    pub fn fixed(&self) -> &[u64] {
        &self.fixed
    }

    pub fn points(&self) -> Vec<f64> {
        self.fixed.iter().map(|&v| fixed_to_f64(v)).collect()
    }

    fn sorted_points(&self) -> Vec<f64> {
        let mut sorted = self.fixed.clone();
        sorted.sort_unstable();
        sorted.into_iter().map(fixed_to_f64).collect()
    }
}

/// `{sqrt(P_n)}` for the first `count` indices `n >= start`, `n = b mod q`.
pub fn frac_family(start: u64, q: u64, b: u64, count: u64) -> Result<UnitSample> {
    frac_family_with_bits(start, q, b, count, DEFAULT_SCALE_BITS)
}

pub fn frac_family_with_bits(start: u64, q: u64, b: u64, count: u64, scale_bits: u32) -> Result<UnitSample> {
    if count == 0 {
        return Err(Error::param("a family needs at least one point"));
    }
    if q == 0 {
        return Err(Error::param("modulus q must be at least 1"));
    }
    let start = start.max(1);
    let b = b % q;
    let first = start + (b + q - start % q) % q;
    // validate the precision once up front
    exact::frac_sqrt_pyramidal(first, scale_bits)?;
    let chunks = parallel::map_chunks(0, count - 1, |lo, hi| {
        (lo..=hi)
            .map(|i| {
                exact::frac_sqrt_pyramidal(first + i * q, scale_bits)
                    .expect("validated")
                    .to_fixed_u64()
            })
            .collect::<Vec<_>>()
    });
    Ok(UnitSample {
        fixed: chunks.concat(),
        meta: Some(SampleMeta { start, q, b, count }),
    })
}

/// A discrepancy of a finite point set, normalized to `[0, 1]`.
pub trait DiscrepancyMeasure: Send + Sync {
    fn name(&self) -> &'static str;

    /// `sorted` is nonempty and ascending.
    fn measure_sorted(&self, sorted: &[f64]) -> f64;

    fn measure(&self, sample: &UnitSample) -> f64 {
        self.measure_sorted(&sample.sorted_points())
    }
}

/// Intervals anchored at zero.
pub struct StarDiscrepancy;

/// All subintervals `[alpha, beta)`.
pub struct ExtremeDiscrepancy;

impl DiscrepancyMeasure for StarDiscrepancy {
    fn name(&self) -> &'static str {
        "star"
    }

    fn measure_sorted(&self, sorted: &[f64]) -> f64 {
        let n = sorted.len() as f64;
        sorted
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let i = i as f64;
                ((i + 1.0) / n - x).max(x - i / n)
            })
            .fold(0.0, f64::max)
    }
}

impl DiscrepancyMeasure for ExtremeDiscrepancy {
    fn name(&self) -> &'static str {
        "extreme"
    }

    fn measure_sorted(&self, sorted: &[f64]) -> f64 {
        let n = sorted.len() as f64;
        let (lo, hi) = sorted.iter().enumerate().fold((f64::MAX, f64::MIN), |(lo, hi), (i, &x)| {
            let gap = (i as f64 + 1.0) / n - x;
            (lo.min(gap), hi.max(gap))
        });
        1.0 / n + hi - lo
    }
}

pub fn discrepancy_measures() -> Vec<Box<dyn DiscrepancyMeasure>> {
    vec![Box::new(StarDiscrepancy), Box::new(ExtremeDiscrepancy)]
}

pub fn discrepancy_measure(name: &str) -> Result<Box<dyn DiscrepancyMeasure>> {
    discrepancy_measures()
        .into_iter()
        .find(|m| m.name() == name)
        .ok_or_else(|| Error::Unknown {
            kind: "discrepancy measure",
            name: name.to_string(),
        })
}

pub fn star_discrepancy(sample: &UnitSample) -> f64 {
    StarDiscrepancy.measure(sample)
}

pub fn extreme_discrepancy(sample: &UnitSample) -> f64 {
    ExtremeDiscrepancy.measure(sample)
}

/// `sum_i e(m x_i)`.
pub fn exp_sum(sample: &UnitSample, m: u64) -> Result<Complex64> {
    if m == 0 {
        return Err(Error::param("frequency m must be at least 1"));
    }
    let pts = &sample.fixed;
    let partials = parallel::map_chunks(0, pts.len() as u64 - 1, |lo, hi| {
        pts[lo as usize..=hi as usize]
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, &v| {
                let turn = fixed_to_f64(m.wrapping_mul(v));
                let (s, c) = (std::f64::consts::TAU * turn).sin_cos();
                acc + Complex64::new(c, s)
            })
    });
    Ok(parallel::pairwise_sum_complex(&partials))
}

/// A measured quantity against its theoretical bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundComparison {
    pub measured: f64,
    pub bound: f64,
    /// `K` for Erdős–Turán, `m` for the second-derivative bound.
    pub parameter: u64,
    pub satisfied: bool,
}

impl BoundComparison {
    fn new(measured: f64, bound: f64, parameter: u64) -> Self {
        Self {
            measured,
            bound,
            parameter,
            satisfied: measured <= bound + 1e-9,
        }
    }
}

/// Erdős–Turán in count form: `N D <= N/(K+1) + 3 sum_{m<=K} |S_m| / m`.
pub fn erdos_turan_bound(sample: &UnitSample, k: u64) -> Result<BoundComparison> {
    if k == 0 {
        return Err(Error::param("K must be at least 1"));
    }
    let n = sample.len() as f64;
    let weighted = (1..=k)
        .map(|m| Ok(exp_sum(sample, m)?.norm() / m as f64))
        .collect::<Result<Vec<_>>>()?;
    let bound = n / (k as f64 + 1.0) + 3.0 * parallel::pairwise_sum(&weighted);
    let measured = n * extreme_discrepancy(sample);
    Ok(BoundComparison::new(measured, bound, k))
}

/// `h = sqrt(P(t))` and its first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseDerivatives {
    pub h: f64,
    pub h1: f64,
    pub h2: f64,
}

/// With `P(t) = (2t^3 + 3t^2 + t)/6`, `P' = t^2 + t + 1/6`, `P'' = 2t + 1`.
pub fn pyramid_sqrt_derivatives(t: f64) -> Result<PhaseDerivatives> {
    if t.is_nan() || t < 1.0 {
        return Err(Error::domain(format!("h(t) is used for t >= 1, got {t}")));
    }
    let p = (2.0 * t * t * t + 3.0 * t * t + t) / 6.0;
    let p1 = t * t + t + 1.0 / 6.0;
    let p2 = 2.0 * t + 1.0;
    let root = p.sqrt();
    Ok(PhaseDerivatives {
        h: root,
        h1: p1 / (2.0 * root),
        h2: (2.0 * p2 * p - p1 * p1) / (4.0 * p * root),
    })
}

/// `|sum e(m sqrt(P_n))|` over `n = start, start + q, ... <= end` against
/// `(m |h'(end) - h'(start)| + 2) (4 (m h''(end))^{-1/2} + 3)`.
pub fn kn_bound(start: u64, end: u64, q: u64, m: u64) -> Result<BoundComparison> {
    if start == 0 || end <= start {
        return Err(Error::param(format!("block [{start}, {end}] needs 1 <= start < end")));
    }
    if q == 0 || m == 0 {
        return Err(Error::param("q and m must be at least 1"));
    }
    let lo = pyramid_sqrt_derivatives(start as f64)?;
    let hi = pyramid_sqrt_derivatives(end as f64)?;
    if hi.h2 <= 0.0 {
        return Err(Error::domain(format!("h''({end}) = {} is not positive", hi.h2)));
    }
    let mf = m as f64;
    let bound = (mf * (hi.h1 - lo.h1).abs() + 2.0) * (4.0 / (mf * hi.h2).sqrt() + 3.0);
    let count = (end - start) / q + 1;
    let sample = frac_family(start, q, start % q, count)?;
    let measured = exp_sum(&sample, m)?.norm();
    Ok(BoundComparison::new(measured, bound, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Supremum over `[alpha, beta)` by enumerating endpoints at the points,
    /// 0 and 1; closed and open limits are both considered.
    fn brute_extreme(points: &[f64]) -> f64 {
        let n = points.len() as f64;
        let mut ends: Vec<f64> = points.to_vec();
        ends.push(0.0);
        ends.push(1.0);
        let mut best = 0f64;
        for &a in &ends {
            for &b in &ends {
                if b < a {
                    continue;
                }
                let closed = points.iter().filter(|&&x| x >= a && x <= b).count() as f64;
                let open = points.iter().filter(|&&x| x > a && x < b).count() as f64;
                best = best.max(closed / n - (b - a)).max((b - a) - open / n);
            }
        }
        best
    }

    fn brute_star(points: &[f64]) -> f64 {
        let n = points.len() as f64;
        let mut best = 0f64;
        for &t in points.iter().chain([1.0].iter()) {
            let closed = points.iter().filter(|&&x| x <= t).count() as f64;
            let open = points.iter().filter(|&&x| x < t).count() as f64;
            best = best.max(closed / n - t).max(t - open / n);
        }
        best
    }

    fn sample(points: &[f64]) -> UnitSample {
        UnitSample::from_reals(points).unwrap()
    }

    #[test]
    fn frac_family_examples() {
        let s = frac_family(24, 1, 0, 1).unwrap();
        assert_eq!(s.points(), vec![0.0]);
        let s = frac_family(1, 1, 0, 3).unwrap().points();
        assert_eq!(s[0], 0.0);
        assert!((s[1] - (5f64.sqrt() - 2.0)).abs() < 1e-15);
        assert!((s[2] - (14f64.sqrt() - 3.0)).abs() < 1e-15);
        let s = frac_family(1, 2, 1, 2).unwrap().points();
        assert_eq!(s[0], 0.0);
        assert!((s[1] - (14f64.sqrt() - 3.0)).abs() < 1e-15);
        let meta = frac_family(10, 7, 3, 4).unwrap().meta().unwrap();
        assert_eq!((meta.start, meta.q, meta.b, meta.count), (10, 7, 3, 4));
        // first index >= 10 with n = 3 mod 7 is 10
        let s = frac_family(10, 7, 3, 2).unwrap().points();
        assert!((s[0] - (pyr_f64(10).sqrt().fract())).abs() < 1e-12);
        assert!((s[1] - (pyr_f64(17).sqrt().fract())).abs() < 1e-12);
    }

    fn pyr_f64(n: u64) -> f64 {
        exact::pyramidal_u128(n) as f64
    }

    #[test]
    fn star_examples() {
        assert_eq!(star_discrepancy(&sample(&[0.5])), 0.5);
        let n = 8;
        let lattice: Vec<f64> = (1..=n).map(|i| (2 * i - 1) as f64 / (2 * n) as f64).collect();
        assert!((star_discrepancy(&sample(&lattice)) - 1.0 / (2 * n) as f64).abs() < 1e-15);
        assert_eq!(star_discrepancy(&sample(&[0.0, 0.0])), 1.0);
    }

    #[test]
    fn extreme_examples() {
        // [0.5, 0.5 + eps) holds the single point, so D -> 1.
        assert_eq!(extreme_discrepancy(&sample(&[0.5])), 1.0);
        assert_eq!(brute_extreme(&[0.5]), 1.0);
        let n = 10;
        let lattice: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
        assert!((extreme_discrepancy(&sample(&lattice)) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn measures_registered() {
        assert_eq!(discrepancy_measure("star").unwrap().name(), "star");
        assert_eq!(discrepancy_measure("extreme").unwrap().name(), "extreme");
        assert!(discrepancy_measure("l2").is_err());
    }

    proptest! {
        #[test]
        fn discrepancies_match_brute_force(pts in prop::collection::vec(0u32..64, 1..24)) {
            // dyadic points are exact in both representations
            let reals: Vec<f64> = pts.iter().map(|&k| k as f64 / 64.0).collect();
            let s = sample(&reals);
            let d_star = star_discrepancy(&s);
            let d = extreme_discrepancy(&s);
            prop_assert!((d_star - brute_star(&reals)).abs() < 1e-12);
            prop_assert!((d - brute_extreme(&reals)).abs() < 1e-12);
            prop_assert!(d_star <= d + 1e-15 && d <= 2.0 * d_star + 1e-15);
        }

        #[test]
        fn exp_sum_magnitude_at_most_count(start in 1u64..100_000, q in 1u64..10, count in 1u64..300, m in 1u64..2000) {
            let s = frac_family(start, q, 0, count).unwrap();
            prop_assert!(exp_sum(&s, m).unwrap().norm() <= count as f64 + 1e-9);
        }
    }

    #[test]
    fn exp_sum_examples() {
        let z = exp_sum(&sample(&[0.0]), 12345).unwrap();
        assert_eq!(z, Complex64::new(1.0, 0.0));
        let z = exp_sum(&sample(&[0.0, 0.5]), 1).unwrap();
        assert!(z.norm() < 1e-15);
        let z = exp_sum(&sample(&[0.25]), 2).unwrap();
        assert!((z - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!(exp_sum(&sample(&[0.25]), 0).is_err());
    }

    #[test]
    fn exp_sum_reduces_angles_exactly() {
        // m x mod 1 for large m keeps full precision
        let s = frac_family(1000, 1, 0, 50).unwrap();
        let m: u64 = 1 << 20;
        for (i, &v) in s.fixed().iter().enumerate() {
            let n = 1000 + i as u64;
            let hi = exact::frac_sqrt_pyramidal(n, 160).unwrap();
            let exact_turn = ((hi.value * num_bigint::BigUint::from(m)) >> 96u32)
                & ((num_bigint::BigUint::from(1u8) << 64u32) - 1u32);
            let exact_turn: u64 = num_traits::ToPrimitive::to_u64(&exact_turn).unwrap();
            let diff = m.wrapping_mul(v).wrapping_sub(exact_turn) as i64;
            assert!((diff.unsigned_abs() as f64) / TWO_POW_64 < 2f64.powi(-40));
        }
    }

    #[test]
    fn erdos_turan_examples() {
        let c = erdos_turan_bound(&sample(&[0.3]), 1).unwrap();
        assert!(c.satisfied);
        for (q, b, ks) in [(1, 0, vec![10, 100]), (7, 3, vec![100])] {
            let s = frac_family(1, q, b, 1000).unwrap();
            for k in ks {
                let c = erdos_turan_bound(&s, k).unwrap();
                assert!(c.satisfied, "q={q} K={k}: {c:?}");
                assert_eq!(c.parameter, k);
            }
        }
    }

    #[test]
    fn derivative_examples() {
        let d = pyramid_sqrt_derivatives(1.0).unwrap();
        assert!((d.h - 1.0).abs() < 1e-15);
        assert!((d.h1 - 13.0 / 12.0).abs() < 1e-15);
        assert!((pyramid_sqrt_derivatives(24.0).unwrap().h - 70.0).abs() < 1e-12);
        let (d10, d100) = (pyramid_sqrt_derivatives(10.0).unwrap(), pyramid_sqrt_derivatives(100.0).unwrap());
        assert!(d10.h1 < d100.h1);
        assert!(d10.h2 > d100.h2);
        assert!(pyramid_sqrt_derivatives(0.5).is_err());
        assert!(pyramid_sqrt_derivatives(f64::NAN).is_err());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = |t: f64| pyramid_sqrt_derivatives(t).unwrap().h;
        for t in [1.5, 3.0, 24.0, 1000.0, 12_345.0] {
            let d = pyramid_sqrt_derivatives(t).unwrap();
            let step = 1e-4 * t;
            let fd1 = (h(t + step) - h(t - step)) / (2.0 * step);
            let step2 = 1e-3 * t;
            let fd2 = (h(t + step2) - 2.0 * h(t) + h(t - step2)) / (step2 * step2);
            assert!((fd1 - d.h1).abs() < 1e-6 * d.h1.abs(), "t={t}");
            assert!((fd2 - d.h2).abs() < 1e-3 * d.h2.abs(), "t={t}");
            assert!(d.h2 > 0.0);
        }
    }

    #[test]
    fn kn_examples() {
        let c = kn_bound(5, 6, 1, 1).unwrap();
        assert!(c.bound >= 6.0 && c.satisfied);
        for m in [1, 2, 5] {
            assert!(kn_bound(1000, 2000, 1, m).unwrap().satisfied);
        }
        assert!(kn_bound(10_000, 11_000, 3, 10).unwrap().satisfied);
        assert!(kn_bound(10, 10, 1, 1).is_err());
        assert!(kn_bound(0, 10, 1, 1).is_err());
    }

    #[test]
    fn discrepancy_decreases_with_sample_size() {
        let small = extreme_discrepancy(&frac_family(1, 1, 0, 1_000).unwrap());
        let large = extreme_discrepancy(&frac_family(1, 1, 0, 100_000).unwrap());
        assert!(large < small, "{large} !< {small}");
    }
}
