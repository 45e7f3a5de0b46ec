//! Power-law exponents by least squares on `(log x, log y)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub point_count: usize,
}

/// Ordinary least squares through `(ln x, ln y)`. Needs at least three
/// points, strictly increasing positive `x` and positive `y`.
pub fn fit_exponent(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.len() < 3 {
        return Err(Error::param(format!("need at least 3 points, got {}", points.len())));
    }
    if let Some(&(x, y)) = points.iter().find(|&&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::param(format!("non-positive point ({x}, {y})")));
    }
    if points.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(Error::param("x values must be strictly increasing"));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = logs.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = logs.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r_squared = if syy <= f64::EPSILON * n * my.abs().max(1.0) {
        1.0
    } else {
        (1.0 - sse / syy).clamp(0.0, 1.0)
    };
    Ok(FitResult {
        slope,
        intercept,
        r_squared,
        point_count: points.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_power_law() {
        let f = fit_exponent(&[(10.0, 100.0), (100.0, 1e4), (1000.0, 1e6)]).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        assert_eq!(f.point_count, 3);
    }

    #[test]
    fn constant_series() {
        let f = fit_exponent(&[(10.0, 5.0), (100.0, 5.0), (1000.0, 5.0)]).unwrap();
        assert_eq!(f.slope, 0.0);
        assert!((f.intercept - 5f64.ln()).abs() < 1e-12);
        assert_eq!(f.r_squared, 1.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit_exponent(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(fit_exponent(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]).is_err());
        assert!(fit_exponent(&[(1.0, 1.0), (1.0, 2.0), (3.0, 1.0)]).is_err());
    }

    proptest! {
        #[test]
        fn recovers_exponent_and_bounded_r2(k in -3.0f64..5.0, c in 0.1f64..100.0, noise in prop::collection::vec(0.5f64..2.0, 6)) {
            let pts: Vec<_> = (1..=6).map(|i| {
                let x = 10f64.powi(i);
                (x, c * x.powf(k))
            }).collect();
            prop_assert!((fit_exponent(&pts).unwrap().slope - k).abs() < 1e-9);
            let noisy: Vec<_> = pts.iter().zip(&noise).map(|(&(x, y), &e)| (x, y * e)).collect();
            let r2 = fit_exponent(&noisy).unwrap().r_squared;
            prop_assert!((0.0..=1.0).contains(&r2));
        }
    }
}
