//! Interval estimates, weighted fits and a Kolmogorov-Smirnov test.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::real::Real;

/// Two-sided standard-normal quantile for confidence `conf`.
pub fn z_value(conf: f64) -> f64 {
    Normal::standard().inverse_cdf(0.5 + conf / 2.0)
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson<T: Real>(k: u64, n: u64, z: T) -> (T, T) {
    if n == 0 {
        return (T::zero(), T::one());
    }
    let nf = T::from_u64(n).unwrap();
    let ph = T::from_u64(k).unwrap() / nf;
    let z2 = z * z;
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let denom = T::one() + z2 / nf;
    let centre = (ph + z2 / (two * nf)) / denom;
    let half = z * (ph * (T::one() - ph) / nf + z2 / (four * nf * nf)).sqrt() / denom;
    ((centre - half).max(T::zero()), (centre + half).min(T::one()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit<T> {
    pub slope: T,
    pub intercept: T,
    /// Standard error of the slope from the weights.
    pub slope_se: T,
    pub n: usize,
}

/// Weighted least squares `y = intercept + slope * x`, weights `1/var`.
pub fn wls<T: Real>(x: &[T], y: &[T], w: &[T]) -> Option<LinearFit<T>> {
    let n = x.len();
    if n < 2 || y.len() != n || w.len() != n {
        return None;
    }
    let (mut sw, mut sx, mut sy, mut sxx, mut sxy) = (T::zero(), T::zero(), T::zero(), T::zero(), T::zero());
    for k in 0..n {
        sw = sw + w[k];
        sx = sx + w[k] * x[k];
        sy = sy + w[k] * y[k];
        sxx = sxx + w[k] * x[k] * x[k];
        sxy = sxy + w[k] * x[k] * y[k];
    }
    let det = sw * sxx - sx * sx;
    if det <= T::zero() {
        return None;
    }
    let slope = (sw * sxy - sx * sy) / det;
    let intercept = (sy - slope * sx) / sw;
    Some(LinearFit { slope, intercept, slope_se: (sw / det).sqrt(), n })
}

/// WLS fit of `ln y` against `ln x`; `w` are weights of the log values.
pub fn loglog_fit<T: Real>(x: &[T], y: &[T], w: &[T]) -> Option<LinearFit<T>> {
    let lx: Vec<T> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<T> = y.iter().map(|v| v.ln()).collect();
    wls(&lx, &ly, w)
}

/// Mean and confidence half-width from non-overlapping batch means.
pub fn batched_means<T: Real>(samples: &[T], batches: usize, conf: f64) -> Option<(T, T)> {
    let b = batches.max(2);
    let per = samples.len() / b;
    if per == 0 {
        return None;
    }
    let means: Vec<T> = samples
        .chunks_exact(per)
        .take(b)
        .map(|c| c.iter().fold(T::zero(), |a, &v| a + v) / T::from_usize(per).unwrap())
        .collect();
    let bf = T::from_usize(b).unwrap();
    let mean = means.iter().fold(T::zero(), |a, &v| a + v) / bf;
    let var = means.iter().fold(T::zero(), |a, &v| a + (v - mean) * (v - mean)) / (bf - T::one());
    let t = StudentsT::new(0.0, 1.0, (b - 1) as f64).ok()?.inverse_cdf(0.5 + conf / 2.0);
    Some((mean, T::lit(t) * (var / bf).sqrt()))
}

/// Asymptotic Kolmogorov survival function `P(K > lambda)`.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub d: f64,
    pub p_value: f64,
    pub n: usize,
}

/// One-sample KS test of `samples` against Exp(`rate`).
pub fn ks_exponential(samples: &[f64], rate: f64) -> KsResult {
    let mut v = samples.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    let nf = n as f64;
    let d = v
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let f = 1.0 - (-rate * x).exp();
            (f - k as f64 / nf).abs().max(((k + 1) as f64 / nf - f).abs())
        })
        .fold(0.0, f64::max);
    let sq = nf.sqrt();
    let p_value = kolmogorov_q((sq + 0.12 + 0.11 / sq) * d);
    KsResult { d, p_value, n }
}

/// Median of sorted values with a distribution-free order-statistic interval.
pub fn median_ci<T: Real>(sorted: &[T], conf: f64) -> Option<(T, T, T)> {
    let n = sorted.len();
    if n == 0 {
        return None;
    }
    let med = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / T::lit(2.0)
    };
    let z = z_value(conf);
    let half = z * (n as f64).sqrt() / 2.0;
    let lo = ((n as f64 / 2.0 - half).floor().max(1.0) as usize).min(n) - 1;
    let hi = ((n as f64 / 2.0 + half).ceil() as usize + 1).min(n) - 1;
    Some((med, sorted[lo], sorted[hi]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn wilson_contains_estimate() {
        let (lo, hi) = wilson(30, 100, 1.96f64);
        assert!(lo < 0.3 && 0.3 < hi);
        assert_abs_diff_eq!(lo, 0.2189, epsilon = 1e-3);
        let (lo0, hi0) = wilson(0, 50, 1.96f64);
        assert_eq!(lo0, 0.0);
        assert!(hi0 > 0.0 && hi0 < 0.1);
    }

    #[test]
    fn exact_line_is_recovered() {
        let x = [1.0f64, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let f = wls(&x, &y, &[1.0; 4]).unwrap();
        assert_abs_diff_eq!(f.slope, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.intercept, 1.0, epsilon = 1e-12);
        let g = loglog_fit(&[1.0f32, 10.0, 100.0], &[3.0, 300.0, 30000.0], &[1.0; 3]).unwrap();
        assert_abs_diff_eq!(g.slope, 2.0, epsilon = 1e-4);
    }

    #[test]
    fn kolmogorov_tail_values() {
        assert_abs_diff_eq!(kolmogorov_q(1.36), 0.049, epsilon = 2e-3);
        assert_abs_diff_eq!(kolmogorov_q(1.63), 0.0098, epsilon = 1e-3);
    }

    #[test]
    fn ks_rejects_wrong_rate() {
        let xs: Vec<f64> = (0..2000).map(|k| -((k as f64 + 0.5) / 2000.0).ln()).collect();
        assert!(ks_exponential(&xs, 1.0).p_value > 0.5);
        assert!(ks_exponential(&xs, 2.0).p_value < 1e-6);
    }

    #[test]
    fn median_interval_brackets() {
        let v: Vec<f64> = (1..=101).map(|k| k as f64).collect();
        let (m, lo, hi) = median_ci(&v, 0.95).unwrap();
        assert_eq!(m, 51.0);
        assert!(lo < 51.0 && hi > 51.0);
    }

    #[test]
    fn batched_means_of_constant() {
        let (m, h) = batched_means(&[2.0f64; 100], 10, 0.95).unwrap();
        assert_eq!(m, 2.0);
        assert_eq!(h, 0.0);
    }
}
