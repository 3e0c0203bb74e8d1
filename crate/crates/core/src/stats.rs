//! Numerical helpers shared by the discretizer, the baseline planners and the
//! evaluation harness.

use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Shannon entropy (bits) of a label multiset. Empty input has entropy 0.
pub fn entropy<T: Eq + Hash>(labels: &[T]) -> f64 {
    let mut counts: HashMap<&T, usize> = HashMap::new();
    for l in labels {
        *counts.entry(l).or_default() += 1;
    }
    let mut c: Vec<usize> = counts.into_values().collect();
    c.sort_unstable();
    entropy_from_counts(&c)
}

/// Shannon entropy (bits) of a class-count histogram.
pub fn entropy_from_counts(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

/// Binary-label entropy from (negatives, positives).
pub fn binary_entropy(neg: usize, pos: usize) -> f64 {
    entropy_from_counts(&[neg, pos])
}

/// Median of a slice; `None` when empty. NaNs are not expected.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    })
}

/// Standard normal upper two-sided tail probability `P(|Z| > |z|)`.
pub fn two_sided_normal_p(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2).clamp(0.0, 1.0)
}

/// Result of a univariate logistic regression `P(y=1) = σ(α + βx)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticFit {
    pub alpha: f64,
    pub beta: f64,
    /// Wald-test p-value for `β = 0`.
    pub p_value: f64,
    /// `false` means the fit is unusable (separation, divergence, bad input).
    pub converged: bool,
}

impl LogisticFit {
    fn failed() -> Self {
        LogisticFit {
            alpha: f64::NAN,
            beta: f64::NAN,
            p_value: 1.0,
            converged: false,
        }
    }

    /// Converged and significant at `level`.
    pub fn is_significant(&self, level: f64) -> bool {
        self.converged && self.p_value <= level
    }
}

const IRLS_MAX_ITER: usize = 50;
const IRLS_LL_TOL: f64 = 1e-8;

/// Maximum-likelihood univariate logistic regression by IRLS (Newton–Raphson).
///
/// `x` is standardized internally so the Wald statistic is invariant under
/// affine rescaling; coefficients are reported on the original scale.
/// Complete or quasi-complete separation yields `converged = false`.
pub fn fit_univariate_logistic(x: &[f64], y: &[bool]) -> LogisticFit {
    let n = x.len();
    if n < 2 || n != y.len() || x.iter().any(|v| !v.is_finite()) {
        return LogisticFit::failed();
    }
    let pos = y.iter().filter(|&&b| b).count();
    if pos == 0 || pos == n {
        return LogisticFit::failed();
    }

    // Separation: the classes do not overlap on x, so the MLE is at infinity.
    let (mut min0, mut max0, mut min1, mut max1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for (&xi, &yi) in x.iter().zip(y) {
        if yi {
            min1 = min1.min(xi);
            max1 = max1.max(xi);
        } else {
            min0 = min0.min(xi);
            max0 = max0.max(xi);
        }
    }
    if max0 <= min1 || max1 <= min0 {
        return LogisticFit::failed();
    }

    let nf = n as f64;
    let mean = x.iter().sum::<f64>() / nf;
    let sd = (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / nf).sqrt();
    if sd.is_nan() || sd <= 0.0 {
        return LogisticFit::failed();
    }
    let z: Vec<f64> = x.iter().map(|v| (v - mean) / sd).collect();

    let rate = pos as f64 / nf;
    let mut a = (rate / (1.0 - rate)).ln();
    let mut b = 0.0;
    let loglik = |a: f64, b: f64| -> f64 {
        z.iter()
            .zip(y)
            .map(|(&zi, &yi)| {
                let eta = a + b * zi;
                // log σ(η) = -softplus(-η), log(1-σ(η)) = -softplus(η)
                if yi {
                    -softplus(-eta)
                } else {
                    -softplus(eta)
                }
            })
            .sum()
    };
    let mut ll = loglik(a, b);
    let mut converged = false;
    for _ in 0..IRLS_MAX_ITER {
        let (mut g0, mut g1, mut h00, mut h01, mut h11) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (&zi, &yi) in z.iter().zip(y) {
            let p = sigmoid(a + b * zi);
            let r = f64::from(u8::from(yi)) - p;
            let w = p * (1.0 - p);
            g0 += r;
            g1 += r * zi;
            h00 += w;
            h01 += w * zi;
            h11 += w * zi * zi;
        }
        let det = h00 * h11 - h01 * h01;
        if !det.is_finite() || det <= 0.0 {
            return LogisticFit::failed();
        }
        let da = (h11 * g0 - h01 * g1) / det;
        let db = (h00 * g1 - h01 * g0) / det;
        // Step halving keeps the likelihood monotone.
        let mut step = 1.0;
        let mut next = loglik(a + da, b + db);
        while next < ll - 1e-12 && step > 1e-6 {
            step *= 0.5;
            next = loglik(a + step * da, b + step * db);
        }
        a += step * da;
        b += step * db;
        let delta = (next - ll).abs();
        ll = next;
        if delta < IRLS_LL_TOL {
            converged = true;
            break;
        }
    }
    if !converged || !a.is_finite() || !b.is_finite() {
        return LogisticFit::failed();
    }

    // Fisher information at the final estimate for the standard error.
    let (mut h00, mut h01, mut h11) = (0.0, 0.0, 0.0);
    for &zi in &z {
        let p = sigmoid(a + b * zi);
        let w = p * (1.0 - p);
        h00 += w;
        h01 += w * zi;
        h11 += w * zi * zi;
    }
    let det = h00 * h11 - h01 * h01;
    if det.is_nan() || det <= 0.0 {
        return LogisticFit::failed();
    }
    let var_b = h00 / det;
    let se = var_b.sqrt();
    let p_value = two_sided_normal_p(b / se);

    LogisticFit {
        alpha: a - b * mean / sd,
        beta: b / sd,
        p_value,
        converged: true,
    }
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

/// Area under a sampled curve by composite Simpson's rule.
///
/// Consecutive pairs of equal-width panels are integrated with Simpson's
/// 1/3 rule; a panel that cannot be paired (an odd final panel, or a width
/// change) falls back to the trapezoid rule. Fewer than three points use
/// the trapezoid rule throughout. `x` must be strictly increasing.
pub fn simpson_integrate(points: &[(f64, f64)]) -> Result<f64> {
    for w in points.windows(2) {
        if w[1].0 == w[0].0 {
            return Err(Error::DuplicateAbscissa(w[0].0));
        }
        if w[1].0.partial_cmp(&w[0].0) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::Invalid(
                "integration abscissae must be strictly increasing".into(),
            ));
        }
    }
    if points.len() < 2 {
        return Ok(0.0);
    }
    let width = |i: usize| points[i + 1].0 - points[i].0;
    let same = |h0: f64, h1: f64| (h0 - h1).abs() <= 1e-9 * h0.abs().max(h1.abs());
    let trapezoid = |i: usize| width(i) * (points[i].1 + points[i + 1].1) / 2.0;

    let panels = points.len() - 1;
    let mut total = 0.0;
    let mut i = 0;
    // Accumulate runs of uniform width as one composite sum.
    while i < panels {
        if i + 1 < panels && same(width(i), width(i + 1)) {
            let h = width(i);
            let start = i;
            let mut end = i + 2;
            while end + 1 < panels && same(width(end), h) && same(width(end + 1), h) {
                end += 2;
            }
            let mut s = points[start].1 + points[end].1;
            for (k, p) in points.iter().enumerate().take(end).skip(start + 1) {
                s += if (k - start) % 2 == 1 { 4.0 } else { 2.0 } * p.1;
            }
            total += h / 3.0 * s;
            i = end;
        } else {
            total += trapezoid(i);
            i += 1;
        }
    }
    Ok(total)
}
