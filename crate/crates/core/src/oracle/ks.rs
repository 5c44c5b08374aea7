//! One-sample Kolmogorov-Smirnov statistic and asymptotic critical values.

use crate::error::{Error, Result};

/// `sup_x |F_n(x) - F(x)|` for the empirical distribution of `samples`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let fx = cdf(x);
            let above = (i as f64 + 1.0) / n - fx;
            let below = fx - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max)
}

/// Kolmogorov limiting tail `P(K > λ) = 2 Σ_{k≥1} (-1)^{k-1} e^{-2k²λ²}`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 0.2 {
        // the alternating sum is useless here and the tail is 1 to double precision
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Critical value of the statistic at `significance` for `n` draws, using the
/// asymptotic distribution with Stephens' finite-sample scaling.
pub fn ks_critical_value(n: usize, significance: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("KS critical value needs n >= 1".into()));
    }
    if !(significance > 0.0 && significance < 1.0) {
        return Err(Error::Domain(format!("significance must lie in (0, 1), got {significance}")));
    }
    let (mut lo, mut hi) = (0.2, 10.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_survival(mid) > significance {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda = 0.5 * (lo + hi);
    let rn = (n as f64).sqrt();
    Ok(lambda / (rn + 0.12 + 0.11 / rn))
}
