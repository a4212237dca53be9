//! Small descriptive-statistics kernels shared across modules.

/// Trading days per year used for every annualization in the crate.
pub const TRADING_DAYS: f64 = 252.0;

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sum of squared deviations from the mean; exactly zero for a window of
/// identical values, where the rounded mean would otherwise leave residue.
pub fn centered_sum_squares(x: &[f64], m: f64) -> f64 {
    if x.windows(2).all(|w| w[0] == w[1]) {
        return 0.0;
    }
    x.iter().map(|v| (v - m) * (v - m)).sum()
}

/// Unbiased (n - 1) sample variance; `None` for fewer than two points.
pub fn sample_variance(x: &[f64]) -> Option<f64> {
    if x.len() < 2 {
        return None;
    }
    let m = mean(x);
    Some(centered_sum_squares(x, m) / (x.len() - 1) as f64)
}

pub fn sample_std(x: &[f64]) -> Option<f64> {
    sample_variance(x).map(f64::sqrt)
}

/// Pearson correlation. `None` when either input has zero variance or fewer
/// than two points.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    debug_assert_eq!(x.len(), y.len());
    if x.len() < 2 {
        return None;
    }
    let mx = mean(x);
    let my = mean(y);
    let sxx = centered_sum_squares(x, mx);
    let syy = centered_sum_squares(y, my);
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Linear-interpolation quantile between order statistics (position
/// `p * (n - 1)` in the sorted sample). `sorted` must be ascending and non-empty.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    assert!(n > 0, "quantile of empty sample");
    let h = p.clamp(0.0, 1.0) * (n - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Sorts a copy (NaNs dropped) and evaluates [`quantile_sorted`].
pub fn quantile(values: &[f64], p: f64) -> Option<f64> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| !x.is_nan()).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    Some(quantile_sorted(&v, p))
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    Normal::standard().cdf(z)
}
