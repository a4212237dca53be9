use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::InferenceError;
use crate::stats::{centered_sum_squares, mean};

/// Bartlett weight for lag `l` with `bandwidth` lags.
fn bartlett(l: usize, bandwidth: usize) -> f64 {
    1.0 - l as f64 / (bandwidth as f64 + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanTest {
    pub mean: f64,
    pub se: f64,
    pub t: f64,
    pub n: usize,
    pub bandwidth: usize,
}

/// t-test of a zero mean using a Bartlett-kernel long-run variance with
/// `bandwidth` lags. The variance carries an n/(n-1) small-sample factor, so
/// bandwidth 0 reproduces the classical one-sample t exactly.
pub fn newey_west_mean_test(x: &[f64], bandwidth: usize) -> Result<MeanTest, InferenceError> {
    let n = x.len();
    if n <= bandwidth || n < 2 {
        return Err(InferenceError::TooShort {
            needed: bandwidth.max(1),
            have: n,
        });
    }
    let m = mean(x);
    if centered_sum_squares(x, m) == 0.0 {
        return Err(InferenceError::ZeroVariance);
    }
    let d: Vec<f64> = x.iter().map(|v| v - m).collect();
    let nf = n as f64;
    let autocov = |l: usize| {
        d[l..]
            .iter()
            .zip(&d[..n - l])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / nf
    };
    let mut lrv = autocov(0);
    for l in 1..=bandwidth {
        lrv += 2.0 * bartlett(l, bandwidth) * autocov(l);
    }
    lrv *= nf / (nf - 1.0);
    if !(lrv > 0.0) {
        return Err(InferenceError::ZeroVariance);
    }
    let se = (lrv / nf).sqrt();
    Ok(MeanTest {
        mean: m,
        se,
        t: m / se,
        n,
        bandwidth,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlsFit {
    /// Intercept first, then one coefficient per regressor column.
    pub coefs: Vec<f64>,
    pub se: Vec<f64>,
    pub t: Vec<f64>,
    /// Row-major HAC covariance of the coefficients.
    pub cov: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub n: usize,
    pub bandwidth: usize,
}

/// OLS of `y` on an intercept plus `columns`, with Bartlett HAC covariance
/// `(X'X)^-1 S (X'X)^-1` scaled by n/(n-k). Bandwidth 0 gives the White (HC1)
/// covariance.
pub fn hac_ols(
    y: &[f64],
    columns: &[Vec<f64>],
    bandwidth: usize,
) -> Result<OlsFit, InferenceError> {
    let n = y.len();
    let k = columns.len() + 1;
    for c in columns {
        if c.len() != n {
            return Err(InferenceError::LengthMismatch(n, c.len()));
        }
    }
    if n <= k.max(bandwidth) {
        return Err(InferenceError::TooShort {
            needed: k.max(bandwidth),
            have: n,
        });
    }
    let x = DMatrix::from_fn(n, k, |i, j| if j == 0 { 1.0 } else { columns[j - 1][i] });

    // rank check on unit-norm columns so that scaling does not matter
    let mut normalized = x.clone();
    for mut col in normalized.column_iter_mut() {
        let norm = col.norm();
        if norm == 0.0 {
            return Err(InferenceError::RankDeficient);
        }
        col /= norm;
    }
    let sv = normalized.singular_values();
    let (smax, smin) = sv
        .iter()
        .fold((0.0f64, f64::INFINITY), |(a, b), &s| (a.max(s), b.min(s)));
    if smin <= 1e-10 * smax {
        return Err(InferenceError::RankDeficient);
    }

    let yv = DVector::from_column_slice(y);
    let xtx = x.transpose() * &x;
    let bread = xtx.try_inverse().ok_or(InferenceError::RankDeficient)?;
    let beta = &bread * (x.transpose() * &yv);
    let resid = &yv - &x * &beta;

    // scores u_t = x_t * e_t
    let u = DMatrix::from_fn(n, k, |i, j| x[(i, j)] * resid[i]);
    let mut meat = u.transpose() * &u;
    for l in 1..=bandwidth {
        let lead = u.rows(l, n - l);
        let lag = u.rows(0, n - l);
        let gamma = lead.transpose() * lag;
        meat += (&gamma + gamma.transpose()) * bartlett(l, bandwidth);
    }
    meat *= n as f64 / (n - k) as f64;
    let cov = &bread * meat * &bread;

    let coefs: Vec<f64> = beta.iter().copied().collect();
    let se: Vec<f64> = (0..k).map(|j| cov[(j, j)].max(0.0).sqrt()).collect();
    let t = coefs.iter().zip(&se).map(|(b, s)| b / s).collect();
    Ok(OlsFit {
        coefs,
        se,
        t,
        cov: (0..k)
            .map(|i| (0..k).map(|j| cov[(i, j)]).collect())
            .collect(),
        residuals: resid.iter().copied().collect(),
        n,
        bandwidth,
    })
}
