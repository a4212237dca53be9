use super::InferenceError;
use crate::stats::pearson;

/// 1-based ranks with ties sharing their average rank.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation (Pearson on average ranks).
pub fn spearman(a: &[f64], b: &[f64]) -> Result<f64, InferenceError> {
    if a.len() != b.len() {
        return Err(InferenceError::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(InferenceError::TooShort {
            needed: 2,
            have: a.len(),
        });
    }
    pearson(&average_ranks(a), &average_ranks(b)).ok_or(InferenceError::ZeroVariance)
}
