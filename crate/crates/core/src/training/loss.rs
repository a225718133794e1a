//! InfoNCE over an in-batch similarity matrix.

use super::TrainError;

/// Per-anchor InfoNCE terms for a `B×B` matrix whose entry `[i][j]` is the
/// similarity of anchor `i` to positive `j`. Row `i`'s diagonal entry is its
/// positive; the other `B - 1` entries are its in-batch negatives.
///
/// Each term is `-log(exp(s_ii/τ) / Σ_j exp(s_ij/τ))`, evaluated as
/// `(max - s_ii/τ) + ln_1p(Σ_{j≠argmax} exp(s_ij/τ - max))`, which is
/// non-negative by construction.
pub fn info_nce_terms(sim: &[Vec<f64>], temperature: f64) -> Result<Vec<f64>, TrainError> {
    let b = sim.len();
    sim.iter()
        .enumerate()
        .map(|(i, row)| {
            if row.len() != b {
                return Err(TrainError::ShapeMismatch(format!(
                    "similarity row {i} has {} entries, expected {b}",
                    row.len()
                )));
            }
            if row.iter().any(|s| !s.is_finite()) {
                return Err(TrainError::NonFiniteSimilarity);
            }
            let logits: Vec<f64> = row.iter().map(|s| s / temperature).collect();
            let (arg, max) =
                logits.iter().copied().enumerate().fold(
                    (0, f64::NEG_INFINITY),
                    |acc, (k, x)| if x > acc.1 { (k, x) } else { acc },
                );
            let rest: f64 = logits
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != arg)
                .map(|(_, x)| (x - max).exp())
                .sum();
            Ok((max - logits[i]) + rest.ln_1p())
        })
        .collect()
}

/// Mean InfoNCE loss over the batch.
pub fn info_nce_loss(sim: &[Vec<f64>], temperature: f64) -> Result<f64, TrainError> {
    if sim.is_empty() {
        return Err(TrainError::ShapeMismatch("empty similarity matrix".into()));
    }
    let terms = info_nce_terms(sim, temperature)?;
    Ok(terms.iter().sum::<f64>() / terms.len() as f64)
}

/// `dL/ds_ij = (softmax_i(s/τ)_j - δ_ij) / (τ B)` for the mean loss.
pub(crate) fn info_nce_sim_grad(sim: &[Vec<f64>], temperature: f64) -> Vec<Vec<f64>> {
    let b = sim.len() as f64;
    sim.iter()
        .enumerate()
        .map(|(i, row)| {
            let logits: Vec<f64> = row.iter().map(|s| s / temperature).collect();
            let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let exps: Vec<f64> = logits.iter().map(|x| (x - max).exp()).collect();
            let z: f64 = exps.iter().sum();
            exps.iter()
                .enumerate()
                .map(|(j, e)| (e / z - if i == j { 1.0 } else { 0.0 }) / (temperature * b))
                .collect()
        })
        .collect()
}
