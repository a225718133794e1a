//! Backpropagation through encode → cosine → InfoNCE.
//!
//! The objective for one batch is
//!
//! ```text
//! J = InfoNCE(S) + λ (‖proj_w‖² + ‖proj_b‖² + Σ_{r touched} ‖embed_r‖²)
//! ```
//!
//! where "touched" rows are the non-PAD token ids appearing in the batch.
//! Restricting the embedding penalty to touched rows keeps the gradient
//! sparse: rows absent from the batch get exactly zero.

use std::collections::BTreeSet;

use crate::encoder::{forward, EncoderParams, Forward, PAD};

use super::loss::{info_nce_loss, info_nce_sim_grad};
use super::{TrainError, TrainingBatch};

/// Gradient with the same layout as [`EncoderParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub embed: Vec<f64>,
    pub proj_w: Vec<f64>,
    pub proj_b: Vec<f64>,
    /// Embedding rows with a (possibly) non-zero gradient.
    pub touched: BTreeSet<u32>,
}

impl Gradients {
    fn zeros_like(params: &EncoderParams) -> Self {
        Gradients {
            embed: vec![0.0; params.embed.len()],
            proj_w: vec![0.0; params.proj_w.len()],
            proj_b: vec![0.0; params.proj_b.len()],
            touched: BTreeSet::new(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.embed
            .iter()
            .chain(&self.proj_w)
            .chain(&self.proj_b)
            .all(|g| g.is_finite())
    }

    pub fn norm(&self) -> f64 {
        self.embed
            .iter()
            .chain(&self.proj_w)
            .chain(&self.proj_b)
            .map(|g| g * g)
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Debug, Clone)]
pub struct GradientOutput {
    /// Mean InfoNCE loss of the batch.
    pub loss: f64,
    /// InfoNCE plus the L2 penalty.
    pub objective: f64,
    pub grads: Gradients,
}

fn cos_parts(a: &[f64], b: &[f64]) -> (f64, f64, f64) {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    (dot, na, nb)
}

/// Exact gradient of the batch objective.
pub fn compute_gradients(
    params: &EncoderParams,
    batch: &TrainingBatch,
    temperature: f64,
    l2_coeff: f64,
    max_len: usize,
) -> Result<GradientOutput, TrainError> {
    let b = batch.len();
    if b == 0 || batch.positives.len() != b {
        return Err(TrainError::ShapeMismatch(format!(
            "{} anchors vs {} positives",
            batch.anchors.len(),
            batch.positives.len()
        )));
    }
    let encode_all = |lists: &[Vec<u32>]| -> Result<Vec<Forward>, TrainError> {
        lists
            .iter()
            .map(|ids| forward(params, ids, max_len).map_err(TrainError::Encoder))
            .collect()
    };
    let anchors = encode_all(&batch.anchors)?;
    let positives = encode_all(&batch.positives)?;

    let mut sim = vec![vec![0.0; b]; b];
    let mut norms_a = vec![0.0; b];
    let mut norms_p = vec![0.0; b];
    for i in 0..b {
        for j in 0..b {
            let (dot, na, nb) = cos_parts(&anchors[i].output, &positives[j].output);
            if na < crate::encoder::NORM_EPSILON || nb < crate::encoder::NORM_EPSILON {
                return Err(TrainError::NonFiniteSimilarity);
            }
            sim[i][j] = dot / (na * nb);
            norms_a[i] = na;
            norms_p[j] = nb;
        }
    }
    let loss = info_nce_loss(&sim, temperature)?;
    let g_sim = info_nce_sim_grad(&sim, temperature);

    let d = params.dim;
    let mut dy_a = vec![vec![0.0; d]; b];
    let mut dy_p = vec![vec![0.0; d]; b];
    for i in 0..b {
        let a = &anchors[i].output;
        for j in 0..b {
            let p = &positives[j].output;
            let g = g_sim[i][j];
            if g == 0.0 {
                continue;
            }
            let s = sim[i][j];
            let (na, np) = (norms_a[i], norms_p[j]);
            for k in 0..d {
                dy_a[i][k] += g * (p[k] / (na * np) - s * a[k] / (na * na));
                dy_p[j][k] += g * (a[k] / (na * np) - s * p[k] / (np * np));
            }
        }
    }

    let mut grads = Gradients::zeros_like(params);
    for (fwd, dy) in anchors.iter().zip(&dy_a).chain(positives.iter().zip(&dy_p)) {
        backprop_item(params, fwd, dy, &mut grads);
    }

    let mut penalty = 0.0;
    if l2_coeff != 0.0 {
        for (g, w) in grads.proj_w.iter_mut().zip(&params.proj_w) {
            *g += 2.0 * l2_coeff * w;
            penalty += w * w;
        }
        for (g, w) in grads.proj_b.iter_mut().zip(&params.proj_b) {
            *g += 2.0 * l2_coeff * w;
            penalty += w * w;
        }
        for &row in &grads.touched {
            let start = row as usize * d;
            for k in start..start + d {
                let w = params.embed[k];
                grads.embed[k] += 2.0 * l2_coeff * w;
                penalty += w * w;
            }
        }
    }
    grads.embed[PAD as usize * d..(PAD as usize + 1) * d].fill(0.0);

    if !grads.is_finite() {
        return Err(TrainError::NonFiniteGradient);
    }
    Ok(GradientOutput {
        loss,
        objective: loss + l2_coeff * penalty,
        grads,
    })
}

/// Pushes `dL/dy` for one encoded paragraph back into the parameter gradients.
fn backprop_item(params: &EncoderParams, fwd: &Forward, dy: &[f64], grads: &mut Gradients) {
    let d = params.dim;
    let dz: Vec<f64> = dy.iter().zip(&fwd.output).map(|(g, y)| g * (1.0 - y * y)).collect();
    let mut dh = vec![0.0; d];
    for (r, &dzr) in dz.iter().enumerate() {
        grads.proj_b[r] += dzr;
        let row = r * d..(r + 1) * d;
        let gw = &mut grads.proj_w[row.clone()];
        for (((g, &w), h), &x) in gw
            .iter_mut()
            .zip(&params.proj_w[row])
            .zip(dh.iter_mut())
            .zip(&fwd.hidden)
        {
            *g += dzr * x;
            *h += w * dzr;
        }
    }
    let scale = 1.0 / fwd.ids.len() as f64;
    for &id in &fwd.ids {
        grads.touched.insert(id);
        let start = id as usize * d;
        for (g, h) in grads.embed[start..start + d].iter_mut().zip(&dh) {
            *g += h * scale;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::{encode, similarity};
    use crate::training::loss::info_nce_loss;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Forward-only objective, assembled from the public encode / similarity /
    /// loss functions, for central differences.
    fn objective(params: &EncoderParams, batch: &TrainingBatch, tau: f64, l2: f64, max_len: usize) -> f64 {
        let a: Vec<_> = batch
            .anchors
            .iter()
            .map(|ids| encode(params, ids, max_len).unwrap())
            .collect();
        let p: Vec<_> = batch
            .positives
            .iter()
            .map(|ids| encode(params, ids, max_len).unwrap())
            .collect();
        let sim: Vec<Vec<f64>> = a
            .iter()
            .map(|x| p.iter().map(|y| similarity(x, y).unwrap()).collect())
            .collect();
        let touched: BTreeSet<u32> = batch
            .anchors
            .iter()
            .chain(&batch.positives)
            .flat_map(|ids| ids.iter().take(max_len).copied())
            .filter(|&id| id != PAD)
            .collect();
        let d = params.dim;
        let mut penalty: f64 = params.proj_w.iter().chain(&params.proj_b).map(|w| w * w).sum();
        for r in touched {
            penalty += params.embed[r as usize * d..(r as usize + 1) * d]
                .iter()
                .map(|w| w * w)
                .sum::<f64>();
        }
        info_nce_loss(&sim, tau).unwrap() + l2 * penalty
    }

    fn random_batch(rng: &mut ChaCha8Rng, vocab: u32, b: usize) -> TrainingBatch {
        let mut list = || -> Vec<u32> {
            let n = rng.random_range(2..9);
            (0..n).map(|_| rng.random_range(1..vocab)).collect()
        };
        let anchors = (0..b).map(|_| list()).collect();
        let positives = (0..b).map(|_| list()).collect();
        TrainingBatch { anchors, positives }
    }

    fn max_rel_err(analytic: &[f64], numeric: &[f64]) -> f64 {
        analytic
            .iter()
            .zip(numeric)
            .map(|(a, n)| (a - n).abs() / a.abs().max(n.abs()).max(1e-6))
            .fold(0.0, f64::max)
    }

    fn central_diff(
        params: &EncoderParams,
        batch: &TrainingBatch,
        tau: f64,
        l2: f64,
        pick: impl Fn(&mut EncoderParams) -> &mut Vec<f64>,
    ) -> Vec<f64> {
        let h = 1e-5;
        let len = pick(&mut params.clone()).len();
        (0..len)
            .map(|k| {
                let mut up = params.clone();
                pick(&mut up)[k] += h;
                let mut dn = params.clone();
                pick(&mut dn)[k] -= h;
                (objective(&up, batch, tau, l2, 256) - objective(&dn, batch, tau, l2, 256)) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn analytic_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for (trial, tau, l2) in [(0, 0.05, 1e-4), (1, 0.05, 0.0), (2, 1.0, 1e-2)] {
            let params = EncoderParams::init(12, 8, 100 + trial);
            let batch = random_batch(&mut rng, 12, 4);
            let out = compute_gradients(&params, &batch, tau, l2, 256).unwrap();
            assert!((out.objective - objective(&params, &batch, tau, l2, 256)).abs() < 1e-12);

            let fd_w = central_diff(&params, &batch, tau, l2, |p| &mut p.proj_w);
            let fd_b = central_diff(&params, &batch, tau, l2, |p| &mut p.proj_b);
            let fd_e = central_diff(&params, &batch, tau, l2, |p| &mut p.embed);
            for (name, a, n) in [
                ("proj_w", &out.grads.proj_w, &fd_w),
                ("proj_b", &out.grads.proj_b, &fd_b),
                ("embed", &out.grads.embed, &fd_e),
            ] {
                let err = max_rel_err(a, n);
                assert!(err <= 1e-4, "trial {trial} {name}: max rel err {err:e}");
            }
        }
    }

    #[test]
    fn untouched_rows_and_pad_get_zero() {
        let params = EncoderParams::init(20, 4, 3);
        let batch = TrainingBatch {
            anchors: vec![vec![2, 3, PAD], vec![4, 5]],
            positives: vec![vec![3, 2], vec![5, 6, PAD]],
        };
        let out = compute_gradients(&params, &batch, 0.05, 1e-3, 256).unwrap();
        let d = params.dim;
        for row in 0..20u32 {
            let g = &out.grads.embed[row as usize * d..(row as usize + 1) * d];
            if [2, 3, 4, 5, 6].contains(&row) {
                assert!(g.iter().any(|&v| v != 0.0), "row {row}");
            } else {
                assert!(g.iter().all(|&v| v == 0.0), "row {row}");
            }
        }
        assert_eq!(out.grads.touched, BTreeSet::from([2, 3, 4, 5, 6]));
    }

    #[test]
    fn near_optimum_has_tiny_gradient() {
        // anchor i and positive i are the same one-token paragraph, encoded
        // along orthogonal axes, so s_ii = 1 and s_ij = 0
        let d = 8;
        let b = 4;
        let mut params = EncoderParams::zeros(2 + b, d);
        for k in 0..d {
            params.proj_w[k * d + k] = 1.0;
        }
        for i in 0..b {
            params.embed[(2 + i) * d + i] = 0.5;
        }
        let ids: Vec<Vec<u32>> = (0..b).map(|i| vec![2 + i as u32]).collect();
        let batch = TrainingBatch {
            anchors: ids.clone(),
            positives: ids,
        };
        let out = compute_gradients(&params, &batch, 0.05, 0.0, 256).unwrap();
        assert!(out.grads.norm() < 1e-6, "{}", out.grads.norm());
    }

    #[test]
    fn shape_mismatch() {
        let params = EncoderParams::init(5, 2, 0);
        let batch = TrainingBatch {
            anchors: vec![vec![2]],
            positives: vec![],
        };
        assert!(compute_gradients(&params, &batch, 0.1, 0.0, 8).is_err());
    }
}
