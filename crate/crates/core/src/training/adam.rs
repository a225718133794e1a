//! Adam with linear warmup.

use crate::encoder::{EncoderParams, PAD};

use super::grad::Gradients;

pub const BETA1: f64 = 0.9;
pub const BETA2: f64 = 0.999;
pub const EPSILON: f64 = 1e-8;

/// First and second moment estimates, laid out like [`EncoderParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: EncoderParams,
    pub v: EncoderParams,
    /// Number of updates applied so far.
    pub t: u64,
}

impl AdamState {
    pub fn new(params: &EncoderParams) -> Self {
        AdamState {
            m: EncoderParams::zeros(params.vocab_size, params.dim),
            v: EncoderParams::zeros(params.vocab_size, params.dim),
            t: 0,
        }
    }
}

/// `learning_rate · min(1, step / warmup_steps)`; no warmup when
/// `warmup_steps` is zero.
pub fn warmup_rate(learning_rate: f64, step: u64, warmup_steps: u64) -> f64 {
    if warmup_steps == 0 {
        learning_rate
    } else {
        learning_rate * (step as f64 / warmup_steps as f64).min(1.0)
    }
}

/// Bias-corrected Adam update of one parameter slice at time `t` (1-based).
pub fn adam_update(values: &mut [f64], grads: &[f64], m: &mut [f64], v: &mut [f64], t: u64, rate: f64) {
    let c1 = 1.0 - BETA1.powi(t as i32);
    let c2 = 1.0 - BETA2.powi(t as i32);
    for k in 0..values.len() {
        let g = grads[k];
        m[k] = BETA1 * m[k] + (1.0 - BETA1) * g;
        v[k] = BETA2 * v[k] + (1.0 - BETA2) * g * g;
        let m_hat = m[k] / c1;
        let v_hat = v[k] / c2;
        values[k] -= rate * m_hat / (v_hat.sqrt() + EPSILON);
    }
}

/// One optimizer step. `step` is the 1-based global step used for warmup.
/// The PAD embedding row is never written.
pub fn adam_step(
    params: &mut EncoderParams,
    grads: &Gradients,
    state: &mut AdamState,
    step: u64,
    learning_rate: f64,
    warmup_steps: u64,
) {
    state.t += 1;
    let t = state.t;
    let rate = warmup_rate(learning_rate, step, warmup_steps);
    let d = params.dim;
    let skip = (PAD as usize + 1) * d;
    debug_assert_eq!(PAD, 0);

    adam_update(
        &mut params.embed[skip..],
        &grads.embed[skip..],
        &mut state.m.embed[skip..],
        &mut state.v.embed[skip..],
        t,
        rate,
    );
    adam_update(
        &mut params.proj_w,
        &grads.proj_w,
        &mut state.m.proj_w,
        &mut state.v.proj_w,
        t,
        rate,
    );
    adam_update(
        &mut params.proj_b,
        &grads.proj_b,
        &mut state.m.proj_b,
        &mut state.v.proj_b,
        t,
        rate,
    );
}
