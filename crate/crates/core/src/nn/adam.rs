use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// ADAM step-size constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamParams {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamParams {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Moment accumulators, one buffer per parameter tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState {
    step_count: u64,
    first_moment: Vec<Vec<f64>>,
    second_moment: Vec<Vec<f64>>,
}

impl AdamState {
    pub fn new(tensor_sizes: &[usize]) -> Self {
        Self {
            step_count: 0,
            first_moment: tensor_sizes.iter().map(|&n| vec![0.0; n]).collect(),
            second_moment: tensor_sizes.iter().map(|&n| vec![0.0; n]).collect(),
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub fn first_moment(&self) -> &[Vec<f64>] {
        &self.first_moment
    }

    pub fn second_moment(&self) -> &[Vec<f64>] {
        &self.second_moment
    }
}

/// One bias-corrected ADAM update applied element-wise to every tensor.
pub fn adam_step(
    params: &mut [&mut [f64]],
    grads: &[&[f64]],
    state: &mut AdamState,
    cfg: &AdamParams,
) -> Result<()> {
    if params.len() != grads.len() || params.len() != state.first_moment.len() {
        return Err(Error::shape("parameter, gradient and state tensor counts differ"));
    }
    for ((p, g), m) in params.iter().zip(grads).zip(&state.first_moment) {
        if p.len() != g.len() || p.len() != m.len() {
            return Err(Error::shape("parameter and gradient tensor sizes differ"));
        }
    }
    state.step_count += 1;
    let t = state.step_count as i32;
    let c1 = 1.0 - cfg.beta1.powi(t);
    let c2 = 1.0 - cfg.beta2.powi(t);
    let (b1, b2) = (cfg.beta1, cfg.beta2);
    for (((p, g), m), v) in params
        .iter_mut()
        .zip(grads)
        .zip(state.first_moment.iter_mut())
        .zip(state.second_moment.iter_mut())
    {
        for (((pi, &gi), mi), vi) in p.iter_mut().zip(g.iter()).zip(m.iter_mut()).zip(v.iter_mut()) {
            *mi = b1 * *mi + (1.0 - b1) * gi;
            *vi = b2 * *vi + (1.0 - b2) * gi * gi;
            let m_hat = *mi / c1;
            let v_hat = *vi / c2;
            *pi -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.epsilon);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn step(p: &mut [f64], g: &[f64], state: &mut AdamState) {
        adam_step(&mut [p], &[g], state, &AdamParams::default()).unwrap();
    }

    #[test]
    fn first_step_moves_by_learning_rate() {
        let mut p = [0.0];
        let mut state = AdamState::new(&[1]);
        step(&mut p, &[2.0], &mut state);
        // m_hat = 2, v_hat = 4
        assert_abs_diff_eq!(p[0], -1e-3 * 2.0 / (2.0 + 1e-8), epsilon = 1e-15);
        assert_abs_diff_eq!(p[0], -0.001, epsilon = 1e-10);
        assert_eq!(state.step_count(), 1);
    }

    #[test]
    fn zero_gradient_keeps_params() {
        let mut p = [0.3, -1.2];
        let mut state = AdamState::new(&[2]);
        step(&mut p, &[0.0, 0.0], &mut state);
        assert_eq!(p, [0.3, -1.2]);
        assert_eq!(state.step_count(), 1);
    }

    #[test]
    fn constant_gradient_moves_monotonically() {
        // hand iteration: step 2 has m = 0.19*g... m_hat = g, v_hat = g^2 again
        let mut p = [1.0, 1.0];
        let mut state = AdamState::new(&[2]);
        step(&mut p, &[0.5, -3.0], &mut state);
        let after_one = p;
        step(&mut p, &[0.5, -3.0], &mut state);
        assert!(after_one[0] < 1.0 && p[0] < after_one[0]);
        assert!(after_one[1] > 1.0 && p[1] > after_one[1]);
        assert_abs_diff_eq!(p[0], 1.0 - 2e-3, epsilon = 1e-9);
        assert_abs_diff_eq!(p[1], 1.0 + 2e-3, epsilon = 1e-9);
        assert!(state.second_moment()[0].iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn mismatched_shapes_rejected() {
        let mut p = [0.0, 0.0];
        let mut state = AdamState::new(&[2]);
        assert!(adam_step(&mut [&mut p[..]], &[&[1.0][..]], &mut state, &AdamParams::default()).is_err());
        assert_eq!(state.step_count(), 0);
    }
}
