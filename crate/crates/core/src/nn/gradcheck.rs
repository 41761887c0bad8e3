use serde::Serialize;

use super::encode::EncodedBatch;
use super::model::ClassifierModel;
use crate::error::{Error, Result};

/// Central-difference step.
pub const FD_STEP: f64 = 1e-5;

// Gradients smaller than this are compared in absolute terms.
const SCALE_FLOOR: f64 = 1e-6;

#[derive(Clone, Debug, Serialize)]
pub struct ParamCheck {
    pub tensor: usize,
    pub index: usize,
    pub analytic: f64,
    pub numeric: f64,
    pub rel_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GradCheckReport {
    pub checks: Vec<ParamCheck>,
    pub max_rel_error: f64,
    pub tolerance: f64,
}

impl GradCheckReport {
    pub fn flagged(&self) -> impl Iterator<Item = &ParamCheck> {
        self.checks.iter().filter(|c| c.rel_error > self.tolerance)
    }

    pub fn passed(&self) -> bool {
        self.max_rel_error <= self.tolerance
    }
}

pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(SCALE_FLOOR)
}

/// Compares analytic gradients against central finite differences for every parameter.
pub fn grad_check(
    model: &ClassifierModel,
    batch: &EncodedBatch,
    prob_floor: f64,
    tolerance: f64,
) -> Result<GradCheckReport> {
    if !(tolerance > 0.0) {
        return Err(Error::param("tolerance must be positive"));
    }
    let (_, grads) = model.backward(batch, prob_floor)?;
    let analytic: Vec<Vec<f64>> = grads.tensors().iter().map(|t| t.to_vec()).collect();

    let mut probe = model.clone();
    let mut checks = Vec::new();
    for (t, tensor) in analytic.iter().enumerate() {
        for (i, &a) in tensor.iter().enumerate() {
            let orig = probe.param_tensors_mut()[t][i];
            probe.param_tensors_mut()[t][i] = orig + FD_STEP;
            let up = probe.evaluate(batch, prob_floor)?;
            probe.param_tensors_mut()[t][i] = orig - FD_STEP;
            let down = probe.evaluate(batch, prob_floor)?;
            probe.param_tensors_mut()[t][i] = orig;
            let numeric = (up - down) / (2.0 * FD_STEP);
            checks.push(ParamCheck {
                tensor: t,
                index: i,
                analytic: a,
                numeric,
                rel_error: relative_error(a, numeric),
            });
        }
    }
    let max_rel_error = checks.iter().map(|c| c.rel_error).fold(0.0, f64::max);
    Ok(GradCheckReport {
        checks,
        max_rel_error,
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_batch(rng: &mut ChaCha8Rng, blocks: &[usize], classes: usize, n: usize) -> EncodedBatch {
        let mut symbols = Vec::new();
        for _ in 0..n {
            for &b in blocks {
                symbols.push(rng.random_range(0..b as u32));
            }
        }
        let targets = (0..n).map(|_| rng.random_range(0..classes)).collect();
        EncodedBatch::new(blocks.to_vec(), &symbols, targets, classes).unwrap()
    }

    #[test]
    fn linear_model_passes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let batch = random_batch(&mut rng, &[3, 2], 3, 16);
        let model = ClassifierModel::new(&[5, 3], 4).unwrap();
        let report = grad_check(&model, &batch, 1e-7, 1e-4).unwrap();
        assert!(report.passed(), "max rel error {}", report.max_rel_error);
    }

    #[test]
    fn default_architecture_passes() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let batch = random_batch(&mut rng, &[2, 2, 4], 2, 12);
        let model = ClassifierModel::new(&[8, 50, 50, 2], 5).unwrap();
        let report = grad_check(&model, &batch, 1e-7, 1e-4).unwrap();
        assert!(report.passed(), "max rel error {}", report.max_rel_error);
        assert_eq!(report.checks.len(), model.num_params());
    }

    #[test]
    fn zero_model_passes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let batch = random_batch(&mut rng, &[2, 3], 4, 10);
        let model = ClassifierModel::zeros(&[5, 6, 6, 4]).unwrap();
        let report = grad_check(&model, &batch, 1e-7, 1e-4).unwrap();
        assert!(report.passed());
        assert_eq!(report.flagged().count(), 0);
    }

    #[test]
    fn rejects_bad_tolerance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let batch = random_batch(&mut rng, &[2], 2, 4);
        let model = ClassifierModel::zeros(&[2, 2]).unwrap();
        assert!(grad_check(&model, &batch, 1e-7, 0.0).is_err());
    }
}
