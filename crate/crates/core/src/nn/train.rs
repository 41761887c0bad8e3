use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adam::{adam_step, AdamParams, AdamState};
use super::encode::EncodedBatch;
use super::model::ClassifierModel;
use crate::error::{Error, Result};
use crate::seed::derive_seed;

/// Architecture, optimizer and schedule for one classifier fit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub hidden_sizes: Vec<usize>,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon_adam: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
    /// Lower clamp on predicted probabilities; bounds the loss by `-ln(prob_floor)`.
    pub prob_floor: f64,
    /// Fraction of rows held out for the reported CE. 0 evaluates in-sample.
    pub holdout: f64,
    pub seed: u64,
    /// Keep every mini-batch loss in [`TrainOutcome::batch_losses`].
    pub trace_batches: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            hidden_sizes: vec![50, 50],
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon_adam: 1e-8,
            batch_size: 64,
            max_epochs: 200,
            patience: 20,
            prob_floor: 1e-7,
            holdout: 0.0,
            seed: 0,
            trace_batches: false,
        }
    }
}

impl TrainConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn adam(&self) -> AdamParams {
        AdamParams {
            learning_rate: self.learning_rate,
            beta1: self.beta1,
            beta2: self.beta2,
            epsilon: self.epsilon_adam,
        }
    }

    /// Checks the config against a target alphabet of `num_classes` symbols.
    pub fn validate(&self, num_classes: usize) -> Result<()> {
        if self.hidden_sizes.contains(&0) {
            return Err(Error::param("hidden layer sizes must be positive"));
        }
        if !(self.learning_rate > 0.0) || !(self.epsilon_adam > 0.0) {
            return Err(Error::param("learning rate and ADAM epsilon must be positive"));
        }
        for beta in [self.beta1, self.beta2] {
            if !(beta > 0.0 && beta < 1.0) {
                return Err(Error::param(format!("beta {beta} outside (0, 1)")));
            }
        }
        if self.batch_size == 0 || self.max_epochs == 0 {
            return Err(Error::param("batch size and max epochs must be positive"));
        }
        if self.patience > self.max_epochs {
            return Err(Error::param("patience exceeds max_epochs"));
        }
        if !(self.prob_floor > 0.0 && self.prob_floor < 1.0 / num_classes as f64) {
            return Err(Error::param(format!(
                "prob_floor {} must lie in (0, 1/{num_classes})",
                self.prob_floor
            )));
        }
        if !(0.0..0.9).contains(&self.holdout) {
            return Err(Error::param("holdout fraction must lie in [0, 0.9)"));
        }
        Ok(())
    }

    pub fn layer_dims(&self, input_dim: usize, num_classes: usize) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.hidden_sizes.len() + 2);
        dims.push(input_dim);
        dims.extend_from_slice(&self.hidden_sizes);
        dims.push(num_classes);
        dims
    }
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    /// Parameters at the epoch with the lowest evaluation CE.
    pub model: ClassifierModel,
    pub min_ce: f64,
    /// Evaluation CE after each epoch.
    pub history: Vec<f64>,
    pub best_epoch: usize,
    pub epochs_run: usize,
    pub batch_losses: Vec<f64>,
}

/// Fits a classifier by mini-batch ADAM and reports the minimum full-sample CE.
pub fn train_classifier(data: &EncodedBatch, config: &TrainConfig) -> Result<TrainOutcome> {
    config.validate(data.num_classes())?;
    if data.is_empty() {
        return Err(Error::Empty("no training rows".into()));
    }

    let (train, eval) = if config.holdout > 0.0 {
        let mut rows: Vec<usize> = (0..data.len()).collect();
        rows.shuffle(&mut ChaCha8Rng::seed_from_u64(derive_seed(config.seed, u64::MAX)));
        let n_eval = ((data.len() as f64) * config.holdout).ceil() as usize;
        if n_eval == 0 || n_eval >= data.len() {
            return Err(Error::param("holdout leaves an empty train or evaluation split"));
        }
        let (eval_rows, train_rows) = rows.split_at(n_eval);
        (data.select(train_rows), Some(data.select(eval_rows)))
    } else {
        (data.clone(), None)
    };
    let eval = eval.as_ref().unwrap_or(&train);

    let dims = config.layer_dims(data.input_dim(), data.num_classes());
    let mut model = ClassifierModel::new(&dims, derive_seed(config.seed, 0))?;
    let sizes: Vec<usize> = model.param_tensors_mut().iter().map(|t| t.len()).collect();
    let mut state = AdamState::new(&sizes);
    let adam = config.adam();

    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut history = Vec::with_capacity(config.max_epochs);
    let mut batch_losses = Vec::new();
    let mut best: Option<(f64, usize, ClassifierModel)> = None;

    for epoch in 0..config.max_epochs {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, epoch as u64 + 1));
        order.shuffle(&mut rng);
        for chunk in order.chunks(config.batch_size) {
            let batch = train.select(chunk);
            let (loss, grads) = model.backward(&batch, config.prob_floor)?;
            if !loss.is_finite() {
                return Err(Error::NonFiniteLoss { epoch, loss });
            }
            if config.trace_batches {
                batch_losses.push(loss);
            }
            let g = grads.tensors();
            adam_step(&mut model.param_tensors_mut(), &g, &mut state, &adam)?;
        }

        let ce = model.evaluate(eval, config.prob_floor)?;
        if !ce.is_finite() {
            return Err(Error::NonFiniteLoss { epoch, loss: ce });
        }
        history.push(ce);
        match &best {
            Some((best_ce, _, _)) if ce >= *best_ce => {}
            _ => best = Some((ce, epoch, model.clone())),
        }
        let since_best = epoch - best.as_ref().map_or(epoch, |b| b.1);
        if since_best > 0 && since_best >= config.patience {
            break;
        }
    }

    let (min_ce, best_epoch, model) = best.expect("at least one epoch runs");
    Ok(TrainOutcome {
        model,
        min_ce,
        epochs_run: history.len(),
        history,
        best_epoch,
        batch_losses,
    })
}
