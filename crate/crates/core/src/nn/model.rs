use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::encode::EncodedBatch;
use crate::error::{Error, Result};

/// One fully connected layer. `weights` is `fan_in × fan_out` so that a
/// one-hot input selects a contiguous row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

impl Dense {
    pub fn zeros(fan_in: usize, fan_out: usize) -> Self {
        Self {
            weights: Array2::zeros((fan_in, fan_out)),
            bias: Array1::zeros(fan_out),
        }
    }

    fn fan_in(&self) -> usize {
        self.weights.nrows()
    }
}

/// Feedforward ReLU network with a softmax output over `output_dim` classes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifierModel {
    layer_dims: Vec<usize>,
    layers: Vec<Dense>,
}

/// Parameter gradients, laid out exactly like the model's layers.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    pub layers: Vec<Dense>,
}

impl Gradients {
    pub fn tensors(&self) -> Vec<&[f64]> {
        self.layers
            .iter()
            .flat_map(|l| {
                [
                    l.weights.as_slice().expect("standard layout"),
                    l.bias.as_slice().expect("standard layout"),
                ]
            })
            .collect()
    }

    pub fn norm(&self) -> f64 {
        self.tensors()
            .iter()
            .flat_map(|t| t.iter())
            .map(|g| g * g)
            .sum::<f64>()
            .sqrt()
    }
}

pub(crate) enum Inputs<'a> {
    Dense(ArrayView2<'a, f64>),
    OneHot(&'a EncodedBatch),
}

impl Inputs<'_> {
    fn rows(&self) -> usize {
        match self {
            Inputs::Dense(x) => x.nrows(),
            Inputs::OneHot(b) => b.len(),
        }
    }

    fn cols(&self) -> usize {
        match self {
            Inputs::Dense(x) => x.ncols(),
            Inputs::OneHot(b) => b.input_dim(),
        }
    }
}

struct Activations {
    // pre-activations of hidden layers, then post-ReLU outputs
    pre: Vec<Array2<f64>>,
    post: Vec<Array2<f64>>,
    probs: Array2<f64>,
}

fn validate_dims(layer_dims: &[usize]) -> Result<()> {
    if layer_dims.len() < 2 {
        return Err(Error::param("need at least input and output dimensions"));
    }
    if layer_dims[1..].contains(&0) {
        return Err(Error::param("layer widths must be positive"));
    }
    if *layer_dims.last().unwrap() < 2 {
        return Err(Error::param("output dimension must be at least 2"));
    }
    Ok(())
}

fn softmax_rows(logits: &mut Array2<f64>) {
    for mut row in logits.rows_mut() {
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            sum += *v;
        }
        row.mapv_inplace(|v| v / sum);
    }
}

impl ClassifierModel {
    /// Glorot-uniform weights, zero biases.
    pub fn new(layer_dims: &[usize], seed: u64) -> Result<Self> {
        validate_dims(layer_dims)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers = layer_dims
            .windows(2)
            .map(|w| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
                Dense {
                    weights: Array2::from_shape_simple_fn((fan_in, fan_out), || {
                        rng.random_range(-limit..=limit)
                    }),
                    bias: Array1::zeros(fan_out),
                }
            })
            .collect();
        Ok(Self {
            layer_dims: layer_dims.to_vec(),
            layers,
        })
    }

    pub fn zeros(layer_dims: &[usize]) -> Result<Self> {
        validate_dims(layer_dims)?;
        let layers = layer_dims
            .windows(2)
            .map(|w| Dense::zeros(w[0], w[1]))
            .collect();
        Ok(Self {
            layer_dims: layer_dims.to_vec(),
            layers,
        })
    }

    pub fn from_layers(layers: Vec<Dense>) -> Result<Self> {
        let first = layers
            .first()
            .ok_or_else(|| Error::param("model needs at least one layer"))?;
        let mut dims = vec![first.weights.nrows()];
        for layer in &layers {
            if layer.weights.nrows() != *dims.last().unwrap() {
                return Err(Error::shape("consecutive layer widths disagree"));
            }
            if layer.bias.len() != layer.weights.ncols() {
                return Err(Error::shape("bias length differs from layer width"));
            }
            dims.push(layer.weights.ncols());
        }
        validate_dims(&dims)?;
        Ok(Self {
            layer_dims: dims,
            layers,
        })
    }

    pub fn layer_dims(&self) -> &[usize] {
        &self.layer_dims
    }

    pub fn layers(&self) -> &[Dense] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Dense] {
        &mut self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layer_dims[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_dims.last().unwrap()
    }

    pub fn num_params(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.bias.len())
            .sum()
    }

    pub fn param_tensors_mut(&mut self) -> Vec<&mut [f64]> {
        self.layers
            .iter_mut()
            .flat_map(|l| {
                [
                    l.weights.as_slice_mut().expect("standard layout"),
                    l.bias.as_slice_mut().expect("standard layout"),
                ]
            })
            .collect()
    }

    /// Class probabilities for each row of a dense input matrix.
    pub fn forward(&self, inputs: ArrayView2<f64>) -> Result<Array2<f64>> {
        if inputs.ncols() != self.input_dim() {
            return Err(Error::shape(format!(
                "input has {} columns, model expects {}",
                inputs.ncols(),
                self.input_dim()
            )));
        }
        Ok(self.run(&Inputs::Dense(inputs)).probs)
    }

    /// Class probabilities for one-hot encoded rows.
    pub fn predict(&self, batch: &EncodedBatch) -> Result<Array2<f64>> {
        self.check_batch(batch)?;
        Ok(self.run(&Inputs::OneHot(batch)).probs)
    }

    fn check_batch(&self, batch: &EncodedBatch) -> Result<()> {
        if batch.input_dim() != self.input_dim() {
            return Err(Error::shape(format!(
                "batch has input dim {}, model expects {}",
                batch.input_dim(),
                self.input_dim()
            )));
        }
        if batch.num_classes() != self.output_dim() {
            return Err(Error::shape(format!(
                "batch has {} classes, model outputs {}",
                batch.num_classes(),
                self.output_dim()
            )));
        }
        Ok(())
    }

    fn first_layer(&self, inputs: &Inputs) -> Array2<f64> {
        let layer = &self.layers[0];
        let n = inputs.rows();
        match inputs {
            Inputs::Dense(x) => x.dot(&layer.weights) + &layer.bias,
            Inputs::OneHot(batch) => {
                let width = layer.weights.ncols();
                let mut z = Array2::zeros((n, width));
                let w = layer.weights.as_slice().expect("standard layout");
                let b = layer.bias.as_slice().expect("standard layout");
                let zs = z.as_slice_mut().expect("standard layout");
                for (i, zrow) in zs.chunks_exact_mut(width).enumerate() {
                    zrow.copy_from_slice(b);
                    for &c in batch.active_row(i) {
                        let wrow = &w[c as usize * width..(c as usize + 1) * width];
                        for (zv, wv) in zrow.iter_mut().zip(wrow) {
                            *zv += wv;
                        }
                    }
                }
                z
            }
        }
    }

    fn run(&self, inputs: &Inputs) -> Activations {
        let mut pre = Vec::with_capacity(self.layers.len() - 1);
        let mut post: Vec<Array2<f64>> = Vec::with_capacity(self.layers.len() - 1);
        let mut z = self.first_layer(inputs);
        for layer in &self.layers[1..] {
            let a = z.mapv(|v| v.max(0.0));
            pre.push(z);
            z = a.dot(&layer.weights) + &layer.bias;
            post.push(a);
        }
        softmax_rows(&mut z);
        Activations {
            pre,
            post,
            probs: z,
        }
    }

    /// Clipped mean cross-entropy and its gradient over the whole batch.
    pub fn backward(&self, batch: &EncodedBatch, prob_floor: f64) -> Result<(f64, Gradients)> {
        self.check_batch(batch)?;
        self.backprop(&Inputs::OneHot(batch), batch.targets(), prob_floor)
    }

    /// Same as [`ClassifierModel::backward`] for real-valued inputs.
    pub fn backward_dense(
        &self,
        inputs: ArrayView2<f64>,
        targets: &[usize],
        prob_floor: f64,
    ) -> Result<(f64, Gradients)> {
        if inputs.ncols() != self.input_dim() || inputs.nrows() != targets.len() {
            return Err(Error::shape("inputs and targets disagree with the model"));
        }
        self.backprop(&Inputs::Dense(inputs), targets, prob_floor)
    }

    pub(crate) fn backprop(
        &self,
        inputs: &Inputs,
        targets: &[usize],
        prob_floor: f64,
    ) -> Result<(f64, Gradients)> {
        let n = inputs.rows();
        if n == 0 {
            return Err(Error::Empty("batch has no rows".into()));
        }
        debug_assert_eq!(inputs.cols(), self.input_dim());
        let acts = self.run(inputs);
        let loss = ce_loss(acts.probs.view(), targets, prob_floor)?;

        // d(loss)/d(logits) = (p - onehot)/n on rows above the floor, 0 otherwise
        let mut dz = acts.probs;
        let scale = 1.0 / n as f64;
        for (mut row, &y) in dz.rows_mut().into_iter().zip(targets) {
            if row[y] < prob_floor {
                row.fill(0.0);
            } else {
                row[y] -= 1.0;
                row.mapv_inplace(|v| v * scale);
            }
        }

        let mut grads: Vec<Dense> = Vec::with_capacity(self.layers.len());
        for l in (0..self.layers.len()).rev() {
            let bias = dz.sum_axis(Axis(0));
            let weights = if l > 0 {
                acts.post[l - 1].t().dot(&dz)
            } else {
                match inputs {
                    Inputs::Dense(x) => x.t().dot(&dz),
                    Inputs::OneHot(batch) => {
                        let layer = &self.layers[0];
                        let width = layer.weights.ncols();
                        let mut gw = Array2::zeros((layer.fan_in(), width));
                        let gws = gw.as_slice_mut().expect("standard layout");
                        let dzs = dz.as_slice().expect("standard layout");
                        for (i, drow) in dzs.chunks_exact(width).enumerate() {
                            for &c in batch.active_row(i) {
                                let grow = &mut gws[c as usize * width..(c as usize + 1) * width];
                                for (g, d) in grow.iter_mut().zip(drow) {
                                    *g += d;
                                }
                            }
                        }
                        gw
                    }
                }
            };
            if l > 0 {
                let mut da = dz.dot(&self.layers[l].weights.t());
                // ReLU derivative, 0 at exactly 0
                ndarray::Zip::from(&mut da)
                    .and(&acts.pre[l - 1])
                    .for_each(|d, &z| {
                        if z <= 0.0 {
                            *d = 0.0;
                        }
                    });
                dz = da;
            }
            grads.push(Dense { weights, bias });
        }
        grads.reverse();
        Ok((loss, Gradients { layers: grads }))
    }

    /// Clipped mean cross-entropy of the model on a batch, evaluated in chunks.
    pub fn evaluate(&self, batch: &EncodedBatch, prob_floor: f64) -> Result<f64> {
        self.check_batch(batch)?;
        if batch.is_empty() {
            return Err(Error::Empty("batch has no rows".into()));
        }
        const CHUNK: usize = 2048;
        let mut total = 0.0;
        let rows: Vec<usize> = (0..batch.len()).collect();
        for chunk in rows.chunks(CHUNK) {
            let sub = batch.select(chunk);
            let probs = self.run(&Inputs::OneHot(&sub)).probs;
            total += ce_loss(probs.view(), sub.targets(), prob_floor)? * chunk.len() as f64;
        }
        Ok(total / batch.len() as f64)
    }

    /// Per-row clipped negative log-likelihood `-ln max(p[y], floor)`.
    pub fn pointwise_nll(&self, batch: &EncodedBatch, prob_floor: f64) -> Result<Vec<f64>> {
        let probs = self.predict(batch)?;
        Ok(probs
            .rows()
            .into_iter()
            .zip(batch.targets())
            .map(|(row, &y)| -row[y].max(prob_floor).ln())
            .collect())
    }
}

/// Mean clipped cross-entropy `-(1/n) Σ ln max(p_i[y_i], floor)`.
pub fn ce_loss(probs: ArrayView2<f64>, targets: &[usize], prob_floor: f64) -> Result<f64> {
    if targets.is_empty() {
        return Err(Error::Empty("cross-entropy of an empty batch".into()));
    }
    if probs.nrows() != targets.len() {
        return Err(Error::shape(format!(
            "{} probability rows for {} targets",
            probs.nrows(),
            targets.len()
        )));
    }
    if !(prob_floor > 0.0) {
        return Err(Error::param("prob_floor must be positive"));
    }
    let k = probs.ncols();
    let mut total = 0.0;
    for (i, &y) in targets.iter().enumerate() {
        if y >= k {
            return Err(Error::SymbolOutOfRange {
                value: y as u64,
                alphabet: k as u64,
            });
        }
        total -= probs[[i, y]].max(prob_floor).ln();
    }
    Ok(total / targets.len() as f64)
}
