use serde::Serialize;

use crate::discrete::{DiscreteSample, EntropyEstimate};
use crate::error::{Error, Result};
use crate::estimators::{cnjee, njee, MiEstimate};
use crate::nn::TrainConfig;
use crate::synth::{quantized_pair_mi, sample_gaussian_pair, sample_gaussian_pair_cubic, GaussianPairSpec};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StaircaseStep {
    pub rho: f64,
    pub cubic: bool,
}

/// MI estimates on quantized Gaussian pairs, one per step. Every step draws
/// from the same seed, so `X` (which does not depend on `rho`) and its
/// entropy estimate are shared between steps.
#[derive(Clone, Debug, Serialize)]
pub struct Staircase {
    pub dim: usize,
    pub bins: usize,
    pub n: usize,
    pub steps: Vec<StaircaseStep>,
    pub train: TrainConfig,
    pub seed: u64,
    /// Trailing window of the smoothed per-batch trace; 0 disables the trace.
    pub trace_window: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StaircaseRow {
    pub true_mi: f64,
    /// MI of the quantized pair; empty for the cubic variant.
    pub quantized_mi: Option<f64>,
    pub rho: f64,
    pub cubic: bool,
    pub n: usize,
    pub estimate: f64,
    pub h_x: f64,
    pub h_x_given_y: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub true_mi: f64,
    pub cubic: bool,
    pub batch: usize,
    pub estimate: f64,
    pub rolling_mean: f64,
}

impl Staircase {
    /// Steps at the given true MI levels, each optionally repeated with the cubic transform.
    pub fn levels(dim: usize, levels: &[f64], cubic_levels: &[f64]) -> Vec<StaircaseStep> {
        let rho = |mi: f64| crate::synth::rho_for_mi(mi, dim);
        levels
            .iter()
            .map(|&l| StaircaseStep { rho: rho(l), cubic: false })
            .chain(cubic_levels.iter().map(|&l| StaircaseStep { rho: rho(l), cubic: true }))
            .collect()
    }

    pub fn run(&self) -> Result<(Vec<StaircaseRow>, Vec<TraceRow>)> {
        if self.steps.is_empty() {
            return Err(Error::param("no staircase steps"));
        }
        let train = TrainConfig {
            trace_batches: self.trace_window > 0,
            ..self.train.clone()
        };
        let mut cached: Option<(DiscreteSample, EntropyEstimate)> = None;
        let mut rows = Vec::with_capacity(self.steps.len());
        let mut trace = Vec::new();
        for step in &self.steps {
            let spec = GaussianPairSpec::new(self.dim, step.rho, self.bins)?;
            let pair = if step.cubic {
                sample_gaussian_pair_cubic(&spec, self.n, self.seed)?.0
            } else {
                sample_gaussian_pair(&spec, self.n, self.seed)?
            };
            let h_x = match &cached {
                Some((x, h)) if *x == pair.x => h.clone(),
                _ => {
                    let h = njee(&pair.x, &train)?;
                    cached = Some((pair.x.clone(), h.clone()));
                    h
                }
            };
            let est = MiEstimate::from_parts(h_x, cnjee(&pair.x, &pair.y, &train)?);
            let quantized_mi = if step.cubic {
                None
            } else {
                Some(self.dim as f64 * quantized_pair_mi(step.rho, self.bins)?)
            };
            if self.trace_window > 0 {
                for (batch, (estimate, rolling_mean)) in batch_trace(&est, self.trace_window).into_iter().enumerate() {
                    trace.push(TraceRow {
                        true_mi: pair.true_mi,
                        cubic: step.cubic,
                        batch,
                        estimate,
                        rolling_mean,
                    });
                }
            }
            rows.push(StaircaseRow {
                true_mi: pair.true_mi,
                quantized_mi,
                rho: step.rho,
                cubic: step.cubic,
                n: self.n,
                estimate: est.value_nats,
                h_x: est.h_x.value_nats,
                h_x_given_y: est.h_x_given_y.value_nats,
            });
        }
        Ok((rows, trace))
    }
}

/// Per-batch MI: the marginal term plus each term's training-batch loss on
/// the unconditioned side minus the conditioned side. Both sides of a term
/// share a seed and therefore a batch order. Paired with a trailing mean.
pub fn batch_trace(est: &MiEstimate, window: usize) -> Vec<(f64, f64)> {
    let h = &est.h_x.diagnostics;
    let c = &est.h_x_given_y.diagnostics;
    let len = h
        .iter()
        .chain(c)
        .filter(|d| d.classifier)
        .map(|d| d.batch_losses.len())
        .min()
        .unwrap_or(0);
    let marginal: f64 = h
        .iter()
        .zip(&est.h_x.component_terms)
        .filter(|(d, _)| !d.classifier)
        .map(|(_, v)| v)
        .sum();
    let values: Vec<f64> = (0..len)
        .map(|b| {
            let side = |ds: &[crate::discrete::TermDiagnostics]| -> f64 {
                ds.iter().filter(|d| d.classifier).map(|d| d.batch_losses[b]).sum()
            };
            marginal + side(h) - side(c)
        })
        .collect();
    let smooth = crate::timeseries::trailing_mean(&values, window.max(1));
    values.into_iter().zip(smooth).collect()
}
