//! Chain-rule entropy estimators built from trained classifiers.
//!
//! [`njee`] estimates `H(X)` as a marginal estimate of `X_1` plus the minimum
//! cross-entropy of one classifier per remaining component given its prefix.
//! [`cnjee`] estimates `H(X | Y)` with a classifier for every component,
//! each seeing `Y` and the prefix. [`mi`] and [`cmi`] are differences of the
//! two.
//!
//! Classifier inputs are the conditioning columns followed by the target
//! prefix, each column one-hot encoded. Term `m` is trained with seed
//! `derive_seed(config.seed, m)`, so the same term on either side of a
//! difference sees the same initialization stream and batch order.

use rayon::prelude::*;
use serde::Serialize;

use crate::discrete::{marginal_h1, DiscreteSample, EntropyEstimate, Method, TermDiagnostics};
use crate::error::{Error, Result};
use crate::nn::{train_classifier, EncodedBatch, TrainConfig, TrainOutcome};
use crate::seed::derive_seed;

/// The data of one chain decomposition: which sample is split into terms
/// and what every term is additionally conditioned on.
#[derive(Clone, Copy, Debug)]
pub struct ChainSpec<'a> {
    pub target: &'a DiscreteSample,
    pub conditioning: Option<&'a DiscreteSample>,
    pub config: &'a TrainConfig,
}

impl<'a> ChainSpec<'a> {
    pub fn new(
        target: &'a DiscreteSample,
        conditioning: Option<&'a DiscreteSample>,
        config: &'a TrainConfig,
    ) -> Result<Self> {
        if let Some(c) = conditioning {
            if c.n_rows() != target.n_rows() {
                return Err(Error::shape(format!(
                    "target has {} rows, conditioning has {}",
                    target.n_rows(),
                    c.n_rows()
                )));
            }
        }
        Ok(Self {
            target,
            conditioning,
            config,
        })
    }

    /// Classifier data for predicting target column `m` from the
    /// conditioning columns and target columns `0..m`.
    pub fn term_batch(&self, m: usize) -> Result<EncodedBatch> {
        let t = self.target;
        if m >= t.dims() {
            return Err(Error::shape(format!("term {m} beyond {} components", t.dims())));
        }
        let mut blocks: Vec<usize> = self
            .conditioning
            .map(|c| c.alphabet_sizes().to_vec())
            .unwrap_or_default();
        blocks.extend_from_slice(&t.alphabet_sizes()[..m]);
        let mut symbols = Vec::with_capacity(t.n_rows() * blocks.len());
        for i in 0..t.n_rows() {
            if let Some(c) = self.conditioning {
                symbols.extend_from_slice(c.row(i));
            }
            symbols.extend_from_slice(&t.row(i)[..m]);
        }
        let targets = t.column(m).into_iter().map(|s| s as usize).collect();
        let classes = t.alphabet_sizes()[m].max(2);
        EncodedBatch::new(blocks, &symbols, targets, classes)
    }

    pub fn train_term(&self, m: usize) -> Result<TrainOutcome> {
        let batch = self.term_batch(m)?;
        let config = self.config.clone().with_seed(derive_seed(self.config.seed, m as u64));
        train_classifier(&batch, &config).map_err(|e| Error::Term {
            term: m,
            source: Box::new(e),
        })
    }

    fn train_terms(&self, terms: std::ops::Range<usize>) -> Result<Vec<(f64, TermDiagnostics)>> {
        terms
            .into_par_iter()
            .map(|m| {
                let out = self.train_term(m)?;
                Ok((
                    out.min_ce,
                    TermDiagnostics {
                        term: m,
                        classifier: true,
                        epochs_run: out.epochs_run,
                        best_epoch: out.best_epoch,
                        history: out.history,
                        batch_losses: out.batch_losses,
                    },
                ))
            })
            .collect()
    }
}

/// Joint entropy `H(X)`: marginal estimate of the first component plus one
/// trained classifier per remaining component.
pub fn njee(sample: &DiscreteSample, config: &TrainConfig) -> Result<EntropyEstimate> {
    if sample.n_rows() < 2 {
        return Err(Error::Empty("need at least 2 observations".into()));
    }
    let spec = ChainSpec::new(sample, None, config)?;
    let h1 = marginal_h1(&sample.column(0))?;
    let mut terms = vec![h1];
    let mut diagnostics = vec![TermDiagnostics {
        term: 0,
        classifier: false,
        ..TermDiagnostics::default()
    }];
    for (ce, diag) in spec.train_terms(1..sample.dims())? {
        terms.push(ce);
        diagnostics.push(diag);
    }
    Ok(EntropyEstimate::from_terms(Method::Njee, terms, diagnostics))
}

/// Conditional joint entropy `H(X | Y)`: one classifier per component of `X`.
pub fn cnjee(
    target: &DiscreteSample,
    conditioning: &DiscreteSample,
    config: &TrainConfig,
) -> Result<EntropyEstimate> {
    if target.n_rows() < 2 {
        return Err(Error::Empty("need at least 2 observations".into()));
    }
    let spec = ChainSpec::new(target, Some(conditioning), config)?;
    let (terms, diagnostics) = spec.train_terms(0..target.dims())?.into_iter().unzip();
    Ok(EntropyEstimate::from_terms(Method::Cnjee, terms, diagnostics))
}

#[derive(Clone, Debug, Serialize)]
pub struct MiEstimate {
    /// `h_x - h_x_given_y`, unclamped.
    pub value_nats: f64,
    pub clamped_nats: f64,
    pub h_x: EntropyEstimate,
    pub h_x_given_y: EntropyEstimate,
}

impl MiEstimate {
    pub fn from_parts(h_x: EntropyEstimate, h_x_given_y: EntropyEstimate) -> Self {
        let value_nats = h_x.value_nats - h_x_given_y.value_nats;
        Self {
            value_nats,
            clamped_nats: value_nats.max(0.0),
            h_x,
            h_x_given_y,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CmiEstimate {
    /// `h_x_given_z - h_x_given_yz`, unclamped.
    pub value_nats: f64,
    pub clamped_nats: f64,
    pub h_x_given_z: EntropyEstimate,
    pub h_x_given_yz: EntropyEstimate,
}

impl CmiEstimate {
    pub fn from_parts(h_x_given_z: EntropyEstimate, h_x_given_yz: EntropyEstimate) -> Self {
        let value_nats = h_x_given_z.value_nats - h_x_given_yz.value_nats;
        Self {
            value_nats,
            clamped_nats: value_nats.max(0.0),
            h_x_given_z,
            h_x_given_yz,
        }
    }
}

/// `I(X; Y) = H(X) - H(X | Y)`.
pub fn mi(x: &DiscreteSample, y: &DiscreteSample, config: &TrainConfig) -> Result<MiEstimate> {
    if x.n_rows() != y.n_rows() {
        return Err(Error::shape("x and y have different row counts"));
    }
    let h_x = njee(x, config)?;
    let h_x_given_y = cnjee(x, y, config)?;
    Ok(MiEstimate::from_parts(h_x, h_x_given_y))
}

/// `I(X; Y | Z) = H(X | Z) - H(X | Y, Z)`.
pub fn cmi(
    x: &DiscreteSample,
    y: &DiscreteSample,
    z: &DiscreteSample,
    config: &TrainConfig,
) -> Result<CmiEstimate> {
    if x.n_rows() != y.n_rows() || x.n_rows() != z.n_rows() {
        return Err(Error::shape("x, y and z have different row counts"));
    }
    let h_x_given_z = cnjee(x, z, config)?;
    let yz = y.hconcat(z)?;
    let h_x_given_yz = cnjee(x, &yz, config)?;
    Ok(CmiEstimate::from_parts(h_x_given_z, h_x_given_yz))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> TrainConfig {
        TrainConfig {
            max_epochs: 3,
            patience: 1,
            hidden_sizes: vec![8],
            ..TrainConfig::default()
        }
    }

    #[test]
    fn term_batch_layout() {
        let x = DiscreteSample::new(vec![1, 0, 1, 0, 1, 1], vec![2, 2, 2]).unwrap();
        let y = DiscreteSample::new(vec![2, 0], vec![3]).unwrap();
        let cfg = small_config();
        let spec = ChainSpec::new(&x, Some(&y), &cfg).unwrap();
        let b = spec.term_batch(2).unwrap();
        assert_eq!(b.block_sizes(), &[3, 2, 2]);
        // row 0: y=2 -> col 2, x1=1 -> col 3+1, x2=0 -> col 5+0
        assert_eq!(b.active_row(0), &[2, 4, 5]);
        assert_eq!(b.targets(), &[1, 1]);
        let b0 = spec.term_batch(0).unwrap();
        assert_eq!(b0.block_sizes(), &[3]);
        assert!(spec.term_batch(3).is_err());
    }

    #[test]
    fn component_counts() {
        let x = DiscreteSample::new((0..40).map(|i| (i % 3 == 0) as u32).collect(), vec![2; 4]).unwrap();
        let y = DiscreteSample::new((0..10).map(|i| i % 2).collect(), vec![2]).unwrap();
        let cfg = small_config();
        let h = njee(&x, &cfg).unwrap();
        assert_eq!(h.classifiers_trained(), 3);
        assert_eq!(h.component_terms.len(), 4);
        assert_eq!(h.value_nats, h.component_terms.iter().sum::<f64>());
        let hc = cnjee(&x, &y, &cfg).unwrap();
        assert_eq!(hc.classifiers_trained(), 4);
        assert_eq!(hc.value_nats, hc.component_terms.iter().sum::<f64>());
    }

    #[test]
    fn single_component_is_marginal_only() {
        let x = DiscreteSample::new(vec![0, 0, 0, 1], vec![2]).unwrap();
        let h = njee(&x, &small_config()).unwrap();
        assert_eq!(h.classifiers_trained(), 0);
        assert!((h.value_nats - 0.6873).abs() < 1e-4);
    }

    #[test]
    fn row_mismatch_rejected() {
        let x = DiscreteSample::new(vec![0, 1, 0], vec![2]).unwrap();
        let y = DiscreteSample::new(vec![0, 1], vec![2]).unwrap();
        assert!(cnjee(&x, &y, &small_config()).is_err());
        assert!(mi(&x, &y, &small_config()).is_err());
        assert!(njee(&DiscreteSample::new(vec![0], vec![2]).unwrap(), &small_config()).is_err());
    }

    #[test]
    fn training_failure_names_the_term() {
        let x = DiscreteSample::new(vec![0, 1, 1, 0], vec![2, 2]).unwrap();
        let cfg = TrainConfig {
            prob_floor: 0.9,
            ..small_config()
        };
        match njee(&x, &cfg) {
            Err(Error::Term { term, .. }) => assert_eq!(term, 1),
            other => panic!("unexpected {other:?}"),
        }
    }
}
