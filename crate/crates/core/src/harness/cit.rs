use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::roc::RocCurve;
use crate::error::{Error, Result};
use crate::estimators::cmi;
use crate::nn::TrainConfig;
use crate::seed::derive_seed;
use crate::synth::{cit_corpus, draw_triplet, Triplet, TripletKind};

// Stream for the label permutation of the null curve.
const NULL_STREAM: u64 = 0x4E554C4C;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CmiRow {
    pub kind: TripletKind,
    pub n: usize,
    pub rep: usize,
    pub estimate: f64,
    pub clamped: f64,
    pub truth: f64,
}

/// `I(X; Y | Z)` on fresh triplets of one shape.
#[derive(Clone, Debug, Serialize)]
pub struct CmiExperiment {
    pub kind: TripletKind,
    pub n: usize,
    pub reps: usize,
    pub train: TrainConfig,
    pub seed: u64,
}

fn score(t: &Triplet, train: &TrainConfig) -> Result<f64> {
    Ok(cmi(&t.x, &t.y, &t.z, train)?.value_nats)
}

impl CmiExperiment {
    pub fn run(&self) -> Result<Vec<CmiRow>> {
        if self.reps == 0 {
            return Err(Error::param("reps must be positive"));
        }
        (0..self.reps)
            .into_par_iter()
            .map(|rep| {
                let s = derive_seed(self.seed, rep as u64);
                let t = draw_triplet(self.kind, self.n, s)?;
                let est = cmi(&t.x, &t.y, &t.z, &self.train.clone().with_seed(derive_seed(s, 1)))?;
                Ok(CmiRow {
                    kind: self.kind,
                    n: self.n,
                    rep,
                    estimate: est.value_nats,
                    clamped: est.clamped_nats,
                    truth: t.true_cmi,
                })
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TripletScore {
    pub index: usize,
    pub kind: TripletKind,
    pub dependent: bool,
    pub true_cmi: f64,
    pub score: f64,
    /// Label after a seeded random permutation, for the null curve.
    pub shuffled_label: bool,
}

#[derive(Clone, Debug)]
pub struct CitResult {
    pub scores: Vec<TripletScore>,
    pub roc: RocCurve,
    pub null_roc: RocCurve,
}

/// Scores every triplet of a labeled corpus by its estimated CMI and
/// thresholds the scores into an ROC curve.
#[derive(Clone, Debug, Serialize)]
pub struct CitExperiment {
    pub n_dependent: usize,
    pub n_independent: usize,
    pub n_samples: usize,
    pub train: TrainConfig,
    pub seed: u64,
}

impl CitExperiment {
    pub fn run(&self) -> Result<CitResult> {
        let corpus = cit_corpus(self.n_dependent, self.n_independent, self.n_samples, self.seed)?;
        let scores: Vec<f64> = corpus
            .par_iter()
            .enumerate()
            .map(|(i, t)| score(t, &self.train.clone().with_seed(derive_seed(self.seed, i as u64))))
            .collect::<Result<_>>()?;
        let labels: Vec<bool> = corpus.iter().map(Triplet::dependent).collect();
        let mut shuffled = labels.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(derive_seed(self.seed, NULL_STREAM)));
        let roc = RocCurve::from_scores(&scores, &labels)?;
        let null_roc = RocCurve::from_scores(&scores, &shuffled)?;
        let scores = corpus
            .iter()
            .enumerate()
            .map(|(i, t)| TripletScore {
                index: i,
                kind: t.kind,
                dependent: labels[i],
                true_cmi: t.true_cmi,
                score: scores[i],
                shuffled_label: shuffled[i],
            })
            .collect();
        Ok(CitResult { scores, roc, null_roc })
    }
}
