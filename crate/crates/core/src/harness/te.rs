use serde::Serialize;

use crate::error::Result;
use crate::nn::TrainConfig;
use crate::synth::coupled_process;
use crate::timeseries::{embed, transfer_entropy};

/// Transfer entropy in both directions on a coupled process with known truth.
#[derive(Clone, Debug, Serialize)]
pub struct TeFixture {
    pub alphabet: usize,
    pub coupling: f64,
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub train: TrainConfig,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TeFixtureRow {
    pub alphabet: usize,
    pub coupling: f64,
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub te_xy: f64,
    pub te_yx: f64,
    pub true_te: f64,
}

impl TeFixture {
    pub fn run(&self) -> Result<TeFixtureRow> {
        let series = coupled_process(self.n, self.alphabet, self.coupling, self.seed)?;
        let xy = embed(&series.x, &series.y, self.k, self.l, self.alphabet)?;
        let yx = embed(&series.y, &series.x, self.k, self.l, self.alphabet)?;
        let (a, b) = rayon::join(|| transfer_entropy(&xy, &self.train), || transfer_entropy(&yx, &self.train));
        Ok(TeFixtureRow {
            alphabet: self.alphabet,
            coupling: self.coupling,
            n: self.n,
            k: self.k,
            l: self.l,
            te_xy: a?.value_nats,
            te_yx: b?.value_nats,
            true_te: series.true_te,
        })
    }
}
