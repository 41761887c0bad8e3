use rayon::prelude::*;
use serde::Serialize;

use crate::discrete::{
    chao_shen_entropy, decompose, miller_madow_entropy, plugin_entropy, DiscreteSample, EmpiricalDistribution,
    Method,
};
use crate::error::{Error, Result};
use crate::estimators::njee;
use crate::nn::TrainConfig;
use crate::seed::derive_seed;
use crate::synth::{sample_univariate, DistributionSpec};

#[derive(Clone, Debug, Serialize)]
pub struct EntropySweep {
    pub dist: DistributionSpec,
    pub sample_sizes: Vec<usize>,
    pub reps: usize,
    pub methods: Vec<Method>,
    /// Digit base for the NJEE decomposition.
    pub base: u32,
    pub train: TrainConfig,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyRow {
    pub method: String,
    pub n: usize,
    pub rep: usize,
    pub estimate: f64,
    pub truth: Option<f64>,
    pub error: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RmseRow {
    pub method: String,
    pub n: usize,
    pub reps: usize,
    pub mean_estimate: f64,
    pub truth: f64,
    pub rmse: f64,
}

/// Entropy of one column of symbols. NJEE sees the base-`base` digits of
/// each symbol, the baselines see the symbols themselves.
pub fn estimate_symbols(
    symbols: &[u64],
    alphabet: u64,
    method: Method,
    base: u32,
    train: &TrainConfig,
) -> Result<f64> {
    match method {
        Method::Njee => Ok(njee(&decompose(symbols, alphabet, base)?, train)?.value_nats),
        Method::Cnjee => Err(Error::param("cnjee needs a conditioning variable")),
        _ => baseline(&EmpiricalDistribution::from_symbols(symbols)?, method),
    }
}

fn baseline(dist: &EmpiricalDistribution, method: Method) -> Result<f64> {
    Ok(match method {
        Method::Plugin => plugin_entropy(dist),
        Method::MillerMadow => miller_madow_entropy(dist),
        Method::ChaoShen => chao_shen_entropy(dist),
        other => return Err(Error::param(format!("{other} is not a baseline"))),
    })
}

/// Joint entropy of a loaded sample. A single column is decomposed into
/// digits for NJEE; several columns are used as the chain components directly.
pub fn estimate_sample(sample: &DiscreteSample, method: Method, base: u32, train: &TrainConfig) -> Result<f64> {
    if sample.dims() == 1 {
        let symbols: Vec<u64> = sample.column(0).into_iter().map(u64::from).collect();
        return estimate_symbols(&symbols, sample.alphabet_sizes()[0].max(2) as u64, method, base, train);
    }
    match method {
        Method::Njee => Ok(njee(sample, train)?.value_nats),
        Method::Cnjee => Err(Error::param("cnjee needs a conditioning variable")),
        _ => baseline(&EmpiricalDistribution::from_symbols(&sample.joint_symbols())?, method),
    }
}

impl EntropySweep {
    pub fn run(&self) -> Result<(Vec<EntropyRow>, Vec<RmseRow>)> {
        if self.reps == 0 || self.sample_sizes.is_empty() || self.methods.is_empty() {
            return Err(Error::param("need at least one rep, sample size and method"));
        }
        let truth = self.dist.exact_entropy()?;
        let jobs: Vec<(usize, usize)> = self
            .sample_sizes
            .iter()
            .flat_map(|&n| (0..self.reps).map(move |r| (n, r)))
            .collect();
        let rows: Vec<Vec<EntropyRow>> = jobs
            .par_iter()
            .map(|&(n, rep)| {
                let data_seed = derive_seed(derive_seed(self.seed, n as u64), rep as u64);
                let sample = sample_univariate(&self.dist, n, data_seed)?;
                let train = self.train.clone().with_seed(derive_seed(data_seed, 1));
                self.methods
                    .iter()
                    .map(|&m| {
                        let estimate =
                            estimate_symbols(&sample.symbols, sample.alphabet_size as u64, m, self.base, &train)?;
                        Ok(EntropyRow {
                            method: m.name().to_string(),
                            n,
                            rep,
                            estimate,
                            truth: Some(truth),
                            error: Some(estimate - truth),
                        })
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        let rows: Vec<EntropyRow> = rows.into_iter().flatten().collect();
        let rmse = rmse_table(&rows, &self.methods, &self.sample_sizes, truth);
        Ok((rows, rmse))
    }
}

pub fn rmse_table(rows: &[EntropyRow], methods: &[Method], sizes: &[usize], truth: f64) -> Vec<RmseRow> {
    let mut out = Vec::new();
    for &n in sizes {
        for m in methods {
            let est: Vec<f64> = rows
                .iter()
                .filter(|r| r.n == n && r.method == m.name())
                .map(|r| r.estimate)
                .collect();
            if est.is_empty() {
                continue;
            }
            let k = est.len() as f64;
            out.push(RmseRow {
                method: m.name().to_string(),
                n,
                reps: est.len(),
                mean_estimate: est.iter().sum::<f64>() / k,
                truth,
                rmse: (est.iter().map(|e| (e - truth).powi(2)).sum::<f64>() / k).sqrt(),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::DistributionKind;

    #[test]
    fn rmse_by_hand() {
        let row = |method: &str, estimate: f64| EntropyRow {
            method: method.into(),
            n: 10,
            rep: 0,
            estimate,
            truth: Some(1.0),
            error: Some(estimate - 1.0),
        };
        let rows = vec![row("plugin", 0.5), row("plugin", 1.5), row("njee", 1.0)];
        let t = rmse_table(&rows, &[Method::Plugin, Method::Njee], &[10], 1.0);
        assert_eq!(t[0].rmse, 0.5);
        assert_eq!(t[0].mean_estimate, 1.0);
        assert_eq!(t[1].rmse, 0.0);
    }

    #[test]
    fn constant_column_is_zero() {
        let s = DiscreteSample::new(vec![0; 50], vec![1]).unwrap();
        let train = TrainConfig {
            max_epochs: 3,
            patience: 1,
            ..TrainConfig::default()
        };
        for m in [Method::Plugin, Method::MillerMadow, Method::ChaoShen, Method::Njee] {
            let h = estimate_sample(&s, m, 2, &train).unwrap();
            assert!(h.abs() < 0.01, "{m}: {h}");
        }
    }

    #[test]
    fn sweep_shape_and_seeding() {
        let sweep = EntropySweep {
            dist: DistributionSpec::new(DistributionKind::Uniform, 8).unwrap(),
            sample_sizes: vec![50, 100],
            reps: 2,
            methods: vec![Method::Plugin, Method::MillerMadow],
            base: 2,
            train: TrainConfig::default(),
            seed: 3,
        };
        let (rows, rmse) = sweep.run().unwrap();
        assert_eq!(rows.len(), 2 * 2 * 2);
        assert_eq!(rmse.len(), 4);
        assert_eq!(sweep.run().unwrap().0, rows);
        assert!(rows.iter().all(|r| r.truth == Some(8f64.ln())));
    }
}
