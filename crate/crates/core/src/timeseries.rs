//! Transfer entropy between two series: percent returns, ternary binning,
//! lag embedding and windowed estimates.
//!
//! `TE_{X→Y}` is the conditional mutual information between the last `k`
//! source symbols and the next target symbol given the last `l` target
//! symbols, estimated as `H(Y_{t+1} | Y_past) - H(Y_{t+1} | Y_past, X_past)`
//! with one classifier on each side.

use std::collections::HashMap;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discrete::DiscreteSample;
use crate::error::{Error, Result};
use crate::estimators::{cmi, ChainSpec, CmiEstimate};
use crate::nn::TrainConfig;
use crate::seed::derive_seed;

/// Dated observations of one series.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesFrame {
    pub name: String,
    timestamps: Vec<NaiveDate>,
    values: Vec<f64>,
}

impl SeriesFrame {
    pub fn new(name: impl Into<String>, timestamps: Vec<NaiveDate>, values: Vec<f64>) -> Result<Self> {
        if timestamps.len() != values.len() {
            return Err(Error::shape("timestamps and values differ in length"));
        }
        if timestamps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param("timestamps must be strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("series contains non-finite values"));
        }
        Ok(Self {
            name: name.into(),
            timestamps,
            values,
        })
    }

    /// Consecutive days starting at `start`.
    pub fn daily(name: impl Into<String>, start: NaiveDate, values: Vec<f64>) -> Result<Self> {
        let timestamps = start.iter_days().take(values.len()).collect();
        Self::new(name, timestamps, values)
    }

    pub fn timestamps(&self) -> &[NaiveDate] {
        &self.timestamps
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Restricts two frames to their shared timestamps.
pub fn inner_join(a: &SeriesFrame, b: &SeriesFrame) -> Result<(SeriesFrame, SeriesFrame)> {
    let index: HashMap<NaiveDate, usize> = b.timestamps.iter().enumerate().map(|(i, &t)| (t, i)).collect();
    let (mut ts, mut va, mut vb) = (Vec::new(), Vec::new(), Vec::new());
    for (i, t) in a.timestamps.iter().enumerate() {
        if let Some(&j) = index.get(t) {
            ts.push(*t);
            va.push(a.values[i]);
            vb.push(b.values[j]);
        }
    }
    Ok((
        SeriesFrame::new(a.name.clone(), ts.clone(), va)?,
        SeriesFrame::new(b.name.clone(), ts, vb)?,
    ))
}

/// Percent change `100 (v_t - v_{t-1}) / v_{t-1}`.
pub fn to_returns(frame: &SeriesFrame) -> Result<Vec<f64>> {
    if frame.len() < 2 {
        return Err(Error::SeriesTooShort {
            required: 2,
            available: frame.len(),
        });
    }
    if let Some(v) = frame.values.iter().find(|&&v| v <= 0.0) {
        return Err(Error::param(format!("price {v} is not positive")));
    }
    Ok(frame
        .values
        .windows(2)
        .map(|w| 100.0 * (w[1] - w[0]) / w[0])
        .collect())
}

/// Three-level binning of percent returns.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinnerSpec {
    pub lower_threshold: f64,
    pub upper_threshold: f64,
}

impl Default for BinnerSpec {
    fn default() -> Self {
        Self {
            lower_threshold: -0.8,
            upper_threshold: 0.8,
        }
    }
}

/// `r < lower → -1`, `r > upper → +1`, otherwise 0 (the thresholds themselves map to 0).
pub fn ternary_bin(returns: &[f64], spec: &BinnerSpec) -> Result<Vec<i8>> {
    if !(spec.lower_threshold < spec.upper_threshold) {
        return Err(Error::param("lower threshold must be below upper threshold"));
    }
    returns
        .iter()
        .map(|&r| {
            if !r.is_finite() {
                Err(Error::param("non-finite return"))
            } else if r < spec.lower_threshold {
                Ok(-1)
            } else if r > spec.upper_threshold {
                Ok(1)
            } else {
                Ok(0)
            }
        })
        .collect()
}

/// `{-1, 0, +1}` as `{0, 1, 2}`.
pub fn ternary_symbols(levels: &[i8]) -> Vec<u32> {
    levels.iter().map(|&v| (v + 1) as u32).collect()
}

/// Aligned rows `(x_{t-k+1..=t}, y_{t-l+1..=t}, y_{t+1})`.
#[derive(Clone, Debug, PartialEq)]
pub struct LagEmbedding {
    pub k: usize,
    pub l: usize,
    pub alphabet: usize,
    /// Index `t + 1` in the input series of each row's target.
    pub target_index: Vec<usize>,
    pub source_past: DiscreteSample,
    pub target_past: DiscreteSample,
    pub target_next: DiscreteSample,
}

impl LagEmbedding {
    pub fn len(&self) -> usize {
        self.target_index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.target_index.is_empty()
    }

    pub fn select_rows(&self, rows: &[usize]) -> LagEmbedding {
        LagEmbedding {
            k: self.k,
            l: self.l,
            alphabet: self.alphabet,
            target_index: rows.iter().map(|&r| self.target_index[r]).collect(),
            source_past: self.source_past.select_rows(rows),
            target_past: self.target_past.select_rows(rows),
            target_next: self.target_next.select_rows(rows),
        }
    }
}

pub fn embed(x: &[u32], y: &[u32], k: usize, l: usize, alphabet: usize) -> Result<LagEmbedding> {
    if x.len() != y.len() {
        return Err(Error::shape("source and target lengths differ"));
    }
    if k == 0 || l == 0 {
        return Err(Error::param("lags must be positive"));
    }
    let lag = k.max(l);
    if x.len() < lag + 1 {
        return Err(Error::SeriesTooShort {
            required: lag + 1,
            available: x.len(),
        });
    }
    let rows = x.len() - lag;
    let (mut src, mut tgt, mut next, mut idx) = (
        Vec::with_capacity(rows * k),
        Vec::with_capacity(rows * l),
        Vec::with_capacity(rows),
        Vec::with_capacity(rows),
    );
    for t in (lag - 1)..(x.len() - 1) {
        src.extend_from_slice(&x[t + 1 - k..=t]);
        tgt.extend_from_slice(&y[t + 1 - l..=t]);
        next.push(y[t + 1]);
        idx.push(t + 1);
    }
    Ok(LagEmbedding {
        k,
        l,
        alphabet,
        target_index: idx,
        source_past: DiscreteSample::new(src, vec![alphabet; k])?,
        target_past: DiscreteSample::new(tgt, vec![alphabet; l])?,
        target_next: DiscreteSample::new(next, vec![alphabet])?,
    })
}

/// `TE_{X→Y} = H(Y_{t+1} | Y_past) - H(Y_{t+1} | X_past, Y_past)`.
pub fn transfer_entropy(embedding: &LagEmbedding, config: &TrainConfig) -> Result<CmiEstimate> {
    if embedding.is_empty() {
        return Err(Error::Empty("embedding has no rows".into()));
    }
    cmi(
        &embedding.target_next,
        &embedding.source_past,
        &embedding.target_past,
        config,
    )
}

/// Per-row `ln q(y | y_past, x_past) - ln q(y | y_past)` from two classifiers
/// fitted on the whole embedding; its mean over any window is that window's
/// cross-entropy difference.
pub fn pointwise_te(embedding: &LagEmbedding, config: &TrainConfig) -> Result<Vec<f64>> {
    if embedding.is_empty() {
        return Err(Error::Empty("embedding has no rows".into()));
    }
    let joint_past = embedding.source_past.hconcat(&embedding.target_past)?;
    let restricted = ChainSpec::new(&embedding.target_next, Some(&embedding.target_past), config)?;
    let full = ChainSpec::new(&embedding.target_next, Some(&joint_past), config)?;
    let nll = |spec: &ChainSpec| -> Result<Vec<f64>> {
        let model = spec.train_term(0)?.model;
        model.pointwise_nll(&spec.term_batch(0)?, config.prob_floor)
    };
    let (r, f) = rayon::join(|| nll(&restricted), || nll(&full));
    Ok(r?.into_iter().zip(f?).map(|(a, b)| a - b).collect())
}

/// Daily prices whose percent returns are `symbol - 1` percent, so default
/// ternary binning recovers `symbols` exactly.
pub fn prices_from_symbols(name: impl Into<String>, start: NaiveDate, symbols: &[u32]) -> Result<SeriesFrame> {
    let mut prices = Vec::with_capacity(symbols.len() + 1);
    prices.push(100.0);
    for &s in symbols {
        if s > 2 {
            return Err(Error::SymbolOutOfRange {
                value: s as u64,
                alphabet: 3,
            });
        }
        let last = *prices.last().expect("non-empty");
        prices.push(last * (1.0 + (s as f64 - 1.0) / 100.0));
    }
    SeriesFrame::daily(name, start, prices)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RollingConfig {
    pub window: usize,
    pub stride: usize,
    pub k: usize,
    pub l: usize,
    pub binner: BinnerSpec,
    pub retrain_per_window: bool,
}

impl Default for RollingConfig {
    fn default() -> Self {
        Self {
            window: 30,
            stride: 1,
            k: 5,
            l: 5,
            binner: BinnerSpec::default(),
            retrain_per_window: false,
        }
    }
}

/// One output row of [`rolling_te`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TeRow {
    pub timestamp: NaiveDate,
    pub te_xy_nats: f64,
    pub te_yx_nats: f64,
    pub te_xy_smoothed: f64,
    pub te_yx_smoothed: f64,
}

/// Mean of the last `window` values at each position (fewer at the start).
pub fn trailing_mean(values: &[f64], window: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut sum = 0.0;
    for i in 0..values.len() {
        sum += values[i];
        if i >= window {
            sum -= values[i - window];
        }
        out.push(sum / (i + 1).min(window) as f64);
    }
    out
}

/// Windowed transfer entropy in both directions between two price series.
///
/// Prices are joined on timestamp, turned into percent returns and binned.
/// Windows of `window` embedded rows advance by `stride`; each row is stamped
/// with the date of the last target in its window. Values are unclamped.
pub fn rolling_te(
    x: &SeriesFrame,
    y: &SeriesFrame,
    rolling: &RollingConfig,
    config: &TrainConfig,
) -> Result<Vec<TeRow>> {
    if rolling.window == 0 || rolling.stride == 0 {
        return Err(Error::param("window and stride must be positive"));
    }
    let (x, y) = inner_join(x, y)?;
    let lag = rolling.k.max(rolling.l);
    let required = rolling.window + lag + 1;
    if x.len() < required {
        return Err(Error::SeriesTooShort {
            required,
            available: x.len(),
        });
    }
    let sx = ternary_symbols(&ternary_bin(&to_returns(&x)?, &rolling.binner)?);
    let sy = ternary_symbols(&ternary_bin(&to_returns(&y)?, &rolling.binner)?);
    let xy = embed(&sx, &sy, rolling.k, rolling.l, 3)?;
    let yx = embed(&sy, &sx, rolling.k, rolling.l, 3)?;
    let starts: Vec<usize> = (0..=xy.len() - rolling.window).step_by(rolling.stride).collect();

    let (te_xy, te_yx): (Vec<f64>, Vec<f64>) = if rolling.retrain_per_window {
        starts
            .par_iter()
            .enumerate()
            .map(|(w, &s)| -> Result<(f64, f64)> {
                let rows: Vec<usize> = (s..s + rolling.window).collect();
                let cfg = config.clone().with_seed(derive_seed(config.seed, w as u64));
                let a = transfer_entropy(&xy.select_rows(&rows), &cfg)?.value_nats;
                let b = transfer_entropy(&yx.select_rows(&rows), &cfg)?.value_nats;
                Ok((a, b))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .unzip()
    } else {
        let (pa, pb) = rayon::join(|| pointwise_te(&xy, config), || pointwise_te(&yx, config));
        let (pa, pb) = (pa?, pb?);
        let mean = |v: &[f64], s: usize| v[s..s + rolling.window].iter().sum::<f64>() / rolling.window as f64;
        starts.iter().map(|&s| (mean(&pa, s), mean(&pb, s))).unzip()
    };

    // row r of either embedding has its target at return r + lag, i.e. price r + lag + 1
    let stamp = |s: usize| x.timestamps()[xy.target_index[s + rolling.window - 1] + 1];
    let smooth_xy = trailing_mean(&te_xy, rolling.window);
    let smooth_yx = trailing_mean(&te_yx, rolling.window);
    Ok(starts
        .iter()
        .enumerate()
        .map(|(w, &s)| TeRow {
            timestamp: stamp(s),
            te_xy_nats: te_xy[w],
            te_yx_nats: te_yx[w],
            te_xy_smoothed: smooth_xy[w],
            te_yx_smoothed: smooth_yx[w],
        })
        .collect())
}
