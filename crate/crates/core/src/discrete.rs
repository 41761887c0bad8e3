//! Discrete samples, base-b digit decomposition and the classical plug-in,
//! Miller-Madow and Chao-Shen entropy estimators.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `n × d` matrix of symbols, column `m` drawn from `{0, …, alphabet_sizes[m] - 1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscreteSample {
    data: Vec<u32>,
    n: usize,
    alphabet_sizes: Vec<usize>,
}

impl DiscreteSample {
    /// `data` is row-major with `alphabet_sizes.len()` columns.
    pub fn new(data: Vec<u32>, alphabet_sizes: Vec<usize>) -> Result<Self> {
        let d = alphabet_sizes.len();
        if d == 0 {
            return Err(Error::param("sample needs at least one column"));
        }
        if alphabet_sizes.contains(&0) {
            return Err(Error::param("alphabet sizes must be positive"));
        }
        if data.is_empty() || !data.len().is_multiple_of(d) {
            return Err(Error::shape(format!(
                "{} symbols do not form a non-empty {d}-column sample",
                data.len()
            )));
        }
        for row in data.chunks_exact(d) {
            for (&s, &a) in row.iter().zip(&alphabet_sizes) {
                if s as usize >= a {
                    return Err(Error::SymbolOutOfRange {
                        value: s as u64,
                        alphabet: a as u64,
                    });
                }
            }
        }
        Ok(Self {
            n: data.len() / d,
            data,
            alphabet_sizes,
        })
    }

    pub fn from_columns(columns: &[Vec<u32>], alphabet_sizes: Vec<usize>) -> Result<Self> {
        if columns.len() != alphabet_sizes.len() {
            return Err(Error::shape("one alphabet size per column required"));
        }
        let n = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::shape("columns have different lengths"));
        }
        let mut data = Vec::with_capacity(n * columns.len());
        for i in 0..n {
            data.extend(columns.iter().map(|c| c[i]));
        }
        Self::new(data, alphabet_sizes)
    }

    /// Single column with alphabet `max + 1`.
    pub fn from_symbols(values: &[u32]) -> Result<Self> {
        let a = values.iter().max().map_or(1, |&m| m as usize + 1);
        Self::new(values.to_vec(), vec![a])
    }

    pub fn n_rows(&self) -> usize {
        self.n
    }

    pub fn dims(&self) -> usize {
        self.alphabet_sizes.len()
    }

    pub fn alphabet_sizes(&self) -> &[usize] {
        &self.alphabet_sizes
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[u32] {
        let d = self.dims();
        &self.data[i * d..(i + 1) * d]
    }

    pub fn get(&self, i: usize, m: usize) -> u32 {
        self.data[i * self.dims() + m]
    }

    pub fn column(&self, m: usize) -> Vec<u32> {
        self.data.iter().skip(m).step_by(self.dims()).copied().collect()
    }

    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        if let Some(&bad) = cols.iter().find(|&&c| c >= self.dims()) {
            return Err(Error::shape(format!("column {bad} out of {}", self.dims())));
        }
        let mut data = Vec::with_capacity(self.n * cols.len());
        for i in 0..self.n {
            let row = self.row(i);
            data.extend(cols.iter().map(|&c| row[c]));
        }
        Self::new(data, cols.iter().map(|&c| self.alphabet_sizes[c]).collect())
    }

    /// Column-wise concatenation `[self | other]`.
    pub fn hconcat(&self, other: &DiscreteSample) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::shape(format!(
                "row counts differ: {} vs {}",
                self.n, other.n
            )));
        }
        let mut data = Vec::with_capacity(self.data.len() + other.data.len());
        for i in 0..self.n {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        let mut sizes = self.alphabet_sizes.clone();
        sizes.extend_from_slice(&other.alphabet_sizes);
        Self::new(data, sizes)
    }

    /// Mixed-radix index of each row, the first column most significant.
    pub fn joint_symbols(&self) -> Vec<u128> {
        (0..self.n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(&self.alphabet_sizes)
                    .fold(0u128, |acc, (&s, &a)| acc * a as u128 + s as u128)
            })
            .collect()
    }

    /// Row subset in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * self.dims());
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        Self {
            n: rows.len(),
            data,
            alphabet_sizes: self.alphabet_sizes.clone(),
        }
    }
}

/// Number of base-`base` digits needed for `alphabet_size` symbols (at least 1).
pub fn digits_needed(alphabet_size: u64, base: u32) -> usize {
    let mut d = 1;
    let mut cap = base as u128;
    while cap < alphabet_size as u128 {
        cap *= base as u128;
        d += 1;
    }
    d
}

/// Rewrites each value as its base-`base` digits, most significant first.
pub fn decompose(values: &[u64], alphabet_size: u64, base: u32) -> Result<DiscreteSample> {
    if base < 2 {
        return Err(Error::param("base must be at least 2"));
    }
    if alphabet_size == 0 {
        return Err(Error::param("alphabet size must be positive"));
    }
    let d = digits_needed(alphabet_size, base);
    let mut data = vec![0u32; values.len() * d];
    for (row, &v) in data.chunks_exact_mut(d).zip(values) {
        if v >= alphabet_size {
            return Err(Error::SymbolOutOfRange {
                value: v,
                alphabet: alphabet_size,
            });
        }
        let mut rest = v;
        for digit in row.iter_mut().rev() {
            *digit = (rest % base as u64) as u32;
            rest /= base as u64;
        }
    }
    DiscreteSample::new(data, vec![base as usize; d])
}

/// Inverse of [`decompose`].
pub fn compose(sample: &DiscreteSample, base: u32) -> Result<Vec<u64>> {
    if sample.alphabet_sizes().iter().any(|&a| a != base as usize) {
        return Err(Error::param(format!("every column must have alphabet {base}")));
    }
    Ok((0..sample.n_rows())
        .map(|i| {
            sample
                .row(i)
                .iter()
                .fold(0u64, |acc, &digit| acc * base as u64 + digit as u64)
        })
        .collect())
}

/// Symbol counts of a sample.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmpiricalDistribution {
    counts: BTreeMap<u128, u64>,
    total: u64,
}

impl EmpiricalDistribution {
    pub fn from_symbols<T: Into<u128> + Copy>(symbols: &[T]) -> Result<Self> {
        let mut counts = BTreeMap::new();
        for &s in symbols {
            *counts.entry(s.into()).or_insert(0) += 1;
        }
        Self::from_counts(counts)
    }

    pub fn from_counts(counts: BTreeMap<u128, u64>) -> Result<Self> {
        let counts: BTreeMap<u128, u64> = counts.into_iter().filter(|&(_, c)| c > 0).collect();
        let total = counts.values().sum();
        if total == 0 {
            return Err(Error::Empty("empirical distribution with no observations".into()));
        }
        Ok(Self { counts, total })
    }

    pub fn counts(&self) -> &BTreeMap<u128, u64> {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn support_size(&self) -> usize {
        self.counts.len()
    }

    pub fn singletons(&self) -> u64 {
        self.counts.values().filter(|&&c| c == 1).count() as u64
    }
}

pub fn plugin_entropy(dist: &EmpiricalDistribution) -> f64 {
    let n = dist.total() as f64;
    let h: f64 = dist
        .counts()
        .values()
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum();
    h.max(0.0)
}

pub fn miller_madow_entropy(dist: &EmpiricalDistribution) -> f64 {
    plugin_entropy(dist) + (dist.support_size() as f64 - 1.0) / (2.0 * dist.total() as f64)
}

/// Coverage-adjusted Horvitz-Thompson entropy.
pub fn chao_shen_entropy(dist: &EmpiricalDistribution) -> f64 {
    let n = dist.total();
    let mut f1 = dist.singletons();
    if f1 == n {
        f1 = n - 1;
    }
    let nf = n as f64;
    let coverage = 1.0 - f1 as f64 / nf;
    let h: f64 = dist
        .counts()
        .values()
        .map(|&c| {
            let pa = coverage * c as f64 / nf;
            if pa <= 0.0 {
                return 0.0;
            }
            let inclusion = 1.0 - (1.0 - pa).powf(nf);
            -pa * pa.ln() / inclusion
        })
        .sum();
    h.max(0.0)
}

/// Estimate of the first chain component's marginal entropy (Miller-Madow).
pub fn marginal_h1(column: &[u32]) -> Result<f64> {
    Ok(miller_madow_entropy(&EmpiricalDistribution::from_symbols(column)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Njee,
    Cnjee,
    Plugin,
    MillerMadow,
    ChaoShen,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Njee => "njee",
            Method::Cnjee => "cnjee",
            Method::Plugin => "plugin",
            Method::MillerMadow => "miller_madow",
            Method::ChaoShen => "chao_shen",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "njee" => Ok(Method::Njee),
            "cnjee" => Ok(Method::Cnjee),
            "plugin" => Ok(Method::Plugin),
            "miller_madow" | "mm" => Ok(Method::MillerMadow),
            "chao_shen" | "cs" => Ok(Method::ChaoShen),
            other => Err(Error::param(format!("unknown method '{other}'"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Training record of one chain term.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct TermDiagnostics {
    /// 0-based chain position.
    pub term: usize,
    /// False for the closed-form marginal term.
    pub classifier: bool,
    pub epochs_run: usize,
    pub best_epoch: usize,
    #[serde(skip)]
    pub history: Vec<f64>,
    #[serde(skip)]
    pub batch_losses: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyEstimate {
    pub value_nats: f64,
    pub component_terms: Vec<f64>,
    pub method: Method,
    pub diagnostics: Vec<TermDiagnostics>,
}

impl EntropyEstimate {
    /// Chain-rule estimate whose value is the sum of its terms.
    pub fn from_terms(method: Method, component_terms: Vec<f64>, diagnostics: Vec<TermDiagnostics>) -> Self {
        Self {
            value_nats: component_terms.iter().sum(),
            component_terms,
            method,
            diagnostics,
        }
    }

    pub fn baseline(method: Method, value: f64) -> Self {
        Self {
            value_nats: value,
            component_terms: vec![value],
            method,
            diagnostics: Vec::new(),
        }
    }

    pub fn classifiers_trained(&self) -> usize {
        self.diagnostics.iter().filter(|d| d.classifier).count()
    }

    pub fn value_bits(&self) -> f64 {
        self.value_nats / std::f64::consts::LN_2
    }
}

/// Classical estimate of the joint entropy of all columns treated as one symbol.
pub fn baseline_entropy(sample: &DiscreteSample, method: Method) -> Result<EntropyEstimate> {
    let dist = EmpiricalDistribution::from_symbols(&sample.joint_symbols())?;
    let value = match method {
        Method::Plugin => plugin_entropy(&dist),
        Method::MillerMadow => miller_madow_entropy(&dist),
        Method::ChaoShen => chao_shen_entropy(&dist),
        other => return Err(Error::param(format!("{other} is not a baseline estimator"))),
    };
    Ok(EntropyEstimate::baseline(method, value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dist(counts: &[u64]) -> EmpiricalDistribution {
        EmpiricalDistribution::from_counts(
            counts.iter().enumerate().map(|(i, &c)| (i as u128, c)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn decompose_examples() {
        let s = decompose(&[5], 16, 2).unwrap();
        assert_eq!(s.row(0), &[0, 1, 0, 1]);
        let s = decompose(&[0], 1000, 3).unwrap();
        assert!(s.row(0).iter().all(|&d| d == 0));
        assert_eq!(decompose(&[0], 100_000, 2).unwrap().dims(), 17);
        assert_eq!(decompose(&[0], 1, 2).unwrap().dims(), 1);
        assert!(matches!(
            decompose(&[16], 16, 2),
            Err(Error::SymbolOutOfRange { .. })
        ));
        assert!(decompose(&[1], 16, 1).is_err());
    }

    #[test]
    fn compose_examples() {
        let s = DiscreteSample::new(vec![0, 1, 0, 1, 0, 0, 0, 0], vec![2; 4]).unwrap();
        assert_eq!(compose(&s, 2).unwrap(), vec![5, 0]);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let values: Vec<u64> = (0..1000).map(|_| rng.random_range(0..100_000)).collect();
        let s = decompose(&values, 100_000, 2).unwrap();
        assert_eq!(compose(&s, 2).unwrap(), values);
    }

    #[test]
    fn round_trip_exhaustive_16_bits() {
        let values: Vec<u64> = (0..1u64 << 16).collect();
        for base in [2, 3] {
            let s = decompose(&values, 1 << 16, base).unwrap();
            assert_eq!(compose(&s, base).unwrap(), values);
        }
    }

    #[test]
    fn plugin_examples() {
        assert_abs_diff_eq!(plugin_entropy(&dist(&[2, 2])), 2f64.ln(), epsilon = 1e-12);
        assert_eq!(plugin_entropy(&dist(&[4])), 0.0);
        let expected = -(0.75f64 * 0.75f64.ln() + 0.25 * 0.25f64.ln());
        assert_abs_diff_eq!(plugin_entropy(&dist(&[3, 1])), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(plugin_entropy(&dist(&[3, 1])), 0.5623, epsilon = 1e-4);
    }

    #[test]
    fn miller_madow_examples() {
        assert_abs_diff_eq!(miller_madow_entropy(&dist(&[3, 1])), 0.5623 + 0.125, epsilon = 1e-4);
        assert_eq!(miller_madow_entropy(&dist(&[4])), 0.0);
        assert_abs_diff_eq!(miller_madow_entropy(&dist(&[1, 1])), 2f64.ln() + 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(miller_madow_entropy(&dist(&[1, 1])), 0.9431, epsilon = 1e-4);
    }

    #[test]
    fn chao_shen_examples() {
        // no singletons and large n: close to plug-in
        assert_abs_diff_eq!(chao_shen_entropy(&dist(&[500, 500])), 2f64.ln(), epsilon = 1e-3);

        // {3, 1}: f1 = 1, n = 4, coverage 3/4
        let pa = [0.75 * 0.75, 0.75 * 0.25];
        let expected: f64 = pa
            .iter()
            .map(|&p: &f64| -p * p.ln() / (1.0 - (1.0 - p).powi(4)))
            .sum();
        assert_abs_diff_eq!(chao_shen_entropy(&dist(&[3, 1])), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(chao_shen_entropy(&dist(&[3, 1])), 0.8922674, epsilon = 1e-6);

        // {1, 1}: all singletons, guard sets f1 = 1 so coverage 1/2
        let p: f64 = 0.25;
        let expected = 2.0 * (-p * p.ln()) / (1.0 - 0.75f64.powi(2));
        let h = chao_shen_entropy(&dist(&[1, 1]));
        assert!(h.is_finite());
        assert_abs_diff_eq!(h, expected, epsilon = 1e-12);
    }

    #[test]
    fn marginal_h1_examples() {
        assert_eq!(marginal_h1(&[1, 1, 1, 1]).unwrap(), 0.0);
        assert_abs_diff_eq!(marginal_h1(&[0, 0, 0, 1]).unwrap(), 0.6873, epsilon = 1e-4);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let col: Vec<u32> = (0..10_000).map(|_| rng.random_range(0..2)).collect();
        assert_abs_diff_eq!(marginal_h1(&col).unwrap(), 2f64.ln(), epsilon = 0.01);
        assert!(marginal_h1(&[]).is_err());
    }

    #[test]
    fn sample_validation_and_concat() {
        assert!(DiscreteSample::new(vec![0, 2], vec![2, 2]).is_err());
        assert!(DiscreteSample::new(vec![], vec![2]).is_err());
        let a = DiscreteSample::new(vec![0, 1, 1, 0], vec![2, 2]).unwrap();
        let b = DiscreteSample::new(vec![2, 0], vec![3]).unwrap();
        let c = a.hconcat(&b).unwrap();
        assert_eq!(c.row(0), &[0, 1, 2]);
        assert_eq!(c.column(2), vec![2, 0]);
        assert_eq!(c.alphabet_sizes(), &[2, 2, 3]);
        assert_eq!(c.joint_symbols(), vec![3 + 2, (2 * 3)]);
        assert!(a.hconcat(&DiscreteSample::new(vec![0], vec![1]).unwrap()).is_err());
    }

    proptest! {
        #[test]
        fn baseline_properties(counts in prop::collection::vec(1u64..50, 1..40)) {
            let d = dist(&counts);
            let plug = plugin_entropy(&d);
            let mm = miller_madow_entropy(&d);
            let cs = chao_shen_entropy(&d);
            prop_assert!(plug >= 0.0 && mm >= 0.0 && cs >= 0.0);
            prop_assert!(mm >= plug);
            prop_assert!(plug <= (d.support_size() as f64).ln() + 1e-12);
        }

        #[test]
        fn baselines_permutation_invariant(
            counts in prop::collection::vec(1u64..30, 2..20),
            shift in 1u128..1000,
        ) {
            let d = dist(&counts);
            // relabel: reverse order and offset every symbol
            let relabeled = EmpiricalDistribution::from_counts(
                counts.iter().rev().enumerate().map(|(i, &c)| (i as u128 * 7 + shift, c)).collect(),
            ).unwrap();
            prop_assert!((plugin_entropy(&d) - plugin_entropy(&relabeled)).abs() < 1e-12);
            prop_assert!((miller_madow_entropy(&d) - miller_madow_entropy(&relabeled)).abs() < 1e-12);
            prop_assert!((chao_shen_entropy(&d) - chao_shen_entropy(&relabeled)).abs() < 1e-12);
        }

        #[test]
        fn decompose_round_trip(values in prop::collection::vec(0u64..100_000, 1..50), base in 2u32..6) {
            let s = decompose(&values, 100_000, base).unwrap();
            prop_assert_eq!(compose(&s, base).unwrap(), values);
        }
    }
}
