use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::discrete::DiscreteSample;
use crate::error::{Error, Result};

const MAX_CELLS: usize = 1 << 20;

/// Full joint probability array over a few small discrete axes, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct JointTable {
    shape: Vec<usize>,
    probs: Vec<f64>,
}

impl JointTable {
    pub fn new(shape: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        if shape.is_empty() || shape.contains(&0) {
            return Err(Error::param("table axes must be non-empty"));
        }
        let cells: usize = shape.iter().product();
        if cells > MAX_CELLS {
            return Err(Error::param(format!("{cells} cells exceeds the {MAX_CELLS} limit")));
        }
        if probs.len() != cells {
            return Err(Error::shape(format!("{} probabilities for {cells} cells", probs.len())));
        }
        if probs.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::param("probabilities must be nonnegative"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::param(format!("probabilities sum to {total}")));
        }
        Ok(Self { shape, probs })
    }

    /// Normalizes nonnegative weights into a table.
    pub fn from_weights(shape: Vec<usize>, weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::param("weights must have positive total"));
        }
        Self::new(shape, weights.into_iter().map(|w| w / total).collect())
    }

    /// Builds a table from a function of the cell index.
    pub fn from_fn(shape: Vec<usize>, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let cells: usize = shape.iter().product();
        let mut idx = vec![0usize; shape.len()];
        let mut w = Vec::with_capacity(cells);
        for _ in 0..cells {
            w.push(f(&idx));
            for a in (0..shape.len()).rev() {
                idx[a] += 1;
                if idx[a] < shape[a] {
                    break;
                }
                idx[a] = 0;
            }
        }
        Self::from_weights(shape, w)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        let flat = idx
            .iter()
            .zip(&self.shape)
            .fold(0, |acc, (&i, &s)| acc * s + i);
        self.probs[flat]
    }

    fn check_axes(&self, groups: &[&[usize]]) -> Result<()> {
        let mut seen = vec![false; self.shape.len()];
        for &axis in groups.iter().flat_map(|g| g.iter()) {
            if axis >= self.shape.len() {
                return Err(Error::param(format!("axis {axis} out of {}", self.shape.len())));
            }
            if seen[axis] {
                return Err(Error::param(format!("axis {axis} appears in more than one group")));
            }
            seen[axis] = true;
        }
        Ok(())
    }

    /// Marginal over `axes`, in the given order.
    pub fn marginal(&self, axes: &[usize]) -> Result<JointTable> {
        self.check_axes(&[axes])?;
        if axes.is_empty() {
            return JointTable::new(vec![1], vec![1.0]);
        }
        let out_shape: Vec<usize> = axes.iter().map(|&a| self.shape[a]).collect();
        let mut out = vec![0.0; out_shape.iter().product()];
        let mut idx = vec![0usize; self.shape.len()];
        for &p in &self.probs {
            let flat = axes
                .iter()
                .zip(&out_shape)
                .fold(0, |acc, (&a, &s)| acc * s + idx[a]);
            out[flat] += p;
            for a in (0..self.shape.len()).rev() {
                idx[a] += 1;
                if idx[a] < self.shape[a] {
                    break;
                }
                idx[a] = 0;
            }
        }
        Ok(JointTable {
            shape: out_shape,
            probs: out,
        })
    }

    /// Entropy of the marginal over `axes`.
    pub fn entropy(&self, axes: &[usize]) -> Result<f64> {
        Ok(super::entropy_of(&self.marginal(axes)?.probs))
    }

    /// `n` i.i.d. draws of the full cell index, one column per axis.
    pub fn sample(&self, n: usize, seed: u64) -> Result<DiscreteSample> {
        if n == 0 {
            return Err(Error::Empty("sample size must be positive".into()));
        }
        let mut cdf = Vec::with_capacity(self.probs.len());
        let mut acc = 0.0;
        for &p in &self.probs {
            acc += p;
            cdf.push(acc);
        }
        let last = cdf.len() - 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = self.shape.len();
        let mut data = vec![0u32; n * d];
        for row in data.chunks_exact_mut(d) {
            let u: f64 = rng.random::<f64>() * acc;
            let mut flat = cdf.partition_point(|&c| c <= u).min(last);
            for a in (0..d).rev() {
                row[a] = (flat % self.shape[a]) as u32;
                flat /= self.shape[a];
            }
        }
        DiscreteSample::new(data, self.shape.clone())
    }
}

pub fn oracle_entropy(table: &JointTable, axes: &[usize]) -> Result<f64> {
    table.entropy(axes)
}

/// `I(X; Y) = H(X) + H(Y) - H(X, Y)`.
pub fn oracle_mi(table: &JointTable, x_axes: &[usize], y_axes: &[usize]) -> Result<f64> {
    table.check_axes(&[x_axes, y_axes])?;
    let xy: Vec<usize> = x_axes.iter().chain(y_axes).copied().collect();
    let v = table.entropy(x_axes)? + table.entropy(y_axes)? - table.entropy(&xy)?;
    Ok(v.max(0.0))
}

/// `I(X; Y | Z) = H(X, Z) + H(Y, Z) - H(X, Y, Z) - H(Z)`.
pub fn oracle_cmi(
    table: &JointTable,
    x_axes: &[usize],
    y_axes: &[usize],
    z_axes: &[usize],
) -> Result<f64> {
    table.check_axes(&[x_axes, y_axes, z_axes])?;
    let join = |groups: &[&[usize]]| -> Vec<usize> { groups.iter().flat_map(|g| g.iter().copied()).collect() };
    let v = table.entropy(&join(&[x_axes, z_axes]))? + table.entropy(&join(&[y_axes, z_axes]))?
        - table.entropy(&join(&[x_axes, y_axes, z_axes]))?
        - table.entropy(z_axes)?;
    Ok(v.max(0.0))
}
