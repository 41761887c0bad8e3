use nalgebra::DMatrix;
use ndarray::Array2;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::discrete::DiscreteSample;
use crate::error::{Error, Result};
use crate::seed::derive_seed;

const MAX_MIXING_DRAWS: usize = 100;
const MIN_ABS_DET: f64 = 1e-9;

/// `d` independent pairs `(X_i, Y_i)` of unit-variance Gaussians with
/// correlation `rho`, each coordinate cut into equiprobable bins.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaussianPairSpec {
    pub dim: usize,
    pub rho: f64,
    pub bins_per_dim: usize,
    /// Inner cut points of the standard normal (`bins_per_dim - 1` values).
    pub quantile_edges: Vec<f64>,
}

/// Correlation that gives `mi` nats over `dim` pairs: `rho² = 1 - e^(-2 mi / dim)`.
pub fn rho_for_mi(mi: f64, dim: usize) -> f64 {
    (1.0 - (-2.0 * mi / dim as f64).exp()).sqrt()
}

fn standard_edges(bins: usize) -> Vec<f64> {
    let normal = Normal::standard();
    (1..bins)
        .map(|j| normal.inverse_cdf(j as f64 / bins as f64))
        .collect()
}

impl GaussianPairSpec {
    pub fn new(dim: usize, rho: f64, bins_per_dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("dimension must be positive"));
        }
        if !(rho.abs() < 1.0) {
            return Err(Error::param(format!("|rho| must be < 1, got {rho}")));
        }
        if bins_per_dim < 2 {
            return Err(Error::param("need at least 2 bins per dimension"));
        }
        Ok(Self {
            dim,
            rho,
            bins_per_dim,
            quantile_edges: standard_edges(bins_per_dim),
        })
    }

    pub fn for_mi(dim: usize, mi: f64, bins_per_dim: usize) -> Result<Self> {
        Self::new(dim, rho_for_mi(mi, dim), bins_per_dim)
    }

    /// Mutual information of the continuous pair, `-(d/2) ln(1 - rho²)`.
    pub fn true_mi(&self) -> f64 {
        -(self.dim as f64) / 2.0 * (1.0 - self.rho * self.rho).ln()
    }
}

// Integration range and Simpson intervals per bin for the quantized oracle.
const INTEGRATION_LIMIT: f64 = 10.0;
const SIMPSON_INTERVALS: usize = 2000;

/// Exact MI of one quantized coordinate pair, by Simpson integration of
/// `P(bin i, bin j) = ∫_{bin i} φ(x) [Φ((b_j - ρx)/s) - Φ((a_j - ρx)/s)] dx`.
/// Multiply by `dim` for the quantized vector.
pub fn quantized_pair_mi(rho: f64, bins: usize) -> Result<f64> {
    let spec = GaussianPairSpec::new(1, rho, bins)?;
    let normal = Normal::standard();
    let mut edges = vec![-INTEGRATION_LIMIT];
    edges.extend(spec.quantile_edges.iter().copied());
    edges.push(INTEGRATION_LIMIT);
    let s = (1.0 - rho * rho).sqrt();
    let density = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut mi = 0.0;
    for i in 0..bins {
        let (a, b) = (edges[i], edges[i + 1]);
        let h = (b - a) / SIMPSON_INTERVALS as f64;
        for j in 0..bins {
            let (c, d) = (edges[j], edges[j + 1]);
            let f = |x: f64| density(x) * (normal.cdf((d - rho * x) / s) - normal.cdf((c - rho * x) / s));
            let mut acc = f(a) + f(b);
            for k in 1..SIMPSON_INTERVALS {
                acc += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
            }
            let p = acc * h / 3.0;
            if p > 0.0 {
                mi += p * (p * (bins * bins) as f64).ln();
            }
        }
    }
    Ok(mi.max(0.0))
}

#[derive(Clone, Debug)]
pub struct GaussianPair {
    pub x: DiscreteSample,
    pub y: DiscreteSample,
    pub true_mi: f64,
}

/// Unquantized `n × d` draws of `X` and `Y`.
pub fn sample_gaussian_raw(spec: &GaussianPairSpec, n: usize, seed: u64) -> (Array2<f64>, Array2<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = (1.0 - spec.rho * spec.rho).sqrt();
    let mut x = Array2::zeros((n, spec.dim));
    let mut y = Array2::zeros((n, spec.dim));
    for i in 0..n {
        for j in 0..spec.dim {
            let a: f64 = StandardNormal.sample(&mut rng);
            let b: f64 = StandardNormal.sample(&mut rng);
            x[[i, j]] = a;
            y[[i, j]] = spec.rho * a + noise * b;
        }
    }
    (x, y)
}

/// Bin index of every entry: the number of column edges strictly below it.
pub fn quantize(values: &Array2<f64>, edges: &[Vec<f64>]) -> Result<DiscreteSample> {
    if edges.len() != values.ncols() {
        return Err(Error::shape("one edge list per column required"));
    }
    let mut data = Vec::with_capacity(values.len());
    for row in values.rows() {
        for (v, e) in row.iter().zip(edges) {
            data.push(e.partition_point(|&c| c < *v) as u32);
        }
    }
    DiscreteSample::new(data, edges.iter().map(|e| e.len() + 1).collect())
}

pub fn sample_gaussian_pair(spec: &GaussianPairSpec, n: usize, seed: u64) -> Result<GaussianPair> {
    if n == 0 {
        return Err(Error::Empty("sample size must be positive".into()));
    }
    let (x, y) = sample_gaussian_raw(spec, n, seed);
    let edges = vec![spec.quantile_edges.clone(); spec.dim];
    Ok(GaussianPair {
        x: quantize(&x, &edges)?,
        y: quantize(&y, &edges)?,
        true_mi: spec.true_mi(),
    })
}

/// Invertible map `y -> (W y)^3` with standard-normal `W`.
#[derive(Clone, Debug)]
pub struct CubicTransform {
    pub mixing: DMatrix<f64>,
}

impl CubicTransform {
    pub fn draw(dim: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..MAX_MIXING_DRAWS {
            let w = DMatrix::from_fn(dim, dim, |_, _| -> f64 { StandardNormal.sample(&mut rng) });
            if w.determinant().abs() > MIN_ABS_DET {
                return Ok(Self { mixing: w });
            }
        }
        Err(Error::Singular(MAX_MIXING_DRAWS))
    }

    /// Row-wise `(W y)^3`.
    pub fn apply(&self, y: &Array2<f64>) -> Result<Array2<f64>> {
        let d = self.mixing.nrows();
        if y.ncols() != d {
            return Err(Error::shape(format!("expected {d} columns, got {}", y.ncols())));
        }
        let mut out = Array2::zeros(y.raw_dim());
        for (i, row) in y.rows().into_iter().enumerate() {
            for r in 0..d {
                let s: f64 = (0..d).map(|c| self.mixing[(r, c)] * row[c]).sum();
                out[[i, r]] = s * s * s;
            }
        }
        Ok(out)
    }

    /// Row-wise `W⁻¹ cbrt(z)`.
    pub fn invert(&self, z: &Array2<f64>) -> Result<Array2<f64>> {
        let d = self.mixing.nrows();
        let inv = self
            .mixing
            .clone()
            .try_inverse()
            .ok_or(Error::Singular(1))?;
        let mut out = Array2::zeros(z.raw_dim());
        for (i, row) in z.rows().into_iter().enumerate() {
            for r in 0..d {
                out[[i, r]] = (0..d).map(|c| inv[(r, c)] * row[c].cbrt()).sum();
            }
        }
        Ok(out)
    }

    /// Equiprobable cut points of each output coordinate when the input
    /// is standard normal: `(W y)_j ~ N(0, |W_j|²)`, and cubing is monotone.
    pub fn output_edges(&self, standard_edges: &[f64]) -> Vec<Vec<f64>> {
        self.mixing
            .row_iter()
            .map(|row| {
                let scale = row.norm();
                standard_edges.iter().map(|&q| (scale * q).powi(3)).collect()
            })
            .collect()
    }
}

pub fn cubic_transform(y: &Array2<f64>, seed: u64) -> Result<(Array2<f64>, CubicTransform)> {
    let t = CubicTransform::draw(y.ncols(), seed)?;
    Ok((t.apply(y)?, t))
}

/// Same draw as [`sample_gaussian_pair`] with the same seed, `Y` replaced by
/// `(W Y)^3` before quantization. The true MI is unchanged.
pub fn sample_gaussian_pair_cubic(
    spec: &GaussianPairSpec,
    n: usize,
    seed: u64,
) -> Result<(GaussianPair, CubicTransform)> {
    if n == 0 {
        return Err(Error::Empty("sample size must be positive".into()));
    }
    let (x, y) = sample_gaussian_raw(spec, n, seed);
    let (z, t) = cubic_transform(&y, derive_seed(seed, 0xC0B1C))?;
    let x_edges = vec![spec.quantile_edges.clone(); spec.dim];
    let z_edges = t.output_edges(&spec.quantile_edges);
    Ok((
        GaussianPair {
            x: quantize(&x, &x_edges)?,
            y: quantize(&z, &z_edges)?,
            true_mi: spec.true_mi(),
        },
        t,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::{plugin_entropy, EmpiricalDistribution};
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn closed_form_mi() {
        assert_eq!(GaussianPairSpec::new(20, 0.0, 8).unwrap().true_mi(), 0.0);
        let rho = rho_for_mi(2.0, 20);
        assert_abs_diff_eq!(rho, (1.0 - (-0.2f64).exp()).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(rho, 0.4258, epsilon = 1e-4);
        let spec = GaussianPairSpec::for_mi(20, 2.0, 8).unwrap();
        assert_abs_diff_eq!(spec.true_mi(), 2.0, epsilon = 1e-12);
        let strong = GaussianPairSpec::new(20, 0.9, 8).unwrap();
        assert_abs_diff_eq!(strong.true_mi(), -10.0 * 0.19f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(strong.true_mi(), 16.61, epsilon = 1e-2);
    }

    #[test]
    fn quantized_oracle_matches_sampling() {
        assert_abs_diff_eq!(quantized_pair_mi(0.0, 8).unwrap(), 0.0, epsilon = 1e-9);
        let rho = 0.6;
        let exact = quantized_pair_mi(rho, 8).unwrap();
        assert!(exact < -0.5 * (1.0 - rho * rho).ln());
        let spec = GaussianPairSpec::new(1, rho, 8).unwrap();
        let pair = sample_gaussian_pair(&spec, 1_000_000, 21).unwrap();
        let joint: Vec<u32> = (0..pair.x.n_rows()).map(|i| pair.x.get(i, 0) * 8 + pair.y.get(i, 0)).collect();
        let h = |v: &[u32]| plugin_entropy(&EmpiricalDistribution::from_symbols(v).unwrap());
        let plugin = h(&pair.x.column(0)) + h(&pair.y.column(0)) - h(&joint);
        assert_abs_diff_eq!(exact, plugin, epsilon = 0.005);
    }

    #[test]
    fn spec_validation() {
        assert!(GaussianPairSpec::new(0, 0.5, 8).is_err());
        assert!(GaussianPairSpec::new(2, 1.0, 8).is_err());
        assert!(GaussianPairSpec::new(2, 0.5, 1).is_err());
    }

    #[test]
    fn quantized_coordinates_are_uniform() {
        let spec = GaussianPairSpec::new(3, 0.7, 8).unwrap();
        let n = 40_000;
        let pair = sample_gaussian_pair(&spec, n, 5).unwrap();
        // 3-sigma multinomial band around n/8
        let p = 1.0 / 8.0;
        let band = 3.0 * (n as f64 * p * (1.0 - p)).sqrt();
        for s in [&pair.x, &pair.y] {
            for m in 0..3 {
                let mut counts = [0usize; 8];
                for v in s.column(m) {
                    counts[v as usize] += 1;
                }
                for c in counts {
                    assert!((c as f64 - n as f64 * p).abs() <= band, "{counts:?}");
                }
            }
        }
    }

    #[test]
    fn cubic_identity_example() {
        let t = CubicTransform {
            mixing: DMatrix::identity(2, 2),
        };
        let z = t.apply(&array![[2.0, -1.0]]).unwrap();
        assert_eq!(z, array![[8.0, -1.0]]);
    }

    #[test]
    fn cubic_round_trip() {
        let spec = GaussianPairSpec::new(5, 0.3, 8).unwrap();
        let (_, y) = sample_gaussian_raw(&spec, 200, 1);
        let (z, t) = cubic_transform(&y, 2).unwrap();
        let back = t.invert(&z).unwrap();
        for (a, b) in back.iter().zip(y.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-6);
        }
    }

    #[test]
    fn cubic_pair_keeps_x_and_truth() {
        let spec = GaussianPairSpec::for_mi(4, 1.0, 8).unwrap();
        let plain = sample_gaussian_pair(&spec, 20_000, 3).unwrap();
        let (cubic, _) = sample_gaussian_pair_cubic(&spec, 20_000, 3).unwrap();
        assert_eq!(plain.x, cubic.x);
        assert_eq!(plain.true_mi, cubic.true_mi);
        // transformed coordinates are still equiprobable
        for m in 0..4 {
            let mut counts = [0usize; 8];
            for v in cubic.y.column(m) {
                counts[v as usize] += 1;
            }
            for c in counts {
                assert!((c as f64 - 2500.0).abs() < 3.0 * (20_000.0f64 * 0.125 * 0.875).sqrt());
            }
        }
    }

    #[test]
    fn mixing_before_quantization_loses_information() {
        // The cube is monotone, but the mixing matrix is not aligned with the
        // per-coordinate bins, so quantized Z carries less about X than quantized Y.
        let plugin_mi = |p: &GaussianPair| {
            let h = |s: &DiscreteSample| plugin_entropy(&EmpiricalDistribution::from_symbols(&s.joint_symbols()).unwrap());
            h(&p.x) + h(&p.y) - h(&p.x.hconcat(&p.y).unwrap())
        };
        let spec = GaussianPairSpec::for_mi(2, 0.4, 8).unwrap();
        let mut losses = Vec::new();
        for seed in 0..6 {
            let plain = plugin_mi(&sample_gaussian_pair(&spec, 500_000, seed).unwrap());
            let cubic = plugin_mi(&sample_gaussian_pair_cubic(&spec, 500_000, seed).unwrap().0);
            assert_abs_diff_eq!(plain, 2.0 * quantized_pair_mi(spec.rho, 8).unwrap(), epsilon = 0.01);
            assert!(cubic < plain + 0.003, "seed {seed}: cubic {cubic} plain {plain}");
            losses.push(plain - cubic);
        }
        let mean = losses.iter().sum::<f64>() / losses.len() as f64;
        assert!(mean > 0.02, "{losses:?}");
    }
}
