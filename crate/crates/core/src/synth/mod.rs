//! Synthetic generators with exact ground truth.

mod gaussian;
mod process;
mod table;
mod triplets;

pub use gaussian::{
    cubic_transform, quantize, quantized_pair_mi, rho_for_mi, sample_gaussian_pair, sample_gaussian_pair_cubic,
    sample_gaussian_raw, CubicTransform, GaussianPair, GaussianPairSpec,
};
pub use process::{coupled_markov, coupled_process, coupled_process_schedule, coupled_te_table, CoupledSeries};
pub use table::{oracle_cmi, oracle_entropy, oracle_mi, JointTable};
pub use triplets::{cit_corpus, draw_triplet, Triplet, TripletKind};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

// Discrete Laplace support is cut where the two-sided tail mass drops below this.
const LAPLACE_TAIL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistributionKind {
    Uniform,
    /// `p_i ∝ i^-alpha`, `i = 1..=k`.
    Zipf { alpha: f64 },
    /// `p_i ∝ (1-p)^i p`, `i = 0..k`, truncated and renormalized.
    Geometric { p: f64 },
    /// Equal-weight mixture of `Zipf(alpha)` and `Geometric(p)` on the same symbols.
    ZipfGeometricMixture { alpha: f64, p: f64 },
    /// Two-sided `p(x) ∝ exp(-|x|/sigma)` on the integers, symbols in zigzag
    /// order `0, -1, 1, -2, …`; the alphabet is set by tail truncation.
    DiscreteLaplace { sigma: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    pub kind: DistributionKind,
    /// Ignored for the discrete Laplace, whose support follows from `sigma`.
    pub alphabet_size: usize,
}

fn normalize(mut w: Vec<f64>) -> Vec<f64> {
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    w
}

fn zipf_pmf(alpha: f64, k: usize) -> Vec<f64> {
    normalize((1..=k).map(|i| (i as f64).powf(-alpha)).collect())
}

fn geometric_pmf(p: f64, k: usize) -> Vec<f64> {
    let ln_q = (1.0 - p).ln();
    normalize((0..k).map(|i| (i as f64 * ln_q).exp() * p).collect())
}

fn laplace_pmf(sigma: f64) -> Vec<f64> {
    let r = (-1.0 / sigma).exp();
    // two-sided tail beyond |x| > K is 2 r^(K+1) / (1 + r) of the total
    let k_max = if r <= 0.0 {
        0
    } else {
        let need = (LAPLACE_TAIL * (1.0 + r) / 2.0).ln() / r.ln();
        need.ceil().max(1.0) as usize
    };
    let mut w = Vec::with_capacity(2 * k_max + 1);
    w.push(1.0);
    for x in 1..=k_max {
        let v = (-(x as f64) / sigma).exp();
        w.push(v);
        w.push(v);
    }
    normalize(w)
}

impl DistributionSpec {
    pub fn new(kind: DistributionKind, alphabet_size: usize) -> Result<Self> {
        let spec = Self {
            kind,
            alphabet_size,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let check_alpha = |a: f64| {
            if a > 0.0 && a.is_finite() {
                Ok(())
            } else {
                Err(Error::param(format!("zipf alpha must be positive, got {a}")))
            }
        };
        let check_p = |p: f64| {
            if p > 0.0 && p < 1.0 {
                Ok(())
            } else {
                Err(Error::param(format!("geometric p must be in (0, 1), got {p}")))
            }
        };
        match self.kind {
            DistributionKind::Uniform => {}
            DistributionKind::Zipf { alpha } => check_alpha(alpha)?,
            DistributionKind::Geometric { p } => check_p(p)?,
            DistributionKind::ZipfGeometricMixture { alpha, p } => {
                check_alpha(alpha)?;
                check_p(p)?;
            }
            DistributionKind::DiscreteLaplace { sigma } => {
                if !(sigma > 0.0 && sigma.is_finite()) {
                    return Err(Error::param(format!("laplace sigma must be positive, got {sigma}")));
                }
                return Ok(());
            }
        }
        if self.alphabet_size == 0 {
            return Err(Error::param("alphabet size must be positive"));
        }
        Ok(())
    }

    /// Normalized probability mass function over `0..len`.
    pub fn pmf(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let k = self.alphabet_size;
        Ok(match self.kind {
            DistributionKind::Uniform => vec![1.0 / k as f64; k],
            DistributionKind::Zipf { alpha } => zipf_pmf(alpha, k),
            DistributionKind::Geometric { p } => geometric_pmf(p, k),
            DistributionKind::ZipfGeometricMixture { alpha, p } => zipf_pmf(alpha, k)
                .into_iter()
                .zip(geometric_pmf(p, k))
                .map(|(a, b)| 0.5 * a + 0.5 * b)
                .collect(),
            DistributionKind::DiscreteLaplace { sigma } => laplace_pmf(sigma),
        })
    }

    pub fn exact_entropy(&self) -> Result<f64> {
        Ok(entropy_of(&self.pmf()?))
    }
}

/// `-Σ p ln p` by direct summation.
pub fn entropy_of(pmf: &[f64]) -> f64 {
    pmf.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnivariateSample {
    pub symbols: Vec<u64>,
    pub alphabet_size: usize,
    pub exact_entropy: f64,
}

/// Draws `n` i.i.d. symbols by inverse-CDF lookup.
pub fn sample_univariate(spec: &DistributionSpec, n: usize, seed: u64) -> Result<UnivariateSample> {
    if n == 0 {
        return Err(Error::Empty("sample size must be positive".into()));
    }
    let pmf = spec.pmf()?;
    let mut cdf = Vec::with_capacity(pmf.len());
    let mut acc = 0.0;
    for &p in &pmf {
        acc += p;
        cdf.push(acc);
    }
    let last = pmf.len() - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let symbols = (0..n)
        .map(|_| {
            let u: f64 = rng.random::<f64>() * acc;
            cdf.partition_point(|&c| c <= u).min(last) as u64
        })
        .collect();
    Ok(UnivariateSample {
        symbols,
        alphabet_size: pmf.len(),
        exact_entropy: entropy_of(&pmf),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::{plugin_entropy, EmpiricalDistribution};
    use approx::assert_abs_diff_eq;

    #[test]
    fn uniform_entropy() {
        let s = DistributionSpec::new(DistributionKind::Uniform, 16).unwrap();
        assert_abs_diff_eq!(s.exact_entropy().unwrap(), 16f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn zipf_three_symbols() {
        let s = DistributionSpec::new(DistributionKind::Zipf { alpha: 1.0 }, 3).unwrap();
        let pmf = s.pmf().unwrap();
        let expected = [6.0 / 11.0, 3.0 / 11.0, 2.0 / 11.0];
        for (p, e) in pmf.iter().zip(expected) {
            assert_abs_diff_eq!(*p, e, epsilon = 1e-15);
        }
        let h: f64 = expected.iter().map(|p: &f64| -p * p.ln()).sum();
        assert_abs_diff_eq!(s.exact_entropy().unwrap(), h, epsilon = 1e-12);
    }

    #[test]
    fn geometric_half_matches_closed_form() {
        // H of geometric(1/2) is 2 ln 2
        let s = DistributionSpec::new(DistributionKind::Geometric { p: 0.5 }, 1 << 20).unwrap();
        assert_abs_diff_eq!(s.exact_entropy().unwrap(), 2.0 * 2f64.ln(), epsilon = 1e-6);
    }

    #[test]
    fn invalid_parameters() {
        assert!(DistributionSpec::new(DistributionKind::Zipf { alpha: 0.0 }, 10).is_err());
        assert!(DistributionSpec::new(DistributionKind::Geometric { p: 1.0 }, 10).is_err());
        assert!(DistributionSpec::new(DistributionKind::Geometric { p: 0.0 }, 10).is_err());
        assert!(DistributionSpec::new(DistributionKind::DiscreteLaplace { sigma: -1.0 }, 10).is_err());
        assert!(DistributionSpec::new(DistributionKind::Uniform, 0).is_err());
    }

    #[test]
    fn every_kind_is_normalized() {
        let kinds = [
            DistributionKind::Uniform,
            DistributionKind::Zipf { alpha: 1.0 },
            DistributionKind::Zipf { alpha: 2.0 },
            DistributionKind::Geometric { p: 1e-5 },
            DistributionKind::ZipfGeometricMixture { alpha: 1.0, p: 2e-5 },
            DistributionKind::DiscreteLaplace { sigma: 50.0 },
        ];
        for kind in kinds {
            let pmf = DistributionSpec::new(kind, 100_000).unwrap().pmf().unwrap();
            assert!(pmf.iter().all(|&p| p >= 0.0));
            assert_abs_diff_eq!(pmf.iter().sum::<f64>(), 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn laplace_truncation_keeps_tail_small() {
        let sigma = 20.0;
        let pmf = DistributionSpec::new(DistributionKind::DiscreteLaplace { sigma }, 0)
            .unwrap()
            .pmf()
            .unwrap();
        // untruncated entropy of the two-sided geometric with ratio r
        let r: f64 = (-1.0 / sigma).exp();
        let z = (1.0 + r) / (1.0 - r);
        let mean_abs = 2.0 * r / ((1.0 - r) * (1.0 - r)) / z;
        let exact = z.ln() + mean_abs / sigma;
        assert_abs_diff_eq!(entropy_of(&pmf), exact, epsilon = 1e-9);
        // degenerate scale collapses onto one symbol
        let tiny = DistributionSpec::new(DistributionKind::DiscreteLaplace { sigma: 1e-4 }, 0)
            .unwrap()
            .pmf()
            .unwrap();
        assert_eq!(tiny.len(), 1);
    }

    #[test]
    fn empirical_entropy_converges() {
        let kinds = [
            DistributionKind::Uniform,
            DistributionKind::Zipf { alpha: 1.0 },
            DistributionKind::Geometric { p: 0.01 },
            DistributionKind::ZipfGeometricMixture { alpha: 1.0, p: 0.02 },
            DistributionKind::DiscreteLaplace { sigma: 30.0 },
        ];
        for (i, kind) in kinds.into_iter().enumerate() {
            let spec = DistributionSpec::new(kind, 1000).unwrap();
            let s = sample_univariate(&spec, 1_000_000, i as u64).unwrap();
            assert!(s.symbols.iter().all(|&v| (v as usize) < s.alphabet_size));
            let d = EmpiricalDistribution::from_symbols(&s.symbols).unwrap();
            assert_abs_diff_eq!(plugin_entropy(&d), s.exact_entropy, epsilon = 0.01);
        }
    }

    #[test]
    fn sampling_is_seeded() {
        let spec = DistributionSpec::new(DistributionKind::Zipf { alpha: 2.0 }, 100).unwrap();
        let a = sample_univariate(&spec, 50, 9).unwrap();
        let b = sample_univariate(&spec, 50, 9).unwrap();
        let c = sample_univariate(&spec, 50, 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.symbols, c.symbols);
        assert!(sample_univariate(&spec, 0, 1).is_err());
    }
}
