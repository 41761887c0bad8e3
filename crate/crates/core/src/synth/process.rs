use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::table::{oracle_cmi, JointTable};
use crate::error::{Error, Result};

/// Source `x` i.i.d. uniform; target `y[t+1] = x[t]` with probability
/// `coupling`, otherwise a fresh uniform draw.
#[derive(Clone, Debug, PartialEq)]
pub struct CoupledSeries {
    pub x: Vec<u32>,
    pub y: Vec<u32>,
    pub alphabet: usize,
    /// `TE_{X→Y}` of the stationary process at the first step's coupling.
    pub true_te: f64,
}

/// Stationary joint of `(X_t, Y_t, Y_{t+1})`.
pub fn coupled_te_table(alphabet: usize, coupling: f64) -> Result<JointTable> {
    if alphabet < 2 {
        return Err(Error::param("alphabet must have at least 2 symbols"));
    }
    if !(0.0..=1.0).contains(&coupling) {
        return Err(Error::param(format!("coupling must be in [0, 1], got {coupling}")));
    }
    let a = alphabet as f64;
    JointTable::from_fn(vec![alphabet; 3], |i| {
        let (x, _y, next) = (i[0], i[1], i[2]);
        let p_next = coupling * (next == x) as u8 as f64 + (1.0 - coupling) / a;
        p_next / (a * a)
    })
}

/// Per-step couplings: `couplings[t]` governs `y[t+1]`. Series length is
/// `couplings.len() + 1`.
pub fn coupled_process_schedule(alphabet: usize, couplings: &[f64], seed: u64) -> Result<CoupledSeries> {
    let first = *couplings
        .first()
        .ok_or_else(|| Error::Empty("no coupling steps".into()))?;
    let true_te = oracle_cmi(&coupled_te_table(alphabet, first)?, &[0], &[2], &[1])?;
    for &c in couplings {
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::param(format!("coupling must be in [0, 1], got {c}")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = couplings.len() + 1;
    let a = alphabet as u32;
    let x: Vec<u32> = (0..n).map(|_| rng.random_range(0..a)).collect();
    let mut y = Vec::with_capacity(n);
    y.push(rng.random_range(0..a));
    for (t, &c) in couplings.iter().enumerate() {
        let copy = rng.random::<f64>() < c;
        let fresh = rng.random_range(0..a);
        y.push(if copy { x[t] } else { fresh });
    }
    Ok(CoupledSeries {
        x,
        y,
        alphabet,
        true_te,
    })
}

pub fn coupled_process(n: usize, alphabet: usize, coupling: f64, seed: u64) -> Result<CoupledSeries> {
    if n < 2 {
        return Err(Error::SeriesTooShort {
            required: 2,
            available: n,
        });
    }
    coupled_process_schedule(alphabet, &vec![coupling; n - 1], seed)
}

/// Binary coupled process.
pub fn coupled_markov(n: usize, coupling: f64, seed: u64) -> Result<CoupledSeries> {
    coupled_process(n, 2, coupling, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn te_endpoints() {
        assert_abs_diff_eq!(coupled_markov(10, 0.0, 1).unwrap().true_te, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(coupled_markov(10, 1.0, 1).unwrap().true_te, 2f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(coupled_process(10, 3, 1.0, 1).unwrap().true_te, 3f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn te_half_coupling_by_enumeration() {
        // P(next = x) = 3/4, independent of the target's own past
        let te = coupled_markov(10, 0.5, 1).unwrap().true_te;
        let h_cond = -(0.75f64 * 0.75f64.ln() + 0.25 * 0.25f64.ln());
        assert_abs_diff_eq!(te, 2f64.ln() - h_cond, epsilon = 1e-12);
        assert_abs_diff_eq!(te, 0.1308, epsilon = 1e-4);
    }

    #[test]
    fn copy_process_copies() {
        let s = coupled_process(1000, 3, 1.0, 4).unwrap();
        assert_eq!(s.x.len(), 1000);
        for t in 0..999 {
            assert_eq!(s.y[t + 1], s.x[t]);
        }
    }

    #[test]
    fn invalid_coupling() {
        assert!(coupled_markov(10, 1.5, 0).is_err());
        assert!(coupled_markov(1, 0.5, 0).is_err());
    }
}
