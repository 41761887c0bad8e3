use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use super::table::{oracle_cmi, JointTable};
use crate::discrete::DiscreteSample;
use crate::error::{Error, Result};
use crate::seed::derive_seed;

const X_SIZE: usize = 2;
const Y_SIZE: usize = 2;
const Z_SIZE: usize = 3;
// Dependent triplets are redrawn until their CMI reaches this many nats.
const MIN_DEPENDENT_CMI: f64 = 0.05;
const DIRICHLET_CONCENTRATION: f64 = 0.5;

/// Small Bayesian-network shapes over `(X, Y, Z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TripletKind {
    /// `Y → Z → X`; `X ⊥ Y | Z`.
    Chain,
    /// `X ← Z → Y`; `X ⊥ Y | Z`.
    Fork,
    /// `Y → X ← Z`.
    Collider,
    /// `Z → Y → X` plus `Z → X`.
    Direct,
}

impl TripletKind {
    pub fn conditionally_independent(self) -> bool {
        matches!(self, TripletKind::Chain | TripletKind::Fork)
    }

    pub fn name(self) -> &'static str {
        match self {
            TripletKind::Chain => "chain",
            TripletKind::Fork => "fork",
            TripletKind::Collider => "collider",
            TripletKind::Direct => "direct",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        [TripletKind::Chain, TripletKind::Fork, TripletKind::Collider, TripletKind::Direct]
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::param(format!("unknown triplet kind {s:?}")))
    }
}

#[derive(Clone, Debug)]
pub struct Triplet {
    pub kind: TripletKind,
    /// Axes are `[x, y, z]`.
    pub table: JointTable,
    pub true_cmi: f64,
    pub x: DiscreteSample,
    pub y: DiscreteSample,
    pub z: DiscreteSample,
}

impl Triplet {
    pub fn dependent(&self) -> bool {
        !self.kind.conditionally_independent()
    }
}

fn dirichlet(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let gamma = Gamma::new(DIRICHLET_CONCENTRATION, 1.0).expect("valid gamma");
    let w: Vec<f64> = (0..k).map(|_| gamma.sample(rng) + 1e-9).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|v| v / total).collect()
}

/// Conditional probability table: one distribution over `k` symbols per parent configuration.
fn cpt(rng: &mut ChaCha8Rng, parents: usize, k: usize) -> Vec<Vec<f64>> {
    (0..parents).map(|_| dirichlet(rng, k)).collect()
}

fn draw_table(kind: TripletKind, rng: &mut ChaCha8Rng) -> Result<JointTable> {
    let shape = vec![X_SIZE, Y_SIZE, Z_SIZE];
    match kind {
        TripletKind::Chain => {
            let py = dirichlet(rng, Y_SIZE);
            let pz_y = cpt(rng, Y_SIZE, Z_SIZE);
            let px_z = cpt(rng, Z_SIZE, X_SIZE);
            JointTable::from_fn(shape, |i| py[i[1]] * pz_y[i[1]][i[2]] * px_z[i[2]][i[0]])
        }
        TripletKind::Fork => {
            let pz = dirichlet(rng, Z_SIZE);
            let px_z = cpt(rng, Z_SIZE, X_SIZE);
            let py_z = cpt(rng, Z_SIZE, Y_SIZE);
            JointTable::from_fn(shape, |i| pz[i[2]] * px_z[i[2]][i[0]] * py_z[i[2]][i[1]])
        }
        TripletKind::Collider => {
            let py = dirichlet(rng, Y_SIZE);
            let pz = dirichlet(rng, Z_SIZE);
            let px_yz = cpt(rng, Y_SIZE * Z_SIZE, X_SIZE);
            JointTable::from_fn(shape, |i| py[i[1]] * pz[i[2]] * px_yz[i[1] * Z_SIZE + i[2]][i[0]])
        }
        TripletKind::Direct => {
            let pz = dirichlet(rng, Z_SIZE);
            let py_z = cpt(rng, Z_SIZE, Y_SIZE);
            let px_yz = cpt(rng, Y_SIZE * Z_SIZE, X_SIZE);
            JointTable::from_fn(shape, |i| {
                pz[i[2]] * py_z[i[2]][i[1]] * px_yz[i[1] * Z_SIZE + i[2]][i[0]]
            })
        }
    }
}

/// One triplet of the given shape with random tables and `n_samples` draws.
/// Dependent shapes are redrawn until their CMI is at least 0.05 nats.
pub fn draw_triplet(kind: TripletKind, n_samples: usize, seed: u64) -> Result<Triplet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut attempt = 0;
    let (table, true_cmi) = loop {
        let table = draw_table(kind, &mut rng)?;
        let cmi = oracle_cmi(&table, &[0], &[1], &[2])?;
        if kind.conditionally_independent() || cmi >= MIN_DEPENDENT_CMI {
            break (table, cmi);
        }
        attempt += 1;
        if attempt > 10_000 {
            return Err(Error::param("could not draw a sufficiently dependent triplet"));
        }
    };
    let sample = table.sample(n_samples, rng.random())?;
    Ok(Triplet {
        kind,
        true_cmi,
        x: sample.select_columns(&[0])?,
        y: sample.select_columns(&[1])?,
        z: sample.select_columns(&[2])?,
        table,
    })
}

/// Labeled corpus for conditional-independence testing: `n_dependent`
/// colliders/direct-effect triplets and `n_independent` chains/forks, each
/// with its own random tables and `n_samples` draws.
pub fn cit_corpus(
    n_dependent: usize,
    n_independent: usize,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<Triplet>> {
    let alternate = |i: usize, a, b| if i.is_multiple_of(2) { a } else { b };
    let kinds = (0..n_dependent)
        .map(|i| alternate(i, TripletKind::Collider, TripletKind::Direct))
        .chain((0..n_independent).map(|i| alternate(i, TripletKind::Chain, TripletKind::Fork)));
    kinds
        .enumerate()
        .map(|(idx, kind)| draw_triplet(kind, n_samples, derive_seed(seed, idx as u64)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_labels_match_oracle() {
        let corpus = cit_corpus(6, 6, 100, 3).unwrap();
        assert_eq!(corpus.len(), 12);
        assert_eq!(corpus.iter().filter(|t| t.dependent()).count(), 6);
        for t in &corpus {
            if t.dependent() {
                assert!(t.true_cmi >= MIN_DEPENDENT_CMI);
            } else {
                assert!(t.true_cmi < 1e-10, "{:?} {}", t.kind, t.true_cmi);
            }
            assert_eq!(t.x.n_rows(), 100);
            assert_eq!(t.z.alphabet_sizes(), &[Z_SIZE]);
        }
    }

    #[test]
    fn corpus_is_seeded() {
        let a = cit_corpus(2, 2, 50, 9).unwrap();
        let b = cit_corpus(2, 2, 50, 9).unwrap();
        for (s, t) in a.iter().zip(&b) {
            assert_eq!(s.x, t.x);
            assert_eq!(s.table, t.table);
        }
    }
}
