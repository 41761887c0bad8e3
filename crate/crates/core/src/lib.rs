//! Neural joint-entropy estimation.
//!
//! The joint entropy of a discrete vector is split by the chain rule into a
//! marginal term for the first component and one conditional term per
//! remaining component. Each conditional term is estimated by the minimum
//! cross-entropy of a small softmax classifier trained to predict the
//! component from its prefix ([`estimators::njee`]). Conditioning on an
//! external variable turns every term into a classifier
//! ([`estimators::cnjee`]); differences of the two give mutual information,
//! conditional mutual information and transfer entropy.
//!
//! All quantities are in nats.

pub mod discrete;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod nn;
pub mod seed;
pub mod synth;
pub mod timeseries;

pub use discrete::{DiscreteSample, EmpiricalDistribution, EntropyEstimate, Method};
pub use error::{Error, Result};
pub use estimators::{cmi, cnjee, mi, njee, CmiEstimate, MiEstimate};
pub use nn::TrainConfig;
