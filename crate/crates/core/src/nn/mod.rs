//! Minimal feedforward softmax classifier: dense ReLU layers, clipped
//! cross-entropy, ADAM, and a finite-difference gradient checker.

mod adam;
mod encode;
mod gradcheck;
mod model;
mod train;

pub use adam::{adam_step, AdamParams, AdamState};
pub use encode::EncodedBatch;
pub use gradcheck::{grad_check, relative_error, GradCheckReport, ParamCheck, FD_STEP};
pub use model::{ce_loss, ClassifierModel, Dense, Gradients};
pub use train::{train_classifier, TrainConfig, TrainOutcome};
