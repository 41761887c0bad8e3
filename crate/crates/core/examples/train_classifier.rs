//! One NJEE chain term by hand: a classifier predicting `B` from `A` on a
//! known joint table. Its minimum cross-entropy approaches `H(B | A)`.

use njee::nn::{train_classifier, EncodedBatch};
use njee::synth::JointTable;
use njee::TrainConfig;

fn main() -> njee::Result<()> {
    let table = JointTable::from_fn(vec![4, 4], |ij| if ij[0] == ij[1] { 4.0 } else { 1.0 })?;
    let sample = table.sample(20_000, 3)?;
    let inputs = sample.column(0);
    let targets: Vec<usize> = sample.column(1).into_iter().map(|b| b as usize).collect();
    let batch = EncodedBatch::new(vec![4], &inputs, targets, 4)?;

    let outcome = train_classifier(
        &batch,
        &TrainConfig {
            max_epochs: 30,
            patience: 5,
            seed: 3,
            ..TrainConfig::default()
        },
    )?;
    let truth = table.entropy(&[0, 1])? - table.entropy(&[0])?;
    println!(
        "min CE {:.4} at epoch {} of {}, H(B|A) = {:.4}",
        outcome.min_ce, outcome.best_epoch, outcome.epochs_run, truth
    );
    Ok(())
}
