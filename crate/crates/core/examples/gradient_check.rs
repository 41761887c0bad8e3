//! Backpropagated gradients of the softmax classifier against central
//! finite differences.

use njee::nn::{grad_check, ClassifierModel, EncodedBatch};

fn main() -> njee::Result<()> {
    // Two one-hot blocks of sizes 3 and 4, five rows, three classes.
    let symbols = [0, 1, 2, 3, 1, 0, 0, 2, 2, 3];
    let batch = EncodedBatch::new(vec![3, 4], &symbols, vec![0, 2, 1, 1, 0], 3)?;
    let model = ClassifierModel::new(&[batch.input_dim(), 6, 5, 3], 42)?;

    let report = grad_check(&model, &batch, 1e-7, 1e-4)?;
    println!(
        "{} parameters, max relative error {:.2e}, passed: {}",
        model.num_params(),
        report.max_rel_error,
        report.passed()
    );
    for c in report.flagged() {
        println!("  tensor {} index {}: {} vs {}", c.tensor, c.index, c.analytic, c.numeric);
    }
    Ok(())
}
