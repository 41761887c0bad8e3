//! NJEE mutual information on quantized correlated Gaussians.
//!
//! cargo run --release --example gaussian_mi -- [mi] [dim] [n] [epochs]

use std::time::Instant;

use njee::synth::{sample_gaussian_pair, GaussianPairSpec};
use njee::{mi, TrainConfig};

fn main() -> njee::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: f64| args.get(i).and_then(|s| s.parse().ok()).unwrap_or(default);
    let (level, dim, n, epochs) = (arg(0, 2.0), arg(1, 5.0) as usize, arg(2, 20_000.0) as usize, arg(3, 5.0) as usize);

    let spec = GaussianPairSpec::for_mi(dim, level, 8)?;
    let pair = sample_gaussian_pair(&spec, n, 7)?;
    let config = TrainConfig {
        max_epochs: epochs,
        patience: epochs.min(2),
        seed: 7,
        ..TrainConfig::default()
    };
    let start = Instant::now();
    let est = mi(&pair.x, &pair.y, &config)?;
    println!(
        "true {:.3}  estimate {:.3}  H(X) {:.3}  H(X|Y) {:.3}  [{:.1}s]",
        pair.true_mi,
        est.value_nats,
        est.h_x.value_nats,
        est.h_x_given_y.value_nats,
        start.elapsed().as_secs_f64()
    );
    Ok(())
}
