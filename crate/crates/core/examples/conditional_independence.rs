//! Conditional mutual information on small Bayesian networks, scored
//! against the exact value from the generating table.
//!
//! cargo run --release --example conditional_independence -- [n]

use njee::synth::{draw_triplet, TripletKind};
use njee::{cmi, TrainConfig};

fn main() -> njee::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5_000);
    let config = TrainConfig {
        max_epochs: 20,
        patience: 3,
        holdout: 0.2,
        ..TrainConfig::default()
    };
    println!("{:>9} {:>12} {:>10} {:>10}", "kind", "independent", "truth", "estimate");
    for (seed, kind) in [TripletKind::Chain, TripletKind::Fork, TripletKind::Collider, TripletKind::Direct]
        .into_iter()
        .enumerate()
    {
        let t = draw_triplet(kind, n, seed as u64)?;
        let est = cmi(&t.x, &t.y, &t.z, &config.clone().with_seed(seed as u64))?;
        println!(
            "{:>9} {:>12} {:>10.4} {:>10.4}",
            kind.name(),
            kind.conditionally_independent(),
            t.true_cmi,
            est.value_nats
        );
    }
    Ok(())
}
