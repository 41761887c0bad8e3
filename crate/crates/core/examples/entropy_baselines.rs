//! Entropy of a large-alphabet Zipf sample: plug-in, Miller-Madow,
//! Chao-Shen and NJEE against the exact value.
//!
//! cargo run --release --example entropy_baselines -- [alpha] [k] [n]

use njee::discrete::{chao_shen_entropy, decompose, miller_madow_entropy, plugin_entropy};
use njee::synth::{sample_univariate, DistributionKind, DistributionSpec};
use njee::{njee, EmpiricalDistribution, TrainConfig};

fn main() -> njee::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let alpha: f64 = args.first().and_then(|s| s.parse().ok()).unwrap_or(2.0);
    let k: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(10_000);
    let n: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1_000);

    let spec = DistributionSpec::new(DistributionKind::Zipf { alpha }, k)?;
    let sample = sample_univariate(&spec, n, 1)?;
    let counts = EmpiricalDistribution::from_symbols(&sample.symbols)?;
    println!("zipf alpha={alpha} k={k} n={n}, {} distinct symbols seen", counts.support_size());
    println!("{:>14}  {:.4}", "exact", sample.exact_entropy);
    println!("{:>14}  {:.4}", "plugin", plugin_entropy(&counts));
    println!("{:>14}  {:.4}", "miller_madow", miller_madow_entropy(&counts));
    println!("{:>14}  {:.4}", "chao_shen", chao_shen_entropy(&counts));

    // NJEE sees each symbol as its binary digits.
    let digits = decompose(&sample.symbols, k as u64, 2)?;
    let config = TrainConfig {
        max_epochs: 20,
        patience: 3,
        seed: 1,
        ..TrainConfig::default()
    };
    let h = njee(&digits, &config)?;
    println!("{:>14}  {:.4}  ({} classifiers)", "njee", h.value_nats, h.classifiers_trained());
    Ok(())
}
