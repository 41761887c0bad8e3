//! Exact reference values behind the synthetic generators.

use njee::synth::{
    coupled_te_table, quantized_pair_mi, rho_for_mi, DistributionKind, DistributionSpec,
};

fn main() -> njee::Result<()> {
    let k = 1000;
    for kind in [
        DistributionKind::Uniform,
        DistributionKind::Zipf { alpha: 1.0 },
        DistributionKind::Geometric { p: 1e-2 },
        DistributionKind::ZipfGeometricMixture { alpha: 1.0, p: 1e-2 },
        DistributionKind::DiscreteLaplace { sigma: 100.0 },
    ] {
        let h = DistributionSpec::new(kind, k)?.exact_entropy()?;
        println!("{kind:?} k={k}: H = {h:.4} nats");
    }

    let dim = 20;
    for mi in [2.0, 4.0, 6.0] {
        let rho = rho_for_mi(mi, dim);
        let q = dim as f64 * quantized_pair_mi(rho, 8)?;
        println!("gaussian d={dim} I={mi}: rho = {rho:.4}, 8-bin quantized I = {q:.4}");
    }

    let t = coupled_te_table(2, 0.5)?;
    // Axes are (x_t, y_t, y_t+1).
    let te = t.entropy(&[1, 2])? - t.entropy(&[1])? - t.entropy(&[0, 1, 2])? + t.entropy(&[0, 1])?;
    println!("binary coupled process c=0.5: TE = {te:.4} nats");
    Ok(())
}
