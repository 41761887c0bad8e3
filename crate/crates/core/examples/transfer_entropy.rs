//! Rolling transfer entropy between two synthetic price series where `x`
//! drives `y`. The flow should show up as `te_xy` well above `te_yx`.
//!
//! cargo run --release --example transfer_entropy -- [n] [coupling]

use chrono::NaiveDate;
use njee::synth::coupled_process;
use njee::timeseries::{prices_from_symbols, rolling_te, BinnerSpec, RollingConfig};
use njee::TrainConfig;

fn main() -> njee::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().and_then(|s| s.parse().ok()).unwrap_or(3_000);
    let coupling: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0.8);

    let series = coupled_process(n, 3, coupling, 11)?;
    let start = NaiveDate::from_ymd_opt(2010, 1, 4).unwrap();
    let x = prices_from_symbols("x", start, &series.x)?;
    let y = prices_from_symbols("y", start, &series.y)?;

    let rolling = RollingConfig {
        window: 500,
        stride: 250,
        k: 1,
        l: 1,
        binner: BinnerSpec::default(),
        retrain_per_window: false,
    };
    let config = TrainConfig {
        max_epochs: 20,
        patience: 3,
        holdout: 0.2,
        seed: 11,
        ..TrainConfig::default()
    };
    let rows = rolling_te(&x, &y, &rolling, &config)?;
    println!("true TE x->y {:.4} nats", series.true_te);
    for r in &rows {
        println!("{}  te_xy {:.4}  te_yx {:.4}", r.timestamp, r.te_xy_nats, r.te_yx_nats);
    }
    Ok(())
}
