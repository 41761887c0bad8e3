use chrono::NaiveDate;
use njee::synth::{coupled_process, coupled_process_schedule};
use njee::timeseries::{prices_from_symbols, rolling_te, BinnerSpec, RollingConfig, SeriesFrame};
use njee::TrainConfig;

fn start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2001, 1, 1).unwrap()
}

fn train() -> TrainConfig {
    TrainConfig {
        max_epochs: 20,
        patience: 3,
        holdout: 0.2,
        seed: 5,
        ..TrainConfig::default()
    }
}

fn frames(x: &[u32], y: &[u32]) -> (SeriesFrame, SeriesFrame) {
    (
        prices_from_symbols("x", start(), x).unwrap(),
        prices_from_symbols("y", start(), y).unwrap(),
    )
}

fn rolling(window: usize, stride: usize, retrain: bool) -> RollingConfig {
    RollingConfig {
        window,
        stride,
        k: 1,
        l: 1,
        binner: BinnerSpec::default(),
        retrain_per_window: retrain,
    }
}

#[test]
fn regime_shift_shows_in_later_windows() {
    let mut couplings = vec![0.0; 1500];
    couplings.extend(vec![1.0; 1500]);
    let s = coupled_process_schedule(3, &couplings, 9).unwrap();
    let (x, y) = frames(&s.x, &s.y);
    let rows = rolling_te(&x, &y, &rolling(500, 250, true), &train()).unwrap();
    let first = rows.first().unwrap().te_xy_nats;
    let last = rows.last().unwrap().te_xy_nats;
    assert!(first < 0.1, "uncoupled window {first}");
    assert!(last > 0.8, "copy window {last}");
}

#[test]
fn identical_series_are_symmetric() {
    let s = coupled_process(600, 3, 0.5, 2).unwrap();
    let (x, _) = frames(&s.x, &s.y);
    let rows = rolling_te(&x, &x, &rolling(200, 100, false), &train()).unwrap();
    for r in &rows {
        assert_eq!(r.te_xy_nats, r.te_yx_nats);
    }
}

#[test]
fn copy_process_flows_one_way() {
    let s = coupled_process(2000, 3, 1.0, 4).unwrap();
    let (x, y) = frames(&s.x, &s.y);
    let rows = rolling_te(&x, &y, &rolling(400, 400, false), &train()).unwrap();
    let mean = |f: fn(&njee::timeseries::TeRow) -> f64| rows.iter().map(f).sum::<f64>() / rows.len() as f64;
    let gap = mean(|r| r.te_xy_nats) - mean(|r| r.te_yx_nats);
    assert!(gap >= 0.8, "te_xy - te_yx = {gap}");
}
