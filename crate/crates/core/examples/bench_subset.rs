//! Runs selected benchmark sections into a directory and prints each check.
//!
//! cargo run --release --example bench_subset -- [out_dir] [section,...]

use njee::harness::bench::{run_bench, BenchConfig, Section};
use njee::harness::manifest::RunContext;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().collect();
    let out = args.get(1).cloned().unwrap_or_else(|| "results/bench_subset".into());
    let sections = args.get(2).map(String::as_str).unwrap_or("gradcheck,cmi");

    let mut config = BenchConfig::new(7);
    config.only = sections.split(',').map(Section::parse).collect::<Result<_, _>>()?;
    std::fs::create_dir_all(&out)?;
    let ctx = RunContext::new(args.clone(), sections, config.seed)?;
    let report = run_bench(&config, out.as_ref(), &ctx)?;
    for c in &report.checks {
        let mark = if c.passed { "ok  " } else { "FAIL" };
        println!("{mark} {:>2} {:<34} {:.5} ({})", c.criterion, c.name, c.measured, c.bound);
    }
    for f in &report.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
