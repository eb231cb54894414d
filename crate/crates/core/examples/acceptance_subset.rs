//! Runs a few acceptance criteria and prints the report as JSON.

use ballneedlets::acceptance::{run, Criterion};
use ballneedlets::config::RunConfig;

fn main() -> ballneedlets::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.apply_str("seed = 11\ntol.metric = 1e-12")?;
    let report = run(&cfg, &[Criterion::Orthonormality, Criterion::Metric, Criterion::Partition])?;
    for c in &report.criteria {
        println!("{}", c.line());
    }
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
