//! Driving the full verification pipeline from library code.
//!
//! Builds a configuration programmatically (the CLI reads the same
//! structure from a file), runs the experiment, and evaluates every check
//! group over the recorded series: conservation laws, the virial identity,
//! decay-rate fits, the deviation limit, and the forward/pulled-back
//! distance comparison.
//!
//! ```bash
//! cargo run --release --example verify_suite
//! ```

use nlslab::config::ExperimentConfig;
use nlslab::verifier::run_suite;

fn main() -> nlslab::Result<()> {
    let mut cfg = ExperimentConfig::default();
    cfg.grid.half_length = 120.0;
    cfg.grid.points = 4096;
    cfg.init.amp_re = 0.4;
    cfg.dt = 0.005;
    cfg.t_end = 5.0;
    cfg.snapshot_stride = 25;
    cfg.output.directory = std::env::temp_dir()
        .join("nlslab_verify_suite")
        .display()
        .to_string();

    println!("configuration under test:\n{}", cfg.to_text());
    let suite = run_suite(&cfg)?;
    print!("{}", suite.to_text());

    let (pass, fail, inconclusive) = suite.counts();
    assert_eq!(fail, 0, "a default desk-scale run must not fail checks");
    println!("\n{pass} passed, {fail} failed, {inconclusive} inconclusive");
    Ok(())
}
