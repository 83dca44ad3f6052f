//! Runs every script in `scenarios/` under a handful of seeds and prints one
//! verdict per run.
//!
//! ```bash
//! cargo run -p greenhouse-link --example scenario_corpus
//! ```

use std::path::Path;

use greenhouse_link::simharness::{run, RunConfig, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let mut paths: Vec<_> = std::fs::read_dir(&dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "scn"))
        .collect();
    paths.sort();

    for path in paths {
        let scenario = Scenario::parse(&std::fs::read_to_string(&path)?)?;
        let name = path.file_stem().unwrap().to_string_lossy().into_owned();
        for seed in [1, 7, 42] {
            let cfg = RunConfig {
                seed,
                ..RunConfig::with_duration(35_000)
            };
            let report = run(scenario.clone(), cfg, &mut std::io::sink())?;
            println!(
                "{name:<18} seed={seed:<3} {} {}/{} expectations, {} frames rx, {} bytes rejected",
                if report.all_passed() { "PASS" } else { "FAIL" },
                report.passed(),
                report.expectations.len(),
                report.counters.frames_rx,
                report.counters.decode_rejected_bytes
            );
        }
    }
    Ok(())
}
