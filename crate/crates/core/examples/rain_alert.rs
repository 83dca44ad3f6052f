//! The headline behavior end to end: rain starts at the master, the slave's
//! buzzer sounds. Prints the trace around the alert and the run summary.
//!
//! ```bash
//! cargo run -p greenhouse-link --example rain_alert
//! ```

use greenhouse_link::simharness::{run_to_string, RunConfig, Scenario};

const SCRIPT: &str = "\
at 5000 set raining 1
at 5000 expect red.buzzer == 1 within 1500
at 9000 set raining 0
at 9000 expect red.buzzer == 0 within 1500
";

fn main() {
    let scenario = Scenario::parse(SCRIPT).expect("valid scenario");
    let cfg = RunConfig {
        snapshot_every_ms: Some(5000),
        ..RunConfig::with_duration(12_000)
    };
    let (report, trace) = run_to_string(scenario, cfg).expect("in-memory trace");

    for line in trace.lines() {
        let interesting = ["SAMPLE", "BUZZER", "DISPLAY", "field=3", "CONNECT"]
            .iter()
            .any(|k| line.contains(k));
        if interesting && !line.contains("SAMPLE temp=25 hum=50 soil=2048 rain=0") {
            println!("{line}");
        }
    }
    println!();
    print!("{}", report.summary());
}
