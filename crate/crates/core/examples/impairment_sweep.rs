//! Sweeps per-byte loss on the link and measures how often the slave's view
//! of each field goes stale over a minute of operation.
//!
//! ```bash
//! cargo run -p greenhouse-link --example impairment_sweep
//! ```

use greenhouse_link::simharness::{RunConfig, Scenario, Simulation};
use greenhouse_link::wireproto::FieldId;

fn main() {
    println!(
        "{:>6} {:>8} {:>8} {:>12}",
        "drop", "tx", "rx", "stale ticks"
    );
    for drop_prob in [0.0, 0.05, 0.1, 0.2, 0.3, 0.5] {
        let cfg = RunConfig {
            drop_prob,
            seed: 3,
            ..RunConfig::with_duration(60_000)
        };
        let mut sim = Simulation::new(Scenario::default(), cfg).unwrap();
        let mut sink = std::io::sink();
        let mut stale = 0u64;
        while sim.tick(&mut sink).unwrap() {
            // ignore the first cycle while the slave fills up
            if sim.now_ms().unwrap() > 1000 {
                stale += FieldId::ALL
                    .iter()
                    .filter(|&&f| sim.red().value(f).is_none())
                    .count() as u64;
            }
        }
        let c = sim.counters();
        println!(
            "{drop_prob:>6} {:>8} {:>8} {stale:>12}",
            c.frames_tx, c.frames_rx
        );
    }
}
