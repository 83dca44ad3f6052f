//! Walks the environment through a few states and prints what each sensor
//! reads and what the master's display would show.
//!
//! ```bash
//! cargo run -p greenhouse-link --example sensor_models
//! ```

use greenhouse_link::envmodel::{echo_to_cm, EnvironmentState};
use greenhouse_link::greennode::render_master_display;

fn main() {
    let states = [
        ("defaults", EnvironmentState::default()),
        (
            "humid afternoon",
            EnvironmentState {
                temperature_c: 25.4,
                humidity_pct: 60.6,
                obstacle_distance_cm: 10.0,
                ..Default::default()
            },
        ),
        (
            "frost, dry soil",
            EnvironmentState {
                temperature_c: -5.0,
                humidity_pct: 10.0,
                soil_moisture_frac: 0.0,
                ..Default::default()
            },
        ),
        (
            "storm, gate blocked",
            EnvironmentState {
                raining: true,
                soil_moisture_frac: 1.0,
                obstacle_distance_cm: 0.5,
                ..Default::default()
            },
        ),
        (
            "nothing in range",
            EnvironmentState {
                obstacle_distance_cm: 1000.0,
                ..Default::default()
            },
        ),
    ];

    for (name, env) in states {
        let r = env.sample();
        println!("{name}:");
        println!(
            "  dht11 {}C {}%  soil {} counts  rain {}  echo {} us ({} tenths cm)",
            r.temp_c_int,
            r.hum_pct_int,
            r.soil_counts,
            r.rain_digital,
            r.echo_us,
            echo_to_cm(r.echo_us)
        );
        for line in render_master_display(&r).lines() {
            println!("  | {line:<21} |");
        }
    }
}
