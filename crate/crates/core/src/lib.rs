//! # greenhouse-link
//!
//! Host-side model of a two-node environmental monitor. A master node samples
//! temperature, humidity, soil moisture, rain and obstacle distance, shows them
//! on its OLED and streams them, one field per frame, over a pair of HC-05
//! serial Bluetooth modules at 9600 baud. A slave node decodes the stream and
//! drives its own display, three soil-level LEDs and a rain buzzer.
//!
//! Everything runs on a deterministic 1 ms tick. Link loss and bit errors come
//! from a seeded generator, so a scenario, a seed and a set of link settings
//! always reproduce the same trace byte for byte.
//!
//! ## Modules
//!
//! - [`envmodel`]: ground-truth environment and sensor quantization
//! - [`wireproto`]: six-byte frame codec, resynchronizing decoder, field scheduler
//! - [`btlink`]: HC-05 AT commands, pairing, baud-limited impaired channel
//! - [`greennode`] / [`rednode`]: the two node state machines
//! - [`simharness`]: scenario language, tick loop, probes and reports
//!
//! ## Running examples
//!
//! ```bash
//! cargo run -p greenhouse-link --example rain_alert
//! cargo run -p greenhouse-link --bin simulate -- --scenario crates/core/scenarios/rain_alert.scn --duration-ms 15000
//! ```
//!
//! ```
//! use greenhouse_link::simharness::{run_to_string, RunConfig, Scenario};
//!
//! let scenario = Scenario::parse("at 0 set raining 1\nat 0 expect red.buzzer == 1 within 1500").unwrap();
//! let (report, trace) = run_to_string(scenario, RunConfig::with_duration(2000)).unwrap();
//! assert!(report.all_passed());
//! assert!(trace.contains("RED BUZZER on=1"));
//! ```

pub mod btlink;
pub mod display;
pub mod envmodel;
pub mod greennode;
pub mod rednode;
pub mod simharness;
pub mod trace;
pub mod wireproto;

pub use display::DisplayBuffer;
pub use envmodel::{EnvironmentState, SensorReadings};
pub use wireproto::{FieldId, Frame};
