//! Scenario-driven simulation harness: parsing, the tick loop, probes and
//! expectation reports.

mod probe;
mod report;
mod scenario;
mod sim;

pub use probe::{Probe, ProbeValue};
pub use report::{Counters, ExpectationResult, SimReport};
pub use scenario::{
    parse_scenario, Action, CmpOp, Expectation, Expected, LinkAction, LinkParam, ParseError,
    Scenario, ScenarioEvent,
};
pub use sim::{run, run_to_string, RunConfig, SimError, Simulation, GREEN_ADDR, RED_ADDR};
