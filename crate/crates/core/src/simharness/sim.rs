use std::io::{self, Write};

use crate::btlink::{
    try_connect, BtAddr, Channel, Direction, Hc05, Hc05Config, LinkImpairments, Mode, Role,
    DEFAULT_BAUD,
};
use crate::greennode::{MasterNode, GREEN_PIN_MAP};
use crate::rednode::{SlaveNode, RED_PIN_MAP};
use crate::trace::{EventKind, Source, TraceEvent};
use crate::wireproto::FieldId;

use super::probe::{Probe, ProbeValue};
use super::report::{Counters, ExpectationResult, SimReport};
use super::scenario::{Action, Expectation, LinkAction, LinkParam, Scenario};

pub const GREEN_ADDR: BtAddr = BtAddr::new(0x98d3_3130_a1b2);
pub const RED_ADDR: BtAddr = BtAddr::new(0x98d3_3130_c3d4);

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub duration_ms: u64,
    pub seed: u64,
    pub baud: u32,
    pub latency_ms: u64,
    pub drop_prob: f64,
    pub bit_error_prob: f64,
    /// Start with both modules already configured and paired.
    pub skip_config: bool,
    /// Emit both displays every this many ms.
    pub snapshot_every_ms: Option<u64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            duration_ms: 10_000,
            seed: 1,
            baud: DEFAULT_BAUD,
            latency_ms: 0,
            drop_prob: 0.0,
            bit_error_prob: 0.0,
            skip_config: false,
            snapshot_every_ms: None,
        }
    }
}

impl RunConfig {
    pub fn with_duration(duration_ms: u64) -> Self {
        Self {
            duration_ms,
            ..Self::default()
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("invalid run configuration: {0}")]
    Config(String),
    #[error("trace output failed: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone)]
struct PendingExpectation {
    line: usize,
    at_ms: u64,
    window_end: u64,
    expectation: Expectation,
    result: Option<(bool, u64, String)>,
    last_observed: Option<(u64, String)>,
}

/// Deterministic 1 ms-tick simulation of the master, the slave and the link
/// between them.
///
/// Per tick, in order: scenario link events, environment, master step, link
/// delivery into the slave, slave step, snapshots, expectations.
pub struct Simulation {
    scenario: Scenario,
    cfg: RunConfig,
    green_bt: Hc05,
    red_bt: Hc05,
    channel: Channel,
    green: MasterNode,
    red: SlaveNode,
    next_event: usize,
    expectations: Vec<PendingExpectation>,
    now_ms: Option<u64>,
    connected_at_start: bool,
    warnings: Vec<String>,
    configured: bool,
}

impl Simulation {
    pub fn new(scenario: Scenario, cfg: RunConfig) -> Result<Self, SimError> {
        if cfg.duration_ms == 0 {
            return Err(SimError::Config("duration must be positive".into()));
        }
        if cfg.baud == 0 {
            return Err(SimError::Config("baud must be positive".into()));
        }
        if let Some(0) = cfg.snapshot_every_ms {
            return Err(SimError::Config(
                "snapshot interval must be positive".into(),
            ));
        }
        let impairments = LinkImpairments {
            latency_ms: cfg.latency_ms,
            drop_prob: cfg.drop_prob,
            bit_error_prob: cfg.bit_error_prob,
            connected: false,
        };
        impairments
            .validate()
            .map_err(|e| SimError::Config(e.to_string()))?;

        let expectations = scenario
            .expectations()
            .map(|(ev, x)| PendingExpectation {
                line: ev.line,
                at_ms: ev.at_ms,
                window_end: ev.at_ms + x.within_ms.unwrap_or(0),
                expectation: x.clone(),
                result: None,
                last_observed: None,
            })
            .collect();

        Ok(Self {
            green_bt: Hc05::new(Hc05Config::factory(GREEN_ADDR)),
            red_bt: Hc05::new(Hc05Config::factory(RED_ADDR)),
            channel: Channel::new(cfg.baud, impairments, cfg.seed),
            green: MasterNode::default(),
            red: SlaveNode::default(),
            next_event: 0,
            expectations,
            now_ms: None,
            connected_at_start: false,
            warnings: Vec::new(),
            configured: false,
            scenario,
            cfg,
        })
    }

    pub fn green(&self) -> &MasterNode {
        &self.green
    }

    pub fn red(&self) -> &SlaveNode {
        &self.red
    }

    pub fn channel(&self) -> &Channel {
        &self.channel
    }

    pub fn channel_mut(&mut self) -> &mut Channel {
        &mut self.channel
    }

    pub fn modules(&self) -> (&Hc05, &Hc05) {
        (&self.green_bt, &self.red_bt)
    }

    /// Last completed tick.
    pub fn now_ms(&self) -> Option<u64> {
        self.now_ms
    }

    pub fn is_finished(&self) -> bool {
        self.now_ms.is_some_and(|t| t >= self.cfg.duration_ms)
    }

    fn emit(out: &mut dyn Write, ev: &TraceEvent) -> io::Result<()> {
        writeln!(out, "{ev}")
    }

    /// Pairing phase: configures both modules over AT commands (or installs the
    /// final configuration directly with `skip_config`) and connects them.
    pub fn configure(&mut self, out: &mut dyn Write) -> Result<(), SimError> {
        if self.configured {
            return Ok(());
        }
        self.configured = true;
        Self::emit(
            out,
            &TraceEvent::new(0, Source::Green, EventKind::PinMap(GREEN_PIN_MAP)),
        )?;
        Self::emit(
            out,
            &TraceEvent::new(0, Source::Red, EventKind::PinMap(RED_PIN_MAP)),
        )?;

        if self.cfg.skip_config {
            self.green_bt = Hc05::new(Hc05Config {
                role: Role::Master,
                baud: self.cfg.baud,
                bound_addr: Some(RED_ADDR),
                own_addr: GREEN_ADDR,
                mode: Mode::DataMode,
            });
            self.red_bt = Hc05::new(Hc05Config {
                role: Role::Slave,
                baud: self.cfg.baud,
                bound_addr: None,
                own_addr: RED_ADDR,
                mode: Mode::DataMode,
            });
        } else {
            let uart = format!("AT+UART={},0,0", self.cfg.baud);
            let bind = format!("AT+BIND={}", RED_ADDR.to_string().replace(':', ","));
            let green_cmds = ["AT", "AT+ROLE=1", uart.as_str(), bind.as_str(), "AT+ROLE?"];
            let red_cmds = ["AT", "AT+ROLE=0", uart.as_str(), "AT+ROLE?"];
            for (module, bt, cmds) in [
                ("green", &mut self.green_bt, &green_cmds[..]),
                ("red", &mut self.red_bt, &red_cmds[..]),
            ] {
                bt.enter_at_mode();
                for cmd in cmds {
                    let resp = bt.at_command(cmd);
                    let ev = EventKind::At {
                        module,
                        cmd: cmd.to_string(),
                        resp,
                    };
                    Self::emit(out, &TraceEvent::new(0, Source::Link, ev))?;
                }
                bt.enter_data_mode();
                let ev = EventKind::Mode { module, data: true };
                Self::emit(out, &TraceEvent::new(0, Source::Link, ev))?;
            }
            if self.green_bt.config().baud != self.cfg.baud {
                self.warnings.push(format!(
                    "module rejected baud {}; still at {}",
                    self.cfg.baud,
                    self.green_bt.config().baud
                ));
            }
        }

        let ok = try_connect(self.green_bt.config(), self.red_bt.config())
            && self.green_bt.config().baud == self.channel.baud();
        self.channel.set_connected(ok);
        self.connected_at_start = ok;
        Self::emit(
            out,
            &TraceEvent::new(0, Source::Link, EventKind::Connect(ok)),
        )?;
        let remedy = self
            .scenario
            .events()
            .iter()
            .any(|e| e.action == Action::Link(LinkAction::Connect));
        if !ok && !remedy {
            self.warnings
                .push("modules failed to pair and the scenario never reconnects".into());
        }
        Ok(())
    }

    fn apply_link(
        &mut self,
        action: LinkAction,
        t: u64,
        out: &mut dyn Write,
    ) -> Result<(), SimError> {
        let ev = match action {
            LinkAction::Connect => {
                let ok = try_connect(self.green_bt.config(), self.red_bt.config())
                    && self.green_bt.config().baud == self.channel.baud();
                self.channel.set_connected(ok);
                EventKind::Connect(ok)
            }
            LinkAction::Disconnect => {
                self.channel.set_connected(false);
                EventKind::Disconnect
            }
            LinkAction::Set(param, value) => {
                let mut imp = *self.channel.impairments();
                match param {
                    LinkParam::LatencyMs => imp.latency_ms = value as u64,
                    LinkParam::DropProb => imp.drop_prob = value,
                    LinkParam::BitErrorProb => imp.bit_error_prob = value,
                }
                self.channel
                    .set_impairments(imp)
                    .map_err(|e| SimError::Config(e.to_string()))?;
                EventKind::Param {
                    name: param.name(),
                    value: if param == LinkParam::LatencyMs {
                        imp.latency_ms.to_string()
                    } else {
                        value.to_string()
                    },
                }
            }
        };
        Self::emit(out, &TraceEvent::new(t, Source::Link, ev))?;
        self.flush_link_events(t, out)?;
        Ok(())
    }

    fn flush_link_events(&mut self, t: u64, out: &mut dyn Write) -> io::Result<()> {
        for ev in self.channel.take_events() {
            Self::emit(out, &TraceEvent::new(t, Source::Link, EventKind::Link(ev)))?;
        }
        Ok(())
    }

    /// Advances one millisecond. Returns `false` once the run is complete.
    pub fn tick(&mut self, out: &mut dyn Write) -> Result<bool, SimError> {
        if !self.configured {
            self.configure(out)?;
        }
        let t = match self.now_ms {
            None => 0,
            Some(prev) if prev >= self.cfg.duration_ms => return Ok(false),
            Some(prev) => prev + 1,
        };

        while let Some(ev) = self.scenario.events().get(self.next_event) {
            if ev.at_ms > t {
                break;
            }
            self.next_event += 1;
            if let Action::Link(action) = ev.action {
                self.apply_link(action, t, out)?;
            }
        }

        let env = self.scenario.timeline().env_at(t);
        for ev in self.green.step(&env, &mut self.channel, t) {
            Self::emit(out, &ev)?;
        }
        self.flush_link_events(t, out)?;

        let delivered = self.channel.poll_receive(Direction::MasterToSlave, t);
        for ev in self.red.step(&delivered, t) {
            Self::emit(out, &ev)?;
        }

        if let Some(every) = self.cfg.snapshot_every_ms {
            if t % every == 0 {
                let g = EventKind::Display(self.green.display().clone());
                Self::emit(out, &TraceEvent::new(t, Source::Green, g))?;
                let r = EventKind::Display(self.red.display().clone());
                Self::emit(out, &TraceEvent::new(t, Source::Red, r))?;
            }
        }

        self.evaluate_expectations(t);
        self.now_ms = Some(t);
        Ok(t < self.cfg.duration_ms)
    }

    /// Ticks until `t_ms` has been simulated (capped at the run duration).
    pub fn run_until(&mut self, t_ms: u64, out: &mut dyn Write) -> Result<(), SimError> {
        while self.now_ms.is_none_or(|now| now < t_ms) {
            if !self.tick(out)? {
                break;
            }
        }
        Ok(())
    }

    pub fn probe(&self, probe: Probe) -> ProbeValue {
        let num = |v: Option<i16>, scale: f64| {
            v.map_or(ProbeValue::Absent, |v| {
                ProbeValue::Number(f64::from(v) / scale)
            })
        };
        let m2s = self.channel.stats(Direction::MasterToSlave);
        match probe {
            Probe::GreenDisplayLine(n) => {
                ProbeValue::Text(self.green.display().line(usize::from(n - 1)).to_string())
            }
            Probe::RedDisplayLine(n) => {
                ProbeValue::Text(self.red.display().line(usize::from(n - 1)).to_string())
            }
            Probe::GreenTxFrames => ProbeValue::Number(self.green.tx_frames() as f64),
            Probe::RedTemp => num(self.red.value(FieldId::Temperature), 10.0),
            Probe::RedHum => num(self.red.value(FieldId::Humidity), 10.0),
            Probe::RedSoil => num(self.red.value(FieldId::SoilCounts), 1.0),
            Probe::RedRain => num(self.red.value(FieldId::Rain), 1.0),
            Probe::RedDist => num(self.red.value(FieldId::DistanceTenthsCm), 10.0),
            Probe::RedLeds => ProbeValue::Number(f64::from(self.red.leds())),
            Probe::RedBuzzer => ProbeValue::Number(f64::from(u8::from(self.red.buzzer()))),
            Probe::LinkDeliveredBytes => ProbeValue::Number(m2s.delivered_bytes as f64),
            Probe::LinkDroppedBytes => {
                ProbeValue::Number((m2s.dropped_bytes + m2s.discarded_bytes) as f64)
            }
        }
    }

    fn evaluate_expectations(&mut self, t: u64) {
        let mut pending = std::mem::take(&mut self.expectations);
        for x in pending.iter_mut() {
            if x.result.is_some() || t < x.at_ms || t > x.window_end {
                continue;
            }
            let value = self.probe(x.expectation.probe);
            let observed = value.to_string();
            if value.satisfies(x.expectation.op, &x.expectation.expected) {
                x.result = Some((true, t, observed));
            } else if t == x.window_end {
                x.result = Some((false, t, observed));
            } else {
                x.last_observed = Some((t, observed));
            }
        }
        self.expectations = pending;
    }

    pub fn counters(&self) -> Counters {
        let m2s = self.channel.stats(Direction::MasterToSlave);
        Counters {
            frames_tx: self.green.tx_frames(),
            frames_rx: self.red.rx_frames(),
            link_sent_bytes: m2s.sent_bytes,
            link_delivered_bytes: m2s.delivered_bytes,
            link_dropped_bytes: m2s.dropped_bytes,
            link_corrupted_bytes: m2s.corrupted_bytes,
            link_discarded_bytes: m2s.discarded_bytes,
            decode_rejected_bytes: self.red.rejected_bytes(),
        }
    }

    /// Report for the ticks simulated so far. Expectations whose window has
    /// not closed yet count as failed.
    pub fn report(&self) -> SimReport {
        let expectations = self
            .expectations
            .iter()
            .map(|x| {
                let (passed, decided, observed) = match (&x.result, &x.last_observed) {
                    (Some((ok, t, v)), _) => (*ok, Some(*t), Some(v.clone())),
                    (None, Some((t, v))) => (false, Some(*t), Some(v.clone())),
                    (None, None) => (false, None, None),
                };
                ExpectationResult {
                    line: x.line,
                    at_ms: x.at_ms,
                    text: x.expectation.to_string(),
                    passed,
                    decided_at_ms: decided,
                    observed,
                }
            })
            .collect();
        SimReport {
            duration_ms: self.cfg.duration_ms,
            seed: self.cfg.seed,
            connected_at_start: self.connected_at_start,
            expectations,
            counters: self.counters(),
            green_display: self.green.display().clone(),
            red_display: self.red.display().clone(),
            warnings: self.warnings.clone(),
        }
    }
}

/// Runs a whole scenario, writing trace lines to `out`.
pub fn run(scenario: Scenario, cfg: RunConfig, out: &mut dyn Write) -> Result<SimReport, SimError> {
    let mut sim = Simulation::new(scenario, cfg)?;
    sim.configure(out)?;
    while sim.tick(out)? {}
    out.flush()?;
    Ok(sim.report())
}

/// Runs a scenario and returns the trace as text alongside the report.
pub fn run_to_string(scenario: Scenario, cfg: RunConfig) -> Result<(SimReport, String), SimError> {
    let mut buf = Vec::new();
    let report = run(scenario, cfg, &mut buf)?;
    Ok((report, String::from_utf8(buf).expect("trace is ASCII")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_text(text: &str, cfg: RunConfig) -> (SimReport, String) {
        run_to_string(Scenario::parse(text).unwrap(), cfg).unwrap()
    }

    #[test]
    fn empty_scenario_one_second() {
        let (report, trace) = run_text("", RunConfig::with_duration(1000));
        assert_eq!(report.counters.frames_tx, 6);
        // the t=1000 frame is still on the wire when the run stops
        assert_eq!(report.counters.frames_rx, 5);
        assert_eq!(report.counters.link_sent_bytes, 36);
        assert_eq!(report.counters.link_delivered_bytes, 30);
        assert_eq!(report.counters.link_dropped_bytes, 0);
        assert!(report.connected_at_start);
        assert!(trace.contains("t=0 GREEN TX_FRAME field=0 seq=0 value=250\n"));
        assert!(trace.contains("t=0 LINK AT module=green cmd=AT+ROLE=1 resp=OK\\r\\n\n"));
        assert!(trace.contains("t=0 LINK CONNECT ok=1\n"));
    }

    #[test]
    fn rain_at_zero_sounds_buzzer_at_607() {
        let (report, trace) = run_text(
            "at 0 set raining 1\nat 0 expect red.buzzer == 1 within 1500",
            RunConfig::with_duration(2000),
        );
        assert!(report.all_passed());
        // rain is the fourth slot (t=600); six bytes take 6.25 ms on the wire
        assert_eq!(report.expectations[0].decided_at_ms, Some(607));
        assert!(trace.contains("t=607 RED BUZZER on=1\n"));
    }

    #[test]
    fn snapshot_lines() {
        let cfg = RunConfig {
            snapshot_every_ms: Some(1000),
            ..RunConfig::with_duration(1000)
        };
        let (_, trace) = run_text("", cfg);
        assert!(trace.contains(
            "t=1000 RED DISPLAY l1=T:25.0C H:50.0% l2=Dist:100.0cm l3=Soil:50% l4=Rain:NO\n"
        ));
        assert!(trace.contains(
            "t=1000 GREEN DISPLAY l1=T:25C H:50% l2=Dist:100.0cm l3=Soil:50% l4=Rain:NO\n"
        ));
    }

    #[test]
    fn total_loss_keeps_red_blank() {
        let cfg = RunConfig {
            drop_prob: 1.0,
            snapshot_every_ms: Some(500),
            ..RunConfig::with_duration(5000)
        };
        let (report, trace) = run_text("at 0 expect red.display.line1 == \"T:--C H:--%\" ", cfg);
        assert!(report.all_passed());
        let red: Vec<&str> = trace
            .lines()
            .filter(|l| l.contains(" RED DISPLAY "))
            .collect();
        assert_eq!(red.len(), 11);
        for l in red {
            assert!(
                l.ends_with("l1=T:--C H:--% l2=Dist:--cm l3=Soil:--% l4=Rain:--"),
                "{l}"
            );
        }
    }

    #[test]
    fn failing_expectation_sets_exit_code() {
        let (report, _) = run_text("at 100 expect red.leds == 3", RunConfig::with_duration(500));
        assert_eq!(report.exit_code(), 2);
        // soil has not arrived yet at t=100
        assert_eq!(report.expectations[0].observed.as_deref(), Some("0"));
    }

    #[test]
    fn expectation_past_the_end_fails() {
        let (report, _) = run_text("at 900 expect red.leds == 2", RunConfig::with_duration(500));
        assert!(!report.all_passed());
        assert_eq!(report.expectations[0].decided_at_ms, None);
    }

    #[test]
    fn disconnect_and_reconnect() {
        let (report, trace) = run_text(
            "at 1000 link disconnect\nat 1500 expect link.dropped_bytes > 0\nat 3000 link connect\nat 3000 expect red.temp == 25 within 1100",
            RunConfig::with_duration(4500),
        );
        assert!(report.all_passed(), "{}", report.summary());
        assert!(trace.contains("t=1000 LINK DISCONNECT\n"));
        assert!(trace.contains("t=3000 LINK CONNECT ok=1\n"));
        assert!(trace.contains("LINK DISCARD dir=m2s count=6"));
    }

    #[test]
    fn skip_config_has_no_at_traffic() {
        let cfg = RunConfig {
            skip_config: true,
            ..RunConfig::with_duration(10)
        };
        let (report, trace) = run_text("", cfg);
        assert!(report.connected_at_start);
        assert!(!trace.contains(" AT "));
    }

    #[test]
    fn unsupported_baud_falls_back_with_warning() {
        let cfg = RunConfig {
            baud: 1234,
            ..RunConfig::with_duration(10)
        };
        let (report, _) = run_text("", cfg);
        assert!(!report.connected_at_start);
        assert_eq!(report.warnings.len(), 2);
    }

    #[test]
    fn rejects_bad_config() {
        let s = Scenario::default();
        assert!(Simulation::new(s.clone(), RunConfig::with_duration(0)).is_err());
        let cfg = RunConfig {
            drop_prob: 2.0,
            ..RunConfig::default()
        };
        assert!(Simulation::new(s, cfg).is_err());
    }
}
