use std::fmt::Write as _;

use serde::Serialize;

use crate::display::DisplayBuffer;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpectationResult {
    pub line: usize,
    pub at_ms: u64,
    /// The expectation as written, e.g. `red.buzzer == 1 within 1500`.
    pub text: String,
    pub passed: bool,
    /// Tick at which the expectation was decided.
    pub decided_at_ms: Option<u64>,
    /// Probe value at the deciding tick (the last evaluated tick on failure).
    pub observed: Option<String>,
}

/// Flat counter set; also the key set of `--report-json`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counters {
    pub frames_tx: u64,
    pub frames_rx: u64,
    pub link_sent_bytes: u64,
    pub link_delivered_bytes: u64,
    pub link_dropped_bytes: u64,
    pub link_corrupted_bytes: u64,
    pub link_discarded_bytes: u64,
    pub decode_rejected_bytes: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub duration_ms: u64,
    pub seed: u64,
    pub connected_at_start: bool,
    pub expectations: Vec<ExpectationResult>,
    pub counters: Counters,
    pub green_display: DisplayBuffer,
    pub red_display: DisplayBuffer,
    pub warnings: Vec<String>,
}

impl SimReport {
    pub fn passed(&self) -> usize {
        self.expectations.iter().filter(|e| e.passed).count()
    }

    pub fn failed(&self) -> usize {
        self.expectations.len() - self.passed()
    }

    pub fn all_passed(&self) -> bool {
        self.failed() == 0
    }

    /// 0 when every expectation held, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.all_passed() {
            0
        } else {
            2
        }
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let c = &self.counters;
        let _ = writeln!(s, "simulated {} ms (seed {})", self.duration_ms, self.seed);
        let _ = writeln!(
            s,
            "link: paired={} sent={} delivered={} dropped={} corrupted={} discarded={}",
            u8::from(self.connected_at_start),
            c.link_sent_bytes,
            c.link_delivered_bytes,
            c.link_dropped_bytes,
            c.link_corrupted_bytes,
            c.link_discarded_bytes
        );
        let _ = writeln!(
            s,
            "frames: tx={} rx={} decode_rejected_bytes={}",
            c.frames_tx, c.frames_rx, c.decode_rejected_bytes
        );
        let _ = writeln!(s, "green display: {}", self.green_display);
        let _ = writeln!(s, "red display:   {}", self.red_display);
        for w in &self.warnings {
            let _ = writeln!(s, "warning: {w}");
        }
        for e in &self.expectations {
            let verdict = if e.passed { "PASS" } else { "FAIL" };
            let _ = write!(s, "{verdict} line {} at {} ms: {}", e.line, e.at_ms, e.text);
            match (&e.decided_at_ms, &e.observed) {
                (Some(t), Some(v)) => {
                    let _ = writeln!(s, " (t={t}, observed {v})");
                }
                _ => {
                    let _ = writeln!(s, " (never evaluated)");
                }
            }
        }
        let _ = writeln!(
            s,
            "expectations: {} passed, {} failed",
            self.passed(),
            self.failed()
        );
        s
    }

    /// Flat JSON object: run parameters, every [`Counters`] field, and
    /// expectation totals.
    pub fn to_json(&self) -> serde_json::Value {
        let mut obj = serde_json::Map::new();
        obj.insert("duration_ms".into(), self.duration_ms.into());
        obj.insert("seed".into(), self.seed.into());
        obj.insert("connected_at_start".into(), self.connected_at_start.into());
        if let serde_json::Value::Object(counters) =
            serde_json::to_value(self.counters).expect("plain integers serialize")
        {
            obj.extend(counters);
        }
        obj.insert("expect_total".into(), self.expectations.len().into());
        obj.insert("expect_passed".into(), self.passed().into());
        obj.insert("expect_failed".into(), self.failed().into());
        obj.insert("warnings".into(), self.warnings.len().into());
        serde_json::Value::Object(obj)
    }
}
