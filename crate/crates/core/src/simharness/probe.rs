use std::fmt;
use std::str::FromStr;

use super::scenario::{CmpOp, Expected};

/// Named observable that scenario expectations can test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Probe {
    /// Display line 1..=4 of the master.
    GreenDisplayLine(u8),
    GreenTxFrames,
    RedDisplayLine(u8),
    /// Degrees Celsius.
    RedTemp,
    /// Percent relative humidity.
    RedHum,
    /// Raw ADC counts.
    RedSoil,
    RedRain,
    /// Centimeters.
    RedDist,
    RedLeds,
    RedBuzzer,
    LinkDeliveredBytes,
    LinkDroppedBytes,
}

impl Probe {
    pub fn is_text(self) -> bool {
        matches!(self, Probe::GreenDisplayLine(_) | Probe::RedDisplayLine(_))
    }
}

impl fmt::Display for Probe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Probe::GreenDisplayLine(n) => write!(f, "green.display.line{n}"),
            Probe::RedDisplayLine(n) => write!(f, "red.display.line{n}"),
            Probe::GreenTxFrames => f.write_str("green.tx_frames"),
            Probe::RedTemp => f.write_str("red.temp"),
            Probe::RedHum => f.write_str("red.hum"),
            Probe::RedSoil => f.write_str("red.soil"),
            Probe::RedRain => f.write_str("red.rain"),
            Probe::RedDist => f.write_str("red.dist"),
            Probe::RedLeds => f.write_str("red.leds"),
            Probe::RedBuzzer => f.write_str("red.buzzer"),
            Probe::LinkDeliveredBytes => f.write_str("link.delivered_bytes"),
            Probe::LinkDroppedBytes => f.write_str("link.dropped_bytes"),
        }
    }
}

impl FromStr for Probe {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        let line = |rest: &str| match rest {
            "1" | "2" | "3" | "4" => Ok(rest.as_bytes()[0] - b'0'),
            _ => Err(()),
        };
        if let Some(n) = s.strip_prefix("green.display.line") {
            return line(n).map(Probe::GreenDisplayLine);
        }
        if let Some(n) = s.strip_prefix("red.display.line") {
            return line(n).map(Probe::RedDisplayLine);
        }
        Ok(match s {
            "green.tx_frames" => Probe::GreenTxFrames,
            "red.temp" => Probe::RedTemp,
            "red.hum" => Probe::RedHum,
            "red.soil" => Probe::RedSoil,
            "red.rain" => Probe::RedRain,
            "red.dist" => Probe::RedDist,
            "red.leds" => Probe::RedLeds,
            "red.buzzer" => Probe::RedBuzzer,
            "link.delivered_bytes" => Probe::LinkDeliveredBytes,
            "link.dropped_bytes" => Probe::LinkDroppedBytes,
            _ => return Err(()),
        })
    }
}

/// A probe's reading at one tick.
#[derive(Debug, Clone, PartialEq)]
pub enum ProbeValue {
    Number(f64),
    Text(String),
    Absent,
}

impl fmt::Display for ProbeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbeValue::Number(n) => write!(f, "{n}"),
            ProbeValue::Text(s) => write!(f, "{s:?}"),
            ProbeValue::Absent => f.write_str("--"),
        }
    }
}

impl ProbeValue {
    /// Applies `op`. Values of different kinds are only ever unequal.
    pub fn satisfies(&self, op: CmpOp, expected: &Expected) -> bool {
        use std::cmp::Ordering;
        let ord = match (self, expected) {
            (ProbeValue::Number(a), Expected::Number(b)) => a.partial_cmp(b),
            (ProbeValue::Text(a), Expected::Text(b)) => Some(a.cmp(b)),
            (ProbeValue::Absent, Expected::Absent) => Some(Ordering::Equal),
            _ => None,
        };
        match (op, ord) {
            (CmpOp::Eq, o) => o == Some(Ordering::Equal),
            (CmpOp::Ne, o) => o != Some(Ordering::Equal),
            (_, None) => false,
            (CmpOp::Lt, Some(o)) => o == Ordering::Less,
            (CmpOp::Le, Some(o)) => o != Ordering::Greater,
            (CmpOp::Gt, Some(o)) => o == Ordering::Greater,
            (CmpOp::Ge, Some(o)) => o != Ordering::Less,
        }
    }
}
