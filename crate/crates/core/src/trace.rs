//! Trace events and their line format.
//!
//! Every line reads `t=<ms> <GREEN|RED|LINK> <EVENT> <key=value ...>` with
//! keys in the order listed on each [`EventKind`] variant.

use std::fmt;

use crate::btlink::{Direction, LinkEvent};
use crate::display::DisplayBuffer;
use crate::envmodel::SensorReadings;
use crate::wireproto::Frame;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Source {
    Green,
    Red,
    Link,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Green => "GREEN",
            Source::Red => "RED",
            Source::Link => "LINK",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventKind {
    /// `PINMAP <pin>=<signal> ...`
    PinMap(&'static [(&'static str, &'static str)]),
    /// `SAMPLE temp= hum= soil= rain= echo_us=`
    Sample(SensorReadings),
    /// `TX_FRAME field= seq= value=`
    TxFrame(Frame),
    /// `DISPLAY l1= l2= l3= l4=`
    Display(DisplayBuffer),
    /// `RX_FRAME field= seq= value=`
    RxFrame(Frame),
    /// `LED count=`
    Led(u8),
    /// `BUZZER on=`
    Buzzer(bool),
    /// `DECODE_REJECT bytes=`
    DecodeReject(u64),
    /// `AT module= cmd= resp=`, CR/LF escaped in `resp`
    At {
        module: &'static str,
        cmd: String,
        resp: Option<String>,
    },
    /// `MODE module= mode=`
    Mode { module: &'static str, data: bool },
    /// `CONNECT ok=`
    Connect(bool),
    /// `DISCONNECT`
    Disconnect,
    /// `PARAM name= value=`
    Param { name: &'static str, value: String },
    /// `DROP`, `BITFLIP`, `DISCARD` or `FLUSH`
    Link(LinkEvent),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEvent {
    pub t_ms: u64,
    pub source: Source,
    pub kind: EventKind,
}

impl TraceEvent {
    pub fn new(t_ms: u64, source: Source, kind: EventKind) -> Self {
        Self { t_ms, source, kind }
    }
}

fn frame_fields(f: &mut fmt::Formatter<'_>, frame: &Frame) -> fmt::Result {
    write!(
        f,
        "field={} seq={} value={}",
        frame.field as u8, frame.seq, frame.value
    )
}

fn escape(s: &str) -> String {
    s.replace('\r', "\\r").replace('\n', "\\n")
}

fn dir(d: Direction) -> &'static str {
    d.tag()
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t={} {} ", self.t_ms, self.source)?;
        match &self.kind {
            EventKind::PinMap(pins) => {
                f.write_str("PINMAP")?;
                for (pin, signal) in pins.iter() {
                    write!(f, " {pin}={signal}")?;
                }
                Ok(())
            }
            EventKind::Sample(r) => write!(
                f,
                "SAMPLE temp={} hum={} soil={} rain={} echo_us={}",
                r.temp_c_int,
                r.hum_pct_int,
                r.soil_counts,
                u8::from(r.rain_digital),
                r.echo_us
            ),
            EventKind::TxFrame(fr) => {
                f.write_str("TX_FRAME ")?;
                frame_fields(f, fr)
            }
            EventKind::RxFrame(fr) => {
                f.write_str("RX_FRAME ")?;
                frame_fields(f, fr)
            }
            EventKind::Display(d) => {
                let l = d.lines();
                write!(f, "DISPLAY l1={} l2={} l3={} l4={}", l[0], l[1], l[2], l[3])
            }
            EventKind::Led(n) => write!(f, "LED count={n}"),
            EventKind::Buzzer(on) => write!(f, "BUZZER on={}", u8::from(*on)),
            EventKind::DecodeReject(n) => write!(f, "DECODE_REJECT bytes={n}"),
            EventKind::At { module, cmd, resp } => write!(
                f,
                "AT module={module} cmd={} resp={}",
                escape(cmd),
                resp.as_deref().map_or_else(|| "-".to_string(), escape)
            ),
            EventKind::Mode { module, data } => write!(
                f,
                "MODE module={module} mode={}",
                if *data { "data" } else { "at" }
            ),
            EventKind::Connect(ok) => write!(f, "CONNECT ok={}", u8::from(*ok)),
            EventKind::Disconnect => f.write_str("DISCONNECT"),
            EventKind::Param { name, value } => write!(f, "PARAM name={name} value={value}"),
            EventKind::Link(ev) => match *ev {
                LinkEvent::Dropped { dir: d, byte } => {
                    write!(f, "DROP dir={} byte=0x{byte:02X}", dir(d))
                }
                LinkEvent::BitFlip { dir: d, bit, byte } => {
                    write!(f, "BITFLIP dir={} bit={bit} byte=0x{byte:02X}", dir(d))
                }
                LinkEvent::Discarded { dir: d, count } => {
                    write!(f, "DISCARD dir={} count={count}", dir(d))
                }
                LinkEvent::Flushed { dir: d, count } => {
                    write!(f, "FLUSH dir={} count={count}", dir(d))
                }
            },
        }
    }
}
