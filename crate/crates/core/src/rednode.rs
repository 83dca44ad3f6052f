//! Slave ("Red House") node: decodes incoming frames and turns the latest
//! values into display text, a three-LED soil gauge and a rain buzzer.

use crate::btlink::{Channel, Direction};
use crate::display::{soil_pct, tenths, DisplayBuffer};
use crate::trace::{EventKind, Source, TraceEvent};
use crate::wireproto::{Decoder, FieldId};

/// Board wiring, kept for trace output only.
pub const RED_PIN_MAP: &[(&str, &str)] = &[
    ("PB6", "OLED_SCL"),
    ("PB7", "OLED_SDA"),
    ("PB1", "LED1"),
    ("PA7", "LED2"),
    ("PA0", "LED3"),
    ("PA4", "BUZZER"),
    ("PA9", "UART1_TX"),
    ("PA10", "UART1_RX"),
];

pub const DEFAULT_STALENESS_MS: u64 = 5000;

/// Soil fractions at which the first, second and third LED light.
pub const LED_THRESHOLDS_PCT: [u32; 3] = [10, 40, 70];

/// Number of lit soil LEDs for a raw ADC reading.
pub fn led_count(soil_counts: u16) -> u8 {
    // counts / 4095 >= pct / 100, kept in integers
    let scaled = u32::from(soil_counts) * 100;
    LED_THRESHOLDS_PCT
        .iter()
        .filter(|&&pct| scaled >= pct * 4095)
        .count() as u8
}

/// Last known value of each field, indexed by [`FieldId`]. `None` means never
/// received or stale.
pub type FieldValues = [Option<i16>; 5];

fn show(v: Option<i16>, f: impl Fn(i16) -> String) -> String {
    v.map_or_else(|| "--".to_string(), f)
}

pub fn render_slave_display(values: &FieldValues) -> DisplayBuffer {
    let get = |field: FieldId| values[field.index()];
    let t = show(get(FieldId::Temperature), |v| tenths(v.into()));
    let h = show(get(FieldId::Humidity), |v| tenths(v.into()));
    let d = show(get(FieldId::DistanceTenthsCm), |v| tenths(v.into()));
    // decoder guarantees soil in 0..=4095
    let s = show(get(FieldId::SoilCounts), |v| soil_pct(v as u16).to_string());
    let r = show(get(FieldId::Rain), |v| {
        if v != 0 { "YES" } else { "NO" }.into()
    });
    DisplayBuffer::from_lines([
        format!("T:{t}C H:{h}%"),
        format!("Dist:{d}cm"),
        format!("Soil:{s}%"),
        format!("Rain:{r}"),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Received {
    value: i16,
    at_ms: u64,
}

#[derive(Debug, Clone)]
pub struct SlaveNode {
    decoder: Decoder,
    last: [Option<Received>; 5],
    staleness_ms: u64,
    now_ms: u64,
    display: DisplayBuffer,
    leds: u8,
    buzzer: bool,
    rx_frames: u64,
}

impl Default for SlaveNode {
    fn default() -> Self {
        Self::new(DEFAULT_STALENESS_MS)
    }
}

impl SlaveNode {
    pub fn new(staleness_ms: u64) -> Self {
        Self {
            decoder: Decoder::new(),
            last: [None; 5],
            staleness_ms,
            now_ms: 0,
            display: render_slave_display(&[None; 5]),
            leds: 0,
            buzzer: false,
            rx_frames: 0,
        }
    }

    pub fn display(&self) -> &DisplayBuffer {
        &self.display
    }

    pub fn leds(&self) -> u8 {
        self.leds
    }

    pub fn buzzer(&self) -> bool {
        self.buzzer
    }

    pub fn rx_frames(&self) -> u64 {
        self.rx_frames
    }

    pub fn rejected_bytes(&self) -> u64 {
        self.decoder.rejected_bytes()
    }

    /// Value of `field` as of the last step, `None` if absent or stale.
    pub fn value(&self, field: FieldId) -> Option<i16> {
        self.fresh_values()[field.index()]
    }

    /// Raw last-received value and its arrival time, ignoring staleness.
    pub fn last_received(&self, field: FieldId) -> Option<(i16, u64)> {
        self.last[field.index()].map(|r| (r.value, r.at_ms))
    }

    pub fn fresh_values(&self) -> FieldValues {
        self.last.map(|slot| {
            slot.filter(|r| self.now_ms - r.at_ms <= self.staleness_ms)
                .map(|r| r.value)
        })
    }

    /// Polls the master-to-slave lane and steps on whatever arrived.
    pub fn step_from_channel(&mut self, channel: &mut Channel, now_ms: u64) -> Vec<TraceEvent> {
        let bytes = channel.poll_receive(Direction::MasterToSlave, now_ms);
        self.step(&bytes, now_ms)
    }

    /// Decodes `bytes` received at `now_ms`, then refreshes the outputs.
    pub fn step(&mut self, bytes: &[u8], now_ms: u64) -> Vec<TraceEvent> {
        let mut events = Vec::new();
        let ev = |kind| TraceEvent::new(now_ms, Source::Red, kind);
        self.now_ms = now_ms;

        let rejected_before = self.decoder.rejected_bytes();
        for &b in bytes {
            if let Some(frame) = self.decoder.push(b) {
                self.last[frame.field.index()] = Some(Received {
                    value: frame.value,
                    at_ms: now_ms,
                });
                self.rx_frames += 1;
                events.push(ev(EventKind::RxFrame(frame)));
            }
        }
        let rejected = self.decoder.rejected_bytes() - rejected_before;
        if rejected > 0 {
            events.push(ev(EventKind::DecodeReject(rejected)));
        }

        let values = self.fresh_values();
        let leds = values[FieldId::SoilCounts.index()].map_or(0, |c| led_count(c as u16));
        if leds != self.leds {
            self.leds = leds;
            events.push(ev(EventKind::Led(leds)));
        }
        let buzzer = values[FieldId::Rain.index()] == Some(1);
        if buzzer != self.buzzer {
            self.buzzer = buzzer;
            events.push(ev(EventKind::Buzzer(buzzer)));
        }
        let display = render_slave_display(&values);
        if display != self.display {
            self.display = display.clone();
            events.push(ev(EventKind::Display(display)));
        }
        events
    }
}
