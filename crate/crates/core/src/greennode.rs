//! Master ("Green House") node: samples its sensors, shows them on its own
//! display and streams them to the slave one field per transmit slot.

use crate::btlink::{Channel, Direction};
use crate::display::{soil_pct, tenths, DisplayBuffer};
use crate::envmodel::{EnvironmentState, SensorReadings};
use crate::trace::{EventKind, Source, TraceEvent};
use crate::wireproto::{encode_frame, FieldId, Frame, RoundRobin};

/// Board wiring, kept for trace output only.
pub const GREEN_PIN_MAP: &[(&str, &str)] = &[
    ("PB6", "OLED_SCL"),
    ("PB7", "OLED_SDA"),
    ("PA11", "US_TRIG"),
    ("PA8", "US_ECHO"),
    ("PB9", "DHT11"),
    ("PB1", "SOIL_A0"),
    ("PA0", "RAIN_D0"),
    ("PA9", "UART1_TX"),
    ("PA10", "UART1_RX"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MasterTiming {
    pub sample_period_ms: u64,
    pub transmit_period_ms: u64,
}

impl Default for MasterTiming {
    fn default() -> Self {
        Self {
            sample_period_ms: 1000,
            transmit_period_ms: 200,
        }
    }
}

/// Wire value of one field, scaled as the frame format expects.
pub fn field_value(readings: &SensorReadings, field: FieldId) -> i16 {
    let v: i64 = match field {
        FieldId::Temperature => i64::from(readings.temp_c_int) * 10,
        FieldId::Humidity => i64::from(readings.hum_pct_int) * 10,
        FieldId::SoilCounts => i64::from(readings.soil_counts),
        FieldId::Rain => i64::from(readings.rain_digital),
        FieldId::DistanceTenthsCm => i64::from(readings.distance_tenths_cm()),
    };
    // sensor clamps keep every field well inside i16
    v.clamp(i64::from(i16::MIN), i64::from(i16::MAX)) as i16
}

pub fn render_master_display(r: &SensorReadings) -> DisplayBuffer {
    DisplayBuffer::from_lines([
        format!("T:{}C H:{}%", r.temp_c_int, r.hum_pct_int),
        format!("Dist:{}cm", tenths(i64::from(r.distance_tenths_cm()))),
        format!("Soil:{}%", soil_pct(r.soil_counts)),
        format!("Rain:{}", if r.rain_digital { "YES" } else { "NO" }),
    ])
}

#[derive(Debug, Clone)]
pub struct MasterNode {
    timing: MasterTiming,
    last_readings: Option<SensorReadings>,
    scheduler: RoundRobin,
    display: DisplayBuffer,
    tx_frames: u64,
    last_frame: [Option<Frame>; 5],
}

impl Default for MasterNode {
    fn default() -> Self {
        Self::new(MasterTiming::default())
    }
}

impl MasterNode {
    pub fn new(timing: MasterTiming) -> Self {
        assert!(
            timing.sample_period_ms > 0 && timing.transmit_period_ms > 0,
            "periods must be positive"
        );
        Self {
            timing,
            last_readings: None,
            scheduler: RoundRobin::new(),
            display: DisplayBuffer::default(),
            tx_frames: 0,
            last_frame: [None; 5],
        }
    }

    pub fn timing(&self) -> MasterTiming {
        self.timing
    }

    pub fn readings(&self) -> Option<&SensorReadings> {
        self.last_readings.as_ref()
    }

    pub fn display(&self) -> &DisplayBuffer {
        &self.display
    }

    /// Frames handed to the link so far.
    pub fn tx_frames(&self) -> u64 {
        self.tx_frames
    }

    /// Most recent frame sent for `field`.
    pub fn last_sent(&self, field: FieldId) -> Option<Frame> {
        self.last_frame[field.index()]
    }

    /// One simulator tick. Samples on sample ticks, sends one frame on
    /// transmit ticks. Bytes sent while the link is down are simply lost.
    pub fn step(
        &mut self,
        env: &EnvironmentState,
        channel: &mut Channel,
        now_ms: u64,
    ) -> Vec<TraceEvent> {
        let mut events = Vec::new();
        let ev = |kind| TraceEvent::new(now_ms, Source::Green, kind);

        if now_ms.is_multiple_of(self.timing.sample_period_ms) || self.last_readings.is_none() {
            let readings = env.sample();
            self.last_readings = Some(readings);
            events.push(ev(EventKind::Sample(readings)));
            let display = render_master_display(&readings);
            if display != self.display {
                self.display = display.clone();
                events.push(ev(EventKind::Display(display)));
            }
        }

        if now_ms.is_multiple_of(self.timing.transmit_period_ms) {
            let readings = self.last_readings.expect("sampled above");
            let slot = self.scheduler.next_slot();
            let frame = Frame::new(slot.field, slot.seq, field_value(&readings, slot.field))
                .expect("sensor ranges fit the frame ranges");
            let bytes = encode_frame(&frame).expect("frame validated");
            channel.send_bytes(Direction::MasterToSlave, &bytes, now_ms);
            self.tx_frames += 1;
            self.last_frame[slot.field.index()] = Some(frame);
            events.push(ev(EventKind::TxFrame(frame)));
        }
        events
    }
}
