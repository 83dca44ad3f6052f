//! Single-datum telemetry frames.
//!
//! Every frame carries exactly one sensor field. The wire image is six bytes:
//!
//! ```text
//! +------+----------+-----+----------+----------+----------+
//! | 0xAA | field_id | seq | value_lo | value_hi | checksum |
//! +------+----------+-----+----------+----------+----------+
//! ```
//!
//! `value` is a little-endian two's-complement `i16` and `checksum` is the XOR
//! of bytes 1 through 4. Temperature and humidity travel in tenths of a unit,
//! soil moisture as raw ADC counts, rain as 0/1 and distance in tenths of a
//! centimeter.

use std::fmt;

pub const SYNC: u8 = 0xAA;
pub const FRAME_LEN: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum FieldId {
    Temperature = 0,
    Humidity = 1,
    SoilCounts = 2,
    Rain = 3,
    DistanceTenthsCm = 4,
}

impl FieldId {
    pub const ALL: [FieldId; 5] = [
        FieldId::Temperature,
        FieldId::Humidity,
        FieldId::SoilCounts,
        FieldId::Rain,
        FieldId::DistanceTenthsCm,
    ];

    pub fn from_byte(b: u8) -> Option<FieldId> {
        FieldId::ALL.get(usize::from(b)).copied()
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Inclusive range of values a frame of this field may carry.
    pub fn value_range(self) -> (i16, i16) {
        match self {
            FieldId::Rain => (0, 1),
            FieldId::SoilCounts => (0, 4095),
            _ => (i16::MIN, i16::MAX),
        }
    }

    pub fn accepts(self, value: i16) -> bool {
        let (lo, hi) = self.value_range();
        (lo..=hi).contains(&value)
    }
}

impl fmt::Display for FieldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            FieldId::Temperature => "temperature",
            FieldId::Humidity => "humidity",
            FieldId::SoilCounts => "soil",
            FieldId::Rain => "rain",
            FieldId::DistanceTenthsCm => "distance",
        };
        f.pad(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Frame {
    pub field: FieldId,
    pub seq: u8,
    pub value: i16,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum FrameError {
    #[error("value {value} out of range for {field} frame")]
    ValueOutOfRange { field: FieldId, value: i16 },
}

impl Frame {
    pub fn new(field: FieldId, seq: u8, value: i16) -> Result<Self, FrameError> {
        let f = Frame { field, seq, value };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<(), FrameError> {
        if self.field.accepts(self.value) {
            Ok(())
        } else {
            Err(FrameError::ValueOutOfRange {
                field: self.field,
                value: self.value,
            })
        }
    }

    pub fn encode(&self) -> Result<[u8; FRAME_LEN], FrameError> {
        encode_frame(self)
    }
}

fn checksum(body: &[u8]) -> u8 {
    body.iter().fold(0, |acc, b| acc ^ b)
}

pub fn encode_frame(frame: &Frame) -> Result<[u8; FRAME_LEN], FrameError> {
    frame.validate()?;
    let [lo, hi] = frame.value.to_le_bytes();
    let mut out = [SYNC, frame.field as u8, frame.seq, lo, hi, 0];
    out[5] = checksum(&out[1..5]);
    Ok(out)
}

/// Validates a complete six-byte window.
fn parse_window(w: &[u8; FRAME_LEN]) -> Option<Frame> {
    if w[0] != SYNC || checksum(&w[1..5]) != w[5] {
        return None;
    }
    let field = FieldId::from_byte(w[1])?;
    let value = i16::from_le_bytes([w[3], w[4]]);
    field.accepts(value).then_some(Frame {
        field,
        seq: w[2],
        value,
    })
}

/// Streaming decoder that resynchronizes on the next sync byte after any
/// validation failure. Malformed input is counted, never raised.
#[derive(Debug, Clone, Default)]
pub struct Decoder {
    buf: [u8; FRAME_LEN],
    len: usize,
    rejected: u64,
    decoded: u64,
}

impl Decoder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Bytes discarded so far while hunting for a valid frame.
    pub fn rejected_bytes(&self) -> u64 {
        self.rejected
    }

    pub fn decoded_frames(&self) -> u64 {
        self.decoded
    }

    /// Bytes held while waiting for a frame to complete.
    pub fn pending(&self) -> &[u8] {
        &self.buf[..self.len]
    }

    pub fn push(&mut self, byte: u8) -> Option<Frame> {
        if self.len == 0 && byte != SYNC {
            self.rejected += 1;
            return None;
        }
        self.buf[self.len] = byte;
        self.len += 1;
        if self.len < FRAME_LEN {
            return None;
        }
        if let Some(frame) = parse_window(&self.buf) {
            self.len = 0;
            self.decoded += 1;
            return Some(frame);
        }
        // drop the failed sync byte, then everything up to the next sync
        let skip = 1 + self.buf[1..]
            .iter()
            .position(|&b| b == SYNC)
            .unwrap_or(FRAME_LEN - 1);
        self.buf.copy_within(skip.., 0);
        self.len -= skip;
        self.rejected += skip as u64;
        None
    }

    /// Pushes every byte and collects the frames that complete.
    pub fn push_all(&mut self, bytes: &[u8]) -> Vec<Frame> {
        bytes.iter().filter_map(|&b| self.push(b)).collect()
    }
}

/// Master's transmit slot: which field goes next and under which sequence number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    pub field: FieldId,
    pub seq: u8,
}

/// Fixed-order field cycle: temperature, humidity, soil, rain, distance.
#[derive(Debug, Clone, Default)]
pub struct RoundRobin {
    next_index: usize,
    next_seq: u8,
}

impl RoundRobin {
    pub fn new() -> Self {
        Self::default()
    }

    /// Field and sequence number the next call to [`next_slot`](Self::next_slot) will return.
    pub fn peek(&self) -> Slot {
        Slot {
            field: FieldId::ALL[self.next_index],
            seq: self.next_seq,
        }
    }

    pub fn next_slot(&mut self) -> Slot {
        let slot = self.peek();
        self.next_index = (self.next_index + 1) % FieldId::ALL.len();
        self.next_seq = self.next_seq.wrapping_add(1);
        slot
    }

    pub fn next_field(&mut self) -> FieldId {
        self.next_slot().field
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_examples() {
        let t = Frame::new(FieldId::Temperature, 7, 253).unwrap();
        assert_eq!(
            encode_frame(&t).unwrap(),
            [0xAA, 0x00, 0x07, 0xFD, 0x00, 0xFA]
        );
        let r = Frame::new(FieldId::Rain, 0, 0).unwrap();
        assert_eq!(
            encode_frame(&r).unwrap(),
            [0xAA, 0x03, 0x00, 0x00, 0x00, 0x03]
        );
        let s = Frame::new(FieldId::SoilCounts, 255, 2048).unwrap();
        assert_eq!(
            encode_frame(&s).unwrap(),
            [0xAA, 0x02, 0xFF, 0x00, 0x08, 0xF5]
        );
    }

    #[test]
    fn encode_rejects_out_of_range() {
        let bad = Frame {
            field: FieldId::Rain,
            seq: 0,
            value: 2,
        };
        assert!(encode_frame(&bad).is_err());
        let bad = Frame {
            field: FieldId::SoilCounts,
            seq: 0,
            value: 4096,
        };
        assert!(encode_frame(&bad).is_err());
        assert!(Frame::new(FieldId::SoilCounts, 0, -1).is_err());
    }

    #[test]
    fn decode_byte_by_byte() {
        let mut d = Decoder::new();
        let bytes = [0xAA, 0x00, 0x07, 0xFD, 0x00, 0xFA];
        for &b in &bytes[..5] {
            assert_eq!(d.push(b), None);
        }
        assert_eq!(
            d.push(bytes[5]),
            Some(Frame {
                field: FieldId::Temperature,
                seq: 7,
                value: 253
            })
        );
        assert_eq!(d.rejected_bytes(), 0);
    }

    #[test]
    fn bad_checksum_is_rejected() {
        let mut d = Decoder::new();
        assert!(d.push_all(&[0xAA, 0x00, 0x07, 0xFD, 0x00, 0xFB]).is_empty());
        assert!(d.rejected_bytes() > 0);
    }

    #[test]
    fn leading_garbage_is_skipped() {
        let mut d = Decoder::new();
        let frames = d.push_all(&[0x00, 0xAA, 0x03, 0x00, 0x00, 0x00, 0x03]);
        assert_eq!(
            frames,
            vec![Frame {
                field: FieldId::Rain,
                seq: 0,
                value: 0
            }]
        );
        assert_eq!(d.rejected_bytes(), 1);
    }

    #[test]
    fn resync_finds_sync_inside_failed_window() {
        // a truncated frame immediately followed by a full one
        let good = encode_frame(&Frame::new(FieldId::Humidity, 3, 612).unwrap()).unwrap();
        let mut stream = vec![0xAA, 0x01, 0x02];
        stream.extend_from_slice(&good);
        let mut d = Decoder::new();
        let frames = d.push_all(&stream);
        assert_eq!(frames.len(), 1);
        assert_eq!(frames[0].value, 612);
        assert_eq!(d.rejected_bytes(), 3);
    }

    #[test]
    fn unknown_field_or_range_is_rejected() {
        let mut w = [SYNC, 5, 0, 0, 0, 0];
        w[5] = checksum(&w[1..5]);
        assert_eq!(parse_window(&w), None);
        let mut w = [SYNC, FieldId::Rain as u8, 0, 2, 0, 0];
        w[5] = checksum(&w[1..5]);
        assert_eq!(parse_window(&w), None);
    }

    #[test]
    fn every_single_bit_flip_is_rejected() {
        let frames = [
            Frame::new(FieldId::Temperature, 7, 253).unwrap(),
            Frame::new(FieldId::Rain, 200, 1).unwrap(),
            Frame::new(FieldId::SoilCounts, 255, 4095).unwrap(),
            Frame::new(FieldId::DistanceTenthsCm, 0, -32768).unwrap(),
        ];
        for f in frames {
            let bytes = encode_frame(&f).unwrap();
            for byte in 1..FRAME_LEN {
                for bit in 0..8 {
                    let mut c = bytes;
                    c[byte] ^= 1 << bit;
                    let mut d = Decoder::new();
                    assert!(
                        d.push_all(&c).is_empty(),
                        "flip byte {byte} bit {bit} of {f:?} decoded"
                    );
                }
            }
        }
    }

    #[test]
    fn round_robin_cycle_and_seq_wrap() {
        let mut rr = RoundRobin::new();
        let fields: Vec<u8> = (0..5).map(|_| rr.next_field() as u8).collect();
        assert_eq!(fields, vec![0, 1, 2, 3, 4]);
        assert_eq!(rr.next_field(), FieldId::Temperature);

        let mut rr = RoundRobin::new();
        for i in 0..256u32 {
            assert_eq!(u32::from(rr.next_slot().seq), i);
        }
        assert_eq!(rr.peek().seq, 0);
        // 256 is not a multiple of 5, so the field has moved on
        assert_eq!(rr.peek().field, FieldId::ALL[256 % 5]);
    }
}
