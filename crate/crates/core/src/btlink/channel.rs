use std::collections::VecDeque;
use std::fmt;

use super::prng::SplitMix64;

/// Bit-times per byte on an 8N1 UART.
pub const BITS_PER_BYTE: u64 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    MasterToSlave,
    SlaveToMaster,
}

impl Direction {
    fn lane(self) -> usize {
        self as usize
    }

    pub fn tag(self) -> &'static str {
        match self {
            Direction::MasterToSlave => "m2s",
            Direction::SlaveToMaster => "s2m",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkImpairments {
    pub latency_ms: u64,
    /// Per-byte probability of silent loss.
    pub drop_prob: f64,
    /// Per-byte probability of a single flipped bit.
    pub bit_error_prob: f64,
    pub connected: bool,
}

impl Default for LinkImpairments {
    fn default() -> Self {
        Self {
            latency_ms: 0,
            drop_prob: 0.0,
            bit_error_prob: 0.0,
            connected: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ImpairmentError {
    #[error("{name} must be within [0, 1], got {value}")]
    Probability { name: &'static str, value: f64 },
}

impl LinkImpairments {
    pub fn validate(&self) -> Result<(), ImpairmentError> {
        for (name, value) in [
            ("drop_prob", self.drop_prob),
            ("bit_error_prob", self.bit_error_prob),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(ImpairmentError::Probability { name, value });
            }
        }
        Ok(())
    }
}

/// Something the channel did to a byte, reported for tracing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkEvent {
    Dropped {
        dir: Direction,
        byte: u8,
    },
    BitFlip {
        dir: Direction,
        bit: u8,
        byte: u8,
    },
    /// Bytes thrown away because the link was down when they were sent.
    Discarded {
        dir: Direction,
        count: usize,
    },
    /// In-flight bytes lost when the link went down.
    Flushed {
        dir: Direction,
        count: usize,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LinkStats {
    pub sent_bytes: u64,
    pub delivered_bytes: u64,
    pub dropped_bytes: u64,
    pub corrupted_bytes: u64,
    pub discarded_bytes: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Delivery {
    pub at_ms: u64,
    pub dir: Direction,
    pub byte: u8,
}

#[derive(Debug, Clone, Default)]
struct Lane {
    in_flight: VecDeque<(u64, u8)>,
    /// End of the last byte on the wire, in units of `1 / (1000 * baud)` s.
    wire_free: u64,
    last_delivery_ms: u64,
    stats: LinkStats,
}

/// Baud-limited FIFO byte pipe between the two modules, one lane per
/// direction, with seeded per-byte loss and bit errors.
///
/// Wire time is kept exactly: one millisecond is `baud` internal units and a
/// byte occupies 10 000 of them, so at 9600 baud a byte takes 1041.67 us. Only
/// the delivery time is rounded up to the millisecond grid.
#[derive(Debug, Clone)]
pub struct Channel {
    baud: u32,
    impairments: LinkImpairments,
    rng: SplitMix64,
    lanes: [Lane; 2],
    events: Vec<LinkEvent>,
    delivery_log: Option<Vec<Delivery>>,
}

impl Channel {
    pub fn new(baud: u32, impairments: LinkImpairments, seed: u64) -> Self {
        assert!(baud > 0, "baud must be positive");
        Self {
            baud,
            impairments,
            rng: SplitMix64::new(seed),
            lanes: Default::default(),
            events: Vec::new(),
            delivery_log: None,
        }
    }

    pub fn baud(&self) -> u32 {
        self.baud
    }

    pub fn impairments(&self) -> &LinkImpairments {
        &self.impairments
    }

    pub fn is_connected(&self) -> bool {
        self.impairments.connected
    }

    /// Replaces the impairment settings. Going from connected to disconnected
    /// loses everything still in flight.
    pub fn set_impairments(&mut self, imp: LinkImpairments) -> Result<(), ImpairmentError> {
        imp.validate()?;
        if self.impairments.connected && !imp.connected {
            for dir in [Direction::MasterToSlave, Direction::SlaveToMaster] {
                let lane = &mut self.lanes[dir.lane()];
                let count = lane.in_flight.len();
                if count > 0 {
                    lane.in_flight.clear();
                    lane.stats.dropped_bytes += count as u64;
                    self.events.push(LinkEvent::Flushed { dir, count });
                }
            }
        }
        self.impairments = imp;
        Ok(())
    }

    pub fn set_connected(&mut self, connected: bool) {
        let imp = LinkImpairments {
            connected,
            ..self.impairments
        };
        self.set_impairments(imp)
            .expect("only the connection flag changed");
    }

    /// Keeps a copy of every delivered byte for later inspection.
    pub fn record_deliveries(&mut self) {
        self.delivery_log.get_or_insert_with(Vec::new);
    }

    pub fn deliveries(&self) -> &[Delivery] {
        self.delivery_log.as_deref().unwrap_or(&[])
    }

    pub fn stats(&self, dir: Direction) -> LinkStats {
        self.lanes[dir.lane()].stats
    }

    /// Bytes queued but not yet delivered.
    pub fn in_flight(&self, dir: Direction) -> usize {
        self.lanes[dir.lane()].in_flight.len()
    }

    pub fn take_events(&mut self) -> Vec<LinkEvent> {
        std::mem::take(&mut self.events)
    }

    /// Puts bytes on the wire at `now_ms`. Returns how many the sender's UART
    /// accepted: all of them when connected, none otherwise.
    pub fn send_bytes(&mut self, dir: Direction, bytes: &[u8], now_ms: u64) -> usize {
        let baud = u64::from(self.baud);
        let byte_units = BITS_PER_BYTE * 1000;
        let imp = self.impairments;
        let lane = &mut self.lanes[dir.lane()];

        if !imp.connected {
            lane.stats.discarded_bytes += bytes.len() as u64;
            if !bytes.is_empty() {
                self.events.push(LinkEvent::Discarded {
                    dir,
                    count: bytes.len(),
                });
            }
            return 0;
        }

        for &byte in bytes {
            let start = lane.wire_free.max(now_ms * baud);
            lane.wire_free = start + byte_units;
            lane.stats.sent_bytes += 1;

            // draw order per byte: drop, then (if kept) bit error, then bit index
            if self.rng.chance(imp.drop_prob) {
                lane.stats.dropped_bytes += 1;
                self.events.push(LinkEvent::Dropped { dir, byte });
                continue;
            }
            let mut out = byte;
            if self.rng.chance(imp.bit_error_prob) {
                let bit = (self.rng.next_u64() % 8) as u8;
                out ^= 1 << bit;
                lane.stats.corrupted_bytes += 1;
                self.events.push(LinkEvent::BitFlip { dir, bit, byte });
            }
            let at = (lane.wire_free.div_ceil(baud) + imp.latency_ms).max(lane.last_delivery_ms);
            lane.last_delivery_ms = at;
            lane.in_flight.push_back((at, out));
        }
        bytes.len()
    }

    /// All bytes due at or before `now_ms`, in send order.
    pub fn poll_receive(&mut self, dir: Direction, now_ms: u64) -> Vec<u8> {
        let lane = &mut self.lanes[dir.lane()];
        let mut out = Vec::new();
        while let Some(&(at, byte)) = lane.in_flight.front() {
            if at > now_ms {
                break;
            }
            lane.in_flight.pop_front();
            out.push(byte);
            if let Some(log) = self.delivery_log.as_mut() {
                log.push(Delivery {
                    at_ms: at,
                    dir,
                    byte,
                });
            }
        }
        lane.stats.delivered_bytes += out.len() as u64;
        out
    }

    /// Delivery time of the next queued byte, if any.
    pub fn next_delivery(&self, dir: Direction) -> Option<u64> {
        self.lanes[dir.lane()].in_flight.front().map(|&(at, _)| at)
    }
}
