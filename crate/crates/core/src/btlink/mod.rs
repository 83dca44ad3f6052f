//! HC-05 pair emulation: AT-command configuration, pairing rules, and the
//! baud-limited byte channel between the two modules.

mod channel;
mod hc05;
mod prng;

pub use channel::{
    Channel, Delivery, Direction, ImpairmentError, LinkEvent, LinkImpairments, LinkStats,
    BITS_PER_BYTE,
};
pub use hc05::{
    try_connect, AddrParseError, BtAddr, Hc05, Hc05Config, Mode, Role, DEFAULT_BAUD, ERROR, OK,
    SUPPORTED_BAUDS,
};
pub use prng::SplitMix64;
