//! Pushes bytes through the emulated 9600 baud link: raw throughput with a
//! saturated sender, then what loss and bit errors do to a frame stream.
//!
//! ```bash
//! cargo run -p greenhouse-link --example lossy_channel
//! ```

use greenhouse_link::btlink::{Channel, Direction, LinkImpairments};
use greenhouse_link::wireproto::{encode_frame, Decoder, FieldId, Frame};

const M2S: Direction = Direction::MasterToSlave;

fn link(drop_prob: f64, bit_error_prob: f64) -> LinkImpairments {
    LinkImpairments {
        latency_ms: 0,
        drop_prob,
        bit_error_prob,
        connected: true,
    }
}

fn main() {
    let mut ch = Channel::new(9600, link(0.0, 0.0), 1);
    ch.record_deliveries();
    ch.send_bytes(M2S, &[0x55; 5000], 0);
    let first_second = ch.poll_receive(M2S, 999).len();
    println!("saturated 9600 baud: {first_second} bytes in the first second (limit 960)");
    let rest = ch.poll_receive(M2S, 10_000).len();
    println!(
        "remaining {rest} bytes drained by t={} ms\n",
        ch.deliveries().last().map_or(0, |d| d.at_ms)
    );

    println!(
        "{:>9} {:>9} {:>8} {:>8} {:>9}",
        "drop", "biterr", "sent", "decoded", "rejected"
    );
    for (drop_prob, bit_error_prob) in [
        (0.0, 0.0),
        (0.01, 0.0),
        (0.0, 0.01),
        (0.05, 0.05),
        (0.2, 0.0),
    ] {
        let mut ch = Channel::new(9600, link(drop_prob, bit_error_prob), 42);
        let mut dec = Decoder::new();
        let mut decoded = 0;
        let frames = 1000;
        for i in 0..frames {
            let t = i as u64 * 200;
            let f = Frame::new(FieldId::Temperature, i as u8, 250).unwrap();
            ch.send_bytes(M2S, &encode_frame(&f).unwrap(), t);
            decoded += dec.push_all(&ch.poll_receive(M2S, t + 199)).len();
        }
        println!(
            "{drop_prob:>9} {bit_error_prob:>9} {frames:>8} {decoded:>8} {:>9}",
            dec.rejected_bytes()
        );
    }
}
