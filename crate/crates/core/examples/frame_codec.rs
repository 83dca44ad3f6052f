//! Encodes a few frames, then feeds the decoder a stream with garbage, a
//! corrupted frame and a truncated frame mixed in.
//!
//! ```bash
//! cargo run -p greenhouse-link --example frame_codec
//! ```

use greenhouse_link::wireproto::{encode_frame, Decoder, FieldId, Frame};

fn hex(bytes: &[u8]) -> String {
    bytes
        .iter()
        .map(|b| format!("{b:02X}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn main() {
    let frames = [
        Frame::new(FieldId::Temperature, 7, 253).unwrap(),
        Frame::new(FieldId::Rain, 0, 0).unwrap(),
        Frame::new(FieldId::SoilCounts, 255, 2048).unwrap(),
    ];
    for f in &frames {
        println!(
            "{:<11} seq={:<3} value={:<5} -> {}",
            f.field,
            f.seq,
            f.value,
            hex(&encode_frame(f).unwrap())
        );
    }

    let mut stream = vec![0x00, 0x13, 0x37];
    stream.extend_from_slice(&encode_frame(&frames[0]).unwrap());
    let mut bad = encode_frame(&frames[1]).unwrap();
    bad[3] ^= 0x04;
    stream.extend_from_slice(&bad);
    stream.extend_from_slice(&[0xAA, 0x02, 0x01]);
    stream.extend_from_slice(&encode_frame(&frames[2]).unwrap());

    println!("\nstream: {}", hex(&stream));
    let mut decoder = Decoder::new();
    for (i, &b) in stream.iter().enumerate() {
        if let Some(f) = decoder.push(b) {
            println!("byte {i:>2}: decoded {f:?}");
        }
    }
    println!(
        "decoded {} frames, rejected {} bytes",
        decoder.decoded_frames(),
        decoder.rejected_bytes()
    );
}
