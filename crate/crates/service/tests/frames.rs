//! The raw frame examples in PROTOCOL.md, checked byte for byte.

use std::io::Cursor;

use negacq_service::protocol::parse_client;
use negacq_service::{ClientMessage, ServerMessage};
use tungstenite::protocol::frame::coding::{Data, OpCode};
use tungstenite::protocol::frame::Frame;

fn hex(s: &str) -> Vec<u8> {
    s.split_whitespace().map(|b| u8::from_str_radix(b, 16).unwrap()).collect()
}

#[test]
fn server_speech_frame() {
    let json = ServerMessage::Speech { tick: 40, word: "no".into() }.to_json();
    let mut out = vec![];
    Frame::message(json.into_bytes(), OpCode::Data(Data::Text), true).format(&mut out).unwrap();
    let doc = "81 27 7b 22 74 79 70 65 22 3a 22 73 70 65 65 63 68 22 2c 22 74 69 63 6b 22 3a 34 30 2c 22 77 6f 72 64 22 3a 22 6e 6f 22 7d";
    assert_eq!(out, hex(doc));
}

#[test]
fn masked_client_withdraw_frame() {
    let bytes = hex("81 93 12 34 56 78 69 16 22 01 62 51 74 42 30 43 3f 0c 7a 50 24 19 65 16 2b");
    let (header, len) = tungstenite::protocol::frame::FrameHeader::parse(&mut Cursor::new(&bytes)).unwrap().unwrap();
    assert_eq!(len, 19);
    let mut payload = bytes[bytes.len() - 19..].to_vec();
    let mask = header.mask.unwrap();
    for (i, b) in payload.iter_mut().enumerate() {
        *b ^= mask[i % 4];
    }
    assert_eq!(parse_client(std::str::from_utf8(&payload).unwrap()).unwrap(), ClientMessage::Withdraw);
}
