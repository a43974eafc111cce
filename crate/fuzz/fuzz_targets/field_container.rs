#![no_main]

use grushin_core::grushin::{decode_field, encode_field, ByteOrder};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(c) = decode_field(data) {
        // anything accepted must survive a round trip
        let bytes = encode_field(&c, ByteOrder::Little).expect("decoded container re-encodes");
        let back = decode_field(&bytes).expect("re-encoded container decodes");
        assert_eq!(back.truncation, c.truncation);
        assert_eq!(back.field.values().len(), c.field.values().len());
    }
});
