#![no_main]

use grushin_core::lab::parse_record_line;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(line) = std::str::from_utf8(data) else { return };
    if let Ok(r) = parse_record_line(line) {
        let _ = r.csv_rows();
        if let Ok(again) = r.to_json_line() {
            parse_record_line(&again).expect("serialized record parses");
        }
    }
});
