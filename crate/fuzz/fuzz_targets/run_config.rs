#![no_main]

use grushin_core::config::{parse_run_config, RunConfig};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = parse_run_config(text);
    if let Ok(c) = RunConfig::from_toml(text) {
        if let Ok(again) = c.to_toml() {
            let back = RunConfig::from_toml(&again).expect("serialized config parses");
            // compared as text so that NaN fields count as equal
            assert_eq!(back.to_toml().expect("reserializes"), again);
        }
    }
});
