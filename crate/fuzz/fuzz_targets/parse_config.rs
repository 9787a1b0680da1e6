#![no_main]

use libfuzzer_sys::fuzz_target;

// The configuration parser is the only surface that consumes untrusted
// input; it must reject anything malformed with an error, never panic.
fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = rdsym::config::parse_config(text);
    }
});
