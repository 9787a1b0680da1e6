#![no_main]

use libfuzzer_sys::fuzz_target;

// Parsing must be a function of the text alone: a second parse of the same
// bytes yields the same accept/reject decision and the same diagnostics.
fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let a = rdsym::config::parse_config(text);
        let b = rdsym::config::parse_config(text);
        match (a, b) {
            (Ok(_), Ok(_)) => {}
            (Err(ea), Err(eb)) => assert_eq!(ea.to_string(), eb.to_string()),
            _ => panic!("parse decision not deterministic"),
        }
    }
});
