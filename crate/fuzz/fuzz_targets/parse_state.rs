#![no_main]

use entrimur::io::{parse_state, state_to_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(s) = parse_state(text) {
        let again = parse_state(&state_to_json(&s).to_string()).expect("round trip");
        assert_eq!(again.dim(), s.dim());
    }
});
