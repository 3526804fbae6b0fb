#![no_main]

use entrimur::io::{observable_to_json, parse_observable};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(o) = parse_observable(text) {
        // accepted input survives a round trip
        let again = parse_observable(&observable_to_json(&o).to_string()).expect("round trip");
        assert_eq!(again.len(), o.len());
        assert_eq!(again.dim(), o.dim());
    }
});
