#![no_main]

use entrimur::io::{bi_observable_to_json, parse_bi_observable};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = parse_bi_observable(text) {
        let again = parse_bi_observable(&bi_observable_to_json(&m).to_string()).expect("round trip");
        assert_eq!(again.shape(), m.shape());
        let _ = (m.marginal1(), m.marginal2());
    }
});
