#![no_main]

use entrimur::io::{multi_observable_to_json, parse_multi_observable};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = parse_multi_observable(text) {
        let again = parse_multi_observable(&multi_observable_to_json(&m).to_string()).expect("round trip");
        assert_eq!(again.shape(), m.shape());
        for i in 0..m.arity() {
            let _ = m.marginal(i);
        }
    }
});
