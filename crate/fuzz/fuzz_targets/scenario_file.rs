//! Scenario files: parsing never panics, and whatever parses survives its
//! canonical form.

#![no_main]

use degenlog::io::{emit_scenario, parse_scenario};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(s) = parse_scenario(src) {
        let text = emit_scenario(&s);
        let back = parse_scenario(&text).expect("canonical form reparses");
        assert_eq!(back, s);
    }
});
