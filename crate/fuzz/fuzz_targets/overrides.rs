//! `--set key=value` overrides applied to a valid base file.

#![no_main]

use degenlog::io::{apply_overrides, parse_scenario};
use libfuzzer_sys::fuzz_target;

const BASE: &str = "[equation]\nlambda = 30.0\n\n[kset]\nkind = \"static\"\nshape = \"ball(0.5, 0.5, 0.3)\"\n";

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let overrides: Vec<String> = text.lines().take(8).map(str::to_string).collect();
    if let Ok(edited) = apply_overrides(BASE, &overrides) {
        // the edited text is well-formed TOML; the scenario may still be invalid
        let _ = parse_scenario(&edited);
    }
});
