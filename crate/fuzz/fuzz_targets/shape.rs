//! Shape expressions: parse, format, parse again.

#![no_main]

use degenlog::io::{format_shape, parse_shape};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(shape) = parse_shape(src) {
        let again = parse_shape(&format_shape(&shape)).expect("formatted shape reparses");
        assert_eq!(again, shape);
    }
});
