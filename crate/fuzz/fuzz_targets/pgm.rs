//! Binary PGM decoder: decode, re-encode, decode again.

#![no_main]

use degenlog::io::{decode_pgm, encode_pgm};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(img) = decode_pgm(data) {
        assert_eq!(img.pixels.len(), img.width * img.height);
        let again = decode_pgm(&encode_pgm(&img)).expect("encoded image decodes");
        assert_eq!(again, img);
    }
});
