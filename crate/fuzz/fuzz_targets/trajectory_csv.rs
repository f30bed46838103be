//! Trajectory CSV reader on arbitrary bytes.

#![no_main]

use degenlog::io::read_trajectory_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = read_trajectory_csv(data);
});
