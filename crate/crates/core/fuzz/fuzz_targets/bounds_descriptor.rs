#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(names) = normsip::cli::parse_bounds(text) {
            assert!(!names.is_empty());
        }
    }
});
