#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(list) = normsip::cli::parse_eps_list(text) {
            assert!(list.iter().all(|e| e.is_finite()));
        }
    }
});
