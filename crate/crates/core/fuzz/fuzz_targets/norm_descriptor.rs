#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(norm) = normsip::cli::parse_norm(text) {
            // the display form must parse back to the same norm
            let again = normsip::cli::parse_norm(&norm.to_string()).expect("display re-parses");
            assert_eq!(again.to_string(), norm.to_string());
        }
    }
});
