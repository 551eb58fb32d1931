#![no_main]

use libfuzzer_sys::fuzz_target;
use normsip::cli::{build_report, Dataset, Overrides, ReportOptions};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(dataset) = Dataset::from_json(text, &Overrides::default()) {
        if dataset.vectors.len() * dataset.vectors[0].dim() <= 256 {
            let _ = build_report(&dataset, &ReportOptions::default());
        }
    }
});
