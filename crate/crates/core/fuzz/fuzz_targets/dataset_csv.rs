#![no_main]

use libfuzzer_sys::fuzz_target;
use normsip::cli::{build_report, Dataset, Overrides, ReportOptions};
use normsip::space::NormSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let overrides = Overrides {
        norm: Some(NormSpec::lp(1.0).unwrap()),
        ..Overrides::default()
    };
    if let Ok(dataset) = Dataset::from_csv(text, &overrides) {
        if dataset.vectors.len() * dataset.vectors[0].dim() <= 256 {
            let _ = build_report(&dataset, &ReportOptions::default());
        }
    }
});
