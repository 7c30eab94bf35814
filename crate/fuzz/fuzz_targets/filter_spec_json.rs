//! Filter-spec JSON parsing and validation must never panic.

#![no_main]

use libfuzzer_sys::fuzz_target;
use qif::filter::FilterSpec;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(spec) = FilterSpec::from_json_str(s) {
            // a spec that validates must design without panicking
            let _ = qif::filter::design_kernel(&spec, 0.9);
        }
    }
});
