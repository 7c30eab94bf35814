//! Simulation-config JSON parsing and validation must never panic.

#![no_main]

use libfuzzer_sys::fuzz_target;
use qif::experiments::SimulateConfig;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        let _ = SimulateConfig::from_json_str(s);
    }
});
