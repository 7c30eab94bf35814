//! Noise-model JSON parsing, validation and a short synthesis must never
//! panic.

#![no_main]

use libfuzzer_sys::fuzz_target;
use qif::noise::{synthesize, NoiseModel};

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(model) = serde_json::from_str::<NoiseModel>(s) {
            if model.validate().is_ok() {
                let _ = synthesize(&model, 0.5, 0.05, 0);
            }
        }
    }
});
