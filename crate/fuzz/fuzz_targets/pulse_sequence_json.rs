//! Pulse-sequence JSON parsing and validation must never panic.

#![no_main]

use libfuzzer_sys::fuzz_target;
use qif::cpmg::PulseSequence;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(seq) = PulseSequence::from_json_str(s) {
            let _ = qif::cpmg::sequence_to_trace(&seq, 1e-2);
        }
    }
});
