//! The waveform text format parser must never panic.

#![no_main]

use libfuzzer_sys::fuzz_target;
use qif::waveform::WaveformFile;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(wf) = WaveformFile::parse(s) {
            // format/parse round trip on accepted inputs
            let again = WaveformFile::parse(&wf.format()).unwrap();
            assert_eq!(again.dt_ns, wf.dt_ns);
        }
    }
});
