//! Hardware-style waveform export: the drive envelope resampled onto a
//! coarse nanosecond grid under an AWG sample budget, in a diff-able ASCII
//! format.
//!
//! Format (`# qif-waveform v1`): header lines `# dt_ns=`, `# n_samples=`,
//! `# units=rad_per_us`, optional `# decimated_from_ns=` when the requested
//! resolution was coarsened, then one decimal per line with 9 significant
//! digits.

use crate::error::{QifError, Result};
use crate::invariant::ControlFields;

pub const SAMPLE_LIMIT: usize = 1 << 16;
const VALID_DT_NS: [u32; 4] = [4, 8, 16, 32];

#[derive(Debug, Clone, PartialEq)]
pub struct WaveformFile {
    pub dt_ns: u32,
    pub samples: Vec<f64>,
    pub decimated_from_ns: Option<u32>,
}

/// Resample epsilon(t) onto a hardware grid. When the sample count exceeds
/// `max_samples` the resolution escalates 4 -> 16 -> 32 ns; still exceeding
/// the budget at 32 ns is an error.
pub fn export_waveform(
    fields: &ControlFields,
    dt_ns: u32,
    max_samples: usize,
) -> Result<WaveformFile> {
    if !VALID_DT_NS.contains(&dt_ns) {
        return Err(QifError::config(format!(
            "dt_ns: must be one of {VALID_DT_NS:?}, got {dt_ns}"
        )));
    }
    if max_samples == 0 {
        return Err(QifError::config("max_samples: must be positive"));
    }
    let t_f = fields.duration();
    let count = |ns: u32| (t_f * 1000.0 / ns as f64).round() as usize;
    let mut chosen = dt_ns;
    let mut decimated = None;
    if count(chosen) > max_samples {
        for candidate in [16u32, 32] {
            if candidate > chosen && count(candidate) <= max_samples {
                decimated = Some(dt_ns);
                chosen = candidate;
                break;
            }
        }
        if count(chosen) > max_samples {
            return Err(QifError::config(format!(
                "waveform needs {} samples even at 32 ns, above the {} limit",
                count(32),
                max_samples
            )));
        }
    }
    let n = count(chosen);
    let interp = fields.epsilon_interpolant();
    let dt_us = chosen as f64 / 1000.0;
    let samples = (0..n).map(|k| interp.eval(k as f64 * dt_us)).collect();
    Ok(WaveformFile {
        dt_ns: chosen,
        samples,
        decimated_from_ns: decimated,
    })
}

impl WaveformFile {
    pub fn format(&self) -> String {
        let mut out = String::from("# qif-waveform v1\n");
        out.push_str(&format!("# dt_ns={}\n", self.dt_ns));
        out.push_str(&format!("# n_samples={}\n", self.samples.len()));
        out.push_str("# units=rad_per_us\n");
        if let Some(orig) = self.decimated_from_ns {
            out.push_str(&format!("# decimated_from_ns={orig}\n"));
        }
        for s in &self.samples {
            out.push_str(&format!("{s:.8e}\n"));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some("# qif-waveform v1") => {}
            _ => return Err(QifError::config("waveform: missing version header")),
        }
        let mut dt_ns = None;
        let mut n_samples = None;
        let mut decimated = None;
        let mut units_ok = false;
        let mut rest = Vec::new();
        for line in lines.by_ref() {
            if let Some(kv) = line.strip_prefix("# ") {
                match kv.split_once('=') {
                    Some(("dt_ns", v)) => {
                        dt_ns = Some(v.parse::<u32>().map_err(|_| {
                            QifError::config("waveform: dt_ns is not an integer")
                        })?)
                    }
                    Some(("n_samples", v)) => {
                        n_samples = Some(v.parse::<usize>().map_err(|_| {
                            QifError::config("waveform: n_samples is not an integer")
                        })?)
                    }
                    Some(("decimated_from_ns", v)) => {
                        decimated = Some(v.parse::<u32>().map_err(|_| {
                            QifError::config("waveform: decimated_from_ns is not an integer")
                        })?)
                    }
                    Some(("units", "rad_per_us")) => units_ok = true,
                    Some(("units", other)) => {
                        return Err(QifError::config(format!(
                            "waveform: unsupported units {other:?}"
                        )))
                    }
                    _ => return Err(QifError::config("waveform: malformed header line")),
                }
            } else {
                rest.push(line);
                break;
            }
        }
        rest.extend(lines);
        let dt_ns = dt_ns.ok_or_else(|| QifError::config("waveform: missing dt_ns"))?;
        let n = n_samples.ok_or_else(|| QifError::config("waveform: missing n_samples"))?;
        if !units_ok {
            return Err(QifError::config("waveform: missing units header"));
        }
        if !VALID_DT_NS.contains(&dt_ns) {
            return Err(QifError::config("waveform: dt_ns outside the supported set"));
        }
        let mut samples = Vec::with_capacity(n);
        for line in rest {
            if line.trim().is_empty() {
                continue;
            }
            let v: f64 = line
                .trim()
                .parse()
                .map_err(|_| QifError::config(format!("waveform: bad sample {line:?}")))?;
            if !v.is_finite() {
                return Err(QifError::config("waveform: non-finite sample"));
            }
            samples.push(v);
        }
        if samples.len() != n {
            return Err(QifError::config(format!(
                "waveform: header claims {n} samples, found {}",
                samples.len()
            )));
        }
        Ok(WaveformFile {
            dt_ns,
            samples,
            decimated_from_ns: decimated,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::{design_kernel, FilterSpec};
    use crate::invariant::{fields_from_impulse, AuxMode};

    fn fields_for(t_f: f64) -> ControlFields {
        let mut spec = FilterSpec::bandpass(1.0, 0.125, t_f);
        spec.sample_rate_per_us = Some(250.0);
        let h = design_kernel(&spec, 0.9).unwrap();
        fields_from_impulse(&h, AuxMode::Simplified).unwrap()
    }

    #[test]
    fn four_microseconds_at_4ns_gives_1000_samples() {
        let wf = export_waveform(&fields_for(4.0), 4, SAMPLE_LIMIT).unwrap();
        assert_eq!(wf.samples.len(), 1000);
        assert_eq!(wf.dt_ns, 4);
        assert!(wf.decimated_from_ns.is_none());
    }

    #[test]
    fn long_protocol_auto_decimates_to_16ns() {
        let wf = export_waveform(&fields_for(300.0), 4, SAMPLE_LIMIT).unwrap();
        assert_eq!(wf.dt_ns, 16);
        assert_eq!(wf.samples.len(), 18750);
        assert_eq!(wf.decimated_from_ns, Some(4));
        let text = wf.format();
        assert!(text.contains("# decimated_from_ns=4\n"));
    }

    #[test]
    fn over_budget_at_32ns_is_rejected() {
        let err = export_waveform(&fields_for(4.0), 4, 100).unwrap_err();
        assert!(err.to_string().contains("32 ns"));
    }

    #[test]
    fn zero_field_exports_zeros() {
        let fields = ControlFields::new(0.004, vec![0.0; 1001], vec![0.0; 1001]).unwrap();
        let wf = export_waveform(&fields, 4, SAMPLE_LIMIT).unwrap();
        assert!(wf.samples.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn format_parse_round_trip_is_bit_exact() {
        let wf = export_waveform(&fields_for(4.0), 8, SAMPLE_LIMIT).unwrap();
        let text = wf.format();
        let back = WaveformFile::parse(&text).unwrap();
        assert_eq!(back.dt_ns, wf.dt_ns);
        assert_eq!(back.samples.len(), wf.samples.len());
        assert_eq!(text, back.format(), "round trip must be byte-identical");
    }

    #[test]
    fn parser_rejects_malformed_input() {
        assert!(WaveformFile::parse("").is_err());
        assert!(WaveformFile::parse("# qif-waveform v1\n# dt_ns=4\n").is_err());
        let wf = export_waveform(&fields_for(4.0), 4, SAMPLE_LIMIT).unwrap();
        let text = wf.format();
        assert!(WaveformFile::parse(&text.replace("n_samples=1000", "n_samples=999")).is_err());
        assert!(WaveformFile::parse(&text.replace("rad_per_us", "volts")).is_err());
    }

    #[test]
    fn invalid_resolution_rejected() {
        let err = export_waveform(&fields_for(4.0), 5, SAMPLE_LIMIT);
        assert!(err.is_err());
    }
}
