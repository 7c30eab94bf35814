//! FIR impulse-response design: windowed-sinc low-pass prototypes, carrier
//! modulation for band-pass and multi-band kernels, normalization, smooth
//! evaluation, and spectral transforms.
//!
//! Kernels are sampled on a uniform grid over `[0, t_f]`, vanish exactly at
//! both endpoints, and are kept strictly inside (-1, 1) so they can be mapped
//! onto invariant auxiliary angles.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::error::{QifError, Result};
use crate::interp::Pchip;

/// Window applied to the sinc prototype.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum WindowKind {
    #[default]
    Hamming,
    Blackman,
    Hann,
}

impl WindowKind {
    fn value(self, i: usize, n: usize) -> f64 {
        let x = TAU * i as f64 / (n - 1) as f64;
        match self {
            WindowKind::Hamming => 0.54 - 0.46 * x.cos(),
            WindowKind::Hann => 0.5 - 0.5 * x.cos(),
            WindowKind::Blackman => 0.42 - 0.5 * x.cos() + 0.08 * (2.0 * x).cos(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterKind {
    Lowpass,
    Bandpass,
    Multiband,
}

/// One passband: center frequency, carrier phase, relative weight.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BandCenter {
    pub f0_mhz: f64,
    #[serde(default)]
    pub phase_rad: f64,
    #[serde(default = "one")]
    pub weight: f64,
}

fn one() -> f64 {
    1.0
}

impl BandCenter {
    pub fn new(f0_mhz: f64) -> Self {
        BandCenter {
            f0_mhz,
            phase_rad: 0.0,
            weight: 1.0,
        }
    }

    pub fn with_phase(mut self, phase_rad: f64) -> Self {
        self.phase_rad = phase_rad;
        self
    }
}

/// Declarative description of a filter kernel.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FilterSpec {
    pub kind: FilterKind,
    #[serde(default)]
    pub centers: Vec<BandCenter>,
    /// Low-pass prototype cutoff; the full passband width is twice this.
    pub cutoff_mhz: f64,
    pub duration_us: f64,
    #[serde(default)]
    pub taps: Option<usize>,
    #[serde(default)]
    pub sample_rate_per_us: Option<f64>,
    #[serde(default)]
    pub window: WindowKind,
}

/// Default design-grid sample rate used when a `FilterSpec` omits it.
pub const DEFAULT_SAMPLE_RATE: f64 = 500.0;

impl FilterSpec {
    pub fn bandpass(f0_mhz: f64, cutoff_mhz: f64, duration_us: f64) -> Self {
        FilterSpec {
            kind: FilterKind::Bandpass,
            centers: vec![BandCenter::new(f0_mhz)],
            cutoff_mhz,
            duration_us,
            taps: None,
            sample_rate_per_us: None,
            window: WindowKind::Hamming,
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let spec: FilterSpec = serde_json::from_str(s)?;
        spec.validate()?;
        Ok(spec)
    }

    /// Concrete (taps, sample rate) for this spec; derives defaults when the
    /// fields are left open, keeping the sample rate at least 20x the highest
    /// carrier.
    pub fn resolved_grid(&self) -> Result<(usize, f64)> {
        let f0_max = self
            .centers
            .iter()
            .map(|c| c.f0_mhz)
            .fold(0.0f64, f64::max);
        let fs = match self.sample_rate_per_us {
            Some(fs) => fs,
            None => DEFAULT_SAMPLE_RATE.max((20.0 * f0_max).ceil()),
        };
        let taps = match self.taps {
            Some(t) => t,
            None => {
                // nearest odd tap count keeps the implied duration within
                // one grid step of the requested one
                let n = (self.duration_us * fs).round() as usize;
                let t = n + 1;
                if t % 2 == 1 {
                    t
                } else if (n as f64 - 1.0 - self.duration_us * fs).abs()
                    <= (n as f64 + 1.0 - self.duration_us * fs).abs()
                {
                    t - 1
                } else {
                    t + 1
                }
                .max(3)
            }
        };
        if taps < 3 || taps % 2 == 0 {
            return Err(QifError::config(format!(
                "taps: must be odd and >= 3, got {taps}"
            )));
        }
        let implied = (taps - 1) as f64 / fs;
        if (implied - self.duration_us).abs() > 1.0 / fs + 1e-12 {
            return Err(QifError::config(format!(
                "taps/sample_rate_per_us: duration {} us inconsistent with (taps-1)/rate = {} us",
                self.duration_us, implied
            )));
        }
        Ok((taps, fs))
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |v: f64, name: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(QifError::config(format!("{name}: must be finite")))
            }
        };
        finite(self.cutoff_mhz, "cutoff_mhz")?;
        finite(self.duration_us, "duration_us")?;
        if self.duration_us <= 0.0 {
            return Err(QifError::config("duration_us: must be positive"));
        }
        if self.cutoff_mhz <= 0.0 {
            return Err(QifError::config("cutoff_mhz: must be positive"));
        }
        if let Some(fs) = self.sample_rate_per_us {
            finite(fs, "sample_rate_per_us")?;
            if fs <= 0.0 {
                return Err(QifError::config("sample_rate_per_us: must be positive"));
            }
        }
        for (i, c) in self.centers.iter().enumerate() {
            finite(c.f0_mhz, "centers.f0_mhz")?;
            finite(c.phase_rad, "centers.phase_rad")?;
            finite(c.weight, "centers.weight")?;
            if c.f0_mhz < 0.0 {
                return Err(QifError::config(format!(
                    "centers[{i}].f0_mhz: must be non-negative"
                )));
            }
        }
        let (_, fs) = self.resolved_grid()?;
        if self.cutoff_mhz >= fs / 2.0 {
            return Err(QifError::config(format!(
                "cutoff_mhz: {} is at or above the Nyquist frequency {}",
                self.cutoff_mhz,
                fs / 2.0
            )));
        }
        match self.kind {
            FilterKind::Lowpass => {}
            FilterKind::Bandpass => {
                if self.centers.len() != 1 {
                    return Err(QifError::config(
                        "centers: bandpass takes exactly one center",
                    ));
                }
            }
            FilterKind::Multiband => {
                if self.centers.is_empty() {
                    return Err(QifError::config(
                        "centers: multiband needs at least one center",
                    ));
                }
            }
        }
        Ok(())
    }

    fn lowpass_prototype(&self) -> FilterSpec {
        FilterSpec {
            kind: FilterKind::Lowpass,
            centers: Vec::new(),
            ..self.clone()
        }
    }
}

/// Conditions worth surfacing that are not errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesignWarning {
    /// Two multiband centers closer than the full passband width.
    BandOverlap,
    /// A convolution identity was applied to a kernel that is not
    /// time-symmetric.
    AsymmetricKernel,
    /// Carrier completes too few cycles for phase-law averaging.
    SlowCarrier,
}

/// Sampled filter kernel H(t) on a uniform grid over `[0, t_f]`.
#[derive(Debug, Clone)]
pub struct ImpulseResponse {
    samples: Vec<f64>,
    duration: f64,
    spec: Option<FilterSpec>,
    warnings: Vec<DesignWarning>,
}

impl ImpulseResponse {
    /// Wrap raw samples. Endpoints must vanish and |H| must stay below 1.
    pub fn from_samples(samples: Vec<f64>, duration: f64) -> Result<Self> {
        if samples.len() < 3 {
            return Err(QifError::config("kernel needs at least 3 samples"));
        }
        if duration <= 0.0 || !duration.is_finite() {
            return Err(QifError::config("kernel duration must be positive"));
        }
        if !crate::grid::all_finite(&samples) {
            return Err(QifError::config("kernel samples must be finite"));
        }
        if samples[0] != 0.0 || *samples.last().unwrap() != 0.0 {
            return Err(QifError::config("kernel must vanish at both endpoints"));
        }
        if samples.iter().any(|s| s.abs() >= 1.0) {
            return Err(QifError::config("kernel amplitude must stay inside (-1,1)"));
        }
        Ok(ImpulseResponse {
            samples,
            duration,
            spec: None,
            warnings: Vec::new(),
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn spec(&self) -> Option<&FilterSpec> {
        self.spec.as_ref()
    }

    pub fn warnings(&self) -> &[DesignWarning] {
        &self.warnings
    }

    pub fn dt(&self) -> f64 {
        self.duration / (self.samples.len() - 1) as f64
    }

    pub fn sample_rate(&self) -> f64 {
        1.0 / self.dt()
    }

    pub fn times(&self) -> Vec<f64> {
        crate::grid::uniform(0.0, self.dt(), self.samples.len())
    }

    /// Peak absolute sample.
    pub fn peak(&self) -> f64 {
        self.samples.iter().fold(0.0f64, |a, s| a.max(s.abs()))
    }

    /// Time-symmetric about t_f/2 within `tol`?
    pub fn is_symmetric(&self, tol: f64) -> bool {
        let n = self.samples.len();
        (0..n / 2).all(|k| (self.samples[k] - self.samples[n - 1 - k]).abs() <= tol)
    }

    /// Monotone-cubic interpolant over the sample grid.
    pub fn interpolant(&self) -> Pchip {
        Pchip::from_uniform(0.0, self.dt(), &self.samples)
    }

    /// C1-continuous evaluation with compact support: 0 outside `[0, t_f]`.
    pub fn evaluate(&self, t: f64) -> f64 {
        if t < 0.0 || t > self.duration {
            return 0.0;
        }
        self.interpolant().eval(t)
    }

    /// CSV export, columns `t_us,h`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_us,h\n");
        let dt = self.dt();
        for (k, s) in self.samples.iter().enumerate() {
            out.push_str(&format!("{},{}\n", k as f64 * dt, s));
        }
        out
    }
}

/// Windowed-sinc low-pass prototype with unit DC gain and exact zero
/// endpoints.
///
/// Windows with a nonzero endpoint pedestal (Hamming) are remapped as
/// (w - w_end)/(1 - w_end) so the taps vanish smoothly at both ends.  Hard
/// zeroing instead would leave a kink in the kernel, and the drive field is
/// its time derivative.
pub fn design_lowpass(spec: &FilterSpec) -> Result<ImpulseResponse> {
    if spec.kind != FilterKind::Lowpass {
        return Err(QifError::config("kind: design_lowpass needs kind=lowpass"));
    }
    spec.validate()?;
    let (taps, fs) = spec.resolved_grid()?;
    let dt = 1.0 / fs;
    let mid = (taps - 1) as f64 / 2.0;
    let fc = spec.cutoff_mhz;
    let w_end = spec.window.value(0, taps);
    let mut h = vec![0.0; taps];
    // fill half and mirror so the symmetry holds bit-exactly
    for n in 0..=(taps - 1) / 2 {
        let x = 2.0 * fc * (n as f64 - mid) * dt;
        let w = (spec.window.value(n, taps) - w_end) / (1.0 - w_end);
        let v = 2.0 * fc * dt * sinc(x) * w;
        h[n] = v;
        h[taps - 1 - n] = v;
    }
    h[0] = 0.0;
    h[taps - 1] = 0.0;
    let dc: f64 = h.iter().sum();
    if dc.abs() < f64::EPSILON {
        return Err(QifError::numerical("low-pass design collapsed to zero DC"));
    }
    for v in h.iter_mut() {
        *v /= dc;
    }
    Ok(ImpulseResponse {
        samples: h,
        duration: (taps - 1) as f64 * dt,
        spec: Some(spec.clone()),
        warnings: Vec::new(),
    })
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// Shift a low-pass envelope onto a carrier:
/// `H(t) = theta(t) * cos(2 pi f0 (t - t_f/2) + phase)`.
pub fn modulate_bandpass(theta: &ImpulseResponse, f0_mhz: f64, phase_rad: f64) -> ImpulseResponse {
    let dt = theta.dt();
    let mid = (theta.samples.len() - 1) as f64 / 2.0;
    let samples = theta
        .samples
        .iter()
        .enumerate()
        .map(|(n, s)| s * (TAU * f0_mhz * ((n as f64 - mid) * dt) + phase_rad).cos())
        .collect();
    ImpulseResponse {
        samples,
        duration: theta.duration,
        spec: theta.spec.clone(),
        warnings: theta.warnings.clone(),
    }
}

/// Sum of carrier-modulated copies of the low-pass envelope, normalized by
/// the number of bands.
pub fn combine_multiband(spec: &FilterSpec) -> Result<ImpulseResponse> {
    if spec.kind != FilterKind::Multiband {
        return Err(QifError::config(
            "kind: combine_multiband needs kind=multiband",
        ));
    }
    spec.validate()?;
    let theta = design_lowpass(&spec.lowpass_prototype())?;
    let dt = theta.dt();
    let mid = (theta.samples.len() - 1) as f64 / 2.0;
    let k = spec.centers.len() as f64;
    let samples: Vec<f64> = theta
        .samples
        .iter()
        .enumerate()
        .map(|(n, s)| {
            let tsym = (n as f64 - mid) * dt;
            let carrier: f64 = spec
                .centers
                .iter()
                .map(|c| c.weight * (TAU * c.f0_mhz * tsym + c.phase_rad).cos())
                .sum();
            s * carrier / k
        })
        .collect();
    let mut warnings = Vec::new();
    'outer: for (i, a) in spec.centers.iter().enumerate() {
        for b in spec.centers.iter().skip(i + 1) {
            if (a.f0_mhz - b.f0_mhz).abs() < 2.0 * spec.cutoff_mhz && a.f0_mhz != b.f0_mhz {
                warnings.push(DesignWarning::BandOverlap);
                break 'outer;
            }
        }
    }
    Ok(ImpulseResponse {
        samples,
        duration: theta.duration,
        spec: Some(spec.clone()),
        warnings,
    })
}

/// Rescale so the peak equals `target_peak`, keeping the endpoints at zero.
pub fn normalize_kernel(h: &ImpulseResponse, target_peak: f64) -> Result<ImpulseResponse> {
    if !(target_peak > 0.0 && target_peak < 1.0) {
        return Err(QifError::config("target_peak: must lie in (0, 1)"));
    }
    let peak = h.peak();
    if peak == 0.0 {
        return Err(QifError::config("kernel is identically zero"));
    }
    let scale = target_peak / peak;
    let mut out = h.clone();
    for v in out.samples.iter_mut() {
        *v *= scale;
    }
    Ok(out)
}

/// Design the kernel a spec describes and normalize its peak.
pub fn design_kernel(spec: &FilterSpec, target_peak: f64) -> Result<ImpulseResponse> {
    spec.validate()?;
    let raw = match spec.kind {
        FilterKind::Lowpass => design_lowpass(spec)?,
        FilterKind::Bandpass => {
            let theta = design_lowpass(&spec.lowpass_prototype())?;
            let c = spec.centers[0];
            modulate_bandpass(&theta, c.f0_mhz, c.phase_rad)
        }
        FilterKind::Multiband => combine_multiband(spec)?,
    };
    normalize_kernel(&raw, target_peak)
}

/// Complex spectral response on a frequency grid.
#[derive(Debug, Clone)]
pub struct TransferFunction {
    pub frequencies: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl TransferFunction {
    pub fn magnitude(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn magnitude_squared(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// Index of the largest magnitude.
    pub fn argmax(&self) -> usize {
        let mags = self.magnitude();
        let mut best = 0;
        for (i, m) in mags.iter().enumerate() {
            if *m > mags[best] {
                best = i;
            }
        }
        best
    }
}

/// Fourier transform of the kernel about its midpoint, evaluated on `f_grid`:
/// `dt * sum_n H[n] exp(-i 2 pi f (t_n - t_f/2))`.
pub fn transfer_function(h: &ImpulseResponse, f_grid: &[f64]) -> TransferFunction {
    let dt = h.dt();
    let mid = (h.samples.len() - 1) as f64 / 2.0;
    let values = f_grid
        .iter()
        .map(|&f| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (n, s) in h.samples.iter().enumerate() {
                let arg = -TAU * f * ((n as f64 - mid) * dt);
                acc += s * Complex64::new(arg.cos(), arg.sin());
            }
            acc * dt
        })
        .collect();
    TransferFunction {
        frequencies: f_grid.to_vec(),
        values,
    }
}

/// Cosine projection about the kernel midpoint; for symmetric real kernels
/// its magnitude equals the Fourier magnitude.
pub fn cosine_transform(h: &ImpulseResponse, f_grid: &[f64]) -> Vec<f64> {
    let dt = h.dt();
    let mid = (h.samples.len() - 1) as f64 / 2.0;
    f_grid
        .iter()
        .map(|&f| {
            h.samples
                .iter()
                .enumerate()
                .map(|(n, s)| s * (TAU * f * ((n as f64 - mid) * dt)).cos())
                .sum::<f64>()
                * dt
        })
        .collect()
}

/// Inverse transform of a one-sided target spectrum into a time kernel over
/// `[0, duration]`, edge-windowed to force zero endpoints.
pub fn design_from_spectrum(target: &TransferFunction, duration_us: f64) -> Result<ImpulseResponse> {
    if target.frequencies.len() < 2 {
        return Err(QifError::config("target: needs at least two frequency bins"));
    }
    if target.frequencies.len() != target.values.len() {
        return Err(QifError::config("target: frequency/value length mismatch"));
    }
    if !(duration_us.is_finite() && duration_us > 0.0) {
        return Err(QifError::config("duration_us: must be positive"));
    }
    let f = &target.frequencies;
    if !crate::grid::all_finite(f) || f[0] < 0.0 {
        return Err(QifError::config("target: frequencies must be finite and non-negative"));
    }
    if target.values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(QifError::config("target: values must be finite"));
    }
    let df = f[1] - f[0];
    if df <= 0.0 {
        return Err(QifError::config("target: frequencies must be strictly increasing"));
    }
    for w in f.windows(2) {
        if ((w[1] - w[0]) - df).abs() > 1e-9 * df.max(1.0) {
            return Err(QifError::config("target: frequency grid must be uniform"));
        }
    }
    if 1.0 / df < duration_us - 1e-9 {
        return Err(QifError::config(format!(
            "target: grid spacing {df} MHz cannot represent a {duration_us} us kernel",
        )));
    }
    let peak = target.values.iter().fold(0.0f64, |a, v| a.max(v.norm()));
    if peak > 0.0 {
        let edge = target.values[target.values.len().saturating_sub(2)..]
            .iter()
            .fold(0.0f64, |a, v| a.max(v.norm()));
        if edge > 1e-2 * peak {
            return Err(QifError::config(
                "target: significant energy at the top of the band would alias \
                 on the implied time grid",
            ));
        }
    }
    let f_max = *f.last().unwrap();
    // 4x oversampled relative to the band edge so the smooth interpolant of
    // the result resolves the fastest carrier cleanly
    let dt_implied = 1.0 / (8.0 * f_max);
    let mut taps = (duration_us / dt_implied).round() as usize + 1;
    taps = taps.clamp(9, 65_535);
    if taps % 2 == 0 {
        taps += 1;
    }
    let dt = duration_us / (taps - 1) as f64;
    let half = duration_us / 2.0;
    let mut samples: Vec<f64> = (0..taps)
        .map(|n| {
            let u = n as f64 * dt - half;
            let mut acc = 0.0;
            for (j, v) in target.values.iter().enumerate() {
                let arg = TAU * f[j] * u;
                let re = v.re * arg.cos() - v.im * arg.sin();
                acc += if f[j] == 0.0 { re } else { 2.0 * re };
            }
            acc * df
        })
        .collect();
    apply_tukey(&mut samples, 0.1);
    samples[0] = 0.0;
    samples[taps - 1] = 0.0;
    let peak_t = samples.iter().fold(0.0f64, |a, s| a.max(s.abs()));
    if peak_t >= 1.0 {
        let scale = 0.9 / peak_t;
        for s in samples.iter_mut() {
            *s *= scale;
        }
    }
    Ok(ImpulseResponse {
        samples,
        duration: duration_us,
        spec: None,
        warnings: Vec::new(),
    })
}

fn apply_tukey(samples: &mut [f64], alpha: f64) {
    let n = samples.len();
    let edge = ((alpha / 2.0) * (n - 1) as f64).ceil() as usize;
    for k in 0..n {
        let x = k as f64 / (n - 1) as f64;
        let w = if x < alpha / 2.0 {
            0.5 * (1.0 + (PI * (2.0 * x / alpha - 1.0)).cos())
        } else if x > 1.0 - alpha / 2.0 {
            0.5 * (1.0 + (PI * (2.0 * (1.0 - x) / alpha - 1.0)).cos())
        } else {
            1.0
        };
        samples[k] *= w;
    }
    let _ = edge;
}
