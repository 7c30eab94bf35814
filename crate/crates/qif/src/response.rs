//! Analytic response predictors: first-order expectation shifts, the
//! second-order deficit that realizes the filter law, the convolution form,
//! the phase law for quadrature probes, and the resummed (Magnus) prediction
//! valid at large signal amplitude.

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{QifError, Result};
use crate::filter::{DesignWarning, ImpulseResponse};
use crate::grid;
use crate::interp::Pchip;
use crate::invariant::{AuxiliaryFields, LRPhase};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Waveform {
    #[default]
    Cosine,
    Sine,
    Samples,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TimeOrigin {
    /// Waveform argument is t - t_f/2.
    #[default]
    Symmetric,
    /// Waveform argument is t.
    Zero,
}

/// Deterministic z-axis probe signal: amplitude * f_in(t).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignalSpec {
    #[serde(default)]
    pub waveform: Waveform,
    #[serde(default)]
    pub frequency_mhz: f64,
    #[serde(default)]
    pub phase_rad: f64,
    pub amplitude_rad_per_us: f64,
    #[serde(default)]
    pub samples: Option<Vec<f64>>,
    #[serde(default)]
    pub origin: TimeOrigin,
}

impl SignalSpec {
    pub fn cosine(frequency_mhz: f64, amplitude: f64) -> Self {
        SignalSpec {
            waveform: Waveform::Cosine,
            frequency_mhz,
            phase_rad: 0.0,
            amplitude_rad_per_us: amplitude,
            samples: None,
            origin: TimeOrigin::Symmetric,
        }
    }

    pub fn sine(frequency_mhz: f64, amplitude: f64) -> Self {
        SignalSpec {
            waveform: Waveform::Sine,
            ..Self::cosine(frequency_mhz, amplitude)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude_rad_per_us.is_finite() && self.amplitude_rad_per_us >= 0.0) {
            return Err(QifError::config(
                "signal.amplitude_rad_per_us: must be finite and non-negative",
            ));
        }
        if !self.frequency_mhz.is_finite() || !self.phase_rad.is_finite() {
            return Err(QifError::config("signal: frequency and phase must be finite"));
        }
        if self.waveform == Waveform::Samples {
            match &self.samples {
                Some(s) if s.len() >= 2 && grid::all_finite(s) => {}
                _ => {
                    return Err(QifError::config(
                        "signal.samples: sampled waveform needs >= 2 finite values",
                    ))
                }
            }
        }
        Ok(())
    }

    /// Unit-amplitude waveform on a grid over a protocol of length
    /// `duration`; sampled waveforms are spread uniformly over it.
    pub fn unit_waveform(&self, times: &[f64], duration: f64) -> Vec<f64> {
        let shift = match self.origin {
            TimeOrigin::Symmetric => duration / 2.0,
            TimeOrigin::Zero => 0.0,
        };
        match self.waveform {
            Waveform::Cosine => times
                .iter()
                .map(|t| (TAU * self.frequency_mhz * (t - shift) + self.phase_rad).cos())
                .collect(),
            Waveform::Sine => times
                .iter()
                .map(|t| (TAU * self.frequency_mhz * (t - shift) + self.phase_rad).sin())
                .collect(),
            Waveform::Samples => {
                let s = self.samples.as_ref().expect("validated");
                let dt = duration / (s.len() - 1) as f64;
                let p = Pchip::from_uniform(0.0, dt, s);
                times.iter().map(|&t| p.eval(t)).collect()
            }
        }
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude_rad_per_us
    }
}

/// Predicted outcome channels; fields that a given predictor does not
/// produce are left at zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct ResponsePrediction {
    /// First-order amplitude integral.
    pub a1: f64,
    /// Second-order (filtered-signal) amplitude integral.
    pub a2: f64,
    pub sigma_x_shift: f64,
    pub sigma_y_shift: f64,
    pub sigma_z_shift: f64,
    /// |z(t_f)| of the resummed rotation.
    pub magnus_z_abs: f64,
    /// Mixing angle gamma(t_f).
    pub magnus_gamma: f64,
    /// Quadrature integral against sin(beta).
    pub a_tilde: f64,
    /// Predicted final <sigma_z>.
    pub predicted_sz: f64,
}

/// First-order response; exactly zero for protocols with alpha held at pi.
pub fn first_order(
    aux: &AuxiliaryFields,
    lr: &LRPhase,
    signal: &SignalSpec,
) -> Result<ResponsePrediction> {
    signal.validate()?;
    if lr.phi_plus.len() != aux.len() {
        return Err(QifError::config("aux and LR phase grids differ"));
    }
    let times = aux.times();
    let fin = signal.unit_waveform(&times, aux.duration());
    let delta = signal.amplitude();
    let dphi = lr.delta_phi();
    let dphi0 = dphi[0];
    let dphi_f = dphi[dphi.len() - 1] - dphi0;
    if aux.is_alpha_pi() {
        // sin(alpha) = 0: the y/z channels are untouched at first order
        let integrand_x: Vec<f64> = (0..aux.len())
            .map(|k| fin[k] * (dphi[k] - dphi0).sin())
            .collect();
        let sx = -delta * grid::trapz_uniform(&integrand_x, aux.dt());
        return Ok(ResponsePrediction {
            a1: 0.0,
            sigma_x_shift: sx,
            sigma_y_shift: 0.0,
            sigma_z_shift: 0.0,
            predicted_sz: dphi_f.cos(),
            ..Default::default()
        });
    }
    let mut g_a1 = Vec::with_capacity(aux.len());
    let mut g_x = Vec::with_capacity(aux.len());
    for k in 0..aux.len() {
        let sa_cb = aux.alpha[k].sin() * aux.beta[k].cos();
        g_a1.push(fin[k] * sa_cb);
        g_x.push(fin[k] * (1.0 - sa_cb * sa_cb).max(0.0).sqrt() * (dphi[k] - dphi0).sin());
    }
    let a1 = grid::trapz_uniform(&g_a1, aux.dt());
    Ok(ResponsePrediction {
        a1,
        sigma_x_shift: -delta * grid::trapz_uniform(&g_x, aux.dt()),
        sigma_y_shift: delta * a1 * dphi_f.cos(),
        sigma_z_shift: delta * a1 * dphi_f.sin(),
        predicted_sz: dphi_f.cos() + delta * a1 * dphi_f.sin(),
        ..Default::default()
    })
}

/// Filtered-signal amplitude: integral of f_in against the effective kernel
/// cos(beta). Requires alpha held at pi.
pub fn filtered_amplitude(aux: &AuxiliaryFields, signal: &SignalSpec) -> Result<f64> {
    signal.validate()?;
    if !aux.is_alpha_pi() {
        return Err(QifError::config(
            "second-order kernel form needs alpha held at pi; use first_order + dynamics instead",
        ));
    }
    let times = aux.times();
    let fin = signal.unit_waveform(&times, aux.duration());
    let kernel = aux.effective_kernel();
    let integrand: Vec<f64> = fin.iter().zip(&kernel).map(|(f, h)| f * h).collect();
    Ok(grid::trapz_uniform(&integrand, aux.dt()))
}

/// Predicted second-order deviation of <sigma_z> from the unperturbed
/// outcome: -(delta^2/2) * A^2.
pub fn second_order_deficit(aux: &AuxiliaryFields, signal: &SignalSpec) -> Result<f64> {
    let a2 = filtered_amplitude(aux, signal)?;
    let d = signal.amplitude();
    Ok(-(d * d / 2.0) * a2 * a2)
}

/// Filtered amplitude straight from the kernel: delta * integral of
/// f_in(s) H(s) ds.  Symmetric kernels make this a true convolution at t_f;
/// asymmetric kernels are integrated the same way but flagged.
pub fn convolution_amplitude(
    h: &ImpulseResponse,
    signal: &SignalSpec,
) -> Result<(f64, Option<DesignWarning>)> {
    signal.validate()?;
    let times = h.times();
    let fin = signal.unit_waveform(&times, h.duration());
    let integrand: Vec<f64> = fin.iter().zip(h.samples()).map(|(f, s)| f * s).collect();
    let value = signal.amplitude() * grid::trapz_uniform(&integrand, h.dt());
    let warning = if h.is_symmetric(1e-9 * h.peak().max(1e-300)) {
        None
    } else {
        Some(DesignWarning::AsymmetricKernel)
    };
    Ok((value, warning))
}

/// Phase-law sweep: squared filtered amplitude of a sine probe at the
/// carrier frequency against the filter phase.
#[derive(Debug, Clone)]
pub struct PhaseLawResult {
    pub phases: Vec<f64>,
    pub amplitudes_squared: Vec<f64>,
    pub warning: Option<DesignWarning>,
}

/// For a sine probe at the carrier f0, the squared response follows
/// sin^2(phase) once the carrier oscillates fast against the envelope.
pub fn phase_law(
    envelope: &ImpulseResponse,
    f0_mhz: f64,
    phases: &[f64],
    signal: &SignalSpec,
) -> Result<PhaseLawResult> {
    signal.validate()?;
    if signal.waveform != Waveform::Sine {
        return Err(QifError::config("phase_law: signal must be a sine probe"));
    }
    if (signal.frequency_mhz - f0_mhz).abs() > 1e-12 {
        return Err(QifError::config(
            "phase_law: probe frequency must match the carrier f0",
        ));
    }
    let warning = if f0_mhz * envelope.duration() < 2.0 {
        Some(DesignWarning::SlowCarrier)
    } else {
        None
    };
    let times = envelope.times();
    let half = envelope.duration() / 2.0;
    let delta = signal.amplitude();
    let amplitudes_squared = phases
        .iter()
        .map(|&phi| {
            let integrand: Vec<f64> = envelope
                .samples()
                .iter()
                .enumerate()
                .map(|(k, th)| {
                    let u = times[k] - half;
                    th * (TAU * f0_mhz * u + phi).cos() * (TAU * f0_mhz * u).sin()
                })
                .collect();
            let a = delta * grid::trapz_uniform(&integrand, envelope.dt());
            a * a
        })
        .collect();
    Ok(PhaseLawResult {
        phases: phases.to_vec(),
        amplitudes_squared,
        warning,
    })
}

/// Resummed prediction: |z| = (delta/2) sqrt(A^2 + A~^2),
/// gamma = atan2(A, A~), <sigma_z> - 1 = -(1 - cos 2 gamma) sin^2 |z|.
pub fn magnus_predict(aux: &AuxiliaryFields, signal: &SignalSpec) -> Result<ResponsePrediction> {
    signal.validate()?;
    if !aux.is_alpha_pi() {
        return Err(QifError::config("magnus_predict needs alpha held at pi"));
    }
    let times = aux.times();
    let fin = signal.unit_waveform(&times, aux.duration());
    let cosb = aux.effective_kernel();
    let sinb: Vec<f64> = aux.beta.iter().map(|b| b.sin()).collect();
    let ga: Vec<f64> = fin.iter().zip(&cosb).map(|(f, c)| f * c).collect();
    let gt: Vec<f64> = fin.iter().zip(&sinb).map(|(f, s)| f * s).collect();
    let a = grid::trapz_uniform(&ga, aux.dt());
    let a_tilde = grid::trapz_uniform(&gt, aux.dt());
    let delta = signal.amplitude();
    let z_abs = 0.5 * delta * a.hypot(a_tilde);
    let gamma = if a == 0.0 && a_tilde == 0.0 {
        0.0
    } else {
        a.atan2(a_tilde)
    };
    let predicted_sz = 1.0 - (1.0 - (2.0 * gamma).cos()) * z_abs.sin().powi(2);
    Ok(ResponsePrediction {
        a2: a,
        a_tilde,
        magnus_z_abs: z_abs,
        magnus_gamma: gamma,
        predicted_sz,
        ..Default::default()
    })
}
