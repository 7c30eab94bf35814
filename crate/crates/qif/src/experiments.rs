//! Experiment configuration and sweep orchestration: frequency responses,
//! phase and amplitude sweeps, filter-center and CPMG maps, amplitude
//! robustness, and duration-decay comparisons, all emitting [`ResultTable`]s
//! with reproducible seeding and prediction columns.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cpmg::{build_cpmg, run_cpmg_protocol, sign_function_transform};
use crate::dynamics::{
    ensemble_average, propagate_with_pulses, reduce_ensemble, simulate_protocol, EnsembleResult,
    HamiltonianTrace, PropagationResult, PulseAxis, QubitState, StepConfig,
};
use crate::error::{QifError, Result};
use crate::filter::{design_kernel, FilterKind, FilterSpec, ImpulseResponse};
use crate::invariant::{aux_from_impulse, fields_from_aux, AuxMode, AuxiliaryFields, ControlFields};
use crate::noise::{synthesize, NoiseModel};
use crate::response::{magnus_predict, second_order_deficit, SignalSpec, Waveform};
use crate::table::ResultTable;

/// Inclusive linear axis.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Axis {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(start: f64, stop: f64, count: usize) -> Self {
        Axis { start, stop, count }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(QifError::config(format!("{name}: bounds must be finite")));
        }
        if self.count == 0 {
            return Err(QifError::config(format!("{name}: count must be >= 1")));
        }
        if self.count > 1 && self.stop <= self.start {
            return Err(QifError::config(format!(
                "{name}: stop must exceed start for count > 1"
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|k| self.start + k as f64 * step).collect()
    }

    pub fn step(&self) -> f64 {
        if self.count <= 1 {
            0.0
        } else {
            (self.stop - self.start) / (self.count - 1) as f64
        }
    }
}

/// Affine photon-count model for the two-measurement contrast readout.
/// With bright = 1 and dark = -1 the map is the identity on <sigma_z>.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ReadoutModel {
    pub bright_level: f64,
    pub dark_level: f64,
    #[serde(default)]
    pub enabled: bool,
}

impl ReadoutModel {
    pub fn validate(&self) -> Result<()> {
        if !self.enabled {
            return Ok(());
        }
        if !(self.bright_level.is_finite() && self.dark_level.is_finite()) {
            return Err(QifError::config("readout: levels must be finite"));
        }
        if self.bright_level <= self.dark_level {
            return Err(QifError::config(
                "readout.bright_level: must exceed dark_level",
            ));
        }
        Ok(())
    }

    /// Count level for a preparation with expectation z.
    pub fn map(&self, z: f64) -> f64 {
        self.dark_level + (self.bright_level - self.dark_level) * (1.0 + z) / 2.0
    }

    /// (S1 - S2) / ((S1 + S2)/2) with S1, S2 the two reference preparations.
    pub fn contrast(&self, z: f64) -> Result<f64> {
        if !self.enabled {
            return Ok(z);
        }
        let s1 = self.map(z);
        let s2 = self.map(-z);
        let mean = 0.5 * (s1 + s2);
        if mean.abs() < 1e-12 {
            return Err(QifError::numerical(
                "readout contrast undefined: reference levels average to zero",
            ));
        }
        Ok((s1 - s2) / mean)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    FreqResponse,
    PhaseSweep,
    AmplitudeSweep,
    FilterCenterMap,
    CpmgMap,
    AmplitudeRobustness,
    DurationDecay,
    DualBand,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::FreqResponse => "freq_response",
            ExperimentKind::PhaseSweep => "phase_sweep",
            ExperimentKind::AmplitudeSweep => "amplitude_sweep",
            ExperimentKind::FilterCenterMap => "filter_center_map",
            ExperimentKind::CpmgMap => "cpmg_map",
            ExperimentKind::AmplitudeRobustness => "amplitude_robustness",
            ExperimentKind::DurationDecay => "duration_decay",
            ExperimentKind::DualBand => "dual_band",
        }
    }
}

/// Probe settings shared across a sweep (frequency comes from the axis).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SignalConfig {
    #[serde(default)]
    pub waveform: Waveform,
    #[serde(default = "default_amplitude")]
    pub amplitude_rad_per_us: f64,
    #[serde(default)]
    pub phase_rad: f64,
}

fn default_amplitude() -> f64 {
    0.05
}

impl Default for SignalConfig {
    fn default() -> Self {
        SignalConfig {
            waveform: Waveform::Cosine,
            amplitude_rad_per_us: default_amplitude(),
            phase_rad: 0.0,
        }
    }
}

impl SignalConfig {
    fn at_frequency(&self, f_mhz: f64) -> SignalSpec {
        SignalSpec {
            waveform: self.waveform,
            frequency_mhz: f_mhz,
            phase_rad: self.phase_rad,
            amplitude_rad_per_us: self.amplitude_rad_per_us,
            samples: None,
            origin: Default::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CpmgConfig {
    pub n_pulses: Vec<usize>,
    #[serde(default)]
    pub pulse_width_us: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FrequencyMode {
    /// Keep the carrier at the configured absolute frequency for every
    /// duration (redesigning the kernel each time).
    #[default]
    Fixed,
    /// Scale the carrier as 1/duration so the cycle count stays fixed.
    InverseDuration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BandwidthMode {
    /// Scale the prototype cutoff as 1/duration so the kernel fills the
    /// protocol window at every duration.
    #[default]
    Fractional,
    /// Keep the cutoff at its configured absolute value.
    Absolute,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub experiment: ExperimentKind,
    pub filter: FilterSpec,
    #[serde(default)]
    pub signal: SignalConfig,
    /// Master seed; mandatory so reruns are reproducible by construction.
    pub seed: u64,
    #[serde(default)]
    pub probe_freq_mhz: Option<Axis>,
    #[serde(default)]
    pub phase_rad: Option<Axis>,
    #[serde(default)]
    pub amplitude_rad_per_us: Option<Axis>,
    #[serde(default)]
    pub filter_centers_mhz: Option<Axis>,
    #[serde(default)]
    pub scale: Option<Axis>,
    #[serde(default)]
    pub durations_us: Option<Vec<f64>>,
    #[serde(default)]
    pub cpmg: Option<CpmgConfig>,
    #[serde(default)]
    pub noise: Option<NoiseModel>,
    #[serde(default = "default_trials")]
    pub trials: u32,
    #[serde(default = "default_dt")]
    pub dt_us: f64,
    #[serde(default)]
    pub aux_mode: AuxMode,
    #[serde(default = "default_peak")]
    pub normalize_peak: f64,
    #[serde(default)]
    pub readout: Option<ReadoutModel>,
    #[serde(default)]
    pub frequency_mode: FrequencyMode,
    #[serde(default)]
    pub bandwidth_mode: BandwidthMode,
    #[serde(default)]
    pub output: Option<String>,
}

fn default_trials() -> u32 {
    1
}
fn default_dt() -> f64 {
    1e-3
}
fn default_peak() -> f64 {
    0.9
}

impl SweepConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: SweepConfig = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.filter.validate()?;
        if !(self.dt_us.is_finite() && self.dt_us > 0.0) {
            return Err(QifError::config("dt_us: must be positive"));
        }
        if !(self.normalize_peak > 0.0 && self.normalize_peak < 1.0) {
            return Err(QifError::config("normalize_peak: must lie in (0, 1)"));
        }
        if !(self.signal.amplitude_rad_per_us.is_finite()
            && self.signal.amplitude_rad_per_us >= 0.0)
        {
            return Err(QifError::config("signal.amplitude_rad_per_us: must be >= 0"));
        }
        if self.trials < 1 {
            return Err(QifError::config("trials: must be >= 1"));
        }
        if let Some(n) = &self.noise {
            n.validate()?;
        }
        if let Some(r) = &self.readout {
            r.validate()?;
        }
        let need_axis = |axis: &Option<Axis>, name: &str| -> Result<()> {
            match axis {
                Some(a) => a.validate(name),
                None => Err(QifError::config(format!(
                    "{name}: required for experiment {}",
                    self.experiment.name()
                ))),
            }
        };
        let need_cpmg = || -> Result<()> {
            match &self.cpmg {
                Some(c) if !c.n_pulses.is_empty() => {
                    if c.pulse_width_us < 0.0 || !c.pulse_width_us.is_finite() {
                        Err(QifError::config("cpmg.pulse_width_us: must be >= 0"))
                    } else {
                        Ok(())
                    }
                }
                _ => Err(QifError::config(format!(
                    "cpmg.n_pulses: required for experiment {}",
                    self.experiment.name()
                ))),
            }
        };
        let need_center = || -> Result<()> {
            if self.filter.centers.is_empty() {
                Err(QifError::config(
                    "filter.centers: this experiment needs a carrier center",
                ))
            } else {
                Ok(())
            }
        };
        match self.experiment {
            ExperimentKind::FreqResponse => need_axis(&self.probe_freq_mhz, "probe_freq_mhz"),
            ExperimentKind::DualBand => {
                need_axis(&self.probe_freq_mhz, "probe_freq_mhz")?;
                if self.filter.kind != FilterKind::Multiband {
                    return Err(QifError::config(
                        "filter.kind: dual_band needs a multiband filter",
                    ));
                }
                Ok(())
            }
            ExperimentKind::PhaseSweep => {
                need_axis(&self.phase_rad, "phase_rad")?;
                need_center()
            }
            ExperimentKind::AmplitudeSweep => {
                need_axis(&self.amplitude_rad_per_us, "amplitude_rad_per_us")?;
                need_center()
            }
            ExperimentKind::FilterCenterMap => {
                need_axis(&self.filter_centers_mhz, "filter_centers_mhz")?;
                need_axis(&self.probe_freq_mhz, "probe_freq_mhz")?;
                need_center()
            }
            ExperimentKind::CpmgMap => {
                need_axis(&self.probe_freq_mhz, "probe_freq_mhz")?;
                need_cpmg()
            }
            ExperimentKind::AmplitudeRobustness => {
                need_axis(&self.scale, "scale")?;
                need_cpmg()
            }
            ExperimentKind::DurationDecay => {
                match &self.durations_us {
                    Some(d) if !d.is_empty() && d.iter().all(|t| t.is_finite() && *t > 0.0) => {}
                    _ => {
                        return Err(QifError::config(
                            "durations_us: required non-empty positive list",
                        ))
                    }
                }
                if self.noise.is_none() {
                    return Err(QifError::config(
                        "noise: duration_decay needs a noise model",
                    ));
                }
                need_cpmg()?;
                need_center()
            }
        }
    }

    fn step_config(&self) -> StepConfig {
        StepConfig {
            dt_us: self.dt_us,
            ..Default::default()
        }
    }

    fn noise_seed(&self) -> u64 {
        match &self.noise {
            Some(n) => self.seed.wrapping_add(n.seed),
            None => self.seed,
        }
    }

    fn design(&self) -> Result<(ImpulseResponse, AuxiliaryFields, ControlFields)> {
        let kernel = design_kernel(&self.filter, self.normalize_peak)?;
        let aux = aux_from_impulse(&kernel, self.aux_mode)?;
        let fields = fields_from_aux(&aux)?;
        Ok((kernel, aux, fields))
    }
}

/// SHA-256 of the canonical JSON encoding of the config.
pub fn config_hash(cfg: &SweepConfig) -> String {
    let canon = serde_json::to_string(cfg).expect("config encodes");
    let mut hasher = Sha256::new();
    hasher.update(canon.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn base_table(cfg: &SweepConfig, columns: Vec<String>) -> ResultTable {
    ResultTable::new(columns)
        .with_metadata("config_sha256", config_hash(cfg))
        .with_metadata("seed", cfg.seed)
        .with_metadata("experiment", cfg.experiment.name())
        .with_metadata("version", env!("CARGO_PKG_VERSION"))
}

/// Simulated mean and stderr of <sigma_z> for one sweep point.
fn point_sz(
    cfg: &SweepConfig,
    fields: &ControlFields,
    signal: Option<&SignalSpec>,
) -> Result<(f64, f64)> {
    let step = cfg.step_config();
    match &cfg.noise {
        Some(model) if cfg.trials >= 1 && model.rms_amplitude > 0.0 => {
            let ens = ensemble_average(fields, signal, model, cfg.trials, cfg.noise_seed(), &step)?;
            Ok((ens.mean.2, ens.stderr.2))
        }
        _ => {
            let out = simulate_protocol(fields, signal, None, &step)?;
            Ok((out.sz(), 0.0))
        }
    }
}

fn apply_readout(cfg: &SweepConfig, z: f64) -> Result<f64> {
    match &cfg.readout {
        Some(r) => r.contrast(z),
        None => Ok(z),
    }
}

/// Run the configured experiment, producing a deterministic table with
/// simulation and prediction columns.
pub fn run_sweep(cfg: &SweepConfig) -> Result<ResultTable> {
    cfg.validate()?;
    match cfg.experiment {
        ExperimentKind::FreqResponse | ExperimentKind::DualBand => freq_response(cfg),
        ExperimentKind::PhaseSweep => phase_sweep(cfg),
        ExperimentKind::AmplitudeSweep => amplitude_sweep(cfg),
        ExperimentKind::FilterCenterMap => filter_center_map(cfg),
        ExperimentKind::CpmgMap => cpmg_map(cfg),
        ExperimentKind::AmplitudeRobustness => amplitude_robustness(cfg),
        ExperimentKind::DurationDecay => duration_decay(cfg),
    }
}

fn freq_response(cfg: &SweepConfig) -> Result<ResultTable> {
    let (_, aux, fields) = cfg.design()?;
    let freqs = cfg.probe_freq_mhz.as_ref().unwrap().values();
    let rows: Result<Vec<Vec<f64>>> = freqs
        .par_iter()
        .map(|&f| {
            let sig = cfg.signal.at_frequency(f);
            let (sz, se) = point_sz(cfg, &fields, Some(&sig))?;
            let pert = 1.0 + second_order_deficit(&aux, &sig)?;
            let magnus = magnus_predict(&aux, &sig)?.predicted_sz;
            Ok(vec![
                f,
                apply_readout(cfg, sz)?,
                se,
                apply_readout(cfg, pert)?,
                apply_readout(cfg, magnus)?,
            ])
        })
        .collect();
    let mut table = base_table(
        cfg,
        vec![
            "probe_f_mhz".into(),
            "contrast".into(),
            "stderr".into(),
            "predicted_pert_sz".into(),
            "predicted_magnus_sz".into(),
        ],
    );
    for row in rows? {
        table.push_row(row)?;
    }
    Ok(table)
}

fn phase_sweep(cfg: &SweepConfig) -> Result<ResultTable> {
    let phases = cfg.phase_rad.as_ref().unwrap().values();
    let f0 = cfg.filter.centers[0].f0_mhz;
    let rows: Result<Vec<Vec<f64>>> = phases
        .par_iter()
        .map(|&phi| {
            let mut spec = cfg.filter.clone();
            spec.centers[0].phase_rad = phi;
            let kernel = design_kernel(&spec, cfg.normalize_peak)?;
            let aux = aux_from_impulse(&kernel, cfg.aux_mode)?;
            let fields = fields_from_aux(&aux)?;
            let sig = SignalSpec {
                waveform: cfg.signal.waveform,
                frequency_mhz: f0,
                phase_rad: cfg.signal.phase_rad,
                amplitude_rad_per_us: cfg.signal.amplitude_rad_per_us,
                samples: None,
                origin: Default::default(),
            };
            let (sz, se) = point_sz(cfg, &fields, Some(&sig))?;
            let pert = 1.0 + second_order_deficit(&aux, &sig)?;
            Ok(vec![
                phi,
                apply_readout(cfg, sz)?,
                se,
                apply_readout(cfg, pert)?,
            ])
        })
        .collect();
    let mut table = base_table(
        cfg,
        vec![
            "phase_rad".into(),
            "contrast".into(),
            "stderr".into(),
            "predicted_pert_sz".into(),
        ],
    );
    for row in rows? {
        table.push_row(row)?;
    }
    Ok(table)
}

fn amplitude_sweep(cfg: &SweepConfig) -> Result<ResultTable> {
    let (_, aux, fields) = cfg.design()?;
    let f0 = cfg.filter.centers[0].f0_mhz;
    let amplitudes = cfg.amplitude_rad_per_us.as_ref().unwrap().values();
    let rows: Result<Vec<Vec<f64>>> = amplitudes
        .par_iter()
        .map(|&delta| {
            let mut sig = cfg.signal.at_frequency(f0);
            sig.amplitude_rad_per_us = delta;
            let (sz, se) = point_sz(cfg, &fields, Some(&sig))?;
            let pert = 1.0 + second_order_deficit(&aux, &sig)?;
            let magnus = magnus_predict(&aux, &sig)?.predicted_sz;
            Ok(vec![
                delta,
                apply_readout(cfg, sz)?,
                se,
                apply_readout(cfg, pert.max(-1.0))?,
                apply_readout(cfg, magnus)?,
            ])
        })
        .collect();
    let mut table = base_table(
        cfg,
        vec![
            "delta_rad_per_us".into(),
            "contrast".into(),
            "stderr".into(),
            "predicted_pert_sz".into(),
            "predicted_magnus_sz".into(),
        ],
    );
    for row in rows? {
        table.push_row(row)?;
    }
    Ok(table)
}

fn filter_center_map(cfg: &SweepConfig) -> Result<ResultTable> {
    let centers = cfg.filter_centers_mhz.as_ref().unwrap().values();
    let probes = cfg.probe_freq_mhz.as_ref().unwrap().values();
    let points: Vec<(f64, f64)> = centers
        .iter()
        .flat_map(|&c| probes.iter().map(move |&f| (c, f)))
        .collect();
    // one design per center, shared across its probe row
    let designs: Result<Vec<(f64, AuxiliaryFields, ControlFields)>> = centers
        .par_iter()
        .map(|&c| {
            let mut spec = cfg.filter.clone();
            spec.centers[0].f0_mhz = c;
            let kernel = design_kernel(&spec, cfg.normalize_peak)?;
            let aux = aux_from_impulse(&kernel, cfg.aux_mode)?;
            let fields = fields_from_aux(&aux)?;
            Ok((c, aux, fields))
        })
        .collect();
    let designs = designs?;
    let rows: Result<Vec<Vec<f64>>> = points
        .par_iter()
        .map(|&(c, f)| {
            let (_, aux, fields) = designs
                .iter()
                .find(|(dc, _, _)| *dc == c)
                .expect("design exists");
            let sig = cfg.signal.at_frequency(f);
            let (sz, se) = point_sz(cfg, fields, Some(&sig))?;
            let pert = 1.0 + second_order_deficit(aux, &sig)?;
            Ok(vec![
                f,
                c,
                apply_readout(cfg, sz)?,
                se,
                apply_readout(cfg, pert)?,
            ])
        })
        .collect();
    let mut table = base_table(
        cfg,
        vec![
            "probe_f_mhz".into(),
            "center_mhz".into(),
            "contrast".into(),
            "stderr".into(),
            "predicted_pert_sz".into(),
        ],
    );
    for row in rows? {
        table.push_row(row)?;
    }
    Ok(table)
}

fn cpmg_map(cfg: &SweepConfig) -> Result<ResultTable> {
    let probes = cfg.probe_freq_mhz.as_ref().unwrap().values();
    let cpmg = cfg.cpmg.as_ref().unwrap();
    let step = cfg.step_config();
    let mut table = base_table(
        cfg,
        vec![
            "probe_f_mhz".into(),
            "n_pulses".into(),
            "deficit".into(),
            "analytic_deficit".into(),
        ],
    );
    for &n in &cpmg.n_pulses {
        let seq = build_cpmg(n, cfg.filter.duration_us, cpmg.pulse_width_us, 1.0)?;
        let rows: Result<Vec<Vec<f64>>> = probes
            .par_iter()
            .map(|&f| {
                let sig = cfg.signal.at_frequency(f);
                let out = run_cpmg_protocol(&seq, Some(&sig), None, &step)?;
                let analytic = 1.0
                    - (cfg.signal.amplitude_rad_per_us * sign_function_transform(&seq, f)).cos();
                Ok(vec![f, n as f64, 1.0 - out.sz(), analytic])
            })
            .collect();
        for row in rows? {
            table.push_row(row)?;
        }
    }
    Ok(table)
}

fn amplitude_robustness(cfg: &SweepConfig) -> Result<ResultTable> {
    let (_, _, fields) = cfg.design()?;
    let scales = cfg.scale.as_ref().unwrap().values();
    let cpmg = cfg.cpmg.as_ref().unwrap();
    let n = cpmg.n_pulses[0];
    let step = cfg.step_config();
    let rows: Result<Vec<Vec<f64>>> = scales
        .par_iter()
        .map(|&s| {
            let qif_fields = fields.scaled(s);
            let (qif_sz, qif_se) = point_sz(cfg, &qif_fields, None)?;
            let seq = build_cpmg(n, cfg.filter.duration_us, cpmg.pulse_width_us, s)?;
            let (cp_sz, cp_se) = match &cfg.noise {
                Some(model) if model.rms_amplitude > 0.0 => {
                    let seed = cfg.noise_seed();
                    let mut seeded = model.clone();
                    seeded.seed = seed;
                    let runs: Result<Vec<(f64, f64, f64)>> = (0..cfg.trials)
                        .into_par_iter()
                        .map(|trial| {
                            let tr = synthesize(
                                &seeded,
                                cfg.filter.duration_us,
                                step.dt_us,
                                trial as u64,
                            )?;
                            let out = run_cpmg_protocol(&seq, None, Some(&tr), &step)?;
                            Ok(out.expectations)
                        })
                        .collect();
                    let ens = reduce_ensemble(&runs?);
                    (ens.mean.2, ens.stderr.2)
                }
                _ => {
                    let out = run_cpmg_protocol(&seq, None, None, &step)?;
                    (out.sz(), 0.0)
                }
            };
            Ok(vec![
                s,
                apply_readout(cfg, qif_sz)?,
                qif_se,
                apply_readout(cfg, cp_sz)?,
                cp_se,
            ])
        })
        .collect();
    let mut table = base_table(
        cfg,
        vec![
            "scale".into(),
            "qif_sz".into(),
            "qif_stderr".into(),
            "cpmg_sz".into(),
            "cpmg_stderr".into(),
        ],
    );
    for row in rows? {
        table.push_row(row)?;
    }
    Ok(table)
}

/// Free evolution bracketed by pi/2 rotations (a Ramsey-style reference).
fn free_evolution_sz(cfg: &SweepConfig, duration: f64) -> Result<(f64, f64)> {
    let step = cfg.step_config();
    let model = cfg.noise.as_ref().expect("validated");
    let n_steps = ((duration / step.dt_us).round() as usize).max(1);
    let dt = duration / n_steps as f64;
    let mut seeded = model.clone();
    seeded.seed = cfg.noise_seed();
    let runs: Result<Vec<(f64, f64, f64)>> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let tr = synthesize(&seeded, duration, dt, trial as u64)?;
            let trace = HamiltonianTrace::new(
                dt,
                vec![0.0; n_steps + 1],
                vec![0.0; n_steps + 1],
                tr.values().to_vec(),
            )?;
            let init = QubitState::ket0().rotated(PulseAxis::X, std::f64::consts::FRAC_PI_2);
            let out = propagate_with_pulses(&trace, &[], &init, &step)?;
            let fin = out
                .final_state
                .rotated(PulseAxis::X, -std::f64::consts::FRAC_PI_2);
            Ok(fin.expectations())
        })
        .collect();
    let ens = reduce_ensemble(&runs?);
    Ok((ens.mean.2, ens.stderr.2))
}

/// Redesign-per-duration decay comparison of QIF, CPMG trains and free
/// evolution under one noise model; fits a stretched exponential per
/// protocol and records the 1/e times in the table metadata.
pub fn duration_decay(cfg: &SweepConfig) -> Result<ResultTable> {
    cfg.validate()?;
    if cfg.experiment != ExperimentKind::DurationDecay {
        return Err(QifError::config("experiment: expected duration_decay"));
    }
    let durations = cfg.durations_us.clone().unwrap();
    let cpmg = cfg.cpmg.clone().unwrap();
    let t_ref = cfg.filter.duration_us;
    let f0_ref = cfg.filter.centers[0].f0_mhz;
    let cutoff_ref = cfg.filter.cutoff_mhz;
    let step = cfg.step_config();

    let mut columns = vec!["duration_us".into(), "qif_sz".into(), "qif_stderr".into()];
    for n in &cpmg.n_pulses {
        columns.push(format!("cpmg{n}_sz"));
        columns.push(format!("cpmg{n}_stderr"));
    }
    columns.push("free_sz".into());
    columns.push("free_stderr".into());
    let mut table = base_table(cfg, columns);

    let rows: Result<Vec<Vec<f64>>> = durations
        .par_iter()
        .map(|&t| {
            let mut spec = cfg.filter.clone();
            spec.duration_us = t;
            spec.taps = None;
            spec.centers[0].f0_mhz = match cfg.frequency_mode {
                FrequencyMode::Fixed => f0_ref,
                FrequencyMode::InverseDuration => f0_ref * t_ref / t,
            };
            spec.cutoff_mhz = match cfg.bandwidth_mode {
                BandwidthMode::Fractional => cutoff_ref * t_ref / t,
                BandwidthMode::Absolute => cutoff_ref,
            };
            let kernel = design_kernel(&spec, cfg.normalize_peak)?;
            let aux = aux_from_impulse(&kernel, cfg.aux_mode)?;
            let fields = fields_from_aux(&aux)?;
            let mut row = vec![t];
            let (qz, qe) = point_sz(cfg, &fields, None)?;
            row.push(qz);
            row.push(qe);
            for &n in &cpmg.n_pulses {
                let seq = build_cpmg(n, t, cpmg.pulse_width_us, 1.0)?;
                let model = cfg.noise.as_ref().unwrap();
                let mut seeded = model.clone();
                seeded.seed = cfg.noise_seed();
                let n_steps = ((t / step.dt_us).round() as usize).max(1);
                let dt = t / n_steps as f64;
                let runs: Result<Vec<(f64, f64, f64)>> = (0..cfg.trials)
                    .into_par_iter()
                    .map(|trial| {
                        let tr = synthesize(&seeded, t, dt, trial as u64)?;
                        let out = run_cpmg_protocol(&seq, None, Some(&tr), &step)?;
                        Ok(out.expectations)
                    })
                    .collect();
                let ens = reduce_ensemble(&runs?);
                row.push(ens.mean.2);
                row.push(ens.stderr.2);
            }
            let (fz, fe) = free_evolution_sz(cfg, t)?;
            row.push(fz);
            row.push(fe);
            Ok(row)
        })
        .collect();
    for row in rows? {
        table.push_row(row)?;
    }

    let ts: Vec<f64> = table.column("duration_us").unwrap();
    let mut fit_meta = Vec::new();
    let mut protocol_cols = vec!["qif_sz".to_string()];
    protocol_cols.extend(cpmg.n_pulses.iter().map(|n| format!("cpmg{n}_sz")));
    protocol_cols.push("free_sz".to_string());
    for col in protocol_cols {
        let zs = table.column(&col).unwrap();
        let fit = fit_stretched_exponential(&ts, &zs);
        fit_meta.push((col.replace("_sz", ""), fit));
    }
    for (name, fit) in fit_meta {
        table.set_metadata(&format!("fit_1e_us_{name}"), format!("{}", fit.efold_us));
        table.set_metadata(&format!("fit_exponent_{name}"), format!("{}", fit.exponent));
    }
    Ok(table)
}

/// Stretched-exponential z(t) = exp(-(t/T)^p) fitted on the decaying part of
/// a curve; curves that never leave 1 report an infinite 1/e time.
#[derive(Debug, Clone, Copy)]
pub struct DecayFit {
    pub efold_us: f64,
    pub exponent: f64,
}

pub fn fit_stretched_exponential(ts: &[f64], zs: &[f64]) -> DecayFit {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&t, &z) in ts.iter().zip(zs) {
        if z < 0.05 {
            break; // fully decayed; later points are noise around zero
        }
        if z < 0.98 && t > 0.0 {
            xs.push(t.ln());
            ys.push((-(z.ln())).ln());
        }
    }
    if xs.len() < 2 {
        return DecayFit {
            efold_us: f64::INFINITY,
            exponent: 1.0,
        };
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    let p = num / den;
    let b = my - p * mx;
    if !(p.is_finite() && p > 0.0) {
        return DecayFit {
            efold_us: f64::INFINITY,
            exponent: 1.0,
        };
    }
    DecayFit {
        efold_us: (-b / p).exp(),
        exponent: p,
    }
}

/// Configuration of a single protocol run for the CLI.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulateConfig {
    pub filter: FilterSpec,
    #[serde(default)]
    pub signal: Option<SignalSpec>,
    #[serde(default)]
    pub noise: Option<NoiseModel>,
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: u32,
    #[serde(default = "default_dt")]
    pub dt_us: f64,
    #[serde(default)]
    pub aux_mode: AuxMode,
    #[serde(default = "default_peak")]
    pub normalize_peak: f64,
    #[serde(default)]
    pub trajectory: bool,
}

#[derive(Debug, Clone)]
pub enum SimulateOutput {
    Single(PropagationResult),
    Ensemble(EnsembleResult),
}

impl SimulateConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: SimulateConfig = serde_json::from_str(s)?;
        cfg.filter.validate()?;
        if let Some(sig) = &cfg.signal {
            sig.validate()?;
        }
        if let Some(n) = &cfg.noise {
            n.validate()?;
        }
        if !(cfg.dt_us.is_finite() && cfg.dt_us > 0.0) {
            return Err(QifError::config("dt_us: must be positive"));
        }
        if !(cfg.normalize_peak > 0.0 && cfg.normalize_peak < 1.0) {
            return Err(QifError::config("normalize_peak: must lie in (0, 1)"));
        }
        Ok(cfg)
    }
}

pub fn run_simulate(cfg: &SimulateConfig) -> Result<SimulateOutput> {
    let kernel = design_kernel(&cfg.filter, cfg.normalize_peak)?;
    let aux = aux_from_impulse(&kernel, cfg.aux_mode)?;
    let fields = fields_from_aux(&aux)?;
    let step = StepConfig {
        dt_us: cfg.dt_us,
        trajectory_store: cfg.trajectory,
        ..Default::default()
    };
    match &cfg.noise {
        Some(model) if model.rms_amplitude > 0.0 && cfg.trials > 1 => {
            let ens = ensemble_average(
                &fields,
                cfg.signal.as_ref(),
                model,
                cfg.trials,
                cfg.seed.wrapping_add(model.seed),
                &step,
            )?;
            Ok(SimulateOutput::Ensemble(ens))
        }
        Some(model) if model.rms_amplitude > 0.0 => {
            let n_steps = ((fields.duration() / step.dt_us).round() as usize).max(1);
            let dt = fields.duration() / n_steps as f64;
            let mut seeded = model.clone();
            seeded.seed = cfg.seed.wrapping_add(model.seed);
            let tr = synthesize(&seeded, fields.duration(), dt, 0)?;
            let out = simulate_protocol(&fields, cfg.signal.as_ref(), Some(&tr), &step)?;
            Ok(SimulateOutput::Single(out))
        }
        _ => {
            let out = simulate_protocol(&fields, cfg.signal.as_ref(), None, &step)?;
            Ok(SimulateOutput::Single(out))
        }
    }
}
