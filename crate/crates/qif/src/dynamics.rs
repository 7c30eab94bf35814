//! Exact two-level propagation under sampled control fields, deterministic
//! probe signals and stochastic dephasing traces.  Every step applies the
//! closed-form exponential of a constant field,
//! exp(-i dt (a.sigma)/2) = cos(|a| dt/2) - i sin(|a| dt/2) (a_hat . sigma),
//! so the evolution is unitary by construction.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QifError, Result};
use crate::grid;
use crate::interp::Pchip;
use crate::invariant::ControlFields;
use crate::noise::{synthesize, NoiseModel, NoiseTrace};
use crate::response::SignalSpec;

/// Pure two-level state (c0, c1) in the computational basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    pub c0: Complex64,
    pub c1: Complex64,
}

impl QubitState {
    pub fn new(c0: Complex64, c1: Complex64) -> Result<Self> {
        let norm = (c0.norm_sqr() + c1.norm_sqr()).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
            return Err(QifError::config(format!(
                "state norm {norm} is not 1 within 1e-12"
            )));
        }
        Ok(QubitState { c0, c1 })
    }

    pub fn ket0() -> Self {
        QubitState {
            c0: Complex64::new(1.0, 0.0),
            c1: Complex64::new(0.0, 0.0),
        }
    }

    pub fn ket1() -> Self {
        QubitState {
            c0: Complex64::new(0.0, 0.0),
            c1: Complex64::new(1.0, 0.0),
        }
    }

    /// +1 eigenstate of sigma_x.
    pub fn x_plus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        QubitState {
            c0: Complex64::new(s, 0.0),
            c1: Complex64::new(s, 0.0),
        }
    }

    pub fn norm(&self) -> f64 {
        (self.c0.norm_sqr() + self.c1.norm_sqr()).sqrt()
    }

    /// (<sigma_x>, <sigma_y>, <sigma_z>)
    pub fn expectations(&self) -> (f64, f64, f64) {
        let cross = self.c0.conj() * self.c1;
        (
            2.0 * cross.re,
            2.0 * cross.im,
            self.c0.norm_sqr() - self.c1.norm_sqr(),
        )
    }

    /// Squared overlap |<other|self>|^2; insensitive to global phase.
    pub fn fidelity(&self, other: &QubitState) -> f64 {
        (other.c0.conj() * self.c0 + other.c1.conj() * self.c1).norm_sqr()
    }

    /// Rotation by `angle` about the x or y axis.
    pub fn rotated(&self, axis: PulseAxis, angle: f64) -> QubitState {
        let (s, c) = (0.5 * angle).sin_cos();
        match axis {
            PulseAxis::X => QubitState {
                c0: c * self.c0 - Complex64::i() * s * self.c1,
                c1: -Complex64::i() * s * self.c0 + c * self.c1,
            },
            PulseAxis::Y => QubitState {
                c0: c * self.c0 - s * self.c1,
                c1: s * self.c0 + c * self.c1,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PulseAxis {
    X,
    Y,
}

/// Sampled coefficients of sigma_x/2, sigma_y/2, sigma_z/2 on the node grid
/// `t_k = k dt`; by the drive convention the x channel carries -epsilon.
#[derive(Debug, Clone)]
pub struct HamiltonianTrace {
    dt: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
}

impl HamiltonianTrace {
    pub fn new(dt: f64, x: Vec<f64>, y: Vec<f64>, z: Vec<f64>) -> Result<Self> {
        if x.len() < 2 || x.len() != y.len() || x.len() != z.len() {
            return Err(QifError::config(
                "trace channels must have equal length >= 2",
            ));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(QifError::config("trace step must be positive"));
        }
        if !(grid::all_finite(&x) && grid::all_finite(&y) && grid::all_finite(&z)) {
            return Err(QifError::config("trace entries must be finite"));
        }
        Ok(HamiltonianTrace { dt, x, y, z })
    }

    pub fn zero(dt: f64, nodes: usize) -> Self {
        HamiltonianTrace {
            dt,
            x: vec![0.0; nodes],
            y: vec![0.0; nodes],
            z: vec![0.0; nodes],
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn nodes(&self) -> usize {
        self.x.len()
    }

    pub fn duration(&self) -> f64 {
        self.dt * (self.nodes() - 1) as f64
    }

    fn refined(&self, dt: f64) -> HamiltonianTrace {
        let n = (self.duration() / dt).round().max(1.0) as usize;
        let dt_eff = self.duration() / n as f64;
        let ts = grid::uniform(0.0, dt_eff, n + 1);
        let rx = Pchip::from_uniform(0.0, self.dt, &self.x);
        let ry = Pchip::from_uniform(0.0, self.dt, &self.y);
        let rz = Pchip::from_uniform(0.0, self.dt, &self.z);
        HamiltonianTrace {
            dt: dt_eff,
            x: ts.iter().map(|&t| rx.eval(t)).collect(),
            y: ts.iter().map(|&t| ry.eval(t)).collect(),
            z: ts.iter().map(|&t| rz.eval(t)).collect(),
        }
    }
}

/// How the per-step constant field is sampled from the node arrays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Sampling {
    /// Average of the two bracketing nodes (second order in dt).
    #[default]
    Midpoint,
    /// Left node (first order in dt).
    Left,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StepConfig {
    #[serde(default = "default_dt")]
    pub dt_us: f64,
    #[serde(default)]
    pub sampling: Sampling,
    #[serde(default)]
    pub trajectory_store: bool,
}

fn default_dt() -> f64 {
    1e-3
}

impl Default for StepConfig {
    fn default() -> Self {
        StepConfig {
            dt_us: 1e-3,
            sampling: Sampling::Midpoint,
            trajectory_store: false,
        }
    }
}

/// Outcome of one propagation.
#[derive(Debug, Clone)]
pub struct PropagationResult {
    pub final_state: QubitState,
    pub expectations: (f64, f64, f64),
    pub trajectory: Option<Vec<[f64; 4]>>,
}

impl PropagationResult {
    pub fn sz(&self) -> f64 {
        self.expectations.2
    }

    /// Global-phase-stripped fidelity to a reference state.
    pub fn fidelity_to(&self, reference: &QubitState) -> f64 {
        self.final_state.fidelity(reference)
    }

    pub fn to_json(&self) -> String {
        let body = serde_json::json!({
            "final_state": {
                "c0": [self.final_state.c0.re, self.final_state.c0.im],
                "c1": [self.final_state.c1.re, self.final_state.c1.im],
            },
            "sx": self.expectations.0,
            "sy": self.expectations.1,
            "sz": self.expectations.2,
        });
        serde_json::to_string_pretty(&body).expect("json encode")
    }

    /// Trajectory CSV with columns `t_us,sx,sy,sz`.
    pub fn trajectory_csv(&self) -> Option<String> {
        let tr = self.trajectory.as_ref()?;
        let mut out = String::from("t_us,sx,sy,sz\n");
        for row in tr {
            out.push_str(&format!("{},{},{},{}\n", row[0], row[1], row[2], row[3]));
        }
        Some(out)
    }
}

fn apply_step(state: &mut QubitState, x: f64, y: f64, z: f64, dt: f64) {
    let a = (x * x + y * y + z * z).sqrt();
    if a == 0.0 {
        return;
    }
    let (s, c) = (0.5 * a * dt).sin_cos();
    let (nx, ny, nz) = (x / a, y / a, z / a);
    let u00 = Complex64::new(c, -s * nz);
    let u01 = Complex64::new(-s * ny, -s * nx);
    let u10 = Complex64::new(s * ny, -s * nx);
    let u11 = Complex64::new(c, s * nz);
    let c0 = u00 * state.c0 + u01 * state.c1;
    let c1 = u10 * state.c0 + u11 * state.c1;
    state.c0 = c0;
    state.c1 = c1;
}

/// Unitary propagation of `initial` under the trace. `cfg.dt_us` may refine
/// the trace grid (monotone-cubic resampling) but must not be coarser.
pub fn propagate(
    trace: &HamiltonianTrace,
    initial: &QubitState,
    cfg: &StepConfig,
) -> Result<PropagationResult> {
    let tol = 1e-9 * trace.dt;
    if cfg.dt_us > trace.dt + tol {
        return Err(QifError::config(format!(
            "step dt {} us is coarser than the trace grid {} us",
            cfg.dt_us, trace.dt
        )));
    }
    let owned;
    let tr = if cfg.dt_us < trace.dt - tol {
        owned = trace.refined(cfg.dt_us);
        &owned
    } else {
        trace
    };
    propagate_with_pulses(tr, &[], initial, cfg)
}

/// An instantaneous rotation inserted between propagation steps.
#[derive(Debug, Clone, Copy)]
pub struct InstantPulse {
    pub time_us: f64,
    pub axis: PulseAxis,
    pub angle_rad: f64,
}

/// Propagation with ideal pulses applied at their nearest grid node.
pub fn propagate_with_pulses(
    trace: &HamiltonianTrace,
    pulses: &[InstantPulse],
    initial: &QubitState,
    cfg: &StepConfig,
) -> Result<PropagationResult> {
    let mut state = *initial;
    let n_steps = trace.nodes() - 1;
    let dt = trace.dt;
    let mut pulse_at = vec![Vec::new(); n_steps + 1];
    for p in pulses {
        let k = (p.time_us / dt).round();
        if !(0.0..=(n_steps as f64)).contains(&k) {
            return Err(QifError::config(format!(
                "pulse at {} us lies outside the trace window",
                p.time_us
            )));
        }
        pulse_at[k as usize].push(*p);
    }
    let mut trajectory = if cfg.trajectory_store {
        Some(Vec::with_capacity(n_steps + 1))
    } else {
        None
    };
    let record = |state: &QubitState, k: usize, tr: &mut Option<Vec<[f64; 4]>>| {
        if let Some(t) = tr {
            let (sx, sy, sz) = state.expectations();
            t.push([k as f64 * dt, sx, sy, sz]);
        }
    };
    for k in 0..n_steps {
        for p in &pulse_at[k] {
            state = state.rotated(p.axis, p.angle_rad);
        }
        record(&state, k, &mut trajectory);
        let (x, y, z) = match cfg.sampling {
            Sampling::Midpoint => (
                0.5 * (trace.x[k] + trace.x[k + 1]),
                0.5 * (trace.y[k] + trace.y[k + 1]),
                0.5 * (trace.z[k] + trace.z[k + 1]),
            ),
            Sampling::Left => (trace.x[k], trace.y[k], trace.z[k]),
        };
        apply_step(&mut state, x, y, z, dt);
    }
    for p in &pulse_at[n_steps] {
        state = state.rotated(p.axis, p.angle_rad);
    }
    record(&state, n_steps, &mut trajectory);
    Ok(PropagationResult {
        expectations: state.expectations(),
        final_state: state,
        trajectory,
    })
}

/// Assemble the node trace for a protocol: x = -epsilon(t),
/// z = Delta(t) + delta f_in(t) + noise(t).
pub fn assemble_trace(
    control: &ControlFields,
    signal: Option<&SignalSpec>,
    noise: Option<&NoiseTrace>,
    cfg: &StepConfig,
) -> Result<HamiltonianTrace> {
    let duration = control.duration();
    let n_steps = ((duration / cfg.dt_us).round() as usize).max(1);
    let dt = duration / n_steps as f64;
    let ts = grid::uniform(0.0, dt, n_steps + 1);
    let aligned = control.len() == n_steps + 1 && (control.dt() - dt).abs() <= 1e-12 * dt;
    let (x, mut z): (Vec<f64>, Vec<f64>) = if aligned {
        (
            control.epsilon.iter().map(|e| -e).collect(),
            control.delta.clone(),
        )
    } else {
        let pe = control.epsilon_interpolant();
        let pd = control.delta_interpolant();
        (
            ts.iter().map(|&t| -pe.eval(t)).collect(),
            ts.iter().map(|&t| pd.eval(t)).collect(),
        )
    };
    if let Some(sig) = signal {
        sig.validate()?;
        let fin = sig.unit_waveform(&ts, duration);
        let amp = sig.amplitude();
        for (zk, f) in z.iter_mut().zip(&fin) {
            *zk += amp * f;
        }
    }
    if let Some(trace) = noise {
        if (trace.duration() - duration).abs() > trace.dt() + 1e-9 {
            return Err(QifError::config(format!(
                "noise trace spans {} us but the protocol runs {} us",
                trace.duration(),
                duration
            )));
        }
        if trace.values().len() == n_steps + 1 && (trace.dt() - dt).abs() <= 1e-12 * dt {
            for (zk, v) in z.iter_mut().zip(trace.values()) {
                *zk += v;
            }
        } else {
            let p = Pchip::from_uniform(0.0, trace.dt(), trace.values());
            for (zk, &t) in z.iter_mut().zip(&ts) {
                *zk += p.eval(t);
            }
        }
    }
    HamiltonianTrace::new(dt, x, vec![0.0; n_steps + 1], z)
}

/// Propagate |0> under control + optional signal + optional noise trace.
pub fn simulate_protocol(
    control: &ControlFields,
    signal: Option<&SignalSpec>,
    noise: Option<&NoiseTrace>,
    cfg: &StepConfig,
) -> Result<PropagationResult> {
    simulate_protocol_from(&QubitState::ket0(), control, signal, noise, cfg)
}

/// Same as [`simulate_protocol`] with an explicit initial state.
pub fn simulate_protocol_from(
    initial: &QubitState,
    control: &ControlFields,
    signal: Option<&SignalSpec>,
    noise: Option<&NoiseTrace>,
    cfg: &StepConfig,
) -> Result<PropagationResult> {
    let trace = assemble_trace(control, signal, noise, cfg)?;
    propagate_with_pulses(&trace, &[], initial, cfg)
}

/// Mean expectations over independent noise realizations.
#[derive(Debug, Clone, Copy)]
pub struct EnsembleResult {
    pub mean: (f64, f64, f64),
    pub stderr: (f64, f64, f64),
    pub trials: u32,
}

impl EnsembleResult {
    pub fn sz(&self) -> f64 {
        self.mean.2
    }
}

/// Average `trials` independent runs; trial k draws its noise from the
/// stream (seed, k), so results are reproducible and independent of how the
/// work is scheduled.
pub fn ensemble_average(
    control: &ControlFields,
    signal: Option<&SignalSpec>,
    model: &NoiseModel,
    trials: u32,
    seed: u64,
    cfg: &StepConfig,
) -> Result<EnsembleResult> {
    if trials < 1 {
        return Err(QifError::config("trials: must be >= 1"));
    }
    let duration = control.duration();
    let n_steps = ((duration / cfg.dt_us).round() as usize).max(1);
    let dt = duration / n_steps as f64;
    let mut seeded = model.clone();
    seeded.seed = seed;
    let runs: Result<Vec<(f64, f64, f64)>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let trace = synthesize(&seeded, duration, dt, trial as u64)?;
            let out = simulate_protocol(control, signal, Some(&trace), cfg)?;
            Ok(out.expectations)
        })
        .collect();
    let runs = runs?;
    Ok(reduce_ensemble(&runs))
}

pub(crate) fn reduce_ensemble(runs: &[(f64, f64, f64)]) -> EnsembleResult {
    let n = runs.len() as f64;
    let mut mean = (0.0, 0.0, 0.0);
    for r in runs {
        mean.0 += r.0;
        mean.1 += r.1;
        mean.2 += r.2;
    }
    mean = (mean.0 / n, mean.1 / n, mean.2 / n);
    let mut var = (0.0, 0.0, 0.0);
    for r in runs {
        var.0 += (r.0 - mean.0).powi(2);
        var.1 += (r.1 - mean.1).powi(2);
        var.2 += (r.2 - mean.2).powi(2);
    }
    let denom = if runs.len() > 1 { n * (n - 1.0) } else { 1.0 };
    let stderr = (
        (var.0 / denom).sqrt(),
        (var.1 / denom).sqrt(),
        (var.2 / denom).sqrt(),
    );
    EnsembleResult {
        mean,
        stderr,
        trials: runs.len() as u32,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::{design_kernel, FilterSpec};
    use crate::invariant::{fields_from_impulse, AuxMode};
    use crate::noise::NoiseKind;
    use std::f64::consts::PI;

    #[test]
    fn zero_trace_is_identity() {
        let trace = HamiltonianTrace::zero(1e-3, 4001);
        let init = QubitState::x_plus();
        let out = propagate(&trace, &init, &StepConfig::default()).unwrap();
        assert_eq!(out.final_state, init);
    }

    #[test]
    fn constant_drive_realizes_pi_pulse() {
        let tf = 4.0;
        let omega = PI / tf;
        let nodes = 4001;
        let trace =
            HamiltonianTrace::new(tf / 4000.0, vec![-omega; nodes], vec![0.0; nodes], vec![0.0; nodes])
                .unwrap();
        let out = propagate(&trace, &QubitState::ket0(), &StepConfig::default()).unwrap();
        let pop1 = out.final_state.c1.norm_sqr();
        assert!((pop1 - 1.0).abs() < 1e-10, "pop1 = {pop1}");
    }

    #[test]
    fn qif_trace_returns_to_ket0() {
        let h = design_kernel(&FilterSpec::bandpass(1.35, 0.125, 4.0), 0.9).unwrap();
        let fields = fields_from_impulse(&h, AuxMode::ExactArcsin).unwrap();
        let cfg = StepConfig::default();
        let out = simulate_protocol(&fields, None, None, &cfg).unwrap();
        let f = out.fidelity_to(&QubitState::ket0());
        assert!(f >= 1.0 - 1e-6, "fidelity {f}");
        // a 10x finer step must agree, confirming convergence of the coarse run
        let fine = simulate_protocol(
            &fields,
            None,
            None,
            &StepConfig {
                dt_us: 1e-4,
                ..cfg
            },
        )
        .unwrap();
        assert!(
            (fine.sz() - out.sz()).abs() < 1e-6,
            "{} vs {}",
            fine.sz(),
            out.sz()
        );
    }

    #[test]
    fn midpoint_sampling_is_second_order() {
        // non-commuting chirped trace; incommensurate tones so the leading
        // error terms cannot cancel over the window
        let build = |dt: f64| {
            let n = (2.0 / dt).round() as usize;
            let dte = 2.0 / n as f64;
            let ts = grid::uniform(0.0, dte, n + 1);
            HamiltonianTrace::new(
                dte,
                ts.iter().map(|t| 3.0 * (2.3 * t * t + 0.4).cos() + 0.8).collect(),
                vec![0.0; n + 1],
                ts.iter().map(|t| 2.0 * (3.1 * t).sin() + 0.6 * t).collect(),
            )
            .unwrap()
        };
        let cfg = StepConfig::default();
        let reference = propagate(
            &build(1.0 / 16384.0),
            &QubitState::ket0(),
            &StepConfig {
                dt_us: 1.0 / 16384.0,
                ..cfg
            },
        )
        .unwrap();
        // phase-stripped state distance ~ sqrt(infidelity), linear in the
        // error generator, so halving dt should shrink it by ~4x
        let err_at = |dt: f64| {
            let out = propagate(
                &build(dt),
                &QubitState::ket0(),
                &StepConfig { dt_us: dt, ..cfg },
            )
            .unwrap();
            (1.0 - out.fidelity_to(&reference.final_state)).max(0.0).sqrt()
        };
        let e1 = err_at(1.0 / 256.0);
        let e2 = err_at(1.0 / 512.0);
        let ratio = e1 / e2;
        assert!(
            (3.5..=4.5).contains(&ratio),
            "convergence ratio {ratio} (e1={e1}, e2={e2})"
        );
    }

    #[test]
    fn norm_is_preserved_over_many_steps() {
        let n = 10_001;
        let ts = grid::uniform(0.0, 1e-3, n);
        let trace = HamiltonianTrace::new(
            1e-3,
            ts.iter().map(|t| (2.0 * PI * t).cos() * 5.0).collect(),
            vec![0.0; n],
            ts.iter().map(|t| (3.0 * PI * t).sin() * 4.0).collect(),
        )
        .unwrap();
        let out = propagate(&trace, &QubitState::ket0(), &StepConfig::default()).unwrap();
        assert!((out.final_state.norm() - 1.0).abs() <= 1e-12);
        let (sx, sy, sz) = out.expectations;
        assert!((sx * sx + sy * sy + sz * sz - 1.0).abs() < 1e-9, "purity");
    }

    #[test]
    fn fidelity_ignores_global_phase() {
        let a = QubitState::x_plus();
        let phase = Complex64::from_polar(1.0, 1.234);
        let b = QubitState {
            c0: a.c0 * phase,
            c1: a.c1 * phase,
        };
        assert!((b.fidelity(&a) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn coarser_step_than_trace_is_rejected() {
        let trace = HamiltonianTrace::zero(1e-3, 101);
        let err = propagate(
            &trace,
            &QubitState::ket0(),
            &StepConfig {
                dt_us: 1e-2,
                ..Default::default()
            },
        );
        assert!(err.is_err());
    }

    #[test]
    fn protocol_without_signal_or_noise_closes() {
        let h = design_kernel(&FilterSpec::bandpass(2.0, 0.125, 4.0), 0.9).unwrap();
        let fields = fields_from_impulse(&h, AuxMode::Simplified).unwrap();
        let out = simulate_protocol(&fields, None, None, &StepConfig::default()).unwrap();
        assert!((out.sz() - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn mismatched_noise_duration_is_rejected() {
        let h = design_kernel(&FilterSpec::bandpass(2.0, 0.125, 4.0), 0.9).unwrap();
        let fields = fields_from_impulse(&h, AuxMode::Simplified).unwrap();
        let model = NoiseModel::new(NoiseKind::White, 0.1, 7);
        let trace = synthesize(&model, 2.0, 1e-3, 0).unwrap();
        let err = simulate_protocol(&fields, None, Some(&trace), &StepConfig::default());
        assert!(err.is_err());
    }

    #[test]
    fn ensemble_single_trial_zero_noise_matches_plain_run() {
        let h = design_kernel(&FilterSpec::bandpass(1.5, 0.125, 4.0), 0.9).unwrap();
        let fields = fields_from_impulse(&h, AuxMode::ExactArcsin).unwrap();
        let sig = SignalSpec::cosine(1.5, 0.05);
        let cfg = StepConfig::default();
        let model = NoiseModel::new(NoiseKind::White, 0.0, 3);
        let ens = ensemble_average(&fields, Some(&sig), &model, 1, 3, &cfg).unwrap();
        let single = simulate_protocol(&fields, Some(&sig), None, &cfg).unwrap();
        assert!((ens.mean.2 - single.sz()).abs() < 1e-12);
    }

    #[test]
    fn ensemble_is_seed_deterministic() {
        let h = design_kernel(&FilterSpec::bandpass(1.5, 0.125, 4.0), 0.9).unwrap();
        let fields = fields_from_impulse(&h, AuxMode::ExactArcsin).unwrap();
        let cfg = StepConfig {
            dt_us: 5e-3,
            ..Default::default()
        };
        let model = NoiseModel::one_over_f(0.3, 42);
        let a = ensemble_average(&fields, None, &model, 8, 42, &cfg).unwrap();
        let b = ensemble_average(&fields, None, &model, 8, 42, &cfg).unwrap();
        assert_eq!(a.mean, b.mean);
        assert_eq!(a.stderr, b.stderr);
    }

    #[test]
    fn trajectory_is_recorded_on_request() {
        let trace = HamiltonianTrace::zero(1e-2, 11);
        let out = propagate(
            &trace,
            &QubitState::ket0(),
            &StepConfig {
                dt_us: 1e-2,
                trajectory_store: true,
                ..Default::default()
            },
        )
        .unwrap();
        let tr = out.trajectory.as_ref().unwrap();
        assert_eq!(tr.len(), 11);
        let csv = out.trajectory_csv().unwrap();
        assert!(csv.starts_with("t_us,sx,sy,sz\n"));
    }
}
