//! Acceptance suite: one test per shipped criterion, each printing a
//! PASS line with the measured figures (run with `--nocapture` to see them
//! alongside the per-test verdicts).
//!
//! The tests serialize through a mutex so the timed criteria are not
//! distorted by each other's thread-pool usage.

use std::sync::Mutex;
use std::time::Instant;

use qif::dynamics::{simulate_protocol, QubitState, StepConfig};
use qif::experiments::{
    run_sweep, Axis, BandwidthMode, CpmgConfig, ExperimentKind, FrequencyMode, SignalConfig,
    SweepConfig,
};
use qif::filter::{
    cosine_transform, design_kernel, transfer_function, BandCenter, FilterKind, FilterSpec,
    WindowKind,
};
use qif::invariant::{aux_from_impulse, fields_from_aux, AuxMode};
use qif::noise::{loglog_slope, psd_estimate, synthesize, NoiseModel};
use qif::response::{SignalSpec, Waveform};
use qif::waveform::{export_waveform, SAMPLE_LIMIT};

static GATE: Mutex<()> = Mutex::new(());

fn serial() -> std::sync::MutexGuard<'static, ()> {
    GATE.lock().unwrap_or_else(|e| e.into_inner())
}

fn bandpass_spec(f0: f64, t_f: f64, taps: usize, fs: f64) -> FilterSpec {
    FilterSpec {
        kind: FilterKind::Bandpass,
        centers: vec![BandCenter::new(f0)],
        cutoff_mhz: 0.125,
        duration_us: t_f,
        taps: Some(taps),
        sample_rate_per_us: Some(fs),
        window: WindowKind::Hamming,
    }
}

fn base_config(experiment: ExperimentKind, filter: FilterSpec) -> SweepConfig {
    SweepConfig {
        experiment,
        filter,
        signal: SignalConfig::default(),
        seed: 20260810,
        probe_freq_mhz: None,
        phase_rad: None,
        amplitude_rad_per_us: None,
        filter_centers_mhz: None,
        scale: None,
        durations_us: None,
        cpmg: None,
        noise: None,
        trials: 1,
        dt_us: 1e-3,
        aux_mode: AuxMode::ExactArcsin,
        normalize_peak: 0.9,
        readout: None,
        frequency_mode: FrequencyMode::Fixed,
        bandwidth_mode: BandwidthMode::Fractional,
        output: None,
    }
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

fn local_maxima_above(grid: &[f64], v: &[f64], floor: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 1..v.len() - 1 {
        if v[i] > v[i - 1] && v[i] >= v[i + 1] && v[i] >= floor {
            out.push(grid[i]);
        }
    }
    out
}

fn fwhm(grid: &[f64], v: &[f64]) -> f64 {
    let i = argmax(v);
    let half = v[i] / 2.0;
    let mut lo = i;
    while lo > 0 && v[lo] > half {
        lo -= 1;
    }
    let mut hi = i;
    while hi < v.len() - 1 && v[hi] > half {
        hi += 1;
    }
    let f_lo = interp_crossing(grid[lo], grid[lo + 1], v[lo], v[lo + 1], half);
    let f_hi = interp_crossing(grid[hi - 1], grid[hi], v[hi - 1], v[hi], half);
    f_hi - f_lo
}

fn interp_crossing(x0: f64, x1: f64, y0: f64, y1: f64, target: f64) -> f64 {
    x0 + (target - y0) / (y1 - y0) * (x1 - x0)
}

#[test]
fn criterion_01_closure_of_randomized_filters() {
    let _g = serial();
    let start = Instant::now();
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(101);
    let step = StepConfig::default(); // 1 ns
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let f0 = rng.gen_range(0.5..3.0);
        let phase = rng.gen_range(0.0..std::f64::consts::PI);
        let spec = FilterSpec {
            kind: FilterKind::Bandpass,
            centers: vec![BandCenter::new(f0).with_phase(phase)],
            cutoff_mhz: 0.125,
            duration_us: 4.0,
            taps: None,
            sample_rate_per_us: None,
            window: WindowKind::Hamming,
        };
        let kernel = design_kernel(&spec, 0.9).unwrap();
        let fields = fields_from_aux(&aux_from_impulse(&kernel, AuxMode::ExactArcsin).unwrap())
            .unwrap();
        let out = simulate_protocol(&fields, None, None, &step).unwrap();
        let deficit = 1.0 - out.fidelity_to(&QubitState::ket0());
        worst = worst.max(deficit);
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(worst <= 1e-6, "worst closure deficit {worst:.3e}");
    assert!(elapsed < 5.0, "closure batch took {elapsed:.2} s");
    println!(
        "criterion 01 closure: PASS (worst 1-<sz> = {worst:.2e} <= 1e-6, {elapsed:.2} s < 5 s)"
    );
}

#[test]
fn criterion_02_bandpass_reproduction() {
    let _g = serial();
    let start = Instant::now();
    // the 250 kHz design bandwidth needs a window longer than the Fourier
    // limit of 4 us; 8 us realizes it (see notes in the design recipe)
    let mut cfg = base_config(
        ExperimentKind::FreqResponse,
        bandpass_spec(1.35, 8.0, 2001, 250.0),
    );
    cfg.probe_freq_mhz = Some(Axis::new(0.0, 4.0, 401)); // 10 kHz bins
    let table = run_sweep(&cfg).unwrap();
    let f = table.column("probe_f_mhz").unwrap();
    let c = table.column("contrast").unwrap();
    let deficit: Vec<f64> = c.iter().map(|z| 1.0 - z).collect();
    let peak_idx = argmax(&deficit);
    let peak_f = f[peak_idx];
    let peak = deficit[peak_idx];
    let maxima = local_maxima_above(&f, &deficit, peak / 2.0);
    let width = fwhm(&f, &deficit);
    let off_band = f
        .iter()
        .zip(&deficit)
        .filter(|(fr, _)| (**fr - 1.35).abs() > 0.75)
        .map(|(_, d)| *d)
        .fold(0.0f64, f64::max);
    let elapsed = start.elapsed().as_secs_f64();
    assert!((peak_f - 1.35).abs() <= 0.01 + 1e-12, "peak at {peak_f}");
    assert_eq!(maxima.len(), 1, "maxima above half peak: {maxima:?}");
    assert!(
        (width - 0.25).abs() <= 0.25 * 0.30,
        "FWHM {width} MHz outside 250 kHz +/- 30%"
    );
    assert!(off_band <= 0.02 * peak, "off-band {off_band} vs peak {peak}");
    assert!(elapsed < 60.0, "sweep took {elapsed:.1} s");
    println!(
        "criterion 02 band-pass: PASS (peak {peak_f} MHz, FWHM {:.0} kHz, off-band {:.2}% of peak, {elapsed:.1} s < 60 s)",
        width * 1000.0,
        100.0 * off_band / peak
    );
}

#[test]
fn criterion_03_perturbation_and_magnus_agreement() {
    let _g = serial();
    // small amplitude: peak deficit within 10% of the second-order law
    let mut cfg = base_config(
        ExperimentKind::FreqResponse,
        bandpass_spec(1.35, 4.0, 1001, 250.0),
    );
    cfg.probe_freq_mhz = Some(Axis::new(1.1, 1.6, 51));
    let table = run_sweep(&cfg).unwrap();
    let f = table.column("probe_f_mhz").unwrap();
    let sim: Vec<f64> = table.column("contrast").unwrap().iter().map(|z| 1.0 - z).collect();
    let pert: Vec<f64> = table
        .column("predicted_pert_sz")
        .unwrap()
        .iter()
        .map(|z| 1.0 - z)
        .collect();
    let (i_sim, i_pert) = (argmax(&sim), argmax(&pert));
    let ratio = sim[i_sim] / pert[i_pert];
    assert!(
        (ratio - 1.0).abs() <= 0.10,
        "peak deficit ratio {ratio} at delta = 0.05"
    );

    // large amplitude: locations agree within one bin even when values drift
    let mut cfg5 = cfg.clone();
    cfg5.signal.amplitude_rad_per_us = 0.5;
    let table5 = run_sweep(&cfg5).unwrap();
    let sim5: Vec<f64> = table5.column("contrast").unwrap().iter().map(|z| 1.0 - z).collect();
    let pert5: Vec<f64> = table5
        .column("predicted_pert_sz")
        .unwrap()
        .iter()
        .map(|z| 1.0 - z)
        .collect();
    let (i5, p5) = (argmax(&sim5), argmax(&pert5));
    assert!(
        (f[i5] - f[p5]).abs() <= 0.01 + 1e-12,
        "peak location mismatch at delta = 0.5: {} vs {}",
        f[i5],
        f[p5]
    );

    // resummed prediction tracks the exact amplitude sweep to its first
    // extremum within 0.05 on the <sigma_z> scale
    let mut cfga = base_config(
        ExperimentKind::AmplitudeSweep,
        bandpass_spec(2.0, 4.0, 1001, 250.0),
    );
    cfga.amplitude_rad_per_us = Some(Axis::new(0.0, 4.5, 91));
    let ta = run_sweep(&cfga).unwrap();
    let sz = ta.column("contrast").unwrap();
    let magnus = ta.column("predicted_magnus_sz").unwrap();
    let mut i_ext = sz.len() - 1;
    for i in 1..sz.len() - 1 {
        if (sz[i] - sz[i - 1]) * (sz[i + 1] - sz[i]) < 0.0 {
            i_ext = i;
            break;
        }
    }
    assert!(i_ext < sz.len() - 1, "no extremum found in the sweep range");
    let max_err = (0..=i_ext)
        .map(|i| (sz[i] - magnus[i]).abs())
        .fold(0.0f64, f64::max);
    assert!(max_err <= 0.05, "resummed prediction off by {max_err}");
    println!(
        "criterion 03 perturbation: PASS (peak ratio {ratio:.4} at d=0.05, locations match at d=0.5, resummed max err {max_err:.4} up to first extremum)"
    );
}

#[test]
fn criterion_04_phase_law() {
    let _g = serial();
    let n = 24;
    let mut cfg = base_config(
        ExperimentKind::PhaseSweep,
        bandpass_spec(1.5, 4.0, 1001, 250.0),
    );
    cfg.signal.waveform = Waveform::Sine;
    let top = 2.0 * std::f64::consts::PI * (n as f64 - 1.0) / n as f64;
    cfg.phase_rad = Some(Axis::new(0.0, top, n));
    let table = run_sweep(&cfg).unwrap();
    let phis = table.column("phase_rad").unwrap();
    let deficit: Vec<f64> = table.column("contrast").unwrap().iter().map(|z| 1.0 - z).collect();
    // linear least squares for d = c0 - a cos 2phi - b sin 2phi
    let m = phis.len() as f64;
    let (mut sc, mut ss, mut sd, mut sdc, mut sds) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (p, d) in phis.iter().zip(&deficit) {
        sc += (2.0 * p).cos();
        ss += (2.0 * p).sin();
        sd += d;
        sdc += d * (2.0 * p).cos();
        sds += d * (2.0 * p).sin();
    }
    // the phase grid is uniform over full periods: cos/sin columns are
    // orthogonal to the constant column and to each other
    let c0 = sd / m;
    let a = -(sdc - sc * c0) / (m / 2.0);
    let b = -(sds - ss * c0) / (m / 2.0);
    let phi0 = 0.5 * b.atan2(a);
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (p, d) in phis.iter().zip(&deficit) {
        let fit = c0 - a * (2.0 * p).cos() - b * (2.0 * p).sin();
        ss_res += (d - fit) * (d - fit);
        ss_tot += (d - c0) * (d - c0);
    }
    let r2 = 1.0 - ss_res / ss_tot;
    assert!(r2 >= 0.99, "sin^2 fit R^2 = {r2}");
    assert!(phi0.abs() <= 0.05, "phase offset {phi0} rad");
    println!("criterion 04 phase law: PASS (R^2 = {r2:.5}, phi0 = {phi0:.4} rad)");
}

#[test]
fn criterion_05_dual_band() {
    let _g = serial();
    let mut cfg = base_config(
        ExperimentKind::DualBand,
        FilterSpec {
            kind: FilterKind::Multiband,
            centers: vec![BandCenter::new(1.5), BandCenter::new(2.5)],
            cutoff_mhz: 0.125,
            duration_us: 4.0,
            taps: Some(1001),
            sample_rate_per_us: Some(250.0),
            window: WindowKind::Hamming,
        },
    );
    cfg.probe_freq_mhz = Some(Axis::new(0.5, 3.5, 301)); // 10 kHz bins
    let table = run_sweep(&cfg).unwrap();
    let f = table.column("probe_f_mhz").unwrap();
    let deficit: Vec<f64> = table.column("contrast").unwrap().iter().map(|z| 1.0 - z).collect();
    let peak = deficit[argmax(&deficit)];
    let maxima = local_maxima_above(&f, &deficit, peak / 2.0);
    assert_eq!(maxima.len(), 2, "maxima: {maxima:?}");
    assert!((maxima[0] - 1.5).abs() <= 0.01 + 1e-12, "{maxima:?}");
    assert!((maxima[1] - 2.5).abs() <= 0.01 + 1e-12, "{maxima:?}");
    println!(
        "criterion 05 dual band: PASS (maxima at {:.2} and {:.2} MHz)",
        maxima[0], maxima[1]
    );
}

#[test]
fn criterion_06_cpmg_contrast_and_tunable_map() {
    let _g = serial();
    // CPMG-4 response: peak near n/(2 t_f) on map-resolution bins, ripples
    let mut cfg = base_config(
        ExperimentKind::CpmgMap,
        bandpass_spec(1.35, 4.0, 1001, 250.0),
    );
    cfg.probe_freq_mhz = Some(Axis::new(0.04, 4.0, 100)); // 40 kHz bins
    cfg.cpmg = Some(CpmgConfig {
        n_pulses: vec![4],
        pulse_width_us: 0.0,
    });
    let table = run_sweep(&cfg).unwrap();
    let f = table.column("probe_f_mhz").unwrap();
    let deficit = table.column("deficit").unwrap();
    let analytic = table.column("analytic_deficit").unwrap();
    let bin = 4.0 / 99.0 * 1.0000001;
    let i_pk = argmax(&deficit);
    assert!(
        (f[i_pk] - 0.5).abs() <= bin,
        "CPMG-4 peak at {} MHz (bin {bin:.3})",
        f[i_pk]
    );
    // simulated and analytic toggling-frame responses agree at the peak
    let i_an = argmax(&analytic);
    assert_eq!(i_pk, i_an);
    assert!(
        (deficit[i_pk] - analytic[i_an]).abs() <= 0.10 * analytic[i_an],
        "{} vs {}",
        deficit[i_pk],
        analytic[i_an]
    );
    let sidelobe = f
        .iter()
        .zip(&deficit)
        .any(|(fr, d)| (fr - f[i_pk]).abs() > 0.3 && *d >= 0.05 * deficit[i_pk]);
    assert!(sidelobe, "no >= 5% sidelobe found");

    // passband centers are continuously placeable: diagonal ridge at 10
    // centers between 0.5 and 3 MHz
    let mut map_cfg = base_config(
        ExperimentKind::FilterCenterMap,
        bandpass_spec(1.0, 4.0, 1001, 250.0),
    );
    map_cfg.filter_centers_mhz = Some(Axis::new(0.5, 3.0, 10));
    map_cfg.probe_freq_mhz = Some(Axis::new(0.3, 3.3, 121)); // 25 kHz bins
    let map = run_sweep(&map_cfg).unwrap();
    let probe = map.column("probe_f_mhz").unwrap();
    let center = map.column("center_mhz").unwrap();
    let contrast = map.column("contrast").unwrap();
    let map_bin = 3.0 / 120.0 * 1.0000001;
    for target in Axis::new(0.5, 3.0, 10).values() {
        let mut best = (0.0, f64::MIN);
        for i in 0..probe.len() {
            if (center[i] - target).abs() < 1e-9 {
                let d = 1.0 - contrast[i];
                if d > best.1 {
                    best = (probe[i], d);
                }
            }
        }
        assert!(
            (best.0 - target).abs() <= map_bin,
            "ridge off-diagonal at center {target}: peak at {}",
            best.0
        );
    }
    println!(
        "criterion 06 cpmg/map: PASS (CPMG-4 peak {:.2} MHz with ripples, ridge diagonal at 10 centers)",
        f[i_pk]
    );
}

#[test]
fn criterion_07_amplitude_robustness_ordering() {
    let _g = serial();
    // noise-free: the scaled drive still closes; miscalibrated CPMG-32 falls
    let mut cfg = base_config(
        ExperimentKind::AmplitudeRobustness,
        bandpass_spec(1.0, 4.0, 2001, 500.0),
    );
    cfg.scale = Some(Axis::new(0.5, 1.5, 21));
    cfg.cpmg = Some(CpmgConfig {
        n_pulses: vec![32],
        pulse_width_us: 0.02,
    });
    cfg.dt_us = 2e-3;
    let clean = run_sweep(&cfg).unwrap();
    let scales = clean.column("scale").unwrap();
    let qif_sz = clean.column("qif_sz").unwrap();
    let cp_sz = clean.column("cpmg_sz").unwrap();
    for (s, z) in scales.iter().zip(&qif_sz) {
        assert!(1.0 - z <= 1e-6, "QIF deficit {} at scale {s}", 1.0 - z);
    }
    let i08 = scales.iter().position(|s| (s - 0.8).abs() < 1e-9).unwrap();
    assert!(cp_sz[i08] < 0.9, "CPMG-32 at s=0.8: {}", cp_sz[i08]);

    // under the default 1/f model the worst-case QIF outcome beats CPMG-32's
    let mut noisy = cfg.clone();
    noisy.noise = Some(NoiseModel::one_over_f(0.5, 1));
    noisy.trials = 100;
    let table = run_sweep(&noisy).unwrap();
    let qif_worst = table
        .column("qif_sz")
        .unwrap()
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let cp_worst = table
        .column("cpmg_sz")
        .unwrap()
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    assert!(
        qif_worst > cp_worst,
        "worst-case ordering violated: QIF {qif_worst} vs CPMG {cp_worst}"
    );
    println!(
        "criterion 07 robustness: PASS (QIF flat to 1e-6, CPMG-32(s=0.8) = {:.3}, noisy worst case {qif_worst:.3} > {cp_worst:.3})",
        cp_sz[i08]
    );
}

#[test]
fn criterion_08_decay_time_ordering() {
    let _g = serial();
    let mut cfg = base_config(
        ExperimentKind::DurationDecay,
        bandpass_spec(1.0, 4.0, 1001, 250.0),
    );
    cfg.durations_us = Some(vec![4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0]);
    cfg.cpmg = Some(CpmgConfig {
        n_pulses: vec![8, 16],
        pulse_width_us: 0.0,
    });
    cfg.noise = Some(NoiseModel::one_over_f(0.5, 2));
    cfg.trials = 200;
    cfg.dt_us = 5e-3;
    cfg.frequency_mode = FrequencyMode::Fixed;
    cfg.bandwidth_mode = BandwidthMode::Fractional;
    let table = run_sweep(&cfg).unwrap();
    let t_qif: f64 = table.metadata["fit_1e_us_qif"].parse().unwrap();
    let t_c16: f64 = table.metadata["fit_1e_us_cpmg16"].parse().unwrap();
    let t_c8: f64 = table.metadata["fit_1e_us_cpmg8"].parse().unwrap();
    assert!(
        t_qif > t_c16 && t_c16 > t_c8,
        "ordering violated: qif {t_qif}, cpmg16 {t_c16}, cpmg8 {t_c8}"
    );
    println!(
        "criterion 08 decay ordering: PASS (1/e times: QIF {t_qif:.0} us > CPMG-16 {t_c16:.0} us > CPMG-8 {t_c8:.0} us; lab-scale values deliberately not reproduced)"
    );
}

#[test]
fn criterion_09_quadratic_amplitude_scaling() {
    let _g = serial();
    let kernel = design_kernel(&bandpass_spec(1.35, 4.0, 1001, 250.0), 0.9).unwrap();
    let fields = fields_from_aux(&aux_from_impulse(&kernel, AuxMode::ExactArcsin).unwrap())
        .unwrap();
    let step = StepConfig::default();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let n = 8;
    for k in 0..n {
        let delta = 1e-3 * (5e-2f64 / 1e-3).powf(k as f64 / (n - 1) as f64);
        let sig = SignalSpec::cosine(1.35, delta);
        let out = simulate_protocol(&fields, Some(&sig), None, &step).unwrap();
        xs.push(delta.ln());
        ys.push((1.0 - out.sz()).ln());
    }
    let m = n as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let slope = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum::<f64>()
        / xs.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>();
    assert!(
        (slope - 2.0).abs() <= 0.05,
        "log-log slope {slope} outside 2.00 +/- 0.05"
    );
    println!("criterion 09 delta^2 scaling: PASS (slope {slope:.4})");
}

#[test]
fn criterion_10_transforms_synthesis_and_export_arithmetic() {
    let _g = serial();
    // cosine projection vs Fourier magnitude for a symmetric kernel
    let kernel = design_kernel(&bandpass_spec(1.35, 4.0, 1001, 250.0), 0.9).unwrap();
    assert!(kernel.is_symmetric(1e-12));
    let grid: Vec<f64> = (0..=400).map(|k| 0.01 * k as f64).collect();
    let four = transfer_function(&kernel, &grid).magnitude();
    let cosine = cosine_transform(&kernel, &grid);
    let peak = four.iter().cloned().fold(0.0f64, f64::max);
    let mut worst: f64 = 0.0;
    for (a, b) in four.iter().zip(&cosine) {
        worst = worst.max((a - b.abs()).abs() / peak);
    }
    assert!(worst <= 1e-10, "transform identity violated: {worst:.2e}");

    // 1/f synthesis periodogram slope
    let model = NoiseModel::one_over_f(1.0, 33);
    let traces: Vec<_> = (0..60)
        .map(|t| synthesize(&model, 131.07, 2e-3, t).unwrap())
        .collect();
    let spec = psd_estimate(&traces).unwrap();
    let slope = loglog_slope(&spec, 0.02, 5.0);
    assert!((slope + 1.0).abs() <= 0.15, "periodogram slope {slope}");

    // waveform sample-count arithmetic
    let fields_4us = fields_from_aux(
        &aux_from_impulse(&kernel, AuxMode::ExactArcsin).unwrap(),
    )
    .unwrap();
    let wf = export_waveform(&fields_4us, 4, SAMPLE_LIMIT).unwrap();
    assert_eq!(wf.samples.len(), 1000, "250 samples per us at 4 ns");
    let long_kernel = design_kernel(&bandpass_spec(1.0, 300.0, 75001, 250.0), 0.9).unwrap();
    let long_fields = fields_from_aux(
        &aux_from_impulse(&long_kernel, AuxMode::ExactArcsin).unwrap(),
    )
    .unwrap();
    let wf_long = export_waveform(&long_fields, 4, SAMPLE_LIMIT).unwrap();
    assert_eq!(wf_long.dt_ns, 16);
    assert_eq!(wf_long.samples.len(), 18750);
    assert_eq!(wf_long.decimated_from_ns, Some(4));
    println!(
        "criterion 10 identities: PASS (transform identity {worst:.1e}, 1/f slope {slope:.3}, export 1000 and 18750 samples)"
    );
}

#[test]
fn criterion_11_byte_identical_reruns() {
    let _g = serial();
    let mut cfg = base_config(
        ExperimentKind::FreqResponse,
        bandpass_spec(1.35, 4.0, 501, 125.0),
    );
    cfg.probe_freq_mhz = Some(Axis::new(1.2, 1.5, 7));
    cfg.noise = Some(NoiseModel::one_over_f(0.3, 9));
    cfg.trials = 6;
    cfg.dt_us = 2e-3;
    let pool1 = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let pool4 = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap();
    let a = pool1.install(|| run_sweep(&cfg).unwrap().to_csv());
    let b = pool4.install(|| run_sweep(&cfg).unwrap().to_csv());
    let c = run_sweep(&cfg).unwrap().to_csv();
    assert_eq!(a, b, "thread count changed the bytes");
    assert_eq!(a, c, "rerun changed the bytes");
    println!(
        "criterion 11 determinism: PASS (byte-identical CSV across reruns and 1 vs 4 threads, {} bytes)",
        a.len()
    );
}
