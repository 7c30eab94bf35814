//! Command-line front end: design kernels, reverse-engineer drive fields,
//! run single simulations and sweeps, build pulsed baselines, export AWG
//! waveforms, and plot result tables.
//!
//! Exit codes: 0 success, 2 invalid configuration or input, 3 numerical
//! failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qif::cpmg::{build_cpmg, cpmg_filter_response, sequence_to_trace};
use qif::dynamics::StepConfig;
use qif::error::QifError;
use qif::experiments::{
    config_hash, run_simulate, run_sweep, Axis, SimulateConfig, SimulateOutput, SweepConfig,
};
use qif::filter::{design_kernel, transfer_function, FilterSpec};
use qif::invariant::{aux_from_impulse, fields_from_aux, AuxMode};
use qif::plot::{render, PlotKind};
use qif::table::ResultTable;
use qif::waveform::{export_waveform, SAMPLE_LIMIT};

#[derive(Parser)]
#[command(name = "qif", version, about = "Frequency-domain filter synthesis for qubit control")]
struct Cli {
    /// Path to the JSON configuration for the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the seed stored in the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads for sweeps; results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Table output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    ExactArcsin,
    Simplified,
}

impl From<ModeArg> for AuxMode {
    fn from(m: ModeArg) -> AuxMode {
        match m {
            ModeArg::ExactArcsin => AuxMode::ExactArcsin,
            ModeArg::Simplified => AuxMode::Simplified,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Design the impulse response a filter spec describes.
    Design {
        /// Peak amplitude after normalization.
        #[arg(long, default_value_t = 0.9)]
        peak: f64,
    },
    /// Reverse-engineer the drive fields for a filter spec.
    Fields {
        #[arg(long, value_enum, default_value_t = ModeArg::ExactArcsin)]
        mode: ModeArg,
        #[arg(long, default_value_t = 0.9)]
        peak: f64,
    },
    /// Propagate one protocol from a simulation config.
    Simulate,
    /// Run a sweep experiment from a sweep config.
    Sweep {
        /// Experiment name; must match the config.
        experiment: String,
    },
    /// Build a CPMG sequence, its drive trace and filter response.
    Cpmg,
    /// Export the drive field in the AWG waveform format.
    ExportWaveform {
        #[arg(long, default_value_t = 4)]
        dt_ns: u32,
        #[arg(long, default_value_t = SAMPLE_LIMIT)]
        max_samples: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::ExactArcsin)]
        mode: ModeArg,
        #[arg(long, default_value_t = 0.9)]
        peak: f64,
    },
    /// Render a result-table CSV to SVG.
    Plot {
        /// Table CSV produced by `sweep` or `cpmg`.
        #[arg(long)]
        table: PathBuf,
        #[arg(long, value_enum, default_value_t = PlotKindArg::Line)]
        kind: PlotKindArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PlotKindArg {
    Line,
    Heatmap,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        // ignore failure if a pool already exists (e.g. repeated init in tests)
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn read_config(cli: &Cli) -> Result<String, QifError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| QifError::config("--config is required for this command"))?;
    Ok(fs::read_to_string(path)?)
}

fn write_out(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, QifError> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

fn write_table(cli: &Cli, name: &str, table: &ResultTable) -> Result<PathBuf, QifError> {
    match cli.format {
        Format::Csv => write_out(&cli.out, &format!("{name}.csv"), &table.to_csv()),
        Format::Json => write_out(&cli.out, &format!("{name}.json"), &table.to_json()),
    }
}

fn run(cli: &Cli) -> Result<(), QifError> {
    match &cli.command {
        Command::Design { peak } => {
            let spec = FilterSpec::from_json_str(&read_config(cli)?)?;
            let kernel = design_kernel(&spec, *peak)?;
            let path = write_out(&cli.out, "impulse_response.csv", &kernel.to_csv())?;
            let f_hi = spec
                .centers
                .iter()
                .map(|c| c.f0_mhz)
                .fold(2.0 * spec.cutoff_mhz, f64::max)
                + 1.0;
            let grid: Vec<f64> = Axis::new(0.0, f_hi, 401).values();
            let tf = transfer_function(&kernel, &grid);
            let mut table = ResultTable::new(vec!["f_mhz".into(), "magnitude".into()]);
            for (f, m) in grid.iter().zip(tf.magnitude()) {
                table.push_row(vec![*f, m])?;
            }
            let tf_path = write_out(&cli.out, "transfer_function.csv", &table.to_csv())?;
            for w in kernel.warnings() {
                eprintln!("warning: {w:?}");
            }
            println!("{} ({} samples)", path.display(), kernel.samples().len());
            println!("{}", tf_path.display());
            Ok(())
        }
        Command::Fields { mode, peak } => {
            let spec = FilterSpec::from_json_str(&read_config(cli)?)?;
            let kernel = design_kernel(&spec, *peak)?;
            let aux = aux_from_impulse(&kernel, (*mode).into())?;
            let fields = fields_from_aux(&aux)?;
            let path = write_out(&cli.out, "control_fields.csv", &fields.to_csv())?;
            println!("{}", path.display());
            Ok(())
        }
        Command::Simulate => {
            let mut cfg = SimulateConfig::from_json_str(&read_config(cli)?)?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            match run_simulate(&cfg)? {
                SimulateOutput::Single(result) => {
                    let path = write_out(&cli.out, "result.json", &result.to_json())?;
                    if let Some(csv) = result.trajectory_csv() {
                        write_out(&cli.out, "trajectory.csv", &csv)?;
                    }
                    println!("{}", path.display());
                    println!("sz = {}", result.sz());
                }
                SimulateOutput::Ensemble(ens) => {
                    let body = serde_json::json!({
                        "trials": ens.trials,
                        "sx": ens.mean.0, "sy": ens.mean.1, "sz": ens.mean.2,
                        "stderr_sx": ens.stderr.0,
                        "stderr_sy": ens.stderr.1,
                        "stderr_sz": ens.stderr.2,
                    });
                    let text = serde_json::to_string_pretty(&body).expect("json");
                    let path = write_out(&cli.out, "result.json", &text)?;
                    println!("{}", path.display());
                    println!("sz = {} +/- {}", ens.mean.2, ens.stderr.2);
                }
            }
            Ok(())
        }
        Command::Sweep { experiment } => {
            let mut cfg = SweepConfig::from_json_str(&read_config(cli)?)?;
            if cfg.experiment.name() != experiment {
                return Err(QifError::config(format!(
                    "experiment: config says {:?} but the command line asked for {:?}",
                    cfg.experiment.name(),
                    experiment
                )));
            }
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            let table = run_sweep(&cfg)?;
            let stem = cfg
                .output
                .clone()
                .unwrap_or_else(|| cfg.experiment.name().to_string());
            let path = write_table(cli, &stem, &table)?;
            println!("{}", path.display());
            println!("config_sha256 = {}", config_hash(&cfg));
            Ok(())
        }
        Command::Cpmg => {
            let cfg: CpmgCliConfig = serde_json::from_str(&read_config(cli)?)?;
            cfg.validate()?;
            let seq = build_cpmg(
                cfg.n_pulses,
                cfg.t_f_us,
                cfg.pulse_width_us,
                cfg.amplitude_scale,
            )?;
            write_out(&cli.out, "cpmg_sequence.json", &seq.to_json())?;
            let plan = sequence_to_trace(&seq, cfg.dt_us)?;
            write_out(&cli.out, "cpmg_trace.csv", &plan.to_csv())?;
            let step = StepConfig {
                dt_us: cfg.dt_us,
                ..Default::default()
            };
            let grid = cfg.f_grid.values();
            let resp = cpmg_filter_response(&seq, &grid, cfg.delta_rad_per_us, &step)?;
            let mut table = ResultTable::new(vec![
                "probe_f_mhz".into(),
                "deficit".into(),
                "analytic_deficit".into(),
            ]);
            for i in 0..grid.len() {
                table.push_row(vec![
                    resp.frequencies[i],
                    resp.simulated_deficit[i],
                    resp.analytic_deficit[i],
                ])?;
            }
            let path = write_table(cli, "cpmg_response", &table)?;
            println!("{}", path.display());
            Ok(())
        }
        Command::ExportWaveform {
            dt_ns,
            max_samples,
            mode,
            peak,
        } => {
            let spec = FilterSpec::from_json_str(&read_config(cli)?)?;
            let kernel = design_kernel(&spec, *peak)?;
            let aux = aux_from_impulse(&kernel, (*mode).into())?;
            let fields = fields_from_aux(&aux)?;
            let wf = export_waveform(&fields, *dt_ns, *max_samples)?;
            let path = write_out(&cli.out, "waveform.txt", &wf.format())?;
            println!("{} ({} samples at {} ns)", path.display(), wf.samples.len(), wf.dt_ns);
            Ok(())
        }
        Command::Plot { table, kind } => {
            let text = fs::read_to_string(table)?;
            let parsed = ResultTable::from_csv_str(&text)?;
            let svg = render(
                &parsed,
                match kind {
                    PlotKindArg::Line => PlotKind::Line,
                    PlotKindArg::Heatmap => PlotKind::Heatmap,
                },
            )?;
            let stem = table
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("plot");
            let path = write_out(&cli.out, &format!("{stem}.svg"), &svg)?;
            println!("{}", path.display());
            Ok(())
        }
    }
}

#[derive(serde::Deserialize)]
struct CpmgCliConfig {
    n_pulses: usize,
    t_f_us: f64,
    #[serde(default)]
    pulse_width_us: f64,
    #[serde(default = "one")]
    amplitude_scale: f64,
    f_grid: Axis,
    #[serde(default = "default_delta")]
    delta_rad_per_us: f64,
    #[serde(default = "default_dt")]
    dt_us: f64,
}

fn one() -> f64 {
    1.0
}
fn default_delta() -> f64 {
    0.05
}
fn default_dt() -> f64 {
    1e-3
}

impl CpmgCliConfig {
    fn validate(&self) -> Result<(), QifError> {
        self.f_grid.validate("f_grid")?;
        if !(self.dt_us.is_finite() && self.dt_us > 0.0) {
            return Err(QifError::config("dt_us: must be positive"));
        }
        if !(self.delta_rad_per_us.is_finite() && self.delta_rad_per_us >= 0.0) {
            return Err(QifError::config("delta_rad_per_us: must be >= 0"));
        }
        Ok(())
    }
}
