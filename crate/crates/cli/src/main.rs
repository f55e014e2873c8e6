use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use oscphasor::estimator::estimate_with;
use oscphasor::pmu_pipeline::{simulate_pmu, spectrum};
use oscphasor::signal_model::check_representability;
use oscphasor::{presets, EstimatorConfig, PmuConfig, Refinement};

use oscphasor_cli::config::{parse_pmu_settings, parse_signal_config, SignalConfig};
use oscphasor_cli::error::{CliError, CliResult};
use oscphasor_cli::report::RunReport;
use oscphasor_cli::{csvio, reproduce};

#[derive(Parser)]
#[command(name = "oscphasor", version, about = "Oscillation analysis of power-system waveforms and PMU phasors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a waveform CSV from a signal config.
    Synth {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out/waveform.csv")]
        output: PathBuf,
    },
    /// Run a waveform CSV through the PMU chain.
    PmuSim {
        #[arg(long)]
        input: PathBuf,
        /// PMU settings JSON; defaults to a one-cycle DFT at 30 fps.
        #[arg(long)]
        pmu: Option<PathBuf>,
        /// Signal config of the input, used for the envelope in the overlay.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Writes `<prefix>_raw.csv`, `_filtered.csv`, `_reported.csv` and
        /// `_overlay.dat`.
        #[arg(long, default_value = "out/pmu")]
        prefix: PathBuf,
    },
    /// Write the flipping-frequency and applicability tables.
    Tables {
        #[arg(long, default_value_t = 60.0)]
        f1: f64,
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        /// Comma-separated oscillation frequencies for the applicability table.
        #[arg(long, value_delimiter = ',')]
        f_os: Option<Vec<f64>>,
        #[arg(long, default_value = "out")]
        output_dir: PathBuf,
    },
    /// Estimate all model parameters from a waveform CSV.
    Estimate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 60.0)]
        f_nominal: f64,
        #[arg(long, value_enum, default_value_t = RefinementArg::Full)]
        refinement: RefinementArg,
        /// JSON report path; printed to stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check whether a three-component signal is phasor-representable.
    Represent {
        #[arg(long, conflicts_with = "input", required_unless_present = "input")]
        config: Option<PathBuf>,
        /// Waveform CSV; the estimator runs first.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 60.0)]
        f_nominal: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Amplitude spectrum of one column of a CSV with a `time` column.
    Spectrum {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "value")]
        column: String,
        #[arg(long, default_value = "out/spectrum.csv")]
        output: PathBuf,
    },
    /// Regenerate a reference artifact and check it.
    Reproduce {
        /// Artifact name, or `all`.
        name: String,
        #[arg(long, default_value = "out")]
        output_dir: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RefinementArg {
    Full,
    AngleOnly,
}

impl From<RefinementArg> for Refinement {
    fn from(r: RefinementArg) -> Self {
        match r {
            RefinementArg::Full => Refinement::Full,
            RefinementArg::AngleOnly => Refinement::AngleModulationOnly,
        }
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::from(e).in_file(path))
}

fn load_config(path: &Path) -> CliResult<SignalConfig> {
    parse_signal_config(&read_text(path)?).map_err(|e| e.in_file(path))
}

fn emit_json<T: serde::Serialize>(value: &T, output: Option<&Path>) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).expect("report serializes");
    match output {
        Some(p) => csvio::write_text(p, &text),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Synth { config, output } => {
            let w = load_config(&config)?.synthesize()?;
            csvio::write_waveform(&output, &w)?;
            eprintln!("wrote {} samples to {}", w.len(), output.display());
        }
        Command::PmuSim {
            input,
            pmu,
            config,
            prefix,
        } => {
            let w = csvio::read_waveform(&input)?;
            let cfg = match &pmu {
                Some(p) => parse_pmu_settings(&read_text(p)?).map_err(|e| e.in_file(p))?,
                None => PmuConfig::default(),
            };
            let signal = config.as_deref().map(load_config).transpose()?;
            let out = simulate_pmu(&w, &cfg)?;
            reproduce::write_pmu_output(&prefix, &out)?;
            let envelope = signal.map(|c| move |t: f64| c.signal.envelope(t));
            reproduce::write_overlay(
                &reproduce::with_suffix(&prefix, "_overlay.dat"),
                &out,
                envelope.as_ref().map(|f| f as &dyn Fn(f64) -> f64),
            )?;
            eprintln!(
                "{} raw, {} filtered, {} reported phasors",
                out.raw.len(),
                out.filtered.len(),
                out.reported.len()
            );
        }
        Command::Tables {
            f1,
            n_max,
            f_os,
            output_dir,
        } => {
            if !(f1.is_finite() && f1 > 0.0) || n_max == 0 {
                return Err(CliError::input("--f1 must be positive and --n-max at least 1"));
            }
            let f_os = f_os.unwrap_or_else(|| presets::APPLICABILITY_F_OS.to_vec());
            if f_os.iter().any(|f| !(f.is_finite() && *f >= 0.0)) {
                return Err(CliError::input("--f-os values must be non-negative"));
            }
            reproduce::write_table1(&output_dir.join("table1.csv"), f1, n_max)?;
            reproduce::write_table2(&output_dir.join("table2.csv"), f1, n_max, &f_os)?;
        }
        Command::Estimate {
            input,
            f_nominal,
            refinement,
            output,
        } => {
            let bytes = fs::read(&input).map_err(|e| CliError::from(e).in_file(&input))?;
            let w = csvio::read_waveform(&input)?;
            let cfg = EstimatorConfig {
                refinement: refinement.into(),
                ..EstimatorConfig::default()
            };
            let r = estimate_with(&w, f_nominal, &cfg)?;
            let name = input.display().to_string();
            let report = RunReport::new(&name, &bytes, &w, f_nominal, &cfg, &r);
            emit_json(&report, output.as_deref())?;
        }
        Command::Represent {
            config,
            input,
            f_nominal,
            output,
        } => {
            let (signal, fs, duration) = match (config, input) {
                (Some(path), _) => {
                    let c = load_config(&path)?;
                    let p = c.signal.three_component().ok_or_else(|| {
                        CliError::input("representability needs h = 0 (no angle modulation)")
                    })?;
                    (p, c.fs, c.duration)
                }
                (None, Some(path)) => {
                    let w = csvio::read_waveform(&path)?;
                    let r = estimate_with(&w, f_nominal, &EstimatorConfig::default())?;
                    (r.params.to_three_component(), w.fs, w.duration())
                }
                (None, None) => unreachable!("clap requires one of the inputs"),
            };
            let rep = check_representability(&signal, fs, duration)?;
            emit_json(&rep, output.as_deref())?;
        }
        Command::Spectrum {
            input,
            column,
            output,
        } => {
            let table = csvio::read_table(&input)?;
            let times = table.column("time").map_err(|e| e.in_file(&input))?;
            let values = table.column(&column).map_err(|e| e.in_file(&input))?;
            let rate = csvio::uniform_rate(&times).map_err(|e| e.in_file(&input))?;
            csvio::write_spectrum(&output, &spectrum(&values, rate)?)?;
        }
        Command::Reproduce { name, output_dir } => {
            let (text, passed) = reproduce::run(&name, &output_dir)?;
            print!("{text}");
            if !passed {
                return Err(CliError::Numerical(format!("{name}: some checks failed")));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
