use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use echomem::mapping::{absorbed_probability, transmit};

use crate::checks::{
    absorption_config, check_absorption, check_pulse, check_retrieval, retrieval_config, Stage,
};
use crate::config::{key_reference, parse_config, ExperimentConfig};
use crate::error::{AppError, Result};
use crate::metrics::{distortion_ratio_center, peak_ratio, total_probability, Experiment};
use crate::presets::{preset_text, try_preset_config};
use crate::sweep::{format_value, run_sweep_with, write_csv, write_csv_to, write_spectrum, SweepOptions};

#[derive(Debug, Parser)]
#[command(
    name = "echomem",
    about = "Photon-echo quantum memory: absorption, storage and backward retrieval of a single photon",
    after_help = "Run `echomem keys` for the configuration keys; units are part of each key name."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Transmitted spectrum and absorbed probability.
    Absorb {
        config: PathBuf,
        /// Two-column dump of the transmitted spectrum.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Echo spectrum and its figures of merit.
    Echo {
        config: PathBuf,
        /// Two-column dump of the echo spectrum.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parameter sweep over the `[sweep]` axes, written as CSV.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Compare closed forms with the brute-force integrators.
    OracleCheck {
        #[arg(long, value_enum, default_value = "all")]
        stage: StageArg,
        /// Columnar norm trajectory of the coupled stages.
        #[arg(long)]
        trajectory: Option<PathBuf>,
    },
    /// Run a figure preset.
    Preset {
        #[arg(value_parser = ["fig2", "fig3", "fig4", "fig5"])]
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
        /// Print the preset's configuration text instead of running it.
        #[arg(long)]
        show: bool,
    },
    /// List every configuration key.
    Keys,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StageArg {
    Pulse,
    Absorption,
    Retrieval,
    All,
}

/// Runs the command line `argv` (program name first) and returns the exit code.
pub fn cli_main<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    if argv.len() <= 1 {
        let mut cmd = <Cli as clap::CommandFactory>::command();
        let _ = writeln!(stderr, "{}", cmd.render_help());
        return 1;
    }
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let shown = e.render();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{shown}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{shown}");
                    1
                }
            };
        }
    };
    match run(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn load(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    Ok(parse_config(&text)?)
}

fn out_err(e: std::io::Error) -> AppError {
    AppError::io("<stdout>", e)
}

fn run(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Absorb { config, out } => {
            let exp = Experiment::from_config(&load(&config)?)?;
            let t = transmit(&exp.medium, &exp.photon)?;
            writeln!(stdout, "input_norm = {}", format_value(exp.photon.spectrum().norm())).map_err(out_err)?;
            writeln!(stdout, "transmitted_norm = {}", format_value(t.norm())).map_err(out_err)?;
            let absorbed = absorbed_probability(&exp.medium, &exp.photon)?;
            writeln!(stdout, "absorbed_probability = {}", format_value(absorbed)).map_err(out_err)?;
            if let Some(path) = out {
                write_spectrum(&t, &path)?;
            }
            Ok(())
        }
        Command::Echo { config, out } => {
            let cfg = load(&config)?;
            let exp = Experiment::from_config(&cfg)?;
            let echo = exp.echo()?;
            for (k, v) in [
                ("total_probability", total_probability(&echo)),
                ("peak_ratio", peak_ratio(&echo)),
                ("center_ratio", echo.center_ratio()),
                ("distortion_ratio_center", distortion_ratio_center(&exp)),
            ] {
                writeln!(stdout, "{k} = {}", format_value(v)).map_err(out_err)?;
            }
            if let Some(w) = exp.photon.validity_warning(&exp.medium, exp.schedule.storage_time()) {
                writeln!(stderr, "warning: {w}").map_err(out_err)?;
            }
            if let Some(path) = out {
                write_spectrum(&echo.spectrum, &path)?;
            }
            Ok(())
        }
        Command::Sweep { config, out, threads } => {
            let cfg = load(&config)?;
            sweep(&cfg, out, threads, stdout, stderr)
        }
        Command::Preset {
            name,
            out,
            threads,
            show,
        } => {
            if show {
                let text = preset_text(&name).ok_or_else(|| AppError::Usage(format!("unknown preset {name}")))?;
                return write!(stdout, "{text}").map_err(out_err);
            }
            let cfg = try_preset_config(&name)
                .ok_or_else(|| AppError::Usage(format!("unknown preset {name}")))??;
            sweep(&cfg, out, threads, stdout, stderr)
        }
        Command::OracleCheck { stage, trajectory } => {
            let stages: Vec<Stage> = match stage {
                StageArg::Pulse => vec![Stage::Pulse],
                StageArg::Absorption => vec![Stage::Absorption],
                StageArg::Retrieval => vec![Stage::Retrieval],
                StageArg::All => Stage::ALL.to_vec(),
            };
            let mut failed = Vec::new();
            let mut table = String::new();
            for s in stages {
                let (passed, detail) = match s {
                    Stage::Pulse => {
                        let c = check_pulse()?;
                        (c.passed(), c.to_string())
                    }
                    Stage::Absorption => {
                        let c = check_absorption(&absorption_config())?;
                        for r in &c.outcome.trajectory {
                            table.push_str(&format!(
                                "absorption\t{:.9e}\t{:.9e}\t{:.9e}\t{:.9e}\n",
                                r.time,
                                r.field,
                                r.atoms,
                                r.total()
                            ));
                        }
                        (c.passed(), c.to_string())
                    }
                    Stage::Retrieval => {
                        let c = check_retrieval(&retrieval_config())?;
                        let t = c.backward.trajectory_table();
                        table.push_str(t.split_once('\n').map_or("", |(_, rest)| rest));
                        (c.passed(), c.to_string())
                    }
                };
                let verdict = if passed { "PASS" } else { "FAIL" };
                writeln!(stdout, "{verdict} {}\n{detail}", s.name()).map_err(out_err)?;
                if !passed {
                    failed.push(s.name());
                }
            }
            if let Some(path) = trajectory {
                let text = format!("stage\ttime_s\tfield\tatoms\ttotal\n{table}");
                std::fs::write(&path, text).map_err(|e| AppError::io(&path, e))?;
            }
            if failed.is_empty() {
                Ok(())
            } else {
                Err(AppError::CheckFailed(failed.join(", ")))
            }
        }
        Command::Keys => write!(stdout, "{}", key_reference()).map_err(out_err),
    }
}

fn sweep(
    cfg: &ExperimentConfig,
    out: Option<PathBuf>,
    threads: Option<usize>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<()> {
    let opts = SweepOptions {
        threads,
        keep_spectra: cfg.output.spectrum_dir.is_some(),
    };
    let result = run_sweep_with(cfg, opts)?;
    match out.or_else(|| cfg.output.csv.clone()) {
        Some(path) => write_csv(&result, &path)?,
        None => write_csv_to(&result, &mut *stdout).map_err(|e| out_err(std::io::Error::other(e.to_string())))?,
    }
    if let Some(dir) = &cfg.output.spectrum_dir {
        std::fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
        for (i, (_, spectrum)) in result.spectra.iter().enumerate() {
            write_spectrum(spectrum, &dir.join(format!("point_{i:05}.txt")))?;
        }
    }
    let flagged = result.flagged();
    if flagged > 0 {
        writeln!(stderr, "warning: {flagged} of {} rows flagged", result.rows.len()).map_err(out_err)?;
    }
    Ok(())
}
