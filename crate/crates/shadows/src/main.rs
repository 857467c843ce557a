use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use shadows::config::{Command, ExperimentConfig};
use shadows::output::write_json;
use shadows::{run, EXIT_ASSERTION};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Sub {
    Constants,
    GammaCheck,
    Converge,
    Meanwidth,
    SmallballMc,
    Exponent,
    SectionVolume,
    Onedim,
}

impl Sub {
    fn command(self) -> Command {
        match self {
            Sub::Constants => Command::Constants,
            Sub::GammaCheck => Command::GammaCheck,
            Sub::Converge => Command::Converge,
            Sub::Meanwidth => Command::MeanWidth,
            Sub::SmallballMc => Command::SmallBallMc,
            Sub::Exponent => Command::Exponent,
            Sub::SectionVolume => Command::SectionVolume,
            Sub::Onedim => Command::OneDim,
        }
    }
}

/// Random shadows of l_p balls: simulations and large-deviation exponents.
#[derive(Debug, Parser)]
#[command(name = "shadows", version)]
struct Cli {
    /// Subcommand to run; must match `command` in the config file.
    #[arg(value_enum)]
    subcommand: Sub,
    /// Flat key = value experiment file.
    #[arg(long)]
    config: PathBuf,
    /// Override `master_seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Exit with status 3 unless every built-in check passes.
    #[arg(long = "assert")]
    assert_mode: bool,
    /// Override `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let mut cfg = match ExperimentConfig::load(&cli.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if cfg.command != cli.subcommand.command() {
        eprintln!(
            "error: subcommand `{}` does not match config command `{}`",
            cli.subcommand.command(),
            cfg.command
        );
        return ExitCode::from(1);
    }
    if let Some(s) = cli.seed {
        cfg.master_seed = s;
    }
    if let Some(out) = cli.out {
        cfg.output_dir = out;
    }
    let report = match run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let written = report
        .artifacts
        .write_all(&cfg.output_dir)
        .and_then(|files| write_json(&cfg.output_dir.join("summary.json"), &report).map(|_| files));
    match written {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    }
    for a in &report.assertions {
        println!("[{}] {}: {}", if a.passed { "pass" } else { "FAIL" }, a.name, a.detail);
    }
    if cli.assert_mode && !report.all_passed() {
        return ExitCode::from(EXIT_ASSERTION as u8);
    }
    ExitCode::SUCCESS
}
