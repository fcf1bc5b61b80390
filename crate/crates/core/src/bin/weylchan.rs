use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use weylchan::config::{Command, ConfigLayer, MeasureKind, OutputFormat, RunConfig};
use weylchan::figures::run_figure;
use weylchan::verify::{run_verify, VerifyOptions};

#[derive(Parser)]
#[command(name = "weylchan", version, about = "Choi spectra, decoherence rates and non-Markovianity measures of the perturbed Weyl channel")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Intermediate-map Choi eigenvalues along p_star
    Spectrum(Flags),
    /// Decoherence rate and its normalized form along p
    Rates(Flags),
    /// HCLA, BLP and RHP measures along an alpha grid
    Measures(Flags),
    /// Trace distance of one MUB pair along p
    Distance(Flags),
    /// Run the self-check suites
    Verify(Flags),
}

#[derive(Args, Default)]
struct Flags {
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long = "p-base")]
    p_base: Option<f64>,
    /// START:END:STEP
    #[arg(long)]
    grid: Option<String>,
    /// BASIS:I:J
    #[arg(long)]
    pair: Option<String>,
    #[arg(long)]
    measure: Option<MeasureKind>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<OutputFormat>,
    /// Largest dimension for verify
    #[arg(long = "max-d")]
    max_d: Option<usize>,
    /// key = value config file; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Flags {
    fn layer(&self) -> ConfigLayer {
        ConfigLayer {
            d: self.d,
            alpha: self.alpha,
            p_base: self.p_base,
            grid: self.grid.clone(),
            pair: self.pair.clone(),
            measure: self.measure,
            out: self.out.clone(),
            format: self.format,
            max_d: self.max_d,
        }
    }
}

fn run(cli: Cli) -> weylchan::Result<bool> {
    let (command, flags) = match cli.command {
        Sub::Spectrum(f) => (Command::Spectrum, f),
        Sub::Rates(f) => (Command::Rates, f),
        Sub::Measures(f) => (Command::Measures, f),
        Sub::Distance(f) => (Command::Distance, f),
        Sub::Verify(f) => (Command::Verify, f),
    };
    let base = match &flags.config {
        Some(path) => ConfigLayer::from_file(path)?,
        None => ConfigLayer::default(),
    };
    let cfg = RunConfig::resolve(command, base.overlay(flags.layer()))?;
    let (text, ok) = if command == Command::Verify {
        let report = run_verify(&VerifyOptions::new(cfg.max_d, cfg.seed));
        (report.render(), report.passed())
    } else {
        (run_figure(&cfg)?.render(cfg.format)?, true)
    };
    match &cfg.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| weylchan::Error::Config(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(ok)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
