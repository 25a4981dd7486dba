use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use econtact_cli::manifest::{parse_manifest, BuildOptions, Built, Orientation};
use econtact_cli::report::Report;
use econtact_cli::run::{self, RunError};

#[derive(Parser)]
#[command(name = "econtact", version, about = "Verify epsilon-contact structures and six-dimensional products")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// auto, +1 or -1; overrides the manifest.
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = Orientation::parse)]
    orientation: Option<Orientation>,
    /// Fixed parameter values, `name=value,...`.
    #[arg(long, global = true, default_value = "")]
    params: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Contact equations and the structure identities.
    Check { manifest: PathBuf },
    /// εη-Einstein certificate.
    Classify { manifest: PathBuf },
    /// μ, light-cone frame, J and integrability for ε = 0.
    NullAnalysis { manifest: PathBuf },
    /// Field equations of the product N × X.
    Product { lorentzian: PathBuf, riemannian: PathBuf },
    /// Built-in examples; lists them when no name is given.
    Catalog { name: Option<String> },
    /// Re-serializes a manifest after validating it.
    Normalize { manifest: PathBuf },
}

fn load(path: &Path, opts: &BuildOptions) -> Result<(Built, String), RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::Input(format!("{}: {e}", path.display())))?;
    let m = parse_manifest(&text).map_err(|e| RunError::Input(format!("{}: {e}", path.display())))?;
    let built = m.build(opts)?;
    Ok((built, m.name))
}

fn dispatch(cli: &Cli) -> Result<Option<Report>, RunError> {
    let opts = BuildOptions {
        params: run::parse_params(&cli.params)?,
        orientation: cli.orientation.clone(),
        lenient: false,
    };
    let seed = cli.seed;
    Ok(Some(match &cli.command {
        Command::Check { manifest } => {
            let (b, name) = load(manifest, &opts)?;
            run::check(&b, &name, seed)
        }
        Command::Classify { manifest } => {
            let (b, name) = load(manifest, &opts)?;
            run::classify_built(&b, &name, seed)
        }
        Command::NullAnalysis { manifest } => {
            let (b, name) = load(manifest, &opts)?;
            run::null_analysis(&b, &name, seed)?
        }
        Command::Product { lorentzian, riemannian } => {
            // each value applies to the factors that declare it
            let lenient = BuildOptions { lenient: true, ..opts.clone() };
            let (n, nn) = load(lorentzian, &lenient)?;
            let (x, xn) = load(riemannian, &lenient)?;
            for (p, _) in &opts.params {
                let fixed = format!("{p} fixed to ");
                if !n.notes.iter().chain(&x.notes).any(|s| s.starts_with(&fixed)) {
                    return Err(RunError::Input(format!("`{p}` is not a parameter of either factor")));
                }
            }
            run::product(&n, &x, &format!("{nn} x {xn}"), seed)
        }
        Command::Catalog { name: Some(name) } => run::catalog(name, &opts.params, seed)?,
        Command::Catalog { name: None } => {
            for n in run::catalog_names() {
                println!("{n}");
            }
            return Ok(None);
        }
        Command::Normalize { manifest } => {
            let text = std::fs::read_to_string(manifest).map_err(|e| RunError::Input(format!("{}: {e}", manifest.display())))?;
            let m = parse_manifest(&text).map_err(|e| RunError::Input(format!("{}: {e}", manifest.display())))?;
            println!("{}", m.to_json());
            return Ok(None);
        }
    }))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(Some(rep)) => {
            match cli.format {
                Format::Text => print!("{}", rep.to_text()),
                Format::Json => println!("{}", rep.to_json()),
            }
            ExitCode::from(rep.status.exit_code() as u8)
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(RunError::EXIT_CODE as u8)
        }
    }
}
