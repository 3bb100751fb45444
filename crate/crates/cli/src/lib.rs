//! Batch front end for `fracbound`: bounds, solves, hypothesis checks and
//! bound-versus-solution verification driven by a config file or preset.

pub mod config;
pub mod error;
pub mod output;
pub mod presets;
pub mod run;

use std::path::PathBuf;

use clap::Parser;

pub use config::{Config, Format, Mode};
pub use error::{exit, CliError};
pub use run::{execute, Outcome, Status};

#[derive(Debug, Clone, Parser)]
#[command(name = "fracbound", version, about = "Bounds and solutions for weakly singular integral inequalities and fractional IVPs")]
pub struct Args {
    pub mode: Mode,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Horizon, overriding `mesh.T`.
    #[arg(long = "T")]
    pub horizon: Option<f64>,
}

impl Args {
    /// The configuration with command-line overrides applied.
    pub fn config(&self) -> Result<Option<Config>, CliError> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config("--config and --preset are mutually exclusive".into()))
            }
            (Some(path), None) => Config::load(path)?,
            (None, Some(name)) => presets::preset(name)?,
            (None, None) => return Ok(None),
        };
        if let Some(p) = self.p {
            cfg.numeric.p = Some(p.into());
        }
        if let Some(n) = self.n {
            cfg.mesh.n = Some(n);
        }
        if let Some(tol) = self.tol {
            cfg.numeric.tol = Some(tol.into());
        }
        if let Some(t) = self.horizon {
            cfg.mesh.horizon = Some(t.into());
        }
        if let Some(path) = &self.out {
            cfg.output.path = Some(path.clone());
        }
        if let Some(f) = self.format {
            cfg.output.format = Some(f);
        }
        Ok(Some(cfg))
    }
}

/// Resolves the mode, runs the pipeline and writes the output file if one
/// is configured. Without a path the rendered data stays in the outcome.
pub fn run(args: &Args) -> Result<Outcome, CliError> {
    let Some(cfg) = args.config()? else {
        if args.mode == Mode::Example {
            let mut out = Outcome {
                status: Status::Ok,
                report: vec!["presets:".to_string()],
                data: None,
            };
            out.report
                .extend(presets::PRESETS.iter().map(|(n, _)| format!("  {n}")));
            return Ok(out);
        }
        return Err(CliError::Config("one of --config or --preset is required".into()));
    };
    let mode = match args.mode {
        Mode::Example => cfg
            .mode
            .ok_or_else(|| CliError::Config("the configuration declares no mode".into()))?,
        m => m,
    };
    let mut out = execute(mode, &cfg)?;
    if let (Some(path), Some(data)) = (&cfg.output.path, &out.data) {
        std::fs::write(path, data).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        out.data = None;
    }
    Ok(out)
}
