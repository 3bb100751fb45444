use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const CHECK_FAILED: u8 = 1;
    pub const CONFIG: u8 = 2;
    pub const HORIZON: u8 = 3;
    pub const NUMERIC: u8 = 4;
    pub const NOT_CONVERGED: u8 = 5;
    pub const INCONCLUSIVE: u8 = 6;
    pub const DOMINANCE: u8 = 7;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] fracbound::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => exit::CONFIG,
            CliError::Core(e) => core_code(e),
        }
    }
}

fn core_code(e: &fracbound::Error) -> u8 {
    use fracbound::Error::*;
    match e {
        Syntax { .. } | UnknownVariable { .. } | InvalidInput(_) | Integrability(_) | Divergence(_) => {
            exit::CONFIG
        }
        HorizonCollapse(_) => exit::HORIZON,
        NonConvergence { .. } => exit::NOT_CONVERGED,
        Inconclusive(_) => exit::INCONCLUSIVE,
        AtNode { source, .. } => core_code(source),
        Domain { .. } | OutOfDomain(_) | BlowUp { .. } | Boundary(_) => exit::NUMERIC,
    }
}
