//! Built-in configurations.

use crate::config::Config;
use crate::error::CliError;

pub const PRESETS: [(&str, &str); 6] = [
    ("example-2.8", include_str!("../presets/example-2.8.toml")),
    ("example-2.9", include_str!("../presets/example-2.9.toml")),
    ("example-3.12", include_str!("../presets/example-3.12.toml")),
    ("example-3.13", include_str!("../presets/example-3.13.toml")),
    ("example-3.14", include_str!("../presets/example-3.14.toml")),
    ("linear-ml", include_str!("../presets/linear-ml.toml")),
];

pub fn source(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn preset(name: &str) -> Result<Config, CliError> {
    let text = source(name).ok_or_else(|| {
        let names: Vec<_> = PRESETS.iter().map(|(n, _)| *n).collect();
        CliError::Config(format!("unknown preset `{name}` (one of {})", names.join(", ")))
    })?;
    Config::parse(text)
}
