//! Reproduction configs shipped with the binary.

use std::path::Path;

use crate::config::{ConfigError, ExperimentConfig};

pub const BUNDLED: [(&str, &str); 5] = [
    ("bingham_d10", include_str!("../configs/bingham_d10.toml")),
    ("bingham_d50", include_str!("../configs/bingham_d50.toml")),
    ("mixture_d10", include_str!("../configs/mixture_d10.toml")),
    (
        "mixture_kappa_sweep",
        include_str!("../configs/mixture_kappa_sweep.toml"),
    ),
    ("curved_vmf", include_str!("../configs/curved_vmf.toml")),
];

pub fn bundled(name: &str) -> Option<ExperimentConfig> {
    BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| ExperimentConfig::from_toml(text).expect("bundled configs parse"))
}

/// Loads `arg` as a file path, falling back to a bundled config name.
pub fn load(arg: &str) -> Result<ExperimentConfig, ConfigError> {
    let path = Path::new(arg);
    if !path.exists() {
        if let Some(c) = bundled(arg) {
            return Ok(c);
        }
    }
    ExperimentConfig::from_path(path)
}
