//! Experiment configuration, read from TOML.

use std::path::{Path, PathBuf};

use geoslice::diagnostics::{SphereGrid, DEFAULT_GRID_CELLS};
use geoslice::mcmc::{SamplerConfig, DEFAULT_LEAPFROG_STEPS, DEFAULT_MAX_REJECTIONS};
use geoslice::targets::{LogDensity, Target, TargetSpec};
use geoslice::UnitVector;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const PAPER_SCALE_STEPS: usize = 100_000;
pub const PAPER_SCALE_REPETITIONS: usize = 10;
pub const DEFAULT_MAX_LAG: usize = 200;
pub const DEFAULT_HISTOGRAM_BINS: usize = 50;

/// A configuration problem, naming the offending field.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{field}: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Prefixes the field of a core parameter error with `prefix`.
    fn from_core(prefix: &str, err: geoslice::Error) -> Self {
        match err {
            geoslice::Error::InvalidParameter { field, reason } => Self::new(format!("{prefix}.{field}"), reason),
            other => Self::new(prefix, other.to_string()),
        }
    }
}

/// Where chains start.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitPolicy {
    /// The target's mode (first component or waypoint for multimodal targets).
    #[default]
    Mode,
    /// A uniform draw, independent per repetition.
    Uniform,
    /// The given coordinates, normalized.
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    /// Fibonacci lattice centers (d = 3).
    Fibonacci,
    /// Uniformly drawn centers, any d.
    Random,
    /// Equal-area latitude bands (d = 3); `cells` must be `bands * sectors`.
    Bands,
}

/// Partition used for the discretized KL divergence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub kind: GridKind,
    #[serde(default = "default_cells")]
    pub cells: usize,
    /// Number of bands for `bands` grids.
    #[serde(default)]
    pub bands: Option<usize>,
    /// Seed for `random` grids.
    #[serde(default)]
    pub seed: u64,
}

fn default_cells() -> usize {
    DEFAULT_GRID_CELLS
}

impl GridSpec {
    pub fn build(&self, d: usize) -> Result<SphereGrid, ConfigError> {
        let grid = match self.kind {
            GridKind::Fibonacci if d != 3 => return Err(ConfigError::new("grid.kind", "fibonacci grids need d = 3")),
            GridKind::Fibonacci => SphereGrid::fibonacci(self.cells),
            GridKind::Random => SphereGrid::random_centers(d, self.cells, self.seed),
            GridKind::Bands if d != 3 => return Err(ConfigError::new("grid.kind", "band grids need d = 3")),
            GridKind::Bands => {
                let bands = self
                    .bands
                    .ok_or_else(|| ConfigError::new("grid.bands", "required for band grids"))?;
                if bands == 0 || !self.cells.is_multiple_of(bands) {
                    return Err(ConfigError::new("grid.bands", "must divide grid.cells"));
                }
                SphereGrid::equal_area(bands, self.cells / bands)
            }
        };
        grid.map_err(|e| ConfigError::from_core("grid", e))
    }
}

/// Which diagnostics to report besides the always-present ones.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnosticsSpec {
    /// Hopping across the hyperplane orthogonal to the mode; defaults to on for Bingham targets.
    pub hopping: Option<bool>,
    /// Mode-visit KL; defaults to on for mixture targets.
    pub kl_modes: Option<bool>,
    /// ACF lags to report; defaults to 200.
    pub max_lag: Option<usize>,
}

/// Plot-ready histogram of projections onto the mode axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HistogramSpec {
    #[serde(default = "default_bins")]
    pub bins: usize,
    /// Exact draws for the reference histogram; 0 skips it.
    #[serde(default)]
    pub exact_draws: usize,
}

fn default_bins() -> usize {
    DEFAULT_HISTOGRAM_BINS
}

/// Settings that replace the desk-scale ones under `--paper-scale`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PaperScale {
    #[serde(default = "paper_steps")]
    pub n_steps: usize,
    #[serde(default = "paper_repetitions")]
    pub repetitions: usize,
}

impl Default for PaperScale {
    fn default() -> Self {
        Self {
            n_steps: PAPER_SCALE_STEPS,
            repetitions: PAPER_SCALE_REPETITIONS,
        }
    }
}

fn paper_steps() -> usize {
    PAPER_SCALE_STEPS
}

fn paper_repetitions() -> usize {
    PAPER_SCALE_REPETITIONS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub target: TargetSpec,
    pub samplers: Vec<SamplerConfig>,
    pub n_steps: usize,
    #[serde(default = "one")]
    pub repetitions: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub init: InitPolicy,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Keep every `thinning`-th state in the sample files.
    #[serde(default = "one")]
    pub thinning: usize,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub diagnostics: DiagnosticsSpec,
    #[serde(default)]
    pub histogram: Option<HistogramSpec>,
    /// Runs the experiment once per value, replacing the target's concentration.
    #[serde(default)]
    pub kappa_sweep: Option<Vec<f64>>,
    #[serde(default)]
    pub paper_scale: PaperScale,
}

fn one() -> usize {
    1
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("output")
}

/// One point of a sweep: a label and the target it runs on.
#[derive(Debug, Clone)]
pub struct Variant {
    pub label: String,
    pub spec: TargetSpec,
    pub target: Target,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| {
            let field = e
                .span()
                .map(|s| format!("bytes {}..{}", s.start, s.end))
                .unwrap_or_else(|| "config".into());
            ConfigError::new(field, e.message().to_string())
        })
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("config", format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Switches to the paper-scale chain length and repetition count.
    pub fn apply_paper_scale(&mut self) {
        self.n_steps = self.paper_scale.n_steps;
        self.repetitions = self.paper_scale.repetitions;
    }

    /// Fills every optional setting with the value a run would use.
    pub fn resolved(&self) -> Self {
        let mut c = self.clone();
        let mut variants_hopping = false;
        let mut variants_modes = false;
        if let Ok(variants) = self.variants() {
            for v in &variants {
                variants_hopping |= matches!(v.target, Target::Bingham(_));
                variants_modes |= matches!(v.target, Target::MixVmf(_));
            }
        }
        c.diagnostics.hopping.get_or_insert(variants_hopping);
        c.diagnostics.kl_modes.get_or_insert(variants_modes);
        c.diagnostics.max_lag.get_or_insert(DEFAULT_MAX_LAG);
        for s in &mut c.samplers {
            let burn_in = s.tuning.burn_in_for(s.kind, self.n_steps);
            s.tuning.enabled.get_or_insert(s.tuning.is_enabled(s.kind));
            s.tuning.burn_in.get_or_insert(burn_in);
        }
        c
    }

    /// The targets to run, one per sweep value.
    pub fn variants(&self) -> Result<Vec<Variant>, ConfigError> {
        let specs: Vec<(String, TargetSpec)> = match &self.kappa_sweep {
            None => vec![(String::from("main"), self.target.clone())],
            Some(kappas) => {
                if kappas.is_empty() {
                    return Err(ConfigError::new("kappa_sweep", "must list at least one value"));
                }
                kappas
                    .iter()
                    .map(|&k| Ok((format!("kappa_{k}"), with_kappa(&self.target, k)?)))
                    .collect::<Result<_, ConfigError>>()?
            }
        };
        specs
            .into_iter()
            .map(|(label, spec)| {
                let field = if self.kappa_sweep.is_some() {
                    "kappa_sweep"
                } else {
                    "target"
                };
                let target = spec.build().map_err(|e| ConfigError::from_core(field, e))?;
                Ok(Variant { label, spec, target })
            })
            .collect()
    }

    /// Checks every setting; nothing is sampled before this passes.
    pub fn validate(&self) -> Result<Vec<Variant>, ConfigError> {
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(ConfigError::new("name", "must be a non-empty file name"));
        }
        if self.samplers.is_empty() {
            return Err(ConfigError::new("samplers", "must list at least one sampler"));
        }
        for (i, s) in self.samplers.iter().enumerate() {
            s.validate()
                .map_err(|e| ConfigError::from_core(&format!("samplers[{i}]"), e))?;
        }
        if self.n_steps < 2 {
            return Err(ConfigError::new("n_steps", "must be at least 2"));
        }
        if self.repetitions == 0 {
            return Err(ConfigError::new("repetitions", "must be at least 1"));
        }
        if self.thinning == 0 {
            return Err(ConfigError::new("thinning", "must be at least 1"));
        }
        if self.paper_scale.n_steps < 2 || self.paper_scale.repetitions == 0 {
            return Err(ConfigError::new(
                "paper_scale",
                "needs n_steps >= 2 and repetitions >= 1",
            ));
        }
        for (i, s) in self.samplers.iter().enumerate() {
            if s.tuning.burn_in_for(s.kind, self.n_steps) + 2 > self.n_steps {
                return Err(ConfigError::new(
                    format!("samplers[{i}].tuning.burn_in"),
                    "must leave at least 2 steps after burn-in",
                ));
            }
        }
        if let Some(h) = &self.histogram {
            if h.bins == 0 {
                return Err(ConfigError::new("histogram.bins", "must be at least 1"));
            }
        }
        let variants = self.variants()?;
        let d = variants[0].target.dim();
        if let Some(g) = &self.grid {
            g.build(d)?;
        }
        if let InitPolicy::Explicit(x) = &self.init {
            if x.len() != d {
                return Err(ConfigError::new(
                    "init",
                    format!("expected {d} coordinates, got {}", x.len()),
                ));
            }
            UnitVector::new(x.clone()).map_err(|e| ConfigError::new("init", e.to_string()))?;
        }
        Ok(variants)
    }
}

fn with_kappa(spec: &TargetSpec, k: f64) -> Result<TargetSpec, ConfigError> {
    let mut spec = spec.clone();
    match &mut spec {
        TargetSpec::Bingham {
            kappa_max,
            kappas: None,
            ..
        } => *kappa_max = Some(k),
        TargetSpec::Vmf { kappa, .. } | TargetSpec::MixVmf { kappa, .. } | TargetSpec::CurvedVmf { kappa, .. } => {
            *kappa = k
        }
        _ => {
            return Err(ConfigError::new(
                "kappa_sweep",
                "target has no single concentration to sweep",
            ))
        }
    }
    Ok(spec)
}

/// Resolved defaults printed by `describe`.
pub fn defaults_table() -> Vec<(&'static str, String)> {
    vec![
        ("leapfrog_steps", DEFAULT_LEAPFROG_STEPS.to_string()),
        ("max_rejections", DEFAULT_MAX_REJECTIONS.to_string()),
        ("burn_in", "10 % of n_steps (tunable samplers only)".into()),
        ("tuning factors", "x1.02 on accept, x0.98 on reject".into()),
        (
            "paper-scale",
            format!("n_steps {PAPER_SCALE_STEPS}, repetitions {PAPER_SCALE_REPETITIONS}"),
        ),
    ]
}
