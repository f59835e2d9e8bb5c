//! Markov transition kernels on the sphere and the chain driver.

pub mod hmc;
pub mod rwmh;
pub mod slice;
pub mod walk;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere::UnitVector;
use crate::targets::LogDensity;

pub use hmc::{hamiltonian, hmc_step, leapfrog, Trajectory};
pub use rwmh::rwmh_step;
pub use slice::{geosss_reject_step, geosss_shrink_step, shrink, ShrinkOutcome};
pub use walk::{geodesic_walk_step, TauSpec};

/// Random number generator used for every chain.
pub type ChainRng = ChaCha8Rng;

/// Independent stream `stream` of the generator seeded with `seed`.
pub fn chain_rng(seed: u64, stream: u64) -> ChainRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    GeosssReject,
    GeosssShrink,
    GeodesicWalk,
    Rwmh,
    Hmc,
}

impl SamplerKind {
    pub const ALL: [SamplerKind; 5] = [
        SamplerKind::GeosssReject,
        SamplerKind::GeosssShrink,
        SamplerKind::GeodesicWalk,
        SamplerKind::Rwmh,
        SamplerKind::Hmc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SamplerKind::GeosssReject => "geosss_reject",
            SamplerKind::GeosssShrink => "geosss_shrink",
            SamplerKind::GeodesicWalk => "geodesic_walk",
            SamplerKind::Rwmh => "rwmh",
            SamplerKind::Hmc => "hmc",
        }
    }

    /// Whether the kernel has a step size that the burn-in rule adapts.
    pub fn is_tunable(self) -> bool {
        matches!(self, SamplerKind::Rwmh | SamplerKind::Hmc)
    }
}

impl std::fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Multiplicative step-size adaptation during burn-in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tuning {
    /// `None` enables tuning exactly for RWMH and HMC.
    pub enabled: Option<bool>,
    /// Number of leading steps that adapt `ε`; `None` means 10 % of the chain.
    pub burn_in: Option<usize>,
    pub up: f64,
    pub down: f64,
}

impl Default for Tuning {
    fn default() -> Self {
        Self {
            enabled: None,
            burn_in: None,
            up: 1.02,
            down: 0.98,
        }
    }
}

impl Tuning {
    pub fn is_enabled(&self, kind: SamplerKind) -> bool {
        self.enabled.unwrap_or(kind.is_tunable())
    }

    /// Burn-in length for a chain of `n` steps; zero when tuning is off.
    pub fn burn_in_for(&self, kind: SamplerKind, n: usize) -> usize {
        if self.is_enabled(kind) {
            self.burn_in.unwrap_or(n / 10).min(n)
        } else {
            0
        }
    }
}

pub const DEFAULT_STEP_SIZE: f64 = 0.1;
pub const DEFAULT_LEAPFROG_STEPS: usize = 10;
pub const DEFAULT_MAX_REJECTIONS: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerConfig {
    pub kind: SamplerKind,
    #[serde(default = "default_step_size")]
    pub step_size: f64,
    #[serde(default = "default_leapfrog_steps")]
    pub leapfrog_steps: usize,
    #[serde(default = "default_max_rejections")]
    pub max_rejections: u64,
    #[serde(default)]
    pub tau: TauSpec,
    #[serde(default)]
    pub tuning: Tuning,
}

fn default_step_size() -> f64 {
    DEFAULT_STEP_SIZE
}

fn default_leapfrog_steps() -> usize {
    DEFAULT_LEAPFROG_STEPS
}

fn default_max_rejections() -> u64 {
    DEFAULT_MAX_REJECTIONS
}

impl SamplerConfig {
    pub fn new(kind: SamplerKind) -> Self {
        Self {
            kind,
            step_size: DEFAULT_STEP_SIZE,
            leapfrog_steps: DEFAULT_LEAPFROG_STEPS,
            max_rejections: DEFAULT_MAX_REJECTIONS,
            tau: TauSpec::default(),
            tuning: Tuning::default(),
        }
    }

    pub fn with_step_size(mut self, step_size: f64) -> Self {
        self.step_size = step_size;
        self
    }

    pub fn with_tau(mut self, tau: TauSpec) -> Self {
        self.tau = tau;
        self
    }

    pub fn with_tuning(mut self, enabled: bool, burn_in: Option<usize>) -> Self {
        self.tuning.enabled = Some(enabled);
        self.tuning.burn_in = burn_in;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind.is_tunable() && !(self.step_size.is_finite() && self.step_size > 0.0) {
            return Err(Error::invalid(
                "step_size",
                format!("must be positive, got {}", self.step_size),
            ));
        }
        if self.kind == SamplerKind::Hmc && self.leapfrog_steps == 0 {
            return Err(Error::invalid("leapfrog_steps", "must be at least 1"));
        }
        if self.max_rejections == 0 {
            return Err(Error::invalid("max_rejections", "must be at least 1"));
        }
        if !(self.tuning.up.is_finite()
            && self.tuning.up > 0.0
            && self.tuning.down.is_finite()
            && self.tuning.down > 0.0)
        {
            return Err(Error::invalid("tuning", "factors must be positive"));
        }
        self.tau.validate()
    }
}

/// The burn-in step-size rule: `ε·up` after an accepted proposal, `ε·down`
/// after a rejection, unchanged once `step >= burn_in`.
pub fn tune_step_size(step_size: f64, accepted: bool, step: usize, burn_in: usize, tuning: &Tuning) -> f64 {
    if step >= burn_in {
        step_size
    } else if accepted {
        step_size * tuning.up
    } else {
        step_size * tuning.down
    }
}

/// Result of a single transition.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub x: UnitVector,
    /// Rejected angles (slice samplers) or `0`.
    pub rejections: u64,
    /// Whether a Metropolis proposal was accepted; always `true` for the
    /// rejection-free kernels.
    pub accepted: bool,
}

/// Applies one transition of the kernel described by `config` with step size `step_size`.
pub fn step<T, R>(
    target: &T,
    config: &SamplerConfig,
    x: &UnitVector,
    step_size: f64,
    rng: &mut R,
) -> Result<StepOutcome>
where
    T: LogDensity + ?Sized,
    R: Rng + ?Sized,
{
    let (x, rejections, accepted) = match config.kind {
        SamplerKind::GeosssReject => {
            let (x, r) = geosss_reject_step(target, x, config.max_rejections, rng)?;
            (x, r, true)
        }
        SamplerKind::GeosssShrink => {
            let (x, r) = geosss_shrink_step(target, x, rng)?;
            (x, r, true)
        }
        SamplerKind::GeodesicWalk => (geodesic_walk_step(x, config.tau, rng)?, 0, true),
        SamplerKind::Rwmh => {
            let (x, a) = rwmh_step(target, x, step_size, rng)?;
            (x, 0, a)
        }
        SamplerKind::Hmc => {
            let (x, a) = hmc_step(target, x, step_size, config.leapfrog_steps, rng)?;
            (x, 0, a)
        }
    };
    Ok(StepOutcome {
        x,
        rejections,
        accepted,
    })
}

/// Live state of a running chain.
#[derive(Debug, Clone)]
pub struct ChainState {
    pub x: UnitVector,
    pub rejections: u64,
    pub accepted_last: bool,
    pub step_size: f64,
}

/// A realized chain `x_1, …, x_N` (the initial point is not included).
#[derive(Debug, Clone)]
pub struct Chain {
    pub states: Vec<UnitVector>,
    pub rejections: Vec<u64>,
    pub accepted: Vec<bool>,
    pub seed: u64,
    pub stream: u64,
    pub config: SamplerConfig,
    /// Leading steps during which the step size was adapted.
    pub burn_in: usize,
    /// Step size after burn-in.
    pub final_step_size: f64,
}

impl Chain {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, |s| s.dim())
    }

    /// States after the tuning burn-in.
    pub fn kept(&self) -> &[UnitVector] {
        &self.states[self.burn_in..]
    }

    pub fn total_rejections(&self) -> u64 {
        self.rejections.iter().sum()
    }

    pub fn acceptance_rate(&self) -> f64 {
        self.accepted.iter().filter(|a| **a).count() as f64 / self.len() as f64
    }
}

/// Runs `n` transitions from `x0` on stream 0 of `seed`.
pub fn run_chain<T: LogDensity + ?Sized>(
    target: &T,
    config: &SamplerConfig,
    x0: &UnitVector,
    n: usize,
    seed: u64,
) -> Result<Chain> {
    run_chain_stream(target, config, x0, n, seed, 0)
}

/// Runs `n` transitions from `x0`, drawing randomness from `chain_rng(seed, stream)`.
pub fn run_chain_stream<T: LogDensity + ?Sized>(
    target: &T,
    config: &SamplerConfig,
    x0: &UnitVector,
    n: usize,
    seed: u64,
    stream: u64,
) -> Result<Chain> {
    config.validate()?;
    if n == 0 {
        return Err(Error::invalid("n", "chain length must be at least 1"));
    }
    if x0.dim() != target.dim() {
        return Err(Error::DimensionMismatch {
            expected: target.dim(),
            actual: x0.dim(),
        });
    }
    let mut rng = chain_rng(seed, stream);
    let burn_in = config.tuning.burn_in_for(config.kind, n);
    let mut state = ChainState {
        x: x0.clone(),
        rejections: 0,
        accepted_last: true,
        step_size: config.step_size,
    };
    let mut states = Vec::with_capacity(n);
    let mut rejections = Vec::with_capacity(n);
    let mut accepted = Vec::with_capacity(n);
    for i in 0..n {
        let out = step(target, config, &state.x, state.step_size, &mut rng).map_err(|e| Error::Step {
            step: i,
            source: Box::new(e),
        })?;
        state.step_size = tune_step_size(state.step_size, out.accepted, i, burn_in, &config.tuning);
        state.rejections += out.rejections;
        state.accepted_last = out.accepted;
        state.x = out.x;
        states.push(state.x.clone());
        rejections.push(out.rejections);
        accepted.push(out.accepted);
    }
    Ok(Chain {
        states,
        rejections,
        accepted,
        seed,
        stream,
        config: config.clone(),
        burn_in,
        final_step_size: state.step_size,
    })
}
