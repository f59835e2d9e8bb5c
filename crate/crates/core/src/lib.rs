//! Markov chain Monte Carlo on the unit sphere `S^{d-1}`.
//!
//! The crate is organised around the two geodesic slice samplers (the
//! rejection-based "ideal" sampler and the shrinkage sampler), which move along
//! random great circles through the current state and need no tuning. Baseline
//! kernels (geodesic random walk, reprojected random-walk Metropolis-Hastings
//! and spherical HMC) and exact reference samplers share the same target and
//! chain types so that their outputs can be compared with the diagnostics in
//! [`diagnostics`].
//!
//! ```
//! use geoslice::mcmc::{run_chain, SamplerConfig, SamplerKind};
//! use geoslice::sphere::UnitVector;
//! use geoslice::targets::Bingham;
//!
//! let target = Bingham::linear(10, 30.0).unwrap();
//! let config = SamplerConfig::new(SamplerKind::GeosssShrink);
//! let chain = run_chain(&target, &config, &UnitVector::basis(10, 9).unwrap(), 1000, 7).unwrap();
//! assert_eq!(chain.len(), 1000);
//! ```

pub mod diagnostics;
pub mod error;
pub mod exact;
pub mod mcmc;
pub mod sphere;
pub mod stats;
pub mod targets;

pub use error::{Error, Result};
pub use mcmc::{run_chain, Chain, SamplerConfig, SamplerKind};
pub use sphere::{Angle, TangentUnitVector, UnitVector};
pub use targets::{LogDensity, Target};
