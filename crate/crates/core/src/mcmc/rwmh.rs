//! Reprojected random-walk Metropolis-Hastings.
//!
//! The current state is lifted to `√r x` with `r ~ χ²(d)` (Gamma with shape
//! `d/2` and rate `1/2`), perturbed by isotropic Gaussian noise of scale `ε`
//! and projected back onto the sphere.

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

use crate::error::Result;
use crate::sphere::{norm, UnitVector, DEGENERATE_TOL};
use crate::targets::LogDensity;

/// Returns the next state and whether the proposal was accepted.
pub fn rwmh_step<T, R>(target: &T, x: &UnitVector, step_size: f64, rng: &mut R) -> Result<(UnitVector, bool)>
where
    T: LogDensity + ?Sized,
    R: Rng + ?Sized,
{
    let d = x.dim();
    let r = ChiSquared::new(d as f64).expect("d >= 3").sample(rng);
    let radius = r.sqrt();
    let y: Vec<f64> = x
        .iter()
        .map(|xi| radius * xi + step_size * rng.sample::<f64, _>(StandardNormal))
        .collect();
    if norm(&y) < DEGENERATE_TOL {
        return Ok((x.clone(), false));
    }
    let z = UnitVector::new(y)?;
    let log_ratio = target.log_p(&z) - target.log_p(x);
    let u: f64 = rng.random();
    if u.ln() <= log_ratio {
        Ok((z, true))
    } else {
        Ok((x.clone(), false))
    }
}
