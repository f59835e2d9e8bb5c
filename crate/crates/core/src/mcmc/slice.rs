//! Geodesic slice samplers.
//!
//! Both samplers draw a random great circle through the current state and a
//! level below its density, then pick a point of the circle above the level:
//! the ideal sampler by rejecting uniform angles, the shrinkage sampler by
//! shrinking an angular bracket around the current state.

use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::Open01;

use crate::error::{Error, Result};
use crate::sphere::{reduce_angle, sample_tangent, Angle, TangentUnitVector, UnitVector};
use crate::targets::LogDensity;

/// Iteration cap of the shrinkage loop.
pub const MAX_SHRINK_ITERATIONS: u64 = 1_000_000;

/// `log t` for `t ~ U(0, p(x))`, computed as `log p(x) + log U`.
pub fn draw_log_level<T, R>(target: &T, x: &UnitVector, rng: &mut R) -> f64
where
    T: LogDensity + ?Sized,
    R: Rng + ?Sized,
{
    let u: f64 = rng.sample(Open01);
    target.log_p(x) + u.ln()
}

/// One transition of the ideal geodesic slice sampler.
///
/// Returns the new state and the number of rejected angles.
pub fn geosss_reject_step<T, R>(
    target: &T,
    x: &UnitVector,
    max_rejections: u64,
    rng: &mut R,
) -> Result<(UnitVector, u64)>
where
    T: LogDensity + ?Sized,
    R: Rng + ?Sized,
{
    let v = sample_tangent(x, rng)?;
    let log_level = draw_log_level(target, x, rng);
    for rejections in 0..=max_rejections {
        let theta = rng.random::<f64>() * TAU;
        let candidate = v.geodesic(theta);
        if target.log_p(&candidate) > log_level {
            return Ok((candidate, rejections));
        }
    }
    Err(Error::IterationCap {
        what: "ideal geodesic slice rejection loop",
        cap: max_rejections,
    })
}

#[derive(Debug, Clone)]
pub struct ShrinkOutcome {
    /// Accepted angle, reduced to `[0, 2π)`.
    pub theta: Angle,
    pub point: UnitVector,
    pub rejections: u64,
}

/// Shrinkage procedure on the great circle through `v.base()` with direction `v`.
///
/// Starts from `θ ~ U(0, 2π)` with bracket `[θ - 2π, θ]`, which contains the
/// current state at angle 0. Each rejected angle replaces the bracket end on
/// its side of 0, and the next angle is drawn uniformly from the bracket.
///
/// Requires `log p(v.base()) > log_level`.
pub fn shrink<T, R>(target: &T, v: &TangentUnitVector, log_level: f64, rng: &mut R) -> Result<ShrinkOutcome>
where
    T: LogDensity + ?Sized,
    R: Rng + ?Sized,
{
    let mut theta = rng.random::<f64>() * TAU;
    let mut lo = theta - TAU;
    let mut hi = theta;
    for rejections in 0..MAX_SHRINK_ITERATIONS {
        let candidate = v.geodesic(theta);
        if target.log_p(&candidate) > log_level {
            return Ok(ShrinkOutcome {
                theta: Angle(reduce_angle(theta)),
                point: candidate,
                rejections,
            });
        }
        if theta < 0.0 {
            lo = theta;
        } else {
            hi = theta;
        }
        theta = lo + rng.random::<f64>() * (hi - lo);
    }
    Err(Error::IterationCap {
        what: "shrinkage loop",
        cap: MAX_SHRINK_ITERATIONS,
    })
}

/// One transition of the geodesic shrinkage slice sampler.
pub fn geosss_shrink_step<T, R>(target: &T, x: &UnitVector, rng: &mut R) -> Result<(UnitVector, u64)>
where
    T: LogDensity + ?Sized,
    R: Rng + ?Sized,
{
    let v = sample_tangent(x, rng)?;
    let log_level = draw_log_level(target, x, rng);
    let out = shrink(target, &v, log_level, rng)?;
    Ok((out.point, out.rejections))
}
