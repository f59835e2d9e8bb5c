//! Geodesic random walk: a random great circle and a step length drawn from
//! a fixed distribution `τ`. Leaves the uniform distribution invariant.

use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::{ChiSquared, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere::{sample_tangent, Angle, GivensRotation, UnitVector};

/// Step-length distribution of the walk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TauSpec {
    /// `θ ~ U(0, 2π)`.
    #[default]
    Uniform,
    /// `θ = ε`.
    Fixed(f64),
    /// `θ = ε R` with `R` chi-distributed with `d - 1` degrees of freedom.
    ChiScaled(f64),
    /// Kac's walk: rotate a uniformly chosen coordinate plane by `θ ~ U(0, 2π)`.
    Kac,
}

impl TauSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TauSpec::Fixed(e) if !(e.is_finite() && e >= 0.0) => {
                Err(Error::invalid("tau.fixed", format!("must be finite and >= 0, got {e}")))
            }
            TauSpec::ChiScaled(e) if !(e.is_finite() && e > 0.0) => Err(Error::invalid(
                "tau.chi_scaled",
                format!("must be finite and > 0, got {e}"),
            )),
            _ => Ok(()),
        }
    }
}

pub fn geodesic_walk_step<R: Rng + ?Sized>(x: &UnitVector, tau: TauSpec, rng: &mut R) -> Result<UnitVector> {
    let d = x.dim();
    let theta = match tau {
        TauSpec::Kac => {
            let i = rng.random_range(0..d);
            let mut j = rng.random_range(0..d - 1);
            if j >= i {
                j += 1;
            }
            let theta = rng.random::<f64>() * TAU;
            return Ok(GivensRotation::coordinate(d, i.min(j), i.max(j), Angle(theta))?.rotate(x));
        }
        TauSpec::Uniform => rng.random::<f64>() * TAU,
        TauSpec::Fixed(e) => e,
        TauSpec::ChiScaled(e) => {
            let chi2 = ChiSquared::new((d - 1) as f64).expect("d >= 3");
            e * chi2.sample(rng).sqrt()
        }
    };
    let v = sample_tangent(x, rng)?;
    Ok(v.geodesic(theta))
}
