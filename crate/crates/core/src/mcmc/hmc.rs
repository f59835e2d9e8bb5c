//! Spherical Hamiltonian Monte Carlo.
//!
//! Velocities live in the tangent space of the current position. Each
//! leapfrog step kicks the velocity with half a projected gradient, moves
//! position and velocity together along the great circle they span (a Givens
//! rotation by `ε‖v‖`), then applies the second half kick.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::sphere::{dot, norm, GivensRotation, UnitVector, DEGENERATE_TOL};
use crate::targets::LogDensity;

/// End point of a leapfrog trajectory.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub x: UnitVector,
    pub v: Vec<f64>,
}

/// `(I - x xᵀ) ∇log p(x)`, failing on non-finite gradients.
fn projected_gradient<T: LogDensity + ?Sized>(target: &T, x: &UnitVector) -> Result<Vec<f64>> {
    let mut g = target.grad_log_p(x);
    if g.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFiniteGradient { state: x.to_vec() });
    }
    let ip = dot(&g, x);
    g.iter_mut().zip(x.iter()).for_each(|(gi, xi)| *gi -= ip * xi);
    Ok(g)
}

/// `-log p(x) + ‖v‖²/2`.
pub fn hamiltonian<T: LogDensity + ?Sized>(target: &T, x: &UnitVector, v: &[f64]) -> f64 {
    -target.log_p(x) + 0.5 * dot(v, v)
}

/// Runs `steps` leapfrog steps from `(x, v)`; `v` must be tangent at `x`.
pub fn leapfrog<T: LogDensity + ?Sized>(
    target: &T,
    x: &UnitVector,
    v: &[f64],
    step_size: f64,
    steps: usize,
) -> Result<Trajectory> {
    let half = 0.5 * step_size;
    let mut x = x.clone();
    let mut v = v.to_vec();
    let mut grad = projected_gradient(target, &x)?;
    for _ in 0..steps {
        v.iter_mut().zip(&grad).for_each(|(vi, gi)| *vi += half * gi);
        let speed = norm(&v);
        if speed > DEGENERATE_TOL {
            let dir: Vec<f64> = v.iter().map(|c| c / speed).collect();
            let rot = GivensRotation::from_orthonormal(dir, x.to_vec(), step_size * speed);
            x = rot.rotate(&x);
            v = rot.apply(&v);
        }
        grad = projected_gradient(target, &x)?;
        v.iter_mut().zip(&grad).for_each(|(vi, gi)| *vi += half * gi);
    }
    Ok(Trajectory { x, v })
}

/// One HMC transition with `steps` leapfrog steps; returns the next state and
/// whether the trajectory end point was accepted.
pub fn hmc_step<T, R>(
    target: &T,
    x: &UnitVector,
    step_size: f64,
    steps: usize,
    rng: &mut R,
) -> Result<(UnitVector, bool)>
where
    T: LogDensity + ?Sized,
    R: Rng + ?Sized,
{
    let mut v: Vec<f64> = (0..x.dim()).map(|_| rng.sample(StandardNormal)).collect();
    let ip = dot(&v, x);
    v.iter_mut().zip(x.iter()).for_each(|(vi, xi)| *vi -= ip * xi);

    let end = leapfrog(target, x, &v, step_size, steps)?;
    let log_accept = 0.5 * (dot(&v, &v) - dot(&end.v, &end.v)) + target.log_p(&end.x) - target.log_p(x);
    let u: f64 = rng.random();
    if log_accept.is_finite() && u.ln() < log_accept {
        Ok((end.x, true))
    } else {
        Ok((x.clone(), false))
    }
}
