//! Points, tangent directions and great circles on `S^{d-1}`.
//!
//! Every operation that produces a point renormalizes its output, so chains of
//! millions of trigonometric updates do not drift off the sphere.

use std::f64::consts::{PI, TAU};
use std::ops::Deref;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for norm and orthogonality checks.
pub const UNIT_TOL: f64 = 1e-10;
/// Norms below this are treated as degenerate.
pub const DEGENERATE_TOL: f64 = 1e-12;
/// Redraw budget for [`sample_tangent`].
pub const MAX_TANGENT_REDRAWS: usize = 100;

/// Smallest supported ambient dimension.
pub const MIN_DIM: usize = 3;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// A point on the unit sphere in `R^d`, `d >= 3`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct UnitVector(Vec<f64>);

impl UnitVector {
    /// Normalizes `coords` onto the sphere.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < MIN_DIM {
            return Err(Error::Dimension(coords.len()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        let n = norm(&coords);
        if n < DEGENERATE_TOL {
            return Err(Error::ZeroVector(n));
        }
        Ok(Self(coords.into_iter().map(|c| c / n).collect()))
    }

    /// The standard basis vector `e_i` (zero-based) in dimension `d`.
    pub fn basis(d: usize, i: usize) -> Result<Self> {
        if d < MIN_DIM {
            return Err(Error::Dimension(d));
        }
        if i >= d {
            return Err(Error::invalid("index", format!("{i} out of range for d = {d}")));
        }
        let mut coords = vec![0.0; d];
        coords[i] = 1.0;
        Ok(Self(coords))
    }

    /// Renormalizes a vector that is already close to unit norm.
    ///
    /// Used on the output of trigonometric updates; panics only on a vector
    /// whose norm has collapsed, which cannot happen for valid inputs.
    pub(crate) fn renormalized(mut coords: Vec<f64>) -> Self {
        let n = norm(&coords);
        assert!(n > DEGENERATE_TOL && n.is_finite(), "norm collapsed to {n}");
        coords.iter_mut().for_each(|c| *c /= n);
        Self(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &UnitVector) -> f64 {
        dot(&self.0, &other.0)
    }

    pub fn antipode(&self) -> UnitVector {
        Self(self.0.iter().map(|c| -c).collect())
    }

    /// Largest coordinate-wise deviation from `other`.
    pub fn max_abs_diff(&self, other: &UnitVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Deref for UnitVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl<'de> Deserialize<'de> for UnitVector {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let coords = Vec::<f64>::deserialize(de)?;
        UnitVector::new(coords).map_err(serde::de::Error::custom)
    }
}

/// A unit direction orthogonal to a base point: an element of the tangent
/// subsphere `S^{d-2}_x`. Each such direction fixes one great circle through
/// the base point.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentUnitVector {
    base: UnitVector,
    dir: Vec<f64>,
}

impl TangentUnitVector {
    /// Validates that `dir` is a unit vector orthogonal to `base`.
    pub fn new(base: UnitVector, dir: Vec<f64>) -> Result<Self> {
        if dir.len() != base.dim() {
            return Err(Error::DimensionMismatch {
                expected: base.dim(),
                actual: dir.len(),
            });
        }
        let n = norm(&dir);
        if (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::invalid("dir", format!("norm {n} is not 1")));
        }
        let ip = dot(&base, &dir);
        if ip.abs() > UNIT_TOL {
            return Err(Error::NotOrthogonal(ip));
        }
        Ok(Self { base, dir })
    }

    /// Projects `raw` onto the tangent space at `base` and normalizes it.
    pub fn project(base: UnitVector, raw: &[f64]) -> Result<Self> {
        if raw.len() != base.dim() {
            return Err(Error::DimensionMismatch {
                expected: base.dim(),
                actual: raw.len(),
            });
        }
        let ip = dot(&base, raw);
        let mut z: Vec<f64> = raw.iter().zip(base.iter()).map(|(y, x)| y - ip * x).collect();
        // A second pass removes the residual left by cancellation in the first.
        let ip2 = dot(&base, &z);
        z.iter_mut().zip(base.iter()).for_each(|(zi, xi)| *zi -= ip2 * xi);
        let n = norm(&z);
        if n < DEGENERATE_TOL {
            return Err(Error::ZeroVector(n));
        }
        z.iter_mut().for_each(|c| *c /= n);
        Ok(Self { base, dir: z })
    }

    pub fn base(&self) -> &UnitVector {
        &self.base
    }

    pub fn dir(&self) -> &[f64] {
        &self.dir
    }

    pub fn dim(&self) -> usize {
        self.dir.len()
    }

    /// `γ(θ) = cos(θ) x + sin(θ) v` on the great circle through the base point.
    pub fn geodesic(&self, theta: f64) -> UnitVector {
        UnitVector::renormalized(geodesic_coords(&self.base, &self.dir, theta))
    }

    /// The direction `v` as a point on the sphere (`γ(π/2)`).
    pub fn dir_point(&self) -> UnitVector {
        UnitVector(self.dir.clone())
    }
}

/// Unnormalized `cos(θ) x + sin(θ) v`.
#[inline]
pub(crate) fn geodesic_coords(x: &[f64], v: &[f64], theta: f64) -> Vec<f64> {
    let (s, c) = theta.sin_cos();
    x.iter().zip(v).map(|(xi, vi)| c * xi + s * vi).collect()
}

/// A rotation angle in radians.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle(pub f64);

impl Angle {
    pub fn radians(self) -> f64 {
        self.0
    }

    /// Representative in `[0, 2π)`.
    pub fn canonical(self) -> Angle {
        Angle(reduce_angle(self.0))
    }
}

impl From<f64> for Angle {
    fn from(theta: f64) -> Self {
        Angle(theta)
    }
}

/// Floor-based reduction of `theta` into `[0, 2π)`.
pub fn reduce_angle(theta: f64) -> f64 {
    let r = theta - TAU * (theta / TAU).floor();
    if !(0.0..TAU).contains(&r) {
        0.0
    } else {
        r
    }
}

/// Point at angle `theta` on the great circle through `x` with direction `v`.
///
/// # Panics
///
/// If `v` is not based at `x`.
pub fn geodesic_point(x: &UnitVector, v: &TangentUnitVector, theta: Angle) -> UnitVector {
    assert!(
        x.max_abs_diff(v.base()) <= UNIT_TOL,
        "tangent vector is based at a different point"
    );
    v.geodesic(theta.0)
}

/// Uniform draw from the tangent subsphere at `x`: project a standard normal
/// vector onto the orthogonal complement of `x` and normalize.
pub fn sample_tangent<R: Rng + ?Sized>(x: &UnitVector, rng: &mut R) -> Result<TangentUnitVector> {
    let d = x.dim();
    let mut y = vec![0.0; d];
    for _ in 0..MAX_TANGENT_REDRAWS {
        y.iter_mut().for_each(|c| *c = rng.sample(StandardNormal));
        match TangentUnitVector::project(x.clone(), &y) {
            Ok(v) => return Ok(v),
            Err(Error::ZeroVector(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::DegenerateDraw(MAX_TANGENT_REDRAWS))
}

/// The Givens rotation by `theta` in the plane spanned by orthonormal `y, z`:
///
/// `G = I + (cos θ - 1)(y yᵀ + z zᵀ) + sin θ (y zᵀ - z yᵀ)`.
///
/// Stored in factored form; [`GivensRotation::apply`] costs `O(d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GivensRotation {
    y: Vec<f64>,
    z: Vec<f64>,
    cos: f64,
    sin: f64,
}

impl GivensRotation {
    pub fn new(y: &UnitVector, z: &UnitVector, theta: Angle) -> Result<Self> {
        if y.dim() != z.dim() {
            return Err(Error::DimensionMismatch {
                expected: y.dim(),
                actual: z.dim(),
            });
        }
        let ip = y.dot(z);
        if ip.abs() > UNIT_TOL {
            return Err(Error::NotOrthogonal(ip));
        }
        Ok(Self::from_orthonormal(y.to_vec(), z.to_vec(), theta.0))
    }

    /// Rotation in the coordinate plane `(e_i, e_j)`; one move of Kac's walk.
    pub fn coordinate(d: usize, i: usize, j: usize, theta: Angle) -> Result<Self> {
        if i == j {
            return Err(Error::invalid("j", "coordinate plane needs two distinct axes"));
        }
        let y = UnitVector::basis(d, i)?;
        let z = UnitVector::basis(d, j)?;
        Ok(Self::from_orthonormal(y.into_inner(), z.into_inner(), theta.0))
    }

    pub(crate) fn from_orthonormal(y: Vec<f64>, z: Vec<f64>, theta: f64) -> Self {
        let (sin, cos) = theta.sin_cos();
        Self { y, z, cos, sin }
    }

    pub fn dim(&self) -> usize {
        self.y.len()
    }

    pub fn apply(&self, w: &[f64]) -> Vec<f64> {
        let yw = dot(&self.y, w);
        let zw = dot(&self.z, w);
        let cm1 = self.cos - 1.0;
        w.iter()
            .zip(self.y.iter().zip(&self.z))
            .map(|(wi, (yi, zi))| wi + cm1 * (yi * yw + zi * zw) + self.sin * (yi * zw - zi * yw))
            .collect()
    }

    /// Applies the rotation to a point and renormalizes.
    pub fn rotate(&self, w: &UnitVector) -> UnitVector {
        UnitVector::renormalized(self.apply(w))
    }

    /// Dense row-major `d × d` matrix.
    pub fn to_matrix(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        let cm1 = self.cos - 1.0;
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        let id = if i == j { 1.0 } else { 0.0 };
                        id + cm1 * (self.y[i] * self.y[j] + self.z[i] * self.z[j])
                            + self.sin * (self.y[i] * self.z[j] - self.z[i] * self.y[j])
                    })
                    .collect()
            })
            .collect()
    }
}

/// `T_θ(x, v) = (cos θ x + sin θ v, sin θ x - cos θ v)`.
///
/// The returned tangent vector is based at the new point.
pub fn t_map(v: &TangentUnitVector, theta: Angle) -> TangentUnitVector {
    let (s, c) = theta.0.sin_cos();
    let x = v.base();
    let new_x = UnitVector::renormalized(geodesic_coords(x, v.dir(), theta.0));
    let raw: Vec<f64> = x.iter().zip(v.dir()).map(|(xi, vi)| s * xi - c * vi).collect();
    // The image is orthonormal in exact arithmetic; projecting only removes rounding.
    TangentUnitVector::project(new_x, &raw).expect("T_θ image has unit norm")
}

/// Great-circle distance `arccos(aᵀb)` in `[0, π]`.
pub fn geodesic_distance(a: &UnitVector, b: &UnitVector) -> f64 {
    dot(a, b).clamp(-1.0, 1.0).acos()
}

/// Angles above this are rejected by [`slerp`] as antipodal.
pub const SLERP_ANTIPODAL_TOL: f64 = 1e-6;
/// Angles below this fall back to normalized linear interpolation in [`slerp`].
pub const SLERP_COINCIDENT_TOL: f64 = 1e-8;

/// Spherical linear interpolation from `a` (`t = 0`) to `b` (`t = 1`).
pub fn slerp(a: &UnitVector, b: &UnitVector, t: f64) -> Result<UnitVector> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    let theta = geodesic_distance(a, b);
    if theta > PI - SLERP_ANTIPODAL_TOL {
        return Err(Error::Antipodal(theta));
    }
    if theta < SLERP_COINCIDENT_TOL {
        let lin: Vec<f64> = a.iter().zip(b.iter()).map(|(x, y)| (1.0 - t) * x + t * y).collect();
        return Ok(UnitVector::renormalized(lin));
    }
    let s = theta.sin();
    let wa = (theta * (1.0 - t)).sin() / s;
    let wb = (theta * t).sin() / s;
    Ok(UnitVector::renormalized(
        a.iter().zip(b.iter()).map(|(x, y)| wa * x + wb * y).collect(),
    ))
}

/// Volume `ω_k` of the unit sphere `S^k ⊂ R^{k+1}`: `2π^{(k+1)/2} / Γ((k+1)/2)`.
pub fn sphere_area(k: usize) -> f64 {
    let h = (k as f64 + 1.0) / 2.0;
    (std::f64::consts::LN_2 + h * PI.ln() - statrs::function::gamma::ln_gamma(h)).exp()
}
