//! Unnormalized log-densities on the sphere.
//!
//! Samplers only ever see `log p`; at the concentrations used in the
//! experiments (`κ = 300`) the raw densities overflow `f64`.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact;
use crate::sphere::{dot, geodesic_distance, UnitVector, SLERP_ANTIPODAL_TOL, UNIT_TOL};

/// An unnormalized target density on `S^{d-1}`, exposed in log space.
pub trait LogDensity: Send + Sync {
    fn dim(&self) -> usize;

    fn log_p(&self, x: &UnitVector) -> f64;

    /// Ambient (unprojected) gradient of `log p` at `x`.
    fn grad_log_p(&self, x: &UnitVector) -> Vec<f64>;

    /// An upper bound on `log p` over the sphere, when one is known.
    fn sup_log_p(&self) -> Option<f64>;
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::invalid(
            "kappa",
            format!("must be a positive finite number, got {kappa}"),
        ));
    }
    Ok(())
}

fn check_dim(x: &UnitVector, d: usize) {
    debug_assert_eq!(x.dim(), d, "point dimension does not match the target");
}

/// `p ≡ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Uniform {
    d: usize,
}

impl Uniform {
    pub fn new(d: usize) -> Result<Self> {
        if d < crate::sphere::MIN_DIM {
            return Err(Error::Dimension(d));
        }
        Ok(Self { d })
    }
}

impl LogDensity for Uniform {
    fn dim(&self) -> usize {
        self.d
    }

    fn log_p(&self, _x: &UnitVector) -> f64 {
        0.0
    }

    fn grad_log_p(&self, _x: &UnitVector) -> Vec<f64> {
        vec![0.0; self.d]
    }

    fn sup_log_p(&self) -> Option<f64> {
        Some(0.0)
    }
}

/// Bingham density `exp(xᵀAx)` with `A = U diag(κ) Uᵀ`, `0 = κ_1 <= ... <= κ_d`.
///
/// Bimodal with modes at `±u_d`, the eigenvector of the largest eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct Bingham {
    kappas: Vec<f64>,
    /// Eigenvectors as columns; `None` means the standard basis.
    basis: Option<Vec<Vec<f64>>>,
}

impl Bingham {
    pub fn new(kappas: Vec<f64>, basis: Option<Vec<Vec<f64>>>) -> Result<Self> {
        let d = kappas.len();
        if d < crate::sphere::MIN_DIM {
            return Err(Error::Dimension(d));
        }
        if kappas.iter().any(|k| !k.is_finite()) {
            return Err(Error::invalid("kappas", "must be finite"));
        }
        if kappas[0] != 0.0 {
            return Err(Error::invalid("kappas", "smallest eigenvalue must be 0"));
        }
        if kappas.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::invalid("kappas", "must be sorted ascending"));
        }
        if let Some(cols) = &basis {
            if cols.len() != d || cols.iter().any(|c| c.len() != d) {
                return Err(Error::invalid("basis", format!("must be {d} columns of length {d}")));
            }
            for i in 0..d {
                for j in i..d {
                    let target = if i == j { 1.0 } else { 0.0 };
                    if (dot(&cols[i], &cols[j]) - target).abs() > UNIT_TOL {
                        return Err(Error::invalid("basis", "columns are not orthonormal"));
                    }
                }
            }
        }
        Ok(Self { kappas, basis })
    }

    /// Eigenvalues spaced evenly on `[0, kappa_max]` in the standard basis.
    pub fn linear(d: usize, kappa_max: f64) -> Result<Self> {
        check_kappa(kappa_max).map_err(|_| Error::invalid("kappa_max", "must be positive and finite"))?;
        if d < crate::sphere::MIN_DIM {
            return Err(Error::Dimension(d));
        }
        let kappas = (0..d).map(|i| kappa_max * i as f64 / (d - 1) as f64).collect();
        Self::new(kappas, None)
    }

    /// Single nonzero eigenvalue `kappa_max` on the last axis.
    pub fn top(d: usize, kappa_max: f64) -> Result<Self> {
        check_kappa(kappa_max).map_err(|_| Error::invalid("kappa_max", "must be positive and finite"))?;
        if d < crate::sphere::MIN_DIM {
            return Err(Error::Dimension(d));
        }
        let mut kappas = vec![0.0; d];
        kappas[d - 1] = kappa_max;
        Self::new(kappas, None)
    }

    pub fn with_spectrum(d: usize, kappa_max: f64, spectrum: Spectrum) -> Result<Self> {
        match spectrum {
            Spectrum::Top => Self::top(d, kappa_max),
            Spectrum::Linear => Self::linear(d, kappa_max),
        }
    }

    pub fn kappas(&self) -> &[f64] {
        &self.kappas
    }

    pub fn kappa_max(&self) -> f64 {
        *self.kappas.last().unwrap()
    }

    /// Eigenvector `i` (zero-based).
    pub fn eigenvector(&self, i: usize) -> UnitVector {
        match &self.basis {
            Some(cols) => UnitVector::new(cols[i].clone()).expect("validated basis"),
            None => UnitVector::basis(self.kappas.len(), i).expect("validated dimension"),
        }
    }

    /// The mode axis `u_d`.
    pub fn mode(&self) -> UnitVector {
        self.eigenvector(self.kappas.len() - 1)
    }

    /// Coordinates of `x` in the eigenbasis.
    pub fn to_eigen(&self, x: &[f64]) -> Vec<f64> {
        match &self.basis {
            Some(cols) => cols.iter().map(|c| dot(c, x)).collect(),
            None => x.to_vec(),
        }
    }

    /// Inverse of [`Bingham::to_eigen`].
    pub fn from_eigen(&self, y: &[f64]) -> Vec<f64> {
        match &self.basis {
            Some(cols) => {
                let d = y.len();
                let mut out = vec![0.0; d];
                for (yi, col) in y.iter().zip(cols) {
                    out.iter_mut().zip(col).for_each(|(o, c)| *o += yi * c);
                }
                out
            }
            None => y.to_vec(),
        }
    }
}

fn quadratic_form(kappas: &[f64], y: &[f64]) -> f64 {
    kappas.iter().zip(y).map(|(k, yi)| k * yi * yi).sum()
}

impl LogDensity for Bingham {
    fn dim(&self) -> usize {
        self.kappas.len()
    }

    fn log_p(&self, x: &UnitVector) -> f64 {
        check_dim(x, self.dim());
        match &self.basis {
            None => quadratic_form(&self.kappas, x),
            Some(_) => quadratic_form(&self.kappas, &self.to_eigen(x)),
        }
    }

    fn grad_log_p(&self, x: &UnitVector) -> Vec<f64> {
        let y = self.to_eigen(x);
        let g: Vec<f64> = self.kappas.iter().zip(&y).map(|(k, yi)| 2.0 * k * yi).collect();
        self.from_eigen(&g)
    }

    fn sup_log_p(&self) -> Option<f64> {
        Some(self.kappa_max())
    }
}

/// von Mises-Fisher density `exp(κ μᵀx)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Vmf {
    kappa: f64,
    mu: UnitVector,
}

impl Vmf {
    pub fn new(kappa: f64, mu: UnitVector) -> Result<Self> {
        check_kappa(kappa)?;
        Ok(Self { kappa, mu })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn mu(&self) -> &UnitVector {
        &self.mu
    }
}

impl LogDensity for Vmf {
    fn dim(&self) -> usize {
        self.mu.dim()
    }

    fn log_p(&self, x: &UnitVector) -> f64 {
        check_dim(x, self.dim());
        self.kappa * self.mu.dot(x)
    }

    fn grad_log_p(&self, _x: &UnitVector) -> Vec<f64> {
        self.mu.iter().map(|m| self.kappa * m).collect()
    }

    fn sup_log_p(&self) -> Option<f64> {
        Some(self.kappa)
    }
}

/// Equal-weight mixture `(1/K) Σ_k exp(κ μ_kᵀx)` with a shared concentration.
#[derive(Debug, Clone, PartialEq)]
pub struct MixVmf {
    kappa: f64,
    modes: Vec<UnitVector>,
}

impl MixVmf {
    pub fn new(kappa: f64, modes: Vec<UnitVector>) -> Result<Self> {
        check_kappa(kappa)?;
        let Some(first) = modes.first() else {
            return Err(Error::invalid("modes", "need at least one component"));
        };
        let d = first.dim();
        if let Some(bad) = modes.iter().find(|m| m.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: bad.dim(),
            });
        }
        Ok(Self { kappa, modes })
    }

    /// `k` modes drawn uniformly on `S^{d-1}` from a fixed seed.
    pub fn random_modes(d: usize, k: usize, kappa: f64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let modes = (0..k)
            .map(|_| exact::uniform_sphere(d, &mut rng))
            .collect::<Result<_>>()?;
        Self::new(kappa, modes)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn modes(&self) -> &[UnitVector] {
        &self.modes
    }

    pub fn components(&self) -> impl Iterator<Item = Vmf> + '_ {
        self.modes.iter().map(|m| Vmf {
            kappa: self.kappa,
            mu: m.clone(),
        })
    }

    fn exponents(&self, x: &[f64]) -> Vec<f64> {
        self.modes.iter().map(|m| self.kappa * dot(m, x)).collect()
    }
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

impl LogDensity for MixVmf {
    fn dim(&self) -> usize {
        self.modes[0].dim()
    }

    fn log_p(&self, x: &UnitVector) -> f64 {
        check_dim(x, self.dim());
        log_sum_exp(&self.exponents(x)) - (self.modes.len() as f64).ln()
    }

    fn grad_log_p(&self, x: &UnitVector) -> Vec<f64> {
        let e = self.exponents(x);
        let lse = log_sum_exp(&e);
        let mut g = vec![0.0; self.dim()];
        for (ek, m) in e.iter().zip(&self.modes) {
            let w = (ek - lse).exp() * self.kappa;
            g.iter_mut().zip(m.iter()).for_each(|(gi, mi)| *gi += w * mi);
        }
        g
    }

    fn sup_log_p(&self) -> Option<f64> {
        Some(self.kappa)
    }
}

/// Largest number of waypoints [`build_curve`] accepts.
pub const MAX_CURVE_POINTS: usize = 12;

/// Orders `points` into the open path of minimal total geodesic length.
///
/// Exact: Held-Karp dynamic programming over subsets, which is exhaustive
/// over all open Hamiltonian paths. Among optimal paths the lexicographically
/// smallest index sequence is returned. The result is a permutation of
/// `0..points.len()`.
pub fn build_curve(points: &[UnitVector]) -> Result<Vec<usize>> {
    let m = points.len();
    if !(2..=MAX_CURVE_POINTS).contains(&m) {
        return Err(Error::invalid(
            "points",
            format!("need between 2 and {MAX_CURVE_POINTS} waypoints, got {m}"),
        ));
    }
    let dist: Vec<Vec<f64>> = points
        .iter()
        .map(|a| points.iter().map(|b| geodesic_distance(a, b)).collect())
        .collect();

    // best[S][j]: shortest path that starts at j and visits every index in S (j ∈ S).
    let full = (1usize << m) - 1;
    let mut best = vec![vec![f64::INFINITY; m]; full + 1];
    for j in 0..m {
        best[1 << j][j] = 0.0;
    }
    for set in 1..=full {
        for j in 0..m {
            if set & (1 << j) == 0 || set == 1 << j {
                continue;
            }
            let rest = set & !(1 << j);
            let mut b = f64::INFINITY;
            for k in 0..m {
                if rest & (1 << k) != 0 {
                    b = b.min(dist[j][k] + best[rest][k]);
                }
            }
            best[set][j] = b;
        }
    }

    let optimum = best[full].iter().copied().fold(f64::INFINITY, f64::min);
    let tol = 1e-12 * (1.0 + optimum);
    let mut order = Vec::with_capacity(m);
    let mut cur = (0..m)
        .find(|&j| best[full][j] <= optimum + tol)
        .expect("finite optimum");
    let mut set = full;
    order.push(cur);
    while set != 1 << cur {
        let rest = set & !(1 << cur);
        let target = best[set][cur];
        let next = (0..m)
            .find(|&k| rest & (1 << k) != 0 && dist[cur][k] + best[rest][k] <= target + tol)
            .expect("optimal continuation exists");
        set = rest;
        cur = next;
        order.push(cur);
    }

    for w in order.windows(2) {
        let theta = dist[w[0]][w[1]];
        if theta > PI - SLERP_ANTIPODAL_TOL {
            return Err(Error::Antipodal(theta));
        }
    }
    Ok(order)
}

#[derive(Debug, Clone)]
struct Segment {
    a: UnitVector,
    b: UnitVector,
    /// Unit tangent at `a` pointing toward `b`: `μ(φ) = cos φ a + sin φ w`.
    w: Vec<f64>,
    theta: f64,
}

/// Location of `max_t xᵀμ(t)` on a slerp curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveArgmax {
    /// Global curve parameter in `[0, 1]`; segment `s` of `m - 1` covers `[s, s+1] / (m-1)`.
    pub t: f64,
    pub value: f64,
    pub segment: usize,
    /// Angle along the segment from its first waypoint.
    pub phi: f64,
}

/// Curved vMF density `exp(κ max_t xᵀμ(t))`, where `μ` concatenates slerps
/// between successive waypoints.
#[derive(Debug, Clone)]
pub struct CurvedVmf {
    kappa: f64,
    waypoints: Vec<UnitVector>,
    segments: Vec<Segment>,
}

impl CurvedVmf {
    /// Uses `waypoints` in the given order.
    pub fn new(waypoints: Vec<UnitVector>, kappa: f64) -> Result<Self> {
        check_kappa(kappa)?;
        if waypoints.len() < 2 {
            return Err(Error::invalid("waypoints", "need at least two"));
        }
        let d = waypoints[0].dim();
        let mut segments = Vec::with_capacity(waypoints.len() - 1);
        for pair in waypoints.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            if b.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: b.dim(),
                });
            }
            let theta = geodesic_distance(a, b);
            if theta > PI - SLERP_ANTIPODAL_TOL {
                return Err(Error::Antipodal(theta));
            }
            if theta < 1e-12 {
                return Err(Error::invalid("waypoints", "consecutive waypoints coincide"));
            }
            let c = theta.cos();
            let s = theta.sin();
            let w = a.iter().zip(b.iter()).map(|(ai, bi)| (bi - c * ai) / s).collect();
            segments.push(Segment {
                a: a.clone(),
                b: b.clone(),
                w,
                theta,
            });
        }
        Ok(Self {
            kappa,
            waypoints,
            segments,
        })
    }

    /// Orders `points` with [`build_curve`] and builds the density.
    pub fn from_points(points: Vec<UnitVector>, kappa: f64) -> Result<Self> {
        let order = build_curve(&points)?;
        let ordered = order.into_iter().map(|i| points[i].clone()).collect();
        Self::new(ordered, kappa)
    }

    /// `m` uniform waypoints on `S^{d-1}` drawn from a fixed seed, then ordered.
    pub fn random(d: usize, m: usize, kappa: f64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = (0..m)
            .map(|_| exact::uniform_sphere(d, &mut rng))
            .collect::<Result<_>>()?;
        Self::from_points(points, kappa)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn waypoints(&self) -> &[UnitVector] {
        &self.waypoints
    }

    /// Total geodesic length of the curve.
    pub fn length(&self) -> f64 {
        self.segments.iter().map(|s| s.theta).sum()
    }

    /// The curve point `μ(t)` for a global parameter `t ∈ [0, 1]`.
    pub fn point(&self, t: f64) -> UnitVector {
        let n = self.segments.len() as f64;
        let scaled = (t.clamp(0.0, 1.0) * n).min(n);
        let s = (scaled.floor() as usize).min(self.segments.len() - 1);
        let seg = &self.segments[s];
        self.segment_point(seg, (scaled - s as f64) * seg.theta)
    }

    fn segment_point(&self, seg: &Segment, phi: f64) -> UnitVector {
        UnitVector::renormalized(crate::sphere::geodesic_coords(&seg.a, &seg.w, phi))
    }

    /// `max_t xᵀμ(t)` in closed form per segment.
    ///
    /// On a segment, `xᵀμ(φ) = A cos φ + C sin φ` with `A = xᵀa`, `C = xᵀw`,
    /// maximized at `φ* = atan2(C, A)` when it lies in `[0, θ_ab]`, and at an
    /// endpoint otherwise. Ties go to the earliest segment and, within a
    /// segment, to `t = 0`.
    pub fn max_inner(&self, x: &UnitVector) -> CurveArgmax {
        let last = self.segments.len() as f64;
        let mut best: Option<CurveArgmax> = None;
        for (s, seg) in self.segments.iter().enumerate() {
            let a = dot(x, &seg.a);
            let c = dot(x, &seg.w);
            let r = a.hypot(c);
            let phi_star = c.atan2(a);
            let (phi, value) = if r > 1e-15 && (0.0..=seg.theta).contains(&phi_star) {
                (phi_star, r)
            } else {
                let b = dot(x, &seg.b);
                if b > a {
                    (seg.theta, b)
                } else {
                    (0.0, a)
                }
            };
            if best.is_none_or(|cur| value > cur.value) {
                best = Some(CurveArgmax {
                    t: (s as f64 + phi / seg.theta) / last,
                    value,
                    segment: s,
                    phi,
                });
            }
        }
        best.expect("at least one segment")
    }
}

/// [`CurvedVmf::max_inner`] as a free function.
pub fn curve_max_inner(curve: &CurvedVmf, x: &UnitVector) -> CurveArgmax {
    curve.max_inner(x)
}

impl LogDensity for CurvedVmf {
    fn dim(&self) -> usize {
        self.waypoints[0].dim()
    }

    fn log_p(&self, x: &UnitVector) -> f64 {
        check_dim(x, self.dim());
        self.kappa * self.max_inner(x).value
    }

    fn grad_log_p(&self, x: &UnitVector) -> Vec<f64> {
        let arg = self.max_inner(x);
        let seg = &self.segments[arg.segment];
        self.segment_point(seg, arg.phi)
            .iter()
            .map(|m| self.kappa * m)
            .collect()
    }

    fn sup_log_p(&self) -> Option<f64> {
        Some(self.kappa)
    }
}

/// Any of the bundled targets.
#[derive(Debug, Clone)]
pub enum Target {
    Uniform(Uniform),
    Bingham(Bingham),
    Vmf(Vmf),
    MixVmf(MixVmf),
    CurvedVmf(CurvedVmf),
}

impl Target {
    fn inner(&self) -> &dyn LogDensity {
        match self {
            Target::Uniform(t) => t,
            Target::Bingham(t) => t,
            Target::Vmf(t) => t,
            Target::MixVmf(t) => t,
            Target::CurvedVmf(t) => t,
        }
    }

    /// The point chains start from under the "mode" initialization policy.
    pub fn mode(&self) -> UnitVector {
        match self {
            Target::Uniform(u) => UnitVector::basis(u.d, 0).expect("validated dimension"),
            Target::Bingham(b) => b.mode(),
            Target::Vmf(v) => v.mu.clone(),
            Target::MixVmf(m) => m.modes[0].clone(),
            Target::CurvedVmf(c) => c.waypoints[0].clone(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Target::Uniform(_) => "uniform",
            Target::Bingham(_) => "bingham",
            Target::Vmf(_) => "vmf",
            Target::MixVmf(_) => "mix_vmf",
            Target::CurvedVmf(_) => "curved_vmf",
        }
    }
}

impl LogDensity for Target {
    fn dim(&self) -> usize {
        self.inner().dim()
    }

    fn log_p(&self, x: &UnitVector) -> f64 {
        self.inner().log_p(x)
    }

    fn grad_log_p(&self, x: &UnitVector) -> Vec<f64> {
        self.inner().grad_log_p(x)
    }

    fn sup_log_p(&self) -> Option<f64> {
        self.inner().sup_log_p()
    }
}

impl<T: LogDensity + ?Sized> LogDensity for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn log_p(&self, x: &UnitVector) -> f64 {
        (**self).log_p(x)
    }

    fn grad_log_p(&self, x: &UnitVector) -> Vec<f64> {
        (**self).grad_log_p(x)
    }

    fn sup_log_p(&self) -> Option<f64> {
        (**self).sup_log_p()
    }
}

/// Eigenvalue layout of a Bingham target built from `kappa_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spectrum {
    /// `kappa_max` on the last axis, 0 elsewhere.
    #[default]
    Top,
    /// Evenly spaced on `[0, kappa_max]`.
    Linear,
}

/// Serializable description of a target, as written in experiment configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetSpec {
    Uniform {
        d: usize,
    },
    Bingham {
        d: usize,
        /// Largest eigenvalue.
        #[serde(default)]
        kappa_max: Option<f64>,
        /// Layout of the remaining eigenvalues.
        #[serde(default)]
        spectrum: Spectrum,
        /// Explicit eigenvalues, overriding `kappa_max`.
        #[serde(default)]
        kappas: Option<Vec<f64>>,
    },
    Vmf {
        d: usize,
        kappa: f64,
        /// Defaults to the last standard basis vector.
        #[serde(default)]
        mu: Option<Vec<f64>>,
    },
    MixVmf {
        d: usize,
        kappa: f64,
        components: usize,
        /// Seed for the uniformly drawn component means.
        #[serde(default)]
        mode_seed: u64,
    },
    CurvedVmf {
        #[serde(default = "default_curve_dim")]
        d: usize,
        kappa: f64,
        #[serde(default = "default_waypoints")]
        waypoints: usize,
        #[serde(default)]
        waypoint_seed: u64,
    },
}

fn default_curve_dim() -> usize {
    3
}

fn default_waypoints() -> usize {
    10
}

impl TargetSpec {
    pub fn build(&self) -> Result<Target> {
        match self {
            TargetSpec::Uniform { d } => Ok(Target::Uniform(Uniform::new(*d)?)),
            TargetSpec::Bingham {
                d,
                kappa_max,
                spectrum,
                kappas,
            } => {
                let b = match (kappas, kappa_max) {
                    (Some(k), _) => {
                        if k.len() != *d {
                            return Err(Error::invalid("kappas", format!("expected {d} values")));
                        }
                        Bingham::new(k.clone(), None)?
                    }
                    (None, Some(kmax)) => Bingham::with_spectrum(*d, *kmax, *spectrum)?,
                    (None, None) => return Err(Error::invalid("kappa_max", "missing")),
                };
                Ok(Target::Bingham(b))
            }
            TargetSpec::Vmf { d, kappa, mu } => {
                let mu = match mu {
                    Some(m) if m.len() != *d => return Err(Error::invalid("mu", format!("expected {d} coordinates"))),
                    Some(m) => UnitVector::new(m.clone())?,
                    None => UnitVector::basis(*d, d.saturating_sub(1))?,
                };
                Ok(Target::Vmf(Vmf::new(*kappa, mu)?))
            }
            TargetSpec::MixVmf {
                d,
                kappa,
                components,
                mode_seed,
            } => Ok(Target::MixVmf(MixVmf::random_modes(
                *d,
                *components,
                *kappa,
                *mode_seed,
            )?)),
            TargetSpec::CurvedVmf {
                d,
                kappa,
                waypoints,
                waypoint_seed,
            } => Ok(Target::CurvedVmf(CurvedVmf::random(
                *d,
                *waypoints,
                *kappa,
                *waypoint_seed,
            )?)),
        }
    }
}
