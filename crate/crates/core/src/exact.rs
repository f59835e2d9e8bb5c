//! Exact (non-Markov) samplers used as ground truth for the MCMC kernels.

use rand::{Rng, RngCore};
use rand_distr::{Beta, Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::sphere::{sample_tangent, UnitVector, MIN_DIM};
use crate::targets::{Bingham, MixVmf, Target, Vmf};

/// Iteration cap shared by every rejection loop in this module.
pub const MAX_REJECTIONS: u64 = 1_000_000;

/// Draws independent samples from a fixed distribution on the sphere.
pub trait ExactSampler: Send + Sync {
    fn dim(&self) -> usize;

    fn draw(&self, rng: &mut dyn RngCore) -> Result<UnitVector>;

    /// Acceptance probability of the underlying rejection scheme, if known in closed form.
    fn expected_acceptance(&self) -> Option<f64> {
        None
    }

    fn draw_many(&self, n: usize, rng: &mut dyn RngCore) -> Result<Vec<UnitVector>> {
        (0..n).map(|_| self.draw(rng)).collect()
    }
}

/// Normalized standard Gaussian draw: uniform on `S^{d-1}`.
pub fn uniform_sphere<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<UnitVector> {
    if d < MIN_DIM {
        return Err(Error::Dimension(d));
    }
    let mut y = vec![0.0; d];
    loop {
        y.iter_mut().for_each(|c| *c = rng.sample(StandardNormal));
        match UnitVector::new(y.clone()) {
            Ok(u) => return Ok(u),
            Err(Error::ZeroVector(_)) => continue,
            Err(e) => return Err(e),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct UniformSampler {
    pub d: usize,
}

impl ExactSampler for UniformSampler {
    fn dim(&self) -> usize {
        self.d
    }

    fn draw(&self, rng: &mut dyn RngCore) -> Result<UnitVector> {
        uniform_sphere(self.d, rng)
    }

    fn expected_acceptance(&self) -> Option<f64> {
        Some(1.0)
    }
}

/// Wood's rejection sampler for the von Mises-Fisher distribution.
///
/// The component `w = μᵀx` is drawn by rejection from a transformed
/// `Beta((d-1)/2, (d-1)/2)` envelope; the remaining direction is uniform on
/// the tangent subsphere at `μ`.
#[derive(Debug, Clone)]
pub struct WoodVmf {
    kappa: f64,
    mu: UnitVector,
    b: f64,
    x0: f64,
    c: f64,
    beta: Beta<f64>,
}

impl WoodVmf {
    pub fn new(target: &Vmf) -> Self {
        let kappa = target.kappa();
        let d1 = (target.mu().dim() - 1) as f64;
        // (-2κ + √(4κ² + (d-1)²)) / (d-1), rearranged to avoid cancellation at large κ.
        let b = d1 / (2.0 * kappa + (4.0 * kappa * kappa + d1 * d1).sqrt());
        let x0 = (1.0 - b) / (1.0 + b);
        let c = kappa * x0 + d1 * (1.0 - x0 * x0).ln();
        let beta = Beta::new(d1 / 2.0, d1 / 2.0).expect("positive shape parameters");
        Self {
            kappa,
            mu: target.mu().clone(),
            b,
            x0,
            c,
            beta,
        }
    }

    /// Draws `w = μᵀx`.
    pub fn draw_projection<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        let d1 = (self.mu.dim() - 1) as f64;
        for _ in 0..MAX_REJECTIONS {
            let z = self.beta.sample(rng);
            let w = (1.0 - (1.0 + self.b) * z) / (1.0 - (1.0 - self.b) * z);
            let u: f64 = rng.random();
            if self.kappa * w + d1 * (1.0 - self.x0 * w).ln() - self.c >= u.ln() {
                return Ok(w);
            }
        }
        Err(Error::IterationCap {
            what: "Wood vMF rejection loop",
            cap: MAX_REJECTIONS,
        })
    }

    fn draw_generic<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<UnitVector> {
        let w = self.draw_projection(rng)?;
        let v = sample_tangent(&self.mu, rng)?;
        let r = (1.0 - w * w).max(0.0).sqrt();
        let coords = self.mu.iter().zip(v.dir()).map(|(m, vi)| w * m + r * vi).collect();
        UnitVector::new(coords)
    }
}

impl ExactSampler for WoodVmf {
    fn dim(&self) -> usize {
        self.mu.dim()
    }

    fn draw(&self, rng: &mut dyn RngCore) -> Result<UnitVector> {
        self.draw_generic(rng)
    }
}

pub fn vmf_exact<R: Rng + ?Sized>(target: &Vmf, rng: &mut R) -> Result<UnitVector> {
    WoodVmf::new(target).draw_generic(rng)
}

/// Tolerance of the bisection for the envelope parameter `b`.
pub const ACG_ROOT_TOL: f64 = 1e-12;

/// Bingham sampler by rejection from an angular central Gaussian envelope
/// (Kent, Ganeiber and Mardia).
///
/// With `λ_i = κ_d - κ_i >= 0` the density is `e^{κ_d} exp(-Σ λ_i y_i²)` in
/// eigen-coordinates `y`. The envelope is `ACG(Ω)`, `Ω = I + 2Λ/b`, where
/// `b` solves `Σ 1/(b + 2λ_i) = 1`; a draw `x` is accepted with probability
/// `exp(-xᵀΛx) (xᵀΩx)^{d/2} e^{(d-b)/2} (b/d)^{d/2}`.
#[derive(Debug, Clone)]
pub struct KentBingham {
    target: Bingham,
    lambdas: Vec<f64>,
    /// Standard deviations `Ω_ii^{-1/2}` of the Gaussian behind the envelope.
    scales: Vec<f64>,
    omega: Vec<f64>,
    b: f64,
    log_m: f64,
}

impl KentBingham {
    pub fn new(target: &Bingham) -> Result<Self> {
        let kmax = target.kappa_max();
        let lambdas: Vec<f64> = target.kappas().iter().map(|k| kmax - k).collect();
        let d = lambdas.len() as f64;
        let b = solve_envelope_b(&lambdas)?;
        let omega: Vec<f64> = lambdas.iter().map(|l| 1.0 + 2.0 * l / b).collect();
        let scales = omega.iter().map(|o| o.sqrt().recip()).collect();
        // log of the acceptance constant: (d - b)/2 + (d/2) log(b/d).
        let log_m = 0.5 * (d - b) + 0.5 * d * (b / d).ln();
        Ok(Self {
            target: target.clone(),
            lambdas,
            scales,
            omega,
            b,
            log_m,
        })
    }

    /// The envelope parameter `b`.
    pub fn b(&self) -> f64 {
        self.b
    }

    fn log_accept(&self, y: &[f64]) -> f64 {
        let d = y.len() as f64;
        let quad: f64 = self.lambdas.iter().zip(y).map(|(l, yi)| l * yi * yi).sum();
        let omega_form: f64 = self.omega.iter().zip(y).map(|(o, yi)| o * yi * yi).sum();
        -quad + 0.5 * d * omega_form.ln() + self.log_m
    }

    /// Draws in eigen-coordinates, returning the point and the number of rejections.
    fn draw_eigen<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(Vec<f64>, u64)> {
        let d = self.lambdas.len();
        let mut y = vec![0.0; d];
        for attempt in 0..MAX_REJECTIONS {
            y.iter_mut()
                .zip(&self.scales)
                .for_each(|(c, s)| *c = s * rng.sample::<f64, _>(StandardNormal));
            let n = crate::sphere::norm(&y);
            if n < crate::sphere::DEGENERATE_TOL {
                continue;
            }
            y.iter_mut().for_each(|c| *c /= n);
            let u: f64 = rng.random();
            if u.ln() <= self.log_accept(&y) {
                return Ok((y, attempt));
            }
        }
        Err(Error::IterationCap {
            what: "ACG Bingham rejection loop",
            cap: MAX_REJECTIONS,
        })
    }

    /// Empirical acceptance rate over `n` draws.
    pub fn measure_acceptance<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<f64> {
        let mut rejections = 0u64;
        for _ in 0..n {
            rejections += self.draw_eigen(rng)?.1;
        }
        Ok(n as f64 / (n as f64 + rejections as f64))
    }
}

impl ExactSampler for KentBingham {
    fn dim(&self) -> usize {
        self.lambdas.len()
    }

    fn draw(&self, rng: &mut dyn RngCore) -> Result<UnitVector> {
        let (y, _) = self.draw_eigen(rng)?;
        UnitVector::new(self.target.from_eigen(&y))
    }
}

/// Root of `Σ 1/(b + 2λ_i) = 1` on `(0, d]` by bisection.
fn solve_envelope_b(lambdas: &[f64]) -> Result<f64> {
    if lambdas.iter().any(|l| !l.is_finite() || *l < 0.0) {
        return Err(Error::RootFinding(
            "eigenvalue gaps must be finite and non-negative".into(),
        ));
    }
    let f = |b: f64| lambdas.iter().map(|l| 1.0 / (b + 2.0 * l)).sum::<f64>() - 1.0;
    let d = lambdas.len() as f64;
    let (mut lo, mut hi) = (0.0_f64, d);
    if f(hi) > 0.0 {
        return Err(Error::RootFinding(format!("no sign change on (0, {d}]")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= ACG_ROOT_TOL {
            return Ok(0.5 * (lo + hi));
        }
    }
    Err(Error::RootFinding("bisection did not converge".into()))
}

pub fn bingham_exact<R: Rng + ?Sized>(target: &Bingham, rng: &mut R) -> Result<UnitVector> {
    let sampler = KentBingham::new(target)?;
    let (y, _) = sampler.draw_eigen(rng)?;
    UnitVector::new(target.from_eigen(&y))
}

/// Picks a component uniformly, then draws from it with Wood's method.
#[derive(Debug, Clone)]
pub struct MixVmfSampler {
    components: Vec<WoodVmf>,
}

impl MixVmfSampler {
    pub fn new(target: &MixVmf) -> Self {
        Self {
            components: target.components().map(|c| WoodVmf::new(&c)).collect(),
        }
    }

    /// Draws a point together with the index of the component it came from.
    pub fn draw_labelled<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(usize, UnitVector)> {
        let k = rng.random_range(0..self.components.len());
        Ok((k, self.components[k].draw_generic(rng)?))
    }
}

impl ExactSampler for MixVmfSampler {
    fn dim(&self) -> usize {
        self.components[0].dim()
    }

    fn draw(&self, rng: &mut dyn RngCore) -> Result<UnitVector> {
        Ok(self.draw_labelled(rng)?.1)
    }
}

pub fn mix_vmf_exact<R: Rng + ?Sized>(target: &MixVmf, rng: &mut R) -> Result<UnitVector> {
    Ok(MixVmfSampler::new(target).draw_labelled(rng)?.1)
}

/// The exact sampler for `target`, if one exists (the curved vMF has none).
pub fn for_target(target: &Target) -> Result<Option<Box<dyn ExactSampler>>> {
    Ok(match target {
        Target::Uniform(u) => Some(Box::new(UniformSampler {
            d: crate::targets::LogDensity::dim(u),
        })),
        Target::Vmf(v) => Some(Box::new(WoodVmf::new(v))),
        Target::Bingham(b) => Some(Box::new(KentBingham::new(b)?)),
        Target::MixVmf(m) => Some(Box::new(MixVmfSampler::new(m))),
        Target::CurvedVmf(_) => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn uniform_draws_are_unit_and_centered() {
        let mut r = rng(1);
        let mut mean = [0.0; 3];
        let n = 100_000;
        for _ in 0..n {
            let x = uniform_sphere(3, &mut r).unwrap();
            assert!((crate::sphere::norm(&x) - 1.0).abs() < 1e-15);
            mean.iter_mut().zip(x.iter()).for_each(|(m, xi)| *m += xi / n as f64);
        }
        assert!(crate::sphere::norm(&mean) < 0.02);
        assert!(uniform_sphere(2, &mut r).is_err());
    }

    #[test]
    fn vmf_concentrates_for_large_kappa() {
        let mut r = rng(2);
        let target = Vmf::new(1e4, UnitVector::basis(5, 0).unwrap()).unwrap();
        let s = WoodVmf::new(&target);
        let mean: f64 = (0..2000).map(|_| s.draw(&mut r).unwrap()[0]).sum::<f64>() / 2000.0;
        assert!(mean > 0.999);
    }

    #[test]
    fn vmf_orthogonal_components_have_zero_mean() {
        let mut r = rng(3);
        let target = Vmf::new(2.0, UnitVector::basis(4, 3).unwrap()).unwrap();
        let s = WoodVmf::new(&target);
        let n = 50_000;
        let draws = s.draw_many(n, &mut r).unwrap();
        for k in 0..3 {
            let vals: Vec<f64> = draws.iter().map(|x| x[k]).collect();
            let (m, se) = stats::mean_and_standard_error(&vals);
            assert!(m.abs() < 3.0 * se + 1e-12, "component {k}: mean {m}, se {se}");
        }
    }

    #[test]
    fn envelope_root_solves_the_secular_equation() {
        let lambdas = [10.0, 4.0, 1.0, 0.0];
        let b = solve_envelope_b(&lambdas).unwrap();
        let lhs: f64 = lambdas.iter().map(|l| 1.0 / (b + 2.0 * l)).sum();
        assert!((lhs - 1.0).abs() < 1e-10);
        assert!((solve_envelope_b(&[0.0; 4]).unwrap() - 4.0).abs() < 1e-10);
    }

    #[test]
    fn bingham_with_zero_matrix_accepts_everything() {
        let target = Bingham::new(vec![0.0; 4], None).unwrap();
        let s = KentBingham::new(&target).unwrap();
        assert!((s.b() - 4.0).abs() < 1e-10);
        let mut r = rng(4);
        for _ in 0..100 {
            let (y, _) = s.draw_eigen(&mut r).unwrap();
            assert!(s.log_accept(&y).abs() < 1e-9);
        }
        assert!((s.measure_acceptance(1000, &mut r).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bingham_acceptance_never_exceeds_one() {
        let target = Bingham::linear(6, 40.0).unwrap();
        let s = KentBingham::new(&target).unwrap();
        let mut r = rng(5);
        for _ in 0..10_000 {
            let y = uniform_sphere(6, &mut r).unwrap();
            assert!(s.log_accept(&y) <= 1e-12);
        }
    }

    #[test]
    fn bingham_modes_are_balanced() {
        let target = Bingham::linear(10, 30.0).unwrap();
        let s = KentBingham::new(&target).unwrap();
        let mut r = rng(6);
        let n = 20_000;
        let positive = (0..n).filter(|_| s.draw(&mut r).unwrap()[9] > 0.0).count() as f64;
        let sd = (0.25 * n as f64).sqrt();
        assert!((positive - 0.5 * n as f64).abs() < 3.0 * sd);
    }

    #[test]
    fn mixture_component_counts_are_uniform() {
        let target = MixVmf::random_modes(5, 4, 20.0, 7).unwrap();
        let s = MixVmfSampler::new(&target);
        let mut r = rng(8);
        let mut counts = vec![0u64; 4];
        for _ in 0..100_000 {
            counts[s.draw_labelled(&mut r).unwrap().0] += 1;
        }
        let test = stats::chi_square_gof(&counts, &[0.25; 4]).unwrap();
        assert!(test.p_value > 0.01, "{test:?}");

        let single = MixVmf::new(3.0, vec![UnitVector::basis(3, 2).unwrap()]).unwrap();
        let a = mix_vmf_exact(&single, &mut rng(9)).unwrap();
        // One component: the uniform pick consumes one draw, then Wood's method runs identically.
        let mut r2 = rng(9);
        let _: usize = r2.random_range(0..1);
        let b = vmf_exact(&Vmf::new(3.0, UnitVector::basis(3, 2).unwrap()).unwrap(), &mut r2).unwrap();
        assert_eq!(a, b);
    }
}
