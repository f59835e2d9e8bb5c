//! Chain diagnostics: autocorrelation, effective sample size, mode hopping,
//! step distances, discretized KL divergences and the uniform-ergodicity
//! constant with an empirical total-variation check.

use std::f64::consts::{PI, TAU};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mcmc::{chain_rng, step, SamplerConfig};
use crate::sphere::{dot, geodesic_distance, sphere_area, UnitVector};
use crate::targets::LogDensity;

/// Lower bound applied to discretized target masses in [`kl_grid`].
pub const KL_GRID_FLOOR: f64 = 1e-12;

/// Default cell count of a grid on `S^2`.
pub const DEFAULT_GRID_CELLS: usize = 1000;

/// Empirical autocorrelation at lags `0..=max_lag` (clipped to `n - 1`).
pub fn acf(series: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = series.len();
    if n < 2 {
        return Err(Error::SeriesTooShort(n));
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = series.iter().map(|x| x - mean).collect();
    let ss: f64 = centered.iter().map(|c| c * c).sum();
    let scale = series.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if ss.is_nan() || ss <= (n as f64) * (1e-14 * scale.max(f64::MIN_POSITIVE)).powi(2) {
        return Err(Error::ZeroVariance);
    }

    let len = (2 * n).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = centered.iter().map(|&c| Complex::new(c, 0.0)).collect();
    buf.resize(len, Complex::new(0.0, 0.0));
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(len).process(&mut buf);
    buf.iter_mut().for_each(|z| *z = Complex::new(z.norm_sqr(), 0.0));
    planner.plan_fft_inverse(len).process(&mut buf);

    let lags = max_lag.min(n - 1);
    let zero = buf[0].re;
    Ok(buf[..=lags].iter().map(|z| z.re / zero).collect())
}

/// Integrated autocorrelation time by Geyer's initial monotone sequence.
pub fn integrated_autocorrelation_time(series: &[f64]) -> Result<f64> {
    let rho = acf(series, series.len() - 1)?;
    let mut tau = -1.0;
    let mut prev = f64::INFINITY;
    let mut k = 0;
    while k + 1 < rho.len() {
        let gamma = rho[k] + rho[k + 1];
        if gamma <= 0.0 {
            break;
        }
        let gamma = gamma.min(prev);
        tau += 2.0 * gamma;
        prev = gamma;
        k += 2;
    }
    Ok(tau.max(f64::MIN_POSITIVE))
}

/// ESS divided by the series length, capped at 1.
pub fn relative_ess(series: &[f64]) -> Result<f64> {
    Ok((1.0 / integrated_autocorrelation_time(series)?).min(1.0))
}

fn side(x: &[f64], axis: &[f64]) -> bool {
    dot(x, axis) >= 0.0
}

/// Fraction of transitions that change the sign of `axisᵀx` (with `sign(0) = +1`).
pub fn hopping_frequency(states: &[UnitVector], axis: &UnitVector) -> Result<f64> {
    if states.len() < 2 {
        return Err(Error::SeriesTooShort(states.len()));
    }
    let hops = states
        .windows(2)
        .filter(|w| side(&w[0], axis) != side(&w[1], axis))
        .count();
    Ok(hops as f64 / (states.len() - 1) as f64)
}

/// Great-circle distance between successive states.
pub fn step_distances(states: &[UnitVector]) -> Vec<f64> {
    states.windows(2).map(|w| geodesic_distance(&w[0], &w[1])).collect()
}

/// Projections `axisᵀx` of every state.
pub fn projections(states: &[UnitVector], axis: &UnitVector) -> Vec<f64> {
    states.iter().map(|x| x.dot(axis)).collect()
}

/// `KL(q | p) = Σ_{q_k > 0} q_k log(q_k / p_k)` for normalized `q` and `p`.
pub fn kl_divergence(q: &[f64], p: &[f64]) -> f64 {
    q.iter()
        .zip(p)
        .filter(|(qk, _)| **qk > 0.0)
        .map(|(qk, pk)| qk * (qk / pk).ln())
        .sum::<f64>()
        .max(0.0)
}

/// Counts normalized to relative frequencies.
pub fn frequencies(counts: &[u64]) -> Vec<f64> {
    let total: u64 = counts.iter().sum();
    counts.iter().map(|&c| c as f64 / total as f64).collect()
}

/// Index of the mode closest to `x` in geodesic distance; ties go to the lowest index.
pub fn nearest_mode(x: &[f64], modes: &[UnitVector]) -> usize {
    let mut best = 0;
    let mut best_ip = f64::NEG_INFINITY;
    for (k, m) in modes.iter().enumerate() {
        let ip = dot(x, m);
        if ip > best_ip {
            best = k;
            best_ip = ip;
        }
    }
    best
}

/// Visit counts of each mode under nearest-mode assignment.
pub fn mode_counts(states: &[UnitVector], modes: &[UnitVector]) -> Vec<u64> {
    let mut counts = vec![0; modes.len()];
    for x in states {
        counts[nearest_mode(x, modes)] += 1;
    }
    counts
}

/// KL divergence of the mode-visit frequencies from the uniform law over `modes`.
pub fn kl_mode_visits(states: &[UnitVector], modes: &[UnitVector]) -> Result<f64> {
    if modes.is_empty() {
        return Err(Error::invalid("modes", "at least one mode is required"));
    }
    if states.is_empty() {
        return Err(Error::SeriesTooShort(0));
    }
    let q = frequencies(&mode_counts(states, modes));
    let p = vec![1.0 / modes.len() as f64; modes.len()];
    Ok(kl_divergence(&q, &p))
}

/// Target masses of the grid cells, `p_k ∝ max(exp(log p(c_k)), 1e-12)` after
/// scaling by the largest cell density.
pub fn grid_masses<T: LogDensity + ?Sized>(target: &T, grid: &SphereGrid) -> Vec<f64> {
    let logs: Vec<f64> = grid.centers().iter().map(|c| target.log_p(c)).collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = logs.iter().map(|l| (l - top).exp().max(KL_GRID_FLOOR)).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|r| r / total).collect()
}

/// KL divergence of the chain's cell histogram from the discretized target.
pub fn kl_grid<T: LogDensity + ?Sized>(states: &[UnitVector], target: &T, grid: &SphereGrid) -> Result<f64> {
    if states.is_empty() {
        return Err(Error::SeriesTooShort(0));
    }
    if target.dim() != grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            actual: target.dim(),
        });
    }
    let q = frequencies(&grid.counts(states));
    Ok(kl_divergence(&q, &grid_masses(target, grid)))
}

/// Partition of the sphere into cells.
#[derive(Debug, Clone, PartialEq)]
pub enum SphereGrid {
    /// Nearest-center cells.
    Centers { centers: Vec<UnitVector> },
    /// Exactly equal-area cells on `S^2`: `bands` slabs of equal height in the
    /// third coordinate, each cut into `sectors` equal longitude sectors.
    Bands { bands: usize, sectors: usize },
}

impl SphereGrid {
    /// Default grid with `m` cells: a Fibonacci lattice on `S^2`, seeded random
    /// centers otherwise.
    pub fn new(d: usize, m: usize) -> Result<Self> {
        if d == 3 {
            Self::fibonacci(m)
        } else {
            Self::random_centers(d, m, 0)
        }
    }

    /// Fibonacci lattice with `m` points on `S^2`.
    pub fn fibonacci(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("cells", "must be positive"));
        }
        let golden = PI * (3.0 - 5.0_f64.sqrt());
        let centers = (0..m)
            .map(|i| {
                let z = 1.0 - (2 * i + 1) as f64 / m as f64;
                let r = (1.0 - z * z).sqrt();
                let phi = golden * i as f64;
                UnitVector::renormalized(vec![r * phi.cos(), r * phi.sin(), z])
            })
            .collect();
        Ok(SphereGrid::Centers { centers })
    }

    /// `m` centers drawn uniformly on `S^{d-1}` from a fixed seed.
    pub fn random_centers(d: usize, m: usize, seed: u64) -> Result<Self> {
        if d < crate::sphere::MIN_DIM {
            return Err(Error::Dimension(d));
        }
        if m == 0 {
            return Err(Error::invalid("cells", "must be positive"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let centers = (0..m)
            .map(|_| loop {
                let g: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
                if let Ok(u) = UnitVector::new(g) {
                    break u;
                }
            })
            .collect();
        Ok(SphereGrid::Centers { centers })
    }

    pub fn equal_area(bands: usize, sectors: usize) -> Result<Self> {
        if bands == 0 || sectors == 0 {
            return Err(Error::invalid("cells", "bands and sectors must be positive"));
        }
        Ok(SphereGrid::Bands { bands, sectors })
    }

    pub fn len(&self) -> usize {
        match self {
            SphereGrid::Centers { centers } => centers.len(),
            SphereGrid::Bands { bands, sectors } => bands * sectors,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        match self {
            SphereGrid::Centers { centers } => centers[0].dim(),
            SphereGrid::Bands { .. } => 3,
        }
    }

    /// Cell containing `x`.
    pub fn assign(&self, x: &[f64]) -> usize {
        match self {
            SphereGrid::Centers { centers } => nearest_mode(x, centers),
            &SphereGrid::Bands { bands, sectors } => {
                let band = (((x[2] + 1.0) * 0.5 * bands as f64) as usize).min(bands - 1);
                let mut phi = x[1].atan2(x[0]);
                if phi < 0.0 {
                    phi += TAU;
                }
                let sector = ((phi / TAU * sectors as f64) as usize).min(sectors - 1);
                band * sectors + sector
            }
        }
    }

    pub fn counts(&self, states: &[UnitVector]) -> Vec<u64> {
        let mut counts = vec![0; self.len()];
        for x in states {
            counts[self.assign(x)] += 1;
        }
        counts
    }

    /// A representative point of every cell.
    pub fn centers(&self) -> Vec<UnitVector> {
        match self {
            SphereGrid::Centers { centers } => centers.clone(),
            &SphereGrid::Bands { bands, sectors } => (0..bands)
                .flat_map(|b| {
                    let z = -1.0 + (2 * b + 1) as f64 / bands as f64;
                    let r = (1.0 - z * z).sqrt();
                    (0..sectors).map(move |s| {
                        let phi = (s as f64 + 0.5) * TAU / sectors as f64;
                        UnitVector::renormalized(vec![r * phi.cos(), r * phi.sin(), z])
                    })
                })
                .collect(),
        }
    }

    /// Exact uniform cell masses; only available for equal-area grids.
    pub fn uniform_masses(&self) -> Option<Vec<f64>> {
        match self {
            SphereGrid::Bands { .. } => Some(vec![1.0 / self.len() as f64; self.len()]),
            SphereGrid::Centers { .. } => None,
        }
    }

    /// The grid obtained by merging pairs of bands and pairs of sectors, with
    /// the map from fine cells to coarse cells.
    pub fn coarsen(&self) -> Option<(SphereGrid, Vec<usize>)> {
        match *self {
            SphereGrid::Bands { bands, sectors } if bands % 2 == 0 && sectors % 2 == 0 => {
                let coarse = SphereGrid::Bands {
                    bands: bands / 2,
                    sectors: sectors / 2,
                };
                let map = (0..bands * sectors)
                    .map(|i| (i / sectors / 2) * (sectors / 2) + (i % sectors) / 2)
                    .collect();
                Some((coarse, map))
            }
            _ => None,
        }
    }
}

/// Total variation distance `½ Σ |a_k − b_k|`.
pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Merges cell counts through a fine-to-coarse map.
pub fn merge_counts(counts: &[u64], map: &[usize], coarse_len: usize) -> Vec<u64> {
    let mut out = vec![0; coarse_len];
    for (c, &j) in counts.iter().zip(map) {
        out[j] += c;
    }
    out
}

/// `ρ = 1 − β C / (2π ω_{d-2})`, where `C` is the surface measure of the set on
/// which the density is at least `β` times its supremum.
pub fn ergodicity_constant(beta: f64, d: usize, c_mass: f64) -> Result<f64> {
    if d < crate::sphere::MIN_DIM {
        return Err(Error::Dimension(d));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::invalid("beta", format!("must lie in (0, 1], got {beta}")));
    }
    let full = sphere_area(d - 1);
    if !(c_mass > 0.0 && c_mass <= full * (1.0 + 1e-12)) {
        return Err(Error::invalid(
            "c_mass",
            format!("must lie in (0, {full}], got {c_mass}"),
        ));
    }
    Ok(1.0 - beta * c_mass / (TAU * sphere_area(d - 2)))
}

/// `1 − β / √(2π(d−1))`.
pub fn dimension_bound(beta: f64, d: usize) -> f64 {
    1.0 - beta / (TAU * (d - 1) as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TvRow {
    pub n: usize,
    pub empirical_tv: f64,
    pub bound: f64,
    pub mc_error: f64,
}

impl TvRow {
    pub fn violates(&self) -> bool {
        self.empirical_tv - 3.0 * self.mc_error > self.bound
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TvTable {
    pub rho: f64,
    pub replications: usize,
    pub rows: Vec<TvRow>,
}

impl TvTable {
    /// Rows from `hist[n]`, the cell counts after `n` steps.
    pub fn from_histograms(hist: &[Vec<u64>], reference: &[f64], rho: f64) -> Self {
        let rows = hist
            .iter()
            .enumerate()
            .map(|(n, counts)| {
                let total: u64 = counts.iter().sum();
                let q = frequencies(counts);
                let mc_error = 0.5 * q.iter().map(|qk| (qk * (1.0 - qk) / total as f64).sqrt()).sum::<f64>();
                TvRow {
                    n,
                    empirical_tv: total_variation(&q, reference),
                    bound: rho.powi(n as i32),
                    mc_error,
                }
            })
            .collect();
        Self {
            rho,
            replications: hist.first().map_or(0, |c| c.iter().sum::<u64>() as usize),
            rows,
        }
    }

    pub fn violated(&self) -> bool {
        self.rows.iter().any(TvRow::violates)
    }
}

/// Cell histograms of `replications` independent chains after each of
/// `0..=n_max` steps from `x0`. Replication `r` uses stream `r` of `seed`.
pub fn n_step_histograms<T: LogDensity + ?Sized>(
    config: &SamplerConfig,
    target: &T,
    x0: &UnitVector,
    n_max: usize,
    grid: &SphereGrid,
    replications: usize,
    seed: u64,
) -> Result<Vec<Vec<u64>>> {
    config.validate()?;
    let mut hist = vec![vec![0_u64; grid.len()]; n_max + 1];
    let start = grid.assign(x0);
    for r in 0..replications {
        let mut rng = chain_rng(seed, r as u64);
        let mut x = x0.clone();
        hist[0][start] += 1;
        for row in hist.iter_mut().skip(1) {
            x = step(target, config, &x, config.step_size, &mut rng)?.x;
            row[grid.assign(&x)] += 1;
        }
    }
    Ok(hist)
}

/// Grid total variation between the `n`-step law from `x0` and the reference
/// cell masses, against the bound `ρⁿ`.
#[allow(clippy::too_many_arguments)]
pub fn tv_vs_bound<T: LogDensity + ?Sized>(
    config: &SamplerConfig,
    target: &T,
    x0: &UnitVector,
    n_max: usize,
    grid: &SphereGrid,
    reference: &[f64],
    rho: f64,
    replications: usize,
    seed: u64,
) -> Result<TvTable> {
    if reference.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            actual: reference.len(),
        });
    }
    if replications == 0 {
        return Err(Error::invalid("replications", "must be positive"));
    }
    let hist = n_step_histograms(config, target, x0, n_max, grid, replications, seed)?;
    Ok(TvTable::from_histograms(&hist, reference, rho))
}

/// Median of a non-empty slice (mean of the two central values for even lengths).
pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    })
}

/// Diagnostics of one chain. Fields that do not apply to the experiment are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub n: usize,
    pub acf: Option<Vec<f64>>,
    pub relative_ess: Option<f64>,
    pub hopping: Option<f64>,
    pub step_distances: Vec<f64>,
    pub mean_step_distance: f64,
    pub kl_modes: Option<f64>,
    pub kl_grid: Option<f64>,
    pub rejections_per_step: f64,
    pub acceptance_rate: f64,
}

/// What to compute in [`DiagnosticsReport::compute`].
#[derive(Debug, Clone, Copy)]
pub struct ReportOptions<'a> {
    /// Axis for projections, ACF, ESS and hopping.
    pub axis: &'a UnitVector,
    pub max_lag: usize,
    /// Whether to report hopping across the hyperplane orthogonal to `axis`.
    pub hopping: bool,
    pub modes: Option<&'a [UnitVector]>,
    pub grid: Option<&'a SphereGrid>,
}

impl DiagnosticsReport {
    pub fn compute<T: LogDensity + ?Sized>(
        states: &[UnitVector],
        rejections: &[u64],
        accepted: &[bool],
        target: &T,
        opts: &ReportOptions<'_>,
    ) -> Result<Self> {
        let n = states.len();
        if n < 2 {
            return Err(Error::SeriesTooShort(n));
        }
        let series = projections(states, opts.axis);
        let acf = acf(&series, opts.max_lag).ok();
        let relative_ess = relative_ess(&series).ok();
        let hopping = if opts.hopping {
            Some(hopping_frequency(states, opts.axis)?)
        } else {
            None
        };
        let step_distances = step_distances(states);
        let mean_step_distance = step_distances.iter().sum::<f64>() / step_distances.len() as f64;
        let kl_modes = opts.modes.map(|m| kl_mode_visits(states, m)).transpose()?;
        let kl_grid = opts.grid.map(|g| kl_grid(states, target, g)).transpose()?;
        Ok(Self {
            n,
            acf,
            relative_ess,
            hopping,
            step_distances,
            mean_step_distance,
            kl_modes,
            kl_grid,
            rejections_per_step: rejections.iter().sum::<u64>() as f64 / rejections.len().max(1) as f64,
            acceptance_rate: accepted.iter().filter(|a| **a).count() as f64 / accepted.len().max(1) as f64,
        })
    }
}

/// Median over chains of every scalar field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub chains: usize,
    pub relative_ess: Option<f64>,
    pub hopping: Option<f64>,
    pub mean_step_distance: Option<f64>,
    pub kl_modes: Option<f64>,
    pub kl_grid: Option<f64>,
    pub rejections_per_step: Option<f64>,
    pub acceptance_rate: Option<f64>,
}

impl AggregateReport {
    pub fn from_reports<'a>(reports: impl IntoIterator<Item = &'a DiagnosticsReport>) -> Self {
        let reports: Vec<&DiagnosticsReport> = reports.into_iter().collect();
        let med = |f: &dyn Fn(&DiagnosticsReport) -> Option<f64>| {
            median(&reports.iter().filter_map(|r| f(r)).collect::<Vec<_>>())
        };
        Self {
            chains: reports.len(),
            relative_ess: med(&|r| r.relative_ess),
            hopping: med(&|r| r.hopping),
            mean_step_distance: med(&|r| Some(r.mean_step_distance)),
            kl_modes: med(&|r| r.kl_modes),
            kl_grid: med(&|r| r.kl_grid),
            rejections_per_step: med(&|r| Some(r.rejections_per_step)),
            acceptance_rate: med(&|r| Some(r.acceptance_rate)),
        }
    }
}
