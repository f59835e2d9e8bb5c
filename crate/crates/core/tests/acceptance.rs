//! Acceptance suite. Prints one PASS/FAIL line per criterion followed by the
//! measured values of its sub-checks, and exits non-zero if any check fails.
//!
//! `cargo test -p geoslice --test acceptance [-- 4 9]` runs all criteria or a subset.

use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use geoslice::diagnostics::{
    dimension_bound, ergodicity_constant, frequencies, hopping_frequency, kl_mode_visits, merge_counts,
    n_step_histograms, projections, relative_ess, total_variation, SphereGrid, TvTable,
};
use geoslice::exact::{for_target, uniform_sphere, ExactSampler, KentBingham, WoodVmf};
use geoslice::mcmc::{hamiltonian, leapfrog, run_chain, step, Chain, SamplerConfig, SamplerKind};
use geoslice::sphere::{
    dot, geodesic_distance, norm, sample_tangent, slerp, sphere_area, t_map, Angle, GivensRotation, TangentUnitVector,
    UnitVector,
};
use geoslice::stats::{chi_square_homogeneity, integrate, ks_one_sample, ks_two_sample};
use geoslice::targets::{Bingham, CurvedVmf, LogDensity, MixVmf, Target, Uniform, Vmf};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

struct Check {
    label: String,
    pass: bool,
    detail: String,
}

fn check(label: impl Into<String>, pass: bool, detail: impl Into<String>) -> Check {
    Check {
        label: label.into(),
        pass,
        detail: detail.into(),
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const SLICE_KINDS: [SamplerKind; 2] = [SamplerKind::GeosssReject, SamplerKind::GeosssShrink];
const COMPARED_KINDS: [SamplerKind; 4] = [
    SamplerKind::GeosssReject,
    SamplerKind::GeosssShrink,
    SamplerKind::Rwmh,
    SamplerKind::Hmc,
];

// ---------------------------------------------------------------------------
// Bingham d = 10, κ_d = 30 runs shared by criteria 1 to 3.

const BINGHAM_N: usize = 20_000;
const BINGHAM_REPS: u64 = 3;

struct BinghamRuns {
    target: Bingham,
    chains: Vec<(SamplerKind, Vec<Chain>)>,
    elapsed: Duration,
}

fn bingham_runs() -> &'static BinghamRuns {
    static RUNS: OnceLock<BinghamRuns> = OnceLock::new();
    RUNS.get_or_init(|| {
        let start = Instant::now();
        let target = Bingham::top(10, 30.0).unwrap();
        let x0 = target.mode();
        let chains = COMPARED_KINDS
            .iter()
            .map(|&kind| {
                let cfg = SamplerConfig::new(kind);
                let reps = (0..BINGHAM_REPS)
                    .map(|seed| run_chain(&target, &cfg, &x0, BINGHAM_N, seed).unwrap())
                    .collect();
                (kind, reps)
            })
            .collect();
        BinghamRuns {
            target,
            chains,
            elapsed: start.elapsed(),
        }
    })
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        0.5 * (xs[m - 1] + xs[m])
    }
}

fn bingham_median(kind: SamplerKind, f: impl Fn(&Chain, &UnitVector) -> f64) -> f64 {
    let runs = bingham_runs();
    let axis = runs.target.mode();
    let (_, chains) = runs.chains.iter().find(|(k, _)| *k == kind).unwrap();
    median(chains.iter().map(|c| f(c, &axis)).collect())
}

fn hopping(c: &Chain, axis: &UnitVector) -> f64 {
    hopping_frequency(c.kept(), axis).unwrap()
}

fn ess(c: &Chain, axis: &UnitVector) -> f64 {
    relative_ess(&projections(c.kept(), axis)).unwrap()
}

fn criterion_1() -> Vec<Check> {
    let runs = bingham_runs();
    let reject = bingham_median(SamplerKind::GeosssReject, hopping);
    let shrink = bingham_median(SamplerKind::GeosssShrink, hopping);
    let rwmh = bingham_median(SamplerKind::Rwmh, hopping);
    vec![
        check(
            "geoSSS-reject hopping = 0.50 ± 0.05",
            (reject - 0.5).abs() <= 0.05,
            format!("{reject:.4}"),
        ),
        check(
            "geoSSS-shrink hopping in [0.10, 0.20]",
            (0.10..=0.20).contains(&shrink),
            format!("{shrink:.4}"),
        ),
        check("RWMH hopping < 0.01", rwmh < 0.01, format!("{rwmh:.4}")),
        check(
            "runtime < 2 min",
            runs.elapsed < Duration::from_secs(120),
            format!("{:.1} s", runs.elapsed.as_secs_f64()),
        ),
    ]
}

fn criterion_2() -> Vec<Check> {
    let [reject, shrink, rwmh, hmc] = COMPARED_KINDS.map(|k| bingham_median(k, ess));
    let detail = format!("reject {reject:.4}, shrink {shrink:.4}, hmc {hmc:.5}, rwmh {rwmh:.5}");
    vec![
        check(
            "ESS order reject > shrink > HMC >= RWMH",
            reject > shrink && shrink > hmc && hmc >= rwmh,
            detail,
        ),
        check("geoSSS-reject relative ESS > 0.9", reject > 0.9, format!("{reject:.4}")),
        check(
            "geoSSS-shrink relative ESS > 0.05",
            shrink > 0.05,
            format!("{shrink:.4}"),
        ),
    ]
}

fn criterion_3() -> Vec<Check> {
    let runs = bingham_runs();
    let axis = runs.target.mode();
    let mut out = Vec::new();
    for kind in SLICE_KINDS {
        let (_, chains) = runs.chains.iter().find(|(k, _)| *k == kind).unwrap();
        let (pos, total) = chains.iter().fold((0usize, 0usize), |(p, t), c| {
            let pr = projections(c.kept(), &axis);
            (p + pr.iter().filter(|v| **v >= 0.0).count(), t + pr.len())
        });
        let frac = pos as f64 / total as f64;
        out.push(check(
            format!("{kind} positive-mode fraction = 0.50 ± 0.03"),
            (frac - 0.5).abs() <= 0.03,
            format!("{frac:.4} over {total} states"),
        ));
    }
    let sampler = KentBingham::new(&runs.target).unwrap();
    let mut r = rng(33);
    let n = BINGHAM_N;
    let pos = (0..n)
        .filter(|_| sampler.draw(&mut r).unwrap().dot(&axis) >= 0.0)
        .count();
    let frac = pos as f64 / n as f64;
    let tol = 3.0 * 0.5 / (n as f64).sqrt();
    out.push(check(
        "ACG exact positive-mode fraction = 0.50 ± 3σ",
        (frac - 0.5).abs() <= tol,
        format!("{frac:.4} (3σ = {tol:.4})"),
    ));
    out
}

// ---------------------------------------------------------------------------

/// `P(μᵀx <= t)` for the vMF law on `S^2`.
fn vmf3_cdf(kappa: f64, t: f64) -> f64 {
    let t = t.clamp(-1.0, 1.0);
    ((kappa * (t - 1.0)).exp() - (-2.0 * kappa).exp()) / (1.0 - (-2.0 * kappa).exp())
}

/// `E[x₃²]` under `exp(κ₂ x₂² + κ₃ x₃²)` on `S^2` by nested quadrature.
fn bingham3_second_moment(k2: f64, k3: f64) -> f64 {
    let density = |theta: f64, phi: f64| {
        let (st, ct) = theta.sin_cos();
        let x2 = st * phi.sin();
        (k2 * x2 * x2 + k3 * ct * ct - k3).exp() * st
    };
    let weighted = |theta: f64| {
        let c = theta.cos();
        c * c * integrate(&|phi| density(theta, phi), 0.0, TAU, 1e-13)
    };
    let plain = |theta: f64| integrate(&|phi| density(theta, phi), 0.0, TAU, 1e-13);
    integrate(&weighted, 0.0, PI, 1e-12) / integrate(&plain, 0.0, PI, 1e-12)
}

fn criterion_4() -> Vec<Check> {
    let mut out = Vec::new();
    let mu = UnitVector::new(vec![0.2, -0.5, 0.7]).unwrap();
    for (kappa, seed) in [(2.0, 41), (20.0, 42)] {
        let target = Vmf::new(kappa, mu.clone()).unwrap();
        let sampler = WoodVmf::new(&target);
        let mut r = rng(seed);
        let t: Vec<f64> = (0..100_000).map(|_| sampler.draw(&mut r).unwrap().dot(&mu)).collect();
        let ks = ks_one_sample(&t, |x| vmf3_cdf(kappa, x));
        out.push(check(
            format!("Wood vMF d=3 κ={kappa}: KS p > 0.01"),
            ks.p_value > 0.01,
            format!("D = {:.5}, p = {:.3}", ks.statistic, ks.p_value),
        ));
    }
    for (kmax, seed) in [(5.0, 43), (30.0, 44)] {
        let target = Bingham::linear(3, kmax).unwrap();
        let sampler = KentBingham::new(&target).unwrap();
        let axis = target.mode();
        let mut r = rng(seed);
        let n = 100_000;
        let m = (0..n)
            .map(|_| {
                let p = sampler.draw(&mut r).unwrap().dot(&axis);
                p * p
            })
            .sum::<f64>()
            / n as f64;
        let k = target.kappas();
        let oracle = bingham3_second_moment(k[1], k[2]);
        let rel = (m - oracle).abs() / oracle;
        out.push(check(
            format!("ACG Bingham d=3 κ_d={kmax}: E[(u₃ᵀx)²] within 1%"),
            rel <= 0.01,
            format!("{m:.5} vs quadrature {oracle:.5} (rel {rel:.2e})"),
        ));
    }
    out
}

// ---------------------------------------------------------------------------

/// Merges cells whose pooled count is below `min` into one extra cell.
fn pool_sparse(a: &[u64], b: &[u64], min: u64) -> (Vec<u64>, Vec<u64>) {
    let (mut pa, mut pb) = (Vec::new(), Vec::new());
    let (mut ra, mut rb) = (0, 0);
    for (&x, &y) in a.iter().zip(b) {
        if x + y >= min {
            pa.push(x);
            pb.push(y);
        } else {
            ra += x;
            rb += y;
        }
    }
    if ra + rb > 0 {
        pa.push(ra);
        pb.push(rb);
    }
    (pa, pb)
}

fn small_targets() -> Vec<(&'static str, Target)> {
    let mu = UnitVector::new(vec![0.3, -0.4, 0.8]).unwrap();
    vec![
        ("uniform", Target::Uniform(Uniform::new(3).unwrap())),
        ("vMF κ=1", Target::Vmf(Vmf::new(1.0, mu.clone()).unwrap())),
        ("vMF κ=5", Target::Vmf(Vmf::new(5.0, mu).unwrap())),
        ("Bingham κ_d=5", Target::Bingham(Bingham::linear(3, 5.0).unwrap())),
    ]
}

fn stationarity_config(kind: SamplerKind) -> SamplerConfig {
    let step_size = match kind {
        SamplerKind::Rwmh => 0.5,
        SamplerKind::Hmc => 0.2,
        _ => 0.1,
    };
    SamplerConfig::new(kind).with_step_size(step_size)
}

fn criterion_5() -> Vec<Check> {
    let grid = SphereGrid::equal_area(6, 8).unwrap();
    let chains = 10_000;
    let reference_n = 100_000;
    let mut out = Vec::new();
    for (ti, (name, target)) in small_targets().into_iter().enumerate() {
        let exact = for_target(&target).unwrap().unwrap();
        let mut r = rng(500 + ti as u64);
        let reference = grid.counts(&exact.draw_many(reference_n, &mut r).unwrap());
        for (ki, kind) in SamplerKind::ALL.into_iter().enumerate() {
            // The geodesic walk ignores the target; its invariant law is the uniform one.
            if kind == SamplerKind::GeodesicWalk && !matches!(target, Target::Uniform(_)) {
                continue;
            }
            let cfg = stationarity_config(kind);
            let seed = 5000 + 10 * ti as u64 + ki as u64;
            let mut r = rng(seed);
            let starts = exact.draw_many(chains, &mut r).unwrap();
            let moved: Vec<UnitVector> = starts
                .iter()
                .map(|x| step(&target, &cfg, x, cfg.step_size, &mut r).unwrap().x)
                .collect();
            let (a, b) = pool_sparse(&grid.counts(&moved), &reference, 20);
            let test = chi_square_homogeneity(&a, &b).unwrap();
            out.push(check(
                format!("one-step invariance {kind} on {name}: χ² p > 0.001"),
                test.p_value > 0.001,
                format!(
                    "χ² = {:.1} on {} dof, p = {:.3}",
                    test.statistic, test.dof, test.p_value
                ),
            ));
        }
    }

    // Flow balance across a two-set partition for stationary transitions.
    let target = Bingham::linear(3, 5.0).unwrap();
    let exact = KentBingham::new(&target).unwrap();
    let w = UnitVector::new(vec![1.0, 1.0, 1.0]).unwrap();
    let in_a = |x: &UnitVector| x.dot(&w) > 0.3;
    for (ki, kind) in SLICE_KINDS.into_iter().enumerate() {
        let n = 1_000_000;
        let cfg = SamplerConfig::new(kind);
        let mut r = rng(600 + ki as u64);
        let (mut ab, mut ba) = (0u64, 0u64);
        for _ in 0..n {
            let x = exact.draw(&mut r).unwrap();
            let y = step(&target, &cfg, &x, cfg.step_size, &mut r).unwrap().x;
            match (in_a(&x), in_a(&y)) {
                (true, false) => ab += 1,
                (false, true) => ba += 1,
                _ => {}
            }
        }
        let (p1, p2) = (ab as f64 / n as f64, ba as f64 / n as f64);
        let se = ((p1 + p2 - (p1 - p2).powi(2)) / n as f64).sqrt();
        out.push(check(
            format!("flow balance {kind}: |π(A→Aᶜ) − π(Aᶜ→A)| <= 3 SE"),
            (p1 - p2).abs() <= 3.0 * se,
            format!("{p1:.5} vs {p2:.5}, SE {se:.1e}"),
        ));
    }

    // One step of the ideal sampler forgets which mode it started in.
    let target = Bingham::top(10, 30.0).unwrap();
    let axis = target.mode();
    let cfg = SamplerConfig::new(SamplerKind::GeosssReject);
    let mut r = rng(700);
    let mut from = |x0: &UnitVector| -> Vec<f64> {
        (0..10_000)
            .map(|_| step(&target, &cfg, x0, 0.0, &mut r).unwrap().x.dot(&axis).abs())
            .collect()
    };
    let plus = from(&axis);
    let minus = from(&axis.antipode());
    let ks = ks_two_sample(&plus, &minus);
    out.push(check(
        "geoSSS-reject one-step |u_dᵀx′| from ±u_d: KS p > 0.01",
        ks.p_value > 0.01,
        format!("D = {:.4}, p = {:.3}", ks.statistic, ks.p_value),
    ));
    out
}

// ---------------------------------------------------------------------------

fn criterion_6() -> Vec<Check> {
    let start = Instant::now();
    let grid = SphereGrid::equal_area(10, 20).unwrap();
    let (coarse, map) = grid.coarsen().unwrap();
    let reference = grid.uniform_masses().unwrap();
    let coarse_reference = coarse.uniform_masses().unwrap();
    let target = Uniform::new(3).unwrap();
    let rho = ergodicity_constant(1.0, 3, sphere_area(2)).unwrap();
    let x0 = UnitVector::new(vec![0.6, 0.0, 0.8]).unwrap();
    let replications = 100_000;
    let mut out = Vec::new();
    for (i, kind) in SLICE_KINDS.into_iter().enumerate() {
        let cfg = SamplerConfig::new(kind);
        let hist = n_step_histograms(&cfg, &target, &x0, 10, &grid, replications, 60 + i as u64).unwrap();
        let table = TvTable::from_histograms(&hist, &reference, rho);
        let worst = table.rows[1..]
            .iter()
            .map(|r| r.empirical_tv - 3.0 * r.mc_error - r.bound)
            .fold(f64::NEG_INFINITY, f64::max);
        let row1 = table.rows[1];
        out.push(check(
            format!("{kind}: grid TV <= ρⁿ + 3·MC error for n = 1..10"),
            !table.violated(),
            format!(
                "ρ = {rho:.6}; n=1 TV {:.4} vs {:.4}; max(TV − 3MC − ρⁿ) = {worst:.4}",
                row1.empirical_tv, row1.bound
            ),
        ));
        let mut refine_ok = true;
        let mut worst_gap = f64::NEG_INFINITY;
        for (n, counts) in hist.iter().enumerate() {
            let fine_tv = table.rows[n].empirical_tv;
            let cc = merge_counts(counts, &map, coarse.len());
            let coarse_tv = total_variation(&frequencies(&cc), &coarse_reference);
            worst_gap = worst_gap.max(coarse_tv - fine_tv);
            refine_ok &= coarse_tv <= fine_tv + 3.0 * table.rows[n].mc_error;
        }
        out.push(check(
            format!("{kind}: coarse-grid TV <= fine-grid TV"),
            refine_ok,
            format!("max(coarse − fine) = {worst_gap:.2e}"),
        ));
    }
    let elapsed = start.elapsed();
    out.push(check(
        "runtime < 5 min",
        elapsed < Duration::from_secs(300),
        format!("{:.1} s", elapsed.as_secs_f64()),
    ));
    out
}

fn criterion_7() -> Vec<Check> {
    let mut worst = f64::NEG_INFINITY;
    let mut ok = true;
    for d in 3..=50 {
        let rho = ergodicity_constant(1.0, d, sphere_area(d - 1)).unwrap();
        let bound = dimension_bound(1.0, d);
        worst = worst.max(rho - bound);
        ok &= rho <= bound;
    }
    let rho3 = ergodicity_constant(1.0, 3, sphere_area(2)).unwrap();
    vec![
        check(
            "ρ(β=1, S^{d−1}, d) <= 1 − 1/√(2π(d−1)) for d = 3..50",
            ok,
            format!("max(ρ − bound) = {worst:.3e}"),
        ),
        check(
            "ρ(β=1, S², 3) = 1 − 1/π",
            (rho3 - (1.0 - 1.0 / PI)).abs() < 1e-12,
            format!("{rho3:.9}"),
        ),
    ]
}

// ---------------------------------------------------------------------------

const GEOMETRY_TOL: f64 = 1e-12;

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn criterion_8() -> Vec<Check> {
    let instances = 2000;
    let mut r = rng(80);
    let (mut reverse_err, mut shift_err, mut givens, mut slerp_end, mut slerp_mid, mut orth) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..instances {
        let d = r.random_range(3..=20);
        let x = uniform_sphere(d, &mut r).unwrap();
        let v = sample_tangent(&x, &mut r).unwrap();
        orth = orth.max(dot(&x, v.dir()).abs()).max((norm(v.dir()) - 1.0).abs());
        let theta = r.random::<f64>() * TAU;
        let rr = r.random::<f64>() * TAU;
        let t = t_map(&v, Angle(theta));
        reverse_err = reverse_err.max(max_diff(&t.geodesic(theta), &x));
        shift_err = shift_err.max(max_diff(&v.geodesic(theta - rr), &t.geodesic(rr)));

        let g = GivensRotation::new(&v.dir_point(), &x, Angle(theta)).unwrap();
        givens = givens.max(max_diff(&g.rotate(&x), &v.geodesic(theta)));

        let y = uniform_sphere(d, &mut r).unwrap();
        if geodesic_distance(&x, &y) < PI - 1e-3 {
            let s0 = slerp(&x, &y, 0.0).unwrap();
            let s1 = slerp(&x, &y, 1.0).unwrap();
            slerp_end = slerp_end.max(max_diff(&s0, &x)).max(max_diff(&s1, &y));
            let tt = r.random::<f64>();
            let st = slerp(&x, &y, tt).unwrap();
            slerp_mid = slerp_mid.max((geodesic_distance(&x, &st) - tt * geodesic_distance(&x, &y)).abs());
        }
    }

    // Direction of the tangent draw at the pole of S^2 is uniform on the circle.
    let pole = UnitVector::basis(3, 2).unwrap();
    let mut angles: Vec<f64> = (0..100_000)
        .map(|_| {
            let v = sample_tangent(&pole, &mut r).unwrap();
            let a = v.dir()[1].atan2(v.dir()[0]);
            if a < 0.0 {
                a + TAU
            } else {
                a
            }
        })
        .collect();
    angles.sort_by(f64::total_cmp);
    let ks_angle = ks_one_sample(&angles, |a| (a / TAU).clamp(0.0, 1.0));
    // At e_4 in d = 4 the draw is uniform on S^2, so each coordinate is uniform on [-1, 1].
    let e4 = UnitVector::basis(4, 3).unwrap();
    let coords: Vec<f64> = (0..100_000)
        .map(|_| sample_tangent(&e4, &mut r).unwrap().dir()[0])
        .collect();
    let ks_coord = ks_one_sample(&coords, |c| ((c + 1.0) / 2.0).clamp(0.0, 1.0));

    let tol = format!("<= {GEOMETRY_TOL:.0e}");
    vec![
        check(
            format!("γ_Tθ(θ) = x over {instances} instances"),
            reverse_err <= GEOMETRY_TOL,
            format!("max err {reverse_err:.2e} {tol}"),
        ),
        check(
            "γ(θ − r) = γ_Tθ(r)",
            shift_err <= GEOMETRY_TOL,
            format!("max err {shift_err:.2e} {tol}"),
        ),
        check(
            "Givens G(v, x, θ)x = γ(θ)",
            givens <= GEOMETRY_TOL,
            format!("max err {givens:.2e} {tol}"),
        ),
        check(
            "slerp endpoints",
            slerp_end <= GEOMETRY_TOL,
            format!("max err {slerp_end:.2e} {tol}"),
        ),
        check(
            "slerp moves at constant speed",
            slerp_mid <= 1e-9,
            format!("max err {slerp_mid:.2e} <= 1e-9"),
        ),
        check(
            "tangent draw unit and orthogonal",
            orth <= GEOMETRY_TOL,
            format!("max err {orth:.2e} {tol}"),
        ),
        check(
            "tangent direction uniform on S^1 (KS p > 0.01)",
            ks_angle.p_value > 0.01,
            format!("p = {:.3}", ks_angle.p_value),
        ),
        check(
            "tangent coordinate uniform at e_4 in d=4 (KS p > 0.01)",
            ks_coord.p_value > 0.01,
            format!("p = {:.3}", ks_coord.p_value),
        ),
    ]
}

// ---------------------------------------------------------------------------

fn gradient_targets() -> Vec<(&'static str, Target)> {
    vec![
        ("uniform d=10", Target::Uniform(Uniform::new(10).unwrap())),
        ("Bingham d=10 κ_d=30", Target::Bingham(Bingham::top(10, 30.0).unwrap())),
        (
            "vMF d=10 κ=50",
            Target::Vmf(Vmf::new(50.0, UnitVector::basis(10, 4).unwrap()).unwrap()),
        ),
        (
            "mixture d=10 K=5 κ=100",
            Target::MixVmf(MixVmf::random_modes(10, 5, 100.0, 0).unwrap()),
        ),
        (
            "curved vMF d=3 κ=300",
            Target::CurvedVmf(CurvedVmf::random(3, 10, 300.0, 0).unwrap()),
        ),
    ]
}

fn criterion_9() -> Vec<Check> {
    let mut out = Vec::new();
    let h = 1e-6;
    for (i, (name, target)) in gradient_targets().into_iter().enumerate() {
        let mut r = rng(90 + i as u64);
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let x = uniform_sphere(target.dim(), &mut r).unwrap();
            let g = target.grad_log_p(&x);
            for _ in 0..3 {
                let v = sample_tangent(&x, &mut r).unwrap();
                let fd = (target.log_p(&v.geodesic(h)) - target.log_p(&v.geodesic(-h))) / (2.0 * h);
                let an = dot(&g, v.dir());
                worst = worst.max((fd - an).abs() / an.abs().max(1.0));
            }
        }
        out.push(check(
            format!("{name}: tangent gradient matches finite differences"),
            worst <= 1e-5,
            format!("max rel err {worst:.2e} <= 1e-5"),
        ));
    }

    // Energy error over a fixed integration time shrinks as O(ε²).
    let target = Vmf::new(5.0, UnitVector::basis(3, 2).unwrap()).unwrap();
    let exact = WoodVmf::new(&target);
    let mut r = rng(99);
    let starts: Vec<(UnitVector, Vec<f64>)> = (0..200)
        .map(|_| {
            let x = exact.draw(&mut r).unwrap();
            let g: Vec<f64> = (0..3).map(|_| r.sample(StandardNormal)).collect();
            let v = TangentUnitVector::project(x.clone(), &g).unwrap();
            let speed = norm(&g);
            let vel = v.dir().iter().map(|c| c * speed).collect();
            (x, vel)
        })
        .collect();
    let steps = [8usize, 16, 32, 64];
    let total_time = 1.6;
    let (mut lx, mut ly) = (Vec::new(), Vec::new());
    for t in steps {
        let eps = total_time / t as f64;
        let mean_err = starts
            .iter()
            .map(|(x, v)| {
                let end = leapfrog(&target, x, v, eps, t).unwrap();
                (hamiltonian(&target, &end.x, &end.v) - hamiltonian(&target, x, v)).abs()
            })
            .sum::<f64>()
            / starts.len() as f64;
        lx.push(eps.ln());
        ly.push(mean_err.ln());
    }
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let slope = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / lx.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    out.push(check(
        "HMC leapfrog energy-error slope in [1.8, 2.2]",
        (1.8..=2.2).contains(&slope),
        format!("slope {slope:.3}"),
    ));
    out
}

// ---------------------------------------------------------------------------

fn criterion_10() -> Vec<Check> {
    let target = MixVmf::random_modes(10, 5, 100.0, 0).unwrap();
    let x0 = target.modes()[0].clone();
    let n = 100_000;
    let reps = 3;
    let mut kl = Vec::new();
    let mut rej = Vec::new();
    for kind in COMPARED_KINDS {
        let cfg = SamplerConfig::new(kind);
        let chains: Vec<Chain> = (0..reps)
            .map(|s| run_chain(&target, &cfg, &x0, n, 100 + s).unwrap())
            .collect();
        kl.push(median(
            chains
                .iter()
                .map(|c| kl_mode_visits(c.kept(), target.modes()).unwrap())
                .collect(),
        ));
        rej.push(median(
            chains
                .iter()
                .map(|c| c.total_rejections() as f64 / c.len() as f64)
                .collect(),
        ));
    }
    let [reject, shrink, rwmh, hmc] = [kl[0], kl[1], kl[2], kl[3]];
    vec![
        check(
            "KL(modes): both geoSSS < RWMH and < HMC",
            reject.max(shrink) < rwmh.min(hmc),
            format!("reject {reject:.4}, shrink {shrink:.4}, rwmh {rwmh:.4}, hmc {hmc:.4}"),
        ),
        check(
            "rejections/step: shrink < reject",
            rej[1] < rej[0],
            format!("shrink {:.2}, reject {:.2}", rej[1], rej[0]),
        ),
    ]
}

// ---------------------------------------------------------------------------

type Criterion = (usize, &'static str, fn() -> Vec<Check>);

const CRITERIA: [Criterion; 10] = [
    (1, "Bingham d=10 hopping frequencies", criterion_1),
    (2, "Bingham d=10 relative ESS ordering", criterion_2),
    (3, "Bingham d=10 mode balance", criterion_3),
    (4, "exact-sampler oracles", criterion_4),
    (5, "stationarity and reversibility suite", criterion_5),
    (6, "ergodicity bound on grid TV", criterion_6),
    (7, "ergodicity constant dimension bound", criterion_7),
    (8, "geometry properties", criterion_8),
    (9, "gradients and leapfrog order", criterion_9),
    (10, "vMF mixture mode coverage", criterion_10),
];

fn main() {
    let wanted: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let selected: Vec<&Criterion> = CRITERIA
        .iter()
        .filter(|(id, _, _)| wanted.is_empty() || wanted.contains(id))
        .collect();

    let results: Vec<(usize, &str, Vec<Check>, Duration)> = std::thread::scope(|scope| {
        let handles: Vec<_> = selected
            .iter()
            .map(|&&(id, title, f)| {
                scope.spawn(move || {
                    let start = Instant::now();
                    let checks = f();
                    (id, title, checks, start.elapsed())
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("criterion panicked"))
            .collect()
    });

    let mut failed = 0;
    for (id, title, checks, elapsed) in &results {
        let pass = checks.iter().all(|c| c.pass);
        failed += usize::from(!pass);
        println!(
            "{} criterion {id:>2}: {title} ({:.1} s)",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
        for c in checks {
            println!(
                "       [{}] {}: {}",
                if c.pass { "ok" } else { "FAILED" },
                c.label,
                c.detail
            );
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
