//! Runs an experiment and writes its artifacts.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use geoslice::diagnostics::{projections, AggregateReport, DiagnosticsReport, ReportOptions, SphereGrid};
use geoslice::exact::{for_target, uniform_sphere};
use geoslice::mcmc::{chain_rng, run_chain_stream, Chain, SamplerConfig};
use geoslice::targets::{LogDensity, Target, TargetSpec};
use geoslice::{SamplerKind, UnitVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, InitPolicy, Variant, DEFAULT_MAX_LAG};

/// Streams at and above this offset draw uniform initial points.
const INIT_STREAM: u64 = 1 << 32;
/// Streams at and above this offset draw exact reference samples.
const EXACT_STREAM: u64 = 1 << 33;

pub const SUMMARY_FILE: &str = "summary.json";
pub const CONFIG_FILE: &str = "config.toml";
pub const LOG_FILE: &str = "run.log";
pub const CHAIN_DIR: &str = "chains";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ChainStatus {
    Ok,
    Failed { error: String },
}

/// Everything recorded about one chain besides its states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainMeta {
    pub variant: String,
    pub sampler: SamplerKind,
    pub sampler_index: usize,
    pub repetition: usize,
    pub seed: u64,
    pub stream: u64,
    pub n_steps: usize,
    pub burn_in: usize,
    pub thinning: usize,
    pub x0: Vec<f64>,
    pub final_step_size: Option<f64>,
    pub total_rejections: u64,
    pub accepted_steps: u64,
    pub sample_file: Option<String>,
    #[serde(flatten)]
    pub status: ChainStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSummary {
    pub meta: ChainMeta,
    pub report: Option<DiagnosticsReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerSummary {
    pub sampler: SamplerKind,
    pub sampler_index: usize,
    pub config: SamplerConfig,
    pub chains: Vec<ChainSummary>,
    pub aggregate: AggregateReport,
}

/// Counts of post-burn-in projections onto the mode axis, pooled over repetitions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramTable {
    pub axis: Vec<f64>,
    pub edges: Vec<f64>,
    pub exact: Option<Vec<u64>>,
    pub samplers: Vec<(String, Vec<u64>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantSummary {
    pub label: String,
    pub target: TargetSpec,
    pub samplers: Vec<SamplerSummary>,
    pub histogram: Option<HistogramTable>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Totals {
    pub chains: usize,
    pub failed_chains: usize,
    pub steps: u64,
    pub rejections: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub name: String,
    pub seed: u64,
    pub n_steps: usize,
    pub repetitions: usize,
    pub variants: Vec<VariantSummary>,
    pub totals: Totals,
}

/// Timestamped progress log; the only artifact that differs between reruns.
struct RunLog(Mutex<BufWriter<File>>);

impl RunLog {
    fn create(path: &Path) -> Result<Self> {
        let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        Ok(Self(Mutex::new(BufWriter::new(f))))
    }

    fn line(&self, msg: &str) {
        log::info!("{msg}");
        let t = SystemTime::now().duration_since(UNIX_EPOCH).unwrap_or_default();
        let mut w = self.0.lock().expect("log lock");
        let _ = writeln!(w, "{}.{:03} {msg}", t.as_secs(), t.subsec_millis());
    }
}

struct Job<'a> {
    variant: &'a Variant,
    variant_index: usize,
    sampler_index: usize,
    config: &'a SamplerConfig,
    repetition: usize,
}

struct JobResult {
    summary: ChainSummary,
    histogram: Option<Vec<u64>>,
}

/// Shared, read-only inputs of every chain in a variant.
struct VariantContext {
    axis: UnitVector,
    modes: Option<Vec<UnitVector>>,
    grid: Option<SphereGrid>,
}

/// Validates `config`, runs every chain, and writes all artifacts under `out`.
pub fn run_experiment(config: &ExperimentConfig, out: &Path, workers: Option<usize>) -> Result<Summary> {
    let variants = config.validate()?;
    let config = config.resolved();
    fs::create_dir_all(out.join(CHAIN_DIR)).with_context(|| format!("creating {}", out.display()))?;
    fs::write(out.join(CONFIG_FILE), config.to_toml())?;
    let log = RunLog::create(&out.join(LOG_FILE))?;
    log.line(&format!("experiment {} started, seed {}", config.name, config.seed));

    let contexts = variants
        .iter()
        .map(|v| variant_context(&config, v))
        .collect::<Result<Vec<_>>>()?;
    for v in &variants {
        fs::create_dir_all(out.join(CHAIN_DIR).join(&v.label))?;
    }

    let jobs: Vec<Job> = variants
        .iter()
        .enumerate()
        .flat_map(|(vi, variant)| {
            config.samplers.iter().enumerate().flat_map(move |(si, sc)| {
                (0..config.repetitions).map(move |r| Job {
                    variant,
                    variant_index: vi,
                    sampler_index: si,
                    config: sc,
                    repetition: r,
                })
            })
        })
        .collect();

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w);
    }
    let pool = builder.build()?;
    let results: Vec<Result<JobResult>> = pool.install(|| {
        jobs.par_iter()
            .map(|job| run_job(&config, job, &contexts[job.variant_index], out, &log))
            .collect()
    });
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;

    let mut summaries = Vec::with_capacity(variants.len());
    let mut results = results.into_iter();
    for (vi, variant) in variants.iter().enumerate() {
        let mut samplers = Vec::with_capacity(config.samplers.len());
        let mut pooled = Vec::new();
        for (si, sc) in config.samplers.iter().enumerate() {
            let chunk: Vec<JobResult> = results.by_ref().take(config.repetitions).collect();
            if let Some(h) = &config.histogram {
                let mut counts = vec![0u64; h.bins];
                for c in chunk.iter().filter_map(|r| r.histogram.as_ref()) {
                    counts.iter_mut().zip(c).for_each(|(a, b)| *a += b);
                }
                pooled.push((sampler_label(si, sc.kind), counts));
            }
            let chains: Vec<ChainSummary> = chunk.into_iter().map(|r| r.summary).collect();
            let aggregate = AggregateReport::from_reports(chains.iter().filter_map(|c| c.report.as_ref()));
            samplers.push(SamplerSummary {
                sampler: sc.kind,
                sampler_index: si,
                config: sc.clone(),
                chains,
                aggregate,
            });
        }
        let histogram = match &config.histogram {
            Some(h) => Some(HistogramTable {
                axis: contexts[vi].axis.as_slice().to_vec(),
                edges: (0..=h.bins).map(|i| -1.0 + 2.0 * i as f64 / h.bins as f64).collect(),
                exact: exact_histogram(
                    &variant.target,
                    &contexts[vi].axis,
                    h.bins,
                    h.exact_draws,
                    config.seed,
                    vi,
                )?,
                samplers: pooled,
            }),
            None => None,
        };
        summaries.push(VariantSummary {
            label: variant.label.clone(),
            target: variant.spec.clone(),
            samplers,
            histogram,
        });
    }

    let totals = totals(
        summaries
            .iter()
            .flat_map(|v| &v.samplers)
            .flat_map(|s| &s.chains)
            .map(|c| &c.meta),
    );
    let summary = Summary {
        name: config.name.clone(),
        seed: config.seed,
        n_steps: config.n_steps,
        repetitions: config.repetitions,
        variants: summaries,
        totals,
    };
    fs::write(out.join(SUMMARY_FILE), serde_json::to_string_pretty(&summary)?)?;
    log.line(&format!(
        "experiment {} finished: {} chains, {} failed",
        config.name, totals.chains, totals.failed_chains
    ));
    Ok(summary)
}

/// Sums steps and rejections over chain metadata.
pub fn totals<'a>(metas: impl IntoIterator<Item = &'a ChainMeta>) -> Totals {
    let mut t = Totals::default();
    for m in metas {
        t.chains += 1;
        match m.status {
            ChainStatus::Ok => t.steps += m.n_steps as u64,
            ChainStatus::Failed { .. } => t.failed_chains += 1,
        }
        t.rejections += m.total_rejections;
    }
    t
}

fn variant_context(config: &ExperimentConfig, v: &Variant) -> Result<VariantContext> {
    let modes = match (&v.target, config.diagnostics.kl_modes) {
        (Target::MixVmf(m), Some(true)) => Some(m.modes().to_vec()),
        _ => None,
    };
    let grid = config.grid.as_ref().map(|g| g.build(v.target.dim())).transpose()?;
    Ok(VariantContext {
        axis: v.target.mode(),
        modes,
        grid,
    })
}

fn sampler_label(index: usize, kind: SamplerKind) -> String {
    format!("{index:02}_{kind}")
}

fn initial_point(config: &ExperimentConfig, target: &Target, repetition: usize) -> Result<UnitVector> {
    Ok(match &config.init {
        InitPolicy::Mode => target.mode(),
        InitPolicy::Uniform => uniform_sphere(
            target.dim(),
            &mut chain_rng(config.seed, INIT_STREAM + repetition as u64),
        )?,
        InitPolicy::Explicit(x) => UnitVector::new(x.clone())?,
    })
}

fn run_job(config: &ExperimentConfig, job: &Job, ctx: &VariantContext, out: &Path, log: &RunLog) -> Result<JobResult> {
    let target = &job.variant.target;
    let x0 = initial_point(config, target, job.repetition)?;
    let stream = job.repetition as u64;
    let label = format!(
        "{}_rep{}",
        sampler_label(job.sampler_index, job.config.kind),
        job.repetition
    );
    let dir = out.join(CHAIN_DIR).join(&job.variant.label);
    let mut meta = ChainMeta {
        variant: job.variant.label.clone(),
        sampler: job.config.kind,
        sampler_index: job.sampler_index,
        repetition: job.repetition,
        seed: config.seed,
        stream,
        n_steps: config.n_steps,
        burn_in: job.config.tuning.burn_in_for(job.config.kind, config.n_steps),
        thinning: config.thinning,
        x0: x0.as_slice().to_vec(),
        final_step_size: None,
        total_rejections: 0,
        accepted_steps: 0,
        sample_file: None,
        status: ChainStatus::Ok,
    };
    let mut report = None;
    let mut histogram = None;
    match run_chain_stream(target, job.config, &x0, config.n_steps, config.seed, stream) {
        Ok(chain) => {
            meta.final_step_size = Some(chain.final_step_size);
            meta.total_rejections = chain.total_rejections();
            meta.accepted_steps = chain.accepted.iter().filter(|a| **a).count() as u64;
            let file = format!("{label}.tsv");
            write_samples(&dir.join(&file), &chain, config.thinning)?;
            meta.sample_file = Some(format!("{CHAIN_DIR}/{}/{file}", job.variant.label));
            let opts = ReportOptions {
                axis: &ctx.axis,
                max_lag: config.diagnostics.max_lag.unwrap_or(DEFAULT_MAX_LAG),
                hopping: config.diagnostics.hopping.unwrap_or(false),
                modes: ctx.modes.as_deref(),
                grid: ctx.grid.as_ref(),
            };
            let b = chain.burn_in;
            match DiagnosticsReport::compute(
                chain.kept(),
                &chain.rejections[b..],
                &chain.accepted[b..],
                target,
                &opts,
            ) {
                Ok(r) => report = Some(r),
                Err(e) => {
                    meta.status = ChainStatus::Failed {
                        error: format!("diagnostics: {e}"),
                    }
                }
            }
            if let Some(h) = &config.histogram {
                histogram = Some(histogram_counts(&projections(chain.kept(), &ctx.axis), h.bins));
            }
        }
        Err(e) => {
            meta.status = ChainStatus::Failed { error: e.to_string() };
        }
    }
    fs::write(dir.join(format!("{label}.json")), serde_json::to_string_pretty(&meta)?)?;
    match &meta.status {
        ChainStatus::Ok => log.line(&format!("{}/{label} done", job.variant.label)),
        ChainStatus::Failed { error } => log.line(&format!("{}/{label} failed: {error}", job.variant.label)),
    }
    Ok(JobResult {
        summary: ChainSummary { meta, report },
        histogram,
    })
}

/// Writes every `thinning`-th state with its step index and metadata columns.
pub fn write_samples(path: &PathBuf, chain: &Chain, thinning: usize) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    let d = chain.dim();
    let mut header = vec!["step".to_string()];
    header.extend((0..d).map(|i| format!("x{i}")));
    header.extend(["rejections".to_string(), "accepted".to_string()]);
    writeln!(w, "{}", header.join("\t"))?;
    for (i, x) in chain.states.iter().enumerate().step_by(thinning) {
        write!(w, "{i}")?;
        for c in x.as_slice() {
            write!(w, "\t{c:.16e}")?;
        }
        writeln!(w, "\t{}\t{}", chain.rejections[i], u8::from(chain.accepted[i]))?;
    }
    w.flush()?;
    Ok(())
}

/// Counts of `values` in `bins` equal-width bins on `[-1, 1]`.
pub fn histogram_counts(values: &[f64], bins: usize) -> Vec<u64> {
    let mut counts = vec![0u64; bins];
    for v in values {
        let k = (((v + 1.0) / 2.0) * bins as f64).floor().clamp(0.0, (bins - 1) as f64) as usize;
        counts[k] += 1;
    }
    counts
}

fn exact_histogram(
    target: &Target,
    axis: &UnitVector,
    bins: usize,
    draws: usize,
    seed: u64,
    variant_index: usize,
) -> Result<Option<Vec<u64>>> {
    if draws == 0 {
        return Ok(None);
    }
    let Some(sampler) = for_target(target)? else {
        return Ok(None);
    };
    let mut rng = chain_rng(seed, EXACT_STREAM + variant_index as u64);
    let xs = sampler.draw_many(draws, &mut rng)?;
    Ok(Some(histogram_counts(&projections(&xs, axis), bins)))
}
