//! Monte-Carlo rate-memory sweeps.
//!
//! Every `(M, trial)` pair gets a seed derived from the master seed, so the
//! output depends only on the configuration. All schemes in a trial see the
//! same demand vector, and the baselines and Comp-CACM fill their caches
//! from the same cache seed.

use rayon::prelude::*;

use crate::baselines;
use crate::bounds;
use crate::compressor::{partition_library, CompressedLibrary};
use crate::delivery::{decode, encode, DeliveryPlan, Demand, SenderContents};
use crate::error::{Error, Result};
use crate::harness::config::{ExperimentConfig, Scheme};
use crate::harness::table::{mean_and_stderr, RateMemoryTable, TableRow};
use crate::library::{BitLibrary, GroupedLibrary};
use crate::placement::{self, fill_caches, packetize, CachingDistribution, PacketizedLibrary};
use crate::seed;

/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "CACM_WORKERS";

const DEMAND_STREAM: u64 = 1;
const CACHE_STREAM: u64 = 2;
const BITS_STREAM: u64 = 3;
const COLORING_STREAM: u64 = 4;

pub const LOWER_BOUND_SERIES: &str = "lower-bound";
pub const UPPER_BOUND_SERIES: &str = "upper-bound";

/// Rates of every enabled scheme in one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub memory: f64,
    pub trial: usize,
    pub seed: u64,
    pub demand: Demand,
    pub rates: Vec<(Scheme, f64)>,
}

impl TrialRecord {
    pub fn rate(&self, scheme: Scheme) -> Option<f64> {
        self.rates.iter().find(|(s, _)| *s == scheme).map(|&(_, r)| r)
    }
}

/// Everything that depends on the memory size but not on the trial.
struct MemoryPoint {
    memory: f64,
    comp_dist: CachingDistribution,
    base_dist: CachingDistribution,
}

struct Setup<'a> {
    cfg: &'a ExperimentConfig,
    lib: GroupedLibrary,
    clib: CompressedLibrary,
    plib: PacketizedLibrary,
    ulib: CompressedLibrary,
    uplib: PacketizedLibrary,
}

/// Comp-CACM caching distribution at `memory`: the optimized two-level
/// distribution, or every file in full once the compressed library fits.
pub fn comp_cacm_distribution(
    lib: &GroupedLibrary,
    clib: &CompressedLibrary,
    n: usize,
    memory: f64,
) -> Result<CachingDistribution> {
    let delta = lib.delta();
    let kappa = if clib.p_files().is_empty() { 1 } else { lib.min_ensemble_size(delta) };
    if memory > 0.0 && clib.total_units() as f64 <= memory * lib.file_units() as f64 {
        return Ok(CachingDistribution::saturated(lib.m(), memory));
    }
    let opt = placement::optimize_distribution_uniform(n, lib.m(), memory, delta, kappa)?;
    Ok(opt.distribution(clib))
}

impl<'a> Setup<'a> {
    fn new(cfg: &'a ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let lib = cfg.library()?;
        let clib = if lib.group_size() > 1 {
            partition_library(&lib, cfg.n, lib.delta())?
        } else {
            CompressedLibrary::uncompressed(&lib)
        };
        let plib = packetize(&clib, cfg.b_units())?;
        let ulib = CompressedLibrary::uncompressed(&lib);
        let uplib = packetize(&ulib, cfg.b_units())?;
        Ok(Self { cfg, lib, clib, plib, ulib, uplib })
    }

    fn memory_point(&self, memory: f64) -> Result<MemoryPoint> {
        Ok(MemoryPoint {
            memory,
            comp_dist: comp_cacm_distribution(&self.lib, &self.clib, self.cfg.n, memory)?,
            base_dist: CachingDistribution::uniform(self.lib.m()),
        })
    }

    fn run_trial(&self, point: &MemoryPoint, trial: usize) -> Result<TrialRecord> {
        let cfg = self.cfg;
        let memory = point.memory;
        let trial_seed = seed::derive_seed(cfg.seed, &[memory.to_bits(), trial as u64]);
        let mut demand_rng = seed::stream(trial_seed, &[DEMAND_STREAM]);
        let demand = Demand::sample(self.lib.demand_pmf(), cfg.n, &mut demand_rng);
        let cache_seed = seed::derive_seed(trial_seed, &[CACHE_STREAM]);
        let policy = cfg.coloring_policy(seed::derive_seed(trial_seed, &[COLORING_STREAM]));

        let mut rates = Vec::with_capacity(cfg.schemes.len());
        let wants_baseline = cfg.schemes.iter().any(|s| *s != Scheme::CompCacm);
        let base_caches = if wants_baseline {
            Some(fill_caches(&self.uplib, &point.base_dist, memory, cfg.n, cache_seed)?)
        } else {
            None
        };
        for &scheme in &cfg.schemes {
            let rate = match scheme {
                Scheme::CompCacm => {
                    let caches = fill_caches(&self.plib, &point.comp_dist, memory, cfg.n, cache_seed)?;
                    let plan = DeliveryPlan::new(&demand, &caches, &self.clib, &self.plib, policy)?;
                    if cfg.verify_decoding {
                        self.check_decoding(&plan, &demand, &caches, trial_seed)
                            .map_err(|reason| Error::TrialDecode { master_seed: cfg.seed, memory, trial, reason })?;
                    }
                    plan.rate()
                }
                Scheme::RapCm => baselines::scheme_rapcm(
                    &demand,
                    base_caches.as_ref().expect("baseline caches"),
                    &self.ulib,
                    &self.uplib,
                    policy,
                )?,
                Scheme::LcU => {
                    baselines::rate_lcu(&demand, base_caches.as_ref().expect("baseline caches"), &self.uplib)
                }
                Scheme::LcNm => {
                    baselines::rate_lcnm(&demand, base_caches.as_ref().expect("baseline caches"), &self.uplib)
                }
            };
            rates.push((scheme, rate));
        }
        Ok(TrialRecord { memory, trial, seed: trial_seed, demand, rates })
    }

    fn check_decoding(
        &self,
        plan: &DeliveryPlan,
        demand: &Demand,
        caches: &placement::CacheConfiguration,
        trial_seed: u64,
    ) -> std::result::Result<(), String> {
        let bits = BitLibrary::realize(&self.lib, seed::derive_seed(trial_seed, &[BITS_STREAM]));
        let contents = SenderContents::new(&self.lib, &bits, &self.clib);
        let codeword = encode(&plan.graph, &plan.coloring, &contents, &self.plib).map_err(|e| e.to_string())?;
        for u in 0..demand.n() {
            let store = contents.receiver_store(&self.plib, caches, u);
            let out = decode(u, demand.get(u), &codeword, &store, &self.clib, &self.plib).map_err(|e| e.to_string())?;
            if out != bits.file(&self.lib, demand.get(u)) {
                return Err(format!("receiver {} decoded a wrong file {}", u + 1, demand.get(u)));
            }
        }
        Ok(())
    }
}

fn worker_count(requested: Option<usize>) -> usize {
    requested
        .or_else(|| std::env::var(WORKERS_ENV).ok().and_then(|v| v.parse().ok()))
        .filter(|&w| w > 0)
        .unwrap_or_else(rayon::current_num_threads)
}

fn with_pool<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count(workers))
        .build()
        .map_err(|e| Error::Config(format!("workers: {e}")))?;
    Ok(pool.install(job))
}

/// Every `(M, trial)` record, in sweep order then trial order.
pub fn run_trials(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<Vec<TrialRecord>> {
    let setup = Setup::new(cfg)?;
    if cfg.schemes.is_empty() {
        return Ok(Vec::new());
    }
    let points: Vec<MemoryPoint> = cfg.sweep.iter().map(|&mem| setup.memory_point(mem)).collect::<Result<_>>()?;
    let jobs: Vec<(usize, usize)> = (0..points.len()).flat_map(|p| (0..cfg.trials).map(move |t| (p, t))).collect();
    with_pool(workers, || jobs.par_iter().map(|&(p, t)| setup.run_trial(&points[p], t)).collect::<Result<Vec<_>>>())?
}

/// Analytic bound rows for every swept `M`.
pub fn bound_rows(cfg: &ExperimentConfig) -> Result<Vec<TableRow>> {
    let lib = cfg.library()?;
    let mut rows = Vec::new();
    let pmf = if cfg.lower_bound { Some(bounds::distinct_pmf(cfg.n, cfg.m)?) } else { None };
    for &memory in &cfg.sweep {
        if let Some(pmf) = &pmf {
            let value = bounds::lower_bound_with(pmf, memory, lib.library_entropy(), lib.file_units());
            rows.push(TableRow { memory, series: LOWER_BOUND_SERIES.into(), mean_rate: value, stderr: 0.0, trials: 0 });
        }
        if cfg.upper_bound {
            let value = bounds::upper_bound(cfg.n, cfg.m, memory, &lib)?.value;
            rows.push(TableRow { memory, series: UPPER_BOUND_SERIES.into(), mean_rate: value, stderr: 0.0, trials: 0 });
        }
    }
    Ok(rows)
}

/// Analytic bounds alone.
pub fn bounds_table(cfg: &ExperimentConfig) -> Result<RateMemoryTable> {
    cfg.validate()?;
    Ok(RateMemoryTable { rows: bound_rows(cfg)? })
}

/// Simulated means plus analytic bounds.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RateMemoryTable> {
    run_experiment_with_workers(cfg, None)
}

pub fn run_experiment_with_workers(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<RateMemoryTable> {
    let records = run_trials(cfg, workers)?;
    let mut table = aggregate(cfg, &records);
    for row in bound_rows(cfg)? {
        table.push(row);
    }
    Ok(table)
}

/// Per-`(M, scheme)` means and standard errors.
pub fn aggregate(cfg: &ExperimentConfig, records: &[TrialRecord]) -> RateMemoryTable {
    let mut table = RateMemoryTable::default();
    for &memory in &cfg.sweep {
        let at_m: Vec<&TrialRecord> = records.iter().filter(|r| r.memory == memory).collect();
        for &scheme in &cfg.schemes {
            let samples: Vec<f64> = at_m.iter().filter_map(|r| r.rate(scheme)).collect();
            if samples.is_empty() {
                continue;
            }
            let (mean, se) = mean_and_stderr(&samples);
            table.push(TableRow {
                memory,
                series: scheme.name().into(),
                mean_rate: mean,
                stderr: se,
                trials: samples.len(),
            });
        }
    }
    table
}
