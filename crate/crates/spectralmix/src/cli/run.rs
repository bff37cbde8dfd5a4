//! Experiment runners behind the four commands.
//!
//! Every command expands its configuration into `(seed, sweep point)` tasks,
//! runs them on a bounded worker pool and returns the rows in task order, so
//! the data rows depend only on the configuration and the seeds.

use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::{
    ConfigError, LearnMixtureConfig, MeanMethod, MomentsConfig, RobustMeanCliConfig, SftBenchConfig,
};
use super::report::{RunMeta, Table};
use crate::distributions::{
    dist, random_separated_means, sample_mixture, sample_noise_oblivious, DistributionSpec, MixtureModel,
};
use crate::error::Error;
use crate::learners::{
    learn_sfd_mixture_detailed, robust_mean_noise_oblivious_with, robust_mean_per_coordinate_with, RobustMeanConfig,
    SfdLearnConfig,
};
use crate::moments::{empirical_moment_with_errors, laplace_moment_tensor, laplace_samples, moment_closeness_search};
use crate::rng;
use crate::sft1d::{sft1_oracle, Sft1Config};
use crate::sftd::{boost, match_tones, sft_d_with, BoostParams, SftdConfig};
use crate::signal::{exact_signal, hashed_phase_noise, inject_noise, SignalOracle, Tone};

/// Seeds used when neither the configuration nor the command line lists any.
pub const DEFAULT_TRIALS: usize = 10;

/// Command-line overrides shared by all commands.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunOptions {
    pub seed_base: Option<u64>,
    pub trials: Option<usize>,
    /// Worker threads (`None`: one per core).
    pub jobs: Option<usize>,
}

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid configuration (exit code 2).
    Config(String),
    /// A library error; schedule and feasibility errors exit with 3.
    Run(Error),
    /// Reading the configuration or writing the report failed (exit code 1).
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Run(Error::Argument(_)) => 2,
            CliError::Run(Error::Schedule(_) | Error::Feasibility(_) | Error::DivisionFloor { .. }) => 3,
            CliError::Run(_) | CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "invalid configuration: {m}"),
            CliError::Run(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.0)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Run(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Rows and metadata of one command invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub table: Table,
    pub meta: RunMeta,
}

/// Command-line seeds take precedence: `seed_base, seed_base+1, …` for
/// `trials` seeds. Otherwise the configured list, otherwise `0..10`.
pub fn resolve_seeds(configured: &Option<Vec<u64>>, opts: &RunOptions) -> Vec<u64> {
    match (configured, opts.seed_base, opts.trials) {
        (Some(s), None, None) => s.clone(),
        (c, base, trials) => {
            let n = trials.unwrap_or_else(|| c.as_ref().map_or(DEFAULT_TRIALS, Vec::len));
            let base = base.unwrap_or(0);
            (0..n as u64).map(|i| base + i).collect()
        }
    }
}

/// Errors that invalidate every trial alike abort the run; the rest are
/// reported as failed trials.
fn is_fatal(e: &Error) -> bool {
    matches!(
        e,
        Error::Argument(_) | Error::Schedule(_) | Error::Feasibility(_) | Error::DivisionFloor { .. } | Error::Unsupported(_)
    )
}

/// Runs `f` over the tasks on a pool of `jobs` workers; returns the results
/// in task order with per-task wall times in milliseconds.
fn run_tasks<T, R, F>(tasks: &[T], jobs: Option<usize>, f: F) -> Result<Vec<(R, f64)>, CliError>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R, Error> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Io(std::io::Error::other(e)))?;
    let results: Vec<(Result<R, Error>, f64)> = pool.install(|| {
        tasks
            .par_iter()
            .map(|t| {
                let start = Instant::now();
                let r = f(t);
                (r, start.elapsed().as_secs_f64() * 1e3)
            })
            .collect()
    });
    results.into_iter().map(|(r, ms)| r.map(|r| (r, ms)).map_err(CliError::Run)).collect()
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn table<R: Serialize>(rows: &[R], header: &str) -> Result<Table, CliError> {
    Ok(Table::from_rows(rows, header)?)
}

fn random_tones<R: Rng>(g: &mut R, d: usize, weights: &[f64], band: f64, gamma: f64) -> Result<Vec<Tone>, Error> {
    let means = random_separated_means(g, d, weights.len(), band, gamma)?;
    Ok(means
        .into_iter()
        .zip(weights)
        .map(|(m, &w)| Tone::new(Complex64::from_polar(w, g.gen_range(0.0..std::f64::consts::TAU)), m))
        .collect())
}

/// Largest matched frequency and weight errors, or infinities when the
/// estimate has the wrong number of tones.
fn matched_errors(estimates: &[Tone], truth: &[Tone]) -> (f64, f64) {
    match match_tones(estimates, truth) {
        Ok(m) => (m.max_mean_error, m.max_weight_error),
        Err(_) => (f64::INFINITY, f64::INFINITY),
    }
}

pub const SFT_BENCH_HEADER: &str = "seed,k,d,T,gamma,noise_level,freq_err_max,weight_err_max,queries,success";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SftBenchRow {
    pub seed: u64,
    pub k: usize,
    pub d: usize,
    #[serde(rename = "T")]
    pub duration: f64,
    pub gamma: f64,
    pub noise_level: f64,
    pub freq_err_max: f64,
    pub weight_err_max: f64,
    pub queries: u64,
    pub success: bool,
}

impl SftBenchConfig {
    fn line_config(&self, duration: f64, seed: u64) -> Sft1Config {
        let gamma = if self.k <= 1 { f64::INFINITY } else { self.gamma };
        self.tuning.apply(Sft1Config::new(self.k, duration, self.band, gamma, self.theta, self.delta, seed))
    }

    fn sftd_config(&self, duration: f64, seed: u64) -> SftdConfig {
        let mut c = SftdConfig::new(self.k, duration, self.band, self.gamma, self.theta, seed);
        c.tuning = self.tuning;
        c
    }

    /// The precondition duration; a single tone has none, and then one
    /// window length at the band's Nyquist spacing, `2π(M-1)/B`, is used.
    fn required_duration(&self) -> f64 {
        let line = if self.d == 1 { self.line_config(1.0, 0) } else { self.sftd_config(1.0, 0).line_config(self.d, 0) };
        let need = line.required_duration();
        if need > 0.0 {
            need
        } else {
            std::f64::consts::TAU * (line.window_terms - 1) as f64 / line.band
        }
    }

    /// One trial: a seeded instance (shared across the sweep), recovered at
    /// duration `T` under noise of amplitude `g`.
    pub fn trial(&self, seed: u64, duration: f64, g: f64) -> Result<SftBenchRow, Error> {
        let mut instance = rng::rng(rng::child(seed, 0));
        let truth = random_tones(&mut instance, self.d, &self.weights(), self.band, self.gamma)?;
        let oracle = inject_noise(exact_signal(truth.clone(), duration)?, hashed_phase_noise(g, rng::child(seed, 1)), g)?;
        let run_seed = rng::child(seed, 2);
        let estimates: Result<Vec<Tone>, Error> = if self.d == 1 {
            sft1_oracle(&oracle, &self.line_config(duration, run_seed))
                .map(|o| o.tones.iter().map(|t| Tone::new(t.weight, vec![t.freq])).collect())
        } else if self.boost {
            let params =
                BoostParams { k: self.k, gamma: self.gamma, eps: self.eps, eps_w: self.eps.max(1e-3), delta: self.delta };
            boost(|s| sft_d_with(&oracle, &self.sftd_config(duration, s)).map(|o| o.tones), &params, run_seed)
                .map(|o| o.tones)
        } else {
            sft_d_with(&oracle, &self.sftd_config(duration, run_seed)).map(|o| o.tones)
        };
        let (freq_err_max, weight_err_max) = match estimates {
            Ok(est) => matched_errors(&est, &truth),
            Err(e) if is_fatal(&e) => return Err(e),
            Err(_) => (f64::INFINITY, f64::INFINITY),
        };
        Ok(SftBenchRow {
            seed,
            k: self.k,
            d: self.d,
            duration,
            gamma: self.gamma,
            noise_level: g,
            freq_err_max,
            weight_err_max,
            queries: oracle.query_count(),
            success: freq_err_max <= self.eps,
        })
    }
}

/// `sft-bench`.
pub fn sft_bench(cfg: &SftBenchConfig, opts: &RunOptions) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let seeds = resolve_seeds(&cfg.seeds, opts);
    let required = cfg.required_duration();
    let durations = if cfg.durations.is_empty() { vec![required] } else { cfg.durations.clone() };
    let tasks: Vec<(u64, f64, f64)> = seeds
        .iter()
        .flat_map(|&s| durations.iter().flat_map(move |&t| cfg.noise_levels.iter().map(move |&g| (s, t, g))))
        .collect();
    let done = run_tasks(&tasks, opts.jobs, |&(s, t, g)| cfg.trial(s, t, g))?;
    let (rows, wall): (Vec<SftBenchRow>, Vec<f64>) = done.into_iter().unzip();
    let derived = durations
        .iter()
        .map(|&t| {
            let line = if cfg.d == 1 { cfg.line_config(t, 0) } else { cfg.sftd_config(t, 0).line_config(cfg.d, 0) };
            json!({ "T": t, "theta": cfg.theta, "required_T": required, "line_query_budget": line.query_budget() })
        })
        .collect();
    let mut resolved = cfg.clone();
    resolved.durations = durations;
    resolved.seeds = Some(seeds.clone());
    Ok(Outcome { table: table(&rows, SFT_BENCH_HEADER)?, meta: RunMeta::new("sft-bench", to_value(&resolved), derived, seeds, wall) })
}

pub const LEARN_MIXTURE_HEADER: &str = "seed,k,d,n,T,theta,mean_err_max,weight_err_max,queries,success,wall_ms";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LearnMixtureRow {
    pub seed: u64,
    pub k: usize,
    pub d: usize,
    pub n: usize,
    #[serde(rename = "T")]
    pub duration: f64,
    pub theta: f64,
    pub mean_err_max: f64,
    pub weight_err_max: f64,
    pub queries: u64,
    pub success: bool,
    pub wall_ms: f64,
}

impl LearnMixtureConfig {
    pub fn learner(&self, seed: u64) -> SfdLearnConfig {
        let w_min = self.w_min.unwrap_or_else(|| self.weights().into_iter().fold(1.0, f64::min));
        let mut c = SfdLearnConfig::new(self.k, self.gamma, w_min, self.band, self.eps, self.delta, seed);
        if let Some(p) = self.params {
            c.params = p;
        }
        if let Some(t) = self.c_t {
            c.c_t = t;
        }
        if let Some(n) = self.c_n {
            c.c_n = n;
        }
        c.tuning = self.tuning;
        c
    }
}

/// `learn-mixture`.
pub fn learn_mixture(cfg: &LearnMixtureConfig, opts: &RunOptions) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let seeds = resolve_seeds(&cfg.seeds, opts);
    let base = DistributionSpec::centered(cfg.distribution, cfg.d)?;
    let schedule = cfg.learner(0).schedule(&base)?;
    let n = match cfg.n {
        Some(n) => n,
        None if schedule.samples > cfg.max_samples => {
            return Err(CliError::Run(Error::Feasibility(format!(
                "the schedule needs n = {:.4e} samples (T = {:.4}), above max_samples = {:.4e}",
                schedule.samples, schedule.duration, cfg.max_samples
            ))))
        }
        None => schedule.samples.ceil() as usize,
    };
    if n as f64 > cfg.max_samples {
        return Err(CliError::Run(Error::Feasibility(format!("n = {n} exceeds max_samples = {:.4e}", cfg.max_samples))));
    }
    let weights = cfg.weights();
    let done = run_tasks(&seeds, opts.jobs, |&seed| {
        let means = match &cfg.means {
            Some(m) => m.clone(),
            None => random_separated_means(&mut rng::rng(rng::child(seed, 0)), cfg.d, cfg.k, cfg.band, cfg.gamma)?,
        };
        let model = MixtureModel::new(cfg.distribution, weights.clone(), means.clone())?;
        let (samples, _) = sample_mixture(&model, n, rng::child(seed, 1))?;
        let truth: Vec<Tone> = means.iter().zip(&weights).map(|(m, &w)| Tone::real(w, m.clone())).collect();
        let (errs, queries) = match learn_sfd_mixture_detailed(&samples, &base, &cfg.learner(rng::child(seed, 2))) {
            Ok(out) => {
                let est: Vec<Tone> = out.components.iter().map(|c| Tone::real(c.weight, c.mean.clone())).collect();
                (matched_errors(&est, &truth), out.queries)
            }
            Err(e) if is_fatal(&e) => return Err(e),
            Err(_) => ((f64::INFINITY, f64::INFINITY), 0),
        };
        Ok((errs, queries))
    })?;
    let rows: Vec<LearnMixtureRow> = seeds
        .iter()
        .zip(&done)
        .map(|(&seed, &(((mean_err_max, weight_err_max), queries), wall_ms))| LearnMixtureRow {
            seed,
            k: cfg.k,
            d: cfg.d,
            n,
            duration: schedule.duration,
            theta: schedule.theta,
            mean_err_max,
            weight_err_max,
            queries,
            success: mean_err_max <= cfg.eps && weight_err_max <= cfg.eps,
            wall_ms,
        })
        .collect();
    let wall = done.iter().map(|d| d.1).collect();
    let mut resolved = cfg.clone();
    resolved.seeds = Some(seeds.clone());
    resolved.n = Some(n);
    Ok(Outcome {
        table: table(&rows, LEARN_MIXTURE_HEADER)?,
        meta: RunMeta::new("learn-mixture", to_value(&resolved), vec![to_value(&schedule)], seeds, wall),
    })
}

pub const ROBUST_MEAN_HEADER: &str = "seed,d,n,alpha,eps,method,T,err,success,wall_ms";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RobustMeanRow {
    pub seed: u64,
    pub d: usize,
    pub n: usize,
    pub alpha: f64,
    pub eps: f64,
    pub method: MeanMethod,
    #[serde(rename = "T")]
    pub duration: f64,
    pub err: f64,
    pub success: bool,
    pub wall_ms: f64,
}

impl RobustMeanCliConfig {
    pub fn estimator(&self, seed: u64) -> RobustMeanConfig {
        let mut c = RobustMeanConfig::new(self.band, self.eps, self.delta, seed);
        if let Some(a) = self.alpha0 {
            c.alpha0 = a;
        }
        if let Some(m) = self.c_mean {
            c.c_mean = m;
        }
        if let Some(t) = self.theta {
            c.theta = t;
        }
        c.tuning = self.tuning;
        c
    }
}

/// `robust-mean`.
pub fn robust_mean(cfg: &RobustMeanCliConfig, opts: &RunOptions) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let seeds = resolve_seeds(&cfg.seeds, opts);
    let base = DistributionSpec::centered(cfg.distribution, cfg.d)?;
    let schedule = match cfg.method {
        MeanMethod::PerCoordinate => cfg.estimator(0).coordinate_schedule(&base)?,
        MeanMethod::Oblivious => cfg.estimator(0).schedule(&base)?,
    };
    let (mu, adversary) = (cfg.mu(), cfg.adversary());
    let tasks: Vec<(u64, usize)> = seeds.iter().flat_map(|&s| cfg.sample_sizes.iter().map(move |&n| (s, n))).collect();
    let done = run_tasks(&tasks, opts.jobs, |&(seed, n)| {
        let sample = sample_noise_oblivious(&base, &mu, &adversary, cfg.alpha, n, rng::child(seed, n as u64))?;
        let est = cfg.estimator(rng::child(seed, 1));
        let out = match cfg.method {
            MeanMethod::PerCoordinate => robust_mean_per_coordinate_with(&sample.points, &base, &est),
            MeanMethod::Oblivious => robust_mean_noise_oblivious_with(&sample.points, &base, &est),
        };
        match out {
            Ok(m) => Ok(dist(&m, &mu)),
            Err(e) if is_fatal(&e) => Err(e),
            Err(_) => Ok(f64::INFINITY),
        }
    })?;
    let rows: Vec<RobustMeanRow> = tasks
        .iter()
        .zip(&done)
        .map(|(&(seed, n), &(err, wall_ms))| RobustMeanRow {
            seed,
            d: cfg.d,
            n,
            alpha: cfg.alpha,
            eps: cfg.eps,
            method: cfg.method,
            duration: schedule.duration,
            err,
            success: err <= cfg.eps,
            wall_ms,
        })
        .collect();
    let wall = done.iter().map(|d| d.1).collect();
    let mut resolved = cfg.clone();
    resolved.seeds = Some(seeds.clone());
    resolved.mu = Some(mu);
    resolved.adversary = Some(adversary);
    Ok(Outcome {
        table: table(&rows, ROBUST_MEAN_HEADER)?,
        meta: RunMeta::new("robust-mean", to_value(&resolved), vec![to_value(&schedule)], seeds, wall),
    })
}

pub const MOMENTS_HEADER: &str =
    "seed,d,k,orders,candidates,moment_dist,moment_dist_norm,parameter_distance,dominated_fraction,mc_max_z,wall_ms";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentsRow {
    pub seed: u64,
    pub d: usize,
    pub k: usize,
    pub orders: usize,
    pub candidates: usize,
    /// Per-order Frobenius distances of the best pair, `;`-separated.
    pub moment_dist: String,
    pub moment_dist_norm: f64,
    pub parameter_distance: f64,
    pub dominated_fraction: f64,
    /// Largest `|closed form - Monte Carlo| / standard error` over orders
    /// `1..=min(orders, 4)`; NaN when skipped.
    pub mc_max_z: f64,
    pub wall_ms: f64,
}

fn monte_carlo_z(cfg: &MomentsConfig, seed: u64) -> Result<f64, Error> {
    if cfg.mc_samples == 0 {
        return Ok(f64::NAN);
    }
    let mut g = rng::rng(rng::child(seed, 1));
    let mu = random_separated_means(&mut g, cfg.d, 1, 1.0, 0.0)?.remove(0);
    let samples = laplace_samples(&mu, cfg.mc_samples, rng::child(seed, 2))?;
    let mut worst: f64 = 0.0;
    for r in 1..=cfg.orders.min(4) {
        let exact = laplace_moment_tensor(&mu, r)?;
        let (emp, se) = empirical_moment_with_errors(&samples, r)?;
        for ((e, m), s) in exact.entries.iter().zip(&emp.entries).zip(&se.entries) {
            if *s > 0.0 {
                worst = worst.max((e - m).abs() / s);
            }
        }
    }
    Ok(worst)
}

/// `moments`.
pub fn moments(cfg: &MomentsConfig, opts: &RunOptions) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let seeds = resolve_seeds(&cfg.seeds, opts);
    let done = run_tasks(&seeds, opts.jobs, |&seed| {
        let search = moment_closeness_search(cfg.d, cfg.k, cfg.orders, cfg.candidates, rng::child(seed, 0))?;
        Ok((search, monte_carlo_z(cfg, seed)?))
    })?;
    let rows: Vec<MomentsRow> = seeds
        .iter()
        .zip(&done)
        .map(|(&seed, ((s, z), wall_ms))| MomentsRow {
            seed,
            d: cfg.d,
            k: cfg.k,
            orders: cfg.orders,
            candidates: cfg.candidates,
            moment_dist: s.distance.per_order.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(";"),
            moment_dist_norm: s.distance.per_order.iter().map(|x| x * x).sum::<f64>().sqrt(),
            parameter_distance: s.distance.parameter_distance,
            dominated_fraction: s.dominated_fraction,
            mc_max_z: *z,
            wall_ms: *wall_ms,
        })
        .collect();
    let wall = done.iter().map(|d| d.1).collect();
    let mut resolved = cfg.clone();
    resolved.seeds = Some(seeds.clone());
    Ok(Outcome { table: table(&rows, MOMENTS_HEADER)?, meta: RunMeta::new("moments", to_value(&resolved), vec![], seeds, wall) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::parse;

    #[test]
    fn seed_resolution() {
        let none = RunOptions::default();
        assert_eq!(resolve_seeds(&Some(vec![4, 9]), &none), vec![4, 9]);
        assert_eq!(resolve_seeds(&None, &none), (0..10).collect::<Vec<_>>());
        let flags = RunOptions { seed_base: Some(100), trials: Some(3), jobs: None };
        assert_eq!(resolve_seeds(&Some(vec![4, 9]), &flags), vec![100, 101, 102]);
        let base_only = RunOptions { seed_base: Some(7), ..none };
        assert_eq!(resolve_seeds(&Some(vec![4, 9]), &base_only), vec![7, 8]);
    }

    #[test]
    fn single_noiseless_tone_bench() {
        let cfg: SftBenchConfig = parse("k = 1\ngamma = 1.0\nband = 2.0\nseeds = [1, 2]\n").unwrap();
        let out = sft_bench(&cfg, &RunOptions::default()).unwrap();
        assert_eq!(out.table.header, SFT_BENCH_HEADER);
        assert_eq!(out.table.lines.len(), 2);
        for row in &out.table.json {
            assert!(row["freq_err_max"].as_f64().unwrap() <= 1e-6, "{row}");
            assert_eq!(row["success"], true);
        }
    }

    #[test]
    fn too_short_duration_exits_with_three() {
        let cfg: SftBenchConfig = parse("k = 3\ngamma = 0.5\nband = 2.0\ndurations = [5.0]\nseeds = [1]\n").unwrap();
        let e = sft_bench(&cfg, &RunOptions::default()).unwrap_err();
        assert_eq!(e.exit_code(), 3, "{e}");
    }

    #[test]
    fn infeasible_schedule_exits_with_three() {
        let cfg: LearnMixtureConfig = parse("k = 2\nd = 3\ngamma = 1.0\neps = 0.2\ndelta = 0.1\n").unwrap();
        assert_eq!(learn_mixture(&cfg, &RunOptions::default()).unwrap_err().exit_code(), 3);
    }

    #[test]
    fn robust_mean_rows_follow_the_sweep() {
        let cfg: RobustMeanCliConfig =
            parse("d = 1\nalpha = 0.05\neps = 0.5\ndelta = 0.2\nsample_sizes = [500, 1000]\nseeds = [3]\n").unwrap();
        let out = robust_mean(&cfg, &RunOptions::default()).unwrap();
        let ns: Vec<u64> = out.table.json.iter().map(|r| r["n"].as_u64().unwrap()).collect();
        assert_eq!(ns, vec![500, 1000]);
    }

    #[test]
    fn moments_rows() {
        let cfg: MomentsConfig = parse("d = 2\nk = 2\norders = 2\ncandidates = 200\nmc_samples = 2000\nseeds = [0]\n").unwrap();
        let out = moments(&cfg, &RunOptions::default()).unwrap();
        assert_eq!(out.table.header, MOMENTS_HEADER);
        assert!(out.table.json[0]["mc_max_z"].as_f64().unwrap() < 6.0);
    }
}
