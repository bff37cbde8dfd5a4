//! Experiment configuration files (TOML), one schema per command.
//!
//! Every schema rejects unknown fields and is validated before any
//! computation; messages name the offending field.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::distributions::{DistributionKind, SfdFfdParams};
use crate::sftd::Sft1Tuning;

/// Version of the report layout; bumped whenever a column changes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IoConfig {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

/// A configuration failure, reported with the field it concerns.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn bad<T>(field: &str, msg: impl std::fmt::Display) -> Result<T, ConfigError> {
    Err(ConfigError(format!("field `{field}`: {msg}")))
}

fn positive(field: &str, v: f64) -> Result<(), ConfigError> {
    if !(v > 0.0 && v.is_finite()) {
        return bad(field, format!("must be positive and finite, got {v}"));
    }
    Ok(())
}

fn probability(field: &str, v: f64) -> Result<(), ConfigError> {
    if !(v > 0.0 && v < 1.0) {
        return bad(field, format!("must lie in (0, 1), got {v}"));
    }
    Ok(())
}

fn check_weights(weights: &Option<Vec<f64>>, k: usize) -> Result<(), ConfigError> {
    if let Some(w) = weights {
        if w.len() != k {
            return bad("weights", format!("expected {k} entries, got {}", w.len()));
        }
        if w.iter().any(|x| !(*x > 0.0)) || (w.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return bad("weights", "entries must be positive and sum to 1");
        }
    }
    Ok(())
}

fn check_seeds(seeds: &Option<Vec<u64>>) -> Result<(), ConfigError> {
    if seeds.as_ref().is_some_and(|s| s.is_empty()) {
        return bad("seeds", "must not be empty");
    }
    Ok(())
}

fn check_tuning(tuning: &Sft1Tuning) -> Result<(), ConfigError> {
    for (name, v) in [("tuning.stages", tuning.stages), ("tuning.rounds", tuning.rounds), ("tuning.subregions", tuning.subregions)] {
        if v == Some(0) {
            return bad(name, "must be positive");
        }
    }
    Ok(())
}

fn uniform(k: usize) -> Vec<f64> {
    vec![1.0 / k as f64; k]
}

fn one() -> usize {
    1
}

fn unit() -> f64 {
    1.0
}

fn no_noise() -> Vec<f64> {
    vec![0.0]
}

fn bench_theta() -> f64 {
    1e-2
}

fn bench_delta() -> f64 {
    0.1
}

fn bench_eps() -> f64 {
    1e-4
}

fn laplace() -> DistributionKind {
    DistributionKind::Laplace
}

fn max_samples() -> f64 {
    2e7
}

/// `sft-bench`: random separated tones, optional bounded noise, recovery
/// errors over a sweep of durations and noise amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SftBenchConfig {
    pub k: usize,
    #[serde(default = "one")]
    pub d: usize,
    /// Minimum separation of the generated frequencies.
    pub gamma: f64,
    /// Frequencies lie in `[-band, band]` (the `band`-ball when `d > 1`).
    #[serde(default = "unit")]
    pub band: f64,
    /// Tone magnitudes (default uniform); phases are random.
    #[serde(default)]
    pub weights: Option<Vec<f64>>,
    /// Sweep axis; empty means the shortest admissible duration (for a
    /// single tone, `2π(M-1)/B` with `M` window taps).
    #[serde(default)]
    pub durations: Vec<f64>,
    /// Sweep axis: amplitude of the injected noise `|g|`.
    #[serde(default = "no_noise")]
    pub noise_levels: Vec<f64>,
    #[serde(default = "bench_theta")]
    pub theta: f64,
    /// Failure probability of the one-dimensional runs, and of boosting.
    #[serde(default = "bench_delta")]
    pub delta: f64,
    /// A trial succeeds when the largest matched frequency error is at most this.
    #[serde(default = "bench_eps")]
    pub eps: f64,
    /// Amplify `d`-dimensional runs by boosting.
    #[serde(default)]
    pub boost: bool,
    #[serde(default)]
    pub seeds: Option<Vec<u64>>,
    #[serde(default)]
    pub tuning: Sft1Tuning,
    #[serde(default)]
    pub io: IoConfig,
}

impl SftBenchConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.k == 0 {
            return bad("k", "must be at least 1");
        }
        if self.d == 0 {
            return bad("d", "must be at least 1");
        }
        positive("gamma", self.gamma)?;
        positive("band", self.band)?;
        check_weights(&self.weights, self.k)?;
        if let Some(t) = self.durations.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return bad("durations", format!("entries must be positive, got {t}"));
        }
        if self.noise_levels.is_empty() || self.noise_levels.iter().any(|g| !(*g >= 0.0 && g.is_finite())) {
            return bad("noise_levels", "must be a non-empty list of non-negative amplitudes");
        }
        probability("theta", self.theta)?;
        probability("delta", self.delta)?;
        positive("eps", self.eps)?;
        check_seeds(&self.seeds)?;
        check_tuning(&self.tuning)
    }

    pub fn weights(&self) -> Vec<f64> {
        self.weights.clone().unwrap_or_else(|| uniform(self.k))
    }
}

/// `learn-mixture`: samples from a mixture of translated base distributions
/// and learns it at the schedule's sample size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnMixtureConfig {
    #[serde(default = "laplace")]
    pub distribution: DistributionKind,
    pub k: usize,
    pub d: usize,
    /// Minimum mean separation (assumed by the learner; also used to draw
    /// random means).
    pub gamma: f64,
    #[serde(default)]
    pub weights: Option<Vec<f64>>,
    /// Means lie in the `band`-ball.
    #[serde(default = "unit")]
    pub band: f64,
    pub eps: f64,
    pub delta: f64,
    /// Smallest weight assumed by the learner (default: the smallest weight).
    #[serde(default)]
    pub w_min: Option<f64>,
    /// Fixed means (default: random, `gamma`-separated, per seed).
    #[serde(default)]
    pub means: Option<Vec<Vec<f64>>>,
    /// Sample count (default: the schedule's).
    #[serde(default)]
    pub n: Option<usize>,
    /// Runs whose sample count exceeds this are infeasible.
    #[serde(default = "max_samples")]
    pub max_samples: f64,
    #[serde(default)]
    pub c_t: Option<f64>,
    #[serde(default)]
    pub c_n: Option<f64>,
    #[serde(default)]
    pub params: Option<SfdFfdParams>,
    #[serde(default)]
    pub seeds: Option<Vec<u64>>,
    #[serde(default)]
    pub tuning: Sft1Tuning,
    #[serde(default)]
    pub io: IoConfig,
}

impl LearnMixtureConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.k == 0 {
            return bad("k", "must be at least 1");
        }
        if self.d == 0 {
            return bad("d", "must be at least 1");
        }
        positive("gamma", self.gamma)?;
        positive("band", self.band)?;
        positive("eps", self.eps)?;
        probability("delta", self.delta)?;
        check_weights(&self.weights, self.k)?;
        if let Some(w) = self.w_min {
            if !(w > 0.0 && w <= 1.0) {
                return bad("w_min", format!("must lie in (0, 1], got {w}"));
            }
        }
        if let Some(m) = &self.means {
            if m.len() != self.k || m.iter().any(|v| v.len() != self.d) {
                return bad("means", format!("expected {} vectors of length {}", self.k, self.d));
            }
        }
        if self.n == Some(0) {
            return bad("n", "must be positive");
        }
        positive("max_samples", self.max_samples)?;
        if let Some(c) = self.c_t {
            positive("c_t", c)?;
        }
        if let Some(c) = self.c_n {
            positive("c_n", c)?;
        }
        if let Some(p) = &self.params {
            p.validate().or_else(|e| bad("params", e))?;
        }
        check_seeds(&self.seeds)?;
        check_tuning(&self.tuning)
    }

    pub fn weights(&self) -> Vec<f64> {
        self.weights.clone().unwrap_or_else(|| uniform(self.k))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeanMethod {
    #[default]
    PerCoordinate,
    Oblivious,
}

/// `robust-mean`: noise-oblivious contamination and mean estimation over a
/// sweep of sample sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobustMeanCliConfig {
    #[serde(default = "laplace")]
    pub distribution: DistributionKind,
    pub d: usize,
    pub alpha: f64,
    pub eps: f64,
    pub delta: f64,
    /// Bound on the distance between the mean and the rough center.
    #[serde(default = "unit")]
    pub band: f64,
    /// True mean (default: the origin).
    #[serde(default)]
    pub mu: Option<Vec<f64>>,
    /// Adversarial centers (default: one at `30·e₁`).
    #[serde(default)]
    pub adversary: Option<Vec<Vec<f64>>>,
    /// Sweep axis.
    pub sample_sizes: Vec<usize>,
    #[serde(default)]
    pub method: MeanMethod,
    #[serde(default)]
    pub alpha0: Option<f64>,
    #[serde(default)]
    pub c_mean: Option<f64>,
    #[serde(default)]
    pub theta: Option<f64>,
    #[serde(default)]
    pub seeds: Option<Vec<u64>>,
    #[serde(default)]
    pub tuning: Sft1Tuning,
    #[serde(default)]
    pub io: IoConfig,
}

impl RobustMeanCliConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.d == 0 {
            return bad("d", "must be at least 1");
        }
        if !(0.0..0.5).contains(&self.alpha) {
            return bad("alpha", format!("must lie in [0, 0.5), got {}", self.alpha));
        }
        positive("eps", self.eps)?;
        probability("delta", self.delta)?;
        positive("band", self.band)?;
        if self.mu.as_ref().is_some_and(|m| m.len() != self.d) {
            return bad("mu", format!("expected length {}", self.d));
        }
        if let Some(a) = &self.adversary {
            if a.is_empty() || a.iter().any(|z| z.len() != self.d) {
                return bad("adversary", format!("expected a non-empty list of length-{} vectors", self.d));
            }
        }
        if self.sample_sizes.is_empty() || self.sample_sizes.contains(&0) {
            return bad("sample_sizes", "must be a non-empty list of positive counts");
        }
        if let Some(a) = self.alpha0 {
            if !(a >= 0.0) {
                return bad("alpha0", "must be non-negative");
            }
        }
        if let Some(c) = self.c_mean {
            positive("c_mean", c)?;
        }
        if let Some(t) = self.theta {
            probability("theta", t)?;
        }
        check_seeds(&self.seeds)?;
        check_tuning(&self.tuning)
    }

    pub fn mu(&self) -> Vec<f64> {
        self.mu.clone().unwrap_or_else(|| vec![0.0; self.d])
    }

    pub fn adversary(&self) -> Vec<Vec<f64>> {
        self.adversary.clone().unwrap_or_else(|| {
            let mut z = vec![0.0; self.d];
            z[0] = 30.0;
            vec![z]
        })
    }
}

fn candidates() -> usize {
    10_000
}

/// `moments`: random search for mixtures with close moments but distant
/// means, plus an optional Monte-Carlo check of the closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentsConfig {
    pub d: usize,
    pub k: usize,
    /// Highest moment order compared.
    pub orders: usize,
    #[serde(default = "candidates")]
    pub candidates: usize,
    /// Monte-Carlo sample size for checking the closed form (0 skips it).
    #[serde(default)]
    pub mc_samples: usize,
    #[serde(default)]
    pub seeds: Option<Vec<u64>>,
    #[serde(default)]
    pub io: IoConfig,
}

impl MomentsConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(1..=crate::moments::MAX_DIM).contains(&self.d) {
            return bad("d", format!("must lie in 1..={}", crate::moments::MAX_DIM));
        }
        if self.k == 0 {
            return bad("k", "must be at least 1");
        }
        if !(1..=crate::moments::MAX_ORDER).contains(&self.orders) {
            return bad("orders", format!("must lie in 1..={}", crate::moments::MAX_ORDER));
        }
        if self.candidates < 2 {
            return bad("candidates", "must be at least 2");
        }
        check_seeds(&self.seeds)
    }
}

/// Parses a TOML document into a schema, keeping the parser's line and
/// column diagnostics.
pub fn parse<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, ConfigError> {
    toml::from_str(text).map_err(|e| ConfigError(e.to_string()))
}
