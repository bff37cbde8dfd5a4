//! Statistical estimators built on the sparse Fourier transform.
//!
//! Dividing the empirical characteristic function of a sample by the base
//! distribution's characteristic function turns a mixture
//! `Σ_j w_j D(μ_j)` into a Fourier-sparse signal with tones `(w_j, μ_j)`.
//! The sampling error becomes bounded noise whose size is controlled by how
//! slowly `φ_D` decays, which is what the schedules below trade against
//! accuracy.
//!
//! * [`learn_sfd_mixture`] learns all components of a mixture whose base has
//!   slow Fourier decay. Queries are shifted by `v` with `‖v‖ = 2T`, and the
//!   recovered weights carry the phase `e^{i⟨v, μ_j⟩}`, which the modulus
//!   strips.
//! * [`robust_mean_noise_oblivious`] and [`robust_mean_per_coordinate`]
//!   estimate a mean when an `α`-fraction of the points was drawn around
//!   adversarial centers. Outliers only add a tone of weight at most `α`,
//!   which the transform treats as noise.

use serde::{Deserialize, Serialize};

use crate::distributions::{sfd_floor, DistributionSpec, SampleMatrix, SfdFfdParams};
use crate::error::{arg, Error, Result};
use crate::rng;
use crate::sft1d::{sft1, Sft1Config};
use crate::sftd::{boost, sft_d_with, BoostParams, Sft1Tuning, SftdConfig, DELTA0};
use crate::signal::{empirical_cf_signal, SignalOracle};

/// One learned mixture component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnedComponent {
    pub weight: f64,
    pub mean: Vec<f64>,
}

fn default_c_t() -> f64 {
    4.0
}

fn default_c_n() -> f64 {
    8.0
}

/// Parameters of the slow-Fourier-decay mixture learner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SfdLearnConfig {
    pub k: usize,
    /// Minimum mean separation `γ`.
    pub gamma: f64,
    pub w_min: f64,
    /// Bound `B` on the mean norms.
    pub band: f64,
    pub eps: f64,
    pub delta: f64,
    #[serde(default = "SfdFfdParams::laplace")]
    pub params: SfdFfdParams,
    pub seed: u64,
    #[serde(default = "default_c_t")]
    pub c_t: f64,
    #[serde(default = "default_c_n")]
    pub c_n: f64,
    #[serde(default)]
    pub tuning: Sft1Tuning,
}

/// Quantities the learner derives from its configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SfdSchedule {
    /// Query radius `T`.
    pub duration: f64,
    /// Shift `v` with `‖v‖ = 2T`.
    pub shift: Vec<f64>,
    /// `θ = ε²/100`.
    pub theta: f64,
    /// Required sample count `n` (a float: it can exceed any machine integer).
    pub samples: f64,
    /// Uniform sampling deviation `s = √(ln(N/δ)/n)` over the `N` queries.
    pub slack: f64,
    /// `inf_{‖u‖ ≤ 3T} |φ_D(u)|`.
    pub floor: f64,
    pub boost_rounds: usize,
}

impl SfdLearnConfig {
    pub fn new(k: usize, gamma: f64, w_min: f64, band: f64, eps: f64, delta: f64, seed: u64) -> Self {
        SfdLearnConfig {
            k,
            gamma,
            w_min,
            band,
            eps,
            delta,
            params: SfdFfdParams::laplace(),
            seed,
            c_t: default_c_t(),
            c_n: default_c_n(),
            tuning: Sft1Tuning::default(),
        }
    }

    /// `θ = ε²/(100 Σ_j w_j²)` with `Σ_j w_j² ≤ 1`.
    pub fn theta(&self) -> f64 {
        self.eps * self.eps / 100.0
    }

    fn separation(&self) -> f64 {
        if self.k <= 1 {
            f64::INFINITY
        } else {
            self.gamma
        }
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return arg("k must be positive");
        }
        if !(self.eps > 0.0) || !(self.delta > 0.0 && self.delta < 1.0) {
            return arg("eps must be positive and delta in (0, 1)");
        }
        if !(self.w_min > 0.0 && self.w_min <= 1.0) {
            return arg("w_min must lie in (0, 1]");
        }
        if self.eps > self.w_min / 2.0 {
            return arg(format!("eps = {} exceeds w_min/2 = {}; weaker components are unidentifiable", self.eps, self.w_min / 2.0));
        }
        if !(self.band > 0.0) || !(self.gamma > 0.0) || !(self.c_t > 0.0) || !(self.c_n > 0.0) {
            return arg("band, gamma, c_t and c_n must be positive");
        }
        self.params.validate()?;
        if self.params.c2p <= self.params.c2 {
            return arg("the fast-decay exponent c2p must exceed the slow-decay exponent c2");
        }
        Ok(())
    }

    fn sftd_config(&self, duration: f64, seed: u64) -> SftdConfig {
        let mut cfg = SftdConfig::new(self.k, duration, self.band, self.separation(), self.theta(), seed);
        cfg.tuning = self.tuning;
        cfg
    }

    /// `T = C_T·max{(d^{c1-c1'}/ε)^{1/(c2'-c2)}, d³B/(γ w_min), d^{5/2} ln(k/θ)/γ}`,
    /// raised to the transform's own precondition when that binds, and
    /// `n = C_n·d^{2c1}·T^{2c2}·(ln(k/δ) + ln ln(B/(γ w_min ε)))/ε²`.
    pub fn schedule(&self, base: &DistributionSpec) -> Result<SfdSchedule> {
        self.validate()?;
        let d = base.dim;
        let df = d as f64;
        let p = &self.params;
        let gamma = self.separation();
        let theta = self.theta();
        let term1 = if p.c2p.is_infinite() { 1.0 } else { (df.powf(p.c1 - p.c1p) / self.eps).powf(1.0 / (p.c2p - p.c2)) };
        let term2 = df.powi(3) * self.band / (gamma * self.w_min);
        let term3 = df.powf(2.5) * (self.k as f64 / theta).ln() / gamma;
        let raw = self.c_t * term1.max(term2).max(term3);
        let duration = raw.max(self.sftd_config(raw, 0).required_duration(d));
        let ratio = self.band / (gamma * self.w_min * self.eps);
        let loglog = if ratio > std::f64::consts::E { ratio.ln().ln() } else { 0.0 };
        let samples = self.c_n * df.powf(2.0 * p.c1) * duration.powf(2.0 * p.c2) * ((self.k as f64 / self.delta).ln() + loglog)
            / (self.eps * self.eps);
        let floor = sfd_floor(base, p, 3.0 * duration)?;
        let boost_rounds = self.boost_params().rounds();
        let line_queries = self.sftd_config(duration, 0).line_config(d, 0).query_budget() as f64;
        let total_queries = boost_rounds as f64 * (df + 1.0) * line_queries;
        let slack = ((total_queries / self.delta).ln() / samples).sqrt();
        let mut shift = vec![0.0; d];
        shift[0] = 2.0 * duration;
        Ok(SfdSchedule { duration, shift, theta, samples, slack, floor, boost_rounds })
    }

    fn boost_params(&self) -> BoostParams {
        BoostParams { k: self.k, gamma: self.separation(), eps: self.eps, eps_w: self.eps, delta: self.delta }
    }
}

/// Output of [`learn_sfd_mixture_detailed`].
#[derive(Debug, Clone, PartialEq)]
pub struct SfdLearnOutput {
    pub components: Vec<LearnedComponent>,
    pub schedule: SfdSchedule,
    /// Oracle queries over all boosting rounds.
    pub queries: u64,
}

/// Learns the weights and means of `Σ_j w_j D(μ_j)` from samples.
/// Requires at least the schedule's sample count.
pub fn learn_sfd_mixture(
    samples: &SampleMatrix,
    base: &DistributionSpec,
    cfg: &SfdLearnConfig,
) -> Result<Vec<LearnedComponent>> {
    learn_sfd_mixture_detailed(samples, base, cfg).map(|o| o.components)
}

/// [`learn_sfd_mixture`] together with its schedule and query count.
pub fn learn_sfd_mixture_detailed(
    samples: &SampleMatrix,
    base: &DistributionSpec,
    cfg: &SfdLearnConfig,
) -> Result<SfdLearnOutput> {
    if samples.d != base.dim {
        return arg("samples and base distribution differ in dimension");
    }
    let schedule = cfg.schedule(base)?;
    if (samples.n as f64) < schedule.samples {
        return Err(Error::Schedule(format!(
            "{} samples supplied, the schedule needs {:.4e} (T = {:.4})",
            samples.n, schedule.samples, schedule.duration
        )));
    }
    let signal =
        empirical_cf_signal(samples.clone(), base, schedule.shift.clone(), schedule.floor * (1.0 - 1e-12), schedule.duration)?;
    let runner = |seed: u64| sft_d_with(&signal, &cfg.sftd_config(schedule.duration, seed)).map(|o| o.tones);
    let out = boost(runner, &cfg.boost_params(), cfg.seed)?;
    let components = out.tones.into_iter().map(|t| LearnedComponent { weight: t.weight.norm(), mean: t.freq }).collect();
    Ok(SfdLearnOutput { components, schedule, queries: signal.query_count() })
}

fn default_alpha0() -> f64 {
    0.05
}

fn default_c_mean() -> f64 {
    1.0
}

fn default_mean_theta() -> f64 {
    0.05
}

/// Parameters of the noise-oblivious mean estimators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobustMeanConfig {
    /// Bound `B` on `‖μ - rough center‖`.
    pub band: f64,
    pub eps: f64,
    pub delta: f64,
    pub seed: u64,
    /// Largest contamination the noise budget is sized for.
    #[serde(default = "default_alpha0")]
    pub alpha0: f64,
    /// Constant in `T = C·d³B/ε`.
    #[serde(default = "default_c_mean")]
    pub c_mean: f64,
    /// Leakage parameter of the one-dimensional runs (a single tone has no
    /// leakage partner, so this only sizes the window).
    #[serde(default = "default_mean_theta")]
    pub theta: f64,
    #[serde(default)]
    pub tuning: Sft1Tuning,
}

/// Derived quantities of a mean estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustMeanSchedule {
    pub duration: f64,
    /// `1/R(T) = inf_{‖t‖ ≤ T} |φ_D(t)|`.
    pub floor: f64,
    /// `n = R(T)²·ln(2N/δ)/η²` so that sampling noise stays below `η`.
    pub samples: f64,
    /// Repetitions combined by boosting or by the median.
    pub rounds: usize,
}

impl RobustMeanConfig {
    pub fn new(band: f64, eps: f64, delta: f64, seed: u64) -> Self {
        RobustMeanConfig {
            band,
            eps,
            delta,
            seed,
            alpha0: default_alpha0(),
            c_mean: default_c_mean(),
            theta: default_mean_theta(),
            tuning: Sft1Tuning::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.band > 0.0) || !(self.eps > 0.0) || !(self.c_mean > 0.0) {
            return arg("band, eps and c_mean must be positive");
        }
        if !(self.delta > 0.0 && self.delta < 1.0) || !(self.theta > 0.0 && self.theta < 1.0) {
            return arg("delta and theta must lie in (0, 1)");
        }
        if !(self.alpha0 >= 0.0) || self.noise_allowance() <= 0.0 {
            return arg(format!("alpha0 = {} leaves no room for sampling noise", self.alpha0));
        }
        Ok(())
    }

    /// Sampling noise allowed once contamination (`≤ α₀`) and leakage are
    /// paid for, keeping the total below a quarter of the tone `1 - α₀`.
    pub fn noise_allowance(&self) -> f64 {
        (1.0 - self.alpha0) / 4.0 - self.alpha0 - self.theta
    }

    fn schedule_for(&self, base: &DistributionSpec, duration: f64, rounds: usize, queries: f64) -> RobustMeanSchedule {
        let floor = base.kind.radial_cf(base.scale, duration);
        let eta = self.noise_allowance();
        let samples = (2.0 * queries / self.delta).ln() / (floor * floor * eta * eta);
        RobustMeanSchedule { duration, floor, samples, rounds }
    }

    /// `d`-dimensional mode: `T = C·d³B/ε`, boosted over `⌈112.5 ln(1/δ)⌉` runs.
    pub fn schedule(&self, base: &DistributionSpec) -> Result<RobustMeanSchedule> {
        self.validate()?;
        let d = base.dim as f64;
        let duration = self.c_mean * d.powi(3) * self.band / self.eps;
        let rounds = self.boost_params().rounds();
        let line = self.sftd_config(duration, 0).line_config(base.dim, 0);
        Ok(self.schedule_for(base, duration, rounds, rounds as f64 * (d + 1.0) * line.query_budget() as f64))
    }

    /// Per-coordinate mode: accuracy `ε/√d` and confidence `δ/d` per
    /// coordinate, each the median of `⌈18 ln(d/δ)⌉` one-dimensional runs.
    pub fn coordinate_schedule(&self, base: &DistributionSpec) -> Result<RobustMeanSchedule> {
        self.validate()?;
        let d = base.dim as f64;
        let duration = self.c_mean * self.band / (self.eps / d.sqrt());
        let rounds = (18.0 * (d / self.delta).ln()).ceil().max(1.0) as usize;
        let line = self.line_config(duration, 0);
        Ok(self.schedule_for(&marginal(base), duration, rounds, d * rounds as f64 * line.query_budget() as f64))
    }

    fn boost_params(&self) -> BoostParams {
        BoostParams { k: 1, gamma: f64::INFINITY, eps: self.eps, eps_w: 1.0, delta: self.delta }
    }

    fn sftd_config(&self, duration: f64, seed: u64) -> SftdConfig {
        let mut cfg = SftdConfig::new(1, duration, self.band, f64::INFINITY, self.theta, seed);
        cfg.tuning = self.tuning;
        cfg
    }

    /// One-dimensional run on `[-T, T]`, seen as `[0, 2T]`. Each run only
    /// needs constant success probability; the median amplifies it.
    fn line_config(&self, duration: f64, seed: u64) -> Sft1Config {
        let cfg = Sft1Config::new(1, 2.0 * duration, self.band, f64::INFINITY, self.theta, DELTA0, seed);
        self.tuning.apply(cfg)
    }
}

fn marginal(base: &DistributionSpec) -> DistributionSpec {
    DistributionSpec { kind: base.kind, dim: 1, mean: vec![0.0], scale: base.scale }
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n == 0 {
        0.0
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Coordinate-wise median; a coarse center that tolerates any contamination
/// below one half.
pub fn rough_center(samples: &SampleMatrix) -> Vec<f64> {
    (0..samples.d).map(|j| median(&mut samples.column(j))).collect()
}

fn check_base(samples: &SampleMatrix, base: &DistributionSpec) -> Result<()> {
    if samples.d != base.dim {
        return arg("samples and base distribution differ in dimension");
    }
    if samples.n == 0 {
        return arg("at least one sample is required");
    }
    Ok(())
}

/// Mean of the inlier distribution `D(μ)` from noise-oblivious contaminated
/// points, with default constants.
pub fn robust_mean_noise_oblivious(
    points: &SampleMatrix,
    base: &DistributionSpec,
    band: f64,
    eps: f64,
    delta: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    robust_mean_noise_oblivious_with(points, base, &RobustMeanConfig::new(band, eps, delta, seed))
}

/// `d`-dimensional estimator: rough centering, then a boosted one-sparse
/// transform of the empirical characteristic-function ratio on the ball of
/// radius `T = C·d³B/ε`. All boosting rounds share the sample.
pub fn robust_mean_noise_oblivious_with(
    points: &SampleMatrix,
    base: &DistributionSpec,
    cfg: &RobustMeanConfig,
) -> Result<Vec<f64>> {
    check_base(points, base)?;
    let sched = cfg.schedule(base)?;
    let center = rough_center(points);
    let centered = points.centered_at(&center);
    let base0 = DistributionSpec { mean: vec![0.0; base.dim], ..base.clone() };
    let signal = empirical_cf_signal(centered, &base0, vec![0.0; base.dim], sched.floor * (1.0 - 1e-12), sched.duration)?;
    let runner = |seed: u64| sft_d_with(&signal, &cfg.sftd_config(sched.duration, seed)).map(|o| o.tones);
    let out = boost(runner, &cfg.boost_params(), cfg.seed)?;
    Ok(out.tones[0].freq.iter().zip(&center).map(|(m, c)| m + c).collect())
}

/// Per-coordinate estimator with default constants (`B = 1` after centering).
pub fn robust_mean_per_coordinate(
    points: &SampleMatrix,
    base: &DistributionSpec,
    eps: f64,
    delta: f64,
) -> Result<Vec<f64>> {
    robust_mean_per_coordinate_with(points, base, &RobustMeanConfig::new(1.0, eps, delta, 0))
}

/// Estimates each coordinate to `ε/√d` with a one-dimensional one-sparse
/// transform of that coordinate's empirical characteristic-function ratio,
/// taking the median over repetitions. A coordinate where no run finds a
/// confident tone keeps its rough center.
pub fn robust_mean_per_coordinate_with(
    points: &SampleMatrix,
    base: &DistributionSpec,
    cfg: &RobustMeanConfig,
) -> Result<Vec<f64>> {
    check_base(points, base)?;
    let sched = cfg.coordinate_schedule(base)?;
    let base1 = marginal(base);
    let center = rough_center(points);
    let t = sched.duration;
    let mut out = Vec::with_capacity(points.d);
    for (j, c) in center.iter().enumerate() {
        let column: Vec<f64> = points.column(j).into_iter().map(|x| x - c).collect();
        let samples = SampleMatrix::new(points.n, 1, column)?;
        let signal = empirical_cf_signal(samples, &base1, vec![0.0], sched.floor * (1.0 - 1e-12), t)?;
        let line = signal.line(&[1.0], -t, 2.0 * t)?;
        let coord_seed = rng::child(cfg.seed, j as u64);
        let mut estimates = Vec::with_capacity(sched.rounds);
        for r in 0..sched.rounds {
            let run = sft1(line.as_ref(), &cfg.line_config(t, rng::child(coord_seed, r as u64)))?;
            let tone = run.tones[0];
            if tone.weight.norm() > 0.0 {
                estimates.push(tone.freq);
            }
        }
        out.push(c + median(&mut estimates));
    }
    Ok(out)
}
