//! `d`-dimensional sparse Fourier transform by correlated random projections.
//!
//! A random unit direction `r` and `d` perturbed directions
//! `r_ℓ = r + ε₁ b_ℓ` are drawn. On each line the signal is one-dimensional
//! with frequencies `⟨μ_j, r_ℓ⟩`. Because the perturbation is small compared
//! with the projected separation, sorting each line's frequencies gives the
//! same order of tones on every line, and the means follow from the
//! telescoping identity `μ = Σ_ℓ b_ℓ (⟨μ, r_ℓ⟩ - ⟨μ, r⟩)/ε₁`.

pub mod boost;
pub mod matching;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::distributions::{dot, norm};
use crate::error::{arg, Result};
use crate::rng;
use crate::sft1d::{sft1, Estimate1, Sft1Config};
use crate::signal::{remap_weight, SignalOracle, Tone};

pub use boost::{boost, BoostParams};
pub use matching::{assign, match_tones, Matching};

/// Fixed success slack of a single run.
pub const DELTA0: f64 = 1.0 / 3.0;

/// Choice of the orthonormal basis `b_1..b_d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    /// Coordinate vectors.
    #[default]
    Standard,
    /// Haar-random orthonormal basis.
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionFrame {
    pub r: Vec<f64>,
    /// `basis[ℓ-1] = b_ℓ` for `ℓ = 1..d`.
    pub basis: Vec<Vec<f64>>,
    pub eps1: f64,
}

impl ProjectionFrame {
    /// `ε₁ = min(δ₀γ/(8Bd^{5/2}), 1)`; infinite `γ` (a single tone) gives 1.
    pub fn perturbation(d: usize, band: f64, gamma: f64) -> f64 {
        (DELTA0 * gamma / (8.0 * band * (d as f64).powf(2.5))).min(1.0)
    }

    pub fn new<R: Rng + ?Sized>(d: usize, eps1: f64, basis: BasisKind, rng: &mut R) -> Result<Self> {
        if d == 0 {
            return arg("dimension must be positive");
        }
        if !(eps1 > 0.0 && eps1 <= 1.0) {
            return arg(format!("eps1 must lie in (0, 1], got {eps1}"));
        }
        let r = random_unit(d, rng);
        let basis = match basis {
            BasisKind::Standard => (0..d).map(|i| (0..d).map(|j| (i == j) as u8 as f64).collect()).collect(),
            BasisKind::Random => {
                let g = DMatrix::<f64>::from_fn(d, d, |_, _| rng.sample(StandardNormal));
                let q = g.qr().q();
                (0..d).map(|i| q.column(i).iter().cloned().collect()).collect()
            }
        };
        Ok(ProjectionFrame { r, basis, eps1 })
    }

    pub fn dim(&self) -> usize {
        self.r.len()
    }

    /// `r_ℓ` for `ℓ = 0..=d` (`r_0 = r`).
    pub fn direction(&self, l: usize) -> Vec<f64> {
        if l == 0 {
            return self.r.clone();
        }
        self.r.iter().zip(&self.basis[l - 1]).map(|(r, b)| r + self.eps1 * b).collect()
    }
}

fn random_unit<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let n = norm(&v);
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// `μ̂_j = Σ_ℓ b_ℓ (proj[ℓ][j] - proj[0][j]) / ε₁`.
pub fn solve_means_from_projections(proj: &[Vec<f64>], frame: &ProjectionFrame) -> Result<Vec<Vec<f64>>> {
    let d = frame.dim();
    if proj.len() != d + 1 {
        return arg(format!("expected {} projection rows, got {}", d + 1, proj.len()));
    }
    let k = proj[0].len();
    if proj.iter().any(|row| row.len() != k) {
        return arg("projection rows must have equal length");
    }
    Ok((0..k)
        .map(|j| {
            let mut mu = vec![0.0; d];
            for (l, b) in frame.basis.iter().enumerate() {
                let c = (proj[l + 1][j] - proj[0][j]) / frame.eps1;
                mu.iter_mut().zip(b).for_each(|(m, bi)| *m += c * bi);
            }
            mu
        })
        .collect())
}

/// Whether sorting the means by `⟨μ_j, r_ℓ⟩` gives the same order for every
/// `ℓ`. Projections closer than `1e-12·B` count as ties, which break order.
pub fn order_preservation_check(frame: &ProjectionFrame, means: &[Vec<f64>], band: f64) -> bool {
    if means.len() <= 1 {
        return true;
    }
    let tie = 1e-12 * band.abs().max(1.0);
    let order_for = |dir: &[f64]| -> Option<Vec<usize>> {
        let p: Vec<f64> = means.iter().map(|m| dot(m, dir)).collect();
        let mut idx: Vec<usize> = (0..means.len()).collect();
        idx.sort_by(|&a, &b| p[b].total_cmp(&p[a]));
        idx.windows(2).all(|w| p[w[0]] - p[w[1]] > tie).then_some(idx)
    };
    let Some(base) = order_for(&frame.r) else { return false };
    (1..=frame.dim()).all(|l| order_for(&frame.direction(l)).as_ref() == Some(&base))
}

/// Optional overrides of the one-dimensional defaults, for throughput
/// experiments.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sft1Tuning {
    pub stages: Option<usize>,
    pub rounds: Option<usize>,
    pub subregions: Option<usize>,
    pub min_support: Option<usize>,
    pub polish_samples: Option<usize>,
}

impl Sft1Tuning {
    pub fn apply(&self, mut cfg: Sft1Config) -> Sft1Config {
        if let Some(s) = self.stages {
            cfg = cfg.with_stages(s);
        }
        if let Some(r) = self.rounds {
            cfg.rounds = r;
        }
        if let Some(t) = self.subregions {
            cfg.subregions = t;
        }
        if let Some(m) = self.min_support {
            cfg.min_support = m;
        }
        if let Some(p) = self.polish_samples {
            cfg.polish_samples = p;
        }
        cfg
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SftdConfig {
    pub k: usize,
    pub duration: f64,
    pub band: f64,
    pub gamma: f64,
    pub theta: f64,
    pub seed: u64,
    #[serde(default)]
    pub basis: BasisKind,
    #[serde(default)]
    pub tuning: Sft1Tuning,
}

impl SftdConfig {
    pub fn new(k: usize, duration: f64, band: f64, gamma: f64, theta: f64, seed: u64) -> Self {
        SftdConfig { k, duration, band, gamma, theta, seed, basis: BasisKind::Standard, tuning: Sft1Tuning::default() }
    }

    fn separation(&self) -> f64 {
        if self.k <= 1 {
            f64::INFINITY
        } else {
            self.gamma
        }
    }

    /// Configuration of the one-dimensional run on direction `ℓ`: band `2B`,
    /// separation `γ₁ = δ₀γ/(4d^{5/2})`, failure budget `δ₀/(2(d+1))`.
    pub fn line_config(&self, d: usize, l: usize) -> Sft1Config {
        let gamma1 = DELTA0 * self.separation() / (4.0 * (d as f64).powf(2.5));
        let delta = DELTA0 / (2.0 * (d as f64 + 1.0));
        let cfg = Sft1Config::new(
            self.k,
            self.duration,
            2.0 * self.band,
            gamma1,
            self.theta,
            delta,
            rng::child(self.seed, l as u64 + 1),
        );
        self.tuning.apply(cfg)
    }

    /// Shortest admissible duration, `C·d^{5/2}·ln(k/θ)/γ`.
    pub fn required_duration(&self, d: usize) -> f64 {
        self.line_config(d, 0).required_duration()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SftdOutput {
    /// Confidently recovered tones (at most `k`), in decreasing order of
    /// their frequency along `r`.
    pub tones: Vec<Tone>,
    pub frame: ProjectionFrame,
    /// Aligned projected frequencies, `(d+1)` rows.
    pub projections: Vec<Vec<f64>>,
    pub queries: u64,
}

fn confident_sorted(tones: &[Estimate1]) -> Vec<Estimate1> {
    let mut v: Vec<Estimate1> = tones.iter().filter(|t| t.weight.norm() > 0.0).cloned().collect();
    v.sort_by(|a, b| b.freq.total_cmp(&a.freq).then(b.weight.norm().total_cmp(&a.weight.norm())));
    v
}

/// Recovers tones of a `d`-dimensional oracle with the default constants.
pub fn sft_d(
    oracle: &dyn SignalOracle,
    k: usize,
    duration: f64,
    band: f64,
    gamma: f64,
    theta: f64,
    seed: u64,
) -> Result<SftdOutput> {
    sft_d_with(oracle, &SftdConfig::new(k, duration, band, gamma, theta, seed))
}

pub fn sft_d_with(oracle: &dyn SignalOracle, cfg: &SftdConfig) -> Result<SftdOutput> {
    let d = oracle.dim();
    if oracle.duration() < cfg.duration * (1.0 - 1e-12) {
        return arg("oracle duration is shorter than the configured duration");
    }
    let line_cfgs: Vec<Sft1Config> = (0..=d).map(|l| cfg.line_config(d, l)).collect();
    line_cfgs[0].validate()?;
    let eps1 = ProjectionFrame::perturbation(d, cfg.band, cfg.separation());
    let mut frame_rng = rng::rng(rng::child(cfg.seed, 0));
    let frame = ProjectionFrame::new(d, eps1, cfg.basis, &mut frame_rng)?;
    let half = cfg.duration / 2.0;
    let mut runs = Vec::with_capacity(d + 1);
    let mut queries = 0;
    for (l, lc) in line_cfgs.iter().enumerate() {
        let line = oracle.line(&frame.direction(l), -half, cfg.duration)?;
        let out = sft1(line.as_ref(), lc)?;
        queries += out.queries;
        runs.push(confident_sorted(&out.tones));
    }
    // Rows are aligned by sorted order when every line saw the same number of
    // tones; otherwise only tones with a mutual nearest partner on every line
    // are kept.
    let base = &runs[0];
    let mut keep: Vec<Option<Vec<f64>>> = base.iter().map(|t| Some(vec![t.freq])).collect();
    for run in &runs[1..] {
        if run.len() == base.len() {
            for (slot, t) in keep.iter_mut().zip(run) {
                if let Some(v) = slot {
                    v.push(t.freq);
                }
            }
        } else {
            let nearest = |f: f64, set: &[Estimate1]| {
                set.iter()
                    .enumerate()
                    .min_by(|a, b| (a.1.freq - f).abs().total_cmp(&(b.1.freq - f).abs()))
                    .map(|(i, _)| i)
            };
            for (i, slot) in keep.iter_mut().enumerate() {
                let partner = nearest(base[i].freq, run).filter(|&p| nearest(run[p].freq, base) == Some(i));
                match (slot.as_mut(), partner) {
                    (Some(v), Some(p)) => v.push(run[p].freq),
                    _ => *slot = None,
                }
            }
        }
    }
    let kept: Vec<(usize, Vec<f64>)> =
        keep.into_iter().enumerate().filter_map(|(i, v)| v.map(|v| (i, v))).collect();
    let projections: Vec<Vec<f64>> = (0..=d).map(|l| kept.iter().map(|(_, v)| v[l]).collect()).collect();
    let means = solve_means_from_projections(&projections, &frame)?;
    let tones = kept
        .iter()
        .zip(means)
        .map(|((i, _), mu)| Tone::new(remap_weight(base[*i].weight, base[*i].freq, -half), mu))
        .collect();
    Ok(SftdOutput { tones, frame, projections, queries })
}

/// Componentwise median of complex numbers.
pub(crate) fn complex_median(ws: &[Complex64]) -> Complex64 {
    let med = |mut v: Vec<f64>| {
        v.sort_by(|a, b| a.total_cmp(b));
        let n = v.len();
        if n == 0 {
            0.0
        } else if n % 2 == 1 {
            v[n / 2]
        } else {
            0.5 * (v[n / 2 - 1] + v[n / 2])
        }
    };
    Complex64::new(med(ws.iter().map(|w| w.re).collect()), med(ws.iter().map(|w| w.im).collect()))
}
