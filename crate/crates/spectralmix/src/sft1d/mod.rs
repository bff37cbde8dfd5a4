//! One-dimensional robust sparse Fourier transform over continuous frequencies.
//!
//! The signal `x(s) = Σ_j w_j e^{i f_j s} + g(s)` is observed on `s ∈ [0, T]`.
//! Each *stage* draws a dilation `σ` and a shift `b`, and hashes the signal
//! into `𝓑` bins with a flat window ([`hash_to_bins`]). For a hash centered at
//! `τ`, bin `q` carries
//! `û_q(τ) ≈ Σ_j w_j e^{i f_j τ} Ĝ(f_j σ - b - 2πq/𝓑)`.
//! Because `Ĝ` is real and does not depend on `τ`, two hashes with centers
//! `τ` and `τ+Δ` differ, in a bin holding a single tone, by the phase `fΔ`.
//!
//! **Location** zooms in on that frequency level by level: the current region
//! is split into subregions, each round votes for the subregions consistent
//! with its measured phase difference, a majority of rounds is required, and
//! ties are broken by phase coherence. The next region is eight subregions
//! around the winner. When the region is narrow enough that the largest
//! available `Δ` is alias free, the frequency is read off the phase directly.
//!
//! **Estimation** reuses every hash of the stage: `û_q(τ_h) e^{-if̂τ_h}/Ĝ`
//! should be the same complex number for all `h`. The median is the weight and
//! the spread is a one-sparse test that rejects bins with colliding tones or a
//! mislocated frequency.
//!
//! **Merging** clusters the validated candidates of all stages, keeps those
//! seen in enough stages, takes medians, keeps the `k` largest, and zeroes
//! tones below `threshold·𝒩̂`, where `𝒩̂` is the per-bin noise level measured in
//! unoccupied bins. A final least-squares refinement ([`polish`]) makes the
//! estimate noise limited.

pub mod polish;
pub mod reference;
pub mod window;

use std::cell::{Cell, RefCell};
use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};
use crate::rng;
use crate::signal::{NoiseBudget, Signal1d, SignalOracle};

pub use reference::reference_tone_estimate;
pub use window::Window;

/// Minimum dilated separation between the two closest tones, in bins, at the
/// smallest admissible `σ`.
const SEPARATION_BINS: f64 = 1.5;
/// Fraction of the duration a single hash may span at the largest `σ`.
const MAX_SPAN_FRACTION: f64 = 0.6;
/// Bins whose filter response at the located frequency is below this value
/// leave the tone to the neighbouring bin.
const MIN_RESPONSE: f64 = 0.3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sft1Config {
    /// Sparsity `k`.
    pub k: usize,
    /// Duration `T`; samples live in `[0, T]`.
    pub duration: f64,
    /// Band bound `B`: all frequencies lie in `[-B, B]`.
    pub band: f64,
    /// Minimum frequency separation `γ` (`∞` is allowed for `k ≤ 1`).
    pub gamma: f64,
    /// Leakage parameter `θ`.
    pub theta: f64,
    /// Failure probability `δ`.
    pub delta: f64,
    /// Number of bins `𝓑`.
    pub bins: usize,
    /// Window taps `M` (odd).
    pub window_terms: usize,
    /// Independent hashing stages.
    pub stages: usize,
    /// Voting rounds per location level.
    pub rounds: usize,
    /// Subregions per location level (`t`).
    pub subregions: usize,
    /// Phase tolerance of a vote in cycles (`s`).
    pub vote_width: f64,
    /// A merged tone must be seen in at least this many stages.
    pub min_support: usize,
    /// Strong-tone threshold factor on the estimated per-bin noise.
    pub threshold: f64,
    /// Least-squares refinement samples (0 disables refinement).
    pub polish_samples: usize,
    pub seed: u64,
}

impl Sft1Config {
    /// Configuration with the default constants: `𝓑 = 8k`,
    /// `M ≈ (4/π)·𝓑·ln(k/θ)`, `⌈4 log₂(k/δ)⌉` stages, 3 rounds,
    /// 48 subregions, `s = 1/30`, majority stage support and threshold 4.
    pub fn new(k: usize, duration: f64, band: f64, gamma: f64, theta: f64, delta: f64, seed: u64) -> Self {
        let bins = Self::default_bins(k);
        let stages = Self::default_stages(k, delta);
        Sft1Config {
            k,
            duration,
            band,
            gamma,
            theta,
            delta,
            bins,
            window_terms: Self::default_window_terms(bins, k, theta),
            stages,
            rounds: 3,
            subregions: 48,
            vote_width: 1.0 / 30.0,
            min_support: stages.div_ceil(2),
            threshold: 4.0,
            polish_samples: Self::default_polish_samples(k, theta),
            seed,
        }
    }

    pub fn default_bins(k: usize) -> usize {
        8 * k.max(1)
    }

    /// Half-length `L = ⌈2𝓑 ln(k/θ)/π⌉` puts the filter's leakage half a bin
    /// past the passband edge, `exp(-πL/(2𝓑))`, at `θ/k`; at least `4𝓑+1` taps.
    pub fn default_window_terms(bins: usize, k: usize, theta: f64) -> usize {
        let half = (2.0 * bins as f64 * (k.max(1) as f64 / theta).ln() / PI).ceil().max(0.0) as usize;
        (2 * half + 1).max(4 * bins + 1)
    }

    pub fn default_stages(k: usize, delta: f64) -> usize {
        ((4.0 * (k.max(1) as f64 / delta).log2()).ceil() as usize).max(1)
    }

    pub fn default_polish_samples(k: usize, theta: f64) -> usize {
        (8.0 * k.max(1) as f64 * (k.max(1) as f64 / theta).ln().max(1.0)).ceil() as usize + 16
    }

    /// Use `stages` stages with the matching default support requirement.
    pub fn with_stages(mut self, stages: usize) -> Self {
        self.stages = stages.max(1);
        self.min_support = self.stages.div_ceil(2);
        self
    }

    /// Range `[σ_lo, 2σ_lo]` of the dilation, chosen so a hash spans at most
    /// `0.6·T`.
    pub fn sigma_range(&self) -> (f64, f64) {
        let lo = MAX_SPAN_FRACTION / 2.0 * self.duration / (self.window_terms.max(2) - 1) as f64;
        (lo, 2.0 * lo)
    }

    /// Shortest admissible duration: at `σ_lo` the two closest tones must be
    /// `1.5` bins apart after dilation,
    /// `T ≥ 1.5·2π(M-1)/(0.3·𝓑·γ) = C·ln(k/θ)/γ`.
    pub fn required_duration(&self) -> f64 {
        if self.k <= 1 {
            return 0.0;
        }
        SEPARATION_BINS * TAU * (self.window_terms - 1) as f64
            / (MAX_SPAN_FRACTION / 2.0 * self.bins as f64 * self.gamma)
    }

    /// Location levels per stage when the hash centers have `room` to move.
    fn levels(&self, room: f64) -> usize {
        let mut width = 2.0 * self.band;
        let mut levels = 0;
        while 0.8 * TAU / width <= room && levels < 64 {
            levels += 1;
            width *= 8.0 / self.subregions as f64;
        }
        levels
    }

    /// Upper bound on the number of signal evaluations of one run.
    pub fn query_budget(&self) -> u64 {
        let room = self.duration * (1.0 - MAX_SPAN_FRACTION / 2.0);
        let hashes = 1 + self.levels(room) * (self.rounds + 1) + self.rounds + 1;
        (self.stages * hashes * self.window_terms + self.polish_samples) as u64
    }

    /// The constant `C` in `T ≥ C·ln(k/θ)/γ` implied by the current window.
    pub fn precondition_constant(&self) -> f64 {
        SEPARATION_BINS * TAU * (self.window_terms - 1) as f64
            / (MAX_SPAN_FRACTION / 2.0 * self.bins as f64 * (self.k.max(2) as f64 / self.theta).ln())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return arg(format!("duration must be positive and finite, got {}", self.duration));
        }
        if !(self.band > 0.0 && self.band.is_finite()) {
            return arg(format!("band must be positive and finite, got {}", self.band));
        }
        if !(self.theta > 0.0 && self.theta < 1.0) || !(self.delta > 0.0 && self.delta < 1.0) {
            return arg("theta and delta must lie in (0, 1)");
        }
        if self.k >= 2 && !(self.gamma > 0.0) {
            return arg("gamma must be positive");
        }
        if self.bins < self.k.max(2) {
            return arg(format!("bins ({}) must be at least k ({})", self.bins, self.k));
        }
        if self.window_terms < self.bins || self.window_terms.is_multiple_of(2) {
            return arg("window_terms must be odd and at least the number of bins");
        }
        if self.stages == 0 || self.rounds == 0 || self.subregions < 16 || self.min_support == 0 {
            return arg("stages, rounds and min_support must be positive and subregions at least 16");
        }
        if !(self.vote_width > 0.0 && self.vote_width < 0.1) {
            return arg("vote_width must lie in (0, 0.1)");
        }
        let need = self.required_duration();
        if self.duration < need {
            return Err(Error::Schedule(format!(
                "duration {:.4} is below the required {:.4} = {:.3}·ln(k/θ)/γ for k={}, γ={}, θ={}",
                self.duration,
                need,
                self.precondition_constant(),
                self.k,
                self.gamma,
                self.theta
            )));
        }
        Ok(())
    }
}

/// Hash parameters of one stage. Query times are `center + σc` for
/// `c ∈ [-L, L]`, i.e. `σ(j - ξ)` with `j ∈ [M]` and `ξ = L - center/σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Permutation {
    pub sigma: f64,
    pub b: f64,
    pub center: f64,
}

impl Permutation {
    pub fn xi(&self, window: &Window) -> f64 {
        window.half() as f64 - self.center / self.sigma
    }

    /// Bin that frequency `f` hashes to; depends only on `(σ, b)`.
    pub fn bin(&self, f: f64, bins: usize) -> usize {
        let x = (f * self.sigma - self.b) * bins as f64 / TAU;
        (x.round() as i64).rem_euclid(bins as i64) as usize
    }

    /// Offset `ω` of frequency `f` from the center of bin `q`, wrapped to `(-π, π]`.
    pub fn offset(&self, f: f64, q: usize, bins: usize) -> f64 {
        wrap(f * self.sigma - self.b - TAU * q as f64 / bins as f64)
    }
}

/// One estimated tone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate1 {
    pub weight: Complex64,
    pub freq: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sft1Output {
    /// Exactly `k` slots, strongest first; unconfident slots have weight 0.
    pub tones: Vec<Estimate1>,
    /// Estimated per-bin noise `𝒩̂`.
    pub noise_estimate: f64,
    /// Noise accounting: observed `g_max` when the oracle knows it, otherwise
    /// the estimate `√𝓑·𝒩̂`; `weight_energy` from the estimates.
    pub budget: NoiseBudget,
    pub queries: u64,
}

/// Wraps a phase to `(-π, π]`.
#[inline]
pub fn wrap(x: f64) -> f64 {
    let y = x - TAU * (x / TAU).round();
    if y <= -PI {
        y + TAU
    } else {
        y
    }
}

/// Signal view that counts evaluations made by this transform.
struct Counted<'a> {
    inner: &'a dyn Signal1d,
    count: Cell<u64>,
}

impl Counted<'_> {
    fn eval(&self, s: f64) -> Result<Complex64> {
        self.count.set(self.count.get() + 1);
        self.inner.eval(s)
    }

    fn eval_grid(&self, start: f64, step: f64, out: &mut [Complex64]) -> Result<()> {
        self.count.set(self.count.get() + out.len() as u64);
        self.inner.eval_grid(start, step, out)
    }
}

struct Hasher {
    window: Window,
    fft: Arc<dyn Fft<f64>>,
    /// Bin `c mod 𝓑` of each tap `c = -L..=L`.
    fold: Vec<usize>,
    scratch: RefCell<(Vec<Complex64>, Vec<Complex64>)>,
}

impl Hasher {
    fn new(cfg: &Sft1Config) -> Self {
        Self::from_window(Window::new(cfg.bins, cfg.window_terms))
    }

    fn from_window(window: Window) -> Self {
        let fft = FftPlanner::new().plan_fft_forward(window.bins());
        let l = window.half() as i64;
        let fold = (-l..=l).map(|c| c.rem_euclid(window.bins() as i64) as usize).collect();
        let scratch = RefCell::new((vec![Complex64::new(0.0, 0.0); window.len()], vec![
            Complex64::new(0.0, 0.0);
            fft.get_inplace_scratch_len()
        ]));
        Hasher { window, fft, fold, scratch }
    }

    fn modulation(&self, b: f64) -> Vec<Complex64> {
        let l = self.window.half() as i64;
        (-l..=l).map(|c| self.window.tap(c) * Complex64::cis(-b * c as f64)).collect()
    }

    fn hash(&self, sig: &Counted, sigma: f64, center: f64, modulation: &[Complex64]) -> Result<Vec<Complex64>> {
        let l = self.window.half() as f64;
        let duration = sig.inner.duration();
        let start = (center - sigma * l).max(0.0);
        let step = ((center + sigma * l).min(duration) - start) / (2.0 * l).max(1.0);
        let mut guard = self.scratch.borrow_mut();
        let (values, scratch) = &mut *guard;
        sig.eval_grid(start, step, values)?;
        let mut z = vec![Complex64::new(0.0, 0.0); self.window.bins()];
        for ((&p, m), x) in self.fold.iter().zip(modulation).zip(values.iter()) {
            z[p] += m * x;
        }
        self.fft.process_with_scratch(&mut z, scratch);
        Ok(z)
    }
}

/// `cos` with a short Taylor series on the small phase errors that dominate
/// voting (absolute error below `1e-7` for `|x| < 0.5`).
#[inline]
fn cos_small(x: f64) -> f64 {
    if x.abs() < 0.5 {
        let x2 = x * x;
        1.0 - x2 / 2.0 * (1.0 - x2 / 12.0 * (1.0 - x2 / 30.0))
    } else {
        x.cos()
    }
}

/// Filtered, aliased bin values `û` for one permutation (`M` queries).
pub fn hash_to_bins(signal: &dyn Signal1d, perm: &Permutation, window: &Window) -> Result<Vec<Complex64>> {
    let l = window.half() as f64;
    let (lo, hi) = (perm.center - perm.sigma * l, perm.center + perm.sigma * l);
    if lo < -1e-9 || hi > signal.duration() * (1.0 + 1e-12) {
        return Err(Error::Domain(format!("hash spans [{lo}, {hi}] outside [0, {}]", signal.duration())));
    }
    let hasher = Hasher::from_window(window.clone());
    let sig = Counted { inner: signal, count: Cell::new(0) };
    hasher.hash(&sig, perm.sigma, perm.center, &hasher.modulation(perm.b))
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    freq: f64,
    weight: Complex64,
    response: f64,
    stage: usize,
}

struct StageOutput {
    candidates: Vec<Candidate>,
    noise: f64,
}

fn median(v: &mut [f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn complex_median(v: &[Complex64]) -> Complex64 {
    let mut re: Vec<f64> = v.iter().map(|z| z.re).collect();
    let mut im: Vec<f64> = v.iter().map(|z| z.im).collect();
    Complex64::new(median(&mut re), median(&mut im))
}

/// RMS magnitude over bins that are neither among the `k` strongest nor
/// adjacent to one of them.
fn empty_bin_rms(magnitudes: &[f64], k: usize) -> f64 {
    let bins = magnitudes.len();
    let mut order: Vec<usize> = (0..bins).collect();
    order.sort_by(|&a, &b| magnitudes[b].total_cmp(&magnitudes[a]));
    let mut occupied = vec![false; bins];
    for &q in order.iter().take(k) {
        occupied[q] = true;
        occupied[(q + 1) % bins] = true;
        occupied[(q + bins - 1) % bins] = true;
    }
    let mut free: Vec<f64> = (0..bins).filter(|&q| !occupied[q]).map(|q| magnitudes[q]).collect();
    if free.is_empty() {
        // Too few bins for the exclusion rule: fall back to the weaker half.
        free = order[bins / 2..].iter().map(|&q| magnitudes[q]).collect();
    }
    (free.iter().map(|m| m * m).sum::<f64>() / free.len().max(1) as f64).sqrt()
}

/// Votes per subregion `j` (center `f_j = start + (j+½)·sub`): round `r`
/// votes for `j` when `|wrap(φ_r - f_jΔ_r)| ≤ 2πs + Δ_r·sub/2`. Only the
/// subregions inside the aliased windows around `(φ_r + 2πm)/Δ_r` are
/// visited.
fn tally_votes(votes: &mut [u32], start: f64, sub: f64, meas: &[(f64, f64)], deltas: &[f64], vote_width: f64) {
    let t = votes.len() as f64;
    votes.iter_mut().for_each(|v| *v = 0);
    for ((phi, _), d) in meas.iter().zip(deltas) {
        let tol = TAU * vote_width + 0.5 * d * sub;
        let (lo_f, hi_f) = (start + 0.5 * sub, start + (t - 0.5) * sub);
        let m_lo = ((lo_f * d - phi - tol) / TAU).floor() as i64;
        let m_hi = ((hi_f * d - phi + tol) / TAU).ceil() as i64;
        for m in m_lo..=m_hi {
            let a = (phi - tol + TAU * m as f64) / d;
            let b = (phi + tol + TAU * m as f64) / d;
            let j_lo = ((a - start) / sub - 0.5).ceil().max(0.0);
            let j_hi = ((b - start) / sub - 0.5).floor().min(t - 1.0);
            if j_lo <= j_hi {
                for v in &mut votes[j_lo as usize..=j_hi as usize] {
                    *v += 1;
                }
            }
        }
    }
}

fn run_stage(sig: &Counted, cfg: &Sft1Config, hasher: &Hasher, stage: usize) -> Result<StageOutput> {
    let mut rng = rng::rng(rng::child(cfg.seed, stage as u64));
    let (s_lo, s_hi) = cfg.sigma_range();
    let sigma = rng.gen_range(s_lo..=s_hi);
    let b = rng.gen_range(0.0..TAU);
    let perm_at = |center| Permutation { sigma, b, center };
    let bins = cfg.bins;
    let half_span = sigma * hasher.window.half() as f64;
    let (c_lo, c_hi) = (half_span, cfg.duration - half_span);
    let room = c_hi - c_lo;
    let modulation = hasher.modulation(b);
    let mut hashes: Vec<(f64, Vec<Complex64>)> = Vec::new();

    // Bins worth locating: the strongest 3k that stand out of the noise.
    let first_center = c_lo + rng.gen::<f64>() * room;
    let first = hasher.hash(sig, sigma, first_center, &modulation)?;
    let mags: Vec<f64> = first.iter().map(|z| z.norm()).collect();
    let floor0 = empty_bin_rms(&mags, cfg.k);
    let mut order: Vec<usize> = (0..bins).collect();
    order.sort_by(|&a, &b| mags[b].total_cmp(&mags[a]));
    let mut active: Vec<usize> =
        order.into_iter().take((3 * cfg.k).min(bins)).filter(|&q| mags[q] > 2.0 * floor0 && mags[q] > 0.0).collect();
    active.sort_unstable();
    hashes.push((first_center, first));

    let mut centers = vec![0.0; active.len()];
    let mut alive = vec![true; active.len()];
    let mut width = 2.0 * cfg.band;
    let need = cfg.rounds / 2 + 1;
    let t_sub = cfg.subregions;
    let mut votes = vec![0u32; t_sub];
    let mut level = 0;
    // Same schedule as `Sft1Config::levels`.
    while 0.8 * TAU / width <= room && level < 64 {
        level += 1;
        let deltas: Vec<f64> = (0..cfg.rounds).map(|_| TAU * rng.gen_range(0.4..0.8) / width).collect();
        let d_max = deltas.iter().cloned().fold(0.0, f64::max);
        let base_center = c_lo + rng.gen::<f64>() * (room - d_max);
        let base = hasher.hash(sig, sigma, base_center, &modulation)?;
        let mut rounds = Vec::with_capacity(cfg.rounds);
        for d in &deltas {
            rounds.push(hasher.hash(sig, sigma, base_center + d, &modulation)?);
        }
        let sub = width / t_sub as f64;
        for (i, &q) in active.iter().enumerate() {
            if !alive[i] {
                continue;
            }
            let a = base[q];
            let meas: Vec<(f64, f64)> =
                rounds.iter().map(|h| ((h[q] * a.conj()).arg(), h[q].norm() * a.norm())).collect();
            let start = centers[i] - width / 2.0;
            tally_votes(&mut votes, start, sub, &meas, &deltas, cfg.vote_width);
            let mut best: Option<(usize, f64, f64)> = None;
            for (j, &count) in votes.iter().enumerate() {
                let count = count as usize;
                if count < need {
                    continue;
                }
                let f = start + (j as f64 + 0.5) * sub;
                let energy: f64 = meas.iter().zip(&deltas).map(|((phi, mag), d)| mag * cos_small(wrap(phi - f * d))).sum();
                let better = match best {
                    None => true,
                    Some((v, e, _)) => count > v || (count == v && energy > e),
                };
                if better {
                    best = Some((count, energy, f));
                }
            }
            match best {
                Some((_, _, f)) => centers[i] = f,
                None => alive[i] = false,
            }
        }
        hashes.push((base_center, base));
        for (d, h) in deltas.iter().zip(rounds) {
            hashes.push((base_center + d, h));
        }
        width *= 8.0 / t_sub as f64;
    }

    // Final read-out with the longest alias-free baseline.
    let base_center = c_lo + rng.gen::<f64>() * 0.5 * room;
    let deltas: Vec<f64> =
        (0..cfg.rounds).map(|_| (c_hi - base_center) * rng.gen_range(0.5..=1.0)).collect();
    let base = hasher.hash(sig, sigma, base_center, &modulation)?;
    let mut rounds = Vec::with_capacity(cfg.rounds);
    for d in &deltas {
        rounds.push(hasher.hash(sig, sigma, base_center + d, &modulation)?);
    }
    for (i, &q) in active.iter().enumerate() {
        if !alive[i] {
            continue;
        }
        let c = centers[i];
        let mut fs: Vec<f64> = rounds
            .iter()
            .zip(&deltas)
            .map(|(h, d)| c + wrap((h[q] * base[q].conj()).arg() - c * d) / d)
            .collect();
        centers[i] = median(&mut fs);
    }
    hashes.push((base_center, base));
    for (d, h) in deltas.iter().zip(rounds) {
        hashes.push((base_center + d, h));
    }

    // Per-bin noise from all hashes of the stage.
    let mean_mag: Vec<f64> =
        (0..bins).map(|q| hashes.iter().map(|(_, h)| h[q].norm_sqr()).sum::<f64>() / hashes.len() as f64).collect();
    let noise = empty_bin_rms(&mean_mag.iter().map(|m| m.sqrt()).collect::<Vec<_>>(), cfg.k);

    let mut candidates: Vec<Candidate> = Vec::new();
    for (i, &q) in active.iter().enumerate() {
        if !alive[i] {
            continue;
        }
        let f = centers[i];
        let response = hasher.window.response(perm_at(0.0).offset(f, q, bins));
        if response < MIN_RESPONSE {
            continue;
        }
        let ests: Vec<Complex64> =
            hashes.iter().map(|(tau, h)| h[q] * Complex64::cis(-f * tau) / response).collect();
        let w = complex_median(&ests);
        let mut dev: Vec<f64> = ests.iter().map(|e| (e - w).norm()).collect();
        let spread = median(&mut dev);
        if spread > 0.3 * w.norm() + 3.0 * noise / response {
            continue;
        }
        candidates.push(Candidate { freq: f, weight: w, response, stage });
    }
    // A tone near a bin edge shows up in both bins; keep the better one.
    let radius = 4.0 / cfg.duration;
    candidates.sort_by(|a, b| b.response.total_cmp(&a.response));
    let mut kept: Vec<Candidate> = Vec::new();
    for c in candidates {
        if kept.iter().all(|k| (k.freq - c.freq).abs() > radius) {
            kept.push(c);
        }
    }
    Ok(StageOutput { candidates: kept, noise })
}

/// All validated candidate frequencies over the configured stages.
pub fn locate_k_signal(signal: &dyn Signal1d, cfg: &Sft1Config) -> Result<Vec<f64>> {
    cfg.validate()?;
    let sig = Counted { inner: signal, count: Cell::new(0) };
    let hasher = Hasher::new(cfg);
    let mut out = Vec::new();
    for stage in 0..cfg.stages {
        out.extend(run_stage(&sig, cfg, &hasher, stage)?.candidates.iter().map(|c| c.freq));
    }
    Ok(out)
}

struct Cluster {
    freq: f64,
    weight: Complex64,
    support: usize,
}

fn merge(mut cands: Vec<Candidate>, cfg: &Sft1Config) -> Vec<Cluster> {
    cands.sort_by(|a, b| a.freq.total_cmp(&b.freq));
    let radius = 4.0 / cfg.duration;
    let mut clusters = Vec::new();
    let mut i = 0;
    while i < cands.len() {
        let mut j = i + 1;
        while j < cands.len() && cands[j].freq - cands[j - 1].freq <= radius && cands[j].freq - cands[i].freq <= 3.0 * radius
        {
            j += 1;
        }
        let group = &cands[i..j];
        let mut stages: Vec<usize> = group.iter().map(|c| c.stage).collect();
        stages.sort_unstable();
        stages.dedup();
        let mut fs: Vec<f64> = group.iter().map(|c| c.freq).collect();
        let ws: Vec<Complex64> = group.iter().map(|c| c.weight).collect();
        clusters.push(Cluster { freq: median(&mut fs), weight: complex_median(&ws), support: stages.len() });
        i = j;
    }
    clusters
}

/// Robust `k`-sparse recovery from samples on `[0, T]`.
pub fn sft1(signal: &dyn Signal1d, cfg: &Sft1Config) -> Result<Sft1Output> {
    cfg.validate()?;
    if signal.duration() < cfg.duration * (1.0 - 1e-12) {
        return arg("signal duration is shorter than the configured duration");
    }
    let sig = Counted { inner: signal, count: Cell::new(0) };
    if cfg.k == 0 {
        let budget = NoiseBudget { g_max: 0.0, theta: cfg.theta, weight_energy: 0.0 };
        return Ok(Sft1Output { tones: Vec::new(), noise_estimate: 0.0, budget, queries: 0 });
    }
    let hasher = Hasher::new(cfg);
    let mut cands = Vec::new();
    let mut noises = Vec::with_capacity(cfg.stages);
    for stage in 0..cfg.stages {
        let out = run_stage(&sig, cfg, &hasher, stage)?;
        cands.extend(out.candidates);
        noises.push(out.noise);
    }
    let noise = median(&mut noises);
    let mut clusters: Vec<Cluster> = merge(cands, cfg).into_iter().filter(|c| c.support >= cfg.min_support).collect();
    clusters.sort_by(|a, b| b.weight.norm().total_cmp(&a.weight.norm()).then(b.support.cmp(&a.support)));
    clusters.truncate(cfg.k);
    clusters.retain(|c| c.weight.norm() >= cfg.threshold * noise);

    let mut freqs: Vec<f64> = clusters.iter().map(|c| c.freq).collect();
    let mut weights: Vec<Complex64> = clusters.iter().map(|c| c.weight).collect();
    if cfg.polish_samples > 0 && !freqs.is_empty() {
        let mut rng = rng::rng(rng::child(cfg.seed, u64::MAX));
        let half = cfg.duration / 2.0;
        let mut times = Vec::with_capacity(cfg.polish_samples);
        let mut values = Vec::with_capacity(cfg.polish_samples);
        for _ in 0..cfg.polish_samples {
            let s = rng.gen::<f64>() * cfg.duration;
            values.push(sig.eval(s)?);
            times.push(s - half);
        }
        if let Some(r) = polish::refine(&times, &values, &freqs, TAU / cfg.duration) {
            freqs = r.freqs;
            weights = r.weights.iter().zip(&freqs).map(|(w, f)| w * Complex64::cis(-f * half)).collect();
        }
    }
    let mut tones: Vec<Estimate1> = freqs
        .iter()
        .zip(&weights)
        .filter(|(_, w)| w.norm() >= cfg.threshold * noise)
        .map(|(&freq, &weight)| Estimate1 { weight, freq })
        .collect();
    tones.sort_by(|a, b| b.weight.norm().total_cmp(&a.weight.norm()));
    tones.resize(cfg.k, Estimate1 { weight: Complex64::new(0.0, 0.0), freq: 0.0 });
    let weight_energy = tones.iter().map(|t| t.weight.norm_sqr()).sum();
    let budget = NoiseBudget { g_max: noise * (cfg.bins as f64).sqrt(), theta: cfg.theta, weight_energy };
    Ok(Sft1Output { tones, noise_estimate: noise, budget, queries: sig.count.get() })
}

/// [`sft1`] on a one-dimensional oracle over `[0, T]`, with the noise budget
/// taken from the oracle's own accounting when available.
pub fn sft1_oracle(oracle: &dyn SignalOracle, cfg: &Sft1Config) -> Result<Sft1Output> {
    if oracle.dim() != 1 {
        return arg("sft1_oracle needs a one-dimensional oracle");
    }
    let line = oracle.line(&[1.0], 0.0, cfg.duration)?;
    let mut out = sft1(line.as_ref(), cfg)?;
    if let Some(g) = oracle.observed_noise() {
        out.budget.g_max = g;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{exact_signal, hashed_phase_noise, inject_noise, Tone};

    fn tones1(spec: &[(f64, f64)]) -> Vec<Tone> {
        spec.iter().map(|&(w, f)| Tone::real(w, vec![f])).collect()
    }

    proptest::proptest! {
        #[test]
        fn vote_tally_matches_brute_force(
            start in -5.0f64..5.0,
            width in 1e-3f64..8.0,
            t in 16usize..300,
            phis in proptest::collection::vec(-PI..PI, 1..5),
            us in proptest::collection::vec(0.4f64..0.8, 5),
        ) {
            let sub = width / t as f64;
            let deltas: Vec<f64> = us[..phis.len()].iter().map(|u| TAU * u / width).collect();
            let meas: Vec<(f64, f64)> = phis.iter().map(|&p| (p, 1.0)).collect();
            let mut fast = vec![0u32; t];
            tally_votes(&mut fast, start, sub, &meas, &deltas, 1.0 / 30.0);
            for (j, &got) in fast.iter().enumerate() {
                let f = start + (j as f64 + 0.5) * sub;
                let mut want = 0;
                let mut marginal = false;
                for ((phi, _), d) in meas.iter().zip(&deltas) {
                    let tol = TAU / 30.0 + 0.5 * d * sub;
                    let e = wrap(phi - f * d).abs();
                    want += (e <= tol) as u32;
                    marginal |= (e - tol).abs() < 1e-9;
                }
                proptest::prop_assert!(marginal || got == want, "j={} got={} want={}", j, got, want);
            }
        }
    }

    #[test]
    fn small_angle_cosine() {
        for i in -1000..=1000 {
            let x = 4.0 * i as f64 / 1000.0;
            assert!((cos_small(x) - x.cos()).abs() < 1e-7);
        }
    }

    #[test]
    fn wrap_range() {
        assert!((wrap(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap(-0.5) + 0.5).abs() < 1e-15);
        assert!(wrap(-PI) > 0.0);
    }

    #[test]
    fn hash_matches_filtered_aliased_spectrum() {
        let cfg = Sft1Config::new(2, 100.0, 4.0, 1.0, 0.01, 0.1, 1);
        let window = Window::new(cfg.bins, cfg.window_terms);
        let tones = vec![Tone::new(Complex64::from_polar(0.7, 0.4), vec![1.3]), Tone::real(0.2, vec![-2.1])];
        let sig = exact_signal(tones.clone(), 100.0).unwrap();
        let line = sig.line(&[1.0], 0.0, 100.0).unwrap();
        let (s_lo, s_hi) = cfg.sigma_range();
        let mut r = rng::rng(3);
        for _ in 0..20 {
            let sigma = r.gen_range(s_lo..=s_hi);
            let perm = Permutation { sigma, b: r.gen_range(0.0..TAU), center: r.gen_range(40.0..60.0) };
            let u = hash_to_bins(line.as_ref(), &perm, &window).unwrap();
            for (q, got) in u.iter().enumerate() {
                let want: Complex64 = tones
                    .iter()
                    .map(|t| {
                        let f = t.freq[0];
                        t.weight * Complex64::cis(f * perm.center) * window.response(perm.offset(f, q, cfg.bins))
                    })
                    .sum();
                assert!((got - want).norm() < 1e-12, "bin {q}: {got} vs {want}");
            }
            // The tone's own bin holds at least half of its weight.
            let h = perm.bin(1.3, cfg.bins);
            assert!(window.response(perm.offset(1.3, h, cfg.bins)) >= 0.5 - 1e-9);
        }
    }

    #[test]
    fn hash_rejects_out_of_range_windows() {
        let window = Window::new(8, 33);
        let sig = exact_signal(tones1(&[(1.0, 0.0)]), 10.0).unwrap();
        let line = sig.line(&[1.0], 0.0, 10.0).unwrap();
        let perm = Permutation { sigma: 1.0, b: 0.0, center: 5.0 };
        assert!(matches!(hash_to_bins(line.as_ref(), &perm, &window), Err(Error::Domain(_))));
    }

    #[test]
    fn noiseless_single_tone_is_located() {
        let cfg = Sft1Config::new(1, 100.0, 8.0, f64::INFINITY, 0.01, 0.1, 5);
        let sig = exact_signal(tones1(&[(1.0, 5.0)]), 100.0).unwrap();
        let line = sig.line(&[1.0], 0.0, 100.0).unwrap();
        let found = locate_k_signal(line.as_ref(), &cfg).unwrap();
        assert!(found.iter().any(|f| (f - 5.0).abs() <= 1e-3), "{found:?}");
    }

    #[test]
    fn dc_signal() {
        let cfg = Sft1Config::new(1, 50.0, 2.0, f64::INFINITY, 0.01, 0.1, 2);
        let sig = exact_signal(tones1(&[(1.0, 0.0)]), 50.0).unwrap();
        let out = sft1_oracle(&sig, &cfg).unwrap();
        assert!((out.tones[0].weight - Complex64::new(1.0, 0.0)).norm() < 1e-9);
        assert!(out.tones[0].freq.abs() <= 1e-6 / 50.0);
    }

    #[test]
    fn three_noiseless_tones() {
        let truth = [(0.5, -1.3), (0.3, 0.4), (0.2, 2.2)];
        let cfg = Sft1Config::new(3, 500.0, 4.0, 1.0, 1e-4, 0.05, 9);
        let sig = exact_signal(tones1(&truth), 500.0).unwrap();
        let out = sft1_oracle(&sig, &cfg).unwrap();
        for (w, f) in truth {
            let best = out.tones.iter().min_by(|a, b| (a.freq - f).abs().total_cmp(&(b.freq - f).abs())).unwrap();
            assert!((best.freq - f).abs() < 1e-8, "{out:?}");
            assert!((best.weight - Complex64::new(w, 0.0)).norm() < 1e-8);
        }
    }

    #[test]
    fn zero_signal_yields_no_confident_tones() {
        let cfg = Sft1Config::new(2, 400.0, 4.0, 1.0, 1e-3, 0.1, 4);
        let sig = inject_noise(exact_signal(tones1(&[(0.0, 0.7)]), 400.0).unwrap(), hashed_phase_noise(0.05, 3), 0.05)
            .unwrap();
        let out = sft1_oracle(&sig, &cfg).unwrap();
        for t in &out.tones {
            assert!(t.weight.norm() < 4.0 * 0.05, "{out:?}");
        }
    }

    #[test]
    fn short_duration_is_a_schedule_error() {
        let cfg = Sft1Config::new(3, 10.0, 4.0, 1.0, 1e-4, 0.05, 9);
        assert!(matches!(cfg.validate(), Err(Error::Schedule(_))));
    }

    #[test]
    fn queries_stay_within_budget() {
        let cfg = Sft1Config::new(3, 500.0, 4.0, 1.0, 1e-3, 0.1, 2);
        let sig = exact_signal(tones1(&[(0.5, -1.0), (0.3, 0.5), (0.2, 2.0)]), 500.0).unwrap();
        let out = sft1_oracle(&sig, &cfg).unwrap();
        assert!(out.queries <= cfg.query_budget(), "{} > {}", out.queries, cfg.query_budget());
        assert_eq!(out.queries, sig.query_count());
    }

    #[test]
    fn k_zero_returns_nothing() {
        let cfg = Sft1Config::new(0, 10.0, 4.0, 1.0, 1e-2, 0.05, 9);
        let sig = exact_signal(tones1(&[(1.0, 0.7)]), 10.0).unwrap();
        assert!(sft1_oracle(&sig, &cfg).unwrap().tones.is_empty());
    }

    #[test]
    fn surplus_slots_carry_zero_weight() {
        let cfg = Sft1Config::new(3, 400.0, 4.0, 1.0, 1e-3, 0.1, 1);
        let sig = exact_signal(tones1(&[(1.0, 0.7)]), 400.0).unwrap();
        let out = sft1_oracle(&sig, &cfg).unwrap();
        assert_eq!(out.tones.len(), 3);
        assert!((out.tones[0].freq - 0.7).abs() < 1e-9);
        assert!(out.tones[1..].iter().all(|t| t.weight.norm() == 0.0));
    }

    #[test]
    fn identical_seeds_give_identical_output() {
        let cfg = Sft1Config::new(2, 400.0, 4.0, 1.0, 1e-3, 0.1, 77);
        let mk = || {
            inject_noise(exact_signal(tones1(&[(0.6, 0.2), (0.4, -1.0)]), 400.0).unwrap(), hashed_phase_noise(0.01, 1), 0.01)
                .unwrap()
        };
        let a = sft1_oracle(&mk(), &cfg).unwrap();
        let b = sft1_oracle(&mk(), &cfg).unwrap();
        assert_eq!(a, b);
    }
}
