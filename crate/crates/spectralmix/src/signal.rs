//! Query oracles `x(t) = x*(t) + g(t)` with query accounting.
//!
//! A [`SignalOracle`] lives on the ball `‖t‖ ≤ T` in `ℝ^d`. The one-dimensional
//! transform never touches it directly; it works on a [`Signal1d`], a view
//! `s ↦ x((origin + s)·r)` for `s ∈ [0, duration]`. With `origin = -T/2` this
//! is the affine remap from `[-T/2, T/2]` to `[0, T]`; a tone `w e^{ift}` then
//! appears as `(w e^{-ifT/2}) e^{ifs}`, and callers undo that phase with
//! [`remap_weight`].

use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::distributions::{cf_eval, dot, norm, DistributionSpec, SampleMatrix};
use crate::error::{arg, Error, Result};

/// One complex exponential `w·e^{i⟨μ, t⟩}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tone {
    pub weight: Complex64,
    pub freq: Vec<f64>,
}

impl Tone {
    pub fn new(weight: Complex64, freq: Vec<f64>) -> Self {
        Tone { weight, freq }
    }

    pub fn real(weight: f64, freq: Vec<f64>) -> Self {
        Tone { weight: Complex64::new(weight, 0.0), freq }
    }

    #[inline]
    pub fn eval(&self, t: &[f64]) -> Complex64 {
        self.weight * Complex64::cis(dot(&self.freq, t))
    }
}

/// Check the tone-set invariants: common dimension, finite frequencies,
/// distinct frequencies.
pub fn validate_tones(tones: &[Tone]) -> Result<usize> {
    let d = match tones.first() {
        Some(t) => t.freq.len(),
        None => return arg("tone set is empty"),
    };
    for t in tones {
        if t.freq.len() != d || d == 0 {
            return arg("tones must share a positive dimension");
        }
        if t.freq.iter().any(|f| !f.is_finite()) || !t.weight.re.is_finite() || !t.weight.im.is_finite() {
            return arg("tone parameters must be finite");
        }
    }
    for i in 0..tones.len() {
        for j in 0..i {
            if tones[i].freq == tones[j].freq {
                return arg("tone frequencies must be distinct");
            }
        }
    }
    Ok(d)
}

/// `𝒩² = g_max² + θ·Σ|w|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseBudget {
    pub g_max: f64,
    pub theta: f64,
    pub weight_energy: f64,
}

impl NoiseBudget {
    pub fn level(&self) -> f64 {
        (self.g_max * self.g_max + self.theta * self.weight_energy).sqrt()
    }

    pub fn for_tones(g_max: f64, theta: f64, tones: &[Tone]) -> Self {
        NoiseBudget { g_max, theta, weight_energy: tones.iter().map(|t| t.weight.norm_sqr()).sum() }
    }
}

/// A one-dimensional signal on `[0, duration]`.
pub trait Signal1d {
    fn duration(&self) -> f64;
    fn eval(&self, s: f64) -> Result<Complex64>;
    /// Evaluates at `start + step·i` for `i = 0..out.len()`; one query per
    /// point. Views may override this with a faster exact equivalent.
    fn eval_grid(&self, start: f64, step: f64, out: &mut [Complex64]) -> Result<()> {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.eval((start + step * i as f64).clamp(0.0, self.duration()))?;
        }
        Ok(())
    }
}

/// Queryable d-dimensional signal on the ball of radius `duration()`.
pub trait SignalOracle: Send + Sync {
    fn dim(&self) -> usize;
    fn duration(&self) -> f64;
    /// Evaluate at `t`; increments the query counter by exactly one.
    fn query(&self, t: &[f64]) -> Result<Complex64>;
    fn query_count(&self) -> u64;
    /// Largest `|g(t)|` seen at queried points when the oracle knows its own
    /// noise (exact and injected-noise oracles); `None` otherwise.
    fn observed_noise(&self) -> Option<f64>;
    /// The view `s ↦ x((origin + s)·direction)`, `s ∈ [0, duration]`.
    /// Queries through the view are counted on this oracle.
    fn line<'a>(&'a self, direction: &[f64], origin: f64, duration: f64) -> Result<Box<dyn Signal1d + 'a>>;
}

fn check_line(oracle: &dyn SignalOracle, direction: &[f64], origin: f64, duration: f64) -> Result<f64> {
    if direction.len() != oracle.dim() {
        return arg("line direction has the wrong dimension");
    }
    if !(duration > 0.0) || !origin.is_finite() {
        return arg("line needs a positive duration and finite origin");
    }
    let reach = origin.abs().max((origin + duration).abs()) * norm(direction);
    if reach > oracle.duration() * (1.0 + 1e-9) {
        return Err(Error::Domain(format!(
            "line reaches radius {reach:.6} beyond the oracle duration {:.6}",
            oracle.duration()
        )));
    }
    Ok(reach)
}

fn check_point(s: f64, duration: f64) -> Result<()> {
    if !(s >= -1e-9 * duration.max(1.0) && s <= duration * (1.0 + 1e-12) + 1e-12) {
        return Err(Error::Domain(format!("s = {s} outside [0, {duration}]")));
    }
    Ok(())
}

/// Line view that forwards each evaluation to [`SignalOracle::query`].
pub struct GenericLine<'a> {
    oracle: &'a dyn SignalOracle,
    direction: Vec<f64>,
    origin: f64,
    duration: f64,
}

impl<'a> GenericLine<'a> {
    pub fn new(oracle: &'a dyn SignalOracle, direction: &[f64], origin: f64, duration: f64) -> Result<Self> {
        check_line(oracle, direction, origin, duration)?;
        Ok(GenericLine { oracle, direction: direction.to_vec(), origin, duration })
    }
}

impl Signal1d for GenericLine<'_> {
    fn duration(&self) -> f64 {
        self.duration
    }

    fn eval(&self, s: f64) -> Result<Complex64> {
        check_point(s, self.duration)?;
        let tau = self.origin + s;
        let t: Vec<f64> = self.direction.iter().map(|r| tau * r).collect();
        self.oracle.query(&t)
    }
}

/// Weight correction for a tone recovered on a line with the given origin:
/// a recovered `ŵ` refers to `e^{ifs}`, the original to `e^{if(origin+s)}`.
pub fn remap_weight(w: Complex64, freq: f64, origin: f64) -> Complex64 {
    w * Complex64::cis(-freq * origin)
}

fn in_ball(t: &[f64], radius: f64) -> Result<()> {
    let r = norm(t);
    if r > radius * (1.0 + 1e-9) + 1e-12 {
        return Err(Error::Domain(format!("‖t‖ = {r:.6} exceeds T = {radius:.6}")));
    }
    Ok(())
}

/// Exact sparse signal, `g ≡ 0`.
pub struct ExactSignal {
    tones: Vec<Tone>,
    dim: usize,
    duration: f64,
    count: AtomicU64,
}

pub fn exact_signal(tones: Vec<Tone>, duration: f64) -> Result<ExactSignal> {
    let dim = validate_tones(&tones)?;
    if !(duration > 0.0) {
        return arg("duration must be positive");
    }
    Ok(ExactSignal { tones, dim, duration, count: AtomicU64::new(0) })
}

impl ExactSignal {
    pub fn tones(&self) -> &[Tone] {
        &self.tones
    }

    /// Noise-free value at `t` without touching the query counter.
    pub fn value(&self, t: &[f64]) -> Complex64 {
        self.tones.iter().map(|tone| tone.eval(t)).sum()
    }
}

impl SignalOracle for ExactSignal {
    fn dim(&self) -> usize {
        self.dim
    }
    fn duration(&self) -> f64 {
        self.duration
    }
    fn query(&self, t: &[f64]) -> Result<Complex64> {
        if t.len() != self.dim {
            return arg("query has the wrong dimension");
        }
        in_ball(t, self.duration)?;
        self.count.fetch_add(1, Ordering::Relaxed);
        Ok(self.value(t))
    }
    fn query_count(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }
    fn observed_noise(&self) -> Option<f64> {
        Some(0.0)
    }
    fn line<'a>(&'a self, direction: &[f64], origin: f64, duration: f64) -> Result<Box<dyn Signal1d + 'a>> {
        check_line(self, direction, origin, duration)?;
        let projected = self
            .tones
            .iter()
            .map(|t| (t.weight * Complex64::cis(origin * dot(&t.freq, direction)), dot(&t.freq, direction)))
            .collect();
        Ok(Box::new(ExactLine { parent: self, projected, duration }))
    }
}

struct ExactLine<'a> {
    parent: &'a ExactSignal,
    projected: Vec<(Complex64, f64)>,
    duration: f64,
}

impl Signal1d for ExactLine<'_> {
    fn duration(&self) -> f64 {
        self.duration
    }
    fn eval(&self, s: f64) -> Result<Complex64> {
        check_point(s, self.duration)?;
        self.parent.count.fetch_add(1, Ordering::Relaxed);
        Ok(self.projected.iter().map(|(w, f)| w * Complex64::cis(f * s)).sum())
    }

    /// Phase rotation along the grid, re-anchored every 64 points so the
    /// rounding error stays at the level of a direct evaluation.
    fn eval_grid(&self, start: f64, step: f64, out: &mut [Complex64]) -> Result<()> {
        const ANCHOR: usize = 64;
        if out.is_empty() {
            return Ok(());
        }
        check_point(start, self.duration)?;
        check_point(start + step * (out.len() - 1) as f64, self.duration)?;
        self.parent.count.fetch_add(out.len() as u64, Ordering::Relaxed);
        out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
        for (w, f) in &self.projected {
            let rot = Complex64::cis(f * step);
            let mut z = Complex64::new(0.0, 0.0);
            for (i, o) in out.iter_mut().enumerate() {
                if i % ANCHOR == 0 {
                    z = w * Complex64::cis(f * (start + step * i as f64));
                }
                *o += z;
                z *= rot;
            }
        }
        Ok(())
    }
}

/// Bounded additive noise realized as a deterministic function of `t`.
pub type NoiseFn = Box<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

/// `oracle(t) + noise(t)`, spot-checking `|noise(t)| ≤ bound` at every query.
pub struct NoisyOracle<O> {
    inner: O,
    noise: NoiseFn,
    bound: f64,
    g_max_bits: AtomicU64,
}

pub fn inject_noise<O: SignalOracle>(oracle: O, noise: NoiseFn, bound: f64) -> Result<NoisyOracle<O>> {
    if !(bound >= 0.0) {
        return arg("noise bound must be non-negative");
    }
    Ok(NoisyOracle { inner: oracle, noise, bound, g_max_bits: AtomicU64::new(0f64.to_bits()) })
}

impl<O: SignalOracle> NoisyOracle<O> {
    pub fn inner(&self) -> &O {
        &self.inner
    }

    fn record(&self, g: f64) {
        // Non-negative f64 bit patterns order like the values themselves.
        self.g_max_bits.fetch_max(g.to_bits(), Ordering::Relaxed);
    }
}

impl<O: SignalOracle> SignalOracle for NoisyOracle<O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn duration(&self) -> f64 {
        self.inner.duration()
    }
    fn query(&self, t: &[f64]) -> Result<Complex64> {
        let clean = self.inner.query(t)?;
        let g = (self.noise)(t);
        let m = g.norm();
        if m > self.bound * (1.0 + 1e-9) {
            return Err(Error::NoiseContract { observed: m, bound: self.bound });
        }
        self.record(m);
        Ok(clean + g)
    }
    fn query_count(&self) -> u64 {
        self.inner.query_count()
    }
    fn observed_noise(&self) -> Option<f64> {
        let own = f64::from_bits(self.g_max_bits.load(Ordering::Relaxed));
        self.inner.observed_noise().map(|inner| inner + own)
    }
    fn line<'a>(&'a self, direction: &[f64], origin: f64, duration: f64) -> Result<Box<dyn Signal1d + 'a>> {
        Ok(Box::new(GenericLine::new(self, direction, origin, duration)?))
    }
}

/// Deterministic bounded "white" noise: `amplitude·e^{iθ(t)}` with a phase
/// hashed from the bit pattern of `t`. Every query sees `|g| = amplitude`.
pub fn hashed_phase_noise(amplitude: f64, seed: u64) -> NoiseFn {
    Box::new(move |t: &[f64]| {
        let mut h = seed;
        for x in t {
            h = crate::rng::mix(h ^ x.to_bits());
        }
        let phase = (h >> 11) as f64 / (1u64 << 53) as f64 * std::f64::consts::TAU;
        Complex64::from_polar(amplitude, phase)
    })
}

/// Empirical characteristic-function ratio
/// `x(t) = φ_D(t+v)^{-1} · (1/n) Σ_ℓ e^{i⟨t+v, Y_ℓ⟩}` on the ball `‖t‖ ≤ T`.
pub struct EmpiricalCfSignal {
    samples: SampleMatrix,
    base: DistributionSpec,
    shift: Vec<f64>,
    /// `e^{i⟨v, Y_ℓ⟩}` per sample, shared by every line view.
    shift_phase: Vec<Complex64>,
    floor: f64,
    duration: f64,
    count: AtomicU64,
}

pub fn empirical_cf_signal(
    samples: SampleMatrix,
    base: &DistributionSpec,
    shift: Vec<f64>,
    floor: f64,
    duration: f64,
) -> Result<EmpiricalCfSignal> {
    if samples.d != base.dim || shift.len() != base.dim {
        return arg("samples, base and shift must share a dimension");
    }
    if samples.n == 0 {
        return arg("at least one sample is required");
    }
    if !(floor > 0.0) || !(duration > 0.0) {
        return arg("floor and duration must be positive");
    }
    let shift_phase = samples.rows().map(|y| Complex64::cis(dot(&shift, y))).collect();
    Ok(EmpiricalCfSignal { samples, base: base.clone(), shift, shift_phase, floor, duration, count: AtomicU64::new(0) })
}

impl EmpiricalCfSignal {
    pub fn samples(&self) -> &SampleMatrix {
        &self.samples
    }

    fn divisor(&self, u: &[f64]) -> Result<Complex64> {
        let phi = cf_eval(&self.base, u)?;
        let m = phi.norm();
        if m < self.floor {
            return Err(Error::DivisionFloor { radius: norm(u), value: m, floor: self.floor });
        }
        Ok(phi)
    }
}

impl SignalOracle for EmpiricalCfSignal {
    fn dim(&self) -> usize {
        self.base.dim
    }
    fn duration(&self) -> f64 {
        self.duration
    }
    fn query(&self, t: &[f64]) -> Result<Complex64> {
        if t.len() != self.base.dim {
            return arg("query has the wrong dimension");
        }
        in_ball(t, self.duration)?;
        let u: Vec<f64> = t.iter().zip(&self.shift).map(|(a, b)| a + b).collect();
        let phi = self.divisor(&u)?;
        self.count.fetch_add(1, Ordering::Relaxed);
        let sum: Complex64 = self.samples.rows().map(|y| Complex64::cis(dot(&u, y))).sum();
        Ok(sum / (self.samples.n as f64) / phi)
    }
    fn query_count(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }
    fn observed_noise(&self) -> Option<f64> {
        None
    }
    fn line<'a>(&'a self, direction: &[f64], origin: f64, duration: f64) -> Result<Box<dyn Signal1d + 'a>> {
        check_line(self, direction, origin, duration)?;
        Ok(Box::new(EmpiricalLine::new(self, direction, origin, duration)))
    }
}

/// Taylor order of the binned expansion; with `|τ(p - c)| ≤ 1/2` the
/// truncation error is below `0.5^13/13! < 2e-14` per sample.
const TAYLOR_TERMS: usize = 13;

/// Fast evaluation of the empirical CF along a line.
///
/// With `p_i = ⟨r, Y_i⟩`, `q_i = ⟨v, Y_i⟩` and `τ = origin + s`, the sum is
/// `Σ_i e^{i q_i} e^{i τ p_i}`. Projections are bucketed with width `h` so that
/// `|τ|·h/2 ≤ 1/2`, and within a bucket centered at `c` the factor
/// `e^{iτ(p-c)}` is expanded in a Taylor series, leaving per-bucket moments
/// `Σ e^{iq}(p-c)^m`. Each query then costs `O(buckets)` instead of `O(n)`;
/// the direct sum is used when it is cheaper.
struct EmpiricalLine<'a> {
    parent: &'a EmpiricalCfSignal,
    origin: f64,
    duration: f64,
    r_sq: f64,
    r_dot_v: f64,
    v_sq: f64,
    r_dot_m: f64,
    v_dot_m: f64,
    inv_n: f64,
    eval: LineSum,
}

enum LineSum {
    Direct { p: Vec<f64>, a: Vec<Complex64> },
    Binned { centers: Vec<f64>, moments: Vec<[Complex64; TAYLOR_TERMS]> },
}

impl<'a> EmpiricalLine<'a> {
    fn new(parent: &'a EmpiricalCfSignal, r: &[f64], origin: f64, duration: f64) -> Self {
        let v = &parent.shift;
        let n = parent.samples.n;
        let p: Vec<f64> = parent.samples.rows().map(|y| dot(r, y)).collect();
        let a = &parent.shift_phase;
        let tau_max = origin.abs().max((origin + duration).abs()).max(1e-300);
        let h = 1.0 / tau_max;
        let (lo, hi) = p.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, u), &x| (l.min(x), u.max(x)));
        let span_bins = ((hi - lo) / h).ceil() as usize + 1;
        let eval = if span_bins.saturating_mul(TAYLOR_TERMS + 4) < n {
            let mut dense: Vec<[Complex64; TAYLOR_TERMS]> = vec![[Complex64::new(0.0, 0.0); TAYLOR_TERMS]; span_bins];
            let mut used = vec![false; span_bins];
            for (pi, ai) in p.iter().zip(a) {
                let b = (((pi - lo) / h).floor() as usize).min(span_bins - 1);
                used[b] = true;
                let dx = pi - (lo + (b as f64 + 0.5) * h);
                let mut pow = 1.0;
                for m in dense[b].iter_mut() {
                    *m += ai * pow;
                    pow *= dx;
                }
            }
            // Fold the 1/m! factors into the moments once.
            let mut fact = 1.0;
            let mut inv_fact = [0.0; TAYLOR_TERMS];
            for (m, f) in inv_fact.iter_mut().enumerate() {
                if m > 0 {
                    fact *= m as f64;
                }
                *f = 1.0 / fact;
            }
            let mut centers = Vec::new();
            let mut moments = Vec::new();
            for (b, mut mom) in dense.into_iter().enumerate() {
                if used[b] {
                    for (m, f) in mom.iter_mut().zip(inv_fact) {
                        *m *= f;
                    }
                    centers.push(lo + (b as f64 + 0.5) * h);
                    moments.push(mom);
                }
            }
            LineSum::Binned { centers, moments }
        } else {
            LineSum::Direct { p, a: a.clone() }
        };
        let m = &parent.base.mean;
        EmpiricalLine {
            parent,
            origin,
            duration,
            r_sq: dot(r, r),
            r_dot_v: dot(r, v),
            v_sq: dot(v, v),
            r_dot_m: dot(r, m),
            v_dot_m: dot(v, m),
            inv_n: 1.0 / n as f64,
            eval,
        }
    }
}

impl Signal1d for EmpiricalLine<'_> {
    fn duration(&self) -> f64 {
        self.duration
    }

    fn eval(&self, s: f64) -> Result<Complex64> {
        check_point(s, self.duration)?;
        let tau = self.origin + s;
        let u_sq = (tau * tau * self.r_sq + 2.0 * tau * self.r_dot_v + self.v_sq).max(0.0);
        let base = &self.parent.base;
        let modulus = base.kind.radial_cf_sq(base.scale, u_sq);
        if modulus < self.parent.floor {
            return Err(Error::DivisionFloor { radius: u_sq.sqrt(), value: modulus, floor: self.parent.floor });
        }
        let phi = Complex64::from_polar(modulus, tau * self.r_dot_m + self.v_dot_m);
        self.parent.count.fetch_add(1, Ordering::Relaxed);
        let sum = match &self.eval {
            LineSum::Direct { p, a } => p.iter().zip(a).map(|(pi, ai)| ai * Complex64::cis(tau * pi)).sum(),
            LineSum::Binned { centers, moments } => {
                let it = Complex64::new(0.0, tau);
                let mut total = Complex64::new(0.0, 0.0);
                for (c, mom) in centers.iter().zip(moments) {
                    let mut acc = mom[TAYLOR_TERMS - 1];
                    for m in mom[..TAYLOR_TERMS - 1].iter().rev() {
                        acc = acc * it + m;
                    }
                    total += acc * Complex64::cis(tau * c);
                }
                total
            }
        };
        Ok(sum * self.inv_n / phi)
    }

    /// The direct sum advances every sample's phase by `e^{i·step·p_i}` per
    /// point, trading `n` complex exponentials per query for `n` products.
    fn eval_grid(&self, start: f64, step: f64, out: &mut [Complex64]) -> Result<()> {
        let last = start + step * out.len().saturating_sub(1) as f64;
        let inside = |s: f64| (0.0..=self.duration).contains(&s);
        let direct = match &self.eval {
            LineSum::Direct { p, a } if out.len() >= 4 && inside(start) && inside(last) => Some((p, a)),
            _ => None,
        };
        let Some((p, a)) = direct else {
            return out.iter_mut().enumerate().try_for_each(|(i, o)| {
                *o = self.eval((start + step * i as f64).clamp(0.0, self.duration))?;
                Ok(())
            });
        };
        let tau0 = self.origin + start;
        let mut z: Vec<Complex64> = p.iter().zip(a).map(|(pi, ai)| ai * Complex64::cis(tau0 * pi)).collect();
        let rot: Vec<Complex64> = p.iter().map(|pi| Complex64::cis(step * pi)).collect();
        for (i, o) in out.iter_mut().enumerate() {
            let tau = tau0 + step * i as f64;
            let u_sq = (tau * tau * self.r_sq + 2.0 * tau * self.r_dot_v + self.v_sq).max(0.0);
            let base = &self.parent.base;
            let modulus = base.kind.radial_cf_sq(base.scale, u_sq);
            if modulus < self.parent.floor {
                return Err(Error::DivisionFloor { radius: u_sq.sqrt(), value: modulus, floor: self.parent.floor });
            }
            let phi = Complex64::from_polar(modulus, tau * self.r_dot_m + self.v_dot_m);
            self.parent.count.fetch_add(1, Ordering::Relaxed);
            let mut sum = Complex64::new(0.0, 0.0);
            for (zi, ri) in z.iter_mut().zip(&rot) {
                sum += *zi;
                *zi *= ri;
            }
            *o = sum * self.inv_n / phi;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{sample_mixture, DistributionKind, MixtureModel};
    use crate::rng;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn constant_signal() {
        let s = exact_signal(vec![Tone::real(1.0, vec![0.0])], 10.0).unwrap();
        assert_eq!(s.query(&[3.0]).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn opposite_tones_sum_to_minus_one() {
        let pi = std::f64::consts::PI;
        let s = exact_signal(vec![Tone::real(0.5, vec![pi, 0.0]), Tone::real(0.5, vec![-pi, 0.0])], 2.0).unwrap();
        let v = s.query(&[1.0, 0.0]).unwrap();
        assert!((v - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn real_weights_give_hermitian_values() {
        let s = exact_signal(vec![Tone::real(0.7, vec![1.3]), Tone::real(0.2, vec![-0.4])], 5.0).unwrap();
        let a = s.query(&[2.1]).unwrap();
        let b = s.query(&[-2.1]).unwrap();
        assert!((a - b.conj()).norm() < 1e-15);
    }

    #[test]
    fn query_accounting_counts_every_evaluation() {
        let s = exact_signal(vec![Tone::real(1.0, vec![0.5, 0.5])], 5.0).unwrap();
        for i in 0..7 {
            s.query(&[i as f64 * 0.1, 0.0]).unwrap();
        }
        let line = s.line(&[0.6, 0.8], -2.0, 4.0).unwrap();
        for i in 0..5 {
            line.eval(i as f64).unwrap();
        }
        assert_eq!(s.query_count(), 12);
    }

    #[test]
    fn out_of_ball_queries_are_rejected() {
        let s = exact_signal(vec![Tone::real(1.0, vec![0.5])], 1.0).unwrap();
        assert!(matches!(s.query(&[1.5]), Err(Error::Domain(_))));
        assert!(s.line(&[1.0], 0.0, 2.0).is_err());
    }

    #[test]
    fn line_remap_phase_is_recoverable() {
        let w = Complex64::from_polar(0.8, 0.3);
        let f = 1.7;
        let s = exact_signal(vec![Tone::new(w, vec![f])], 10.0).unwrap();
        let line = s.line(&[1.0], -5.0, 10.0).unwrap();
        // On the line the tone reads (w e^{-i f 5}) e^{i f s}.
        let shifted = w * Complex64::cis(-f * 5.0);
        for s_ in [0.0, 1.3, 9.9] {
            let v = line.eval(s_).unwrap();
            assert!((v - shifted * Complex64::cis(f * s_)).norm() < 1e-12);
        }
        assert!((remap_weight(shifted, f, -5.0) - w).norm() < 1e-15);
    }

    #[test]
    fn grid_evaluation_matches_pointwise() {
        let tones = vec![Tone::new(Complex64::from_polar(0.7, 0.2), vec![1.3, -0.4]), Tone::real(0.3, vec![-2.0, 0.5])];
        let s = exact_signal(tones, 5000.0).unwrap();
        let line = s.line(&[0.6, 0.8], -2500.0, 5000.0).unwrap();
        let mut grid = vec![Complex64::new(0.0, 0.0); 300];
        line.eval_grid(17.0, 15.3, &mut grid).unwrap();
        assert_eq!(s.query_count(), 300);
        for (i, g) in grid.iter().enumerate() {
            let direct = line.eval(17.0 + 15.3 * i as f64).unwrap();
            assert!((g - direct).norm() < 1e-11, "{i}");
        }
        assert!(line.eval_grid(-10.0, 1.0, &mut grid).is_err());
    }

    #[test]
    fn empirical_grid_evaluation_matches_pointwise() {
        let base = DistributionSpec::centered(DistributionKind::Laplace, 2).unwrap();
        let m = MixtureModel::new(DistributionKind::Laplace, vec![1.0], vec![vec![0.3, -0.2]]).unwrap();
        let (x, _) = sample_mixture(&m, 500, 4).unwrap();
        let s = empirical_cf_signal(x, &base, vec![0.0, 0.0], 1e-3, 10.0).unwrap();
        let line = s.line(&[0.6, 0.8], -10.0, 20.0).unwrap();
        let mut grid = vec![Complex64::new(0.0, 0.0); 200];
        line.eval_grid(0.5, 0.09, &mut grid).unwrap();
        assert_eq!(s.query_count(), 200);
        for (i, g) in grid.iter().enumerate() {
            let direct = line.eval(0.5 + 0.09 * i as f64).unwrap();
            assert!((g - direct).norm() < 1e-11, "{i}");
        }
    }

    #[test]
    fn zero_noise_is_identity() {
        let s = exact_signal(vec![Tone::real(1.0, vec![0.5])], 3.0).unwrap();
        let noisy = inject_noise(exact_signal(vec![Tone::real(1.0, vec![0.5])], 3.0).unwrap(),
                                 Box::new(|_| Complex64::new(0.0, 0.0)), 0.0).unwrap();
        assert_eq!(noisy.query(&[1.0]).unwrap(), s.query(&[1.0]).unwrap());
    }

    #[test]
    fn constant_noise_shifts_every_query() {
        let c = Complex64::new(0.06, -0.08);
        let noisy = inject_noise(exact_signal(vec![Tone::real(1.0, vec![0.5])], 3.0).unwrap(),
                                 Box::new(move |_| c), 0.1).unwrap();
        for t in [0.0, 1.0, 2.5] {
            let v = noisy.query(&[t]).unwrap();
            assert!((v - c - Complex64::cis(0.5 * t)).norm() < 1e-15);
        }
        assert!((noisy.observed_noise().unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn tone_noise_max_deviation() {
        let noisy = inject_noise(exact_signal(vec![Tone::real(1.0, vec![2.0])], 10.0).unwrap(),
                                 Box::new(|t: &[f64]| Complex64::from_polar(0.05, 37.0 * t[0])), 0.05).unwrap();
        let mut dev: f64 = 0.0;
        for i in 0..=1000 {
            let t = i as f64 * 0.01;
            dev = dev.max((noisy.query(&[t]).unwrap() - Complex64::cis(2.0 * t)).norm());
        }
        assert!((dev - 0.05).abs() < 1e-12);
    }

    #[test]
    fn noise_bound_violation_is_reported() {
        let noisy = inject_noise(exact_signal(vec![Tone::real(1.0, vec![2.0])], 10.0).unwrap(),
                                 Box::new(|_| Complex64::new(0.2, 0.0)), 0.1).unwrap();
        assert!(matches!(noisy.query(&[0.0]), Err(Error::NoiseContract { .. })));
    }

    #[test]
    fn hashed_noise_has_exact_modulus() {
        let g = hashed_phase_noise(0.3, 4);
        for i in 0..50 {
            assert!((g(&[i as f64 * 0.37]).norm() - 0.3).abs() < 1e-15);
        }
        assert_eq!(g(&[1.5]), g(&[1.5]));
    }

    #[test]
    fn single_sample_empirical_signal() {
        let base = DistributionSpec::centered(DistributionKind::Laplace, 2).unwrap();
        let y = [0.4, -1.2];
        let x = empirical_cf_signal(SampleMatrix::from_rows(&[y.to_vec()]).unwrap(), &base, vec![0.0, 0.0], 1e-6, 4.0)
            .unwrap();
        let t = [1.0, 0.5];
        let expect = Complex64::cis(dot(&t, &y)) / cf_eval(&base, &t).unwrap();
        assert!((x.query(&t).unwrap() - expect).norm() < 1e-14);
    }

    #[test]
    fn point_mass_empirical_signal_is_a_pure_tone() {
        let mu = vec![0.7, -0.2];
        let base = DistributionSpec::centered(DistributionKind::PointMass, 2).unwrap();
        let samples = SampleMatrix::from_rows(&vec![mu.clone(); 4]).unwrap();
        let x = empirical_cf_signal(samples, &base, vec![0.0, 0.0], 0.5, 3.0).unwrap();
        let t = [1.1, 2.0];
        assert!((x.query(&t).unwrap() - Complex64::cis(dot(&t, &mu))).norm() < 1e-14);
    }

    #[test]
    fn division_floor_is_enforced() {
        let base = DistributionSpec::centered(DistributionKind::Laplace, 1).unwrap();
        let x = empirical_cf_signal(SampleMatrix::from_rows(&[vec![0.0]]).unwrap(), &base, vec![0.0], 0.5, 5.0)
            .unwrap();
        assert!(x.query(&[1.0]).is_ok());
        assert!(matches!(x.query(&[2.0]), Err(Error::DivisionFloor { .. })));
    }

    #[test]
    fn shifted_empirical_signal_concentrates() {
        let (t_dur, n) = (5.0, 100_000usize);
        let model = MixtureModel::new(DistributionKind::Laplace, vec![1.0], vec![vec![0.0, 0.0]]).unwrap();
        let (samples, _) = sample_mixture(&model, n, 8).unwrap();
        let base = DistributionSpec::centered(DistributionKind::Laplace, 2).unwrap();
        let v = vec![2.0 * t_dur, 0.0];
        let floor = 2.0 / (2.0 + 9.0 * t_dur * t_dur);
        let x = empirical_cf_signal(samples, &base, v, floor, t_dur).unwrap();
        let bound = 3.0 * (2.0 + (3.0 * t_dur).powi(2)) / 2.0 * ((50.0f64 * 20.0).ln() / n as f64).sqrt();
        let mut r = rng::rng(2);
        for _ in 0..50 {
            let ang: f64 = r.gen_range(0.0..std::f64::consts::TAU);
            let rad: f64 = r.gen_range(0.0..t_dur);
            let t = [rad * ang.cos(), rad * ang.sin()];
            // The only tone is w = e^{i⟨v, 0⟩} = 1 at frequency 0.
            let dev = (x.query(&t).unwrap() - Complex64::new(1.0, 0.0)).norm();
            assert!(dev <= bound, "deviation {dev} > {bound}");
        }
    }

    #[test]
    fn binned_line_matches_direct_evaluation() {
        let model = MixtureModel::new(DistributionKind::Laplace, vec![0.6, 0.4], vec![vec![0.5, -1.0], vec![-2.0, 0.3]])
            .unwrap();
        let (samples, _) = sample_mixture(&model, 40_000, 3).unwrap();
        let base = DistributionSpec::centered(DistributionKind::Laplace, 2).unwrap();
        let x = empirical_cf_signal(samples, &base, vec![3.0, 4.0], 1e-6, 12.0).unwrap();
        let dir = [0.6, -0.8];
        let line = x.line(&dir, -3.5, 7.0).unwrap();
        for s in [0.0, 0.7, 3.5, 6.99] {
            let tau = -3.5 + s;
            let direct = x.query(&[tau * dir[0], tau * dir[1]]).unwrap();
            let fast = line.eval(s).unwrap();
            assert!((direct - fast).norm() < 1e-10 * direct.norm().max(1.0), "s={s}");
        }
    }

    proptest! {
        #[test]
        fn union_of_tone_sets_is_pointwise_sum(f1 in -5.0f64..5.0, f2 in -5.0f64..5.0, w1 in 0.1f64..1.0,
                                               w2 in 0.1f64..1.0, t in -3.0f64..3.0) {
            prop_assume!((f1 - f2).abs() > 1e-6);
            let a = exact_signal(vec![Tone::real(w1, vec![f1])], 3.0).unwrap();
            let b = exact_signal(vec![Tone::real(w2, vec![f2])], 3.0).unwrap();
            let ab = exact_signal(vec![Tone::real(w1, vec![f1]), Tone::real(w2, vec![f2])], 3.0).unwrap();
            let lhs = ab.query(&[t]).unwrap();
            let rhs = a.query(&[t]).unwrap() + b.query(&[t]).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }
    }
}
