//! Probability amplification by repetition and greedy clustering.
//!
//! A runner that is accurate with probability at least 2/3 is run `R` times
//! with independent seeds. Rounds whose estimates are not `γ/2` separated are
//! discarded, the rest are pooled, and a mean is accepted when at least
//! `3R/5` pooled estimates lie within `2ε'` of it. Good rounds then contribute
//! one point near every true mean, so each true mean produces a dense cluster,
//! while a cluster of bad points alone cannot reach the density threshold.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::complex_median;
use crate::distributions::dist;
use crate::error::{arg, Error, Result};
use crate::rng;
use crate::signal::Tone;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoostParams {
    pub k: usize,
    pub gamma: f64,
    /// Target mean accuracy `ε`.
    pub eps: f64,
    /// Target weight accuracy.
    pub eps_w: f64,
    /// Failure probability `δ`.
    pub delta: f64,
}

impl BoostParams {
    /// `R = ⌈(225/2)·ln(1/δ)⌉`.
    pub fn rounds(&self) -> usize {
        (112.5 * (1.0 / self.delta).ln()).ceil() as usize
    }

    /// `ε' = min(ε/3, γ/16)`.
    pub fn radius(&self) -> f64 {
        (self.eps / 3.0).min(self.gamma / 16.0)
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return arg("boost needs k ≥ 1");
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return arg("boost delta must lie in (0, 1)");
        }
        if !(self.eps > 0.0) || !(self.gamma > 0.0) {
            return arg("boost eps and gamma must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoostOutput {
    pub tones: Vec<Tone>,
    pub rounds: usize,
    pub accepted: usize,
}

/// Whether a round's estimates are `γ/2` separated and complete.
fn acceptable(tones: &[Tone], params: &BoostParams) -> bool {
    tones.len() == params.k
        && tones.iter().enumerate().all(|(i, a)| tones[i + 1..].iter().all(|b| dist(&a.freq, &b.freq) > params.gamma / 2.0))
}

/// Greedy clustering of pooled tones; `threshold` is the required count.
pub fn cluster_pool(pool: &[Tone], k: usize, radius: f64, threshold: f64) -> Result<Vec<Tone>> {
    // Points within 2ε' share their first coordinate to 2ε', so a window
    // scan over the sorted first coordinate finds all neighbours.
    let mut order: Vec<usize> = (0..pool.len()).collect();
    order.sort_by(|&a, &b| pool[a].freq[0].total_cmp(&pool[b].freq[0]));
    let sorted: Vec<&Tone> = order.iter().map(|&i| &pool[i]).collect();
    let mut alive = vec![true; sorted.len()];
    let neighbours = |i: usize, r: f64, alive: &[bool]| -> Vec<usize> {
        let x = sorted[i].freq[0];
        let lo = sorted.partition_point(|t| t.freq[0] < x - r);
        let hi = sorted.partition_point(|t| t.freq[0] <= x + r);
        (lo..hi).filter(|&j| alive[j] && dist(&sorted[j].freq, &sorted[i].freq) <= r).collect()
    };
    let mut out = Vec::with_capacity(k);
    while out.len() < k {
        let best = (0..sorted.len())
            .filter(|&i| alive[i])
            .map(|i| (i, neighbours(i, 2.0 * radius, &alive).len()))
            .filter(|&(_, c)| c as f64 >= threshold)
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)));
        let Some((i, _)) = best else { break };
        let near: Vec<_> = neighbours(i, 4.0 * radius, &alive).iter().map(|&j| sorted[j].weight).collect();
        out.push(Tone::new(complex_median(&near), sorted[i].freq.clone()));
        for j in neighbours(i, 6.0 * radius, &alive) {
            alive[j] = false;
        }
    }
    if out.len() < k {
        return Err(Error::BoostFailure { found: out.len(), needed: k });
    }
    Ok(out)
}

/// Runs `runner` on `R` independent seeds and clusters the accepted rounds.
/// A runner error counts as a rejected round.
pub fn boost<F>(runner: F, params: &BoostParams, seed: u64) -> Result<BoostOutput>
where
    F: Fn(u64) -> Result<Vec<Tone>> + Sync,
{
    params.validate()?;
    let rounds = params.rounds();
    let results: Vec<Option<Vec<Tone>>> = (0..rounds)
        .into_par_iter()
        .map(|r| runner(rng::child(seed, r as u64)).ok().filter(|t| acceptable(t, params)))
        .collect();
    let accepted = results.iter().filter(|r| r.is_some()).count();
    let pool: Vec<Tone> = results.into_iter().flatten().flatten().collect();
    let tones = cluster_pool(&pool, params.k, params.radius(), 0.6 * rounds as f64)?;
    Ok(BoostOutput { tones, rounds, accepted })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::Rng;

    fn truth() -> Vec<Tone> {
        vec![Tone::real(0.6, vec![0.0, 1.0]), Tone::real(0.4, vec![1.0, 0.0])]
    }

    fn params() -> BoostParams {
        BoostParams { k: 2, gamma: 1.0, eps: 0.03, eps_w: 0.05, delta: 0.05 }
    }

    #[test]
    fn schedule_constants() {
        assert_eq!(params().rounds(), (112.5 * 20f64.ln()).ceil() as usize);
        assert!((params().radius() - 0.01).abs() < 1e-15);
        let p = BoostParams { gamma: 0.08, ..params() };
        assert!((p.radius() - 0.005).abs() < 1e-15);
    }

    #[test]
    fn exact_runner_returns_its_tones() {
        let out = boost(|_| Ok(truth()), &params(), 1).unwrap();
        assert_eq!(out.accepted, out.rounds);
        for t in truth() {
            assert!(out.tones.iter().any(|o| o.freq == t.freq && o.weight == t.weight));
        }
    }

    #[test]
    fn weights_use_the_pooled_median() {
        let mut pool = Vec::new();
        for i in 0..100 {
            let w = if i < 60 { 0.5 } else { 0.9 };
            pool.push(Tone::real(w, vec![1e-4 * (i % 3) as f64]));
        }
        let out = cluster_pool(&pool, 1, 0.01, 60.0).unwrap();
        assert_eq!(out[0].weight, Complex64::new(0.5, 0.0));
    }

    #[test]
    fn a_majority_of_good_rounds_suffices() {
        // 61% good, the rest garbage that is separated but wrong.
        let p = params();
        let r = p.rounds();
        let good = (0.61 * r as f64).ceil() as usize;
        let mut g = rng::rng(9);
        let mut pool = Vec::new();
        for i in 0..r {
            if i < good {
                for t in truth() {
                    let f: Vec<f64> = t.freq.iter().map(|x| x + g.gen_range(-0.005..0.005)).collect();
                    pool.push(Tone::new(t.weight, f));
                }
            } else {
                pool.push(Tone::real(0.9, vec![g.gen_range(-5.0..5.0), 3.0]));
                pool.push(Tone::real(0.1, vec![g.gen_range(-5.0..5.0), -3.0]));
            }
        }
        let out = cluster_pool(&pool, 2, p.radius(), 0.6 * r as f64).unwrap();
        for t in truth() {
            let best = out.iter().map(|o| dist(&o.freq, &t.freq)).fold(f64::INFINITY, f64::min);
            assert!(best <= p.eps);
        }
    }

    #[test]
    fn too_few_good_rounds_is_a_failure() {
        let p = params();
        let out = boost(|s| if s % 2 == 0 { Ok(truth()) } else { Err(crate::Error::Argument("x".into())) }, &p, 3);
        // About half the rounds succeed, below the 3/5 density requirement.
        assert!(matches!(out, Err(Error::BoostFailure { .. })));
    }

    #[test]
    fn unseparated_rounds_are_rejected() {
        let p = params();
        let close = vec![Tone::real(0.5, vec![0.0, 0.0]), Tone::real(0.5, vec![0.1, 0.0])];
        assert!(!acceptable(&close, &p));
        assert!(acceptable(&truth(), &p));
        assert!(!acceptable(&truth()[..1], &p));
    }
}
