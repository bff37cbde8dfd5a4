//! Base distributions with closed-form characteristic functions, mixture
//! models built from their translates, and the noise-oblivious contamination
//! generator.
//!
//! The Laplace family is normalized by its characteristic function,
//! `φ(t) = 2 / (2 + ‖t‖²)`, in every dimension. It is sampled as a Gaussian
//! scale mixture `X = μ + √W·G` with `W ~ Exp(1)` and `G ~ N(0, I)`:
//! `E exp(-W‖t‖²/2) = 1 / (1 + ‖t‖²/2)`, which is exactly the target.

use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistributionKind {
    Laplace,
    Gaussian,
    PointMass,
}

impl DistributionKind {
    /// Centered characteristic function as a function of the radius `‖t‖`
    /// (all supported families are radial).
    pub fn radial_cf(self, scale: f64, r: f64) -> f64 {
        let u = scale * r;
        match self {
            DistributionKind::Laplace => 2.0 / (2.0 + u * u),
            DistributionKind::Gaussian => (-0.5 * u * u).exp(),
            DistributionKind::PointMass => 1.0,
        }
    }

    /// Same as [`radial_cf`](Self::radial_cf) but from the squared radius,
    /// avoiding a square root in hot loops.
    #[inline]
    pub fn radial_cf_sq(self, scale: f64, r2: f64) -> f64 {
        let u2 = scale * scale * r2;
        match self {
            DistributionKind::Laplace => 2.0 / (2.0 + u2),
            DistributionKind::Gaussian => (-0.5 * u2).exp(),
            DistributionKind::PointMass => 1.0,
        }
    }

    /// Variance of each coordinate at unit scale.
    pub fn coordinate_variance(self) -> f64 {
        match self {
            DistributionKind::Laplace | DistributionKind::Gaussian => 1.0,
            DistributionKind::PointMass => 0.0,
        }
    }

    /// Draw a centered, unit-scale vector into `out`.
    pub fn sample_centered<R: Rng + ?Sized>(self, rng: &mut R, out: &mut [f64]) {
        match self {
            DistributionKind::PointMass => out.iter_mut().for_each(|x| *x = 0.0),
            DistributionKind::Gaussian => {
                for x in out.iter_mut() {
                    *x = rng.sample(StandardNormal);
                }
            }
            DistributionKind::Laplace => {
                let w: f64 = rng.sample(Exp1);
                let s = w.sqrt();
                for x in out.iter_mut() {
                    let g: f64 = rng.sample(StandardNormal);
                    *x = s * g;
                }
            }
        }
    }
}

/// A translated base distribution `D(μ)` with identity covariance times `scale²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    pub kind: DistributionKind,
    pub dim: usize,
    pub mean: Vec<f64>,
    pub scale: f64,
}

impl DistributionSpec {
    pub fn new(kind: DistributionKind, mean: Vec<f64>) -> Result<Self> {
        Self::with_scale(kind, mean, 1.0)
    }

    pub fn with_scale(kind: DistributionKind, mean: Vec<f64>, scale: f64) -> Result<Self> {
        if mean.is_empty() {
            return arg("distribution dimension must be positive");
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return arg(format!("scale must be positive and finite, got {scale}"));
        }
        if mean.iter().any(|m| !m.is_finite()) {
            return arg("mean must be finite");
        }
        Ok(DistributionSpec { kind, dim: mean.len(), mean, scale })
    }

    /// Centered distribution of the given kind in dimension `d`.
    pub fn centered(kind: DistributionKind, d: usize) -> Result<Self> {
        Self::new(kind, vec![0.0; d])
    }

    /// The same family translated to a new mean.
    pub fn translated(&self, mean: &[f64]) -> Result<Self> {
        Self::with_scale(self.kind, mean.to_vec(), self.scale)
    }
}

/// Characteristic function `E exp(i⟨t, X⟩)` in closed form.
pub fn cf_eval(spec: &DistributionSpec, t: &[f64]) -> Result<Complex64> {
    if t.len() != spec.dim {
        return arg(format!("t has length {} but distribution has dimension {}", t.len(), spec.dim));
    }
    let mut r2 = 0.0;
    let mut phase = 0.0;
    for (ti, mi) in t.iter().zip(&spec.mean) {
        r2 += ti * ti;
        phase += ti * mi;
    }
    let modulus = spec.kind.radial_cf_sq(spec.scale, r2);
    Ok(Complex64::from_polar(modulus, phase))
}

/// Decay exponents: SFD means `|φ(t)| ≳ d^{-c1} T^{-c2}` on the radius-`T`
/// ball, FFD means `|φ(t)| ≲ d^{-c1p} T^{-c2p}` outside it.
/// `c2p = ∞` marks the absence of a fast-decaying part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SfdFfdParams {
    pub c1: f64,
    pub c2: f64,
    pub c1p: f64,
    pub c2p: f64,
}

impl SfdFfdParams {
    /// Exponents witnessed by the Laplace family (`2/(2+T²) ≥ T^{-2}/2` for `T ≥ 1`).
    pub fn laplace() -> Self {
        SfdFfdParams { c1: 0.0, c2: 2.0, c1p: 0.0, c2p: f64::INFINITY }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("c1", self.c1), ("c2", self.c2), ("c1p", self.c1p), ("c2p", self.c2p)] {
            if !(v >= 0.0) {
                return arg(format!("{name} must be non-negative, got {v}"));
            }
        }
        Ok(())
    }

    /// The lower bound `d^{-c1} T^{-c2}` that an SFD family promises.
    pub fn sfd_bound(&self, d: usize, t: f64) -> f64 {
        (d as f64).powf(-self.c1) * t.powf(-self.c2)
    }
}

/// `inf_{‖t‖ ≤ T} |φ_D(t)|`. All supported families decrease radially, so the
/// infimum is attained on the sphere of radius `T`.
pub fn sfd_floor(spec: &DistributionSpec, params: &SfdFfdParams, t: f64) -> Result<f64> {
    params.validate()?;
    if !(t > 0.0) {
        return arg(format!("T must be positive, got {t}"));
    }
    Ok(spec.kind.radial_cf(spec.scale, t))
}

/// Row-major `n × d` matrix of sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    pub n: usize,
    pub d: usize,
    pub data: Vec<f64>,
}

impl SampleMatrix {
    pub fn new(n: usize, d: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * d {
            return arg(format!("sample data has {} entries, expected {}", data.len(), n * d));
        }
        Ok(SampleMatrix { n, d, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != d) {
            return arg("ragged sample rows");
        }
        Ok(SampleMatrix { n: rows.len(), d, data: rows.concat() })
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.d.max(1)).take(self.n)
    }

    /// One coordinate as a column vector.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }

    /// Subtract `c` from every row.
    pub fn centered_at(&self, c: &[f64]) -> SampleMatrix {
        let mut data = self.data.clone();
        for row in data.chunks_exact_mut(self.d) {
            for (x, ci) in row.iter_mut().zip(c) {
                *x -= ci;
            }
        }
        SampleMatrix { n: self.n, d: self.d, data }
    }

    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.d];
        for row in self.rows() {
            for (mi, x) in m.iter_mut().zip(row) {
                *mi += x;
            }
        }
        m.iter_mut().for_each(|x| *x /= self.n as f64);
        m
    }
}

/// `Σ w_j D(μ_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureModel {
    pub base: DistributionKind,
    #[serde(default = "unit_scale")]
    pub scale: f64,
    pub dim: usize,
    pub weights: Vec<f64>,
    pub means: Vec<Vec<f64>>,
}

fn unit_scale() -> f64 {
    1.0
}

impl MixtureModel {
    pub fn new(base: DistributionKind, weights: Vec<f64>, means: Vec<Vec<f64>>) -> Result<Self> {
        let dim = means.first().map_or(0, |m| m.len());
        let model = MixtureModel { base, scale: 1.0, dim, weights, means };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if self.means.is_empty() || self.weights.len() != self.means.len() {
            return arg("mixture needs matching, nonempty weight and mean lists");
        }
        if self.dim == 0 || self.means.iter().any(|m| m.len() != self.dim) {
            return arg("all mixture means must have the model dimension");
        }
        if self.weights.iter().any(|w| !(*w >= 0.0 && *w <= 1.0)) {
            return arg("mixture weights must lie in [0, 1]");
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 * self.weights.len() as f64 {
            return arg(format!("mixture weights sum to {total}, not 1"));
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.means.len()
    }

    /// Minimum pairwise mean distance (`∞` for a single component).
    pub fn gamma(&self) -> f64 {
        let mut g = f64::INFINITY;
        for i in 0..self.k() {
            for j in 0..i {
                g = g.min(dist(&self.means[i], &self.means[j]));
            }
        }
        g
    }

    pub fn w_min(&self) -> f64 {
        self.weights.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// `B = max_j ‖μ_j‖`.
    pub fn mean_bound(&self) -> f64 {
        self.means.iter().map(|m| norm(m)).fold(0.0, f64::max)
    }

    /// Characteristic function of the mixture.
    pub fn cf(&self, t: &[f64]) -> Complex64 {
        let r2: f64 = t.iter().map(|x| x * x).sum();
        let modulus = self.base.radial_cf_sq(self.scale, r2);
        self.weights
            .iter()
            .zip(&self.means)
            .map(|(w, m)| Complex64::from_polar(w * modulus, dot(t, m)))
            .sum()
    }
}

/// Draw `n` i.i.d. points from the mixture; returns the points and the
/// generating component of each.
pub fn sample_mixture(model: &MixtureModel, n: usize, seed: u64) -> Result<(SampleMatrix, Vec<usize>)> {
    model.validate()?;
    if n == 0 {
        return arg("n must be at least 1");
    }
    let picker = WeightedIndex::new(&model.weights).map_err(|e| Error::Argument(e.to_string()))?;
    let mut rng = rng::rng(seed);
    let d = model.dim;
    let mut data = vec![0.0; n * d];
    let mut labels = Vec::with_capacity(n);
    for row in data.chunks_exact_mut(d) {
        let j = picker.sample(&mut rng);
        model.base.sample_centered(&mut rng, row);
        for (x, m) in row.iter_mut().zip(&model.means[j]) {
            *x = m + model.scale * *x;
        }
        labels.push(j);
    }
    Ok((SampleMatrix { n, d, data }, labels))
}

/// Points of which a `⌈αn⌉` subset was drawn around adversarial means.
/// `inlier_mask` is ground truth for evaluation only.
#[derive(Debug, Clone, PartialEq)]
pub struct ContaminatedSample {
    pub points: SampleMatrix,
    pub inlier_mask: Vec<bool>,
    pub alpha: f64,
}

/// Number of corrupted rows, `⌈αn⌉`, robust to representation error in `α·n`.
pub fn corrupted_count(alpha: f64, n: usize) -> usize {
    let x = alpha * n as f64;
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r as usize
    } else {
        x.ceil() as usize
    }
}

pub fn sample_noise_oblivious(
    spec: &DistributionSpec,
    mu: &[f64],
    adversary_means: &[Vec<f64>],
    alpha: f64,
    n: usize,
    seed: u64,
) -> Result<ContaminatedSample> {
    if !(0.0..1.0).contains(&alpha) {
        return arg(format!("alpha must lie in [0, 1), got {alpha}"));
    }
    if mu.len() != spec.dim {
        return arg("mu has the wrong dimension");
    }
    if alpha > 0.0 && adversary_means.is_empty() {
        return arg("alpha > 0 requires at least one adversary mean");
    }
    if adversary_means.iter().any(|z| z.len() != spec.dim) {
        return arg("adversary means must have the distribution dimension");
    }
    let bad = corrupted_count(alpha, n);
    let mut rng = rng::rng(seed);
    let mut mask: Vec<bool> = (0..n).map(|i| i >= bad).collect();
    mask.shuffle(&mut rng);
    let d = spec.dim;
    let mut data = vec![0.0; n * d];
    let mut next_adversary = 0usize;
    for (row, inlier) in data.chunks_exact_mut(d).zip(&mask) {
        let center: &[f64] = if *inlier {
            mu
        } else {
            let z = &adversary_means[next_adversary % adversary_means.len()];
            next_adversary += 1;
            z
        };
        spec.kind.sample_centered(&mut rng, row);
        for (x, c) in row.iter_mut().zip(center) {
            *x = c + spec.scale * *x;
        }
    }
    Ok(ContaminatedSample { points: SampleMatrix { n, d, data }, inlier_mask: mask, alpha })
}

/// `k` points drawn uniformly from the ball of the given radius, conditioned
/// on pairwise distances of at least `gamma` (by rejection, restarting after
/// repeated misses).
pub fn random_separated_means<R: Rng + ?Sized>(
    rng: &mut R,
    d: usize,
    k: usize,
    radius: f64,
    gamma: f64,
) -> Result<Vec<Vec<f64>>> {
    if d == 0 || !(radius > 0.0) || !(gamma >= 0.0) {
        return arg("need d ≥ 1, a positive radius and a non-negative separation");
    }
    const RESTARTS: usize = 200;
    const MISSES: usize = 2000;
    for _ in 0..RESTARTS {
        let mut out: Vec<Vec<f64>> = Vec::with_capacity(k);
        let mut misses = 0;
        while out.len() < k && misses < MISSES {
            let g: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let r = radius * rng.gen::<f64>().powf(1.0 / d as f64) / norm(&g).max(f64::MIN_POSITIVE);
            let p: Vec<f64> = g.iter().map(|x| x * r).collect();
            if out.iter().all(|q| dist(q, &p) >= gamma) {
                out.push(p);
            } else {
                misses += 1;
            }
        }
        if out.len() == k {
            return Ok(out);
        }
    }
    Err(Error::Feasibility(format!("could not place {k} points {gamma}-apart in a radius-{radius} ball in dimension {d}")))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Euclidean distance.
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn separated_means_respect_the_constraints() {
        let mut g = rng::rng(3);
        for (d, k, gamma) in [(1, 3, 1.0), (4, 3, 0.5), (2, 5, 0.6)] {
            let m = random_separated_means(&mut g, d, k, 1.0_f64.max(gamma * k as f64 / 2.0), gamma).unwrap();
            assert_eq!(m.len(), k);
            for (i, a) in m.iter().enumerate() {
                assert!(norm(a) <= 1.0_f64.max(gamma * k as f64 / 2.0) + 1e-12);
                assert!(m[i + 1..].iter().all(|b| dist(a, b) >= gamma));
            }
        }
        assert!(matches!(random_separated_means(&mut g, 1, 5, 1.0, 1.0), Err(Error::Feasibility(_))));
    }

    fn lap1() -> DistributionSpec {
        DistributionSpec::centered(DistributionKind::Laplace, 1).unwrap()
    }

    #[test]
    fn cf_at_origin_is_one() {
        let v = cf_eval(&lap1(), &[0.0]).unwrap();
        assert_eq!(v, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn laplace_cf_at_sqrt2_is_half() {
        let v = cf_eval(&lap1(), &[2f64.sqrt()]).unwrap();
        assert!((v.re - 0.5).abs() < 1e-15 && v.im.abs() < 1e-15);
    }

    #[test]
    fn gaussian_cf_at_one() {
        let g = DistributionSpec::centered(DistributionKind::Gaussian, 1).unwrap();
        let v = cf_eval(&g, &[1.0]).unwrap();
        assert!((v.re - 0.606_530_659_712_633_4).abs() < 1e-12);
    }

    #[test]
    fn cf_dimension_mismatch_is_an_argument_error() {
        assert!(matches!(cf_eval(&lap1(), &[1.0, 2.0]), Err(Error::Argument(_))));
    }

    #[test]
    fn floors() {
        let p = SfdFfdParams::laplace();
        assert!((sfd_floor(&lap1(), &p, 1.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((sfd_floor(&lap1(), &p, 1e-9).unwrap() - 1.0).abs() < 1e-15);
        let g = DistributionSpec::centered(DistributionKind::Gaussian, 1).unwrap();
        assert!((sfd_floor(&g, &p, 2.0).unwrap() - 0.135_335_283_236_612_7).abs() < 1e-12);
        assert!(sfd_floor(&g, &p, 0.0).is_err());
    }

    #[test]
    fn point_mass_rows_are_the_mean() {
        let m = MixtureModel::new(DistributionKind::PointMass, vec![1.0], vec![vec![1.5, -2.0]]).unwrap();
        let (x, labels) = sample_mixture(&m, 3, 9).unwrap();
        for r in x.rows() {
            assert_eq!(r, &[1.5, -2.0]);
        }
        assert_eq!(labels, vec![0, 0, 0]);
    }

    #[test]
    fn zero_weight_component_is_never_drawn() {
        let m = MixtureModel::new(DistributionKind::Gaussian, vec![1.0, 0.0], vec![vec![0.0], vec![5.0]]).unwrap();
        let (_, labels) = sample_mixture(&m, 100, 3).unwrap();
        assert!(labels.iter().all(|&l| l == 0));
    }

    #[test]
    fn laplace_sample_mean_is_centered() {
        let m = MixtureModel::new(DistributionKind::Laplace, vec![1.0], vec![vec![0.0]]).unwrap();
        let n = 100_000;
        let (x, _) = sample_mixture(&m, n, 11).unwrap();
        let mean = x.mean()[0];
        assert!(mean.abs() <= 4.0 * (1.0 / n as f64).sqrt(), "mean {mean}");
        let var = x.rows().map(|r| r[0] * r[0]).sum::<f64>() / n as f64;
        assert!((var - 1.0).abs() < 0.05, "variance {var}");
    }

    #[test]
    fn laplace_sampler_matches_closed_form_cf() {
        let spec = DistributionSpec::centered(DistributionKind::Laplace, 2).unwrap();
        let m = MixtureModel::new(DistributionKind::Laplace, vec![1.0], vec![vec![0.0, 0.0]]).unwrap();
        let n = 100_000;
        let (x, _) = sample_mixture(&m, n, 21).unwrap();
        let mut r = rng::rng(4);
        for _ in 0..20 {
            let t = [r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0)];
            let emp: Complex64 =
                x.rows().map(|y| Complex64::from_polar(1.0, dot(&t, y))).sum::<Complex64>() / n as f64;
            let exact = cf_eval(&spec, &t).unwrap();
            assert!((emp - exact).norm() <= 5.0 / (n as f64).sqrt(), "t={t:?}");
        }
    }

    #[test]
    fn mixture_sampling_is_bit_reproducible() {
        let m = MixtureModel::new(DistributionKind::Laplace, vec![0.3, 0.7], vec![vec![1.0, 0.0], vec![0.0, 1.0]])
            .unwrap();
        let a = sample_mixture(&m, 50, 77).unwrap();
        let b = sample_mixture(&m, 50, 77).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn contamination_counts() {
        let spec = DistributionSpec::centered(DistributionKind::Laplace, 2).unwrap();
        let s = sample_noise_oblivious(&spec, &[0.0, 0.0], &[vec![9.0, 9.0]], 0.1, 1000, 1).unwrap();
        assert_eq!(s.inlier_mask.iter().filter(|m| !**m).count(), 100);
        let clean = sample_noise_oblivious(&spec, &[0.0, 0.0], &[], 0.0, 10, 1).unwrap();
        assert!(clean.inlier_mask.iter().all(|m| *m));
        assert!(sample_noise_oblivious(&spec, &[0.0, 0.0], &[], 0.2, 10, 1).is_err());
    }

    #[test]
    fn adversary_playing_truth_matches_clean_distribution() {
        let spec = DistributionSpec::centered(DistributionKind::Laplace, 1).unwrap();
        let n = 50_000;
        let a = sample_noise_oblivious(&spec, &[0.0], &[vec![0.0]], 0.5, n, 5).unwrap();
        let mean = a.points.mean()[0];
        assert!(mean.abs() < 4.0 / (n as f64).sqrt());
    }

    proptest! {
        #[test]
        fn cf_bounded_and_hermitian(kind in 0usize..3, t in proptest::collection::vec(-10.0f64..10.0, 3),
                                    mu in proptest::collection::vec(-3.0f64..3.0, 3)) {
            let kind = [DistributionKind::Laplace, DistributionKind::Gaussian, DistributionKind::PointMass][kind];
            let spec = DistributionSpec::new(kind, mu).unwrap();
            let v = cf_eval(&spec, &t).unwrap();
            prop_assert!(v.norm() <= 1.0 + 1e-12);
            let neg: Vec<f64> = t.iter().map(|x| -x).collect();
            let w = cf_eval(&spec, &neg).unwrap();
            prop_assert!((w - v.conj()).norm() < 1e-12);
        }

        #[test]
        fn laplace_witnesses_sfd_exponents(t in 1.0f64..1e4) {
            let f = sfd_floor(&DistributionSpec::centered(DistributionKind::Laplace, 3).unwrap(),
                              &SfdFfdParams::laplace(), t).unwrap();
            prop_assert!(f >= 0.5 * t.powi(-2));
        }
    }
}
