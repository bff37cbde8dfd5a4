//! Dense symmetric tensors and the moment tensors of Laplace mixtures.
//!
//! For `X ~ Lap(μ, I_d)`, i.e. `X = μ + √W·G` with `W ~ Exp(1)` and
//! `G ~ N(0, I_d)`, the odd moments of `√W·G` vanish and
//! `E (√W G)^{⊗s} = (s!/2^{s/2}) Sym(I^{⊗s/2})`, so
//!
//! ```text
//! E X^{⊗r} = Σ_{s even} r!/(r-s)! · 2^{-s/2} · Sym(μ^{⊗(r-s)} ⊗ I^{⊗s/2}).
//! ```
//!
//! Mixtures whose moment tensors nearly agree can still have far-apart means;
//! [`moment_closeness_search`] looks for such pairs by random search.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{dist, sample_mixture, DistributionKind, MixtureModel, SampleMatrix};
use crate::error::{arg, Error, Result};
use crate::rng;
use crate::sftd::matching::assign;

/// Largest order and dimension accepted by [`sym`] and the moment formulas.
pub const MAX_ORDER: usize = 6;
pub const MAX_DIM: usize = 6;
/// Largest dense tensor built by any operation here.
pub const MAX_ENTRIES: usize = 1 << 24;

/// A dense order-`r` tensor over `R^d`, stored row-major (the first index is
/// the most significant).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymTensor {
    pub order: usize,
    pub dim: usize,
    pub entries: Vec<f64>,
}

fn entry_count(order: usize, dim: usize) -> Result<usize> {
    let mut n: usize = 1;
    for _ in 0..order {
        n = match n.checked_mul(dim) {
            Some(m) if m <= MAX_ENTRIES => m,
            _ => {
                return Err(Error::Feasibility(format!(
                    "a dense order-{order} tensor in dimension {dim} exceeds {MAX_ENTRIES} entries"
                )))
            }
        };
    }
    Ok(n)
}

fn check_small(order: usize, dim: usize) -> Result<()> {
    if order > MAX_ORDER || dim > MAX_DIM {
        return Err(Error::Feasibility(format!(
            "order {order}, dimension {dim} exceeds the dense limit ({MAX_ORDER}, {MAX_DIM})"
        )));
    }
    Ok(())
}

impl SymTensor {
    pub fn zeros(order: usize, dim: usize) -> Result<Self> {
        if dim == 0 {
            return arg("tensor dimension must be positive");
        }
        Ok(SymTensor { order, dim, entries: vec![0.0; entry_count(order, dim)?] })
    }

    pub fn from_entries(order: usize, dim: usize, entries: Vec<f64>) -> Result<Self> {
        if dim == 0 || entries.len() != entry_count(order, dim)? {
            return arg(format!("expected {} entries for order {order}, dimension {dim}", dim.pow(order as u32)));
        }
        Ok(SymTensor { order, dim, entries })
    }

    /// Order-0 tensor.
    pub fn scalar(value: f64, dim: usize) -> Result<Self> {
        Self::from_entries(0, dim, vec![value])
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut t = Self::zeros(2, dim)?;
        for i in 0..dim {
            t.entries[i * dim + i] = 1.0;
        }
        Ok(t)
    }

    /// `v^{⊗r}`.
    pub fn power(v: &[f64], r: usize) -> Result<Self> {
        let mut t = Self::scalar(1.0, v.len())?;
        let vt = Self::from_entries(1, v.len(), v.to_vec())?;
        for _ in 0..r {
            t = t.outer(&vt)?;
        }
        Ok(t)
    }

    /// The multi-index of a flat position.
    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.order];
        for slot in idx.iter_mut().rev() {
            *slot = flat % self.dim;
            flat /= self.dim;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.entries[self.flat_index(idx)]
    }

    /// `‖T‖_F = (Σ T²_{i₁…i_r})^{1/2}`.
    pub fn frobenius(&self) -> f64 {
        self.entries.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// `‖self - other‖_F`.
    pub fn distance(&self, other: &SymTensor) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self.entries.iter().zip(&other.entries).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
    }

    fn check_same_shape(&self, other: &SymTensor) -> Result<()> {
        if self.order != other.order || self.dim != other.dim {
            return arg("tensors differ in order or dimension");
        }
        Ok(())
    }

    /// `self ⊗ other`, of order `r + s`.
    pub fn outer(&self, other: &SymTensor) -> Result<Self> {
        if self.dim != other.dim {
            return arg("tensors differ in dimension");
        }
        let mut entries = Vec::with_capacity(entry_count(self.order + other.order, self.dim)?);
        for a in &self.entries {
            entries.extend(other.entries.iter().map(|b| a * b));
        }
        Ok(SymTensor { order: self.order + other.order, dim: self.dim, entries })
    }

    /// `self + c·other`, in place.
    pub fn add_scaled(&mut self, c: f64, other: &SymTensor) -> Result<()> {
        self.check_same_shape(other)?;
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += c * b;
        }
        Ok(())
    }

    /// Whether every entry equals its transposes to within `tol`.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.entries.len()).all(|flat| {
            let mut idx = self.multi_index(flat);
            idx.sort_unstable();
            (self.entries[flat] - self.get(&idx)).abs() <= tol
        })
    }
}

/// All permutations of `0..r` (Heap's algorithm).
fn permutations(r: usize) -> Vec<Vec<usize>> {
    fn heap(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(a.clone());
            return;
        }
        heap(k - 1, a, out);
        for i in 0..k - 1 {
            if k.is_multiple_of(2) {
                a.swap(i, k - 1);
            } else {
                a.swap(0, k - 1);
            }
            heap(k - 1, a, out);
        }
    }
    let mut out = Vec::new();
    heap(r, &mut (0..r).collect(), &mut out);
    out
}

/// `Sym T = (1/r!) Σ_{σ ∈ S_r} T^σ`.
pub fn sym(t: &SymTensor) -> Result<SymTensor> {
    check_small(t.order, t.dim)?;
    let perms = permutations(t.order);
    let scale = 1.0 / perms.len() as f64;
    let entries = (0..t.entries.len())
        .into_par_iter()
        .map(|flat| {
            let idx = t.multi_index(flat);
            let mut moved = vec![0; idx.len()];
            perms
                .iter()
                .map(|p| {
                    for (m, &q) in moved.iter_mut().zip(p) {
                        *m = idx[q];
                    }
                    t.get(&moved)
                })
                .sum::<f64>()
                * scale
        })
        .collect();
    Ok(SymTensor { order: t.order, dim: t.dim, entries })
}

/// `(‖T ⊗ I_d^{⊗ℓ}‖_F, d^{ℓ/2}‖T‖_F)`, the left side computed from the dense
/// Kronecker product.
pub fn kron_identity_norm_check(t: &SymTensor, ell: usize) -> Result<(f64, f64)> {
    let mut k = t.clone();
    let id = SymTensor::identity(t.dim)?;
    for _ in 0..ell {
        k = k.outer(&id)?;
    }
    Ok((k.frobenius(), (t.dim as f64).powf(ell as f64 / 2.0) * t.frobenius()))
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// `E X^{⊗r}` for `X ~ Lap(μ, I_d)` in closed form.
pub fn laplace_moment_tensor(mu: &[f64], r: usize) -> Result<SymTensor> {
    check_small(r, mu.len())?;
    let d = mu.len();
    let id = SymTensor::identity(d)?;
    let mut out = SymTensor::zeros(r, d)?;
    for s in (0..=r).step_by(2) {
        let mut term = SymTensor::power(mu, r - s)?;
        for _ in 0..s / 2 {
            term = term.outer(&id)?;
        }
        let c = factorial(r) / factorial(r - s) * 0.5f64.powf(s as f64 / 2.0);
        out.add_scaled(c, &sym(&term)?)?;
    }
    Ok(out)
}

fn check_weights(weights: &[f64], k: usize) -> Result<()> {
    if weights.len() != k || k == 0 {
        return arg("need one weight per component and at least one component");
    }
    let total: f64 = weights.iter().sum();
    if weights.iter().any(|w| !(*w >= 0.0)) || (total - 1.0).abs() > 1e-9 {
        return arg(format!("weights must be non-negative and sum to 1, got sum {total}"));
    }
    Ok(())
}

/// `Σ_j w_j E X_j^{⊗r}` for the mixture `Σ_j w_j Lap(μ_j, I)`.
pub fn mixture_moment_tensor(means: &[Vec<f64>], weights: &[f64], r: usize) -> Result<SymTensor> {
    check_weights(weights, means.len())?;
    let d = means[0].len();
    if means.iter().any(|m| m.len() != d) {
        return arg("means must share one dimension");
    }
    let mut out = SymTensor::zeros(r, d)?;
    for (m, w) in means.iter().zip(weights) {
        out.add_scaled(*w, &laplace_moment_tensor(m, r)?)?;
    }
    Ok(out)
}

/// Moment and parameter distances between two Laplace mixtures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentDistance {
    /// `‖E Y^{⊗r} - E Ỹ^{⊗r}‖_F` for `r = 1..=R`.
    pub per_order: Vec<f64>,
    /// `min_π Σ_j ‖μ_j - μ'_{π(j)}‖`.
    pub parameter_distance: f64,
}

/// Minimum summed mean distance over matchings (exact for `k ≤ 10`).
pub fn parameter_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    if a.len() != b.len() {
        return arg("parameter distance needs equally many components");
    }
    let cost: Vec<Vec<f64>> = a.iter().map(|x| b.iter().map(|y| dist(x, y)).collect()).collect();
    Ok(assign(&cost).iter().enumerate().map(|(i, &j)| cost[i][j]).sum())
}

pub fn moment_distance(
    means_a: &[Vec<f64>],
    means_b: &[Vec<f64>],
    weights_a: &[f64],
    weights_b: &[f64],
    orders: usize,
) -> Result<MomentDistance> {
    let per_order = (1..=orders)
        .map(|r| mixture_moment_tensor(means_a, weights_a, r)?.distance(&mixture_moment_tensor(means_b, weights_b, r)?))
        .collect::<Result<_>>()?;
    Ok(MomentDistance { per_order, parameter_distance: parameter_distance(means_a, means_b)? })
}

/// `(1/n) Σ_i x_i^{⊗r}`.
pub fn empirical_moment_tensor(samples: &SampleMatrix, r: usize) -> Result<SymTensor> {
    Ok(empirical_moment_with_errors(samples, r)?.0)
}

/// The empirical moment tensor and the entrywise standard error of each mean.
pub fn empirical_moment_with_errors(samples: &SampleMatrix, r: usize) -> Result<(SymTensor, SymTensor)> {
    if samples.n == 0 {
        return arg("at least one sample is required");
    }
    let d = samples.d;
    let len = entry_count(r, d)?;
    let (sum, sum_sq) = samples
        .rows()
        .collect::<Vec<_>>()
        .par_chunks(4096)
        .map(|rows| {
            let mut s = vec![0.0; len];
            let mut q = vec![0.0; len];
            let mut p = vec![0.0; len];
            for x in rows {
                // Build x^{⊗r} by repeated expansion of the prefix products.
                p[0] = 1.0;
                let mut filled = 1;
                for _ in 0..r {
                    for i in (0..filled).rev() {
                        let v = p[i];
                        for (j, xj) in x.iter().enumerate() {
                            p[i * d + j] = v * xj;
                        }
                    }
                    filled *= d;
                }
                for ((s, q), v) in s.iter_mut().zip(q.iter_mut()).zip(&p) {
                    *s += v;
                    *q += v * v;
                }
            }
            (s, q)
        })
        .reduce(
            || (vec![0.0; len], vec![0.0; len]),
            |(mut s, mut q), (s2, q2)| {
                s.iter_mut().zip(s2).for_each(|(a, b)| *a += b);
                q.iter_mut().zip(q2).for_each(|(a, b)| *a += b);
                (s, q)
            },
        );
    let n = samples.n as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / n).collect();
    let se = mean
        .iter()
        .zip(&sum_sq)
        .map(|(m, q)| if samples.n > 1 { ((q / n - m * m).max(0.0) * n / (n - 1.0) / n).sqrt() } else { 0.0 })
        .collect();
    Ok((SymTensor { order: r, dim: d, entries: mean }, SymTensor { order: r, dim: d, entries: se }))
}

/// Result of [`moment_closeness_search`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosenessSearch {
    pub means_a: Vec<Vec<f64>>,
    pub means_b: Vec<Vec<f64>>,
    pub distance: MomentDistance,
    /// Fraction of random pairs whose moment-distance vector exceeds the best
    /// pair's in every order.
    pub dominated_fraction: f64,
    pub candidates: usize,
}

fn random_ball<R: Rng>(g: &mut R, d: usize, radius: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| g.gen_range(-radius..radius)).collect();
        if v.iter().map(|x| x * x).sum::<f64>() <= radius * radius {
            return v;
        }
    }
}

/// Exploratory search for two uniform `k`-component Laplace mixtures with
/// means in the `√d`-ball whose first `R` moment tensors nearly agree while
/// their parameter distance exceeds `0.3√d`.
///
/// Candidates are compared with their nearest neighbours along a random
/// projection of their concatenated moment tensors; the winner is then
/// ranked against as many random pairs as there are candidates.
pub fn moment_closeness_search(d: usize, k: usize, orders: usize, candidates: usize, seed: u64) -> Result<ClosenessSearch> {
    if k == 0 || candidates < 2 || orders == 0 {
        return arg("need k ≥ 1, R ≥ 1 and at least two candidates");
    }
    check_small(orders, d)?;
    let radius = (d as f64).sqrt();
    let weights = vec![1.0 / k as f64; k];
    let mut g = rng::rng(seed);
    let sets: Vec<Vec<Vec<f64>>> = (0..candidates).map(|_| (0..k).map(|_| random_ball(&mut g, d, radius)).collect()).collect();
    let features: Vec<Vec<SymTensor>> = sets
        .par_iter()
        .map(|m| (1..=orders).map(|r| mixture_moment_tensor(m, &weights, r)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let width: usize = features[0].iter().map(|t| t.entries.len()).sum();
    let direction: Vec<f64> = (0..width).map(|_| g.gen_range(-1.0..1.0)).collect();
    let mut order: Vec<(f64, usize)> = features
        .iter()
        .enumerate()
        .map(|(i, f)| (f.iter().flat_map(|t| &t.entries).zip(&direction).map(|(a, b)| a * b).sum(), i))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));
    let combined = |a: usize, b: usize| -> Vec<f64> {
        features[a].iter().zip(&features[b]).map(|(x, y)| x.distance(y).unwrap_or(f64::INFINITY)).collect()
    };
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    const WINDOW: usize = 8;
    let far = 0.3 * radius;
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..order.len() {
        for j in i + 1..(i + 1 + WINDOW).min(order.len()) {
            let (a, b) = (order[i].1, order[j].1);
            let score = norm(&combined(a, b));
            if best.is_none_or(|(s, _, _)| score < s) && parameter_distance(&sets[a], &sets[b])? > far {
                best = Some((score, a, b));
            }
        }
    }
    let (_, a, b) = best.ok_or_else(|| Error::Feasibility("no candidate pair exceeds the parameter distance".into()))?;
    let winner = combined(a, b);
    let mut dominated = 0usize;
    for _ in 0..candidates {
        let x = g.gen_range(0..candidates);
        let y = (x + 1 + g.gen_range(0..candidates - 1)) % candidates;
        if combined(x, y).iter().zip(&winner).all(|(r, w)| w < r) {
            dominated += 1;
        }
    }
    Ok(ClosenessSearch {
        distance: MomentDistance { per_order: winner, parameter_distance: parameter_distance(&sets[a], &sets[b])? },
        means_a: sets[a].clone(),
        means_b: sets[b].clone(),
        dominated_fraction: dominated as f64 / candidates as f64,
        candidates,
    })
}

/// Samples `n` points from `Lap(μ, I_d)`, the Monte-Carlo oracle for the
/// closed form.
pub fn laplace_samples(mu: &[f64], n: usize, seed: u64) -> Result<SampleMatrix> {
    let model = MixtureModel::new(DistributionKind::Laplace, vec![1.0], vec![mu.to_vec()])?;
    Ok(sample_mixture(&model, n, seed)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn random_tensor(order: usize, dim: usize, seed: u64) -> SymTensor {
        let mut g = rng::rng(seed);
        let n = dim.pow(order as u32);
        SymTensor::from_entries(order, dim, (0..n).map(|_| g.gen_range(-1.0..1.0)).collect()).unwrap()
    }

    #[test]
    fn permutation_count() {
        for r in 0..=6 {
            let p = permutations(r);
            assert_eq!(p.len() as f64, factorial(r));
            let mut s = p.clone();
            s.sort();
            s.dedup();
            assert_eq!(s.len(), p.len());
        }
    }

    #[test]
    fn sym_of_e1_e2() {
        let e1 = SymTensor::from_entries(1, 2, vec![1.0, 0.0]).unwrap();
        let e2 = SymTensor::from_entries(1, 2, vec![0.0, 1.0]).unwrap();
        let s = sym(&e1.outer(&e2).unwrap()).unwrap();
        assert_eq!(s.entries, vec![0.0, 0.5, 0.5, 0.0]);
    }

    #[test]
    fn symmetric_input_is_unchanged() {
        let t = SymTensor::power(&[0.3, -1.0, 2.0], 3).unwrap();
        let s = sym(&t).unwrap();
        for (a, b) in s.entries.iter().zip(&t.entries) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn oversized_sym_is_a_feasibility_error() {
        let t = SymTensor::zeros(7, 2).unwrap();
        assert!(matches!(sym(&t), Err(Error::Feasibility(_))));
        assert!(matches!(SymTensor::zeros(30, 6), Err(Error::Feasibility(_))));
    }

    #[test]
    fn kron_identity_examples() {
        let one = SymTensor::scalar(1.0, 3).unwrap();
        let (l, r) = kron_identity_norm_check(&one, 1).unwrap();
        assert!((l - 3f64.sqrt()).abs() < 1e-15 && (r - 3f64.sqrt()).abs() < 1e-15);
        let t = random_tensor(2, 2, 4);
        let (l, r) = kron_identity_norm_check(&t, 0).unwrap();
        assert_eq!(l, t.frobenius());
        assert_eq!(r, t.frobenius());
        let (l, r) = kron_identity_norm_check(&t, 2).unwrap();
        assert!((l - 2.0 * t.frobenius()).abs() < 1e-12 && (r - l).abs() < 1e-12);
    }

    #[test]
    fn low_order_laplace_moments() {
        let mu = [0.7, -0.2, 1.5];
        assert_eq!(laplace_moment_tensor(&mu, 0).unwrap().entries, vec![1.0]);
        assert_eq!(laplace_moment_tensor(&mu, 1).unwrap().entries, mu.to_vec());
        let m = laplace_moment_tensor(&[1.0, 0.0], 2).unwrap();
        assert_eq!(m.entries, vec![2.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn centered_fourth_moment() {
        // E X₁⁴ = E W²·E G⁴ = 2·3 = 6 and E X₁²X₂² = 2·1 = 2 at μ = 0.
        let m = laplace_moment_tensor(&[0.0, 0.0], 4).unwrap();
        assert!((m.get(&[0, 0, 0, 0]) - 6.0).abs() < 1e-12);
        assert!((m.get(&[0, 1, 0, 1]) - 2.0).abs() < 1e-12);
        assert!(m.get(&[0, 0, 0, 1]).abs() < 1e-12);
    }

    #[test]
    fn mixture_examples() {
        let one = mixture_moment_tensor(&[vec![0.5, 1.0]], &[1.0], 3).unwrap();
        assert_eq!(one, laplace_moment_tensor(&[0.5, 1.0], 3).unwrap());
        let twin = mixture_moment_tensor(&[vec![0.5, 1.0], vec![0.5, 1.0]], &[0.5, 0.5], 3).unwrap();
        assert!(twin.distance(&one).unwrap() < 1e-14);
        let pm = mixture_moment_tensor(&[vec![1.0, 0.0], vec![-1.0, 0.0]], &[0.5, 0.5], 1).unwrap();
        assert_eq!(pm.entries, vec![0.0, 0.0]);
        assert!(mixture_moment_tensor(&[vec![1.0]], &[0.9], 1).is_err());
    }

    #[test]
    fn moment_distance_is_order_free() {
        let a = vec![vec![0.1, 0.2], vec![-0.5, 0.3], vec![1.0, -1.0]];
        let b: Vec<_> = a.iter().rev().cloned().collect();
        let w = [0.2, 0.3, 0.5];
        let wb: Vec<f64> = w.iter().rev().cloned().collect();
        let same = moment_distance(&a, &a, &w, &w, 3).unwrap();
        assert_eq!(same.per_order, vec![0.0; 3]);
        assert_eq!(same.parameter_distance, 0.0);
        let perm = moment_distance(&a, &b, &w, &wb, 3).unwrap();
        assert!(perm.per_order.iter().all(|x| *x < 1e-14));
        assert!(perm.parameter_distance < 1e-15);
    }

    #[test]
    fn empirical_examples() {
        let one = SampleMatrix::from_rows(&[vec![1.0, 0.0]]).unwrap();
        assert_eq!(empirical_moment_tensor(&one, 2).unwrap().entries, vec![1.0, 0.0, 0.0, 0.0]);
        let s = laplace_samples(&[0.3, -0.4], 500, 2).unwrap();
        let m = empirical_moment_tensor(&s, 1).unwrap();
        for (a, b) in m.entries.iter().zip(s.mean()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(empirical_moment_tensor(&s, 3).unwrap().is_symmetric(1e-12));
    }

    #[test]
    fn closed_form_matches_monte_carlo() {
        let mu = [1.0, -0.5];
        let s = laplace_samples(&mu, 200_000, 11).unwrap();
        for r in 1..=4 {
            let exact = laplace_moment_tensor(&mu, r).unwrap();
            let (emp, se) = empirical_moment_with_errors(&s, r).unwrap();
            for ((e, m), s) in exact.entries.iter().zip(&emp.entries).zip(&se.entries) {
                assert!((e - m).abs() <= 4.0 * s, "r = {r}: {e} vs {m} ± {s}");
            }
        }
    }

    #[test]
    fn closeness_search_runs() {
        let out = moment_closeness_search(2, 2, 2, 300, 5).unwrap();
        assert!(out.distance.parameter_distance > 0.3 * 2f64.sqrt());
        assert!((0.0..=1.0).contains(&out.dominated_fraction));
    }

    proptest! {
        #[test]
        fn sym_contracts_frobenius(order in 0usize..=4, dim in 1usize..=4, seed in any::<u64>()) {
            let t = random_tensor(order, dim, seed);
            let s = sym(&t).unwrap();
            prop_assert!(t.frobenius() - s.frobenius() >= -1e-12);
            prop_assert!(s.is_symmetric(1e-12));
            let ss = sym(&s).unwrap();
            prop_assert!(ss.distance(&s).unwrap() <= 1e-12);
        }

        #[test]
        fn kron_identity_scales_by_root_d(order in 0usize..=3, dim in 1usize..=4, ell in 0usize..=2, seed in any::<u64>()) {
            let t = random_tensor(order, dim, seed);
            let (l, r) = kron_identity_norm_check(&t, ell).unwrap();
            prop_assert!((l - r).abs() <= 1e-12 * r.max(1e-300));
        }

        #[test]
        fn laplace_moments_are_symmetric(r in 0usize..=5, seed in any::<u64>()) {
            let mut g = rng::rng(seed);
            let mu: Vec<f64> = (0..3).map(|_| g.gen_range(-1.0..1.0)).collect();
            prop_assert!(laplace_moment_tensor(&mu, r).unwrap().is_symmetric(1e-12));
        }
    }
}
