//! Joint least-squares refinement of located tones.
//!
//! Once every strong tone is located to within a fraction of `1/T`, the model
//! `Σ_j w_j e^{i f_j τ}` is fitted to fresh samples by Levenberg–Marquardt on
//! `(f, Re w, Im w)`. Times are centered (`τ = s - T/2`) so that frequency and
//! weight directions are nearly decoupled. The refined estimate is noise
//! limited, removing the window's leakage from the final error.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Least-squares weights for fixed frequencies and the residual sum of squares.
pub fn lsq_weights(times: &[f64], values: &[Complex64], freqs: &[f64]) -> (Vec<Complex64>, f64) {
    let k = freqs.len();
    if k == 0 {
        return (Vec::new(), values.iter().map(|v| v.norm_sqr()).sum());
    }
    let a = DMatrix::from_fn(times.len(), k, |i, j| Complex64::cis(freqs[j] * times[i]));
    let b = DVector::from_column_slice(values);
    let w: Vec<Complex64> = match a.clone().svd(true, true).solve(&b, 1e-12) {
        Ok(w) => w.iter().cloned().collect(),
        Err(_) => vec![Complex64::new(0.0, 0.0); k],
    };
    let cost = residual_cost(times, values, freqs, &w);
    (w, cost)
}

pub fn residual_cost(times: &[f64], values: &[Complex64], freqs: &[f64], weights: &[Complex64]) -> f64 {
    times
        .iter()
        .zip(values)
        .map(|(t, x)| {
            let model: Complex64 = freqs.iter().zip(weights).map(|(f, w)| w * Complex64::cis(f * t)).sum();
            (x - model).norm_sqr()
        })
        .sum()
}

/// Outcome of [`refine`].
#[derive(Debug, Clone)]
pub struct Refined {
    pub freqs: Vec<f64>,
    pub weights: Vec<Complex64>,
    pub cost_before: f64,
    pub cost_after: f64,
}

/// Levenberg–Marquardt from `freqs0`. Returns `None` unless the residual
/// strictly decreases and no frequency moves by more than `max_shift`.
pub fn refine(times: &[f64], values: &[Complex64], freqs0: &[f64], max_shift: f64) -> Option<Refined> {
    let k = freqs0.len();
    if k == 0 || times.len() < 3 * k {
        return None;
    }
    let (w0, cost0) = lsq_weights(times, values, freqs0);
    let mut f = freqs0.to_vec();
    let mut w = w0;
    let mut cost = cost0;
    let mut lambda = 1e-3;
    let p = 3 * k;
    // Below this the residual is rounding noise in the phases `f·t` and
    // "improvements" are random.
    let t_max = times.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let f_max = freqs0.iter().fold(0.0f64, |m, f| m.max(f.abs())) + max_shift;
    let phase_eps = 8.0 * f64::EPSILON * (1.0 + f_max * t_max);
    let floor = phase_eps * phase_eps * values.iter().map(|v| v.norm_sqr()).sum::<f64>();
    for _ in 0..60 {
        if cost <= floor {
            break;
        }
        // Gauss–Newton system in real arithmetic: H = Re(Jᴴ J), g = Re(Jᴴ r).
        let mut h = DMatrix::<f64>::zeros(p, p);
        let mut g = DVector::<f64>::zeros(p);
        let mut cols = vec![Complex64::new(0.0, 0.0); p];
        for (t, x) in times.iter().zip(values) {
            let mut model = Complex64::new(0.0, 0.0);
            for j in 0..k {
                let e = Complex64::cis(f[j] * t);
                let we = w[j] * e;
                model += we;
                cols[j] = Complex64::new(0.0, *t) * we;
                cols[k + j] = e;
                cols[2 * k + j] = Complex64::new(0.0, 1.0) * e;
            }
            let r = x - model;
            for u in 0..p {
                let cu = cols[u].conj();
                g[u] += (cu * r).re;
                for v in u..p {
                    h[(u, v)] += (cu * cols[v]).re;
                }
            }
        }
        for u in 0..p {
            for v in 0..u {
                h[(u, v)] = h[(v, u)];
            }
        }
        let mut improved = false;
        let mut tries = 0;
        while tries < 12 {
            tries += 1;
            let mut damped = h.clone();
            for u in 0..p {
                damped[(u, u)] += lambda * h[(u, u)].max(1e-300);
            }
            let step = match damped.cholesky() {
                Some(ch) => ch.solve(&g),
                None => {
                    lambda *= 4.0;
                    continue;
                }
            };
            let f_new: Vec<f64> = (0..k).map(|j| f[j] + step[j]).collect();
            let w_new: Vec<Complex64> =
                (0..k).map(|j| w[j] + Complex64::new(step[k + j], step[2 * k + j])).collect();
            let c_new = residual_cost(times, values, &f_new, &w_new);
            if c_new < cost {
                let rel = (cost - c_new) / cost.max(1e-300);
                f = f_new;
                w = w_new;
                cost = c_new;
                lambda = (lambda / 3.0).max(1e-12);
                improved = rel > 1e-10;
                break;
            }
            lambda *= 4.0;
        }
        if !improved {
            break;
        }
    }
    // Variable projection: weights consistent with the final frequencies.
    let (w_final, c_final) = lsq_weights(times, values, &f);
    let (w, cost) = if c_final <= cost { (w_final, c_final) } else { (w, cost) };
    let moved = f.iter().zip(freqs0).all(|(a, b)| (a - b).abs() <= max_shift);
    if cost < cost0 && moved {
        Some(Refined { freqs: f, weights: w, cost_before: cost0, cost_after: cost })
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples(freqs: &[f64], weights: &[Complex64], m: usize, t: f64) -> (Vec<f64>, Vec<Complex64>) {
        let times: Vec<f64> = (0..m).map(|i| -t / 2.0 + t * (i as f64 + 0.37) / m as f64).collect();
        let values = times
            .iter()
            .map(|s| freqs.iter().zip(weights).map(|(f, w)| w * Complex64::cis(f * s)).sum())
            .collect();
        (times, values)
    }

    #[test]
    fn exact_weights_for_exact_frequencies() {
        let f = [1.0, -2.5];
        let w = [Complex64::new(0.5, 0.1), Complex64::new(-0.2, 0.3)];
        let (t, x) = samples(&f, &w, 60, 20.0);
        let (est, cost) = lsq_weights(&t, &x, &f);
        assert!(cost < 1e-24);
        for (a, b) in est.iter().zip(&w) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn converges_from_a_nearby_start() {
        let f = [0.3, 1.1, -0.8];
        let w = [Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.3), Complex64::new(0.2, -0.1)];
        let t_len = 100.0;
        let (t, x) = samples(&f, &w, 200, t_len);
        let start = [0.3 + 0.2 / t_len, 1.1 - 0.3 / t_len, -0.8 + 0.1 / t_len];
        let r = refine(&t, &x, &start, 1.0).expect("refinement accepted");
        for (a, b) in r.freqs.iter().zip(&f) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
        assert!(r.cost_after < 1e-20);
    }

    #[test]
    fn rejects_large_moves() {
        let f = [0.3];
        let w = [Complex64::new(1.0, 0.0)];
        let (t, x) = samples(&f, &w, 50, 100.0);
        assert!(refine(&t, &x, &[0.3 + 0.01], 1e-6).is_none());
    }
}
