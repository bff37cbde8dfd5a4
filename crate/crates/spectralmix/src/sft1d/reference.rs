//! Dense reference estimator: matrix pencil on a uniform grid.
//!
//! Uses `N` uniform samples `x_n = x(nΔt)` and the Hankel matrix
//! `Y[i, c] = x_{i+c}`. Without noise its row space is spanned by the rows of
//! `Z_R[j, c] = z_j^c` with `z_j = e^{i f_j Δt}`, so the top-`k` right singular
//! vectors satisfy `A₂ = Φ A₁` for the shifted column blocks, and the
//! eigenvalues of `Φ = A₂ A₁⁺` are the `z_j`. Weights follow by least squares.
//! This is slow (`O(N L²)`) and not robust; it serves as a high-accuracy
//! baseline for exact or nearly exact signals.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use super::polish::lsq_weights;
use super::Estimate1;
use crate::error::{arg, Error, Result};
use crate::signal::Signal1d;

/// Largest acceptable ratio between the first and the `k`-th singular value.
const MAX_CONDITION: f64 = 1e10;
const MAX_PENCIL: usize = 96;

/// Estimates `k` tones of `signal` on `[0, T]` from `grid_points` uniform
/// samples. Aliasing is avoided when `grid_points ≥ B·T/π + 1`.
pub fn reference_tone_estimate(
    signal: &dyn Signal1d,
    k: usize,
    duration: f64,
    grid_points: usize,
) -> Result<Vec<Estimate1>> {
    if k == 0 {
        return Ok(Vec::new());
    }
    if !(duration > 0.0) || duration > signal.duration() * (1.0 + 1e-12) {
        return arg("reference estimate needs 0 < T ≤ signal duration");
    }
    if grid_points < 3 * k + 2 {
        return arg(format!("grid_points must be at least 3k+2 = {}", 3 * k + 2));
    }
    let n = grid_points;
    let dt = duration / (n - 1) as f64;
    let times: Vec<f64> = (0..n).map(|i| (i as f64 * dt).min(duration)).collect();
    let x: Vec<Complex64> = times.iter().map(|&t| signal.eval(t)).collect::<Result<_>>()?;

    let l = (n / 3).clamp(k, MAX_PENCIL);
    let rows = n - l;
    let y = DMatrix::from_fn(rows, l + 1, |i, c| x[i + c]);
    let svd = y.svd(false, true);
    let sv = &svd.singular_values;
    let condition = if sv[k - 1] > 0.0 { sv[0] / sv[k - 1] } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::Conditioning { condition });
    }
    // nalgebra sorts singular values in decreasing order.
    let v_t = svd.v_t.expect("right singular vectors requested");
    let top = v_t.rows(0, k);
    let a1 = top.columns(0, l).into_owned();
    let a2 = top.columns(1, l).into_owned();
    let a1_pinv = a1.pseudo_inverse(1e-14).map_err(|_| Error::Conditioning { condition: f64::INFINITY })?;
    let phi = a2 * a1_pinv;
    let schur = Schur::new(phi);
    let z = schur.eigenvalues().ok_or(Error::Conditioning { condition: f64::INFINITY })?;
    let freqs: Vec<f64> = z.iter().map(|z| z.arg() / dt).collect();
    let (weights, _) = lsq_weights(&times, &x, &freqs);
    let mut out: Vec<Estimate1> =
        freqs.into_iter().zip(weights).map(|(freq, weight)| Estimate1 { weight, freq }).collect();
    out.sort_by(|a, b| b.weight.norm().total_cmp(&a.weight.norm()));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{exact_signal, SignalOracle, Tone};

    #[test]
    fn recovers_three_exact_tones() {
        let truth = [(0.5, -1.3), (0.3, 0.4), (0.2, 2.2)];
        let tones: Vec<Tone> = truth.iter().map(|&(w, f)| Tone::real(w, vec![f])).collect();
        let sig = exact_signal(tones, 60.0).unwrap();
        let line = sig.line(&[1.0], 0.0, 60.0).unwrap();
        let est = reference_tone_estimate(line.as_ref(), 3, 60.0, 200).unwrap();
        for ((w, f), e) in truth.iter().zip(&est) {
            assert!((e.freq - f).abs() < 1e-9, "{est:?}");
            assert!((e.weight.re - w).abs() < 1e-9 && e.weight.im.abs() < 1e-9);
        }
    }

    #[test]
    fn rank_deficient_input_is_reported() {
        let sig = exact_signal(vec![Tone::real(1.0, vec![0.5])], 10.0).unwrap();
        let line = sig.line(&[1.0], 0.0, 10.0).unwrap();
        assert!(matches!(reference_tone_estimate(line.as_ref(), 2, 10.0, 60), Err(Error::Conditioning { .. })));
    }
}
