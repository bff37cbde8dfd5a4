//! Flat-top filter for hashing frequencies into bins.
//!
//! Taps are `G_c ∝ sinc(c/𝓑)·exp(-c²s²/2)` for `c = -L..=L`. The sinc alone
//! has the ideal boxcar response `1[|ω| < π/𝓑]`; the Gaussian envelope makes
//! the truncation harmless and turns the boxcar edges into Gaussian
//! transitions of width `s`. Choosing `s² = π/(𝓑L)` balances the truncation
//! tail `exp(-L²s²/2)` against the transition tail `exp(-π²/(2𝓑²s²))`, both
//! equal to `exp(-πL/(2𝓑))`.

use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct Window {
    bins: usize,
    half: usize,
    /// `taps[L + c] = G_c`.
    taps: Vec<f64>,
}

impl Window {
    /// Window with `terms` taps (rounded up to odd) for `bins` bins.
    pub fn new(bins: usize, terms: usize) -> Self {
        let half = terms.max(1) / 2;
        let b = bins as f64;
        let s2 = if half == 0 { 0.0 } else { PI / (b * half as f64) };
        let mut taps: Vec<f64> = (-(half as i64)..=half as i64)
            .map(|c| {
                let x = c as f64 / b;
                let sinc = if c == 0 { 1.0 } else { (PI * x).sin() / (PI * x) };
                sinc * (-(c * c) as f64 * s2 / 2.0).exp() / b
            })
            .collect();
        // Normalize the passband to exactly one: Ĝ(0) = Σ G_c.
        let dc: f64 = taps.iter().sum();
        taps.iter_mut().for_each(|g| *g /= dc);
        Window { bins, half, taps }
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    /// Number of taps `M = 2L + 1`.
    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    pub fn half(&self) -> usize {
        self.half
    }

    /// `G_c` for `c ∈ [-L, L]`.
    #[inline]
    pub fn tap(&self, c: i64) -> f64 {
        self.taps[(c + self.half as i64) as usize]
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    /// Frequency response `Ĝ(ω) = Σ_c G_c e^{iωc}` (real: the taps are symmetric).
    pub fn response(&self, omega: f64) -> f64 {
        let mut acc = self.taps[self.half];
        for c in 1..=self.half {
            acc += 2.0 * self.taps[self.half + c] * (omega * c as f64).cos();
        }
        acc
    }

    pub fn energy(&self) -> f64 {
        self.taps.iter().map(|g| g * g).sum()
    }

    /// Predicted leakage level `exp(-πL/(2𝓑))`.
    pub fn leakage(&self) -> f64 {
        (-PI * self.half as f64 / (2.0 * self.bins as f64)).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn energy_normalization_is_about_one_over_bins() {
        for (bins, terms) in [(8, 33), (24, 97), (24, 181), (64, 513)] {
            let w = Window::new(bins, terms);
            let e = w.energy() * bins as f64;
            assert!((0.5..=2.0).contains(&e), "bins={bins}: {e}");
        }
    }

    #[test]
    fn response_is_flat_in_band_and_small_outside() {
        let bins = 24;
        let w = Window::new(bins, 721);
        let edge = PI / bins as f64;
        let s = (PI / (bins as f64 * w.half() as f64)).sqrt();
        let flat = edge - 4.0 * s;
        assert!(flat > 0.0);
        for i in 0..=20 {
            let om = flat * i as f64 / 20.0;
            assert!((w.response(om) - 1.0).abs() < 1e-3, "passband at {om}: {}", w.response(om));
        }
        for i in 0..=50 {
            let om = edge + 4.0 * s + (PI - edge - 4.0 * s) * i as f64 / 50.0;
            assert!(w.response(om).abs() < 1e-3, "stopband at {om}: {}", w.response(om));
        }
        assert!((w.response(0.0) - 1.0).abs() < 1e-14);
        assert!((w.response(edge) - 0.5).abs() < 1e-2);
    }

    #[test]
    fn response_is_periodic_and_even() {
        let w = Window::new(8, 33);
        for om in [0.1, 0.7, 2.0] {
            assert!((w.response(om) - w.response(-om)).abs() < 1e-14);
            assert!((w.response(om) - w.response(om + 2.0 * PI)).abs() < 1e-12);
        }
    }
}
