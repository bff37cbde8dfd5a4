//! HashToBins: a random dilation `σ`, a phase `b` and a flat window map each
//! tone to one of `𝓑` bins, so a `k`-sparse problem becomes `𝓑` mostly
//! one-sparse problems. Each bin value equals the tones' weights filtered by
//! the window's frequency response at their offset from the bin center.
//!
//! ```bash
//! cargo run --release --example hash_to_bins
//! ```

use num_complex::Complex64;
use spectralmix::sft1d::{hash_to_bins, Permutation, Sft1Config, Window};
use spectralmix::signal::{exact_signal, SignalOracle, Tone};
use spectralmix::Result;

pub fn run() -> Result<()> {
    let tones = vec![
        Tone::new(Complex64::from_polar(0.7, 0.4), vec![1.3]),
        Tone::real(0.2, vec![-2.1]),
        Tone::new(Complex64::from_polar(0.1, -1.0), vec![0.2]),
    ];
    let duration = 400.0;
    let cfg = Sft1Config::new(3, duration, 4.0, 1.0, 0.01, 0.1, 1);
    let window = Window::new(cfg.bins, cfg.window_terms);
    println!("bins {}, taps {}, leakage {:.2e}", window.bins(), window.len(), window.leakage());
    let signal = exact_signal(tones.clone(), duration)?;
    let line = signal.line(&[1.0], 0.0, duration)?;
    let (s_lo, _) = cfg.sigma_range();
    let perm = Permutation { sigma: s_lo * 1.3, b: 0.9, center: duration / 2.0 };
    let bins = hash_to_bins(line.as_ref(), &perm, &window)?;
    for t in &tones {
        let f = t.freq[0];
        let q = perm.bin(f, cfg.bins);
        let response = window.response(perm.offset(f, q, cfg.bins));
        println!("tone f = {f:>5} |w| = {:.2} -> bin {q:>2} (response {response:.4})", t.weight.norm());
    }
    println!("{:>4} {:>10}", "bin", "|u_q|");
    for (q, u) in bins.iter().enumerate() {
        println!("{q:>4} {:>10.4}", u.norm());
    }
    println!("queries: {}", signal.query_count());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
