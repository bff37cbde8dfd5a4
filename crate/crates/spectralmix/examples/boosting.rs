//! Boosting a randomized estimator that is right only 70% of the time.
//!
//! Wrong rounds return well-separated garbage; the density threshold of the
//! clustering step rejects it, and the failure probability falls to `δ`.
//!
//! ```bash
//! cargo run --release --example boosting
//! ```

use rand::Rng;
use spectralmix::rng;
use spectralmix::sftd::{boost, match_tones, BoostParams};
use spectralmix::signal::Tone;
use spectralmix::Result;

pub fn run() -> Result<()> {
    let truth = vec![Tone::real(0.6, vec![0.0, 1.0]), Tone::real(0.4, vec![1.0, 0.0])];
    let params = BoostParams { k: 2, gamma: 1.0, eps: 0.03, eps_w: 0.05, delta: 0.05 };
    let runner = |seed: u64| {
        let mut g = rng::rng(seed);
        if g.gen_bool(0.7) {
            Ok(truth
                .iter()
                .map(|t| Tone::new(t.weight, t.freq.iter().map(|x| x + g.gen_range(-0.005..0.005)).collect()))
                .collect())
        } else {
            Ok(vec![Tone::real(0.9, vec![g.gen_range(-5.0..5.0), 3.0]), Tone::real(0.1, vec![g.gen_range(-5.0..5.0), -3.0])])
        }
    };
    let trials = 200;
    let mut failures = 0;
    for meta in 0..trials {
        let ok = boost(runner, &params, meta)
            .ok()
            .and_then(|out| match_tones(&out.tones, &truth).ok())
            .is_some_and(|m| m.max_mean_error <= params.eps);
        failures += usize::from(!ok);
    }
    println!("{} rounds per boost; failure rate {:.3} over {trials} meta-trials (target δ = {})", params.rounds(), failures as f64 / trials as f64, params.delta);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
