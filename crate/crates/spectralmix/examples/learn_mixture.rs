//! Learning a Laplace mixture from samples.
//!
//! The learner queries the empirical characteristic-function ratio on a ball
//! shifted by `‖v‖ = 2T`. The sample count grows like `T^{2c₂}`, so only
//! small instances are desk-feasible; the second part prints the schedule of
//! a separation-free four-component instance.
//!
//! ```bash
//! cargo run --release --example learn_mixture
//! ```

use spectralmix::distributions::{dist, sample_mixture, DistributionKind, DistributionSpec, MixtureModel};
use spectralmix::learners::{learn_sfd_mixture_detailed, SfdLearnConfig};
use spectralmix::sftd::Sft1Tuning;
use spectralmix::Result;

pub fn run() -> Result<()> {
    let base = DistributionSpec::centered(DistributionKind::Laplace, 2)?;
    let mu = vec![0.3, -0.4];
    let mut cfg = SfdLearnConfig::new(1, 1.0, 1.0, 1.0, 0.1, 0.3, 4);
    cfg.tuning = Sft1Tuning { stages: Some(4), ..Default::default() };
    let schedule = cfg.schedule(&base)?;
    println!("k = 1: T = {}, n = {:.0}, floor = {:.3e}", schedule.duration, schedule.samples, schedule.floor);
    let model = MixtureModel::new(DistributionKind::Laplace, vec![1.0], vec![mu.clone()])?;
    let (samples, _) = sample_mixture(&model, schedule.samples.ceil() as usize, 2)?;
    let out = learn_sfd_mixture_detailed(&samples, &base, &cfg)?;
    for c in &out.components {
        println!("  weight {:.4}, mean {:?} (error {:.4})", c.weight, c.mean, dist(&c.mean, &mu));
    }
    println!("  {} oracle queries", out.queries);

    let base3 = DistributionSpec::centered(DistributionKind::Laplace, 3)?;
    // Weights below 2ε are unidentifiable, so ε is capped at w_min/2.
    let wide = SfdLearnConfig::new(4, 0.3, 0.25, 1.0, 0.125, 0.1, 0);
    let s = wide.schedule(&base3)?;
    println!("k = 4, d = 3, γ = 0.3: T = {:.1}, n = {:.3e} (θ = {:.0e})", s.duration, s.samples, s.theta);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
