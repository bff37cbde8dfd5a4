//! Mean estimation when 5% of the points were drawn around a far adversarial
//! center. The sample mean is dragged away; the Fourier estimators treat the
//! outliers as a weak competing tone and converge as `n` grows.
//!
//! ```bash
//! cargo run --release --example robust_mean
//! ```

use spectralmix::distributions::{dist, sample_noise_oblivious, DistributionKind, DistributionSpec};
use spectralmix::learners::{robust_mean_noise_oblivious_with, robust_mean_per_coordinate, rough_center, RobustMeanConfig};
use spectralmix::sftd::Sft1Tuning;
use spectralmix::Result;

pub fn run() -> Result<()> {
    let spec = DistributionSpec::centered(DistributionKind::Laplace, 2)?;
    let mu = [0.25, -0.5];
    let adversary = vec![vec![30.0, 30.0]];
    println!("{:>8} {:>12} {:>12} {:>14} {:>12}", "n", "sample mean", "median", "per-coordinate", "d-dim");
    for n in [1_000, 10_000, 100_000] {
        let s = sample_noise_oblivious(&spec, &mu, &adversary, 0.05, n, 3)?;
        let naive = dist(&s.points.mean(), &mu);
        let median = dist(&rough_center(&s.points), &mu);
        let coord = dist(&robust_mean_per_coordinate(&s.points, &spec, 0.1, 0.1)?, &mu);
        let mut cfg = RobustMeanConfig::new(0.5, 2.0, 0.2, 1);
        cfg.tuning = Sft1Tuning { stages: Some(3), ..Default::default() };
        let full = dist(&robust_mean_noise_oblivious_with(&s.points, &spec, &cfg)?, &mu);
        println!("{n:>8} {naive:>12.4} {median:>12.4} {coord:>14.4} {full:>12.4}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
