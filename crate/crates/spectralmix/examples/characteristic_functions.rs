//! Characteristic functions of the base families and the empirical ratio
//! signal that turns a Laplace mixture into a sparse sum of tones.
//!
//! ```bash
//! cargo run --release --example characteristic_functions
//! ```

use spectralmix::distributions::{
    cf_eval, sample_mixture, sfd_floor, DistributionKind, DistributionSpec, MixtureModel, SfdFfdParams,
};
use spectralmix::signal::{empirical_cf_signal, SignalOracle};
use spectralmix::Result;

pub fn run() -> Result<()> {
    // |φ| along a ray: Laplace decays polynomially, the Gaussian exponentially.
    let lap = DistributionSpec::centered(DistributionKind::Laplace, 2)?;
    let gauss = DistributionSpec::centered(DistributionKind::Gaussian, 2)?;
    println!("{:>6} {:>12} {:>12} {:>12}", "|t|", "laplace", "gaussian", "sfd bound");
    let params = SfdFfdParams::laplace();
    for r in [0.5, 1.0, 2.0, 4.0, 8.0] {
        let t = [r, 0.0];
        println!(
            "{r:>6} {:>12.4e} {:>12.4e} {:>12.4e}",
            cf_eval(&lap, &t)?.norm(),
            cf_eval(&gauss, &t)?.norm(),
            params.sfd_bound(2, r)
        );
    }

    // Two-component mixture: dividing the empirical characteristic function by
    // φ_D leaves Σ_j w_j e^{i<t, μ_j>} plus sampling noise.
    let means = vec![vec![0.5, -0.2], vec![-0.4, 0.3]];
    let model = MixtureModel::new(DistributionKind::Laplace, vec![0.6, 0.4], means.clone())?;
    let (samples, _) = sample_mixture(&model, 200_000, 7)?;
    let radius = 3.0;
    let floor = sfd_floor(&lap, &params, radius)?;
    let signal = empirical_cf_signal(samples, &lap, vec![0.0, 0.0], floor * (1.0 - 1e-12), radius)?;
    println!("\n{:>12} {:>24} {:>24}", "t", "empirical ratio", "Σ w e^{i<t,μ>}");
    for t in [[0.0, 0.0], [1.0, 0.0], [0.0, 2.0], [1.5, -1.5]] {
        let got = signal.query(&t)?;
        let want = model.weights.iter().zip(&means).map(|(w, m)| {
            num_complex::Complex64::from_polar(*w, m[0] * t[0] + m[1] * t[1])
        });
        let want: num_complex::Complex64 = want.sum();
        println!("{:>12} {:>24.4} {:>24.4}", format!("{t:?}"), got, want);
    }
    println!("queries: {}", signal.query_count());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
