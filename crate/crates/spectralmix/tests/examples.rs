//! Every example compiles against the public API and runs to completion.

#[path = "../examples/boosting.rs"]
mod boosting;

#[test]
fn boosting_runs() {
    boosting::run().unwrap();
}

#[path = "../examples/characteristic_functions.rs"]
mod characteristic_functions;

#[test]
fn characteristic_functions_runs() {
    characteristic_functions::run().unwrap();
}

#[path = "../examples/experiment_config.rs"]
mod experiment_config;

#[test]
fn experiment_config_runs() {
    experiment_config::run().unwrap();
}

#[path = "../examples/hash_to_bins.rs"]
mod hash_to_bins;

#[test]
fn hash_to_bins_runs() {
    hash_to_bins::run().unwrap();
}

#[path = "../examples/learn_mixture.rs"]
mod learn_mixture;

#[test]
fn learn_mixture_runs() {
    learn_mixture::run().unwrap();
}

#[path = "../examples/moment_tensors.rs"]
mod moment_tensors;

#[test]
fn moment_tensors_runs() {
    moment_tensors::run().unwrap();
}

#[path = "../examples/multidim_recovery.rs"]
mod multidim_recovery;

#[test]
fn multidim_recovery_runs() {
    multidim_recovery::run().unwrap();
}

#[path = "../examples/reference_estimator.rs"]
mod reference_estimator;

#[test]
fn reference_estimator_runs() {
    reference_estimator::run().unwrap();
}

#[path = "../examples/robust_mean.rs"]
mod robust_mean;

#[test]
fn robust_mean_runs() {
    robust_mean::run().unwrap();
}

#[path = "../examples/super_resolution_1d.rs"]
mod super_resolution_1d;

#[test]
fn super_resolution_1d_runs() {
    super_resolution_1d::run().unwrap();
}
