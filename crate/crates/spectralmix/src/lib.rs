//! Robust sparse Fourier transforms in continuous frequency space and the
//! mixture learners built on them.
//!
//! * [`distributions`]: base distributions, characteristic functions,
//!   mixtures and contaminated samples.
//! * [`signal`]: Fourier-sparse signals, oracles and noise accounting.
//! * [`sft1d`]: one-dimensional robust sparse Fourier transform.
//! * [`sftd`]: `d`-dimensional recovery by random projections, and boosting.
//! * [`learners`]: mixture learning and robust mean estimation.
//! * [`moments`]: symmetric moment tensors.
//! * [`cli`]: batch experiment runners behind the command-line tool.

// Parameter checks are written `!(x > 0.0)` on purpose: they reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod rng;
pub mod distributions;
pub mod signal;
pub mod sft1d;
pub mod sftd;
pub mod learners;
pub mod moments;
pub mod cli;

pub use error::{Error, Result};
