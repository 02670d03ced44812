//! Random Herglotz-Pick functions built from point processes and random
//! matrix spectra, their Stieltjes transforms and boundary values, and the
//! statistics used to test that boundary values are Cauchy distributed.

pub mod error;
pub mod hp_core;
pub mod metrics;
pub mod point_process;
pub mod quad;
pub mod rmt;
pub mod rng;
pub mod stats;
pub mod stieltjes;

pub use error::{Error, Result};
pub use hp_core::{AtomicMeasure, CircleMeasure, DiskHP, HPFunction};
pub use point_process::{NumberVarianceEstimate, PointSample};
pub use rmt::Spectrum;
pub use stats::{CauchyParams, EmpiricalDistribution, GofReport};
pub use stieltjes::TransformResult;

pub use num_complex::Complex64;
