//! Fourier quantum Monte-Carlo integration, simulated classically.
//!
//! The numeric core ([`distributions`], [`circuits`], [`simulator`],
//! [`fourier`], [`estimators`]) is generic over the scalar type through
//! [`Real`]; amplitude estimation and the benchmark harness work in `f64`.
//! The aliases below fix the scalar to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod circuits;
pub mod distributions;
pub mod error;
pub mod estimators;
pub mod fourier;
pub mod qae;
pub mod scalar;
pub mod simulator;

pub use error::{Error, Result};
pub use scalar::Real;

pub type GridSupport = distributions::GridSupport<f64>;
pub type Distribution = distributions::DiscreteDistribution<f64>;
pub type Circuit = circuits::Circuit<f64>;
pub type Gate = circuits::Gate<f64>;
pub type Statevector = simulator::Statevector<f64>;
pub type FunctionSpec = fourier::FunctionSpec<f64>;
pub type PeriodicExtension = fourier::PeriodicExtension<f64>;
pub type FourierSeries = fourier::FourierSeries<f64>;
pub type EstimateReport = estimators::EstimateReport<f64>;

pub use qae::{QaeBudget, QaeMethod, QaeResult};
pub use simulator::ShotSampler;
