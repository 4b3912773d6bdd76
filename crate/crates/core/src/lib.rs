//! Sandwich bounds for `log E X` from paired Monte Carlo samples.
//!
//! The crate is organised around four pieces:
//!
//! * [`bounds`] turns paired draws of a positive variable into a lower
//!   (Jensen) bound and a family of upper bounds on the log of its mean,
//!   plus a midpoint point estimate.
//! * [`dists`] provides analytic distributions whose closed forms serve as
//!   oracles for the estimators.
//! * [`harness`] runs k-sweeps and seeded replications over any positive
//!   source and writes the result tables.
//! * [`vae`] is a one-dimensional Gaussian VAE with hand-written gradients,
//!   used to bound the evidence of synthetic Laplace data.
//!
//! [`verify`] bundles the statistical properties of all of the above into a
//! single deterministic report.

pub mod bounds;
pub mod dists;
pub mod harness;
pub mod rng;
pub mod stats;
pub mod vae;
pub mod verify;

pub use bounds::{BoundReport, BoundsError, CPolicy, Estimate, PairedSamples};
pub use dists::{AnalyticDist, DistError};
pub use harness::{run_sweep, HarnessError, PositiveSource, SweepConfig, SweepResult};

/// Library version embedded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
