//! Self-interacting sequential spatial point process models for gaze-like
//! trajectories.
//!
//! A fixation sequence is an ordered list of points in a rectangular window.
//! Its joint density factorizes over the temporal order,
//! `f(x_1..x_n) = f_1(x_1) * prod_k f_{k+1}(x_{k+1} | x_1..x_k)`,
//! and each transition combines up to three structural components:
//!
//! * **heterogeneity** — a saliency map `alpha(x)` weighting scene locations,
//! * **contextuality** — a truncated Gaussian jump kernel `K(x_k, x)` that
//!   penalizes long saccades,
//! * **self-interaction** — dependence on the whole history, either through a
//!   history-dependent rejection probability (convex-hull / ball-union
//!   coverage, or delayed recurrence) or through a kernel width that shrinks
//!   as coverage grows.
//!
//! The crate simulates these processes exactly, evaluates their
//! log-likelihoods by numerical integration, fits parameters by
//! profile-likelihood coordinate descent on grids, and validates fits with
//! functional summary statistics and pointwise Monte Carlo envelopes.
//!
//! See the `examples/` directory for one runnable example per capability, and
//! the `gazewalk` binary for the file-driven pipelines.

pub mod cli;
pub mod error;
pub mod geometry;
pub mod infer;
pub mod io;
pub mod kernel;
pub mod model;
pub mod quad;
pub mod rng;
pub mod saliency;
pub mod sim;
pub mod summary;
pub mod types;

pub use error::Error;
pub use types::{CoverageType, FixationSequence, KernelParams, ModelSpec, Point, Window};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
