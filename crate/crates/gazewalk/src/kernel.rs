//! The Markovian transition kernel: truncated Gaussian evaluation, exact
//! window normalization, exact rejection-free sampling, and the
//! history-adapted width.
//!
//! The normalization of the truncated Gaussian centered at `(cx, cy)` on
//! `W = [a,b] x [c,d]` is
//!
//! ```text
//! 2 pi sigma^2 [Phi((b-cx)/sigma) - Phi((a-cx)/sigma)]
//!             [Phi((d-cy)/sigma) - Phi((c-cy)/sigma)]
//! ```
//!
//! i.e. the Gaussian mass inside the window, centered at the kernel's center
//! and scaled by sigma. This is verified against adaptive 2D quadrature in
//! the test suite.

use rand::Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::Error;
use crate::types::{KernelParams, Point, Window};
use crate::Result;

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    let n = Normal::standard();
    n.cdf(z)
}

/// Standard normal quantile function.
pub fn normal_quantile(p: f64) -> f64 {
    let n = Normal::standard();
    n.inverse_cdf(p)
}

/// Unnormalized kernel value `exp(-||center - x||^2 / (2 variance))`;
/// 1 for the flat kernel.
pub fn kernel_unnorm(center: Point, x: Point, p: KernelParams) -> f64 {
    match p {
        KernelParams::Flat => 1.0,
        KernelParams::Gaussian { variance } => (-center.dist2(x) / (2.0 * variance)).exp(),
    }
}

/// Exact window integral of [`kernel_unnorm`]: the closed-form truncated
/// Gaussian mass, or `|W|` for the flat kernel.
pub fn kernel_norm_const(center: Point, p: KernelParams, w: &Window) -> f64 {
    match p {
        KernelParams::Flat => w.area(),
        KernelParams::Gaussian { variance } => {
            let sigma = variance.sqrt();
            let fx = normal_cdf((w.b - center.x) / sigma) - normal_cdf((w.a - center.x) / sigma);
            let fy = normal_cdf((w.d - center.y) / sigma) - normal_cdf((w.c - center.y) / sigma);
            2.0 * std::f64::consts::PI * variance * fx * fy
        }
    }
}

/// Exact draw from the normalized kernel on `W` (uniform when flat).
///
/// The truncated Gaussian is separable over the axes, so each coordinate is
/// drawn by inverse-CDF sampling of a one-dimensional truncated normal. No
/// rejection is involved, so the cost is flat in sigma.
pub fn sample_kernel<R: Rng + ?Sized>(
    center: Point,
    p: KernelParams,
    w: &Window,
    rng: &mut R,
) -> Point {
    match p {
        KernelParams::Flat => Point::new(
            rng.random_range(w.a..=w.b),
            rng.random_range(w.c..=w.d),
        ),
        KernelParams::Gaussian { variance } => {
            let sigma = variance.sqrt();
            let x = sample_truncated_normal_axis(center.x, sigma, w.a, w.b, rng);
            let y = sample_truncated_normal_axis(center.y, sigma, w.c, w.d, rng);
            Point::new(x, y)
        }
    }
}

fn sample_truncated_normal_axis<R: Rng + ?Sized>(
    mean: f64,
    sigma: f64,
    lo: f64,
    hi: f64,
    rng: &mut R,
) -> f64 {
    let plo = normal_cdf((lo - mean) / sigma);
    let phi = normal_cdf((hi - mean) / sigma);
    let u: f64 = rng.random_range(plo..=phi);
    // Clamp guards against inverse_cdf(1.0) = inf when the upper tail mass
    // rounds to exactly 1.
    (mean + sigma * normal_quantile(u)).clamp(lo, hi)
}

/// History-adapted kernel width `tau * exp(-kappa * coverage / |W|)`.
pub fn adapted_width(tau: f64, kappa: f64, coverage: f64, window_area: f64) -> Result<f64> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::ParamOutOfRange {
            name: "tau",
            value: tau,
        });
    }
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return Err(Error::ParamOutOfRange {
            name: "kappa",
            value: kappa,
        });
    }
    if !(0.0..=window_area).contains(&coverage) {
        return Err(Error::ParamOutOfRange {
            name: "coverage",
            value: coverage,
        });
    }
    Ok(tau * (-kappa * coverage / window_area).exp())
}
