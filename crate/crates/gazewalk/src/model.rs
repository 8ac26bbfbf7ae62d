//! Transition densities of all model families.
//!
//! Every family's conditional density for the transition `x_k -> x` has the
//! shape `alpha(x) * K(x_k, x) * pi(x, history)` up to normalization:
//!
//! * binomial: `alpha(x)` alone,
//! * random walk: `alpha(x) * K(x_k, x)`,
//! * rejection families: an extra reweighting probability that is 1 outside
//!   the covered region (hull or ball union) and `rho` inside, or
//!   `theta` / `1 - theta` split by the delayed recurrence count,
//! * history-adapted: the kernel width `phi_k` shrinks with coverage.
//!
//! Normalizing constants are midpoint-quadrature integrals over the window.

use crate::error::Error;
use crate::geometry::{
    convex_hull, recurrence_count, ConvexHull, IncrementalBallCoverage,
};
use crate::kernel::{adapted_width, kernel_unnorm};
use crate::quad::QuadratureGrid;
use crate::saliency::SaliencyMap;
use crate::types::{CoverageType, KernelParams, ModelSpec, Point, Window};
use crate::Result;

/// Sequence history with cached hull and (optionally) ball-union coverage.
///
/// Caches are updated incrementally on `push` and always equal a full
/// recomputation from scratch.
#[derive(Debug, Clone)]
pub struct HistoryState {
    window: Window,
    points: Vec<Point>,
    hull: ConvexHull,
    ball: Option<IncrementalBallCoverage>,
}

impl HistoryState {
    /// Start a history from its first point. `ball_radius` enables the
    /// ball-union coverage cache (needed by the history-adapted ball
    /// variant).
    pub fn new(window: &Window, first: Point, ball_radius: Option<f64>) -> Result<Self> {
        let mut ball = match ball_radius {
            Some(r) => Some(IncrementalBallCoverage::new(window, r)?),
            None => None,
        };
        if let Some(b) = ball.as_mut() {
            b.push(first);
        }
        Ok(HistoryState {
            window: *window,
            points: vec![first],
            hull: convex_hull(&[first]).expect("non-empty"),
            ball,
        })
    }

    /// Build a history from an existing prefix.
    pub fn from_points(window: &Window, points: &[Point], ball_radius: Option<f64>) -> Result<Self> {
        let (&first, rest) = points.split_first().ok_or(Error::EmptyInput)?;
        let mut state = HistoryState::new(window, first, ball_radius)?;
        for &p in rest {
            state.push(p);
        }
        Ok(state)
    }

    /// Ball cache radius required by a model family, if any.
    pub fn ball_radius_for(spec: &ModelSpec) -> Option<f64> {
        match spec {
            ModelSpec::HistoryAdapted {
                coverage: CoverageType::Ball { radius },
                ..
            } => Some(*radius),
            _ => None,
        }
    }

    pub fn push(&mut self, p: Point) {
        self.points.push(p);
        self.hull = self.hull.with_point(p);
        if let Some(b) = self.ball.as_mut() {
            b.push(p);
        }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The most recent point `x_k`.
    pub fn current(&self) -> Point {
        *self.points.last().expect("history is never empty")
    }

    pub fn hull(&self) -> &ConvexHull {
        &self.hull
    }

    pub fn hull_coverage(&self) -> f64 {
        self.hull.area()
    }

    pub fn ball_coverage(&self) -> Option<f64> {
        self.ball.as_ref().map(|b| b.area())
    }

    /// Coverage area for the history-adapted width.
    pub fn coverage(&self, ctype: CoverageType) -> f64 {
        match ctype {
            CoverageType::Hull => self.hull_coverage(),
            CoverageType::Ball { .. } => self
                .ball_coverage()
                .expect("ball coverage cache not enabled for this history"),
        }
    }

    /// Kernel parameters the model uses for the next transition (adapted
    /// width for the history-adapted family, fixed otherwise).
    pub fn effective_kernel(&self, spec: &ModelSpec) -> Result<KernelParams> {
        Ok(match spec {
            ModelSpec::Binomial => KernelParams::Flat,
            ModelSpec::RandomWalk { kernel }
            | ModelSpec::RejectionHull { kernel, .. }
            | ModelSpec::RejectionBall { kernel, .. }
            | ModelSpec::RejectionRecurrence { kernel, .. } => *kernel,
            ModelSpec::HistoryAdapted {
                tau,
                kappa,
                coverage,
            } => KernelParams::Gaussian {
                variance: adapted_width(
                    *tau,
                    *kappa,
                    self.coverage(*coverage),
                    self.window.area(),
                )?,
            },
        })
    }
}

/// Hull reweighting probability: 1 outside `Conv(x_1..x_k)`, `rho` inside.
pub fn reweight_hull(state: &HistoryState, x: Point, rho: f64) -> f64 {
    if state.hull.contains(x) {
        rho
    } else {
        1.0
    }
}

/// Ball-union reweighting: 1 outside `Bcov(x_1..x_k)`, `rho` inside. The
/// covered region includes the current point's ball.
pub fn reweight_ball(state: &HistoryState, x: Point, rho: f64, r: f64) -> f64 {
    if recurrence_count(state.points(), x, r) >= 1 {
        rho
    } else {
        1.0
    }
}

/// Recurrence reweighting: `theta` when the delayed recurrence count is at
/// least 1, `1 - theta` when it is 0. Requires a history of length >= 2.
pub fn reweight_recurrence(state: &HistoryState, x: Point, theta: f64, r: f64) -> f64 {
    debug_assert!(state.len() >= 2);
    let k = state.len();
    if recurrence_count(&state.points()[..k - 1], x, r) >= 1 {
        theta
    } else {
        1.0 - theta
    }
}

/// Unnormalized transition density `f_{k+1}(x | x_1..x_k)` up to the
/// normalizing integral.
pub fn transition_unnorm(
    spec: &ModelSpec,
    alpha: &SaliencyMap,
    state: &HistoryState,
    x: Point,
) -> Result<f64> {
    if state.len() < spec.min_history() {
        return Err(Error::HistoryTooShort {
            have: state.len(),
            need: spec.min_history(),
        });
    }
    let a = alpha.alpha_clamped(x);
    let value = match spec {
        ModelSpec::Binomial => a,
        ModelSpec::RandomWalk { kernel } => a * kernel_unnorm(state.current(), x, *kernel),
        ModelSpec::RejectionHull { kernel, rho } => {
            a * kernel_unnorm(state.current(), x, *kernel) * reweight_hull(state, x, *rho)
        }
        ModelSpec::RejectionBall {
            kernel,
            rho,
            radius,
        } => a * kernel_unnorm(state.current(), x, *kernel) * reweight_ball(state, x, *rho, *radius),
        ModelSpec::RejectionRecurrence {
            kernel,
            theta,
            radius,
        } => {
            a * kernel_unnorm(state.current(), x, *kernel)
                * reweight_recurrence(state, x, *theta, *radius)
        }
        ModelSpec::HistoryAdapted { .. } => {
            let kernel = state.effective_kernel(spec)?;
            a * kernel_unnorm(state.current(), x, kernel)
        }
    };
    Ok(value)
}

/// Numerical integral of [`transition_unnorm`] over the window.
pub fn transition_norm_const(
    spec: &ModelSpec,
    state: &HistoryState,
    quad: &QuadratureGrid,
) -> Result<f64> {
    if state.len() < spec.min_history() {
        return Err(Error::HistoryTooShort {
            have: state.len(),
            need: spec.min_history(),
        });
    }
    let current = state.current();
    let z = match spec {
        ModelSpec::Binomial => quad.integrate(|i| quad.alpha[i]),
        ModelSpec::RandomWalk { kernel } => {
            quad.integrate(|i| quad.alpha[i] * kernel_unnorm(current, quad.centers[i], *kernel))
        }
        ModelSpec::RejectionHull { kernel, rho } => {
            let f = quad.hull_fraction_field(state.hull());
            quad.integrate(|i| {
                let pi = 1.0 - (1.0 - rho) * f[i];
                quad.alpha[i] * kernel_unnorm(current, quad.centers[i], *kernel) * pi
            })
        }
        ModelSpec::RejectionBall {
            kernel,
            rho,
            radius,
        } => {
            let f = quad.ball_fraction_field(state.points(), *radius);
            quad.integrate(|i| {
                let pi = 1.0 - (1.0 - rho) * f[i];
                quad.alpha[i] * kernel_unnorm(current, quad.centers[i], *kernel) * pi
            })
        }
        ModelSpec::RejectionRecurrence {
            kernel,
            theta,
            radius,
        } => {
            let k = state.len();
            let f = quad.ball_fraction_field(&state.points()[..k - 1], *radius);
            quad.integrate(|i| {
                let pi = (1.0 - theta) * (1.0 - f[i]) + theta * f[i];
                quad.alpha[i] * kernel_unnorm(current, quad.centers[i], *kernel) * pi
            })
        }
        ModelSpec::HistoryAdapted { .. } => {
            let kernel = state.effective_kernel(spec)?;
            quad.integrate(|i| quad.alpha[i] * kernel_unnorm(current, quad.centers[i], kernel))
        }
    };
    if !(z > 0.0) {
        return Err(Error::ZeroMass);
    }
    Ok(z)
}

/// Normalized log transition density at `x`.
pub fn transition_logpdf(
    spec: &ModelSpec,
    alpha: &SaliencyMap,
    state: &HistoryState,
    x: Point,
    quad: &QuadratureGrid,
) -> Result<f64> {
    let u = transition_unnorm(spec, alpha, state, x)?;
    if !(u > 0.0) {
        return Err(Error::ZeroDensityAtPoint);
    }
    let z = transition_norm_const(spec, state, quad)?;
    Ok(u.ln() - z.ln())
}
