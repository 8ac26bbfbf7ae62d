//! Shared domain types: observation window, points, fixation sequences and
//! model specifications.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

/// Axis-aligned rectangular observation window `W = [a,b] x [c,d]`.
///
/// The window is closed: points exactly on the boundary are valid (eye
/// trackers emit boundary pixels).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Window {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let w = Window { a, b, c, d };
        if !(a.is_finite() && b.is_finite() && c.is_finite() && d.is_finite()) || a >= b || c >= d {
            return Err(Error::DegenerateWindow);
        }
        Ok(w)
    }

    /// The unit square `[0,1] x [0,1]`.
    pub fn unit_square() -> Self {
        Window {
            a: 0.0,
            b: 1.0,
            c: 0.0,
            d: 1.0,
        }
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn height(&self) -> f64 {
        self.d - self.c
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn longer_side(&self) -> f64 {
        self.width().max(self.height())
    }

    /// Closed-boundary membership test.
    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.a && p.x <= self.b && p.y >= self.c && p.y <= self.d
    }

    pub fn center(&self) -> Point {
        Point::new((self.a + self.b) / 2.0, (self.c + self.d) / 2.0)
    }
}

/// A planar point (fixation location or candidate location).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Squared Euclidean distance.
    pub fn dist2(&self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn dist(&self, other: Point) -> f64 {
        self.dist2(other).sqrt()
    }
}

/// A time-ordered sequence of fixation points inside a window.
///
/// The order is meaningful and preserved by every operation in the crate;
/// the optional timestamps are carried through I/O but unused by the models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixationSequence {
    pub points: Vec<Point>,
    pub window: Window,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subject: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times_ms: Option<Vec<f64>>,
}

impl FixationSequence {
    pub fn new(points: Vec<Point>, window: Window) -> Self {
        FixationSequence {
            points,
            window,
            subject: None,
            times_ms: None,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Checks all sequence invariants: non-empty, finite coordinates, every
    /// point inside the (closed) window.
    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::EmptySequence);
        }
        for (index, p) in self.points.iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::NonFiniteCoordinate { index });
            }
            if !self.window.contains(*p) {
                return Err(Error::PointOutsideWindow { index });
            }
        }
        Ok(())
    }
}

/// Validate a fixation sequence, reporting the first violated invariant.
pub fn validate_sequence(seq: &FixationSequence) -> Result<()> {
    seq.validate()
}

/// Jump-kernel parameterization: a truncated Gaussian of given variance, or
/// the exact uniform kernel on the window (the "sigma^2 large" device).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelParams {
    Gaussian { variance: f64 },
    Flat,
}

impl KernelParams {
    pub fn gaussian(variance: f64) -> Self {
        KernelParams::Gaussian { variance }
    }

    pub fn is_flat(&self) -> bool {
        matches!(self, KernelParams::Flat)
    }

    pub fn validate(&self) -> Result<()> {
        if let KernelParams::Gaussian { variance } = self {
            if !(*variance > 0.0 && variance.is_finite()) {
                return Err(Error::ParamOutOfRange {
                    name: "variance",
                    value: *variance,
                });
            }
        }
        Ok(())
    }
}

/// Coverage measure used by the history-adapted kernel width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverageType {
    Hull,
    Ball { radius: f64 },
}

/// A model family together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ModelSpec {
    /// Heterogeneity only: each point drawn independently with density
    /// proportional to alpha(x).
    Binomial,
    /// Random walk in heterogeneous media: alpha(x) * K(x_k, x).
    RandomWalk { kernel: KernelParams },
    /// Rejection model with convex-hull coverage reweighting.
    RejectionHull { kernel: KernelParams, rho: f64 },
    /// Rejection model with ball-union coverage reweighting.
    RejectionBall {
        kernel: KernelParams,
        rho: f64,
        radius: f64,
    },
    /// Rejection model with delayed-recurrence reweighting.
    RejectionRecurrence {
        kernel: KernelParams,
        theta: f64,
        radius: f64,
    },
    /// Random walk whose kernel width shrinks as coverage grows.
    HistoryAdapted {
        tau: f64,
        kappa: f64,
        coverage: CoverageType,
    },
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        use ModelSpec::*;
        match self {
            Binomial => Ok(()),
            RandomWalk { kernel } => kernel.validate(),
            RejectionHull { kernel, rho } => {
                kernel.validate()?;
                check_unit("rho", *rho)
            }
            RejectionBall {
                kernel,
                rho,
                radius,
            } => {
                kernel.validate()?;
                check_unit("rho", *rho)?;
                check_radius(*radius)
            }
            RejectionRecurrence {
                kernel,
                theta,
                radius,
            } => {
                kernel.validate()?;
                check_unit("theta", *theta)?;
                check_radius(*radius)
            }
            HistoryAdapted {
                tau,
                kappa,
                coverage,
            } => {
                if !(*tau > 0.0 && tau.is_finite()) {
                    return Err(Error::ParamOutOfRange {
                        name: "tau",
                        value: *tau,
                    });
                }
                if !(*kappa >= 0.0 && kappa.is_finite()) {
                    return Err(Error::ParamOutOfRange {
                        name: "kappa",
                        value: *kappa,
                    });
                }
                if let CoverageType::Ball { radius } = coverage {
                    check_radius(*radius)?;
                }
                Ok(())
            }
        }
    }

    /// Minimum history length needed before this family's transition density
    /// applies (the recurrence model conditions on the first two points).
    pub fn min_history(&self) -> usize {
        match self {
            ModelSpec::RejectionRecurrence { .. } => 2,
            _ => 1,
        }
    }
}

fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::ParamOutOfRange { name, value })
    }
}

fn check_radius(radius: f64) -> Result<()> {
    if radius > 0.0 && radius.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveRadius(radius))
    }
}
