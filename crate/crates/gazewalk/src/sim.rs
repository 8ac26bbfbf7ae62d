//! Sequential generation of realizations from any model family.
//!
//! Each transition is drawn by a two-stage accept-reject scheme: a proposal
//! from the exactly-sampled (truncated Gaussian or flat) kernel, thinned
//! first with probability `alpha(x) / max alpha` and then with the
//! history-dependent reweighting probability. Both bounds are tight, so the
//! accepted point follows the normalized transition density exactly without
//! ever evaluating the normalizing integral.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::model::{reweight_ball, reweight_hull, reweight_recurrence, HistoryState};
use crate::kernel::sample_kernel;
use crate::rng::{derive_rng, RngSpec};
use crate::saliency::SaliencyMap;
use crate::types::{FixationSequence, ModelSpec, Point, Window};
use crate::Result;

/// Abort threshold for consecutive rejected proposals; only pathological
/// saliency maps (alpha near 0 wherever the kernel mass lives) can hit it.
const MAX_CONSECUTIVE_REJECTS: u64 = 1_000_000;

/// How the first point (or points) of a realization are produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FirstMode {
    /// Draw the first point with density proportional to alpha(x).
    DrawFromSaliency,
    /// Reproduce the given points verbatim as the first entries.
    ConditionOn(Vec<Point>),
}

/// Everything needed to generate one realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub n: usize,
    pub first: FirstMode,
    pub rng: RngSpec,
    pub model: ModelSpec,
}

impl SimulationConfig {
    pub fn validate(&self, window: &Window) -> Result<()> {
        if self.n < 1 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        self.model.validate()?;
        if let FirstMode::ConditionOn(points) = &self.first {
            if points.is_empty() {
                return Err(Error::Config(
                    "condition_on requires at least one point".into(),
                ));
            }
            for (index, p) in points.iter().enumerate() {
                if !p.is_finite() {
                    return Err(Error::NonFiniteCoordinate { index });
                }
                if !window.contains(*p) {
                    return Err(Error::PointOutsideWindow { index });
                }
            }
        }
        Ok(())
    }
}

/// Draw a point with density proportional to alpha(x) by accept-reject with
/// uniform proposals and acceptance `alpha(x) / max alpha`.
pub fn sample_first(alpha: &SaliencyMap, w: &Window, rng: &mut ChaCha8Rng) -> Result<Point> {
    let max = alpha.max_value();
    if !(max > 0.0) {
        return Err(Error::ZeroMass);
    }
    let mut rejects = 0u64;
    loop {
        let p = Point::new(rng.random_range(w.a..=w.b), rng.random_range(w.c..=w.d));
        let accept: f64 = rng.random();
        if accept * max < alpha.alpha_clamped(p) {
            return Ok(p);
        }
        rejects += 1;
        if rejects >= MAX_CONSECUTIVE_REJECTS {
            return Err(Error::NonTermination(MAX_CONSECUTIVE_REJECTS));
        }
    }
}

/// Generate one realization of exactly `cfg.n` points.
pub fn simulate(cfg: &SimulationConfig, alpha: &SaliencyMap) -> Result<FixationSequence> {
    let window = *alpha.window();
    cfg.validate(&window)?;
    let max_alpha = alpha.max_value();
    if !(max_alpha > 0.0) {
        return Err(Error::ZeroMass);
    }
    let mut rng = derive_rng(cfg.rng);

    let mut points: Vec<Point> = Vec::with_capacity(cfg.n);
    match &cfg.first {
        FirstMode::DrawFromSaliency => points.push(sample_first(alpha, &window, &mut rng)?),
        FirstMode::ConditionOn(fixed) => {
            points.extend(fixed.iter().take(cfg.n).copied());
        }
    }

    let ball_radius = HistoryState::ball_radius_for(&cfg.model);
    let mut state = HistoryState::from_points(&window, &points, ball_radius)?;

    while points.len() < cfg.n {
        let next = step(&cfg.model, alpha, &state, max_alpha, &window, &mut rng)?;
        points.push(next);
        state.push(next);
    }
    Ok(FixationSequence::new(points, window))
}

/// Draw the next point given the history, following the model's normalized
/// transition density.
fn step(
    model: &ModelSpec,
    alpha: &SaliencyMap,
    state: &HistoryState,
    max_alpha: f64,
    window: &Window,
    rng: &mut ChaCha8Rng,
) -> Result<Point> {
    // Recurrence transitions need two points of history; from a single
    // conditioning point the first step is a plain random walk.
    let effective: ModelSpec = match model {
        ModelSpec::RejectionRecurrence { kernel, .. } if state.len() < 2 => {
            ModelSpec::RandomWalk { kernel: *kernel }
        }
        other => *other,
    };
    let kernel = state.effective_kernel(&effective)?;
    let mut rejects = 0u64;
    loop {
        let proposal = match effective {
            ModelSpec::Binomial => {
                Point::new(rng.random_range(window.a..=window.b), rng.random_range(window.c..=window.d))
            }
            _ => sample_kernel(state.current(), kernel, window, rng),
        };
        let u: f64 = rng.random();
        if u * max_alpha >= alpha.alpha_clamped(proposal) {
            rejects += 1;
            if rejects >= MAX_CONSECUTIVE_REJECTS {
                return Err(Error::NonTermination(MAX_CONSECUTIVE_REJECTS));
            }
            continue;
        }
        let pi = match &effective {
            ModelSpec::RejectionHull { rho, .. } => reweight_hull(state, proposal, *rho),
            ModelSpec::RejectionBall { rho, radius, .. } => {
                reweight_ball(state, proposal, *rho, *radius)
            }
            ModelSpec::RejectionRecurrence { theta, radius, .. } => {
                reweight_recurrence(state, proposal, *theta, *radius)
            }
            _ => 1.0,
        };
        if pi < 1.0 {
            let v: f64 = rng.random();
            if v >= pi {
                rejects += 1;
                if rejects >= MAX_CONSECUTIVE_REJECTS {
                    return Err(Error::NonTermination(MAX_CONSECUTIVE_REJECTS));
                }
                continue;
            }
        }
        return Ok(proposal);
    }
}

/// Generate `count` realizations on rng streams `0..count`, independent of
/// execution order.
pub fn simulate_batch(
    cfg: &SimulationConfig,
    alpha: &SaliencyMap,
    count: usize,
) -> Result<Vec<FixationSequence>> {
    if count < 1 {
        return Err(Error::Config("batch count must be at least 1".into()));
    }
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut one = cfg.clone();
            one.rng = cfg.rng.with_stream(i as u64);
            simulate(&one, alpha)
        })
        .collect()
}
