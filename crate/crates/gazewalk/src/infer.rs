//! Log-likelihood evaluation, profile-likelihood grid fitting, and
//! parametric-bootstrap confidence intervals.
//!
//! A sequence's log-likelihood is a sum of normalized log transition
//! densities, starting from a conditioning prefix: length 1 for the
//! hull-rejection family, length 2 for the recurrence and adapted families
//! (their first transition needs two points of history).
//!
//! Fitting maximizes over parameter grids by coordinate descent — scan the
//! scale grid at a fixed interaction parameter, then the interaction grid at
//! the new scale, iterate to a grid fixed point. For the rejection families
//! the normalizing integral factorizes as `Z = A + rho B` (hull) or
//! `Z = (1-theta) A + theta B` (recurrence), where `A` and `B` depend only on
//! the scale, so the expensive tables are computed once per scale value and
//! every grid point afterwards costs O(n).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geometry::{convex_hull, recurrence_count, ConvexHull};
use crate::kernel::kernel_unnorm;
use crate::model::{transition_logpdf, HistoryState};
use crate::quad::QuadratureGrid;
use crate::rng::RngSpec;
use crate::saliency::SaliencyMap;
use crate::sim::{simulate, FirstMode, SimulationConfig};
use crate::types::{CoverageType, FixationSequence, KernelParams, ModelSpec, Point};
use crate::Result;

// ---------------------------------------------------------------------------
// Log-likelihoods
// ---------------------------------------------------------------------------

/// Conditioning-prefix length from which a family's log-likelihood sums
/// transitions: 1 for hull rejection (and plain walks), 2 for the recurrence
/// and adapted families.
pub fn default_k_start(spec: &ModelSpec) -> usize {
    match spec {
        ModelSpec::RejectionRecurrence { .. } | ModelSpec::HistoryAdapted { .. } => 2,
        _ => 1,
    }
}

/// Sum of normalized log transition densities for prefixes of length
/// `k_start ..= n-1` (so the first `k_start` points are conditioned on).
pub fn loglik_model_from(
    spec: &ModelSpec,
    seq: &FixationSequence,
    alpha: &SaliencyMap,
    quad: &QuadratureGrid,
    k_start: usize,
) -> Result<f64> {
    spec.validate()?;
    seq.validate()?;
    let n = seq.len();
    if k_start < spec.min_history() || n < k_start + 1 {
        return Err(Error::HistoryTooShort {
            have: n,
            need: k_start + 1,
        });
    }
    let ball_radius = HistoryState::ball_radius_for(spec);
    let mut state = HistoryState::from_points(&seq.window, &seq.points[..k_start], ball_radius)?;
    let mut total = 0.0;
    for k in k_start..n {
        let x = seq.points[k];
        let lp = transition_logpdf(spec, alpha, &state, x, quad).map_err(|e| match e {
            Error::ZeroDensityAtPoint => Error::ZeroDensityAtObservation { k: k + 1 },
            other => other,
        })?;
        total += lp;
        state.push(x);
    }
    Ok(total)
}

/// Convenience: log-likelihood with the family's default conditioning prefix.
pub fn loglik_model(
    spec: &ModelSpec,
    seq: &FixationSequence,
    alpha: &SaliencyMap,
    quad: &QuadratureGrid,
) -> Result<f64> {
    loglik_model_from(spec, seq, alpha, quad, default_k_start(spec))
}

/// Hull-rejection log-likelihood in `(sigma^2, rho)`, transitions from
/// prefix length 1.
pub fn loglik_rejection_hull(
    seq: &FixationSequence,
    sigma2: f64,
    rho: f64,
    alpha: &SaliencyMap,
    quad: &QuadratureGrid,
) -> Result<f64> {
    let spec = ModelSpec::RejectionHull {
        kernel: KernelParams::gaussian(sigma2),
        rho,
    };
    loglik_model_from(&spec, seq, alpha, quad, 1)
}

/// Recurrence-rejection log-likelihood in `(kernel, theta)`, transitions
/// from prefix length 2. A boundary `theta` (0 or 1) is an error when both
/// indicator classes occur among the observed transitions, since one of the
/// log terms would be -inf.
pub fn loglik_rejection_recurrence(
    seq: &FixationSequence,
    kernel: KernelParams,
    theta: f64,
    alpha: &SaliencyMap,
    r: f64,
    quad: &QuadratureGrid,
) -> Result<f64> {
    let spec = ModelSpec::RejectionRecurrence {
        kernel,
        theta,
        radius: r,
    };
    spec.validate()?;
    if theta == 0.0 || theta == 1.0 {
        let mut recurrent = false;
        let mut non_recurrent = false;
        for k in 2..seq.len() {
            if recurrence_count(&seq.points[..k - 1], seq.points[k], r) >= 1 {
                recurrent = true;
            } else {
                non_recurrent = true;
            }
        }
        if recurrent && non_recurrent {
            return Err(Error::ThetaOnBoundaryWithMismatch);
        }
    }
    loglik_model_from(&spec, seq, alpha, quad, 2)
}

/// History-adapted log-likelihood in `(tau, kappa)`, transitions from
/// prefix length 2.
pub fn loglik_adapted(
    seq: &FixationSequence,
    tau: f64,
    kappa: f64,
    alpha: &SaliencyMap,
    coverage: CoverageType,
    quad: &QuadratureGrid,
) -> Result<f64> {
    let spec = ModelSpec::HistoryAdapted {
        tau,
        kappa,
        coverage,
    };
    loglik_model_from(&spec, seq, alpha, quad, 2)
}

// ---------------------------------------------------------------------------
// Profile-likelihood fitting
// ---------------------------------------------------------------------------

/// Which two-parameter family to fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FitFamily {
    /// (sigma, rho); the scale grid is in sigma (length units).
    RejectionHull,
    /// (sigma, theta); `flat_kernel` fixes the kernel to the exact uniform
    /// kernel, in which case the scale grid is ignored.
    RejectionRecurrence { radius: f64, flat_kernel: bool },
    /// (tau, kappa); the scale grid is in tau (variance units).
    HistoryAdapted { coverage: CoverageType },
}

impl FitFamily {
    /// Conditioning-prefix length of the family's log-likelihood.
    pub fn k_start(&self) -> usize {
        match self {
            FitFamily::RejectionHull => 1,
            _ => 2,
        }
    }

    pub fn scale_name(&self) -> &'static str {
        match self {
            FitFamily::HistoryAdapted { .. } => "tau",
            _ => "sigma",
        }
    }

    pub fn interaction_name(&self) -> &'static str {
        match self {
            FitFamily::RejectionHull => "rho",
            FitFamily::RejectionRecurrence { .. } => "theta",
            FitFamily::HistoryAdapted { .. } => "kappa",
        }
    }

    /// Interaction value at which the family degenerates to a plain walk;
    /// coordinate descent starts from the grid value nearest to it.
    fn neutral_interaction(&self) -> f64 {
        match self {
            FitFamily::RejectionHull => 1.0,
            FitFamily::RejectionRecurrence { .. } => 0.5,
            FitFamily::HistoryAdapted { .. } => 0.0,
        }
    }

    fn has_scale(&self) -> bool {
        !matches!(
            self,
            FitFamily::RejectionRecurrence {
                flat_kernel: true,
                ..
            }
        )
    }

    /// The concrete model at given parameter values. `scale` is sigma
    /// (squared internally) or tau; `None` only for the flat kernel.
    pub fn model(&self, scale: Option<f64>, interaction: f64) -> Result<ModelSpec> {
        let spec = match *self {
            FitFamily::RejectionHull => ModelSpec::RejectionHull {
                kernel: gaussian_from_sigma(scale)?,
                rho: interaction,
            },
            FitFamily::RejectionRecurrence {
                radius,
                flat_kernel,
            } => ModelSpec::RejectionRecurrence {
                kernel: if flat_kernel {
                    KernelParams::Flat
                } else {
                    gaussian_from_sigma(scale)?
                },
                theta: interaction,
                radius,
            },
            FitFamily::HistoryAdapted { coverage } => ModelSpec::HistoryAdapted {
                tau: scale.ok_or(Error::Config("tau value required".into()))?,
                kappa: interaction,
                coverage,
            },
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn gaussian_from_sigma(sigma: Option<f64>) -> Result<KernelParams> {
    let s = sigma.ok_or(Error::Config("sigma value required".into()))?;
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::ParamOutOfRange {
            name: "sigma",
            value: s,
        });
    }
    Ok(KernelParams::Gaussian { variance: s * s })
}

/// One half-step of the coordinate descent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub scale: Option<f64>,
    pub interaction: f64,
    pub loglik: f64,
}

/// Outcome of [`fit_profile`]; estimates lie on the supplied grids and the
/// trace is non-decreasing in log-likelihood.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub family: FitFamily,
    /// Estimated sigma (length units) or tau; `None` for the flat kernel.
    pub scale: Option<f64>,
    pub interaction: f64,
    pub loglik: f64,
    pub scale_grid: Vec<f64>,
    pub interaction_grid: Vec<f64>,
    pub trace: Vec<TraceStep>,
    pub converged: bool,
}

impl FitResult {
    /// The fitted model at the estimates.
    pub fn model(&self) -> Result<ModelSpec> {
        self.family.model(self.scale, self.interaction)
    }
}

/// Per-transition quantities for the separable rejection families.
struct SeparableTables {
    /// log alpha(x_{k+1}) per transition.
    log_alpha: Vec<f64>,
    /// Region indicator at the observed target.
    indicator: Vec<bool>,
    /// [scale][transition] log of the unnormalized kernel at the target.
    log_kobs: Vec<Vec<f64>>,
    /// [scale][transition] integral of alpha * K over the region complement.
    a: Vec<Vec<f64>>,
    /// [scale][transition] integral of alpha * K over the region.
    b: Vec<Vec<f64>>,
}

fn build_separable_tables(
    seq: &FixationSequence,
    family: &FitFamily,
    kernels: &[KernelParams],
    alpha: &SaliencyMap,
    quad: &QuadratureGrid,
) -> Result<SeparableTables> {
    let pts = &seq.points;
    let n = pts.len();
    let k_start = family.k_start();
    let transitions: Vec<usize> = (k_start..n).collect();

    // Hull prefixes are cheap to maintain incrementally; snapshot them so the
    // per-transition work can run in parallel.
    let hulls: Option<Vec<ConvexHull>> = match family {
        FitFamily::RejectionHull => {
            let mut hulls = Vec::with_capacity(n);
            let mut h = convex_hull(&pts[..1]).expect("non-empty");
            hulls.push(h.clone());
            for &p in &pts[1..] {
                h = h.with_point(p);
                hulls.push(h.clone());
            }
            Some(hulls)
        }
        _ => None,
    };

    let per_t: Vec<(f64, bool, Vec<f64>, Vec<f64>, Vec<f64>)> = transitions
        .par_iter()
        .map(|&k| {
            let x = pts[k];
            let current = pts[k - 1];
            let (field, indicator) = match family {
                FitFamily::RejectionHull => {
                    let hull = &hulls.as_ref().unwrap()[k - 1];
                    (quad.hull_fraction_field(hull), hull.contains(x))
                }
                FitFamily::RejectionRecurrence { radius, .. } => (
                    quad.ball_fraction_field(&pts[..k - 1], *radius),
                    recurrence_count(&pts[..k - 1], x, *radius) >= 1,
                ),
                FitFamily::HistoryAdapted { .. } => unreachable!("not separable"),
            };
            let log_alpha = lnz(alpha.alpha_clamped(x));
            let mut log_kobs = Vec::with_capacity(kernels.len());
            let mut a = Vec::with_capacity(kernels.len());
            let mut b = Vec::with_capacity(kernels.len());
            for &kp in kernels {
                log_kobs.push(lnz(kernel_unnorm(current, x, kp)));
                let mut ai = 0.0;
                let mut bi = 0.0;
                for i in 0..quad.centers.len() {
                    let v = quad.alpha[i] * kernel_unnorm(current, quad.centers[i], kp);
                    ai += v * (1.0 - field[i]);
                    bi += v * field[i];
                }
                a.push(ai * quad.cell_area);
                b.push(bi * quad.cell_area);
            }
            (log_alpha, indicator, log_kobs, a, b)
        })
        .collect();

    let t = per_t.len();
    let s = kernels.len();
    let mut tables = SeparableTables {
        log_alpha: Vec::with_capacity(t),
        indicator: Vec::with_capacity(t),
        log_kobs: vec![Vec::with_capacity(t); s],
        a: vec![Vec::with_capacity(t); s],
        b: vec![Vec::with_capacity(t); s],
    };
    for (la, ind, lk, a, b) in per_t {
        tables.log_alpha.push(la);
        tables.indicator.push(ind);
        for si in 0..s {
            tables.log_kobs[si].push(lk[si]);
            tables.a[si].push(a[si]);
            tables.b[si].push(b[si]);
        }
    }
    Ok(tables)
}

/// ln with 0 mapping to -inf instead of NaN inputs propagating.
fn lnz(v: f64) -> f64 {
    if v > 0.0 {
        v.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// Per-transition quantities for the history-adapted family.
struct AdaptedTables {
    log_alpha: Vec<f64>,
    d2: Vec<f64>,
    coverage: Vec<f64>,
    /// [transition][cell] squared distance from the transition's current
    /// point to the cell center.
    dist2: Vec<Vec<f64>>,
    window_area: f64,
}

fn build_adapted_tables(
    seq: &FixationSequence,
    coverage: CoverageType,
    alpha: &SaliencyMap,
    quad: &QuadratureGrid,
) -> Result<AdaptedTables> {
    let pts = &seq.points;
    let n = pts.len();
    let ball_radius = match coverage {
        CoverageType::Ball { radius } => Some(radius),
        CoverageType::Hull => None,
    };
    let mut state = HistoryState::from_points(&seq.window, &pts[..2], ball_radius)?;
    let mut tables = AdaptedTables {
        log_alpha: Vec::new(),
        d2: Vec::new(),
        coverage: Vec::new(),
        dist2: Vec::new(),
        window_area: seq.window.area(),
    };
    for k in 2..n {
        let x = pts[k];
        let current = pts[k - 1];
        tables.log_alpha.push(lnz(alpha.alpha_clamped(x)));
        tables.d2.push(current.dist2(x));
        tables.coverage.push(state.coverage(coverage));
        tables
            .dist2
            .push(quad.centers.iter().map(|c| current.dist2(*c)).collect());
        state.push(x);
    }
    Ok(tables)
}

fn adapted_ll(
    tables: &AdaptedTables,
    quad: &QuadratureGrid,
    tau: f64,
    kappa: f64,
) -> f64 {
    tables
        .log_alpha
        .par_iter()
        .enumerate()
        .map(|(t, &la)| {
            let phi = tau * (-kappa * tables.coverage[t] / tables.window_area).exp();
            let z: f64 = tables.dist2[t]
                .iter()
                .zip(&quad.alpha)
                .map(|(&d2, &a)| a * (-d2 / (2.0 * phi)).exp())
                .sum::<f64>()
                * quad.cell_area;
            la - tables.d2[t] / (2.0 * phi) - lnz(z)
        })
        .sum()
}

/// Fit a two-parameter family by coordinate descent on grids.
///
/// Grids are sorted ascending internally; ties in a grid scan go to the
/// smallest parameter value. `scale_grid` holds sigma (length units) for the
/// rejection families and tau (variance units) for the adapted family; it is
/// ignored when the kernel is flat.
pub fn fit_profile(
    seq: &FixationSequence,
    family: FitFamily,
    scale_grid: &[f64],
    interaction_grid: &[f64],
    alpha: &SaliencyMap,
    quad: &QuadratureGrid,
    max_iter: usize,
) -> Result<FitResult> {
    seq.validate()?;
    if interaction_grid.is_empty() || (family.has_scale() && scale_grid.is_empty()) {
        return Err(Error::Config("parameter grids must be non-empty".into()));
    }
    if seq.len() < family.k_start() + 1 {
        return Err(Error::HistoryTooShort {
            have: seq.len(),
            need: family.k_start() + 1,
        });
    }
    let mut scales: Vec<f64> = if family.has_scale() {
        scale_grid.to_vec()
    } else {
        Vec::new()
    };
    scales.sort_by(|x, y| x.partial_cmp(y).unwrap());
    scales.dedup();
    let mut inters: Vec<f64> = interaction_grid.to_vec();
    inters.sort_by(|x, y| x.partial_cmp(y).unwrap());
    inters.dedup();

    // Evaluator ll(si, ii); si indexes `scale_axis` (a single dummy entry
    // for the flat kernel).
    let scale_axis: Vec<Option<f64>> = if family.has_scale() {
        scales.iter().map(|&s| Some(s)).collect()
    } else {
        vec![None]
    };

    enum Eval {
        Separable(SeparableTables),
        Adapted(AdaptedTables),
    }
    let eval = match family {
        FitFamily::HistoryAdapted { coverage } => {
            Eval::Adapted(build_adapted_tables(seq, coverage, alpha, quad)?)
        }
        _ => {
            let kernels: Vec<KernelParams> = scale_axis
                .iter()
                .map(|s| match s {
                    Some(sigma) => gaussian_from_sigma(Some(*sigma)),
                    None => Ok(KernelParams::Flat),
                })
                .collect::<Result<_>>()?;
            Eval::Separable(build_separable_tables(seq, &family, &kernels, alpha, quad)?)
        }
    };

    let ll = |si: usize, ii: usize| -> f64 {
        let inter = inters[ii];
        match &eval {
            Eval::Separable(tb) => {
                let mut total = 0.0;
                for t in 0..tb.log_alpha.len() {
                    let (log_pi, z) = match family {
                        FitFamily::RejectionHull => (
                            if tb.indicator[t] { lnz(inter) } else { 0.0 },
                            tb.a[si][t] + inter * tb.b[si][t],
                        ),
                        FitFamily::RejectionRecurrence { .. } => (
                            if tb.indicator[t] {
                                lnz(inter)
                            } else {
                                lnz(1.0 - inter)
                            },
                            (1.0 - inter) * tb.a[si][t] + inter * tb.b[si][t],
                        ),
                        FitFamily::HistoryAdapted { .. } => unreachable!(),
                    };
                    total += tb.log_alpha[t] + tb.log_kobs[si][t] + log_pi - lnz(z);
                }
                total
            }
            Eval::Adapted(tb) => adapted_ll(tb, quad, scale_axis[si].unwrap(), inter),
        }
    };

    // Start at the interaction value nearest the family's neutral point.
    let neutral = family.neutral_interaction();
    let mut ii = inters
        .iter()
        .enumerate()
        .min_by(|(_, x), (_, y)| {
            (*x - neutral)
                .abs()
                .partial_cmp(&(*y - neutral).abs())
                .unwrap()
        })
        .map(|(i, _)| i)
        .unwrap();
    let mut si = 0usize;
    let mut trace: Vec<TraceStep> = Vec::new();
    let mut converged = false;
    let argmax = |vals: Vec<f64>| -> (usize, f64) {
        let mut best = 0;
        for i in 1..vals.len() {
            if vals[i] > vals[best] {
                best = i;
            }
        }
        (best, vals[best])
    };

    for _ in 0..max_iter.max(1) {
        let (si_new, ll_s) = argmax((0..scale_axis.len()).map(|s| ll(s, ii)).collect());
        trace.push(TraceStep {
            scale: scale_axis[si_new],
            interaction: inters[ii],
            loglik: ll_s,
        });
        let (ii_new, ll_i) = argmax((0..inters.len()).map(|i| ll(si_new, i)).collect());
        trace.push(TraceStep {
            scale: scale_axis[si_new],
            interaction: inters[ii_new],
            loglik: ll_i,
        });
        let fixed_point = trace.len() >= 4 && si_new == si && ii_new == ii;
        si = si_new;
        ii = ii_new;
        if fixed_point {
            converged = true;
            break;
        }
    }

    let best = trace.last().expect("max_iter >= 1").loglik;
    if !best.is_finite() {
        return Err(Error::DegenerateLikelihood);
    }
    Ok(FitResult {
        family,
        scale: scale_axis[si],
        interaction: inters[ii],
        loglik: best,
        scale_grid: scales,
        interaction_grid: inters,
        trace,
        converged,
    })
}

// ---------------------------------------------------------------------------
// Parametric bootstrap
// ---------------------------------------------------------------------------

/// Percentile interval for one parameter, with the replicate estimates that
/// produced it (in replicate order).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamInterval {
    pub name: String,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub replicate_values: Vec<f64>,
}

/// Parametric-bootstrap confidence intervals for a fitted model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapCI {
    pub level: f64,
    pub replicates: usize,
    pub params: Vec<ParamInterval>,
}

/// Type-1 empirical quantile index (1-based order statistic, 0-based slot).
fn quantile_index(b: usize, p: f64) -> usize {
    (((b as f64) * p).ceil().max(1.0) as usize).min(b) - 1
}

/// Simulate `b` sequences from the fitted model (conditioning on the same
/// first points as the fit), refit each on the same grids, and return
/// percentile intervals at `level`. Replicate `i` uses rng stream
/// `rng.stream + i`; failures are reported, never dropped.
pub fn bootstrap_ci(
    seq: &FixationSequence,
    fitted: &FitResult,
    b: usize,
    level: f64,
    rng: RngSpec,
    alpha: &SaliencyMap,
    quad: &QuadratureGrid,
    max_iter: usize,
) -> Result<BootstrapCI> {
    if b < 2 {
        return Err(Error::Config("bootstrap needs at least 2 replicates".into()));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::ParamOutOfRange {
            name: "level",
            value: level,
        });
    }
    let model = fitted.model()?;
    let family = fitted.family;
    let cond: Vec<Point> = seq.points[..family.k_start()].to_vec();

    let refits: Vec<FitResult> = (0..b)
        .into_par_iter()
        .map(|i| {
            let cfg = SimulationConfig {
                n: seq.len(),
                first: FirstMode::ConditionOn(cond.clone()),
                rng: rng.with_stream(rng.stream + i as u64),
                model,
            };
            let replica = simulate(&cfg, alpha).map_err(|e| Error::BootstrapReplicate {
                replicate: i,
                source: Box::new(e),
            })?;
            fit_profile(
                &replica,
                family,
                &fitted.scale_grid,
                &fitted.interaction_grid,
                alpha,
                quad,
                max_iter,
            )
            .map_err(|e| Error::BootstrapReplicate {
                replicate: i,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;

    let p_lo = (1.0 - level) / 2.0;
    let p_hi = 1.0 - p_lo;
    let mut params = Vec::new();
    let mut push_param = |name: &str, estimate: f64, values: Vec<f64>| {
        let mut sorted = values.clone();
        sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
        params.push(ParamInterval {
            name: name.to_string(),
            estimate,
            lower: sorted[quantile_index(b, p_lo)],
            upper: sorted[quantile_index(b, p_hi)],
            replicate_values: values,
        });
    };
    if let Some(scale) = fitted.scale {
        push_param(
            family.scale_name(),
            scale,
            refits.iter().map(|f| f.scale.expect("same family")).collect(),
        );
    }
    push_param(
        family.interaction_name(),
        fitted.interaction,
        refits.iter().map(|f| f.interaction).collect(),
    );
    Ok(BootstrapCI {
        level,
        replicates: b,
        params,
    })
}
