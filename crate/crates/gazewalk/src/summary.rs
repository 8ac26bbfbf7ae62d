//! Functional summary statistics and pointwise Monte Carlo envelopes.
//!
//! The four statistics are indexed by point order k = 1..n: ball-union
//! coverage, convex-hull coverage, cumulative scanpath length and cumulative
//! delayed recurrence. Envelopes are pointwise min/max (optionally
//! quantiles) over replicate curves from a fitted model.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geometry::{convex_hull, recurrence_count, IncrementalBallCoverage};
use crate::saliency::SaliencyMap;
use crate::sim::{simulate_batch, SimulationConfig};
use crate::types::FixationSequence;
use crate::Result;

/// Which functional summary a curve carries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "statistic", rename_all = "snake_case")]
pub enum StatisticTag {
    BallCoverage { radius: f64 },
    HullCoverage,
    ScanpathLength,
    CumulativeRecurrence { radius: f64 },
}

impl StatisticTag {
    pub fn name(&self) -> &'static str {
        match self {
            StatisticTag::BallCoverage { .. } => "ball_coverage",
            StatisticTag::HullCoverage => "hull_coverage",
            StatisticTag::ScanpathLength => "scanpath_length",
            StatisticTag::CumulativeRecurrence { .. } => "cumulative_recurrence",
        }
    }
}

/// Order-indexed summary values for one sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryCurve {
    pub tag: StatisticTag,
    /// values[k - 1] is the statistic after the first k points.
    pub values: Vec<f64>,
    /// Coverage curves divided by |W|.
    pub normalized: bool,
}

/// Pointwise band over M replicate curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeBand {
    pub tag: StatisticTag,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub replicates: usize,
}

/// Convex-hull coverage after each prefix; zero for k <= 2.
pub fn hull_coverage_curve(seq: &FixationSequence, normalized: bool) -> SummaryCurve {
    let scale = if normalized { seq.window.area() } else { 1.0 };
    let mut values = Vec::with_capacity(seq.len());
    let mut hull: Option<crate::geometry::ConvexHull> = None;
    for &p in &seq.points {
        hull = Some(match hull {
            None => convex_hull(&[p]).expect("non-empty"),
            Some(h) => h.with_point(p),
        });
        values.push(hull.as_ref().unwrap().area() / scale);
    }
    SummaryCurve {
        tag: StatisticTag::HullCoverage,
        values,
        normalized,
    }
}

/// Ball-union coverage after each prefix.
pub fn ball_coverage_curve(seq: &FixationSequence, r: f64, normalized: bool) -> Result<SummaryCurve> {
    let scale = if normalized { seq.window.area() } else { 1.0 };
    let mut cov = IncrementalBallCoverage::new(&seq.window, r)?;
    let mut values = Vec::with_capacity(seq.len());
    for &p in &seq.points {
        cov.push(p);
        values.push(cov.area() / scale);
    }
    Ok(SummaryCurve {
        tag: StatisticTag::BallCoverage { radius: r },
        values,
        normalized,
    })
}

/// Cumulative scanpath length: sum of consecutive jump distances.
pub fn scanpath_length_curve(seq: &FixationSequence) -> SummaryCurve {
    let mut values = Vec::with_capacity(seq.len());
    let mut total = 0.0;
    for (k, &p) in seq.points.iter().enumerate() {
        if k > 0 {
            total += seq.points[k - 1].dist(p);
        }
        values.push(total);
    }
    SummaryCurve {
        tag: StatisticTag::ScanpathLength,
        values,
        normalized: false,
    }
}

/// Cumulative delayed recurrence: value at k is
/// `sum_{j=2}^{k-1} S_R(x_1..x_j, x_{j+1})`, zero for k <= 2.
pub fn cumulative_recurrence_curve(seq: &FixationSequence, r: f64) -> Result<SummaryCurve> {
    if !(r > 0.0) {
        return Err(Error::NonPositiveRadius(r));
    }
    let pts = &seq.points;
    let mut values = Vec::with_capacity(pts.len());
    let mut total = 0.0;
    for k in 1..=pts.len() {
        // term added when reaching k >= 3: S_R(x_1..x_{k-1}, x_k)
        if k >= 3 {
            total += recurrence_count(&pts[..k - 2], pts[k - 1], r) as f64;
        }
        values.push(total);
    }
    Ok(SummaryCurve {
        tag: StatisticTag::CumulativeRecurrence { radius: r },
        values,
        normalized: false,
    })
}

/// Compute one statistic for one sequence.
pub fn compute_curve(seq: &FixationSequence, tag: StatisticTag, normalized: bool) -> Result<SummaryCurve> {
    Ok(match tag {
        StatisticTag::BallCoverage { radius } => ball_coverage_curve(seq, radius, normalized)?,
        StatisticTag::HullCoverage => hull_coverage_curve(seq, normalized),
        StatisticTag::ScanpathLength => scanpath_length_curve(seq),
        StatisticTag::CumulativeRecurrence { radius } => cumulative_recurrence_curve(seq, radius)?,
    })
}

/// Pointwise min/max band over a set of curves with a common tag.
pub fn envelope_from_curves(curves: &[SummaryCurve]) -> Result<EnvelopeBand> {
    let first = curves.first().ok_or(Error::EmptyInput)?;
    let n = first.values.len();
    for c in curves {
        if c.tag != first.tag {
            return Err(Error::TagMismatch {
                left: first.tag.name().into(),
                right: c.tag.name().into(),
            });
        }
        if c.values.len() != n {
            return Err(Error::LengthMismatch {
                left: n,
                right: c.values.len(),
            });
        }
    }
    let mut lower = vec![f64::INFINITY; n];
    let mut upper = vec![f64::NEG_INFINITY; n];
    for c in curves {
        for (k, &v) in c.values.iter().enumerate() {
            lower[k] = lower[k].min(v);
            upper[k] = upper[k].max(v);
        }
    }
    Ok(EnvelopeBand {
        tag: first.tag,
        lower,
        upper,
        replicates: curves.len(),
    })
}

/// Pointwise quantile band (type-1 empirical quantiles) over curves.
pub fn envelope_quantile(curves: &[SummaryCurve], lo: f64, hi: f64) -> Result<EnvelopeBand> {
    let first = curves.first().ok_or(Error::EmptyInput)?;
    let m = curves.len();
    let n = first.values.len();
    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    let mut column = vec![0.0; m];
    for k in 0..n {
        for (i, c) in curves.iter().enumerate() {
            column[i] = c.values[k];
        }
        column.sort_by(|a, b| a.partial_cmp(b).unwrap());
        lower.push(column[quantile_index(m, lo)]);
        upper.push(column[quantile_index(m, hi)]);
    }
    Ok(EnvelopeBand {
        tag: first.tag,
        lower,
        upper,
        replicates: m,
    })
}

fn quantile_index(m: usize, p: f64) -> usize {
    (((m as f64) * p).ceil().max(1.0) as usize).min(m) - 1
}

/// Simulate `m` replicates and return the pointwise min/max band of `tag`.
pub fn envelope(
    cfg: &SimulationConfig,
    alpha: &SaliencyMap,
    tag: StatisticTag,
    m: usize,
    normalized: bool,
) -> Result<EnvelopeBand> {
    if m < 2 {
        return Err(Error::Config("envelope needs at least 2 replicates".into()));
    }
    let seqs = simulate_batch(cfg, alpha, m)?;
    let curves: Vec<SummaryCurve> = seqs
        .iter()
        .map(|s| compute_curve(s, tag, normalized))
        .collect::<Result<_>>()?;
    envelope_from_curves(&curves)
}

/// Exceedance diagnostic: the share of indices where a curve leaves the band
/// (boundary counts as inside), and the first index where it does.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exceedance {
    pub fraction: f64,
    /// 1-based order index of the first exit, if any.
    pub first_exit: Option<usize>,
}

pub fn band_exceedance(curve: &SummaryCurve, band: &EnvelopeBand) -> Result<Exceedance> {
    if curve.tag != band.tag {
        return Err(Error::TagMismatch {
            left: curve.tag.name().into(),
            right: band.tag.name().into(),
        });
    }
    if curve.values.len() != band.lower.len() {
        return Err(Error::LengthMismatch {
            left: curve.values.len(),
            right: band.lower.len(),
        });
    }
    let n = curve.values.len();
    let mut out = 0usize;
    let mut first_exit = None;
    for k in 0..n {
        let v = curve.values[k];
        if v < band.lower[k] || v > band.upper[k] {
            out += 1;
            if first_exit.is_none() {
                first_exit = Some(k + 1);
            }
        }
    }
    Ok(Exceedance {
        fraction: out as f64 / n as f64,
        first_exit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{Point, Window};
    use approx::assert_relative_eq;

    fn seq(coords: &[(f64, f64)]) -> FixationSequence {
        FixationSequence::new(
            coords.iter().map(|&(x, y)| Point::new(x, y)).collect(),
            Window::unit_square(),
        )
    }

    #[test]
    fn hull_curve_square_corners() {
        let s = seq(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        let c = hull_coverage_curve(&s, false);
        assert_eq!(c.values.len(), 4);
        assert_eq!(c.values[0], 0.0);
        assert_eq!(c.values[1], 0.0);
        assert_relative_eq!(c.values[2], 0.5);
        assert_relative_eq!(c.values[3], 1.0);
    }

    #[test]
    fn hull_curve_single_point() {
        let c = hull_coverage_curve(&seq(&[(0.4, 0.4)]), false);
        assert_eq!(c.values, vec![0.0]);
    }

    #[test]
    fn ball_curve_single_interior_point() {
        let s = seq(&[(0.5, 0.5)]);
        let c = ball_coverage_curve(&s, 0.1, false).unwrap();
        assert_relative_eq!(c.values[0], std::f64::consts::PI * 0.01, max_relative = 2e-3);
    }

    #[test]
    fn ball_curve_duplicate_point_flat() {
        let s = seq(&[(0.5, 0.5), (0.5, 0.5)]);
        let c = ball_coverage_curve(&s, 0.1, false).unwrap();
        assert_eq!(c.values[0], c.values[1]);
    }

    #[test]
    fn scanpath_345() {
        let s = seq(&[(0.0, 0.0), (0.3, 0.4)]);
        let c = scanpath_length_curve(&s);
        assert_eq!(c.values[0], 0.0);
        assert_relative_eq!(c.values[1], 0.5, max_relative = 1e-12);
        let constant = seq(&[(0.2, 0.2), (0.2, 0.2), (0.2, 0.2)]);
        assert!(scanpath_length_curve(&constant).values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn recurrence_curve_basics() {
        // three mutually distant points -> all zero
        let far = seq(&[(0.1, 0.1), (0.9, 0.1), (0.5, 0.9)]);
        assert!(cumulative_recurrence_curve(&far, 0.1)
            .unwrap()
            .values
            .iter()
            .all(|&v| v == 0.0));
        // x_3 within r of x_1 only -> value 1 at k = 3
        let near = seq(&[(0.5, 0.5), (0.9, 0.9), (0.52, 0.5)]);
        let c = cumulative_recurrence_curve(&near, 0.1).unwrap();
        assert_eq!(c.values, vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn recurrence_curve_matches_double_loop_oracle() {
        use crate::rng::{derive_rng, RngSpec};
        use rand::Rng;
        let mut rng = derive_rng(RngSpec::new(17, 0));
        let pts: Vec<Point> = (0..40)
            .map(|_| Point::new(rng.random::<f64>(), rng.random::<f64>()))
            .collect();
        let s = FixationSequence::new(pts.clone(), Window::unit_square());
        let r = 0.15;
        let curve = cumulative_recurrence_curve(&s, r).unwrap();
        // naive: for each k, sum over j = 2..k-1 of the count at x_{j+1}
        for k in 1..=pts.len() {
            let mut expect = 0.0;
            for j in 2..k {
                let mut count = 0;
                for i in 0..j - 1 {
                    if pts[i].dist(pts[j]) < r {
                        count += 1;
                    }
                }
                expect += count as f64;
            }
            assert_eq!(curve.values[k - 1], expect, "k = {k}");
        }
    }

    #[test]
    fn curves_monotone() {
        use crate::rng::{derive_rng, RngSpec};
        use rand::Rng;
        let mut rng = derive_rng(RngSpec::new(23, 0));
        let pts: Vec<Point> = (0..60)
            .map(|_| Point::new(rng.random::<f64>(), rng.random::<f64>()))
            .collect();
        let s = FixationSequence::new(pts, Window::unit_square());
        for curve in [
            hull_coverage_curve(&s, false),
            ball_coverage_curve(&s, 0.1, false).unwrap(),
            scanpath_length_curve(&s),
            cumulative_recurrence_curve(&s, 0.1).unwrap(),
        ] {
            for w in curve.values.windows(2) {
                assert!(w[1] >= w[0]);
            }
        }
    }

    #[test]
    fn final_coverage_permutation_invariant_but_recurrence_not() {
        let order1 = seq(&[(0.1, 0.1), (0.15, 0.1), (0.9, 0.9), (0.12, 0.12)]);
        let order2 = seq(&[(0.9, 0.9), (0.12, 0.12), (0.1, 0.1), (0.15, 0.1)]);
        let h1 = hull_coverage_curve(&order1, false).values.last().copied();
        let h2 = hull_coverage_curve(&order2, false).values.last().copied();
        assert_eq!(h1, h2);
        let b1 = ball_coverage_curve(&order1, 0.1, false).unwrap().values.last().copied();
        let b2 = ball_coverage_curve(&order2, 0.1, false).unwrap().values.last().copied();
        assert_eq!(b1, b2);
        let r1 = cumulative_recurrence_curve(&order1, 0.1).unwrap().values.last().copied();
        let r2 = cumulative_recurrence_curve(&order2, 0.1).unwrap().values.last().copied();
        assert_ne!(r1, r2);
    }

    #[test]
    fn envelope_contains_generating_curves() {
        use crate::rng::RngSpec;
        use crate::saliency::constant_map;
        use crate::sim::{simulate_batch, FirstMode};
        use crate::types::{KernelParams, ModelSpec};
        let w = Window::unit_square();
        let map = constant_map(&w);
        let cfg = SimulationConfig {
            n: 40,
            first: FirstMode::ConditionOn(vec![Point::new(0.22, 0.41)]),
            rng: RngSpec::new(9, 0),
            model: ModelSpec::RandomWalk {
                kernel: KernelParams::gaussian(0.3),
            },
        };
        let seqs = simulate_batch(&cfg, &map, 10).unwrap();
        let curves: Vec<SummaryCurve> = seqs
            .iter()
            .map(|s| hull_coverage_curve(s, false))
            .collect();
        let band = envelope_from_curves(&curves).unwrap();
        for c in &curves {
            let e = band_exceedance(c, &band).unwrap();
            assert_eq!(e.fraction, 0.0);
            assert_eq!(e.first_exit, None);
        }
        for k in 0..band.lower.len() {
            assert!(band.lower[k] <= band.upper[k]);
        }
    }

    #[test]
    fn exceedance_boundary_counts_inside() {
        let band = EnvelopeBand {
            tag: StatisticTag::ScanpathLength,
            lower: vec![0.0, 1.0],
            upper: vec![2.0, 3.0],
            replicates: 2,
        };
        let on_lower = SummaryCurve {
            tag: StatisticTag::ScanpathLength,
            values: vec![0.0, 1.0],
            normalized: false,
        };
        let above = SummaryCurve {
            tag: StatisticTag::ScanpathLength,
            values: vec![5.0, 6.0],
            normalized: false,
        };
        assert_eq!(band_exceedance(&on_lower, &band).unwrap().fraction, 0.0);
        let e = band_exceedance(&above, &band).unwrap();
        assert_eq!(e.fraction, 1.0);
        assert_eq!(e.first_exit, Some(1));
    }

    #[test]
    fn mismatches_rejected() {
        let band = EnvelopeBand {
            tag: StatisticTag::HullCoverage,
            lower: vec![0.0],
            upper: vec![1.0],
            replicates: 2,
        };
        let wrong_tag = SummaryCurve {
            tag: StatisticTag::ScanpathLength,
            values: vec![0.5],
            normalized: false,
        };
        assert!(band_exceedance(&wrong_tag, &band).is_err());
        let wrong_len = SummaryCurve {
            tag: StatisticTag::HullCoverage,
            values: vec![0.5, 0.6],
            normalized: false,
        };
        assert!(band_exceedance(&wrong_len, &band).is_err());
    }
}
