//! Geometric measures driving self-interaction: convex-hull coverage,
//! ball-union coverage and the delayed recurrence count.

use crate::error::Error;
use crate::types::{FixationSequence, Point, Window};
use crate::Result;

/// Base raster resolution (cells along the longer window side) for the
/// ball-union area. Ambiguous boundary cells are refined by subsampling, so
/// the effective resolution is 8x finer.
pub const BALL_UNION_BASE_CELLS: usize = 1024;

/// Convex hull of a point set, vertices in counter-clockwise order.
///
/// Fewer than three non-collinear input points yield a degenerate hull (a
/// point or a segment) with zero area.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexHull {
    vertices: Vec<Point>,
    degenerate: bool,
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Andrew's monotone chain on the deduplicated input.
pub fn convex_hull(points: &[Point]) -> Result<ConvexHull> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|p, q| (p.x, p.y).partial_cmp(&(q.x, q.y)).unwrap());
    pts.dedup();
    let n = pts.len();
    if n < 3 {
        return Ok(ConvexHull {
            vertices: pts,
            degenerate: true,
        });
    }
    let mut hull: Vec<Point> = Vec::with_capacity(2 * n);
    for &p in pts.iter() {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev() {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    let degenerate = hull.len() < 3;
    if degenerate {
        // Fully collinear input: keep the extreme points of the segment.
        let first = *pts.first().unwrap();
        let last = *pts.last().unwrap();
        return Ok(ConvexHull {
            vertices: if first == last {
                vec![first]
            } else {
                vec![first, last]
            },
            degenerate: true,
        });
    }
    Ok(ConvexHull {
        vertices: hull,
        degenerate: false,
    })
}

impl ConvexHull {
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Hull of the current vertices plus one more point. Equals a full
    /// recomputation since hull(hull(P) + x) = hull(P + x).
    pub fn with_point(&self, p: Point) -> ConvexHull {
        let mut pts = self.vertices.clone();
        pts.push(p);
        convex_hull(&pts).expect("non-empty input")
    }

    /// Shoelace area; zero for degenerate hulls.
    pub fn area(&self) -> f64 {
        if self.degenerate {
            return 0.0;
        }
        let v = &self.vertices;
        let n = v.len();
        let mut twice = 0.0;
        for i in 0..n {
            let j = (i + 1) % n;
            twice += v[i].x * v[j].y - v[j].x * v[i].y;
        }
        twice.abs() / 2.0
    }

    /// Closed membership test: boundary points count as inside. Degenerate
    /// hulls test membership on the segment (or point).
    pub fn contains(&self, p: Point) -> bool {
        let tol = self.tolerance();
        match self.vertices.len() {
            0 => false,
            1 => p.dist(self.vertices[0]) <= tol,
            2 => on_segment(self.vertices[0], self.vertices[1], p, tol),
            _ => {
                let v = &self.vertices;
                let n = v.len();
                (0..n).all(|i| cross(v[i], v[(i + 1) % n], p) >= -tol)
            }
        }
    }

    fn tolerance(&self) -> f64 {
        let mut extent: f64 = 1.0;
        for v in &self.vertices {
            extent = extent.max(v.x.abs()).max(v.y.abs());
        }
        1e-9 * extent * extent
    }
}

fn on_segment(a: Point, b: Point, p: Point, tol: f64) -> bool {
    if cross(a, b, p).abs() > tol {
        return false;
    }
    let dot = (p.x - a.x) * (b.x - a.x) + (p.y - a.y) * (b.y - a.y);
    let len2 = a.dist2(b);
    dot >= -tol && dot <= len2 + tol
}

/// Area of the convex hull of `h`.
pub fn hull_area(h: &ConvexHull) -> f64 {
    h.area()
}

/// Membership test for a candidate location against the hull.
pub fn hull_contains(h: &ConvexHull, x: Point) -> bool {
    h.contains(x)
}

/// Area of `union b(x_i, r) ∩ W` by adaptive raster integration: cells fully
/// inside or outside any disk are classified by a center test against the
/// half-diagonal; ambiguous boundary cells are refined with an 8x8 subgrid.
pub fn ball_union_area(points: &[Point], r: f64, w: &Window) -> Result<f64> {
    ball_union_area_res(points, r, w, BALL_UNION_BASE_CELLS)
}

/// Same as [`ball_union_area`] with an explicit base resolution.
pub fn ball_union_area_res(points: &[Point], r: f64, w: &Window, base_cells: usize) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::NonPositiveRadius(r));
    }
    if points.is_empty() {
        return Ok(0.0);
    }
    let long = w.longer_side();
    let nx = ((w.width() / long) * base_cells as f64).round().max(1.0) as usize;
    let ny = ((w.height() / long) * base_cells as f64).round().max(1.0) as usize;
    let hx = w.width() / nx as f64;
    let hy = w.height() / ny as f64;
    let half_diag = 0.5 * (hx * hx + hy * hy).sqrt();
    let cell_area = hx * hy;

    // 0 = outside every disk so far, 1 = fully covered, 2 = ambiguous.
    let mut state = vec![0u8; nx * ny];
    for p in points {
        let reach = r + half_diag;
        let i0 = (((p.x - reach - w.a) / hx).floor().max(0.0)) as usize;
        let i1 = (((p.x + reach - w.a) / hx).ceil().min(nx as f64)) as usize;
        let j0 = (((p.y - reach - w.c) / hy).floor().max(0.0)) as usize;
        let j1 = (((p.y + reach - w.c) / hy).ceil().min(ny as f64)) as usize;
        for j in j0..j1 {
            let cy = w.c + (j as f64 + 0.5) * hy;
            for i in i0..i1 {
                let idx = j * nx + i;
                if state[idx] == 1 {
                    continue;
                }
                let cx = w.a + (i as f64 + 0.5) * hx;
                let d = p.dist(Point::new(cx, cy));
                if d <= r - half_diag {
                    state[idx] = 1;
                } else if d < r + half_diag {
                    state[idx] = 2;
                }
            }
        }
    }

    let full = state.iter().filter(|&&s| s == 1).count();
    let mut area = full as f64 * cell_area;
    const SUB: usize = 8;
    let sub_area = cell_area / (SUB * SUB) as f64;
    for j in 0..ny {
        for i in 0..nx {
            if state[j * nx + i] != 2 {
                continue;
            }
            let x0 = w.a + i as f64 * hx;
            let y0 = w.c + j as f64 * hy;
            let mut covered = 0usize;
            for sj in 0..SUB {
                let sy = y0 + (sj as f64 + 0.5) * hy / SUB as f64;
                for si in 0..SUB {
                    let sx = x0 + (si as f64 + 0.5) * hx / SUB as f64;
                    let s = Point::new(sx, sy);
                    if points.iter().any(|p| p.dist2(s) < r * r) {
                        covered += 1;
                    }
                }
            }
            area += covered as f64 * sub_area;
        }
    }
    Ok(area)
}

/// Incrementally maintained raster of the covered region `union b(x_i, r) ∩ W`.
///
/// Stamping points one at a time yields exactly the same raster as stamping
/// them all at once, so curve values computed incrementally equal
/// from-scratch recomputation at every step. Cell membership is a center
/// test; the resolution is [`BALL_UNION_BASE_CELLS`] along the longer side.
#[derive(Debug, Clone)]
pub struct IncrementalBallCoverage {
    window: Window,
    r: f64,
    nx: usize,
    ny: usize,
    hx: f64,
    hy: f64,
    covered: Vec<bool>,
    count: usize,
}

impl IncrementalBallCoverage {
    pub fn new(window: &Window, r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::NonPositiveRadius(r));
        }
        let long = window.longer_side();
        let base = BALL_UNION_BASE_CELLS;
        let nx = ((window.width() / long) * base as f64).round().max(1.0) as usize;
        let ny = ((window.height() / long) * base as f64).round().max(1.0) as usize;
        Ok(IncrementalBallCoverage {
            window: *window,
            r,
            nx,
            ny,
            hx: window.width() / nx as f64,
            hy: window.height() / ny as f64,
            covered: vec![false; nx * ny],
            count: 0,
        })
    }

    /// Stamp one more disk center. The covered area is monotone
    /// non-decreasing under this operation.
    pub fn push(&mut self, p: Point) {
        let w = &self.window;
        let i0 = (((p.x - self.r - w.a) / self.hx).floor().max(0.0)) as usize;
        let i1 = (((p.x + self.r - w.a) / self.hx).ceil().min(self.nx as f64)) as usize;
        let j0 = (((p.y - self.r - w.c) / self.hy).floor().max(0.0)) as usize;
        let j1 = (((p.y + self.r - w.c) / self.hy).ceil().min(self.ny as f64)) as usize;
        let r2 = self.r * self.r;
        for j in j0..j1 {
            let cy = w.c + (j as f64 + 0.5) * self.hy;
            for i in i0..i1 {
                let idx = j * self.nx + i;
                if self.covered[idx] {
                    continue;
                }
                let cx = w.a + (i as f64 + 0.5) * self.hx;
                let dx = cx - p.x;
                let dy = cy - p.y;
                if dx * dx + dy * dy < r2 {
                    self.covered[idx] = true;
                    self.count += 1;
                }
            }
        }
    }

    pub fn area(&self) -> f64 {
        self.count as f64 * self.hx * self.hy
    }
}

/// Delayed recurrence count among the first `k - 1` points of a prefix:
/// the number of `x_1..x_{k-1}` strictly within distance `r` of `x`. The
/// current point `x_k` is excluded.
pub fn recurrence_count(prefix_excluding_current: &[Point], x: Point, r: f64) -> usize {
    let r2 = r * r;
    prefix_excluding_current
        .iter()
        .filter(|p| p.dist2(x) < r2)
        .count()
}

/// Delayed recurrence `S_R(x_k, x)` for a 1-based step index `k` in
/// `2..=n`: counts the points `x_1..x_{k-1}` within distance `r` of `x`.
pub fn delayed_recurrence(seq: &FixationSequence, k: usize, x: Point, r: f64) -> Result<usize> {
    if !(r > 0.0) {
        return Err(Error::NonPositiveRadius(r));
    }
    if k < 2 || k > seq.len() {
        return Err(Error::IndexOutOfRange {
            index: k,
            len: seq.len(),
        });
    }
    Ok(recurrence_count(&seq.points[..k - 1], x, r))
}
