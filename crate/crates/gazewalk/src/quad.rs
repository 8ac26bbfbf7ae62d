//! Midpoint quadrature over the window for transition normalizing integrals.
//!
//! Indicator regions (convex hull membership, ball-union membership) are
//! discontinuous, so cells cut by a region boundary carry a fractional
//! weight obtained from an 8x8 subgrid instead of a raw center test. This
//! keeps log-likelihoods stable under grid refinement.

use crate::error::Error;
use crate::geometry::ConvexHull;
use crate::saliency::SaliencyMap;
use crate::types::{Point, Window};
use crate::Result;

const SUB: usize = 8;

/// Midpoint grid over `W` with per-cell saliency values precomputed.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    pub window: Window,
    pub nx: usize,
    pub ny: usize,
    pub cell_area: f64,
    pub centers: Vec<Point>,
    pub alpha: Vec<f64>,
}

impl QuadratureGrid {
    pub fn new(w: &Window, nx: usize, ny: usize, map: &SaliencyMap) -> Result<Self> {
        if nx < 16 || ny < 16 {
            return Err(Error::Config(format!(
                "quadrature grid must be at least 16x16, got {nx}x{ny}"
            )));
        }
        let hx = w.width() / nx as f64;
        let hy = w.height() / ny as f64;
        let mut centers = Vec::with_capacity(nx * ny);
        let mut alpha = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let p = Point::new(w.a + (i as f64 + 0.5) * hx, w.c + (j as f64 + 0.5) * hy);
                centers.push(p);
                alpha.push(map.alpha_clamped(p));
            }
        }
        Ok(QuadratureGrid {
            window: *w,
            nx,
            ny,
            cell_area: hx * hy,
            centers,
            alpha,
        })
    }

    /// Default resolution: 64 cells along the longer side for unit-scale
    /// windows, 128 for pixel-scale windows (e.g. 128x96 at 1024x768),
    /// preserving aspect ratio.
    pub fn default_dims(w: &Window) -> (usize, usize) {
        let base = if w.longer_side() > 10.0 { 128 } else { 64 };
        let long = w.longer_side();
        let nx = ((w.width() / long) * base as f64).round().max(16.0) as usize;
        let ny = ((w.height() / long) * base as f64).round().max(16.0) as usize;
        (nx, ny)
    }

    pub fn with_default_dims(w: &Window, map: &SaliencyMap) -> Result<Self> {
        let (nx, ny) = Self::default_dims(w);
        Self::new(w, nx, ny, map)
    }

    /// Same window and map at double the resolution (stability checks).
    pub fn refined(&self, map: &SaliencyMap) -> Result<Self> {
        Self::new(&self.window, self.nx * 2, self.ny * 2, map)
    }

    pub fn hx(&self) -> f64 {
        self.window.width() / self.nx as f64
    }

    pub fn hy(&self) -> f64 {
        self.window.height() / self.ny as f64
    }

    fn half_diag(&self) -> f64 {
        0.5 * (self.hx() * self.hx() + self.hy() * self.hy()).sqrt()
    }

    /// Per-cell fraction covered by the convex hull. Degenerate hulls have
    /// measure zero, hence all-zero fields.
    pub fn hull_fraction_field(&self, hull: &ConvexHull) -> Vec<f64> {
        let n = self.nx * self.ny;
        if hull.is_degenerate() {
            return vec![0.0; n];
        }
        let hx = self.hx();
        let hy = self.hy();
        let mut field = vec![0.0; n];
        for (idx, c) in self.centers.iter().enumerate() {
            let corners = [
                Point::new(c.x - hx / 2.0, c.y - hy / 2.0),
                Point::new(c.x + hx / 2.0, c.y - hy / 2.0),
                Point::new(c.x - hx / 2.0, c.y + hy / 2.0),
                Point::new(c.x + hx / 2.0, c.y + hy / 2.0),
            ];
            let inside = corners.iter().filter(|p| hull.contains(**p)).count();
            // A cell with all corners outside can still clip a hull vertex.
            let vertex_in_cell = inside == 0
                && hull.vertices().iter().any(|v| {
                    (v.x - c.x).abs() <= hx / 2.0 && (v.y - c.y).abs() <= hy / 2.0
                });
            field[idx] = if inside == 4 {
                1.0
            } else if inside == 0 && !vertex_in_cell {
                0.0
            } else {
                self.subsample_fraction(c, |p| hull.contains(p))
            };
        }
        field
    }

    /// Per-cell fraction covered by the union of open balls `b(p_i, r)`.
    pub fn ball_fraction_field(&self, points: &[Point], r: f64) -> Vec<f64> {
        let n = self.nx * self.ny;
        if points.is_empty() {
            return vec![0.0; n];
        }
        let half_diag = self.half_diag();
        let r2 = r * r;
        let mut field = vec![0.0; n];
        for (idx, c) in self.centers.iter().enumerate() {
            let dmin = points
                .iter()
                .map(|p| p.dist(*c))
                .fold(f64::INFINITY, f64::min);
            field[idx] = if dmin <= r - half_diag {
                1.0
            } else if dmin >= r + half_diag {
                0.0
            } else {
                self.subsample_fraction(c, |q| points.iter().any(|p| p.dist2(q) < r2))
            };
        }
        field
    }

    fn subsample_fraction<F: Fn(Point) -> bool>(&self, center: &Point, inside: F) -> f64 {
        let hx = self.hx();
        let hy = self.hy();
        let x0 = center.x - hx / 2.0;
        let y0 = center.y - hy / 2.0;
        let mut hit = 0usize;
        for sj in 0..SUB {
            let y = y0 + (sj as f64 + 0.5) * hy / SUB as f64;
            for si in 0..SUB {
                let x = x0 + (si as f64 + 0.5) * hx / SUB as f64;
                if inside(Point::new(x, y)) {
                    hit += 1;
                }
            }
        }
        hit as f64 / (SUB * SUB) as f64
    }

    /// Midpoint integral of a per-cell integrand.
    pub fn integrate<F: FnMut(usize) -> f64>(&self, mut f: F) -> f64 {
        (0..self.centers.len()).map(|i| f(i)).sum::<f64>() * self.cell_area
    }
}
