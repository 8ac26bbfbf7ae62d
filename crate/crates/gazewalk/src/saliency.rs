//! Representation and estimation of the heterogeneity component alpha(x).
//!
//! A saliency map is a non-negative raster over the window, interpolated
//! bilinearly between cell centers and scaled so the maximum cell value is 1.
//! The empirical estimator is a Gaussian kernel intensity estimate of pooled
//! auxiliary fixations, edge-corrected by dividing each kernel by its mass
//! inside the window.

use crate::error::Error;
use crate::kernel::normal_cdf;
use crate::types::{FixationSequence, Point, Window};
use crate::Result;

/// Default bandwidth rule: 0.05 times the longer window side.
pub fn default_bandwidth(w: &Window) -> f64 {
    0.05 * w.longer_side()
}

/// Non-negative raster over the window representing alpha(x).
#[derive(Debug, Clone, PartialEq)]
pub struct SaliencyMap {
    window: Window,
    nx: usize,
    ny: usize,
    /// Row-major cell values, index `j * nx + i`.
    values: Vec<f64>,
}

impl SaliencyMap {
    /// Build a map from raw cell values (row-major, `ny` rows of `nx`).
    pub fn new(window: Window, nx: usize, ny: usize, values: Vec<f64>) -> Result<Self> {
        if nx < 2 || ny < 2 || values.len() != nx * ny {
            return Err(Error::Config(format!(
                "saliency grid must be at least 2x2 with nx*ny values (nx={nx}, ny={ny}, len={})",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Config(
                "saliency values must be finite and non-negative".into(),
            ));
        }
        Ok(SaliencyMap {
            window,
            nx,
            ny,
            values,
        })
    }

    /// Constant map alpha(x) = 1.
    pub fn constant(w: &Window) -> Self {
        SaliencyMap {
            window: *w,
            nx: 2,
            ny: 2,
            values: vec![1.0; 4],
        }
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    /// Rescale so the maximum cell value is 1. Idempotent.
    pub fn scaled(mut self) -> Result<Self> {
        let max = self.max_value();
        if max <= 0.0 {
            return Err(Error::ZeroMass);
        }
        for v in &mut self.values {
            *v /= max;
        }
        Ok(self)
    }

    /// Bilinear interpolation at a point inside the window.
    pub fn alpha_at(&self, x: Point) -> Result<f64> {
        if !self.window.contains(x) {
            return Err(Error::PointOutsideWindow { index: 0 });
        }
        Ok(self.alpha_clamped(x))
    }

    /// Bilinear interpolation with edge clamping; callers must ensure the
    /// point is inside the window.
    pub fn alpha_clamped(&self, p: Point) -> f64 {
        let hx = self.window.width() / self.nx as f64;
        let hy = self.window.height() / self.ny as f64;
        // Position in cell-center coordinates.
        let gx = (p.x - self.window.a) / hx - 0.5;
        let gy = (p.y - self.window.c) / hy - 0.5;
        let i0 = gx.floor().clamp(0.0, (self.nx - 1) as f64) as usize;
        let j0 = gy.floor().clamp(0.0, (self.ny - 1) as f64) as usize;
        let i1 = (i0 + 1).min(self.nx - 1);
        let j1 = (j0 + 1).min(self.ny - 1);
        let tx = (gx - i0 as f64).clamp(0.0, 1.0);
        let ty = (gy - j0 as f64).clamp(0.0, 1.0);
        let v00 = self.values[j0 * self.nx + i0];
        let v10 = self.values[j0 * self.nx + i1];
        let v01 = self.values[j1 * self.nx + i0];
        let v11 = self.values[j1 * self.nx + i1];
        let a = v00 * (1.0 - tx) + v10 * tx;
        let b = v01 * (1.0 - tx) + v11 * tx;
        a * (1.0 - ty) + b * ty
    }

    /// Midpoint-rule integral of the raster over the window (test hook).
    pub fn integral(&self) -> f64 {
        let cell = self.window.area() / (self.nx * self.ny) as f64;
        self.values.iter().sum::<f64>() * cell
    }

    fn cell_center(&self, i: usize, j: usize) -> Point {
        let hx = self.window.width() / self.nx as f64;
        let hy = self.window.height() / self.ny as f64;
        Point::new(
            self.window.a + (i as f64 + 0.5) * hx,
            self.window.c + (j as f64 + 0.5) * hy,
        )
    }
}

/// Constant map alpha(x) = 1 over the window.
pub fn constant_map(w: &Window) -> SaliencyMap {
    SaliencyMap::constant(w)
}

/// Bilinear lookup; errors if the point lies outside the window.
pub fn alpha_at(map: &SaliencyMap, x: Point) -> Result<f64> {
    map.alpha_at(x)
}

/// Gaussian kernel intensity estimate of the pooled auxiliary fixations on
/// an `nx x ny` grid, edge-corrected and scaled to max 1.
///
/// The sequence under study must already have been excluded by the caller.
pub fn estimate_saliency(
    aux: &[FixationSequence],
    bandwidth: f64,
    w: &Window,
    nx: usize,
    ny: usize,
) -> Result<SaliencyMap> {
    estimate_saliency_opts(aux, bandwidth, w, nx, ny, true)
}

/// [`estimate_saliency`] with the edge correction made explicit (used by the
/// monotonicity tests; production callers want it on).
pub fn estimate_saliency_opts(
    aux: &[FixationSequence],
    bandwidth: f64,
    w: &Window,
    nx: usize,
    ny: usize,
    edge_correction: bool,
) -> Result<SaliencyMap> {
    if aux.is_empty() || aux.iter().all(|s| s.is_empty()) {
        return Err(Error::NoAuxiliaryData);
    }
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(Error::NonPositiveBandwidth(bandwidth));
    }
    for seq in aux {
        seq.validate()?;
    }
    let mut map = SaliencyMap::new(*w, nx, ny, vec![0.0; nx * ny])?;
    let hx = w.width() / nx as f64;
    let hy = w.height() / ny as f64;
    let two_bw2 = 2.0 * bandwidth * bandwidth;
    let norm = 1.0 / (std::f64::consts::PI * two_bw2);
    // Kernel support is truncated at 6 bandwidths; the neglected mass is
    // below 1e-8 and independent of fixation order.
    let reach = 6.0 * bandwidth;
    for seq in aux {
        for p in &seq.points {
            let weight = if edge_correction {
                let fx = normal_cdf((w.b - p.x) / bandwidth) - normal_cdf((w.a - p.x) / bandwidth);
                let fy = normal_cdf((w.d - p.y) / bandwidth) - normal_cdf((w.c - p.y) / bandwidth);
                1.0 / (fx * fy)
            } else {
                1.0
            };
            let i0 = (((p.x - reach - w.a) / hx).floor().max(0.0)) as usize;
            let i1 = (((p.x + reach - w.a) / hx).ceil().min(nx as f64)) as usize;
            let j0 = (((p.y - reach - w.c) / hy).floor().max(0.0)) as usize;
            let j1 = (((p.y + reach - w.c) / hy).ceil().min(ny as f64)) as usize;
            for j in j0..j1 {
                for i in i0..i1 {
                    let u = map.cell_center(i, j);
                    let contrib = weight * norm * (-p.dist2(u) / two_bw2).exp();
                    map.values[j * nx + i] += contrib;
                }
            }
        }
    }
    map.scaled()
}
