//! Independent oracles shared by the integration and acceptance suites.
//!
//! Each oracle recomputes a quantity by a method unrelated to the library's
//! implementation: hull area from brute-force edge enumeration, disk-union
//! area from a fixed-resolution pixel raster, integrals from adaptive
//! Simpson quadrature.

use gazewalk::{Point, Window};

/// O(n^3) convex hull area: a directed pair (i, j) is a hull edge iff every
/// other point lies strictly to its left; the area is half the sum of edge
/// cross products. Degenerate inputs (all collinear) give 0.
pub fn hull_area_bruteforce(points: &[Point]) -> f64 {
    let n = points.len();
    let mut twice_area = 0.0;
    let mut found_edge = false;
    for i in 0..n {
        for j in 0..n {
            if i == j || points[i] == points[j] {
                continue;
            }
            let (p, q) = (points[i], points[j]);
            let mut all_left = true;
            for (k, &o) in points.iter().enumerate() {
                if k == i || k == j || o == p || o == q {
                    continue;
                }
                let cross = (q.x - p.x) * (o.y - p.y) - (q.y - p.y) * (o.x - p.x);
                if cross <= 0.0 {
                    all_left = false;
                    break;
                }
            }
            if all_left {
                found_edge = true;
                twice_area += p.x * q.y - q.x * p.y;
            }
        }
    }
    if found_edge {
        twice_area / 2.0
    } else {
        0.0
    }
}

/// Pixel-counting disk-union area at a fixed raster resolution (cells along
/// the longer window side). A cell counts iff its center lies strictly
/// within distance r of some point.
pub fn ball_union_area_raster(points: &[Point], r: f64, w: &Window, res: usize) -> f64 {
    let long = w.longer_side();
    let nx = ((w.width() / long) * res as f64).round() as usize;
    let ny = ((w.height() / long) * res as f64).round() as usize;
    let hx = w.width() / nx as f64;
    let hy = w.height() / ny as f64;
    let mut hit = vec![false; nx * ny];
    let r2 = r * r;
    for p in points {
        let i0 = (((p.x - r - w.a) / hx).floor().max(0.0)) as usize;
        let i1 = ((((p.x + r - w.a) / hx).ceil()) as usize).min(nx);
        let j0 = (((p.y - r - w.c) / hy).floor().max(0.0)) as usize;
        let j1 = ((((p.y + r - w.c) / hy).ceil()) as usize).min(ny);
        for j in j0..j1 {
            let cy = w.c + (j as f64 + 0.5) * hy;
            let dy2 = (cy - p.y) * (cy - p.y);
            for i in i0..i1 {
                let cx = w.a + (i as f64 + 0.5) * hx;
                let dx = cx - p.x;
                if dx * dx + dy2 < r2 {
                    hit[j * nx + i] = true;
                }
            }
        }
    }
    hit.iter().filter(|&&h| h).count() as f64 * hx * hy
}

/// Adaptive Simpson quadrature on [a, b] to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, m: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b))
    }
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let left = simpson(f, a, 0.5 * (a + m), m);
        let right = simpson(f, m, 0.5 * (m + b), b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, left, tol / 2.0, depth - 1)
                + recurse(f, m, b, right, tol / 2.0, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    recurse(f, a, b, simpson(f, a, m, b), tol, 40)
}

/// Adaptive 2D quadrature over the window: Simpson in y of Simpson in x.
pub fn quad2d<F: Fn(f64, f64) -> f64>(f: &F, w: &Window, tol: f64) -> f64 {
    adaptive_simpson(
        &|y| adaptive_simpson(&|x| f(x, y), w.a, w.b, tol / (10.0 * w.height())),
        w.c,
        w.d,
        tol,
    )
}

/// Uniform random points in the window.
pub fn random_points(rng: &mut rand_chacha::ChaCha8Rng, n: usize, w: &Window) -> Vec<Point> {
    use rand::Rng;
    (0..n)
        .map(|_| {
            Point::new(
                rng.random_range(w.a..=w.b),
                rng.random_range(w.c..=w.d),
            )
        })
        .collect()
}
