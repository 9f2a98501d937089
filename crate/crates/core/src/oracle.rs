//! Brute-force `f64` oracles for the nearest-point answers.
//!
//! Nothing here reuses the lattice reduction or the exact comparisons; torus
//! distances scan raw integer shifts and minimizers come from plain grids.

use alloc::vec::Vec;

/// Shifts in `{-3..3}²` are scanned by [`torus_distance`].
pub const SHIFT_RADIUS: i64 = 3;
pub const DEFAULT_TORUS_GRID: usize = 100;
pub const DEFAULT_T_GRID: usize = 401;

/// Gram entries `(g11, g12, g22)` in `f64`.
pub type Gram = [f64; 3];

/// Minimum of `√Q(q − p + k)` over raw shifts `k`.
pub fn torus_distance(p: [f64; 2], q: [f64; 2], g: Gram) -> f64 {
    let dx = q[0] - p[0];
    let dy = q[1] - p[1];
    let mut best = f64::INFINITY;
    for i in -SHIFT_RADIUS..=SHIFT_RADIUS {
        for j in -SHIFT_RADIUS..=SHIFT_RADIUS {
            let x = dx + i as f64;
            let y = dy + j as f64;
            let qf = g[0] * x * x + 2.0 * g[1] * x * y + g[2] * y * y;
            if qf < best {
                best = qf;
            }
        }
    }
    libm::sqrt(best)
}

/// Point of the cylinder space: `t = None` on the compact part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub y: [f64; 2],
    pub t: Option<f64>,
}

/// The glued distance, written out case by case.
pub fn distance(a: Point, b: Point, r: f64, m: f64, g: Gram) -> f64 {
    let d1 = torus_distance(a.y, b.y, g);
    match (a.t, b.t) {
        (None, None) => d1,
        (Some(s), Some(t)) => d1 + (s - t).abs().min(m),
        _ => d1 + r,
    }
}

/// Grid point `(i/n, j/n)`.
pub fn grid_point(n: usize, i: usize, j: usize) -> [f64; 2] {
    [i as f64 / n as f64, j as f64 / n as f64]
}

/// Index of the `n × n` grid point closest to `p` among compact points.
pub fn nearest_compact(p: Point, r: f64, m: f64, g: Gram, n: usize) -> ((usize, usize), f64) {
    let mut best = ((0, 0), f64::INFINITY);
    for i in 0..n {
        for j in 0..n {
            let c = Point { y: grid_point(n, i, j), t: None };
            let d = distance(p, c, r, m, g);
            if d < best.1 {
                best = ((i, j), d);
            }
        }
    }
    best
}

/// All pairs `(grid index, t)` minimizing the distance from the compact point
/// `y` to the cylinder, up to `tol`.
pub fn line_set_minimizers(y: [f64; 2], ts: &[f64], r: f64, m: f64, g: Gram, n: usize, tol: f64) -> Vec<((usize, usize), f64)> {
    let base = Point { y, t: None };
    let mut all = Vec::with_capacity(n * n * ts.len());
    let mut lo = f64::INFINITY;
    for i in 0..n {
        for j in 0..n {
            for &t in ts {
                let d = distance(base, Point { y: grid_point(n, i, j), t: Some(t) }, r, m, g);
                lo = lo.min(d);
                all.push(((i, j), t, d));
            }
        }
    }
    all.into_iter().filter(|e| e.2 <= lo + tol).map(|e| (e.0, e.1)).collect()
}

/// `k` equispaced values covering `[lo, hi]`.
pub fn t_grid(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    match k {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => (0..k).map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64).collect(),
    }
}

/// Minimizing `t` on the line `{y'} × ℝ` as seen from `(y, r)`, scanned over
/// `k` points of `[r − 2M, r + 2M]`. Returns the unique minimizer, or `None`
/// on a tie.
pub fn nearest_on_line(y: [f64; 2], t0: f64, line: [f64; 2], r: f64, m: f64, g: Gram, k: usize) -> Option<(f64, f64)> {
    let p = Point { y, t: Some(t0) };
    // centred so that t0 itself is a node whenever k is odd
    let half = (k / 2) as f64;
    let step = if k > 1 { 4.0 * m / (k - 1) as f64 } else { 0.0 };
    let ts: Vec<f64> = (0..k).map(|i| t0 + (i as f64 - half) * step).collect();
    let ds: Vec<(f64, f64)> = ts.iter().map(|&t| (t, distance(p, Point { y: line, t: Some(t) }, r, m, g))).collect();
    let lo = ds.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
    let mut mins = ds.into_iter().filter(|e| e.1 <= lo + 1e-12);
    let first = mins.next()?;
    if mins.next().is_some() {
        return None;
    }
    Some(first)
}

#[cfg(test)]
mod tests {
    use super::*;

    const I: Gram = [1.0, 0.0, 1.0];

    #[test]
    fn raw_shift_distance() {
        assert!((torus_distance([0.1, 0.1], [0.9, 0.9], I) - libm::sqrt(0.08)).abs() < 1e-15);
        assert_eq!(torus_distance([0.25, 0.5], [0.25, 0.5], I), 0.0);
    }

    #[test]
    fn line_minimizer_is_centre() {
        let (t, d) = nearest_on_line([0.1, 0.2], 4.0, [0.8, 0.9], 1.0, 2.0, I, DEFAULT_T_GRID).unwrap();
        assert_eq!(t, 4.0);
        assert!((d - libm::sqrt(0.18)).abs() < 1e-12);
    }

    #[test]
    fn t_grid_endpoints() {
        let ts = t_grid(-1.0, 1.0, 5);
        assert_eq!(ts, [-1.0, -0.5, 0.0, 0.5, 1.0]);
    }
}
