//! Reference spectra that share no code path with the solvers.
//!
//! * finite differences on a box, real symmetric case by Sturm-sequence
//!   bisection and PT-symmetric case by the sign of the real determinant,
//! * the even/odd transcendental equations of the Hermitian square well,
//! * the closed-form spectrum of the Scarf II well.

use num_complex::Complex64;

use crate::potential::PotentialSpec;
use crate::roots::{bisect, scan_bound_states};

/// Box discretization used by the finite-difference oracles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdGrid {
    /// Dirichlet walls at `-half_width` and `half_width`.
    pub half_width: f64,
    /// Interior points of the coarse grid; the fine grid doubles the cells.
    pub points: usize,
}

impl FdGrid {
    pub fn new(half_width: f64, points: usize) -> Self {
        FdGrid { half_width, points }
    }

    fn nodes(&self, points: usize) -> (Vec<f64>, f64) {
        let h = 2.0 * self.half_width / (points + 1) as f64;
        ((1..=points).map(|i| -self.half_width + h * i as f64).collect(), h)
    }
}

/// Number of eigenvalues below `lambda` of the tridiagonal matrix with
/// diagonal `d` and constant off-diagonal `off`.
fn sturm_count(d: &[f64], off: f64, lambda: f64) -> usize {
    let off2 = off * off;
    let mut count = 0;
    let mut q = 1.0;
    for (i, &di) in d.iter().enumerate() {
        q = if i == 0 { di - lambda } else { di - lambda - off2 / q };
        if q == 0.0 {
            q = -f64::EPSILON * (di.abs() + lambda.abs() + 1.0);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn fd_hermitian_once(spec: &PotentialSpec, grid: &FdGrid, points: usize) -> Vec<f64> {
    let (x, h) = grid.nodes(points);
    let kin = 1.0 / (h * h);
    let d: Vec<f64> = x.iter().map(|&x| 2.0 * kin + spec.evaluate(x).re).collect();
    let lo = -spec.v1;
    let hi = 0.0;
    let below = sturm_count(&d, -kin, lo);
    let total = sturm_count(&d, -kin, hi);
    (below..total)
        .map(|k| {
            let (mut a, mut b) = (lo, hi);
            while b - a > 1e-13 * (1.0 + a.abs()) {
                let m = 0.5 * (a + b);
                if sturm_count(&d, -kin, m) > k {
                    b = m;
                } else {
                    a = m;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}

/// Richardson-extrapolated levels in `(-v1, 0)` of the Hermitian part of
/// `spec` (its `v2` is ignored), or `None` if the two grids disagree on the
/// number of levels.
pub fn fd_hermitian_levels(spec: &PotentialSpec, grid: &FdGrid) -> Option<Vec<f64>> {
    let coarse = fd_hermitian_once(spec, grid, grid.points);
    let fine = fd_hermitian_once(spec, grid, 2 * grid.points + 1);
    richardson(&coarse, &fine)
}

fn richardson(coarse: &[f64], fine: &[f64]) -> Option<Vec<f64>> {
    if coarse.len() != fine.len() {
        return None;
    }
    Some(coarse.iter().zip(fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect())
}

/// Sign of `det(T - E)` for the complex symmetric tridiagonal `T`; real
/// for real `E` when the grid is mirror symmetric and the potential is PT
/// symmetric.
fn det_sign(d: &[Complex64], off: f64, e: f64) -> f64 {
    let off2 = off * off;
    let mut phase = Complex64::new(1.0, 0.0);
    let mut q = Complex64::new(1.0, 0.0);
    for (i, &di) in d.iter().enumerate() {
        q = if i == 0 { di - e } else { di - e - off2 / q };
        if q.norm() == 0.0 {
            q = Complex64::new(f64::EPSILON * (di.norm() + e.abs() + 1.0), 0.0);
        }
        phase *= q / q.norm();
        phase /= phase.norm();
    }
    phase.re
}

fn fd_complex_once(spec: &PotentialSpec, grid: &FdGrid, points: usize, scan: usize, window: (f64, f64)) -> Vec<f64> {
    let (x, h) = grid.nodes(points);
    let kin = 1.0 / (h * h);
    let d: Vec<Complex64> = x.iter().map(|&x| spec.evaluate(x) + 2.0 * kin).collect();
    let f = |e: f64| Some(det_sign(&d, -kin, e));
    let out = scan_bound_states(f, window.0, window.1, scan, 1e-12, 0.0);
    // sign-only function: re-bisect each root to full precision
    out.roots
        .into_iter()
        .map(|r| {
            let w = 1e-9 * (1.0 + r.abs());
            match (f(r - w), f(r + w)) {
                (Some(a), Some(b)) if a.signum() != b.signum() => bisect(&f, r - w, r + w, a.signum(), 1e-14),
                _ => r,
            }
        })
        .collect()
}

/// Richardson-extrapolated real levels of the PT-symmetric `spec` inside
/// `window`, located as sign changes of the finite-difference determinant on
/// a `scan`-point grid. Pairs closer than the scan spacing are missed.
pub fn fd_complex_levels(spec: &PotentialSpec, grid: &FdGrid, scan: usize, window: (f64, f64)) -> Option<Vec<f64>> {
    let coarse = fd_complex_once(spec, grid, grid.points, scan, window);
    let fine = fd_complex_once(spec, grid, 2 * grid.points + 1, scan, window);
    richardson(&coarse, &fine)
}

/// Levels of the Hermitian square well of depth `v1` and half-width `a`
/// from `p tan p = r` (even) and `-p cot p = r` (odd), `p^2 + r^2 = a^2 v1`.
pub fn square_well_levels(v1: f64, a: f64) -> Vec<f64> {
    let big_p = a * v1.sqrt();
    let r = |p: f64| (big_p * big_p - p * p).max(0.0).sqrt();
    let even = |p: f64| Some(p * p.sin() - r(p) * p.cos());
    let odd = |p: f64| Some(p * p.cos() + r(p) * p.sin());
    let n = 20_000.max((big_p * 200.0) as usize);
    let mut ps = Vec::new();
    for f in [&even as &dyn Fn(f64) -> Option<f64>, &odd] {
        let mut prev = (0.0, f(0.0).unwrap_or(0.0));
        for i in 1..=n {
            let p = big_p * i as f64 / n as f64;
            let v = f(p).unwrap_or(0.0);
            if v != 0.0 && prev.1 != 0.0 && v.signum() != prev.1.signum() {
                ps.push(bisect(&|p| f(p), prev.0, p, prev.1.signum(), 1e-15));
            }
            prev = (p, v);
        }
    }
    let mut e: Vec<f64> = ps.into_iter().map(|p| p * p / (a * a) - v1).filter(|&e| e < 0.0).collect();
    e.sort_by(f64::total_cmp);
    e
}

/// Closed-form real spectrum of `-v1 sech^2 x + i v2 sech x tanh x`, valid
/// for `|v2| <= v1 + 1/4`; empty beyond.
pub fn scarf_levels(v1: f64, v2: f64) -> Vec<f64> {
    let q = v1 + 0.25;
    if v2.abs() > q {
        return Vec::new();
    }
    let s = (q + v2.abs()).sqrt();
    let t = (q - v2.abs()).sqrt();
    let mut e = Vec::new();
    for c in [0.5 * (s + t) - 0.5, 0.5 * (s - t) - 0.5] {
        let mut n = 0.0;
        while c - n > 0.0 {
            e.push(-(c - n) * (c - n));
            n += 1.0;
        }
    }
    e.sort_by(f64::total_cmp);
    e
}

/// Value of `v2` where the two Scarf II series share the level pair
/// separated by `j` quanta.
pub fn scarf_crossing_v2(v1: f64, j: usize) -> f64 {
    v1 + 0.25 - (j * j) as f64
}
