//! Bracketing root search on a uniform grid.
//!
//! Sign changes are refined by bisection. Two roots closer than the grid
//! spacing show up as a shallow local minimum of `|f|` without a sign change;
//! those minima are searched by golden section and split when the function
//! dips through zero.

use rayon::prelude::*;

const GOLDEN: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScanOutcome {
    pub roots: Vec<f64>,
    /// Grid abscissae where the function could not be evaluated.
    pub skipped: Vec<f64>,
}

/// Uniform grid of `points` abscissae on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        n => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// Bisection on a bracket with `f(lo)` of sign `sign_lo`.
pub fn bisect<F>(f: &F, mut lo: f64, mut hi: f64, sign_lo: f64, tol: f64) -> f64
where
    F: Fn(f64) -> Option<f64>,
{
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        match f(mid) {
            Some(0.0) => return mid,
            Some(v) if v.signum() == sign_lo => lo = mid,
            Some(_) => hi = mid,
            None => break,
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section search for a point where `sign * f` turns negative inside
/// `(lo, hi)`, assuming `sign * f` is positive at both ends.
fn find_dip<F>(f: &F, mut lo: f64, mut hi: f64, sign: f64, tol: f64) -> Option<f64>
where
    F: Fn(f64) -> Option<f64>,
{
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let mut f1 = sign * f(x1)?;
    let mut f2 = sign * f(x2)?;
    for _ in 0..200 {
        if f1 <= 0.0 {
            return Some(x1);
        }
        if f2 <= 0.0 {
            return Some(x2);
        }
        if hi - lo <= tol {
            return None;
        }
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = sign * f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = sign * f(x2)?;
        }
    }
    None
}

/// All roots of `f` on `[lo, hi]` resolvable from a `points`-point grid.
///
/// `touch_level` is the largest `|f|` at a grid-local minimum that is still
/// inspected for a hidden pair of roots; pass `0.0` to disable that search.
/// Grid evaluations run in parallel; the result does not depend on the
/// thread count.
pub fn scan_roots<F>(f: F, lo: f64, hi: f64, points: usize, tol: f64, touch_level: f64) -> ScanOutcome
where
    F: Fn(f64) -> Option<f64> + Sync,
{
    let grid = linspace(lo, hi, points.max(2));
    let values: Vec<Option<f64>> = grid.par_iter().map(|&x| f(x)).collect();

    let mut out = ScanOutcome::default();
    let valid: Vec<(f64, f64)> = grid
        .iter()
        .zip(&values)
        .filter_map(|(&x, v)| match v {
            Some(v) if v.is_finite() => Some((x, *v)),
            _ => {
                out.skipped.push(x);
                None
            }
        })
        .collect();

    for (i, &(x, v)) in valid.iter().enumerate() {
        if v == 0.0 {
            out.roots.push(x);
            continue;
        }
        if let Some(&(xn, vn)) = valid.get(i + 1) {
            if vn != 0.0 && vn.signum() != v.signum() {
                out.roots.push(bisect(&f, x, xn, v.signum(), tol));
            }
        }
        if touch_level > 0.0 && i > 0 && i + 1 < valid.len() {
            let (xl, vl) = valid[i - 1];
            let (xr, vr) = valid[i + 1];
            let same_sign = vl.signum() == v.signum() && vr.signum() == v.signum();
            let local_min = v.abs() < vl.abs() && v.abs() <= vr.abs();
            if same_sign && local_min && v.abs() < touch_level {
                let s = v.signum();
                if let Some(dip) = find_dip(&f, xl, xr, s, tol) {
                    out.roots.push(bisect(&f, xl, dip, s, tol));
                    out.roots.push(bisect(&f, dip, xr, -s, tol));
                }
            }
        }
    }
    out.roots.sort_by(f64::total_cmp);
    out
}

/// [`scan_roots`] over bound-state energies `lo <= E <= hi <= 0` on a grid
/// uniform in `k = sqrt(-E)`, which keeps levels crowding the threshold
/// apart. Roots are accurate to `tol` in energy and returned ascending.
pub fn scan_bound_states<F>(f: F, lo: f64, hi: f64, points: usize, tol: f64, touch_level: f64) -> ScanOutcome
where
    F: Fn(f64) -> Option<f64> + Sync,
{
    let k_lo = (-hi).max(0.0).sqrt();
    let k_hi = (-lo).max(0.0).sqrt();
    let k_tol = tol / (2.0 * k_hi.max(0.5));
    let out = scan_roots(|k| f(-k * k), k_lo, k_hi, points, k_tol, touch_level);
    let to_energy = |ks: Vec<f64>| ks.into_iter().rev().map(|k| -k * k).collect();
    ScanOutcome {
        roots: to_energy(out.roots),
        skipped: to_energy(out.skipped),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_simple_roots() {
        let out = scan_roots(|x: f64| Some(x.sin()), 0.5, 10.0, 50, 1e-12, 0.0);
        let expected = [std::f64::consts::PI, 2.0 * std::f64::consts::PI, 3.0 * std::f64::consts::PI];
        assert_eq!(out.roots.len(), 3);
        for (r, e) in out.roots.iter().zip(expected) {
            assert!((r - e).abs() < 1e-10);
        }
    }

    #[test]
    fn splits_close_pair_between_grid_points() {
        // roots at 0.5003 and 0.5007, far closer than the 0.1 spacing
        let f = |x: f64| Some((x - 0.5003) * (x - 0.5007));
        let coarse = scan_roots(f, 0.0, 1.0, 11, 1e-12, 0.0);
        assert!(coarse.roots.is_empty());
        let out = scan_roots(f, 0.0, 1.0, 11, 1e-12, 0.1);
        assert_eq!(out.roots.len(), 2);
        assert!((out.roots[0] - 0.5003).abs() < 1e-9);
        assert!((out.roots[1] - 0.5007).abs() < 1e-9);
    }

    #[test]
    fn shallow_minimum_without_roots() {
        let f = |x: f64| Some((x - 0.5).powi(2) + 1e-3);
        let out = scan_roots(f, 0.0, 1.0, 11, 1e-12, 0.1);
        assert!(out.roots.is_empty());
    }

    #[test]
    fn records_skipped_points() {
        let f = |x: f64| if x > 0.45 && x < 0.55 { None } else { Some(x - 0.8) };
        let out = scan_roots(f, 0.0, 1.0, 11, 1e-12, 0.0);
        assert_eq!(out.skipped.len(), 1);
        assert_eq!(out.roots.len(), 1);
    }

    #[test]
    fn bound_state_scan_resolves_threshold_levels() {
        // 1e-3 and 4e-3 share one cell of a 200-point grid uniform in E
        let f = |e: f64| Some((e + 1e-3) * (e + 4e-3) * (e + 30.0));
        let uniform = scan_roots(f, -50.0, -1e-9, 200, 1e-12, 0.0);
        assert_eq!(uniform.roots.len(), 1);
        let out = scan_bound_states(f, -50.0, -1e-9, 200, 1e-12, 0.0);
        assert_eq!(out.roots.len(), 3);
        for (r, e) in out.roots.iter().zip([-30.0, -4e-3, -1e-3]) {
            assert!((r - e).abs() < 1e-12, "{r} vs {e}");
        }
    }

    #[test]
    fn linspace_endpoints() {
        let g = linspace(-1.0, 1.0, 5);
        assert_eq!(g, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(linspace(3.0, 3.0, 1), vec![3.0]);
    }
}
