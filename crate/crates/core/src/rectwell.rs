//! Closed-form eigenvalue condition for the rectangular PT well.
//!
//! Inside the well the wavenumbers are `p/a` on the left half and `q/a` on the
//! right half, outside the decay constant is `r/a`. Eliminating the six
//! amplitudes of the piecewise solution leaves
//!
//! ```text
//! D = 2pqr cos p cos q + p(r^2 - q^2) cos p sin q
//!   + q(r^2 - p^2) sin p cos q - r(p^2 + q^2) sin p sin q = 0.
//! ```
//!
//! For real `E`, `q = conj(p)` and every term of `D` is self-conjugate, so
//! `D` is real and its sign changes locate the real eigenvalues.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::roots::scan_bound_states;
use crate::spectrum::{Method, SpectrumResult};

/// Grid density of the energy scan.
pub const RECT_SCAN_POINTS: usize = 2000;

/// Relative size of `Im D` tolerated before the eliminant is declared inconsistent.
const REALNESS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectEliminantVars {
    pub p: Complex64,
    pub q: Complex64,
    pub r: f64,
}

impl RectEliminantVars {
    pub fn new(energy: f64, v1: f64, v2: f64, a: f64) -> Self {
        RectEliminantVars {
            p: Complex64::new(energy + v1, -v2).sqrt() * a,
            q: Complex64::new(energy + v1, v2).sqrt() * a,
            r: a * (-energy).sqrt(),
        }
    }

    /// `D` and the sum of the magnitudes of its four terms.
    pub fn eliminant(&self) -> (Complex64, f64) {
        let RectEliminantVars { p, q, r } = *self;
        let (sp, cp) = (p.sin(), p.cos());
        let (sq, cq) = (q.sin(), q.cos());
        let r2 = r * r;
        let terms = [
            p * q * cp * cq * (2.0 * r),
            p * (r2 - q * q) * cp * sq,
            q * (r2 - p * p) * sp * cq,
            -(p * p + q * q) * sp * sq * r,
        ];
        let d = terms.iter().sum();
        (d, terms.iter().map(|t| t.norm()).sum())
    }
}

fn check_window(energy: f64, v1: f64) -> Result<()> {
    if energy > -v1 && energy < 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            energy,
            lo: -v1,
            hi: 0.0,
        })
    }
}

/// `Re D` at `energy`, after checking that `Im D` vanishes to rounding.
pub fn rect_eliminant(energy: f64, v1: f64, v2: f64, a: f64) -> Result<f64> {
    check_window(energy, v1)?;
    let (d, scale) = RectEliminantVars::new(energy, v1, v2, a).eliminant();
    if d.im.abs() > REALNESS_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Inconsistent {
            energy,
            im: d.im.abs(),
            scale,
        });
    }
    Ok(d.re)
}

fn normalized(energy: f64, v1: f64, v2: f64, a: f64) -> Option<f64> {
    check_window(energy, v1).ok()?;
    let (d, scale) = RectEliminantVars::new(energy, v1, v2, a).eliminant();
    (scale > 0.0 && d.im.abs() <= REALNESS_TOL * scale).then(|| d.re / scale)
}

/// Real roots of the eliminant in `[lo, hi]`.
pub fn rect_roots_in(v1: f64, v2: f64, a: f64, lo: f64, hi: f64, points: usize, tol: f64) -> Vec<f64> {
    scan_bound_states(|e| normalized(e, v1, v2, a), lo, hi, points, tol, 0.1).roots
}

/// All real eigenvalues of the rectangular well, sorted ascending.
pub fn rect_spectrum(v1: f64, v2: f64, a: f64, tol: f64) -> Result<SpectrumResult> {
    if !(v1 > 0.0 && a > 0.0 && v2.is_finite()) {
        return Err(Error::InvalidSpec(format!("rect well needs v1 > 0 and a > 0 (v1 = {v1}, a = {a})")));
    }
    if !(tol > 0.0) {
        return Err(Error::Config("root tolerance must be positive".into()));
    }
    let scan = scan_bound_states(
        |e| normalized(e, v1, v2, a),
        -v1 + tol,
        -tol,
        RECT_SCAN_POINTS,
        tol,
        0.1,
    );
    let residuals = scan
        .roots
        .iter()
        .map(|&e| normalized(e, v1, v2, a).map_or(f64::NAN, f64::abs))
        .collect();
    Ok(SpectrumResult {
        method: Method::AnalyticRect,
        eigenvalues: scan.roots,
        residuals,
        skipped: scan.skipped,
    })
}
