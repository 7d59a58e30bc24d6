//! Matrices in the harmonic-oscillator basis `|n>` of `-d^2/dx^2 + x^2`.
//!
//! The basis may be stretched by a length scale `lambda`, using
//! `chi_n(x) = lambda^{-1/2} psi_n(x / lambda)`; then `p^2` scales as
//! `lambda^{-2}`, `x` as `lambda`, `x^2` as `lambda^2`, and `x^2 p^2` is
//! unchanged. Gaussian matrix elements have closed forms only at
//! `lambda = 1`; other scales use exact Gauss-Hermite quadrature.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::eig::ComplexMatrix;
use crate::error::{Error, Result};
use crate::quadrature::HermiteRule;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisConfig {
    /// Truncation size `N`.
    pub n_basis: usize,
    /// Basis length scale `lambda`.
    pub scale: f64,
}

impl BasisConfig {
    pub fn new(n_basis: usize) -> Self {
        BasisConfig { n_basis, scale: 1.0 }
    }

    pub fn with_scale(self, scale: f64) -> Self {
        BasisConfig { scale, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_basis < 2 {
            return Err(Error::Config(format!("basis needs at least 2 states, got {}", self.n_basis)));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::Config(format!("basis scale must be positive, got {}", self.scale)));
        }
        Ok(())
    }
}

fn delta(m: usize, n: usize, offset: isize) -> bool {
    m as isize == n as isize + offset
}

/// `<m|p^2|n>`.
pub fn me_p2(m: usize, n: usize) -> f64 {
    let nf = n as f64;
    if m == n {
        (2.0 * nf + 1.0) / 2.0
    } else if delta(m, n, -2) {
        -((nf - 1.0) * nf).sqrt() / 2.0
    } else if delta(m, n, 2) {
        -((nf + 1.0) * (nf + 2.0)).sqrt() / 2.0
    } else {
        0.0
    }
}

/// `<m|x|n>`.
pub fn me_x(m: usize, n: usize) -> f64 {
    let nf = n as f64;
    if delta(m, n, -1) {
        (nf / 2.0).sqrt()
    } else if delta(m, n, 1) {
        ((nf + 1.0) / 2.0).sqrt()
    } else {
        0.0
    }
}

/// `<m|x^2|n>`.
pub fn me_x2(m: usize, n: usize) -> f64 {
    let nf = n as f64;
    if m == n {
        (2.0 * nf + 1.0) / 2.0
    } else if delta(m, n, -2) {
        ((nf - 1.0) * nf).sqrt() / 2.0
    } else if delta(m, n, 2) {
        ((nf + 1.0) * (nf + 2.0)).sqrt() / 2.0
    } else {
        0.0
    }
}

/// `<m|x^2 p^2|n>`, from `x = (a + a^+)/sqrt2`, `p = i(a^+ - a)/sqrt2`.
///
/// The operator is not symmetric: the `m = n - 2` and `m = n + 2` entries
/// differ in sign and magnitude.
pub fn me_x2p2(m: usize, n: usize) -> f64 {
    let nf = n as f64;
    if m == n {
        (2.0 * nf * nf + 2.0 * nf - 1.0) / 4.0
    } else if delta(m, n, -2) {
        (nf * (nf - 1.0)).sqrt()
    } else if delta(m, n, 2) {
        -((nf + 1.0) * (nf + 2.0)).sqrt()
    } else if delta(m, n, -4) {
        -((nf - 3.0) * (nf - 2.0) * (nf - 1.0) * nf).sqrt() / 4.0
    } else if delta(m, n, 4) {
        -((nf + 1.0) * (nf + 2.0) * (nf + 3.0) * (nf + 4.0)).sqrt() / 4.0
    } else {
        0.0
    }
}

fn ln_norm(m: usize, n: usize) -> f64 {
    let (m, n) = (m.min(n), m.max(n));
    0.5 * (LN_2PI + ln_gamma(m as f64 + 1.0) + ln_gamma(n as f64 + 1.0))
}

/// `<m|e^{-x^2}|n> = cos[(m-n)pi/2] Gamma((m+n+1)/2) / sqrt(2 pi m! n!)`,
/// evaluated in log space.
pub fn me_gauss(m: usize, n: usize) -> f64 {
    let d = m.abs_diff(n);
    if d % 2 == 1 {
        return 0.0;
    }
    let sign = if (d / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * (ln_gamma((m + n + 1) as f64 / 2.0) - ln_norm(m, n)).exp()
}

/// `<m|x e^{-x^2}|n> = (m-n) / (2 sqrt2 sin[(m-n)pi/2]) Gamma((m+n)/2) / sqrt(2 pi m! n!)`
/// for odd `m + n`, zero otherwise.
pub fn me_xgauss(m: usize, n: usize) -> f64 {
    if (m + n).is_multiple_of(2) {
        return 0.0;
    }
    let diff = m as i64 - n as i64;
    // sin((m-n) pi / 2) for odd m-n
    let sin = if (diff - 1).rem_euclid(4) == 0 { 1.0 } else { -1.0 };
    let mag = (ln_gamma((m + n) as f64 / 2.0) - ln_norm(m, n)).exp();
    diff as f64 / (2.0 * std::f64::consts::SQRT_2 * sin) * mag
}

/// Gaussian matrix elements `<chi_m|e^{-x^2}|chi_n>` and `<chi_m|x e^{-x^2}|chi_n>`
/// in the stretched basis, as dense row-major tables.
fn gaussian_tables(cfg: &BasisConfig) -> (Vec<f64>, Vec<f64>) {
    let n = cfg.n_basis;
    let lam = cfg.scale;
    if lam == 1.0 {
        let mut g = vec![0.0; n * n];
        let mut xg = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                g[i * n + j] = me_gauss(i, j);
                xg[i * n + j] = me_xgauss(i, j);
            }
        }
        return (g, xg);
    }
    // int psi_m psi_n e^{-lam^2 y^2} dy: substitute t = s y with s^2 = 1 + lam^2
    // so the weight becomes e^{-t^2} and the rule is exact.
    let s = (1.0 + lam * lam).sqrt();
    let rule = stretched_rule(n + 2, s, lam);
    let g = rule.matrix(n, |_| 1.0);
    let xg = rule.matrix(n, |y| lam * y);
    (g, xg)
}

/// Quadrature in `y = t / s` for integrands `psi_m(y) psi_n(y) e^{-lam^2 y^2} poly(y)`.
fn stretched_rule(nodes: usize, s: f64, lam: f64) -> HermiteRule {
    let base = HermiteRule::new(nodes);
    let shrink = lam * lam / (1.0 + lam * lam);
    let weights = base
        .nodes
        .iter()
        .zip(&base.weights)
        .map(|(&t, &w)| w / s * (-t * t * shrink).exp())
        .collect();
    HermiteRule {
        nodes: base.nodes.iter().map(|t| t / s).collect(),
        weights,
    }
}

/// `h = p^2 - v1 e^{-x^2} + i v2 x e^{-x^2}` in the (stretched) oscillator basis.
pub fn build_gaussian_hamiltonian(v1: f64, v2: f64, cfg: &BasisConfig) -> Result<ComplexMatrix> {
    cfg.validate()?;
    let n = cfg.n_basis;
    let kin = 1.0 / (cfg.scale * cfg.scale);
    let (g, xg) = gaussian_tables(cfg);
    Ok(ComplexMatrix::from_fn(n, |i, j| {
        Complex64::new(kin * me_p2(i, j) - v1 * g[i * n + j], v2 * xg[i * n + j])
    }))
}

/// Trace of the leading `k x k` block of `Re h` for the Gaussian well, an
/// upper bound on the sum of the lowest `k` levels of the real well.
pub fn gaussian_block_trace(v1: f64, cfg: &BasisConfig, k: usize) -> f64 {
    let lam = cfg.scale;
    let k = k.min(cfg.n_basis);
    let kin = 1.0 / (lam * lam);
    let diag: Vec<f64> = if lam == 1.0 {
        (0..k).map(|i| me_gauss(i, i)).collect()
    } else {
        let s = (1.0 + lam * lam).sqrt();
        let rule = stretched_rule(k + 2, s, lam);
        let full = rule.matrix(k, |_| 1.0);
        (0..k).map(|i| full[i * k + i]).collect()
    };
    (0..k).map(|i| kin * me_p2(i, i) - v1 * diag[i]).sum()
}

/// Number of leading basis states whose trace is minimised by [`auto_scale_gaussian`].
pub const AUTO_SCALE_BLOCK: usize = 10;

/// Basis scale in `[0.3, 3]` minimising [`gaussian_block_trace`] over the
/// leading [`AUTO_SCALE_BLOCK`] states.
pub fn auto_scale_gaussian(v1: f64, n_basis: usize) -> f64 {
    let k = AUTO_SCALE_BLOCK.min(n_basis);
    let f = |lam: f64| gaussian_block_trace(v1, &BasisConfig::new(n_basis).with_scale(lam), k);
    let (mut lo, mut hi) = (0.3f64, 3.0f64);
    let r = 0.618_033_988_749_894_9;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-4 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Matrix pencil `(A, B)` whose generalized eigenvalues are the levels of
/// `(-v1 + i v2 x)/(1 + x^2)`: multiplying the Schrodinger equation by
/// `1 + x^2` gives `A = p^2 + x^2 p^2 - v1 + i v2 x` and `B = 1 + x^2`.
pub fn build_wc_pencil(v1: f64, v2: f64, cfg: &BasisConfig) -> Result<(ComplexMatrix, ComplexMatrix)> {
    cfg.validate()?;
    let lam = cfg.scale;
    let n = cfg.n_basis;
    let a = ComplexMatrix::from_fn(n, |i, j| {
        let re = me_p2(i, j) / (lam * lam) + me_x2p2(i, j) - if i == j { v1 } else { 0.0 };
        Complex64::new(re, v2 * lam * me_x(i, j))
    });
    let b = ComplexMatrix::from_fn(n, |i, j| {
        Complex64::new(if i == j { 1.0 } else { 0.0 } + lam * lam * me_x2(i, j), 0.0)
    });
    Ok((a, b))
}

/// The energy-dependent matrix `<m|(1 + x^2)(H - E)|n>` assembled term by
/// term, for checking the pencil form.
pub fn wc_operator_matrix(v1: f64, v2: f64, energy: f64, cfg: &BasisConfig) -> Result<ComplexMatrix> {
    cfg.validate()?;
    let lam = cfg.scale;
    Ok(ComplexMatrix::from_fn(cfg.n_basis, |i, j| {
        let overlap = if i == j { 1.0 } else { 0.0 };
        Complex64::new(
            me_p2(i, j) / (lam * lam) + me_x2p2(i, j) - (energy + v1) * overlap - energy * lam * lam * me_x2(i, j),
            v2 * lam * me_x(i, j),
        )
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        assert_eq!(me_p2(0, 0), 0.5);
        assert!((me_p2(0, 2) + 2f64.sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(me_p2(1, 2), 0.0);
        assert!((me_gauss(0, 0) - 0.5f64.sqrt()).abs() < 1e-14);
        assert_eq!(me_gauss(0, 1), 0.0);
        assert!((me_gauss(0, 2) + 0.25).abs() < 1e-14);
        assert!((me_xgauss(0, 1) - 0.25).abs() < 1e-14);
        assert!((me_xgauss(1, 0) - 0.25).abs() < 1e-14);
        assert_eq!(me_xgauss(0, 2), 0.0);
        assert!((me_x(0, 1) - 0.5f64.sqrt()).abs() < 1e-15);
        for n in 0..10 {
            assert_eq!(me_x2(n, n), (2 * n + 1) as f64 / 2.0);
        }
        // <0|x^2 p^2|0> = <0|x^2 (1 - x^2)|0> = 1/2 - 3/4
        assert_eq!(me_x2p2(0, 0), -0.25);
    }

    #[test]
    fn gaussian_elements_are_symmetric() {
        for m in 0..30 {
            for n in 0..30 {
                assert!((me_gauss(m, n) - me_gauss(n, m)).abs() < 1e-15);
                assert!((me_xgauss(m, n) - me_xgauss(n, m)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn large_indices_stay_finite() {
        let v = me_gauss(300, 300);
        assert!(v.is_finite() && v > 0.0 && v < 1.0);
        assert!(me_xgauss(299, 300).is_finite());
    }

    #[test]
    fn gaussian_hamiltonian_structure() {
        let cfg = BasisConfig::new(20);
        let h0 = build_gaussian_hamiltonian(50.0, 0.0, &cfg).unwrap();
        assert_eq!(h0.hermitian_defect(), 0.0);
        let hp = build_gaussian_hamiltonian(50.0, 7.0, &cfg).unwrap();
        let hm = build_gaussian_hamiltonian(50.0, -7.0, &cfg).unwrap();
        for i in 0..20 {
            for j in 0..20 {
                assert_eq!(hp[(i, j)], hm[(i, j)].conj());
            }
        }
    }

    #[test]
    fn stretched_tables_reduce_to_closed_form() {
        // the quadrature route at a scale infinitesimally away from 1
        let cfg = BasisConfig::new(25).with_scale(1.0 + 1e-12);
        let (g, xg) = gaussian_tables(&cfg);
        for m in 0..25 {
            for n in 0..25 {
                assert!((g[m * 25 + n] - me_gauss(m, n)).abs() < 1e-10);
                assert!((xg[m * 25 + n] - me_xgauss(m, n)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn pencil_metric_is_positive() {
        let (_, b) = build_wc_pencil(20.0, 5.0, &BasisConfig::new(30)).unwrap();
        assert_eq!(b.hermitian_defect(), 0.0);
        assert!(crate::eig::cholesky(&b).is_ok());
    }

    #[test]
    fn pencil_matches_term_by_term_assembly() {
        let cfg = BasisConfig::new(24).with_scale(0.8);
        let (a, b) = build_wc_pencil(20.0, 5.0, &cfg).unwrap();
        for e in [-15.0, -3.5, -0.2] {
            let direct = wc_operator_matrix(20.0, 5.0, e, &cfg).unwrap();
            let pencil = a.sub_scaled(e.into(), &b);
            for (x, y) in direct.as_slice().iter().zip(pencil.as_slice()) {
                assert!((x - y).norm() <= 1e-12 * (1.0 + x.norm()));
            }
        }
    }

    #[test]
    fn auto_scale_is_inside_range() {
        let lam = auto_scale_gaussian(50.0, 120);
        assert!(lam > 0.3 && lam < 3.0, "{lam}");
    }

    #[test]
    fn invalid_basis() {
        assert!(build_gaussian_hamiltonian(1.0, 0.0, &BasisConfig::new(1)).is_err());
        assert!(build_wc_pencil(1.0, 0.0, &BasisConfig::new(4).with_scale(0.0)).is_err());
    }
}
