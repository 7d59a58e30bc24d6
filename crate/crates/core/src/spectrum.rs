//! Real spectra by any of the four solvers behind one interface.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::basis::{build_gaussian_hamiltonian, build_wc_pencil, BasisConfig};
use crate::eig::{eig_complex, eig_pencil, select_real};
use crate::error::{Error, Result};
use crate::potential::{Model, PotentialSpec};
use crate::rectwell::{rect_roots_in, rect_spectrum};
use crate::shooting::{ShootingConfig, Shooter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Numerical integration with the two-sided matching condition.
    Shooting,
    /// Closed-form eliminant of the rectangular well.
    #[serde(rename = "analytic")]
    AnalyticRect,
    /// Diagonalization in the oscillator basis (Gaussian well).
    HoBasis,
    /// Generalized eigenvalues of the `(1 + x^2)`-multiplied pencil (Wigner-Coulomb well).
    WcPencil,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Shooting, Method::AnalyticRect, Method::HoBasis, Method::WcPencil];

    pub fn token(self) -> &'static str {
        match self {
            Method::Shooting => "shooting",
            Method::AnalyticRect => "analytic",
            Method::HoBasis => "ho-basis",
            Method::WcPencil => "wc-pencil",
        }
    }

    /// Whether the method can solve `model`.
    pub fn supports(self, model: Model) -> bool {
        match self {
            Method::Shooting => true,
            Method::AnalyticRect => model == Model::Rect,
            Method::HoBasis => model == Model::Gaussian,
            Method::WcPencil => model == Model::WignerCoulomb,
        }
    }

    pub fn check(self, model: Model) -> Result<()> {
        if self.supports(model) {
            Ok(())
        } else {
            Err(Error::Config(format!("method `{self}` cannot solve the `{model}` potential")))
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .iter()
            .copied()
            .find(|m| m.token() == s)
            .ok_or_else(|| Error::Config(format!("unknown method `{s}`")))
    }
}

/// Real eigenvalues found at one potential strength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub method: Method,
    /// Sorted ascending.
    pub eigenvalues: Vec<f64>,
    /// Per-eigenvalue residual: normalised mismatch for the root finders,
    /// `|Im E|` for the matrix methods.
    pub residuals: Vec<f64>,
    /// Energies where a root finder could not evaluate its function or
    /// rejected a candidate.
    pub skipped: Vec<f64>,
}

impl SpectrumResult {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

/// Numerical settings for every method; each method reads only its own part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub shooting: ShootingConfig,
    pub basis: BasisConfig,
    /// Largest `|Im E|` counted as real by the matrix methods; `None` means
    /// `1e-6 max(1, v1)`.
    pub im_tol: Option<f64>,
    /// Root tolerance of the analytic eliminant.
    pub rect_tol: f64,
}

impl SolverSettings {
    pub fn for_spec(spec: &PotentialSpec) -> Self {
        SolverSettings {
            shooting: ShootingConfig::for_spec(spec),
            basis: BasisConfig::new(160),
            im_tol: None,
            rect_tol: 1e-10,
        }
    }

    pub fn im_tol_for(&self, spec: &PotentialSpec) -> f64 {
        self.im_tol.unwrap_or(1e-6 * spec.v1.max(1.0))
    }
}

fn matrix_values(spec: &PotentialSpec, method: Method, settings: &SolverSettings) -> Result<Vec<num_complex::Complex64>> {
    let res = match method {
        Method::HoBasis => eig_complex(&build_gaussian_hamiltonian(spec.v1, spec.v2, &settings.basis)?),
        Method::WcPencil => {
            let (a, b) = build_wc_pencil(spec.v1, spec.v2, &settings.basis)?;
            eig_pencil(&a, &b)?
        }
        _ => unreachable!("not a matrix method"),
    };
    Ok(res.into_converged()?.values)
}

/// Real spectrum in `(-v1, 0)` of `spec` by `method`.
pub fn real_spectrum(spec: &PotentialSpec, method: Method, settings: &SolverSettings) -> Result<SpectrumResult> {
    spec.validate()?;
    method.check(spec.model)?;
    match method {
        Method::Shooting => Ok(Shooter::new(spec, &settings.shooting)?.spectrum()),
        Method::AnalyticRect => rect_spectrum(spec.v1, spec.v2, spec.a, settings.rect_tol),
        Method::HoBasis | Method::WcPencil => {
            let values = matrix_values(spec, method, settings)?;
            let tol = settings.im_tol_for(spec);
            let mut real: Vec<(f64, f64)> = values
                .iter()
                .filter(|z| z.im.abs() <= tol && z.re > -spec.v1 && z.re < 0.0)
                .map(|z| (z.re, z.im.abs()))
                .collect();
            real.sort_by(|a, b| a.0.total_cmp(&b.0));
            debug_assert_eq!(
                real.iter().map(|r| r.0).collect::<Vec<_>>(),
                select_real(&values, (-spec.v1, 0.0), tol)
            );
            Ok(SpectrumResult {
                method,
                eigenvalues: real.iter().map(|r| r.0).collect(),
                residuals: real.iter().map(|r| r.1).collect(),
                skipped: Vec::new(),
            })
        }
    }
}

/// Real eigenvalues inside `[lo, hi]`, resolving close pairs with a
/// `points`-point local scan for the root-finding methods.
pub fn real_roots_in(
    spec: &PotentialSpec,
    method: Method,
    settings: &SolverSettings,
    lo: f64,
    hi: f64,
    points: usize,
) -> Result<Vec<f64>> {
    spec.validate()?;
    method.check(spec.model)?;
    let eps = settings.shooting.root_tol.max(settings.rect_tol);
    let lo = lo.max(-spec.v1 + eps);
    let hi = hi.min(-eps);
    if lo >= hi {
        return Ok(Vec::new());
    }
    match method {
        Method::Shooting => Ok(Shooter::new(spec, &settings.shooting)?.roots_in(lo, hi, points).0),
        Method::AnalyticRect => Ok(rect_roots_in(spec.v1, spec.v2, spec.a, lo, hi, points, settings.rect_tol)),
        Method::HoBasis | Method::WcPencil => {
            let values = matrix_values(spec, method, settings)?;
            Ok(select_real(&values, (lo, hi), settings.im_tol_for(spec)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_model_compatibility() {
        let rect = PotentialSpec::rect(20.0, 3.0, 2.0);
        let settings = SolverSettings::for_spec(&rect);
        assert!(matches!(real_spectrum(&rect, Method::WcPencil, &settings), Err(Error::Config(_))));
        assert!(Method::Shooting.supports(Model::WignerCoulomb));
        assert!(!Method::HoBasis.supports(Model::Sech));
    }

    #[test]
    fn tokens() {
        for m in Method::ALL {
            assert_eq!(m.token().parse::<Method>().unwrap(), m);
        }
        assert!("newton".parse::<Method>().is_err());
    }
}
