//! Reference sweeps with published exceptional points, and helpers to run
//! them and compare the results.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::basis::{auto_scale_gaussian, BasisConfig};
use crate::error::Result;
use crate::potential::{Model, PotentialSpec};
use crate::spectrum::Method;
use crate::trace::{detect_crossings, locate_eps, sweep, CrossingEvent, ExceptionalPoint, SpectralCurves, SweepConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Tolerance {
    Absolute(f64),
    Relative(f64),
}

impl Tolerance {
    pub fn error(self, reference: f64, value: f64) -> f64 {
        match self {
            Tolerance::Absolute(_) => (value - reference).abs(),
            Tolerance::Relative(_) => (value - reference).abs() / reference.abs().max(f64::MIN_POSITIVE),
        }
    }

    pub fn bound(self) -> f64 {
        match self {
            Tolerance::Absolute(t) | Tolerance::Relative(t) => t,
        }
    }

    pub fn accepts(self, reference: f64, value: f64) -> bool {
        self.error(reference, value) <= self.bound()
    }
}

/// A sweep together with the exceptional points reported for it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Figure {
    pub id: String,
    pub spec: PotentialSpec,
    pub config: SweepConfig,
    /// Published `V2c` values, in the published order.
    pub reference_eps: Vec<f64>,
    pub tolerance: Tolerance,
}

impl Figure {
    fn new(id: &str, spec: PotentialSpec, method: Method, v2_max: f64, steps: usize) -> Self {
        Figure {
            id: id.to_string(),
            spec,
            config: SweepConfig::new(&spec, method, 0.0, v2_max).with_steps(steps),
            reference_eps: Vec::new(),
            tolerance: Tolerance::Relative(0.01),
        }
    }

    fn with_reference(self, eps: &[f64], tolerance: Tolerance) -> Self {
        Figure {
            reference_eps: eps.to_vec(),
            tolerance,
            ..self
        }
    }

    fn with_basis(mut self, basis: BasisConfig) -> Self {
        self.config.solver.basis = basis;
        self
    }
}

pub const RECT_EPS: [f64; 4] = [0.96, 2.75, 4.88, 7.33];
pub const GAUSSIAN_EPS: [f64; 3] = [43.26, 55.55, 63.70];
/// The middle value is printed with a decimal comma in the source.
pub const QUARTIC_EPS: [f64; 3] = [19.39, 38.87, 46.35];
pub const SECH_EPS: [f64; 4] = [25.37, 31.15, 34.92, 37.35];
pub const WC_EPS: [f64; 4] = [19.73, 10.87, 5.53, 2.74];

/// Basis for the Gaussian well: `n_basis` states at the auto-selected scale.
pub fn gaussian_basis(v1: f64, n_basis: usize) -> BasisConfig {
    BasisConfig::new(n_basis).with_scale(auto_scale_gaussian(v1, n_basis))
}

/// Rectangular well of half-width 2 at depth `v1`.
pub fn rect_figure(v1: f64, method: Method) -> Figure {
    Figure::new(&format!("rect-v1-{v1}-{}", method.token()), PotentialSpec::rect(v1, 0.0, 2.0), method, 8.0, 200)
        .with_reference(&RECT_EPS, Tolerance::Absolute(0.05))
}

/// All published sweeps. The rectangular well is run at both candidate
/// depths, 20 and 40.
pub fn figures() -> Vec<Figure> {
    let gaussian = PotentialSpec::new(Model::Gaussian, 50.0, 0.0);
    let rel = Tolerance::Relative(0.01);
    vec![
        rect_figure(20.0, Method::Shooting),
        rect_figure(20.0, Method::AnalyticRect),
        rect_figure(40.0, Method::Shooting),
        rect_figure(40.0, Method::AnalyticRect),
        Figure::new("gaussian-shooting", gaussian, Method::Shooting, 80.0, 200).with_reference(&GAUSSIAN_EPS, rel),
        Figure::new("gaussian-ho-basis", gaussian, Method::HoBasis, 80.0, 200)
            .with_basis(gaussian_basis(50.0, 160))
            .with_reference(&GAUSSIAN_EPS, rel),
        Figure::new("quartic", PotentialSpec::new(Model::QuarticLorentz, 50.0, 0.0), Method::Shooting, 50.0, 200)
            .with_reference(&QUARTIC_EPS, rel),
        Figure::new("sech", PotentialSpec::new(Model::Sech, 50.0, 0.0), Method::Shooting, 45.0, 200)
            .with_reference(&SECH_EPS, rel),
        Figure::new(
            "wigner-coulomb",
            PotentialSpec::new(Model::WignerCoulomb, 20.0, 0.0),
            Method::WcPencil,
            20.0,
            200,
        )
        .with_basis(BasisConfig::new(140))
        .with_reference(&WC_EPS, Tolerance::Relative(0.015)),
    ]
}

/// Scarf II well of depth `v1`, swept slightly past its breaking threshold.
pub fn scarf_figure(v1: f64, steps: usize) -> Figure {
    let spec = PotentialSpec::new(Model::ScarfII, v1, 0.0);
    Figure::new(&format!("scarf2-v1-{v1}"), spec, Method::Shooting, v1 + 1.0, steps)
        .with_reference(&[v1 + 0.25], Tolerance::Relative(0.01))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureRun {
    pub figure: Figure,
    pub curves: SpectralCurves,
    pub eps: Vec<ExceptionalPoint>,
    pub crossings: Vec<CrossingEvent>,
    pub seconds: f64,
}

impl FigureRun {
    /// Unambiguous `V2c` values, ascending.
    pub fn ep_values(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.eps.iter().map(|e| e.v2c).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn matches(&self) -> Vec<EpMatch> {
        match_eps(&self.figure.reference_eps, &self.ep_values(), self.figure.tolerance)
    }
}

pub fn run_figure(figure: &Figure) -> Result<FigureRun> {
    let t = Instant::now();
    let curves = sweep(&figure.spec, &figure.config)?;
    let eps = locate_eps(&figure.spec, &curves, &figure.config)?;
    let crossings = detect_crossings(&curves);
    Ok(FigureRun {
        figure: figure.clone(),
        curves,
        eps,
        crossings,
        seconds: t.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpMatch {
    pub reference: f64,
    /// Nearest computed value.
    pub found: Option<f64>,
    pub error: f64,
    pub ok: bool,
}

/// Pairs each reference value with the nearest computed one.
pub fn match_eps(reference: &[f64], found: &[f64], tol: Tolerance) -> Vec<EpMatch> {
    reference
        .iter()
        .map(|&r| {
            let nearest = found.iter().copied().min_by(|a, b| (a - r).abs().total_cmp(&(b - r).abs()));
            match nearest {
                Some(v) => EpMatch {
                    reference: r,
                    found: Some(v),
                    error: tol.error(r, v),
                    ok: tol.accepts(r, v),
                },
                None => EpMatch {
                    reference: r,
                    found: None,
                    error: f64::INFINITY,
                    ok: false,
                },
            }
        })
        .collect()
}

/// Largest relative difference between two EP lists of equal length.
pub fn relative_agreement(a: &[f64], b: &[f64]) -> Option<f64> {
    (a.len() == b.len()).then(|| {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    })
}

/// Largest absolute difference between two EP lists of equal length.
pub fn absolute_agreement(a: &[f64], b: &[f64]) -> Option<f64> {
    (a.len() == b.len()).then(|| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_match() {
        let m = match_eps(&[1.0, 2.0], &[0.98, 2.2, 5.0], Tolerance::Absolute(0.05));
        assert!(m[0].ok && (m[0].error - 0.02).abs() < 1e-12);
        assert!(!m[1].ok);
        let none = match_eps(&[1.0], &[], Tolerance::Relative(0.01));
        assert!(!none[0].ok && none[0].found.is_none());
    }

    #[test]
    fn figure_configs_are_valid() {
        for f in figures().iter().chain([scarf_figure(5.0, 100)].iter()) {
            f.config.validate(&f.spec).unwrap();
        }
    }

    #[test]
    fn rect_analytic_figure_runs() {
        let run = run_figure(&rect_figure(20.0, Method::AnalyticRect)).unwrap();
        assert_eq!(run.eps.len(), 3);
        assert!(run.crossings.is_empty());
    }
}
