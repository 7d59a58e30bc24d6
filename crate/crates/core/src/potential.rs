//! Complex PT-symmetric scattering potentials.
//!
//! Every model has the shape `V(x) = -V1 Fe(x) + i V2 Fo(x)` with an even,
//! positive well profile `Fe` and an odd profile `Fo`, so that
//! `V(-x) = conj(V(x))`. Units follow `2m = hbar^2 = 1`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default half-width of the rectangular well.
pub const DEFAULT_RECT_WIDTH: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    /// Piecewise-constant well of half-width `a` with a step imaginary part.
    Rect,
    /// `-V1 sech^2 x + i V2 sech x tanh x`.
    #[serde(rename = "scarf2")]
    ScarfII,
    /// `-V1 exp(-x^2) + i V2 x exp(-x^2)`.
    Gaussian,
    /// `(-V1 + i V2 x) / (1 + x^4)`.
    #[serde(rename = "quartic")]
    QuarticLorentz,
    /// `-V1 sech x + i V2 sech x tanh x`.
    Sech,
    /// `(-V1 + i V2 x) / (1 + x^2)`.
    WignerCoulomb,
}

impl Model {
    pub const ALL: [Model; 6] = [
        Model::Rect,
        Model::ScarfII,
        Model::Gaussian,
        Model::QuarticLorentz,
        Model::Sech,
        Model::WignerCoulomb,
    ];

    /// Lowercase command-line token.
    pub fn token(self) -> &'static str {
        match self {
            Model::Rect => "rect",
            Model::ScarfII => "scarf2",
            Model::Gaussian => "gaussian",
            Model::QuarticLorentz => "quartic",
            Model::Sech => "sech",
            Model::WignerCoulomb => "wigner-coulomb",
        }
    }

    /// Points where the potential is discontinuous (only the rectangular well has any).
    pub(crate) fn has_jumps(self) -> bool {
        matches!(self, Model::Rect)
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Model::ALL
            .iter()
            .copied()
            .find(|m| m.token() == s)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown potential model `{s}`")))
    }
}

/// A potential model together with its strengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub model: Model,
    /// Well depth, `v1 > 0`.
    pub v1: f64,
    /// Strength of the odd imaginary part; any sign.
    pub v2: f64,
    /// Half-width, used only by [`Model::Rect`].
    pub a: f64,
}

impl PotentialSpec {
    pub fn new(model: Model, v1: f64, v2: f64) -> Self {
        PotentialSpec {
            model,
            v1,
            v2,
            a: DEFAULT_RECT_WIDTH,
        }
    }

    pub fn rect(v1: f64, v2: f64, a: f64) -> Self {
        PotentialSpec {
            model: Model::Rect,
            v1,
            v2,
            a,
        }
    }

    /// Same model and depth at a different imaginary strength.
    pub fn with_v2(self, v2: f64) -> Self {
        PotentialSpec { v2, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v1.is_finite() && self.v1 > 0.0) {
            return Err(Error::InvalidSpec(format!("v1 must be positive, got {}", self.v1)));
        }
        if !self.v2.is_finite() {
            return Err(Error::InvalidSpec(format!("v2 must be finite, got {}", self.v2)));
        }
        if self.model == Model::Rect && !(self.a.is_finite() && self.a > 0.0) {
            return Err(Error::InvalidSpec(format!("rect half-width must be positive, got {}", self.a)));
        }
        Ok(())
    }

    /// Value of the potential at `x`. The spec is assumed valid.
    pub fn evaluate(&self, x: f64) -> Complex64 {
        let (even, odd) = match self.model {
            Model::Rect => {
                let a = self.a;
                let well = if x.abs() <= a { 1.0 } else { 0.0 };
                // Theta_2 = +1 on [0, a), -1 on (-a, 0); the imaginary part is -V2 Theta_2.
                let step = if x >= a || x <= -a {
                    0.0
                } else if x >= 0.0 {
                    1.0
                } else {
                    -1.0
                };
                (well, -step)
            }
            Model::ScarfII => {
                let s = 1.0 / x.cosh();
                (s * s, s * x.tanh())
            }
            Model::Gaussian => {
                let g = (-x * x).exp();
                (g, x * g)
            }
            Model::QuarticLorentz => {
                let d = 1.0 / (1.0 + x.powi(4));
                (d, x * d)
            }
            Model::Sech => {
                let s = 1.0 / x.cosh();
                (s, s * x.tanh())
            }
            Model::WignerCoulomb => {
                let d = 1.0 / (1.0 + x * x);
                (d, x * d)
            }
        };
        Complex64::new(-self.v1 * even, self.v2 * odd)
    }
}

/// Checked evaluation: rejects invalid specs before evaluating.
pub fn evaluate(spec: &PotentialSpec, x: f64) -> Result<Complex64> {
    spec.validate()?;
    Ok(spec.evaluate(x))
}

/// Largest `|V(-x) - conj(V(x))|` over `samples` points in `(0, xmax]`.
///
/// The origin is not sampled since the rectangular well jumps there.
pub fn check_pt_symmetry(spec: &PotentialSpec, samples: usize, xmax: f64) -> f64 {
    let n = samples.max(2);
    (1..=n)
        .map(|i| {
            let x = xmax * i as f64 / n as f64;
            (spec.evaluate(-x) - spec.evaluate(x).conj()).norm()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rect_inside_right_half() {
        let spec = PotentialSpec::rect(20.0, 3.0, 2.0);
        assert_eq!(spec.evaluate(1.0), Complex64::new(-20.0, -3.0));
        assert_eq!(spec.evaluate(-1.0), Complex64::new(-20.0, 3.0));
        // jump convention at the origin and the edges
        assert_eq!(spec.evaluate(0.0), Complex64::new(-20.0, -3.0));
        assert_eq!(spec.evaluate(2.0), Complex64::new(-20.0, 0.0));
        assert_eq!(spec.evaluate(2.5), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn origin_is_real_for_smooth_models() {
        for model in Model::ALL.into_iter().filter(|m| *m != Model::Rect) {
            let v = PotentialSpec::new(model, 7.0, 13.0).evaluate(0.0);
            assert_eq!(v.im, 0.0, "{model}");
        }
    }

    #[test]
    fn gaussian_is_a_well() {
        let v = PotentialSpec::new(Model::Gaussian, 50.0, 10.0).evaluate(0.5);
        let g = (-0.25f64).exp();
        assert!((v.re + 50.0 * g).abs() < 1e-13);
        assert!((v.im - 5.0 * g).abs() < 1e-13);
    }

    #[test]
    fn pt_symmetry_deviation() {
        let scarf = PotentialSpec::new(Model::ScarfII, 50.0, 20.0);
        assert!(check_pt_symmetry(&scarf, 1000, 10.0) < 1e-13);
        let rect = PotentialSpec::rect(20.0, 3.0, 2.0);
        assert_eq!(check_pt_symmetry(&rect, 1000, 5.0), 0.0);
        let wc = PotentialSpec::new(Model::WignerCoulomb, 20.0, 5.0);
        assert!(check_pt_symmetry(&wc, 1000, 30.0) <= 1e-14);
    }

    #[test]
    fn tokens_round_trip() {
        for m in Model::ALL {
            assert_eq!(m.token().parse::<Model>().unwrap(), m);
        }
        assert!(matches!("morse".parse::<Model>(), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn invalid_specs() {
        assert!(PotentialSpec::new(Model::Sech, 0.0, 1.0).validate().is_err());
        assert!(PotentialSpec::rect(1.0, 1.0, -2.0).validate().is_err());
        assert!(evaluate(&PotentialSpec::new(Model::Sech, -1.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn decay_at_large_distance() {
        for model in Model::ALL.into_iter().filter(|m| *m != Model::Rect) {
            let spec = PotentialSpec::new(model, 20.0, 5.0);
            assert!(spec.evaluate(1e3).norm() < 0.01, "{model}");
        }
        // the Wigner-Coulomb imaginary tail falls off only like 1/x
        let wc = PotentialSpec::new(Model::WignerCoulomb, 20.0, 5.0);
        assert!((wc.evaluate(1e3).im * 1e3 - 5.0).abs() < 1e-4);
    }
}
