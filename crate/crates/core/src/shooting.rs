//! Shooting solver for bound states of `-psi'' + V psi = E psi`.
//!
//! Two fundamental solutions `u` (`u(0)=1, u'(0)=0`) and `v` (`v(0)=0,
//! v'(0)=1`) are marched from the origin to `+L` and to `-L`. Outside
//! `[-L, L]` the wavefunction is `C e^{kx}` on the left and `D e^{-kx}` on the
//! right with `k = sqrt(-E)`; matching at `+-L` gives the condition
//!
//! ```text
//! [k u(L) + u'(L)] [k v(-L) - v'(-L)] - [k v(L) + v'(L)] [k u(-L) - u'(-L)] = 0.
//! ```
//!
//! For a PT-symmetric potential and real `E`, `u(-x) = conj(u(x))` and
//! `v(-x) = -conj(v(x))`, which collapses the condition to
//! `Re{ z conj(w) } = 0` with `z = k u(L) + u'(L)`, `w = k v(L) + v'(L)`. Only
//! the right half is integrated during the energy scan; the full two-sided
//! mismatch is evaluated at each candidate root as a residual check.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{Model, PotentialSpec};
use crate::roots::scan_bound_states;
use crate::spectrum::{Method, SpectrumResult};

/// `|G|` level below which a grid-local minimum is searched for a hidden root pair.
const TOUCH_LEVEL: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootingConfig {
    /// Matching distance `L`.
    pub length: f64,
    /// Nominal RK4 step; each segment uses the largest step not above it that
    /// divides the segment evenly.
    pub step: f64,
    pub e_scan_points: usize,
    pub root_tol: f64,
    /// Largest accepted `|F| / (|z|^2 + |w|^2)` at a root.
    pub residual_tol: f64,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        ShootingConfig {
            length: 12.0,
            step: 1e-3,
            e_scan_points: 2000,
            root_tol: 1e-9,
            residual_tol: 1e-6,
        }
    }
}

impl ShootingConfig {
    /// Defaults with the matching distance chosen for the model: the well
    /// edge for the rectangular well, 30 for the slowly decaying
    /// Wigner-Coulomb tail, 20 for Scarf II whose exact level crossings sit
    /// close to the threshold, 12 otherwise.
    pub fn for_spec(spec: &PotentialSpec) -> Self {
        let length = match spec.model {
            Model::Rect => spec.a,
            Model::WignerCoulomb => 30.0,
            Model::ScarfII => 20.0,
            _ => 12.0,
        };
        ShootingConfig {
            length,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::Config(format!("matching distance must be positive, got {}", self.length)));
        }
        if !(self.step > 0.0 && self.step <= self.length) {
            return Err(Error::Config(format!(
                "step must lie in (0, L = {}], got {}",
                self.length, self.step
            )));
        }
        if !(self.root_tol > 0.0) {
            return Err(Error::Config("root tolerance must be positive".into()));
        }
        if self.e_scan_points < 2 {
            return Err(Error::Config("energy scan needs at least two points".into()));
        }
        Ok(())
    }
}

/// Fundamental solutions and their derivatives at `+L` and `-L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingState {
    pub u_plus: Complex64,
    pub du_plus: Complex64,
    pub v_plus: Complex64,
    pub dv_plus: Complex64,
    pub u_minus: Complex64,
    pub du_minus: Complex64,
    pub v_minus: Complex64,
    pub dv_minus: Complex64,
}

impl ShootingState {
    pub fn wronskian_plus(&self) -> Complex64 {
        self.u_plus * self.dv_plus - self.du_plus * self.v_plus
    }

    pub fn wronskian_minus(&self) -> Complex64 {
        self.u_minus * self.dv_minus - self.du_minus * self.v_minus
    }

    /// Departure of both Wronskians from 1, relative to the size of the
    /// products that cancel in them (the solutions grow like `e^{kL}`).
    pub fn wronskian_defect(&self) -> f64 {
        let plus = (self.u_plus * self.dv_plus).norm() + (self.du_plus * self.v_plus).norm();
        let minus = (self.u_minus * self.dv_minus).norm() + (self.du_minus * self.v_minus).norm();
        let dp = (self.wronskian_plus() - 1.0).norm() / plus.max(1.0);
        let dm = (self.wronskian_minus() - 1.0).norm() / minus.max(1.0);
        dp.max(dm)
    }
}

/// Matching-condition values at one energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mismatch {
    /// Cross-multiplied two-sided condition.
    pub f: Complex64,
    /// `Re{ z conj(w) }`, the real function whose sign changes are scanned.
    pub g: f64,
    /// `|z|^2 + |w|^2`, used to normalise `f` and `g`.
    pub scale: f64,
}

impl Mismatch {
    pub fn g_normalized(&self) -> f64 {
        self.g / self.scale
    }

    pub fn residual(&self) -> f64 {
        self.f.norm() / self.scale
    }
}

#[derive(Debug, Clone, Copy)]
struct Step {
    h: f64,
    /// Potential at the start, midpoint and end of the step.
    v: [Complex64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Endpoint {
    u: Complex64,
    du: Complex64,
    v: Complex64,
    dv: Complex64,
}

/// Potential tabulated on the integration grid of one spec and config.
#[derive(Debug, Clone)]
pub struct Shooter {
    spec: PotentialSpec,
    cfg: ShootingConfig,
    right: Vec<(f64, Step)>,
    left: Vec<(f64, Step)>,
}

impl Shooter {
    pub fn new(spec: &PotentialSpec, cfg: &ShootingConfig) -> Result<Self> {
        spec.validate()?;
        cfg.validate()?;
        Ok(Shooter {
            spec: *spec,
            cfg: *cfg,
            right: tabulate(spec, cfg, 1.0),
            left: tabulate(spec, cfg, -1.0),
        })
    }

    pub fn spec(&self) -> &PotentialSpec {
        &self.spec
    }

    pub fn config(&self) -> &ShootingConfig {
        &self.cfg
    }

    pub fn integrate(&self, energy: f64) -> Result<ShootingState> {
        let r = march(&self.right, energy)?;
        let l = march(&self.left, energy)?;
        Ok(ShootingState {
            u_plus: r.u,
            du_plus: r.du,
            v_plus: r.v,
            dv_plus: r.dv,
            u_minus: l.u,
            du_minus: l.du,
            v_minus: l.v,
            dv_minus: l.dv,
        })
    }

    fn check_window(&self, energy: f64) -> Result<f64> {
        if !(energy > -self.spec.v1 && energy <= 0.0) {
            return Err(Error::Domain {
                energy,
                lo: -self.spec.v1,
                hi: 0.0,
            });
        }
        Ok((-energy).sqrt())
    }

    pub fn mismatch(&self, energy: f64) -> Result<Mismatch> {
        let k = self.check_window(energy)?;
        let s = self.integrate(energy)?;
        let z = s.u_plus * k + s.du_plus;
        let w = s.v_plus * k + s.dv_plus;
        let zl = s.u_minus * k - s.du_minus;
        let wl = s.v_minus * k - s.dv_minus;
        Ok(Mismatch {
            f: z * wl - w * zl,
            g: (z * w.conj()).re,
            scale: z.norm_sqr() + w.norm_sqr(),
        })
    }

    /// Normalised `G` from the right half only.
    pub fn g_normalized(&self, energy: f64) -> Result<f64> {
        let k = self.check_window(energy)?;
        let r = march(&self.right, energy)?;
        let z = r.u * k + r.du;
        let w = r.v * k + r.dv;
        Ok((z * w.conj()).re / (z.norm_sqr() + w.norm_sqr()))
    }

    /// Real eigenvalues in `[lo, hi]` from a `points`-point scan.
    pub fn roots_in(&self, lo: f64, hi: f64, points: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let scan = scan_bound_states(
            |e| self.g_normalized(e).ok(),
            lo,
            hi,
            points,
            self.cfg.root_tol,
            TOUCH_LEVEL,
        );
        let mut accepted = Vec::new();
        let mut residuals = Vec::new();
        let mut rejected = Vec::new();
        for e in scan.roots {
            match self.mismatch(e) {
                Ok(m) if m.residual() <= self.cfg.residual_tol => {
                    accepted.push(e);
                    residuals.push(m.residual());
                }
                _ => rejected.push(e),
            }
        }
        (accepted, residuals, scan.skipped.into_iter().chain(rejected).collect())
    }

    pub fn spectrum(&self) -> SpectrumResult {
        let eps = self.cfg.root_tol;
        let (eigenvalues, residuals, skipped) =
            self.roots_in(-self.spec.v1 + eps, -eps, self.cfg.e_scan_points);
        SpectrumResult {
            method: Method::Shooting,
            eigenvalues,
            residuals,
            skipped,
        }
    }
}

fn tabulate(spec: &PotentialSpec, cfg: &ShootingConfig, dir: f64) -> Vec<(f64, Step)> {
    let l = cfg.length;
    let mut breaks = vec![0.0];
    if spec.model.has_jumps() && spec.a < l {
        breaks.push(spec.a);
    }
    breaks.push(l);

    let mut steps = Vec::new();
    for seg in breaks.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let n = ((b - a) / cfg.step).ceil().max(1.0) as usize;
        let h = (b - a) / n as f64;
        // one-sided limits at the segment ends keep jumps out of every step
        let nudge = 1e-9 * h;
        let at = |x: f64| spec.evaluate(dir * x.clamp(a + nudge, b - nudge));
        for j in 0..n {
            let x0 = a + h * j as f64;
            let x1 = if j + 1 == n { b } else { a + h * (j + 1) as f64 };
            let step = Step {
                h: dir * h,
                v: [at(x0), at(0.5 * (x0 + x1)), at(x1)],
            };
            steps.push((dir * x1, step));
        }
    }
    steps
}

fn march(steps: &[(f64, Step)], energy: f64) -> Result<Endpoint> {
    let mut u = Complex64::new(1.0, 0.0);
    let mut du = Complex64::new(0.0, 0.0);
    let mut v = Complex64::new(0.0, 0.0);
    let mut dv = Complex64::new(1.0, 0.0);
    for (i, (x, s)) in steps.iter().enumerate() {
        let h = s.h;
        let half = 0.5 * h;
        let q0 = s.v[0] - energy;
        let qm = s.v[1] - energy;
        let q1 = s.v[2] - energy;

        let (a1, b1) = (du, q0 * u);
        let (a2, b2) = (du + b1 * half, qm * (u + a1 * half));
        let (a3, b3) = (du + b2 * half, qm * (u + a2 * half));
        let (a4, b4) = (du + b3 * h, q1 * (u + a3 * h));
        u += (a1 + (a2 + a3) * 2.0 + a4) * (h / 6.0);
        du += (b1 + (b2 + b3) * 2.0 + b4) * (h / 6.0);

        let (c1, d1) = (dv, q0 * v);
        let (c2, d2) = (dv + d1 * half, qm * (v + c1 * half));
        let (c3, d3) = (dv + d2 * half, qm * (v + c2 * half));
        let (c4, d4) = (dv + d3 * h, q1 * (v + c3 * h));
        v += (c1 + (c2 + c3) * 2.0 + c4) * (h / 6.0);
        dv += (d1 + (d2 + d3) * 2.0 + d4) * (h / 6.0);

        if i % 128 == 127 && !(u.norm_sqr() + du.norm_sqr() + v.norm_sqr() + dv.norm_sqr()).is_finite() {
            return Err(Error::Overflow { x: *x, energy });
        }
    }
    if ![u, du, v, dv].iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        let x = steps.last().map_or(0.0, |(x, _)| *x);
        return Err(Error::Overflow { x, energy });
    }
    Ok(Endpoint { u, du, v, dv })
}

/// Values of the two fundamental solutions at `+-L`.
pub fn integrate_fundamental(spec: &PotentialSpec, energy: f64, cfg: &ShootingConfig) -> Result<ShootingState> {
    if !energy.is_finite() {
        return Err(Error::Domain {
            energy,
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        });
    }
    Shooter::new(spec, cfg)?.integrate(energy)
}

/// Two-sided mismatch `F` and the scanned function `G` at `energy`.
pub fn mismatch(spec: &PotentialSpec, energy: f64, cfg: &ShootingConfig) -> Result<Mismatch> {
    Shooter::new(spec, cfg)?.mismatch(energy)
}

/// Real bound-state energies in `(-v1, 0)`, sorted ascending.
pub fn find_real_eigenvalues(spec: &PotentialSpec, cfg: &ShootingConfig) -> Result<SpectrumResult> {
    Ok(Shooter::new(spec, cfg)?.spectrum())
}
