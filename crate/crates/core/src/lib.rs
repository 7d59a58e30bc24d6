//! Real discrete spectra of complex PT-symmetric scattering potentials.
//!
//! Four independent solvers compute the real bound-state energies of a
//! potential `V(x) = -V1 Fe(x) + i V2 Fo(x)`:
//!
//! * [`shooting`]: numerical integration with a two-sided matching condition,
//! * [`rectwell`]: the closed-form eliminant of the rectangular well,
//! * [`basis`] + [`eig`]: diagonalization in the harmonic-oscillator basis
//!   (Gaussian well) and a linear matrix pencil (Wigner-Coulomb well).
//!
//! [`trace`] sweeps `V2`, links eigenvalues into branches, and locates
//! exceptional points and real-to-real level crossings.

pub mod basis;
pub mod eig;
pub mod error;
pub mod oracle;
pub mod potential;
pub mod quadrature;
pub mod reproduce;
pub mod rectwell;
pub mod roots;
pub mod shooting;
pub mod spectrum;
pub mod trace;
pub mod validate;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use potential::{check_pt_symmetry, evaluate, Model, PotentialSpec};
pub use spectrum::{real_spectrum, Method, SolverSettings, SpectrumResult};
pub use trace::{detect_crossings, locate_eps, mirror_defect, sweep, SpectralCurves, SweepConfig};
