//! Symbolic and numeric toolkit for BRST-extended integrable systems obtained
//! by gauge-fixing the sl(2,R) zero-curvature equation.
//!
//! The crate has two halves that are deliberately kept apart:
//!
//! * an exact Grassmann-graded differential-polynomial engine
//!   ([`diffpoly`]) used to check algebraic identities with rational
//!   arithmetic, and
//! * a periodic pseudospectral solver ([`solver`]) used to check the
//!   conservation and integrability statements numerically.
//!
//! [`sl2`] holds the Lie-algebra data, [`reductions`] the catalog of gauge-fixed
//! systems and the maps between them, and [`verify`] bundles everything into
//! runnable checks with pass/fail reports.

pub mod cli;
pub mod diffpoly;
pub mod error;
pub mod reductions;
pub mod sl2;
pub mod solver;
pub mod verify;

pub use diffpoly::{parse, Coeff, Declarations, DerivationRuleSet, Exponent, Generator, GradedPoly, Q};
pub use error::{Error, Result};

pub use reductions::{build_system, ConservedDensity, DensityKind, EvolutionSystem, GaugeSlice};
pub use solver::{FieldState, Trajectory};
pub use verify::{CheckReport, CheckStatus};
