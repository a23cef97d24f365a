//! Box diagrams of conformal four-point integrals, the operators they
//! define on pairs of harmonic polynomials, and numerical checks of the
//! quaternionic-analysis identities those operators rest on.
//!
//! The crate is split into:
//!
//! * [`hc_algebra`]: complexified quaternions as 2x2 complex matrices, the
//!   conformal action, the domains `D^±_R` and charts of the cycles
//!   `U(2)_R` and `S^3_R`.
//! * [`tbasis`]: matrix coefficients `t^l_{nm}`, the `N(Z)^k` basis and the
//!   exact pairings / inner product between basis elements.
//! * [`diagrams`]: box diagrams built from slingshot attachments, their
//!   partial order, radii, integrands, canonical keys and enumeration.
//! * [`magic`]: exact coefficient tables `a^k(n,p)`, eigenvalues
//!   `mu^(n)_k` and the generator images of every diagram.
//! * [`polylog`]: `Li_N` and the ladder functions `Phi^(1)`, `Phi^(2)`.
//! * [`quadrature`]: deterministic product quadrature over the cycles and
//!   the verification suites built on it.

pub mod diagrams;
pub mod error;
pub mod format;
pub mod hc_algebra;
pub mod magic;
pub mod polylog;
pub mod quadrature;
pub mod scalar;
pub mod tbasis;

pub use diagrams::{BoxDiagram, Site};
pub use error::{Error, Result};
pub use hc_algebra::{ComplexQuaternion, GroupElement};
pub use magic::{Family, GeneratorImage};
pub use num_rational::BigRational as Rational;
pub use scalar::{ExactComplex, Scalar, C64};
pub use tbasis::{BasisExpansion, TIndex};
