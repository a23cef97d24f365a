//! Deterministic product quadrature over `U(2)_R` and `S^3_R` and the
//! numerical checks built on it.

pub mod checks;
pub mod cycle;
pub mod rules;
pub mod sampling;

pub use checks::{
    collapse_z1, conformal_prefactor, lemma_zp_closed, lemma_zp_eval, one_loop_eval, poisson_eval, run_check,
    Check, CheckEntry, CheckReport, VerifyOptions,
};
pub use cycle::{integrate, integrate_many, Chart, Integrand, QuadratureSpec};
