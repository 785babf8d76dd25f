//! Special functions attached to toric quotients `C^N // T^n`.
//!
//! The period `Ψ_λ(e^x)` is a delta-constrained integral over `R_+^N`; it is
//! also a matrix element of the Lie algebra `L_N` (a Heisenberg algebra
//! extended by `(gl_1)^N`) and satisfies a holonomic system of GKZ type.
//! This crate evaluates the period by quadrature, builds formal series
//! solutions of the system, checks the annihilator identities symbolically,
//! and checks the system on computed periods by finite differences.

pub mod error;
mod exact;
pub mod operator_algebra;
pub mod pde_check;
pub mod quadrature;
pub mod reduction;
pub mod series;
pub mod toric_data;

pub use error::{Error, Result};
pub use num::complex::Complex64;
pub use operator_algebra::{
    annihilator, apply_diffop, gkz_operator, normal_order, rep_map, verify_annihilator,
    DiffOperator, ExactComplex, Generator, Monomial, NormalForm, Representation, Word,
    XSpaceOperator,
};
pub use pde_check::{fd_apply, verify_system, GridSpec, ResidualReport, SampledGrid};
pub use quadrature::{
    bessel_k_oracle, evaluate_matrix_element, evaluate_period, p1_closed_form, PeriodValue,
    QuadratureSettings,
};
pub use reduction::{jacobian_factor, log_reduce, particular_solution, ReducedIntegrand, SpectralParams};
pub use series::{build_series, series_eval, step_factor, SeriesCoefficients};
pub use toric_data::{
    integrability_check, kernel_basis, validate_charge_matrix, ChargeMatrix, KernelBasis, ToricData,
};
