//! Spectral data of the discrete half-line Schrödinger operator with a local
//! rank-one perturbation `β δ_k` (and the rank-two perturbation on sites 0 and 1).
//!
//! Every quantity is available in closed form: the orthogonality measure of the
//! perturbed polynomials, the boundary values of the resolvent denominator
//! `D_k(λ ± i0)`, the scattering coefficient, the bound-state branch and the
//! critical coupling `1/(k+1)`. The [`oracle`] module provides independent
//! brute-force checks (principal-value quadrature and diagonalization of finite
//! sections of the Jacobi matrix).
//!
//! Sites are indexed from 0 throughout. The rank-two couplings `(β₁, β₂)` sit on
//! sites 0 and 1.

pub mod chebyshev;
pub mod error;
pub mod format;
pub mod measure;
pub mod oracle;
pub mod perturbed_basis;
pub mod quadrature;
pub mod resolvent;
pub mod scattering;
pub mod spectrum;

pub use chebyshev::{cheb_u_pair, joukowski_a, lambda_from_a, ChebPair};
pub use error::{Error, Result};
pub use measure::{
    mu0_density, mu12_density, muk_density, orthonormality_defect, rho_densities, total_mass,
    DensityTable, Measure,
};
pub use oracle::{
    empirical_cdf_distance, pv_quadrature, truncated_spectrum, CdfReport, Perturbation,
    TruncationResult,
};
pub use perturbed_basis::{
    phi2d_recurrence, phi_closed_form, phi_recurrence, Coupling, Coupling2D,
};
pub use quadrature::{Estimate, QuadratureConfig};
pub use resolvent::{d_abs_sq, d_boundary, i_integral, l_tilde, BoundaryValue, IntegralValue, Side};
pub use scattering::{phase_table, s_value, PhaseTable, ScatterValue};
pub use spectrum::{
    beta_of_lambda, beta_pm, critical_coupling, eigenvalue, resonance_report, BoundSide,
    EigenResult, ResonanceReport,
};

/// Complex number used for `D_k(λ ± i0)` and `S^(k)(λ)`.
pub type ComplexValue = num_complex::Complex64;
