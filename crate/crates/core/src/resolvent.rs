//! Boundary values of the resolvent denominator `D_k(z) = 1 + β(R_0(z)U_k, U_k)`.
//!
//! Inside the band the matrix element splits into a principal-value part
//! `I^(k)(λ)` and an imaginary part `±π ρ_0^(k)′(λ)`; outside the band it is real
//! and given through the conformal parameter `a(λ)`.

use serde::{Deserialize, Serialize};

use crate::chebyshev::{a_unchecked, u_pair};
use crate::perturbed_basis::Coupling;
use crate::ComplexValue;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Upper,
    Lower,
}

/// `D_k(λ ± i0)` together with the arguments that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryValue {
    pub d: ComplexValue,
    pub side: Side,
    pub lambda: f64,
    pub coupling: Coupling,
}

/// Value of `I^(k)(λ)`. `boundary` is set when `|λ| = 2` exactly, where the
/// integral is an endpoint case and the in-band formula is used by continuity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralValue {
    pub value: f64,
    pub boundary: bool,
}

/// `(−1)^k a^{k+1}(λ) U_k(λ/2)` for `|λ| > 2`.
pub(crate) fn exterior_element(k: usize, lambda: f64) -> f64 {
    let a = a_unchecked(lambda);
    let (uk, _) = u_pair(k, lambda);
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    sign * a.powi(k as i32 + 1) * uk
}

/// `π μ_0′(λ) = √(1 − λ²/4)` on the band.
pub(crate) fn band_root(lambda: f64) -> f64 {
    (1.0 - lambda * lambda / 4.0).max(0.0).sqrt()
}

/// The principal-value integral `v.p. ∫ U_k²(t/2) μ_0′(t) / (t − λ) dt`.
pub fn i_integral(k: usize, lambda: f64) -> IntegralValue {
    if lambda.abs() > 2.0 {
        IntegralValue {
            value: exterior_element(k, lambda),
            boundary: false,
        }
    } else {
        let (uk, ukm1) = u_pair(k, lambda);
        let b_k = -0.5 * lambda * uk + ukm1;
        IntegralValue {
            value: b_k * uk,
            boundary: lambda.abs() == 2.0,
        }
    }
}

/// `L̃_k(λ) = −(λ/2) U_k² + U_k U_{k−1}`.
pub fn l_tilde(k: usize, lambda: f64) -> f64 {
    let (uk, ukm1) = u_pair(k, lambda);
    -0.5 * lambda * uk * uk + uk * ukm1
}

pub fn d_boundary(c: Coupling, lambda: f64, side: Side) -> BoundaryValue {
    let d = if lambda.abs() > 2.0 {
        ComplexValue::new(1.0 + c.beta * exterior_element(c.k, lambda), 0.0)
    } else {
        let (uk, _) = u_pair(c.k, lambda);
        let im = band_root(lambda) * uk * uk;
        let im = match side {
            Side::Upper => im,
            Side::Lower => -im,
        };
        ComplexValue::new(1.0 + c.beta * l_tilde(c.k, lambda), c.beta * im)
    };
    BoundaryValue {
        d,
        side,
        lambda,
        coupling: c,
    }
}

/// `|D_k(λ + i0)|²` in closed form.
///
/// In the band this is `1 + β(β − λ)U_k² + 2βU_kU_{k−1}`; outside it is the
/// square of the real boundary value.
pub fn d_abs_sq(c: Coupling, lambda: f64) -> f64 {
    if lambda.abs() > 2.0 {
        let d = 1.0 + c.beta * exterior_element(c.k, lambda);
        d * d
    } else {
        let (uk, ukm1) = u_pair(c.k, lambda);
        let a_k = uk * uk;
        let b_k = uk * ukm1;
        1.0 + c.beta * (c.beta - lambda) * a_k + 2.0 * c.beta * b_k
    }
}
