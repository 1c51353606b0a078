//! Chebyshev polynomials of the second kind in the scaled variable `λ/2`, and
//! the conformal parameter `a(λ)` that uniformizes the exterior of `[-2, 2]`.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// Below this value of `sin θ` the trigonometric form switches to the endpoint limit.
const SIN_GUARD: f64 = 1e-8;

/// The consecutive pair `(U_n(λ/2), U_{n-1}(λ/2))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChebPair {
    pub n: usize,
    pub lambda: f64,
    pub u_n: f64,
    pub u_nm1: f64,
}

impl ChebPair {
    /// Residual of `U_n² + U_{n-1}² − λ U_n U_{n-1} = 1`.
    pub fn identity_residual(&self) -> f64 {
        self.u_n * self.u_n + self.u_nm1 * self.u_nm1 - self.lambda * self.u_n * self.u_nm1 - 1.0
    }
}

/// `(U_n(λ/2), U_{n-1}(λ/2))` by forward recurrence, with `U_{-1} = 0`.
///
/// Outside `[-2, 2]` the forward direction follows the dominant solution, so
/// the recurrence is stable on the whole real line.
pub(crate) fn u_pair(n: usize, lambda: f64) -> (f64, f64) {
    let mut prev = 0.0;
    let mut cur = 1.0;
    for _ in 0..n {
        let next = lambda * cur - prev;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// `U_n(λ/2)`.
pub(crate) fn u(n: usize, lambda: f64) -> f64 {
    u_pair(n, lambda).0
}

/// All values `U_0(λ/2), ..., U_n(λ/2)`.
pub(crate) fn u_table(n: usize, lambda: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut prev = 0.0;
    let mut cur = 1.0;
    out.push(cur);
    for _ in 0..n {
        let next = lambda * cur - prev;
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

pub fn cheb_u_pair(n: usize, lambda: f64) -> Result<ChebPair> {
    ensure_finite("lambda", lambda)?;
    let (u_n, u_nm1) = u_pair(n, lambda);
    Ok(ChebPair {
        n,
        lambda,
        u_n,
        u_nm1,
    })
}

/// Trigonometric evaluation `U_n(cos θ) = sin((n+1)θ) / sin θ` on `[-2, 2]`.
///
/// The angle is recovered as `θ = 2 asin(√((2 − |λ|)/4))`, which keeps full
/// relative accuracy near the band edges, and the sign for `λ < 0` comes from
/// `U_n(−x) = (−1)ⁿ U_n(x)`.
pub fn cheb_u_pair_trig(n: usize, lambda: f64) -> Result<ChebPair> {
    ensure_finite("lambda", lambda)?;
    if lambda.abs() > 2.0 {
        return Err(Error::domain(format!(
            "trigonometric form requires |lambda| <= 2, got {lambda}"
        )));
    }
    let theta = 2.0 * ((2.0 - lambda.abs()) / 4.0).sqrt().asin();
    let sin_theta = theta.sin();
    let at = |m: i64| -> f64 {
        if m < 0 {
            return 0.0;
        }
        if sin_theta.abs() < SIN_GUARD {
            (m + 1) as f64
        } else {
            ((m + 1) as f64 * theta).sin() / sin_theta
        }
    };
    let parity = |m: i64| -> f64 {
        if lambda < 0.0 && m.rem_euclid(2) == 1 {
            -1.0
        } else {
            1.0
        }
    };
    let n_i = n as i64;
    Ok(ChebPair {
        n,
        lambda,
        u_n: parity(n_i) * at(n_i),
        u_nm1: parity(n_i - 1) * at(n_i - 1),
    })
}

/// The conformal parameter `a(λ) = −(2/λ) / (1 + √(1 − 4/λ²))` for `|λ| > 2`.
///
/// It is the root of `a² + λa + 1 = 0` inside the unit disk, with sign opposite to `λ`.
pub fn joukowski_a(lambda: f64) -> Result<f64> {
    ensure_finite("lambda", lambda)?;
    if lambda.abs() <= 2.0 {
        return Err(Error::domain(format!(
            "a(lambda) is defined only for |lambda| > 2, got {lambda}"
        )));
    }
    Ok(a_unchecked(lambda))
}

pub(crate) fn a_unchecked(lambda: f64) -> f64 {
    -(2.0 / lambda) / (1.0 + (1.0 - 4.0 / (lambda * lambda)).sqrt())
}

/// Inverse map `λ = −(a² + 1)/a` for `0 < |a| < 1`.
pub fn lambda_from_a(a: f64) -> Result<f64> {
    ensure_finite("a", a)?;
    if a == 0.0 || a.abs() >= 1.0 {
        return Err(Error::domain(format!("need 0 < |a| < 1, got {a}")));
    }
    Ok(-(a * a + 1.0) / a)
}
