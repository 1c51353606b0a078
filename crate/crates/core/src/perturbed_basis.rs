//! Orthonormal polynomials of the perturbed Jacobi matrices.
//!
//! For the rank-one case the polynomials `φ_n^(k)` are available both through
//! the three-term recurrence and through an explicit finite sum of Chebyshev
//! polynomials; the two routes are independent and are cross-checked in tests.

use serde::{Deserialize, Serialize};

use crate::chebyshev::u_table;
use crate::error::{ensure_finite, Result};

/// A rank-one perturbation `β δ_k` of the free Jacobi matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub k: usize,
    pub beta: f64,
}

impl Coupling {
    pub fn new(k: usize, beta: f64) -> Result<Self> {
        ensure_finite("beta", beta)?;
        Ok(Self { k, beta })
    }

    pub fn free() -> Self {
        Self { k: 0, beta: 0.0 }
    }

    /// Diagonal entry of the Jacobi matrix at `site`.
    pub fn diagonal(&self, site: usize) -> f64 {
        if site == self.k {
            self.beta
        } else {
            0.0
        }
    }
}

/// Rank-two perturbation with `beta1` on site 0 and `beta2` on site 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling2D {
    pub beta1: f64,
    pub beta2: f64,
}

impl Coupling2D {
    pub fn new(beta1: f64, beta2: f64) -> Result<Self> {
        ensure_finite("beta1", beta1)?;
        ensure_finite("beta2", beta2)?;
        Ok(Self { beta1, beta2 })
    }

    pub fn diagonal(&self, site: usize) -> f64 {
        match site {
            0 => self.beta1,
            1 => self.beta2,
            _ => 0.0,
        }
    }
}

/// Monic orthogonal polynomial of degree `n` for a Jacobi matrix with unit
/// off-diagonals and the given diagonal, evaluated at `lambda`.
pub(crate) fn jacobi_poly(diagonal: impl Fn(usize) -> f64, n: usize, lambda: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = 1.0;
    for site in 0..n {
        let next = (lambda - diagonal(site)) * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `φ_n^(k)(λ)` from `λφ_n = φ_{n+1} + βδ_{nk}φ_n + φ_{n-1}`, `φ_0 = 1`.
pub fn phi_recurrence(c: Coupling, n: usize, lambda: f64) -> f64 {
    jacobi_poly(|site| c.diagonal(site), n, lambda)
}

/// `φ_n^(k)(λ)` as `U_n − β(U_{n−1} + U_{n−3} + …)`.
///
/// Nothing is subtracted for `n ≤ k`; for `k < n ≤ 2k+1` there are `n − k`
/// subtracted terms, and from `n = 2k+2` on there are always `k + 1`.
pub fn phi_closed_form(c: Coupling, n: usize, lambda: f64) -> f64 {
    let u = u_table(n, lambda);
    if n <= c.k {
        return u[n];
    }
    let terms = (n - c.k).min(c.k + 1);
    let mut tail = 0.0;
    for j in 0..terms {
        tail += u[n - 1 - 2 * j];
    }
    u[n] - c.beta * tail
}

/// `φ_n^(1,2)(t)` for the rank-two perturbation.
pub fn phi2d_recurrence(c2: Coupling2D, n: usize, t: f64) -> f64 {
    jacobi_poly(|site| c2.diagonal(site), n, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chebyshev::u;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn invisible_below_site() {
        let c = Coupling::new(3, 0.7).unwrap();
        let l: f64 = 1.1;
        assert_relative_eq!(phi_recurrence(c, 3, l), l.powi(3) - 2.0 * l, max_relative = 1e-14);
        assert_relative_eq!(phi_closed_form(c, 3, l), l.powi(3) - 2.0 * l, max_relative = 1e-14);
    }

    #[test]
    fn first_step_at_site_zero() {
        for beta in [-1.3, 0.0, 0.4, 2.0] {
            let c = Coupling::new(0, beta).unwrap();
            assert_eq!(phi_recurrence(c, 1, 2.0), 2.0 - beta);
        }
    }

    #[test]
    fn routes_agree_on_example() {
        let c = Coupling::new(2, 0.4).unwrap();
        let a = phi_recurrence(c, 7, 0.9);
        let b = phi_closed_form(c, 7, 0.9);
        assert!((a - b).abs() <= 1e-11);
    }

    #[test]
    fn just_past_the_site() {
        for k in 0..6 {
            let c = Coupling::new(k, -0.35).unwrap();
            let l = 0.77;
            let expected = u(k + 1, l) - c.beta * u(k, l);
            assert_relative_eq!(phi_closed_form(c, k + 1, l), expected, max_relative = 1e-14);
        }
    }

    #[test]
    fn zero_coupling_is_chebyshev() {
        let c = Coupling::new(0, 0.0).unwrap();
        for n in 0..20 {
            assert_eq!(phi_closed_form(c, n, 1.37), u(n, 1.37));
            assert_eq!(phi_recurrence(c, n, 1.37), u(n, 1.37));
        }
    }

    #[test]
    fn plateau_at_critical_coupling() {
        let c = Coupling::new(1, 0.5).unwrap();
        for n in 4..20 {
            assert!((phi_closed_form(c, n, 2.0).powi(2) - 4.0).abs() < 1e-9);
            let cm = Coupling::new(1, -0.5).unwrap();
            assert!((phi_closed_form(cm, n, -2.0).powi(2) - 4.0).abs() < 1e-9);
        }
    }

    #[test]
    fn rank_two_reduces_to_rank_one() {
        for n in 0..15 {
            for t in [-1.7, 0.2, 1.9] {
                let a = phi2d_recurrence(Coupling2D::new(0.3, 0.0).unwrap(), n, t);
                assert_eq!(a, phi_recurrence(Coupling::new(0, 0.3).unwrap(), n, t));
                let b = phi2d_recurrence(Coupling2D::new(0.0, 0.3).unwrap(), n, t);
                assert_eq!(b, phi_recurrence(Coupling::new(1, 0.3).unwrap(), n, t));
            }
        }
    }

    #[test]
    fn rank_two_unrolled_by_hand() {
        let (b1, b2, t) = (0.2, -0.5, 1.0);
        let expected = t * (t - b1) - b2 * (t - b1) - 1.0;
        let got = phi2d_recurrence(Coupling2D::new(b1, b2).unwrap(), 2, t);
        assert_relative_eq!(got, expected, max_relative = 1e-15);
    }

    #[test]
    fn monic_leading_coefficient() {
        let c = Coupling::new(4, 1.7).unwrap();
        let x: f64 = 1e6;
        for n in 1..12 {
            let ratio = phi_recurrence(c, n, x) / x.powi(n as i32);
            assert!((ratio - 1.0).abs() < 1e-5, "n={n} ratio={ratio}");
        }
    }

    #[test]
    fn non_finite_coupling_rejected() {
        assert!(Coupling::new(1, f64::NAN).is_err());
        assert!(Coupling2D::new(0.0, f64::INFINITY).is_err());
    }

    proptest! {
        #[test]
        fn route_equivalence(k in 0usize..=10, n in 0usize..=60,
                             beta in -3.0f64..3.0, lambda in -2.5f64..2.5) {
            let c = Coupling::new(k, beta).unwrap();
            let a = phi_recurrence(c, n, lambda);
            let b = phi_closed_form(c, n, lambda);
            prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0), "{a} vs {b}");
        }
    }
}
