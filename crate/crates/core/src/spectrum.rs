//! Point spectrum of the rank-one perturbed operator.
//!
//! Outside the band an eigenvalue `λ` solves `1 + (−1)^k β a^{k+1}(λ) U_k(λ/2) = 0`,
//! i.e. `β = β(λ) = (−1)^{k+1} / (a^{k+1} U_k)`. `|β(λ)|` increases strictly from
//! `1/(k+1)` at `|λ| = 2` to infinity, and `β(−λ) = −β(λ)`, so the bound state is
//! found by inverting the branch on `(2, ∞)` and mirroring for negative coupling.

use serde::{Deserialize, Serialize};

use crate::chebyshev::{a_unchecked, u_pair};
use crate::error::{ensure_finite, Error, Result};
use crate::perturbed_basis::{phi_closed_form, Coupling};
use crate::resolvent::d_abs_sq;

/// Lower end of the initial inversion bracket, `2 + ε`.
const BRACKET_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundSide {
    /// Eigenvalue above the band.
    Right,
    /// Eigenvalue below the band.
    Left,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    pub exists: bool,
    pub lambda: Option<f64>,
    pub side: BoundSide,
    pub beta_critical: f64,
}

/// The critical coupling `β_0 = 1/(k+1)`.
pub fn critical_coupling(k: usize) -> f64 {
    1.0 / (k as f64 + 1.0)
}

/// Both roots `β_±(λ)` of `U_k² β² − U_k(λU_k − 2U_{k−1}) β + 1 = 0`.
///
/// Real roots exist only for `|λ| ≥ 2`.
pub fn beta_pm(k: usize, lambda: f64) -> Result<(f64, f64)> {
    ensure_finite("lambda", lambda)?;
    if lambda.abs() < 2.0 {
        return Err(Error::domain(format!(
            "no real roots: discriminant lambda^2/4 - 1 < 0 at lambda = {lambda}"
        )));
    }
    let (uk, ukm1) = u_pair(k, lambda);
    if uk == 0.0 {
        return Err(Error::Degenerate(format!("U_{k}(lambda/2) = 0 at lambda = {lambda}")));
    }
    let center = (lambda * uk - 2.0 * ukm1) / (2.0 * uk);
    let root = (lambda * lambda / 4.0 - 1.0).sqrt();
    Ok((center + root, center - root))
}

/// The coupling for which `lambda` (with `|λ| > 2`) is an eigenvalue.
pub fn beta_of_lambda(k: usize, lambda: f64) -> Result<f64> {
    ensure_finite("lambda", lambda)?;
    if lambda.abs() <= 2.0 {
        return Err(Error::domain(format!(
            "beta(lambda) is defined only for |lambda| > 2, got {lambda}"
        )));
    }
    Ok(beta_branch(k, lambda))
}

fn beta_branch(k: usize, lambda: f64) -> f64 {
    let a = a_unchecked(lambda);
    let (uk, _) = u_pair(k, lambda);
    let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
    sign / (a.powi(k as i32 + 1) * uk)
}

/// `dβ/dλ` along the branch, from `a′ = −a/(2a + λ)` and the differentiated recurrence.
fn beta_branch_derivative(k: usize, lambda: f64) -> f64 {
    let a = a_unchecked(lambda);
    let da = -a / (2.0 * a + lambda);
    // V_n = d/dλ U_n(λ/2): V_{n+1} = U_n + λ V_n − V_{n−1}
    let (mut u_prev, mut u_cur) = (0.0, 1.0);
    let (mut v_prev, mut v_cur) = (0.0, 0.0);
    for _ in 0..k {
        let u_next = lambda * u_cur - u_prev;
        let v_next = u_cur + lambda * v_cur - v_prev;
        u_prev = u_cur;
        u_cur = u_next;
        v_prev = v_cur;
        v_cur = v_next;
    }
    let beta = beta_branch(k, lambda);
    -beta * ((k as f64 + 1.0) * da / a + v_cur / u_cur)
}

/// The eigenvalue of `H_k^(β)`, if any.
///
/// Uses a geometrically grown bracket on `(2, ∞)`, Newton steps that fall back
/// to bisection whenever they leave the bracket, and stops once
/// `|β(λ) − |β|| ≤ 1e−12 |β|`.
pub fn eigenvalue(c: Coupling) -> EigenResult {
    let beta_critical = critical_coupling(c.k);
    if c.beta.abs() <= beta_critical {
        return EigenResult {
            exists: false,
            lambda: None,
            side: BoundSide::None,
            beta_critical,
        };
    }
    let target = c.beta.abs();
    let f = |l: f64| beta_branch(c.k, l) - target;

    let mut lo = 2.0 + BRACKET_EPS;
    let mut hi = 4.0;
    while f(hi) <= 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..400 {
        let fx = f(x);
        if fx.abs() <= 1e-12 * target {
            break;
        }
        if fx > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let slope = beta_branch_derivative(c.k, x);
        let newton = x - fx / slope;
        x = if slope.is_finite() && slope > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    let (lambda, side) = if c.beta > 0.0 {
        (x, BoundSide::Right)
    } else {
        (-x, BoundSide::Left)
    };
    EigenResult {
        exists: true,
        lambda: Some(lambda),
        side,
        beta_critical,
    }
}

/// Diagnostics at the band edges for the critical couplings `±1/(k+1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceReport {
    pub k: usize,
    pub beta_critical: f64,
    /// `(k+1)²`, the value `|φ_n(±2)|²` settles on.
    pub plateau: f64,
    /// Range of `n` over which the plateau is checked.
    pub n_range: (usize, usize),
    /// `max_n ||φ_n(2)|² − (k+1)²|` at `β = +β_0`.
    pub plateau_residual_right: f64,
    /// Same at `λ = −2`, `β = −β_0`.
    pub plateau_residual_left: f64,
    /// `|D_k(2 + i0)|²` at `β = +β_0`.
    pub edge_abs_sq_right: f64,
    /// `|D_k(−2 + i0)|²` at `β = −β_0`.
    pub edge_abs_sq_left: f64,
    /// Partial sums `Σ |φ_n(2)|²` up to the end of the range (grows without bound).
    pub partial_norm_right: f64,
    pub partial_norm_left: f64,
}

impl ResonanceReport {
    pub fn holds(&self, tol_plateau: f64, tol_edge: f64) -> bool {
        self.plateau_residual_right <= tol_plateau
            && self.plateau_residual_left <= tol_plateau
            && self.edge_abs_sq_right.abs() <= tol_edge
            && self.edge_abs_sq_left.abs() <= tol_edge
    }
}

pub fn resonance_report(k: usize) -> ResonanceReport {
    let beta_critical = critical_coupling(k);
    let plateau = ((k + 1) * (k + 1)) as f64;
    let (first, last) = (2 * k + 2, 2 * k + 30);
    let side = |beta: f64, edge: f64| {
        let c = Coupling { k, beta };
        let mut residual: f64 = 0.0;
        let mut partial = 0.0;
        for n in 0..=last {
            let v = phi_closed_form(c, n, edge).powi(2);
            partial += v;
            if n >= first {
                residual = residual.max((v - plateau).abs());
            }
        }
        (residual, d_abs_sq(c, edge), partial)
    };
    let (rr, er, pr) = side(beta_critical, 2.0);
    let (rl, el, pl) = side(-beta_critical, -2.0);
    ResonanceReport {
        k,
        beta_critical,
        plateau,
        n_range: (first, last),
        plateau_residual_right: rr,
        plateau_residual_left: rl,
        edge_abs_sq_right: er,
        edge_abs_sq_left: el,
        partial_norm_right: pr,
        partial_norm_left: pl,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cpl(k: usize, beta: f64) -> Coupling {
        Coupling::new(k, beta).unwrap()
    }

    /// The explicit form `(−1)^{k+1} (−λ(1+√(1−4/λ²))^{k+1}/2) (−λ/2)^k / U_k(λ/2)`.
    fn beta_displayed(k: usize, lambda: f64) -> f64 {
        let r = 1.0 + (1.0 - 4.0 / (lambda * lambda)).sqrt();
        let sign = if (k + 1) % 2 == 0 { 1.0 } else { -1.0 };
        let (uk, _) = u_pair(k, lambda);
        sign * (-lambda * r.powi(k as i32 + 1) / 2.0) * (-lambda / 2.0).powi(k as i32) / uk
    }

    #[test]
    fn critical_values() {
        assert_eq!(critical_coupling(0), 1.0);
        assert_eq!(critical_coupling(1), 0.5);
        assert_relative_eq!(critical_coupling(9), 0.1, max_relative = 1e-15);
    }

    #[test]
    fn beta_pm_at_edges() {
        for k in 0..12 {
            let b0 = critical_coupling(k);
            let (p, m) = beta_pm(k, 2.0).unwrap();
            assert_relative_eq!(p, b0, max_relative = 1e-13);
            assert_relative_eq!(m, b0, max_relative = 1e-13);
            let (p, m) = beta_pm(k, -2.0).unwrap();
            assert_relative_eq!(p, -b0, max_relative = 1e-13);
            assert_relative_eq!(m, -b0, max_relative = 1e-13);
        }
    }

    #[test]
    fn beta_pm_hand_quadratic() {
        let (p, m) = beta_pm(0, 2.5).unwrap();
        assert_relative_eq!(p, 2.0, max_relative = 1e-15);
        assert_relative_eq!(m, 0.5, max_relative = 1e-15);
    }

    #[test]
    fn beta_pm_rejects_band_interior() {
        for l in [-1.99, 0.0, 1.5] {
            assert!(matches!(beta_pm(3, l), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn physical_root_is_branch() {
        for k in 0..8 {
            for lambda in [2.01, 2.5, 3.3, 6.0, -2.2, -4.0] {
                let (p, m) = beta_pm(k, lambda).unwrap();
                let physical = if p.abs() > m.abs() { p } else { m };
                let b = beta_of_lambda(k, lambda).unwrap();
                assert!((physical - b).abs() <= 1e-12 * b.abs().max(1.0), "k={k} l={lambda}");
            }
        }
    }

    #[test]
    fn branch_anchor_values() {
        assert_relative_eq!(beta_of_lambda(0, 2.5).unwrap(), 2.0, max_relative = 1e-15);
        assert_relative_eq!(beta_of_lambda(1, 2.5).unwrap(), 1.6, max_relative = 1e-15);
        for k in 0..10 {
            let near = beta_of_lambda(k, 2.0 + 1e-14).unwrap();
            assert!((near - critical_coupling(k)).abs() < 1e-5);
        }
        assert!(beta_of_lambda(0, 2.0).is_err());
    }

    #[test]
    fn displayed_form_matches_compact_form() {
        let mut x: u64 = 0x2545_f491_4f6c_dd1d;
        for _ in 0..100 {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            let u01 = (x >> 11) as f64 / (1u64 << 53) as f64;
            let k = (x % 9) as usize;
            let lambda = if x & 1 == 0 { 2.0 + 8.0 * u01 + 1e-9 } else { -2.0 - 8.0 * u01 - 1e-9 };
            let compact = beta_of_lambda(k, lambda).unwrap();
            assert!((compact - beta_displayed(k, lambda)).abs() <= 1e-12 * compact.abs());
        }
    }

    #[test]
    fn branch_is_odd_and_monotone() {
        for k in 0..6 {
            let mut prev = critical_coupling(k);
            for i in 1..200 {
                let l = 2.0 + 0.05 * i as f64;
                let b = beta_of_lambda(k, l).unwrap();
                assert!(b > prev);
                assert_relative_eq!(beta_of_lambda(k, -l).unwrap(), -b, max_relative = 1e-14);
                prev = b;
            }
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        for k in 0..6 {
            for l in [2.1, 2.7, 5.0] {
                let h = 1e-6;
                let fd = (beta_branch(k, l + h) - beta_branch(k, l - h)) / (2.0 * h);
                assert_relative_eq!(beta_branch_derivative(k, l), fd, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn eigenvalue_examples() {
        let e = eigenvalue(cpl(0, 2.0));
        assert!(e.exists);
        assert_eq!(e.side, BoundSide::Right);
        assert!((e.lambda.unwrap() - 2.5).abs() <= 1e-10);

        let e = eigenvalue(cpl(3, 0.2));
        assert!(!e.exists);
        assert_eq!(e.lambda, None);
        assert_eq!(e.side, BoundSide::None);
        assert_eq!(e.beta_critical, 0.25);

        let e = eigenvalue(cpl(1, 1.6));
        assert!((e.lambda.unwrap() - 2.5).abs() <= 1e-10);

        let e = eigenvalue(cpl(0, -3.0));
        assert_eq!(e.side, BoundSide::Left);
        assert!((e.lambda.unwrap() + (3.0 + 1.0 / 3.0)).abs() <= 1e-10);

        assert!(!eigenvalue(cpl(2, 1.0 / 3.0)).exists);
    }

    #[test]
    fn eigenvalue_just_above_critical() {
        // β(λ) ≈ β_0 + c√(λ − 2) here, so one ulp of λ moves β by ~1e-10;
        // the root must still be bracketed within a few ulps.
        let target = 1.0 / 3.0 + 1e-6;
        let l = eigenvalue(cpl(2, target)).lambda.unwrap();
        assert!(l > 2.0);
        let ulp = f64::EPSILON * l;
        assert!(beta_of_lambda(2, l - 4.0 * ulp).unwrap() <= target);
        assert!(beta_of_lambda(2, l + 4.0 * ulp).unwrap() >= target);
    }

    #[test]
    fn resonance_values() {
        let r = resonance_report(0);
        assert_eq!(r.beta_critical, 1.0);
        assert_eq!(r.plateau, 1.0);
        assert!(r.edge_abs_sq_right.abs() < 1e-12);
        for k in 0..8 {
            let r = resonance_report(k);
            assert!(r.holds(1e-9, 1e-12), "{r:?}");
            assert!(r.partial_norm_right >= 29.0 * r.plateau);
        }
        assert_eq!(resonance_report(1).plateau, 4.0);
        assert_eq!(resonance_report(2).plateau, 9.0);
    }
}
