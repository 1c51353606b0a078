//! Densities of the orthogonality measures and integrals against them.
//!
//! All integrals over the band use `λ = 2 cos θ`, under which
//! `μ_0′(λ) dλ = (2/π) sin²θ dθ`. This removes the square-root behaviour at
//! `±2`, including the `1/√(2 ∓ λ)` edge that appears at critical coupling.

use std::cell::RefCell;
use std::f64::consts::FRAC_1_PI;

use serde::{Deserialize, Serialize};

use crate::chebyshev::u_pair;
use crate::error::{Error, Result};
use crate::format::sig17;
use crate::perturbed_basis::{phi_closed_form, phi_recurrence, Coupling, Coupling2D};
use crate::quadrature::{integrate, Estimate, QuadratureConfig};
use crate::resolvent::{band_root, d_abs_sq};
use crate::spectrum::critical_coupling;

/// Which measure a density belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "measure", rename_all = "kebab-case")]
pub enum Measure {
    /// `μ_0`, the semicircle-type measure of the free operator.
    Free,
    /// `μ_k` for the rank-one coupling.
    RankOne(Coupling),
    /// `μ_{1,2}` for the rank-two coupling on sites 0 and 1.
    RankTwo(Coupling2D),
    /// `ρ_0^(k)′ = U_k² μ_0′`.
    Rho0k(Coupling),
    /// `ρ_k′ = U_k² μ_k′`.
    Rhok(Coupling),
}

impl Measure {
    /// Ratio of the density to `μ_0′` at an interior point of the band.
    fn ratio(&self, lambda: f64) -> Result<f64> {
        match *self {
            Measure::Free => Ok(1.0),
            Measure::RankOne(c) => Ok(1.0 / d_abs_sq(c, lambda)),
            Measure::RankTwo(c2) => {
                let q = rank_two_denominator(c2, lambda);
                if q <= 0.0 {
                    return Err(nonpositive_q(c2, lambda, q));
                }
                Ok(1.0 / q)
            }
            Measure::Rho0k(c) => {
                let (uk, _) = u_pair(c.k, lambda);
                Ok(uk * uk)
            }
            Measure::Rhok(c) => {
                let (uk, _) = u_pair(c.k, lambda);
                Ok(uk * uk / d_abs_sq(c, lambda))
            }
        }
    }

    /// Density at `lambda`; zero outside the open band and at its endpoints.
    pub fn density(&self, lambda: f64) -> Result<f64> {
        if !(lambda.abs() < 2.0) {
            return Ok(0.0);
        }
        Ok(mu0_density(lambda) * self.ratio(lambda)?)
    }

    /// Integrand in the angle variable: `density(2cos θ) · 2 sin θ`.
    fn theta_integrand(&self, theta: f64) -> Result<f64> {
        let s = theta.sin();
        Ok(2.0 * FRAC_1_PI * s * s * self.ratio(2.0 * theta.cos())?)
    }

    /// Band edge at which the density denominator vanishes, if the coupling is critical.
    pub fn critical_edge(&self) -> Option<f64> {
        let rank_one = |c: Coupling| {
            let b0 = critical_coupling(c.k);
            if (c.beta.abs() - b0).abs() <= 1e-12 * b0 {
                Some(2.0 * c.beta.signum())
            } else {
                None
            }
        };
        match *self {
            Measure::Free | Measure::Rho0k(_) => None,
            Measure::RankOne(c) | Measure::Rhok(c) => rank_one(c),
            Measure::RankTwo(c2) => [2.0, -2.0]
                .into_iter()
                .find(|&edge| rank_two_denominator(c2, edge).abs() <= 1e-12),
        }
    }

    /// Integral of `g(λ) · density(λ)` over `[lo, hi] ⊂ [-2, 2]`.
    pub fn integrate<G: Fn(f64) -> f64>(
        &self,
        g: G,
        lo: f64,
        hi: f64,
        q: &QuadratureConfig,
    ) -> Result<Estimate> {
        let lo = lo.clamp(-2.0, 2.0);
        let hi = hi.clamp(-2.0, 2.0);
        let failure: RefCell<Option<Error>> = RefCell::new(None);
        let f = |theta: f64| match self.theta_integrand(theta) {
            Ok(w) => w * g(2.0 * theta.cos()),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        };
        // θ runs from acos(hi/2) to acos(lo/2)
        let est = integrate(f, (hi / 2.0).acos(), (lo / 2.0).acos(), q);
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        est
    }
}

/// `μ_0′(λ) = (1/π)√(1 − λ²/4)` on `[-2, 2]`, zero outside.
pub fn mu0_density(lambda: f64) -> f64 {
    if lambda.abs() > 2.0 {
        0.0
    } else {
        FRAC_1_PI * band_root(lambda)
    }
}

/// `μ_k′(λ) = μ_0′(λ) / |D_k(λ + i0)|²`.
pub fn muk_density(c: Coupling, lambda: f64) -> f64 {
    Measure::RankOne(c)
        .density(lambda)
        .expect("rank-one denominator is positive inside the band")
}

/// The cubic `Q(t)` in the rank-two density `μ_{1,2}′ = μ_0′ / Q`.
pub fn rank_two_denominator(c2: Coupling2D, t: f64) -> f64 {
    let (b1, b2) = (c2.beta1, c2.beta2);
    b1 * b1 + (1.0 - b1 * b2).powi(2) + t * (2.0 * b2 - b1 * (1.0 + b1 * b2 + 2.0 * b2 * b2))
        + t * t * b2 * (b2 + 2.0 * b1)
        - t * t * t * b2
}

fn nonpositive_q(c2: Coupling2D, t: f64, q: f64) -> Error {
    let zeros = rank_two_zeros(c2);
    Error::domain(format!(
        "rank-two denominator Q = {q:e} <= 0 at t = {t} for (beta1, beta2) = ({}, {}); zeros of Q in [-2, 2]: {zeros:?}",
        c2.beta1, c2.beta2
    ))
}

/// Real zeros of `Q` in `[-2, 2]`, located by sign changes on a fine grid and bisection.
pub fn rank_two_zeros(c2: Coupling2D) -> Vec<f64> {
    const CELLS: usize = 800;
    let q = |t: f64| rank_two_denominator(c2, t);
    let mut zeros = Vec::new();
    let mut left = -2.0;
    let mut q_left = q(left);
    for i in 1..=CELLS {
        let right = -2.0 + 4.0 * i as f64 / CELLS as f64;
        let q_right = q(right);
        if q_left == 0.0 {
            zeros.push(left);
        } else if q_left * q_right < 0.0 {
            let (mut a, mut b) = (left, right);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                if q(a) * q(m) <= 0.0 {
                    b = m;
                } else {
                    a = m;
                }
            }
            zeros.push(0.5 * (a + b));
        }
        left = right;
        q_left = q_right;
    }
    if q_left == 0.0 {
        zeros.push(2.0);
    }
    zeros
}

/// `μ_{1,2}′(t)`; fails if `Q(t) ≤ 0` inside the band.
pub fn mu12_density(c2: Coupling2D, t: f64) -> Result<f64> {
    Measure::RankTwo(c2).density(t)
}

/// `(ρ_0^(k)′(λ), ρ_k′(λ))`.
pub fn rho_densities(c: Coupling, lambda: f64) -> (f64, f64) {
    let rho0 = Measure::Rho0k(c).density(lambda).expect("no failure path");
    let rhok = Measure::Rhok(c).density(lambda).expect("no failure path");
    (rho0, rhok)
}

/// Mass of the absolutely continuous density over `[-2, 2]`.
pub fn total_mass(measure: &Measure, q: &QuadratureConfig) -> Result<Estimate> {
    measure.integrate(|_| 1.0, -2.0, 2.0, q)
}

/// How the perturbed polynomials are evaluated inside an integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhiRoute {
    #[default]
    Recurrence,
    ClosedForm,
}

/// `|∫ φ_m φ_n dμ_k − δ_mn|`, valid only when `μ_k` has no atoms (`|β| ≤ 1/(k+1)`).
pub fn orthonormality_defect(c: Coupling, m: usize, n: usize, q: &QuadratureConfig) -> Result<f64> {
    orthonormality_defect_by(c, m, n, q, PhiRoute::Recurrence)
}

pub fn orthonormality_defect_by(
    c: Coupling,
    m: usize,
    n: usize,
    q: &QuadratureConfig,
    route: PhiRoute,
) -> Result<f64> {
    let b0 = critical_coupling(c.k);
    if c.beta.abs() > b0 * (1.0 + 1e-12) {
        return Err(Error::domain(format!(
            "|beta| = {} exceeds the critical coupling {b0}; the density alone is not the orthogonality measure",
            c.beta.abs()
        )));
    }
    let phi = |j: usize, l: f64| match route {
        PhiRoute::Recurrence => phi_recurrence(c, j, l),
        PhiRoute::ClosedForm => phi_closed_form(c, j, l),
    };
    let inner = Measure::RankOne(c).integrate(|l| phi(m, l) * phi(n, l), -2.0, 2.0, q)?;
    let delta = if m == n { 1.0 } else { 0.0 };
    Ok((inner.value - delta).abs())
}

/// Samples of a density on a grid inside `[-2, 2]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityTable {
    pub descriptor: Measure,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub total_mass: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl DensityTable {
    /// Builds a table from precomputed values, checking the grid and value invariants.
    pub fn new(descriptor: Measure, grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        validate_grid(&grid)?;
        if grid.len() != values.len() {
            return Err(Error::domain(format!(
                "grid has {} points but {} values were given",
                grid.len(),
                values.len()
            )));
        }
        if let Some((l, v)) = grid.iter().zip(&values).find(|(_, v)| !(**v >= 0.0)) {
            return Err(Error::domain(format!("negative or undefined density {v} at lambda = {l}")));
        }
        let mut notes = Vec::new();
        if let Some(edge) = descriptor.critical_edge() {
            if grid.iter().any(|&l| l == edge) {
                notes.push(format!(
                    "critical coupling: density has an integrable 1/sqrt edge singularity at lambda = {edge}; endpoint reported as 0"
                ));
            }
        }
        Ok(Self {
            descriptor,
            grid,
            values,
            total_mass: None,
            notes,
        })
    }

    pub fn tabulate(descriptor: Measure, grid: Vec<f64>) -> Result<Self> {
        let values = grid
            .iter()
            .map(|&l| descriptor.density(l))
            .collect::<Result<Vec<_>>>()?;
        Self::new(descriptor, grid, values)
    }

    pub fn with_total_mass(mut self, q: &QuadratureConfig) -> Result<Self> {
        self.total_mass = Some(total_mass(&self.descriptor, q)?.value);
        Ok(self)
    }

    /// `lambda,density` rows with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,density\n");
        for (l, v) in self.grid.iter().zip(&self.values) {
            out.push_str(&sig17(*l));
            out.push(',');
            out.push_str(&sig17(*v));
            out.push('\n');
        }
        out
    }
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if let Some(bad) = grid.iter().find(|l| !(l.abs() <= 2.0)) {
        return Err(Error::domain(format!("grid point {bad} lies outside [-2, 2]")));
    }
    if let Some(w) = grid.windows(2).find(|w| !(w[0] < w[1])) {
        return Err(Error::domain(format!(
            "grid must be strictly increasing ({} followed by {})",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// Evenly spaced grid from `min` to `max` inclusive.
pub fn linspace(min: f64, max: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![min];
    }
    let step = (max - min) / (count - 1) as f64;
    (0..count)
        .map(|i| if i + 1 == count { max } else { min + step * i as f64 })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cpl(k: usize, beta: f64) -> Coupling {
        Coupling::new(k, beta).unwrap()
    }

    #[test]
    fn free_density_values() {
        assert_relative_eq!(mu0_density(0.0), FRAC_1_PI, max_relative = 1e-15);
        assert_eq!(mu0_density(2.0), 0.0);
        assert_eq!(mu0_density(-2.0), 0.0);
        assert_eq!(mu0_density(3.0), 0.0);
    }

    #[test]
    fn rank_one_density_values() {
        for l in [-1.5, 0.0, 0.3, 1.9] {
            assert_eq!(muk_density(cpl(3, 0.0), l), mu0_density(l));
        }
        assert_relative_eq!(muk_density(cpl(0, 0.5), 0.0), FRAC_1_PI / 1.25, max_relative = 1e-15);
        let expected = FRAC_1_PI * (3.0f64.sqrt() / 2.0) / (1.0 + 0.3 * (0.3 - 1.0) + 2.0 * 0.3);
        assert_relative_eq!(muk_density(cpl(1, 0.3), 1.0), expected, max_relative = 1e-14);
        assert_eq!(muk_density(cpl(1, 0.3), 2.5), 0.0);
    }

    #[test]
    fn rank_two_reductions() {
        for t in [-1.9, -0.5, 0.0, 0.8, 1.7] {
            let a = mu12_density(Coupling2D::new(0.3, 0.0).unwrap(), t).unwrap();
            assert_relative_eq!(a, muk_density(cpl(0, 0.3), t), max_relative = 1e-13);
            let b = mu12_density(Coupling2D::new(0.0, 0.3).unwrap(), t).unwrap();
            assert_relative_eq!(b, muk_density(cpl(1, 0.3), t), max_relative = 1e-13);
        }
        let z = mu12_density(Coupling2D::new(0.0, 0.0).unwrap(), 0.0).unwrap();
        assert_relative_eq!(z, FRAC_1_PI, max_relative = 1e-15);
    }

    #[test]
    fn rank_two_critical_zero_reported() {
        // β₂ = 1/2 on site 1 is critical: Q(2) = 0
        let c2 = Coupling2D::new(0.0, 0.5).unwrap();
        let zeros = rank_two_zeros(c2);
        assert!(zeros.iter().any(|z| (z - 2.0).abs() < 1e-9), "{zeros:?}");
        assert_eq!(Measure::RankTwo(c2).critical_edge(), Some(2.0));
    }

    #[test]
    fn rho_pair() {
        let (r0, rk) = rho_densities(cpl(0, 1.7), 0.4);
        assert_relative_eq!(r0, mu0_density(0.4), max_relative = 1e-15);
        assert_relative_eq!(rk, mu0_density(0.4) / d_abs_sq(cpl(0, 1.7), 0.4), max_relative = 1e-15);
        assert_eq!(rho_densities(cpl(1, 0.9), 0.0), (0.0, 0.0));
        let c = cpl(4, -0.8);
        for l in [-1.3, 0.2, 1.6] {
            let (r0, rk) = rho_densities(c, l);
            assert!((r0 - d_abs_sq(c, l) * rk).abs() < 1e-12);
        }
    }

    #[test]
    fn free_mass_is_one() {
        let m = total_mass(&Measure::Free, &QuadratureConfig::default()).unwrap();
        assert!((m.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn subcritical_mass_is_one() {
        let q = QuadratureConfig::default();
        for (k, beta) in [(0, 1.0), (0, -0.6), (2, 0.33), (3, -0.25)] {
            let m = total_mass(&Measure::RankOne(cpl(k, beta)), &q).unwrap();
            assert!((m.value - 1.0).abs() < 1e-8, "k={k} beta={beta}: {}", m.value);
        }
    }

    #[test]
    fn bound_state_at_site_zero_takes_three_quarters() {
        // for β δ_0 the atom carries 1 − 1/β²
        let m = total_mass(&Measure::RankOne(cpl(0, 2.0)), &QuadratureConfig::default()).unwrap();
        assert!((m.value - 0.25).abs() < 1e-9, "{}", m.value);
    }

    #[test]
    fn orthonormality_examples() {
        let q = QuadratureConfig::default();
        assert!(orthonormality_defect(cpl(2, 0.1), 0, 0, &q).unwrap() < 1e-8);
        assert!(orthonormality_defect(cpl(1, 0.4), 0, 1, &q).unwrap() < 1e-8);
        assert!(orthonormality_defect(cpl(2, 0.25), 5, 5, &q).unwrap() < 1e-8);
        assert!(orthonormality_defect_by(cpl(2, 0.25), 3, 7, &q, PhiRoute::ClosedForm).unwrap() < 1e-8);
    }

    #[test]
    fn orthonormality_rejects_supercritical() {
        let q = QuadratureConfig::default();
        assert!(matches!(orthonormality_defect(cpl(1, 0.6), 0, 0, &q), Err(Error::Domain(_))));
        assert!(orthonormality_defect(cpl(1, 0.5), 0, 0, &q).is_ok());
    }

    #[test]
    fn table_invariants() {
        let t = DensityTable::tabulate(Measure::RankOne(cpl(1, 0.3)), linspace(-2.0, 2.0, 401)).unwrap();
        assert_eq!(t.values.len(), 401);
        assert_eq!(t.values[0], 0.0);
        assert_eq!(t.values[400], 0.0);
        assert!(t.notes.is_empty());
        let csv = t.to_csv();
        assert!(csv.starts_with("lambda,density\n"));
        assert_eq!(csv.lines().count(), 402);

        assert!(DensityTable::tabulate(Measure::Free, vec![-3.0, 0.0]).is_err());
        assert!(DensityTable::tabulate(Measure::Free, vec![0.0, 0.0]).is_err());

        let crit = DensityTable::tabulate(Measure::RankOne(cpl(1, 0.5)), linspace(-2.0, 2.0, 5)).unwrap();
        assert_eq!(crit.notes.len(), 1);
    }

    #[test]
    fn linspace_endpoints() {
        let g = linspace(-2.0, 2.0, 401);
        assert_eq!(g[0], -2.0);
        assert_eq!(g[200], 0.0);
        assert_eq!(g[400], 2.0);
    }
}
