//! Brute-force ground truth for the closed forms.
//!
//! Two independent routes are provided:
//!
//! * principal-value quadrature of `I^(k)(λ)` by the subtraction method, which
//!   only uses Chebyshev values and the free density;
//! * finite sections of the perturbed Jacobi matrix, diagonalized by implicit
//!   QL. Only the first row of the eigenvector matrix is accumulated, which is
//!   all the spectral measure of `δ_0` needs, so memory stays linear in `N`.

use serde::{Deserialize, Serialize};

use crate::chebyshev::u;
use crate::error::{ensure_finite, Error, Result};
use crate::measure::{mu0_density, Measure};
use crate::perturbed_basis::{Coupling, Coupling2D};
use crate::quadrature::{integrate, integrate_with_breaks, QuadratureConfig};

const MAX_QL_ITERATIONS: usize = 60;

/// The perturbation defining a truncated Jacobi matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Perturbation {
    RankOne(Coupling),
    RankTwo(Coupling2D),
}

impl Perturbation {
    pub fn diagonal(&self, site: usize) -> f64 {
        match self {
            Perturbation::RankOne(c) => c.diagonal(site),
            Perturbation::RankTwo(c2) => c2.diagonal(site),
        }
    }

    /// Highest perturbed site.
    fn last_site(&self) -> usize {
        match self {
            Perturbation::RankOne(c) => c.k,
            Perturbation::RankTwo(_) => 1,
        }
    }

    /// The measure whose density describes the continuous part.
    pub fn measure(&self) -> Measure {
        match *self {
            Perturbation::RankOne(c) => Measure::RankOne(c),
            Perturbation::RankTwo(c2) => Measure::RankTwo(c2),
        }
    }
}

impl From<Coupling> for Perturbation {
    fn from(c: Coupling) -> Self {
        Perturbation::RankOne(c)
    }
}

impl From<Coupling2D> for Perturbation {
    fn from(c2: Coupling2D) -> Self {
        Perturbation::RankTwo(c2)
    }
}

/// Eigen-data of an `N×N` section of the Jacobi matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationResult {
    pub n_dim: usize,
    pub coupling: Perturbation,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Squared first components of the normalized eigenvectors, aligned with `eigenvalues`.
    pub weights: Vec<f64>,
}

impl TruncationResult {
    /// Eigenvalues outside `[-2, 2]` with their weights.
    pub fn bound_states(&self) -> Vec<(f64, f64)> {
        self.eigenvalues
            .iter()
            .zip(&self.weights)
            .filter(|(l, _)| l.abs() > 2.0)
            .map(|(&l, &w)| (l, w))
            .collect()
    }

    pub fn bound_state_weight(&self) -> f64 {
        self.bound_states().iter().map(|(_, w)| w).sum()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.n_dim - 1]
    }
}

/// Eigenvalues and first eigenvector components of a symmetric tridiagonal
/// matrix by the implicit QL method with Wilkinson-type shifts.
///
/// `offdiag[i]` couples rows `i` and `i + 1`. Returns the eigenvalues in
/// ascending order along with the squared first components.
pub fn tridiagonal_first_row(diag: &[f64], offdiag: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    assert_eq!(offdiag.len() + 1, n, "offdiag must have n - 1 entries");
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0);
    let mut z = vec![0.0; n];
    z[0] = 1.0;

    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > MAX_QL_ITERATIONS {
                return Err(Error::Eigensolver {
                    index: l,
                    iterations,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let eigenvalues = order.iter().map(|&i| d[i]).collect();
    let weights = order.iter().map(|&i| z[i] * z[i]).collect();
    Ok((eigenvalues, weights))
}

/// Diagonalizes the `n_dim × n_dim` section (unit off-diagonals, perturbed diagonal).
pub fn truncated_spectrum(p: impl Into<Perturbation>, n_dim: usize) -> Result<TruncationResult> {
    let p = p.into();
    let needed = 2 * p.last_site() + 4;
    if n_dim < needed {
        return Err(Error::domain(format!(
            "truncation size {n_dim} too small: need at least {needed} to contain the perturbation"
        )));
    }
    let diag: Vec<f64> = (0..n_dim).map(|j| p.diagonal(j)).collect();
    let offdiag = vec![1.0; n_dim - 1];
    let (eigenvalues, weights) = tridiagonal_first_row(&diag, &offdiag)?;
    Ok(TruncationResult {
        n_dim,
        coupling: p,
        eigenvalues,
        weights,
    })
}

/// `v.p. ∫_{−2}^{2} U_k²(t/2) μ_0′(t) / (t − λ) dt` by direct quadrature.
///
/// Inside the band the singularity is removed by subtracting `f(λ)` and adding
/// back `f(λ) log((2 − λ)/(2 + λ))`, the principal value of `∫ dt/(t − λ)`.
pub fn pv_quadrature(k: usize, lambda: f64, q: &QuadratureConfig) -> Result<f64> {
    ensure_finite("lambda", lambda)?;
    if lambda.abs() == 2.0 {
        return Err(Error::domain("principal value is not defined at lambda = +-2"));
    }
    let f = |t: f64| {
        let uk = u(k, t);
        uk * uk * mu0_density(t)
    };
    // t = 2 cos θ, dt = −2 sin θ dθ; θ ∈ (0, π) covers t from 2 down to −2
    if lambda.abs() > 2.0 {
        let g = |theta: f64| {
            let t = 2.0 * theta.cos();
            f(t) / (t - lambda) * 2.0 * theta.sin()
        };
        return Ok(integrate(g, 0.0, std::f64::consts::PI, q)?.value);
    }
    let f_lambda = f(lambda);
    let theta_lambda = (lambda / 2.0).acos();
    let g = |theta: f64| {
        let t = 2.0 * theta.cos();
        let diff = t - lambda;
        if diff == 0.0 {
            return 0.0;
        }
        (f(t) - f_lambda) / diff * 2.0 * theta.sin()
    };
    let smooth = integrate_with_breaks(g, &[0.0, theta_lambda, std::f64::consts::PI], q)?.value;
    Ok(smooth + f_lambda * ((2.0 - lambda) / (2.0 + lambda)).ln())
}

/// Comparison of a truncation's spectral weights with the closed-form density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdfReport {
    pub n_dim: usize,
    pub coupling: Perturbation,
    /// `sup_i |Σ_{λ_j ≤ λ_i} w_j − ∫_{−2}^{λ_i} density|` over in-band eigenvalues.
    pub distance: f64,
    /// Eigenvalues outside `[-2, 2]` with their weights.
    pub bound_states: Vec<(f64, f64)>,
    pub bound_state_weight: f64,
    /// `∫_{−2}^{2} density`, accumulated panel by panel.
    pub ac_mass: f64,
}

/// Sup-distance between the empirical spectral CDF of the `n_dim` section and
/// the integrated density, with out-of-band eigenvalues excluded from both sides.
pub fn empirical_cdf_distance(
    p: impl Into<Perturbation>,
    n_dim: usize,
    q: &QuadratureConfig,
) -> Result<CdfReport> {
    let p = p.into();
    let trunc = truncated_spectrum(p, n_dim)?;
    let measure = p.measure();
    let mut cum_weight = 0.0;
    let mut cum_mass = 0.0;
    let mut left = -2.0;
    let mut distance: f64 = 0.0;
    for (&l, &w) in trunc.eigenvalues.iter().zip(&trunc.weights) {
        if l.abs() > 2.0 {
            continue;
        }
        cum_mass += measure.integrate(|_| 1.0, left, l, q)?.value;
        cum_weight += w;
        left = l;
        distance = distance.max((cum_weight - cum_mass).abs());
    }
    cum_mass += measure.integrate(|_| 1.0, left, 2.0, q)?.value;
    let bound_states = trunc.bound_states();
    let bound_state_weight = bound_states.iter().map(|(_, w)| w).sum();
    Ok(CdfReport {
        n_dim,
        coupling: p,
        distance,
        bound_states,
        bound_state_weight,
        ac_mass: cum_mass,
    })
}
