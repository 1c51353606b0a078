//! Scattering coefficient for the pair `(H_0, H_k^(β))` on the band.
//!
//! The fibre of the free operator's spectral representation is one-dimensional,
//! so the scattering matrix is the scalar
//! `S = 1 − 2βi √(1 − λ²/4) U_k²(λ/2) / D_k(λ + i0)`, which equals
//! `conj(D_k(λ + i0)) / D_k(λ + i0)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::chebyshev::u_pair;
use crate::error::{ensure_finite, Error, Result};
use crate::format::sig17;
use crate::perturbed_basis::Coupling;
use crate::resolvent::{band_root, d_boundary, Side};
use crate::ComplexValue;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatterValue {
    pub s: ComplexValue,
    /// Principal argument of `s`, in `(−π, π]`.
    pub phase: f64,
    pub lambda: f64,
    pub coupling: Coupling,
}

fn principal_arg(z: ComplexValue) -> f64 {
    let p = z.im.atan2(z.re);
    if p <= -PI {
        PI
    } else {
        p
    }
}

pub fn s_value(c: Coupling, lambda: f64) -> Result<ScatterValue> {
    ensure_finite("lambda", lambda)?;
    if lambda.abs() >= 2.0 {
        return Err(Error::domain(format!(
            "scattering coefficient is defined on the open band (-2, 2), got lambda = {lambda}"
        )));
    }
    let d = d_boundary(c, lambda, Side::Upper).d;
    let (uk, _) = u_pair(c.k, lambda);
    let kernel = 2.0 * c.beta * band_root(lambda) * uk * uk;
    let s = ComplexValue::new(1.0, 0.0) - ComplexValue::new(0.0, kernel) / d;
    Ok(ScatterValue {
        s,
        phase: principal_arg(s),
        lambda,
        coupling: c,
    })
}

/// Scattering coefficients and phases on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseTable {
    pub coupling: Coupling,
    pub grid: Vec<f64>,
    pub s: Vec<ComplexValue>,
    pub phase: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_unwrapped: Option<Vec<f64>>,
}

impl PhaseTable {
    pub fn from_values(c: Coupling, values: Vec<ScatterValue>, unwrap: bool) -> Self {
        let grid = values.iter().map(|v| v.lambda).collect();
        let s = values.iter().map(|v| v.s).collect();
        let phase: Vec<f64> = values.iter().map(|v| v.phase).collect();
        let phase_unwrapped = unwrap.then(|| unwrap_phase(&phase));
        Self {
            coupling: c,
            grid,
            s,
            phase,
            phase_unwrapped,
        }
    }

    /// `lambda,re_s,im_s,phase[,phase_unwrapped]` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,re_s,im_s,phase");
        if self.phase_unwrapped.is_some() {
            out.push_str(",phase_unwrapped");
        }
        out.push('\n');
        for i in 0..self.grid.len() {
            let mut cols = vec![
                sig17(self.grid[i]),
                sig17(self.s[i].re),
                sig17(self.s[i].im),
                sig17(self.phase[i]),
            ];
            if let Some(u) = &self.phase_unwrapped {
                cols.push(sig17(u[i]));
            }
            out.push_str(&cols.join(","));
            out.push('\n');
        }
        out
    }
}

/// Continues the phase across the grid by choosing the branch nearest the previous sample.
pub fn unwrap_phase(phase: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(phase.len());
    let mut offset = 0.0;
    let mut prev: Option<f64> = None;
    for &p in phase {
        if let Some(q) = prev {
            let jump = p + offset - q;
            offset -= 2.0 * PI * (jump / (2.0 * PI)).round();
        }
        let v = p + offset;
        out.push(v);
        prev = Some(v);
    }
    out
}

pub fn phase_table(c: Coupling, grid: &[f64], unwrap: bool) -> Result<PhaseTable> {
    let values = grid
        .iter()
        .map(|&l| {
            s_value(c, l).map_err(|_| {
                Error::domain(format!("grid point {l} lies outside the open band (-2, 2)"))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PhaseTable::from_values(c, values, unwrap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn cpl(k: usize, beta: f64) -> Coupling {
        Coupling::new(k, beta).unwrap()
    }

    #[test]
    fn zero_coupling_is_identity() {
        for l in [-1.9, 0.0, 1.2] {
            let v = s_value(cpl(3, 0.0), l).unwrap();
            assert_eq!(v.s, ComplexValue::new(1.0, 0.0));
            assert_eq!(v.phase, 0.0);
        }
    }

    #[test]
    fn transparent_at_zero_of_u() {
        for beta in [-2.0, 0.3, 5.0] {
            let v = s_value(cpl(1, beta), 0.0).unwrap();
            assert_eq!(v.s, ComplexValue::new(1.0, 0.0));
        }
    }

    #[test]
    fn hand_value_site_zero() {
        let v = s_value(cpl(0, 1.0), 0.0).unwrap();
        assert!((v.s - ComplexValue::new(0.0, -1.0)).norm() <= 1e-14);
        assert_relative_eq!(v.phase, -FRAC_PI_2, max_relative = 1e-14);
    }

    #[test]
    fn rejects_outside_band() {
        for l in [-2.0, 2.0, 2.5] {
            assert!(s_value(cpl(0, 1.0), l).is_err());
        }
        let err = phase_table(cpl(0, 1.0), &[0.0, 2.0], false).unwrap_err();
        assert!(err.to_string().contains("grid point 2"));
    }

    #[test]
    fn table_phases() {
        let t = phase_table(cpl(0, 0.0), &[-1.0, 0.0, 1.0], true).unwrap();
        assert!(t.phase.iter().all(|&p| p == 0.0));
        let t = phase_table(cpl(0, 1.0), &[0.0], false).unwrap();
        assert_relative_eq!(t.phase[0], -FRAC_PI_2, max_relative = 1e-14);
        assert!(t.to_csv().starts_with("lambda,re_s,im_s,phase\n"));
    }

    #[test]
    fn unwrap_removes_jumps() {
        let raw = [3.0, -3.1, 3.05, -3.0];
        let u = unwrap_phase(&raw);
        for w in u.windows(2) {
            assert!((w[1] - w[0]).abs() < PI);
        }
        assert_eq!(u[0], 3.0);
    }

    #[test]
    fn principal_branch() {
        assert_eq!(principal_arg(ComplexValue::new(-1.0, -0.0)), PI);
        assert_eq!(principal_arg(ComplexValue::new(-1.0, 0.0)), PI);
    }

    proptest! {
        #[test]
        fn unimodular_and_conjugate_ratio(k in 0usize..=10, beta in -3.0f64..3.0, lambda in -1.999_999f64..1.999_999) {
            let c = cpl(k, beta);
            let v = s_value(c, lambda).unwrap();
            prop_assert!((v.s.norm() - 1.0).abs() <= 1e-12);
            let d = d_boundary(c, lambda, Side::Upper).d;
            prop_assert!((v.s * d - d.conj()).norm() <= 1e-12);
        }
    }
}
