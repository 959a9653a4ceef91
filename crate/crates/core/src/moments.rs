//! Moment integrals I₂N = ∫ d^Dξ ω(ξ) ξ_{i₁}…ξ_{i₂N} / δ_{i₁…i₂N}.
//!
//! The radial reduction used by the quadrature path is
//! I₂N = π^{D/2} / (2^{N−1} Γ(N + D/2)) · ∫₀^{ξmax} ω(ξ) ξ^{2N+D−1} dξ.

use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate_radial, QuadOptions, QuadResult};
use crate::special::{dirichlet_eta, gamma_fn};
use crate::weights::{Weight, WeightSpec};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentSource {
    Analytic,
    Quadrature,
}

/// I₀, I₂, …, I₂N_max for one weight and dimension. Odd moments vanish and
/// are not stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentTable {
    #[serde(rename = "D")]
    pub dim: usize,
    pub values: Vec<f64>,
    pub source: MomentSource,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub weight: Option<WeightSpec>,
}

impl MomentTable {
    /// Wraps precomputed moments; every value must be positive and at least
    /// I₀..I₈ must be present.
    pub fn from_values(dim: usize, values: Vec<f64>, source: MomentSource) -> Result<Self> {
        if dim == 0 {
            return domain("dimension must be at least 1");
        }
        if values.len() < 5 {
            return domain(format!(
                "a moment table needs I0..I8 (5 values), got {}",
                values.len()
            ));
        }
        if let Some((k, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v > 0.0 && v.is_finite()))
        {
            return domain(format!(
                "moment I{} must be positive and finite, got {v}",
                2 * k
            ));
        }
        Ok(MomentTable {
            dim,
            values,
            source,
            weight: None,
        })
    }

    /// I₂ₙ.
    pub fn i2n(&self, n: usize) -> Result<f64> {
        self.values.get(n).copied().ok_or_else(|| {
            Error::Range(format!(
                "moment I{} requested but the table stops at I{}",
                2 * n,
                2 * (self.values.len() - 1)
            ))
        })
    }

    /// Largest available order of the even moments, i.e. the table holds I₀..I₂·max.
    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    /// Same table with every moment multiplied by `lambda`.
    pub fn scaled(&self, lambda: f64) -> Self {
        MomentTable {
            values: self.values.iter().map(|v| v * lambda).collect(),
            ..self.clone()
        }
    }
}

fn radial_prefactor(dim: usize, n: usize) -> Result<f64> {
    let d = dim as f64;
    Ok(PI.powf(d / 2.0) / (2f64.powi(n as i32 - 1) * gamma_fn(n as f64 + d / 2.0)?))
}

/// Closed-form I₂N of a built-in family.
pub fn moment_analytic(w: &dyn Weight, dim: usize, n: usize) -> Result<f64> {
    w.validate(dim)?;
    let v = w.moment_analytic(dim, n)?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::Consistency(format!(
            "closed-form I{} for '{}' is not positive: {v}",
            2 * n,
            w.name()
        )));
    }
    Ok(v)
}

/// Quadrature of the radial moment integral with its error report.
pub fn moment_quadrature_detailed(
    w: &dyn Weight,
    dim: usize,
    n: usize,
    opts: &QuadOptions,
) -> Result<QuadResult> {
    w.validate(dim)?;
    let power = (2 * n + dim - 1) as i32;
    let integrand = |xi: f64, gap: f64| {
        let omega = if gap.is_finite() {
            w.radial_near_edge(xi, gap, dim)
        } else {
            w.radial(xi, dim)
        };
        omega * xi.powi(power)
    };
    let r = integrate_radial(
        integrand,
        w.xi_max(),
        &w.breakpoints(dim),
        w.length_scale(),
        opts,
    )?;
    let pre = radial_prefactor(dim, n)?;
    Ok(QuadResult {
        value: pre * r.value,
        error_estimate: pre * r.error_estimate,
        evals: r.evals,
    })
}

pub fn moment_quadrature(w: &dyn Weight, dim: usize, n: usize, rel_tol: f64) -> Result<f64> {
    if !(rel_tol > 0.0) {
        return domain(format!("rel_tol must be positive, got {rel_tol}"));
    }
    let v = moment_quadrature_detailed(w, dim, n, &QuadOptions::with_rel_tol(rel_tol))?.value;
    if !(v > 0.0) {
        return Err(Error::Consistency(format!(
            "quadrature I{} for '{}' is not positive: {v}",
            2 * n,
            w.name()
        )));
    }
    Ok(v)
}

/// I₀..I₂N_max, analytic when the family has closed forms.
pub fn build_moment_table(w: &dyn Weight, dim: usize, n_max: usize) -> Result<MomentTable> {
    if n_max < 4 {
        return domain(format!("moment tables need N_max >= 4, got {n_max}"));
    }
    w.validate(dim)?;
    let (values, source) = if w.has_analytic_moments() {
        let v = (0..=n_max)
            .map(|n| moment_analytic(w, dim, n))
            .collect::<Result<Vec<_>>>()?;
        (v, MomentSource::Analytic)
    } else {
        let v = (0..=n_max)
            .map(|n| moment_quadrature(w, dim, n, QuadOptions::default().rel_tol))
            .collect::<Result<Vec<_>>>()?;
        (v, MomentSource::Quadrature)
    };
    let mut table = MomentTable::from_values(dim, values, source)?;
    table.weight = Some(w.spec());
    Ok(table)
}

/// Expansion of the graphene I₂N to second order in (z − 1).
pub fn graphene_moment_series(theta: f64, z: f64, dim: usize, n: usize) -> Result<f64> {
    if !(theta > 0.0) {
        return domain(format!("temperature theta must be positive, got {theta}"));
    }
    let (d, nf) = (dim as f64, n as f64);
    let s = d + 2.0 * nf;
    let pre = 2f64.powf(d + nf)
        * PI.powf((d - 1.0) / 2.0)
        * theta.powf(s)
        * gamma_fn((1.0 + d) / 2.0 + nf)?;
    let e0 = dirichlet_eta(s)?;
    let e1 = dirichlet_eta(s - 1.0)?;
    let e2 = dirichlet_eta(s - 2.0)?;
    let dz = z - 1.0;
    Ok(pre * (e0 + e1 * dz + 0.5 * (e2 - e1) * dz * dz))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{Chebyshev1, Chebyshev2, FermiDirac, Gaussian, Legendre, Yukawa};
    use approx::assert_relative_eq;

    #[test]
    fn gaussian_table() {
        let t = build_moment_table(&Gaussian, 4, 4).unwrap();
        assert_eq!(t.values, vec![1.0; 5]);
        assert_eq!(t.source, MomentSource::Analytic);
    }

    #[test]
    fn legendre_d1_table() {
        let t = build_moment_table(&Legendre, 1, 4).unwrap();
        // ∫x^{2N}dx divided by δ_{1…1} = (2N−1)!!
        let expected = [2.0, 2.0 / 3.0, 2.0 / 15.0, 2.0 / 105.0, 2.0 / 945.0];
        for (v, e) in t.values.iter().zip(expected) {
            assert_relative_eq!(*v, e, max_relative = 1e-14);
        }
    }

    #[test]
    fn chebyshev2_d1_table() {
        let t = build_moment_table(&Chebyshev2, 1, 4).unwrap();
        let expected = [PI / 2.0, PI / 8.0, PI / 48.0, PI / 384.0, PI / 3840.0];
        for (v, e) in t.values.iter().zip(expected) {
            assert_relative_eq!(*v, e, max_relative = 1e-14);
        }
    }

    #[test]
    fn quadrature_examples() {
        assert_relative_eq!(
            moment_quadrature(&Gaussian, 2, 1, 1e-10).unwrap(),
            1.0,
            max_relative = 1e-10
        );
        assert_relative_eq!(
            moment_quadrature(&Legendre, 3, 1, 1e-10).unwrap(),
            4.0 * PI / 15.0,
            max_relative = 1e-10
        );
        assert_relative_eq!(
            moment_quadrature(&Chebyshev1, 1, 0, 1e-10).unwrap(),
            PI,
            max_relative = 1e-10
        );
        let fd = FermiDirac::new(1.0, 0.5).unwrap();
        assert_relative_eq!(
            moment_quadrature(&fd, 2, 0, 1e-8).unwrap(),
            moment_analytic(&fd, 2, 0).unwrap(),
            max_relative = 1e-8
        );
    }

    #[test]
    fn yukawa_exponent_follows_quadrature() {
        let y = Yukawa::new(2.0).unwrap();
        let q = moment_quadrature(&y, 3, 1, 1e-12).unwrap();
        assert_relative_eq!(moment_analytic(&y, 3, 1).unwrap(), q, max_relative = 1e-10);
        assert!(build_moment_table(&y, 1, 4).is_err());
    }

    #[test]
    fn table_rejects_bad_values() {
        assert!(
            MomentTable::from_values(2, vec![1.0, 1.0, 0.0, 1.0, 1.0], MomentSource::Analytic)
                .is_err()
        );
        assert!(MomentTable::from_values(2, vec![1.0; 4], MomentSource::Analytic).is_err());
        let t = MomentTable::from_values(2, vec![1.0; 5], MomentSource::Analytic).unwrap();
        assert!(matches!(t.i2n(5), Err(Error::Range(_))));
    }
}
