use super::{SamplerKind, Weight};
use crate::error::{domain, Result};
use crate::special::{bose_integral_h, fermi_integral_g, gamma_fn};
use std::collections::BTreeMap;
use std::f64::consts::PI;

fn base_check(dim: usize) -> Result<()> {
    if dim == 0 {
        return domain("dimension must be at least 1");
    }
    Ok(())
}

fn positive_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta.is_finite()) {
        return domain(format!("temperature theta must be positive, got {theta}"));
    }
    Ok(())
}

/// Occupation 1/(e^y + 1) without overflow.
fn fermi_occupation(y: f64) -> f64 {
    if y > 0.0 {
        let e = (-y).exp();
        e / (1.0 + e)
    } else {
        1.0 / (y.exp() + 1.0)
    }
}

/// (2π)^{-D/2} e^{-ξ²/2}.
#[derive(Debug, Clone, Copy, Default)]
pub struct Gaussian;

impl Weight for Gaussian {
    fn name(&self) -> &str {
        "gaussian"
    }
    fn radial(&self, xi: f64, dim: usize) -> f64 {
        (2.0 * PI).powf(-(dim as f64) / 2.0) * (-0.5 * xi * xi).exp()
    }
    fn xi_max(&self) -> f64 {
        f64::INFINITY
    }
    fn moment_analytic(&self, dim: usize, _n: usize) -> Result<f64> {
        base_check(dim)?;
        Ok(1.0)
    }
    fn sampler(&self) -> SamplerKind {
        SamplerKind::Normal
    }
}

/// Unit weight on the unit ball.
#[derive(Debug, Clone, Copy, Default)]
pub struct Legendre;

impl Weight for Legendre {
    fn name(&self) -> &str {
        "legendre"
    }
    fn radial(&self, xi: f64, _dim: usize) -> f64 {
        if xi <= 1.0 {
            1.0
        } else {
            0.0
        }
    }
    fn xi_max(&self) -> f64 {
        1.0
    }
    fn moment_analytic(&self, dim: usize, n: usize) -> Result<f64> {
        base_check(dim)?;
        let (d, n) = (dim as f64, n as f64);
        Ok(
            2f64.powf(1.0 - n) * PI.powf(d / 2.0)
                / ((d + 2.0 * n) * gamma_fn((d + 2.0 * n) / 2.0)?),
        )
    }
    fn sampler(&self) -> SamplerKind {
        SamplerKind::UniformBall
    }
}

/// 1/√(1−ξ²) on the unit ball.
#[derive(Debug, Clone, Copy, Default)]
pub struct Chebyshev1;

impl Weight for Chebyshev1 {
    fn name(&self) -> &str {
        "chebyshev1"
    }
    fn radial(&self, xi: f64, dim: usize) -> f64 {
        self.radial_near_edge(xi, 1.0 - xi, dim)
    }
    fn radial_near_edge(&self, xi: f64, gap: f64, _dim: usize) -> f64 {
        if gap <= 0.0 {
            return 0.0;
        }
        1.0 / (gap * (1.0 + xi)).sqrt()
    }
    fn xi_max(&self) -> f64 {
        1.0
    }
    fn moment_analytic(&self, dim: usize, n: usize) -> Result<f64> {
        base_check(dim)?;
        let (d, n) = (dim as f64, n as f64);
        Ok(2f64.powf(-n) * PI.powf((1.0 + d) / 2.0) / gamma_fn((1.0 + d + 2.0 * n) / 2.0)?)
    }
}

/// √(1−ξ²) on the unit ball.
#[derive(Debug, Clone, Copy, Default)]
pub struct Chebyshev2;

impl Weight for Chebyshev2 {
    fn name(&self) -> &str {
        "chebyshev2"
    }
    fn radial(&self, xi: f64, dim: usize) -> f64 {
        self.radial_near_edge(xi, 1.0 - xi, dim)
    }
    fn radial_near_edge(&self, xi: f64, gap: f64, _dim: usize) -> f64 {
        if gap <= 0.0 {
            return 0.0;
        }
        (gap * (1.0 + xi)).sqrt()
    }
    fn xi_max(&self) -> f64 {
        1.0
    }
    fn moment_analytic(&self, dim: usize, n: usize) -> Result<f64> {
        base_check(dim)?;
        let (d, n) = (dim as f64, n as f64);
        Ok(2f64.powf(-1.0 - n) * PI.powf((1.0 + d) / 2.0) / gamma_fn((3.0 + d + 2.0 * n) / 2.0)?)
    }
    fn sampler(&self) -> SamplerKind {
        SamplerKind::UniformBall
    }
}

/// 1/(z⁻¹e^{ξ²/2θ} + 1).
#[derive(Debug, Clone, Copy)]
pub struct FermiDirac {
    pub theta: f64,
    pub z: f64,
}

impl FermiDirac {
    pub fn new(theta: f64, z: f64) -> Result<Self> {
        positive_theta(theta)?;
        if !(z > 0.0 && z.is_finite()) {
            return domain(format!("fermi_dirac requires fugacity z > 0, got {z}"));
        }
        Ok(FermiDirac { theta, z })
    }
}

impl Weight for FermiDirac {
    fn name(&self) -> &str {
        "fermi_dirac"
    }
    fn params(&self) -> BTreeMap<String, f64> {
        BTreeMap::from([("theta".into(), self.theta), ("z".into(), self.z)])
    }
    fn radial(&self, xi: f64, _dim: usize) -> f64 {
        fermi_occupation(xi * xi / (2.0 * self.theta) - self.z.ln())
    }
    fn xi_max(&self) -> f64 {
        f64::INFINITY
    }
    fn moment_analytic(&self, dim: usize, n: usize) -> Result<f64> {
        base_check(dim)?;
        let nu = n as f64 + dim as f64 / 2.0;
        Ok(
            (2.0 * PI).powf(dim as f64 / 2.0) * self.theta.powf(nu) * fermi_integral_g(nu, self.z)?
                / gamma_fn(nu)?,
        )
    }
    fn breakpoints(&self, _dim: usize) -> Vec<f64> {
        let l = self.z.ln();
        if l > 0.0 {
            vec![(2.0 * self.theta * l).sqrt()]
        } else {
            Vec::new()
        }
    }
    fn length_scale(&self) -> f64 {
        self.theta.sqrt()
    }
}

/// 1/(z⁻¹e^{ξ²/2θ} − 1) with 0 < z < 1.
#[derive(Debug, Clone, Copy)]
pub struct BoseEinstein {
    pub theta: f64,
    pub z: f64,
}

impl BoseEinstein {
    pub fn new(theta: f64, z: f64) -> Result<Self> {
        positive_theta(theta)?;
        if !(z > 0.0 && z < 1.0) {
            return domain(format!(
                "bose_einstein requires fugacity 0 < z < 1, got {z}"
            ));
        }
        Ok(BoseEinstein { theta, z })
    }
}

impl Weight for BoseEinstein {
    fn name(&self) -> &str {
        "bose_einstein"
    }
    fn params(&self) -> BTreeMap<String, f64> {
        BTreeMap::from([("theta".into(), self.theta), ("z".into(), self.z)])
    }
    fn radial(&self, xi: f64, _dim: usize) -> f64 {
        1.0 / (xi * xi / (2.0 * self.theta) - self.z.ln()).exp_m1()
    }
    fn xi_max(&self) -> f64 {
        f64::INFINITY
    }
    fn moment_analytic(&self, dim: usize, n: usize) -> Result<f64> {
        base_check(dim)?;
        let nu = n as f64 + dim as f64 / 2.0;
        Ok(
            (2.0 * PI).powf(dim as f64 / 2.0) * self.theta.powf(nu) * bose_integral_h(nu, self.z)?
                / gamma_fn(nu)?,
        )
    }
    fn length_scale(&self) -> f64 {
        self.theta.sqrt()
    }
}

/// 1/(z⁻¹e^{|ξ|/θ} + 1).
#[derive(Debug, Clone, Copy)]
pub struct Graphene {
    pub theta: f64,
    pub z: f64,
}

impl Graphene {
    pub fn new(theta: f64, z: f64) -> Result<Self> {
        positive_theta(theta)?;
        if !(z > 0.0 && z.is_finite()) {
            return domain(format!("graphene requires fugacity z > 0, got {z}"));
        }
        Ok(Graphene { theta, z })
    }

    /// Second-order expansion of I₂N about z = 1.
    pub fn moment_series_near_one(&self, dim: usize, n: usize) -> Result<f64> {
        base_check(dim)?;
        crate::moments::graphene_moment_series(self.theta, self.z, dim, n)
    }
}

impl Weight for Graphene {
    fn name(&self) -> &str {
        "graphene"
    }
    fn params(&self) -> BTreeMap<String, f64> {
        BTreeMap::from([("theta".into(), self.theta), ("z".into(), self.z)])
    }
    fn radial(&self, xi: f64, _dim: usize) -> f64 {
        fermi_occupation(xi / self.theta - self.z.ln())
    }
    fn xi_max(&self) -> f64 {
        f64::INFINITY
    }
    fn moment_analytic(&self, dim: usize, n: usize) -> Result<f64> {
        base_check(dim)?;
        let (d, nf) = (dim as f64, n as f64);
        let s = d + 2.0 * nf;
        Ok(2f64.powf(d + nf)
            * PI.powf((d - 1.0) / 2.0)
            * self.theta.powf(s)
            * gamma_fn((1.0 + d) / 2.0 + nf)?
            * fermi_integral_g(s, self.z)?
            / gamma_fn(s)?)
    }
    fn breakpoints(&self, _dim: usize) -> Vec<f64> {
        let l = self.z.ln();
        if l > 0.0 {
            vec![self.theta * l]
        } else {
            Vec::new()
        }
    }
    fn length_scale(&self) -> f64 {
        self.theta
    }
}

/// e^{−μξ}/ξ, defined for D ≥ 2.
#[derive(Debug, Clone, Copy)]
pub struct Yukawa {
    pub mu: f64,
}

impl Yukawa {
    pub fn new(mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return domain(format!("yukawa requires mu > 0, got {mu}"));
        }
        Ok(Yukawa { mu })
    }
}

impl Weight for Yukawa {
    fn name(&self) -> &str {
        "yukawa"
    }
    fn params(&self) -> BTreeMap<String, f64> {
        BTreeMap::from([("mu".into(), self.mu)])
    }
    fn radial(&self, xi: f64, _dim: usize) -> f64 {
        (-self.mu * xi).exp() / xi
    }
    fn xi_max(&self) -> f64 {
        f64::INFINITY
    }
    fn validate(&self, dim: usize) -> Result<()> {
        if dim < 2 {
            return domain(format!(
                "yukawa weight requires D >= 2 (I0 diverges for D = {dim})"
            ));
        }
        Ok(())
    }
    fn moment_analytic(&self, dim: usize, n: usize) -> Result<f64> {
        self.validate(dim)?;
        let (d, nf) = (dim as f64, n as f64);
        Ok(
            PI.powf(d / 2.0) / 2f64.powf(nf - 1.0) * gamma_fn(2.0 * nf + d - 1.0)?
                / gamma_fn(nf + d / 2.0)?
                / self.mu.powf(2.0 * nf + d - 1.0),
        )
    }
    fn length_scale(&self) -> f64 {
        1.0 / self.mu
    }
}
