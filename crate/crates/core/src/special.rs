//! Gamma, zeta and the Fermi-Dirac / Bose-Einstein integrals.
//!
//! `g_ν` and `h_ν` are the unnormalized integrals
//! `∫₀^∞ x^{ν-1} / (z⁻¹eˣ ± 1) dx`, i.e. `Γ(ν)` times the polylogarithm form.

use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate_radial, QuadOptions, QuadResult};
use std::f64::consts::{LN_2, PI};

/// Γ(x) for x > 0.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("gamma_fn requires x > 0, got {x}"));
    }
    Ok(statrs::function::gamma::gamma(x))
}

/// Γ(x) on the whole real line away from the poles.
pub(crate) fn gamma_signed(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

// B_{2j} for j = 1..12
const BERNOULLI_EVEN: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

fn zeta_euler_maclaurin(s: f64) -> f64 {
    const N: usize = 20;
    let n = N as f64;
    let mut sum: f64 = (1..N).map(|k| (k as f64).powf(-s)).sum();
    sum += n.powf(1.0 - s) / (s - 1.0);
    sum += 0.5 * n.powf(-s);
    // rising factorial s(s+1)…(s+2j-2)
    let mut rising = s;
    let mut npow = n.powf(-s - 1.0);
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        if j > 0 {
            let m = (2 * j) as f64;
            rising *= (s + m - 1.0) * (s + m);
            npow /= n * n;
        }
        sum += b / factorial((2 * j + 2) as u32) * rising * npow;
    }
    sum
}

pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Riemann ζ(s) for real s ≠ 1, with the reflection formula for s < 0.
pub fn riemann_zeta(s: f64) -> Result<f64> {
    if s == 1.0 {
        return domain("riemann_zeta has a pole at s = 1");
    }
    if s.is_nan() {
        return domain("riemann_zeta argument is NaN");
    }
    if s >= 0.0 {
        if s > 60.0 {
            return Ok(1.0 + 2f64.powf(-s) + 3f64.powf(-s));
        }
        return Ok(zeta_euler_maclaurin(s));
    }
    // trivial zeros
    if s == s.round() && (s as i64) % 2 == 0 {
        return Ok(0.0);
    }
    let t = 1.0 - s;
    let refl = 2f64.powf(s) * PI.powf(s - 1.0) * (0.5 * PI * s).sin() * gamma_signed(t);
    Ok(refl * riemann_zeta(t)?)
}

/// Dirichlet η(s) = (1 − 2^{1−s}) ζ(s), continuous through s = 1.
pub fn dirichlet_eta(s: f64) -> Result<f64> {
    if s == 1.0 {
        return Ok(LN_2);
    }
    Ok(-(((1.0 - s) * LN_2).exp_m1()) * riemann_zeta(s)?)
}

const SERIES_Z_MAX: f64 = 0.5;

fn fermi_bose_series(nu: f64, z: f64, sign: f64) -> f64 {
    // Σ (sign)^{k+1} z^k / k^ν
    let mut sum = 0.0;
    let mut zk = 1.0;
    for k in 1..400 {
        zk *= z;
        let term = zk / (k as f64).powf(nu);
        let signed = if k % 2 == 1 { term } else { sign * term };
        sum += signed;
        if term < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

fn internal_opts() -> QuadOptions {
    QuadOptions {
        rel_tol: 1e-13,
        abs_tol: 0.0,
        max_evals: 1_000_000,
    }
}

/// Quadrature of the defining Fermi-Dirac integral; used as the large-z path
/// and as an independent check of the series.
pub fn fermi_integral_g_quadrature(nu: f64, z: f64, opts: &QuadOptions) -> Result<QuadResult> {
    if !(nu > 0.0) {
        return domain(format!("fermi_integral_g requires nu > 0, got {nu}"));
    }
    if !(z > 0.0) || !z.is_finite() {
        return domain(format!("fermi_integral_g requires z > 0, got {z}"));
    }
    let ln_z = z.ln();
    let integrand = |x: f64, _gap: f64| {
        let y = x - ln_z;
        let occ = if y > 0.0 {
            let e = (-y).exp();
            e / (1.0 + e)
        } else {
            1.0 / (y.exp() + 1.0)
        };
        x.powf(nu - 1.0) * occ
    };
    let breaks: Vec<f64> = if ln_z > 1.0 {
        vec![1.0, ln_z]
    } else {
        vec![1.0]
    };
    integrate_radial(integrand, f64::INFINITY, &breaks, 1.0, opts)
}

/// g_ν(z) = ∫₀^∞ x^{ν−1}/(z⁻¹eˣ + 1) dx.
pub fn fermi_integral_g(nu: f64, z: f64) -> Result<f64> {
    if !(nu > 0.0) {
        return domain(format!("fermi_integral_g requires nu > 0, got {nu}"));
    }
    if !(z > 0.0) || !z.is_finite() {
        return domain(format!("fermi_integral_g requires z > 0, got {z}"));
    }
    if z <= SERIES_Z_MAX {
        return Ok(gamma_fn(nu)? * fermi_bose_series(nu, z, -1.0));
    }
    Ok(fermi_integral_g_quadrature(nu, z, &internal_opts())?.value)
}

/// Truncated Sommerfeld expansion of g_ν through the (ln z)⁻⁴ correction.
pub fn sommerfeld_g(nu: f64, ln_z: f64) -> Result<f64> {
    if !(ln_z > 0.0) {
        return domain(format!("sommerfeld_g requires ln_z > 0, got {ln_z}"));
    }
    let l2 = ln_z * ln_z;
    let p2 = nu * (nu - 1.0);
    let p4 = p2 * (nu - 2.0) * (nu - 3.0);
    let bracket = 1.0 + p2 * PI * PI / (6.0 * l2) + p4 * 7.0 * PI.powi(4) / (360.0 * l2 * l2);
    Ok(ln_z.powf(nu) / nu * bracket)
}

fn check_bose(nu: f64, z: f64) -> Result<()> {
    if !(nu > 0.0) {
        return domain(format!("bose_integral_h requires nu > 0, got {nu}"));
    }
    if !(z > 0.0 && z < 1.0) {
        return domain(format!("bose_integral_h requires 0 < z < 1, got {z}"));
    }
    Ok(())
}

/// Quadrature of the defining Bose-Einstein integral.
pub fn bose_integral_h_quadrature(nu: f64, z: f64, opts: &QuadOptions) -> Result<QuadResult> {
    check_bose(nu, z)?;
    let alpha = -z.ln();
    let integrand = |x: f64, _gap: f64| x.powf(nu - 1.0) / (x + alpha).exp_m1();
    integrate_radial(integrand, f64::INFINITY, &[1.0], 1.0, opts)
}

const ALPHA_TERMS: usize = 20;
const INTEGER_NU_TOL: f64 = 1e-9;

/// Polylogarithm Li_ν(e^{−α}) from its expansion in powers of α.
fn polylog_alpha_expansion(nu: f64, alpha: f64) -> Result<f64> {
    let m = nu.round();
    let mut sum = 0.0;
    let mut term = 1.0; // (−α)^i / i!
    if (nu - m).abs() < INTEGER_NU_TOL && m >= 1.0 {
        let m = m as usize;
        for i in 0..=ALPHA_TERMS {
            if i > 0 {
                term *= -alpha / i as f64;
            }
            if i + 1 == m {
                let harmonic: f64 = (1..m).map(|k| 1.0 / k as f64).sum();
                sum += term * (harmonic - alpha.ln());
            } else {
                sum += riemann_zeta(m as f64 - i as f64)? * term;
            }
        }
        if m > ALPHA_TERMS + 1 {
            return Err(Error::Unsupported(format!(
                "integer order {m} beyond the α-expansion length"
            )));
        }
        return Ok(sum);
    }
    sum += gamma_signed(1.0 - nu) * alpha.powf(nu - 1.0);
    for i in 0..=ALPHA_TERMS {
        if i > 0 {
            term *= -alpha / i as f64;
        }
        sum += riemann_zeta(nu - i as f64)? * term;
    }
    Ok(sum)
}

/// h_ν(z) = ∫₀^∞ x^{ν−1}/(z⁻¹eˣ − 1) dx for 0 < z < 1.
pub fn bose_integral_h(nu: f64, z: f64) -> Result<f64> {
    check_bose(nu, z)?;
    let g = gamma_fn(nu)?;
    if z <= SERIES_Z_MAX {
        return Ok(g * fermi_bose_series(nu, z, 1.0));
    }
    Ok(g * polylog_alpha_expansion(nu, -z.ln())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gamma_values() {
        assert_relative_eq!(gamma_fn(1.0).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(gamma_fn(0.5).unwrap(), PI.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(
            gamma_fn(2.5).unwrap(),
            0.75 * PI.sqrt(),
            max_relative = 1e-13
        );
        assert!(gamma_fn(0.0).is_err());
        assert!(gamma_fn(-1.5).is_err());
    }

    #[test]
    fn zeta_values() {
        assert_relative_eq!(
            riemann_zeta(2.0).unwrap(),
            PI * PI / 6.0,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            riemann_zeta(4.0).unwrap(),
            PI.powi(4) / 90.0,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            riemann_zeta(3.0).unwrap(),
            1.202_056_903_159_594,
            max_relative = 1e-13
        );
        assert_relative_eq!(riemann_zeta(0.0).unwrap(), -0.5, max_relative = 1e-13);
        assert_relative_eq!(
            riemann_zeta(-1.0).unwrap(),
            -1.0 / 12.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            riemann_zeta(-3.0).unwrap(),
            1.0 / 120.0,
            max_relative = 1e-12
        );
        assert_eq!(riemann_zeta(-4.0).unwrap(), 0.0);
        assert_relative_eq!(
            riemann_zeta(0.5).unwrap(),
            -1.460_354_508_809_586_8,
            max_relative = 1e-12
        );
        assert!(riemann_zeta(1.0).is_err());
    }

    #[test]
    fn eta_is_continuous_at_one() {
        let left = dirichlet_eta(1.0 - 1e-6).unwrap();
        assert!((left - LN_2).abs() < 1e-6);
    }

    #[test]
    fn fermi_small_z() {
        let g = fermi_integral_g(2.0, 0.01).unwrap();
        assert_relative_eq!(
            g,
            0.01 - 1e-4 / 4.0 + 1e-6 / 9.0 - 1e-8 / 16.0,
            max_relative = 1e-9
        );
    }

    #[test]
    fn fermi_ln2() {
        assert_relative_eq!(
            fermi_integral_g(1.0, 1.0).unwrap(),
            LN_2,
            max_relative = 1e-12
        );
    }

    #[test]
    fn sommerfeld_nu_one_is_exact() {
        assert_eq!(sommerfeld_g(1.0, 10.0).unwrap(), 10.0);
        assert!(sommerfeld_g(2.0, 0.0).is_err());
    }

    #[test]
    fn bose_small_z() {
        let h = bose_integral_h(2.0, 0.01).unwrap();
        assert_relative_eq!(h, 0.010025, max_relative = 2e-5);
        assert!(bose_integral_h(2.0, 1.0).is_err());
        assert!(bose_integral_h(2.0, 0.0).is_err());
    }

    #[test]
    fn bose_alpha_branches_match_quadrature() {
        for &(nu, z) in &[
            (2.0, (-0.1f64).exp()),
            (1.5, 0.9),
            (2.5, 0.7),
            (1.0, 0.8),
            (3.0, 0.95),
        ] {
            let a = bose_integral_h(nu, z).unwrap();
            let q = bose_integral_h_quadrature(nu, z, &internal_opts())
                .unwrap()
                .value;
            assert_relative_eq!(a, q, max_relative = 1e-10);
        }
    }
}
