//! Expansion of a shifted function f(ξ−u) in the polynomials orthonormal
//! under ω = f, and the orthonormal multipoles of point-charge distributions.

use crate::error::{domain, Error, Result};
use crate::polynomials::{PolynomialFamily, MAX_ORDER};
use crate::tensor::{all_tuples, integrate_poly, SymTensor};
use crate::weights::Weight;
use serde::{Deserialize, Serialize};

/// 𝒜₀(u)..𝒜₄(u) for a fixed displacement u.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionCoefficients {
    pub u: Vec<f64>,
    pub tensors: Vec<SymTensor>,
}

impl ExpansionCoefficients {
    pub fn order(&self, n: usize) -> &SymTensor {
        &self.tensors[n]
    }
}

fn kd(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_point(fam: &PolynomialFamily, v: &[f64], what: &str) -> Result<()> {
    if v.len() != fam.dim {
        return domain(format!(
            "{what} has {} components but D = {}",
            v.len(),
            fam.dim
        ));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return domain(format!("{what} has non-finite components"));
    }
    Ok(())
}

fn family_weight(fam: &PolynomialFamily) -> Result<&dyn Weight> {
    fam.weight
        .as_deref()
        .ok_or_else(|| Error::Unsupported("expansion needs a family built from a weight".into()))
}

/// One component of 𝒜_N(u), indices 1-based.
fn amplitude(fam: &PolynomialFamily, u: &[f64], idx: &[usize]) -> f64 {
    let s = &fam.coeffs;
    let i = &fam.table.values;
    let (i0, i2) = (i[0], i[1]);
    let (j2, j4) = (s.intermediates.j[0], s.intermediates.j[1]);
    let d = fam.dim as f64;
    let u2 = dot(u, u);
    let uc = |k: usize| u[idx[k] - 1];
    let dl = |a: usize, b: usize| kd(idx[a], idx[b]);
    match idx.len() {
        0 => i0 * s.c[0],
        1 => i0 * s.c[1] * uc(0),
        2 => i0 * (s.c[2] * uc(0) * uc(1) + s.cb(2) * u2 * dl(0, 1)),
        3 => {
            let sym = uc(0) * dl(1, 2) + uc(1) * dl(0, 2) + uc(2) * dl(0, 1);
            i0 * (s.c[3] * uc(0) * uc(1) * uc(2) + (s.cp(3) * (1.0 - j2) + s.cb(3) * u2) * sym)
        }
        _ => {
            let full = dl(0, 1) * dl(2, 3) + dl(0, 2) * dl(1, 3) + dl(0, 3) * dl(1, 2);
            let six = uc(0) * uc(1) * dl(2, 3)
                + uc(0) * uc(2) * dl(1, 3)
                + uc(0) * uc(3) * dl(1, 2)
                + uc(1) * uc(2) * dl(0, 3)
                + uc(1) * uc(3) * dl(0, 2)
                + uc(2) * uc(3) * dl(0, 1);
            let radial = (2.0 * i2 / i0 * (s.cb(4) + (d + 2.0) * s.d4_bar) + s.d4_prime) * u2
                + s.d4_bar * u2 * u2;
            i0 * (s.c[4] * uc(0) * uc(1) * uc(2) * uc(3)
                + ((1.0 - j2 * j4) * s.cp(4) + s.cb(4) * u2) * six
                + radial * full)
        }
    }
}

/// 𝒜₀..𝒜₄ from their closed forms.
pub fn expansion_coefficients(fam: &PolynomialFamily, u: &[f64]) -> Result<ExpansionCoefficients> {
    check_point(fam, u, "displacement")?;
    let tensors = (0..=MAX_ORDER)
        .map(|n| SymTensor::from_fn(fam.dim, n, |idx| amplitude(fam, u, idx)))
        .collect();
    Ok(ExpansionCoefficients {
        u: u.to_vec(),
        tensors,
    })
}

/// 𝒜_N[idx] = ∫ω(η)𝒫_N[idx](η+u) dη through exact moment reduction.
pub fn expansion_coefficients_projected(
    fam: &PolynomialFamily,
    u: &[f64],
) -> Result<ExpansionCoefficients> {
    check_point(fam, u, "displacement")?;
    let mut tensors = Vec::with_capacity(MAX_ORDER + 1);
    for n in 0..=MAX_ORDER {
        let mut t = SymTensor::zeros(fam.dim, n);
        let keys: Vec<Vec<usize>> = t.iter().map(|(k, _)| k.to_vec()).collect();
        for idx in keys {
            let p = fam.as_multivar_poly(n, &idx)?.shifted(u);
            t.set(&idx, integrate_poly(&fam.table, &p)?);
        }
        tensors.push(t);
    }
    Ok(ExpansionCoefficients {
        u: u.to_vec(),
        tensors,
    })
}

/// 𝒜_N·𝒫_N(ξ) for one order, by both routes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contraction {
    pub order: usize,
    pub closed_form: f64,
    pub brute_force: f64,
    /// The scalar exactly as printed, which carries a sign slip at N = 2
    /// and (ξ·u)² in place of (ξ·u)⁴ at N = 4.
    pub printed_literal: f64,
    pub literal_deviation: f64,
}

struct Scalars {
    i: [f64; 5],
    d: f64,
    xu: f64,
    u2: f64,
    x2: f64,
}

fn scalars(fam: &PolynomialFamily, u: &[f64], xi: &[f64]) -> Scalars {
    let v = &fam.table.values;
    Scalars {
        i: [v[0], v[1], v[2], v[3], v[4]],
        d: fam.dim as f64,
        xu: dot(xi, u),
        u2: dot(u, u),
        x2: dot(xi, xi),
    }
}

/// Closed-form 𝒜·𝒫 for N = 0..4; `literal` selects the printed variants.
fn contraction_closed(fam: &PolynomialFamily, sc: &Scalars, literal: bool) -> [f64; 5] {
    let s = &fam.coeffs;
    let Scalars { i, d, xu, u2, x2 } = *sc;
    let [i0, i2, i4, i6, _] = i;
    let (j2, j4) = (s.intermediates.j[0], s.intermediates.j[1]);
    let dl2 = s.intermediates.delta_cap[0].powi(2);
    let dl4 = s.intermediates.delta_cap[1].powi(2);

    let sign2 = if literal { -1.0 } else { 1.0 };
    let r2 = i0 / i4 * xu * xu + sign2 * i0 * (dl2 - 1.0) / (i4 * d) * u2 * x2 - i2 / i4 * dl2 * u2;

    let r3 = i0
        * xu
        * (3.0 * (1.0 - j2) * j4 / i2 * (d + 2.0) * dl4
            - 3.0 * j4 / i4 * dl4 * u2
            - 3.0 * (1.0 - j2) * j4 / i4 * dl4 * x2
            + 3.0 * (dl4 - 1.0) / (i6 * (d + 2.0)) * x2 * u2
            + xu * xu / i6);

    let (c4, cb4, cp4) = (s.c[4], s.cb(4), s.cp(4));
    let (d4, dp4, db4) = (s.d4, s.d4_prime, s.d4_bar);
    let g = d4 + dp4 * x2 + db4 * x2 * x2;
    let f = cp4 + cb4 * x2;
    let lead = if literal { xu * xu } else { xu.powi(4) };
    let r4 = i0
        * (c4 * c4 * lead
            + 6.0 * c4 * (cp4 + cb4 * x2) * u2 * xu * xu
            + 3.0 * c4 * u2 * u2 * g
            + 6.0
                * (i2 / i0 * (c4 + cb4 * (d + 4.0)) + cp4 + cb4 * u2)
                * (c4 * x2 * xu * xu + f * (x2 * u2 + xu * xu * (d + 4.0)) + g * u2 * (d + 2.0))
            + 3.0
                * (u2 * i2 / i0 * 2.0 * (cb4 + d * db4 + 2.0 * db4) + dp4 * u2 + db4 * u2 * u2)
                * (c4 * x2 * x2 + 2.0 * f * x2 * (d + 2.0) + g * d * (d + 2.0)));

    [1.0, i0 / i2 * xu, r2, r3, r4]
}

/// 𝒜·𝒫 for N = 0..4 from the closed forms, checked against the index sum
/// Σ over all D^N tuples of 𝒜·𝒫.
pub fn contract_ap(fam: &PolynomialFamily, u: &[f64], xi: &[f64]) -> Result<Vec<Contraction>> {
    check_point(fam, u, "displacement")?;
    check_point(fam, xi, "point")?;
    let amps = expansion_coefficients(fam, u)?;
    let sc = scalars(fam, u, xi);
    let closed = contraction_closed(fam, &sc, false);
    let printed = contraction_closed(fam, &sc, true);
    let mut out = Vec::with_capacity(MAX_ORDER + 1);
    for n in 0..=MAX_ORDER {
        let mut brute = 0.0;
        for t in all_tuples(fam.dim, n) {
            brute += amps.tensors[n].get(&t) * fam.eval_component(n, &t, xi)?;
        }
        if (closed[n] - brute).abs() > 1e-9 * (1.0 + brute.abs()) {
            return Err(Error::Consistency(format!(
                "order {n} contraction: closed form {} vs index sum {brute}",
                closed[n]
            )));
        }
        out.push(Contraction {
            order: n,
            closed_form: closed[n],
            brute_force: brute,
            printed_literal: printed[n],
            literal_deviation: (printed[n] - closed[n]).abs(),
        });
    }
    Ok(out)
}

fn check_order(n_max: usize) -> Result<()> {
    if n_max > MAX_ORDER {
        return Err(Error::Unsupported(format!(
            "expansions are available up to N = {MAX_ORDER}, got {n_max}"
        )));
    }
    Ok(())
}

/// S − 1 where S = Σ_{N ≤ N_max} 𝒜·𝒫/N!, summed without the leading 1.
pub fn correction_series(
    fam: &PolynomialFamily,
    u: &[f64],
    xi: &[f64],
    n_max: usize,
) -> Result<f64> {
    check_order(n_max)?;
    check_point(fam, u, "displacement")?;
    check_point(fam, xi, "point")?;
    let closed = contraction_closed(fam, &scalars(fam, u, xi), false);
    let mut fact = 1.0;
    let mut sum = 0.0;
    for (n, term) in closed.iter().enumerate().take(n_max + 1).skip(1) {
        fact *= n as f64;
        sum += term / fact;
    }
    Ok(sum)
}

/// f(ξ)·Σ_{N ≤ N_max} 𝒜·𝒫/N!, the truncated expansion of f(ξ−u).
pub fn reconstruct(fam: &PolynomialFamily, u: &[f64], xi: &[f64], n_max: usize) -> Result<f64> {
    let s = 1.0 + correction_series(fam, u, xi, n_max)?;
    Ok(fam.weight_at(xi)? * s)
}

fn series_from_tensors(
    fam: &PolynomialFamily,
    tensors: &[SymTensor],
    xi: &[f64],
    n_max: usize,
) -> Result<f64> {
    let mut fact = 1.0;
    let mut sum = 0.0;
    for (n, a) in tensors.iter().enumerate().take(n_max + 1) {
        if n > 0 {
            fact *= n as f64;
        }
        sum += a.full_contraction(&fam.eval_tensor(n, xi)?) / fact;
    }
    Ok(sum)
}

/// How 𝒜 is obtained inside [`completeness_residual`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplitudeRoute {
    ClosedForm,
    Projection,
}

/// max over the grid of |f(ξ−u) − f(ξ)Σ_{N≤N_max}𝒜·𝒫/N!| / max|f|.
/// This is the truncation of the completeness relation, not the full
/// distributional identity.
pub fn completeness_residual(
    fam: &PolynomialFamily,
    u: &[f64],
    grid: &[Vec<f64>],
    n_max: usize,
    route: AmplitudeRoute,
) -> Result<f64> {
    check_order(n_max)?;
    let w = family_weight(fam)?;
    let amps = match route {
        AmplitudeRoute::ClosedForm => expansion_coefficients(fam, u)?,
        AmplitudeRoute::Projection => expansion_coefficients_projected(fam, u)?,
    };
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for xi in grid {
        check_point(fam, xi, "grid point")?;
        let shifted: Vec<f64> = xi.iter().zip(u).map(|(x, v)| x - v).collect();
        let exact = w.radial(dot(&shifted, &shifted).sqrt(), fam.dim);
        let f = w.radial(dot(xi, xi).sqrt(), fam.dim);
        let approx = f * series_from_tensors(fam, &amps.tensors, xi, n_max)?;
        worst = worst.max((exact - approx).abs());
        scale = scale.max(f.abs()).max(exact.abs());
    }
    if scale == 0.0 {
        return Ok(worst);
    }
    Ok(worst / scale)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCharge {
    pub position: Vec<f64>,
    pub charge: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ChargeDistribution {
    pub charges: Vec<PointCharge>,
}

impl ChargeDistribution {
    pub fn new(charges: Vec<PointCharge>) -> Result<Self> {
        for c in &charges {
            if !c.charge.is_finite() || c.position.iter().any(|x| !x.is_finite()) {
                return domain("charge positions and values must be finite");
            }
        }
        Ok(ChargeDistribution { charges })
    }

    /// One charge per line: D position columns then the charge. Blank lines
    /// and lines starting with '#' are skipped.
    pub fn from_csv(text: &str, dim: usize) -> Result<Self> {
        let mut charges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<f64> = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            if fields.len() != dim + 1 {
                return Err(Error::Parse(format!(
                    "line {}: expected {} columns, found {}",
                    lineno + 1,
                    dim + 1,
                    fields.len()
                )));
            }
            charges.push(PointCharge {
                position: fields[..dim].to_vec(),
                charge: fields[dim],
            });
        }
        Self::new(charges)
    }

    pub fn total_charge(&self) -> f64 {
        self.charges.iter().map(|c| c.charge).sum()
    }
}

/// 𝒬_N = Σ_k q_k 𝒜_N(u_k) for N = 0..4.
pub fn multipoles(fam: &PolynomialFamily, rho: &ChargeDistribution) -> Result<Vec<SymTensor>> {
    let mut q: Vec<SymTensor> = (0..=MAX_ORDER)
        .map(|n| SymTensor::zeros(fam.dim, n))
        .collect();
    for c in &rho.charges {
        let a = expansion_coefficients(fam, &c.position)?;
        for (acc, t) in q.iter_mut().zip(&a.tensors) {
            acc.scale_add(c.charge, t);
        }
    }
    Ok(q)
}

/// v(ξ) ≈ f(ξ)Σ_{N≤N_max} 𝒬_N·𝒫_N(ξ)/N!.
pub fn potential_series(
    fam: &PolynomialFamily,
    rho: &ChargeDistribution,
    xi: &[f64],
    n_max: usize,
) -> Result<f64> {
    check_order(n_max)?;
    check_point(fam, xi, "point")?;
    let q = multipoles(fam, rho)?;
    Ok(fam.weight_at(xi)? * series_from_tensors(fam, &q, xi, n_max)?)
}

/// Σ_k q_k f(ξ−u_k).
pub fn potential_direct(
    fam: &PolynomialFamily,
    rho: &ChargeDistribution,
    xi: &[f64],
) -> Result<f64> {
    check_point(fam, xi, "point")?;
    let w = family_weight(fam)?;
    let mut v = 0.0;
    for c in &rho.charges {
        check_point(fam, &c.position, "charge position")?;
        let r = xi
            .iter()
            .zip(&c.position)
            .map(|(x, p)| (x - p) * (x - p))
            .sum::<f64>()
            .sqrt();
        v += c.charge * w.radial(r, fam.dim);
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{Gaussian, Legendre, Yukawa};
    use std::sync::Arc;

    fn gaussian(dim: usize) -> PolynomialFamily {
        PolynomialFamily::new(Arc::new(Gaussian), dim).unwrap()
    }

    #[test]
    fn zero_displacement() {
        let fam = PolynomialFamily::new(Arc::new(Legendre), 2).unwrap();
        let a = expansion_coefficients(&fam, &[0.0, 0.0]).unwrap();
        assert!((a.order(0).get(&[]) - fam.table.values[0].sqrt()).abs() < 1e-14);
        for n in 1..=4 {
            assert_eq!(a.order(n).max_abs(), 0.0);
        }
    }

    #[test]
    fn gaussian_second_order_is_outer_product() {
        let fam = gaussian(2);
        let a = expansion_coefficients(&fam, &[0.3, -0.2]).unwrap();
        assert!((a.order(2).get(&[1, 2]) + 0.06).abs() < 1e-14);
        assert!((a.order(2).get(&[1, 1]) - 0.09).abs() < 1e-14);
    }

    #[test]
    fn legendre_first_order() {
        let fam = PolynomialFamily::new(Arc::new(Legendre), 1).unwrap();
        let a = expansion_coefficients(&fam, &[0.1]).unwrap();
        assert!((a.order(1).get(&[1]) - 2.0 * 1.5f64.sqrt() * 0.1).abs() < 1e-14);
    }

    #[test]
    fn closed_form_matches_projection() {
        let fam = PolynomialFamily::new(Arc::new(Legendre), 3).unwrap();
        let u = [0.2, -0.1, 0.3];
        let a = expansion_coefficients(&fam, &u).unwrap();
        let b = expansion_coefficients_projected(&fam, &u).unwrap();
        for n in 0..=4 {
            for (idx, v) in a.order(n).iter() {
                assert!((v - b.order(n).get(idx)).abs() < 1e-11, "N={n} {idx:?}");
            }
        }
    }

    #[test]
    fn first_order_contraction() {
        let fam = gaussian(2);
        let c = contract_ap(&fam, &[0.1, 0.0], &[1.0, 1.0]).unwrap();
        assert_eq!(c[0].closed_form, 1.0);
        assert!((c[1].closed_form - 0.1).abs() < 1e-15);
        assert!((c[2].closed_form - c[2].brute_force).abs() < 1e-14);
    }

    #[test]
    fn reconstruction_converges() {
        let fam = gaussian(1);
        let exact =
            |u: f64| (-(1.0f64 - u).powi(2) / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let e1 = (reconstruct(&fam, &[0.1], &[1.0], 4).unwrap() - exact(0.1)).abs();
        let e2 = (reconstruct(&fam, &[0.05], &[1.0], 4).unwrap() - exact(0.05)).abs();
        assert!((e1 / e2 - 32.0).abs() < 4.0, "{}", e1 / e2);
        assert_eq!(
            reconstruct(&fam, &[0.0], &[1.0], 4).unwrap(),
            fam.weight_at(&[1.0]).unwrap()
        );
    }

    #[test]
    fn completeness_routes_agree() {
        let fam = gaussian(1);
        let grid: Vec<Vec<f64>> = (0..=40).map(|k| vec![-2.0 + 0.1 * k as f64]).collect();
        let a = completeness_residual(&fam, &[0.05], &grid, 4, AmplitudeRoute::ClosedForm).unwrap();
        let b = completeness_residual(&fam, &[0.05], &grid, 4, AmplitudeRoute::Projection).unwrap();
        assert!(a <= 1e-6 && (a - b).abs() < 1e-12);
        assert!(
            completeness_residual(&fam, &[0.0], &grid, 4, AmplitudeRoute::ClosedForm).unwrap()
                < 1e-16
        );
    }

    #[test]
    fn dipole_multipoles() {
        let fam = PolynomialFamily::new(Arc::new(Yukawa { mu: 1.0 }), 3).unwrap();
        let rho = ChargeDistribution::from_csv("0.05,0,0,1\n-0.05,0,0,-1\n", 3).unwrap();
        let q = multipoles(&fam, &rho).unwrap();
        let i0 = fam.table.values[0];
        assert!(q[0].max_abs() < 1e-15);
        assert!((q[1].get(&[1]) - i0 * fam.coeffs.c[1] * 0.1).abs() < 1e-12);
        assert!(q[2].max_abs() < 1e-15 && q[4].max_abs() < 1e-15);
    }

    #[test]
    fn csv_errors() {
        assert!(matches!(
            ChargeDistribution::from_csv("1,2\n", 2),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            ChargeDistribution::from_csv("a,2,3\n", 2),
            Err(Error::Parse(_))
        ));
        let rho = ChargeDistribution::from_csv("# x,y,q\n\n1,2,3\n", 2).unwrap();
        assert_eq!(rho.charges.len(), 1);
    }
}
