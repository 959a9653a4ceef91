//! Evaluation of 𝒫₀..𝒫₄.
//!
//! Each 𝒫_N is a sum over partial pairings of its N slots: with m pairs the
//! term is a radial factor times m Kronecker deltas times the ξ components of
//! the unpaired slots. The radial factor is c_N for m = 0, f_N(ξ²) = c̄_Nξ² + c′_N
//! for m = 1 and g₄(ξ²) = d̄₄ξ⁴ + d′₄ξ² + d₄ for m = 2.

use crate::coefficients::{build_coefficients, CoefficientSet};
use crate::error::{domain, Error, Result};
use crate::moments::{build_moment_table, MomentTable};
use crate::tensor::{MultivarPoly, SymTensor};
use crate::weights::Weight;
use std::sync::Arc;

pub const MAX_ORDER: usize = 4;

#[derive(Debug, Clone)]
pub struct PolynomialFamily {
    pub coeffs: CoefficientSet,
    pub table: MomentTable,
    pub dim: usize,
    pub weight: Option<Arc<dyn Weight>>,
}

/// Sets of `m` disjoint pairs drawn from `n` slots.
pub(crate) fn partial_pairings(n: usize, m: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(
        start: usize,
        n: usize,
        m: usize,
        used: &mut Vec<bool>,
        cur: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for a in start..n {
            if used[a] {
                continue;
            }
            for b in a + 1..n {
                if used[b] {
                    continue;
                }
                used[a] = true;
                used[b] = true;
                cur.push((a, b));
                rec(a + 1, n, m, used, cur, out);
                cur.pop();
                used[a] = false;
                used[b] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(0, n, m, &mut vec![false; n], &mut Vec::new(), &mut out);
    out
}

impl PolynomialFamily {
    pub fn new(weight: Arc<dyn Weight>, dim: usize) -> Result<Self> {
        let table = build_moment_table(weight.as_ref(), dim, MAX_ORDER)?;
        let mut fam = Self::from_table(table)?;
        fam.weight = Some(weight);
        Ok(fam)
    }

    pub fn from_table(table: MomentTable) -> Result<Self> {
        let dim = table.dim;
        let coeffs = build_coefficients(&table, dim)?;
        Ok(PolynomialFamily {
            coeffs,
            table,
            dim,
            weight: None,
        })
    }

    pub fn from_parts(coeffs: CoefficientSet, table: MomentTable) -> Result<Self> {
        if coeffs.dim != table.dim {
            return domain("coefficient set and moment table disagree on D");
        }
        Ok(PolynomialFamily {
            dim: table.dim,
            coeffs,
            table,
            weight: None,
        })
    }

    /// The weight ω(|ξ|) at a point, if the family carries its weight.
    pub fn weight_at(&self, xi: &[f64]) -> Result<f64> {
        let w = self
            .weight
            .as_ref()
            .ok_or_else(|| Error::Unsupported("family was built without a weight".into()))?;
        let r = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        Ok(w.radial(r, self.dim))
    }

    /// Radial coefficient of the term with `pairs` Kronecker deltas, as a
    /// polynomial in ξ²: constant, linear and quadratic parts.
    fn radial_coeffs(&self, n: usize, pairs: usize) -> [f64; 3] {
        let s = &self.coeffs;
        match (n, pairs) {
            (_, 0) => [s.c[n], 0.0, 0.0],
            (2..=4, 1) => [s.cp(n), s.cb(n), 0.0],
            (4, 2) => [s.d4, s.d4_prime, s.d4_bar],
            _ => [0.0; 3],
        }
    }

    fn check(&self, n: usize, idx: &[usize], xi_len: Option<usize>) -> Result<()> {
        if n > MAX_ORDER {
            return Err(Error::Unsupported(format!(
                "polynomials are available for N <= {MAX_ORDER}, got {n}"
            )));
        }
        if idx.len() != n {
            return domain(format!("order {n} needs {n} indices, got {}", idx.len()));
        }
        if let Some(bad) = idx.iter().find(|&&i| i == 0 || i > self.dim) {
            return domain(format!("index {bad} outside 1..={}", self.dim));
        }
        if let Some(len) = xi_len {
            if len != self.dim {
                return domain(format!("point has {len} components but D = {}", self.dim));
            }
        }
        Ok(())
    }

    /// 𝒫_{i₁…i_N}(ξ) with 1-based indices in any order.
    pub fn eval_component(&self, n: usize, idx: &[usize], xi: &[f64]) -> Result<f64> {
        self.check(n, idx, Some(xi.len()))?;
        let xi2: f64 = xi.iter().map(|x| x * x).sum();
        let mut total = 0.0;
        for pairs in 0..=n / 2 {
            let [a, b, c] = self.radial_coeffs(n, pairs);
            let radial = (c * xi2 + b) * xi2 + a;
            if radial == 0.0 {
                continue;
            }
            let mut sum = 0.0;
            for pairing in partial_pairings(n, pairs) {
                if pairing.iter().any(|&(p, q)| idx[p] != idx[q]) {
                    continue;
                }
                let mut prod = 1.0;
                for (slot, &i) in idx.iter().enumerate() {
                    if !pairing.iter().any(|&(p, q)| p == slot || q == slot) {
                        prod *= xi[i - 1];
                    }
                }
                sum += prod;
            }
            total += radial * sum;
        }
        Ok(total)
    }

    /// All canonical components of 𝒫_N(ξ).
    pub fn eval_tensor(&self, n: usize, xi: &[f64]) -> Result<SymTensor> {
        self.check(n, &vec![1; n], Some(xi.len()))?;
        let mut err = None;
        let t = SymTensor::from_fn(self.dim, n, |idx| {
            self.eval_component(n, idx, xi).unwrap_or_else(|e| {
                err = Some(e);
                f64::NAN
            })
        });
        match err {
            Some(e) => Err(e),
            None => Ok(t),
        }
    }

    /// 𝒫_{i₁…i_N} as an explicit polynomial in ξ₁..ξ_D.
    pub fn as_multivar_poly(&self, n: usize, idx: &[usize]) -> Result<MultivarPoly> {
        self.check(n, idx, None)?;
        let d = self.dim;
        let r2 = MultivarPoly::norm_squared(d);
        let mut out = MultivarPoly::zero(d);
        for pairs in 0..=n / 2 {
            let [a, b, c] = self.radial_coeffs(n, pairs);
            if a == 0.0 && b == 0.0 && c == 0.0 {
                continue;
            }
            let radial = MultivarPoly::constant(d, a)
                .add(&r2.scale(b))
                .add(&r2.mul(&r2).scale(c));
            let mut exps_sum = MultivarPoly::zero(d);
            for pairing in partial_pairings(n, pairs) {
                if pairing.iter().any(|&(p, q)| idx[p] != idx[q]) {
                    continue;
                }
                let mut e = vec![0u32; d];
                for (slot, &i) in idx.iter().enumerate() {
                    if !pairing.iter().any(|&(p, q)| p == slot || q == slot) {
                        e[i - 1] += 1;
                    }
                }
                exps_sum = exps_sum.add(&MultivarPoly::monomial(d, e, 1.0));
            }
            out = out.add(&radial.mul(&exps_sum));
        }
        Ok(out)
    }

    /// Coefficient arrays (constant term first) of 𝒫₀..𝒫₄ for D = 1.
    pub fn project_1d(&self) -> Result<Vec<Vec<f64>>> {
        if self.dim != 1 {
            return domain(format!("project_1d needs D = 1, got {}", self.dim));
        }
        (0..=MAX_ORDER)
            .map(|n| {
                let p = self.as_multivar_poly(n, &vec![1; n])?;
                let mut coeffs = vec![0.0; n + 1];
                for (e, c) in &p.terms {
                    coeffs[e[0] as usize] += c;
                }
                Ok(coeffs)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::MomentSource;
    use crate::weights::{Chebyshev1, Gaussian, Legendre};
    use approx::assert_relative_eq;

    fn gaussian(dim: usize) -> PolynomialFamily {
        PolynomialFamily::new(Arc::new(Gaussian), dim).unwrap()
    }

    #[test]
    fn partial_pairing_counts() {
        assert_eq!(partial_pairings(4, 1).len(), 6);
        assert_eq!(partial_pairings(4, 2).len(), 3);
        assert_eq!(partial_pairings(3, 1).len(), 3);
        assert_eq!(partial_pairings(2, 0).len(), 1);
    }

    #[test]
    fn hermite_components() {
        let g = gaussian(2);
        assert_relative_eq!(
            g.eval_component(2, &[1, 1], &[2.0, 0.0]).unwrap(),
            3.0,
            epsilon = 1e-14
        );
        let (a, b) = (0.7, -1.3);
        let g3 = gaussian(3);
        assert_relative_eq!(
            g3.eval_component(3, &[1, 2, 2], &[a, b, 0.4]).unwrap(),
            a * b * b - a,
            epsilon = 1e-14
        );
        assert_eq!(g.eval_component(0, &[], &[5.0, 1.0]).unwrap(), 1.0);
        assert!(matches!(
            g.eval_component(5, &[1; 5], &[0.0, 0.0]),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn hermite_projection_is_exact() {
        let p = gaussian(1).project_1d().unwrap();
        let expected: Vec<Vec<f64>> = vec![
            vec![1.0],
            vec![0.0, 1.0],
            vec![-1.0, 0.0, 1.0],
            vec![0.0, -3.0, 0.0, 1.0],
            vec![3.0, 0.0, -6.0, 0.0, 1.0],
        ];
        for (got, want) in p.iter().zip(&expected) {
            for (g, w) in got.iter().zip(want) {
                assert!((g - w).abs() < 1e-12, "{got:?} vs {want:?}");
            }
        }
        assert!(gaussian(2).project_1d().is_err());
    }

    #[test]
    fn legendre_p2_and_chebyshev_p3() {
        let leg = PolynomialFamily::new(Arc::new(Legendre), 1)
            .unwrap()
            .project_1d()
            .unwrap();
        let s = 5f64.sqrt() / 2.0;
        assert_relative_eq!(leg[2][0], -s, max_relative = 1e-12);
        assert_relative_eq!(leg[2][2], 3.0 * s, max_relative = 1e-12);
        let ch = PolynomialFamily::new(Arc::new(Chebyshev1), 1)
            .unwrap()
            .project_1d()
            .unwrap();
        let k = 2.0 * (3.0 / std::f64::consts::PI).sqrt();
        assert_relative_eq!(ch[3][3], 4.0 * k, max_relative = 1e-12);
        assert_relative_eq!(ch[3][1], -3.0 * k, max_relative = 1e-12);
    }

    #[test]
    fn zero_point_leaves_delta_term() {
        let fam = PolynomialFamily::new(Arc::new(Legendre), 2).unwrap();
        let t = fam.eval_tensor(2, &[0.0, 0.0]).unwrap();
        assert_relative_eq!(t.get(&[1, 1]), fam.coeffs.cp(2), max_relative = 1e-14);
        assert_eq!(t.get(&[1, 2]), 0.0);
    }

    #[test]
    fn poly_export_matches_evaluation() {
        let table =
            MomentTable::from_values(3, vec![1.3, 0.7, 0.9, 1.6, 3.9], MomentSource::Analytic)
                .unwrap();
        let fam = PolynomialFamily::from_table(table).unwrap();
        let xi = [0.3, -0.8, 1.1];
        for idx in [
            vec![1, 1, 2, 2],
            vec![1, 2, 3, 3],
            vec![3, 3, 3, 3],
            vec![2, 1, 2],
        ] {
            let n = idx.len();
            let p = fam.as_multivar_poly(n, &idx).unwrap();
            assert_relative_eq!(
                p.eval(&xi),
                fam.eval_component(n, &idx, &xi).unwrap(),
                max_relative = 1e-13
            );
        }
    }
}
