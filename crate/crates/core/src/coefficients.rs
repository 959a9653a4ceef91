//! The fourteen coefficients of 𝒫₀..𝒫₄ as functions of the moment table.
//!
//! Closed forms are used first. Every result is substituted back into the
//! scalar orthonormality conditions; if the d₄ family misses them, d₄, d′₄
//! and d̄₄ are re-solved from the conditions themselves.

use crate::error::{Error, Result};
use crate::moments::MomentTable;
use serde::{Deserialize, Serialize};

/// Which root is taken wherever a coefficient is defined through a square root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    #[default]
    Positive,
    Negative,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Positive => 1.0,
            Branch::Negative => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DSource {
    ClosedForm,
    ConditionSolve,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Intermediates {
    /// J₂, J₄, J₆
    pub j: [f64; 3],
    /// Δ₂, Δ₄, Δ₆
    pub delta_cap: [f64; 3],
    /// δ₂, δ₄, δ₆
    pub delta_small: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSet {
    #[serde(rename = "D")]
    pub dim: usize,
    /// c₀..c₄
    pub c: [f64; 5],
    /// c′₂, c′₃, c′₄
    pub c_prime: [f64; 3],
    /// c̄₂, c̄₃, c̄₄
    pub c_bar: [f64; 3],
    pub d4: f64,
    pub d4_prime: f64,
    pub d4_bar: f64,
    pub intermediates: Intermediates,
    pub branch: Branch,
    pub d_source: DSource,
}

impl CoefficientSet {
    /// c′_K for K in 2..=4.
    pub fn cp(&self, k: usize) -> f64 {
        self.c_prime[k - 2]
    }

    /// c̄_K for K in 2..=4.
    pub fn cb(&self, k: usize) -> f64 {
        self.c_bar[k - 2]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientOptions {
    pub branch: Branch,
    /// Largest normalized residual accepted for the closed-form d₄ family.
    pub gate: f64,
}

impl Default for CoefficientOptions {
    fn default() -> Self {
        CoefficientOptions {
            branch: Branch::Positive,
            gate: 1e-8,
        }
    }
}

fn check_k(k: usize) -> Result<()> {
    if !(1..=3).contains(&k) {
        return Err(Error::Domain(format!("K must be in 1..=3, got {k}")));
    }
    Ok(())
}

/// J₂K = I₂K² / (I₂K₊₂ I₂K₋₂).
pub fn j_ratio(table: &MomentTable, k: usize) -> Result<f64> {
    check_k(k)?;
    Ok(table.i2n(k)?.powi(2) / (table.i2n(k + 1)? * table.i2n(k - 1)?))
}

/// Δ₂K = √(2 / ((D+2K) − J₂K(D+2K−2))).
pub fn delta_cap(table: &MomentTable, dim: usize, k: usize) -> Result<f64> {
    let j = j_ratio(table, k)?;
    let d = dim as f64;
    let kk = 2.0 * k as f64;
    let radicand = (d + kk) - j * (d + kk - 2.0);
    if !(radicand > 0.0) {
        return Err(Error::Existence(format!(
            "Delta_{} requires (D+{}) - J_{}(D+{}) > 0, got {radicand:e}",
            2 * k,
            2 * k,
            2 * k,
            2 * k - 2
        )));
    }
    Ok((2.0 / radicand).sqrt())
}

/// δ₂K = I₂K₋₂ I₂K₊₂ (D+2K) − I₂K² (D+2K−2).
pub fn delta_small(table: &MomentTable, dim: usize, k: usize) -> Result<f64> {
    check_k(k)?;
    let d = dim as f64;
    let kk = 2.0 * k as f64;
    Ok(table.i2n(k - 1)? * table.i2n(k + 1)? * (d + kk) - table.i2n(k)?.powi(2) * (d + kk - 2.0))
}

pub fn build_coefficients(table: &MomentTable, dim: usize) -> Result<CoefficientSet> {
    build_coefficients_with(table, dim, &CoefficientOptions::default())
}

pub fn build_coefficients_with(
    table: &MomentTable,
    dim: usize,
    opts: &CoefficientOptions,
) -> Result<CoefficientSet> {
    if dim != table.dim {
        return Err(Error::Domain(format!(
            "moment table is for D = {} but D = {dim} was requested",
            table.dim
        )));
    }
    let d = dim as f64;
    let s = opts.branch.sign();
    let i: Vec<f64> = (0..=4).map(|n| table.i2n(n)).collect::<Result<_>>()?;

    let mut j = [0.0; 3];
    let mut dc = [0.0; 3];
    let mut ds = [0.0; 3];
    for k in 1..=3 {
        j[k - 1] = j_ratio(table, k)?;
        dc[k - 1] = s * delta_cap(table, dim, k)?;
        ds[k - 1] = delta_small(table, dim, k)?;
    }

    let c: [f64; 5] = std::array::from_fn(|k| 1.0 / i[k].sqrt());
    let mut c_bar = [0.0; 3];
    let mut c_prime = [0.0; 3];
    for k in 2..=4 {
        let delta = dc[k - 2];
        c_bar[k - 2] = c[k] * (delta - 1.0) / (d + 2.0 * k as f64 - 4.0);
        c_prime[k - 2] = -c[k] * i[k - 1] / i[k - 2] * delta;
    }

    let [d2, d4s, d6] = ds;
    let radicand = d2 * d6 * (d + 4.0) - d4s * d4s * d;
    if !(radicand > 0.0) || !(d2 > 0.0) {
        return Err(Error::Existence(format!(
            "d4 requires delta2 > 0 and delta2*delta6*(D+4) - delta4^2*D > 0, got delta2 = {d2:e}, radicand = {radicand:e}"
        )));
    }
    let d4 = s * (8.0 * d4s * d4s * i[2] / d2).sqrt() / radicand.sqrt();
    let delta6 = dc[2];
    let d4_prime = -(d4 / d) * (i[0] / i[1] + (i[2] / i[1]) * (d2 / d4s))
        + 2.0 * i[3] * delta6 * c[4] / (i[2] * d);
    let d4_bar = d2 / (d4s * d * (d + 2.0)) * d4
        + c[4] * (d - 2.0 * (d + 2.0) * delta6) / (d * (d + 2.0) * (d + 4.0));

    let mut set = CoefficientSet {
        dim,
        c,
        c_prime,
        c_bar,
        d4,
        d4_prime,
        d4_bar,
        intermediates: Intermediates {
            j,
            delta_cap: dc,
            delta_small: ds,
        },
        branch: opts.branch,
        d_source: DSource::ClosedForm,
    };

    let lower = residuals(&set, table)
        .into_iter()
        .filter(|r| !r.involves_d4)
        .fold(0.0f64, |m, r| m.max(r.residual));
    if lower > opts.gate {
        return Err(Error::Consistency(format!(
            "orders 2 and 3 miss their orthonormality conditions by {lower:e}"
        )));
    }
    if d4_family_residual(&set, table) > opts.gate {
        let (a, b, cc) = solve_d4_family(&set, table, opts.branch)?;
        set.d4 = a;
        set.d4_prime = b;
        set.d4_bar = cc;
        set.d_source = DSource::ConditionSolve;
        let after = d4_family_residual(&set, table);
        if after > opts.gate {
            return Err(Error::Consistency(format!(
                "d4 family misses the order-4 conditions by {after:e} even after re-solving"
            )));
        }
    }
    Ok(set)
}

/// One scalar orthonormality condition evaluated at a coefficient set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquationResidual {
    pub name: &'static str,
    /// |Σ terms − rhs| divided by the largest |term| (or |rhs|).
    pub residual: f64,
    pub involves_d4: bool,
}

struct Condition {
    name: &'static str,
    terms: Vec<f64>,
    rhs: f64,
    involves_d4: bool,
}

impl Condition {
    fn raw(&self) -> f64 {
        self.terms.iter().sum::<f64>() - self.rhs
    }

    fn normalized(&self) -> f64 {
        let scale = self
            .terms
            .iter()
            .fold(self.rhs.abs(), |m, t| m.max(t.abs()))
            .max(f64::MIN_POSITIVE);
        self.raw().abs() / scale
    }
}

fn conditions(set: &CoefficientSet, table: &MomentTable) -> Vec<Condition> {
    let i = |n: usize| table.values[n];
    let (i0, i2, i4, i6, i8) = (i(0), i(1), i(2), i(3), i(4));
    let d = set.dim as f64;
    let (c2, c3, c4) = (set.c[2], set.c[3], set.c[4]);
    let (cb2, cb3, cb4) = (set.cb(2), set.cb(3), set.cb(4));
    let (cp2, cp3, cp4) = (set.cp(2), set.cp(3), set.cp(4));
    let (d4, dp4, db4) = (set.d4, set.d4_prime, set.d4_bar);
    let (p2, p4, p6) = (d + 2.0, d + 4.0, d + 6.0);
    let cond = |name, terms: Vec<f64>, rhs, involves_d4| Condition {
        name,
        terms,
        rhs,
        involves_d4,
    };
    vec![
        cond("p0_p2", vec![i2 * c2, d * i2 * cb2, i0 * cp2], 0.0, false),
        cond("p2_p2_norm", vec![c2 * c2 * i4], 1.0, false),
        cond(
            "p2_p2_trace",
            vec![
                c2 * c2 * i4,
                2.0 * p2 * i4 * c2 * cb2,
                2.0 * i2 * c2 * cp2,
                cb2 * cb2 * d * p2 * i4,
                2.0 * d * i2 * cb2 * cp2,
                cp2 * cp2 * i0,
            ],
            0.0,
            false,
        ),
        cond("p1_p3", vec![c3 * i4, cb3 * i4 * p2, cp3 * i2], 0.0, false),
        cond("p3_p3_norm", vec![c3 * c3 * i6], 1.0, false),
        cond(
            "p3_p3_trace",
            vec![
                c3 * c3 * i6,
                2.0 * i6 * p4 * c3 * cb3,
                2.0 * i4 * c3 * cp3,
                i2 * cp3 * cp3,
                2.0 * i4 * p2 * cb3 * cp3,
                i6 * p2 * p4 * cb3 * cb3,
            ],
            0.0,
            false,
        ),
        cond(
            "p0_p4",
            vec![
                c4 * i4,
                2.0 * cp4 * i2,
                2.0 * cb4 * i4 * p2,
                d4 * i0,
                dp4 * i2 * d,
                db4 * i4 * p2 * d,
            ],
            0.0,
            true,
        ),
        cond(
            "p2_p4_leading",
            vec![c4 * i6, cp4 * i4, cb4 * i6 * p4],
            0.0,
            false,
        ),
        cond(
            "p2_p4_trace",
            vec![
                c4 * c2 * i6,
                c4 * cp2 * i4,
                c4 * cb2 * i6 * p4,
                2.0 * c2 * cp4 * i4,
                2.0 * c2 * cb4 * i6 * p4,
                2.0 * cp4 * cp2 * i2,
                2.0 * cb4 * cp2 * i4 * p2,
                2.0 * cp4 * cb2 * i4 * p2,
                2.0 * cb4 * cb2 * i6 * p4 * p2,
                c2 * d4 * i2,
                c2 * dp4 * i4 * p2,
                c2 * db4 * i6 * p4 * p2,
                d4 * cp2 * i0,
                d4 * cb2 * i2 * d,
                dp4 * cp2 * i2 * d,
                dp4 * cb2 * i4 * p2 * d,
                db4 * cp2 * i4 * p2 * d,
                db4 * cb2 * i6 * p4 * p2 * d,
            ],
            0.0,
            true,
        ),
        cond("p4_p4_norm", vec![i8 * c4 * c4], 1.0, false),
        cond(
            "p4_p4_pair",
            vec![
                i8 * c4 * c4,
                2.0 * cp4 * i6 * c4,
                2.0 * cb4 * i8 * p6 * c4,
                cp4 * cp4 * i4,
                2.0 * cp4 * cb4 * i6 * p4,
                cb4 * cb4 * i8 * p6 * p4,
            ],
            0.0,
            false,
        ),
        cond(
            "p4_p4_trace",
            vec![
                i8 * c4 * c4,
                4.0 * c4 * cp4 * i6,
                4.0 * c4 * cb4 * i8 * p6,
                2.0 * c4 * d4 * i4,
                2.0 * c4 * dp4 * i6 * p4,
                2.0 * c4 * db4 * i8 * p6 * p4,
                4.0 * cp4 * d4 * i2,
                4.0 * cp4 * dp4 * i4 * p2,
                4.0 * cb4 * d4 * i4 * p2,
                4.0 * cb4 * dp4 * i6 * p4 * p2,
                4.0 * cp4 * db4 * i6 * p4 * p2,
                4.0 * cb4 * db4 * i8 * p6 * p4 * p2,
                4.0 * cp4 * cp4 * i4,
                8.0 * cp4 * cb4 * i6 * p4,
                4.0 * cb4 * cb4 * i8 * p6 * p4,
                d4 * d4 * i0,
                2.0 * d4 * dp4 * i2 * d,
                dp4 * dp4 * i4 * p2 * d,
                2.0 * d4 * db4 * i4 * p2 * d,
                2.0 * dp4 * db4 * i6 * p4 * p2 * d,
                db4 * db4 * i8 * p6 * p4 * p2 * d,
            ],
            0.0,
            true,
        ),
    ]
}

/// Every scalar orthonormality condition, normalized by its largest term.
pub fn residuals(set: &CoefficientSet, table: &MomentTable) -> Vec<EquationResidual> {
    conditions(set, table)
        .into_iter()
        .map(|c| EquationResidual {
            name: c.name,
            residual: c.normalized(),
            involves_d4: c.involves_d4,
        })
        .collect()
}

/// Largest normalized residual over all conditions.
pub fn residual_check(set: &CoefficientSet, table: &MomentTable) -> f64 {
    residuals(set, table)
        .iter()
        .fold(0.0, |m, r| m.max(r.residual))
}

fn d4_family_residual(set: &CoefficientSet, table: &MomentTable) -> f64 {
    residuals(set, table)
        .iter()
        .filter(|r| r.involves_d4)
        .fold(0.0, |m, r| m.max(r.residual))
}

fn raw_condition(set: &CoefficientSet, table: &MomentTable, name: &str) -> f64 {
    conditions(set, table)
        .into_iter()
        .find(|c| c.name == name)
        .map(|c| c.raw())
        .unwrap_or(f64::NAN)
}

/// Solves the (P0,P4) and (P2,P4) conditions, which are affine in the d
/// coefficients, for d′₄ and d̄₄ as functions of d₄; the (P4,P4) trace
/// condition is then a quadratic in d₄.
fn solve_d4_family(
    base: &CoefficientSet,
    table: &MomentTable,
    branch: Branch,
) -> Result<(f64, f64, f64)> {
    let with = |d4: f64, dp4: f64, db4: f64| {
        let mut s = base.clone();
        s.d4 = d4;
        s.d4_prime = dp4;
        s.d4_bar = db4;
        s
    };
    // affine coefficients of a condition in (d4, dp4, db4)
    let affine = |name: &str| {
        let r0 = raw_condition(&with(0.0, 0.0, 0.0), table, name);
        let a = raw_condition(&with(1.0, 0.0, 0.0), table, name) - r0;
        let b = raw_condition(&with(0.0, 1.0, 0.0), table, name) - r0;
        let c = raw_condition(&with(0.0, 0.0, 1.0), table, name) - r0;
        (r0, a, b, c)
    };
    let (e0, ea, eb, ec) = affine("p0_p4");
    let (f0, fa, fb, fc) = affine("p2_p4_trace");
    let det = eb * fc - ec * fb;
    if det == 0.0 || !det.is_finite() {
        return Err(Error::Consistency(
            "order-4 conditions are singular in (d4', d4bar)".into(),
        ));
    }
    // dp4 = p0 + p1 d4, db4 = q0 + q1 d4
    let solve = |r: f64, s: f64| ((r * fc - ec * s) / det, (eb * s - fb * r) / det);
    let (p0, q0) = solve(-e0, -f0);
    let (p1, q1) = solve(-ea, -fa);
    let at = |d4: f64| raw_condition(&with(d4, p0 + p1 * d4, q0 + q1 * d4), table, "p4_p4_trace");
    let (m, z, p) = (at(-1.0), at(0.0), at(1.0));
    let qa = 0.5 * (p + m) - z;
    let qb = 0.5 * (p - m);
    let qc = z;
    let disc = qb * qb - 4.0 * qa * qc;
    if !(disc >= 0.0) || qa == 0.0 {
        return Err(Error::Existence(
            "order-4 conditions have no real d4".into(),
        ));
    }
    let sq = disc.sqrt();
    let roots = [(-qb + sq) / (2.0 * qa), (-qb - sq) / (2.0 * qa)];
    let d4 = match branch {
        Branch::Positive => roots[0].max(roots[1]),
        Branch::Negative => roots[0].min(roots[1]),
    };
    Ok((d4, p0 + p1 * d4, q0 + q1 * d4))
}
