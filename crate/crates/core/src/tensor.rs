//! Symmetric multi-indices, the two delta tensors, and exact integration of
//! polynomials against a radial weight through its moment table.

use crate::error::{domain, Error, Result};
use crate::moments::MomentTable;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;

/// A multi-index i₁…i_N with entries in 1..=D, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(mut indices: Vec<usize>, dim: usize) -> Result<Self> {
        if let Some(bad) = indices.iter().find(|&&i| i == 0 || i > dim) {
            return domain(format!("index {bad} outside 1..={dim}"));
        }
        indices.sort_unstable();
        Ok(MultiIndex(indices))
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Per-axis multiplicities (a₁..a_D).
    pub fn exponents(&self, dim: usize) -> Vec<u32> {
        let mut e = vec![0u32; dim];
        for &i in &self.0 {
            e[i - 1] += 1;
        }
        e
    }
}

/// Sorted multi-indices of the given rank: C(N+D−1, N) of them.
pub fn canonical_indices(dim: usize, rank: usize) -> Vec<MultiIndex> {
    fn rec(dim: usize, rank: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
        if cur.len() == rank {
            out.push(MultiIndex(cur.clone()));
            return;
        }
        for i in start..=dim {
            cur.push(i);
            rec(dim, rank, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, rank, 1, &mut Vec::with_capacity(rank), &mut out);
    out
}

/// Every ordered tuple in (1..=D)^N.
pub fn all_tuples(dim: usize, rank: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(rank)];
    for _ in 0..rank {
        out = out
            .into_iter()
            .flat_map(|t| {
                (1..=dim).map(move |i| {
                    let mut t = t.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    out
}

/// Perfect pairings of `n` slots, built by pairing the first free slot with
/// each later one.
pub fn pairings(n: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(free: &[usize], cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if free.is_empty() {
            out.push(cur.clone());
            return;
        }
        let first = free[0];
        for k in 1..free.len() {
            let rest: Vec<usize> = free[1..]
                .iter()
                .enumerate()
                .filter(|(j, _)| j + 1 != k)
                .map(|(_, &s)| s)
                .collect();
            cur.push((first, free[k]));
            rec(&rest, cur, out);
            cur.pop();
        }
    }
    if n % 2 == 1 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let slots: Vec<usize> = (0..n).collect();
    rec(&slots, &mut Vec::new(), &mut out);
    out
}

/// All permutations of 0..n in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(rest: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        for k in 0..rest.len() {
            let v = rest.remove(k);
            cur.push(v);
            rec(rest, cur, out);
            cur.pop();
            rest.insert(k, v);
        }
    }
    let mut out = Vec::new();
    rec(&mut (0..n).collect(), &mut Vec::new(), &mut out);
    out
}

/// δ_{i₁…i₂N}: number of pairings whose pairs carry equal indices.
pub fn delta_full(indices: &[usize]) -> Result<u64> {
    if indices.len() % 2 == 1 {
        return domain(format!("delta_full needs even rank, got {}", indices.len()));
    }
    fn rec(idx: &[usize]) -> u64 {
        if idx.is_empty() {
            return 1;
        }
        let mut total = 0;
        for k in 1..idx.len() {
            if idx[k] == idx[0] {
                let rest: Vec<usize> = idx[1..]
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| j + 1 != k)
                    .map(|(_, &s)| s)
                    .collect();
                total += rec(&rest);
            }
        }
        total
    }
    Ok(rec(indices))
}

/// δ_{i₁…i_N|j₁…j_N} = Σ_σ ∏_k δ_{i_σ(k) j_k}, summed over all N! permutations.
pub fn delta_ortho(i: &[usize], j: &[usize]) -> Result<u64> {
    if i.len() != j.len() {
        return domain(format!(
            "delta_ortho needs equal ranks, got {} and {}",
            i.len(),
            j.len()
        ));
    }
    Ok(permutations(i.len())
        .iter()
        .filter(|p| p.iter().enumerate().all(|(k, &s)| i[s] == j[k]))
        .count() as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaKind {
    Full,
    Ortho,
}

const ENUMERATION_LIMIT: usize = 6;

/// N! for `Ortho`, (2N−1)!! for `Full`, enumerated for small N.
pub fn count_terms(kind: DeltaKind, n: usize) -> u64 {
    match kind {
        DeltaKind::Ortho if n <= ENUMERATION_LIMIT => permutations(n).len() as u64,
        DeltaKind::Ortho => (1..=n as u64).product(),
        DeltaKind::Full if n <= ENUMERATION_LIMIT => pairings(2 * n).len() as u64,
        DeltaKind::Full => (1..=n as u64).map(|k| 2 * k - 1).product(),
    }
}

/// Term counts of δ_{i…i j…j} (N i-slots then N j-slots), grouped by the
/// number of pairs joining two i-slots.
pub fn decomposition_counts(n: usize) -> Result<Vec<u64>> {
    if !(2..=4).contains(&n) {
        return domain(format!("decomposition_counts needs 2 <= N <= 4, got {n}"));
    }
    let mut counts = vec![0u64; n / 2 + 1];
    for p in pairings(2 * n) {
        let ii = p.iter().filter(|(a, b)| *a < n && *b < n).count();
        counts[ii] += 1;
    }
    Ok(counts)
}

fn double_factorial_odd(a: u32) -> f64 {
    // (a−1)!! for even a
    (1..a).step_by(2).map(|k| k as f64).product()
}

/// ∫ω ξ₁^{a₁}…ξ_D^{a_D} d^Dξ from the moment table.
pub fn monomial_moment(table: &MomentTable, exponents: &[u32]) -> Result<f64> {
    if exponents.len() != table.dim {
        return domain(format!(
            "exponent vector has length {} but D = {}",
            exponents.len(),
            table.dim
        ));
    }
    let total: u32 = exponents.iter().sum();
    if total as usize > 2 * table.n_max() {
        return Err(Error::Range(format!(
            "monomial of degree {total} exceeds the table (max degree {})",
            2 * table.n_max()
        )));
    }
    if exponents.iter().any(|a| a % 2 == 1) {
        return Ok(0.0);
    }
    let mult: f64 = exponents.iter().map(|&a| double_factorial_odd(a)).product();
    Ok(table.i2n(total as usize / 2)? * mult)
}

/// Polynomial in ξ₁..ξ_D with real coefficients keyed by exponent vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultivarPoly {
    #[serde(rename = "D")]
    pub dim: usize,
    pub terms: BTreeMap<Vec<u32>, f64>,
}

impl MultivarPoly {
    pub fn zero(dim: usize) -> Self {
        MultivarPoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Self::monomial(dim, vec![0; dim], c)
    }

    pub fn monomial(dim: usize, exponents: Vec<u32>, c: f64) -> Self {
        let mut p = Self::zero(dim);
        if c != 0.0 {
            p.terms.insert(exponents, c);
        }
        p
    }

    /// ξ_k for k in 1..=D.
    pub fn variable(dim: usize, k: usize) -> Self {
        let mut e = vec![0; dim];
        e[k - 1] = 1;
        Self::monomial(dim, e, 1.0)
    }

    /// ξ² = Σ ξ_k².
    pub fn norm_squared(dim: usize) -> Self {
        let mut p = Self::zero(dim);
        for k in 0..dim {
            let mut e = vec![0; dim];
            e[k] = 2;
            p.terms.insert(e, 1.0);
        }
        p
    }

    fn add_term(&mut self, e: Vec<u32>, c: f64) {
        if c == 0.0 {
            return;
        }
        let entry = self.terms.entry(e).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            self.terms.retain(|_, v| *v != 0.0);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = Self::zero(self.dim);
        if s != 0.0 {
            for (e, c) in &self.terms {
                out.add_term(e.clone(), c * s);
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn eval(&self, xi: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                c * e
                    .iter()
                    .zip(xi)
                    .map(|(&a, &x)| x.powi(a as i32))
                    .product::<f64>()
            })
            .sum()
    }

    /// p(η + u) as a polynomial in η.
    pub fn shifted(&self, u: &[f64]) -> Self {
        let mut out = Self::zero(self.dim);
        for (e, c) in &self.terms {
            let mut term = Self::constant(self.dim, *c);
            for (k, &a) in e.iter().enumerate() {
                let lin = Self::variable(self.dim, k + 1).add(&Self::constant(self.dim, u[k]));
                for _ in 0..a {
                    term = term.mul(&lin);
                }
            }
            out = out.add(&term);
        }
        out
    }
}

/// ∫ω p d^Dξ, term by term through [`monomial_moment`].
pub fn integrate_poly(table: &MomentTable, p: &MultivarPoly) -> Result<f64> {
    if p.dim != table.dim {
        return domain(format!(
            "polynomial in {} variables integrated against D = {}",
            p.dim, table.dim
        ));
    }
    let mut sum = 0.0;
    for (e, c) in &p.terms {
        sum += c * monomial_moment(table, e)?;
    }
    Ok(sum)
}

/// Fully symmetric tensor stored on sorted multi-indices.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensor {
    pub dim: usize,
    pub rank: usize,
    entries: BTreeMap<Vec<usize>, f64>,
}

impl SymTensor {
    pub fn zeros(dim: usize, rank: usize) -> Self {
        let entries = canonical_indices(dim, rank)
            .into_iter()
            .map(|m| (m.0, 0.0))
            .collect();
        SymTensor { dim, rank, entries }
    }

    pub fn from_fn<F: FnMut(&[usize]) -> f64>(dim: usize, rank: usize, mut f: F) -> Self {
        let entries = canonical_indices(dim, rank)
            .into_iter()
            .map(|m| {
                let v = f(&m.0);
                (m.0, v)
            })
            .collect();
        SymTensor { dim, rank, entries }
    }

    /// Value at any ordering of the indices.
    pub fn get(&self, indices: &[usize]) -> f64 {
        let mut key = indices.to_vec();
        key.sort_unstable();
        self.entries.get(&key).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, indices: &[usize], value: f64) {
        let mut key = indices.to_vec();
        key.sort_unstable();
        self.entries.insert(key, value);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[usize], f64)> {
        self.entries.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Σ over all D^N ordered tuples of self·other.
    pub fn full_contraction(&self, other: &SymTensor) -> f64 {
        all_tuples(self.dim, self.rank)
            .iter()
            .map(|t| self.get(t) * other.get(t))
            .sum()
    }

    pub fn scale_add(&mut self, s: f64, other: &SymTensor) {
        for (k, v) in self.entries.iter_mut() {
            *v += s * other.get(k);
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SymTensorRepr {
    rank: usize,
    #[serde(rename = "D")]
    dim: usize,
    entries: Vec<(Vec<usize>, f64)>,
}

impl Serialize for SymTensor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SymTensor", 3)?;
        st.serialize_field("rank", &self.rank)?;
        st.serialize_field("D", &self.dim)?;
        let entries: Vec<(&Vec<usize>, &f64)> = self.entries.iter().collect();
        st.serialize_field("entries", &entries)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for SymTensor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = SymTensorRepr::deserialize(d)?;
        let mut t = SymTensor::zeros(repr.dim, repr.rank);
        for (k, v) in repr.entries {
            t.set(&k, v);
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::MomentSource;

    #[test]
    fn delta_examples() {
        assert_eq!(delta_full(&[1, 1, 1, 1]).unwrap(), 3);
        assert_eq!(delta_full(&[1, 1, 2, 2]).unwrap(), 1);
        assert_eq!(delta_full(&[1, 2]).unwrap(), 0);
        assert!(delta_full(&[1, 2, 3]).is_err());
        assert_eq!(delta_ortho(&[1, 2], &[1, 2]).unwrap(), 1);
        assert_eq!(delta_ortho(&[1, 1], &[1, 1]).unwrap(), 2);
        assert_eq!(delta_ortho(&[1], &[2]).unwrap(), 0);
        assert!(delta_ortho(&[1], &[1, 2]).is_err());
    }

    #[test]
    fn counts() {
        assert_eq!(count_terms(DeltaKind::Ortho, 3), 6);
        assert_eq!(count_terms(DeltaKind::Full, 4), 105);
        assert_eq!(count_terms(DeltaKind::Full, 1), 1);
        assert_eq!(count_terms(DeltaKind::Full, 8), 2_027_025);
        assert_eq!(decomposition_counts(2).unwrap(), vec![2, 1]);
        assert_eq!(decomposition_counts(3).unwrap(), vec![6, 9]);
        assert_eq!(decomposition_counts(4).unwrap(), vec![24, 72, 9]);
        assert!(decomposition_counts(5).is_err());
    }

    #[test]
    fn canonical_index_count() {
        assert_eq!(canonical_indices(3, 4).len(), 15);
        assert_eq!(canonical_indices(2, 0).len(), 1);
        assert_eq!(all_tuples(3, 2).len(), 9);
    }

    #[test]
    fn gaussian_monomials() {
        let t = MomentTable::from_values(2, vec![1.0; 5], MomentSource::Analytic).unwrap();
        assert_eq!(monomial_moment(&t, &[4, 0]).unwrap(), 3.0);
        assert_eq!(monomial_moment(&t, &[2, 2]).unwrap(), 1.0);
        assert_eq!(monomial_moment(&t, &[1, 2]).unwrap(), 0.0);
        assert!(matches!(
            monomial_moment(&t, &[10, 0]),
            Err(Error::Range(_))
        ));
        let t3 = MomentTable::from_values(3, vec![1.0; 5], MomentSource::Analytic).unwrap();
        assert_eq!(
            integrate_poly(&t3, &MultivarPoly::norm_squared(3)).unwrap(),
            3.0
        );
    }

    #[test]
    fn shift_matches_direct_evaluation() {
        let p = MultivarPoly::monomial(2, vec![2, 1], 1.5).add(&MultivarPoly::constant(2, -0.5));
        let q = p.shifted(&[0.3, -0.2]);
        let x = [0.7, 1.1];
        assert!((q.eval(&x) - p.eval(&[1.0, 0.9])).abs() < 1e-14);
    }

    #[test]
    fn tensor_json_layout() {
        let t = SymTensor::from_fn(2, 1, |i| i[0] as f64);
        let v = serde_json::to_value(&t).unwrap();
        assert_eq!(v["rank"], 1);
        assert_eq!(v["D"], 2);
        assert_eq!(v["entries"][1][0][0], 2);
        let back: SymTensor = serde_json::from_value(v).unwrap();
        assert_eq!(back, t);
    }
}
