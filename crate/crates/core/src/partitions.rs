//! Young diagrams, canonical index tuples and the combinatorial weights that
//! every other module uses.
//!
//! A basis tensor `e_{i1}^{⊗λ1} ⊙ … ⊙ e_{im}^{⊗λm}` only depends on the
//! multiset of indices, so a [`BasisKey`] is stored in a normal form: parts
//! weakly decreasing, and within a run of equal parts the indices strictly
//! increasing. The same key also labels the monomial `x^α` with exponent
//! `α_{i_j} = λ_j`, which is how the function spaces reuse it.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct YoungDiagram {
    parts: Vec<u32>,
}

impl YoungDiagram {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        let decreasing = parts.windows(2).all(|w| w[0] >= w[1]);
        if !decreasing || parts.contains(&0) {
            return Err(Error::InvalidDiagram(parts));
        }
        Ok(Self { parts })
    }

    pub fn empty() -> Self {
        Self { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// `|λ|`.
    pub fn weight(&self) -> usize {
        self.parts.iter().map(|&p| p as usize).sum()
    }

    /// `l(λ)`, with the convention `l(∅) = 1`.
    pub fn length(&self) -> usize {
        self.parts.len().max(1)
    }

    /// `λ! = λ1!·…·λm!`.
    pub fn factorial(&self) -> BigInt {
        self.parts
            .iter()
            .fold(BigInt::one(), |acc, &p| acc * factorial(p as usize))
    }
}

impl fmt::Display for YoungDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", bracketed(&self.parts))
    }
}

/// One-based indices paired with the parts of a diagram.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IndexTuple {
    indices: Vec<u32>,
}

impl IndexTuple {
    pub fn new(indices: Vec<u32>) -> Self {
        Self { indices }
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }
}

/// Label of one basis tensor `e^{⊙λ}_ι` (equivalently of the monomial `x^λ_ι`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisKey {
    diagram: YoungDiagram,
    tuple: IndexTuple,
}

impl BasisKey {
    /// Builds a key, rejecting tuples that are not in canonical form. The empty
    /// diagram takes an empty tuple.
    pub fn new(diagram: YoungDiagram, tuple: IndexTuple) -> Result<Self> {
        let parts = diagram.parts();
        let indices = tuple.indices();
        let invalid = |reason| Error::InvalidTuple {
            parts: parts.to_vec(),
            indices: indices.to_vec(),
            reason,
        };
        if parts.len() != indices.len() {
            return Err(invalid("length differs from the diagram length"));
        }
        if indices.contains(&0) {
            return Err(invalid("indices are one-based"));
        }
        for (a, i) in indices.iter().enumerate() {
            if indices[a + 1..].contains(i) {
                return Err(invalid("indices must be pairwise distinct"));
            }
        }
        for j in 1..parts.len() {
            if parts[j] == parts[j - 1] && indices[j] <= indices[j - 1] {
                return Err(invalid("indices must increase within runs of equal parts"));
            }
        }
        Ok(Self { diagram, tuple })
    }

    pub fn from_parts(parts: &[u32], indices: &[u32]) -> Result<Self> {
        Self::new(
            YoungDiagram::new(parts.to_vec())?,
            IndexTuple::new(indices.to_vec()),
        )
    }

    pub fn vacuum() -> Self {
        Self {
            diagram: YoungDiagram::empty(),
            tuple: IndexTuple::default(),
        }
    }

    /// Key of `e_k^{⊗n}`.
    pub fn power(index: u32, n: u32) -> Self {
        if n == 0 {
            return Self::vacuum();
        }
        Self {
            diagram: YoungDiagram { parts: vec![n] },
            tuple: IndexTuple::new(vec![index]),
        }
    }

    /// Canonical key of the multiset whose multiplicity of `e_{k+1}` is `exps[k]`.
    pub fn from_exponents(exps: &[u32]) -> Self {
        let mut pairs: Vec<(u32, u32)> = exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(k, &e)| (e, k as u32 + 1))
            .collect();
        pairs.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        Self {
            diagram: YoungDiagram {
                parts: pairs.iter().map(|p| p.0).collect(),
            },
            tuple: IndexTuple::new(pairs.iter().map(|p| p.1).collect()),
        }
    }

    /// Multiplicities of `e_1 … e_dim`. Indices above `dim` are an error.
    pub fn exponents(&self, dim: usize) -> Result<Vec<u32>> {
        let mut exps = vec![0u32; dim];
        for (&p, &i) in self.diagram.parts().iter().zip(self.tuple.indices()) {
            let slot = exps.get_mut(i as usize - 1).ok_or(Error::IndexOutOfRange {
                index: i as usize,
                dim,
            })?;
            *slot = p;
        }
        Ok(exps)
    }

    pub fn diagram(&self) -> &YoungDiagram {
        &self.diagram
    }

    pub fn tuple(&self) -> &IndexTuple {
        &self.tuple
    }

    pub fn degree(&self) -> usize {
        self.diagram.weight()
    }

    /// Largest index used, 0 for the vacuum.
    pub fn max_index(&self) -> usize {
        self.tuple.indices().iter().copied().max().unwrap_or(0) as usize
    }

    pub fn is_vacuum(&self) -> bool {
        self.diagram.is_empty()
    }

    /// `(index, part)` pairs.
    pub fn factors(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.tuple
            .indices()
            .iter()
            .copied()
            .zip(self.diagram.parts().iter().copied())
    }

    /// Text form used in JSON files: `λ=[2,1];ι=[1,2]`.
    pub fn label(&self) -> String {
        format!(
            "λ={};ι={}",
            bracketed(self.diagram.parts()),
            bracketed(self.tuple.indices())
        )
    }

    pub fn parse(label: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("malformed basis key {label:?}"));
        let (lam, iota) = label.trim().split_once(';').ok_or_else(bad)?;
        let lam = lam.trim().strip_prefix("λ=").ok_or_else(bad)?;
        let iota = iota.trim().strip_prefix("ι=").ok_or_else(bad)?;
        let parts = parse_list(lam).ok_or_else(bad)?;
        let indices = parse_list(iota).ok_or_else(bad)?;
        Self::from_parts(&parts, &indices)
    }
}

impl Ord for BasisKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.diagram.parts.cmp(&other.diagram.parts))
            .then_with(|| self.tuple.indices.cmp(&other.tuple.indices))
    }
}

impl PartialOrd for BasisKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BasisKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn bracketed(values: &[u32]) -> String {
    let inner: Vec<String> = values.iter().map(u32::to_string).collect();
    format!("[{}]", inner.join(","))
}

fn parse_list(text: &str) -> Option<Vec<u32>> {
    let inner = text.trim().strip_prefix('[')?.strip_suffix(']')?.trim();
    if inner.is_empty() {
        return Some(Vec::new());
    }
    inner.split(',').map(|s| s.trim().parse().ok()).collect()
}

pub fn factorial(n: usize) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * k)
}

fn ratio(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

/// `C_{|λ|,l(λ)} = (l−1)!·|λ|!/(l−1+|λ|)!`.
pub fn constant_c(diagram: &YoungDiagram) -> BigRational {
    let n = diagram.weight();
    let l = diagram.length();
    ratio(factorial(l - 1) * factorial(n), factorial(l - 1 + n))
}

/// Squared norm of `e^{⊙λ}_ι` in the unweighted symmetric Fock space: `λ!/|λ|!`.
pub fn h_norm_sq(diagram: &YoungDiagram) -> BigRational {
    ratio(diagram.factorial(), factorial(diagram.weight()))
}

/// Squared norm in the unitarily weighted space: `C·λ!/|λ|!`.
pub fn w_norm_sq(diagram: &YoungDiagram) -> BigRational {
    constant_c(diagram) * h_norm_sq(diagram)
}

/// Squared norm under the Segal–Bargmann normalisation, `|λ|!` times the
/// unweighted one, i.e. `λ!`.
pub fn bargmann_norm_sq(diagram: &YoungDiagram) -> BigRational {
    BigRational::from_integer(diagram.factorial())
}

pub fn constant_c_f64(diagram: &YoungDiagram) -> f64 {
    let n = diagram.weight() as f64;
    (1..diagram.length()).fold(1.0, |acc, j| acc * j as f64 / (n + j as f64))
}

pub fn h_norm_sq_f64(diagram: &YoungDiagram) -> f64 {
    // λ!/|λ|! as a product of ratios, never forming a large factorial.
    let mut acc = 1.0;
    let mut denom = 0usize;
    for &p in diagram.parts() {
        for k in 1..=p as usize {
            denom += 1;
            acc *= k as f64 / denom as f64;
        }
    }
    acc
}

pub fn w_norm_sq_f64(diagram: &YoungDiagram) -> f64 {
    constant_c_f64(diagram) * h_norm_sq_f64(diagram)
}

pub fn bargmann_norm_sq_f64(diagram: &YoungDiagram) -> f64 {
    diagram
        .parts()
        .iter()
        .map(|&p| (1..=p).map(f64::from).product::<f64>())
        .product()
}

pub fn to_f64(value: &BigRational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// All exponent vectors of length `dim` summing to `n`, in reverse
/// lexicographic order of the exponents.
pub fn compositions(n: usize, dim: usize) -> Vec<Vec<u32>> {
    fn rec(remaining: u32, slot: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slot + 1 == current.len() {
            current[slot] = remaining;
            out.push(current.clone());
            return;
        }
        for e in (0..=remaining).rev() {
            current[slot] = e;
            rec(remaining - e, slot + 1, current, out);
        }
        current[slot] = 0;
    }
    let mut out = Vec::new();
    if dim == 0 {
        return out;
    }
    rec(n as u32, 0, &mut vec![0; dim], &mut out);
    out
}

/// Canonical keys of degree exactly `n` over `dim` indices, sorted.
pub fn keys_of_degree(n: usize, dim: usize) -> Result<Vec<BasisKey>> {
    if dim == 0 {
        return Err(Error::InvalidDimension);
    }
    let mut keys: Vec<BasisKey> = compositions(n, dim)
        .iter()
        .map(|e| BasisKey::from_exponents(e))
        .collect();
    keys.sort();
    Ok(keys)
}

/// Every canonical key with degree at most `max_degree` and indices at most
/// `dim`, ordered by degree and then lexicographically.
pub fn enumerate_keys(max_degree: usize, dim: usize) -> Result<Vec<BasisKey>> {
    let mut all = Vec::new();
    for n in 0..=max_degree {
        all.extend(keys_of_degree(n, dim)?);
    }
    Ok(all)
}

/// Every Young diagram of weight `n`, in decreasing lexicographic order of
/// parts.
pub fn diagrams_of_weight(n: usize) -> Vec<YoungDiagram> {
    fn rec(remaining: u32, cap: u32, current: &mut Vec<u32>, out: &mut Vec<YoungDiagram>) {
        if remaining == 0 {
            out.push(YoungDiagram { parts: current.clone() });
            return;
        }
        for p in (1..=cap.min(remaining)).rev() {
            current.push(p);
            rec(remaining - p, p, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    rec(n as u32, n as u32, &mut Vec::new(), &mut out);
    out
}

/// `binomial(n, k)` as a big integer.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (0..=8).map(|n| diagrams_of_weight(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15, 22]);
        assert_eq!(diagrams_of_weight(3)[1].parts(), &[2, 1]);
        assert!(diagrams_of_weight(0)[0].is_empty());
    }

    fn diagram(parts: &[u32]) -> YoungDiagram {
        YoungDiagram::new(parts.to_vec()).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn constant_examples() {
        for n in 1..=9 {
            assert_eq!(constant_c(&diagram(&[n])), q(1, 1));
        }
        assert_eq!(constant_c(&diagram(&[2, 1])), q(1, 4));
        assert_eq!(constant_c(&diagram(&[1, 1])), q(1, 3));
        assert_eq!(constant_c(&YoungDiagram::empty()), q(1, 1));
    }

    #[test]
    fn norm_examples() {
        assert_eq!(h_norm_sq(&diagram(&[4])), q(1, 1));
        assert_eq!(h_norm_sq(&diagram(&[2, 1])), q(1, 3));
        assert_eq!(h_norm_sq(&diagram(&[1, 1])), q(1, 2));
        assert_eq!(w_norm_sq(&diagram(&[3])), q(1, 1));
        assert_eq!(w_norm_sq(&diagram(&[2, 1])), q(1, 12));
        assert_eq!(w_norm_sq(&diagram(&[1, 1])), q(1, 6));
        assert_eq!(bargmann_norm_sq(&diagram(&[2, 1])), q(2, 1));
    }

    #[test]
    fn empty_diagram_conventions() {
        let e = YoungDiagram::empty();
        assert_eq!(e.weight(), 0);
        assert_eq!(e.length(), 1);
        assert_eq!(h_norm_sq(&e), q(1, 1));
        assert_eq!(w_norm_sq(&e), q(1, 1));
    }

    #[test]
    fn rejects_bad_diagrams_and_tuples() {
        assert!(YoungDiagram::new(vec![1, 2]).is_err());
        assert!(YoungDiagram::new(vec![2, 0]).is_err());
        assert!(BasisKey::from_parts(&[1, 1], &[2, 1]).is_err());
        assert!(BasisKey::from_parts(&[1, 1], &[1, 1]).is_err());
        assert!(BasisKey::from_parts(&[2, 1], &[2, 1]).is_ok());
        assert!(BasisKey::from_parts(&[2], &[1, 2]).is_err());
        assert!(BasisKey::from_parts(&[2], &[0]).is_err());
        assert!(matches!(enumerate_keys(2, 0), Err(Error::InvalidDimension)));
    }

    #[test]
    fn constant_bounds_and_equality_cases() {
        for n in 0..=8 {
            for k in keys_of_degree(n, 8).unwrap() {
                let d = k.diagram();
                let c = constant_c(d);
                assert!(c > q(0, 1) && c <= q(1, 1));
                let one = d.length() == 1 || d.weight() <= 1;
                assert_eq!(c == q(1, 1), one, "{d}");
                assert!(w_norm_sq(d) <= h_norm_sq(d));
            }
        }
    }

    #[test]
    fn float_weights_track_exact_ones() {
        for k in enumerate_keys(12, 5).unwrap() {
            let d = k.diagram();
            for (exact, approx) in [
                (constant_c(d), constant_c_f64(d)),
                (h_norm_sq(d), h_norm_sq_f64(d)),
                (w_norm_sq(d), w_norm_sq_f64(d)),
                (bargmann_norm_sq(d), bargmann_norm_sq_f64(d)),
            ] {
                let e = to_f64(&exact);
                assert!(((e - approx) / e).abs() < 1e-14, "{d}: {e} vs {approx}");
            }
        }
    }

    #[test]
    fn key_enumeration_examples() {
        assert_eq!(enumerate_keys(0, 3).unwrap(), vec![BasisKey::vacuum()]);
        assert_eq!(enumerate_keys(2, 2).unwrap().len(), 6);
        assert_eq!(keys_of_degree(3, 3).unwrap().len(), 10);
    }

    #[test]
    fn enumeration_is_sorted_and_deterministic() {
        let a = enumerate_keys(5, 4).unwrap();
        let b = enumerate_keys(5, 4).unwrap();
        assert_eq!(a, b);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        let labels: Vec<String> = enumerate_keys(2, 2).unwrap().iter().map(|k| k.label()).collect();
        assert_eq!(
            labels,
            [
                "λ=[];ι=[]",
                "λ=[1];ι=[1]",
                "λ=[1];ι=[2]",
                "λ=[1,1];ι=[1,2]",
                "λ=[2];ι=[1]",
                "λ=[2];ι=[2]",
            ]
        );
    }

    #[test]
    fn exponent_round_trip_and_labels() {
        let k = BasisKey::from_exponents(&[1, 2, 0, 1]);
        assert_eq!(k.diagram().parts(), &[2, 1, 1]);
        assert_eq!(k.tuple().indices(), &[2, 1, 4]);
        assert_eq!(k.exponents(4).unwrap(), vec![1, 2, 0, 1]);
        assert!(k.exponents(3).is_err());
        assert_eq!(BasisKey::parse(&k.label()).unwrap(), k);
        assert_eq!(BasisKey::parse("λ=[];ι=[]").unwrap(), BasisKey::vacuum());
        assert!(BasisKey::parse("λ=[1,1];ι=[2,1]").is_err());
        assert!(BasisKey::parse("nonsense").is_err());
    }
}
