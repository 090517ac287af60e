//! Sparse multivariate polynomials in `x_1 … x_d` with complex coefficients.
//!
//! The Hardy-space functions are polynomials once truncated, so shifts,
//! exponential multipliers and derivatives all reduce to finite coefficient
//! manipulations here.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::fock::EVector;

#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<Vec<u32>, Complex64>,
}

fn total(exps: &[u32]) -> usize {
    exps.iter().map(|&e| e as usize).sum()
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(vec![0; dim], c);
        p
    }

    pub fn monomial(exps: Vec<u32>, c: Complex64) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    /// `Σ c_k x_k`.
    pub fn linear(coeffs: &[Complex64]) -> Self {
        let dim = coeffs.len();
        let mut p = Self::zero(dim);
        for (k, &c) in coeffs.iter().enumerate() {
            let mut e = vec![0; dim];
            e[k] = 1;
            p.add_term(e, c);
        }
        p
    }

    /// The linear form `x ↦ ⟨x|a⟩ = Σ x_k·conj(a_k)`.
    pub fn pairing_with(a: &EVector) -> Self {
        Self::linear(&a.conj().coords)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: Complex64) {
        debug_assert_eq!(exps.len(), self.dim);
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(exps).or_insert_with(Complex64::zero);
        *slot += c;
    }

    pub fn coeff(&self, exps: &[u32]) -> Complex64 {
        self.terms.get(exps).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Complex64)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|c| c.is_zero())
    }

    /// Total degree of the highest nonzero term, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, _)| total(e))
            .max()
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.scale(-Complex64::one()))
    }

    pub fn scale(&self, s: Complex64) -> Polynomial {
        Polynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        }
    }

    /// Drops every term above degree `cap`; the flag reports whether anything
    /// nonzero was lost.
    pub fn truncate(&self, cap: usize) -> (Polynomial, bool) {
        let mut dropped = false;
        let mut out = Polynomial::zero(self.dim);
        for (e, c) in &self.terms {
            if total(e) <= cap {
                out.terms.insert(e.clone(), *c);
            } else if !c.is_zero() {
                dropped = true;
            }
        }
        (out, dropped)
    }

    /// Product truncated at degree `cap`, with the overflow flag.
    pub fn mul(&self, other: &Polynomial, cap: usize) -> (Polynomial, bool) {
        let mut by_degree: Vec<Vec<(&Vec<u32>, Complex64)>> = Vec::new();
        for (e, c) in &other.terms {
            if c.is_zero() {
                continue;
            }
            let d = total(e);
            if by_degree.len() <= d {
                by_degree.resize_with(d + 1, Vec::new);
            }
            by_degree[d].push((e, *c));
        }
        let mut dropped = false;
        let mut acc: HashMap<Vec<u32>, Complex64> = HashMap::new();
        let mut e = vec![0u32; self.dim];
        for (ea, ca) in &self.terms {
            if ca.is_zero() {
                continue;
            }
            let da = total(ea);
            for (db, bucket) in by_degree.iter().enumerate() {
                if da + db > cap {
                    dropped |= !bucket.is_empty();
                    continue;
                }
                for (eb, cb) in bucket {
                    for (slot, (x, y)) in e.iter_mut().zip(ea.iter().zip(eb.iter())) {
                        *slot = x + y;
                    }
                    *acc.entry(e.clone()).or_insert_with(Complex64::zero) += ca * cb;
                }
            }
        }
        let out = Polynomial {
            dim: self.dim,
            terms: acc.into_iter().collect(),
        };
        (out, dropped)
    }

    pub fn evaluate(&self, x: &EVector) -> Complex64 {
        self.terms.iter().map(|(e, c)| c * x.monomial(e)).sum()
    }

    /// `∂/∂x_k`, `k` zero-based.
    pub fn partial(&self, k: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.dim);
        for (e, c) in &self.terms {
            if e[k] > 0 {
                let mut d = e.clone();
                d[k] -= 1;
                out.add_term(d, c * e[k] as f64);
            }
        }
        out
    }

    /// `(Σ a_k ∂_k)^m f`, i.e. `d^m/dt^m f(x + t a)` at `t = 0`.
    pub fn directional_derivative(&self, a: &EVector, m: usize) -> Polynomial {
        let mut current = self.clone();
        for _ in 0..m {
            let mut next = Polynomial::zero(self.dim);
            for (k, ak) in a.coords.iter().enumerate() {
                if !ak.is_zero() {
                    next = next.add(&current.partial(k).scale(*ak));
                }
            }
            current = next;
        }
        current
    }

    /// `x ↦ f(x + a)` by binomial transport one variable at a time.
    pub fn shift(&self, a: &EVector) -> Polynomial {
        let mut current = self.clone();
        for (k, ak) in a.coords.iter().enumerate() {
            if ak.is_zero() {
                continue;
            }
            let mut next = Polynomial::zero(self.dim);
            for (e, c) in &current.terms {
                let n = e[k];
                // Pascal row for (x_k + a_k)^n, built incrementally.
                let mut binom = 1.0;
                for j in 0..=n {
                    let mut f = e.clone();
                    f[k] = n - j;
                    next.add_term(f, c * binom * ak.powu(j));
                    binom = binom * (n - j) as f64 / (j + 1) as f64;
                }
            }
            current = next;
        }
        current
    }

    /// Degree `≤ cap` part of `x ↦ f(x + a)`, pruning terms that can no
    /// longer fall under the cap. Exponents of variables already transported
    /// (or with `a_k = 0`) never decrease again, so their sum bounds the
    /// final degree from below.
    pub fn shift_capped(&self, a: &EVector, cap: usize) -> Polynomial {
        let mut settled: Vec<bool> = a.coords.iter().map(|c| c.is_zero()).collect();
        let low = |e: &[u32], settled: &[bool]| -> usize {
            e.iter().zip(settled).filter(|(_, &s)| s).map(|(&x, _)| x as usize).sum()
        };
        let mut current = Polynomial::zero(self.dim);
        for (e, c) in &self.terms {
            if low(e, &settled) <= cap {
                current.add_term(e.clone(), *c);
            }
        }
        for (k, ak) in a.coords.iter().enumerate() {
            if ak.is_zero() {
                continue;
            }
            settled[k] = true;
            let mut next = Polynomial::zero(self.dim);
            for (e, c) in &current.terms {
                let n = e[k];
                let base = low(e, &settled) - n as usize;
                let mut binom = 1.0;
                for j in 0..=n {
                    if base + (n - j) as usize <= cap {
                        let mut f = e.clone();
                        f[k] = n - j;
                        next.add_term(f, c * binom * ak.powu(j));
                    }
                    binom = binom * (n - j) as f64 / (j + 1) as f64;
                }
            }
            current = next;
        }
        current
    }

    /// `exp(Σ c_k x_k)` up to degree `cap`.
    pub fn exp_linear(coeffs: &[Complex64], cap: usize) -> Polynomial {
        let dim = coeffs.len();
        let mut out = Polynomial::constant(dim, Complex64::one());
        // Multiply in one univariate series exp(c_k x_k) per live variable.
        for (k, ck) in coeffs.iter().enumerate() {
            if ck.is_zero() {
                continue;
            }
            let mut next = Polynomial::zero(dim);
            for (e, c) in &out.terms {
                let mut term = *c;
                let mut f = e.clone();
                for j in 0..=cap - total(e) {
                    if j > 0 {
                        term *= ck / j as f64;
                        f[k] += 1;
                    }
                    next.add_term(f.clone(), term);
                }
            }
            out = next;
        }
        out
    }

    /// `f(x)·exp⟨x|a⟩` up to degree `cap`.
    pub fn mul_exp_pairing(&self, a: &EVector, cap: usize) -> (Polynomial, bool) {
        // exp⟨x|a⟩ factors over variables, so multiply in one univariate
        // series at a time instead of forming the full product.
        let mut p = self.clone();
        let mut dropped = false;
        for (k, ak) in a.coords.iter().enumerate() {
            let ck = ak.conj();
            if ck.is_zero() {
                continue;
            }
            let mut next = Polynomial::zero(self.dim);
            for (e, c) in &p.terms {
                let deg = total(e);
                if deg > cap {
                    dropped = true;
                    continue;
                }
                let mut term = *c;
                let mut f = e.clone();
                for j in 0..=cap - deg {
                    if j > 0 {
                        term *= ck / j as f64;
                        f[k] += 1;
                    }
                    next.add_term(f.clone(), term);
                }
            }
            p = next;
        }
        // The exponential series itself has terms of every degree; overflow is
        // real whenever the input is nonzero and the multiplier is nontrivial.
        let nontrivial = !a.is_zero() && !self.is_zero();
        (p, dropped || nontrivial)
    }

    pub fn max_abs_diff(&self, other: &Polynomial) -> f64 {
        let mut worst: f64 = 0.0;
        for (e, c) in &self.terms {
            worst = worst.max((c - other.coeff(e)).norm());
        }
        for (e, c) in &other.terms {
            if !self.terms.contains_key(e) {
                worst = worst.max(c.norm());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn x1x2() -> Polynomial {
        Polynomial::monomial(vec![1, 1, 0], c(1.0, 0.0))
    }

    #[test]
    fn shift_by_basis_vector() {
        let shifted = x1x2().shift(&EVector::basis(2, 3));
        let expected = x1x2().add(&Polynomial::monomial(vec![1, 0, 0], c(1.0, 0.0)));
        assert!(shifted.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn capped_shift_is_the_truncated_shift() {
        let f = Polynomial::exp_linear(&[c(0.4, 0.2), c(-0.3, 0.0), c(0.0, 0.7)], 9);
        let a = EVector::new(vec![c(0.3, 0.1), c(0.0, 0.0), c(0.2, -0.5)]);
        for cap in [0, 3, 9] {
            let full = f.shift(&a).truncate(cap).0;
            assert!(f.shift_capped(&a, cap).max_abs_diff(&full) < 1e-14);
        }
    }

    #[test]
    fn shift_matches_pointwise_evaluation() {
        let f = x1x2()
            .add(&Polynomial::monomial(vec![3, 0, 2], c(0.5, -1.0)))
            .add(&Polynomial::constant(3, c(2.0, 0.0)));
        let a = EVector::new(vec![c(0.3, 0.1), c(-0.7, 0.0), c(0.2, 0.9)]);
        let x = EVector::new(vec![c(1.1, -0.4), c(0.0, 0.5), c(-0.3, 0.2)]);
        let lhs = f.shift(&a).evaluate(&x);
        let rhs = f.evaluate(&x.add(&a));
        assert!((lhs - rhs).norm() < 1e-13);
    }

    #[test]
    fn derivative_examples() {
        let sq = Polynomial::monomial(vec![2, 0, 0], c(1.0, 0.0));
        let d = sq.directional_derivative(&EVector::basis(1, 3), 1);
        assert_eq!(d, Polynomial::monomial(vec![1, 0, 0], c(2.0, 0.0)));
        let d2 = x1x2().directional_derivative(&EVector::from_real(&[1.0, 1.0, 0.0]), 2);
        assert!(d2.max_abs_diff(&Polynomial::constant(3, c(2.0, 0.0))) < 1e-15);
        assert!(Polynomial::constant(3, c(4.0, 0.0))
            .directional_derivative(&EVector::basis(1, 3), 1)
            .is_zero());
    }

    #[test]
    fn exp_series_coefficients() {
        let e = Polynomial::exp_linear(&[c(1.0, 0.0), c(0.0, 0.0)], 6);
        for n in 0..=6u32 {
            let fact: f64 = (1..=n).map(f64::from).product();
            assert!((e.coeff(&[n, 0]) - c(1.0 / fact, 0.0)).norm() < 1e-15);
        }
        assert_eq!(e.degree(), Some(6));
    }

    #[test]
    fn truncated_product_flags_overflow() {
        let p = Polynomial::monomial(vec![2, 0, 0], c(1.0, 0.0));
        let (q, dropped) = p.mul(&p, 3);
        assert!(q.is_zero() && dropped);
        let (q, dropped) = p.mul(&p, 4);
        assert!(!dropped);
        assert_eq!(q.coeff(&[4, 0, 0]), c(1.0, 0.0));
    }
}
