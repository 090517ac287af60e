//! Truncated symmetric Fock space: sparse coefficient vectors over canonical
//! basis keys, the weighted and unweighted inner products, tensor powers,
//! exponential vectors and polarization.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partitions::{self, BasisKey, YoungDiagram};

/// Finite model of `E = ℂ^dim` and of the Fock space up to degree `max_degree`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TruncationSpec {
    pub max_degree: usize,
    pub dim: usize,
}

impl TruncationSpec {
    pub fn new(max_degree: usize, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension);
        }
        Ok(Self { max_degree, dim })
    }

    pub fn with_max_degree(self, max_degree: usize) -> Self {
        Self { max_degree, ..self }
    }

    pub fn contains(&self, key: &BasisKey) -> bool {
        key.degree() <= self.max_degree && key.max_index() <= self.dim
    }

    /// Number of basis keys of degree exactly `n`: `binomial(n+dim−1, n)`.
    pub fn block_len(&self, n: usize) -> usize {
        let mut acc: u128 = 1;
        for k in 1..=n as u128 {
            acc = acc * (k + self.dim as u128 - 1) / k;
        }
        acc as usize
    }
}

/// Which Gram table an inner product uses.
///
/// `W` and `H` are the weighted and unweighted Fock norms. `Bargmann` rescales
/// the unweighted norm on degree `n` by `n!`; it is the pairing under which the
/// coherent-state functions are exactly the Segal–Bargmann transform, so that
/// creation becomes multiplication and its adjoint becomes differentiation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pairing {
    W,
    H,
    Bargmann,
}

impl Pairing {
    pub const ALL: [Pairing; 3] = [Pairing::W, Pairing::H, Pairing::Bargmann];

    pub fn norm_sq(self, diagram: &YoungDiagram) -> f64 {
        match self {
            Pairing::W => partitions::w_norm_sq_f64(diagram),
            Pairing::H => partitions::h_norm_sq_f64(diagram),
            Pairing::Bargmann => partitions::bargmann_norm_sq_f64(diagram),
        }
    }

    pub fn norm_sq_exact(self, diagram: &YoungDiagram) -> BigRational {
        match self {
            Pairing::W => partitions::w_norm_sq(diagram),
            Pairing::H => partitions::h_norm_sq(diagram),
            Pairing::Bargmann => partitions::bargmann_norm_sq(diagram),
        }
    }

    /// Factor `ρ` with `⟨ε(x)|e^α⟩ = ρ(α)·x^α`. The function attached to a
    /// Fock vector `ψ` has Taylor coefficients `conj(ψ_α)·ρ(α)`.
    pub fn kernel_factor(self, diagram: &YoungDiagram) -> f64 {
        let n_fact: f64 = (1..=diagram.weight()).map(|k| k as f64).product();
        match self {
            Pairing::W => partitions::constant_c_f64(diagram) / n_fact,
            Pairing::H => 1.0 / n_fact,
            Pairing::Bargmann => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Pairing::W => "W",
            Pairing::H => "H",
            Pairing::Bargmann => "BARGMANN",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text.trim().to_ascii_uppercase().as_str() {
            "W" => Ok(Pairing::W),
            "H" => Ok(Pairing::H),
            "B" | "BARGMANN" => Ok(Pairing::Bargmann),
            other => Err(Error::Parse(format!("unknown pairing {other:?}"))),
        }
    }
}

impl fmt::Display for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A vector of `E = ℂ^d` by its coordinates `x_k = ⟨x|e_k⟩`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EVector {
    pub coords: Vec<Complex64>,
}

impl EVector {
    pub fn new(coords: Vec<Complex64>) -> Self {
        Self { coords }
    }

    pub fn from_real(coords: &[f64]) -> Self {
        Self::new(coords.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(vec![Complex64::zero(); dim])
    }

    /// `e_k`, one-based.
    pub fn basis(k: usize, dim: usize) -> Self {
        let mut v = Self::zero(dim);
        v.coords[k - 1] = Complex64::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// `⟨self|other⟩ = Σ x_k·conj(y_k)`.
    pub fn inner(&self, other: &EVector) -> Complex64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(x, y)| x * y.conj())
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.coords.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn add(&self, other: &EVector) -> EVector {
        EVector::new(self.coords.iter().zip(&other.coords).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, other: &EVector) -> EVector {
        EVector::new(self.coords.iter().zip(&other.coords).map(|(x, y)| x - y).collect())
    }

    pub fn scale(&self, s: Complex64) -> EVector {
        EVector::new(self.coords.iter().map(|x| x * s).collect())
    }

    pub fn conj(&self) -> EVector {
        EVector::new(self.coords.iter().map(|x| x.conj()).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// `x^α = Π x_k^{α_k}`, with `0⁰ = 1`.
    pub fn monomial(&self, exps: &[u32]) -> Complex64 {
        exps.iter()
            .zip(&self.coords)
            .filter(|(&e, _)| e > 0)
            .map(|(&e, x)| x.powu(e))
            .product()
    }

    /// `x^λ_ι` for a basis key.
    pub fn key_monomial(&self, key: &BasisKey) -> Complex64 {
        key.factors()
            .map(|(i, p)| self.coords.get(i as usize - 1).copied().unwrap_or_default().powu(p))
            .product()
    }
}

/// Canonical keys of each degree together with their positions, used to lay
/// out dense degree blocks.
#[derive(Clone, Debug)]
pub struct DegreeBasis {
    spec: TruncationSpec,
    keys: Vec<Vec<BasisKey>>,
    positions: Vec<HashMap<BasisKey, usize>>,
}

impl DegreeBasis {
    pub fn new(spec: TruncationSpec) -> Result<Self> {
        let mut keys = Vec::with_capacity(spec.max_degree + 1);
        let mut positions = Vec::with_capacity(spec.max_degree + 1);
        for n in 0..=spec.max_degree {
            let block = partitions::keys_of_degree(n, spec.dim)?;
            positions.push(block.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect());
            keys.push(block);
        }
        Ok(Self { spec, keys, positions })
    }

    pub fn spec(&self) -> TruncationSpec {
        self.spec
    }

    pub fn keys(&self, degree: usize) -> &[BasisKey] {
        &self.keys[degree]
    }

    pub fn position(&self, key: &BasisKey) -> Option<usize> {
        self.positions.get(key.degree())?.get(key).copied()
    }

    pub fn block_len(&self, degree: usize) -> usize {
        self.keys.get(degree).map_or(0, Vec::len)
    }

    /// Diagonal of the Gram matrix on degree `n`.
    pub fn gram(&self, pairing: Pairing, degree: usize) -> Vec<f64> {
        self.keys[degree]
            .iter()
            .map(|k| pairing.norm_sq(k.diagram()))
            .collect()
    }

    /// Dense coordinates of the degree-`n` component.
    pub fn block_of(&self, psi: &FockVector, degree: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::zero(); self.block_len(degree)];
        for (k, c) in psi.coeffs.range(degree_range(degree)) {
            if let Some(p) = self.position(k) {
                out[p] = *c;
            }
        }
        out
    }
}

fn degree_range(degree: usize) -> std::ops::RangeInclusive<BasisKey> {
    // Keys are ordered by degree first, so the block is a contiguous range
    // between the smallest and largest keys of that degree.
    let lo = if degree == 0 {
        BasisKey::vacuum()
    } else {
        BasisKey::from_parts(&vec![1; degree], &(1..=degree as u32).collect::<Vec<_>>())
            .expect("all-ones diagram is valid")
    };
    let hi = BasisKey::power(u32::MAX, degree as u32);
    lo..=hi
}

/// Sparse element of the truncated Fock space.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    spec: TruncationSpec,
    coeffs: BTreeMap<BasisKey, Complex64>,
}

impl FockVector {
    pub fn zero(spec: TruncationSpec) -> Self {
        Self {
            spec,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn vacuum(spec: TruncationSpec) -> Self {
        Self::basis(spec, BasisKey::vacuum()).expect("vacuum fits every truncation")
    }

    pub fn basis(spec: TruncationSpec, key: BasisKey) -> Result<Self> {
        let mut v = Self::zero(spec);
        v.set(key, Complex64::one())?;
        Ok(v)
    }

    pub fn from_terms<I>(spec: TruncationSpec, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BasisKey, Complex64)>,
    {
        let mut v = Self::zero(spec);
        for (k, c) in terms {
            v.add_to(k, c)?;
        }
        Ok(v)
    }

    pub fn spec(&self) -> TruncationSpec {
        self.spec
    }

    fn check(&self, key: &BasisKey) -> Result<()> {
        if key.degree() > self.spec.max_degree {
            return Err(Error::DegreeOverflow {
                degree: key.degree(),
                max_degree: self.spec.max_degree,
            });
        }
        if key.max_index() > self.spec.dim {
            return Err(Error::IndexOutOfRange {
                index: key.max_index(),
                dim: self.spec.dim,
            });
        }
        Ok(())
    }

    pub fn set(&mut self, key: BasisKey, value: Complex64) -> Result<()> {
        self.check(&key)?;
        if value.is_zero() {
            self.coeffs.remove(&key);
        } else {
            self.coeffs.insert(key, value);
        }
        Ok(())
    }

    pub fn add_to(&mut self, key: BasisKey, value: Complex64) -> Result<()> {
        self.check(&key)?;
        let entry = self.coeffs.entry(key).or_insert_with(Complex64::zero);
        *entry += value;
        Ok(())
    }

    pub fn get(&self, key: &BasisKey) -> Complex64 {
        self.coeffs.get(key).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisKey, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Highest degree carrying a nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, _)| k.degree())
            .max()
    }

    /// Degree of a homogeneous vector; `None` if several degrees occur. The
    /// zero vector counts as homogeneous of degree 0.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut degrees = self
            .coeffs
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, _)| k.degree());
        let first = degrees.next().unwrap_or(0);
        degrees.all(|d| d == first).then_some(first)
    }

    /// `ψ_n`.
    pub fn component(&self, degree: usize) -> FockVector {
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(k, _)| k.degree() == degree)
            .map(|(k, c)| (k.clone(), *c))
            .collect();
        Self { spec: self.spec, coeffs }
    }

    /// Components of degree at most `degree`.
    pub fn up_to(&self, degree: usize) -> FockVector {
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(k, _)| k.degree() <= degree)
            .map(|(k, c)| (k.clone(), *c))
            .collect();
        Self { spec: self.spec, coeffs }
    }

    /// Same coefficients under a different truncation; keys that no longer fit
    /// are dropped and reported through the returned flag.
    pub fn retruncate(&self, spec: TruncationSpec) -> Result<(FockVector, bool)> {
        if spec.dim < self.spec.dim && self.coeffs.keys().any(|k| k.max_index() > spec.dim) {
            return Err(Error::DimensionMismatch {
                expected: self.spec.dim,
                got: spec.dim,
            });
        }
        let mut dropped = false;
        let mut coeffs = BTreeMap::new();
        for (k, c) in &self.coeffs {
            if k.degree() <= spec.max_degree {
                coeffs.insert(k.clone(), *c);
            } else if !c.is_zero() {
                dropped = true;
            }
        }
        Ok((Self { spec, coeffs }, dropped))
    }

    fn same_spec(&self, other: &FockVector) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch(self.spec, other.spec));
        }
        Ok(())
    }

    pub fn add(&self, other: &FockVector) -> Result<FockVector> {
        self.same_spec(other)?;
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            *out.coeffs.entry(k.clone()).or_insert_with(Complex64::zero) += c;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &FockVector) -> Result<FockVector> {
        self.add(&other.scale(-Complex64::one()))
    }

    pub fn scale(&self, s: Complex64) -> FockVector {
        Self {
            spec: self.spec,
            coeffs: self.coeffs.iter().map(|(k, c)| (k.clone(), c * s)).collect(),
        }
    }

    /// Key-wise complex conjugate.
    pub fn conj(&self) -> FockVector {
        Self {
            spec: self.spec,
            coeffs: self.coeffs.iter().map(|(k, c)| (k.clone(), c.conj())).collect(),
        }
    }

    pub fn map_coeffs(&self, f: impl Fn(&BasisKey, Complex64) -> Complex64) -> FockVector {
        Self {
            spec: self.spec,
            coeffs: self.coeffs.iter().map(|(k, c)| (k.clone(), f(k, *c))).collect(),
        }
    }

    pub fn norm_sq(&self, pairing: Pairing) -> f64 {
        self.coeffs
            .iter()
            .map(|(k, c)| c.norm_sqr() * pairing.norm_sq(k.diagram()))
            .sum()
    }

    pub fn norm(&self, pairing: Pairing) -> f64 {
        self.norm_sq(pairing).sqrt()
    }

    /// Largest coefficient-wise difference.
    pub fn max_abs_diff(&self, other: &FockVector) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, c) in &self.coeffs {
            worst = worst.max((c - other.get(k)).norm());
        }
        for (k, c) in &other.coeffs {
            if !self.coeffs.contains_key(k) {
                worst = worst.max(c.norm());
            }
        }
        worst
    }

    /// Serialises as `{"spec": {...}, "coeffs": {"λ=[..];ι=[..]": [re, im]}}`.
    pub fn to_json(&self) -> serde_json::Value {
        let file = FockFile {
            spec: self.spec,
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, c)| (k.label(), [c.re, c.im]))
                .collect(),
        };
        serde_json::to_value(file).expect("plain data always serialises")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("plain data always serialises")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let file: FockFile = serde_json::from_value(value.clone())?;
        let spec = TruncationSpec::new(file.spec.max_degree, file.spec.dim)?;
        let mut v = Self::zero(spec);
        for (label, [re, im]) in file.coeffs {
            v.set(BasisKey::parse(&label)?, Complex64::new(re, im))?;
        }
        Ok(v)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(text)?)
    }
}

#[derive(Serialize, Deserialize)]
struct FockFile {
    spec: TruncationSpec,
    coeffs: BTreeMap<String, [f64; 2]>,
}

/// `Σ ψ_key·conj(φ_key)·‖e_key‖²` over shared keys.
pub fn inner(pairing: Pairing, psi: &FockVector, phi: &FockVector) -> Result<Complex64> {
    psi.same_spec(phi)?;
    Ok(psi
        .coeffs
        .iter()
        .filter_map(|(k, c)| {
            phi.coeffs
                .get(k)
                .map(|d| c * d.conj() * pairing.norm_sq(k.diagram()))
        })
        .sum())
}

/// Multinomial `n!/α!` as a float.
pub fn multinomial(exps: &[u32]) -> f64 {
    let mut acc = 1.0;
    let mut total = 0u32;
    for &e in exps {
        for k in 1..=e {
            total += 1;
            acc *= total as f64 / k as f64;
        }
    }
    acc
}

fn exps_of(key: &BasisKey, dim: usize) -> Vec<u32> {
    key.exponents(dim).expect("keys come from the matching dimension")
}

/// `x^{⊗n}`: coefficient `(n!/α!)·x^α` on each key of degree `n`.
pub fn tensor_power(spec: TruncationSpec, x: &EVector, n: usize) -> Result<FockVector> {
    if n > spec.max_degree {
        return Err(Error::DegreeOverflow {
            degree: n,
            max_degree: spec.max_degree,
        });
    }
    if x.dim() != spec.dim {
        return Err(Error::DimensionMismatch {
            expected: spec.dim,
            got: x.dim(),
        });
    }
    let mut v = FockVector::zero(spec);
    for key in partitions::keys_of_degree(n, spec.dim)? {
        let exps = exps_of(&key, spec.dim);
        let c = x.monomial(&exps) * multinomial(&exps);
        v.set(key, c)?;
    }
    Ok(v)
}

/// `ε(x) = ⊕_{n≤N} x^{⊗n}/n!`, coefficient `x^α/α!` on each key.
pub fn exponential_vector(spec: TruncationSpec, x: &EVector) -> Result<FockVector> {
    if x.dim() != spec.dim {
        return Err(Error::DimensionMismatch {
            expected: spec.dim,
            got: x.dim(),
        });
    }
    let mut v = FockVector::zero(spec);
    for key in partitions::enumerate_keys(spec.max_degree, spec.dim)? {
        let exps = exps_of(&key, spec.dim);
        let alpha_fact: f64 = exps
            .iter()
            .map(|&e| (1..=e).map(f64::from).product::<f64>())
            .product();
        v.set(key, x.monomial(&exps) / alpha_fact)?;
    }
    Ok(v)
}

/// `Σ_{n>N} s^n/n!`, the part of `e^s` dropped by truncating at degree `N`.
pub fn exponential_tail(s: f64, max_degree: usize) -> f64 {
    let mut term: f64 = (1..=max_degree + 1).fold(1.0, |acc, k| acc * s / k as f64);
    let mut sum: f64 = 0.0;
    let mut k = max_degree + 1;
    while term > f64::EPSILON * sum.max(f64::MIN_POSITIVE) || k <= max_degree + 2 {
        sum += term;
        k += 1;
        term *= s / k as f64;
        if k > max_degree + 10_000 {
            break;
        }
    }
    sum
}

/// `φ ⊙ ψ`, bilinear extension of `e^α ⊙ e^β = e^{α+β}`.
///
/// With this normalisation `x^{⊗m} ⊙ x^{⊗k} = x^{⊗(m+k)}` exactly.
pub fn symmetric_product(phi: &FockVector, psi: &FockVector) -> Result<FockVector> {
    phi.same_spec(psi)?;
    let spec = phi.spec;
    let (m, k) = match (phi.homogeneous_degree(), psi.homogeneous_degree()) {
        (Some(m), Some(k)) => (m, k),
        _ => return Err(Error::NotHomogeneous),
    };
    if !phi.is_empty() && !psi.is_empty() && m + k > spec.max_degree {
        return Err(Error::DegreeOverflow {
            degree: m + k,
            max_degree: spec.max_degree,
        });
    }
    let mut out = FockVector::zero(spec);
    for (ka, ca) in &phi.coeffs {
        let ea = exps_of(ka, spec.dim);
        for (kb, cb) in &psi.coeffs {
            let eb = exps_of(kb, spec.dim);
            let sum: Vec<u32> = ea.iter().zip(&eb).map(|(a, b)| a + b).collect();
            out.add_to(BasisKey::from_exponents(&sum), ca * cb)?;
        }
    }
    Ok(out)
}

/// The vectors `x_1, …, x_n` (as one-based indices) that polarization
/// symmetrises to reach `e^{⊙λ}_ι`.
fn polarization_indices(key: &BasisKey) -> Vec<u32> {
    key.factors()
        .flat_map(|(i, p)| std::iter::repeat_n(i, p as usize))
        .collect()
}

/// `1/(2ⁿn!)·Σ_θ θ₁…θ_n·a_θ^{⊗n}` with `a_θ = Σ θ_i x_i`, evaluated in floats.
pub fn polarization(spec: TruncationSpec, key: &BasisKey) -> Result<FockVector> {
    let n = key.degree();
    if n > spec.max_degree {
        return Err(Error::DegreeOverflow {
            degree: n,
            max_degree: spec.max_degree,
        });
    }
    let idx = polarization_indices(key);
    let norm = 1.0 / ((1u64 << n) as f64 * (1..=n).map(|k| k as f64).product::<f64>());
    let mut out = FockVector::zero(spec);
    for mask in 0u64..(1 << n) {
        let mut a = EVector::zero(spec.dim);
        let mut sign = 1.0;
        for (bit, &i) in idx.iter().enumerate() {
            let theta = if mask >> bit & 1 == 1 { -1.0 } else { 1.0 };
            sign *= theta;
            a.coords[i as usize - 1] += theta;
        }
        out = out.add(&tensor_power(spec, &a, n)?.scale(Complex64::new(sign * norm, 0.0)))?;
    }
    Ok(out.prune(0.0))
}

/// Polarization in exact rational arithmetic. Every coefficient of `a_θ^{⊗n}`
/// is an integer here because the `x_i` are basis vectors.
pub fn polarization_exact(
    spec: TruncationSpec,
    key: &BasisKey,
) -> Result<BTreeMap<BasisKey, BigRational>> {
    let n = key.degree();
    if n > spec.max_degree {
        return Err(Error::DegreeOverflow {
            degree: n,
            max_degree: spec.max_degree,
        });
    }
    let idx = polarization_indices(key);
    let keys = partitions::keys_of_degree(n, spec.dim)?;
    let mut acc: BTreeMap<BasisKey, BigInt> = BTreeMap::new();
    for mask in 0u64..(1 << n) {
        let mut a = vec![BigInt::zero(); spec.dim];
        let mut sign = BigInt::one();
        for (bit, &i) in idx.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                sign = -sign;
                a[i as usize - 1] -= 1;
            } else {
                a[i as usize - 1] += 1;
            }
        }
        for k in &keys {
            let exps = exps_of(k, spec.dim);
            let mono: BigInt = exps
                .iter()
                .zip(&a)
                .map(|(&e, x)| num_traits::pow(x.clone(), e as usize))
                .product();
            let alpha_fact: BigInt = exps.iter().map(|&e| partitions::factorial(e as usize)).product();
            let term = &sign * partitions::factorial(n) / alpha_fact * mono;
            *acc.entry(k.clone()).or_insert_with(BigInt::zero) += term;
        }
    }
    let denom = BigInt::from(1u64 << n) * partitions::factorial(n);
    Ok(acc
        .into_iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(k, v)| (k, BigRational::new(v, denom.clone())))
        .collect())
}

impl FockVector {
    /// Drops coefficients with modulus at most `threshold`.
    pub fn prune(mut self, threshold: f64) -> FockVector {
        self.coeffs.retain(|_, c| c.norm() > threshold);
        self
    }
}

/// `⟨x^{⊗n}|ψ_n⟩` under the unweighted pairing: `Σ conj(ψ_α)·x^α`.
pub fn hs_polynomial_eval(psi: &FockVector, x: &EVector) -> Result<Complex64> {
    let n = psi.homogeneous_degree().ok_or(Error::NotHomogeneous)?;
    let power = tensor_power(psi.spec, x, n)?;
    inner(Pairing::H, &power, psi)
}
