//! Functions `ψ*(x) = ⟨ε(x)|ψ⟩` attached to Fock vectors, and the shift and
//! exponential-multiplier groups acting on them.
//!
//! A function is stored as its Fock vector together with the pairing used to
//! evaluate it. Every operation goes through the Taylor polynomial
//! `Σ conj(ψ_α)·ρ(α)·x^α`, so shifts, multipliers and derivatives are exact
//! polynomial manipulations.

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fock::{exponential_vector, inner, EVector, FockVector, Pairing, TruncationSpec};
use crate::operators::OperatorMatrix;
use crate::partitions::BasisKey;
use crate::poly::Polynomial;

/// Extra degrees carried when an operator that lowers degree follows one that
/// raises it. The dropped tail is of order `(‖a‖+‖b‖)^PAD/PAD!`.
pub const WORK_PAD: usize = 24;

/// A value together with a flag telling whether truncation dropped anything.
#[derive(Clone, Debug, PartialEq)]
pub struct Flagged<T> {
    pub value: T,
    pub overflow: bool,
}

impl<T> Flagged<T> {
    pub fn exact(value: T) -> Self {
        Self { value, overflow: false }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HardyWFunction {
    fock: FockVector,
    pairing: Pairing,
}

/// `Σ conj(ψ_α)·ρ(α)·x^α`.
pub fn fock_to_polynomial(psi: &FockVector, pairing: Pairing) -> Polynomial {
    let dim = psi.spec().dim;
    let mut p = Polynomial::zero(dim);
    for (k, c) in psi.iter() {
        let exps = k.exponents(dim).expect("keys fit the spec");
        p.add_term(exps, c.conj() * pairing.kernel_factor(k.diagram()));
    }
    p
}

/// Inverse of [`fock_to_polynomial`]; terms above the truncation degree are
/// dropped and flagged.
pub fn polynomial_to_fock(
    spec: TruncationSpec,
    pairing: Pairing,
    poly: &Polynomial,
) -> Result<Flagged<FockVector>> {
    if poly.dim() != spec.dim {
        return Err(Error::DimensionMismatch {
            expected: spec.dim,
            got: poly.dim(),
        });
    }
    let mut psi = FockVector::zero(spec);
    let mut overflow = false;
    for (exps, c) in poly.terms() {
        if c.is_zero() {
            continue;
        }
        let key = BasisKey::from_exponents(exps);
        if key.degree() > spec.max_degree {
            overflow = true;
            continue;
        }
        let rho = pairing.kernel_factor(key.diagram());
        psi.add_to(key, (c / rho).conj())?;
    }
    Ok(Flagged {
        value: psi,
        overflow,
    })
}

/// `‖·‖_W` of the function with the given Taylor polynomial, restricted to the
/// truncation degree.
pub fn polynomial_w_norm(spec: TruncationSpec, pairing: Pairing, poly: &Polynomial) -> Result<f64> {
    let (p, _) = poly.truncate(spec.max_degree);
    Ok(polynomial_to_fock(spec, pairing, &p)?.value.norm(Pairing::W))
}

impl HardyWFunction {
    pub fn new(fock: FockVector, pairing: Pairing) -> Self {
        Self { fock, pairing }
    }

    pub fn constant(spec: TruncationSpec, pairing: Pairing) -> Self {
        Self::new(FockVector::vacuum(spec), pairing)
    }

    pub fn from_polynomial(
        spec: TruncationSpec,
        pairing: Pairing,
        poly: &Polynomial,
    ) -> Result<Flagged<Self>> {
        let f = polynomial_to_fock(spec, pairing, poly)?;
        Ok(Flagged {
            value: Self::new(f.value, pairing),
            overflow: f.overflow,
        })
    }

    pub fn fock(&self) -> &FockVector {
        &self.fock
    }

    pub fn into_fock(self) -> FockVector {
        self.fock
    }

    pub fn pairing(&self) -> Pairing {
        self.pairing
    }

    pub fn spec(&self) -> TruncationSpec {
        self.fock.spec()
    }

    /// `‖ψ*‖ = ‖ψ‖_W`.
    pub fn norm(&self) -> f64 {
        self.fock.norm(Pairing::W)
    }

    pub fn polynomial(&self) -> Polynomial {
        fock_to_polynomial(&self.fock, self.pairing)
    }

    fn rebuild(&self, poly: &Polynomial) -> Flagged<Self> {
        Self::from_polynomial(self.spec(), self.pairing, poly).expect("same dimension")
    }

    /// `⟨ε(x)|ψ⟩` under the function's own pairing.
    pub fn evaluate(&self, x: &EVector) -> Result<Complex64> {
        self.evaluate_as(x, self.pairing)
    }

    /// `⟨ε(x)|ψ⟩` under an explicitly chosen pairing.
    pub fn evaluate_as(&self, x: &EVector, pairing: Pairing) -> Result<Complex64> {
        let eps = exponential_vector(self.spec(), x)?;
        inner(pairing, &eps, &self.fock)
    }

    /// `x ↦ f(x + a)`. Degree never rises, so this is exact.
    pub fn shift(&self, a: &EVector) -> Self {
        self.rebuild(&self.polynomial().shift(a)).value
    }

    /// The same shift realised as the pairing adjoint of `𝒯_a`, since
    /// `ε(x + a) = 𝒯_a ε(x)`.
    pub fn shift_via_operator(&self, a: &EVector) -> Result<Self> {
        let op = OperatorMatrix::exp_creation(self.spec(), a)?.adjoint(self.pairing);
        Ok(Self::new(op.apply(&self.fock)?, self.pairing))
    }

    /// `x ↦ f(x)·exp⟨x|a⟩`, truncated at the top degree.
    pub fn multiply_exp(&self, a: &EVector) -> Flagged<Self> {
        let (p, overflow) = self.polynomial().mul_exp_pairing(a, self.spec().max_degree);
        let mut out = self.rebuild(&p);
        out.overflow |= overflow;
        out
    }

    /// `d^m/dt^m f(x + t a)` at `t = 0`.
    pub fn directional_derivative(&self, a: &EVector, m: usize) -> Self {
        self.rebuild(&self.polynomial().directional_derivative(a, m)).value
    }

    /// `x ↦ ⟨x|a⟩·f(x)`.
    pub fn generator_mult(&self, a: &EVector) -> Flagged<Self> {
        let (p, overflow) = self
            .polynomial()
            .mul(&Polynomial::pairing_with(a), self.spec().max_degree);
        let mut out = self.rebuild(&p);
        out.overflow |= overflow;
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self::new(self.fock.add(&other.fock)?, self.pairing))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(Self::new(self.fock.sub(&other.fock)?, self.pairing))
    }

    /// Scales the function values by `s`.
    pub fn scale(&self, s: Complex64) -> Self {
        // ψ ↦ ψ* is conjugate-linear, so the coefficients take conj(s).
        Self::new(self.fock.scale(s.conj()), self.pairing)
    }

    /// `‖f − g‖`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = self.fock.to_json();
        v["pairing"] = serde_json::Value::String(self.pairing.name().into());
        v
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let fock = FockVector::from_json(value)?;
        let pairing = match value.get("pairing").and_then(|p| p.as_str()) {
            Some(p) => Pairing::parse(p)?,
            None => Pairing::Bargmann,
        };
        Ok(Self::new(fock, pairing))
    }
}

/// `‖(𝔡_a∘b* − b*∘𝔡_a)f − ⟨a|b⟩f‖_W`.
pub fn commutator_check(f: &HardyWFunction, a: &EVector, b: &EVector) -> Result<f64> {
    let spec = f.spec();
    let degree = f.fock().degree().unwrap_or(0);
    if degree + 1 > spec.max_degree {
        return Err(Error::DegreeOverflow {
            degree: degree + 1,
            max_degree: spec.max_degree,
        });
    }
    let p = f.polynomial();
    let bstar = Polynomial::pairing_with(b);
    let cap = spec.max_degree;
    let lhs = p.mul(&bstar, cap).0.directional_derivative(a, 1);
    let rhs = p.directional_derivative(a, 1).mul(&bstar, cap).0;
    let residual = lhs.sub(&rhs).sub(&p.scale(a.inner(b)));
    polynomial_w_norm(spec, f.pairing(), &residual)
}

/// Residual of `T_a M_{b*} f = exp⟨a|b⟩·M_{b*} T_a f` on degrees up to the
/// truncation, with the intermediate products carried `pad` degrees higher.
pub fn weyl_group_commutation(
    f: &HardyWFunction,
    a: &EVector,
    b: &EVector,
    pad: usize,
) -> Result<f64> {
    let spec = f.spec();
    let cap = spec.max_degree + pad;
    let p = f.polynomial();
    let lhs = p.mul_exp_pairing(b, cap).0.shift_capped(a, spec.max_degree);
    let rhs = p.shift(a).mul_exp_pairing(b, cap).0.scale(a.inner(b).exp());
    polynomial_w_norm(spec, f.pairing(), &lhs.sub(&rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, d: usize) -> TruncationSpec {
        TruncationSpec::new(n, d).unwrap()
    }

    fn key(parts: &[u32], idx: &[u32]) -> BasisKey {
        BasisKey::from_parts(parts, idx).unwrap()
    }

    fn func(s: TruncationSpec, k: BasisKey, pairing: Pairing) -> HardyWFunction {
        HardyWFunction::new(FockVector::basis(s, k).unwrap(), pairing)
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn evaluation_examples() {
        let s = spec(4, 3);
        let x = EVector::new(vec![Complex64::new(0.3, 0.4), c(2.0), c(-1.0)]);
        for pairing in Pairing::ALL {
            let one = HardyWFunction::constant(s, pairing);
            assert!((one.evaluate(&x).unwrap() - c(1.0)).norm() < 1e-15);
        }
        let e1 = func(s, key(&[1], &[1]), Pairing::H);
        assert!((e1.evaluate(&EVector::from_real(&[2.0, 0.0, 0.0])).unwrap() - c(2.0)).norm() < 1e-15);
        // The coherent-state pairing carries the extra 1/n! of ε(x).
        let e12 = func(s, key(&[1, 1], &[1, 2]), Pairing::H);
        let ones = EVector::from_real(&[1.0, 1.0, 0.0]);
        assert!((e12.evaluate(&ones).unwrap() - c(0.5)).norm() < 1e-15);
        let e12b = func(s, key(&[1, 1], &[1, 2]), Pairing::Bargmann);
        assert!((e12b.evaluate(&ones).unwrap() - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn evaluation_agrees_with_taylor_polynomial() {
        let s = spec(4, 2);
        let psi = exponential_vector(s, &EVector::new(vec![Complex64::new(0.5, -0.2), c(0.3)]))
            .unwrap();
        let x = EVector::new(vec![Complex64::new(-0.4, 0.9), Complex64::new(0.1, 0.2)]);
        for pairing in Pairing::ALL {
            let f = HardyWFunction::new(psi.clone(), pairing);
            let direct = f.evaluate(&x).unwrap();
            let taylor = f.polynomial().evaluate(&x);
            assert!((direct - taylor).norm() < 1e-14);
        }
    }

    #[test]
    fn shift_examples() {
        let s = spec(4, 2);
        let e1 = func(s, key(&[1], &[1]), Pairing::H);
        let shifted = e1.shift(&EVector::basis(1, 2)).polynomial();
        let expected = Polynomial::monomial(vec![1, 0], c(1.0)).add(&Polynomial::constant(2, c(1.0)));
        assert!(shifted.max_abs_diff(&expected) < 1e-15);
        assert_eq!(e1.shift(&EVector::zero(2)), e1);

        let prod = HardyWFunction::from_polynomial(s, Pairing::H, &Polynomial::monomial(vec![1, 1], c(1.0)))
            .unwrap()
            .value;
        let shifted = prod.shift(&EVector::basis(2, 2)).polynomial();
        let expected = Polynomial::monomial(vec![1, 1], c(1.0)).add(&Polynomial::monomial(vec![1, 0], c(1.0)));
        assert!(shifted.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn shift_via_operator_matches_substitution() {
        let s = spec(5, 3);
        let psi = exponential_vector(
            s,
            &EVector::new(vec![Complex64::new(0.5, -0.2), c(0.3), Complex64::new(0.0, 0.8)]),
        )
        .unwrap();
        let a = EVector::new(vec![c(0.2), Complex64::new(-0.3, 0.5), c(0.1)]);
        for pairing in Pairing::ALL {
            let f = HardyWFunction::new(psi.clone(), pairing);
            let by_poly = f.shift(&a);
            let by_op = f.shift_via_operator(&a).unwrap();
            assert!(by_poly.fock().max_abs_diff(by_op.fock()) < 1e-13, "{pairing}");
        }
    }

    #[test]
    fn multiplier_examples() {
        let s = spec(5, 2);
        let one = HardyWFunction::constant(s, Pairing::W);
        let e = one.multiply_exp(&EVector::basis(1, 2));
        assert!(e.overflow);
        for n in 0..=5u32 {
            let fact: f64 = (1..=n).map(f64::from).product();
            assert!((e.value.polynomial().coeff(&[n, 0]) - c(1.0 / fact)).norm() < 1e-14);
        }
        let x2 = HardyWFunction::from_polynomial(s, Pairing::W, &Polynomial::monomial(vec![0, 1], c(1.0)))
            .unwrap()
            .value;
        let prod = x2.multiply_exp(&EVector::basis(1, 2)).value.polynomial();
        assert!((prod.coeff(&[3, 1]) - c(1.0 / 6.0)).norm() < 1e-14);
        assert_eq!(one.multiply_exp(&EVector::zero(2)).value, one);
    }

    #[test]
    fn derivative_and_generator_examples() {
        let s = spec(4, 2);
        let sq = HardyWFunction::from_polynomial(s, Pairing::H, &Polynomial::monomial(vec![2, 0], c(1.0)))
            .unwrap()
            .value;
        let d = sq.directional_derivative(&EVector::basis(1, 2), 1).polynomial();
        assert!(d.max_abs_diff(&Polynomial::monomial(vec![1, 0], c(2.0))) < 1e-14);

        let one = HardyWFunction::constant(s, Pairing::H);
        let g = one.generator_mult(&EVector::basis(1, 2));
        assert!(!g.overflow);
        assert!(g.value.polynomial().max_abs_diff(&Polynomial::monomial(vec![1, 0], c(1.0))) < 1e-15);
        assert!(one.directional_derivative(&EVector::basis(1, 2), 1).fock().is_empty());
    }

    #[test]
    fn scaling_is_linear_on_values() {
        let s = spec(2, 2);
        let f = func(s, key(&[1], &[2]), Pairing::W);
        let x = EVector::new(vec![c(0.3), Complex64::new(0.5, -1.0)]);
        let i = Complex64::i();
        let lhs = f.scale(i).evaluate(&x).unwrap();
        assert!((lhs - i * f.evaluate(&x).unwrap()).norm() < 1e-15);
    }

    #[test]
    fn commutator_examples() {
        let s = spec(4, 2);
        let one = HardyWFunction::constant(s, Pairing::W);
        let e1 = EVector::basis(1, 2);
        assert!(commutator_check(&one, &e1, &e1).unwrap() < 1e-15);
        assert!(commutator_check(&one, &e1, &EVector::basis(2, 2)).unwrap() < 1e-15);
        let top = func(s, key(&[4], &[1]), Pairing::W);
        assert!(commutator_check(&top, &e1, &e1).is_err());
    }

    #[test]
    fn weyl_commutation_example() {
        let s = spec(4, 1);
        let one = HardyWFunction::constant(s, Pairing::Bargmann);
        let e1 = EVector::basis(1, 1);
        assert!(weyl_group_commutation(&one, &e1, &e1, WORK_PAD).unwrap() < 1e-12);
        // Both sides at x = 0 equal e.
        let lhs = one.polynomial().mul_exp_pairing(&e1, 4 + WORK_PAD).0.shift(&e1);
        assert!((lhs.evaluate(&EVector::zero(1)) - c(std::f64::consts::E)).norm() < 1e-12);
    }

    #[test]
    fn json_carries_the_pairing() {
        let s = spec(2, 2);
        let f = func(s, key(&[1, 1], &[1, 2]), Pairing::H);
        let back = HardyWFunction::from_json(&f.to_json()).unwrap();
        assert_eq!(back, f);
    }
}
