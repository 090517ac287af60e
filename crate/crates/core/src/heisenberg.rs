//! Quaternions as complex pairs, the quaternion-valued scalar product on
//! `E ⊕ Ej`, the complexified Heisenberg group, and its Weyl-type operators
//! on both Hardy models.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{EVector, FockVector, Pairing, TruncationSpec};
use crate::hardy_chi::{phi_map, phi_map_adjoint, HardyChiFunction};
use crate::hardy_w::{polynomial_w_norm, HardyWFunction};
use crate::operators::{AnnihilationVariant, OperatorMatrix};
use crate::partitions;
use crate::poly::Polynomial;

/// `α + βj` with `jz = conj(z)j`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Quaternion {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl Quaternion {
    pub const fn new(alpha: Complex64, beta: Complex64) -> Self {
        Self { alpha, beta }
    }

    /// `w + xi + yj + zk`.
    pub fn from_real4(c: [f64; 4]) -> Self {
        Self::new(Complex64::new(c[0], c[1]), Complex64::new(c[2], c[3]))
    }

    pub fn to_real4(self) -> [f64; 4] {
        [self.alpha.re, self.alpha.im, self.beta.re, self.beta.im]
    }

    pub fn one() -> Self {
        Self::new(Complex64::one(), Complex64::zero())
    }

    pub fn i() -> Self {
        Self::from_real4([0.0, 1.0, 0.0, 0.0])
    }

    pub fn j() -> Self {
        Self::from_real4([0.0, 0.0, 1.0, 0.0])
    }

    pub fn k() -> Self {
        Self::from_real4([0.0, 0.0, 0.0, 1.0])
    }

    /// The `j`-coordinate `β`.
    pub fn im(self) -> Complex64 {
        self.beta
    }

    pub fn norm(self) -> f64 {
        (self.alpha.norm_sqr() + self.beta.norm_sqr()).sqrt()
    }
}

/// `(α+βj)(α'+β'j) = (αα' − β·conj β') + (αβ' + β·conj α')j`.
pub fn quat_mul(p: Quaternion, q: Quaternion) -> Quaternion {
    Quaternion::new(
        p.alpha * q.alpha - p.beta * q.beta.conj(),
        p.alpha * q.beta + p.beta * q.alpha.conj(),
    )
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, rhs: Quaternion) -> Quaternion {
        quat_mul(self, rhs)
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, rhs: Quaternion) -> Quaternion {
        Quaternion::new(self.alpha + rhs.alpha, self.beta + rhs.beta)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, rhs: Quaternion) -> Quaternion {
        Quaternion::new(self.alpha - rhs.alpha, self.beta - rhs.beta)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.alpha, -self.beta)
    }
}

/// `p = a + bj`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuaternionVector {
    pub a: EVector,
    pub b: EVector,
}

impl QuaternionVector {
    pub fn new(a: EVector, b: EVector) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
        }
        Ok(Self { a, b })
    }

    pub fn zero(dim: usize) -> Self {
        Self { a: EVector::zero(dim), b: EVector::zero(dim) }
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { a: self.a.add(&other.a), b: self.b.add(&other.b) }
    }

    pub fn neg(&self) -> Self {
        let m = Complex64::new(-1.0, 0.0);
        Self { a: self.a.scale(m), b: self.b.scale(m) }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.a
            .coords
            .iter()
            .chain(&self.b.coords)
            .zip(other.a.coords.iter().chain(&other.b.coords))
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }
}

/// `⟨a+bj | a'+b'j⟩ = ⟨a|a'⟩ + ⟨b|b'⟩ + [⟨a'|b⟩ − ⟨a|b'⟩]j`.
pub fn eh_inner(p: &QuaternionVector, q: &QuaternionVector) -> Result<Quaternion> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: q.dim() });
    }
    Ok(Quaternion::new(
        p.a.inner(&q.a) + p.b.inner(&q.b),
        q.a.inner(&p.b) - p.a.inner(&q.b),
    ))
}

/// `X(a, b, t)`, the upper triangular block matrix with `a`, `b` and `t` above
/// the unit diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct HeisenbergElement {
    pub a: EVector,
    pub b: EVector,
    pub t: Complex64,
}

impl HeisenbergElement {
    pub fn new(a: EVector, b: EVector, t: Complex64) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
        }
        Ok(Self { a, b, t })
    }

    pub fn unit(dim: usize) -> Self {
        Self { a: EVector::zero(dim), b: EVector::zero(dim), t: Complex64::zero() }
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.a
            .coords
            .iter()
            .chain(&self.b.coords)
            .chain(std::iter::once(&self.t))
            .zip(other.a.coords.iter().chain(&other.b.coords).chain(std::iter::once(&other.t)))
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }
}

/// `X(a,b,t)·X(a',b',t') = X(a+a', b+b', t+t'+⟨a|b'⟩)`.
pub fn heis_mul(x: &HeisenbergElement, y: &HeisenbergElement) -> HeisenbergElement {
    HeisenbergElement {
        a: x.a.add(&y.a),
        b: x.b.add(&y.b),
        t: x.t + y.t + x.a.inner(&y.b),
    }
}

/// `X(a,b,t)⁻¹ = X(−a, −b, −t + ⟨a|b⟩)`.
pub fn heis_inv(x: &HeisenbergElement) -> HeisenbergElement {
    let m = Complex64::new(-1.0, 0.0);
    HeisenbergElement {
        a: x.a.scale(m),
        b: x.b.scale(m),
        t: -x.t + x.a.inner(&x.b),
    }
}

/// Element `(t, p)` of `ℂ × E_ℍ` with `(t,p)(t',p') = (t+t'−½Im⟨p|p'⟩, p+p')`.
#[derive(Clone, Debug, PartialEq)]
pub struct AuxElement {
    pub t: Complex64,
    pub p: QuaternionVector,
}

impl AuxElement {
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.t - other.t).norm().max(self.p.max_abs_diff(&other.p))
    }
}

pub fn aux_mul(x: &AuxElement, y: &AuxElement) -> Result<AuxElement> {
    let im = eh_inner(&x.p, &y.p)?.im();
    Ok(AuxElement { t: x.t + y.t - 0.5 * im, p: x.p.add(&y.p) })
}

/// `Im⟨p|p⟩ = 0`, so the inverse is `(−t, −p)`.
pub fn aux_inv(x: &AuxElement) -> AuxElement {
    AuxElement { t: -x.t, p: x.p.neg() }
}

/// `X(a,b,t) ↦ (t − ½⟨a|b⟩, a + bj)`.
pub fn g_iso(x: &HeisenbergElement) -> AuxElement {
    AuxElement {
        t: x.t - 0.5 * x.a.inner(&x.b),
        p: QuaternionVector { a: x.a.clone(), b: x.b.clone() },
    }
}

/// `W(p)f = exp(½⟨a|b⟩)·M_{a*}T_b f` on Taylor polynomials, products carried
/// to degree `cap`.
pub fn weyl_poly(p: &QuaternionVector, f: &Polynomial, cap: usize) -> Polynomial {
    let scale = (0.5 * p.a.inner(&p.b)).exp();
    f.shift_capped(&p.b, cap).mul_exp_pairing(&p.a, cap).0.scale(scale)
}

/// `W(p)` on a function, truncated at its top degree.
pub fn weyl(p: &QuaternionVector, f: &HardyWFunction) -> Result<HardyWFunction> {
    let cap = f.spec().max_degree;
    Ok(HardyWFunction::from_polynomial(f.spec(), f.pairing(), &weyl_poly(p, &f.polynomial(), cap))?.value)
}

/// `‖W(p+p')f − exp(−½Im⟨p|p'⟩)·W(p)W(p')f‖_W` on degrees up to the
/// truncation, intermediate products carried `pad` degrees higher.
pub fn weyl_relation_residual(
    p: &QuaternionVector,
    q: &QuaternionVector,
    f: &HardyWFunction,
    pad: usize,
) -> Result<f64> {
    let spec = f.spec();
    let cap = spec.max_degree + pad;
    let poly = f.polynomial();
    let lhs = weyl_poly(&p.add(q), &poly, spec.max_degree);
    let factor = (-0.5 * eh_inner(p, q)?.im()).exp();
    let rhs = weyl_poly(p, &weyl_poly(q, &poly, cap), spec.max_degree).scale(factor);
    polynomial_w_norm(spec, f.pairing(), &lhs.sub(&rhs))
}

/// Which Hardy model the representation acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Model {
    WSpace,
    ChiSpace,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::WSpace => "W_SPACE",
            Model::ChiSpace => "CHI_SPACE",
        }
    }
}

/// `𝒲(X) = exp[t+½⟨a|b⟩]·M_{a*}T_b` and its transport to `H²_χ`.
#[derive(Clone, Debug)]
pub struct WsOperator {
    x: HeisenbergElement,
    model: Model,
}

/// `ws_rep(X, model)`.
pub fn ws_rep(x: &HeisenbergElement, model: Model) -> WsOperator {
    WsOperator { x: x.clone(), model }
}

impl WsOperator {
    pub fn model(&self) -> Model {
        self.model
    }

    fn scalar(&self) -> Complex64 {
        (self.x.t + 0.5 * self.x.a.inner(&self.x.b)).exp()
    }

    /// Action on Taylor polynomials with products carried to degree `cap`.
    pub fn apply_poly(&self, f: &Polynomial, cap: usize) -> Polynomial {
        f.shift_capped(&self.x.b, cap).mul_exp_pairing(&self.x.a, cap).0.scale(self.scalar())
    }

    /// Action on `H²_w`, truncated at the top degree.
    pub fn apply_w(&self, f: &HardyWFunction) -> Result<HardyWFunction> {
        self.expect(Model::WSpace)?;
        let p = self.apply_poly(&f.polynomial(), f.spec().max_degree);
        Ok(HardyWFunction::from_polynomial(f.spec(), f.pairing(), &p)?.value)
    }

    /// Action on `H²_χ` through the operator realisation
    /// `Φ∘𝒯_a∘𝒯*_b∘Φ*` of `M_{a*}T_b`, valid for the coherent-state pairing
    /// whose annihilator is the directional derivative.
    pub fn apply_chi(&self, f: &HardyChiFunction) -> Result<HardyChiFunction> {
        self.expect(Model::ChiSpace)?;
        let spec = f.spec();
        let shift = OperatorMatrix::exp_annihilation(spec, &self.x.b, AnnihilationVariant::BargmannAdjoint)?;
        let mult = OperatorMatrix::exp_creation(spec, &self.x.a)?;
        let psi = mult.apply(&shift.apply(&phi_map_adjoint(f))?)?;
        let out = phi_map(&psi);
        Ok(HardyChiFunction::from_coefficients(out.coefficients().scale(self.scalar())))
    }

    fn expect(&self, model: Model) -> Result<()> {
        if self.model != model {
            return Err(Error::InvalidArgument(format!(
                "operator built for {} applied on {}",
                self.model.name(),
                model.name()
            )));
        }
        Ok(())
    }
}

/// `‖𝒲(XX')f − 𝒲(X)𝒲(X')f‖_W` in the `H²_w` model, with padded products.
pub fn ws_homomorphism_residual(
    x: &HeisenbergElement,
    y: &HeisenbergElement,
    f: &HardyWFunction,
    pad: usize,
) -> Result<f64> {
    let spec = f.spec();
    let cap = spec.max_degree + pad;
    let poly = f.polynomial();
    let top = spec.max_degree;
    let lhs = ws_rep(&heis_mul(x, y), Model::WSpace).apply_poly(&poly, top);
    let rhs = ws_rep(x, Model::WSpace).apply_poly(&ws_rep(y, Model::WSpace).apply_poly(&poly, cap), top);
    polynomial_w_norm(spec, f.pairing(), &lhs.sub(&rhs))
}

/// `‖𝒲†(X)f − ℱ⁻¹𝒲(X)ℱf‖_χ`, the two sides computed along independent
/// paths: operator matrices on the Fock side against polynomial algebra.
pub fn chi_w_agreement(x: &HeisenbergElement, f: &HardyChiFunction, pairing: Pairing) -> Result<f64> {
    let chi = ws_rep(x, Model::ChiSpace).apply_chi(f)?;
    let w = ws_rep(x, Model::WSpace).apply_w(&crate::hardy_chi::f_transform(f, pairing))?;
    chi.distance(&crate::hardy_chi::f_transform_inverse(&w))
}

/// Outcome of the orbit rank probe.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankProbe {
    pub dimension: usize,
    pub rank: usize,
    pub samples: usize,
    pub smallest_singular_value: f64,
}

/// Rank of `{𝒲(X_i)1}` in W-orthonormal coordinates. A full rank is a finite
/// shadow of irreducibility, not a proof of it.
pub fn orbit_rank_probe(
    spec: TruncationSpec,
    elements: &[HeisenbergElement],
    pairing: Pairing,
    rel_tol: f64,
) -> Result<RankProbe> {
    let keys = partitions::enumerate_keys(spec.max_degree, spec.dim)?;
    let one = HardyWFunction::constant(spec, pairing);
    let mut m = DMatrix::<Complex64>::zeros(keys.len(), elements.len());
    for (col, x) in elements.iter().enumerate() {
        let v: FockVector = ws_rep(x, Model::WSpace).apply_w(&one)?.into_fock();
        for (row, k) in keys.iter().enumerate() {
            m[(row, col)] = v.get(k) * Pairing::W.norm_sq(k.diagram()).sqrt();
        }
    }
    let sv = m.singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    let rank = sv.iter().filter(|s| **s > rel_tol * top).count();
    let smallest = if elements.len() >= keys.len() {
        sv.iter().cloned().fold(f64::INFINITY, f64::min)
    } else {
        0.0
    };
    Ok(RankProbe {
        dimension: keys.len(),
        rank,
        samples: elements.len(),
        smallest_singular_value: smallest,
    })
}
