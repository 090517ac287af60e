//! The Hardy space over virtual unitaries in two realisations: an exact
//! coefficient model over the basis `φ^λ_ι`, and Monte Carlo integrals over
//! Haar samples at a fixed level.

use num_complex::Complex64;
use num_traits::One;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{EVector, FockVector, Pairing, TruncationSpec};
use crate::hardy_w::{Flagged, HardyWFunction};
use crate::mc::{self, Estimate, StreamFamily};
use crate::operators::{AnnihilationVariant, OperatorMatrix};
use crate::partitions::{self, BasisKey};
use crate::unitary::{haar_sample, UnitaryMatrix, VirtualUnitary};

/// `Σ c_key·φ^key`, with `‖φ^λ_ι‖²_χ = C·λ!/|λ|!`.
#[derive(Clone, Debug, PartialEq)]
pub struct HardyChiFunction {
    coeffs: FockVector,
}

impl HardyChiFunction {
    /// Coefficients stored on the same key set and weight table as the Fock
    /// space.
    pub fn from_coefficients(coeffs: FockVector) -> Self {
        Self { coeffs }
    }

    pub fn constant(spec: TruncationSpec) -> Self {
        Self::from_coefficients(FockVector::vacuum(spec))
    }

    pub fn basis(spec: TruncationSpec, key: BasisKey) -> Result<Self> {
        Ok(Self::from_coefficients(FockVector::basis(spec, key)?))
    }

    pub fn coefficients(&self) -> &FockVector {
        &self.coeffs
    }

    pub fn spec(&self) -> TruncationSpec {
        self.coeffs.spec()
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.norm_sq(Pairing::W)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Degree-`n` component `f_n`.
    pub fn component(&self, n: usize) -> Self {
        Self::from_coefficients(self.coeffs.component(n))
    }

    /// Point value at the level matrix `u`.
    pub fn evaluate(&self, u: &UnitaryMatrix) -> Result<Complex64> {
        let mut sum = Complex64::new(0.0, 0.0);
        for (k, c) in self.coeffs.iter() {
            sum += c * phi_eval_matrix(u, k)?;
        }
        Ok(sum)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(Self::from_coefficients(self.coeffs.sub(&other.coeffs)?))
    }

    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }

    pub fn to_json(&self) -> serde_json::Value {
        self.coeffs.to_json()
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        Ok(Self::from_coefficients(FockVector::from_json(value)?))
    }
}

/// `φ_k(u)`: entry `(1, k)` of the level matrix.
pub fn phi_k(u: &UnitaryMatrix, k: usize) -> Result<Complex64> {
    if k == 0 || k > u.size() {
        return Err(Error::IndexOutOfRange { index: k, dim: u.size() });
    }
    Ok(u.entry(0, k - 1))
}

/// `φ^λ_ι(u) = Π_j φ_{ι_j}(u)^{λ_j}`, with `φ^∅ ≡ 1`.
pub fn phi_eval_matrix(u: &UnitaryMatrix, key: &BasisKey) -> Result<Complex64> {
    let mut acc = Complex64::one();
    for (i, p) in key.factors() {
        acc *= phi_k(u, i as usize)?.powu(p);
    }
    Ok(acc)
}

/// `φ^λ_ι` of a virtual unitary read at level `m`.
pub fn phi_eval(u: &VirtualUnitary, m: usize, key: &BasisKey) -> Result<Complex64> {
    phi_eval_matrix(&u.level(m)?, key)
}

/// `φ_x(u) = Σ x_k φ_k(u)`.
pub fn phi_x(u: &UnitaryMatrix, x: &EVector) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, xk) in x.coords.iter().enumerate() {
        if *xk != Complex64::new(0.0, 0.0) {
            acc += xk * phi_k(u, k + 1)?;
        }
    }
    Ok(acc)
}

/// `Φ`: conjugate-linear isometry `e^{⊙λ}_ι/‖·‖_W ↦ φ^λ_ι/‖·‖_χ`. The two norm
/// tables coincide, so it conjugates coefficients key by key.
pub fn phi_map(psi: &FockVector) -> HardyChiFunction {
    HardyChiFunction::from_coefficients(psi.conj())
}

/// `Φ*`.
pub fn phi_map_adjoint(f: &HardyChiFunction) -> FockVector {
    f.coeffs.conj()
}

/// `f ↦ f̂ = ⟨ε(·)|Φ*f⟩`, read under the given pairing.
pub fn f_transform(f: &HardyChiFunction, pairing: Pairing) -> HardyWFunction {
    HardyWFunction::new(phi_map_adjoint(f), pairing)
}

/// `ℱ⁻¹`.
pub fn f_transform_inverse(g: &HardyWFunction) -> HardyChiFunction {
    phi_map(g.fock())
}

/// `Φ∘A∘Φ*`.
pub fn transport(op: &OperatorMatrix, f: &HardyChiFunction) -> Result<HardyChiFunction> {
    Ok(phi_map(&op.apply(&phi_map_adjoint(f))?))
}

/// `M†_a = Φ𝒯*_aΦ*`.
pub fn mult_group_chi(
    f: &HardyChiFunction,
    a: &EVector,
    variant: AnnihilationVariant,
) -> Result<HardyChiFunction> {
    transport(&OperatorMatrix::exp_annihilation(f.spec(), a, variant)?, f)
}

/// `T†_a = Φ𝒯_aΦ*`, truncated at the top degree.
pub fn shift_group_chi(f: &HardyChiFunction, a: &EVector) -> Result<Flagged<HardyChiFunction>> {
    let op = OperatorMatrix::exp_creation(f.spec(), a)?;
    Ok(Flagged {
        value: transport(&op, f)?,
        overflow: op.overflow(),
    })
}

/// `φ̄_a^m = Φ δ*^m_a Φ*`.
pub fn phi_bar_power(
    f: &HardyChiFunction,
    a: &EVector,
    m: usize,
    variant: AnnihilationVariant,
) -> Result<HardyChiFunction> {
    transport(&OperatorMatrix::annihilation(f.spec(), a, m, variant)?, f)
}

/// `δ†^m_a = Φ δ^m_a Φ*`.
pub fn delta_dagger_power(f: &HardyChiFunction, a: &EVector, m: usize) -> Result<HardyChiFunction> {
    transport(&OperatorMatrix::creation(f.spec(), a, m)?, f)
}

/// `‖ℱ(M†_a f) − T_a ℱ(f)‖`.
pub fn shift_intertwining_residual(
    f: &HardyChiFunction,
    a: &EVector,
    variant: AnnihilationVariant,
    pairing: Pairing,
) -> Result<f64> {
    let lhs = f_transform(&mult_group_chi(f, a, variant)?, pairing);
    let rhs = f_transform(f, pairing).shift(a);
    lhs.distance(&rhs)
}

/// `‖ℱ(T†_a f) − M_{a*} ℱ(f)‖` on degrees up to the truncation.
pub fn multiplier_intertwining_residual(
    f: &HardyChiFunction,
    a: &EVector,
    pairing: Pairing,
) -> Result<f64> {
    let lhs = f_transform(&shift_group_chi(f, a)?.value, pairing);
    let rhs = f_transform(f, pairing).multiply_exp(a).value;
    lhs.distance(&rhs)
}

/// `‖(φ̄_a δ†_b − δ†_b φ̄_a)f − ⟨a|b⟩f‖_χ`.
pub fn chi_commutator_residual(
    f: &HardyChiFunction,
    a: &EVector,
    b: &EVector,
    variant: AnnihilationVariant,
) -> Result<f64> {
    let spec = f.spec();
    let degree = f.coeffs.degree().unwrap_or(0);
    if degree + 1 > spec.max_degree {
        return Err(Error::DegreeOverflow {
            degree: degree + 1,
            max_degree: spec.max_degree,
        });
    }
    let ab = phi_bar_power(&delta_dagger_power(f, b, 1)?, a, 1, variant)?;
    let ba = delta_dagger_power(&phi_bar_power(f, a, 1, variant)?, b, 1)?;
    let comm = ab.sub(&ba)?;
    let target = HardyChiFunction::from_coefficients(f.coeffs.scale(a.inner(b)));
    comm.distance(&target)
}

/// Complex Monte Carlo estimate split into real and imaginary parts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComplexEstimate {
    pub re: Estimate,
    pub im: Estimate,
}

impl ComplexEstimate {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.mean, self.im.mean)
    }

    /// Larger of the two component z-scores against `target`.
    pub fn max_abs_z(&self, target: Complex64) -> f64 {
        self.re.z_against(target.re).abs().max(self.im.z_against(target.im).abs())
    }

    pub fn stderr(&self) -> f64 {
        self.re.stderr.hypot(self.im.stderr)
    }
}

fn complex_estimate<F>(family: &StreamFamily, samples: usize, g: F) -> ComplexEstimate
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> Complex64 + Sync + Send,
{
    let est = mc::estimate(family, samples, 2, |rng| {
        let v = g(rng);
        vec![v.re, v.im]
    });
    ComplexEstimate { re: est[0], im: est[1] }
}

fn check_level(f: &HardyChiFunction, x: &EVector, m: usize) -> Result<()> {
    let max_key = f.coeffs.iter().map(|(k, _)| k.max_index()).max().unwrap_or(0);
    let max_x = x
        .coords
        .iter()
        .rposition(|c| *c != Complex64::new(0.0, 0.0))
        .map_or(0, |p| p + 1);
    let need = max_key.max(max_x);
    if need > m {
        return Err(Error::IndexOutOfRange { index: need, dim: m });
    }
    Ok(())
}

/// `∫ exp(conj φ_x)·f dχ_m` with Haar samples at level `m`.
pub fn mc_f_transform(
    f: &HardyChiFunction,
    x: &EVector,
    m: usize,
    samples: usize,
    seed: u64,
) -> Result<ComplexEstimate> {
    check_level(f, x, m)?;
    let family = StreamFamily::new(seed, &format!("ftransform-{m}"));
    Ok(complex_estimate(&family, samples, |rng| {
        let u = haar_sample(m, rng);
        let px = phi_x(&u, x).expect("level checked");
        px.conj().exp() * f.evaluate(&u).expect("level checked")
    }))
}

/// `∫ conj(φ_x)^n f_n dχ_m`, the degree-`n` Taylor term of the transform.
pub fn mc_taylor_coefficient(
    f: &HardyChiFunction,
    x: &EVector,
    n: usize,
    m: usize,
    samples: usize,
    seed: u64,
) -> Result<ComplexEstimate> {
    check_level(f, x, m)?;
    let fn_ = f.component(n);
    let family = StreamFamily::new(seed, &format!("taylor-{m}-{n}"));
    Ok(complex_estimate(&family, samples, |rng| {
        let u = haar_sample(m, rng);
        let px = phi_x(&u, x).expect("level checked");
        px.conj().powu(n as u32) * fn_.evaluate(&u).expect("level checked")
    }))
}

/// `∫ φ^k₁·conj(φ^k₂) dχ_m`.
pub fn mc_basis_inner(
    k1: &BasisKey,
    k2: &BasisKey,
    m: usize,
    samples: usize,
    seed: u64,
) -> Result<ComplexEstimate> {
    let need = k1.max_index().max(k2.max_index());
    if need > m {
        return Err(Error::IndexOutOfRange { index: need, dim: m });
    }
    let family = StreamFamily::new(seed, &format!("inner-{m}-{k1}-{k2}"));
    Ok(complex_estimate(&family, samples, |rng| {
        let u = haar_sample(m, rng);
        let a = phi_eval_matrix(&u, k1).expect("level checked");
        let b = phi_eval_matrix(&u, k2).expect("level checked");
        a * b.conj()
    }))
}

/// One row of the empirical norm table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormLevel {
    pub m: usize,
    pub empirical: Option<f64>,
    pub stderr: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormStudy {
    pub key: String,
    /// `C·λ!/|λ|!`, the squared norm of the basis function in the limit space.
    pub limit_value: f64,
    pub samples: usize,
    pub levels: Vec<NormLevel>,
}

/// `∫|φ^λ_ι|² dχ_m` for each requested level; levels below the key's largest
/// index have no value.
pub fn norm_convergence_study(key: &BasisKey, levels: &[usize], samples: usize, seed: u64) -> NormStudy {
    let rows = levels
        .iter()
        .map(|&m| {
            if m == 0 || key.max_index() > m {
                return NormLevel { m, empirical: None, stderr: None };
            }
            let family = StreamFamily::new(seed, &format!("norm-{m}-{key}"));
            let est = mc::estimate(&family, samples, 1, |rng| {
                let u = haar_sample(m, rng);
                vec![phi_eval_matrix(&u, key).expect("level checked").norm_sqr()]
            });
            NormLevel {
                m,
                empirical: Some(est[0].mean),
                stderr: Some(est[0].stderr),
            }
        })
        .collect();
    NormStudy {
        key: key.label(),
        limit_value: partitions::w_norm_sq_f64(key.diagram()),
        samples,
        levels: rows,
    }
}

/// Random complex number with independent `N(0, σ²)` parts.
pub fn random_complex<R: Rng + ?Sized>(rng: &mut R, sigma: f64) -> Complex64 {
    let re: f64 = rng.sample(rand_distr::StandardNormal);
    let im: f64 = rng.sample(rand_distr::StandardNormal);
    Complex64::new(re * sigma, im * sigma)
}

pub fn random_evector<R: Rng + ?Sized>(rng: &mut R, dim: usize, sigma: f64) -> EVector {
    EVector::new((0..dim).map(|_| random_complex(rng, sigma)).collect())
}

/// Random Fock vector with every key of degree at most `max_degree` populated.
pub fn random_fock<R: Rng + ?Sized>(
    rng: &mut R,
    spec: TruncationSpec,
    max_degree: usize,
    sigma: f64,
) -> FockVector {
    let keys = partitions::enumerate_keys(max_degree.min(spec.max_degree), spec.dim)
        .expect("spec dimension is positive");
    FockVector::from_terms(spec, keys.into_iter().map(|k| (k, random_complex(rng, sigma))))
        .expect("keys fit the spec")
}
