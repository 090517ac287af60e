//! Creation and annihilation operators on the truncated Fock space, their
//! exponentials, and adjoints with respect to any of the diagonal Gram tables.
//!
//! Operators are stored as dense blocks indexed by `(source degree, target
//! degree)`; rows follow the canonical key order of the target degree and
//! columns that of the source degree.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fock::{DegreeBasis, EVector, FockVector, Pairing, TruncationSpec};
use crate::par;
use crate::partitions::{self, BasisKey};

/// How `𝒯*_a` and its generator are realised.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AnnihilationVariant {
    /// The closed form `δ*^m x^{⊗n} = ⟨x|a⟩^m x^{⊗(n−m)}` extended linearly.
    Monomial,
    /// The true adjoint of creation in the weighted space.
    WAdjoint,
    /// The adjoint of creation under the Bargmann Gram `α!`, which acts as
    /// the directional derivative `conj(a)·∇` on coefficient polynomials.
    BargmannAdjoint,
}

impl AnnihilationVariant {
    pub const ALL: [AnnihilationVariant; 3] = [
        AnnihilationVariant::Monomial,
        AnnihilationVariant::WAdjoint,
        AnnihilationVariant::BargmannAdjoint,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AnnihilationVariant::Monomial => "MONOMIAL",
            AnnihilationVariant::WAdjoint => "W_ADJOINT",
            AnnihilationVariant::BargmannAdjoint => "BARGMANN_ADJOINT",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text.trim().to_ascii_uppercase().replace('-', "_").as_str() {
            "MONOMIAL" => Ok(Self::Monomial),
            "W_ADJOINT" => Ok(Self::WAdjoint),
            "BARGMANN_ADJOINT" | "BARGMANN" => Ok(Self::BargmannAdjoint),
            other => Err(Error::Parse(format!("unknown annihilation variant {other:?}"))),
        }
    }

    /// The pairing whose adjoint of creation this variant reproduces.
    pub fn matching_pairing(self) -> Pairing {
        match self {
            Self::Monomial => Pairing::H,
            Self::WAdjoint => Pairing::W,
            Self::BargmannAdjoint => Pairing::Bargmann,
        }
    }
}

impl fmt::Display for AnnihilationVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

type Block = DMatrix<Complex64>;

#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    basis: Arc<DegreeBasis>,
    blocks: BTreeMap<(usize, usize), Block>,
    /// Set when a block mapping past the truncation degree was dropped.
    overflow: bool,
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn fact(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

impl OperatorMatrix {
    pub fn zero(spec: TruncationSpec) -> Result<Self> {
        Ok(Self {
            basis: Arc::new(DegreeBasis::new(spec)?),
            blocks: BTreeMap::new(),
            overflow: false,
        })
    }

    fn empty_like(&self) -> Self {
        Self {
            basis: Arc::clone(&self.basis),
            blocks: BTreeMap::new(),
            overflow: false,
        }
    }

    pub fn identity(spec: TruncationSpec) -> Result<Self> {
        let mut op = Self::zero(spec)?;
        for n in 0..=spec.max_degree {
            let len = op.basis.block_len(n);
            op.blocks.insert((n, n), Block::identity(len, len));
        }
        Ok(op)
    }

    pub fn spec(&self) -> TruncationSpec {
        self.basis.spec()
    }

    pub fn basis(&self) -> &DegreeBasis {
        &self.basis
    }

    pub fn overflow(&self) -> bool {
        self.overflow
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&(usize, usize), &Block)> {
        self.blocks.iter()
    }

    pub fn block(&self, src: usize, tgt: usize) -> Option<&Block> {
        self.blocks.get(&(src, tgt))
    }

    /// Assembles the `src → tgt` block column by column; `column` lists the
    /// image of one source basis key.
    fn assemble_block<F>(&mut self, src: usize, tgt: usize, column: F)
    where
        F: Fn(&BasisKey) -> Vec<(BasisKey, Complex64)> + Sync + Send,
    {
        let src_keys = self.basis.keys(src);
        let rows = self.basis.block_len(tgt);
        let columns = par::map_ordered(src_keys, |k| column(k));
        let mut block = Block::zeros(rows, src_keys.len());
        for (j, entries) in columns.into_iter().enumerate() {
            for (key, c) in entries {
                let i = self.basis.position(&key).expect("image key lies in the target block");
                block[(i, j)] += c;
            }
        }
        self.add_block(src, tgt, block);
    }

    fn add_block(&mut self, src: usize, tgt: usize, block: Block) {
        match self.blocks.get_mut(&(src, tgt)) {
            Some(existing) => *existing += block,
            None => {
                self.blocks.insert((src, tgt), block);
            }
        }
    }

    /// `δ_a^m`: `ψ ↦ a^{⊗m} ⊙ ψ`, i.e. `e^α ↦ Σ_{|μ|=m} (m!/μ!)·a^μ·e^{α+μ}`.
    pub fn creation(spec: TruncationSpec, a: &EVector, m: usize) -> Result<Self> {
        check_dim(spec, a)?;
        if m == 0 {
            return Err(Error::InvalidArgument("creation order must be at least 1".into()));
        }
        let mut op = Self::zero(spec)?;
        if a.is_zero() {
            return Ok(op);
        }
        let dim = spec.dim;
        let shifts: Vec<(Vec<u32>, Complex64)> = partitions::compositions(m, dim)
            .into_iter()
            .map(|mu| {
                let c = a.monomial(&mu) * crate::fock::multinomial(&mu);
                (mu, c)
            })
            .filter(|(_, c)| !c.is_zero())
            .collect();
        for src in 0..=spec.max_degree {
            let tgt = src + m;
            if tgt > spec.max_degree {
                op.overflow = true;
                continue;
            }
            op.assemble_block(src, tgt, |key| {
                let alpha = key.exponents(dim).expect("key within dimension");
                shifts
                    .iter()
                    .map(|(mu, c)| {
                        let sum: Vec<u32> = alpha.iter().zip(mu).map(|(x, y)| x + y).collect();
                        (BasisKey::from_exponents(&sum), *c)
                    })
                    .collect()
            });
        }
        Ok(op)
    }

    /// `δ*^m_a` in the closed monomial form: on degree `n`,
    /// `e^α ↦ (n−m)!/n! · Σ_{|μ|=m} (m!/μ!)·conj(a)^μ·α!/(α−μ)!·e^{α−μ}`,
    /// which sends `x^{⊗n}` to `⟨x|a⟩^m x^{⊗(n−m)}`.
    pub fn annihilation_monomial(spec: TruncationSpec, a: &EVector, m: usize) -> Result<Self> {
        check_dim(spec, a)?;
        let mut op = Self::zero(spec)?;
        if a.is_zero() {
            return Ok(op);
        }
        let dim = spec.dim;
        let abar = a.conj();
        let shifts: Vec<(Vec<u32>, Complex64)> = partitions::compositions(m, dim)
            .into_iter()
            .map(|mu| {
                let c = abar.monomial(&mu) * crate::fock::multinomial(&mu);
                (mu, c)
            })
            .filter(|(_, c)| !c.is_zero())
            .collect();
        for src in m..=spec.max_degree {
            let scale = fact((src - m) as u32) / fact(src as u32);
            op.assemble_block(src, src - m, |key| {
                let alpha = key.exponents(dim).expect("key within dimension");
                shifts
                    .iter()
                    .filter(|(mu, _)| mu.iter().zip(&alpha).all(|(u, x)| u <= x))
                    .map(|(mu, c)| {
                        let falling: f64 = alpha
                            .iter()
                            .zip(mu)
                            .map(|(&x, &u)| fact(x) / fact(x - u))
                            .product();
                        let diff: Vec<u32> = alpha.iter().zip(mu).map(|(x, y)| x - y).collect();
                        (BasisKey::from_exponents(&diff), c * falling * scale)
                    })
                    .collect()
            });
        }
        Ok(op)
    }

    /// `δ*^m_a` under the chosen variant.
    pub fn annihilation(
        spec: TruncationSpec,
        a: &EVector,
        m: usize,
        variant: AnnihilationVariant,
    ) -> Result<Self> {
        match variant {
            AnnihilationVariant::Monomial => Self::annihilation_monomial(spec, a, m),
            AnnihilationVariant::WAdjoint => Ok(Self::creation(spec, a, m)?.adjoint(Pairing::W)),
            AnnihilationVariant::BargmannAdjoint => {
                Ok(Self::creation(spec, a, m)?.adjoint(Pairing::Bargmann))
            }
        }
    }

    /// `𝒯_a = Σ_m δ_a^m/m!`, truncated at the top degree.
    pub fn exp_creation(spec: TruncationSpec, a: &EVector) -> Result<Self> {
        let mut op = Self::identity(spec)?;
        if a.is_zero() {
            return Ok(op);
        }
        for m in 1..=spec.max_degree {
            let term = Self::creation(spec, a, m)?.scale(real(1.0 / fact(m as u32)));
            op = op.add(&term)?;
        }
        op.overflow = true;
        Ok(op)
    }

    /// `𝒯*_a` under the chosen variant. The adjoint variants are the adjoints
    /// of [`Self::exp_creation`]; the monomial one sums `δ*^m_a/m!`.
    pub fn exp_annihilation(
        spec: TruncationSpec,
        a: &EVector,
        variant: AnnihilationVariant,
    ) -> Result<Self> {
        match variant {
            AnnihilationVariant::Monomial => {
                let mut op = Self::identity(spec)?;
                for m in 1..=spec.max_degree {
                    let term = Self::annihilation_monomial(spec, a, m)?
                        .scale(real(1.0 / fact(m as u32)));
                    op = op.add(&term)?;
                }
                Ok(op)
            }
            AnnihilationVariant::WAdjoint => {
                let mut op = Self::exp_creation(spec, a)?.adjoint(Pairing::W);
                op.overflow = false;
                Ok(op)
            }
            AnnihilationVariant::BargmannAdjoint => {
                let mut op = Self::exp_creation(spec, a)?.adjoint(Pairing::Bargmann);
                op.overflow = false;
                Ok(op)
            }
        }
    }

    /// The operator `S` with `⟨Tψ|φ⟩ = ⟨ψ|Sφ⟩` for the given pairing:
    /// block-wise `S = G_src⁻¹ Tᴴ G_tgt`.
    pub fn adjoint(&self, pairing: Pairing) -> Self {
        let mut out = self.empty_like();
        out.overflow = self.overflow;
        for (&(src, tgt), block) in &self.blocks {
            let g_src = self.basis.gram(pairing, src);
            let g_tgt = self.basis.gram(pairing, tgt);
            let mut adj = block.adjoint();
            for i in 0..adj.nrows() {
                for j in 0..adj.ncols() {
                    adj[(i, j)] *= g_tgt[j] / g_src[i];
                }
            }
            out.blocks.insert((tgt, src), adj);
        }
        out
    }

    fn same_spec(&self, other: &Self) -> Result<()> {
        if self.spec() != other.spec() {
            return Err(Error::SpecMismatch(self.spec(), other.spec()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_spec(other)?;
        let mut out = self.clone();
        for (&(s, t), b) in &other.blocks {
            out.add_block(s, t, b.clone());
        }
        out.overflow |= other.overflow;
        Ok(out)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        for b in out.blocks.values_mut() {
            *b *= s;
        }
        out
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.same_spec(other)?;
        let mut out = self.empty_like();
        out.overflow = self.overflow || other.overflow;
        for (&(src, mid), inner) in &other.blocks {
            for (&(mid2, tgt), outer) in self.blocks.range((mid, 0)..=(mid, usize::MAX)) {
                debug_assert_eq!(mid, mid2);
                out.add_block(src, tgt, outer * inner);
            }
        }
        Ok(out)
    }

    pub fn apply(&self, psi: &FockVector) -> Result<FockVector> {
        if psi.spec() != self.spec() {
            return Err(Error::SpecMismatch(self.spec(), psi.spec()));
        }
        let mut out = FockVector::zero(self.spec());
        let mut cache: BTreeMap<usize, nalgebra::DVector<Complex64>> = BTreeMap::new();
        for (&(src, tgt), block) in &self.blocks {
            let x = cache
                .entry(src)
                .or_insert_with(|| nalgebra::DVector::from_vec(self.basis.block_of(psi, src)));
            let y = block * &*x;
            for (i, c) in y.iter().enumerate() {
                if !c.is_zero() {
                    out.add_to(self.basis.keys(tgt)[i].clone(), *c)?;
                }
            }
        }
        Ok(out)
    }

    /// Largest entry-wise difference over all blocks.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        let keys: std::collections::BTreeSet<_> =
            self.blocks.keys().chain(other.blocks.keys()).copied().collect();
        for k in keys {
            let diff = match (self.blocks.get(&k), other.blocks.get(&k)) {
                (Some(a), Some(b)) => a - b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => -b.clone(),
                (None, None) => continue,
            };
            worst = diff.iter().fold(worst, |w, c| w.max(c.norm()));
        }
        worst
    }

    /// Raw binary layout: magic `HFOP`, then little-endian `u32` version, dim,
    /// max degree and block count; each block carries `u32` source degree,
    /// target degree, rows and columns followed by row-major `(re, im)` `f64`
    /// pairs.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        let spec = self.spec();
        w.write_all(BINARY_MAGIC)?;
        for v in [BINARY_VERSION, spec.dim as u32, spec.max_degree as u32, self.blocks.len() as u32] {
            w.write_all(&v.to_le_bytes())?;
        }
        for (&(s, t), b) in &self.blocks {
            for v in [s as u32, t as u32, b.nrows() as u32, b.ncols() as u32] {
                w.write_all(&v.to_le_bytes())?;
            }
            for i in 0..b.nrows() {
                for j in 0..b.ncols() {
                    w.write_all(&b[(i, j)].re.to_le_bytes())?;
                    w.write_all(&b[(i, j)].im.to_le_bytes())?;
                }
            }
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != BINARY_MAGIC {
            return Err(Error::Parse("not an operator file".into()));
        }
        let u32_of = |r: &mut R| -> Result<u32> {
            let mut buf = [0u8; 4];
            r.read_exact(&mut buf)?;
            Ok(u32::from_le_bytes(buf))
        };
        let version = u32_of(&mut r)?;
        if version != BINARY_VERSION {
            return Err(Error::Parse(format!("unsupported operator file version {version}")));
        }
        let dim = u32_of(&mut r)? as usize;
        let max_degree = u32_of(&mut r)? as usize;
        let count = u32_of(&mut r)?;
        let mut op = Self::zero(TruncationSpec::new(max_degree, dim)?)?;
        for _ in 0..count {
            let s = u32_of(&mut r)? as usize;
            let t = u32_of(&mut r)? as usize;
            let rows = u32_of(&mut r)? as usize;
            let cols = u32_of(&mut r)? as usize;
            if rows != op.basis.block_len(t) || cols != op.basis.block_len(s) {
                return Err(Error::Parse(format!("block {s}->{t} has shape {rows}x{cols}")));
            }
            let mut block = Block::zeros(rows, cols);
            let mut buf = [0u8; 8];
            for i in 0..rows {
                for j in 0..cols {
                    r.read_exact(&mut buf)?;
                    let re = f64::from_le_bytes(buf);
                    r.read_exact(&mut buf)?;
                    block[(i, j)] = Complex64::new(re, f64::from_le_bytes(buf));
                }
            }
            op.blocks.insert((s, t), block);
        }
        Ok(op)
    }
}

const BINARY_MAGIC: &[u8; 4] = b"HFOP";
const BINARY_VERSION: u32 = 1;

fn check_dim(spec: TruncationSpec, a: &EVector) -> Result<()> {
    if a.dim() != spec.dim {
        return Err(Error::DimensionMismatch {
            expected: spec.dim,
            got: a.dim(),
        });
    }
    Ok(())
}

/// `⟨x|a⟩^m · x^{⊗(n−m)}`.
pub fn annihilation_monomial(
    spec: TruncationSpec,
    a: &EVector,
    m: usize,
    x: &EVector,
    n: usize,
) -> Result<FockVector> {
    if m > n {
        return Err(Error::InvalidArgument(format!("order {m} exceeds degree {n}")));
    }
    let power = crate::fock::tensor_power(spec, x, n - m)?;
    Ok(power.scale(x.inner(a).powu(m as u32)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{exponential_vector, inner, tensor_power};

    fn spec(n: usize, d: usize) -> TruncationSpec {
        TruncationSpec::new(n, d).unwrap()
    }

    fn key(parts: &[u32], idx: &[u32]) -> BasisKey {
        BasisKey::from_parts(parts, idx).unwrap()
    }

    fn cvec(v: &[(f64, f64)]) -> EVector {
        EVector::new(v.iter().map(|&(r, i)| Complex64::new(r, i)).collect())
    }

    #[test]
    fn creation_examples() {
        let s = spec(3, 2);
        let e1 = EVector::basis(1, 2);
        let op = OperatorMatrix::creation(s, &e1, 1).unwrap();
        let e2 = FockVector::basis(s, key(&[1], &[2])).unwrap();
        let out = op.apply(&e2).unwrap();
        assert_eq!(out, FockVector::basis(s, key(&[1, 1], &[1, 2])).unwrap());
        assert!(op.overflow());

        let zero = OperatorMatrix::creation(s, &EVector::zero(2), 2).unwrap();
        assert_eq!(zero.blocks().count(), 0);
        assert!(!zero.overflow());
    }

    #[test]
    fn creation_matches_finite_difference_of_tensor_power() {
        let s = spec(4, 3);
        let x = cvec(&[(0.4, -0.2), (1.0, 0.3), (-0.6, 0.5)]);
        let a = cvec(&[(0.2, 0.7), (-0.3, 0.0), (0.5, -0.1)]);
        let n = 3;
        let op = OperatorMatrix::creation(s, &a, 1).unwrap();
        let lhs = op.apply(&tensor_power(s, &x, n - 1).unwrap()).unwrap();
        let h = 1e-5;
        let plus = tensor_power(s, &x.add(&a.scale(Complex64::new(h, 0.0))), n).unwrap();
        let minus = tensor_power(s, &x.sub(&a.scale(Complex64::new(h, 0.0))), n).unwrap();
        let fd = plus
            .sub(&minus)
            .unwrap()
            .scale(Complex64::new(1.0 / (2.0 * h) / n as f64, 0.0));
        assert!(lhs.max_abs_diff(&fd) < 1e-8);
    }

    #[test]
    fn adjoint_witness_values() {
        let s = spec(3, 2);
        let op = OperatorMatrix::creation(s, &EVector::basis(1, 2), 1).unwrap();
        let e12 = FockVector::basis(s, key(&[1, 1], &[1, 2])).unwrap();
        let e2 = key(&[1], &[2]);
        let h = op.adjoint(Pairing::H).apply(&e12).unwrap();
        let w = op.adjoint(Pairing::W).apply(&e12).unwrap();
        assert!((h.get(&e2) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert!((w.get(&e2) - Complex64::new(1.0 / 6.0, 0.0)).norm() < 1e-15);
        let mono = OperatorMatrix::annihilation_monomial(s, &EVector::basis(1, 2), 1)
            .unwrap()
            .apply(&e12)
            .unwrap();
        assert!((mono.get(&e2) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn adjoint_defining_relation_and_involution() {
        let s = spec(4, 2);
        let a = cvec(&[(0.3, -0.8), (1.2, 0.4)]);
        let op = OperatorMatrix::creation(s, &a, 2).unwrap();
        let keys = partitions::enumerate_keys(4, 2).unwrap();
        for pairing in Pairing::ALL {
            let adj = op.adjoint(pairing);
            assert!(adj.adjoint(pairing).max_abs_diff(&op) < 1e-13);
            for kp in &keys {
                for kq in &keys {
                    let p = FockVector::basis(s, kp.clone()).unwrap();
                    let q = FockVector::basis(s, kq.clone()).unwrap();
                    let lhs = inner(pairing, &op.apply(&p).unwrap(), &q).unwrap();
                    let rhs = inner(pairing, &p, &adj.apply(&q).unwrap()).unwrap();
                    assert!((lhs - rhs).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn annihilation_monomial_examples() {
        let s = spec(3, 2);
        let e1 = EVector::basis(1, 2);
        let v = annihilation_monomial(s, &e1, 1, &e1, 2).unwrap();
        assert_eq!(v, FockVector::basis(s, key(&[1], &[1])).unwrap());
        let v = annihilation_monomial(s, &e1, 1, &EVector::basis(2, 2), 2).unwrap();
        assert!(v.prune(0.0).is_empty());
        let ones = EVector::from_real(&[1.0, 1.0]);
        let v = annihilation_monomial(s, &e1, 1, &ones, 2).unwrap();
        assert!(v.max_abs_diff(&tensor_power(s, &ones, 1).unwrap()) < 1e-15);
        assert!(annihilation_monomial(s, &e1, 3, &ones, 2).is_err());
    }

    #[test]
    fn exp_creation_moves_exponential_vectors() {
        let s = spec(8, 2);
        let a = cvec(&[(0.3, 0.2), (-0.5, 0.1)]);
        let x = cvec(&[(0.7, -0.4), (0.2, 0.6)]);
        let op = OperatorMatrix::exp_creation(s, &a).unwrap();
        let moved = op.apply(&exponential_vector(s, &x).unwrap()).unwrap();
        let target = exponential_vector(s, &x.add(&a)).unwrap();
        // Only degree-0 inputs feed the top degree exactly; lower degrees are
        // exact because creation never lowers degree.
        assert!(moved.max_abs_diff(&target) < 1e-14);
        let vac = op.apply(&FockVector::vacuum(s)).unwrap();
        assert!(vac.max_abs_diff(&exponential_vector(s, &a).unwrap()) < 1e-15);
        let id = OperatorMatrix::exp_creation(s, &EVector::zero(2)).unwrap();
        assert!(id.max_abs_diff(&OperatorMatrix::identity(s).unwrap()) == 0.0);
    }

    #[test]
    fn binary_round_trip() {
        let s = spec(3, 2);
        let op = OperatorMatrix::exp_creation(s, &cvec(&[(0.1, 0.2), (0.3, -0.4)])).unwrap();
        let mut buf = Vec::new();
        op.write_binary(&mut buf).unwrap();
        assert_eq!(&buf[..4], b"HFOP");
        let back = OperatorMatrix::read_binary(buf.as_slice()).unwrap();
        assert_eq!(back.max_abs_diff(&op), 0.0);
        assert!(OperatorMatrix::read_binary(&b"XXXX"[..]).is_err());
    }
}
