//! Haar sampling on `U(m)`, the Livšic projection `U(m+1) → U(m)`, stabilized
//! virtual unitaries and the right action of `U(m) × U(m)`.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::One;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mc::{self, Estimate, StreamFamily};

/// Largest entry of `U*U − I` tolerated by [`UnitaryMatrix::new`].
pub const UNITARY_TOL: f64 = 1e-10;

/// Below this `|1 + t|` the Livšic map takes the `t = −1` branch.
pub const LIVSIC_THRESHOLD: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix {
    m: DMatrix<Complex64>,
}

impl UnitaryMatrix {
    /// Wraps a square matrix after checking `‖U*U − I‖_max ≤ 1e−10`.
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::InvalidArgument(format!(
                "unitary must be square and nonempty, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let u = Self { m };
        let r = u.residual();
        if r > UNITARY_TOL {
            return Err(Error::NotUnitary(r));
        }
        Ok(u)
    }

    pub fn identity(size: usize) -> Self {
        Self {
            m: DMatrix::identity(size, size),
        }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        Self::new(DMatrix::from_fn(n, n, |i, j| {
            rows[i].get(j).copied().unwrap_or_default()
        }))
    }

    pub fn size(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    /// Zero-based entry.
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.m[(i, j)]
    }

    pub fn trace(&self) -> Complex64 {
        self.m.trace()
    }

    /// `max |(U*U − I)_{ij}|`.
    pub fn residual(&self) -> f64 {
        let n = self.size();
        let g = self.m.adjoint() * &self.m - DMatrix::<Complex64>::identity(n, n);
        g.iter().fold(0.0, |w, c| w.max(c.norm()))
    }

    pub fn adjoint(&self) -> Self {
        Self { m: self.m.adjoint() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.size() != other.size() {
            return Err(Error::DimensionMismatch {
                expected: self.size(),
                got: other.size(),
            });
        }
        Self::new(&self.m * &other.m)
    }

    /// `u ⊕ I`, padded up to `size`.
    pub fn pad_to(&self, size: usize) -> Self {
        let n = self.size();
        if size <= n {
            return self.clone();
        }
        let mut m = DMatrix::identity(size, size);
        m.view_mut((0, 0), (n, n)).copy_from(&self.m);
        Self { m }
    }
}

/// Haar-distributed unitary: QR of a standard complex Gaussian matrix with the
/// phases of `R`'s diagonal moved into `Q`.
pub fn haar_sample<R: Rng + ?Sized>(m: usize, rng: &mut R) -> UnitaryMatrix {
    assert!(m >= 1, "Haar sampling needs m >= 1");
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let z = DMatrix::from_fn(m, m, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * scale, im * scale)
    });
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..m {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::one() };
        for i in 0..m {
            q[(i, j)] *= phase;
        }
    }
    UnitaryMatrix::new(q).expect("QR of a full-rank Gaussian matrix is unitary")
}

/// Result of a Livšic projection; `singular_branch` records that `|1+t|` fell
/// below [`LIVSIC_THRESHOLD`] and the corner block was returned unchanged.
#[derive(Clone, Debug)]
pub struct Projection {
    pub matrix: UnitaryMatrix,
    pub singular_branch: bool,
}

/// `[[z, a], [b, t]] ↦ z − a(1+t)⁻¹b`, or `z` when `t = −1`.
pub fn livsic_project(u: &UnitaryMatrix) -> Result<Projection> {
    let n = u.size();
    if n < 2 {
        return Err(Error::InvalidArgument("Livšic projection needs size >= 2".into()));
    }
    let m = n - 1;
    let z = u.m.view((0, 0), (m, m)).into_owned();
    let t = u.m[(m, m)];
    let denom = Complex64::one() + t;
    if denom.norm() < LIVSIC_THRESHOLD {
        return Ok(Projection {
            matrix: UnitaryMatrix::new(z)?,
            singular_branch: true,
        });
    }
    let a = u.m.view((0, m), (m, 1)).into_owned();
    let b = u.m.view((m, 0), (1, m)).into_owned();
    let proj = z - (a * b) / denom;
    Ok(Projection {
        matrix: UnitaryMatrix::new(proj)?,
        singular_branch: false,
    })
}

/// A stabilized sequence `(u_k)`: `u_k = π^m_k(u_m)` below the top level and
/// `u_m ⊕ I` above it.
#[derive(Debug)]
pub struct VirtualUnitary {
    top: UnitaryMatrix,
    depth: usize,
    chain: OnceLock<Vec<UnitaryMatrix>>,
}

impl Clone for VirtualUnitary {
    fn clone(&self) -> Self {
        Self {
            top: self.top.clone(),
            depth: self.depth,
            chain: self.chain.clone(),
        }
    }
}

impl VirtualUnitary {
    pub fn top_level(&self) -> usize {
        self.top.size()
    }

    pub fn top(&self) -> &UnitaryMatrix {
        &self.top
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// `u_1, …, u_m`, derived on first use.
    fn chain(&self) -> &[UnitaryMatrix] {
        self.chain.get_or_init(|| {
            let mut levels = vec![self.top.clone()];
            while levels.last().expect("nonempty").size() > 1 {
                let p = livsic_project(levels.last().expect("nonempty"))
                    .expect("projection of a unitary is unitary");
                levels.push(p.matrix);
            }
            levels.reverse();
            levels
        })
    }

    /// `u_k` for `k ≥ 1`.
    pub fn level(&self, k: usize) -> Result<UnitaryMatrix> {
        if k == 0 {
            return Err(Error::InvalidArgument("levels start at 1".into()));
        }
        if k >= self.top_level() {
            return Ok(self.top.pad_to(k));
        }
        Ok(self.chain()[k - 1].clone())
    }
}

/// Builds the stabilized sequence generated by `u` (of size `m ≤ depth`).
pub fn embed_stabilized(u: &UnitaryMatrix, depth: usize) -> Result<VirtualUnitary> {
    if depth < u.size() {
        return Err(Error::InvalidArgument(format!(
            "depth {depth} is below the matrix size {}",
            u.size()
        )));
    }
    Ok(VirtualUnitary {
        top: u.clone(),
        depth,
        chain: OnceLock::new(),
    })
}

/// `u.g` for `g = (v, w)`: the level-`m` matrix becomes `w⁻¹ u_m v`. Smaller
/// matrices are padded with identity blocks to a common size.
pub fn right_action(
    u: &VirtualUnitary,
    v: &UnitaryMatrix,
    w: &UnitaryMatrix,
    m: usize,
) -> Result<VirtualUnitary> {
    if v.size() != w.size() {
        return Err(Error::DimensionMismatch {
            expected: v.size(),
            got: w.size(),
        });
    }
    if v.size() > m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: v.size(),
        });
    }
    let size = m.max(u.top_level());
    let um = u.level(size)?;
    let moved = w.pad_to(size).adjoint().mul(&um)?.mul(&v.pad_to(size))?;
    embed_stabilized(&moved, u.depth().max(size))
}

/// One tracked moment in a sampler report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentRecord {
    pub name: String,
    pub empirical: f64,
    pub exact: f64,
    pub stderr: f64,
    pub z: f64,
}

impl MomentRecord {
    fn against_exact(name: &str, est: Estimate, exact: f64) -> Self {
        Self {
            name: name.into(),
            empirical: est.mean,
            exact,
            stderr: est.stderr,
            z: est.z_against(exact),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HaarReport {
    pub m: usize,
    pub samples: usize,
    pub seed: u64,
    pub moments: Vec<MomentRecord>,
}

impl HaarReport {
    pub fn max_abs_z(&self) -> f64 {
        self.moments.iter().fold(0.0, |w, r| w.max(r.z.abs()))
    }
}

fn moment_values(u: &UnitaryMatrix) -> [f64; 3] {
    let a = u.entry(0, 0).norm_sqr();
    [a, a * a, u.trace().norm_sqr()]
}

/// Weingarten moments of `U(m)`: `E|u₁₁|² = 1/m`, `E|u₁₁|⁴ = 2/(m(m+1))`,
/// `E|tr u|² = 1`.
pub fn exact_moments(m: usize) -> [f64; 3] {
    let m = m as f64;
    [1.0 / m, 2.0 / (m * (m + 1.0)), 1.0]
}

const MOMENT_NAMES: [&str; 3] = ["E|u11|^2", "E|u11|^4", "E|tr u|^2"];

/// Haar moments at size `m`, plus the same moments of `VU` and `UV` for a fixed
/// Haar-random `V` (left and right invariance).
pub fn haar_test(m: usize, samples: usize, seed: u64) -> Result<HaarReport> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let fixed = haar_sample(m, &mut StreamFamily::new(seed, "haar-fixed").stream(0));
    let family = StreamFamily::new(seed, &format!("haar-{m}"));
    let est = mc::estimate(&family, samples, 9, |rng| {
        let u = haar_sample(m, rng);
        let left = fixed.mul(&u).expect("same size");
        let right = u.mul(&fixed).expect("same size");
        let mut out = Vec::with_capacity(9);
        for x in [&u, &left, &right] {
            out.extend(moment_values(x));
        }
        out
    });
    let exact = exact_moments(m);
    let mut moments = Vec::new();
    for (g, prefix) in ["", "left ", "right "].iter().enumerate() {
        for k in 0..3 {
            moments.push(MomentRecord::against_exact(
                &format!("{prefix}{}", MOMENT_NAMES[k]),
                est[3 * g + k],
                exact[k],
            ));
        }
    }
    Ok(HaarReport {
        m,
        samples,
        seed,
        moments,
    })
}

/// Comparison of Livšic-projected `U(m+1)` samples with direct `U(m)` samples.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PushforwardReport {
    pub m: usize,
    pub samples: usize,
    pub seed: u64,
    /// z-scores are for the difference projected minus direct.
    pub moments: Vec<MomentRecord>,
    pub max_unitarity_residual: f64,
    pub singular_branches: usize,
}

impl PushforwardReport {
    pub fn max_abs_z(&self) -> f64 {
        self.moments.iter().fold(0.0, |w, r| w.max(r.z.abs()))
    }
}

pub fn pushforward_consistency(m: usize, samples: usize, seed: u64) -> Result<PushforwardReport> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    // Columns: 5 moments projected, 5 moments direct, branch flag.
    let family = StreamFamily::new(seed, &format!("pushforward-{m}"));
    let est = mc::estimate(&family, samples, 11, |rng| {
        let big = haar_sample(m + 1, rng);
        let p = livsic_project(&big).expect("size at least 2");
        let direct = haar_sample(m, rng);
        let mut out = Vec::with_capacity(11);
        for u in [&p.matrix, &direct] {
            out.extend(moment_values(u));
            out.push(u.entry(0, 0).re);
            out.push(u.entry(0, 0).im);
        }
        out.push(if p.singular_branch { 1.0 } else { 0.0 });
        out
    });
    let exact = exact_moments(m);
    let names = [MOMENT_NAMES[0], MOMENT_NAMES[1], MOMENT_NAMES[2], "Re E u11", "Im E u11"];
    let exact_all = [exact[0], exact[1], exact[2], 0.0, 0.0];
    let moments = (0..5)
        .map(|k| MomentRecord {
            name: names[k].into(),
            empirical: est[k].mean,
            exact: exact_all[k],
            stderr: (est[k].stderr.powi(2) + est[5 + k].stderr.powi(2)).sqrt(),
            z: est[k].z_between(&est[5 + k]),
        })
        .collect();
    let max_residual = max_projection_residual(m, samples.min(10_000), seed);
    Ok(PushforwardReport {
        m,
        samples,
        seed,
        moments,
        max_unitarity_residual: max_residual,
        singular_branches: (est[10].mean * samples as f64).round() as usize,
    })
}

/// Largest unitarity residual over `samples` projected Haar matrices.
pub fn max_projection_residual(m: usize, samples: usize, seed: u64) -> f64 {
    let family = StreamFamily::new(seed, &format!("pushforward-{m}"));
    let idx: Vec<u64> = (0..samples as u64).collect();
    crate::par::map_ordered(&idx, |&i| {
        let big = haar_sample(m + 1, &mut family.stream(i));
        livsic_project(&big).expect("size at least 2").matrix.residual()
    })
    .into_iter()
    .fold(0.0, f64::max)
}

/// `E|⟨u_m e₁, e₁⟩|²` before and after the right action by a fixed pair.
pub fn right_action_invariance(
    m: usize,
    samples: usize,
    seed: u64,
) -> Result<(Estimate, Estimate)> {
    let fixed = StreamFamily::new(seed, "right-action-fixed");
    let v = haar_sample(m, &mut fixed.stream(0));
    let w = haar_sample(m, &mut fixed.stream(1));
    let family = StreamFamily::new(seed, &format!("right-action-{m}"));
    let est = mc::estimate(&family, samples, 2, |rng| {
        let u = embed_stabilized(&haar_sample(m, rng), m).expect("depth equals size");
        let moved = right_action(&u, &v, &w, m).expect("matching sizes");
        vec![
            u.top().entry(0, 0).norm_sqr(),
            moved.top().entry(0, 0).norm_sqr(),
        ]
    });
    Ok((est[0], est[1]))
}
