//! Heat-type semigroups `∫𝔤_r(τ)·(group at τ) dτ` built from the shift and
//! exponential-multiplier groups, realised both by Gauss-Hermite quadrature
//! and by their finite exponential series on polynomials.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{EVector, Pairing};
use crate::hardy_chi::{
    delta_dagger_power, f_transform, f_transform_inverse, phi_bar_power, HardyChiFunction,
};
use crate::hardy_w::{Flagged, HardyWFunction};
use crate::operators::AnnihilationVariant;
use crate::poly::Polynomial;

pub const DEFAULT_NODES: usize = 64;

/// Nodes and weights for `∫ e^{−υ²} h(υ) dυ ≈ Σ w_i h(υ_i)`, by Newton
/// iteration on the orthonormal Hermite recurrence.
pub fn gauss_hermite(n: usize) -> Vec<(f64, f64)> {
    assert!(n > 0, "at least one node");
    let pim4 = PI.powf(-0.25);
    let mut nodes = vec![(0.0, 0.0); n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    let mut z: f64 = 0.0;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0].0,
            3 => 1.91 * z - 0.91 * nodes[1].0,
            _ => 2.0 * z - nodes[i - 2].0,
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let step = p1 / pp;
            z -= step;
            if step.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        let w = 2.0 / (pp * pp);
        nodes[i] = (z, w);
        nodes[n - 1 - i] = (-z, w);
    }
    nodes.reverse();
    nodes
}

/// `𝔤_r(τ) = (4πr)^{−1/2} exp(−τ²/(4r))`, the centred normal density of
/// variance `2r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianKernel {
    r: f64,
}

impl GaussianKernel {
    pub fn new(r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidArgument(format!("kernel time must be positive, got {r}")));
        }
        Ok(Self { r })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn density(&self, tau: f64) -> f64 {
        (-tau * tau / (4.0 * self.r)).exp() / (4.0 * PI * self.r).sqrt()
    }

    /// Quadrature points `(τ_i, w_i)` for `∫𝔤_r(τ)h(τ)dτ`, via `τ = 2√r·υ`.
    pub fn nodes(&self, n: usize) -> Vec<(f64, f64)> {
        let scale = 2.0 * self.r.sqrt();
        gauss_hermite(n)
            .into_iter()
            .map(|(u, w)| (scale * u, w / PI.sqrt()))
            .collect()
    }

    /// `∫𝔤_r(τ)h(τ)dτ` by quadrature.
    pub fn integrate(&self, n: usize, h: impl Fn(f64) -> f64) -> f64 {
        self.nodes(n).into_iter().map(|(t, w)| w * h(t)).sum()
    }
}

/// `∫𝔤_r τ^{2k} dτ = 2(2k−1)!/(k−1)!·r^k` for `k ≥ 1`.
pub fn gaussian_moment(r: f64, k: u32) -> f64 {
    assert!(k >= 1, "moment order starts at 1");
    // (2k−1)!/(k−1)! = k·(k+1)···(2k−1)
    let ratio: f64 = (k..2 * k).map(|j| j as f64).product();
    2.0 * ratio * r.powi(k as i32)
}

/// `∫𝔤_r τ^p dτ` for any power: zero for odd `p`, one for `p = 0`.
pub fn gaussian_raw_moment(r: f64, p: u32) -> f64 {
    match p {
        0 => 1.0,
        p if p % 2 == 1 => 0.0,
        p => gaussian_moment(r, p / 2),
    }
}

fn rebuild(f: &HardyWFunction, poly: &Polynomial) -> Flagged<HardyWFunction> {
    HardyWFunction::from_polynomial(f.spec(), f.pairing(), poly).expect("same dimension")
}

fn check_r(r: f64) -> Result<()> {
    GaussianKernel::new(r).map(|_| ())
}

/// `G_r^{a*}f = ∫𝔤_r(τ)·M_{τa*}f dτ` by quadrature, truncated at the top
/// degree.
pub fn gw_mult(f: &HardyWFunction, a: &EVector, r: f64, nodes: usize) -> Result<Flagged<HardyWFunction>> {
    let kernel = GaussianKernel::new(r)?;
    let cap = f.spec().max_degree;
    let p = f.polynomial();
    let mut acc = Polynomial::zero(f.spec().dim);
    let mut overflow = false;
    for (tau, w) in kernel.nodes(nodes) {
        let (term, dropped) = p.mul_exp_pairing(&a.scale(Complex64::new(tau, 0.0)), cap);
        overflow |= dropped;
        acc = acc.add(&term.scale(Complex64::new(w, 0.0)));
    }
    let mut out = rebuild(f, &acc);
    out.overflow |= overflow;
    Ok(out)
}

/// `exp(r·a*²)f = Σ_k r^k (a*)^{2k} f/k!` as a finite series on polynomials.
pub fn gw_mult_series(f: &HardyWFunction, a: &EVector, r: f64) -> Result<Flagged<HardyWFunction>> {
    check_r(r)?;
    let cap = f.spec().max_degree;
    let square = Polynomial::pairing_with(a).mul(&Polynomial::pairing_with(a), cap).0;
    let mut term = f.polynomial();
    let mut acc = term.clone();
    let mut overflow = false;
    for k in 1.. {
        if term.is_zero() {
            break;
        }
        let (next, dropped) = term.mul(&square, cap);
        overflow |= dropped;
        term = next.scale(Complex64::new(r / k as f64, 0.0));
        acc = acc.add(&term);
    }
    let mut out = rebuild(f, &acc);
    out.overflow |= overflow;
    Ok(out)
}

/// `G_r^{∂_a}f = ∫𝔤_r(τ)·f(·+τa) dτ`, summed exactly as
/// `Σ_k ∫𝔤_r τ^{2k}·𝔡_a^{2k}f/(2k)!`.
pub fn gw_shift(f: &HardyWFunction, a: &EVector, r: f64) -> Result<HardyWFunction> {
    check_r(r)?;
    let p = f.polynomial();
    let mut acc = p.clone();
    let mut deriv = p;
    let mut fact = 1.0;
    for k in 1u32.. {
        deriv = deriv.directional_derivative(a, 2);
        if deriv.is_zero() {
            break;
        }
        fact *= ((2 * k - 1) * 2 * k) as f64;
        acc = acc.add(&deriv.scale(Complex64::new(gaussian_moment(r, k) / fact, 0.0)));
    }
    Ok(rebuild(f, &acc).value)
}

/// Quadrature form of [`gw_shift`].
pub fn gw_shift_quadrature(f: &HardyWFunction, a: &EVector, r: f64, nodes: usize) -> Result<HardyWFunction> {
    let kernel = GaussianKernel::new(r)?;
    let p = f.polynomial();
    let mut acc = Polynomial::zero(f.spec().dim);
    for (tau, w) in kernel.nodes(nodes) {
        acc = acc.add(&p.shift(&a.scale(Complex64::new(tau, 0.0))).scale(Complex64::new(w, 0.0)));
    }
    Ok(rebuild(f, &acc).value)
}

/// Which group the χ-side semigroup is built on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ChiSemigroup {
    /// Generated by `δ†²_a`.
    Shift,
    /// Generated by `φ̄²_a`.
    Mult,
}

impl ChiSemigroup {
    pub fn name(self) -> &'static str {
        match self {
            ChiSemigroup::Shift => "SHIFT",
            ChiSemigroup::Mult => "MULT",
        }
    }
}

/// `ℱ⁻¹∘G_r∘ℱ`: the shift generator `δ†_a` corresponds to `a*` and the
/// multiplier `φ̄_a` to `𝔡_a`.
pub fn gw_chi(
    f: &HardyChiFunction,
    a: &EVector,
    r: f64,
    which: ChiSemigroup,
    pairing: Pairing,
) -> Result<Flagged<HardyChiFunction>> {
    let hat = f_transform(f, pairing);
    let out = match which {
        ChiSemigroup::Shift => gw_mult(&hat, a, r, DEFAULT_NODES)?,
        ChiSemigroup::Mult => Flagged::exact(gw_shift(&hat, a, r)?),
    };
    Ok(Flagged {
        value: f_transform_inverse(&out.value),
        overflow: out.overflow,
    })
}

/// Generator of [`gw_chi`]: `δ†²_a f` or `φ̄²_a f`.
pub fn chi_generator(
    f: &HardyChiFunction,
    a: &EVector,
    which: ChiSemigroup,
    variant: AnnihilationVariant,
) -> Result<HardyChiFunction> {
    match which {
        ChiSemigroup::Shift => delta_dagger_power(f, a, 2),
        ChiSemigroup::Mult => phi_bar_power(f, a, 2, variant),
    }
}

/// Finite-difference errors `‖(S_h f − f)/h − Af‖` over a step schedule and
/// the fitted convergence order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeneratorStudy {
    pub steps: Vec<f64>,
    pub errors: Vec<f64>,
    pub order: f64,
}

impl GeneratorStudy {
    /// Shortfall below first order. Errors at roundoff level mean the
    /// difference quotient is exact on the truncation (the second-order term
    /// lies above the top degree), which counts as no shortfall.
    pub fn order_shortfall(&self) -> f64 {
        if self.errors.iter().all(|&e| e <= 1e-11) {
            0.0
        } else {
            (1.0 - self.order).max(0.0)
        }
    }
}

/// Least-squares slope of `log error` against `log h`.
pub fn fitted_order(steps: &[f64], errors: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = steps
        .iter()
        .zip(errors)
        .map(|(h, e)| (h.ln(), e.max(f64::MIN_POSITIVE).ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Generator study on `H²_w`: `G^{a*}_h` against `(a*)²` or `G^{∂_a}_h`
/// against `𝔡²_a`.
pub fn w_generator_study(
    f: &HardyWFunction,
    a: &EVector,
    which: ChiSemigroup,
    steps: &[f64],
) -> Result<GeneratorStudy> {
    let target = match which {
        ChiSemigroup::Shift => {
            let sq = Polynomial::pairing_with(a).mul(&Polynomial::pairing_with(a), usize::MAX).0;
            rebuild(f, &f.polynomial().mul(&sq, f.spec().max_degree).0).value
        }
        ChiSemigroup::Mult => f.directional_derivative(a, 2),
    };
    let mut errors = Vec::with_capacity(steps.len());
    for &h in steps {
        let moved = match which {
            ChiSemigroup::Shift => gw_mult(f, a, h, DEFAULT_NODES)?.value,
            ChiSemigroup::Mult => gw_shift_quadrature(f, a, h, DEFAULT_NODES)?,
        };
        let quotient = moved.sub(f)?.scale(Complex64::new(1.0 / h, 0.0));
        errors.push(quotient.distance(&target)?);
    }
    Ok(GeneratorStudy {
        steps: steps.to_vec(),
        order: fitted_order(steps, &errors),
        errors,
    })
}

/// Generator study on `H²_χ` for [`gw_chi`].
pub fn chi_generator_study(
    f: &HardyChiFunction,
    a: &EVector,
    which: ChiSemigroup,
    pairing: Pairing,
    variant: AnnihilationVariant,
    steps: &[f64],
) -> Result<GeneratorStudy> {
    let target = chi_generator(f, a, which, variant)?;
    let mut errors = Vec::with_capacity(steps.len());
    for &h in steps {
        let moved = gw_chi(f, a, h, which, pairing)?.value;
        let quotient = HardyChiFunction::from_coefficients(
            moved.sub(f)?.coefficients().scale(Complex64::new(1.0 / h, 0.0)),
        );
        errors.push(quotient.distance(&target)?);
    }
    Ok(GeneratorStudy {
        steps: steps.to_vec(),
        order: fitted_order(steps, &errors),
        errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{FockVector, TruncationSpec};
    use crate::hardy_chi::{phi_map, random_evector, random_fock};
    use crate::mc::StreamFamily;
    use crate::partitions::BasisKey;

    fn spec(n: usize, d: usize) -> TruncationSpec {
        TruncationSpec::new(n, d).unwrap()
    }

    #[test]
    fn hermite_rule_integrates_polynomials() {
        let rule = gauss_hermite(64);
        assert_eq!(rule.len(), 64);
        let total: f64 = rule.iter().map(|p| p.1).sum();
        assert!((total - PI.sqrt()).abs() < 1e-13);
        // ∫e^{−υ²}υ⁴ = 3√π/4
        let m4: f64 = rule.iter().map(|(u, w)| w * u.powi(4)).sum();
        assert!((m4 - 0.75 * PI.sqrt()).abs() < 1e-12);
        assert!(rule.windows(2).all(|p| p[0].0 < p[1].0));
        let small = gauss_hermite(3);
        assert!((small[2].0 - 1.5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn moment_examples_and_quadrature() {
        assert_eq!(gaussian_moment(0.7, 1), 1.4);
        assert_eq!(gaussian_moment(1.0, 2), 12.0);
        assert_eq!(gaussian_raw_moment(1.0, 5), 0.0);
        for r in [0.5, 1.0, 2.0] {
            let kernel = GaussianKernel::new(r).unwrap();
            for k in 1..=6u32 {
                let q = kernel.integrate(64, |t| t.powi(2 * k as i32));
                let exact = gaussian_moment(r, k);
                assert!(((q - exact) / exact).abs() < 1e-10, "r={r} k={k}");
            }
        }
        assert!(GaussianKernel::new(0.0).is_err());
    }

    #[test]
    fn mult_semigroup_of_the_constant() {
        let s = spec(6, 2);
        let one = HardyWFunction::constant(s, Pairing::Bargmann);
        let a = EVector::basis(1, 2);
        let r = 0.3;
        let g = gw_mult_series(&one, &a, r).unwrap();
        let p = g.value.polynomial();
        let mut fact = 1.0;
        for k in 0..=3u32 {
            if k > 0 {
                fact *= k as f64;
            }
            let c = p.coeff(&[2 * k, 0]);
            assert!((c.re - r.powi(k as i32) / fact).abs() < 1e-15);
        }
        let q = gw_mult(&one, &a, r, 64).unwrap();
        assert!(q.value.distance(&g.value).unwrap() < 1e-12);
        let z = gw_mult(&one, &EVector::zero(2), r, 64).unwrap();
        assert!(z.value.distance(&one).unwrap() < 1e-14);
    }

    #[test]
    fn shift_semigroup_of_a_quadratic() {
        let s = spec(4, 2);
        let mut poly = Polynomial::zero(2);
        poly.add_term(vec![2, 0], Complex64::new(1.0, 0.0));
        let f = HardyWFunction::from_polynomial(s, Pairing::Bargmann, &poly).unwrap().value;
        let r = 0.8;
        let g = gw_shift(&f, &EVector::basis(1, 2), r).unwrap().polynomial();
        assert!((g.coeff(&[0, 0]).re - 2.0 * r).abs() < 1e-14);
        assert!((g.coeff(&[2, 0]).re - 1.0).abs() < 1e-14);
        let lin = HardyWFunction::from_polynomial(s, Pairing::Bargmann, &Polynomial::linear(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0)]))
            .unwrap()
            .value;
        assert!(gw_shift(&lin, &EVector::basis(2, 2), r).unwrap().distance(&lin).unwrap() < 1e-15);
    }

    #[test]
    fn quadrature_series_and_semigroup_agree() {
        let s = spec(6, 3);
        let fam = StreamFamily::new(4, "gw");
        let mut rng = fam.stream(0);
        let f = HardyWFunction::new(random_fock(&mut rng, s, 4, 1.0), Pairing::Bargmann);
        let a = random_evector(&mut rng, 3, 0.7);
        for r in [0.1, 1.0] {
            let q = gw_mult(&f, &a, r, 64).unwrap().value;
            let o = gw_mult_series(&f, &a, r).unwrap().value;
            assert!(q.distance(&o).unwrap() < 1e-8);
            let sh = gw_shift(&f, &a, r).unwrap();
            let shq = gw_shift_quadrature(&f, &a, r, 64).unwrap();
            assert!(sh.distance(&shq).unwrap() < 1e-8);
        }
        let (r, t) = (0.3, 0.45);
        let two = gw_mult_series(&gw_mult_series(&f, &a, t).unwrap().value, &a, r).unwrap().value;
        let one = gw_mult_series(&f, &a, r + t).unwrap().value;
        assert!(two.distance(&one).unwrap() < 1e-12);
        let two = gw_shift(&gw_shift(&f, &a, t).unwrap(), &a, r).unwrap();
        let one = gw_shift(&f, &a, r + t).unwrap();
        assert!(two.distance(&one).unwrap() < 1e-12);
    }

    #[test]
    fn generators_converge_at_first_order() {
        let s = spec(6, 2);
        let fam = StreamFamily::new(9, "gen");
        let mut rng = fam.stream(0);
        let psi = random_fock(&mut rng, s, 5, 1.0);
        let a = random_evector(&mut rng, 2, 0.6);
        let steps = [1e-1, 5e-2, 2.5e-2, 1.25e-2];
        let f = HardyWFunction::new(psi.clone(), Pairing::Bargmann);
        for which in [ChiSemigroup::Shift, ChiSemigroup::Mult] {
            let st = w_generator_study(&f, &a, which, &steps).unwrap();
            assert!(st.order > 0.9, "{which:?} {st:?}");
            let chi = chi_generator_study(
                &phi_map(&psi),
                &a,
                which,
                Pairing::Bargmann,
                AnnihilationVariant::BargmannAdjoint,
                &steps,
            )
            .unwrap();
            assert!(chi.order > 0.9, "{which:?} {chi:?}");
        }
    }

    #[test]
    fn low_truncation_makes_the_difference_quotient_exact() {
        let s = spec(3, 2);
        let mut rng = StreamFamily::new(9, "gen-low").stream(0);
        let f = HardyWFunction::new(random_fock(&mut rng, s, 2, 1.0), Pairing::Bargmann);
        let a = random_evector(&mut rng, 2, 0.6);
        for which in [ChiSemigroup::Shift, ChiSemigroup::Mult] {
            let st = w_generator_study(&f, &a, which, &[1e-2, 5e-3, 2.5e-3]).unwrap();
            assert!(st.errors.iter().all(|&e| e < 1e-11), "{which:?} {st:?}");
            assert_eq!(st.order_shortfall(), 0.0);
        }
    }

    #[test]
    fn chi_semigroup_near_zero_is_identity() {
        let s = spec(5, 2);
        let f = phi_map(&FockVector::basis(s, BasisKey::power(2, 2)).unwrap());
        let a = EVector::from_real(&[0.4, -0.9]);
        for which in [ChiSemigroup::Shift, ChiSemigroup::Mult] {
            let g = gw_chi(&f, &a, 1e-8, which, Pairing::Bargmann).unwrap().value;
            assert!(g.distance(&f).unwrap() < 1e-6);
        }
    }
}
