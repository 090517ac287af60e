//! Verification suites. Each suite records contracted checks and report-only
//! studies into a [`Recorder`].

use std::collections::BTreeMap;

use hardy_core::fock::{exponential_tail, exponential_vector, polarization, polarization_exact};
use hardy_core::hardy_chi::{
    chi_commutator_residual, mc_basis_inner, mc_f_transform, mc_taylor_coefficient,
    multiplier_intertwining_residual, norm_convergence_study, phi_map, random_complex,
    random_evector, random_fock, HardyChiFunction, NormStudy,
};
use hardy_core::hardy_w::{commutator_check, weyl_group_commutation, HardyWFunction, WORK_PAD};
use hardy_core::heisenberg::{
    aux_inv, aux_mul, chi_w_agreement, g_iso, heis_inv, heis_mul, orbit_rank_probe, quat_mul,
    weyl_relation_residual, ws_homomorphism_residual, HeisenbergElement, Quaternion,
    QuaternionVector,
};
use hardy_core::mc::StreamFamily;
use hardy_core::par;
use hardy_core::partitions::{self, diagrams_of_weight, BasisKey, YoungDiagram};
use hardy_core::semigroups::{
    chi_generator_study, gaussian_moment, gw_chi, gw_mult, gw_mult_series, gw_shift,
    gw_shift_quadrature, w_generator_study, ChiSemigroup, GaussianKernel, DEFAULT_NODES,
};
use hardy_core::unitary::{haar_test, pushforward_consistency, right_action_invariance};
use hardy_core::{
    EVector, Error, FockVector, OperatorMatrix, Pairing, Result, TruncationSpec,
};
use itertools::Itertools;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::RunConfig;
use crate::report::{Recorder, Report};

pub const SUITES: [&str; 9] = [
    "weights",
    "fock",
    "operators",
    "hardy",
    "commutation",
    "gw",
    "heisenberg",
    "haar",
    "ftransform",
];

/// Largest residual over a batch; NaN propagates so it can never pass.
fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values
        .into_iter()
        .fold(0.0, |w: f64, v| if v.is_nan() || w.is_nan() { f64::NAN } else { w.max(v) })
}

fn rng(cfg: &RunConfig, tag: &str) -> ChaCha8Rng {
    StreamFamily::new(cfg.seed, tag).stream(0)
}

fn real_evector(rng: &mut ChaCha8Rng, dim: usize, sigma: f64) -> EVector {
    EVector::new(random_evector(rng, dim, sigma).coords.iter().map(|z| Complex64::new(z.re, 0.0)).collect())
}

/// Spec used for checks that carry padded polynomial products.
fn padded_spec(cfg: &RunConfig) -> TruncationSpec {
    TruncationSpec { max_degree: cfg.spec.max_degree.min(4), dim: cfg.spec.dim.min(3) }
}

fn factorial(n: usize) -> BigInt {
    let mut acc = BigInt::from(1);
    for k in 2..=n {
        acc *= k;
    }
    acc
}

/// Weight tables computed from products of factorials, independent of the
/// closed forms in the core crate.
pub fn weight_oracle(d: &YoungDiagram) -> (BigRational, BigRational, BigRational) {
    let n = d.weight();
    let l = d.parts().len().max(1);
    let lambda_fact: BigInt = d.parts().iter().map(|&p| factorial(p as usize)).product();
    let c = BigRational::new(factorial(l - 1) * factorial(n), factorial(l - 1 + n));
    let h = BigRational::new(lambda_fact, factorial(n));
    let w = &c * &h;
    (c, h, w)
}

pub fn weight_table(max_degree: usize) -> serde_json::Value {
    let rows: Vec<_> = (0..=max_degree)
        .flat_map(diagrams_of_weight)
        .map(|d| {
            let c = partitions::constant_c(&d);
            let h = partitions::h_norm_sq(&d);
            let w = partitions::w_norm_sq(&d);
            json!({
                "lambda": d.parts(),
                "C": c.to_string(),
                "h_norm_sq": h.to_string(),
                "w_norm_sq": w.to_string(),
                "C_f64": partitions::to_f64(&c),
                "h_norm_sq_f64": partitions::to_f64(&h),
                "w_norm_sq_f64": partitions::to_f64(&w),
            })
        })
        .collect();
    serde_json::Value::Array(rows)
}

/// The weight table as CSV, exact rationals first and their floats after.
pub fn weight_csv(max_degree: usize) -> String {
    let mut out = String::from("lambda,C,h_norm_sq,w_norm_sq,C_f64,h_norm_sq_f64,w_norm_sq_f64\n");
    for d in (0..=max_degree).flat_map(diagrams_of_weight) {
        let exact = [partitions::constant_c(&d), partitions::h_norm_sq(&d), partitions::w_norm_sq(&d)];
        let parts = d.parts().iter().map(u32::to_string).join(",");
        out.push_str(&crate::report::csv_field(&format!("[{parts}]")));
        for v in &exact {
            out.push_str(&format!(",{v}"));
        }
        for v in &exact {
            out.push_str(&format!(",{:e}", partitions::to_f64(v)));
        }
        out.push('\n');
    }
    out
}

pub fn weights(rec: &mut Recorder) -> Result<()> {
    let n = rec.config().spec.max_degree;
    let mut mismatches = 0usize;
    let mut float_gap: f64 = 0.0;
    for d in (0..=n).flat_map(diagrams_of_weight) {
        let (c, h, w) = weight_oracle(&d);
        if c != partitions::constant_c(&d) || h != partitions::h_norm_sq(&d) || w != partitions::w_norm_sq(&d) {
            mismatches += 1;
        }
        for (x, y) in [
            (partitions::constant_c_f64(&d), &c),
            (partitions::h_norm_sq_f64(&d), &h),
            (partitions::w_norm_sq_f64(&d), &w),
        ] {
            let exact = partitions::to_f64(y);
            float_gap = float_gap.max(((x - exact) / exact).abs());
        }
    }
    rec.check("exact_tables", "weight tables against factorial oracle", mismatches as f64, 0.0);
    rec.check("float_tables", "floating weights against exact weights", float_gap, 1e-14);
    if n >= 3 {
        let c21 = partitions::constant_c_f64(&YoungDiagram::new(vec![2, 1])?);
        rec.check("C[2,1]", "weight constant of (2,1) is 1/4", (c21 - 0.25).abs(), 0.0);
    }
    rec.table("weights", weight_table(n));
    Ok(())
}

pub fn fock(rec: &mut Recorder) -> Result<()> {
    let cfg = rec.config().clone();
    let spec = cfg.spec;
    let mut bad_counts = 0usize;
    for dim in 1..=spec.dim {
        for n in 0..=spec.max_degree {
            let keys = partitions::keys_of_degree(n, dim)?.len();
            let brute = (1..=dim).combinations_with_replacement(n).count();
            let formula = partitions::binomial(n + dim - 1, n);
            if BigInt::from(keys) != formula || keys != brute {
                bad_counts += 1;
            }
        }
    }
    rec.check("basis_counts", "canonical key count equals binomial(n+d-1, n)", bad_counts as f64, 0.0);

    let pol_spec = TruncationSpec { max_degree: spec.max_degree.min(4), dim: spec.dim.min(3) };
    let mut float_res: f64 = 0.0;
    let mut exact_bad = 0usize;
    for key in partitions::enumerate_keys(pol_spec.max_degree, pol_spec.dim)? {
        let target = FockVector::basis(pol_spec, key.clone())?;
        float_res = float_res.max(polarization(pol_spec, &key)?.max_abs_diff(&target));
        let exact = polarization_exact(pol_spec, &key)?;
        let one = BigRational::from_integer(BigInt::from(1));
        if exact.len() != 1 || exact.get(&key) != Some(&one) {
            exact_bad += 1;
        }
    }
    rec.check("polarization_float", "polarization reconstructs basis vectors", float_res, 1e-10);
    rec.check("polarization_exact", "polarization reconstructs basis vectors exactly", exact_bad as f64, 0.0);

    let mut r = rng(&cfg, "fock-contractivity");
    let contract = worst((0..200).map(|_| {
        let psi = random_fock(&mut r, spec, spec.max_degree, 1.0);
        (psi.norm(Pairing::W) - psi.norm(Pairing::H)).max(0.0)
    }));
    rec.check("contractivity", "weighted norm is dominated by the unweighted norm", contract, 0.0);

    let mut r = rng(&cfg, "fock-exponential");
    let bound = worst((0..200).map(|_| {
        let x = random_evector(&mut r, spec.dim, 1.0);
        let radius = 2.0 * rand::Rng::random::<f64>(&mut r);
        let x = x.scale(Complex64::new(radius / x.norm_sq().sqrt().max(1e-300), 0.0));
        let s = x.norm_sq();
        let eps = exponential_vector(spec, &x).expect("dimension matches");
        (eps.norm_sq(Pairing::W) - (s.exp() + exponential_tail(s, spec.max_degree))).max(0.0)
    }));
    rec.check("exponential_bound", "coherent vector norm bounded by exp of the squared norm", bound, 0.0);
    Ok(())
}

pub fn operators(rec: &mut Recorder) -> Result<()> {
    let cfg = rec.config().clone();
    let spec = cfg.spec;
    let keys = partitions::enumerate_keys(spec.max_degree, spec.dim)?;
    let idx: Vec<u64> = (0..100).collect();
    let fam = StreamFamily::new(cfg.seed, "operators-monomial");
    let residuals = par::map_ordered(&idx, |&i| -> Result<f64> {
        let mut r = fam.stream(i);
        let key = keys[1 + (rand::Rng::random::<u64>(&mut r) as usize) % (keys.len() - 1)].clone();
        let m = 1 + (rand::Rng::random::<u64>(&mut r) as usize) % key.degree();
        let a = random_evector(&mut r, spec.dim, 1.0);
        let psi = FockVector::basis(spec, key)?;
        let closed = OperatorMatrix::annihilation_monomial(spec, &a, m)?.apply(&psi)?;
        let adjoint = OperatorMatrix::creation(spec, &a, m)?.adjoint(Pairing::H).apply(&psi)?;
        Ok(closed.max_abs_diff(&adjoint))
    });
    let res = worst(residuals.into_iter().collect::<Result<Vec<_>>>()?);
    rec.check("monomial_is_h_adjoint", "closed-form annihilation equals the unweighted adjoint", res, 1e-10);

    let s = TruncationSpec::new(3, 2)?;
    let up = OperatorMatrix::creation(s, &EVector::basis(1, 2), 1)?;
    let e12 = FockVector::basis(s, BasisKey::from_parts(&[1, 1], &[1, 2])?)?;
    let e2 = BasisKey::power(2, 1);
    let h = up.adjoint(Pairing::H).apply(&e12)?.get(&e2);
    let w = up.adjoint(Pairing::W).apply(&e12)?.get(&e2);
    rec.check(
        "adjoint_witness",
        "weighted adjoint differs from closed form (1/2 vs 1/6)",
        (h - Complex64::new(0.5, 0.0)).norm().max((w - Complex64::new(1.0 / 6.0, 0.0)).norm()),
        1e-15,
    );

    let mut r = rng(&cfg, "operators-groups");
    let mut creation = Vec::new();
    let mut annihilation = Vec::new();
    let mut shift = Vec::new();
    let mut mult = Vec::new();
    for _ in 0..50 {
        let psi = random_fock(&mut r, spec, spec.max_degree, 1.0);
        let a = random_evector(&mut r, spec.dim, 0.5);
        let b = random_evector(&mut r, spec.dim, 0.5);
        let ab = a.add(&b);
        let two = OperatorMatrix::exp_creation(spec, &a)?.apply(&OperatorMatrix::exp_creation(spec, &b)?.apply(&psi)?)?;
        creation.push(two.max_abs_diff(&OperatorMatrix::exp_creation(spec, &ab)?.apply(&psi)?));
        let down = |v: &EVector| OperatorMatrix::exp_annihilation(spec, v, cfg.variant);
        let two = down(&a)?.apply(&down(&b)?.apply(&psi)?)?;
        annihilation.push(two.max_abs_diff(&down(&ab)?.apply(&psi)?));
        let f = HardyWFunction::new(psi, cfg.pairing);
        shift.push(f.shift(&a).shift(&b).distance(&f.shift(&ab))?);
        let two = f.multiply_exp(&b).value.multiply_exp(&a).value;
        mult.push(two.distance(&f.multiply_exp(&ab).value)?);
    }
    rec.check("creation_group", "exponential creation is a group", worst(creation), 1e-10);
    rec.check("annihilation_group", "exponential annihilation is a group", worst(annihilation), 1e-10);
    rec.check("shift_group", "shifts compose additively", worst(shift), 1e-10);
    rec.check("multiplier_group", "exponential multipliers compose additively", worst(mult), 1e-10);
    Ok(())
}

pub fn hardy(rec: &mut Recorder) -> Result<()> {
    let cfg = rec.config().clone();
    let spec = cfg.spec;
    let fam = StreamFamily::new(cfg.seed, "hardy-intertwining");
    let idx: Vec<u64> = (0..50).collect();
    let rows = par::map_ordered(&idx, |&i| -> Result<(f64, f64, f64)> {
        let mut r = fam.stream(i);
        let f = phi_map(&random_fock(&mut r, spec, spec.max_degree, 1.0));
        let a = random_evector(&mut r, spec.dim, 0.5);
        let shift = hardy_core::hardy_chi::shift_intertwining_residual(&f, &a, cfg.variant, cfg.pairing)?;
        let mult = multiplier_intertwining_residual(&f, &a, cfg.pairing)?;
        let g = HardyWFunction::new(random_fock(&mut r, spec, spec.max_degree, 1.0), cfg.pairing);
        let via_op = g.shift_via_operator(&a)?.distance(&g.shift(&a))?;
        Ok((shift, mult, via_op))
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    rec.check(
        "shift_intertwining",
        "transform carries the multiplier group to shifts",
        worst(rows.iter().map(|r| r.0)),
        1e-10,
    );
    rec.check(
        "multiplier_intertwining",
        "transform carries the shift group to exponential multipliers",
        worst(rows.iter().map(|r| r.1)),
        1e-10,
    );
    rec.check(
        "shift_as_operator",
        "shift equals the adjoint of exponential creation",
        worst(rows.iter().map(|r| r.2)),
        1e-10,
    );

    if spec.dim >= 2 && spec.max_degree >= 2 {
        let psi = FockVector::basis(spec, BasisKey::from_parts(&[1, 1], &[1, 2])?)?;
        let mut x = EVector::zero(spec.dim);
        x.coords[0] = Complex64::new(1.0, 0.0);
        x.coords[1] = Complex64::new(1.0, 0.0);
        let v = HardyWFunction::new(psi, Pairing::H).evaluate(&x)?;
        rec.check("evaluation_example", "coherent-state evaluation of e1.e2 at e1+e2 is 1/2", (v - Complex64::new(0.5, 0.0)).norm(), 1e-15);
    }
    Ok(())
}

pub fn commutation(rec: &mut Recorder) -> Result<()> {
    let cfg = rec.config().clone();
    let spec = cfg.spec;
    let mut r = rng(&cfg, "commutation");
    let mut w_side = Vec::new();
    let mut chi_side = Vec::new();
    for _ in 0..50 {
        let psi = random_fock(&mut r, spec, spec.max_degree.saturating_sub(1), 1.0);
        let a = random_evector(&mut r, spec.dim, 1.0);
        let b = random_evector(&mut r, spec.dim, 1.0);
        w_side.push(commutator_check(&HardyWFunction::new(psi.clone(), cfg.pairing), &a, &b)?);
        chi_side.push(chi_commutator_residual(&phi_map(&psi), &a, &b, cfg.variant)?);
    }
    rec.check("w_commutator", "derivative and multiplier satisfy the canonical commutation relation", worst(w_side), 1e-10);
    rec.check("chi_commutator", "transported generators satisfy the canonical commutation relation", worst(chi_side), 1e-10);

    let small = padded_spec(&cfg);
    let mut weyl = Vec::new();
    for _ in 0..20 {
        let f = HardyWFunction::new(random_fock(&mut r, small, small.max_degree, 1.0), cfg.pairing);
        let a = random_evector(&mut r, small.dim, 0.5);
        let b = random_evector(&mut r, small.dim, 0.5);
        weyl.push(weyl_group_commutation(&f, &a, &b, WORK_PAD)?);
    }
    rec.check("group_commutation", "shift and multiplier groups commute up to exp of the pairing", worst(weyl), 1e-10);
    Ok(())
}

pub fn gw(rec: &mut Recorder) -> Result<()> {
    let cfg = rec.config().clone();
    let spec = TruncationSpec { max_degree: cfg.spec.max_degree, dim: cfg.spec.dim.min(3) };
    let mut r = rng(&cfg, "gw");
    let mut quad = Vec::new();
    let mut shift_quad = Vec::new();
    let mut series_law = Vec::new();
    let mut quad_law = Vec::new();
    let mut shift_law = Vec::new();
    for _ in 0..10 {
        let f = HardyWFunction::new(random_fock(&mut r, spec, spec.max_degree.saturating_sub(2), 1.0), cfg.pairing);
        let a = random_evector(&mut r, spec.dim, 0.7);
        for rr in [0.1, 1.0] {
            quad.push(gw_mult(&f, &a, rr, DEFAULT_NODES)?.value.distance(&gw_mult_series(&f, &a, rr)?.value)?);
            shift_quad.push(gw_shift(&f, &a, rr)?.distance(&gw_shift_quadrature(&f, &a, rr, DEFAULT_NODES)?)?);
        }
        let (s, t) = (0.3, 0.45);
        let two = gw_mult_series(&gw_mult_series(&f, &a, t)?.value, &a, s)?.value;
        series_law.push(two.distance(&gw_mult_series(&f, &a, s + t)?.value)?);
        let two = gw_mult(&gw_mult(&f, &a, t, DEFAULT_NODES)?.value, &a, s, DEFAULT_NODES)?.value;
        quad_law.push(two.distance(&gw_mult(&f, &a, s + t, DEFAULT_NODES)?.value)?);
        let two = gw_shift(&gw_shift(&f, &a, t)?, &a, s)?;
        shift_law.push(two.distance(&gw_shift(&f, &a, s + t)?)?);
    }
    rec.check("mult_quadrature", "quadrature matches the exp(r a*^2) series", worst(quad), 1e-8);
    rec.check("shift_quadrature", "moment expansion matches quadrature", worst(shift_quad), 1e-8);
    rec.check("mult_semigroup_series", "semigroup law in series form", worst(series_law), 1e-12);
    rec.check("mult_semigroup_quadrature", "semigroup law in quadrature form", worst(quad_law), 1e-8);
    rec.check("shift_semigroup", "semigroup law for the shift kernel", worst(shift_law), 1e-12);

    let mut moment = Vec::new();
    for rr in [0.5, 1.0, 2.0] {
        let kernel = GaussianKernel::new(rr)?;
        for k in 1..=6u32 {
            let q = kernel.integrate(DEFAULT_NODES, |t| t.powi(2 * k as i32));
            let exact = gaussian_moment(rr, k);
            moment.push(((q - exact) / exact).abs());
        }
    }
    rec.check("moments", "even Gaussian moments 2(2k-1)!/(k-1)! r^k", worst(moment), 1e-8);

    // Degree N−1 input keeps the second-order terms of both generators alive.
    let steps = [1e-2, 5e-3, 2.5e-3, 1.25e-3];
    let psi = random_fock(&mut r, spec, spec.max_degree.saturating_sub(1), 1.0);
    let a = random_evector(&mut r, spec.dim, 0.6);
    let f = HardyWFunction::new(psi.clone(), cfg.pairing);
    let chi = phi_map(&psi);
    for which in [ChiSemigroup::Shift, ChiSemigroup::Mult] {
        let name = which.name().to_lowercase();
        let w = w_generator_study(&f, &a, which, &steps)?;
        rec.check(&format!("generator_order_{name}"), "finite-difference generator converges at first order", w.order_shortfall(), 0.05);
        let c = chi_generator_study(&chi, &a, which, cfg.pairing, cfg.variant, &steps)?;
        rec.check(&format!("chi_generator_order_{name}"), "transported generator converges at first order", c.order_shortfall(), 0.05);
        let near = gw_chi(&chi, &a, 1e-8, which, cfg.pairing)?.value.distance(&chi)?;
        rec.check(&format!("chi_small_time_{name}"), "semigroup at small time recovers the input", near, 1e-6);
        let (s, t) = (0.2, 0.35);
        let two = gw_chi(&gw_chi(&chi, &a, t, which, cfg.pairing)?.value, &a, s, which, cfg.pairing)?.value;
        let law = two.distance(&gw_chi(&chi, &a, s + t, which, cfg.pairing)?.value)?;
        rec.check(&format!("chi_semigroup_{name}"), "semigroup law on the unitary model", law, 1e-8);
    }
    Ok(())
}

fn random_element(r: &mut ChaCha8Rng, dim: usize, sigma: f64) -> HeisenbergElement {
    HeisenbergElement::new(random_evector(r, dim, sigma), random_evector(r, dim, sigma), random_complex(r, sigma))
        .expect("same dimension")
}

pub fn heisenberg(rec: &mut Recorder) -> Result<()> {
    let cfg = rec.config().clone();
    let basis = [Quaternion::one(), Quaternion::i(), Quaternion::j(), Quaternion::k()];
    let table = [
        [(1.0, 0), (1.0, 1), (1.0, 2), (1.0, 3)],
        [(1.0, 1), (-1.0, 0), (1.0, 3), (-1.0, 2)],
        [(1.0, 2), (-1.0, 3), (-1.0, 0), (1.0, 1)],
        [(1.0, 3), (1.0, 2), (-1.0, 1), (-1.0, 0)],
    ];
    let mut wrong = 0;
    for (i, row) in table.iter().enumerate() {
        for (j, &(sign, idx)) in row.iter().enumerate() {
            let mut want = [0.0; 4];
            want[idx] = sign;
            if quat_mul(basis[i], basis[j]).to_real4() != want {
                wrong += 1;
            }
        }
    }
    rec.check("quaternion_table", "quaternion structure constants", wrong as f64, 0.0);

    let dim = cfg.spec.dim;
    let mut r = rng(&cfg, "heisenberg-group");
    let unit = HeisenbergElement::unit(dim);
    let mut axioms = Vec::new();
    let mut iso = Vec::new();
    for _ in 0..100 {
        let (x, y, z) = (random_element(&mut r, dim, 1.0), random_element(&mut r, dim, 1.0), random_element(&mut r, dim, 1.0));
        axioms.push(heis_mul(&heis_mul(&x, &y), &z).max_abs_diff(&heis_mul(&x, &heis_mul(&y, &z))));
        axioms.push(heis_mul(&x, &heis_inv(&x)).max_abs_diff(&unit));
        axioms.push(heis_mul(&heis_inv(&x), &x).max_abs_diff(&unit));
        axioms.push(heis_mul(&unit, &x).max_abs_diff(&x).max(heis_mul(&x, &unit).max_abs_diff(&x)));
        iso.push(g_iso(&heis_mul(&x, &y)).max_abs_diff(&aux_mul(&g_iso(&x), &g_iso(&y))?));
        iso.push(g_iso(&heis_inv(&x)).max_abs_diff(&aux_inv(&g_iso(&x))));
    }
    rec.check("group_axioms", "unit, inverse and associativity of the Heisenberg group", worst(axioms), 1e-12);
    rec.check("isomorphism", "isomorphism onto the auxiliary group", worst(iso), 1e-12);

    let small = padded_spec(&cfg);
    let fam = StreamFamily::new(cfg.seed, "heisenberg-weyl");
    let idx: Vec<u64> = (0..100).collect();
    let rows = par::map_ordered(&idx, |&i| -> Result<(f64, f64, f64)> {
        let mut r = fam.stream(i);
        let f = HardyWFunction::new(random_fock(&mut r, small, small.max_degree, 1.0), cfg.pairing);
        let p = QuaternionVector::new(real_evector(&mut r, small.dim, 0.5), real_evector(&mut r, small.dim, 0.5))?;
        let q = QuaternionVector::new(real_evector(&mut r, small.dim, 0.5), real_evector(&mut r, small.dim, 0.5))?;
        let weyl = weyl_relation_residual(&p, &q, &f, WORK_PAD)?;
        let x = random_element(&mut r, small.dim, 0.5);
        let y = random_element(&mut r, small.dim, 0.5);
        let hom = ws_homomorphism_residual(&x, &y, &f, WORK_PAD)?;
        let pc = QuaternionVector::new(random_evector(&mut r, small.dim, 0.5), random_evector(&mut r, small.dim, 0.5))?;
        let qc = QuaternionVector::new(random_evector(&mut r, small.dim, 0.5), random_evector(&mut r, small.dim, 0.5))?;
        let complex = weyl_relation_residual(&pc, &qc, &f, WORK_PAD)?;
        Ok((weyl, hom, complex))
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    rec.check("weyl_relation", "Weyl relation W(p+p') = exp(-Im<p|p'>/2) W(p)W(p') for real parameters", worst(rows.iter().map(|r| r.0)), 1e-8);
    rec.check("representation_homomorphism", "Weyl-Schroedinger map is a homomorphism", worst(rows.iter().map(|r| r.1)), 1e-8);
    rec.record("weyl_relation_complex", "Weyl relation with complex parameters", worst(rows.iter().map(|r| r.2)));

    let spec = cfg.spec;
    let mut r = rng(&cfg, "heisenberg-models");
    let mut agree = Vec::new();
    for _ in 0..20 {
        let f = phi_map(&random_fock(&mut r, spec, spec.max_degree, 1.0));
        let x = random_element(&mut r, spec.dim, 0.5);
        agree.push(chi_w_agreement(&x, &f, cfg.pairing)?);
    }
    rec.check("model_agreement", "unitary model equals the transform conjugate of the function model", worst(agree), 1e-10);

    let probe_spec = TruncationSpec { max_degree: spec.max_degree.min(3), dim: spec.dim.min(3) };
    let count = partitions::enumerate_keys(probe_spec.max_degree, probe_spec.dim)?.len();
    let elements: Vec<_> = (0..2 * count).map(|_| random_element(&mut r, probe_spec.dim, 1.0)).collect();
    let probe = orbit_rank_probe(probe_spec, &elements, cfg.pairing, 1e-10)?;
    rec.record("orbit_rank_fraction", "orbit of the constant spans the truncation (heuristic)", probe.rank as f64 / probe.dimension as f64);
    rec.table("orbit_rank_probe", serde_json::to_value(&probe).expect("plain data"));
    Ok(())
}

pub fn haar(rec: &mut Recorder) -> Result<()> {
    let cfg = rec.config().clone();
    for m in 1..=6 {
        let report = haar_test(m, cfg.samples, cfg.seed)?;
        for mom in &report.moments {
            rec.check(&format!("m{m}.{}", mom.name), "Haar moment within 4 standard errors", mom.z.abs(), 4.0);
        }
    }
    for m in 1..=3 {
        let push = pushforward_consistency(m, cfg.samples, cfg.seed)?;
        for mom in &push.moments {
            rec.check(&format!("pushforward.m{m}.{}", mom.name), "projected and direct Haar moments agree", mom.z.abs(), 4.0);
        }
        rec.check(&format!("pushforward.m{m}.unitarity"), "projected matrices are unitary", push.max_unitarity_residual, 1e-10);
        let (before, after) = right_action_invariance(m, cfg.samples, cfg.seed)?;
        rec.check(&format!("right_action.m{m}"), "right action preserves Haar moments", before.z_between(&after).abs(), 4.0);
    }
    Ok(())
}

pub fn convergence_csv(studies: &[NormStudy]) -> String {
    let mut out = String::from("level");
    for s in studies {
        out.push_str(&format!(",{0} empirical,{0} stderr,{0} limit", crate::report::csv_field(&s.key).replace(',', ";")));
    }
    out.push('\n');
    let levels = studies.first().map_or(0, |s| s.levels.len());
    for i in 0..levels {
        out.push_str(&studies[0].levels[i].m.to_string());
        for s in studies {
            let row = &s.levels[i];
            let f = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
            out.push_str(&format!(",{},{},{:e}", f(row.empirical), f(row.stderr), s.limit_value));
        }
        out.push('\n');
    }
    out
}

pub fn norm_studies(cfg: &RunConfig) -> Result<Vec<NormStudy>> {
    let keys = [BasisKey::power(1, 1), BasisKey::power(1, 2)];
    Ok(keys
        .iter()
        .map(|k| norm_convergence_study(k, &cfg.levels, cfg.samples, cfg.seed))
        .collect())
}

pub fn ftransform(rec: &mut Recorder) -> Result<()> {
    let cfg = rec.config().clone();
    let s1 = TruncationSpec::new(3, 1)?;
    let e1 = EVector::basis(1, 1);
    let one = HardyChiFunction::constant(s1);
    let z = mc_f_transform(&one, &e1, 1, cfg.samples, cfg.seed)?.max_abs_z(Complex64::new(1.0, 0.0));
    rec.check("m1.constant", "transform of 1 at e1 is 1", z, 4.0);
    let phi1 = HardyChiFunction::basis(s1, BasisKey::power(1, 1))?;
    let z = mc_f_transform(&phi1, &EVector::zero(1), 1, cfg.samples, cfg.seed)?.max_abs_z(Complex64::new(0.0, 0.0));
    rec.check("m1.linear_at_zero", "transform of phi_1 at 0 is 0", z, 4.0);
    let x = EVector::new(vec![Complex64::new(0.6, -0.3)]);
    let f = HardyChiFunction::from_coefficients(FockVector::from_terms(
        s1,
        [(BasisKey::vacuum(), Complex64::new(1.0, 0.0)), (BasisKey::power(1, 2), Complex64::new(2.0, 0.0))],
    )?);
    let xc = x.coords[0].conj();
    let exact = Complex64::new(1.0, 0.0) + xc * xc;
    let z = mc_f_transform(&f, &x, 1, cfg.samples, cfg.seed)?.max_abs_z(exact);
    rec.check("m1.quadratic", "transform of 1 + 2 phi_1^2 is 1 + conj(x)^2", z, 4.0);
    let z = mc_taylor_coefficient(&f, &x, 2, 1, cfg.samples, cfg.seed)?.max_abs_z(Complex64::new(2.0, 0.0) * xc * xc);
    rec.check("m1.taylor", "degree-2 Taylor term of the transform", z, 4.0);

    let base = (cfg.samples / 16).max(4096);
    let s2 = TruncationSpec::new(2, 2)?;
    let g = HardyChiFunction::basis(s2, BasisKey::power(1, 1))?;
    let e = EVector::basis(1, 2);
    let errs: Vec<f64> = (0..5)
        .map(|k| mc_f_transform(&g, &e, 2, base << k, cfg.seed).map(|est| est.stderr()))
        .collect::<Result<_>>()?;
    for k in 0..4 {
        let ratio = errs[k + 1] / errs[k];
        rec.check(
            &format!("stderr_scaling.{k}"),
            "standard error shrinks by 1/sqrt(2) per doubling",
            (ratio * std::f64::consts::SQRT_2 - 1.0).abs(),
            0.1,
        );
    }

    if cfg.levels.iter().any(|&m| m >= 2) {
        let m = *cfg.levels.iter().filter(|&&m| m >= 2).min().expect("checked");
        let est = mc_basis_inner(&BasisKey::power(1, 1), &BasisKey::power(2, 1), m, cfg.samples, cfg.seed)?;
        rec.record(&format!("orthogonality.m{m}"), "distinct basis functions are orthogonal (z-score)", est.max_abs_z(Complex64::new(0.0, 0.0)));
    }

    let studies = norm_studies(&cfg)?;
    for s in &studies {
        for row in &s.levels {
            if let Some(v) = row.empirical {
                rec.record(&format!("norm.{}.m{}", s.key, row.m), "empirical squared norm of a basis function", v);
            }
        }
    }
    rec.table("norm_convergence", serde_json::to_value(&studies).expect("plain data"));
    Ok(())
}

fn dispatch(name: &str, rec: &mut Recorder) -> Result<()> {
    match name {
        "weights" => weights(rec),
        "fock" => fock(rec),
        "operators" => operators(rec),
        "hardy" => hardy(rec),
        "commutation" => commutation(rec),
        "gw" => gw(rec),
        "heisenberg" => heisenberg(rec),
        "haar" => haar(rec),
        "ftransform" => ftransform(rec),
        other => Err(Error::InvalidArgument(format!("unknown suite '{other}'"))),
    }
}

/// Runs one suite, or every suite for `all`, on the configured worker pool.
pub fn run_suite(name: &str, cfg: &RunConfig) -> Result<Report> {
    // Sequential unless a worker count is given.
    par::with_workers(Some(cfg.workers.unwrap_or(1)), || {
        let names: Vec<&str> = if name == "all" { SUITES.to_vec() } else { vec![name] };
        let mut cases = Vec::new();
        let mut tables = BTreeMap::new();
        for n in names {
            let mut rec = Recorder::new(cfg, n);
            dispatch(n, &mut rec)?;
            cases.extend(rec.cases);
            tables.extend(rec.tables);
        }
        Ok(Report::new(name, cfg, cases, tables))
    })
}
