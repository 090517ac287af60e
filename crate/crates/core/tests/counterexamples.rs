//! Identities that fail as literally stated, pinned with explicit witnesses so
//! any change in behaviour is noticed.

use hardy_core::hardy_chi::{multiplier_intertwining_residual, HardyChiFunction};
use hardy_core::hardy_w::{HardyWFunction, WORK_PAD};
use hardy_core::heisenberg::{
    heis_mul, weyl_relation_residual, ws_homomorphism_residual, ws_rep, HeisenbergElement, Model,
    QuaternionVector,
};
use hardy_core::partitions::BasisKey;
use hardy_core::{EVector, FockVector, OperatorMatrix, Pairing, TruncationSpec};
use num_complex::Complex64;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[test]
fn creation_group_exceeds_the_exponential_norm_bound() {
    // ψ = Σ_{k≤5} e₁^k/√6 has unit weighted norm; shifting by e₁ grows it past e.
    let spec = TruncationSpec::new(12, 1).unwrap();
    let psi = FockVector::from_terms(spec, (0..=5).map(|k| (BasisKey::power(1, k), c(1.0 / 6f64.sqrt())))).unwrap();
    assert!((psi.norm_sq(Pairing::W) - 1.0).abs() < 1e-12);
    let moved = OperatorMatrix::exp_creation(spec, &EVector::basis(1, 1)).unwrap().apply(&psi).unwrap();
    let grown = moved.norm_sq(Pairing::W);
    assert!(grown > std::f64::consts::E + 3.0, "{grown}");
    assert!((grown - 6.1).abs() < 0.1, "{grown}");
}

#[test]
fn weyl_relation_needs_real_cross_pairings() {
    let spec = TruncationSpec::new(4, 1).unwrap();
    let f = HardyWFunction::constant(spec, Pairing::Bargmann);
    let p = QuaternionVector::new(EVector::from_real(&[0.0]), EVector::new(vec![Complex64::new(0.0, 0.5)])).unwrap();
    let q = QuaternionVector::new(EVector::from_real(&[0.5]), EVector::from_real(&[0.0])).unwrap();
    assert!(weyl_relation_residual(&p, &q, &f, WORK_PAD).unwrap() > 1e-3);
    let pr = QuaternionVector::new(EVector::from_real(&[0.0]), EVector::from_real(&[0.5])).unwrap();
    assert!(weyl_relation_residual(&pr, &q, &f, WORK_PAD).unwrap() < 1e-12);
}

#[test]
fn multiplier_intertwining_depends_on_the_pairing() {
    let spec = TruncationSpec::new(5, 2).unwrap();
    let f = HardyChiFunction::constant(spec);
    let a = EVector::from_real(&[0.6, 0.0]);
    assert!(multiplier_intertwining_residual(&f, &a, Pairing::Bargmann).unwrap() < 1e-12);
    assert!(multiplier_intertwining_residual(&f, &a, Pairing::W).unwrap() > 1e-2);
}

#[test]
fn representation_product_law_is_off_by_a_phase() {
    let spec = TruncationSpec::new(4, 1).unwrap();
    let f = HardyWFunction::constant(spec, Pairing::Bargmann);
    let a = EVector::from_real(&[0.3]);
    let b = EVector::from_real(&[0.7]);
    let x = HeisenbergElement::new(a.clone(), EVector::zero(1), c(0.0)).unwrap();
    let y = HeisenbergElement::new(EVector::zero(1), b.clone(), c(0.0)).unwrap();
    assert!(ws_homomorphism_residual(&x, &y, &f, WORK_PAD).unwrap() > 0.1);
    let lhs = ws_rep(&heis_mul(&x, &y), Model::WSpace).apply_w(&f).unwrap();
    let rhs = ws_rep(&x, Model::WSpace)
        .apply_w(&ws_rep(&y, Model::WSpace).apply_w(&f).unwrap())
        .unwrap();
    assert!(lhs.distance(&rhs.scale((1.5 * a.inner(&b)).exp())).unwrap() < 1e-13);
}
