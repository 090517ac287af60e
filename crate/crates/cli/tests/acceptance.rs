//! Acceptance run: fourteen criteria, one PASS/FAIL line each with runtime.
//!
//! Criterion 10 includes a homomorphism claim that does not hold for the
//! stated representation. It is run at the stated tolerance and reported as
//! FAIL. The process still exits 0 when that failure is fully accounted for:
//! every other Heisenberg check passes and the composition law the operators
//! actually realise holds to the same tolerance. Any other failure, or a
//! differently shaped criterion-10 failure, exits 1.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use hardy_cli::{run_suite, Report, RunConfig, Status};
use hardy_core::hardy_chi::{random_complex, random_evector, random_fock};
use hardy_core::hardy_w::{polynomial_w_norm, HardyWFunction, WORK_PAD};
use hardy_core::heisenberg::{heis_mul, ws_rep, HeisenbergElement, Model};
use hardy_core::mc::StreamFamily;
use hardy_core::partitions::BasisKey;
use hardy_core::unitary::{haar_test, max_projection_residual, pushforward_consistency, right_action_invariance};
use hardy_core::{Result, TruncationSpec};

struct Outcome {
    pass: bool,
    detail: String,
    /// Set when a failure has been checked to be the documented one.
    explained: bool,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Self { pass, detail, explained: false }
    }
}

fn config(trunc: (usize, usize)) -> RunConfig {
    RunConfig {
        spec: TruncationSpec { max_degree: trunc.0, dim: trunc.1 },
        ..RunConfig::default()
    }
}

/// All contracted cases whose id starts with one of `prefixes`.
fn select<'a>(report: &'a Report, prefixes: &'a [&str]) -> impl Iterator<Item = &'a hardy_cli::Case> {
    report
        .cases
        .iter()
        .filter(move |c| c.status != Status::Report && prefixes.iter().any(|p| c.id.starts_with(p)))
}

fn cases_outcome(report: &Report, prefixes: &[&str]) -> Outcome {
    let cases: Vec<_> = select(report, prefixes).collect();
    let failed: Vec<String> = cases
        .iter()
        .filter(|c| c.status == Status::Fail)
        .map(|c| format!("{} residual {:e} > {:e}", c.id, c.residual, c.tolerance.unwrap_or(0.0)))
        .collect();
    let worst = cases
        .iter()
        .filter_map(|c| c.tolerance.filter(|&t| t > 0.0).map(|t| c.residual / t))
        .fold(0.0, f64::max);
    if cases.is_empty() {
        return Outcome::new(false, format!("no cases matched {prefixes:?}"));
    }
    if failed.is_empty() {
        Outcome::new(true, format!("{} checks, worst residual/tolerance {worst:.2e}", cases.len()))
    } else {
        Outcome::new(false, failed.join("; "))
    }
}

fn weights() -> Result<Outcome> {
    Ok(cases_outcome(&run_suite("weights", &config((6, 1)))?, &["weights.exact_tables", "weights.C[2,1]"]))
}

fn basis_counts() -> Result<Outcome> {
    Ok(cases_outcome(&run_suite("fock", &config((6, 5)))?, &["fock.basis_counts"]))
}

fn polarization() -> Result<Outcome> {
    Ok(cases_outcome(&run_suite("fock", &config((4, 3)))?, &["fock.polarization"]))
}

fn contractivity() -> Result<Outcome> {
    Ok(cases_outcome(&run_suite("fock", &config((10, 3)))?, &["fock.contractivity", "fock.exponential_bound"]))
}

fn annihilation() -> Result<Outcome> {
    Ok(cases_outcome(&run_suite("operators", &config((6, 4)))?, &["operators.monomial_is_h_adjoint", "operators.adjoint_witness"]))
}

fn group_laws() -> Result<Outcome> {
    Ok(cases_outcome(&run_suite("operators", &config((6, 4)))?, &[
        "operators.creation_group",
        "operators.annihilation_group",
        "operators.shift_group",
        "operators.multiplier_group",
    ]))
}

fn intertwining() -> Result<Outcome> {
    let report = run_suite("hardy", &config((6, 4)))?;
    let mut out = cases_outcome(&report, &["hardy.shift_intertwining", "hardy.multiplier_intertwining"]);
    out.detail = format!(
        "{}; pairing {}, annihilation {}",
        out.detail, report.variants.pairing, report.variants.annihilation
    );
    Ok(out)
}

fn commutation() -> Result<Outcome> {
    Ok(cases_outcome(&run_suite("commutation", &config((6, 4)))?, &["commutation."]))
}

fn gauss_weierstrass() -> Result<Outcome> {
    Ok(cases_outcome(&run_suite("gw", &config((6, 4)))?, &["gw."]))
}

/// `(a+a', b+b', t+t'+⟨b|a'⟩−½⟨a|b'⟩−½⟨a'|b⟩)`: the product the operators
/// `exp[t+½⟨a|b⟩]M_{a*}T_b` compose to.
fn realised_product(x: &HeisenbergElement, y: &HeisenbergElement) -> HeisenbergElement {
    let t = x.t + y.t + x.b.inner(&y.a) - 0.5 * x.a.inner(&y.b) - 0.5 * y.a.inner(&x.b);
    HeisenbergElement::new(x.a.add(&y.a), x.b.add(&y.b), t).expect("same dimension")
}

fn heisenberg() -> Result<Outcome> {
    let cfg = config((6, 4));
    let report = run_suite("heisenberg", &cfg)?;
    let others = cases_outcome(&report, &[
        "heisenberg.quaternion_table",
        "heisenberg.group_axioms",
        "heisenberg.isomorphism",
        "heisenberg.weyl_relation",
        "heisenberg.model_agreement",
    ]);
    let hom = cases_outcome(&report, &["heisenberg.representation_homomorphism"]);

    // Same case shapes as the suite: 100 random pairs on a padded truncation.
    let spec = TruncationSpec { max_degree: 4, dim: 3 };
    let fam = StreamFamily::new(cfg.seed, "acceptance-realised-product");
    let mut realised: f64 = 0.0;
    let mut naive: f64 = 0.0;
    for i in 0..100 {
        let mut r = fam.stream(i);
        let f = HardyWFunction::new(random_fock(&mut r, spec, spec.max_degree, 1.0), cfg.pairing);
        let mut element = || {
            HeisenbergElement::new(random_evector(&mut r, 3, 0.5), random_evector(&mut r, 3, 0.5), random_complex(&mut r, 0.5))
                .expect("same dimension")
        };
        let (x, y) = (element(), element());
        let poly = f.polynomial();
        let inner = ws_rep(&y, Model::WSpace).apply_poly(&poly, spec.max_degree + WORK_PAD);
        let composed = ws_rep(&x, Model::WSpace).apply_poly(&inner, spec.max_degree);
        let direct = ws_rep(&realised_product(&x, &y), Model::WSpace).apply_poly(&poly, spec.max_degree);
        let stated = ws_rep(&heis_mul(&x, &y), Model::WSpace).apply_poly(&poly, spec.max_degree);
        realised = realised.max(polynomial_w_norm(spec, cfg.pairing, &composed.sub(&direct))?);
        naive = naive.max(polynomial_w_norm(spec, cfg.pairing, &composed.sub(&stated))?);
    }

    let pass = others.pass && hom.pass;
    let mut out = Outcome::new(
        pass,
        format!(
            "other checks: {}; homomorphism: {}; realised product law residual {realised:.2e}, stated law {naive:.2e}",
            others.detail, hom.detail
        ),
    );
    out.explained = !pass && others.pass && realised <= 1e-8 && naive > 1e-8;
    Ok(out)
}

fn haar() -> Result<Outcome> {
    let seed = RunConfig::default().seed;
    let mut worst: f64 = 0.0;
    let mut failed = Vec::new();
    for m in 1..=6 {
        let report = haar_test(m, 200_000, seed)?;
        for mom in &report.moments {
            worst = worst.max(mom.z.abs());
            if mom.z.abs() > 4.0 {
                failed.push(format!("m{m} {} z {:.2}", mom.name, mom.z));
            }
        }
    }
    for m in 1..=3 {
        let (before, after) = right_action_invariance(m, 200_000, seed)?;
        let z = before.z_between(&after);
        worst = worst.max(z.abs());
        if z.abs() > 4.0 {
            failed.push(format!("right action m{m} z {z:.2}"));
        }
    }
    Ok(if failed.is_empty() {
        Outcome::new(true, format!("max |z| {worst:.2} over m = 1..6"))
    } else {
        Outcome::new(false, failed.join("; "))
    })
}

fn livsic() -> Result<Outcome> {
    let seed = RunConfig::default().seed;
    let mut unitarity: f64 = 0.0;
    let mut worst_z: f64 = 0.0;
    for m in 1..=3 {
        unitarity = unitarity.max(max_projection_residual(m, 10_000, seed));
        worst_z = worst_z.max(pushforward_consistency(m, 10_000, seed)?.max_abs_z());
    }
    let pass = unitarity <= 1e-10 && worst_z <= 4.0;
    Ok(Outcome::new(pass, format!("unitarity residual {unitarity:.2e}, pushforward max |z| {worst_z:.2}")))
}

fn f_transform() -> Result<Outcome> {
    let report = run_suite("ftransform", &config((6, 4)))?;
    let mut out = cases_outcome(&report, &["ftransform.m1.", "ftransform.stderr_scaling"]);
    let studies = report.tables.get("ftransform.norm_convergence").and_then(|t| t.as_array());
    let keys = [BasisKey::power(1, 1).to_string(), BasisKey::power(1, 2).to_string()];
    let complete = studies.is_some_and(|rows| {
        rows.len() == keys.len()
            && rows.iter().zip(&keys).all(|(row, key)| {
                let levels: Vec<u64> = row["levels"]
                    .as_array()
                    .map(|ls| ls.iter().filter_map(|l| l["m"].as_u64()).collect())
                    .unwrap_or_default();
                row["key"].as_str() == Some(key.as_str()) && levels == [1, 2, 4, 8]
            })
    });
    out.pass &= complete;
    out.detail = format!("{}; norm report for {keys:?} at m = 1,2,4,8 {}", out.detail, if complete { "written" } else { "missing" });
    Ok(out)
}

fn determinism() -> Result<Outcome> {
    let mut cfg = config((4, 3));
    cfg.samples = 4096;
    let reports: Vec<String> = [Some(1), Some(3), None]
        .into_iter()
        .map(|w| {
            cfg.workers = w;
            run_suite("all", &cfg).map(|r| r.to_json())
        })
        .collect::<Result<_>>()?;
    let same = reports.windows(2).all(|p| p[0] == p[1]);
    Ok(Outcome::new(same, format!("`all` report of {} bytes under 1, 3 and default workers", reports[0].len())))
}

type Criterion = (&'static str, &'static str, u64, fn() -> Result<Outcome>);

const CRITERIA: [Criterion; 14] = [
    ("AC01", "weight tables against factorial oracle", 1, weights),
    ("AC02", "basis counts against brute force", 1, basis_counts),
    ("AC03", "polarization reconstruction", 5, polarization),
    ("AC04", "contractivity and exponential bound", 10, contractivity),
    ("AC05", "closed-form annihilation is the unweighted adjoint", 5, annihilation),
    ("AC06", "group laws", 30, group_laws),
    ("AC07", "intertwining under the transform", 30, intertwining),
    ("AC08", "canonical commutation relations", 10, commutation),
    ("AC09", "Gauss-Weierstrass semigroups", 30, gauss_weierstrass),
    ("AC10", "Heisenberg group and Weyl representation", 60, heisenberg),
    ("AC11", "Haar sampler moments", 120, haar),
    ("AC12", "Livsic projection", 60, livsic),
    ("AC13", "Monte Carlo transform", 180, f_transform),
    ("AC14", "report determinism across worker counts", 600, determinism),
];

fn main() -> ExitCode {
    let start = Instant::now();
    let mut unexplained = 0;
    let mut passed = 0;
    for (id, title, budget, run) in CRITERIA {
        let t0 = Instant::now();
        let outcome = run().unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
        let elapsed = t0.elapsed();
        let over = elapsed > Duration::from_secs(budget);
        let pass = outcome.pass && !over;
        println!(
            "{id} {} {title} [{:.2} s, budget {budget} s{}] {}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            if over { ", OVER BUDGET" } else { "" },
            outcome.detail
        );
        if pass {
            passed += 1;
        } else if outcome.explained && !over {
            println!("{id} failure matches the documented product-law discrepancy");
        } else {
            unexplained += 1;
        }
    }
    println!(
        "acceptance: {passed}/{} PASS, {unexplained} unexplained FAIL, total {:.1} s",
        CRITERIA.len(),
        start.elapsed().as_secs_f64()
    );
    if unexplained == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
