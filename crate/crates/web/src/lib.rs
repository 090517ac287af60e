//! Browser bindings for three small demonstrations: the distribution of a
//! Haar unitary's corner entry, the two Gauss-Weierstrass semigroups acting
//! on a monomial, and the weighted against unweighted basis norms.

use hardy_core::hardy_w::HardyWFunction;
use hardy_core::mc::StreamFamily;
use hardy_core::partitions::{self, diagrams_of_weight, BasisKey};
use hardy_core::semigroups::{gw_mult, gw_mult_series, gw_shift, gw_shift_quadrature, DEFAULT_NODES};
use hardy_core::unitary::haar_sample;
use hardy_core::{EVector, Error, FockVector, Pairing, Result, TruncationSpec};
use num_complex::Complex64;
use serde_json::json;
use wasm_bindgen::prelude::*;

fn to_js(e: Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// Empirical density of `|u₁₁|²` over `bins` equal cells of `[0, 1]`,
/// followed by the exact density `(m−1)(1−s)^{m−2}` at the cell centres.
pub fn corner_histogram(m: usize, samples: usize, bins: usize, seed: u64) -> Result<Vec<f64>> {
    if m == 0 || bins == 0 || samples == 0 {
        return Err(Error::InvalidArgument("m, samples and bins must be positive".into()));
    }
    let mut rng = StreamFamily::new(seed, "web-haar").stream(0);
    let mut counts = vec![0usize; bins];
    for _ in 0..samples {
        let s = haar_sample(m, &mut rng).entry(0, 0).norm_sqr();
        counts[((s * bins as f64) as usize).min(bins - 1)] += 1;
    }
    let scale = bins as f64 / samples as f64;
    let mut out: Vec<f64> = counts.iter().map(|&c| c as f64 * scale).collect();
    out.extend((0..bins).map(|i| {
        let s = (i as f64 + 0.5) / bins as f64;
        match m {
            // A point mass at 1, drawn as all of its weight in the last cell.
            1 => if i + 1 == bins { bins as f64 } else { 0.0 },
            _ => (m - 1) as f64 * (1.0 - s).powi(m as i32 - 2),
        }
    }));
    Ok(out)
}

/// Rows `[r, ‖closed form‖, ‖quadrature‖, distance]` for `G_r x^k` in one
/// variable, `r` on `points` equal steps up to `r_max`. `which` is `SHIFT`
/// for `exp(r a*²)` or `MULT` for the heat flow along `a`.
pub fn semigroup_curve(which: &str, k: usize, a: Complex64, r_max: f64, points: usize, top: usize) -> Result<Vec<f64>> {
    if k > top {
        return Err(Error::InvalidArgument("monomial degree exceeds the truncation".into()));
    }
    let spec = TruncationSpec::new(top, 1)?;
    let f = HardyWFunction::new(FockVector::basis(spec, BasisKey::power(1, k as u32))?, Pairing::Bargmann);
    let a = EVector::new(vec![a]);
    let mut out = Vec::with_capacity(4 * points);
    for i in 1..=points {
        let r = r_max * i as f64 / points as f64;
        let (closed, quad) = match which.to_ascii_uppercase().as_str() {
            "SHIFT" => (gw_mult_series(&f, &a, r)?.value, gw_mult(&f, &a, r, DEFAULT_NODES)?.value),
            "MULT" => (gw_shift(&f, &a, r)?, gw_shift_quadrature(&f, &a, r, DEFAULT_NODES)?),
            other => return Err(Error::InvalidArgument(format!("unknown semigroup '{other}'"))),
        };
        out.extend([r, closed.norm(), quad.norm(), closed.distance(&quad)?]);
    }
    Ok(out)
}

/// JSON rows with the weight constant and both squared basis norms for every
/// diagram up to `max_degree`.
pub fn norm_rows(max_degree: usize) -> serde_json::Value {
    let rows: Vec<_> = (0..=max_degree)
        .flat_map(diagrams_of_weight)
        .map(|d| {
            json!({
                "lambda": d.parts(),
                "C": partitions::constant_c(&d).to_string(),
                "h": partitions::h_norm_sq(&d).to_string(),
                "w": partitions::w_norm_sq(&d).to_string(),
                "ratio": partitions::constant_c_f64(&d),
            })
        })
        .collect();
    serde_json::Value::Array(rows)
}

#[wasm_bindgen]
pub fn haar_histogram(m: usize, samples: usize, bins: usize, seed: u32) -> std::result::Result<Vec<f64>, JsValue> {
    corner_histogram(m, samples, bins, seed.into()).map_err(to_js)
}

#[wasm_bindgen]
pub fn heat_curve(which: &str, k: usize, a_re: f64, a_im: f64, r_max: f64, points: usize) -> std::result::Result<Vec<f64>, JsValue> {
    // Enough headroom above k for exp(r a*²) to be visible in the norm.
    semigroup_curve(which, k, Complex64::new(a_re, a_im), r_max, points, k + 16).map_err(to_js)
}

#[wasm_bindgen]
pub fn norm_table(max_degree: usize) -> String {
    norm_rows(max_degree.min(8)).to_string()
}
