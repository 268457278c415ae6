//! Browser bindings for the interactive demo page: exponent calculators
//! over the published history, live operation-count curves from the real
//! recursion engine, and the numeric accuracy sweep of the border-rank
//! algorithm. Build with `wasm-pack build --target web`; the page in
//! `www/` loads the generated module directly.

use fastmm::apa::{apa_aggregate, apa_apply_numeric};
use fastmm::apply_recursive;
use fastmm::catalog;
use fastmm::exponent;
use fastmm::history::history_rows;
use fastmm::matrix::{mm_naive, Matrix, OpCounter};
use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wasm_bindgen::prelude::*;

/// Exponent implied by a rank-r algorithm for MM(m, k, n); NaN on
/// degenerate input so the page can show a dash.
#[wasm_bindgen]
pub fn exponent_from_rank(m: usize, k: usize, n: usize, rank: usize) -> f64 {
    exponent::exponent_from_rank(m, k, n, rank).unwrap_or(f64::NAN)
}

/// Border-rank exponent 3*log_mkn(0.5*(mkn + mk + kn)).
#[wasm_bindgen]
pub fn apa_exponent(m: usize, k: usize, n: usize) -> f64 {
    exponent::apa_exponent(m, k, n).unwrap_or(f64::NAN)
}

/// The embedded exponent-history tables as JSON
/// `[{table, exponent, citation, year}, ...]`.
#[wasm_bindgen]
pub fn history_json() -> String {
    let rows: Vec<String> = history_rows()
        .iter()
        .map(|r| {
            format!(
                r#"{{"table":"{}","exponent":{},"citation":"{}","year":{}}}"#,
                r.table.id(),
                r.exponent,
                r.citation,
                r.year
            )
        })
        .collect();
    format!("[{}]", rows.join(","))
}

/// Runs the real counting engine on random integer matrices of sizes
/// 2^1..=2^max_p and returns `[{n, mults, adds, ratio}, ...]` as JSON.
/// `alg` is one of naive, strassen, winograd.
#[wasm_bindgen]
pub fn opcount_series(alg: &str, max_p: u32, cutoff: usize, seed: u64) -> String {
    let max_p = max_p.min(6);
    let engine = match alg {
        "strassen" => Some(catalog::strassen()),
        "winograd" => Some(catalog::winograd_mm2()),
        _ => None,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for p in 1..=max_p {
        let n = 2usize.pow(p);
        let a = Matrix::<BigInt>::random(n, n, -9, 9, &mut rng);
        let b = Matrix::<BigInt>::random(n, n, -9, 9, &mut rng);
        let mut ctr = OpCounter::new();
        let ok = match &engine {
            Some(e) => apply_recursive(e, &a, &b, cutoff.max(1), &mut ctr).is_ok(),
            None => mm_naive(&a, &b, &mut ctr).is_ok(),
        };
        if !ok {
            continue;
        }
        let ratio = ctr.multiplications as f64 / (n * n * n) as f64;
        rows.push(format!(
            r#"{{"n":{n},"mults":{},"adds":{},"ratio":{ratio}}}"#,
            ctr.multiplications, ctr.additions
        ));
    }
    format!("[{}]", rows.join(","))
}

/// Accuracy sweep of the numeric border-rank evaluation on fixed random
/// 2x2 disjoint inputs: `[{t, log2_err}, ...]` for lambda = 2^-t,
/// t = 1..=t_max. log2_err is -1024 for an exactly zero error.
#[wasm_bindgen]
pub fn apa_convergence(seed: u64, t_max: u32) -> String {
    let alg = match apa_aggregate(2, 2, 2) {
        Ok(a) => a,
        Err(_) => return "[]".into(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rand_f = |rng: &mut ChaCha8Rng| Matrix::<f64>::random(2, 2, -9, 9, rng);
    let a = rand_f(&mut rng);
    let b = rand_f(&mut rng);
    let u = rand_f(&mut rng);
    let v = rand_f(&mut rng);
    let mut ctr = OpCounter::new();
    let want_ab = mm_naive(&a, &b, &mut ctr).unwrap();
    let want_uv = mm_naive(&u, &v, &mut ctr).unwrap();
    let mut rows = Vec::new();
    for t in 1..=t_max.min(40) {
        let lambda = 2f64.powi(-(t as i32));
        let Ok(out) = apa_apply_numeric(
            &alg,
            &[(a.clone(), b.clone()), (u.clone(), v.clone())],
            lambda,
        ) else {
            continue;
        };
        let mut err: f64 = 0.0;
        for (got, want) in [(&out[0], &want_ab), (&out[1], &want_uv)] {
            for (g, w) in got.entries().iter().zip(want.entries()) {
                err = err.max((g - w).abs());
            }
        }
        let log2_err = if err > 0.0 { err.log2() } else { -1024.0 };
        rows.push(format!(r#"{{"t":{t},"log2_err":{log2_err}}}"#));
    }
    format!("[{}]", rows.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponents_match_core() {
        assert!((exponent_from_rank(2, 2, 2, 7) - 2.8073549).abs() < 1e-6);
        assert!(apa_exponent(7, 1, 7) < 2.66);
        assert!(exponent_from_rank(1, 1, 1, 1).is_nan());
    }

    #[test]
    fn history_json_is_well_formed() {
        let json = history_json();
        assert!(json.starts_with('['));
        assert!(json.contains(r#""table":"1a""#));
        assert_eq!(json.matches('{').count(), 21);
    }

    #[test]
    fn opcount_series_strassen_counts() {
        let json = opcount_series("strassen", 3, 1, 0);
        assert!(json.contains(r#""n":8,"mults":343"#), "{json}");
        let naive = opcount_series("naive", 2, 1, 0);
        assert!(naive.contains(r#""n":4,"mults":64"#), "{naive}");
    }

    #[test]
    fn convergence_slopes_downward() {
        let json = apa_convergence(11, 20);
        assert!(json.contains(r#""t":1"#) && json.contains(r#""t":20"#));
        // later entries must report smaller errors than the first
        let errs: Vec<f64> = json
            .split("log2_err\":")
            .skip(1)
            .map(|s| s.split('}').next().unwrap().parse().unwrap())
            .collect();
        assert!(errs.first().unwrap() > errs.last().unwrap());
    }
}
