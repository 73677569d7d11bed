//! Browser bindings. Every export returns a JSON string; failures come back
//! as `{"error": {"code", "message"}}` so the page never has to catch.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use trace_product::decompose::weighted::{verify_weighted, weighted_from_form, PowerMap};
use trace_product::decompose::{decompose, operator_schmidt_rank};
use trace_product::extend::{check_preservation, Mode};
use trace_product::families::{gen_canonical, gen_hadamard_pair, random_invertible, random_unitary, Family, GenSpec};
use trace_product::{CMatrix, CanonicalForm, Error, Field, Kind, LinMap, SpaceTag};

fn respond(r: Result<Value, Error>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": { "code": e.code(), "message": e.to_string() } }).to_string(),
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("library types serialize")
}

/// The Hadamard pair of a real symmetric `C` (row-major `entries`, side `n`):
/// its pair residual, the residual of the self-composed triple, and the
/// operator Schmidt rank of `A ↦ A∘C`.
#[wasm_bindgen]
pub fn hadamard_check(n: usize, entries: Vec<f64>) -> String {
    respond((|| {
        if n == 0 || entries.len() != n * n {
            return Err(Error::InvalidParameter(format!("need {} entries for n = {n}, got {}", n * n, entries.len())));
        }
        let c = CMatrix::from_fn(n, n, |i, j| entries[i * n + j].into());
        if c.max_abs_diff(&c.transpose()) > 0.0 {
            return Err(Error::InvalidParameter("C must be symmetric".into()));
        }
        let (phi, psi, _) = gen_hadamard_pair(&c)?;
        let pair = check_preservation(&[phi.clone(), psi], 1e-9, Mode::Exhaustive)?;
        let triple = check_preservation(&[phi.clone(), phi.clone(), phi.clone()], 1e-9, Mode::Exhaustive)?;
        Ok(json!({
            "pair": to_value(&pair),
            "triple": to_value(&triple),
            "schmidt_rank": operator_schmidt_rank(&phi, 1e-9)?,
        }))
    })())
}

/// Generate a seeded instance, check it, and decompose it back.
#[wasm_bindgen]
pub fn generate_and_decompose(family: &str, n: usize, m: usize, real: bool, positive: bool, seed: u32) -> String {
    respond((|| {
        let family: Family = serde_json::from_value(Value::String(family.into()))
            .map_err(|_| Error::InvalidParameter(format!("unknown family {family:?}")))?;
        let field = if real { Field::Real } else { Field::Complex };
        let spec = GenSpec { positive, ..GenSpec::new(family, n, m, field, seed.into()) };
        let g = gen_canonical(&spec)?;
        let check = check_preservation(&g.maps, 1e-9, Mode::Exhaustive)?;
        let decomposition = match decompose(&g.maps, 1e-7) {
            Ok(r) => to_value(&r),
            Err(e) => json!({ "code": e.code(), "message": e.to_string() }),
        };
        Ok(json!({ "space": to_value(&g.space), "form": to_value(&g.form), "check": to_value(&check), "decomposition": decomposition }))
    })())
}

/// Weighted identity with exponents `alpha`, `beta` on `n × n` positive
/// definite matrices. `matched` builds the maps from a random positive form;
/// otherwise every map is the identity, which passes only when the exponents
/// agree.
#[wasm_bindgen]
pub fn weighted_residual(n: usize, alpha: Vec<f64>, beta: Vec<f64>, matched: bool, trials: usize, seed: u32) -> String {
    respond((|| {
        let m = alpha.len();
        if m < 2 || n == 0 || trials == 0 {
            return Err(Error::InvalidParameter("need n ≥ 1, at least two exponents and one trial".into()));
        }
        let pd = SpaceTag::new(Kind::PosDef, Field::Complex, n);
        let maps = if matched {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.into());
            let form = match m {
                2 => CanonicalForm::PnPair { m: random_invertible(n, Field::Complex, 1e2, &mut rng)?, transpose: false },
                _ if m % 2 == 1 => {
                    let mut c = vec![2.0; m - 1];
                    c.push(0.5f64.powi(m as i32 - 1));
                    CanonicalForm::HermOdd { u: random_unitary(n, Field::Complex, &mut rng), c }
                }
                _ => CanonicalForm::HermEven { m: random_invertible(n, Field::Complex, 1e2, &mut rng)?, c: vec![1.0; m] },
            };
            weighted_from_form(&form, pd, &alpha, &beta)?
        } else {
            vec![PowerMap::linear(LinMap::identity(pd)); m]
        };
        let report = verify_weighted(&maps, &alpha, &beta, 1e-8, trials, seed.into())?;
        Ok(to_value(&report))
    })())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn hadamard_pair_passes_triple_fails() {
        let v = parse(&hadamard_check(2, vec![1.0, 2.0, 2.0, 1.0]));
        assert_eq!(v["pair"]["pass"], true);
        assert_eq!(v["triple"]["pass"], false);
        assert_eq!(v["schmidt_rank"], 2);
        assert_eq!(parse(&hadamard_check(2, vec![1.0, 2.0, 3.0, 1.0]))["error"]["code"], "invalid_parameter");
        assert_eq!(parse(&hadamard_check(2, vec![1.0, 0.0, 0.0, 1.0]))["error"]["code"], "invalid_parameter");
    }

    #[test]
    fn round_trip_through_the_page_api() {
        let v = parse(&generate_and_decompose("HermOdd", 3, 3, false, false, 4));
        assert_eq!(v["check"]["pass"], true);
        assert!(v["decomposition"]["reconstruction_residual"].as_f64().unwrap() < 1e-7);
        let bad = parse(&generate_and_decompose("HermOdd", 3, 2, false, false, 4));
        assert_eq!(bad["error"]["code"], "invalid_parameter");
        assert!(parse(&generate_and_decompose("Nope", 3, 3, false, false, 4))["error"].is_object());
    }

    #[test]
    fn weighted_match_and_control() {
        for m in 2..=4 {
            let alpha: Vec<f64> = [2.0, -1.0, 0.5, 1.0][..m].to_vec();
            let beta: Vec<f64> = [1.0, 0.5, 2.0, -1.0][..m].to_vec();
            let v = parse(&weighted_residual(3, alpha, beta, true, 200, 1));
            assert_eq!(v["pass"], true, "m = {m}: {v}");
        }
        let control = parse(&weighted_residual(3, vec![1.0, 1.0], vec![2.0, 2.0], false, 200, 1));
        assert_eq!(control["pass"], false);
    }
}
