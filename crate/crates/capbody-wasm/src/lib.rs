//! Browser bindings for the cap-body toolkit.
//!
//! Three interactive operations, all JSON-string in/out so the page needs
//! no bespoke marshalling: generate a centrally symmetric packing on S²,
//! solve it for six illumination directions with a certificate, and find
//! its stranded point. A helper exposes the canned reference cases.
//!
//! The `ops` module holds the plain implementations (testable on any
//! target); the exported `#[wasm_bindgen]` functions are thin wrappers that
//! surface errors as JavaScript exceptions.

use wasm_bindgen::prelude::*;

/// Target-independent implementations.
pub mod ops {
    use capbody::cap::CapBody;
    use capbody::configs::{self, GenConfig};
    use capbody::oracle::mc_verify;
    use capbody::solver3d::solve_central_s2;
    use capbody::solver4d::{solve_unconditional_s3, stranded_distance};
    use capbody::sphere::TolerancePolicy;
    use capbody::Packing;
    use serde_json::json;

    fn parse_packing(packing_json: &str) -> Result<Packing, String> {
        serde_json::from_str(packing_json).map_err(|e| format!("invalid packing: {e}"))
    }

    pub fn generate_packing(
        seed: u64,
        n_caps: usize,
        r_lo: f64,
        r_hi: f64,
    ) -> Result<String, String> {
        if !(0.0 < r_lo && r_lo <= r_hi && r_hi < std::f64::consts::FRAC_PI_2) {
            return Err("radius range must satisfy 0 < lo ≤ hi < π/2".into());
        }
        let cfg = GenConfig {
            seed,
            n_caps,
            radius_range: (r_lo, r_hi),
            ..GenConfig::default()
        };
        let g = configs::generate_central_s2(&cfg, &TolerancePolicy::default());
        Ok(serde_json::to_string(&g.packing).expect("packing serializes"))
    }

    pub fn canned_packing(name: &str) -> Result<String, String> {
        let p = configs::canned(name).ok_or_else(|| format!("unknown canned case `{name}`"))?;
        Ok(serde_json::to_string(&p).expect("packing serializes"))
    }

    pub fn solve_packing(packing_json: &str, oracle_samples: usize) -> Result<String, String> {
        let tol = TolerancePolicy::default();
        let packing = parse_packing(packing_json)?;
        let (case, directions, certificate) = match packing.dim() {
            3 => {
                let sol = solve_central_s2(&packing, &tol).map_err(|e| e.to_string())?;
                (format!("{:?}", sol.branch), sol.directions, sol.certificate)
            }
            4 => {
                let sol = solve_unconditional_s3(&packing, &tol).map_err(|e| e.to_string())?;
                (format!("{:?}", sol.case.kind), sol.directions, sol.certificate)
            }
            d => return Err(format!("no solver for dimension {d}")),
        };

        let oracle = if oracle_samples > 0 {
            let body = CapBody::from_packing(&packing, &tol).map_err(|e| e.to_string())?;
            let report = mc_verify(&body, &directions, oracle_samples, 0, &tol);
            serde_json::to_value(&report).expect("report serializes")
        } else {
            serde_json::Value::Null
        };

        Ok(json!({
            "dim": packing.dim(),
            "case": case,
            "directions": directions.directions.iter()
                .map(|u| u.coords().to_vec()).collect::<Vec<_>>(),
            "certificate": certificate,
            "oracle": oracle,
        })
        .to_string())
    }

    pub fn stranded_point(packing_json: &str, grid_points: usize) -> Result<String, String> {
        let packing = parse_packing(packing_json)?;
        if packing.is_empty() {
            return Err("stranded point needs a non-empty packing".into());
        }
        let s = stranded_distance(&packing, grid_points.clamp(1_000, 2_000_000));
        Ok(json!({ "point": s.point.coords(), "dist": s.dist }).to_string())
    }
}

fn to_js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

/// A random centrally symmetric packing on S² as packing JSON.
#[wasm_bindgen]
pub fn generate_packing(seed: u64, n_caps: usize, r_lo: f64, r_hi: f64) -> Result<String, JsValue> {
    to_js(ops::generate_packing(seed, n_caps, r_lo, r_hi))
}

/// One of the canned reference packings by name
/// (octahedron-s2, eight-2t, sixteen-4t, four-2t, eight-3t).
#[wasm_bindgen]
pub fn canned_packing(name: &str) -> Result<String, JsValue> {
    to_js(ops::canned_packing(name))
}

/// Illumination directions and certificate for a packing (6 directions on
/// S², 8 on S³), with an optional Monte Carlo cross-check.
#[wasm_bindgen]
pub fn solve_packing(packing_json: &str, oracle_samples: usize) -> Result<String, JsValue> {
    to_js(ops::solve_packing(packing_json, oracle_samples))
}

/// The point of the packing farthest from every cap, with its clearance.
#[wasm_bindgen]
pub fn stranded_point(packing_json: &str, grid_points: usize) -> Result<String, JsValue> {
    to_js(ops::stranded_point(packing_json, grid_points))
}

#[cfg(test)]
mod tests {
    use super::ops;

    #[test]
    fn generate_solve_stranded_round_trip() {
        let packing = ops::generate_packing(1, 10, 0.1, 0.5).unwrap();
        let sol: serde_json::Value =
            serde_json::from_str(&ops::solve_packing(&packing, 2000).unwrap()).unwrap();
        assert_eq!(sol["directions"].as_array().unwrap().len(), 6);
        assert_eq!(sol["oracle"]["unlit"], 0);

        let s: serde_json::Value =
            serde_json::from_str(&ops::stranded_point(&packing, 20_000).unwrap()).unwrap();
        assert!(s["dist"].as_f64().unwrap() > 0.0);
    }

    #[test]
    fn canned_cases_solve_in_both_dimensions() {
        for name in ["octahedron-s2", "sixteen-4t"] {
            let packing = ops::canned_packing(name).unwrap();
            let sol: serde_json::Value =
                serde_json::from_str(&ops::solve_packing(&packing, 0).unwrap()).unwrap();
            let n = sol["directions"].as_array().unwrap().len();
            assert!(n == 6 || n == 8);
            assert_eq!(sol["certificate"]["cover_ok"], true);
        }
    }

    #[test]
    fn bad_input_is_rejected() {
        assert!(ops::generate_packing(0, 4, 0.0, 0.5).is_err());
        assert!(ops::solve_packing("{}", 0).is_err());
        assert!(ops::canned_packing("nope").is_err());
    }
}
