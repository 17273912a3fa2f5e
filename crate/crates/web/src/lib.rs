//! Browser bindings: generate a sequence, classify one, show its count
//! histograms. Each export has a plain-Rust twin returning `Result<_, String>`
//! so the logic is testable off the browser.

use std::collections::BTreeMap;

use pkl_core::necklace::format_symbols;
use pkl_core::verifier::ceil_log;
use pkl_core::{classify, generate_pkl, occurrence_profile, Necklace, Verdict};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest length the page will generate; keeps the tab responsive.
pub const MAX_DEMO_LENGTH: u64 = 1 << 20;

#[derive(Serialize)]
struct Witness {
    m: usize,
    string: String,
    count: u64,
    min: u64,
    max: Option<u64>,
}

#[derive(Serialize)]
struct Report {
    tier: &'static str,
    lempel_radchenko: bool,
    generalized_de_bruijn: bool,
    pkl: bool,
    witness: Option<Witness>,
}

#[derive(Serialize)]
struct Histogram {
    m: usize,
    /// (count, number of strings with that count)
    bars: Vec<(u64, String)>,
}

fn parse(k: u32, seq: &str) -> Result<Necklace, String> {
    Necklace::parse(seq, k).map_err(|e| e.to_string())
}

fn witness(v: &Verdict) -> Option<Witness> {
    v.witness.as_ref().map(|w| Witness {
        m: w.m,
        string: w.string.to_text(),
        count: w.count,
        min: w.min_allowed,
        max: w.max_allowed,
    })
}

pub fn generate_text(k: u32, l: u64) -> Result<String, String> {
    if l > MAX_DEMO_LENGTH {
        return Err(format!("the demo stops at length {MAX_DEMO_LENGTH}"));
    }
    let n = generate_pkl(k, l).map_err(|e| e.to_string())?;
    Ok(format_symbols(n.chars(), k))
}

pub fn classify_json(k: u32, seq: &str) -> Result<String, String> {
    let n = parse(k, seq)?;
    let c = classify(&n);
    let failing = [&c.lempel_radchenko, &c.covering, &c.pkl]
        .into_iter()
        .find(|v| !v.accepted);
    let report = Report {
        tier: c.tier.name(),
        lempel_radchenko: c.lempel_radchenko.accepted,
        generalized_de_bruijn: c.is_generalized_de_bruijn(),
        pkl: c.pkl.accepted,
        witness: failing.and_then(witness),
    };
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

/// Histograms for `m = 1..=max_m` (0 means up to `ceil(log_K L)`).
pub fn histograms_json(k: u32, seq: &str, max_m: usize) -> Result<String, String> {
    let n = parse(k, seq)?;
    let top = if max_m == 0 {
        ceil_log(n.len() as u64, k).max(1) as usize
    } else {
        max_m
    };
    let mut out = Vec::new();
    for m in 1..=top.min(n.len()) {
        let h: BTreeMap<u64, u128> = occurrence_profile(&n, m)
            .map_err(|e| e.to_string())?
            .histogram()
            .ok_or_else(|| format!("K^{m} strings is too many to tabulate"))?;
        out.push(Histogram {
            m,
            bars: h.into_iter().map(|(c, s)| (c, s.to_string())).collect(),
        });
    }
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn generate(k: u32, l: u32) -> Result<String, JsError> {
    generate_text(k, u64::from(l)).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = classify)]
pub fn classify_js(k: u32, seq: &str) -> Result<String, JsError> {
    classify_json(k, seq).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn histograms(k: u32, seq: &str, max_m: u32) -> Result<String, JsError> {
    histograms_json(k, seq, max_m as usize).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generate_small() {
        assert_eq!(generate_text(5, 3).unwrap(), "123");
        assert_eq!(generate_text(2, 12).unwrap().len(), 12);
        assert!(generate_text(2, MAX_DEMO_LENGTH + 1).is_err());
        assert!(generate_text(1, 4).is_err());
    }

    #[test]
    fn classify_fixtures() {
        let v: serde_json::Value = serde_json::from_str(&classify_json(2, "10011110000").unwrap()).unwrap();
        assert_eq!(v["tier"], "lempel-radchenko");
        assert_eq!(v["witness"]["string"], "101");
        let v: serde_json::Value = serde_json::from_str(&classify_json(2, "000110111001").unwrap()).unwrap();
        assert_eq!(v["pkl"], true);
        assert!(v["witness"].is_null());
        assert!(classify_json(2, "0120").is_err());
    }

    #[test]
    fn histogram_shape() {
        let v: serde_json::Value = serde_json::from_str(&histograms_json(2, "000110111001", 0).unwrap()).unwrap();
        let list = v.as_array().unwrap();
        assert_eq!(list.len(), 4);
        assert_eq!(list[3]["m"], 4);
        assert_eq!(list[3]["bars"], serde_json::json!([[0, "4"], [1, "12"]]));
    }
}
