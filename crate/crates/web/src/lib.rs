//! Browser demo: Zimin words, avoidance checks and a small witness search,
//! exposed to JavaScript through wasm-bindgen. Every export returns a JSON
//! string; failures come back as `{"error": "..."}`.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use zimin_core::pattern::{encounters_pattern, Pattern};
use zimin_core::scanner::scan_for_instance;
use zimin_core::witness::{RunLimits, WitnessParams, WitnessSearch};
use zimin_core::word::Rendering;
use zimin_core::{encode_pbm, zimin, Word};

/// Node budget for one call of [`grow_avoider`]; keeps the page responsive.
pub const GROW_NODE_LIMIT: u64 = 2_000_000;
pub const MAX_GROW_LENGTH: usize = 20_000;

fn respond(result: Result<Value, String>) -> String {
    match result {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// `{"word": "abacaba", "length": 7}`
#[wasm_bindgen]
pub fn zimin_word(n: u32) -> String {
    respond((|| {
        let w = zimin(n as usize).map_err(err)?;
        if w.len() > 1 << 16 {
            return Err(format!("Z_{n} is too long to display"));
        }
        Ok(json!({ "word": w.render(Rendering::Letters).map_err(err)?, "length": w.len() }))
    })())
}

/// Checks `word` against `Z_n` when `pattern` is a number, otherwise against
/// the pattern. `{"avoids": false, "start": 2, "end": 4, "images": [...]}`
/// with a 1-indexed inclusive span.
#[wasm_bindgen]
pub fn check_word(word: &str, pattern: &str) -> String {
    respond((|| {
        let w = Word::parse(word.trim()).map_err(err)?;
        let style = Rendering::for_alphabet(w.alphabet_size());
        if let Ok(n) = pattern.trim().parse::<usize>() {
            let span = scan_for_instance(w.letters(), n, w.alphabet_size()).map_err(err)?;
            return Ok(match span {
                None => json!({ "avoids": true }),
                Some(s) => json!({ "avoids": false, "start": s.start + 1, "end": s.end }),
            });
        }
        let p = Pattern::parse(pattern).map_err(err)?;
        Ok(match encounters_pattern(&w, &p) {
            None => json!({ "avoids": true }),
            Some(m) => {
                let images = m
                    .images
                    .iter()
                    .map(|a| a.render(style))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(err)?;
                json!({ "avoids": false, "start": m.span.start + 1, "end": m.span.end, "images": images })
            }
        })
    })())
}

/// Searches for a `q`-ary `Z_n`-avoider of the given length from `seed`.
/// `{"word": "...", "length": 28, "reached": true, "nodes": 574}`
#[wasm_bindgen]
pub fn grow_avoider(n: u32, q: u32, length: u32, seed: u32) -> String {
    respond((|| {
        if length as usize > MAX_GROW_LENGTH {
            return Err(format!("length is limited to {MAX_GROW_LENGTH}"));
        }
        let params = WitnessParams::new(n as usize, q as usize, length as usize, seed as u64);
        let mut search = WitnessSearch::new(params).map_err(err)?;
        let limits = RunLimits {
            time_budget: None,
            node_limit: Some(GROW_NODE_LIMIT),
        };
        search.run(limits, None).map_err(err)?;
        let st = search.state();
        let best = st.best_word();
        Ok(json!({
            "word": best.to_text().map_err(err)?,
            "length": best.len(),
            "reached": best.len() >= length as usize,
            "nodes": st.nodes,
        }))
    })())
}

/// Plain PBM image of a binary word, `width` cells per row.
#[wasm_bindgen]
pub fn render_pbm(word: &str, width: u32) -> String {
    respond((|| {
        let w = Word::parse_with_alphabet(word.trim(), 2).map_err(err)?;
        Ok(json!({ "pbm": encode_pbm(&w, width as usize).map_err(err)? }))
    })())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn zimin_words() {
        assert_eq!(parse(zimin_word(3))["word"], "abacaba");
        assert_eq!(parse(zimin_word(0))["length"], 0);
        assert!(parse(zimin_word(40))["error"].is_string());
    }

    #[test]
    fn checks() {
        assert_eq!(parse(check_word("0011", "2"))["avoids"], true);
        let v = parse(check_word("0010", "2"));
        assert_eq!((v["start"].as_u64(), v["end"].as_u64()), (Some(2), Some(4)));
        assert_eq!(parse(check_word("aba", "xx"))["avoids"], true);
        let v = parse(check_word("abbcabbxdc", "xyxzy"));
        assert_eq!(v["images"], json!(["abb", "c", "xd"]));
        assert!(parse(check_word("a?b", "2"))["error"].is_string());
    }

    #[test]
    fn grows_listed_avoider() {
        let v = parse(grow_avoider(3, 2, 28, 7));
        assert_eq!(v["reached"], true);
        let word = Word::parse(v["word"].as_str().unwrap()).unwrap();
        assert!(zimin_core::golden::z3_maximal_avoiders()
            .unwrap()
            .contains(&word));
        let v = parse(grow_avoider(2, 2, 10, 1));
        assert_eq!(
            (v["length"].as_u64(), v["reached"].as_bool()),
            (Some(4), Some(false))
        );
    }

    #[test]
    fn renders() {
        let v = parse(render_pbm("10110", 3));
        assert_eq!(v["pbm"], "P1\n# pad=1\n3 2\n1 0 1\n1 0 0\n");
        assert!(parse(render_pbm("012", 3))["error"].is_string());
    }
}
