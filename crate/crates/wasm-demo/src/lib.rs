//! wasm-bindgen exports for the static page in `www/`.
//!
//! Everything returns flat `f64` arrays so the page can plot them without
//! any glue beyond the generated bindings.

use combtrie::mixing::{classify, MixingEngine};
use combtrie::return_time::{moments, phi2_series};
use combtrie::sampler::LetterStream;
use combtrie::trie::SuffixTrie;
use combtrie::{Comb, CombKind, Word};
use wasm_bindgen::prelude::*;

/// Longest psi curve the page may request.
pub const MAX_CURVE: usize = 4000;
/// Largest trie the page may grow.
pub const MAX_TRIE: u64 = 1 << 20;
/// Longest return-time law the page may request.
pub const MAX_LAW: usize = 4000;

fn comb(name: &str) -> Result<Comb, JsError> {
    let kind: CombKind = name.parse().map_err(err)?;
    if kind == CombKind::Custom {
        return Err(JsError::new("the demo only offers the builtin combs"));
    }
    Comb::from_kind(kind).map_err(err)
}

fn err(e: combtrie::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn word(s: &str) -> Result<Word, JsError> {
    s.parse().map_err(err)
}

/// `psi(n, A, B)` for `n = 1..=n_max`, in float mode.
#[wasm_bindgen]
pub fn mixing_curve(comb_name: &str, a: &str, b: &str, n_max: usize) -> Result<Vec<f64>, JsError> {
    if n_max == 0 || n_max > MAX_CURVE {
        return Err(JsError::new(&format!("n_max must be in 1..={MAX_CURVE}")));
    }
    let (a, b) = (word(a)?, word(b)?);
    let case = classify(&a, &b).map_err(err)?;
    let engine = MixingEngine::<f64>::new(&comb(comb_name)?, n_max + 2, case.a + case.b);
    let ns: Vec<usize> = (1..=n_max).collect();
    engine.psi_many(&case, &ns).map_err(err)
}

/// Case label of a word pair, e.g. `"IV(2,1)"`.
#[wasm_bindgen]
pub fn mixing_case(a: &str, b: &str) -> Result<String, JsError> {
    let case = classify(&word(a)?, &word(b)?).map_err(err)?;
    Ok(format!("{}({},{})", case.case_id, case.a, case.b))
}

/// A suffix trie grown step by step over a seeded stream.
#[wasm_bindgen]
pub struct TrieGrowth {
    trie: SuffixTrie<LetterStream>,
}

#[wasm_bindgen]
impl TrieGrowth {
    #[wasm_bindgen(constructor)]
    pub fn new(comb_name: &str, seed: u32) -> Result<TrieGrowth, JsError> {
        let stream = LetterStream::new(&comb(comb_name)?, seed as u64);
        Ok(TrieGrowth { trie: SuffixTrie::with_cap(stream, 64 * MAX_TRIE) })
    }

    /// Inserts suffixes up to `n`, returning `[n, H, l, letters]` after
    /// every `stride` insertions.
    pub fn grow_to(&mut self, n: u32, stride: u32) -> Result<Vec<f64>, JsError> {
        let n = (n as u64).min(MAX_TRIE);
        let stride = stride.max(1) as u64;
        let mut out = Vec::new();
        while self.trie.n() < n {
            let next = (self.trie.n() + stride).min(n);
            self.trie.grow_to(next).map_err(err)?;
            out.extend([self.trie.n() as f64, self.trie.height() as f64, self.trie.saturation() as f64, self.trie.letters().len() as f64]);
        }
        Ok(out)
    }

    pub fn n(&self) -> f64 {
        self.trie.n() as f64
    }

    pub fn height(&self) -> u32 {
        self.trie.height() as u32
    }

    pub fn saturation(&self) -> u32 {
        self.trie.saturation() as u32
    }

    /// The first `len` letters read so far, as `0`/`1` text.
    pub fn prefix(&self, len: usize) -> String {
        self.trie.letters().iter().take(len).map(|&b| char::from(b'0' + b)).collect()
    }
}

/// `P(tau2 = m)` for `m = 0..m_max`, where `tau2` ends the second
/// occurrence of `1 0^(k-1)`.
#[wasm_bindgen]
pub fn return_time_law(comb_name: &str, k: usize, m_max: usize) -> Result<Vec<f64>, JsError> {
    if k == 0 || m_max == 0 || m_max > MAX_LAW {
        return Err(JsError::new(&format!("need k >= 1 and m_max in 1..={MAX_LAW}")));
    }
    let phi2 = phi2_series::<f64>(&comb(comb_name)?, k, m_max).map_err(err)?;
    Ok((0..m_max as i64).map(|m| phi2.coeff(m).unwrap_or(0.0)).collect())
}

/// `[E tau2, Var tau2, E T, Var T]`.
#[wasm_bindgen]
pub fn return_time_moments(comb_name: &str, k: usize) -> Result<Vec<f64>, JsError> {
    let nums = comb(comb_name)?.numbers::<f64>(k + 1);
    let m = moments(&nums, k).map_err(err)?;
    Ok(vec![m.mean_tau2, m.var_tau2, m.mean_t, m.var_t])
}
