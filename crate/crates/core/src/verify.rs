//! A fast battery of self-checks, each against an independent oracle.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::coeff::Coeff;
use crate::comb::Comb;
use crate::error::Result;
use crate::mixing::{mixing_bruteforce, psi, MixingEngine};
use crate::return_time::{moments, pattern, phi2_series, scan_second_occurrence};
use crate::sampler::{run_seed, LetterStream};
use crate::series::SeriesKit;
use crate::trie::{BranchProbe, Direction, FixedLetters, SuffixTrie};
use crate::word::Word;

type Q = BigRational;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn from(name: &'static str, r: Result<String>) -> Self {
        match r {
            Ok(detail) => Check { name, passed: true, detail },
            Err(e) => Check { name, passed: false, detail: e.to_string() },
        }
    }
}

fn fail(what: &'static str, index: usize) -> crate::Error {
    crate::Error::Consistency { what, index: index as i64 }
}

/// Absolute tolerance of float-mode psi against exact psi. Float mode
/// keeps absolute, not relative, precision: for the factorial comb the
/// relative error passes 1e-6 near n = 12, when psi is about 1e-11.
pub const FLOAT_PSI_ABS_TOL: f64 = 1e-14;

/// Runs every check on `comb`, plus the fixed worked examples. The whole
/// battery takes a few seconds.
pub fn run_all(comb: &Comb) -> Vec<Check> {
    vec![
        Check::from("renewal recurrence = 1/((1-x)S)", renewal(comb, 64)),
        Check::from("sum of pi over words = 1", pi_sums(comb, 12)),
        Check::from("renewal product for pi", renewal_product(comb, 8)),
        Check::from("five mixing cases = enumeration", five_cases(comb, 8)),
        Check::from("return-time law = enumeration", return_law(comb, 10)),
        Check::from("return-time moments = law", moments_vs_law()),
        Check::from("worked trie example", worked_trie()),
        Check::from("branch duality", duality(comb, 10, 2000)),
        Check::from("incremental trie stats", incremental(comb, 10, 500)),
        Check::from("float psi = exact psi", float_vs_exact(comb)),
        Check::from("float psi = exact psi (factorial)", float_vs_exact(&Comb::factorial())),
    ]
}

fn renewal(comb: &Comb, n: usize) -> Result<String> {
    // u() fails unless the two constructions agree
    SeriesKit::<Q>::new(comb, n, 2).u()?;
    Ok(format!("n <= {n}"))
}

fn pi_sums(comb: &Comb, max: usize) -> Result<String> {
    let nums = comb.numbers::<Q>(max + 1);
    for n in 1..=max {
        let total = (0..1u64 << n).fold(Q::zero(), |acc, b| acc + nums.pi_word(&Word::from_bits(b, n)));
        if !total.is_one() {
            return Err(fail("sum of pi", n));
        }
    }
    Ok(format!("n <= {max}, exact"))
}

/// `pi(1 0^a 1 0^b) = pi(1 0^a 1) pi(1 0^b) / pi(1)`.
fn renewal_product(comb: &Comb, max: usize) -> Result<String> {
    let nums = comb.numbers::<Q>(2 * max + 4);
    let one: Word = "1".parse()?;
    for a in 0..max {
        for b in 0..max {
            let left = Word::concat(&[&Word::one_then_zeros(a + 1), &Word::one_then_zeros(b + 1)]);
            let right = nums.pi_word(&Word::concat(&[&Word::one_then_zeros(a + 1), &one])) * nums.pi_word(&Word::one_then_zeros(b + 1))
                / nums.pi_word(&one);
            if nums.pi_word(&left) != right {
                return Err(fail("renewal product", a * max + b));
            }
        }
    }
    Ok(format!("a, b < {max}"))
}

fn five_cases(comb: &Comb, max_n: usize) -> Result<String> {
    let words: Vec<Word> = ["1", "0", "10", "01", "00", "11", "100", "001", "010"].iter().map(|s| s.parse().unwrap()).collect();
    let nums = comb.numbers::<Q>(max_n + 16);
    let engine = MixingEngine::from_numbers(nums.clone(), max_n + 2, 6)?;
    let mut pairs = 0;
    for a in &words {
        for b in &words {
            let case = crate::mixing::classify(a, b)?;
            for n in 1..=max_n {
                if engine.psi(&case, n)? != mixing_bruteforce(&nums, a, b, n)? {
                    return Err(fail("mixing case", n));
                }
            }
            pairs += 1;
        }
    }
    Ok(format!("{pairs} word pairs, n <= {max_n}"))
}

fn return_law(comb: &Comb, max_m: usize) -> Result<String> {
    let nums = comb.numbers::<Q>(max_m + 2);
    for k in 1..=3 {
        let phi2 = phi2_series::<Q>(comb, k, max_m + 1)?;
        let w = pattern(k);
        for m in 1..=max_m {
            let mut total = Q::zero();
            for b in 0..1u64 << m {
                let v = Word::from_bits(b, m);
                if matches!(scan_second_occurrence(v.letters().to_vec(), &w, m as u64), Ok(o) if o.tau2 == m as u64) {
                    total += nums.pi_word(&v);
                }
            }
            if phi2.coeff(m as i64)? != total {
                return Err(fail("second-occurrence law", m));
            }
        }
    }
    Ok(format!("k <= 3, m <= {max_m}"))
}

fn moments_vs_law() -> Result<String> {
    // exact on the truncated comb; the law's tail beyond `order` is far below the tolerance
    let comb = Comb::factorial();
    let k = 2;
    let order = 100;
    let m = moments(&comb.numbers::<Q>(order + 1), k)?;
    let phi2 = phi2_series::<Q>(&comb, k, order)?;
    let mean = (0..order).fold(Q::zero(), |acc, i| acc + phi2.coeff(i as i64).unwrap_or_else(|_| Q::zero()) * Q::from_integer(i.into()));
    let (mean, expect) = (mean.to_f64(), m.mean_tau2.to_f64());
    if (mean - expect).abs() > 1e-12 * expect {
        return Err(fail("mean of tau2", k));
    }
    Ok(format!("factorial k = {k}: E tau2 = {mean:.6}"))
}

fn worked_trie() -> Result<String> {
    let w: Word = "1001011001110".parse()?;
    let mut t = SuffixTrie::new(FixedLetters::new(&w));
    t.grow_to(10)?;
    if (t.height(), t.saturation()) != (4, 2) || t.letters().len() > 13 {
        return Err(fail("worked trie", 10));
    }
    Ok(format!("H = {}, l = {}, {} letters read", t.height(), t.saturation(), t.letters().len()))
}

fn duality(comb: &Comb, runs: u64, n: u64) -> Result<String> {
    {
        let s = Direction::one_then_zeros();
        for r in 0..runs {
            let seed = run_seed(17, r);
            let mut trie = SuffixTrie::new(LetterStream::new(comb, seed));
            let mut probe = BranchProbe::new();
            for _ in 0..n {
                trie.insert_next_suffix()?;
                probe.record(&trie, &s);
            }
            if !probe.duality_violations().is_empty() {
                return Err(fail("duality", r as usize));
            }
            // T_k is the start of the second occurrence of s^(k)
            for k in 1..=probe.t_by_k.len() {
                let occ = scan_second_occurrence(LetterStream::new(comb, seed), &s.head(k), u64::MAX)?;
                if probe.probe_t(k) != Some(occ.t) {
                    return Err(fail("T_k vs scanner", k));
                }
            }
        }
    }
    Ok(format!("{runs} runs, n = {n}"))
}

fn incremental(comb: &Comb, runs: u64, n: u64) -> Result<String> {
    for r in 0..runs {
        let mut t = SuffixTrie::new(LetterStream::new(comb, r));
        t.grow_to(n)?;
        if t.stats() != t.recompute_stats() {
            return Err(fail("incremental stats", r as usize));
        }
    }
    Ok(format!("{runs} runs, n = {n}"))
}

fn float_vs_exact(comb: &Comb) -> Result<String> {
    let one: Word = "1".parse()?;
    let mut worst = 0.0f64;
    for n in [1, 2, 5, 10, 20, 40] {
        let e: Q = psi(comb, &one, &one, n)?;
        let f: f64 = psi(comb, &one, &one, n)?;
        let err = (f - e.to_f64()).abs();
        if err > FLOAT_PSI_ABS_TOL {
            return Err(fail("float psi", n));
        }
        worst = worst.max(err);
    }
    Ok(format!("{}, n <= 40, max abs error {worst:.1e}", comb.name()))
}
