//! Return times of the pattern `w = 1 0^(k-1)`.
//!
//! `tau2` is the 1-based position of the last letter of the second
//! occurrence of `w` in `U_1 U_2 ...`. With `c = c_{k-1}`,
//!
//! ```text
//! Phi1(x) = c x^k / (S(1) (1 - x) S_w(x)),   Phi2(x) = Phi1(x) (1 - 1/S_w(x)),
//! ```
//!
//! where `S_w(x) = 1 + sum_n P(w ends at t + n | w ends at t) x^n`. After an
//! occurrence the chain has seen `k - 1` zeros since its last 1, so the next
//! 1 arrives with the shifted law `P_{k-1}` and then renews:
//!
//! ```text
//! S_w(x) = 1 + c x^(k-1) P_{k-1}(x) U(x).
//! ```
//!
//! The form `1 + c x^(k-1) (U(x) - 1)` (the next 1 drawn as if the chain had
//! just seen a 1) agrees with it only for `k = 1`; it is kept as the
//! `printed` variant for comparison.
//!
//! Since `c x^(k-1) P_{k-1} = c x^k - (1 - x) R_k`, one gets `(1 - x) S_w = G / S`
//! with the polynomial `G = (1 - x) Q_k + c x^k`, `Q_k = sum_{n<k} c_n x^n`:
//!
//! ```text
//! Phi1 = c x^k S / (S(1) G),   Phi2 = c x^k S (c x^k - (1 - x) R_k) / (S(1) G^2).
//! ```

use serde::Serialize;

use crate::coeff::Coeff;
use crate::comb::{Comb, CombNumbers};
use crate::error::{Error, Result};
use crate::series::{Series, SeriesKit};
use crate::word::Word;

/// Default cap on letters read while waiting for a second occurrence.
pub const DEFAULT_SCAN_CAP: u64 = 1_000_000_000;

/// `1 0^(k-1)`.
pub fn pattern(k: usize) -> Word {
    Word::one_then_zeros(k)
}

fn check_k(k: usize, order: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Argument("pattern length k must be >= 1".into()));
    }
    if order < 2 * k {
        return Err(Error::InsufficientOrder { have: order as i64, need: 2 * k as i64 });
    }
    Ok(())
}

/// `Phi1` and `Phi2` from `S_w`, given the correlation part `S_w - 1`.
fn phi_from_sw<C: Coeff>(kit: &SeriesKit<C>, k: usize, corr: Series<C>) -> Result<(Series<C>, Series<C>)> {
    let n = kit.order() as i64;
    let c = kit.numbers().c(k - 1).clone();
    let s1 = kit.s1().clone();
    let s_w = Series::one().add(&corr);
    let denom = Series::one_minus_x().mul(&s_w);
    let phi1 = Series::monomial(c.clone() / s1.clone(), k as i64).div(&denom)?;
    let phi2 = corr.scale(&(c / s1)).shift(k as i64).div(&denom.mul(&s_w))?;

    let check = phi1.mul(&Series::one().sub(&Series::one().div(&s_w)?));
    let phi1 = phi1.into_power_series()?.truncate(n);
    let phi2 = phi2.into_power_series()?.truncate(n);
    phi2.check_agrees(&check.into_power_series()?, n, "Phi2 vs Phi1 (1 - 1/S_w)")?;
    Ok((phi1, phi2))
}

/// `Phi1` and `Phi2` up to the kit's order. The kit needs reach `k + 1`.
///
/// Built from `S_w = 1 + c x^(k-1) P_{k-1} U` and checked against the
/// polynomial-denominator form and against `Phi2 = Phi1 (1 - 1/S_w)`.
pub fn phi_series<C: Coeff>(kit: &SeriesKit<C>, k: usize) -> Result<(Series<C>, Series<C>)> {
    check_k(k, kit.order())?;
    let n = kit.order();
    let c = kit.numbers().c(k - 1).clone();
    let corr = kit.pa(k - 1)?.mul(&kit.u()?).scale(&c).shift(k as i64 - 1);
    let (phi1, phi2) = phi_from_sw(kit, k, corr)?;

    let s = kit.s();
    let q_k = Series::polynomial((0..k).map(|j| kit.numbers().c(j).clone()).collect());
    let r_k = s.sub(&q_k);
    let cxk = Series::monomial(c.clone(), k as i64);
    let g = Series::one_minus_x().mul(&q_k).add(&cxk);
    let scale = c / kit.s1().clone();
    let alt1 = s.scale(&scale).shift(k as i64).div(&g)?;
    let alt2 = s
        .mul(&cxk.sub(&Series::one_minus_x().mul(&r_k)))
        .scale(&scale)
        .shift(k as i64)
        .div(&g.mul(&g))?;
    phi1.check_agrees(&alt1, n as i64, "Phi1 vs c x^k S / (S(1) G)")?;
    phi2.check_agrees(&alt2, n as i64, "Phi2 vs polynomial-denominator form")?;
    Ok((phi1, phi2))
}

/// `Phi1` and `Phi2` with `S_w = 1 + c x^(k-1) (U - 1)`; equal to
/// [`phi_series`] for `k = 1` only.
pub fn phi_series_printed<C: Coeff>(kit: &SeriesKit<C>, k: usize) -> Result<(Series<C>, Series<C>)> {
    check_k(k, kit.order())?;
    let c = kit.numbers().c(k - 1).clone();
    let corr = kit.u()?.sub(&Series::one()).scale(&c).shift(k as i64 - 1);
    phi_from_sw(kit, k, corr)
}

pub fn phi2_series<C: Coeff>(comb: &Comb, k: usize, order: usize) -> Result<Series<C>> {
    let kit = SeriesKit::new(comb, order, k + 1);
    Ok(phi_series(&kit, k)?.1)
}

pub fn phi2_series_printed<C: Coeff>(comb: &Comb, k: usize, order: usize) -> Result<Series<C>> {
    let kit = SeriesKit::new(comb, order, 0);
    Ok(phi_series_printed(&kit, k)?.1)
}

/// `E = (e^x - 1)/x`, `G = (1 - e^x (1 - x))/x^2` and `k!`.
fn exp_parts<C: Coeff>(k: usize, order: usize) -> (Series<C>, Series<C>, C) {
    // coefficients 1/(m+1)! and (m+1)/(m+2)!, by running products
    let mut e = Vec::with_capacity(order);
    let mut g = Vec::with_capacity(order);
    let mut inv_fact = C::one();
    for m in 0..order {
        inv_fact = inv_fact / C::from_i64(m as i64 + 1);
        e.push(inv_fact.clone());
        let next = inv_fact.clone() / C::from_i64(m as i64 + 2);
        g.push(next * &C::from_i64(m as i64 + 1));
    }
    let mut kfact = C::one();
    for j in 2..=k {
        kfact = kfact * &C::from_i64(j as i64);
    }
    (Series::new(e, order), Series::new(g, order), kfact)
}

/// The factorial comb's printed-form `Phi2` written through `e^x`:
///
/// ```text
/// (e^x - 1)/(e - 1) * x^(2k-1) (1 - e^x (1 - x)) / [k! (e^x - 1)(1 - x) + x^(k-1) (1 - e^x (1 - x))]^2
/// ```
///
/// `s1` stands for `e - 1`. Evaluated as `x^(2k) E G / (s1 [k! (1-x) E + x^k G]^2)`.
pub fn factorial_phi2_closed_form<C: Coeff>(k: usize, order: usize, s1: &C) -> Result<Series<C>> {
    check_k(k, order)?;
    let (e, g, kfact) = exp_parts::<C>(k, order);
    let bracket = Series::one_minus_x().mul(&e).scale(&kfact).add(&g.clone().shift(k as i64));
    let num = e.mul(&g).scale(&(C::one() / s1.clone())).shift(2 * k as i64);
    Ok(num.div(&bracket.mul(&bracket))?.into_power_series()?.truncate(order as i64))
}

/// The factorial comb's `Phi2` (shifted-renewal form) through `e^x`: with
/// `S = E`, `Q_k = sum_{n<k} x^n/(n+1)!` and `G = (1-x) Q_k + x^k/k!`,
/// `Phi2 = x^k E (x^k/k! - (1-x)(E - Q_k)) / (k! s1 G^2)`.
pub fn factorial_phi2_derived_closed_form<C: Coeff>(k: usize, order: usize, s1: &C) -> Result<Series<C>> {
    check_k(k, order)?;
    let (e, _, kfact) = exp_parts::<C>(k, order);
    let inv_k = C::one() / kfact;
    let q_k = Series::polynomial((0..k).map(|j| e.coeff(j as i64).unwrap()).collect());
    let xk = Series::monomial(inv_k.clone(), k as i64);
    let g = Series::one_minus_x().mul(&q_k).add(&xk);
    let num = e
        .mul(&xk.sub(&Series::one_minus_x().mul(&e.sub(&q_k))))
        .scale(&(inv_k / s1.clone()))
        .shift(k as i64);
    Ok(num.div(&g.mul(&g))?.into_power_series()?.truncate(order as i64))
}

/// Value and first two derivatives of a function at `x = 1`.
#[derive(Clone, Debug, PartialEq)]
struct Jet<C> {
    v: C,
    d1: C,
    d2: C,
}

impl<C: Coeff> Jet<C> {
    fn new(v: C, d1: C, d2: C) -> Self {
        Jet { v, d1, d2 }
    }

    fn constant(v: C) -> Self {
        Jet::new(v, C::zero(), C::zero())
    }

    /// `x^m` at 1.
    fn power(m: i64) -> Self {
        Jet::new(C::one(), C::from_i64(m), C::from_i64(m * (m - 1)))
    }

    /// `sum a_j x^j` at 1.
    fn polynomial(a: &[C]) -> Self {
        let mut j = Jet::constant(C::zero());
        for (i, a) in a.iter().enumerate() {
            j = j.add(&Jet::constant(a.clone()).mul(&Jet::power(i as i64)));
        }
        j
    }

    fn add(&self, o: &Self) -> Self {
        Jet::new(self.v.clone() + &o.v, self.d1.clone() + &o.d1, self.d2.clone() + &o.d2)
    }

    fn sub(&self, o: &Self) -> Self {
        Jet::new(self.v.clone() - &o.v, self.d1.clone() - &o.d1, self.d2.clone() - &o.d2)
    }

    fn mul(&self, o: &Self) -> Self {
        let two = C::from_i64(2);
        Jet::new(
            self.v.mul_ref(&o.v),
            self.d1.mul_ref(&o.v) + &self.v.mul_ref(&o.d1),
            self.d2.mul_ref(&o.v) + &(two * &self.d1.mul_ref(&o.d1)) + &self.v.mul_ref(&o.d2),
        )
    }

    fn div(&self, o: &Self) -> Self {
        let two = C::from_i64(2);
        let v = self.v.clone() / o.v.clone();
        let d1 = (self.d1.clone() - &v.mul_ref(&o.d1)) / o.v.clone();
        let d2 = (self.d2.clone() - &(two * &d1.mul_ref(&o.d1)) - &v.mul_ref(&o.d2)) / o.v.clone();
        Jet::new(v, d1, d2)
    }
}

/// Moments of `tau2` and of the start index `T = tau2 - k + 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Moments<C> {
    pub k: usize,
    pub mean_tau2: C,
    pub var_tau2: C,
    pub mean_t: C,
    pub var_t: C,
    /// `Phi1'(1)`, the mean end of the first occurrence.
    pub mean_tau1: C,
}

fn finish<C: Coeff>(k: usize, phi1: Jet<C>, phi2: Jet<C>, means: [C; 2], names: [&'static str; 2]) -> Result<Moments<C>> {
    for (what, j) in [("Phi1(1) = 1", &phi1), ("Phi2(1) = 1", &phi2)] {
        if !j.v.agrees(&C::one(), 1.0) {
            return Err(Error::Consistency { what, index: 0 });
        }
    }
    let [m1, m2] = means;
    if !phi1.d1.agrees(&m1, 0.0) {
        return Err(Error::Consistency { what: names[0], index: 1 });
    }
    if !phi2.d1.agrees(&m2, 0.0) {
        return Err(Error::Consistency { what: names[1], index: 1 });
    }
    let mean = phi2.d1.clone();
    let var = phi2.d2.clone() + &mean - &mean.mul_ref(&mean);
    let shift = C::from_i64(k as i64 - 1);
    Ok(Moments { k, mean_t: mean.clone() - &shift, var_t: var.clone(), mean_tau2: mean, var_tau2: var, mean_tau1: phi1.d1 })
}

fn check_moment_args<C: Coeff>(nums: &CombNumbers<C>, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Argument("pattern length k must be >= 1".into()));
    }
    if nums.horizon() < k {
        return Err(Error::InsufficientOrder { have: nums.horizon() as i64, need: k as i64 });
    }
    Ok(())
}

/// Exact moments from derivatives of `Phi1`, `Phi2` at `x = 1`, using the
/// polynomial-denominator forms; only `S(1)`, `S'(1)`, `S''(1)` enter.
///
/// The means are checked against `Phi1'(1) = S'(1)/S(1) + (S(1) - r_k)/c` and
/// `Phi2'(1) = S'(1)/S(1) + (2 S(1) - r_k)/c`.
pub fn moments<C: Coeff>(nums: &CombNumbers<C>, k: usize) -> Result<Moments<C>> {
    check_moment_args(nums, k)?;
    let c = nums.c(k - 1).clone();
    let s1 = nums.s1.clone();
    let s = Jet::new(s1.clone(), nums.s1_prime.clone(), nums.s1_second.clone());
    let q_k = Jet::polynomial(&nums.c[..k]);
    let r_k = s.sub(&q_k);
    let one_minus_x = Jet::new(C::zero(), -C::one(), C::zero());
    let cxk = Jet::constant(c.clone()).mul(&Jet::power(k as i64));
    let g = one_minus_x.mul(&q_k).add(&cxk);
    let scale = Jet::constant(c.clone() / s1.clone()).mul(&Jet::power(k as i64)).mul(&s);

    let phi1 = scale.div(&g);
    let phi2 = scale.mul(&cxk.sub(&one_minus_x.mul(&r_k))).div(&g.mul(&g));

    let lead = nums.s1_prime.clone() / s1.clone();
    let m1 = lead.clone() + &((s1.clone() - nums.r(k)) / c.clone());
    let m2 = lead + &((s1.clone() + &s1 - nums.r(k)) / c);
    finish(k, phi1, phi2, [m1, m2], ["Phi1'(1) vs S'/S(1) + (S(1) - r_k)/c", "Phi2'(1) vs S'/S(1) + (2S(1) - r_k)/c"])
}

/// Moments of the printed-form `Phi2`, checked against
/// `Phi1'(1) = S(1)/c - S(1) + 1 + S'(1)/S(1)` and `Phi2'(1) = Phi1'(1) + S(1)/c`.
///
/// Uses `D = (1-x) S`, `G = D + c x^(k-1) (1 - D)`,
/// `Phi2 = c^2 x^(2k-1) (1 - D) S / (S(1) G^2)` and `Phi1 = c x^k S / (S(1) G)`.
pub fn moments_printed<C: Coeff>(nums: &CombNumbers<C>, k: usize) -> Result<Moments<C>> {
    check_moment_args(nums, k)?;
    let c = nums.c(k - 1).clone();
    let s1 = nums.s1.clone();
    let s = Jet::new(s1.clone(), nums.s1_prime.clone(), nums.s1_second.clone());
    let one = Jet::constant(C::one());
    let one_minus_x = Jet::new(C::zero(), -C::one(), C::zero());
    let d = one_minus_x.mul(&s);
    let g = d.add(&Jet::constant(c.clone()).mul(&Jet::power(k as i64 - 1)).mul(&one.sub(&d)));

    let phi1 = Jet::constant(c.clone() / s1.clone()).mul(&Jet::power(k as i64)).mul(&s).div(&g);
    let phi2 = Jet::constant(c.clone() * &c / s1.clone())
        .mul(&Jet::power(2 * k as i64 - 1))
        .mul(&one.sub(&d))
        .mul(&s)
        .div(&g.mul(&g));

    let m1 = s1.clone() / c.clone() - &s1 + &C::one() + &(nums.s1_prime.clone() / s1.clone());
    let m2 = m1.clone() + &(s1 / c);
    finish(k, phi1, phi2, [m1, m2], ["printed Phi1'(1)", "printed Phi2'(1)"])
}

pub fn moments_tau2<C: Coeff>(comb: &Comb, k: usize) -> Result<Moments<C>> {
    moments(&comb.numbers::<C>(k + 1), k)
}

/// Head of the law of `tau2`: `probs[m] = P(tau2 = m)` for `m < order`.
#[derive(Clone, Debug, Serialize)]
pub struct Dist2<C> {
    pub k: usize,
    pub probs: Vec<C>,
    /// `1 - sum(probs)`: the mass beyond the truncation, never renormalized.
    pub defect: C,
}

impl<C: Coeff> Dist2<C> {
    /// `sum m P(tau2 = m)` over the head.
    pub fn partial_mean(&self) -> C {
        self.probs
            .iter()
            .enumerate()
            .fold(C::zero(), |acc, (m, p)| acc + &(p.clone() * &C::from_i64(m as i64)))
    }
}

pub fn dist2<C: Coeff>(comb: &Comb, k: usize, order: usize) -> Result<Dist2<C>> {
    let phi2 = phi2_series::<C>(comb, k, order)?;
    let probs = phi2.coeffs();
    let total = probs.iter().fold(C::zero(), |acc, p| acc + p);
    Ok(Dist2 { k, defect: C::one() - total, probs })
}

/// Second occurrence of a word in a stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Occurrence {
    /// 1-based start of the second occurrence.
    pub t: u64,
    /// 1-based position of its last letter, `t + |w| - 1`.
    pub tau2: u64,
}

/// Reads letters until `w` has occurred twice (overlapping occurrences
/// count at every start index).
pub fn scan_second_occurrence<I>(letters: I, w: &Word, cap: u64) -> Result<Occurrence>
where
    I: IntoIterator<Item = u8>,
{
    if w.is_empty() {
        return Err(Error::Argument("cannot scan for the empty word".into()));
    }
    let pat = w.letters();
    let fail = failure_function(pat);
    let m = pat.len();
    let (mut matched, mut found, mut pos) = (0usize, 0u32, 0u64);
    for x in letters {
        pos += 1;
        if pos > cap {
            return Err(Error::LetterBudget { cap });
        }
        while matched > 0 && (matched == m || pat[matched] != x) {
            matched = fail[matched - 1];
        }
        if pat[matched] == x {
            matched += 1;
        }
        if matched == m {
            found += 1;
            if found == 2 {
                return Ok(Occurrence { t: pos - m as u64 + 1, tau2: pos });
            }
        }
    }
    Err(Error::Argument("stream ended before a second occurrence".into()))
}

/// Knuth-Morris-Pratt failure table.
fn failure_function(pat: &[u8]) -> Vec<usize> {
    let mut f = vec![0; pat.len()];
    let mut k = 0;
    for i in 1..pat.len() {
        while k > 0 && pat[i] != pat[k] {
            k = f[k - 1];
        }
        if pat[i] == pat[k] {
            k += 1;
        }
        f[i] = k;
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::ratio;
    use num_rational::BigRational;
    use num_traits::Zero;

    type Q = BigRational;

    fn bits(s: &str) -> Vec<u8> {
        s.bytes().map(|b| b - b'0').collect()
    }

    #[test]
    fn scanner_examples() {
        let w: Word = "1".parse().unwrap();
        assert_eq!(scan_second_occurrence(bits("11010"), &w, 100).unwrap(), Occurrence { t: 2, tau2: 2 });
        let w: Word = "100".parse().unwrap();
        assert_eq!(scan_second_occurrence(bits("1001001"), &w, 100).unwrap(), Occurrence { t: 4, tau2: 6 });
        // overlapping occurrences count
        let w: Word = "11".parse().unwrap();
        assert_eq!(scan_second_occurrence(bits("0111"), &w, 100).unwrap(), Occurrence { t: 3, tau2: 4 });
        assert!(matches!(scan_second_occurrence(bits("1001001"), &w, 100), Err(Error::Argument(_))));
        assert!(matches!(scan_second_occurrence(bits("1001001"), &"100".parse().unwrap(), 5), Err(Error::LetterBudget { .. })));
    }

    #[test]
    fn phi_support_and_first_terms() {
        let comb = Comb::logarithmic();
        for k in 1..=4 {
            let kit = SeriesKit::<Q>::new(&comb, 40, k + 1);
            let (phi1, phi2) = phi_series(&kit, k).unwrap();
            for m in 0..2 * k as i64 {
                assert!(phi2.coeff(m).unwrap().is_zero(), "k={k} m={m}");
            }
            for m in 0..k as i64 {
                assert!(phi1.coeff(m).unwrap().is_zero());
            }
            // the first occurrence can end at k only if the stream starts with w
            let nums = comb.numbers::<Q>(10);
            assert_eq!(phi1.coeff(k as i64).unwrap(), nums.pi_word(&pattern(k)));
        }
        // k = 1: tau2 = 2 iff the stream starts 11
        let kit = SeriesKit::<Q>::new(&comb, 10, 2);
        let (_, phi2) = phi_series(&kit, 1).unwrap();
        let nums = comb.numbers::<Q>(10);
        assert_eq!(phi2.coeff(2).unwrap(), nums.pi_word(&"11".parse().unwrap()));
    }

    #[test]
    fn phi2_matches_enumeration() {
        // P(tau2 = m) = sum of pi(v) over words v of length m whose second
        // occurrence of w ends at m
        let comb = Comb::logarithmic();
        let nums = comb.numbers::<Q>(16);
        for k in 1..=3 {
            let phi2 = phi2_series::<Q>(&comb, k, 13).unwrap();
            let w = pattern(k);
            for m in 1..=12usize {
                let mut total = Q::zero();
                for b in 0..(1u64 << m) {
                    let v = Word::from_bits(b, m);
                    if let Ok(o) = scan_second_occurrence(v.letters().to_vec(), &w, 100) {
                        if o.tau2 == m as u64 {
                            total += nums.pi_word(&v);
                        }
                    }
                }
                assert_eq!(phi2.coeff(m as i64).unwrap(), total, "k={k} m={m}");
            }
        }
    }

    #[test]
    fn jets_match_printed_means() {
        for comb in [Comb::logarithmic(), Comb::factorial()] {
            for k in 1..=6 {
                let m = moments_tau2::<Q>(&comb, k).unwrap();
                assert!(m.mean_tau2.to_f64() >= 2.0 * k as f64);
                assert!(m.var_tau2.to_f64() > 0.0);
            }
        }
    }

    #[test]
    fn factorial_k1_mean() {
        // S(1) + 1 + S'(1)/S(1) with S'(1) = 1
        let m = moments_tau2::<f64>(&Comb::factorial(), 1).unwrap();
        let e1 = std::f64::consts::E - 1.0;
        assert!((m.mean_tau2 - (e1 + 1.0 + 1.0 / e1)).abs() < 1e-12);
    }

    #[test]
    fn moments_match_truncated_distribution() {
        // tail of tau2 for k = 1 on the factorial comb is super-exponentially small
        let comb = Comb::factorial();
        let d = dist2::<Q>(&comb, 1, 80).unwrap();
        let m = moments_tau2::<Q>(&comb, 1).unwrap();
        let gap = (d.partial_mean() - m.mean_tau2).to_f64().abs();
        assert!(gap < 1e-60, "{gap}");
        assert!(d.defect.to_f64().abs() < 1e-60);
    }

    #[test]
    fn closed_forms_agree_for_factorial() {
        let comb = Comb::factorial();
        let kit = SeriesKit::<Q>::new(&comb, 60, 4);
        for k in 1..=3 {
            let (_, phi2) = phi_series(&kit, k).unwrap();
            let closed = factorial_phi2_derived_closed_form(k, 60, kit.s1()).unwrap();
            phi2.check_agrees(&closed, 60, "factorial derived closed form").unwrap();
            let (_, printed) = phi_series_printed(&kit, k).unwrap();
            let closed = factorial_phi2_closed_form(k, 60, kit.s1()).unwrap();
            printed.check_agrees(&closed, 60, "factorial printed closed form").unwrap();
        }
    }

    #[test]
    fn printed_form_matches_only_for_k1() {
        let comb = Comb::logarithmic();
        let kit = SeriesKit::<Q>::new(&comb, 30, 4);
        let nums = comb.numbers::<Q>(8);
        for k in 1..=3 {
            let (_, derived) = phi_series(&kit, k).unwrap();
            let (_, printed) = phi_series_printed(&kit, k).unwrap();
            let same = derived.check_agrees(&printed, 30, "printed vs derived").is_ok();
            assert_eq!(same, k == 1, "k={k}");
            let d = moments(&nums, k).unwrap();
            let p = moments_printed(&nums, k).unwrap();
            assert_eq!(d == p, k == 1);
            // the means differ by r_k / c_{k-1} - S(1) + 1
            let gap = p.mean_tau2 - d.mean_tau2;
            let expected = nums.r(k).clone() / nums.c(k - 1).clone() - nums.s1.clone() + Q::from_i64(1);
            assert_eq!(gap, expected);
        }
        // for k = 2, tau2 = 4 only on 1010, whose measure is 1/760
        let (_, derived) = phi_series(&kit, 2).unwrap();
        assert_eq!(derived.coeff(4).unwrap(), ratio(1, 760));
    }
}
