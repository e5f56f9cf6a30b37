//! Infinite-comb VLMC sources.
//!
//! A comb is parameterised by `q(n) = q_{0^n 1}(0)`, the probability of
//! emitting a 0 when the last 1 lies `n` letters back, or equivalently by the
//! products `c_n = q(0) q(1) ... q(n-1)` (`c_0 = 1`). The stationary measure
//! of a finite word only involves the `c_n`, their remainders
//! `r_n = sum_{k >= n} c_k` and `S(1) = r_0`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::coeff::{f64_to_ratio, ratio, ratio_to_f64, Coeff};
use crate::error::{Error, Result};
use crate::word::Word;

/// Default horizon for the custom-comb convergence check.
pub const DEFAULT_CONVERGENCE_HORIZON: usize = 1_000_000;
/// Partial sums must have stabilised to this relative level within the horizon.
pub const CONVERGENCE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CombKind {
    /// `c_n = 1 / (n (n+1) (n+2) (n+3))` for `n >= 1`.
    Logarithmic,
    /// `c_n = 1 / (n+1)!`.
    Factorial,
    /// `c_n = (1/3) prod_{k=1}^{n-1} (1/3 + 1/(1+k)^2)`.
    #[serde(rename = "logn")]
    LogN,
    Custom,
}

impl CombKind {
    pub fn name(self) -> &'static str {
        match self {
            CombKind::Logarithmic => "logarithmic",
            CombKind::Factorial => "factorial",
            CombKind::LogN => "logn",
            CombKind::Custom => "custom",
        }
    }
}

impl fmt::Display for CombKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CombKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "logarithmic" | "log" => Ok(CombKind::Logarithmic),
            "factorial" | "fact" => Ok(CombKind::Factorial),
            "logn" | "log-n" => Ok(CombKind::LogN),
            "custom" => Ok(CombKind::Custom),
            other => Err(Error::Parse(format!("unknown comb kind {other:?}"))),
        }
    }
}

/// A probability given either exactly or as a float.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Prob {
    Float(f64),
    /// `"p/q"` string form.
    Exact(#[serde(with = "ratio_string")] BigRational),
}

impl Prob {
    fn exact(&self) -> Option<BigRational> {
        match self {
            Prob::Exact(r) => Some(r.clone()),
            Prob::Float(v) => f64_to_ratio(*v),
        }
    }
}

mod ratio_string {
    use num_rational::BigRational;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        s.trim().parse::<BigRational>().map_err(de::Error::custom)
    }
}

/// A number that is exact when the comb allows it.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => ratio_to_f64(r),
            Scalar::Float(v) => *v,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{r}"),
            Scalar::Float(v) => write!(f, "{v:e}"),
        }
    }
}

/// Custom comb data: `q(n) = q[min(n, len - 1)]`, i.e. the last entry repeats
/// forever and the tail of `(c_n)` is geometric.
#[derive(Debug)]
struct CustomTable {
    q: Vec<BigRational>,
    q_f64: Vec<f64>,
    /// `c_0 .. c_L` with `L = q.len() - 1`.
    c_head: Vec<BigRational>,
}

impl CustomTable {
    fn tail_start(&self) -> usize {
        self.q.len() - 1
    }
    fn tail_q(&self) -> &BigRational {
        self.q.last().unwrap()
    }
}

/// An infinite comb source. Immutable after construction and cheap to clone.
#[derive(Clone, Debug)]
pub struct Comb {
    kind: CombKind,
    custom: Option<Arc<CustomTable>>,
    s1_exact: Option<BigRational>,
    s1: f64,
    s1_error: f64,
    /// Float `c_n` table for the combs whose `c_n` decay geometrically or
    /// faster; beyond its end `c_n` is below the smallest subnormal.
    c_float: Arc<Vec<f64>>,
    r_float: Arc<Vec<f64>>,
}

impl Comb {
    pub fn logarithmic() -> Self {
        Comb::builtin(CombKind::Logarithmic)
    }

    pub fn factorial() -> Self {
        Comb::builtin(CombKind::Factorial)
    }

    pub fn log_n() -> Self {
        Comb::builtin(CombKind::LogN)
    }

    pub fn from_kind(kind: CombKind) -> Result<Self> {
        match kind {
            CombKind::Custom => Err(Error::InvalidComb("custom combs need a q list".into())),
            k => Ok(Comb::builtin(k)),
        }
    }

    fn builtin(kind: CombKind) -> Self {
        let mut comb = Comb {
            kind,
            custom: None,
            s1_exact: None,
            s1: 0.0,
            s1_error: 0.0,
            c_float: Arc::new(Vec::new()),
            r_float: Arc::new(Vec::new()),
        };
        match kind {
            CombKind::Logarithmic => {
                let s1 = ratio(19, 18);
                comb.s1 = ratio_to_f64(&s1);
                comb.s1_exact = Some(s1);
            }
            CombKind::Factorial | CombKind::LogN => {
                comb.fill_float_tables();
                let (s1, err) = comb.certified_s1();
                comb.s1 = s1;
                comb.s1_error = err;
            }
            CombKind::Custom => unreachable!(),
        }
        comb
    }

    /// Custom comb from a list of `q(n)`; the last value is repeated for all
    /// larger `n`. Every value must lie strictly inside `(0, 1)`, and the
    /// partial sums of `c_n` must stabilise to `1e-12` (relative) within
    /// `horizon` terms.
    pub fn custom(q: &[Prob], horizon: usize) -> Result<Self> {
        if q.is_empty() {
            return Err(Error::InvalidComb("empty q list".into()));
        }
        let mut exact = Vec::with_capacity(q.len());
        for (i, p) in q.iter().enumerate() {
            let r = p
                .exact()
                .ok_or_else(|| Error::InvalidComb(format!("q[{i}] is not a finite number")))?;
            if !r.is_positive() || r >= BigRational::one() {
                return Err(Error::InvalidComb(format!("q[{i}] = {r} is outside (0, 1)")));
            }
            exact.push(r);
        }
        let q_f64: Vec<f64> = exact.iter().map(ratio_to_f64).collect();
        let mut c_head = vec![BigRational::one()];
        for qi in &exact[..exact.len() - 1] {
            let next = c_head.last().unwrap() * qi;
            c_head.push(next);
        }
        let table = CustomTable { q: exact, q_f64, c_head };

        // Heuristic convergence check: r_H / S(1) must be negligible.
        let l = table.tail_start();
        let qt = ratio_to_f64(table.tail_q());
        if horizon <= l {
            return Err(Error::UnboundedTail { horizon });
        }
        let c_l = ratio_to_f64(&table.c_head[l]);
        let log_tail = c_l.ln() + (horizon - l) as f64 * qt.ln() - (1.0 - qt).ln();
        if log_tail > CONVERGENCE_TOL.ln() {
            return Err(Error::UnboundedTail { horizon });
        }

        let mut comb = Comb {
            kind: CombKind::Custom,
            custom: Some(Arc::new(table)),
            s1_exact: None,
            s1: 0.0,
            s1_error: 0.0,
            c_float: Arc::new(Vec::new()),
            r_float: Arc::new(Vec::new()),
        };
        let s1 = comb.custom_remainder_exact(0);
        comb.s1 = ratio_to_f64(&s1);
        comb.s1_exact = Some(s1);
        Ok(comb)
    }

    pub fn kind(&self) -> CombKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    /// `S(1)` as an exact rational, when it has a closed form.
    pub fn s1_exact(&self) -> Option<&BigRational> {
        self.s1_exact.as_ref()
    }

    pub fn s1(&self) -> Scalar {
        match &self.s1_exact {
            Some(r) => Scalar::Exact(r.clone()),
            None => Scalar::Float(self.s1),
        }
    }

    pub fn s1_f64(&self) -> f64 {
        self.s1
    }

    /// Certified bound on `|S(1) - s1_f64()|` from truncation (0 when exact).
    pub fn s1_error_bound(&self) -> f64 {
        self.s1_error
    }

    /// `q_{0^n 1}(0)`.
    pub fn q0(&self, n: usize) -> BigRational {
        match self.kind {
            CombKind::Logarithmic => {
                if n == 0 {
                    ratio(1, 24)
                } else {
                    ratio(n as i64, n as i64 + 4)
                }
            }
            CombKind::Factorial => ratio(1, n as i64 + 2),
            CombKind::LogN => {
                if n == 0 {
                    ratio(1, 3)
                } else {
                    let m = (n as i64 + 1) * (n as i64 + 1);
                    ratio(1, 3) + ratio(1, m)
                }
            }
            CombKind::Custom => {
                let t = self.custom.as_ref().unwrap();
                t.q[n.min(t.q.len() - 1)].clone()
            }
        }
    }

    pub fn q0_f64(&self, n: usize) -> f64 {
        match self.kind {
            CombKind::Logarithmic => {
                if n == 0 {
                    1.0 / 24.0
                } else {
                    n as f64 / (n as f64 + 4.0)
                }
            }
            CombKind::Factorial => 1.0 / (n as f64 + 2.0),
            CombKind::LogN => {
                if n == 0 {
                    1.0 / 3.0
                } else {
                    let m = n as f64 + 1.0;
                    1.0 / 3.0 + 1.0 / (m * m)
                }
            }
            CombKind::Custom => {
                let t = self.custom.as_ref().unwrap();
                t.q_f64[n.min(t.q_f64.len() - 1)]
            }
        }
    }

    /// Exact `c_n`.
    pub fn c(&self, n: usize) -> BigRational {
        match self.kind {
            CombKind::Logarithmic => logarithmic_c(n),
            _ => self.c_prefix(n + 1).pop().unwrap(),
        }
    }

    /// Exact `c_0 .. c_{len-1}`.
    pub fn c_prefix(&self, len: usize) -> Vec<BigRational> {
        match self.kind {
            CombKind::Logarithmic => (0..len).map(logarithmic_c).collect(),
            CombKind::Custom => {
                let t = self.custom.as_ref().unwrap();
                let mut out: Vec<BigRational> = t.c_head.iter().take(len).cloned().collect();
                while out.len() < len {
                    let next = out.last().unwrap() * t.tail_q();
                    out.push(next);
                }
                out
            }
            _ => {
                let mut out = Vec::with_capacity(len);
                let mut cur = BigRational::one();
                for n in 0..len {
                    if n > 0 {
                        cur *= self.q0(n - 1);
                    }
                    out.push(cur.clone());
                }
                out
            }
        }
    }

    pub fn c_f64(&self, n: usize) -> f64 {
        match self.kind {
            CombKind::Logarithmic => {
                if n == 0 {
                    1.0
                } else {
                    let x = n as f64;
                    1.0 / (x * (x + 1.0) * (x + 2.0) * (x + 3.0))
                }
            }
            CombKind::Custom => {
                let t = self.custom.as_ref().unwrap();
                let l = t.tail_start();
                if n <= l {
                    ratio_to_f64(&t.c_head[n])
                } else {
                    ratio_to_f64(&t.c_head[l]) * t.q_f64[l].powi((n - l) as i32)
                }
            }
            _ => self.c_float.get(n).copied().unwrap_or(0.0),
        }
    }

    /// `r_n = sum_{k >= n} c_k`: exact for the logarithmic and custom combs,
    /// otherwise a float obtained by direct tail summation.
    pub fn remainder_r(&self, n: usize) -> Scalar {
        match self.kind {
            CombKind::Logarithmic => Scalar::Exact(logarithmic_r(n)),
            CombKind::Custom => Scalar::Exact(self.custom_remainder_exact(n)),
            _ => Scalar::Float(self.r_f64(n)),
        }
    }

    pub fn r_f64(&self, n: usize) -> f64 {
        match self.kind {
            CombKind::Logarithmic => {
                if n == 0 {
                    19.0 / 18.0
                } else {
                    let x = n as f64;
                    1.0 / (3.0 * x * (x + 1.0) * (x + 2.0))
                }
            }
            CombKind::Custom => {
                let t = self.custom.as_ref().unwrap();
                if n <= t.tail_start() {
                    ratio_to_f64(&self.custom_remainder_exact(n))
                } else {
                    let qt = t.q_f64[t.tail_start()];
                    self.c_f64(n) / (1.0 - qt)
                }
            }
            _ => self.r_float.get(n).copied().unwrap_or(0.0),
        }
    }

    fn custom_remainder_exact(&self, n: usize) -> BigRational {
        let t = self.custom.as_ref().unwrap();
        let l = t.tail_start();
        let one_minus_q = BigRational::one() - t.tail_q();
        if n >= l {
            let c_n = &t.c_head[l] * pow_ratio(t.tail_q(), n - l);
            c_n / one_minus_q
        } else {
            let tail = &t.c_head[l] / one_minus_q;
            t.c_head[n..l].iter().fold(tail, |acc, c| acc + c)
        }
    }

    fn fill_float_tables(&mut self) {
        let mut c = vec![1.0f64];
        loop {
            let n = c.len() - 1;
            let next = c[n] * self.q0_f64(n);
            if next == 0.0 || c.len() > 100_000 {
                break;
            }
            c.push(next);
        }
        let mut r = vec![0.0; c.len()];
        let mut acc = 0.0;
        for i in (0..c.len()).rev() {
            acc += c[i];
            r[i] = acc;
        }
        self.c_float = Arc::new(c);
        self.r_float = Arc::new(r);
    }

    /// `S(1)` from an exact partial sum plus a geometric tail bound, for the
    /// combs whose `q(n)` is nonincreasing from some point on.
    fn certified_s1(&self) -> (f64, f64) {
        let mut partial = BigRational::zero();
        let mut c = BigRational::one();
        let mut n = 0usize;
        loop {
            partial += &c;
            let q = self.q0(n);
            c *= &q;
            n += 1;
            // tail = sum_{k >= n} c_k <= c_n / (1 - q(n)) once q is nonincreasing
            let qn = ratio_to_f64(&self.q0(n));
            let bound = ratio_to_f64(&c) / (1.0 - qn);
            if n >= 25 && bound < 1e-17 {
                return (ratio_to_f64(&(partial + c)), bound);
            }
        }
    }

    /// Numeric context for series work up to index `horizon`.
    ///
    /// When `S(1)` is not exact and `C` is the rational field, the returned
    /// numbers describe the comb truncated at a point `K` far beyond the
    /// horizon (`c_k = 0` for `k >= K`), whose `S(1)` differs from the true
    /// one by less than `truncation_error`. All identities between `c`, `r`
    /// and `S(1)` hold exactly for that truncated comb.
    pub fn numbers<C: Coeff>(&self, horizon: usize) -> CombNumbers<C> {
        if C::EXACT {
            self.numbers_exact(horizon).convert()
        } else {
            self.numbers_float(horizon).convert_f64()
        }
    }

    fn numbers_exact(&self, horizon: usize) -> CombNumbers<BigRational> {
        let len = horizon + 1;
        match (&self.s1_exact, self.kind) {
            (Some(s1), CombKind::Logarithmic) => {
                let c = self.c_prefix(len + 1);
                let r = (0..=len).map(logarithmic_r).collect();
                // S'(1) = 1/12 and S''(1) = 1/6 from partial sums with
                // telescoping tails.
                let m = 64usize;
                let (mut d1, mut d2) = (BigRational::zero(), BigRational::zero());
                for n in 1..m {
                    let cn = logarithmic_c(n);
                    d1 += &cn * BigRational::from_integer(BigInt::from(n));
                    d2 += cn * BigRational::from_integer(BigInt::from(n * (n - 1)));
                }
                let mm = m as i64;
                d1 += ratio(1, 2 * (mm + 1) * (mm + 2));
                d2 += ratio(2, mm + 2) - ratio(1, mm + 1);
                CombNumbers { c, r, s1: s1.clone(), s1_prime: d1, s1_second: d2, truncated_at: None }
            }
            (Some(s1), _) => {
                let t = self.custom.as_ref().unwrap();
                let c = self.c_prefix(len + 1);
                let r = (0..=len).map(|n| self.custom_remainder_exact(n)).collect();
                let l = t.tail_start();
                let q = t.tail_q();
                let one = BigRational::one();
                let om = &one - q;
                let lr = BigRational::from_integer(BigInt::from(l));
                let cl = &t.c_head[l];
                let (mut d1, mut d2) = (BigRational::zero(), BigRational::zero());
                for (n, cn) in t.c_head.iter().enumerate().take(l) {
                    d1 += cn * BigRational::from_integer(BigInt::from(n));
                    d2 += cn * BigRational::from_integer(BigInt::from(n * n.saturating_sub(1)));
                }
                d1 += cl * (&lr / &om + q / (&om * &om));
                let two_l_minus_one = &lr * BigRational::from_integer(2.into()) - &one;
                d2 += cl
                    * (&lr * (&lr - &one) / &om
                        + two_l_minus_one * q / (&om * &om)
                        + q * (&one + q) / (&om * &om * &om));
                CombNumbers { c, r, s1: s1.clone(), s1_prime: d1, s1_second: d2, truncated_at: None }
            }
            (None, _) => {
                // Truncated comb: K is the first of 64, 128, 256, ... past the
                // horizon with c_K <= 1e-100 c_horizon, so nearby horizons
                // share the same truncated comb.
                let scale = BigRational::from_integer(BigInt::from(10).pow(100));
                let mut k = 64usize;
                while k <= len {
                    k *= 2;
                }
                let mut full = self.c_prefix(k);
                while full.last().unwrap() * &scale > full[len] {
                    k *= 2;
                    while full.len() < k {
                        let n = full.len() - 1;
                        let next = full[n].clone() * self.q0(n);
                        full.push(next);
                    }
                }
                let mut r = vec![BigRational::zero(); k + 1];
                for i in (0..k).rev() {
                    r[i] = &r[i + 1] + &full[i];
                }
                let (mut d1, mut d2) = (BigRational::zero(), BigRational::zero());
                for (n, cn) in full.iter().enumerate().skip(1) {
                    d1 += cn * BigRational::from_integer(BigInt::from(n));
                    d2 += cn * BigRational::from_integer(BigInt::from(n * (n - 1)));
                }
                let s1 = r[0].clone();
                let truncated_at = Some(k);
                let c = full[..=len].to_vec();
                r.truncate(len + 1);
                CombNumbers { c, r, s1, s1_prime: d1, s1_second: d2, truncated_at }
            }
        }
    }

    fn numbers_float(&self, horizon: usize) -> CombNumbers<f64> {
        let len = horizon + 1;
        let c: Vec<f64> = (0..=len).map(|n| self.c_f64(n)).collect();
        let r: Vec<f64> = (0..=len).map(|n| self.r_f64(n)).collect();
        let (d1, d2) = match self.kind {
            CombKind::Logarithmic | CombKind::Custom => {
                let nums = self.numbers_exact(1);
                (ratio_to_f64(&nums.s1_prime), ratio_to_f64(&nums.s1_second))
            }
            _ => {
                let mut d1 = 0.0;
                let mut d2 = 0.0;
                for (n, cn) in self.c_float.iter().enumerate().rev() {
                    d1 += n as f64 * cn;
                    d2 += (n * n.saturating_sub(1)) as f64 * cn;
                }
                (d1, d2)
            }
        };
        CombNumbers { c, r, s1: self.s1, s1_prime: d1, s1_second: d2, truncated_at: None }
    }

    /// Stationary measure of the cylinder of words ending with `w`.
    pub fn pi_word(&self, w: &Word) -> Scalar {
        let horizon = w.len() + 1;
        if self.s1_exact.is_some() {
            let nums = self.numbers::<BigRational>(horizon);
            Scalar::Exact(nums.pi_word(w))
        } else {
            // Truncated-comb rationals keep full precision for tiny measures.
            let nums = self.numbers::<BigRational>(horizon);
            Scalar::Float(ratio_to_f64(&nums.pi_word(w)))
        }
    }
}

fn logarithmic_c(n: usize) -> BigRational {
    if n == 0 {
        BigRational::one()
    } else {
        let n = n as i64;
        BigRational::new(BigInt::one(), BigInt::from(n) * (n + 1) * (n + 2) * (n + 3))
    }
}

fn logarithmic_r(n: usize) -> BigRational {
    if n == 0 {
        ratio(19, 18)
    } else {
        let n = n as i64;
        BigRational::new(BigInt::one(), BigInt::from(3) * n * (n + 1) * (n + 2))
    }
}

fn pow_ratio(q: &BigRational, e: usize) -> BigRational {
    let mut acc = BigRational::one();
    let mut base = q.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = &acc * &base;
        }
        base = &base * &base;
        e >>= 1;
    }
    acc
}

/// `c_n`, `r_n` (for `n <= horizon + 1`), `S(1)`, `S'(1)` and `S''(1)` in a
/// chosen coefficient field.
#[derive(Clone, Debug)]
pub struct CombNumbers<C> {
    pub c: Vec<C>,
    pub r: Vec<C>,
    pub s1: C,
    /// `S'(1) = sum n c_n`.
    pub s1_prime: C,
    /// `S''(1) = sum n (n-1) c_n`.
    pub s1_second: C,
    /// `Some(K)` when the numbers describe the comb truncated at `K`.
    pub truncated_at: Option<usize>,
}

impl CombNumbers<BigRational> {
    fn convert<C: Coeff>(self) -> CombNumbers<C> {
        CombNumbers {
            c: self.c.iter().map(C::from_ratio).collect(),
            r: self.r.iter().map(C::from_ratio).collect(),
            s1: C::from_ratio(&self.s1),
            s1_prime: C::from_ratio(&self.s1_prime),
            s1_second: C::from_ratio(&self.s1_second),
            truncated_at: self.truncated_at,
        }
    }
}

impl CombNumbers<f64> {
    fn convert_f64<C: Coeff>(self) -> CombNumbers<C> {
        let conv = |v: f64| {
            let r = f64_to_ratio(v).unwrap_or_else(BigRational::zero);
            C::from_ratio(&r)
        };
        CombNumbers {
            c: self.c.into_iter().map(conv).collect(),
            r: self.r.into_iter().map(conv).collect(),
            s1: conv(self.s1),
            s1_prime: conv(self.s1_prime),
            s1_second: conv(self.s1_second),
            truncated_at: None,
        }
    }
}

impl<C: Coeff> CombNumbers<C> {
    pub fn horizon(&self) -> usize {
        self.c.len() - 2
    }

    pub fn c(&self, n: usize) -> &C {
        &self.c[n]
    }

    pub fn r(&self, n: usize) -> &C {
        &self.r[n]
    }

    /// `rho_n = c_{n-1} - c_n`, with `rho_0 = 0`.
    pub fn rho(&self, n: usize) -> C {
        if n == 0 {
            C::zero()
        } else {
            self.c[n - 1].clone() - &self.c[n]
        }
    }

    /// Closed-form stationary measure of `w`:
    /// `r_a / S(1)` for `w = 0^a`, otherwise
    /// `c_{a0} c_{am} / S(1) * prod_i rho_{a_i + 1}` over the inner blocks.
    pub fn pi_word(&self, w: &Word) -> C {
        self.weight_word(w) / self.s1.clone()
    }

    /// `S(1) pi(w)`: the measure without its normalization.
    pub fn weight_word(&self, w: &Word) -> C {
        let blocks = w.blocks();
        assert!(w.len() <= self.horizon(), "word longer than the numeric horizon");
        if blocks.ones() == 0 {
            return self.r[blocks.leading()].clone();
        }
        let mut acc = self.c[blocks.leading()].mul_ref(&self.c[blocks.trailing()]);
        for &a in blocks.inner() {
            acc = acc * self.rho(a + 1);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(s: &str) -> BigRational {
        s.parse().unwrap()
    }

    #[test]
    fn builtin_c_values() {
        let log = Comb::logarithmic();
        assert_eq!(log.c(1), q("1/24"));
        assert_eq!(log.c(2), q("1/120"));
        let fact = Comb::factorial();
        assert_eq!(fact.c(3), q("1/24"));
        let logn = Comb::log_n();
        assert_eq!(logn.c(1), q("1/3"));
        assert_eq!(logn.c(2), q("1/3") * (q("1/3") + q("1/4")));
    }

    #[test]
    fn q0_times_c_is_next_c() {
        for comb in [Comb::logarithmic(), Comb::factorial(), Comb::log_n()] {
            let c = comb.c_prefix(40);
            for n in 0..39 {
                assert_eq!(&c[n] * comb.q0(n), c[n + 1], "{} n={n}", comb.name());
                assert!(comb.q0(n) > BigRational::zero() && comb.q0(n) < BigRational::one());
            }
        }
    }

    #[test]
    fn remainder_examples() {
        let log = Comb::logarithmic();
        assert_eq!(log.remainder_r(1), Scalar::Exact(q("1/18")));
        assert_eq!(log.remainder_r(0), log.s1());
        // r_n - r_{n+1} = c_n
        for n in 0..30 {
            let d = log.remainder_r(n).as_exact().unwrap() - log.remainder_r(n + 1).as_exact().unwrap();
            assert_eq!(d, log.c(n));
        }

        let fact = Comb::factorial();
        let r3 = fact.remainder_r(3).to_f64();
        let via_s1 = (std::f64::consts::E - 1.0) - (1.0 + 0.5 + 1.0 / 6.0);
        // independent oracle: sum_{k >= 3} 1/(k+1)! truncated with a factorial tail bound
        let mut oracle = 0.0;
        let mut term = 1.0 / 24.0;
        for k in 3..40 {
            oracle += term;
            term /= (k + 2) as f64;
        }
        assert!((r3 - oracle).abs() < 1e-16);
        assert!((r3 - via_s1).abs() < 1e-15);
        assert_eq!(fact.remainder_r(0).to_f64(), fact.s1_f64());
        assert!((fact.s1_f64() - (std::f64::consts::E - 1.0)).abs() < 1e-15);
        assert!(fact.s1_error_bound() <= 1e-15);
    }

    #[test]
    fn pi_word_examples() {
        let log = Comb::logarithmic();
        assert_eq!(log.pi_word(&"1".parse().unwrap()), Scalar::Exact(q("18/19")));
        assert_eq!(log.pi_word(&Word::empty()), Scalar::Exact(q("1")));
        let rho2 = q("1/24") - q("1/120");
        assert_eq!(log.pi_word(&"101".parse().unwrap()), Scalar::Exact(rho2 / q("19/18")));
        for comb in [Comb::factorial(), Comb::log_n()] {
            assert!((comb.pi_word(&Word::empty()).to_f64() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn logarithmic_derivative_sums() {
        let nums = Comb::logarithmic().numbers::<BigRational>(8);
        assert_eq!(nums.s1_prime, q("1/12"));
        assert_eq!(nums.s1_second, q("1/6"));
    }

    #[test]
    fn custom_comb_geometric_tail() {
        // q = 1/2 everywhere: c_n = 2^-n, S(1) = 2, r_n = 2^(1-n)
        let comb = Comb::custom(&[Prob::Exact(q("1/2"))], DEFAULT_CONVERGENCE_HORIZON).unwrap();
        assert_eq!(comb.s1_exact().unwrap(), &q("2"));
        assert_eq!(comb.remainder_r(3), Scalar::Exact(q("1/4")));
        let nums = comb.numbers::<BigRational>(10);
        assert_eq!(nums.s1_prime, q("2")); // sum n 2^-n
        assert_eq!(nums.s1_second, q("4")); // sum n(n-1) 2^-n

        let mixed = Comb::custom(&[Prob::Float(0.25), Prob::Exact(q("2/3"))], 1000).unwrap();
        assert_eq!(mixed.c(2), q("1/6"));
        let nums = mixed.numbers::<BigRational>(4);
        let brute: BigRational = mixed.c_prefix(2000).iter().enumerate().map(|(n, c)| c * BigRational::from_integer(BigInt::from(n))).sum();
        assert!((ratio_to_f64(&nums.s1_prime) - ratio_to_f64(&brute)).abs() < 1e-12);
    }

    #[test]
    fn custom_comb_rejections() {
        assert!(matches!(Comb::custom(&[Prob::Float(1.5)], 1000), Err(Error::InvalidComb(_))));
        assert!(matches!(Comb::custom(&[Prob::Float(0.0)], 1000), Err(Error::InvalidComb(_))));
        assert!(matches!(Comb::custom(&[], 1000), Err(Error::InvalidComb(_))));
        assert!(matches!(
            Comb::custom(&[Prob::Float(0.999_999)], 1_000_000),
            Err(Error::UnboundedTail { .. })
        ));
    }

    #[test]
    fn truncated_numbers_are_self_consistent() {
        let nums = Comb::factorial().numbers::<BigRational>(30);
        let k = nums.truncated_at.unwrap();
        assert!(k > 31);
        assert_eq!(nums.r[0], nums.s1);
        for n in 0..31 {
            assert_eq!(&nums.r[n] - &nums.r[n + 1], nums.c[n]);
        }
        assert!((ratio_to_f64(&nums.s1) - (std::f64::consts::E - 1.0)).abs() < 1e-15);
        assert!((ratio_to_f64(&nums.s1_prime) - 1.0).abs() < 1e-15);
    }

    fn stationarity(comb: &Comb) {
        let nums = comb.numbers::<BigRational>(20);
        for n in 0..15 {
            let zn = nums.pi_word(&Word::zeros(n));
            let zn1 = nums.pi_word(&Word::zeros(n + 1));
            let mut one_zeros = Word::one_then_zeros(n + 1);
            assert_eq!(zn, &zn1 + &nums.pi_word(&one_zeros));
            one_zeros = Word::concat(&[&Word::zeros(n), &"1".parse().unwrap()]);
            assert_eq!(zn, &zn1 + &nums.pi_word(&one_zeros));
        }
    }

    #[test]
    fn stationarity_identities() {
        stationarity(&Comb::logarithmic());
        stationarity(&Comb::factorial());
        stationarity(&Comb::log_n());
    }

    #[test]
    fn measures_of_all_words_of_length_n_sum_to_one() {
        let comb = Comb::logarithmic();
        let nums = comb.numbers::<BigRational>(12);
        for n in 0..=10usize {
            let total: BigRational = (0..1u64 << n).map(|b| nums.pi_word(&Word::from_bits(b, n))).sum();
            assert_eq!(total, BigRational::one(), "n={n}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn renewal_identity(u in any::<u64>(), ul in 0usize..=12, v in any::<u64>(), vl in 0usize..=12) {
            let one: Word = "1".parse().unwrap();
            let u = Word::from_bits(u, ul);
            let v = Word::from_bits(v, vl);
            for comb in [Comb::logarithmic(), Comb::factorial()] {
                let nums = comb.numbers::<BigRational>(28);
                let lhs = nums.pi_word(&Word::concat(&[&u, &one, &v])) * nums.pi_word(&one);
                let rhs = nums.pi_word(&Word::concat(&[&u, &one])) * nums.pi_word(&Word::concat(&[&one, &v]));
                prop_assert_eq!(lhs, rhs);
            }
        }
    }
}
