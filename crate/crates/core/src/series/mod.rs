//! Truncated formal power series (and, transiently, Laurent series).
//!
//! A [`Series`] stores the coefficients of `x^val .. x^(order-1)`; everything
//! from `x^order` on is unknown. Coefficients past the end of the stored
//! vector but below `order` are zero, so polynomials are series whose order is
//! [`EXACT_ORDER`].

mod comb_series;

pub use comb_series::SeriesKit;

use crate::coeff::Coeff;
use crate::error::{Error, Result};

/// Order used for polynomials known exactly.
pub const EXACT_ORDER: i64 = i64::MAX / 4;

pub const DEFAULT_RATIONAL_ORDER: usize = 256;
pub const DEFAULT_FLOAT_ORDER: usize = 4096;

#[derive(Clone, Debug, PartialEq)]
pub struct Series<C> {
    coeffs: Vec<C>,
    val: i64,
    order: i64,
}

impl<C: Coeff> Series<C> {
    /// Power series with the given leading coefficients, known to `O(x^order)`.
    pub fn new(mut coeffs: Vec<C>, order: usize) -> Self {
        coeffs.truncate(order);
        Series { coeffs, val: 0, order: order as i64 }
    }

    pub fn from_fn(order: usize, f: impl FnMut(usize) -> C) -> Self {
        Series { coeffs: (0..order).map(f).collect(), val: 0, order: order as i64 }
    }

    pub fn polynomial(coeffs: Vec<C>) -> Self {
        Series { coeffs, val: 0, order: EXACT_ORDER }
    }

    pub fn constant(c: C) -> Self {
        Series::polynomial(vec![c])
    }

    pub fn one() -> Self {
        Series::constant(C::one())
    }

    /// `c * x^k` exactly.
    pub fn monomial(c: C, k: i64) -> Self {
        Series { coeffs: vec![c], val: k, order: EXACT_ORDER }
    }

    /// `1 - x`.
    pub fn one_minus_x() -> Self {
        Series::polynomial(vec![C::one(), -C::one()])
    }

    /// `x - 1`.
    pub fn x_minus_one() -> Self {
        Series::polynomial(vec![-C::one(), C::one()])
    }

    pub fn valuation(&self) -> i64 {
        self.val
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    /// Coefficient of `x^k`.
    pub fn coeff(&self, k: i64) -> Result<C> {
        if k >= self.order {
            return Err(Error::InsufficientOrder { have: self.order, need: k + 1 });
        }
        Ok(self.coeff_unchecked(k))
    }

    fn coeff_unchecked(&self, k: i64) -> C {
        if k < self.val {
            return C::zero();
        }
        self.coeffs.get((k - self.val) as usize).cloned().unwrap_or_else(C::zero)
    }

    /// Coefficients of `x^0 .. x^(order-1)` of a power series.
    pub fn coeffs(&self) -> Vec<C> {
        assert!(self.val >= 0 && self.order < EXACT_ORDER);
        (0..self.order).map(|k| self.coeff_unchecked(k)).collect()
    }

    pub fn truncate(mut self, order: i64) -> Self {
        if order < self.order {
            self.order = order;
            let keep = (order - self.val).max(0) as usize;
            self.coeffs.truncate(keep);
        }
        self
    }

    /// Multiplication by `x^k` (`k` may be negative).
    pub fn shift(mut self, k: i64) -> Self {
        self.val += k;
        if self.order < EXACT_ORDER {
            self.order += k;
        }
        self
    }

    pub fn scale(&self, s: &C) -> Self {
        Series {
            coeffs: self.coeffs.iter().map(|c| c.clone() * s).collect(),
            val: self.val,
            order: self.order,
        }
    }

    pub fn neg(&self) -> Self {
        Series { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(), val: self.val, order: self.order }
    }

    fn combine(&self, other: &Self, sub: bool) -> Self {
        let order = self.order.min(other.order);
        let val = self.val.min(other.val);
        let end = (self.val + self.coeffs.len() as i64).max(other.val + other.coeffs.len() as i64).min(order);
        let coeffs = (val..end.max(val))
            .map(|k| {
                let a = self.coeff_unchecked(k);
                let b = other.coeff_unchecked(k);
                if sub {
                    a - b
                } else {
                    a + b
                }
            })
            .collect();
        Series { coeffs, val, order }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, true)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let val = self.val + other.val;
        let order = (self.val.saturating_add(other.order))
            .min(other.val.saturating_add(self.order))
            .min(EXACT_ORDER);
        let (la, lb) = (self.coeffs.len(), other.coeffs.len());
        if la == 0 || lb == 0 {
            return Series { coeffs: Vec::new(), val, order };
        }
        let len = ((la + lb - 1) as i64).min(order - val).max(0) as usize;
        let mut coeffs = Vec::with_capacity(len);
        for k in 0..len {
            let lo = k.saturating_sub(lb - 1);
            let hi = k.min(la - 1);
            let mut acc = C::zero();
            for i in lo..=hi {
                acc = acc + &self.coeffs[i].mul_ref(&other.coeffs[k - i]);
            }
            coeffs.push(acc);
        }
        Series { coeffs, val, order }
    }

    /// Division by a series whose constant term is nonzero (and which has no
    /// negative powers).
    pub fn div(&self, other: &Self) -> Result<Self> {
        let divisor = other.normalized_power_series()?;
        let b0 = divisor.coeff_unchecked(0);
        if b0.is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        let val = self.val;
        let order = self.order.min(self.val.saturating_add(divisor.order));
        if order >= EXACT_ORDER {
            return Err(Error::Argument("quotient of two polynomials needs an explicit truncation".into()));
        }
        let len = (order - val).max(0) as usize;
        let b = &divisor.coeffs;
        let inv_b0 = if b0.is_one() { None } else { Some(C::one() / b0) };
        let mut q: Vec<C> = Vec::with_capacity(len);
        for k in 0..len {
            let mut acc = self.coeffs.get(k).cloned().unwrap_or_else(C::zero);
            let top = k.min(b.len().saturating_sub(1));
            for j in 1..=top {
                acc = acc - b[j].mul_ref(&q[k - j]);
            }
            if let Some(inv) = &inv_b0 {
                acc = acc * inv;
            }
            q.push(acc);
        }
        Ok(Series { coeffs: q, val, order })
    }

    /// `1 / self`, truncated at `order` when `self` is a polynomial.
    pub fn recip(&self, order: usize) -> Result<Self> {
        Series::new(vec![C::one()], order).div(self)
    }

    /// Drops leading zeros of negative powers; errors if a negative power has a
    /// nonzero coefficient.
    fn normalized_power_series(&self) -> Result<Series<C>> {
        let mut s = self.clone();
        while s.val < 0 {
            match s.coeffs.first() {
                Some(c) if !c.is_zero() => return Err(Error::NonCancellingLaurent { power: s.val }),
                Some(_) => {
                    s.coeffs.remove(0);
                    s.val += 1;
                }
                None => s.val = 0,
            }
        }
        if s.val > 0 {
            let pad = s.val as usize;
            let mut coeffs = vec![C::zero(); pad];
            coeffs.append(&mut s.coeffs);
            s.coeffs = coeffs;
            s.val = 0;
        }
        Ok(s)
    }

    /// Converts a Laurent intermediate back into a power series, asserting
    /// that every negative power cancelled.
    pub fn into_power_series(self) -> Result<Self> {
        if C::EXACT {
            return self.normalized_power_series();
        }
        // Float cancellation leaves rounding residue: accept coefficients that
        // are tiny relative to the largest one.
        let scale = self.coeffs.iter().map(|c| c.to_f64().abs()).fold(0.0, f64::max);
        let mut s = self;
        while s.val < 0 {
            if let Some(c) = s.coeffs.first() {
                if c.to_f64().abs() > 1e-9 * scale.max(1.0) {
                    return Err(Error::NonCancellingLaurent { power: s.val });
                }
                s.coeffs.remove(0);
            }
            s.val += 1;
        }
        s.normalized_power_series()
    }

    /// Checks coefficientwise agreement for all powers below `upto`: exact,
    /// or in float `FLOAT_REL_TOL` relative with an absolute floor of
    /// `1e-12` times the largest coefficient, since two float constructions
    /// drift apart by rounding once coefficients fall far below the largest.
    pub fn check_agrees(&self, other: &Self, upto: i64, what: &'static str) -> Result<()> {
        let start = self.val.min(other.val);
        let upto = upto.min(self.order).min(other.order);
        let scale = (start..upto)
            .map(|k| self.coeff_unchecked(k).to_f64().abs())
            .fold(0.0, f64::max);
        for k in start..upto {
            let a = self.coeff_unchecked(k);
            let b = other.coeff_unchecked(k);
            if !a.agrees(&b, scale * 1e-3) {
                return Err(Error::Consistency { what, index: k });
            }
        }
        Ok(())
    }

    /// Sum of the known coefficients.
    pub fn coeff_sum(&self) -> C {
        self.coeffs.iter().fold(C::zero(), |acc, c| acc + c)
    }

    /// Converts coefficients to another field through `f64`.
    pub fn to_f64(&self) -> Series<f64> {
        Series { coeffs: self.coeffs.iter().map(|c| c.to_f64()).collect(), val: self.val, order: self.order }
    }
}
