//! The generating functions attached to a comb:
//! `S(x) = sum c_n x^n`, `P(x) = sum rho_n x^n`, `R_a(x) = sum_{k>=a} c_k x^k`,
//! `U(x) = 1 / ((1-x) S(x))` and the shifted `P_a(x)`.

use std::sync::OnceLock;

use crate::coeff::Coeff;
use crate::comb::{Comb, CombNumbers};
use crate::error::{Error, Result};
use crate::series::Series;

/// Builds comb series truncated at a fixed order.
///
/// `reach` is how far past `order` the underlying `c_n` must be known, for
/// the shifted series `R_a` and `P_a` with `a <= reach`.
#[derive(Debug)]
pub struct SeriesKit<C> {
    nums: CombNumbers<C>,
    order: usize,
    u: OnceLock<Series<C>>,
}

impl<C: Coeff> SeriesKit<C> {
    pub fn new(comb: &Comb, order: usize, reach: usize) -> Self {
        assert!(order >= 1, "series order must be at least 1");
        SeriesKit { nums: comb.numbers::<C>(order + reach + 2), order, u: OnceLock::new() }
    }

    pub fn from_numbers(nums: CombNumbers<C>, order: usize) -> Self {
        SeriesKit { nums, order, u: OnceLock::new() }
    }

    pub fn numbers(&self) -> &CombNumbers<C> {
        &self.nums
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn s1(&self) -> &C {
        &self.nums.s1
    }

    fn need(&self, top: usize) -> Result<()> {
        if top > self.nums.horizon() {
            Err(Error::InsufficientOrder { have: self.nums.horizon() as i64 + 1, need: top as i64 + 1 })
        } else {
            Ok(())
        }
    }

    /// `S(x)`.
    pub fn s(&self) -> Series<C> {
        Series::from_fn(self.order, |k| self.nums.c(k).clone())
    }

    /// `P(x) = sum_{n >= 1} (c_{n-1} - c_n) x^n`.
    pub fn p(&self) -> Series<C> {
        Series::from_fn(self.order, |k| self.nums.rho(k))
    }

    /// `R_a(x) = sum_{k >= a} c_k x^k`, known to order `order + a` so that
    /// `R_a / x^a` keeps the kit's order.
    pub fn r(&self, a: usize) -> Result<Series<C>> {
        let top = self.order + a;
        self.need(top)?;
        Ok(Series::from_fn(top - a, |k| self.nums.c(k + a).clone()).shift(a as i64))
    }

    /// `U(x)`: built by the renewal recurrence `u_n = sum_{i=1}^n rho_i u_{n-i}`
    /// and by dividing `1` by `(1 - x) S(x)`; both must agree.
    pub fn u(&self) -> Result<Series<C>> {
        if let Some(u) = self.u.get() {
            return Ok(u.clone());
        }
        let by_recurrence = self.u_by_recurrence();
        let by_division = self.u_by_division()?;
        by_recurrence.check_agrees(&by_division, self.order as i64, "U: recurrence vs 1/((1-x)S)")?;
        let _ = self.u.set(by_recurrence.clone());
        Ok(by_recurrence)
    }

    pub fn u_by_recurrence(&self) -> Series<C> {
        let n = self.order;
        let rho: Vec<C> = (0..n).map(|k| self.nums.rho(k)).collect();
        let mut u: Vec<C> = Vec::with_capacity(n);
        u.push(C::one());
        for m in 1..n {
            let mut acc = C::zero();
            for i in 1..=m {
                acc = acc + &rho[i].mul_ref(&u[m - i]);
            }
            u.push(acc);
        }
        Series::new(u, n)
    }

    pub fn u_by_division(&self) -> Result<Series<C>> {
        let denom = Series::one_minus_x().mul(&self.s());
        denom.recip(self.order)
    }

    /// `P_a(x) = (1/c_a) sum_{n >= 1} rho_{a+n} x^n`, cross-checked against
    /// `x + (x - 1) R_{a+1}(x) / (c_a x^a)` up to the order the closed form
    /// still carries.
    pub fn pa(&self, a: usize) -> Result<Series<C>> {
        self.need(self.order + a + 1)?;
        let inv_ca = C::one() / self.nums.c(a).clone();
        let shifted = Series::from_fn(self.order, |n| {
            if n == 0 {
                C::zero()
            } else {
                self.nums.rho(a + n) * &inv_ca
            }
        });

        // The closed form, with a transient x^{-a}.
        let r_next = Series::from_fn(self.order - 1, |k| self.nums.c(k + a + 1).clone()).shift(a as i64 + 1);
        let closed = Series::x_minus_one()
            .mul(&r_next)
            .scale(&inv_ca)
            .shift(-(a as i64))
            .add(&Series::monomial(C::one(), 1))
            .into_power_series()?;
        shifted.check_agrees(&closed, self.order as i64, "P_a: shifted sum vs closed form")?;
        Ok(shifted)
    }
}
