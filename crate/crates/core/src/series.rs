//! Truncated Laurent series with explicit validity orders.
//!
//! Every series carries an `order`: coefficients at exponents `>= order`
//! are unknown (cut off by the input truncation), and all arithmetic
//! propagates the validity so a structural decision can never silently
//! depend on unspecified coefficients.
//!
//! The coefficient scalar is generic: the same kernels run over exact
//! Gaussian rationals and over certified complex balls.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::ball::ComplexBall;
use crate::exact::{rat, GaussianRational as Gq, Rat};
use crate::{Error, Result};

/// Coefficient scalar for series arithmetic: exact or certified.
pub trait Coeff: Clone + std::fmt::Debug {
    const EXACT: bool;
    fn zero_c() -> Self;
    fn one_c() -> Self;
    fn add_c(&self, o: &Self) -> Self;
    fn sub_c(&self, o: &Self) -> Self;
    fn mul_c(&self, o: &Self) -> Self;
    fn neg_c(&self) -> Self;
    fn div_c(&self, o: &Self) -> Result<Self>;
    fn from_gauss_c(q: &Gq, prec: u32) -> Self;
    fn from_rat_c(r: &Rat, prec: u32) -> Self;
    /// Structural zero test (exact: equality; balls: exact-zero only).
    fn is_zero_c(&self) -> bool;
    fn to_f64_c(&self) -> (f64, f64);
}

impl Coeff for Gq {
    const EXACT: bool = true;
    fn zero_c() -> Self {
        Gq::zero()
    }
    fn one_c() -> Self {
        Gq::one()
    }
    fn add_c(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_c(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_c(&self, o: &Self) -> Self {
        self * o
    }
    fn neg_c(&self) -> Self {
        -self
    }
    fn div_c(&self, o: &Self) -> Result<Self> {
        if o.is_zero() {
            return Err(Error::Invalid("division by zero scalar".into()));
        }
        Ok(self / o)
    }
    fn from_gauss_c(q: &Gq, _prec: u32) -> Self {
        q.clone()
    }
    fn from_rat_c(r: &Rat, _prec: u32) -> Self {
        Gq::from_rat(r.clone())
    }
    fn is_zero_c(&self) -> bool {
        self.is_zero()
    }
    fn to_f64_c(&self) -> (f64, f64) {
        self.to_f64_pair()
    }
}

impl Coeff for ComplexBall {
    const EXACT: bool = false;
    fn zero_c() -> Self {
        ComplexBall::zero(crate::DEFAULT_PREC)
    }
    fn one_c() -> Self {
        ComplexBall::one(crate::DEFAULT_PREC)
    }
    fn add_c(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn sub_c(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn mul_c(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn neg_c(&self) -> Self {
        self.neg()
    }
    fn div_c(&self, o: &Self) -> Result<Self> {
        self.div(o)
    }
    fn from_gauss_c(q: &Gq, prec: u32) -> Self {
        ComplexBall::from_gauss(q, prec)
    }
    fn from_rat_c(r: &Rat, prec: u32) -> Self {
        ComplexBall::from_gauss(&Gq::from_rat(r.clone()), prec)
    }
    fn is_zero_c(&self) -> bool {
        self.re.is_zero() && self.im.is_zero() && self.rad.is_zero()
    }
    fn to_f64_c(&self) -> (f64, f64) {
        self.mid_f64()
    }
}

const ORDER_CAP: i64 = i64::MAX / 4;

/// Scalar Laurent series: finitely many terms, unknown from `order` on.
#[derive(Clone, Debug)]
pub struct Ser<S> {
    pub terms: BTreeMap<i64, S>,
    pub order: i64,
}

impl<S: Coeff> Ser<S> {
    pub fn zero(order: i64) -> Self {
        Ser {
            terms: BTreeMap::new(),
            order,
        }
    }

    pub fn constant(c: S, order: i64) -> Self {
        let mut t = BTreeMap::new();
        if !c.is_zero_c() {
            t.insert(0, c);
        }
        Ser { terms: t, order }
    }

    pub fn monomial(e: i64, c: S, order: i64) -> Self {
        let mut t = BTreeMap::new();
        if !c.is_zero_c() && e < order {
            t.insert(e, c);
        }
        Ser { terms: t, order }
    }

    pub fn set(&mut self, e: i64, c: S) {
        if c.is_zero_c() {
            self.terms.remove(&e);
        } else if e < self.order {
            self.terms.insert(e, c);
        }
    }

    pub fn coeff(&self, e: i64) -> S {
        self.terms.get(&e).cloned().unwrap_or_else(S::zero_c)
    }

    /// Lowest stored exponent, or a large cap when no terms are known.
    pub fn low(&self) -> i64 {
        self.terms.keys().next().copied().unwrap_or(ORDER_CAP)
    }

    fn trim(mut self) -> Self {
        let order = self.order;
        self.terms.retain(|e, c| *e < order && !c.is_zero_c());
        self
    }

    pub fn add(&self, o: &Ser<S>) -> Ser<S> {
        let order = self.order.min(o.order);
        let mut out = self.clone();
        out.order = order;
        for (e, c) in &o.terms {
            let cur = out.coeff(*e);
            out.terms.insert(*e, cur.add_c(c));
        }
        out.trim()
    }

    pub fn sub(&self, o: &Ser<S>) -> Ser<S> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Ser<S> {
        Ser {
            terms: self.terms.iter().map(|(e, c)| (*e, c.neg_c())).collect(),
            order: self.order,
        }
    }

    pub fn scale(&self, c: &S) -> Ser<S> {
        Ser {
            terms: self.terms.iter().map(|(e, x)| (*e, x.mul_c(c))).collect(),
            order: self.order,
        }
        .trim()
    }

    pub fn shift(&self, k: i64) -> Ser<S> {
        Ser {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
            order: self.order.saturating_add(k).min(ORDER_CAP),
        }
    }

    pub fn mul(&self, o: &Ser<S>) -> Ser<S> {
        let order = (self.order.saturating_add(o.low()))
            .min(o.order.saturating_add(self.low()))
            .min(ORDER_CAP);
        let mut acc: BTreeMap<i64, S> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e = e1 + e2;
                if e >= order {
                    continue;
                }
                let p = c1.mul_c(c2);
                match acc.get_mut(&e) {
                    Some(v) => *v = v.add_c(&p),
                    None => {
                        acc.insert(e, p);
                    }
                }
            }
        }
        Ser { terms: acc, order }.trim()
    }

    /// Reciprocal of a series with invertible lowest term.
    pub fn recip(&self) -> Result<Ser<S>> {
        let lo = self.low();
        if lo == ORDER_CAP {
            return Err(Error::Invalid("reciprocal of zero series".into()));
        }
        let c0 = self.coeff(lo);
        let rel_order = self.order - lo; // known relative length
        let c0_inv = S::one_c().div_c(&c0)?;
        // u = self / (c0 x^lo) = 1 + v; invert 1 + v by recurrence.
        let u = self.shift(-lo).scale(&c0_inv);
        let mut inv = Ser::zero(rel_order);
        inv.set(0, S::one_c());
        for m in 1..rel_order.max(1) {
            // coefficient of x^m in u * inv must vanish
            let mut acc = S::zero_c();
            for (e, c) in u.terms.range(1..=m) {
                let w = inv.coeff(m - e);
                if !w.is_zero_c() {
                    acc = acc.add_c(&c.mul_c(&w));
                }
            }
            inv.set(m, acc.neg_c());
        }
        Ok(inv.shift(-lo).scale(&c0_inv))
    }

    /// `(1 + g)^(-1/d)` for a series `g` with positive valuation.
    pub fn one_plus_pow_neg_inv(g: &Ser<S>, d: u32, prec: u32) -> Result<Ser<S>> {
        if g.low() < 1 {
            return Err(Error::Invalid("series must have positive valuation".into()));
        }
        let alpha = rat(-1, d as i64);
        let mut q = Ser::zero(g.order);
        q.set(0, S::one_c());
        for m in 1..g.order.max(1) {
            // q_m = (1/m) sum_{k=1..m} (alpha k - (m - k)) g_k q_{m-k}
            let mut acc = S::zero_c();
            for (k, gk) in g.terms.range(1..=m) {
                let qmk = q.coeff(m - k);
                if qmk.is_zero_c() {
                    continue;
                }
                let factor = &alpha * Rat::from_integer((*k).into())
                    - Rat::from_integer((m - k).into());
                let f = S::from_rat_c(&factor, prec);
                acc = acc.add_c(&f.mul_c(&gk.mul_c(&qmk)));
            }
            let m_inv = S::from_rat_c(&rat(1, m), prec);
            q.set(m, acc.mul_c(&m_inv));
        }
        Ok(q)
    }

    pub fn powi(&self, e: i64) -> Result<Ser<S>> {
        if e == 0 {
            let mut one = Ser::zero(self.order - self.low().min(0));
            one.set(0, S::one_c());
            return Ok(one);
        }
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let mut acc: Option<Ser<S>> = None;
        let mut b = base;
        let mut k = e.unsigned_abs();
        loop {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => b.clone(),
                    Some(a) => a.mul(&b),
                });
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            b = b.mul(&b);
        }
        Ok(acc.unwrap())
    }
}

/// Vector-valued Laurent series (coefficients in `C^n`).
#[derive(Clone, Debug)]
pub struct VSer<S> {
    pub dim: usize,
    pub terms: BTreeMap<i64, Vec<S>>,
    pub order: i64,
}

impl<S: Coeff> VSer<S> {
    pub fn zero(dim: usize, order: i64) -> Self {
        VSer {
            dim,
            terms: BTreeMap::new(),
            order,
        }
    }

    pub fn set(&mut self, e: i64, v: Vec<S>) {
        assert_eq!(v.len(), self.dim);
        if v.iter().all(|c| c.is_zero_c()) {
            self.terms.remove(&e);
        } else if e < self.order {
            self.terms.insert(e, v);
        }
    }

    pub fn coeff(&self, e: i64) -> Vec<S> {
        self.terms
            .get(&e)
            .cloned()
            .unwrap_or_else(|| vec![S::zero_c(); self.dim])
    }

    pub fn low(&self) -> i64 {
        self.terms.keys().next().copied().unwrap_or(ORDER_CAP)
    }

    pub fn add(&self, o: &VSer<S>) -> VSer<S> {
        assert_eq!(self.dim, o.dim);
        let order = self.order.min(o.order);
        let mut out: VSer<S> = VSer::zero(self.dim, order);
        for (e, v) in self.terms.iter().chain(o.terms.iter()) {
            if *e >= order {
                continue;
            }
            let mut cur = out.coeff(*e);
            for (c, x) in cur.iter_mut().zip(v) {
                *c = c.add_c(x);
            }
            out.terms.insert(*e, cur);
        }
        let order = out.order;
        out.terms
            .retain(|e, v| *e < order && !v.iter().all(|c| c.is_zero_c()));
        out
    }

    /// Multiply by a scalar series.
    pub fn mul_ser(&self, s: &Ser<S>) -> VSer<S> {
        let order = (self.order.saturating_add(s.low()))
            .min(s.order.saturating_add(self.low()))
            .min(ORDER_CAP);
        let mut out: VSer<S> = VSer::zero(self.dim, order);
        for (e1, v) in &self.terms {
            for (e2, c) in &s.terms {
                let e = e1 + e2;
                if e >= order {
                    continue;
                }
                let mut cur = out.coeff(e);
                for (o, x) in cur.iter_mut().zip(v) {
                    *o = o.add_c(&x.mul_c(c));
                }
                out.terms.insert(e, cur);
            }
        }
        let ord = out.order;
        out.terms
            .retain(|e, v| *e < ord && !v.iter().all(|c| c.is_zero_c()));
        out
    }

    /// Apply a scalar linear functional (row vector) to every coefficient.
    pub fn apply_functional(&self, row: &[S]) -> Ser<S> {
        assert_eq!(row.len(), self.dim);
        let mut out = Ser::zero(self.order);
        for (e, v) in &self.terms {
            let mut acc = S::zero_c();
            for (c, r) in v.iter().zip(row) {
                acc = acc.add_c(&c.mul_c(r));
            }
            out.set(*e, acc);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn gq(n: i64) -> Gq {
        Gq::from_int(n)
    }

    #[test]
    fn mul_respects_truncation() {
        // (x^-1 + 1 + O(x^2)) * (x + O(x^3)): product known below order
        // min(-1 + 3, 2 + 1) = 2.
        let mut a: Ser<Gq> = Ser::zero(2);
        a.set(-1, gq(1));
        a.set(0, gq(1));
        let mut b: Ser<Gq> = Ser::zero(3);
        b.set(1, gq(1));
        let p = a.mul(&b);
        assert_eq!(p.order, 2);
        assert_eq!(p.coeff(0), gq(1));
        assert_eq!(p.coeff(1), gq(1));
    }

    #[test]
    fn recip_geometric() {
        // 1/(1 - x) = 1 + x + x^2 + ...
        let mut a: Ser<Gq> = Ser::zero(6);
        a.set(0, gq(1));
        a.set(1, gq(-1));
        let r = a.recip().unwrap();
        for m in 0..6 {
            assert_eq!(r.coeff(m), gq(1), "coefficient {m}");
        }
        let prod = a.mul(&r);
        assert_eq!(prod.coeff(0), gq(1));
        for m in 1..5 {
            assert!(prod.coeff(m).is_zero_c());
        }
    }

    #[test]
    fn recip_with_pole_shift() {
        // 1/(x^-2 (1 + x)) = x^2 (1 - x + x^2 - ...)
        let mut a: Ser<Gq> = Ser::zero(2);
        a.set(-2, gq(1));
        a.set(-1, gq(1));
        let r = a.recip().unwrap();
        assert_eq!(r.coeff(2), gq(1));
        assert_eq!(r.coeff(3), gq(-1));
        assert_eq!(r.coeff(4), gq(1));
    }

    #[test]
    fn binomial_root_inverse() {
        // (1 + x)^(-1/2) = 1 - x/2 + 3x^2/8 - 5x^3/16 + ...
        let mut g: Ser<Gq> = Ser::zero(5);
        g.set(1, gq(1));
        let q = Ser::one_plus_pow_neg_inv(&g, 2, 64).unwrap();
        assert_eq!(q.coeff(0), gq(1));
        assert_eq!(q.coeff(1), Gq::from_rat(rat(-1, 2)));
        assert_eq!(q.coeff(2), Gq::from_rat(rat(3, 8)));
        assert_eq!(q.coeff(3), Gq::from_rat(rat(-5, 16)));
        // Verify q^2 (1+x) = 1 within the valid range.
        let q2 = q.mul(&q);
        let mut one_plus = Ser::zero(5);
        one_plus.set(0, gq(1));
        one_plus.set(1, gq(1));
        let check = q2.mul(&one_plus);
        assert_eq!(check.coeff(0), gq(1));
        for m in 1..check.order {
            assert!(check.coeff(m).is_zero_c(), "residual at {m}");
        }
    }

    #[test]
    fn root_inverse_ball_matches_exact() {
        let mut g_exact: Ser<Gq> = Ser::zero(6);
        g_exact.set(1, Gq::from_pair((1, 3), (1, 7)));
        g_exact.set(2, Gq::from_pair((-2, 5), (0, 1)));
        let q_exact = Ser::one_plus_pow_neg_inv(&g_exact, 3, 0).unwrap();
        let mut g_ball: Ser<ComplexBall> = Ser::zero(6);
        for (e, c) in &g_exact.terms {
            g_ball.set(*e, ComplexBall::from_gauss(c, 128));
        }
        let q_ball = Ser::one_plus_pow_neg_inv(&g_ball, 3, 128).unwrap();
        for m in 0..6 {
            let (re, im) = q_exact.coeff(m).to_f64_pair();
            let (bre, bim) = q_ball.coeff(m).mid_f64();
            let rad = q_ball.coeff(m).rad_f64();
            assert!(
                ((re - bre).powi(2) + (im - bim).powi(2)).sqrt() <= rad + 1e-12,
                "enclosure at {m}"
            );
            assert!(rad < 1e-20);
        }
    }
}
