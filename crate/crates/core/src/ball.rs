//! Certified complex ball arithmetic on arbitrary-precision dyadic floats.
//!
//! A [`ComplexBall`] is a disk `{ |z - mid| <= rad }` whose midpoint has
//! dyadic real and imaginary parts kept at a configurable precision; every
//! operation returns an enclosure of the true value. Radii are tracked in a
//! small upward-rounded magnitude type, so soundness does not depend on the
//! platform rounding mode.
//!
//! Irrational data entering the radius analysis (unit eigendirections,
//! roots of unity, square roots of rational norms) is produced here with a
//! final interval-Newton certification step.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_traits::{Signed, ToPrimitive, Zero};

use crate::exact::{GaussianRational, Rat};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Dyadic floats
// ---------------------------------------------------------------------------

/// Arbitrary-precision dyadic number `man * 2^exp`.
#[derive(Clone, PartialEq, Eq)]
pub struct Dyadic {
    pub man: BigInt,
    pub exp: i64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic {
            man: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn from_int(n: i64) -> Self {
        Dyadic {
            man: BigInt::from(n),
            exp: 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            return Dyadic::zero();
        }
        assert!(x.is_finite());
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let exp_field = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (man, exp) = if exp_field == 0 {
            (frac, -1074)
        } else {
            (frac | (1 << 52), exp_field - 1075)
        };
        Dyadic {
            man: BigInt::from(sign * man as i64),
            exp,
        }
    }

    /// Nearest rational below/at `r` with about `prec + 2` mantissa bits,
    /// together with a bound on the truncation error.
    pub fn from_rat(r: &Rat, prec: u32) -> (Self, Mag) {
        if r.is_zero() {
            return (Dyadic::zero(), Mag::zero());
        }
        let n = r.numer().clone();
        let d = r.denom().clone();
        let k = prec as i64 + d.bits() as i64 - n.bits() as i64 + 2;
        let (num, den) = if k >= 0 {
            (n << k as u64, d)
        } else {
            (n, d << (-k) as u64)
        };
        let man = num / den; // truncation toward zero
        (Dyadic { man, exp: -k }, Mag::pow2(-k))
    }

    pub fn neg(&self) -> Self {
        Dyadic {
            man: -self.man.clone(),
            exp: self.exp,
        }
    }

    pub fn add(&self, o: &Dyadic) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(o.exp);
        let a = &self.man << (self.exp - e) as u64;
        let b = &o.man << (o.exp - e) as u64;
        Dyadic { man: a + b, exp: e }
    }

    pub fn sub(&self, o: &Dyadic) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Dyadic) -> Self {
        Dyadic {
            man: &self.man * &o.man,
            exp: self.exp + o.exp,
        }
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            man: self.man.clone(),
            exp: self.exp + k,
        }
    }

    /// Truncate to `prec` mantissa bits; returns the rounding-error bound.
    pub fn round(&self, prec: u32) -> (Self, Mag) {
        let bits = self.man.bits();
        if bits <= prec as u64 {
            return (self.clone(), Mag::zero());
        }
        let shift = bits - prec as u64;
        let man = &self.man >> shift;
        (
            Dyadic {
                man,
                exp: self.exp + shift as i64,
            },
            Mag::pow2(self.exp + shift as i64),
        )
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            man: self.man.abs(),
            exp: self.exp,
        }
    }

    pub fn cmp(&self, o: &Dyadic) -> Ordering {
        match self.sub(o).man.sign() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.man.bits() as i64;
        let (m, e) = if bits > 63 {
            let shift = bits - 63;
            ((&self.man >> shift as u64).to_f64().unwrap(), self.exp + shift)
        } else {
            (self.man.to_f64().unwrap(), self.exp)
        };
        if e > 1020 {
            return if m > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
        }
        if e < -1060 {
            return 0.0;
        }
        m * 2f64.powi(e as i32)
    }

    /// Floor square root of a non-negative dyadic with <= 1 ulp error.
    pub fn sqrt(&self, prec: u32) -> (Self, Mag) {
        assert!(self.man.sign() != Sign::Minus, "sqrt of negative dyadic");
        if self.is_zero() {
            return (Dyadic::zero(), Mag::zero());
        }
        // Shift so the exponent is even and the mantissa has ~2*prec bits.
        let want = 2 * prec as u64 + 4;
        let bits = self.man.bits();
        let mut shift = want.saturating_sub(bits) as i64;
        if (self.exp - shift) % 2 != 0 {
            shift += 1;
        }
        let man = &self.man << shift as u64;
        let root = man.sqrt();
        let exp = (self.exp - shift) / 2;
        (Dyadic { man: root, exp }, Mag::pow2(exp))
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

// ---------------------------------------------------------------------------
// Upward-rounded magnitudes
// ---------------------------------------------------------------------------

/// A non-negative magnitude `m * 2^exp` with `m` in `[1, 2)` (or exactly 0).
/// All operations round up, with explicit slack so f64 rounding cannot
/// produce an underestimate.
#[derive(Clone, Copy, PartialEq)]
pub struct Mag {
    m: f64,
    exp: i64,
}

const UP: f64 = 1.0 + 4.0 * f64::EPSILON;

impl Mag {
    pub fn zero() -> Self {
        Mag { m: 0.0, exp: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.m == 0.0
    }

    pub fn pow2(exp: i64) -> Self {
        Mag { m: 1.0, exp }
    }

    fn norm(mut m: f64, mut exp: i64) -> Self {
        if m == 0.0 {
            return Mag::zero();
        }
        while m >= 2.0 {
            m /= 2.0;
            exp += 1;
        }
        while m < 1.0 {
            m *= 2.0;
            exp -= 1;
        }
        Mag { m: m * UP, exp }
    }

    pub fn from_f64(x: f64) -> Self {
        assert!(x >= 0.0 && x.is_finite());
        Mag::norm(x, 0)
    }

    /// Upper bound for `|d|`.
    pub fn from_dyadic(d: &Dyadic) -> Self {
        if d.is_zero() {
            return Mag::zero();
        }
        let bits = d.man.bits() as i64;
        // |man| < 2^bits
        Mag {
            m: 1.0,
            exp: d.exp + bits,
        }
    }

    pub fn add(&self, o: &Mag) -> Self {
        if self.is_zero() {
            return *o;
        }
        if o.is_zero() {
            return *self;
        }
        let (hi, lo) = if self.exp >= o.exp {
            (self, o)
        } else {
            (o, self)
        };
        let diff = hi.exp - lo.exp;
        let add = if diff > 80 { 0.0 } else { lo.m / 2f64.powi(diff as i32) };
        Mag::norm(hi.m + add + f64::EPSILON, hi.exp)
    }

    pub fn mul(&self, o: &Mag) -> Self {
        if self.is_zero() || o.is_zero() {
            return Mag::zero();
        }
        Mag::norm(self.m * o.m, self.exp + o.exp)
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return Mag::zero();
        }
        Mag {
            m: self.m,
            exp: self.exp + k,
        }
    }

    pub fn max(&self, o: &Mag) -> Self {
        if self.cmp(o) == Ordering::Less {
            *o
        } else {
            *self
        }
    }

    pub fn cmp(&self, o: &Mag) -> Ordering {
        match (self.is_zero(), o.is_zero()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            (false, false) => self
                .exp
                .cmp(&o.exp)
                .then(self.m.partial_cmp(&o.m).unwrap_or(Ordering::Equal)),
        }
    }

    /// Exact dyadic upper bound with the same value.
    pub fn to_dyadic(&self) -> Dyadic {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic::from_f64(self.m).mul_pow2(self.exp)
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        if self.exp > 1000 {
            return f64::INFINITY;
        }
        if self.exp < -1060 {
            return f64::MIN_POSITIVE;
        }
        self.m * 2f64.powi(self.exp as i32)
    }

    /// Exact comparison `self < |d|` (used for rigorous non-zero tests).
    pub fn lt_abs_dyadic(&self, d: &Dyadic) -> bool {
        if d.is_zero() {
            return false;
        }
        if self.is_zero() {
            return true;
        }
        // self <= 2^(exp+1); |d| >= 2^(d.exp + bits - 1)
        let self_up = self.exp + 1;
        let d_lo = d.exp + d.man.bits() as i64 - 1;
        if d_lo > self_up {
            return true;
        }
        self.to_dyadic().cmp(&d.abs()) == Ordering::Less
    }
}

impl fmt::Debug for Mag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

// ---------------------------------------------------------------------------
// Real balls
// ---------------------------------------------------------------------------

/// Real interval `mid +- rad`.
#[derive(Clone, Debug)]
pub struct RealBall {
    pub mid: Dyadic,
    pub rad: Mag,
    pub prec: u32,
}

impl RealBall {
    pub fn exact(d: Dyadic, prec: u32) -> Self {
        RealBall {
            mid: d,
            rad: Mag::zero(),
            prec,
        }
    }

    pub fn from_rat(r: &Rat, prec: u32) -> Self {
        let (mid, rad) = Dyadic::from_rat(r, prec);
        RealBall { mid, rad, prec }
    }

    pub fn zero(prec: u32) -> Self {
        RealBall::exact(Dyadic::zero(), prec)
    }

    fn fix(mid: Dyadic, rad: Mag, prec: u32) -> Self {
        let (mid, err) = mid.round(prec);
        RealBall {
            mid,
            rad: rad.add(&err),
            prec,
        }
    }

    pub fn add(&self, o: &RealBall) -> Self {
        let prec = self.prec.max(o.prec);
        RealBall::fix(self.mid.add(&o.mid), self.rad.add(&o.rad), prec)
    }

    pub fn sub(&self, o: &RealBall) -> Self {
        let prec = self.prec.max(o.prec);
        RealBall::fix(self.mid.sub(&o.mid), self.rad.add(&o.rad), prec)
    }

    pub fn neg(&self) -> Self {
        RealBall {
            mid: self.mid.neg(),
            rad: self.rad,
            prec: self.prec,
        }
    }

    pub fn mul(&self, o: &RealBall) -> Self {
        let prec = self.prec.max(o.prec);
        let rad = Mag::from_dyadic(&self.mid)
            .mul(&o.rad)
            .add(&Mag::from_dyadic(&o.mid).mul(&self.rad))
            .add(&self.rad.mul(&o.rad));
        RealBall::fix(self.mid.mul(&o.mid), rad, prec)
    }

    pub fn mul_rat(&self, r: &Rat) -> Self {
        let other = RealBall::from_rat(r, self.prec);
        self.mul(&other)
    }

    /// Certified: 0 is outside the interval.
    pub fn definitely_nonzero(&self) -> bool {
        self.rad.lt_abs_dyadic(&self.mid)
    }

    pub fn contains_zero(&self) -> bool {
        !self.definitely_nonzero()
    }

    pub fn abs_upper(&self) -> Mag {
        Mag::from_dyadic(&self.mid).add(&self.rad)
    }

    pub fn mid_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    pub fn rad_f64(&self) -> f64 {
        self.rad.to_f64()
    }

    /// Enclosure test: every point of `self` lies in `o`.
    pub fn contained_in(&self, o: &RealBall) -> bool {
        // |mid - o.mid| + rad <= o.rad
        let d = self.mid.sub(&o.mid);
        Mag::from_dyadic(&d).add(&self.rad).cmp(&o.rad) != Ordering::Greater
    }
}

// ---------------------------------------------------------------------------
// Complex balls
// ---------------------------------------------------------------------------

/// Complex disk `{ |z - (re + im i)| <= rad }` at precision `prec` bits.
#[derive(Clone)]
pub struct ComplexBall {
    pub re: Dyadic,
    pub im: Dyadic,
    pub rad: Mag,
    pub prec: u32,
}

impl ComplexBall {
    pub fn new(re: Dyadic, im: Dyadic, rad: Mag, prec: u32) -> Self {
        ComplexBall { re, im, rad, prec }
    }

    pub fn zero(prec: u32) -> Self {
        ComplexBall::new(Dyadic::zero(), Dyadic::zero(), Mag::zero(), prec)
    }

    pub fn one(prec: u32) -> Self {
        ComplexBall::new(Dyadic::from_int(1), Dyadic::zero(), Mag::zero(), prec)
    }

    pub fn from_gauss(q: &GaussianRational, prec: u32) -> Self {
        let (re, e1) = Dyadic::from_rat(&q.re, prec);
        let (im, e2) = Dyadic::from_rat(&q.im, prec);
        ComplexBall::new(re, im, e1.add(&e2), prec)
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        ComplexBall::new(Dyadic::from_f64(re), Dyadic::from_f64(im), Mag::zero(), prec)
    }

    fn fix(re: Dyadic, im: Dyadic, rad: Mag, prec: u32) -> Self {
        let (re, e1) = re.round(prec);
        let (im, e2) = im.round(prec);
        ComplexBall::new(re, im, rad.add(&e1).add(&e2), prec)
    }

    pub fn add(&self, o: &ComplexBall) -> Self {
        let prec = self.prec.max(o.prec);
        ComplexBall::fix(
            self.re.add(&o.re),
            self.im.add(&o.im),
            self.rad.add(&o.rad),
            prec,
        )
    }

    pub fn sub(&self, o: &ComplexBall) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        ComplexBall::new(self.re.neg(), self.im.neg(), self.rad, self.prec)
    }

    /// Upper bound for `|mid|` (1-norm bound, sound for disk radii).
    fn mid_mag(&self) -> Mag {
        Mag::from_dyadic(&self.re).add(&Mag::from_dyadic(&self.im))
    }

    pub fn abs_upper(&self) -> Mag {
        self.mid_mag().add(&self.rad)
    }

    /// Rigorous lower bound for `|z|` over the disk; `None` if it may be 0.
    pub fn abs_lower(&self) -> Option<Dyadic> {
        // |mid| >= max(|re|, |im|); subtract an upper bound of rad.
        let m = if self.re.abs().cmp(&self.im.abs()) == Ordering::Greater {
            self.re.abs()
        } else {
            self.im.abs()
        };
        if !self.rad.lt_abs_dyadic(&m) {
            return None;
        }
        let lo = m.sub(&self.rad.to_dyadic());
        if lo.man.sign() == Sign::Plus {
            Some(lo)
        } else {
            None
        }
    }

    pub fn definitely_nonzero(&self) -> bool {
        self.abs_lower().is_some()
    }

    pub fn contains_zero(&self) -> bool {
        !self.definitely_nonzero()
    }

    pub fn mul(&self, o: &ComplexBall) -> Self {
        let prec = self.prec.max(o.prec);
        let re = self.re.mul(&o.re).sub(&self.im.mul(&o.im));
        let im = self.re.mul(&o.im).add(&self.im.mul(&o.re));
        let rad = self
            .mid_mag()
            .mul(&o.rad)
            .add(&o.mid_mag().mul(&self.rad))
            .add(&self.rad.mul(&o.rad));
        ComplexBall::fix(re, im, rad, prec)
    }

    pub fn mul_gauss(&self, q: &GaussianRational) -> Self {
        self.mul(&ComplexBall::from_gauss(q, self.prec))
    }

    pub fn mul_i(&self) -> Self {
        ComplexBall::new(self.im.neg(), self.re.clone(), self.rad, self.prec)
    }

    pub fn recip(&self) -> Result<Self> {
        let lo = self.abs_lower().ok_or_else(|| {
            Error::CertificationFailure("reciprocal of a ball containing zero".into())
        })?;
        let prec = self.prec;
        // mid' = conj(mid) / |mid|^2 computed in dyadic, radius via
        // |1/z - 1/m| <= rad / (|m| (|m| - rad)) <= rad / (lo * lo).
        let norm = self.re.mul(&self.re).add(&self.im.mul(&self.im));
        let (n_round, n_err) = norm.round(2 * prec + 8);
        debug_assert!(n_err.is_zero() || !n_round.is_zero());
        let nf = RatRecip::new(&n_round, 2 * prec + 8);
        let re = nf.apply(&self.re);
        let im = nf.apply(&self.im.neg());
        // 1/lo <= 2^(1 - exp - bits) is a sound upper bound.
        let lo_inv = Mag::pow2(1 - lo.exp - lo.man.bits() as i64);
        let rad = self
            .rad
            .mul(&lo_inv)
            .mul(&lo_inv)
            .add(&Mag::pow2(-(prec as i64) + 4).mul(&lo_inv));
        Ok(ComplexBall::fix(re, im, rad, prec))
    }

    pub fn div(&self, o: &ComplexBall) -> Result<Self> {
        Ok(self.mul(&o.recip()?))
    }

    pub fn powi(&self, e: i64) -> Result<Self> {
        if e == 0 {
            return Ok(ComplexBall::one(self.prec));
        }
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let mut acc = ComplexBall::one(self.prec);
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&b);
            }
            k >>= 1;
            if k > 0 {
                b = b.mul(&b);
            }
        }
        Ok(acc)
    }

    pub fn mid_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn rad_f64(&self) -> f64 {
        self.rad.to_f64()
    }

    pub fn re_ball(&self) -> RealBall {
        RealBall {
            mid: self.re.clone(),
            rad: self.rad,
            prec: self.prec,
        }
    }

    pub fn im_ball(&self) -> RealBall {
        RealBall {
            mid: self.im.clone(),
            rad: self.rad,
            prec: self.prec,
        }
    }

    pub fn contained_in(&self, o: &ComplexBall) -> bool {
        let dre = self.re.sub(&o.re);
        let dim = self.im.sub(&o.im);
        let dist = Mag::from_dyadic(&dre).add(&Mag::from_dyadic(&dim));
        dist.add(&self.rad).cmp(&o.rad) != Ordering::Greater
    }

    pub fn with_rad(&self, rad: Mag) -> Self {
        ComplexBall::new(self.re.clone(), self.im.clone(), rad, self.prec)
    }
}

impl fmt::Debug for ComplexBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = self.mid_f64();
        write!(f, "({re:e}{im:+e}i ± {:e})", self.rad.to_f64())
    }
}

/// Helper: multiply dyadics by the reciprocal of a fixed positive dyadic,
/// truncated to a given precision.
struct RatRecip {
    man: BigInt,
    exp: i64,
    prec: u32,
}

impl RatRecip {
    fn new(d: &Dyadic, prec: u32) -> Self {
        assert!(!d.is_zero());
        // 1/d = 1/(man*2^exp): inv_man ~ 2^k / man
        let k = d.man.bits() as i64 + prec as i64;
        let one = BigInt::from(1) << k as u64;
        let man = one / &d.man;
        RatRecip {
            man,
            exp: -k - d.exp,
            prec,
        }
    }

    fn apply(&self, x: &Dyadic) -> Dyadic {
        let (r, _) = Dyadic {
            man: &self.man * &x.man,
            exp: self.exp + x.exp,
        }
        .round(self.prec);
        r
    }
}

// ---------------------------------------------------------------------------
// Certified constants
// ---------------------------------------------------------------------------

/// Certified `sqrt` of a positive rational.
pub fn sqrt_rat(r: &Rat, prec: u32) -> Result<RealBall> {
    if r.is_negative() {
        return Err(Error::Invalid("sqrt of a negative rational".into()));
    }
    let (d, e0) = Dyadic::from_rat(r, 2 * prec + 8);
    let (s, e1) = d.sqrt(prec + 4);
    // e0 enters under the square root: sqrt(x + e) <= sqrt(x) + e/(2 sqrt(x)).
    let mut rad = e1;
    if !e0.is_zero() && !s.is_zero() {
        let scale = Mag::from_f64(0.6 / s.to_f64().max(f64::MIN_POSITIVE));
        rad = rad.add(&e0.mul(&scale));
    }
    Ok(RealBall {
        mid: s,
        rad,
        prec,
    })
}

/// Certified `n`-th root of an exact Gaussian rational of modulus ~1,
/// choosing the root closest to the float seed `start`.
///
/// Newton refinement on the midpoint followed by an interval-Newton
/// inclusion test, so the returned disk provably contains a root of
/// `z^n = target`.
pub fn nth_root_certified(
    target: &GaussianRational,
    n: u32,
    start: (f64, f64),
    prec: u32,
) -> Result<ComplexBall> {
    assert!(n >= 1);
    if n == 1 {
        return Ok(ComplexBall::from_gauss(target, prec));
    }
    let work = prec + 32;
    let t = ComplexBall::from_gauss(target, work);
    let nf = ComplexBall::from_f64(n as f64, 0.0, work);
    let mut z = ComplexBall::from_f64(start.0, start.1, work);
    for _ in 0..(2 + prec / 10) {
        // z <- z - (z^n - t) / (n z^(n-1)), midpoints only
        let zp = z.powi(n as i64 - 1)?;
        let f = zp.mul(&z).sub(&t);
        let df = nf.mul(&zp);
        let step = f.div(&df)?;
        z = z.sub(&step);
        z.rad = Mag::zero(); // plain iteration; certification happens below
    }
    // Interval Newton: D = disk(z, rho); N = z - f(z)/f'(D); need N ⊂ D.
    let fz = z.powi(n as i64)?.sub(&t);
    let res = fz.abs_upper();
    let mut rho = res.mul(&Mag::from_f64(4.0 / n as f64)).max(&Mag::pow2(-(prec as i64) - 4));
    for _ in 0..8 {
        let disk = z.with_rad(rho);
        let dfd = nf.mul(&disk.powi(n as i64 - 1)?);
        if !dfd.definitely_nonzero() {
            rho = rho.mul(&Mag::from_f64(2.0));
            continue;
        }
        let nstep = fz.div(&dfd)?;
        let newton = z.sub(&nstep);
        if newton.contained_in(&disk) {
            let mut out = newton;
            out.prec = prec;
            return Ok(out);
        }
        rho = rho.mul(&Mag::from_f64(2.0));
    }
    Err(Error::CertificationFailure(format!(
        "interval Newton failed for {n}-th root"
    )))
}

/// Certified primitive direction `e^(i p pi / d)` as a ball.
pub fn unit_root_certified(p: i64, d: u32, prec: u32) -> Result<ComplexBall> {
    let ang = std::f64::consts::PI * p as f64 / d as f64;
    // e^(i p pi / d) solves z^(2d) = 1.
    nth_root_certified(
        &num_traits::One::one(),
        2 * d,
        (ang.cos(), ang.sin()),
        prec,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use num_traits::One;

    fn gq(re: (i64, i64), im: (i64, i64)) -> GaussianRational {
        GaussianRational::from_pair(re, im)
    }

    #[test]
    fn dyadic_round_trip() {
        let d = Dyadic::from_f64(-3.25);
        assert_eq!(d.to_f64(), -3.25);
        let (r, err) = d.round(2);
        assert!(err.to_f64() <= 1.0);
        assert!((r.to_f64() - -3.25).abs() <= 1.0);
    }

    #[test]
    fn ball_mul_encloses() {
        let prec = 64;
        let a = ComplexBall::from_gauss(&gq((1, 3), (2, 7)), prec);
        let b = ComplexBall::from_gauss(&gq((-5, 11), (1, 2)), prec);
        let c = a.mul(&b);
        let exact = &gq((1, 3), (2, 7)) * &gq((-5, 11), (1, 2));
        let (re, im) = exact.to_f64_pair();
        let (cre, cim) = c.mid_f64();
        let dist = ((re - cre).powi(2) + (im - cim).powi(2)).sqrt();
        assert!(dist <= c.rad_f64() + 1e-15);
    }

    #[test]
    fn recip_certified() {
        let prec = 128;
        let a = ComplexBall::from_gauss(&gq((3, 1), (4, 1)), prec);
        let r = a.recip().unwrap();
        let prod = a.mul(&r);
        let (re, im) = prod.mid_f64();
        assert!((re - 1.0).abs() < 1e-30 + prod.rad_f64());
        assert!(im.abs() < 1e-30 + prod.rad_f64());
        assert!(prod.rad_f64() < 1e-30);
    }

    #[test]
    fn sqrt_two_ball() {
        let s = sqrt_rat(&rat(2, 1), 128).unwrap();
        let x = s.mid_f64();
        assert!((x - std::f64::consts::SQRT_2).abs() < 1e-15);
        assert!(s.rad_f64() < 1e-35);
        assert!(s.definitely_nonzero());
    }

    #[test]
    fn fourth_roots_of_unity() {
        for p in 0..8 {
            let w = unit_root_certified(p, 4, 128).unwrap();
            let ang = std::f64::consts::PI * p as f64 / 4.0;
            let (re, im) = w.mid_f64();
            assert!((re - ang.cos()).abs() < 5e-16, "p={p}");
            assert!((im - ang.sin()).abs() < 5e-16, "p={p}");
            assert!(w.rad_f64() < 1e-30);
            let pow = w.powi(8).unwrap();
            let (pre, pim) = pow.mid_f64();
            assert!((pre - 1.0).abs() < pow.rad_f64() + 5e-15);
            assert!(pim.abs() < pow.rad_f64() + 5e-15);
        }
    }

    #[test]
    fn shrinking_ball_property() {
        // Evaluating the same composed expression at higher precision gives
        // an enclosure contained in the lower-precision one.
        let exprs: Vec<Box<dyn Fn(u32) -> ComplexBall>> = vec![
            Box::new(|p| {
                let r2 = sqrt_rat(&rat(2, 1), p).unwrap();
                let x = ComplexBall::new(r2.mid.clone(), Dyadic::zero(), r2.rad, p);
                x.mul(&x).sub(&ComplexBall::from_gauss(&GaussianRational::one(), p))
            }),
            Box::new(|p| {
                let w = unit_root_certified(1, 3, p).unwrap();
                w.powi(5).unwrap().recip().unwrap()
            }),
            Box::new(|p| {
                let a = ComplexBall::from_gauss(&gq((1, 7), (3, 5)), p);
                let b = sqrt_rat(&rat(5, 3), p).unwrap();
                let bb = ComplexBall::new(b.mid.clone(), Dyadic::zero(), b.rad, p);
                a.mul(&bb).add(&a.recip().unwrap())
            }),
        ];
        for (k, e) in exprs.iter().enumerate() {
            let lo = e(64);
            let hi = e(128);
            assert!(hi.contained_in(&lo), "expression {k} did not shrink");
            assert!(hi.rad_f64() < lo.rad_f64());
        }
    }
}
