//! Exact scalars: arbitrary-precision rationals and Gaussian rationals.
//!
//! All structural data in the crate (lattice generators, Laurent
//! coefficients, subspace bases) is carried over `Q(i)`. Scalars are kept in
//! canonical reduced form by `num-rational`, so equality is structural.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational.
pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// A Gaussian rational `re + im*i` with both parts in canonical reduced form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: Rat,
    pub im: Rat,
}

pub type Gq = GaussianRational;

impl GaussianRational {
    pub fn new(re: Rat, im: Rat) -> Self {
        Gq { re, im }
    }

    pub fn from_int(n: i64) -> Self {
        Gq::new(rat_int(n), Rat::zero())
    }

    pub fn from_rat(re: Rat) -> Self {
        Gq::new(re, Rat::zero())
    }

    pub fn from_pair(re: (i64, i64), im: (i64, i64)) -> Self {
        Gq::new(rat(re.0, re.1), rat(im.0, im.1))
    }

    pub fn i() -> Self {
        Gq::new(Rat::zero(), Rat::one())
    }

    pub fn conj(&self) -> Self {
        Gq::new(self.re.clone(), -self.im.clone())
    }

    /// Squared modulus `re^2 + im^2`, a non-negative rational.
    pub fn norm_sq(&self) -> Rat {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn recip(&self) -> Self {
        let n = self.norm_sq();
        assert!(!n.is_zero(), "division by zero Gaussian rational");
        Gq::new(&self.re / &n, -(&self.im / &n))
    }

    pub fn mul_i(&self) -> Self {
        Gq::new(-self.im.clone(), self.re.clone())
    }

    pub fn scale(&self, r: &Rat) -> Self {
        Gq::new(&self.re * r, &self.im * r)
    }

    pub fn powi(&self, e: i64) -> Self {
        if e == 0 {
            return Gq::one();
        }
        let base = if e < 0 { self.recip() } else { self.clone() };
        let mut acc = Gq::one();
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &b;
            }
            k >>= 1;
            if k > 0 {
                b = &b * &b;
            }
        }
        acc
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// Max of numerator/denominator magnitudes, a crude height measure.
    pub fn height(&self) -> BigInt {
        let mut h = BigInt::zero();
        for r in [&self.re, &self.im] {
            h = h.max(r.numer().abs()).max(r.denom().abs());
        }
        h
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Gq::new(Rat::zero(), Rat::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Gq::new(Rat::one(), Rat::zero())
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        Gq::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        Gq::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        Gq::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Div for &GaussianRational {
    type Output = GaussianRational;
    fn div(self, rhs: &GaussianRational) -> GaussianRational {
        self * &rhs.recip()
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        Gq::new(-self.re.clone(), -self.im.clone())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for GaussianRational {
            type Output = GaussianRational;
            fn $m(self, rhs: GaussianRational) -> GaussianRational {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -&self
    }
}

impl AddAssign for GaussianRational {
    fn add_assign(&mut self, rhs: Self) {
        *self = &*self + &rhs;
    }
}
impl SubAssign for GaussianRational {
    fn sub_assign(&mut self, rhs: Self) {
        *self = &*self - &rhs;
    }
}
impl MulAssign for GaussianRational {
    fn mul_assign(&mut self, rhs: Self) {
        *self = &*self * &rhs;
    }
}

fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GaussianRational {
    /// Serialized as `p/q`, `r/s i`, or `p/q+r/s i`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", fmt_rat(&self.re));
        }
        let im_part = {
            if self.im == Rat::one() {
                "i".to_string()
            } else if self.im == -Rat::one() {
                "-i".to_string()
            } else {
                format!("{}i", fmt_rat(&self.im))
            }
        };
        if self.re.is_zero() {
            write!(f, "{}", im_part)
        } else if self.im.is_negative() {
            write!(f, "{}{}", fmt_rat(&self.re), im_part)
        } else {
            write!(f, "{}+{}", fmt_rat(&self.re), im_part)
        }
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).ok()?;
        let d = BigInt::from_str(d.trim()).ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Rat::new(n, d))
    } else {
        Some(Rat::from_integer(BigInt::from_str(s).ok()?))
    }
}

impl FromStr for GaussianRational {
    type Err = String;

    /// Accepts `p/q`, `p/q+r/s i`, `p/q-r/s i`, `i`, `-i`, `r/s i`.
    fn from_str(input: &str) -> Result<Self, String> {
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err("empty scalar".into());
        }
        let Some(body) = s.strip_suffix('i') else {
            let re = parse_rat(&s).ok_or_else(|| format!("bad rational {input:?}"))?;
            return Ok(Gq::from_rat(re));
        };
        // Split the imaginary coefficient at the last sign not in position 0.
        let split = body
            .char_indices()
            .filter(|&(k, c)| k >= 1 && (c == '+' || c == '-'))
            .map(|(k, _)| k)
            .next_back();
        let (re_s, im_s) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("", body),
        };
        let re = if re_s.is_empty() {
            Rat::zero()
        } else {
            parse_rat(re_s).ok_or_else(|| format!("bad real part in {input:?}"))?
        };
        let im = match im_s {
            "" | "+" => Rat::one(),
            "-" => -Rat::one(),
            b => parse_rat(b).ok_or_else(|| format!("bad imaginary part in {input:?}"))?,
        };
        Ok(Gq::new(re, im))
    }
}

impl serde::Serialize for GaussianRational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for GaussianRational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Continued-fraction rationalization of a float with bounded denominator.
/// Returns the convergent with denominator <= `max_den` closest to `x`.
pub fn rationalize_f64(x: f64, max_den: i64) -> Option<Rat> {
    if !x.is_finite() {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (1i128, 0i128, x.floor() as i128, 1i128);
    let mut frac = x - x.floor();
    for _ in 0..64 {
        if frac.abs() < 1e-18 {
            break;
        }
        let inv = 1.0 / frac;
        let a = inv.floor();
        if !(inv.is_finite()) || a >= 1e18 {
            break;
        }
        let a = a as i128;
        let p2 = a * p1 + p0;
        let q2 = a * q1 + q0;
        if q2 > max_den as i128 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        frac = inv - a as f64;
    }
    if q1 == 0 {
        return None;
    }
    Some(Rat::new(BigInt::from(p1), BigInt::from(q1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_and_equality() {
        let a = Gq::new(rat(2, 4), rat(-3, -6));
        let b = Gq::new(rat(1, 2), rat(1, 2));
        assert_eq!(a, b);
        assert_eq!(a.re.denom(), &BigInt::from(2));
    }

    #[test]
    fn arithmetic_and_inverse() {
        let z = Gq::from_pair((3, 1), (-2, 1));
        let w = &z * &z.recip();
        assert_eq!(w, Gq::one());
        assert_eq!(z.powi(0), Gq::one());
        assert_eq!(Gq::i().powi(4), Gq::one());
        assert_eq!(Gq::i().powi(-1), -Gq::i());
    }

    #[test]
    fn display_roundtrip() {
        for s in [
            "1/2",
            "-3",
            "i",
            "-i",
            "2i",
            "1/2+3/4i",
            "1/2-3/4i",
            "-5/7+i",
        ] {
            let z: Gq = s.parse().unwrap();
            assert_eq!(z.to_string(), s, "roundtrip of {s}");
        }
        let z: Gq = "3 + 2 i".parse().unwrap();
        assert_eq!(z, Gq::from_pair((3, 1), (2, 1)));
    }

    #[test]
    fn rationalize_small() {
        assert_eq!(rationalize_f64(0.5, 100).unwrap(), rat(1, 2));
        assert_eq!(rationalize_f64(-2.0 / 3.0, 100).unwrap(), rat(-2, 3));
        let r = rationalize_f64(std::f64::consts::SQRT_2, 10).unwrap();
        assert_eq!(r, rat(7, 5)); // best convergent with denominator <= 10
    }
}
