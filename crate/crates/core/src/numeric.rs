//! One numeric contract for the closed forms: exact rationals for identity
//! checks and equality cases, doubles for sweeps.

use num_rational::Ratio;
use num_traits::{Num, Signed, ToPrimitive};
use std::fmt::Debug;
use std::ops::Neg;

pub type Rational = Ratio<i128>;

pub trait Scalar: Num + Clone + PartialOrd + Debug + Neg<Output = Self> {
    fn from_rational(r: &Rational) -> Self;

    fn from_int(i: i64) -> Self {
        Self::from_rational(&Rational::from_integer(i as i128))
    }

    fn to_f64(&self) -> f64;

    fn abs_val(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl Scalar for f64 {
    fn from_rational(r: &Rational) -> Self {
        ratio_to_f64(r)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for Rational {
    fn from_rational(r: &Rational) -> Self {
        *r
    }
    fn to_f64(&self) -> f64 {
        ratio_to_f64(self)
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
}

pub fn ratio_to_f64(r: &Rational) -> f64 {
    // numer/denom as f64 can lose precision when both are huge; the catalog
    // never gets near that, but keep the division in the safer order
    let n = r.numer().to_f64().unwrap_or(f64::NAN);
    let d = r.denom().to_f64().unwrap_or(f64::NAN);
    n / d
}

pub fn rat(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n as i128)
}

/// Exact sign of a rational: -1, 0, 1.
pub fn sign(r: &Rational) -> i32 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

/// Printable `p/q` (or `p`).
pub fn fmt_rational(r: &Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `x` with six significant digits, `%g` style.
pub fn fmt_sig6(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..6).contains(&exp) {
        let s = format!("{:.5e}", x);
        let (mant, e) = s.split_once('e').unwrap();
        return format!("{}e{}", trim_zeros(mant), e);
    }
    let decimals = (5 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x))
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}
