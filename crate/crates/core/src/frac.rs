//! Minimal exact rational arithmetic.
//!
//! Attribute fractions are entered as short decimals ("0.25", "0.5") and the
//! acceptance contract for their aggregation is exactness: percentages such
//! as 53.125 must come out bit-exact, not "close after enough f64 luck".
//! A pair of reduced i128s is all that takes; magnitudes stay tiny because
//! inputs have at most [`MAX_DECIMALS`] decimal places and aggregation only
//! ever averages a handful of them.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Sub};

/// Upper bound on decimal places accepted by [`Frac::from_decimal`], which
/// caps denominators at 10^12 and keeps every intermediate product far from
/// i128 overflow.
pub const MAX_DECIMALS: usize = 12;

/// An exact rational number. Always stored reduced with a positive
/// denominator.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Frac {
    num: i128,
    den: i128,
}

impl Frac {
    pub const ZERO: Frac = Frac { num: 0, den: 1 };
    pub const ONE: Frac = Frac { num: 1, den: 1 };

    /// Builds `num/den` in lowest terms. Panics if `den == 0`; callers only
    /// ever divide by counts they have already checked to be non-zero.
    pub fn new(num: i128, den: i128) -> Frac {
        assert!(den != 0, "zero denominator");
        let sign = if den < 0 { -1 } else { 1 };
        let g = gcd(num.unsigned_abs(), den.unsigned_abs());
        if g == 0 {
            return Frac::ZERO;
        }
        Frac {
            num: sign * num / g as i128,
            den: (den * sign) / g as i128,
        }
    }

    /// Parses an unsigned decimal literal ("0", "1", "0.125") exactly.
    /// Returns `None` for anything that is not plain digits with one optional
    /// point, or that carries more than [`MAX_DECIMALS`] decimal places.
    pub fn from_decimal(s: &str) -> Option<Frac> {
        let (int_part, frac_part) = match s.split_once('.') {
            Some((i, f)) => (i, f),
            None => (s, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        if frac_part.len() > MAX_DECIMALS {
            return None;
        }
        let digits = |p: &str| p.chars().all(|c| c.is_ascii_digit());
        if !digits(int_part) || !digits(frac_part) {
            return None;
        }
        let int: i128 = if int_part.is_empty() {
            0
        } else {
            int_part.parse().ok()?
        };
        let den = 10i128.pow(frac_part.len() as u32);
        let frac: i128 = if frac_part.is_empty() {
            0
        } else {
            frac_part.parse().ok()?
        };
        Some(Frac::new(int * den + frac, den))
    }

    pub fn numerator(self) -> i128 {
        self.num
    }

    pub fn denominator(self) -> i128 {
        self.den
    }

    pub fn abs(self) -> Frac {
        Frac {
            num: self.num.abs(),
            den: self.den,
        }
    }

    /// Nearest f64. Division of two exactly-representable small integers is
    /// correctly rounded, so fractions whose true value fits a double (e.g.
    /// 425/8 = 53.125) convert without error.
    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Add for Frac {
    type Output = Frac;
    fn add(self, rhs: Frac) -> Frac {
        Frac::new(self.num * rhs.den + rhs.num * self.den, self.den * rhs.den)
    }
}

impl Sub for Frac {
    type Output = Frac;
    fn sub(self, rhs: Frac) -> Frac {
        Frac::new(self.num * rhs.den - rhs.num * self.den, self.den * rhs.den)
    }
}

impl Mul for Frac {
    type Output = Frac;
    fn mul(self, rhs: Frac) -> Frac {
        Frac::new(self.num * rhs.num, self.den * rhs.den)
    }
}

impl PartialOrd for Frac {
    fn partial_cmp(&self, other: &Frac) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frac {
    fn cmp(&self, other: &Frac) -> Ordering {
        // Denominators are positive, so cross-multiplication preserves order.
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

impl fmt::Debug for Frac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Display for Frac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}
