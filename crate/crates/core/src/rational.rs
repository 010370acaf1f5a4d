//! Exact rationals that stay inline while numerator and denominator fit in an
//! `i64` and fall back to `BigRational` otherwise.
//!
//! The representation is canonical (lowest terms, positive denominator, inline
//! whenever possible), so derived equality and hashing are value equality.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Q {
    Small(i64, i64),
    Big(BigRational),
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn fits(x: i128) -> bool {
    x > i64::MIN as i128 && x <= i64::MAX as i128
}

impl Q {
    fn from_i128(n: i128, d: i128) -> Q {
        debug_assert!(d != 0);
        let (mut n, mut d) = if d < 0 { (-n, -d) } else { (n, d) };
        if n == 0 {
            return Q::Small(0, 1);
        }
        if d != 1 {
            let g = gcd(n.unsigned_abs(), d as u128) as i128;
            if g != 1 {
                n /= g;
                d /= g;
            }
        }
        if fits(n) && fits(d) {
            Q::Small(n as i64, d as i64)
        } else {
            Q::Big(BigRational::new_raw(BigInt::from(n), BigInt::from(d)))
        }
    }

    fn from_big(r: BigRational) -> Q {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) if n != i64::MIN && d != i64::MIN => Q::Small(n, d),
            _ => Q::Big(r),
        }
    }

    fn big(&self) -> BigRational {
        match self {
            Q::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Q::Big(r) => r.clone(),
        }
    }

    pub fn from_integer(n: BigInt) -> Q {
        Q::from_big(BigRational::from_integer(n))
    }

    /// Panics on a zero denominator.
    pub fn new(n: BigInt, d: BigInt) -> Q {
        Q::from_big(BigRational::new(n, d))
    }

    pub fn numer(&self) -> BigInt {
        match self {
            Q::Small(n, _) => BigInt::from(*n),
            Q::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match self {
            Q::Small(_, d) => BigInt::from(*d),
            Q::Big(r) => r.denom().clone(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Q::Small(_, d) => *d == 1,
            Q::Big(r) => r.is_integer(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Q::Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Q::Small(1, 1))
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Q::Small(n, _) => *n < 0,
            Q::Big(r) => r.is_negative(),
        }
    }

    pub fn abs(&self) -> Q {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Q {
        match self {
            Q::Small(n, d) => Q::from_i128(*d as i128, *n as i128),
            Q::Big(r) => Q::from_big(r.recip()),
        }
    }
}

impl Default for Q {
    fn default() -> Self {
        Q::Small(0, 1)
    }
}

impl From<i64> for Q {
    fn from(n: i64) -> Self {
        Q::from_i128(n as i128, 1)
    }
}

impl From<BigRational> for Q {
    fn from(r: BigRational) -> Self {
        Q::from_big(r)
    }
}

impl From<&Q> for BigRational {
    fn from(q: &Q) -> Self {
        q.big()
    }
}

impl Zero for Q {
    fn zero() -> Self {
        Q::Small(0, 1)
    }
    fn is_zero(&self) -> bool {
        Q::is_zero(self)
    }
}

impl One for Q {
    fn one() -> Self {
        Q::Small(1, 1)
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Q::Small(n, 1) => write!(f, "{n}"),
            Q::Small(n, d) => write!(f, "{n}/{d}"),
            Q::Big(r) => write!(f, "{r}"),
        }
    }
}

impl fmt::Debug for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl PartialOrd for Q {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Q {
    fn cmp(&self, o: &Self) -> Ordering {
        match (self, o) {
            (Q::Small(a, b), Q::Small(c, d)) => (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128)),
            _ => self.big().cmp(&o.big()),
        }
    }
}

fn add(x: &Q, y: &Q) -> Q {
    match (x, y) {
        (Q::Small(a, 1), Q::Small(c, 1)) => Q::from_i128(*a as i128 + *c as i128, 1),
        (Q::Small(a, b), Q::Small(c, d)) => {
            Q::from_i128(*a as i128 * *d as i128 + *c as i128 * *b as i128, *b as i128 * *d as i128)
        }
        _ => Q::from_big(x.big() + y.big()),
    }
}

fn mul(x: &Q, y: &Q) -> Q {
    match (x, y) {
        (Q::Small(0, _), _) | (_, Q::Small(0, _)) => Q::Small(0, 1),
        (Q::Small(a, 1), Q::Small(c, 1)) => Q::from_i128(*a as i128 * *c as i128, 1),
        (Q::Small(a, b), Q::Small(c, d)) => Q::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128),
        _ => Q::from_big(x.big() * y.big()),
    }
}

fn neg(x: &Q) -> Q {
    match x {
        Q::Small(n, d) => Q::Small(-n, *d),
        Q::Big(r) => Q::from_big(-r),
    }
}

impl Neg for &Q {
    type Output = Q;
    fn neg(self) -> Q {
        neg(self)
    }
}

impl Neg for Q {
    type Output = Q;
    fn neg(self) -> Q {
        neg(&self)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&Q> for &Q {
            type Output = Q;
            fn $m(self, o: &Q) -> Q {
                $body(self, o)
            }
        }
        impl $tr<Q> for &Q {
            type Output = Q;
            fn $m(self, o: Q) -> Q {
                $body(self, &o)
            }
        }
        impl $tr<&Q> for Q {
            type Output = Q;
            fn $m(self, o: &Q) -> Q {
                $body(&self, o)
            }
        }
        impl $tr<Q> for Q {
            type Output = Q;
            fn $m(self, o: Q) -> Q {
                $body(&self, &o)
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, |x: &Q, y: &Q| add(x, &neg(y)));
binop!(Mul, mul, mul);
binop!(Div, div, |x: &Q, y: &Q| {
    assert!(!y.is_zero(), "division by zero");
    mul(x, &y.recip())
});

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn overflow_promotes_and_demotes() {
        let m = Q::from(i64::MAX);
        let s = &m + &m;
        assert!(matches!(s, Q::Big(_)));
        assert_eq!(&s - &m, m);
        assert!(matches!(&s - &m, Q::Small(..)));
        let x = &Q::from(i64::MAX) * &Q::from(i64::MAX);
        assert_eq!(&x / &Q::from(i64::MAX), Q::from(i64::MAX));
    }

    #[test]
    fn canonical_form() {
        assert_eq!(Q::new(BigInt::from(4), BigInt::from(-6)), Q::Small(-2, 3));
        assert_eq!(Q::from(-7).recip(), Q::Small(-1, 7));
        assert_eq!(Q::new(BigInt::from(0), BigInt::from(-5)), Q::Small(0, 1));
        assert_eq!(Q::Small(3, 4).to_string(), "3/4");
    }

    proptest! {
        #[test]
        fn agrees_with_bigrational(a in -1i64 << 40..1i64 << 40, b in 1i64..1 << 30, c in -1i64 << 40..1i64 << 40, d in 1i64..1 << 30) {
            let (x, y) = (Q::from(big(a, b)), Q::from(big(c, d)));
            let (bx, by) = (big(a, b), big(c, d));
            prop_assert_eq!(&x + &y, Q::from(&bx + &by));
            prop_assert_eq!(&x - &y, Q::from(&bx - &by));
            prop_assert_eq!(&x * &y, Q::from(&bx * &by));
            if c != 0 {
                prop_assert_eq!(&x / &y, Q::from(&bx / &by));
            }
            prop_assert_eq!(x.cmp(&y), bx.cmp(&by));
            let p = &(&x * &y) * &(&x * &y);
            prop_assert_eq!(p, Q::from(&(&bx * &by) * &(&bx * &by)));
        }
    }
}
