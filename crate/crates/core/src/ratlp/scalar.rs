//! Internal exact scalar for the simplex tableau: a reduced `i128`
//! fraction with a transparent fallback to arbitrary precision on
//! overflow. Arithmetic is exact in both representations.

use crate::rational::Rational;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

#[derive(Clone, Debug)]
pub enum Scalar {
    /// Reduced fraction, denominator > 0.
    Small(i128, i128),
    Big(Rational),
}

const OVERFLOW_GUARD: i128 = 1 << 96;

#[inline]
fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar::Small(0, 1)
    }

    pub fn one() -> Scalar {
        Scalar::Small(1, 1)
    }

    #[inline]
    fn small(num: i128, den: i128) -> Scalar {
        debug_assert!(den != 0);
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = gcd(num, den);
        Scalar::Small(num / g, den / g)
    }

    pub fn from_rational(r: &Rational) -> Scalar {
        match (r.numer().to_i128(), r.denom().to_i128()) {
            (Some(n), Some(d)) if n.abs() < OVERFLOW_GUARD && d < OVERFLOW_GUARD => {
                Scalar::Small(n, d)
            }
            _ => Scalar::Big(r.clone()),
        }
    }

    pub fn to_rational(&self) -> Rational {
        match self {
            Scalar::Small(n, d) => {
                Rational::new(BigInt::from(*n), BigInt::from(*d))
            }
            Scalar::Big(r) => r.clone(),
        }
    }

    fn to_big(&self) -> Rational {
        self.to_rational()
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Small(n, _) => *n == 0,
            Scalar::Big(r) => r.is_zero(),
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Scalar::Small(n, _) => *n > 0,
            Scalar::Big(r) => r.is_positive(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Small(n, _) => *n < 0,
            Scalar::Big(r) => r.is_negative(),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Small(n, d) => Scalar::Small(-n, *d),
            Scalar::Big(r) => Scalar::Big(-r.clone()),
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        if let (Scalar::Small(n1, d1), Scalar::Small(n2, d2)) = (self, other) {
            if let Some(v) = small_add(*n1, *d1, *n2, *d2) {
                return v;
            }
        }
        Scalar::Big(self.to_big() + other.to_big())
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        if let (Scalar::Small(n1, d1), Scalar::Small(n2, d2)) = (self, other) {
            if let Some(v) = small_add(*n1, *d1, -n2, *d2) {
                return v;
            }
        }
        Scalar::Big(self.to_big() - other.to_big())
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        if let (Scalar::Small(n1, d1), Scalar::Small(n2, d2)) = (self, other) {
            // Cross-reduce before multiplying to keep factors small.
            let g1 = gcd(*n1, *d2);
            let g2 = gcd(*n2, *d1);
            let (a, b) = (n1 / g1, n2 / g2);
            let (c, d) = (d1 / g2, d2 / g1);
            if let (Some(num), Some(den)) = (a.checked_mul(b), c.checked_mul(d)) {
                if num.abs() < OVERFLOW_GUARD && den < OVERFLOW_GUARD {
                    return Scalar::Small(num, den);
                }
            }
        }
        Scalar::Big(self.to_big() * other.to_big())
    }

    pub fn div(&self, other: &Scalar) -> Scalar {
        debug_assert!(!other.is_zero());
        match other {
            Scalar::Small(n, d) => {
                let inv = if *n < 0 {
                    Scalar::Small(-d, -n)
                } else {
                    Scalar::Small(*d, *n)
                };
                self.mul(&inv)
            }
            Scalar::Big(r) => Scalar::Big(self.to_big() / r),
        }
    }

    pub fn cmp(&self, other: &Scalar) -> Ordering {
        if let (Scalar::Small(n1, d1), Scalar::Small(n2, d2)) = (self, other) {
            if let (Some(l), Some(r)) = (n1.checked_mul(*d2), n2.checked_mul(*d1)) {
                return l.cmp(&r);
            }
        }
        self.to_big().cmp(&other.to_big())
    }
}

#[inline]
fn small_add(n1: i128, d1: i128, n2: i128, d2: i128) -> Option<Scalar> {
    let g = gcd(d1, d2);
    let (e1, e2) = (d1 / g, d2 / g);
    let num = n1.checked_mul(e2)?.checked_add(n2.checked_mul(e1)?)?;
    let den = d1.checked_mul(e2)?;
    if num.abs() < OVERFLOW_GUARD && den < OVERFLOW_GUARD {
        Some(Scalar::small(num, den))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn arithmetic_matches_bigrational() {
        let cases = [
            (rat(1, 3), rat(2, 5)),
            (rat(-7, 4), rat(7, 4)),
            (rat(0, 1), rat(123, 7)),
            (rat(1 << 40, 3), rat(-5, 1 << 30)),
        ];
        for (a, b) in cases {
            let sa = Scalar::from_rational(&a);
            let sb = Scalar::from_rational(&b);
            assert_eq!(sa.add(&sb).to_rational(), &a + &b);
            assert_eq!(sa.sub(&sb).to_rational(), &a - &b);
            assert_eq!(sa.mul(&sb).to_rational(), &a * &b);
            if !b.is_zero() {
                assert_eq!(sa.div(&sb).to_rational(), &a / &b);
            }
            assert_eq!(sa.cmp(&sb), a.cmp(&b));
        }
    }

    #[test]
    fn overflow_falls_back_to_big() {
        let huge = Rational::new(num_bigint::BigInt::from(2).pow(120), 3.into());
        let s = Scalar::from_rational(&huge);
        let doubled = s.add(&s);
        assert_eq!(doubled.to_rational(), &huge + &huge);
    }
}
