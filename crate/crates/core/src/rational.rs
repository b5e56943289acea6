//! Exact arithmetic: arbitrary-precision rationals and log-scale quantities.
//!
//! All bound computations run in base-2 log units ("bits") over
//! [`Rational`]s; nothing in the numeric core ever rounds. The one place a
//! rounding decision exists is [`log2_dyadic`], which rounds `log2` of a
//! non-power-of-two count *up* to a dyadic rational so that every derived
//! size bound stays sound.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

use crate::error::Error;

/// Exact rational number, canonical (gcd-reduced, positive denominator).
pub type Rational = num_rational::BigRational;

/// Builds a rational from an integer pair.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Builds a rational from an integer.
pub fn rat_int(num: i64) -> Rational {
    Rational::from_integer(BigInt::from(num))
}

/// Default number of fractional bits used when rounding `log2` of a count up
/// to a dyadic rational.
pub const DEFAULT_FRAC_BITS: u32 = 32;

/// A quantity measured in base-2 log units (bits).
///
/// Degree-constraint bounds, LP objectives and runtime budgets are all
/// `LogQuantity` values: `n_{Y|X} = log2 N_{Y|X}`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct LogQuantity(pub Rational);

impl LogQuantity {
    pub fn zero() -> LogQuantity {
        LogQuantity(Rational::zero())
    }

    pub fn bits(&self) -> &Rational {
        &self.0
    }

    pub fn into_bits(self) -> Rational {
        self.0
    }
}

impl From<Rational> for LogQuantity {
    fn from(r: Rational) -> LogQuantity {
        LogQuantity(r)
    }
}

impl fmt::Display for LogQuantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `log2(count)` exactly when `count` is a power of two; otherwise the
/// smallest dyadic rational with denominator `2^frac_bits` that is `>=
/// log2(count)`.
///
/// Rounding up keeps all size bounds sound: `2^result >= count` always.
pub fn log2_dyadic(count: u64, frac_bits: u32) -> Result<LogQuantity, Error> {
    if count == 0 {
        return Err(Error::Domain("log2 of zero".into()));
    }
    if count.is_power_of_two() {
        return Ok(LogQuantity(rat_int(count.trailing_zeros() as i64)));
    }
    let int_part = 63 - count.leading_zeros() as u64; // floor(log2 count)
    let frac = log2_frac_bits_ceil(count, frac_bits);
    let denom = BigInt::one() << frac_bits;
    let num = BigInt::from(int_part) * &denom + BigInt::from(frac);
    Ok(LogQuantity(Rational::new(num, denom)))
}

/// Ceil of the fractional part of `log2(count)` scaled by `2^frac_bits`,
/// for non-power-of-two `count`.
///
/// Digit recurrence with rigorous interval arithmetic: the mantissa is kept
/// in `[1,2)` as a fixed-point interval, squared once per output bit, with
/// directed rounding on both ends. Precision is raised until every output
/// bit is unambiguous; this terminates because `log2(count)` is irrational
/// for non-powers-of-two, so it never sits exactly on the dyadic grid.
fn log2_frac_bits_ceil(count: u64, frac_bits: u32) -> BigUint {
    let int_part = 63 - count.leading_zeros();
    let mut precision: u32 = frac_bits + 64;
    'retry: loop {
        // lo/hi are P-bit fixed-point mantissas in [1,2): value = m / 2^(P-1).
        let p = precision;
        let mut lo = BigUint::from(count) << (p - 1 - int_part);
        let mut hi = lo.clone();
        let one_shift = BigUint::one() << (p - 1);
        let two_shift = BigUint::one() << p;
        let mut bits = BigUint::zero();
        for _ in 0..frac_bits {
            // Square, then renormalize back to P bits with directed rounding.
            lo = (&lo * &lo) >> (p - 1);
            hi = ((&hi * &hi) >> (p - 1)) + 1u32;
            let lo_ge_2 = lo >= two_shift;
            let hi_ge_2 = hi >= two_shift;
            if lo_ge_2 != hi_ge_2 {
                precision += 64;
                continue 'retry;
            }
            bits <<= 1;
            if lo_ge_2 {
                bits += 1u32;
                lo >>= 1;
                hi >>= 1;
            }
            debug_assert!(lo >= one_shift);
        }
        // `bits` is floor(frac * 2^frac_bits); the exact value is strictly
        // greater (irrational), so the ceiling is floor + 1.
        return bits + 1u32;
    }
}

/// Exact comparison of an integer count against `2^bound` for a rational
/// `bound`: returns the ordering of `count` versus `2^bound`.
///
/// Powers of two compare by exponent; otherwise `log2(count)` is bracketed
/// to increasing dyadic precision until the comparison with the rational
/// bound is unambiguous (always, since `log2` of a non-power-of-two
/// integer is irrational).
pub fn cmp_count_vs_pow2(count: u64, bound: &Rational) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    if count == 0 {
        return Ordering::Less;
    }
    if count.is_power_of_two() {
        let k = rat_int(count.trailing_zeros() as i64);
        return k.cmp(bound);
    }
    if bound.is_negative() {
        return Ordering::Greater;
    }
    let mut frac_bits = 32u32;
    loop {
        let floor_scaled = log2_floor_scaled(count, frac_bits);
        let denom = BigInt::one() << frac_bits;
        let lo = Rational::new(floor_scaled.clone().into(), denom.clone());
        let hi = Rational::new(BigInt::from(floor_scaled) + BigInt::one(), denom);
        if hi < *bound {
            return Ordering::Less;
        }
        if lo > *bound {
            return Ordering::Greater;
        }
        frac_bits += 32;
    }
}

/// `floor(log2(count) · 2^frac_bits)` for non-power-of-two `count`,
/// computed rigorously.
fn log2_floor_scaled(count: u64, frac_bits: u32) -> BigUint {
    let int_part = 63 - count.leading_zeros() as u64;
    let frac = log2_frac_bits_ceil(count, frac_bits) - BigUint::one();
    (BigUint::from(int_part) << frac_bits) + frac
}

/// True when `count <= 2^bound`, exactly.
pub fn count_within_pow2(count: u64, bound: &Rational) -> bool {
    cmp_count_vs_pow2(count, bound) != std::cmp::Ordering::Greater
}

/// Least common multiple of the denominators of all given rationals;
/// `1` for an empty iterator.
pub fn common_denominator<'a, I: IntoIterator<Item = &'a Rational>>(entries: I) -> BigInt {
    let mut d = BigInt::one();
    for r in entries {
        d = d.lcm(r.denom());
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;
    use proptest::prelude::*;

    #[test]
    fn powers_of_two_are_exact() {
        assert_eq!(log2_dyadic(8, 32).unwrap().0, rat_int(3));
        assert_eq!(log2_dyadic(1, 32).unwrap().0, rat_int(0));
        assert_eq!(log2_dyadic(1 << 20, 8).unwrap().0, rat_int(20));
    }

    #[test]
    fn zero_count_is_domain_error() {
        assert!(log2_dyadic(0, 32).is_err());
    }

    #[test]
    fn log2_of_three_at_eight_bits() {
        // Smallest 8-fraction-bit dyadic >= log2(3); oracle below re-derives
        // it from exact integer powers.
        let got = log2_dyadic(3, 8).unwrap().0;
        assert_eq!(got, rat(406, 256));
        // 2^406 >= 3^256 > 2^405, checked exactly.
        let three_256 = BigUint::from(3u32).pow(256);
        assert!(BigUint::one() << 406u32 >= three_256);
        assert!(BigUint::one() << 405u32 < three_256);
    }

    #[test]
    fn count_vs_pow2_comparisons() {
        use std::cmp::Ordering::*;
        assert_eq!(cmp_count_vs_pow2(8, &rat_int(3)), Equal);
        assert_eq!(cmp_count_vs_pow2(9, &rat_int(3)), Greater);
        assert_eq!(cmp_count_vs_pow2(8, &rat(7, 2)), Less); // 8 < 2^3.5
        assert_eq!(cmp_count_vs_pow2(12, &rat(7, 2)), Greater); // 12 > 11.31
    }

    proptest! {
        // log2_dyadic is an upper bound and tight to within one grid step:
        // 2^k >= c^(2^f) > 2^(k-1) where the result is k / 2^f.
        #[test]
        fn dyadic_is_least_upper_bound(c in 2u64..100_000, f in 1u32..10) {
            let r = log2_dyadic(c, f).unwrap().0;
            let scaled = (&r * Rational::from_u64(1u64 << f).unwrap())
                .to_integer()
                .to_biguint()
                .unwrap();
            let k = scaled.to_u64().unwrap();
            let c_pow = BigUint::from(c).pow(1u32 << f);
            prop_assert!(BigUint::one() << k >= c_pow);
            if !c.is_power_of_two() {
                prop_assert!(BigUint::one() << (k - 1) < c_pow);
            }
        }

        #[test]
        fn dyadic_is_monotone(c in 1u64..10_000) {
            let a = log2_dyadic(c, 16).unwrap().0;
            let b = log2_dyadic(c + 1, 16).unwrap().0;
            prop_assert!(a < b);
        }

        #[test]
        fn count_within_matches_f64_when_clear(c in 1u64..1_000_000, num in 0i64..40, den in 1i64..8) {
            let bound = rat(num, den);
            let approx = (c as f64).log2() - (num as f64 / den as f64);
            // Only cross-check against floating point far from the boundary.
            if approx.abs() > 1e-6 {
                prop_assert_eq!(count_within_pow2(c, &bound), approx < 0.0);
            }
        }
    }
}
