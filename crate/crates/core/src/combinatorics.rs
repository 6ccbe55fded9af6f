//! Arbitrary-precision binomial coefficients.
//!
//! `C(a, b)` is taken to be zero whenever `b < 0`, `b > a` or `a < 0`, which
//! lets boundary support points fall out of the closed-form mass functions
//! without case analysis.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// `C(a, b)` with the zero convention outside `0 <= b <= a`.
pub fn binomial(a: i64, b: i64) -> BigUint {
    if a < 0 || b < 0 || b > a {
        return BigUint::zero();
    }
    let k = b.min(a - b) as u64;
    let a = a as u64;
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= a - i;
        acc /= i + 1;
    }
    acc
}

/// `C(a, b)` saturating at `u64::MAX`, for capacity checks.
pub fn binomial_saturating(a: u64, b: u64) -> u64 {
    if b > a {
        return 0;
    }
    binomial(a as i64, b as i64).to_u64().unwrap_or(u64::MAX)
}

/// Pascal's triangle up to a fixed row, for mass functions that need many
/// coefficients with small arguments.
#[derive(Debug, Clone)]
pub struct BinomialTable {
    rows: Vec<Vec<BigUint>>,
}

impl BinomialTable {
    /// Builds rows `0..=max_a`.
    pub fn new(max_a: usize) -> Self {
        let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(max_a + 1);
        rows.push(alloc::vec![BigUint::one()]);
        for a in 1..=max_a {
            let prev = &rows[a - 1];
            let mut row = Vec::with_capacity(a + 1);
            row.push(BigUint::one());
            for b in 1..a {
                row.push(&prev[b - 1] + &prev[b]);
            }
            row.push(BigUint::one());
            rows.push(row);
        }
        Self { rows }
    }

    /// `C(a, b)` with the zero convention; arguments beyond the table fall
    /// back to direct computation.
    pub fn get(&self, a: i64, b: i64) -> BigUint {
        if a < 0 || b < 0 || b > a {
            return BigUint::zero();
        }
        match self.rows.get(a as usize) {
            Some(row) => row[b as usize].clone(),
            None => binomial(a, b),
        }
    }

    /// Signed `C(a, b)`.
    pub fn get_int(&self, a: i64, b: i64) -> BigInt {
        BigInt::from(self.get(a, b))
    }
}

/// `num / den` as an exact rational.
pub fn ratio(num: BigUint, den: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den.clone()))
}

/// Nearest `f64` to an exact rational.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(binomial(10, 5), BigUint::from(252u32));
        assert_eq!(binomial(9, 4), BigUint::from(126u32));
        assert_eq!(binomial(0, 0), BigUint::one());
        assert_eq!(binomial(5, 6), BigUint::zero());
        assert_eq!(binomial(5, -1), BigUint::zero());
        assert_eq!(binomial(-1, 0), BigUint::zero());
    }

    #[test]
    fn large_value_does_not_overflow() {
        let c = binomial(400, 200);
        assert!(c.bits() > 390);
        assert_eq!(c, binomial(400, 200) * 1u32);
        assert_eq!(binomial_saturating(400, 200), u64::MAX);
        assert_eq!(binomial_saturating(14, 6), 3003);
    }

    #[test]
    fn table_matches_direct() {
        let t = BinomialTable::new(40);
        for a in -1..45 {
            for b in -1..47 {
                assert_eq!(t.get(a, b), binomial(a, b), "C({a},{b})");
            }
        }
    }

    #[test]
    fn rational_conversion() {
        let r = ratio(BigUint::from(1u32), &binomial(10, 5));
        assert!((rational_to_f64(&r) - 1.0 / 252.0).abs() < 1e-18);
    }
}
