//! Exact evaluation of the cross-section counting formulas.
//!
//! Everything is big-integer or big-rational arithmetic; the closed-form
//! count contains 1/i! terms whose integrality is itself evidence, so
//! floating point is never used.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::green::GreenRelation;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CountingError {
    #[error("k = {k} out of range 1..={n}")]
    KOutOfRange { k: u64, n: u64 },
    #[error("n = {n} exceeds the supported bound {bound}")]
    NOutOfRange { n: u64, bound: u64 },
}

pub fn factorial(n: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 2..=n {
        acc *= i;
    }
    acc
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Number of partitions of an n-set into k linearly ordered blocks:
/// n!/k! · C(n−1, k−1).
pub fn lah(n: u64, k: u64) -> Result<BigUint, CountingError> {
    if k == 0 || k > n {
        return Err(CountingError::KOutOfRange { k, n });
    }
    Ok(factorial(n) / factorial(k) * binomial(n - 1, k - 1))
}

/// Σ_k lah(n, k): the number of ordered partitions of an n-set.
pub fn sum_lah(n: u64) -> BigUint {
    (1..=n).map(|k| lah(n, k).expect("k in range")).sum()
}

/// Exact value of the closed-form cross-section count for IS_n ≀ IS_n:
///
///   Σ_{k=1}^{n} (n!)^{n+1}/k! · C(n−1, k−1) · ( Σ_{i=1}^{n} 1/i! · C(n−1, i−1) )^k
///
/// evaluated as a rational; whether it is an integer is reported, never
/// assumed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormulaValue {
    pub value: BigRational,
    pub integral: bool,
}

impl FormulaValue {
    /// Reduced "p/q" (or plain "p" when integral) decimal form.
    pub fn display(&self) -> String {
        self.value.to_string()
    }

    /// The integer value when integral.
    pub fn as_integer(&self) -> Option<BigUint> {
        if self.integral && !self.value.numer().is_negative() {
            Some(self.value.numer().magnitude().clone())
        } else {
            None
        }
    }
}

const FORMULA_N_BOUND: u64 = 8;

pub fn count_formula_paper(n: u64) -> Result<FormulaValue, CountingError> {
    if n == 0 || n > FORMULA_N_BOUND {
        return Err(CountingError::NOutOfRange {
            n,
            bound: FORMULA_N_BOUND,
        });
    }
    let rat = |x: BigUint| BigRational::from_integer(BigInt::from(x));

    let inner_sum: BigRational = (1..=n)
        .map(|i| rat(binomial(n - 1, i - 1)) / rat(factorial(i)))
        .sum();

    let nf_pow = {
        let nf = factorial(n);
        let mut acc = BigUint::one();
        for _ in 0..=n {
            acc *= &nf;
        }
        acc
    };

    let mut total = BigRational::zero();
    let mut inner_pow = BigRational::one();
    for k in 1..=n {
        inner_pow *= &inner_sum;
        let coefficient = rat(nf_pow.clone()) / rat(factorial(k)) * rat(binomial(n - 1, k - 1));
        total += coefficient * &inner_pow;
    }

    let integral = total.denom().is_one();
    Ok(FormulaValue {
        value: total,
        integral,
    })
}

/// Number of standard product-of-wreaths constructions: one ordered
/// partition of the top level and one inner cross-section per block,
/// Σ_k lah(n,k) · inner_count^k. Distinctness of the resulting member sets
/// is not assumed here; the search compares against brute force.
pub fn count_structural(n: u64, inner_count: &BigUint) -> Result<BigUint, CountingError> {
    if n == 0 || n > FORMULA_N_BOUND {
        return Err(CountingError::NOutOfRange {
            n,
            bound: FORMULA_N_BOUND,
        });
    }
    let mut total = BigUint::zero();
    for k in 1..=n {
        total += lah(n, k)? * inner_count.pow(k as u32);
    }
    Ok(total)
}

/// The arbitration report: brute-force count against both closed forms.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CountReport {
    pub n: u8,
    pub relation: GreenRelation,
    /// Number of distinct cross-sections found by exhaustive search.
    pub count: u64,
    pub formula_paper: FormulaPaperEntry,
    /// Number of standard constructions (decimal).
    pub structural: String,
    pub matches_formula: bool,
    pub matches_structural: bool,
    pub all_isomorphic_to_standard: bool,
    pub elapsed_ms: u128,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FormulaPaperEntry {
    /// Reduced rational, e.g. "21" or "35/2".
    pub value: String,
    pub integral: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lah_small_values() {
        assert_eq!(lah(2, 1).unwrap(), BigUint::from(2u32));
        assert_eq!(lah(2, 2).unwrap(), BigUint::from(1u32));
        assert_eq!(lah(3, 2).unwrap(), BigUint::from(6u32));
        assert_eq!(lah(1, 1).unwrap(), BigUint::from(1u32));
        assert!(lah(3, 0).is_err());
        assert!(lah(3, 4).is_err());
    }

    #[test]
    fn ordered_partition_totals() {
        // 1, 3, 13, 73, 501, 4051 for n = 1..6.
        let expected = [1u32, 3, 13, 73, 501, 4051];
        for (i, &e) in expected.iter().enumerate() {
            assert_eq!(sum_lah(i as u64 + 1), BigUint::from(e));
        }
    }

    #[test]
    fn formula_small_values() {
        let f1 = count_formula_paper(1).unwrap();
        assert!(f1.integral);
        assert_eq!(f1.as_integer().unwrap(), BigUint::from(1u32));

        // 8·1·(3/2) + 4·1·(3/2)² = 12 + 9 = 21.
        let f2 = count_formula_paper(2).unwrap();
        assert!(f2.integral);
        assert_eq!(f2.as_integer().unwrap(), BigUint::from(21u32));
        assert_eq!(f2.display(), "21");
    }

    #[test]
    fn formula_integrality_reported_up_to_8() {
        for n in 1..=8u64 {
            let f = count_formula_paper(n).unwrap();
            // The verdict must be consistent with the rational itself.
            assert_eq!(f.integral, f.value.denom().is_one(), "n = {n}");
        }
        assert!(count_formula_paper(9).is_err());
    }

    #[test]
    fn structural_counts() {
        assert_eq!(
            count_structural(2, &BigUint::from(3u32)).unwrap(),
            BigUint::from(15u32)
        );
        assert_eq!(
            count_structural(1, &BigUint::from(7u32)).unwrap(),
            BigUint::from(7u32)
        );
        // 6·13 + 6·13² + 1·13³ = 3289.
        assert_eq!(
            count_structural(3, &BigUint::from(13u32)).unwrap(),
            BigUint::from(3289u32)
        );
    }

    #[test]
    fn report_serializes_with_documented_keys() {
        let report = CountReport {
            n: 2,
            relation: GreenRelation::R,
            count: 21,
            formula_paper: FormulaPaperEntry {
                value: "21".to_string(),
                integral: true,
            },
            structural: "15".to_string(),
            matches_formula: true,
            matches_structural: false,
            all_isomorphic_to_standard: true,
            elapsed_ms: 3,
        };
        let v = serde_json::to_value(&report).unwrap();
        assert_eq!(v["n"], 2);
        assert_eq!(v["relation"], "R");
        assert_eq!(v["count"], 21);
        assert_eq!(v["formula_paper"]["value"], "21");
        assert_eq!(v["formula_paper"]["integral"], true);
        assert_eq!(v["structural"], "15");
        let back: CountReport = serde_json::from_value(v).unwrap();
        assert_eq!(back, report);
    }
}
