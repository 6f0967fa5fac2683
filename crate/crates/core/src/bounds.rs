//! The closed-form subellipticity lower bound
//! `ε(s) = 1 / (2^{(4s²−1)s+3} · s²(4s²−1)⁴ · C(8s+1, 8s−1))`,
//! evaluated exactly with its factors kept apart.

use num_bigint::{BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundError {
    #[error("the multiplicity s must be at least 1")]
    ZeroMultiplicity,
    #[error("s = {0} is too large: the power-of-two exponent overflows")]
    TooLarge(u64),
}

/// Largest power-of-two exponent printed in full decimal.
pub const MAX_PRINTED_EXPONENT: u64 = 1 << 16;

/// Factor breakdown of `ε(s)`.
///
/// The power of two is kept as its exponent; it is only expanded on request,
/// since for `s` in the thousands it has trillions of bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundBreakdown {
    pub s: u64,
    /// `(4s² − 1)s + 3`
    pub exponent: u64,
    /// `s²`
    pub s_squared: BigUint,
    /// `(4s² − 1)⁴`
    pub quartic: BigUint,
    /// `s²(4s² − 1)⁴`
    pub poly_factor: BigUint,
    /// `C(8s + 1, 8s − 1)`
    pub binom_factor: BigUint,
}

impl BoundBreakdown {
    /// `2^exponent`
    pub fn power_factor(&self) -> BigUint {
        BigUint::one() << self.exponent
    }

    /// `2^E · s²(4s²−1)⁴ · C(8s+1, 8s−1)`
    pub fn denominator(&self) -> BigUint {
        self.power_factor() * &self.poly_factor * &self.binom_factor
    }

    /// `ε(s)` as an exact rational.
    pub fn epsilon(&self) -> BigRational {
        BigRational::new(One::one(), self.denominator().into())
    }

    /// Exact test of `achieved ≥ ε(s)` without expanding `2^E` when it is
    /// larger than the achieved value's denominator.
    pub fn is_met_by(&self, achieved: &BigRational) -> bool {
        if achieved.numer().sign() != Sign::Plus {
            return false;
        }
        let p = achieved.numer().magnitude();
        let q = achieved.denom().magnitude();
        if self.exponent >= q.bits() {
            return true;
        }
        (p * &self.poly_factor * &self.binom_factor) << self.exponent >= *q
    }

    /// `ε(s)` as `1/<digits>`, or in factored form when the power of two is too
    /// large to print.
    pub fn epsilon_string(&self) -> String {
        if self.exponent <= MAX_PRINTED_EXPONENT {
            rational_string(&self.epsilon())
        } else {
            format!("1/(2^{}*{}*{})", self.exponent, self.poly_factor, self.binom_factor)
        }
    }

    pub fn to_serializable(&self) -> BoundReport {
        let power_factor = if self.exponent <= MAX_PRINTED_EXPONENT {
            self.power_factor().to_string()
        } else {
            format!("2^{}", self.exponent)
        };
        BoundReport {
            s: self.s,
            exponent: self.exponent,
            power_factor,
            s_squared: self.s_squared.to_string(),
            quartic: self.quartic.to_string(),
            poly_factor: self.poly_factor.to_string(),
            binom_factor: self.binom_factor.to_string(),
            epsilon: self.epsilon_string(),
        }
    }
}

/// Serialized form: every number as an exact decimal or `p/q` string.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct BoundReport {
    pub s: u64,
    pub exponent: u64,
    pub power_factor: String,
    pub s_squared: String,
    pub quartic: String,
    pub poly_factor: String,
    pub binom_factor: String,
    pub epsilon: String,
}

/// Exact `numerator/denominator` string (integers print without `/1`).
pub fn rational_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `C(n, k)`, zero when `k > n`.
pub fn binom_big(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for j in 0..k {
        // acc = C(n, j) before the step; the division is exact
        acc = acc * BigUint::from(n - j) / BigUint::from(j + 1);
    }
    acc
}

pub fn bound_epsilon(s: u64) -> Result<BoundBreakdown, BoundError> {
    if s == 0 {
        return Err(BoundError::ZeroMultiplicity);
    }
    let exponent = s
        .checked_mul(s)
        .and_then(|x| x.checked_mul(4))
        .and_then(|x| x.checked_sub(1))
        .and_then(|x| x.checked_mul(s))
        .and_then(|x| x.checked_add(3))
        .ok_or(BoundError::TooLarge(s))?;
    let sb = BigUint::from(s);
    let s_squared = &sb * &sb;
    let quartic = (BigUint::from(4u32) * &s_squared - BigUint::one()).pow(4);
    let poly_factor = &s_squared * &quartic;
    let binom_factor = binom_big(8 * s + 1, 8 * s - 1);
    Ok(BoundBreakdown {
        s,
        exponent,
        s_squared,
        quartic,
        poly_factor,
        binom_factor,
    })
}
