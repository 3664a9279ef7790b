//! Exact arithmetic: arbitrary-precision integers, integer polynomials,
//! finite quotient rings `(Z/q)[x]/(f)` and finite fields `F_{p^j}`.

mod field;
mod parse;
mod poly;
mod ring;

pub use field::{is_prime, FiniteFieldSpec};
pub use parse::{parse_poly, parse_ring};
pub use poly::{expand_power, Poly};
pub use ring::{Elements, QuotientRingSpec, RingElement, DEFAULT_ENUMERATION_CAP};

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Zero};
use thiserror::Error;

/// Arbitrary-precision signed integer used for every exact quantity.
pub type Integer = BigInt;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("element does not belong to ring {ring}")]
    RingMismatch { ring: String },
    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(u64),
    #[error("quotient polynomial must be monic of degree >= 1")]
    NotMonic,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("polynomial {poly} is reducible over F_{p}")]
    Reducible { poly: String, p: u64 },
    #[error("no monic irreducible of degree {degree} found over F_{p}")]
    NoIrreducible { p: u64, degree: usize },
    #[error("ring has {size} elements, over the enumeration cap of {cap}")]
    CapExceeded { size: String, cap: u64 },
    #[error("p-adic valuation of zero is undefined")]
    ZeroValuation,
    #[error("operation requires characteristic 2, field has characteristic {0}")]
    NotCharacteristicTwo(u64),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, AlgebraError>;

/// `v_p(n)`: the largest `e` with `p^e | n`.
pub fn vp(n: &BigInt, p: u64) -> Result<u32> {
    if n.is_zero() {
        return Err(AlgebraError::ZeroValuation);
    }
    if p < 2 {
        return Err(AlgebraError::NotPrime(p));
    }
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut e = 0;
    loop {
        let (quo, rem) = n.div_rem(&p);
        if !rem.is_zero() {
            return Ok(e);
        }
        n = quo;
        e += 1;
    }
}

/// `v_p(n)` on machine integers.
pub fn vp_u64(mut n: u64, p: u64) -> u32 {
    debug_assert!(n != 0 && p >= 2);
    let mut e = 0;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    e
}

/// Exact binomial coefficient; zero when `j > n`.
pub fn binomial(n: u64, j: u64) -> BigInt {
    if j > n {
        return BigInt::zero();
    }
    let j = j.min(n - j);
    let mut acc = BigInt::one();
    for i in 0..j {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}
