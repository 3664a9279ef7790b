use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{AlgebraError, Poly, Result};

/// Largest ring the exhaustive oracles enumerate unless told otherwise.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

/// The finite commutative ring `(Z/q)[x]/(f)` with `f` monic of degree `d >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuotientRingSpec {
    q: u64,
    /// Coefficients of `f`, lowest first, reduced into `[0, q)`; the last is 1.
    f: Vec<u64>,
}

/// Element of a [`QuotientRingSpec`]: `d` coefficients, each in `[0, q)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RingElement {
    coeffs: Vec<u64>,
}

impl RingElement {
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<u64> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

impl QuotientRingSpec {
    pub fn new(q: u64, f: &Poly) -> Result<Self> {
        if q < 2 {
            return Err(AlgebraError::InvalidModulus(q));
        }
        let qb = BigInt::from(q);
        let reduced: Vec<u64> = f
            .coeffs()
            .iter()
            .map(|c| c.mod_floor(&qb).to_u64().expect("reduced below q"))
            .collect();
        match (reduced.len(), reduced.last()) {
            (len, Some(1)) if len >= 2 => Ok(QuotientRingSpec { q, f: reduced }),
            _ => Err(AlgebraError::NotMonic),
        }
    }

    /// `(Z/q)[x]/(f)` from the low coefficients of a monic `f` (leading 1 implied).
    pub fn from_monic(q: u64, low: &[i64]) -> Result<Self> {
        let mut c: Vec<i64> = low.to_vec();
        c.push(1);
        Self::new(q, &Poly::from_i64(&c))
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn degree(&self) -> usize {
        self.f.len() - 1
    }

    pub fn quotient_poly(&self) -> Poly {
        Poly::new(self.f.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// `q^d`, exact.
    pub fn cardinality(&self) -> BigInt {
        num_traits::pow(BigInt::from(self.q), self.degree())
    }

    /// `q^d` if it fits in a `u64`.
    pub fn cardinality_u64(&self) -> Option<u64> {
        self.q.checked_pow(self.degree() as u32)
    }

    pub fn zero(&self) -> RingElement {
        RingElement { coeffs: vec![0; self.degree()] }
    }

    pub fn one(&self) -> RingElement {
        self.constant(1)
    }

    pub fn x(&self) -> RingElement {
        self.element_from_poly(&Poly::x())
    }

    pub fn constant(&self, c: i64) -> RingElement {
        self.element_from_i64(&[c])
    }

    /// The `i`-th standard additive generator `x^i`, `i < d`.
    pub fn basis_element(&self, i: usize) -> RingElement {
        let mut coeffs = vec![0; self.degree()];
        coeffs[i] = 1;
        RingElement { coeffs }
    }

    pub fn element_from_i64(&self, coeffs: &[i64]) -> RingElement {
        self.element_from_poly(&Poly::from_i64(coeffs))
    }

    /// Reduction of an integer polynomial into the ring.
    pub fn element_from_poly(&self, p: &Poly) -> RingElement {
        let qb = BigInt::from(self.q);
        let raw: Vec<u64> = p
            .coeffs()
            .iter()
            .map(|c| c.mod_floor(&qb).to_u64().expect("reduced below q"))
            .collect();
        RingElement { coeffs: self.reduce(raw) }
    }

    /// Accepts `coeffs` only if it already is a reduced element of this ring.
    pub fn element(&self, coeffs: Vec<u64>) -> Result<RingElement> {
        let e = RingElement { coeffs };
        self.check(&e)?;
        Ok(e)
    }

    pub fn to_poly(&self, u: &RingElement) -> Poly {
        Poly::new(u.coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn contains(&self, u: &RingElement) -> bool {
        u.coeffs.len() == self.degree() && u.coeffs.iter().all(|&c| c < self.q)
    }

    fn check(&self, u: &RingElement) -> Result<()> {
        if self.contains(u) {
            Ok(())
        } else {
            Err(AlgebraError::RingMismatch { ring: self.to_string() })
        }
    }

    fn mulmod(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.q as u128) as u64
    }

    fn addmod(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.q as u128) as u64
    }

    /// Reduces a coefficient vector (entries already in `[0, q)`) modulo `f`.
    fn reduce(&self, mut raw: Vec<u64>) -> Vec<u64> {
        let d = self.degree();
        for i in (d..raw.len()).rev() {
            let c = raw[i];
            if c == 0 {
                continue;
            }
            // x^i = x^{i-d} * x^d and x^d = -(f_0 + ... + f_{d-1} x^{d-1})
            for j in 0..d {
                let t = self.mulmod(c, self.f[j]);
                raw[i - d + j] = self.addmod(raw[i - d + j], self.q - t);
            }
            raw[i] = 0;
        }
        raw.resize(d, 0);
        raw
    }

    pub(crate) fn mul_raw(&self, u: &[u64], v: &[u64]) -> Vec<u64> {
        let d = self.degree();
        let mut out = vec![0u64; 2 * d - 1];
        for (i, &a) in u.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in v.iter().enumerate() {
                out[i + j] = self.addmod(out[i + j], self.mulmod(a, b));
            }
        }
        self.reduce(out)
    }

    pub(crate) fn pow_raw(&self, u: &[u64], mut e: u64) -> Vec<u64> {
        let mut base = u.to_vec();
        let mut acc = self.one().coeffs;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_raw(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul_raw(&base, &base);
            }
        }
        acc
    }

    pub fn add(&self, u: &RingElement, v: &RingElement) -> Result<RingElement> {
        self.check(u)?;
        self.check(v)?;
        let coeffs = u
            .coeffs
            .iter()
            .zip(&v.coeffs)
            .map(|(&a, &b)| self.addmod(a, b))
            .collect();
        Ok(RingElement { coeffs })
    }

    pub fn neg(&self, u: &RingElement) -> Result<RingElement> {
        self.check(u)?;
        let coeffs = u.coeffs.iter().map(|&a| (self.q - a) % self.q).collect();
        Ok(RingElement { coeffs })
    }

    pub fn sub(&self, u: &RingElement, v: &RingElement) -> Result<RingElement> {
        self.add(u, &self.neg(v)?)
    }

    /// Integer multiple `c * u`.
    pub fn scale(&self, c: u64, u: &RingElement) -> Result<RingElement> {
        self.check(u)?;
        let c = c % self.q;
        let coeffs = u.coeffs.iter().map(|&a| self.mulmod(a, c)).collect();
        Ok(RingElement { coeffs })
    }

    pub fn mul(&self, u: &RingElement, v: &RingElement) -> Result<RingElement> {
        self.check(u)?;
        self.check(v)?;
        Ok(RingElement { coeffs: self.mul_raw(&u.coeffs, &v.coeffs) })
    }

    /// `u^e` by square-and-multiply; `u^0 = 1`.
    pub fn pow(&self, u: &RingElement, e: u64) -> Result<RingElement> {
        self.check(u)?;
        Ok(RingElement { coeffs: self.pow_raw(&u.coeffs, e) })
    }

    /// Every element exactly once, lexicographic in `(c_{d-1}, ..., c_0)`.
    pub fn elements(&self, cap: u64) -> Result<Elements<'_>> {
        match self.cardinality_u64() {
            Some(n) if n <= cap => Ok(Elements { ring: self, next: 0, total: n }),
            _ => Err(AlgebraError::CapExceeded { size: self.cardinality().to_string(), cap }),
        }
    }

    /// The element with enumeration index `n` (base-`q` digits, `c_0` least significant).
    pub fn element_at(&self, mut n: u64) -> RingElement {
        let coeffs = (0..self.degree())
            .map(|_| {
                let c = n % self.q;
                n /= self.q;
                c
            })
            .collect();
        RingElement { coeffs }
    }

    /// Whether every coefficient of `u` vanishes; works for any `q`.
    pub fn is_zero(&self, u: &RingElement) -> bool {
        u.coeffs.iter().all(Zero::is_zero)
    }
}

/// Iterator returned by [`QuotientRingSpec::elements`].
pub struct Elements<'a> {
    ring: &'a QuotientRingSpec,
    next: u64,
    total: u64,
}

impl Iterator for Elements<'_> {
    type Item = RingElement;

    fn next(&mut self) -> Option<RingElement> {
        if self.next >= self.total {
            return None;
        }
        let e = self.ring.element_at(self.next);
        self.next += 1;
        Some(e)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.total - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for Elements<'_> {}

impl fmt::Display for QuotientRingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z/{}[x]/({})", self.q, self.quotient_poly())
    }
}
