//! Closed form `m(k) = k * a(k) * b(k)` with
//! `a(k) = prod_{p | k} p^alpha_k(p)` and `b(k) = prod_{p < k, p !| k} p^beta_k(p)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use crate::algebra::{is_prime, vp_u64};

/// Largest `k` accepted by [`profile`].
pub const MAX_K: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("k must be at least 1")]
    ZeroK,
    #[error("k = {0} is above the supported maximum {MAX_K}")]
    KTooLarge(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("alpha_k(p) needs p | k (k = {k}, p = {p})")]
    NotADivisor { k: u64, p: u64 },
    #[error("beta_k(p) needs p < k and p !| k (k = {k}, p = {p})")]
    BetaOutOfRange { k: u64, p: u64 },
}

/// Which rule to use for `alpha_k(2)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum FormulaVariant {
    /// `alpha_k(2) = 2` exactly when `6 | k`.
    #[default]
    Corrected,
    /// The 1976 rule: `alpha_k(2) = 2` whenever `2^j - 1 | k` for some `j >= 2`.
    /// Wrong from `k = 14` on; kept only to demonstrate the discrepancy.
    Legacy1976,
}

/// A divisor of `k` of the form `(p^{m r} - 1)/(p^r - 1) = 1 + p^r + ... + p^{(m-1) r}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepunitWitness {
    pub p: u64,
    pub r: u32,
    pub m_exp: u32,
    pub value: u64,
}

impl RepunitWitness {
    /// Degree of the field extension `F_{p^{m r}}` used to witness `beta_k(p) = 1`.
    pub fn field_degree(&self) -> usize {
        (self.m_exp * self.r) as usize
    }

    /// `(p^{m r} - 1)/(p^r - 1)` recomputed in exact arithmetic.
    pub fn exact_value(&self) -> BigInt {
        let p = BigInt::from(self.p);
        let num = num_traits::pow(p.clone(), self.field_degree()) - 1;
        let den = num_traits::pow(p, self.r as usize) - 1;
        num / den
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorProfile {
    pub k: u64,
    /// `alpha_k(p)` for every prime `p | k`.
    pub alpha: BTreeMap<u64, u32>,
    /// Primes `p < k`, `p !| k` with `beta_k(p) = 1`, with their least witness.
    /// Primes absent from the map have `beta_k(p) = 0`.
    pub beta: BTreeMap<u64, RepunitWitness>,
    pub a: BigInt,
    pub b: BigInt,
    pub m: BigInt,
    pub variant: FormulaVariant,
}

impl FactorProfile {
    pub fn beta_exponent(&self, p: u64) -> u32 {
        u32::from(self.beta.contains_key(&p))
    }

    pub fn m_over_k(&self) -> BigInt {
        &self.a * &self.b
    }

    /// Prime powers of `a(k)` in increasing prime order, e.g. `[4, 3]` for `k = 6`.
    pub fn a_factors(&self) -> Vec<u64> {
        self.alpha
            .iter()
            .filter(|(_, &e)| e > 0)
            .map(|(&p, &e)| p.pow(e))
            .collect()
    }

    pub fn b_factors(&self) -> Vec<u64> {
        self.beta.keys().copied().collect()
    }

    /// `v_p(m(k))`.
    pub fn valuation(&self, p: u64) -> u32 {
        if self.k % p == 0 {
            vp_u64(self.k, p) + self.alpha.get(&p).copied().unwrap_or(0)
        } else {
            self.beta_exponent(p)
        }
    }

    /// Every prime dividing `m(k)`, ascending.
    pub fn primes(&self) -> Vec<u64> {
        let mut ps: Vec<u64> = self.alpha.keys().chain(self.beta.keys()).copied().collect();
        ps.sort_unstable();
        ps
    }
}

/// Primes below `n` by sieve.
pub fn primes_below(n: u64) -> Vec<u64> {
    if n < 3 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n];
    let mut out = Vec::new();
    for i in 2..n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j < n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Prime factorization by trial division.
pub fn factor(mut n: u64) -> BTreeMap<u64, u32> {
    let mut out = BTreeMap::new();
    let mut d = 2u64;
    while d * d <= n {
        while n % d == 0 {
            *out.entry(d).or_insert(0) += 1;
            n /= d;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        *out.entry(n).or_insert(0) += 1;
    }
    out
}

fn check_k(k: u64) -> Result<(), FormulaError> {
    match k {
        0 => Err(FormulaError::ZeroK),
        k if k > MAX_K => Err(FormulaError::KTooLarge(k)),
        _ => Ok(()),
    }
}

pub fn alpha(k: u64, p: u64) -> Result<u32, FormulaError> {
    alpha_with(k, p, FormulaVariant::Corrected)
}

pub fn alpha_with(k: u64, p: u64, variant: FormulaVariant) -> Result<u32, FormulaError> {
    check_k(k)?;
    if !is_prime(p) {
        return Err(FormulaError::NotPrime(p));
    }
    if k % p != 0 {
        return Err(FormulaError::NotADivisor { k, p });
    }
    if p != 2 {
        return Ok(u32::from(k > p));
    }
    if k == 2 {
        return Ok(0);
    }
    let doubled = match variant {
        FormulaVariant::Corrected => k % 6 == 0,
        FormulaVariant::Legacy1976 => {
            // some 2^j - 1 with j >= 2 divides k
            (2..64).map(|j| (1u64 << j) - 1).take_while(|&d| d <= k).any(|d| k % d == 0)
        }
    };
    Ok(if doubled { 2 } else { 1 })
}

/// `beta_k(p)` with the least `(r, m)` repunit witness when it is 1.
pub fn beta(k: u64, p: u64) -> Result<(u32, Option<RepunitWitness>), FormulaError> {
    check_k(k)?;
    if !is_prime(p) {
        return Err(FormulaError::NotPrime(p));
    }
    if p >= k || k % p == 0 {
        return Err(FormulaError::BetaOutOfRange { k, p });
    }
    Ok(match repunit_witness(k, p) {
        Some(w) => (1, Some(w)),
        None => (0, None),
    })
}

fn repunit_witness(k: u64, p: u64) -> Option<RepunitWitness> {
    // the smallest repunit for a given r is p^r + 1, which must be <= k
    let mut pr = p;
    let mut r = 1u32;
    while pr + 1 <= k {
        let mut value = 1 + pr;
        let mut m_exp = 2u32;
        while value <= k {
            if k % value == 0 {
                return Some(RepunitWitness { p, r, m_exp, value });
            }
            value = value * pr + 1;
            m_exp += 1;
        }
        r += 1;
        pr = match pr.checked_mul(p) {
            Some(v) => v,
            None => break,
        };
    }
    None
}

pub fn profile(k: u64) -> Result<FactorProfile, FormulaError> {
    profile_with(k, FormulaVariant::Corrected)
}

pub fn profile_with(k: u64, variant: FormulaVariant) -> Result<FactorProfile, FormulaError> {
    check_k(k)?;
    let mut alpha_map = BTreeMap::new();
    let mut a = BigInt::one();
    for &p in factor(k).keys() {
        let e = alpha_with(k, p, variant)?;
        alpha_map.insert(p, e);
        a *= num_traits::pow(BigInt::from(p), e as usize);
    }
    let mut beta_map = BTreeMap::new();
    let mut b = BigInt::one();
    for p in primes_below(k) {
        if k % p == 0 {
            continue;
        }
        if let Some(w) = repunit_witness(k, p) {
            b *= p;
            beta_map.insert(p, w);
        }
    }
    let m = BigInt::from(k) * &a * &b;
    Ok(FactorProfile { k, alpha: alpha_map, beta: beta_map, a, b, m, variant })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{factorial, vp};
    use num_integer::Integer;
    use num_traits::Zero;

    #[test]
    fn factorization() {
        assert_eq!(factor(360), BTreeMap::from([(2, 3), (3, 2), (5, 1)]));
        assert!(factor(1).is_empty());
        assert_eq!(factor(2548), BTreeMap::from([(2, 2), (7, 2), (13, 1)]));
        assert_eq!(factor(99991), BTreeMap::from([(99991, 1)]));
        for n in 1..3000u64 {
            let back: u64 = factor(n).iter().map(|(p, e)| p.pow(*e)).product();
            assert_eq!(back, n);
        }
    }

    #[test]
    fn sieve_matches_trial_division() {
        let ps = primes_below(1000);
        assert_eq!(ps.len(), 168);
        for n in 0..1000 {
            assert_eq!(ps.binary_search(&n).is_ok(), is_prime(n), "n = {n}");
        }
    }

    #[test]
    fn alpha_values() {
        assert_eq!(alpha(6, 2), Ok(2));
        assert_eq!(alpha(2, 2), Ok(0));
        assert_eq!(alpha(14, 2), Ok(1));
        assert_eq!(alpha(9, 3), Ok(1));
        assert_eq!(alpha(3, 3), Ok(0));
        assert_eq!(alpha_with(14, 2, FormulaVariant::Legacy1976), Ok(2));
        assert_eq!(alpha(9, 2), Err(FormulaError::NotADivisor { k: 9, p: 2 }));
        assert_eq!(alpha(8, 4), Err(FormulaError::NotPrime(4)));
        assert_eq!(alpha(0, 2), Err(FormulaError::ZeroK));
    }

    #[test]
    fn beta_values() {
        assert_eq!(
            beta(8, 7),
            Ok((1, Some(RepunitWitness { p: 7, r: 1, m_exp: 2, value: 8 })))
        );
        assert_eq!(
            beta(5, 2),
            Ok((1, Some(RepunitWitness { p: 2, r: 2, m_exp: 2, value: 5 })))
        );
        for p in primes_below(11) {
            assert_eq!(beta(11, p), Ok((0, None)));
        }
        assert_eq!(beta(6, 3), Err(FormulaError::BetaOutOfRange { k: 6, p: 3 }));
        assert_eq!(beta(6, 7), Err(FormulaError::BetaOutOfRange { k: 6, p: 7 }));
    }

    /// Independent check of the witness search: scan every (r, m) with p^r < k.
    fn beta_brute(k: u64, p: u64) -> u32 {
        for r in 1..40u32 {
            let pr = BigInt::from(p).pow(r);
            if pr >= BigInt::from(k) {
                break;
            }
            for m in 2..64u32 {
                let v: BigInt = (BigInt::from(p).pow(m * r) - 1) / (&pr - 1);
                if v > BigInt::from(k) {
                    break;
                }
                if (BigInt::from(k) % &v).is_zero() {
                    return 1;
                }
            }
        }
        0
    }

    #[test]
    fn beta_agrees_with_brute_force() {
        for k in 2..400u64 {
            for p in primes_below(k) {
                if k % p == 0 {
                    continue;
                }
                let (e, w) = beta(k, p).unwrap();
                assert_eq!(e, beta_brute(k, p), "k = {k}, p = {p}");
                if let Some(w) = w {
                    assert_eq!(w.exact_value(), BigInt::from(w.value));
                    assert_eq!(k % w.value, 0);
                }
            }
        }
    }

    #[test]
    fn profiles() {
        let p6 = profile(6).unwrap();
        assert_eq!((p6.a.clone(), p6.b.clone(), p6.m.clone()), (12.into(), 5.into(), 360.into()));
        assert_eq!(p6.a_factors(), vec![4, 3]);
        let p14 = profile(14).unwrap();
        assert_eq!((p14.a.clone(), p14.b.clone(), p14.m.clone()), (14.into(), 13.into(), 2548.into()));
        assert_eq!(profile_with(14, FormulaVariant::Legacy1976).unwrap().m, BigInt::from(5096));
        assert_eq!(profile(144).unwrap().m, BigInt::from(868035389760u64));
        let p1 = profile(1).unwrap();
        assert_eq!((p1.a, p1.b, p1.m), (1.into(), 1.into(), 1.into()));
        assert_eq!(profile(0), Err(FormulaError::ZeroK));
        assert_eq!(profile(MAX_K + 1), Err(FormulaError::KTooLarge(MAX_K + 1)));
    }

    #[test]
    fn k_divides_m() {
        for k in 1..=2000 {
            let pr = profile(k).unwrap();
            assert!(pr.m.is_multiple_of(&BigInt::from(k)), "k = {k}");
            assert_eq!(pr.m, BigInt::from(k) * pr.m_over_k());
        }
    }

    #[test]
    fn m_divides_factorial() {
        for k in 1..=20 {
            assert!(factorial(k).is_multiple_of(&profile(k).unwrap().m), "k = {k}");
        }
    }

    #[test]
    fn two_adic_valuation() {
        for k in (2..=2000u64).step_by(2) {
            let pr = profile(k).unwrap();
            let v = vp(&pr.m, 2).unwrap();
            let n = vp_u64(k, 2);
            let expected = match k {
                2 => 1,
                _ if k % 6 == 0 => n + 2,
                _ => n + 1,
            };
            assert_eq!(v, expected, "k = {k}");
            assert_eq!(pr.valuation(2), v);
        }
    }

    #[test]
    fn odd_prime_valuation() {
        for k in 1..=2000u64 {
            let pr = profile(k).unwrap();
            for (&p, &e) in factor(k).iter().filter(|(&p, _)| p != 2) {
                let expected = e + u32::from(k > p);
                assert_eq!(vp(&pr.m, p).unwrap(), expected, "k = {k}, p = {p}");
                assert_eq!(pr.valuation(p), expected);
            }
            for &p in pr.beta.keys() {
                assert_eq!(vp(&pr.m, p).unwrap(), 1);
            }
        }
    }

    #[test]
    fn invariants_on_exponents() {
        for k in 1..=1000u64 {
            let pr = profile(k).unwrap();
            for (&p, &e) in &pr.alpha {
                assert!(e <= 2);
                assert!(e < 2 || p == 2);
            }
            for (&p, w) in &pr.beta {
                assert!(p < k && k % p != 0);
                assert_eq!(w.exact_value(), BigInt::from(w.value));
                assert_eq!(k % w.value, 0);
            }
        }
    }
}
