//! Lower bounds: finite rings `R` with `v_p(m(k, R))` equal to the target,
//! which gives `p^target | m(k)` because `m(k, R) | m(k)`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{vp_u64, FiniteFieldSpec, Poly, QuotientRingSpec};
use crate::formula;
use crate::subgroup::{m_k_r, OracleLimits};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowerWitness {
    pub p: u64,
    pub target_valuation: u32,
    /// `None` when the bound comes from the x-coefficient fact rather than a ring.
    pub ring: Option<QuotientRingSpec>,
    pub m_k_r: Option<u64>,
    pub achieved_valuation: u32,
    pub note: String,
}

impl LowerWitness {
    pub fn is_success(&self) -> bool {
        self.achieved_valuation == self.target_valuation
    }

    fn failure(p: u64, target: u32, note: String) -> Self {
        LowerWitness { p, target_valuation: target, ring: None, m_k_r: None, achieved_valuation: 0, note }
    }
}

fn target_for(k: u64, p: u64) -> u32 {
    formula::profile(k).map(|pr| pr.valuation(p)).unwrap_or(0)
}

/// Measures `v_p(m(k, ring))`; `None` if the ring is over the cap.
fn measure(ring: &QuotientRingSpec, k: u64, p: u64, limits: &OracleLimits) -> Option<(u64, u32)> {
    m_k_r(ring, k, limits).ok().map(|m| (m, vp_u64(m, p)))
}

/// `F_{p^{m r}}` for the repunit `(p^{m r} - 1)/(p^r - 1)` dividing `k`.
pub fn witness_beta(k: u64, p: u64, limits: &OracleLimits) -> LowerWitness {
    witness_beta_with_target(k, p, target_for(k, p), limits)
}

pub(crate) fn witness_beta_with_target(k: u64, p: u64, target: u32, limits: &OracleLimits) -> LowerWitness {
    let w = match formula::beta(k, p) {
        Ok((_, Some(w))) => w,
        _ => return LowerWitness::failure(p, target, format!("beta_{k}({p}) = 0, no repunit divisor")),
    };
    let j = w.field_degree();
    let too_big = BigInt::from(p).pow(j as u32) > BigInt::from(limits.enumeration_cap);
    if too_big {
        return LowerWitness::failure(p, target, format!("F_{p}^{j} is over the enumeration cap {}", limits.enumeration_cap));
    }
    let field = match FiniteFieldSpec::default_for(p, j) {
        Ok(f) => f.into_ring(),
        Err(e) => return LowerWitness::failure(p, target, e.to_string()),
    };
    match measure(&field, k, p, limits) {
        Some((m, v)) => LowerWitness {
            p,
            target_valuation: target,
            ring: Some(field),
            m_k_r: Some(m),
            achieved_valuation: v,
            note: format!("repunit {} = ({p}^{j} - 1)/({p}^{} - 1) divides k", w.value, w.r),
        },
        None => LowerWitness::failure(p, target, "enumeration failed".into()),
    }
}

/// Monic irreducibles of degree `deg` over `F_p`, as low-coefficient vectors.
fn irreducibles(p: u64, deg: usize) -> Vec<Vec<i64>> {
    let count = p.pow(deg as u32);
    (0..count)
        .filter_map(|mut n| {
            let low: Vec<i64> = (0..deg)
                .map(|_| {
                    let d = (n % p) as i64;
                    n /= p;
                    d
                })
                .collect();
            let mut c = low.clone();
            c.push(1);
            FiniteFieldSpec::new(p, &Poly::from_i64(&c)).ok().map(|_| low)
        })
        .collect()
}

/// How many monic irreducibles of each degree the search family takes.
pub const IRREDUCIBLES_PER_DEGREE: usize = 3;

/// Candidate rings `(Z/q)[x]/(f)` for `q = p^e`: `f` in `x^2, x^3, x^2+x+1`,
/// the first few monic irreducibles of each degree <= 3 mod `p`, and for odd `p` the
/// cyclotomic `1 + x + ... + x^{p-1}`; smallest ring first.
pub fn ring_family(p: u64, e: u32) -> Vec<QuotientRingSpec> {
    let q = p.pow(e);
    let mut lows: Vec<Vec<i64>> = vec![vec![0, 0], vec![0, 0, 0], vec![1, 1]];
    for deg in 1..=3 {
        lows.extend(irreducibles(p, deg).into_iter().take(IRREDUCIBLES_PER_DEGREE));
    }
    if p > 2 {
        lows.push(vec![1; p as usize - 1]);
    }
    let mut rings: Vec<QuotientRingSpec> = Vec::new();
    for low in lows {
        if let Ok(r) = QuotientRingSpec::from_monic(q, &low) {
            if !rings.contains(&r) {
                rings.push(r);
            }
        }
    }
    rings.sort_by_key(|r| r.degree());
    rings
}

/// Walks `rings` in order, stopping at the first that reaches `target`.
/// Overshooting the target also stops the search; the caller treats it as fatal.
fn search(k: u64, p: u64, target: u32, rings: Vec<QuotientRingSpec>, limits: &OracleLimits) -> LowerWitness {
    let mut best: Option<LowerWitness> = None;
    let mut skipped = 0;
    for ring in rings {
        let Some((m, v)) = measure(&ring, k, p, limits) else {
            skipped += 1;
            continue;
        };
        let w = LowerWitness {
            p,
            target_valuation: target,
            ring: Some(ring),
            m_k_r: Some(m),
            achieved_valuation: v,
            note: String::new(),
        };
        if v >= target {
            return w;
        }
        if best.as_ref().map_or(true, |b| v > b.achieved_valuation) {
            best = Some(w);
        }
    }
    let mut w = best.unwrap_or_else(|| LowerWitness::failure(p, target, String::new()));
    w.note = format!("no ring in the search family reached the target ({skipped} over the cap)");
    w
}

/// `v_2(m(k))` for even `k > 2`. For `6 | k` the ring is `(Z/2^{n+2})[x]/(x^2+x+1)`
/// with `n = v_2(k)`; otherwise the search family mod `2^{n+2}`.
pub fn witness_alpha2(k: u64, limits: &OracleLimits) -> LowerWitness {
    witness_alpha2_with_target(k, target_for(k, 2), limits)
}

pub(crate) fn witness_alpha2_with_target(k: u64, target: u32, limits: &OracleLimits) -> LowerWitness {
    let n = vp_u64(k, 2);
    let mut rings = ring_family(2, n + 2);
    if k % 6 == 0 {
        let eis = QuotientRingSpec::from_monic(1 << (n + 2), &[1, 1]).expect("monic");
        rings.retain(|r| r != &eis);
        rings.insert(0, eis);
    }
    search(k, 2, target, rings, limits)
}

/// `v_p(m(k))` for odd `p | k`, `p < k`, searching rings mod `p^{v_p(k)+1}`.
pub fn witness_alpha_odd(k: u64, p: u64, limits: &OracleLimits) -> LowerWitness {
    witness_alpha_odd_with_target(k, p, target_for(k, p), limits)
}

pub(crate) fn witness_alpha_odd_with_target(k: u64, p: u64, target: u32, limits: &OracleLimits) -> LowerWitness {
    search(k, p, target, ring_family(p, vp_u64(k, p) + 1), limits)
}

/// Outcome of checking that the x-coefficient of `g^k` is `k g(0)^{k-1} g'(0)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct XCoefficientProof {
    pub k: u64,
    /// Number of `(c0, c1, c2, c3)` points checked.
    pub points: u64,
    pub holds: bool,
}

/// `g^k` truncated above `x^3`; exact in degrees 0..=3.
fn truncated_power(g: &[BigInt; 4], k: u64) -> [BigInt; 4] {
    let mut acc: [BigInt; 4] = [BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::zero()];
    for _ in 0..k {
        let mut next: [BigInt; 4] = Default::default();
        for i in 0..4 {
            for j in 0..4 - i {
                next[i + j] += &acc[i] * &g[j];
            }
        }
        acc = next;
    }
    acc
}

/// For `g = c0 + c1 x + c2 x^2 + c3 x^3`, the x-coefficient of `g^k` is a form of
/// degree `k` in `(c0, c1)` alone, so `k + 1` values of each pin it down. The
/// `(c2, c3)` pairs are a sample showing they do not feed into it.
pub fn x_coefficient_fact(k: u64) -> XCoefficientProof {
    let high: [(i64, i64); 3] = [(0, 0), (1, -1), (-2, 3)];
    let grid: Vec<(u64, u64, usize)> = (0..=k)
        .flat_map(|a| (0..=k).flat_map(move |b| (0..high.len()).map(move |h| (a, b, h))))
        .collect();
    let holds = grid.par_iter().all(|&(c0, c1, h)| {
        let g = [BigInt::from(c0), BigInt::from(c1), BigInt::from(high[h].0), BigInt::from(high[h].1)];
        let got = &truncated_power(&g, k)[1];
        let expected = BigInt::from(k) * num_traits::pow(g[0].clone(), (k - 1) as usize) * &g[1];
        *got == expected
    });
    XCoefficientProof { k, points: grid.len() as u64, holds }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lim() -> OracleLimits {
        OracleLimits::default()
    }

    #[test]
    fn beta_examples() {
        let w = witness_beta(4, 3, &lim());
        assert!(w.is_success());
        assert_eq!(w.m_k_r, Some(3));
        assert_eq!(w.ring.unwrap().to_string(), "Z/3[x]/(x^2+1)");
        let w = witness_beta(8, 7, &lim());
        assert!(w.is_success());
        assert_eq!(w.ring.as_ref().unwrap().cardinality_u64(), Some(49));
        let w = witness_beta(5, 2, &lim());
        assert!(w.is_success());
        assert_eq!(w.ring.as_ref().unwrap().cardinality_u64(), Some(16));
        let w = witness_beta(6, 5, &lim());
        assert!(w.is_success());
    }

    #[test]
    fn beta_respects_cap() {
        let w = witness_beta(8, 7, &OracleLimits { enumeration_cap: 10, ..lim() });
        assert!(!w.is_success());
        assert!(w.note.contains("cap"));
        assert!(w.ring.is_none());
    }

    #[test]
    fn beta_witness_sweep() {
        for k in 2..=60u64 {
            let pr = formula::profile(k).unwrap();
            for (&p, rw) in &pr.beta {
                let size = BigInt::from(p).pow(rw.field_degree() as u32);
                if size > BigInt::from(10_000) {
                    continue;
                }
                let w = witness_beta(k, p, &lim());
                assert!(w.is_success(), "k = {k}, p = {p}: {w:?}");
            }
        }
    }

    #[test]
    fn alpha2_examples() {
        let w = witness_alpha2(6, &lim());
        assert_eq!(w.ring.as_ref().unwrap().to_string(), "Z/8[x]/(x^2+x+1)");
        assert_eq!((w.target_valuation, w.achieved_valuation), (3, 3));
        let w = witness_alpha2(12, &lim());
        assert_eq!(w.ring.as_ref().unwrap().to_string(), "Z/16[x]/(x^2+x+1)");
        assert!(w.is_success());
        let w = witness_alpha2(4, &lim());
        assert_eq!(w.target_valuation, 3);
        assert!(w.is_success(), "{w:?}");
    }

    #[test]
    fn alpha_odd_examples() {
        let w = witness_alpha_odd(6, 3, &lim());
        assert_eq!(w.target_valuation, 2);
        assert!(w.is_success(), "{w:?}");
        assert_eq!(witness_alpha_odd(9, 3, &lim()).target_valuation, 3);
        // degree <= 3 rings mod 25 all stop at 5 | m(10, R); the fifth cyclotomic ring reaches 25
        let w = witness_alpha_odd(10, 5, &lim());
        assert!(w.is_success(), "{w:?}");
        assert_eq!(w.ring.unwrap().to_string(), "Z/25[x]/(x^4+x^3+x^2+x+1)");
    }

    #[test]
    fn family_is_sorted_and_distinct() {
        let f = ring_family(2, 3);
        assert_eq!(f[0].degree(), 1);
        assert!(f.windows(2).all(|w| w[0].degree() <= w[1].degree()));
        for (i, r) in f.iter().enumerate() {
            assert!(!f[i + 1..].contains(r));
        }
        assert!(f.iter().any(|r| r.to_string() == "Z/8[x]/(x^2+x+1)"));
    }

    #[test]
    fn x_coefficient() {
        for k in [1, 2, 3, 6, 14] {
            let proof = x_coefficient_fact(k);
            assert!(proof.holds, "k = {k}");
            assert_eq!(proof.points, (k + 1) * (k + 1) * 3);
        }
        let g = [BigInt::from(2), BigInt::from(3), BigInt::zero(), BigInt::zero()];
        // (2 + 3x)^2 = 4 + 12x + 9x^2
        assert_eq!(truncated_power(&g, 2)[1], BigInt::from(12));
        let g6 = truncated_power(&[BigInt::from(5), BigInt::from(7), BigInt::from(1), BigInt::zero()], 6);
        assert_eq!(g6[1], BigInt::from(6 * 5i64.pow(5) * 7));
    }
}
