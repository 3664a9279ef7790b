use std::collections::BTreeSet;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{AmbientGroup, HnfBasis, HnfBuilder, SubgroupError};
use crate::algebra::{QuotientRingSpec, DEFAULT_ENUMERATION_CAP};

/// Default bound on `|R|^2` for the `K(k, R)` generator pairs.
pub const DEFAULT_PAIR_CAP: u64 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleLimits {
    pub enumeration_cap: u64,
    pub pair_cap: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { enumeration_cap: DEFAULT_ENUMERATION_CAP, pair_cap: DEFAULT_PAIR_CAP }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SubgroupKind {
    J,
    K,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupReport {
    pub ring: QuotientRingSpec,
    pub k: u64,
    pub kind: SubgroupKind,
    pub basis: HnfBasis,
    /// Least `m >= 1` with `m R` inside the subgroup.
    pub m_k_r: u64,
    pub is_full: bool,
}

#[derive(Serialize)]
struct ReportJson {
    ring: String,
    k: u64,
    kind: SubgroupKind,
    basis: Vec<Vec<String>>,
    #[serde(rename = "m_k_R")]
    m_k_r: u64,
    is_full: bool,
}

impl SubgroupReport {
    pub fn to_json(&self) -> serde_json::Value {
        let doc = ReportJson {
            ring: self.ring.to_string(),
            k: self.k,
            kind: self.kind,
            basis: self
                .basis
                .rows()
                .iter()
                .map(|r| r.iter().map(ToString::to_string).collect())
                .collect(),
            m_k_r: self.m_k_r,
            is_full: self.is_full,
        };
        serde_json::to_value(doc).expect("plain data serializes")
    }
}

/// One `m(k, R)` value produced by [`span_j`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleRecord {
    pub ring: String,
    pub k: u64,
    pub m_k_r: u64,
}

static AUDIT: Mutex<Option<Vec<OracleRecord>>> = Mutex::new(None);

/// Opt-in log of every `m(k, R)` computed in this process, so a caller can
/// check `m(k, R) | m(k)` over everything an oracle ever produced.
pub mod audit {
    use super::*;

    pub use super::OracleRecord;

    pub fn enable() {
        let mut g = AUDIT.lock().unwrap_or_else(|e| e.into_inner());
        g.get_or_insert_with(Vec::new);
    }

    pub fn snapshot() -> Vec<OracleRecord> {
        AUDIT.lock().unwrap_or_else(|e| e.into_inner()).clone().unwrap_or_default()
    }

    pub(crate) fn record(r: OracleRecord) {
        if let Some(log) = AUDIT.lock().unwrap_or_else(|e| e.into_inner()).as_mut() {
            log.push(r);
        }
    }
}

fn to_vector(coeffs: &[u64]) -> Vec<BigInt> {
    coeffs.iter().map(|&c| BigInt::from(c)).collect()
}

fn kth_powers(ring: &QuotientRingSpec, k: u64, cap: u64) -> Result<BTreeSet<Vec<u64>>, SubgroupError> {
    let n = ring.elements(cap)?.len() as u64;
    Ok((0..n)
        .into_par_iter()
        .map(|i| ring.pow_raw(ring.element_at(i).coeffs(), k))
        .collect::<Vec<_>>()
        .into_iter()
        .collect())
}

fn build_report(
    ring: &QuotientRingSpec,
    k: u64,
    kind: SubgroupKind,
    generators: impl IntoIterator<Item = Vec<u64>>,
) -> Result<SubgroupReport, SubgroupError> {
    let d = ring.degree();
    let mut b = HnfBuilder::new(AmbientGroup::modular(d, ring.modulus()));
    for g in generators {
        b.insert(&to_vector(&g))?;
        if b.is_full() {
            break;
        }
    }
    let basis = b.finish();
    let mut m = 1u64;
    for i in 0..d {
        let e = to_vector(ring.basis_element(i).coeffs());
        m = m.lcm(&basis.element_order(&e)?);
    }
    debug_assert!(m >= 1 && ring.modulus() % m == 0);
    let is_full = basis.is_full();
    Ok(SubgroupReport { ring: ring.clone(), k, kind, basis, m_k_r: m, is_full })
}

/// `J(k, R)`: the additive span of all `k`-th powers of `R`.
pub fn span_j(ring: &QuotientRingSpec, k: u64, limits: &OracleLimits) -> Result<SubgroupReport, SubgroupError> {
    let powers = kth_powers(ring, k, limits.enumeration_cap)?;
    let report = build_report(ring, k, SubgroupKind::J, powers)?;
    audit::record(OracleRecord { ring: ring.to_string(), k, m_k_r: report.m_k_r });
    Ok(report)
}

/// `K(k, R)` for `R` over `F_2`: the span of `g^k` and `g^k (h + h^2)`.
pub fn span_k(ring: &QuotientRingSpec, k: u64, limits: &OracleLimits) -> Result<SubgroupReport, SubgroupError> {
    if ring.modulus() != 2 {
        return Err(SubgroupError::NotCharacteristicTwo(ring.modulus()));
    }
    let size = ring.cardinality();
    let pairs = &size * &size;
    if pairs > BigInt::from(limits.pair_cap) {
        return Err(SubgroupError::PairCapExceeded { pairs: pairs.to_string(), cap: limits.pair_cap });
    }
    let powers = kth_powers(ring, k, limits.enumeration_cap)?;
    let n = ring.elements(limits.enumeration_cap)?.len() as u64;
    let images: BTreeSet<Vec<u64>> = (0..n)
        .map(|i| {
            let h = ring.element_at(i);
            let h2 = ring.mul_raw(h.coeffs(), h.coeffs());
            h.coeffs().iter().zip(&h2).map(|(a, b)| (a + b) % 2).collect()
        })
        .collect();
    let mut generators: BTreeSet<Vec<u64>> = powers.clone();
    for g in &powers {
        for t in &images {
            generators.insert(ring.mul_raw(g, t));
        }
    }
    build_report(ring, k, SubgroupKind::K, generators)
}

/// `m(k, R)`, the generator of `{ m : m R inside J(k, R) }`.
pub fn m_k_r(ring: &QuotientRingSpec, k: u64, limits: &OracleLimits) -> Result<u64, SubgroupError> {
    Ok(span_j(ring, k, limits)?.m_k_r)
}
