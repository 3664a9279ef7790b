//! Certificates for `m(k)`: an explicit identity bounding it from above and,
//! for each prime `p | m(k)`, a finite ring bounding `v_p(m(k))` from below.

mod lower;
mod upper;

pub use lower::{
    ring_family, witness_alpha2, witness_alpha_odd, witness_beta, x_coefficient_fact, LowerWitness,
    XCoefficientProof,
};
pub use upper::{
    finite_difference_certificate, lattice_upper, verify_upper, GeneratorConfig, HigherDegree, UpperCertificate,
};

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::algebra::vp;
use crate::formula::{self, FormulaError};
use crate::subgroup::OracleLimits;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error(
        "FORMULA FALSIFIED: k = {k}, p = {p}: ring {ring} gives v_p(m(k, R)) = {achieved} \
         but the formula predicts v_p(m(k)) = {target}"
    )]
    FormulaFalsified { k: u64, p: u64, target: u32, achieved: u32, ring: String },
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertStatus {
    Full,
    Partial { uncertified: Vec<u64> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateBundle {
    pub k: u64,
    pub m_formula: BigInt,
    pub upper: UpperCertificate,
    pub upper_verified: bool,
    pub x_coefficient: XCoefficientProof,
    /// One per prime dividing `m_formula`, ascending.
    pub witnesses: Vec<LowerWitness>,
    pub status: CertStatus,
}

impl CertificateBundle {
    pub fn is_full(&self) -> bool {
        self.status == CertStatus::Full
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<_> = self
            .upper
            .terms
            .iter()
            .map(|(a, g)| json!([a.to_string(), g.coeffs().iter().map(ToString::to_string).collect::<Vec<_>>()]))
            .collect();
        let witnesses: Vec<_> = self
            .witnesses
            .iter()
            .map(|w| {
                json!({
                    "p": w.p,
                    "ring": w.ring.as_ref().map(ToString::to_string),
                    "m_k_R": w.m_k_r,
                    "target_valuation": w.target_valuation,
                    "achieved_valuation": w.achieved_valuation,
                    "success": w.is_success(),
                    "note": w.note,
                })
            })
            .collect();
        let status = match &self.status {
            CertStatus::Full => json!("FULL"),
            CertStatus::Partial { uncertified } => json!({ "PARTIAL": uncertified }),
        };
        json!({
            "schema": "mk-cert/1",
            "k": self.k,
            "m": self.m_formula.to_string(),
            "upper": {
                "m": self.upper.m.to_string(),
                "c": self.upper.c.to_string(),
                "terms": terms,
                "verified": self.upper_verified,
            },
            "x_coefficient": {
                "points": self.x_coefficient.points,
                "holds": self.x_coefficient.holds,
            },
            "witnesses": witnesses,
            "status": status,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifyConfig {
    pub generators: GeneratorConfig,
    pub limits: OracleLimits,
    /// Above this `k` the upper bound is the finite-difference identity alone.
    pub lattice_max_k: u64,
    /// Also build the finite-difference identity and keep it when it is at least as good.
    pub fallback_finite_difference: bool,
    /// Replaces the formula's target valuation for a prime. Test hook for the
    /// falsification check; never set in normal runs.
    pub target_overrides: BTreeMap<u64, u32>,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            generators: GeneratorConfig::extended(),
            limits: OracleLimits::default(),
            lattice_max_k: 16,
            fallback_finite_difference: true,
            target_overrides: BTreeMap::new(),
        }
    }
}

/// The verified certificate with the least `m`, ties going to fewer terms.
fn upper_bound(k: u64, config: &CertifyConfig) -> (UpperCertificate, bool) {
    let mut candidates = Vec::new();
    if k <= config.lattice_max_k {
        candidates.push(lattice_upper(k, &config.generators));
    }
    if config.fallback_finite_difference || candidates.is_empty() {
        candidates.push(finite_difference_certificate(k));
    }
    let mut verified: Vec<UpperCertificate> = candidates.iter().filter(|c| verify_upper(c)).cloned().collect();
    verified.sort_by(|a, b| a.m.cmp(&b.m).then(a.terms.len().cmp(&b.terms.len())));
    match verified.into_iter().next() {
        Some(c) => (c, true),
        None => (candidates.swap_remove(0), false),
    }
}

pub fn certify(k: u64, config: &CertifyConfig) -> Result<CertificateBundle, CertifyError> {
    let profile = formula::profile(k)?;
    let primes = profile.primes();
    let target = |p: u64| config.target_overrides.get(&p).copied().unwrap_or_else(|| profile.valuation(p));

    let ((upper, upper_verified), (x_coefficient, witnesses)) = rayon::join(
        || upper_bound(k, config),
        || {
            rayon::join(
                || x_coefficient_fact(k),
                || {
                    primes
                        .par_iter()
                        .map(|&p| {
                            let t = target(p);
                            if k % p != 0 {
                                lower::witness_beta_with_target(k, p, t, &config.limits)
                            } else if profile.alpha.get(&p).copied().unwrap_or(0) == 0 {
                                // the k-part alone, covered by the x-coefficient fact below
                                LowerWitness {
                                    p,
                                    target_valuation: t,
                                    ring: None,
                                    m_k_r: None,
                                    achieved_valuation: 0,
                                    note: "x-coefficient fact".into(),
                                }
                            } else if p == 2 {
                                lower::witness_alpha2_with_target(k, t, &config.limits)
                            } else {
                                lower::witness_alpha_odd_with_target(k, p, t, &config.limits)
                            }
                        })
                        .collect::<Vec<_>>()
                },
            )
        },
    );

    let mut witnesses = witnesses;
    for w in witnesses.iter_mut().filter(|w| w.ring.is_none() && w.note == "x-coefficient fact") {
        if x_coefficient.holds {
            w.achieved_valuation = formula::vp_u64(k, w.p);
        }
    }

    for w in &witnesses {
        if w.achieved_valuation > w.target_valuation {
            return Err(CertifyError::FormulaFalsified {
                k,
                p: w.p,
                target: w.target_valuation,
                achieved: w.achieved_valuation,
                ring: w.ring.as_ref().map_or_else(|| "x-coefficient fact".into(), ToString::to_string),
            });
        }
    }
    let mut uncertified: Vec<u64> = witnesses.iter().filter(|w| !w.is_success()).map(|w| w.p).collect();
    if !upper_verified {
        uncertified.extend(&primes);
    } else if upper.m != profile.m {
        // upper.m divides k!, so only primes <= k can be in excess
        for p in formula::primes_below(k + 1) {
            if vp(&upper.m, p).unwrap_or(0) > profile.valuation(p) {
                uncertified.push(p);
            }
        }
    }
    uncertified.sort_unstable();
    uncertified.dedup();
    let status = if uncertified.is_empty() { CertStatus::Full } else { CertStatus::Partial { uncertified } };
    Ok(CertificateBundle {
        k,
        m_formula: profile.m.clone(),
        upper,
        upper_verified,
        x_coefficient,
        witnesses,
        status,
    })
}
