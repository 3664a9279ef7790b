//! Named invariant sweeps, shared by `mkpoly selftest` and the test suites.

use num_bigint::BigInt;
use serde::Serialize;

use crate::algebra::{binomial, vp, vp_u64, FiniteFieldSpec, QuotientRingSpec};
use crate::formula::FormulaVariant;
use crate::subgroup::{span_j, span_k, OracleLimits};
use crate::tables;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &'static str, failures: Vec<String>, ok_detail: String) -> Self {
        match failures.first() {
            None => CheckOutcome { name, passed: true, detail: ok_detail },
            Some(first) => CheckOutcome {
                name,
                passed: false,
                detail: format!("{} failure(s), first: {first}", failures.len()),
            },
        }
    }
}

/// For even `k <= max_k`, `1 <= j <= k`: `v_2(C(k, j)) >= v_2(k) - (j - 1)`,
/// with equality exactly for `j` in {1, 2}.
pub fn vpbinom_sweep(max_k: u64) -> CheckOutcome {
    let mut failures = Vec::new();
    let mut cases = 0;
    for k in (2..=max_k).step_by(2) {
        let n = i64::from(vp_u64(k, 2));
        for j in 1..=k {
            cases += 1;
            let lhs = i64::from(vp(&binomial(k, j), 2).expect("nonzero"));
            let rhs = n - (j as i64 - 1);
            let equal_expected = j <= 2;
            if lhs < rhs || (lhs == rhs) != equal_expected {
                failures.push(format!("k = {k}, j = {j}: v_2 = {lhs}, bound {rhs}"));
            }
        }
    }
    CheckOutcome::new("lemma-vpbinom", failures, format!("{cases} (k, j) pairs"))
}

/// `K(k, F_{2^j})` is the whole field for `j <= max_j`, `k <= max_k`, `3 !| k`;
/// and `h + h^2 = c` is solvable exactly when `tr(c) = 0`, for `j <= max_trace_j`.
pub fn prop_ff_sweep(max_j: usize, max_k: u64, max_trace_j: usize, limits: &OracleLimits) -> CheckOutcome {
    let mut failures = Vec::new();
    let mut cases = 0;
    for j in 1..=max_j {
        let field = FiniteFieldSpec::default_for(2, j).expect("F_2 has irreducibles of every degree");
        for k in (1..=max_k).filter(|k| k % 3 != 0) {
            cases += 1;
            match span_k(field.ring(), k, limits) {
                Ok(rep) if rep.is_full => {}
                Ok(_) => failures.push(format!("K({k}, F_2^{j}) is proper")),
                Err(e) => failures.push(format!("K({k}, F_2^{j}): {e}")),
            }
        }
    }
    for j in 1..=max_trace_j {
        let field = FiniteFieldSpec::default_for(2, j).expect("F_2 has irreducibles of every degree");
        let r = field.ring();
        let elems = match r.elements(limits.enumeration_cap) {
            Ok(e) => e,
            Err(e) => {
                failures.push(format!("F_2^{j}: {e}"));
                continue;
            }
        };
        for c in elems {
            cases += 1;
            let trace_zero = field.trace(&c).map(|t| r.is_zero(&t)).unwrap_or(false);
            let solvable = match field.artin_schreier_solve(&c) {
                Ok(Some(h)) => {
                    let hh = r.add(&h, &r.mul(&h, &h).expect("same ring")).expect("same ring");
                    hh == c
                }
                _ => false,
            };
            if solvable != trace_zero {
                failures.push(format!("F_2^{j}, c = {:?}: solvable {solvable}, trace zero {trace_zero}", c.coeffs()));
            }
        }
    }
    CheckOutcome::new("prop-ff", failures, format!("{cases} cases"))
}

/// For `s <= max_s`, `R = (Z/2^{s+3})[x]/(x^2+x+1)`, `k = 6 * 2^s`: every `g^k` has
/// x-coefficient 0 and `v_2(m(k, R)) = s + 3`.
pub fn tower_property(max_s: u32, limits: &OracleLimits) -> CheckOutcome {
    let mut failures = Vec::new();
    for s in 0..=max_s {
        let q = 1u64 << (s + 3);
        let k = 6u64 << s;
        let r = QuotientRingSpec::from_monic(q, &[1, 1]).expect("monic");
        let elems = match r.elements(limits.enumeration_cap) {
            Ok(e) => e,
            Err(e) => {
                failures.push(format!("s = {s} skipped, which is fatal: {e}"));
                continue;
            }
        };
        for g in elems {
            let p = r.pow(&g, k).expect("same ring");
            if p.coeffs()[1] != 0 {
                failures.push(format!("s = {s}: g = {:?} has g^{k} = {:?}", g.coeffs(), p.coeffs()));
                break;
            }
        }
        match span_j(&r, k, limits) {
            Ok(rep) if vp(&BigInt::from(rep.m_k_r), 2) == Ok(s + 3) => {}
            Ok(rep) => failures.push(format!("s = {s}: m({k}, {r}) = {}", rep.m_k_r)),
            Err(e) => failures.push(format!("s = {s} skipped, which is fatal: {e}")),
        }
    }
    CheckOutcome::new("tower-property", failures, format!("s = 0..={max_s}"))
}

/// Rows `1..=150` under `variant` against the appendix fixture.
pub fn table_fixture(variant: FormulaVariant) -> CheckOutcome {
    let rows = match tables::build_rows(1, 150, variant) {
        Ok(r) => r,
        Err(e) => return CheckOutcome::new("table-fixture", vec![e.to_string()], String::new()),
    };
    let report = tables::compare_fixture(&rows);
    let mut failures: Vec<String> = report.mismatches.iter().map(ToString::to_string).collect();
    failures.extend(report.missing.iter().map(|k| format!("row {k} missing")));
    CheckOutcome::new("table-fixture", failures, format!("{} rows", report.compared))
}

/// Every sweep at its standard size.
pub fn selftest(variant: FormulaVariant, limits: &OracleLimits) -> Vec<CheckOutcome> {
    vec![
        vpbinom_sweep(200),
        prop_ff_sweep(6, 24, 8, limits),
        tower_property(2, limits),
        table_fixture(variant),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_sweeps_pass() {
        for c in selftest(FormulaVariant::Corrected, &OracleLimits::default()) {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn legacy_fails_the_fixture() {
        let c = table_fixture(FormulaVariant::Legacy1976);
        assert!(!c.passed);
        assert!(c.detail.contains("first: k = 14"), "{}", c.detail);
    }

    #[test]
    fn low_cap_is_fatal_for_the_tower() {
        let c = tower_property(2, &OracleLimits { enumeration_cap: 10, ..OracleLimits::default() });
        assert!(!c.passed);
        assert!(c.detail.contains("skipped"));
    }
}
