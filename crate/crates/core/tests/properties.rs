use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

use mk_core::algebra::{factorial, vp, FiniteFieldSpec, Poly};
use mk_core::certify::{
    certify, finite_difference_certificate, lattice_upper, verify_upper, CertifyConfig, CertifyError, GeneratorConfig,
};
use mk_core::checks;
use mk_core::formula::{primes_below, profile};
use mk_core::subgroup::{span_k, OracleLimits};

fn divides(a: &BigInt, b: &BigInt) -> bool {
    (b % a).is_zero()
}

#[test]
fn lattice_sits_between_formula_and_factorial() {
    for k in 1..=20 {
        let c = lattice_upper(k, &GeneratorConfig::default());
        assert!(verify_upper(&c), "k = {k}");
        let mk = profile(k).unwrap().m;
        assert!(divides(&mk, &c.m), "k = {k}: m(k) = {mk}, lattice {}", c.m);
        assert!(divides(&c.m, &factorial(k)), "k = {k}: lattice {}", c.m);
    }
}

#[test]
fn finite_difference_gives_factorial() {
    for k in 1..=30 {
        let c = finite_difference_certificate(k);
        assert!(verify_upper(&c), "k = {k}");
        assert_eq!(c.m, factorial(k));
    }
}

#[test]
fn tower_and_small_sweeps() {
    let limits = OracleLimits::default();
    for c in [checks::tower_property(2, &limits), checks::vpbinom_sweep(120)] {
        assert!(c.passed, "{}: {}", c.name, c.detail);
    }
}

#[test]
fn k_span_is_full_under_another_modulus() {
    let limits = OracleLimits::default();
    let a = FiniteFieldSpec::default_for(2, 4).unwrap();
    let b = FiniteFieldSpec::new(2, &Poly::from_i64(&[1, 0, 0, 1, 1])).unwrap();
    assert_ne!(a.ring(), b.ring());
    for f in [&a, &b] {
        for k in (1..=24).filter(|k| k % 3 != 0) {
            assert!(span_k(f.ring(), k, &limits).unwrap().is_full, "k = {k}, {}", f.ring());
        }
    }
}

#[test]
fn certify_small_k_is_full() {
    let config = CertifyConfig::default();
    for k in 1..=6 {
        let b = certify(k, &config).unwrap();
        assert!(b.is_full(), "k = {k}: {:?}", b.status);
        assert!(b.upper_verified);
        assert_eq!(b.upper.m, b.m_formula);
        for w in &b.witnesses {
            assert_eq!(w.achieved_valuation, w.target_valuation, "k = {k}, p = {}: {}", w.p, w.note);
        }
    }
}

#[test]
fn certificate_json_shape() {
    let b = certify(4, &CertifyConfig::default()).unwrap();
    let v = b.to_json();
    assert_eq!(v["schema"], "mk-cert/1");
    assert_eq!(v["k"], 4);
    assert_eq!(v["m"], "24");
    assert_eq!(v["status"], "FULL");
    let terms = v["upper"]["terms"].as_array().unwrap();
    assert!(!terms.is_empty());
    let w = v["witnesses"].as_array().unwrap();
    let ps: Vec<u64> = w.iter().map(|x| x["p"].as_u64().unwrap()).collect();
    assert_eq!(ps, vec![2, 3]);
}

#[test]
fn raised_expectation_falsifies() {
    let mut config = CertifyConfig::default();
    config.target_overrides.insert(2, 2);
    match certify(6, &config) {
        Err(CertifyError::FormulaFalsified { k, p, target, achieved, .. }) => {
            assert_eq!((k, p, target, achieved), (6, 2, 2, 3));
        }
        other => panic!("expected falsification, got {other:?}"),
    }
}

#[test]
fn too_small_cap_leaves_primes_uncertified() {
    let config = CertifyConfig {
        limits: OracleLimits { enumeration_cap: 10, ..OracleLimits::default() },
        ..CertifyConfig::default()
    };
    let b = certify(6, &config).unwrap();
    assert!(!b.is_full());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn formula_divides_factorial(k in 1u64..400) {
        let p = profile(k).unwrap();
        prop_assert!(divides(&BigInt::from(k), &p.m));
        prop_assert!(divides(&p.m, &factorial(k)));
        for q in primes_below(k + 1) {
            prop_assert_eq!(vp(&p.m, q).unwrap(), p.valuation(q));
        }
    }

    #[test]
    fn tampered_certificates_fail(k in 2u64..25, bump in 1i64..5) {
        let mut c = finite_difference_certificate(k);
        c.terms[0].0 += BigInt::from(bump);
        prop_assert!(!verify_upper(&c));
    }
}
