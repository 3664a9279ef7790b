//! Upper bounds: explicit identities `sum a_i g_i(x)^k = m x + c` in `Z[x]`,
//! each proving `m(k) | m`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{binomial, expand_power, factorial, Poly};
use crate::formula;
use crate::subgroup::HnfBuilder;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpperCertificate {
    pub k: u64,
    /// `(a_i, g_i)` pairs.
    pub terms: Vec<(BigInt, Poly)>,
    pub m: BigInt,
    pub c: BigInt,
}

/// Polynomials of degree >= 2 with every coefficient in `[-coeff_bound, coeff_bound]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HigherDegree {
    pub max_degree: usize,
    pub coeff_bound: i64,
}

/// Which `g` contribute `g^k` to the coefficient lattice.
///
/// Always present: the constant 1 and the shifts `x - i` for `0 <= i <= k`.
/// Then `a x + b` for `1 <= a <= a_max`, `|b| <= b_max` (default `k`), and
/// optionally a block of higher-degree polynomials.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub a_max: i64,
    pub b_max: Option<i64>,
    pub higher_degree: Option<HigherDegree>,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig { a_max: 2, b_max: None, higher_degree: None }
    }
}

impl GeneratorConfig {
    /// Degree-1 family plus every polynomial of degree <= 4 with coefficients in {-1, 0, 1}.
    pub fn extended() -> Self {
        GeneratorConfig {
            higher_degree: Some(HigherDegree { max_degree: 4, coeff_bound: 1 }),
            ..Self::default()
        }
    }

    /// The generator polynomials for exponent `k`, deduplicated, in a fixed order.
    pub fn polynomials(&self, k: u64) -> Vec<Poly> {
        let k = k as i64;
        let mut out = vec![Poly::one()];
        out.extend((0..=k).map(|i| Poly::linear(1, -i)));
        let b_max = self.b_max.unwrap_or(k);
        for a in 1..=self.a_max {
            for b in -b_max..=b_max {
                out.push(Poly::linear(a, b));
            }
        }
        if let Some(h) = self.higher_degree {
            let width = (2 * h.coeff_bound + 1) as u64;
            let count = width.pow(h.max_degree as u32 + 1);
            for mut n in 0..count {
                let coeffs: Vec<i64> = (0..=h.max_degree)
                    .map(|_| {
                        let c = (n % width) as i64 - h.coeff_bound;
                        n /= width;
                        c
                    })
                    .collect();
                let p = Poly::from_i64(&coeffs);
                if p.degree().is_some_and(|d| d >= 2) {
                    out.push(p);
                }
            }
        }
        let mut seen = std::collections::HashSet::new();
        out.retain(|p| seen.insert(p.clone()));
        out
    }
}

/// `sum_{i<k} (-1)^i C(k-1, i) (x - i)^k = k! x + c`.
pub fn finite_difference_certificate(k: u64) -> UpperCertificate {
    assert!(k >= 1, "k must be positive");
    let terms: Vec<(BigInt, Poly)> = (0..k)
        .map(|i| {
            let sign = if i % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            (sign * binomial(k - 1, i), Poly::linear(1, -(i as i64)))
        })
        .collect();
    let total = terms
        .iter()
        .fold(Poly::zero(), |acc, (a, g)| &acc + &expand_power(g, k).scale(a));
    assert!(total.degree().unwrap_or(0) <= 1, "finite difference left degree >= 2 terms");
    assert_eq!(total.coeff(1), factorial(k), "finite difference x-coefficient");
    UpperCertificate { k, terms, m: total.coeff(1), c: total.coeff(0) }
}

/// Least `m` with `m x` in the lattice spanned by the configured `g^k`, with an
/// explicit combination read off the HNF transformation record.
pub fn lattice_upper(k: u64, config: &GeneratorConfig) -> UpperCertificate {
    assert!(k >= 1, "k must be positive");
    let polys = config.polynomials(k);
    let powers: Vec<Poly> = polys.iter().map(|g| expand_power(g, k)).collect();
    let dim = powers.iter().filter_map(Poly::degree).max().unwrap_or(0).max(1) + 1;
    // columns run from x^{dim-1} down to x^0, so rows of the form m x + c sit last
    let vector = |p: &Poly| -> Vec<BigInt> { (0..dim).rev().map(|i| p.coeff(i)).collect() };
    let mut b = HnfBuilder::tracking(dim, powers.len());
    for p in &powers {
        b.insert(&vector(p)).expect("dimension matches");
    }
    let x_col = dim - 2;
    let (row, combo) = b
        .pivot_row(x_col)
        .expect("the shifts (x - i)^k put k! x in the lattice");
    let m = row[x_col].clone();
    let c = row[dim - 1].clone();
    let mut combo: Vec<BigInt> = combo.expect("tracking builder").to_vec();
    // fold the constant into the 1^k generator
    combo[0] -= &c;
    let terms = combo
        .into_iter()
        .zip(polys)
        .filter(|(a, _)| !a.is_zero())
        .collect();
    UpperCertificate { k, terms, m, c: BigInt::zero() }
}

fn horner(coeffs: &[BigInt], t: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in coeffs.iter().rev() {
        acc = acc * t + c;
    }
    acc
}

/// Re-checks a certificate by evaluation at `k * deg + 2` integer points,
/// which pins down any polynomial of the degree involved, and checks that
/// the formula value divides `m`.
pub fn verify_upper(cert: &UpperCertificate) -> bool {
    if cert.k == 0 || !cert.m.is_positive() {
        return false;
    }
    let max_deg = cert.terms.iter().filter_map(|(_, g)| g.degree()).max().unwrap_or(0) as u64;
    let points = cert.k * max_deg.max(1) + 2;
    for t in 0..points {
        let t = BigInt::from(t);
        let lhs: BigInt = cert
            .terms
            .iter()
            .map(|(a, g)| a * horner(g.coeffs(), &t).pow(cert.k as u32))
            .sum();
        if lhs != &cert.m * &t + &cert.c {
            return false;
        }
    }
    match formula::profile(cert.k) {
        Ok(p) => cert.m.is_multiple_of(&p.m),
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_difference_small() {
        let c1 = finite_difference_certificate(1);
        assert_eq!((c1.m.clone(), c1.c.clone()), (BigInt::from(1), BigInt::from(0)));
        let c2 = finite_difference_certificate(2);
        assert_eq!((c2.m.clone(), c2.c.clone()), (BigInt::from(2), BigInt::from(-1)));
        let c3 = finite_difference_certificate(3);
        assert_eq!((c3.m.clone(), c3.c.clone()), (BigInt::from(6), BigInt::from(-6)));
        assert_eq!(c3.terms[1], (BigInt::from(-2), Poly::linear(1, -1)));
        for c in [c1, c2, c3] {
            assert!(verify_upper(&c));
        }
    }

    #[test]
    fn tampering_is_caught() {
        let mut c = finite_difference_certificate(3);
        c.c += 1;
        assert!(!verify_upper(&c));
        let mut c = finite_difference_certificate(4);
        c.terms[0].0 += 1;
        assert!(!verify_upper(&c));
        let mut c = finite_difference_certificate(4);
        c.m = BigInt::zero();
        assert!(!verify_upper(&c));
    }

    #[test]
    fn multiples_verify() {
        let mut c = finite_difference_certificate(3);
        for t in c.terms.iter_mut() {
            t.0 *= 2;
        }
        c.m *= 2;
        c.c *= 2;
        assert!(verify_upper(&c));
    }

    #[test]
    fn lattice_small_k() {
        assert_eq!(lattice_upper(1, &GeneratorConfig::default()).m, BigInt::from(1));
        assert_eq!(lattice_upper(2, &GeneratorConfig::default()).m, BigInt::from(2));
        assert_eq!(lattice_upper(3, &GeneratorConfig::default()).m, BigInt::from(6));
        let c6 = lattice_upper(6, &GeneratorConfig::default());
        assert_eq!(c6.m, BigInt::from(360));
        assert!(verify_upper(&c6));
        assert_eq!(c6.c, BigInt::zero());
    }

    #[test]
    fn extended_generators_reach_m7() {
        let c = lattice_upper(7, &GeneratorConfig::extended());
        assert_eq!(c.m, BigInt::from(14));
        assert!(verify_upper(&c));
    }

    #[test]
    fn extended_generators_reach_m5() {
        let c = lattice_upper(5, &GeneratorConfig::extended());
        assert_eq!(c.m, BigInt::from(10));
        assert!(verify_upper(&c));
        assert_eq!(lattice_upper(5, &GeneratorConfig::default()).m, BigInt::from(30));
    }

    #[test]
    fn generator_family() {
        let g = GeneratorConfig::default().polynomials(3);
        // 1, x - 0..3 (4), then a in {1,2} x b in -3..3 minus duplicates of x - i
        assert_eq!(g[0], Poly::one());
        assert_eq!(g.len(), 1 + 4 + 14 - 4);
        let e = GeneratorConfig::extended().polynomials(3);
        assert!(e.iter().all(|p| !p.is_zero()));
        assert_eq!(e.len() - g.len(), 243 - 9);
    }
}
