//! Text forms: `x^2+x+1`, `Z/8[x]/(x^2+x+1)`, `GF(2^4)`.

use num_bigint::BigInt;
use num_traits::One;

use super::{AlgebraError, FiniteFieldSpec, Poly, QuotientRingSpec, Result};

fn err(msg: impl Into<String>) -> AlgebraError {
    AlgebraError::Parse(msg.into())
}

/// Parses a sparse polynomial in `x` with integer coefficients,
/// e.g. `x^3 - 6x^2 + 12*x - 8`.
pub fn parse_poly(s: &str) -> Result<Poly> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(err("empty polynomial"));
    }
    let mut coeffs: Vec<BigInt> = Vec::new();
    let mut rest = s.as_str();
    let mut first = true;
    while !rest.is_empty() {
        let negative = match rest.as_bytes()[0] {
            b'+' => {
                rest = &rest[1..];
                false
            }
            b'-' => {
                rest = &rest[1..];
                true
            }
            _ if first => false,
            _ => return Err(err(format!("expected '+' or '-' before '{rest}'"))),
        };
        first = false;
        let end = rest.find(['+', '-']).unwrap_or(rest.len());
        let (term, tail) = rest.split_at(end);
        rest = tail;
        let (coef, exp) = parse_term(term)?;
        let coef = if negative { -coef } else { coef };
        if coeffs.len() <= exp {
            coeffs.resize(exp + 1, BigInt::default());
        }
        coeffs[exp] += coef;
    }
    Ok(Poly::new(coeffs))
}

fn parse_term(term: &str) -> Result<(BigInt, usize)> {
    if term.is_empty() {
        return Err(err("empty term"));
    }
    let Some(xpos) = term.find('x') else {
        let c = term.parse::<BigInt>().map_err(|_| err(format!("bad coefficient '{term}'")))?;
        return Ok((c, 0));
    };
    let coef_part = term[..xpos].trim_end_matches('*');
    let coef = if coef_part.is_empty() {
        BigInt::one()
    } else {
        coef_part
            .parse::<BigInt>()
            .map_err(|_| err(format!("bad coefficient '{coef_part}'")))?
    };
    let after = &term[xpos + 1..];
    let exp = if after.is_empty() {
        1
    } else if let Some(e) = after.strip_prefix('^') {
        e.parse::<usize>().map_err(|_| err(format!("bad exponent '{e}'")))?
    } else {
        return Err(err(format!("unexpected '{after}' after x")));
    };
    Ok((coef, exp))
}

/// Parses `Z/<q>[x]/(<poly>)` or `GF(<p>^<j>)` / `GF(<p>)`; finite fields use
/// the lexicographically least monic irreducible.
pub fn parse_ring(s: &str) -> Result<QuotientRingSpec> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some(inner) = s.strip_prefix("GF(").and_then(|t| t.strip_suffix(')')) {
        let (p, j) = match inner.split_once('^') {
            Some((p, j)) => (p, j),
            None => (inner, "1"),
        };
        let p = p.parse::<u64>().map_err(|_| err(format!("bad characteristic '{p}'")))?;
        let j = j.parse::<usize>().map_err(|_| err(format!("bad extension degree '{j}'")))?;
        return Ok(FiniteFieldSpec::default_for(p, j)?.into_ring());
    }
    let body = s
        .strip_prefix("Z/")
        .ok_or_else(|| err(format!("ring spec must start with 'Z/' or 'GF(': '{s}'")))?;
    let (q, tail) = body
        .split_once("[x]/(")
        .ok_or_else(|| err("expected '[x]/(' after the modulus"))?;
    let poly = tail.strip_suffix(')').ok_or_else(|| err("missing closing ')'"))?;
    let q = q.parse::<u64>().map_err(|_| err(format!("bad modulus '{q}'")))?;
    QuotientRingSpec::new(q, &parse_poly(poly)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials() {
        assert_eq!(parse_poly("x^2+x+1").unwrap(), Poly::from_i64(&[1, 1, 1]));
        assert_eq!(parse_poly("x^3 - 6x^2 + 12*x - 8").unwrap(), Poly::from_i64(&[-8, 12, -6, 1]));
        assert_eq!(parse_poly("-x").unwrap(), Poly::from_i64(&[0, -1]));
        assert_eq!(parse_poly("x").unwrap(), Poly::x());
        assert_eq!(parse_poly("3").unwrap(), Poly::from_i64(&[3]));
        assert_eq!(parse_poly("x+x").unwrap(), Poly::from_i64(&[0, 2]));
        assert!(parse_poly("").is_err());
        assert!(parse_poly("x^").is_err());
        assert!(parse_poly("2y").is_err());
        assert!(parse_poly("x++1").is_err());
    }

    #[test]
    fn display_round_trip() {
        for c in [&[1, 1, 1][..], &[-8, 12, -6, 1], &[0, 0, 0, 1], &[5], &[0, -3, 0, 2]] {
            let p = Poly::from_i64(c);
            assert_eq!(parse_poly(&p.to_string()).unwrap(), p);
        }
    }

    #[test]
    fn rings() {
        let r = parse_ring("Z/8[x]/(x^2+x+1)").unwrap();
        assert_eq!((r.modulus(), r.degree()), (8, 2));
        assert_eq!(parse_ring(&r.to_string()).unwrap(), r);
        assert_eq!(parse_ring("Z/4[x]/(x)").unwrap().degree(), 1);
        assert_eq!(parse_ring("GF(2^2)").unwrap().to_string(), "Z/2[x]/(x^2+x+1)");
        assert_eq!(parse_ring("GF(7)").unwrap().to_string(), "Z/7[x]/(x)");
        assert!(matches!(parse_ring("GF(6^2)"), Err(AlgebraError::NotPrime(6))));
        assert!(parse_ring("Z/8[x]/(2x^2+1)").is_err());
        assert!(parse_ring("Q[x]").is_err());
        assert!(parse_ring("Z/0[x]/(x)").is_err());
    }
}
