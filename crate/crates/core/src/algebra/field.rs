use num_bigint::BigInt;

use super::{AlgebraError, Poly, QuotientRingSpec, Result, RingElement};

/// `F_{p^j} = F_p[x]/(f)` with `f` verified irreducible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteFieldSpec {
    p: u64,
    ring: QuotientRingSpec,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Remainder of `a` modulo the monic `b` over `F_p`; both lowest-first.
fn rem_mod_p(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        if lead != 0 {
            for (j, &bj) in b.iter().enumerate() {
                let t = (lead as u128 * bj as u128 % p as u128) as u64;
                r[shift + j] = (r[shift + j] + p - t) % p;
            }
        }
        r.pop();
    }
    r
}

/// Monic polynomial of degree `deg` whose low coefficients are the base-`p`
/// digits of `n` (`c_0` least significant).
fn monic_from_index(mut n: u64, deg: usize, p: u64) -> Vec<u64> {
    let mut c: Vec<u64> = (0..deg)
        .map(|_| {
            let d = n % p;
            n /= p;
            d
        })
        .collect();
    c.push(1);
    c
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
fn is_irreducible_mod_p(f: &[u64], p: u64) -> bool {
    let deg = f.len() - 1;
    for dg in 1..=deg / 2 {
        let count = p.pow(dg as u32);
        for n in 0..count {
            let g = monic_from_index(n, dg, p);
            if rem_mod_p(f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

impl FiniteFieldSpec {
    pub fn new(p: u64, irreducible: &Poly) -> Result<Self> {
        if !is_prime(p) {
            return Err(AlgebraError::NotPrime(p));
        }
        let ring = QuotientRingSpec::new(p, irreducible)?;
        let f: Vec<u64> = ring
            .quotient_poly()
            .coeffs()
            .iter()
            .map(|c| u64::try_from(c).expect("reduced"))
            .collect();
        if !is_irreducible_mod_p(&f, p) {
            return Err(AlgebraError::Reducible { poly: ring.quotient_poly().to_string(), p });
        }
        Ok(FiniteFieldSpec { p, ring })
    }

    /// `F_{p^j}` modulo the lexicographically least monic irreducible of degree `j`,
    /// ordered on `(c_{j-1}, ..., c_0)`.
    pub fn default_for(p: u64, j: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(AlgebraError::NotPrime(p));
        }
        if j == 0 {
            return Err(AlgebraError::NotMonic);
        }
        let count = p
            .checked_pow(j as u32)
            .ok_or(AlgebraError::NoIrreducible { p, degree: j })?;
        (0..count)
            .map(|n| monic_from_index(n, j, p))
            .find(|f| is_irreducible_mod_p(f, p))
            .map(|f| {
                let poly = Poly::new(f.into_iter().map(BigInt::from).collect());
                FiniteFieldSpec { p, ring: QuotientRingSpec::new(p, &poly).expect("monic") }
            })
            .ok_or(AlgebraError::NoIrreducible { p, degree: j })
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.ring.degree()
    }

    pub fn ring(&self) -> &QuotientRingSpec {
        &self.ring
    }

    pub fn into_ring(self) -> QuotientRingSpec {
        self.ring
    }

    /// Absolute trace `u + u^p + ... + u^{p^{j-1}}`, which lands in `F_p`.
    pub fn trace(&self, u: &RingElement) -> Result<RingElement> {
        let mut acc = self.ring.zero();
        let mut conj = u.clone();
        for _ in 0..self.degree() {
            acc = self.ring.add(&acc, &conj)?;
            conj = self.ring.pow(&conj, self.p)?;
        }
        Ok(acc)
    }

    /// A root `h` of `h + h^2 = c`, or `None` when there is none
    /// (exactly when the trace of `c` is 1). Characteristic 2 only.
    pub fn artin_schreier_solve(&self, c: &RingElement) -> Result<Option<RingElement>> {
        if self.p != 2 {
            return Err(AlgebraError::NotCharacteristicTwo(self.p));
        }
        if !self.ring.contains(c) {
            return Err(AlgebraError::RingMismatch { ring: self.ring.to_string() });
        }
        let j = self.degree();
        // h -> h + h^2 is F_2-linear; column i is the image of x^i.
        // Augmented rows: row r holds coefficient r of each column image, then c_r.
        let mut rows: Vec<Vec<u8>> = vec![vec![0; j + 1]; j];
        for i in 0..j {
            let b = self.ring.basis_element(i);
            let img = self.ring.add(&b, &self.ring.mul(&b, &b)?)?;
            for (r, &v) in img.coeffs().iter().enumerate() {
                rows[r][i] = v as u8;
            }
        }
        for (r, &v) in c.coeffs().iter().enumerate() {
            rows[r][j] = v as u8;
        }
        let mut pivot_cols = Vec::new();
        let mut rank = 0;
        for col in 0..j {
            let Some(pr) = (rank..j).find(|&r| rows[r][col] == 1) else {
                continue;
            };
            rows.swap(rank, pr);
            for r in 0..j {
                if r != rank && rows[r][col] == 1 {
                    let pivot_row = rows[rank].clone();
                    for (x, y) in rows[r].iter_mut().zip(pivot_row) {
                        *x ^= y;
                    }
                }
            }
            pivot_cols.push(col);
            rank += 1;
        }
        if rows[rank..].iter().any(|row| row[j] == 1) {
            return Ok(None);
        }
        let mut h = vec![0u64; j];
        for (r, &col) in pivot_cols.iter().enumerate() {
            h[col] = rows[r][j] as u64;
        }
        Ok(Some(self.ring.element(h)?))
    }
}
