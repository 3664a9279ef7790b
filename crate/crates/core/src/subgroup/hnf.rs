//! Hermite normal form for subgroups of `Z^d` and `(Z/q)^d`.
//!
//! Rows are kept in echelon form keyed by pivot column. A subgroup of
//! `(Z/q)^d` is handled as the lattice in `Z^d` that contains `q Z^d`, so every
//! entry may be reduced modulo `q` at any time. Optionally each row carries
//! the integer combination of inserted generators that produced it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::SubgroupError;

/// `(Z/q)^d`, or the free group `Z^d` when `exponent == 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AmbientGroup {
    pub rank: usize,
    pub exponent: u64,
}

impl AmbientGroup {
    pub fn free(rank: usize) -> Self {
        AmbientGroup { rank, exponent: 0 }
    }

    pub fn modular(rank: usize, q: u64) -> Self {
        AmbientGroup { rank, exponent: q }
    }

    pub fn is_free(&self) -> bool {
        self.exponent == 0
    }
}

/// Canonical HNF basis: pivots strictly increasing left to right, each pivot
/// positive, entries above a pivot in `[0, pivot)`. For `(Z/q)^d` the basis
/// always has full rank with pivots dividing `q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HnfBasis {
    ambient: AmbientGroup,
    rows: Vec<Vec<BigInt>>,
}

#[derive(Clone, Debug)]
struct Row {
    v: Vec<BigInt>,
    combo: Option<Vec<BigInt>>,
}

/// Incremental HNF construction.
#[derive(Clone, Debug)]
pub struct HnfBuilder {
    ambient: AmbientGroup,
    q: Option<BigInt>,
    pivots: Vec<Option<Row>>,
    tracked: Option<usize>,
    inserted: usize,
}

/// Extended gcd with a non-negative gcd: `s*a + t*b = g`.
fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

fn lin(s: &BigInt, u: &[BigInt], t: &BigInt, v: &[BigInt]) -> Vec<BigInt> {
    u.iter().zip(v).map(|(a, b)| s * a + t * b).collect()
}

impl HnfBuilder {
    pub fn new(ambient: AmbientGroup) -> Self {
        let q = (!ambient.is_free()).then(|| BigInt::from(ambient.exponent));
        let mut b = HnfBuilder {
            ambient,
            q,
            pivots: vec![None; ambient.rank],
            tracked: None,
            inserted: 0,
        };
        if let Some(q) = b.q.clone() {
            for i in 0..ambient.rank {
                let mut v = vec![BigInt::zero(); ambient.rank];
                v[i] = q.clone();
                b.insert_row(Row { v, combo: None });
            }
        }
        b
    }

    /// Builder over the free group `Z^d` that records, for each basis row, its
    /// coefficients in terms of the next `generators` inserted vectors.
    pub fn tracking(rank: usize, generators: usize) -> Self {
        let mut b = Self::new(AmbientGroup::free(rank));
        b.tracked = Some(generators);
        b
    }

    pub fn ambient(&self) -> AmbientGroup {
        self.ambient
    }

    /// True once the span is the whole ambient group.
    pub fn is_full(&self) -> bool {
        self.pivots
            .iter()
            .enumerate()
            .all(|(c, p)| p.as_ref().is_some_and(|r| r.v[c].is_one()))
    }

    pub fn insert(&mut self, v: &[BigInt]) -> Result<(), SubgroupError> {
        if v.len() != self.ambient.rank {
            return Err(SubgroupError::DimensionMismatch { expected: self.ambient.rank, got: v.len() });
        }
        let combo = match self.tracked {
            Some(n) => {
                if self.inserted >= n {
                    return Err(SubgroupError::TooManyGenerators(n));
                }
                let mut c = vec![BigInt::zero(); n];
                c[self.inserted] = BigInt::one();
                Some(c)
            }
            None => None,
        };
        self.inserted += 1;
        let row = Row { v: self.reduce_mod_q(v.to_vec()), combo };
        self.insert_row(row);
        Ok(())
    }

    fn reduce_mod_q(&self, v: Vec<BigInt>) -> Vec<BigInt> {
        match &self.q {
            Some(q) => v.into_iter().map(|x| x.mod_floor(q)).collect(),
            None => v,
        }
    }

    fn insert_row(&mut self, mut row: Row) {
        for c in 0..self.ambient.rank {
            if row.v[c].is_zero() {
                continue;
            }
            let Some(piv) = self.pivots[c].take() else {
                if row.v[c].is_negative() {
                    negate(&mut row);
                }
                self.pivots[c] = Some(row);
                self.size_reduce_from(c);
                return;
            };
            let a = &piv.v[c];
            let b = &row.v[c];
            let (g, s, t) = ext_gcd(a, b);
            let (ag, bg) = (a / &g, b / &g);
            // [s t; -b/g a/g] is unimodular
            let new_piv = Row {
                v: lin(&s, &piv.v, &t, &row.v),
                combo: combine(&s, &piv.combo, &t, &row.combo),
            };
            let nbg = -&bg;
            row = Row {
                v: lin(&nbg, &piv.v, &ag, &row.v),
                combo: combine(&nbg, &piv.combo, &ag, &row.combo),
            };
            row.v = self.reduce_mod_q(std::mem::take(&mut row.v));
            let new_piv = Row { v: self.reduce_mod_q(new_piv.v), combo: new_piv.combo };
            debug_assert!(row.v[c].is_zero());
            self.pivots[c] = Some(new_piv);
            self.size_reduce_from(c);
        }
    }

    /// Reduces the entries of row `c` to the right of its pivot, then the
    /// entries in column `c` of the rows above it.
    fn size_reduce_from(&mut self, c: usize) {
        let mut row = self.pivots[c].take().expect("pivot present");
        self.reduce_against_lower(&mut row, c);
        self.pivots[c] = Some(row);
        for upper in 0..c {
            if let Some(mut r) = self.pivots[upper].take() {
                self.reduce_against_lower(&mut r, upper);
                self.pivots[upper] = Some(r);
            }
        }
    }

    /// Brings each entry of `row` right of column `from` into `[0, pivot)`
    /// using the pivot rows below it.
    fn reduce_against_lower(&self, row: &mut Row, from: usize) {
        for c in from + 1..self.ambient.rank {
            let Some(p) = &self.pivots[c] else { continue };
            let pv = &p.v[c];
            let f = row.v[c].div_floor(pv);
            if f.is_zero() {
                continue;
            }
            let nf = -&f;
            for (x, y) in row.v.iter_mut().zip(&p.v) {
                *x += &nf * y;
            }
            if let (Some(rc), Some(pc)) = (row.combo.as_mut(), p.combo.as_ref()) {
                for (x, y) in rc.iter_mut().zip(pc) {
                    *x += &nf * y;
                }
            }
            if let Some(q) = &self.q {
                for x in row.v.iter_mut() {
                    *x = x.mod_floor(q);
                }
            }
        }
    }

    /// The basis row whose pivot sits in column `c`, with its combination record.
    pub fn pivot_row(&self, c: usize) -> Option<(&[BigInt], Option<&[BigInt]>)> {
        self.pivots
            .get(c)?
            .as_ref()
            .map(|r| (r.v.as_slice(), r.combo.as_deref()))
    }

    pub fn finish(self) -> HnfBasis {
        let mut rows: Vec<Vec<BigInt>> = Vec::new();
        for c in 0..self.ambient.rank {
            if let Some(r) = &self.pivots[c] {
                rows.push(r.v.clone());
            }
        }
        HnfBasis { ambient: self.ambient, rows }
    }
}

fn negate(row: &mut Row) {
    for x in row.v.iter_mut() {
        *x = -&*x;
    }
    if let Some(c) = row.combo.as_mut() {
        for x in c.iter_mut() {
            *x = -&*x;
        }
    }
}

fn combine(
    s: &BigInt,
    u: &Option<Vec<BigInt>>,
    t: &BigInt,
    v: &Option<Vec<BigInt>>,
) -> Option<Vec<BigInt>> {
    match (u, v) {
        (Some(u), Some(v)) => Some(lin(s, u, t, v)),
        _ => None,
    }
}

/// HNF of the subgroup generated by `generators` (plus `q e_i` when modular).
pub fn hnf(ambient: AmbientGroup, generators: &[Vec<BigInt>]) -> Result<HnfBasis, SubgroupError> {
    let mut b = HnfBuilder::new(ambient);
    for g in generators {
        b.insert(g)?;
    }
    Ok(b.finish())
}

impl HnfBasis {
    pub fn ambient(&self) -> AmbientGroup {
        self.ambient
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    fn pivot_of(row: &[BigInt]) -> usize {
        row.iter().position(|x| !x.is_zero()).expect("nonzero row")
    }

    /// Membership by back-substitution against the pivots.
    pub fn contains(&self, v: &[BigInt]) -> Result<bool, SubgroupError> {
        let d = self.ambient.rank;
        if v.len() != d {
            return Err(SubgroupError::DimensionMismatch { expected: d, got: v.len() });
        }
        let q = (!self.ambient.is_free()).then(|| BigInt::from(self.ambient.exponent));
        let reduce = |x: &mut Vec<BigInt>| {
            if let Some(q) = &q {
                for e in x.iter_mut() {
                    *e = e.mod_floor(q);
                }
            }
        };
        let mut v = v.to_vec();
        reduce(&mut v);
        let mut rows = self.rows.iter().peekable();
        for c in 0..d {
            let row = match rows.peek() {
                Some(r) if Self::pivot_of(r) == c => rows.next(),
                _ => None,
            };
            if v[c].is_zero() {
                continue;
            }
            let Some(row) = row else { return Ok(false) };
            let (f, rem) = v[c].div_rem(&row[c]);
            if !rem.is_zero() {
                return Ok(false);
            }
            for (x, y) in v.iter_mut().zip(row) {
                *x -= &f * y;
            }
            reduce(&mut v);
        }
        Ok(v.iter().all(Zero::is_zero))
    }

    /// Least `t >= 1` with `t*v` in the span; always divides `q`.
    pub fn element_order(&self, v: &[BigInt]) -> Result<u64, SubgroupError> {
        if self.ambient.is_free() {
            return Err(SubgroupError::FreeAmbient);
        }
        let q = self.ambient.exponent;
        let mut divisors: Vec<u64> = (1..).take_while(|d| d * d <= q).filter(|d| q % d == 0).collect();
        let big: Vec<u64> = divisors.iter().rev().map(|d| q / d).collect();
        divisors.extend(big);
        divisors.dedup();
        for t in divisors {
            let tv: Vec<BigInt> = v.iter().map(|x| x * t).collect();
            if self.contains(&tv)? {
                return Ok(t);
            }
        }
        unreachable!("q * v is zero in (Z/q)^d")
    }

    /// Whether the span is the whole ambient group (every pivot is 1, full rank).
    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ambient.rank
            && self.rows.iter().enumerate().all(|(i, r)| r[i].is_one())
    }
}
