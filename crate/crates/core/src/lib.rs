//! Computation and certification of `m(k)`: the least positive integer `m`
//! such that `m*x` is an integer combination of `k`-th powers in `Z[x]`.
//!
//! * [`algebra`]: exact integers, polynomials, quotient rings, finite fields.
//! * [`formula`]: the closed form `m(k) = k * a(k) * b(k)`.
//! * [`subgroup`]: Hermite normal forms and the subgroups `J(k, R)`, `K(k, R)`.
//! * [`certify`]: upper-bound identities and lower-bound ring witnesses.
//! * [`tables`]: the `k <= 150` table, rendering, OEIS b-file cross-checks.
//! * [`checks`]: named invariant sweeps behind `mkpoly selftest`.

pub mod algebra;
pub mod formula;
pub mod subgroup;
pub mod certify;
pub mod tables;
pub mod checks;
