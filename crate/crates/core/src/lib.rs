//! q-series arithmetic for l-regular bipartitions.
//!
//! The crate computes bipartition counts B_l(n) from truncated
//! Euler-product expansions, certifies eta-quotients as holomorphic
//! modular forms on Gamma_0(N) (level, weight, Nebentypus character,
//! cusp orders), applies Hecke operators to q-expansions, and runs
//! empirical verifiers for arithmetic-progression congruences and
//! coefficient-density scans.
//!
//! Module map:
//! - [`arith`]: Kronecker symbols, factored integers, divisors, primality
//! - [`series`]: truncated power series over Z or Z/mZ
//! - [`partitions`]: B_l(n) and b_l(n), series route and brute-force oracle
//! - [`eta`]: symbolic eta-quotients and modularity certificates
//! - [`hecke`]: Hecke operators, eigenform checks, nilpotency probing
//! - [`congruence`]: progression verifiers, density scans, reports
//!
//! ```
//! use qregular::eta::EtaQuotient;
//! use qregular::partitions::{bipartition_series, brute_force_bipartition};
//! use qregular::series::Coefficient;
//!
//! // B_2(n) counts pairs of odd-part partitions with total size n.
//! let b2 = bipartition_series(2, 100, None).series;
//! assert_eq!(b2.coeff(2), Coefficient::Exact(brute_force_bipartition(2, 2)));
//!
//! // eta(12z)^2 is a holomorphic weight-1 form on Gamma_0(144).
//! let cert = EtaQuotient::from_terms([(12, 2)]).certify();
//! assert!(cert.holomorphic && cert.level == 144);
//! ```

pub mod arith;
pub mod congruence;
pub mod eta;
pub mod hecke;
pub mod partitions;
pub mod series;

pub use arith::{kronecker, kronecker_factored, FactoredInteger};
pub use eta::{EtaQuotient, ModularityCertificate};
pub use series::{Coefficient, TruncatedSeries};
