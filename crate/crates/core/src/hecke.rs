//! Hecke operators T_m acting on truncated q-expansions, eigenform
//! verification, and nilpotency probing modulo powers of two.
//!
//! For f = sum a(n) q^n of weight k and character chi on Gamma_0(N),
//!
//! ```text
//! f | T_m = sum_n ( sum_{d | gcd(n,m)} chi(d) d^{k-1} a(m n / d^2) ) q^n
//! ```
//!
//! Reading a(m n) caps the usable output range: applying T_m to a series
//! truncated at N yields a series truncated at floor(N / m). Callers must
//! not compare past that point.

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use crate::arith::{divisors, gcd, is_prime, kronecker_factored, mod_pow, FactoredInteger};
use crate::eta::ModularityCertificate;
use crate::series::{Coefficient, TruncatedSeries};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HeckeError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("series is not normalized: a(1) must be 1")]
    Unnormalized,
    #[error("truncation {have} too small: need coefficients up to {needed}")]
    TruncationTooSmall { needed: usize, have: usize },
    #[error("nilpotency probe requires a power-of-two modulus, got {0:?}")]
    ModulusNotPowerOfTwo(Option<u64>),
    #[error("probe prime {0} is not coprime to 6")]
    PrimeNotCoprimeToSix(u64),
    #[error("Hecke context requires a positive integral weight and a character")]
    InvalidContext,
}

/// Weight, character and level of the form a q-expansion is attached to.
#[derive(Clone, Debug)]
pub struct HeckeContext {
    pub weight: u64,
    pub character_top: FactoredInteger,
    pub level: u64,
}

impl HeckeContext {
    pub fn new(weight: u64, character_top: FactoredInteger, level: u64) -> Self {
        assert!(weight >= 1, "Hecke action needs integral weight k >= 1");
        HeckeContext {
            weight,
            character_top,
            level,
        }
    }

    /// Build from a holomorphicity certificate.
    pub fn from_certificate(cert: &ModularityCertificate) -> Result<Self, HeckeError> {
        let w = cert.weight;
        if !w.is_integer() || *w.numer() < 1 {
            return Err(HeckeError::InvalidContext);
        }
        let top = cert
            .character_top
            .clone()
            .ok_or(HeckeError::InvalidContext)?;
        Ok(HeckeContext::new(w.to_integer() as u64, top, cert.level))
    }

    /// chi(d) in {-1, 0, 1}.
    pub fn chi(&self, d: u64) -> i32 {
        kronecker_factored(&self.character_top, d as i64)
    }

    /// chi(d) * d^{k-1} in the coefficient kind of the target series.
    /// Modular contexts use modular exponentiation, so astronomically
    /// large weights stay cheap; exact contexts materialize the power.
    fn scaled_power(&self, d: u64, modulus: Option<u64>) -> Coefficient {
        let chi = self.chi(d);
        match modulus {
            Some(m) => {
                if chi == 0 {
                    return Coefficient::Residue(0);
                }
                let p = mod_pow(d, self.weight - 1, m);
                Coefficient::Residue(if chi == 1 { p } else { (m - p) % m })
            }
            None => {
                if chi == 0 {
                    return Coefficient::Exact(BigInt::from(0));
                }
                let exp = self.weight - 1;
                let mut acc = BigInt::one();
                let mut base = BigInt::from(d);
                let mut e = exp;
                while e > 0 {
                    if e & 1 == 1 {
                        acc *= &base;
                    }
                    e >>= 1;
                    if e > 0 {
                        base = &base * &base;
                    }
                }
                Coefficient::Exact(if chi == 1 { acc } else { -acc })
            }
        }
    }
}

/// Apply T_p for a prime p: coefficient n of the result is
/// a(pn) + chi(p) p^{k-1} a(n/p), with a(n/p) = 0 unless p | n.
/// The result is truncated at floor(N / p).
pub fn apply_tp(
    f: &TruncatedSeries,
    p: u64,
    ctx: &HeckeContext,
) -> Result<TruncatedSeries, HeckeError> {
    if !is_prime(p) {
        return Err(HeckeError::NotPrime(p));
    }
    let out_trunc = f.truncation() / p as usize;
    let term = ctx.scaled_power(p, f.modulus());
    let p = p as usize;
    Ok(match (f.residues(), f.modulus()) {
        (Some(a), Some(m)) => {
            let Coefficient::Residue(t) = term else {
                unreachable!()
            };
            let coeffs: Vec<u64> = (0..=out_trunc)
                .map(|n| {
                    let mut c = a[p * n];
                    if n % p == 0 {
                        c = (c + (t as u128 * a[n / p] as u128 % m as u128) as u64) % m;
                    }
                    c
                })
                .collect();
            TruncatedSeries::from_residues_unchecked(m, coeffs)
        }
        _ => {
            let a = f.exact_coeffs().expect("exact representation");
            let Coefficient::Exact(t) = term else {
                unreachable!()
            };
            let coeffs: Vec<BigInt> = (0..=out_trunc)
                .map(|n| {
                    let mut c = a[p * n].clone();
                    if n % p == 0 {
                        c += &t * &a[n / p];
                    }
                    c
                })
                .collect();
            TruncatedSeries::from_bigints(coeffs)
        }
    })
}

/// Apply the general T_m: coefficient n of the result is
/// sum over d | gcd(n, m) of chi(d) d^{k-1} a(m n / d^2); truncation
/// drops to floor(N / m).
pub fn apply_tm(
    f: &TruncatedSeries,
    m_op: u64,
    ctx: &HeckeContext,
) -> Result<TruncatedSeries, HeckeError> {
    assert!(m_op >= 1);
    let out_trunc = f.truncation() / m_op as usize;
    Ok(match (f.residues(), f.modulus()) {
        (Some(a), Some(modulus)) => {
            let coeffs: Vec<u64> = (0..=out_trunc)
                .map(|n| {
                    let mut acc: u64 = 0;
                    for d in divisors(gcd(n as u64, m_op)) {
                        let Coefficient::Residue(t) = ctx.scaled_power(d, Some(modulus)) else {
                            unreachable!()
                        };
                        let idx = (m_op * n as u64 / (d * d)) as usize;
                        acc =
                            (acc + (t as u128 * a[idx] as u128 % modulus as u128) as u64) % modulus;
                    }
                    acc
                })
                .collect();
            TruncatedSeries::from_residues_unchecked(modulus, coeffs)
        }
        _ => {
            let a = f.exact_coeffs().expect("exact representation");
            let coeffs: Vec<BigInt> = (0..=out_trunc)
                .map(|n| {
                    let mut acc = BigInt::from(0);
                    for d in divisors(gcd(n as u64, m_op)) {
                        let Coefficient::Exact(t) = ctx.scaled_power(d, None) else {
                            unreachable!()
                        };
                        let idx = (m_op * n as u64 / (d * d)) as usize;
                        acc += t * &a[idx];
                    }
                    acc
                })
                .collect();
            TruncatedSeries::from_bigints(coeffs)
        }
    })
}

/// If f is a normalized eigenvector of T_p up to the comparable
/// truncation, return the eigenvalue a(p); otherwise None.
pub fn eigen_check(
    f: &TruncatedSeries,
    p: u64,
    ctx: &HeckeContext,
) -> Result<Option<Coefficient>, HeckeError> {
    if f.truncation() < p as usize {
        return Err(HeckeError::TruncationTooSmall {
            needed: p as usize,
            have: f.truncation(),
        });
    }
    let one = match f.modulus() {
        None => Coefficient::Exact(BigInt::one()),
        Some(_) => Coefficient::Residue(1),
    };
    if f.coeff(1) != one {
        return Err(HeckeError::Unnormalized);
    }
    let lambda = f.coeff(p as usize);
    let transformed = apply_tp(f, p, ctx)?;
    let expected = f
        .scale(&lambda)
        .expect("matching kinds")
        .truncated(transformed.truncation());
    Ok(if transformed == expected {
        Some(lambda)
    } else {
        None
    })
}

/// Outcome of a nilpotency probe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeReport {
    /// Length of the shortest operator prefix after which the truncated
    /// series vanished, or None if it never did ("not reached").
    pub vanished_after: Option<usize>,
    /// Number of operators applied.
    pub applied: usize,
    /// Truncation of the final series; every verdict is relative to it.
    pub final_truncation: usize,
}

/// Apply T_{p_1}, T_{p_2}, ... left to right to a series modulo a power
/// of two and report the first prefix after which everything visible
/// vanishes. Purely observational: it measures, it does not bound.
pub fn nilpotency_probe(
    f: &TruncatedSeries,
    primes: &[u64],
    ctx: &HeckeContext,
) -> Result<ProbeReport, HeckeError> {
    match f.modulus() {
        Some(m) if m.is_power_of_two() => {}
        other => return Err(HeckeError::ModulusNotPowerOfTwo(other)),
    }
    for &p in primes {
        if !is_prime(p) {
            return Err(HeckeError::NotPrime(p));
        }
        if p % 2 == 0 || p % 3 == 0 {
            return Err(HeckeError::PrimeNotCoprimeToSix(p));
        }
    }
    let mut current = f.clone();
    if current.is_zero() {
        return Ok(ProbeReport {
            vanished_after: Some(0),
            applied: 0,
            final_truncation: current.truncation(),
        });
    }
    for (i, &p) in primes.iter().enumerate() {
        current = apply_tp(&current, p, ctx)?;
        if current.is_zero() {
            return Ok(ProbeReport {
                vanished_after: Some(i + 1),
                applied: i + 1,
                final_truncation: current.truncation(),
            });
        }
    }
    Ok(ProbeReport {
        vanished_after: None,
        applied: primes.len(),
        final_truncation: current.truncation(),
    })
}
