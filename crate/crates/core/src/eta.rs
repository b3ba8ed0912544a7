//! Symbolic eta-quotients f(z) = prod eta(delta z)^{r_delta}: weight,
//! level, Nebentypus character, cusp orders, holomorphicity certificates
//! and q-expansions.
//!
//! # Conventions
//!
//! - The admissibility conditions are `sum delta * r_delta = 0 (mod 24)`
//!   and `sum (N/delta) * r_delta = 0 (mod 24)` with every delta dividing
//!   the level N. The first condition does not depend on N; the second is
//!   what the level search scans for.
//! - The order of vanishing at a cusp c/d of Gamma_0(N) depends only on
//!   the divisor d of N:
//!
//!   ```text
//!   ord(f, d) = (N/24) * sum_delta gcd(d, delta)^2 * r_delta
//!                           / (gcd(d, N/d) * d * delta)
//!   ```
//!
//!   Orders are exact rationals; holomorphicity is a sign test, never a
//!   float comparison.
//! - The character attached to an admissible quotient of integral weight
//!   k is d -> kronecker((-1)^k * s, d) with s = prod delta^{r_delta},
//!   carried in factored form because the exponents grow geometrically
//!   in the families below.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{divisors, gcd, lcm, FactoredInteger};
use crate::series::{pentagonal_series, TruncatedSeries};

/// Exact rational with 128-bit components; wide enough for every cusp
/// order and weight that fits in memory-bounded levels.
pub type Rational = Ratio<i128>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EtaError {
    #[error(
        "sum of delta*r is {sum_mod_24} mod 24, so no level satisfies the admissibility conditions"
    )]
    NotLevelAdmissible { sum_mod_24: i64 },
    #[error(
        "fractional-exponent expansion: leading exponent {num}/{den} is not a nonnegative integer"
    )]
    FractionalExponent { num: i128, den: i128 },
    #[error("weight {num}/{den} is not an integer, so no Nebentypus character is attached")]
    NonIntegralWeight { num: i128, den: i128 },
    #[error("{d} does not divide the level {level}")]
    NotADivisor { d: u64, level: u64 },
    #[error("cannot parse eta-quotient spec: {0}")]
    Parse(String),
}

/// A finite product prod eta(delta z)^{r_delta} with delta >= 1 and
/// nonzero integer exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaQuotient {
    terms: BTreeMap<u64, i64>,
}

impl EtaQuotient {
    /// The empty product (the constant function 1).
    pub fn new() -> Self {
        EtaQuotient {
            terms: BTreeMap::new(),
        }
    }

    /// Build from (delta, exponent) pairs; repeated deltas combine and
    /// zero exponents drop out.
    pub fn from_terms<I: IntoIterator<Item = (u64, i64)>>(terms: I) -> Self {
        let mut map: BTreeMap<u64, i64> = BTreeMap::new();
        for (delta, r) in terms {
            assert!(delta >= 1, "eta scale must be positive");
            let entry = map.entry(delta).or_insert(0);
            *entry += r;
            if *entry == 0 {
                map.remove(&delta);
            }
        }
        EtaQuotient { terms: map }
    }

    pub fn terms(&self) -> &BTreeMap<u64, i64> {
        &self.terms
    }

    /// k = (1/2) sum r_delta, as an exact rational.
    pub fn weight(&self) -> Rational {
        let sum: i128 = self.terms.values().map(|&r| r as i128).sum();
        Rational::new(sum, 2)
    }

    /// sum delta * r_delta; the leading q-exponent is this over 24.
    fn delta_weighted_sum(&self) -> i128 {
        self.terms
            .iter()
            .map(|(&d, &r)| d as i128 * r as i128)
            .sum()
    }

    /// sum (n/delta) * r_delta, defined when every delta divides n.
    fn inverse_weighted_sum(&self, n: u64) -> Option<i128> {
        let mut sum: i128 = 0;
        for (&d, &r) in &self.terms {
            if n % d != 0 {
                return None;
            }
            sum += (n / d) as i128 * r as i128;
        }
        Some(sum)
    }

    /// Leading exponent of the q-expansion: sum delta * r_delta / 24.
    pub fn leading_exponent(&self) -> Rational {
        Rational::new(self.delta_weighted_sum(), 24)
    }

    /// Whether `sum delta * r_delta = 0 (mod 24)` holds (the level-free
    /// half of the admissibility conditions).
    pub fn delta_sum_admissible(&self) -> bool {
        self.delta_weighted_sum().rem_euclid(24) == 0
    }

    /// Whether `n` is an admissible level: every delta divides n and
    /// both 24-conditions hold.
    pub fn is_admissible_level(&self, n: u64) -> bool {
        self.delta_sum_admissible()
            && matches!(self.inverse_weighted_sum(n), Some(s) if s.rem_euclid(24) == 0)
    }

    /// Least multiple of lcm(delta) with `sum (N/delta) r_delta = 0 (mod 24)`.
    /// Always exists (M = 24 works), so this only presumes the deltas.
    fn level_search(&self) -> u64 {
        let base = self.terms.keys().fold(1u64, |acc, &d| lcm(acc, d));
        for m in 1..=24u64 {
            let n = base * m;
            if matches!(self.inverse_weighted_sum(n), Some(s) if s.rem_euclid(24) == 0) {
                return n;
            }
        }
        unreachable!("M = 24 always satisfies the congruence");
    }

    /// The least admissible level N.
    ///
    /// Errors when `sum delta * r_delta != 0 (mod 24)`; that condition is
    /// independent of N, so no level can repair it.
    pub fn minimal_level(&self) -> Result<u64, EtaError> {
        if !self.delta_sum_admissible() {
            return Err(EtaError::NotLevelAdmissible {
                sum_mod_24: self.delta_weighted_sum().rem_euclid(24) as i64,
            });
        }
        Ok(self.level_search())
    }

    /// The factored value (-1)^k * prod delta^{r_delta} whose Kronecker
    /// symbol is the Nebentypus character. Requires integral weight.
    ///
    /// When exponent cancellation leaves a prime with a negative combined
    /// exponent, the exponent is reduced mod 2: the value changes by a
    /// square, which the Kronecker symbol cannot see.
    pub fn character_top(&self) -> Result<FactoredInteger, EtaError> {
        let k = self.weight();
        if !k.is_integer() {
            return Err(EtaError::NonIntegralWeight {
                num: *k.numer(),
                den: *k.denom(),
            });
        }
        let mut exponents: BTreeMap<u64, i128> = BTreeMap::new();
        for (&delta, &r) in &self.terms {
            let factored = FactoredInteger::from_integer(delta as i64);
            for (&p, &e) in &factored.factors {
                *exponents.entry(p).or_insert(0) += e as i128 * r as i128;
            }
        }
        let mut top = FactoredInteger::one();
        if k.to_integer().rem_euclid(2) == 1 {
            top.negate();
        }
        for (p, e) in exponents {
            if e > 0 {
                top.mul_prime_power(p, u64::try_from(e).expect("exponent fits u64"));
            } else if e < 0 && e.rem_euclid(2) == 1 {
                top.mul_prime_power(p, 1);
            }
        }
        Ok(top)
    }

    /// Order of vanishing at the cusps with denominator `d` of
    /// Gamma_0(`level`), as an exact rational.
    pub fn cusp_order(&self, level: u64, d: u64) -> Result<Rational, EtaError> {
        if d == 0 || level % d != 0 {
            return Err(EtaError::NotADivisor { d, level });
        }
        let mut inner = Rational::new(0, 1);
        for (&delta, &r) in &self.terms {
            let g = gcd(d, delta) as i128;
            inner += Rational::new(g * g * r as i128, delta as i128);
        }
        let outer = Rational::new(level as i128, 24 * d as i128 * gcd(d, level / d) as i128);
        Ok(inner * outer)
    }

    /// Certificate at the minimal admissible level. If no admissible
    /// level exists, the search ignores the violated delta-sum condition
    /// and the certificate comes back non-holomorphic.
    pub fn certify(&self) -> ModularityCertificate {
        self.certify_at(self.level_search())
    }

    /// Certificate at a caller-chosen level (useful for the published
    /// levels of form families, which need not be minimal).
    pub fn certify_at(&self, level: u64) -> ModularityCertificate {
        assert!(level >= 1);
        let weight = self.weight();
        let weight_ok = weight.is_integer() && weight >= Rational::new(1, 1);
        let admissible = self.is_admissible_level(level);
        let character_top = self.character_top().ok();
        let cusp_orders: Vec<(u64, Rational)> = divisors(level)
            .into_iter()
            .map(|d| (d, self.cusp_order(level, d).expect("d divides level")))
            .collect();
        let zero = Rational::new(0, 1);
        let all_nonnegative = cusp_orders.iter().all(|(_, o)| *o >= zero);
        ModularityCertificate {
            level,
            weight,
            character_top,
            cusp_orders,
            holomorphic: weight_ok && admissible && all_nonnegative,
        }
    }

    /// q-expansion to the given truncation; coefficient n is the q^n
    /// coefficient of the quotient.
    ///
    /// Errors when the leading exponent `sum delta * r_delta / 24` is
    /// fractional or negative, since the result would not be a power
    /// series in q.
    pub fn q_expansion(
        &self,
        truncation: usize,
        modulus: Option<u64>,
    ) -> Result<TruncatedSeries, EtaError> {
        let lead = self.leading_exponent();
        if !lead.is_integer() || lead < Rational::new(0, 1) {
            return Err(EtaError::FractionalExponent {
                num: *lead.numer(),
                den: *lead.denom(),
            });
        }
        let offset = lead.to_integer() as usize;
        if offset > truncation {
            return Ok(TruncatedSeries::zero(truncation, modulus));
        }
        let inner = truncation - offset;
        let mut out = TruncatedSeries::one(inner, modulus);
        for (&delta, &r) in &self.terms {
            let base = pentagonal_series(delta, inner, modulus);
            if r > 0 {
                out = out.mul(&base.pow(r as u64)).expect("same modulus");
            } else {
                // Dividing by the sparse base |r| times is O(|r| N sqrt(N/delta)),
                // far cheaper than one division by the dense power.
                for _ in 0..r.unsigned_abs() {
                    out = out.div(&base).expect("unit constant term");
                }
            }
        }
        Ok(out.shifted(offset))
    }
}

impl Default for EtaQuotient {
    fn default() -> Self {
        Self::new()
    }
}

impl fmt::Display for EtaQuotient {
    /// Renders in the same grammar `parse_eta_spec` accepts.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "1^0");
        }
        let mut first = true;
        for (delta, r) in &self.terms {
            if !first {
                write!(f, " * ")?;
            }
            first = false;
            write!(f, "{delta}^{r}")?;
        }
        Ok(())
    }
}

/// Parse the CLI grammar for eta-quotients: `delta^exp` factors joined
/// by `*`, e.g. `"48^10 * 24^-2 * 96^-4"`. A bare `delta` means
/// exponent 1.
pub fn parse_eta_spec(input: &str) -> Result<EtaQuotient, EtaError> {
    let mut terms = Vec::new();
    for raw in input.split('*') {
        let factor = raw.trim();
        if factor.is_empty() {
            return Err(EtaError::Parse(format!("empty factor in {input:?}")));
        }
        let (delta_str, exp_str) = match factor.split_once('^') {
            Some((d, e)) => (d.trim(), e.trim()),
            None => (factor, "1"),
        };
        let delta: u64 = delta_str
            .parse()
            .map_err(|_| EtaError::Parse(format!("bad scale {delta_str:?}")))?;
        if delta == 0 {
            return Err(EtaError::Parse("scale must be positive".into()));
        }
        let exp: i64 = exp_str
            .parse()
            .map_err(|_| EtaError::Parse(format!("bad exponent {exp_str:?}")))?;
        terms.push((delta, exp));
    }
    Ok(EtaQuotient::from_terms(terms))
}

/// Modularity certificate for an eta-quotient: the level it was checked
/// at, weight, factored character top, per-divisor cusp orders and the
/// holomorphicity verdict. Failures are encoded, not raised: a quotient
/// with fractional weight or a negative order simply certifies as
/// `holomorphic: false`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModularityCertificate {
    pub level: u64,
    pub weight: Rational,
    pub character_top: Option<FactoredInteger>,
    /// (divisor d, vanishing order at cusps with denominator d), ascending in d.
    pub cusp_orders: Vec<(u64, Rational)>,
    pub holomorphic: bool,
}

impl ModularityCertificate {
    /// True when every cusp order is strictly positive (the cusp-form
    /// flavour of holomorphy); informational only.
    pub fn vanishes_at_all_cusps(&self) -> bool {
        let zero = Rational::new(0, 1);
        self.holomorphic && self.cusp_orders.iter().all(|(_, o)| *o > zero)
    }

    /// Canonical serializable document (fixed key order).
    pub fn document(&self) -> CertificateDoc {
        CertificateDoc {
            level: self.level,
            weight: if self.weight.is_integer() {
                WeightDoc::Integer(self.weight.to_integer() as i64)
            } else {
                WeightDoc::Ratio {
                    num: *self.weight.numer() as i64,
                    den: *self.weight.denom() as i64,
                }
            },
            character_top: self.character_top.as_ref().map(|top| CharacterDoc {
                sign: top.sign,
                factors: top
                    .factors
                    .iter()
                    .map(|(&p, &e)| PrimePowerDoc { p, e })
                    .collect(),
            }),
            cusps: self
                .cusp_orders
                .iter()
                .map(|(d, o)| CuspDoc {
                    d: *d,
                    order_num: i64::try_from(*o.numer()).expect("order fits i64"),
                    order_den: i64::try_from(*o.denom()).expect("order fits i64"),
                })
                .collect(),
            holomorphic: self.holomorphic,
            warnings: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.document()).expect("serializable")
    }
}

#[derive(Serialize)]
pub struct CertificateDoc {
    pub level: u64,
    pub weight: WeightDoc,
    pub character_top: Option<CharacterDoc>,
    pub cusps: Vec<CuspDoc>,
    pub holomorphic: bool,
    /// Non-fatal notes (e.g. a fractional leading exponent that blocks a
    /// q-expansion without affecting modularity); empty unless a caller
    /// attaches them.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Serialize)]
#[serde(untagged)]
pub enum WeightDoc {
    Integer(i64),
    Ratio { num: i64, den: i64 },
}

#[derive(Serialize)]
pub struct CharacterDoc {
    pub sign: i8,
    pub factors: Vec<PrimePowerDoc>,
}

#[derive(Serialize)]
pub struct PrimePowerDoc {
    pub p: u64,
    pub e: u64,
}

#[derive(Serialize)]
pub struct CuspDoc {
    pub d: u64,
    pub order_num: i64,
    pub order_den: i64,
}

/// An eta-quotient congruent, modulo a prime power, to the generating
/// series of l-regular bipartition counts along an arithmetic
/// progression of exponents, together with the level and weight at which
/// the congruence literature certifies it.
#[derive(Clone, Debug)]
pub struct WitnessForm {
    pub quotient: EtaQuotient,
    /// Certified (not necessarily minimal) level.
    pub level: u64,
    /// Integral weight.
    pub weight: u64,
    /// The l whose bipartition counts the form carries.
    pub ell: u64,
    /// Prime-power modulus of the congruence.
    pub modulus: u64,
    /// Exponent of the first potentially nonzero coefficient; coefficient
    /// 24n + leading_exponent of the expansion is B_l(n) mod `modulus`.
    pub leading_exponent: u64,
    pub alpha: u32,
    pub m: u64,
    pub j: u32,
}

/// Witness family for powers of two: for l = 2^alpha * m (m odd) the
/// quotient eta(3*2^{alpha+3} m z)^{2^{j+1}+2} / (eta(24z)^2 *
/// eta(3*2^{alpha+4} m z)^{2^j}) is congruent mod 2^{j+1} to
/// sum B_l(n) q^{24n + 2^{alpha+1} m - 2}, and is a holomorphic modular
/// form of weight 2^{j-1} on Gamma_0(9 * 2^{alpha+6} m) once
/// 2^alpha >= 2m and j >= 2 alpha.
pub fn pow2_witness(alpha: u32, m: u64, j: u32) -> WitnessForm {
    assert!(m % 2 == 1, "m must be odd");
    assert!(
        (1..=40).contains(&j) && alpha <= 40,
        "parameters out of supported range"
    );
    let d1 = 3 * (1u64 << (alpha + 3)) * m;
    let d2 = 24;
    let d3 = 3 * (1u64 << (alpha + 4)) * m;
    let quotient =
        EtaQuotient::from_terms([(d1, (1i64 << (j + 1)) + 2), (d2, -2), (d3, -(1i64 << j))]);
    let leading = (1u64 << (alpha + 1)) * m - 2;
    debug_assert_eq!(
        quotient.leading_exponent(),
        Rational::new(leading as i128, 1)
    );
    WitnessForm {
        quotient,
        level: 9 * (1u64 << (alpha + 6)) * m,
        weight: 1u64 << (j - 1),
        ell: (1u64 << alpha) * m,
        modulus: 1u64 << (j + 1),
        leading_exponent: leading,
        alpha,
        m,
        j,
    }
}

/// Witness family for powers of three: for l = 3^alpha * m (3 does not
/// divide m) the quotient eta(8*3^{alpha+1} m z)^{3^{j+1}+2} /
/// (eta(24z)^2 * eta(8*3^{alpha+2} m z)^{3^j}) is congruent mod 3^{j+1}
/// to sum B_l(n) q^{24n + 2*3^alpha m - 2}, and is holomorphic of weight
/// 3^j on Gamma_0(2^6 * 3^{alpha+2} m) once 3^alpha >= m.
pub fn pow3_witness(alpha: u32, m: u64, j: u32) -> WitnessForm {
    assert!(m % 3 != 0, "m must be coprime to 3");
    assert!(j <= 25 && alpha <= 25, "parameters out of supported range");
    let d1 = 8 * 3u64.pow(alpha + 1) * m;
    let d2 = 24;
    let d3 = 8 * 3u64.pow(alpha + 2) * m;
    let quotient =
        EtaQuotient::from_terms([(d1, 3i64.pow(j + 1) + 2), (d2, -2), (d3, -(3i64.pow(j)))]);
    let leading = 2 * 3u64.pow(alpha) * m - 2;
    debug_assert_eq!(
        quotient.leading_exponent(),
        Rational::new(leading as i128, 1)
    );
    WitnessForm {
        quotient,
        level: 64 * 3u64.pow(alpha + 2) * m,
        weight: 3u64.pow(j),
        ell: 3u64.pow(alpha) * m,
        modulus: 3u64.pow(j + 1),
        leading_exponent: leading,
        alpha,
        m,
        j,
    }
}

impl WitnessForm {
    /// The character top in the closed form the family is published with;
    /// must agree with the Theorem-level character computed from s.
    pub fn published_character_top(&self) -> FactoredInteger {
        let (alpha, j) = (self.alpha as u64, self.j as u64);
        let mut top = FactoredInteger::one();
        let two_based = self.modulus % 2 == 0;
        if two_based {
            // (-1)^{2^{j-1}} 3^{2^j} 2^{(alpha+2) 2^j + 2 alpha} m^{2^j + 2}
            if self.j == 1 {
                top.negate();
            }
            top.mul_prime_power(2, (alpha + 2) * (1 << j) + 2 * alpha);
            top.mul_prime_power(3, 1 << j);
            let m_exp = (1u64 << j) + 2;
            for (&p, &e) in &FactoredInteger::from_integer(self.m as i64).factors {
                top.mul_prime_power(p, e * m_exp);
            }
        } else {
            // (-1) 2^{6 * 3^j} 3^{(2 alpha + 1) 3^j + 2 alpha} m^{2 * 3^j + 2}
            top.negate();
            top.mul_prime_power(2, 6 * 3u64.pow(self.j));
            top.mul_prime_power(3, (2 * alpha + 1) * 3u64.pow(self.j) + 2 * alpha);
            let m_exp = 2 * 3u64.pow(self.j) + 2;
            for (&p, &e) in &FactoredInteger::from_integer(self.m as i64).factors {
                top.mul_prime_power(p, e * m_exp);
            }
        }
        top
    }
}
