//! Truncated formal power series over exact integers or Z/mZ, with fast
//! Euler-product expansion via the pentagonal number theorem.
//!
//! A series holds coefficients for exponents `0..=truncation`; operations
//! never extrapolate, so the truncation of a binary operation is the
//! minimum of the operands' truncations. Residue coefficients are kept
//! canonical in `[0, m)`.
//!
//! Multiplication and division are schoolbook convolutions that skip zero
//! coefficients of the sparser operand. Products of pentagonal series
//! (support O(sqrt N)) and divisions by them therefore run in O(N sqrt N),
//! which is what makes mod-m scans to N = 10^6 practical without FFTs.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith::{mod_inverse, mul_mod};

/// Largest supported residue modulus (exclusive). Convolutions accumulate
/// u64 x u64 products in u128 without intermediate reduction, which is
/// overflow-safe exactly when m < 2^32.
pub const MAX_MODULUS: u64 = 1 << 32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeriesError {
    #[error("modulus mismatch: {left:?} vs {right:?}")]
    ModulusMismatch {
        left: Option<u64>,
        right: Option<u64>,
    },
    #[error("constant term is not a unit")]
    NonUnitConstant,
    #[error("cannot reduce series with modulus {from:?} to modulus {to}")]
    IncompatibleReduction { from: Option<u64>, to: u64 },
    #[error("coefficient kind does not match series representation")]
    KindMismatch,
}

/// A single coefficient, exact or as a residue.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coefficient {
    Exact(BigInt),
    Residue(u64),
}

impl Coefficient {
    pub fn is_zero(&self) -> bool {
        match self {
            Coefficient::Exact(v) => v.is_zero(),
            Coefficient::Residue(r) => *r == 0,
        }
    }
}

impl std::fmt::Display for Coefficient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Coefficient::Exact(v) => write!(f, "{v}"),
            Coefficient::Residue(r) => write!(f, "{r}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Repr {
    Exact(Vec<BigInt>),
    Mod { modulus: u64, coeffs: Vec<u64> },
}

/// Formal power series truncated at a fixed exponent.
///
/// Immutable after construction; all operations allocate new values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    repr: Repr,
}

fn check_modulus(m: u64) {
    assert!(
        (2..MAX_MODULUS).contains(&m),
        "modulus must satisfy 2 <= m < 2^32, got {m}"
    );
}

impl TruncatedSeries {
    /// The zero series with the given truncation.
    pub fn zero(truncation: usize, modulus: Option<u64>) -> Self {
        match modulus {
            None => TruncatedSeries {
                repr: Repr::Exact(vec![BigInt::zero(); truncation + 1]),
            },
            Some(m) => {
                check_modulus(m);
                TruncatedSeries {
                    repr: Repr::Mod {
                        modulus: m,
                        coeffs: vec![0; truncation + 1],
                    },
                }
            }
        }
    }

    /// The constant series 1.
    pub fn one(truncation: usize, modulus: Option<u64>) -> Self {
        let mut s = Self::zero(truncation, modulus);
        match &mut s.repr {
            Repr::Exact(c) => c[0] = BigInt::one(),
            Repr::Mod { coeffs, .. } => coeffs[0] = 1,
        }
        s
    }

    /// `c * q^exp`, or zero if the exponent exceeds the truncation.
    pub fn monomial(c: i64, exp: usize, truncation: usize, modulus: Option<u64>) -> Self {
        let mut s = Self::zero(truncation, modulus);
        if exp <= truncation {
            match &mut s.repr {
                Repr::Exact(v) => v[exp] = BigInt::from(c),
                Repr::Mod { modulus, coeffs } => coeffs[exp] = c.rem_euclid(*modulus as i64) as u64,
            }
        }
        s
    }

    /// Build a series from machine-integer coefficients (index = exponent).
    pub fn from_i64(coeffs: &[i64], modulus: Option<u64>) -> Self {
        assert!(!coeffs.is_empty());
        match modulus {
            None => TruncatedSeries {
                repr: Repr::Exact(coeffs.iter().map(|&c| BigInt::from(c)).collect()),
            },
            Some(m) => {
                check_modulus(m);
                TruncatedSeries {
                    repr: Repr::Mod {
                        modulus: m,
                        coeffs: coeffs
                            .iter()
                            .map(|&c| c.rem_euclid(m as i64) as u64)
                            .collect(),
                    },
                }
            }
        }
    }

    /// Build an exact series from big-integer coefficients.
    pub fn from_bigints(coeffs: Vec<BigInt>) -> Self {
        assert!(!coeffs.is_empty());
        TruncatedSeries {
            repr: Repr::Exact(coeffs),
        }
    }

    /// Residue-series constructor for callers that guarantee canonical
    /// coefficients in `[0, m)`.
    pub(crate) fn from_residues_unchecked(modulus: u64, coeffs: Vec<u64>) -> Self {
        check_modulus(modulus);
        assert!(!coeffs.is_empty());
        debug_assert!(coeffs.iter().all(|&c| c < modulus));
        TruncatedSeries {
            repr: Repr::Mod { modulus, coeffs },
        }
    }

    pub fn modulus(&self) -> Option<u64> {
        match &self.repr {
            Repr::Exact(_) => None,
            Repr::Mod { modulus, .. } => Some(*modulus),
        }
    }

    /// Largest exponent with a known coefficient.
    pub fn truncation(&self) -> usize {
        match &self.repr {
            Repr::Exact(c) => c.len() - 1,
            Repr::Mod { coeffs, .. } => coeffs.len() - 1,
        }
    }

    /// Coefficient of `q^n`. Panics beyond the truncation; coefficients
    /// there are unknown, not zero.
    pub fn coeff(&self, n: usize) -> Coefficient {
        assert!(
            n <= self.truncation(),
            "coefficient {n} beyond truncation {}",
            self.truncation()
        );
        match &self.repr {
            Repr::Exact(c) => Coefficient::Exact(c[n].clone()),
            Repr::Mod { coeffs, .. } => Coefficient::Residue(coeffs[n]),
        }
    }

    /// Residue coefficients, if this is a mod-m series.
    pub fn residues(&self) -> Option<&[u64]> {
        match &self.repr {
            Repr::Mod { coeffs, .. } => Some(coeffs),
            Repr::Exact(_) => None,
        }
    }

    /// Exact coefficients, if this is an exact series.
    pub fn exact_coeffs(&self) -> Option<&[BigInt]> {
        match &self.repr {
            Repr::Exact(c) => Some(c),
            Repr::Mod { .. } => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Exact(c) => c.iter().all(BigInt::is_zero),
            Repr::Mod { coeffs, .. } => coeffs.iter().all(|&c| c == 0),
        }
    }

    fn require_same_modulus(&self, other: &Self) -> Result<(), SeriesError> {
        if self.modulus() != other.modulus() {
            return Err(SeriesError::ModulusMismatch {
                left: self.modulus(),
                right: other.modulus(),
            });
        }
        Ok(())
    }

    /// Coefficientwise sum; truncation is the minimum of the operands'.
    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.require_same_modulus(other)?;
        let n = self.truncation().min(other.truncation());
        Ok(match (&self.repr, &other.repr) {
            (Repr::Exact(a), Repr::Exact(b)) => TruncatedSeries {
                repr: Repr::Exact((0..=n).map(|i| &a[i] + &b[i]).collect()),
            },
            (
                Repr::Mod {
                    modulus: m,
                    coeffs: a,
                },
                Repr::Mod { coeffs: b, .. },
            ) => TruncatedSeries {
                repr: Repr::Mod {
                    modulus: *m,
                    coeffs: (0..=n).map(|i| (a[i] + b[i]) % m).collect(),
                },
            },
            _ => unreachable!("modulus equality implies matching representations"),
        })
    }

    /// Coefficientwise difference; truncation is the minimum.
    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.require_same_modulus(other)?;
        let n = self.truncation().min(other.truncation());
        Ok(match (&self.repr, &other.repr) {
            (Repr::Exact(a), Repr::Exact(b)) => TruncatedSeries {
                repr: Repr::Exact((0..=n).map(|i| &a[i] - &b[i]).collect()),
            },
            (
                Repr::Mod {
                    modulus: m,
                    coeffs: a,
                },
                Repr::Mod { coeffs: b, .. },
            ) => TruncatedSeries {
                repr: Repr::Mod {
                    modulus: *m,
                    coeffs: (0..=n).map(|i| (a[i] + m - b[i]) % m).collect(),
                },
            },
            _ => unreachable!(),
        })
    }

    /// Cauchy product truncated to the minimum of the operands' truncations.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.require_same_modulus(other)?;
        let out_len = self.truncation().min(other.truncation()) + 1;
        Ok(match (&self.repr, &other.repr) {
            (Repr::Exact(a), Repr::Exact(b)) => TruncatedSeries {
                repr: Repr::Exact(conv_exact(a, b, out_len)),
            },
            (
                Repr::Mod {
                    modulus: m,
                    coeffs: a,
                },
                Repr::Mod { coeffs: b, .. },
            ) => TruncatedSeries {
                repr: Repr::Mod {
                    modulus: *m,
                    coeffs: conv_mod(a, b, *m, out_len),
                },
            },
            _ => unreachable!(),
        })
    }

    /// Quotient `self / other` up to the minimum truncation. The divisor's
    /// constant term must be a unit. Cost is O(N * nnz(other)), so dividing
    /// repeatedly by a sparse series beats multiplying by a dense inverse.
    pub fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        self.require_same_modulus(other)?;
        let out_len = self.truncation().min(other.truncation()) + 1;
        Ok(match (&self.repr, &other.repr) {
            (Repr::Exact(a), Repr::Exact(b)) => TruncatedSeries {
                repr: Repr::Exact(div_exact(a, b, out_len).ok_or(SeriesError::NonUnitConstant)?),
            },
            (
                Repr::Mod {
                    modulus: m,
                    coeffs: a,
                },
                Repr::Mod { coeffs: b, .. },
            ) => TruncatedSeries {
                repr: Repr::Mod {
                    modulus: *m,
                    coeffs: div_mod(a, b, *m, out_len).ok_or(SeriesError::NonUnitConstant)?,
                },
            },
            _ => unreachable!(),
        })
    }

    /// Multiplicative inverse up to the truncation; requires a unit
    /// constant term.
    pub fn invert(&self) -> Result<Self, SeriesError> {
        Self::one(self.truncation(), self.modulus()).div(self)
    }

    /// `self^e` by repeated squaring; `pow(f, 0)` is 1 at f's truncation.
    pub fn pow(&self, e: u64) -> Self {
        let mut result = Self::one(self.truncation(), self.modulus());
        if e == 0 {
            return result;
        }
        let mut power = self.clone();
        let mut e = e;
        loop {
            if e & 1 == 1 {
                result = result.mul(&power).expect("same modulus");
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            power = power.mul(&power).expect("same modulus");
        }
        result
    }

    /// Scale every coefficient by a constant of the matching kind.
    pub fn scale(&self, c: &Coefficient) -> Result<Self, SeriesError> {
        Ok(match (&self.repr, c) {
            (Repr::Exact(a), Coefficient::Exact(v)) => TruncatedSeries {
                repr: Repr::Exact(a.iter().map(|x| x * v).collect()),
            },
            (Repr::Mod { modulus: m, coeffs }, Coefficient::Residue(r)) => {
                let r = r % m;
                TruncatedSeries {
                    repr: Repr::Mod {
                        modulus: *m,
                        coeffs: coeffs.iter().map(|&x| mul_mod(x, r, *m)).collect(),
                    },
                }
            }
            _ => return Err(SeriesError::KindMismatch),
        })
    }

    /// Multiply by `q^k`: coefficients move up, truncation grows by `k`.
    pub fn shifted(&self, k: usize) -> Self {
        match &self.repr {
            Repr::Exact(c) => {
                let mut out = vec![BigInt::zero(); c.len() + k];
                out[k..].clone_from_slice(c);
                TruncatedSeries {
                    repr: Repr::Exact(out),
                }
            }
            Repr::Mod { modulus, coeffs } => {
                let mut out = vec![0u64; coeffs.len() + k];
                out[k..].copy_from_slice(coeffs);
                TruncatedSeries {
                    repr: Repr::Mod {
                        modulus: *modulus,
                        coeffs: out,
                    },
                }
            }
        }
    }

    /// Restrict to a smaller truncation.
    pub fn truncated(&self, new_truncation: usize) -> Self {
        assert!(new_truncation <= self.truncation());
        match &self.repr {
            Repr::Exact(c) => TruncatedSeries {
                repr: Repr::Exact(c[..=new_truncation].to_vec()),
            },
            Repr::Mod { modulus, coeffs } => TruncatedSeries {
                repr: Repr::Mod {
                    modulus: *modulus,
                    coeffs: coeffs[..=new_truncation].to_vec(),
                },
            },
        }
    }

    /// Reduce into Z/mZ. Exact series reduce to any modulus; residue
    /// series only to a divisor of their modulus.
    pub fn reduce_mod(&self, m: u64) -> Result<Self, SeriesError> {
        check_modulus(m);
        match &self.repr {
            Repr::Exact(c) => {
                let mb = BigInt::from(m);
                Ok(TruncatedSeries {
                    repr: Repr::Mod {
                        modulus: m,
                        coeffs: c
                            .iter()
                            .map(|v| {
                                let mut r = v % &mb;
                                if r.is_negative() {
                                    r += &mb;
                                }
                                r.to_u64().expect("residue fits u64")
                            })
                            .collect(),
                    },
                })
            }
            Repr::Mod { modulus, coeffs } => {
                if modulus % m != 0 {
                    return Err(SeriesError::IncompatibleReduction {
                        from: Some(*modulus),
                        to: m,
                    });
                }
                Ok(TruncatedSeries {
                    repr: Repr::Mod {
                        modulus: m,
                        coeffs: coeffs.iter().map(|&c| c % m).collect(),
                    },
                })
            }
        }
    }

    /// True when the two series agree on every exponent `0..=upto`.
    pub fn agrees_with(&self, other: &Self, upto: usize) -> bool {
        if self.modulus() != other.modulus()
            || upto > self.truncation()
            || upto > other.truncation()
        {
            return false;
        }
        match (&self.repr, &other.repr) {
            (Repr::Exact(a), Repr::Exact(b)) => a[..=upto] == b[..=upto],
            (Repr::Mod { coeffs: a, .. }, Repr::Mod { coeffs: b, .. }) => a[..=upto] == b[..=upto],
            _ => false,
        }
    }
}

fn count_nonzero_mod(a: &[u64]) -> usize {
    a.iter().filter(|&&c| c != 0).count()
}

fn conv_mod(a: &[u64], b: &[u64], m: u64, out_len: usize) -> Vec<u64> {
    let (outer, inner) = if count_nonzero_mod(a) <= count_nonzero_mod(b) {
        (a, b)
    } else {
        (b, a)
    };
    // Lazy reduction: u64*u64 products accumulate exactly in u128 because
    // m < 2^32 bounds each product below 2^64.
    let mut acc = vec![0u128; out_len];
    for (i, &ai) in outer.iter().enumerate().take(out_len) {
        if ai == 0 {
            continue;
        }
        let ai = ai as u128;
        for (j, &bj) in inner.iter().enumerate().take(out_len - i) {
            if bj != 0 {
                acc[i + j] += ai * bj as u128;
            }
        }
    }
    let m = m as u128;
    acc.into_iter().map(|v| (v % m) as u64).collect()
}

fn div_mod(num: &[u64], den: &[u64], m: u64, out_len: usize) -> Option<Vec<u64>> {
    let inv0 = mod_inverse(den[0], m)?;
    let tail: Vec<(usize, u64)> = den
        .iter()
        .enumerate()
        .skip(1)
        .filter(|&(_, &d)| d != 0)
        .map(|(k, &d)| (k, d))
        .collect();
    let m128 = m as u128;
    let mut q = vec![0u64; out_len];
    for n in 0..out_len {
        let mut acc: u128 = 0;
        for &(k, dk) in &tail {
            if k > n {
                break;
            }
            acc += dk as u128 * q[n - k] as u128;
        }
        let borrowed = (acc % m128) as u64;
        let num_n = if n < num.len() { num[n] } else { 0 };
        q[n] = mul_mod((num_n + m - borrowed) % m, inv0, m);
    }
    Some(q)
}

fn count_nonzero_exact(a: &[BigInt]) -> usize {
    a.iter().filter(|c| !c.is_zero()).count()
}

fn conv_exact(a: &[BigInt], b: &[BigInt], out_len: usize) -> Vec<BigInt> {
    let (outer, inner) = if count_nonzero_exact(a) <= count_nonzero_exact(b) {
        (a, b)
    } else {
        (b, a)
    };
    let mut acc = vec![BigInt::zero(); out_len];
    for (i, ai) in outer.iter().enumerate().take(out_len) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in inner.iter().enumerate().take(out_len - i) {
            if !bj.is_zero() {
                acc[i + j] += ai * bj;
            }
        }
    }
    acc
}

fn div_exact(num: &[BigInt], den: &[BigInt], out_len: usize) -> Option<Vec<BigInt>> {
    // Over Z only +-1 are units.
    let negate = if den[0].is_one() {
        false
    } else if (-&den[0]).is_one() {
        true
    } else {
        return None;
    };
    let tail: Vec<(usize, &BigInt)> = den
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, d)| !d.is_zero())
        .collect();
    let mut q: Vec<BigInt> = Vec::with_capacity(out_len);
    for n in 0..out_len {
        let mut acc = if n < num.len() {
            num[n].clone()
        } else {
            BigInt::zero()
        };
        for &(k, dk) in &tail {
            if k > n {
                break;
            }
            acc -= dk * &q[n - k];
        }
        if negate {
            acc = -acc;
        }
        q.push(acc);
    }
    Some(q)
}

/// Expansion of `(q^scale; q^scale)_inf ^ exponent` to the given truncation.
///
/// The base series comes straight from the pentagonal number theorem:
/// coefficient (-1)^k at exponent scale * k(3k-1)/2 for all integers k.
/// Nonnegative exponents are powered by repeated squaring; negative ones
/// divide by the sparse base |exponent| times, which keeps the cost at
/// O(|e| * N * sqrt(N / scale)).
pub fn euler_product(
    scale: u64,
    exponent: i64,
    truncation: usize,
    modulus: Option<u64>,
) -> TruncatedSeries {
    assert!(scale >= 1);
    let base = pentagonal_series(scale, truncation, modulus);
    match exponent {
        0 => TruncatedSeries::one(truncation, modulus),
        e if e > 0 => base.pow(e as u64),
        e => {
            let mut out = TruncatedSeries::one(truncation, modulus);
            for _ in 0..e.unsigned_abs() {
                out = out.div(&base).expect("unit constant term");
            }
            out
        }
    }
}

/// `(q^scale; q^scale)_inf` itself.
pub fn pentagonal_series(scale: u64, truncation: usize, modulus: Option<u64>) -> TruncatedSeries {
    let mut s = TruncatedSeries::zero(truncation, modulus);
    let mut put = |exp: u64, positive: bool| {
        if exp <= truncation as u64 {
            match &mut s.repr {
                Repr::Exact(c) => {
                    c[exp as usize] = if positive {
                        BigInt::one()
                    } else {
                        -BigInt::one()
                    }
                }
                Repr::Mod { modulus, coeffs } => {
                    coeffs[exp as usize] = if positive { 1 } else { *modulus - 1 }
                }
            }
            true
        } else {
            false
        }
    };
    put(0, true);
    let mut k: u64 = 1;
    loop {
        let positive = k % 2 == 0;
        // k(3k-1)/2 and k(3k+1)/2: the generalized pentagonal pair.
        let g1 = k * (3 * k - 1) / 2;
        let g2 = k * (3 * k + 1) / 2;
        if !put(g1 * scale, positive) {
            break;
        }
        put(g2 * scale, positive);
        k += 1;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Naive term-by-term expansion of prod_{k=1..} (1 - q^{scale k}),
    /// kept independent of the pentagonal route on purpose.
    fn naive_euler(scale: usize, truncation: usize) -> Vec<i64> {
        let mut c = vec![0i64; truncation + 1];
        c[0] = 1;
        let mut k = 1;
        while scale * k <= truncation {
            let step = scale * k;
            // multiply by (1 - q^step) in place, high to low
            for n in (0..=truncation).rev() {
                if n >= step {
                    c[n] -= c[n - step];
                }
            }
            k += 1;
        }
        c
    }

    fn exact_from(v: &[i64]) -> TruncatedSeries {
        TruncatedSeries::from_i64(v, None)
    }

    #[test]
    fn add_identities() {
        let one_plus_q = exact_from(&[1, 1, 0]);
        let zero = TruncatedSeries::zero(2, None);
        assert_eq!(one_plus_q.add(&zero).unwrap(), one_plus_q);

        let m = 5u64;
        let f = TruncatedSeries::from_i64(&[1, 1, 0], Some(m));
        let neg = f.scale(&Coefficient::Residue(m - 1)).unwrap();
        assert!(f.add(&neg).unwrap().is_zero());

        let a = exact_from(&[1, -1]);
        let b = exact_from(&[0, 1]);
        assert_eq!(a.add(&b).unwrap(), exact_from(&[1, 0]));
    }

    #[test]
    fn add_rejects_modulus_mismatch() {
        let a = TruncatedSeries::one(3, Some(4));
        let b = TruncatedSeries::one(3, Some(8));
        assert!(matches!(
            a.add(&b),
            Err(SeriesError::ModulusMismatch { .. })
        ));
        let c = TruncatedSeries::one(3, None);
        assert!(a.mul(&c).is_err());
    }

    #[test]
    fn mul_identity_and_telescoping() {
        let f = euler_product(1, 1, 32, None);
        let one = TruncatedSeries::one(32, None);
        assert_eq!(f.mul(&one).unwrap(), f);

        let n = 40;
        let ones = TruncatedSeries::from_i64(&vec![1i64; n + 1], None);
        let one_minus_q = {
            let mut v = vec![0i64; n + 1];
            v[0] = 1;
            v[1] = -1;
            exact_from(&v)
        };
        assert_eq!(
            one_minus_q.mul(&ones).unwrap(),
            TruncatedSeries::one(n, None)
        );
    }

    #[test]
    fn invert_basics() {
        let one = TruncatedSeries::one(10, None);
        assert_eq!(one.invert().unwrap(), one);

        let mut v = vec![0i64; 11];
        v[0] = 1;
        v[1] = -1;
        let geo = exact_from(&v).invert().unwrap();
        assert_eq!(geo, TruncatedSeries::from_i64(&[1i64; 11], None));

        let q_only = exact_from(&[0, 1]);
        assert_eq!(q_only.invert(), Err(SeriesError::NonUnitConstant));
        let two = TruncatedSeries::from_i64(&[2], Some(4));
        assert_eq!(two.invert(), Err(SeriesError::NonUnitConstant));
    }

    #[test]
    fn invert_round_trips_on_random_unit_series() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5e11e5);
        for case in 0..200 {
            let n = 1 + case % 48;
            let modulus = match case % 3 {
                0 => None,
                1 => Some(97),
                _ => Some(8),
            };
            let mut v: Vec<i64> = (0..=n).map(|_| rng.gen_range(-9..=9)).collect();
            v[0] = if case % 2 == 0 { 1 } else { -1 };
            if modulus == Some(8) && v[0] == -1 {
                v[0] = 3; // any odd residue is a unit mod 8
            }
            let f = TruncatedSeries::from_i64(&v, modulus);
            let g = f.invert().expect("unit constant");
            assert_eq!(f.mul(&g).unwrap(), TruncatedSeries::one(n, modulus));
            assert_eq!(g.mul(&f).unwrap(), TruncatedSeries::one(n, modulus));
        }
    }

    #[test]
    fn div_times_divisor_restores_numerator() {
        let a = euler_product(2, 2, 60, Some(9));
        let b = euler_product(1, 1, 60, Some(9));
        let q = a.div(&b).unwrap();
        assert_eq!(q.mul(&b).unwrap(), a);
    }

    #[test]
    fn pow_small_exponents() {
        let f = euler_product(1, 1, 24, None);
        assert_eq!(f.pow(0), TruncatedSeries::one(24, None));
        assert_eq!(f.pow(1), f);
        let by_mul = f.mul(&f).unwrap().mul(&f).unwrap();
        assert_eq!(f.pow(3), by_mul);
    }

    #[test]
    fn binomial_congruence_prime_powers() {
        // (q;q)^{p^j} = (q^p;q^p)^{p^{j-1}} mod p^j
        let n = 500;
        for p in [2u64, 3, 5] {
            for j in 1..=3u32 {
                let m = p.pow(j);
                let lhs = euler_product(1, 1, n, Some(m)).pow(p.pow(j));
                let rhs = euler_product(p, 1, n, Some(m)).pow(p.pow(j - 1));
                assert_eq!(lhs, rhs, "p={p} j={j}");
            }
        }
    }

    #[test]
    fn euler_product_matches_naive_expansion() {
        assert_eq!(
            euler_product(1, 1, 6, None),
            exact_from(&[1, -1, -1, 0, 0, 1, 0])
        );
        for scale in 1..=5usize {
            for trunc in [50usize, 300] {
                let naive = naive_euler(scale, trunc);
                assert_eq!(
                    euler_product(scale as u64, 1, trunc, None),
                    exact_from(&naive),
                    "scale={scale} trunc={trunc}"
                );
            }
        }
    }

    #[test]
    fn euler_product_zero_exponent_is_one() {
        assert_eq!(
            euler_product(3, 0, 17, Some(4)),
            TruncatedSeries::one(17, Some(4))
        );
    }

    #[test]
    fn euler_product_negative_exponent_inverts() {
        let f = euler_product(1, -2, 120, None);
        let g = euler_product(1, 2, 120, None);
        assert_eq!(f.mul(&g).unwrap(), TruncatedSeries::one(120, None));
    }

    #[test]
    fn euler_square_identity_mod_two() {
        let n = 400;
        let lhs = euler_product(2, 1, n, Some(2));
        let rhs = euler_product(1, 1, n, Some(2)).pow(2);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn pentagonal_support() {
        let n = 2000;
        let f = euler_product(1, 1, n, None);
        let coeffs = f.exact_coeffs().unwrap();
        let mut support: Vec<(u64, bool)> = vec![(0, true)];
        let mut k = 1u64;
        while k * (3 * k - 1) / 2 <= n as u64 {
            support.push((k * (3 * k - 1) / 2, k % 2 == 0));
            if k * (3 * k + 1) / 2 <= n as u64 {
                support.push((k * (3 * k + 1) / 2, k % 2 == 0));
            }
            k += 1;
        }
        for (e, c) in coeffs.iter().enumerate() {
            match support.iter().find(|&&(s, _)| s == e as u64) {
                Some(&(_, positive)) => {
                    let want = if positive { 1 } else { -1 };
                    assert_eq!(c, &BigInt::from(want), "exponent {e}");
                }
                None => assert!(c.is_zero(), "exponent {e} should vanish"),
            }
        }
    }

    #[test]
    fn reduce_mod_is_coefficientwise() {
        use num_integer::Integer;
        let f = euler_product(1, -2, 64, None);
        let g = f.reduce_mod(4).unwrap();
        for n in 0..=64 {
            let Coefficient::Exact(e) = f.coeff(n) else {
                unreachable!()
            };
            let Coefficient::Residue(r) = g.coeff(n) else {
                unreachable!()
            };
            assert_eq!(e.mod_floor(&BigInt::from(4)), BigInt::from(r));
        }
        // residue -> residue reduction needs divisibility
        let h = TruncatedSeries::one(4, Some(8));
        assert!(h.reduce_mod(4).is_ok());
        assert!(h.reduce_mod(3).is_err());
    }

    #[test]
    fn shifted_moves_support() {
        let f = exact_from(&[1, 2, 3]);
        let g = f.shifted(2);
        assert_eq!(g.truncation(), 4);
        assert_eq!(g.coeff(0), Coefficient::Exact(BigInt::zero()));
        assert_eq!(g.coeff(2), Coefficient::Exact(BigInt::from(1)));
        assert_eq!(g.coeff(4), Coefficient::Exact(BigInt::from(3)));
    }

    fn series_pair(v: &[i64]) -> (TruncatedSeries, TruncatedSeries) {
        (
            TruncatedSeries::from_i64(v, None),
            TruncatedSeries::from_i64(v, Some(97)),
        )
    }

    proptest! {
        #[test]
        fn ring_laws_up_to_truncation(
            av in prop::collection::vec(-20i64..=20, 1..=65),
            bv in prop::collection::vec(-20i64..=20, 1..=65),
            cv in prop::collection::vec(-20i64..=20, 1..=65),
        ) {
            let (ae, am) = series_pair(&av);
            let (be, bm) = series_pair(&bv);
            let (ce, cm) = series_pair(&cv);
            for (a, b, c) in [(ae, be, ce), (am, bm, cm)] {
                // commutativity
                prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
                // associativity
                prop_assert_eq!(
                    a.mul(&b).unwrap().mul(&c).unwrap(),
                    a.mul(&b.mul(&c).unwrap()).unwrap()
                );
                // distributivity
                prop_assert_eq!(
                    a.mul(&b.add(&c).unwrap()).unwrap(),
                    a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
                );
            }
        }
    }
}
