//! Elementary number-theory primitives shared by the other modules:
//! Kronecker symbols, factored integers, divisor enumeration and
//! deterministic 64-bit primality.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;

/// Greatest common divisor on `u64`.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Least common multiple on `u64`. Panics on overflow.
pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

/// Kronecker symbol (a/n), extended to all integer pairs.
///
/// Conventions: (a/0) = 1 iff a = ±1, else 0; (a/-1) = -1 iff a < 0;
/// (a/2) = 0, 1, -1 for a ≡ 0, ±1, ±3 (mod 8). For odd positive n this
/// is the Jacobi symbol, and the Legendre symbol when n is prime.
pub fn kronecker(a: i64, n: i64) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result: i32 = 1;
    let mut n = n;
    if n < 0 {
        if a < 0 {
            result = -result;
        }
        n = -n;
    }
    let mut n = n as u64;
    // Split off the even part of n; each factor of 2 contributes (a/2).
    if n % 2 == 0 {
        if a % 2 == 0 {
            return 0;
        }
        let t = n.trailing_zeros();
        n >>= t;
        if t % 2 == 1 {
            match a.rem_euclid(8) {
                1 | 7 => {}
                3 | 5 => result = -result,
                _ => unreachable!("a is odd"),
            }
        }
    }
    // Jacobi symbol (a/n) for odd n >= 1 by binary reciprocity.
    let mut a = a.rem_euclid(n as i64) as u64;
    while a != 0 {
        let t = a.trailing_zeros();
        a >>= t;
        if t % 2 == 1 && matches!(n % 8, 3 | 5) {
            result = -result;
        }
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        (a, n) = (n % a, a);
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// A nonzero integer kept in factored form: `sign * prod p^e`.
///
/// The factored form is load-bearing: character tops such as
/// 2^((a+2)*2^j + 2a) overflow any fixed-width integer long before the
/// parameters stop being interesting, while their Kronecker symbols stay
/// cheap to evaluate factor by factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredInteger {
    /// -1 or +1.
    pub sign: i8,
    /// Map prime -> exponent, exponents >= 1.
    pub factors: BTreeMap<u64, u64>,
}

impl FactoredInteger {
    /// The integer +1 (empty product).
    pub fn one() -> Self {
        FactoredInteger {
            sign: 1,
            factors: BTreeMap::new(),
        }
    }

    /// Factor a nonzero machine integer by trial division.
    ///
    /// Panics if `n == 0`; intended for moderate inputs (divisor scales,
    /// test values), not general-purpose factorization.
    pub fn from_integer(n: i64) -> Self {
        assert!(n != 0, "zero has no factored form");
        let sign = if n < 0 { -1 } else { 1 };
        let mut rest = n.unsigned_abs();
        let mut factors = BTreeMap::new();
        let mut p: u64 = 2;
        while p * p <= rest {
            while rest % p == 0 {
                *factors.entry(p).or_insert(0) += 1;
                rest /= p;
            }
            p += if p == 2 { 1 } else { 2 };
        }
        if rest > 1 {
            *factors.entry(rest).or_insert(0) += 1;
        }
        FactoredInteger { sign, factors }
    }

    /// Multiply in `p^e` for a prime `p`.
    pub fn mul_prime_power(&mut self, p: u64, e: u64) {
        debug_assert!(is_prime(p), "{p} is not prime");
        if e > 0 {
            *self.factors.entry(p).or_insert(0) += e;
        }
    }

    /// Flip the sign.
    pub fn negate(&mut self) {
        self.sign = -self.sign;
    }

    /// Reconstruct the integer value. Exact, so can be arbitrarily large.
    pub fn value(&self) -> BigInt {
        let mut v = BigInt::from(self.sign);
        for (&p, &e) in &self.factors {
            for _ in 0..e {
                v *= p;
            }
        }
        v
    }
}

impl fmt::Display for FactoredInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign < 0 {
            write!(f, "-")?;
        }
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for (p, e) in &self.factors {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if *e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Kronecker symbol (a/n) with `a` in factored form, evaluated by
/// complete multiplicativity in the top argument. Never materializes
/// the value of `a`.
pub fn kronecker_factored(a: &FactoredInteger, n: i64) -> i32 {
    let mut result = if a.sign < 0 {
        kronecker(-1, n)
    } else {
        kronecker(1, n)
    };
    for (&p, &e) in &a.factors {
        let s = kronecker(p as i64, n);
        if s == 0 {
            return 0;
        }
        if e % 2 == 1 {
            result *= s;
        }
    }
    result
}

/// All positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    assert!(n >= 1, "divisors of zero are not defined");
    let factored = FactoredInteger::from_integer(n as i64);
    let mut divs: Vec<u64> = vec![1];
    for (&p, &e) in &factored.factors {
        let prev = divs.clone();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            divs.extend(prev.iter().map(|d| d * pk));
        }
    }
    divs.sort_unstable();
    divs
}

/// `a * b mod m` via a widening intermediate.
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `base^exp mod m` by square and multiply. `m` must be nonzero.
pub fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    assert!(m != 0);
    if m == 1 {
        return 0;
    }
    let mut acc: u64 = 1;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        exp >>= 1;
        base = mul_mod(base, base, m);
    }
    acc
}

/// Modular inverse of `a` mod `m`, if `gcd(a, m) = 1`.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    assert!(m >= 2);
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

/// Deterministic primality for the full `u64` range (Miller-Rabin with
/// a fixed base set that is provably sufficient below 3.3 * 10^24).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronecker_of_one_is_one() {
        for n in -20i64..=20 {
            if n != 0 {
                assert_eq!(kronecker(1, n), 1);
            }
        }
    }

    #[test]
    fn kronecker_cited_values() {
        assert_eq!(kronecker(144, 7), 1);
        // 2 = 3^2 mod 7 is a quadratic residue.
        assert_eq!(kronecker(2, 7), 1);
    }

    #[test]
    fn kronecker_matches_euler_criterion_for_odd_primes() {
        for p in (3..100u64).filter(|&p| is_prime(p)) {
            for a in -50i64..=50 {
                let expect = match mod_pow(a.rem_euclid(p as i64) as u64, (p - 1) / 2, p) {
                    0 => 0,
                    1 => 1,
                    r if r == p - 1 => -1,
                    other => panic!("a^((p-1)/2) mod p = {other}"),
                };
                assert_eq!(kronecker(a, p as i64), expect, "a={a} p={p}");
            }
        }
    }

    #[test]
    fn kronecker_multiplicative_in_top() {
        for n in 1..=50i64 {
            for a in -50i64..=50 {
                for b in -50i64..=50 {
                    assert_eq!(
                        kronecker(a, n) * kronecker(b, n),
                        kronecker(a * b, n),
                        "a={a} b={b} n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn kronecker_multiplicative_in_bottom() {
        // Holds for nonzero bottoms; together with the Euler-criterion
        // check and the (a/2), (a/-1) conventions this pins the whole
        // extension.
        for a in -60i64..=60 {
            for m in (-40i64..=40).filter(|&m| m != 0) {
                for n in (-40i64..=40).filter(|&n| n != 0) {
                    assert_eq!(
                        kronecker(a, m) * kronecker(a, n),
                        kronecker(a, m * n),
                        "a={a} m={m} n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn kronecker_bottom_conventions() {
        assert_eq!(kronecker(1, 0), 1);
        assert_eq!(kronecker(-1, 0), 1);
        assert_eq!(kronecker(2, 0), 0);
        assert_eq!(kronecker(-5, -1), -1);
        assert_eq!(kronecker(5, -1), 1);
        // (a/2) by a mod 8
        assert_eq!(kronecker(7, 2), 1);
        assert_eq!(kronecker(3, 2), -1);
        assert_eq!(kronecker(6, 2), 0);
    }

    #[test]
    fn kronecker_factored_trivial_and_small() {
        assert_eq!(kronecker_factored(&FactoredInteger::one(), 5), 1);
        assert_eq!(kronecker_factored(&FactoredInteger::from_integer(9), 5), 1);
        assert_eq!(
            kronecker_factored(&FactoredInteger::from_integer(-1), 3),
            -1
        );
    }

    #[test]
    fn kronecker_factored_agrees_with_plain_up_to_a_million() {
        // Smallest-prime-factor sieve so the sweep can factor every
        // value without trial division.
        let limit = 1_000_000usize;
        let mut spf: Vec<u32> = (0..=limit as u32).collect();
        let mut p = 2usize;
        while p * p <= limit {
            if spf[p] == p as u32 {
                for multiple in (p * p..=limit).step_by(p) {
                    if spf[multiple] == multiple as u32 {
                        spf[multiple] = p as u32;
                    }
                }
            }
            p += 1;
        }
        let moduli = [-7i64, -2, 3, 5, 12, 144];
        for value in 1..=limit as i64 {
            let mut factors = BTreeMap::new();
            let mut rest = value as u32;
            while rest > 1 {
                let q = spf[rest as usize];
                *factors.entry(q as u64).or_insert(0u64) += 1;
                rest /= q;
            }
            for sign in [1i8, -1] {
                let f = FactoredInteger {
                    sign,
                    factors: factors.clone(),
                };
                for n in moduli {
                    assert_eq!(
                        kronecker_factored(&f, n),
                        kronecker(sign as i64 * value, n),
                        "value={value} sign={sign} n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn factored_value_round_trips() {
        for n in [-360i64, -7, 1, 2, 97, 5040, 999_983] {
            assert_eq!(FactoredInteger::from_integer(n).value(), BigInt::from(n));
        }
    }

    #[test]
    fn divisors_examples() {
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(16), vec![1, 2, 4, 8, 16]);
        let d144 = divisors(144);
        assert_eq!(d144.len(), 15); // tau(144) = (4+1)(2+1)
        assert_eq!(*d144.last().unwrap(), 144);
    }

    #[test]
    fn divisors_closed_under_complement() {
        for n in [1u64, 16, 144, 1152, 92160] {
            let divs = divisors(n);
            for &d in &divs {
                assert!(divs.binary_search(&(n / d)).is_ok(), "n={n} d={d}");
            }
        }
    }

    #[test]
    fn primality_examples() {
        assert!(is_prime(2));
        assert!(!is_prime(1));
        assert!(!is_prime(0));
        // Carmichael number 561 = 3 * 11 * 17
        assert!(!is_prime(561));
        assert!(is_prime(2_147_483_647)); // 2^31 - 1
    }

    #[test]
    fn primality_matches_sieve_below_ten_thousand() {
        let n = 10_000usize;
        let mut sieve = vec![true; n];
        sieve[0] = false;
        sieve[1] = false;
        for i in 2..n {
            if sieve[i] {
                for j in (i * i..n).step_by(i) {
                    sieve[j] = false;
                }
            }
        }
        for i in 0..n {
            assert_eq!(is_prime(i as u64), sieve[i], "n={i}");
        }
    }

    #[test]
    fn mod_inverse_basics() {
        assert_eq!(mod_inverse(3, 7), Some(5));
        assert_eq!(mod_inverse(2, 4), None);
        for m in 2..50u64 {
            for a in 1..m {
                if let Some(inv) = mod_inverse(a, m) {
                    assert_eq!(a * inv % m, 1);
                } else {
                    assert_ne!(gcd(a, m), 1);
                }
            }
        }
    }
}
