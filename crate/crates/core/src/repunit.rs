//! Arithmetic of base-`q` repunits `Q^f = 1 + q + … + q^{f-1}`.
//!
//! Factorization is deterministic: trial division up to [`TRIAL_BOUND`], a
//! deterministic Miller–Rabin test for 64-bit cofactors, Baillie–PSW above
//! that (reported as probable), and Brent's variant of Pollard's rho with the
//! polynomial `x² + c`, start value 2 and `c = 1, 2, 3, …`.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::ffield::is_prime_u64;

pub const TRIAL_BOUND: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepunitError {
    #[error("valuation of zero is undefined")]
    ZeroArgument,
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("repunit base must be at least 2, got {0}")]
    InvalidBase(u64),
    #[error("repunit length must be at least 1")]
    InvalidLength,
}

fn check_params(q: u64, f: u32) -> Result<(), RepunitError> {
    if q < 2 {
        return Err(RepunitError::InvalidBase(q));
    }
    if f == 0 {
        return Err(RepunitError::InvalidLength);
    }
    Ok(())
}

/// `Q^f` as the geometric sum `1 + q + … + q^{f-1}` (Horner).
pub fn repunit_value(q: u64, f: u32) -> Result<BigUint, RepunitError> {
    check_params(q, f)?;
    let q = BigUint::from(q);
    Ok((0..f).fold(BigUint::zero(), |acc, _| acc * &q + 1u32))
}

/// `Q^f` as the exact quotient `(q^f - 1)/(q - 1)`.
pub fn repunit_by_division(q: u64, f: u32) -> Result<BigUint, RepunitError> {
    check_params(q, f)?;
    let num = BigUint::from(q).pow(f) - 1u32;
    let (quot, rem) = num.div_rem(&BigUint::from(q - 1));
    debug_assert!(rem.is_zero());
    Ok(quot)
}

/// `v_π(x)`: the largest `ν` with `π^ν | x`.
pub fn valuation(prime: u64, x: &BigInt) -> Result<u32, RepunitError> {
    if !is_prime_u64(prime) {
        return Err(RepunitError::NotPrime(prime));
    }
    if x.is_zero() {
        return Err(RepunitError::ZeroArgument);
    }
    let p = BigUint::from(prime);
    let mut m = x.magnitude().clone();
    let mut v = 0;
    loop {
        let (quot, rem) = m.div_rem(&p);
        if !rem.is_zero() {
            return Ok(v);
        }
        m = quot;
        v += 1;
    }
}

/// Sum of the base-`π` digits of `e`.
pub fn digit_sum(prime: u64, mut e: u64) -> u64 {
    let mut s = 0;
    while e > 0 {
        s += e % prime;
        e /= prime;
    }
    s
}

/// `v_π(e!) = (e - s_π(e)) / (π - 1)` via the base-`π` digits of `e`.
pub fn legendre_valuation(prime: u64, e: u64) -> Result<u64, RepunitError> {
    if !is_prime_u64(prime) {
        return Err(RepunitError::NotPrime(prime));
    }
    Ok((e - digit_sum(prime, e)) / (prime - 1))
}

/// Prime factorization with primes ascending.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Factorization {
    pub factors: Vec<(BigUint, u32)>,
    /// Set when some factor above 64 bits was only shown to be a BPSW probable prime.
    pub probable: bool,
}

impl Factorization {
    pub fn primes(&self) -> Vec<BigUint> {
        self.factors.iter().map(|(p, _)| p.clone()).collect()
    }

    pub fn product(&self) -> BigUint {
        self.factors
            .iter()
            .fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e))
    }
}

fn rem_u64(n: &BigUint, d: u64) -> u64 {
    n.iter_u64_digits()
        .rev()
        .fold(0u128, |acc, limb| ((acc << 64) | limb as u128) % d as u128) as u64
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for all 64-bit inputs.
pub fn is_prime_64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn is_strong_probable_prime_base2(n: &BigUint) -> bool {
    let one = BigUint::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    let mut x = BigUint::from(2u32).modpow(&d, n);
    if x == one || x == nm1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == nm1 {
            return true;
        }
    }
    false
}

fn jacobi(a: &BigInt, n: &BigUint) -> i32 {
    let n_int = BigInt::from(n.clone());
    let mut a = a.mod_floor(&n_int).magnitude().clone();
    let mut n = n.clone();
    let mut result = 1;
    while !a.is_zero() {
        while a.is_even() {
            a >>= 1;
            let r = rem_u64(&n, 8);
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        core::mem::swap(&mut a, &mut n);
        if rem_u64(&a, 4) == 3 && rem_u64(&n, 4) == 3 {
            result = -result;
        }
        a %= &n;
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

fn is_perfect_square(n: &BigUint) -> bool {
    let r = n.sqrt();
    &r * &r == *n
}

/// Strong Lucas probable-prime test with Selfridge parameters.
fn is_strong_lucas_probable_prime(n: &BigUint) -> bool {
    if is_perfect_square(n) {
        return false;
    }
    let mut d_param = BigInt::from(5);
    loop {
        match jacobi(&d_param, n) {
            -1 => break,
            0 => {
                // gcd(D, n) > 1; only prime when n divides D
                return d_param.magnitude() == n;
            }
            _ => {}
        }
        d_param = if d_param.sign() == Sign::Plus {
            -(d_param + BigInt::from(2))
        } else {
            -(d_param - BigInt::from(2))
        };
    }
    let m = BigInt::from(n.clone());
    let p = BigInt::one();
    let q: BigInt = (BigInt::one() - &d_param) / BigInt::from(4);
    let half = |x: BigInt| -> BigInt {
        let x = if x.is_odd() { x + &m } else { x };
        (x / BigInt::from(2)).mod_floor(&m)
    };
    let np1 = n + 1u32;
    let s = np1.trailing_zeros().unwrap_or(0);
    let d = &np1 >> s;
    let bits = d.bits();
    let mut u = BigInt::one();
    let mut v = p.clone();
    let mut qk = q.mod_floor(&m);
    for i in (0..bits - 1).rev() {
        u = (&u * &v).mod_floor(&m);
        v = (&v * &v - BigInt::from(2) * &qk).mod_floor(&m);
        qk = (&qk * &qk).mod_floor(&m);
        if d.bit(i) {
            let nu = half(&p * &u + &v);
            let nv = half(&d_param * &u + &p * &v);
            u = nu;
            v = nv;
            qk = (&qk * &q).mod_floor(&m);
        }
    }
    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = (&v * &v - BigInt::from(2) * &qk).mod_floor(&m);
        qk = (&qk * &qk).mod_floor(&m);
        if v.is_zero() {
            return true;
        }
    }
    false
}

/// Primality: exact for 64-bit inputs, Baillie–PSW above.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_64(small);
    }
    if n.is_even() {
        return false;
    }
    is_strong_probable_prime_base2(n) && is_strong_lucas_probable_prime(n)
}

fn rho_step(x: &BigUint, c: u64, n: &BigUint) -> BigUint {
    (x * x + c) % n
}

/// Brent's cycle-finding variant of Pollard's rho; returns a nontrivial factor
/// of a composite odd `n`.
fn pollard_brent(n: &BigUint) -> BigUint {
    let mut c = 1u64;
    loop {
        let mut y = BigUint::from(2u32);
        let mut r = 1u64;
        let mut q = BigUint::one();
        let mut g = BigUint::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        const BATCH: u64 = 64;
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = rho_step(&y, c, n);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..BATCH.min(r - k) {
                    y = rho_step(&y, c, n);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == *n {
            loop {
                ys = rho_step(&ys, c, n);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if g != *n {
            return g;
        }
        c += 1;
    }
}

fn split_large(m: BigUint, out: &mut Vec<BigUint>, probable: &mut bool) {
    if m.is_one() {
        return;
    }
    // no prime factor below TRIAL_BOUND remains, so anything below its square is prime
    if m < BigUint::from(TRIAL_BOUND) * TRIAL_BOUND {
        out.push(m);
        return;
    }
    if is_probable_prime(&m) {
        if m.to_u64().is_none() {
            *probable = true;
        }
        out.push(m);
        return;
    }
    if let Some((root, k)) = perfect_power(&m) {
        let mut inner = Vec::new();
        split_large(root, &mut inner, probable);
        for p in inner {
            out.extend(core::iter::repeat_n(p, k as usize));
        }
        return;
    }
    let d = pollard_brent(&m);
    let rest = &m / &d;
    split_large(d, out, probable);
    split_large(rest, out, probable);
}

/// `m = root^k` with the largest such `k >= 2`, if any.
fn perfect_power(m: &BigUint) -> Option<(BigUint, u32)> {
    let bits = m.bits() as u32;
    (2..=bits).rev().find_map(|k| {
        let r = m.nth_root(k);
        (r.pow(k) == *m && r > BigUint::one()).then_some((r, k))
    })
}

/// Full factorization of `n >= 1` (`1` has no factors).
pub fn factorize(n: &BigUint) -> Factorization {
    let mut primes: Vec<BigUint> = Vec::new();
    let mut probable = false;
    if n.is_zero() || n.is_one() {
        return Factorization::default();
    }
    let mut m = n.clone();
    let mut d = 2u64;
    while d <= TRIAL_BOUND {
        if BigUint::from(d) * d > m {
            break;
        }
        while rem_u64(&m, d) == 0 {
            m /= d;
            primes.push(BigUint::from(d));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if !m.is_one() {
        if BigUint::from(d) * d > m {
            primes.push(m);
        } else {
            split_large(m, &mut primes, &mut probable);
        }
    }
    primes.sort();
    let mut factors: Vec<(BigUint, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((last, e)) if *last == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Factorization { factors, probable }
}

/// Ascending set of prime divisors; empty for `1`.
pub fn prime_support(x: &BigUint) -> Vec<BigUint> {
    factorize(x).primes()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GcdIdentity {
    /// `gcd(Q^{f1}, Q^{f2})` by Euclid.
    pub lhs: BigUint,
    /// `Q^{gcd(f1, f2)}`.
    pub rhs: BigUint,
    pub equal: bool,
}

pub fn gcd_identity_check(q: u64, f1: u32, f2: u32) -> Result<GcdIdentity, RepunitError> {
    let a = repunit_value(q, f1)?;
    let b = repunit_value(q, f2)?;
    let lhs = a.gcd(&b);
    let rhs = repunit_value(q, f1.gcd(&f2))?;
    let equal = lhs == rhs;
    Ok(GcdIdentity { lhs, rhs, equal })
}

/// A pair `f1 < f2` whose repunits share the same prime support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportCollision {
    pub q: u64,
    pub f1: u32,
    pub f2: u32,
    pub support: Vec<BigUint>,
}

/// Compares prime supports of `Q^f` for all `2 <= q <= q_max` and
/// `1 <= f1 < f2 <= f_max`; the result is sorted by `(q, f1, f2)`.
pub fn support_lemma_sweep(q_max: u64, f_max: u32) -> Vec<SupportCollision> {
    let mut out = Vec::new();
    for q in 2..=q_max {
        let supports: Vec<Vec<BigUint>> = (1..=f_max)
            .map(|f| prime_support(&repunit_value(q, f).expect("q >= 2, f >= 1")))
            .collect();
        for f1 in 1..=f_max {
            for f2 in f1 + 1..=f_max {
                let s1 = &supports[(f1 - 1) as usize];
                if *s1 == supports[(f2 - 1) as usize] {
                    out.push(SupportCollision {
                        q,
                        f1,
                        f2,
                        support: s1.clone(),
                    });
                }
            }
        }
    }
    out
}

/// `Q^f ≡ f (mod q - 1)`.
pub fn congruence_check(q: u64, f: u32) -> Result<bool, RepunitError> {
    let value = repunit_value(q, f)?;
    let m = q - 1;
    Ok(rem_u64(&value, m) == f as u64 % m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn repunit_examples() {
        assert_eq!(repunit_value(2, 2).unwrap(), big(3));
        assert_eq!(repunit_value(2, 4).unwrap(), big(15));
        assert_eq!(repunit_value(5, 3).unwrap(), big(31));
        assert_eq!(repunit_value(1, 3), Err(RepunitError::InvalidBase(1)));
        assert_eq!(repunit_value(3, 0), Err(RepunitError::InvalidLength));
    }

    #[test]
    fn repunit_invariants() {
        for q in 2..=64u64 {
            for f in 1..=32u32 {
                let v = repunit_value(q, f).unwrap();
                assert_eq!(v, repunit_by_division(q, f).unwrap());
                assert_eq!(&v * (q - 1), big(q).pow(f) - 1u32);
                assert!(v.gcd(&big(q)).is_one());
                assert!(congruence_check(q, f).unwrap());
            }
        }
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(2, &BigInt::from(8)).unwrap(), 3);
        assert_eq!(valuation(3, &BigInt::from(10)).unwrap(), 0);
        let q3 = BigInt::from(repunit_value(2, 3).unwrap());
        assert_eq!(valuation(7, &q3).unwrap(), 1);
        assert_eq!(valuation(2, &BigInt::from(-12)).unwrap(), 2);
        assert_eq!(valuation(2, &BigInt::zero()), Err(RepunitError::ZeroArgument));
        assert_eq!(valuation(4, &BigInt::from(8)), Err(RepunitError::NotPrime(4)));
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre_valuation(2, 4).unwrap(), 3);
        assert_eq!(legendre_valuation(2, 10).unwrap(), 8);
        assert_eq!(legendre_valuation(3, 9).unwrap(), 4);
        assert_eq!(legendre_valuation(5, 0).unwrap(), 0);
    }

    #[test]
    fn support_examples() {
        assert_eq!(prime_support(&big(12)), vec![big(2), big(3)]);
        assert_eq!(prime_support(&repunit_value(2, 6).unwrap()), vec![big(3), big(7)]);
        assert!(prime_support(&big(1)).is_empty());
    }

    #[test]
    fn factorizes_past_trial_bound() {
        // two primes above 10^6
        let p = 1_000_003u64;
        let q = 1_000_033u64;
        let f = factorize(&(big(p) * q));
        assert_eq!(f.factors, vec![(big(p), 1), (big(q), 1)]);
        assert!(!f.probable);
        let m61: BigUint = (big(1) << 61usize) - 1u32;
        let f = factorize(&(&m61 * &m61 * 3u32));
        assert_eq!(f.factors, vec![(big(3), 1), (m61.clone(), 2)]);
    }

    #[test]
    fn factorizes_beyond_64_bits() {
        // 2^89 - 1 is a Mersenne prime
        let m89: BigUint = (big(1) << 89usize) - 1u32;
        let f = factorize(&m89);
        assert_eq!(f.factors, vec![(m89.clone(), 1)]);
        assert!(f.probable);
        let n = &m89 * 1_000_003u64 * 1_000_003u64;
        let f = factorize(&n);
        assert_eq!(f.product(), n);
        assert_eq!(f.factors[0], (big(1_000_003), 2));
        // Q^{20} base 10 = 11111111111111111111
        let r = repunit_value(10, 20).unwrap();
        let f = factorize(&r);
        assert_eq!(f.product(), r);
        for (p, _) in &f.factors {
            assert!(is_probable_prime(p));
        }
    }

    #[test]
    fn primality_agrees_with_trial_division() {
        for n in 0..20_000u64 {
            assert_eq!(is_prime_64(n), is_prime_u64(n), "{n}");
        }
        // strong pseudoprimes to several bases
        for n in [3_215_031_751u64, 2_152_302_898_747, 3_474_749_660_383] {
            assert!(!is_prime_64(n));
        }
        // Carmichael number beyond 64 bits is rejected by BPSW
        let c = big(6_763_279_441u64) * big(13_526_558_881) * big(20_289_838_321);
        assert!(!is_probable_prime(&c));
    }

    #[test]
    fn gcd_identity_examples() {
        let r = gcd_identity_check(2, 4, 6).unwrap();
        assert_eq!((r.lhs.clone(), r.rhs.clone(), r.equal), (big(3), big(3), true));
        let r = gcd_identity_check(10, 3, 5).unwrap();
        assert_eq!(r.lhs, big(1));
        assert!(r.equal);
        assert!(gcd_identity_check(7, 5, 5).unwrap().equal);
    }

    #[test]
    fn small_sweeps_are_empty() {
        assert!(support_lemma_sweep(2, 2).is_empty());
        assert!(support_lemma_sweep(6, 8).is_empty());
    }

    #[test]
    fn congruence_examples() {
        assert!(congruence_check(5, 3).unwrap());
        assert!(congruence_check(2, 7).unwrap());
        assert!(congruence_check(9, 9).unwrap());
        assert_eq!(rem_u64(&repunit_value(9, 9).unwrap(), 8), 1);
    }
}
