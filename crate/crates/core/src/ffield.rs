//! Exact arithmetic in small finite fields `F_{p^d}`, field towers
//! `F_q ⊂ F_{q^f}`, multiplicative characters, and the equivariant
//! root-of-unity tables built from them.
//!
//! Elements are stored as indices `Σ c_i p^i` over the power basis of the
//! modulus root. Every field carries a full discrete-log table, so fields are
//! capped at [`MAX_FIELD_ORDER`] elements.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_integer::Integer;
use thiserror::Error;

/// Largest field order accepted by [`make_field`].
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field of order {p}^{deg} exceeds the size guard of 2^20 elements")]
    SizeGuardExceeded { p: u64, deg: u32 },
    #[error("extension degree must be at least 1")]
    InvalidDegree,
    #[error("element is zero")]
    ZeroElement,
    #[error("element does not belong to the expected field")]
    FieldMismatch,
    #[error("coefficient {0} is out of range for the field")]
    CoefficientOutOfRange(u64),
    #[error("gcd(f, q-1) = gcd({f}, {q_minus_1}) is not 1")]
    PrimenessViolated { f: u32, q_minus_1: u64 },
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Splits `q = p^ν`; `None` when `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= q && q % p != 0 {
        p += 1;
    }
    if q % p != 0 {
        p = q;
    }
    let mut rest = q;
    let mut nu = 0;
    while rest % p == 0 {
        rest /= p;
        nu += 1;
    }
    (rest == 1).then_some((p, nu))
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Dense polynomials over F_p, low-to-high, used only while bootstrapping a field.
mod fp_poly {
    use alloc::vec::Vec;

    pub fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    fn inv(a: u64, p: u64) -> u64 {
        pow(a, p - 2, p)
    }

    fn pow(mut b: u64, mut e: u64, p: u64) -> u64 {
        let mut r = 1 % p;
        b %= p;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    }

    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut a = trim(a.to_vec());
        let dm = m.len() - 1;
        let lead_inv = inv(m[dm], p);
        while a.len() > dm {
            let shift = a.len() - 1 - dm;
            let c = a[a.len() - 1] * lead_inv % p;
            for (i, &mi) in m.iter().enumerate() {
                a[shift + i] = (a[shift + i] + p - c * mi % p) % p;
            }
            a = trim(a);
        }
        a
    }

    pub fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = alloc::vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        rem(&out, m, p)
    }

    pub fn powmod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
        let mut result = rem(&[1], m, p);
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                result = mulmod(&result, &b, m, p);
            }
            b = mulmod(&b, &b, m, p);
            e >>= 1;
        }
        result
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let out = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(out)
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = trim(a.to_vec());
        let mut b = trim(b.to_vec());
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// Rabin's irreducibility test for a monic `m` of degree `d >= 1`.
    pub fn is_irreducible(m: &[u64], p: u64) -> bool {
        let d = (m.len() - 1) as u64;
        if d == 1 {
            return true;
        }
        let x = [0u64, 1];
        // x^{p^k} mod m for k = 0..=d
        let mut frob = Vec::with_capacity(d as usize + 1);
        let mut cur = rem(&x, m, p);
        frob.push(cur.clone());
        for _ in 0..d {
            cur = powmod(&cur, p, m, p);
            frob.push(cur.clone());
        }
        if sub(&frob[d as usize], &x, p) != rem(&[], m, p) {
            return false;
        }
        for r in super::distinct_prime_factors(d) {
            let k = (d / r) as usize;
            let g = gcd(m, &sub(&frob[k], &x, p), p);
            if g.len() != 1 {
                return false;
            }
        }
        true
    }
}

fn add_indices(p: u32, a: u32, b: u32) -> u32 {
    if p == 2 {
        return a ^ b;
    }
    let (mut x, mut y) = (a, b);
    let mut out = 0u32;
    let mut place = 1u32;
    while x > 0 || y > 0 {
        out += ((x % p + y % p) % p) * place;
        x /= p;
        y /= p;
        place = place.wrapping_mul(p);
    }
    out
}

struct FieldData {
    p: u64,
    deg: u32,
    order: u32,
    modulus: Vec<u64>,
    gen: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
}

/// The finite field `F_{p^deg}` with a fixed modulus, generator and
/// discrete-log table. Cloning is cheap.
#[derive(Clone)]
pub struct FiniteField(Arc<FieldData>);

/// An element of some [`FiniteField`], stored as its index
/// `Σ c_i p^i` in the power basis of the modulus root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FFElement(u32);

impl FFElement {
    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteField")
            .field("p", &self.0.p)
            .field("deg", &self.0.deg)
            .field("modulus", &self.0.modulus)
            .field("gen", &self.0.gen)
            .finish()
    }
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.p == other.0.p && self.0.deg == other.0.deg)
    }
}

impl Eq for FiniteField {}

/// Lexicographic order on coefficient vectors, lowest coefficient first.
fn lex_tuples(p: u64, deg: u32) -> impl Iterator<Item = Vec<u64>> {
    let total = p.pow(deg);
    (0..total).map(move |n| {
        let mut digits = vec![0u64; deg as usize];
        let mut rest = n;
        for i in (0..deg as usize).rev() {
            digits[i] = rest % p;
            rest /= p;
        }
        digits
    })
}

/// Builds `F_{p^deg}` deterministically: the modulus is the lexicographically
/// least monic irreducible polynomial (coefficients compared low-to-high) and
/// the generator is the lexicographically least primitive element.
pub fn make_field(p: u64, deg: u32) -> Result<FiniteField, FieldError> {
    if !is_prime_u64(p) {
        return Err(FieldError::NotPrime(p));
    }
    if deg == 0 {
        return Err(FieldError::InvalidDegree);
    }
    let order = p
        .checked_pow(deg)
        .filter(|&o| o <= MAX_FIELD_ORDER)
        .ok_or(FieldError::SizeGuardExceeded { p, deg })?;

    let modulus = if deg == 1 {
        vec![0, 1]
    } else {
        lex_tuples(p, deg)
            .map(|mut low| {
                low.push(1);
                low
            })
            .find(|m| m[0] != 0 && fp_poly::is_irreducible(m, p))
            .expect("an irreducible polynomial of every degree exists")
    };

    let to_index = |digits: &[u64]| -> u32 {
        digits.iter().rev().fold(0u64, |acc, &c| acc * p + c) as u32
    };
    let raw_mul = |a: &[u64], b: &[u64]| -> Vec<u64> {
        let mut r = fp_poly::mulmod(a, b, &modulus, p);
        r.resize(deg as usize, 0);
        r
    };
    let raw_pow = |a: &[u64], e: u64| -> Vec<u64> {
        let mut r = fp_poly::powmod(a, e, &modulus, p);
        r.resize(deg as usize, 0);
        r
    };

    let group = order - 1;
    let prime_divisors = distinct_prime_factors(group);
    let mut one = vec![0u64; deg as usize];
    one[0] = 1;
    let gen_digits = lex_tuples(p, deg)
        .filter(|c| c.iter().any(|&x| x != 0))
        .find(|c| prime_divisors.iter().all(|&r| raw_pow(c, group / r) != one))
        .expect("the multiplicative group of a finite field is cyclic");

    // times_gen[j * p + c] = index of c · t^j · gen
    let mut times_gen = Vec::with_capacity((deg as u64 * p) as usize);
    for j in 0..deg as usize {
        for c in 0..p {
            let mut mono = vec![0u64; deg as usize];
            mono[j] = c;
            times_gen.push(to_index(&raw_mul(&mono, &gen_digits)));
        }
    }
    let mut exp = Vec::with_capacity(group as usize);
    let mut log = vec![u32::MAX; order as usize];
    let mut cur = 1u32;
    for k in 0..group {
        exp.push(cur);
        log[cur as usize] = k as u32;
        let mut rest = cur;
        let mut next = 0u32;
        for j in 0..deg as usize {
            let c = rest % p as u32;
            rest /= p as u32;
            if c != 0 {
                next = add_indices(p as u32, next, times_gen[j * p as usize + c as usize]);
            }
        }
        cur = next;
    }
    debug_assert_eq!(cur, 1);

    Ok(FiniteField(Arc::new(FieldData {
        p,
        deg,
        order: order as u32,
        modulus,
        gen: to_index(&gen_digits),
        exp,
        log,
    })))
}

/// Fixed multiplicative generator of `F^×` (lexicographically least).
pub fn mult_generator(field: &FiniteField) -> FFElement {
    field.gen()
}

impl FiniteField {
    pub fn p(&self) -> u64 {
        self.0.p
    }

    pub fn deg(&self) -> u32 {
        self.0.deg
    }

    /// Number of elements `p^deg`.
    pub fn order(&self) -> u64 {
        self.0.order as u64
    }

    /// Monic modulus over `F_p`, low-to-high.
    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    pub fn gen(&self) -> FFElement {
        FFElement(self.0.gen)
    }

    pub fn zero(&self) -> FFElement {
        FFElement(0)
    }

    pub fn one(&self) -> FFElement {
        FFElement(1)
    }

    /// The modulus root `t`; the prime field has modulus `X`, so `t = 0` there.
    pub fn root(&self) -> FFElement {
        if self.0.deg == 1 {
            FFElement(0)
        } else {
            FFElement(self.0.p as u32)
        }
    }

    pub fn contains(&self, a: FFElement) -> bool {
        a.0 < self.0.order
    }

    pub fn element(&self, index: u32) -> Result<FFElement, FieldError> {
        if index < self.0.order {
            Ok(FFElement(index))
        } else {
            Err(FieldError::CoefficientOutOfRange(index as u64))
        }
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, c: i64) -> FFElement {
        FFElement(c.rem_euclid(self.0.p as i64) as u32)
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<FFElement, FieldError> {
        if coeffs.len() > self.0.deg as usize {
            return Err(FieldError::FieldMismatch);
        }
        let mut idx = 0u64;
        for &c in coeffs.iter().rev() {
            if c >= self.0.p {
                return Err(FieldError::CoefficientOutOfRange(c));
            }
            idx = idx * self.0.p + c;
        }
        Ok(FFElement(idx as u32))
    }

    /// Coefficients over `F_p`, low-to-high, always of length `deg`.
    pub fn coeffs(&self, a: FFElement) -> Vec<u64> {
        let p = self.0.p as u32;
        let mut rest = a.0;
        (0..self.0.deg)
            .map(|_| {
                let c = rest % p;
                rest /= p;
                c as u64
            })
            .collect()
    }

    /// Lexicographic comparison of coefficient vectors, lowest coefficient first.
    pub fn lex_cmp(&self, a: FFElement, b: FFElement) -> Ordering {
        self.coeffs(a).cmp(&self.coeffs(b))
    }

    pub fn elements(&self) -> impl Iterator<Item = FFElement> {
        (0..self.0.order).map(FFElement)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FFElement> {
        (1..self.0.order).map(FFElement)
    }

    pub fn add(&self, a: FFElement, b: FFElement) -> FFElement {
        FFElement(add_indices(self.0.p as u32, a.0, b.0))
    }

    pub fn neg(&self, a: FFElement) -> FFElement {
        let p = self.0.p as u32;
        if p == 2 {
            return a;
        }
        let mut x = a.0;
        let mut out = 0u32;
        let mut place = 1u32;
        while x > 0 {
            out += ((p - x % p) % p) * place;
            x /= p;
            place = place.wrapping_mul(p);
        }
        FFElement(out)
    }

    pub fn sub(&self, a: FFElement, b: FFElement) -> FFElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FFElement, b: FFElement) -> FFElement {
        if a.0 == 0 || b.0 == 0 {
            return FFElement(0);
        }
        let n = self.0.exp.len() as u64;
        let k = (self.0.log[a.0 as usize] as u64 + self.0.log[b.0 as usize] as u64) % n;
        FFElement(self.0.exp[k as usize])
    }

    pub fn inv(&self, a: FFElement) -> Result<FFElement, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::ZeroElement);
        }
        let n = self.0.exp.len() as u64;
        let k = (n - self.0.log[a.0 as usize] as u64) % n;
        Ok(FFElement(self.0.exp[k as usize]))
    }

    pub fn div(&self, a: FFElement, b: FFElement) -> Result<FFElement, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FFElement, e: u64) -> FFElement {
        if e == 0 {
            return self.one();
        }
        if a.0 == 0 {
            return a;
        }
        let n = self.0.exp.len() as u64;
        let k = (self.0.log[a.0 as usize] as u64 % n) * (e % n) % n;
        FFElement(self.0.exp[k as usize])
    }

    /// Discrete logarithm base [`FiniteField::gen`]; `None` for zero.
    pub fn log(&self, a: FFElement) -> Option<u64> {
        (a.0 != 0).then(|| self.0.log[a.0 as usize] as u64)
    }

    /// `gen^k`.
    pub fn exp(&self, k: u64) -> FFElement {
        let n = self.0.exp.len() as u64;
        FFElement(self.0.exp[(k % n) as usize])
    }

    /// Multiplicative order of a nonzero element.
    pub fn mult_order(&self, a: FFElement) -> Option<u64> {
        let n = self.order() - 1;
        self.log(a).map(|k| n / k.gcd(&n))
    }

    /// Inverse Frobenius `a ↦ a^{1/p}`.
    pub fn pth_root(&self, a: FFElement) -> FFElement {
        self.pow(a, self.0.p.pow(self.0.deg - 1))
    }
}

/// A tower `F_q ⊂ F_{q^f}` with an explicit embedding of the base field.
#[derive(Debug, Clone)]
pub struct FieldTower {
    base: FiniteField,
    big: FiniteField,
    degree: u32,
    embed: Vec<FFElement>,
    descend: Vec<u32>,
}

impl FieldTower {
    /// Builds `F_{q^f}` over the given base field `F_q`.
    pub fn new(base: &FiniteField, f: u32) -> Result<Self, FieldError> {
        if f == 0 {
            return Err(FieldError::InvalidDegree);
        }
        let big = make_field(base.p(), base.deg() * f)?;
        Self::over(base, &big)
    }

    /// Views `big` as an extension of `base`; the base modulus root is sent to
    /// `β^j` for the least `j` with `β = gen^{Q^f}` that makes it a root.
    pub fn over(base: &FiniteField, big: &FiniteField) -> Result<Self, FieldError> {
        if base.p() != big.p() || big.deg() % base.deg() != 0 {
            return Err(FieldError::FieldMismatch);
        }
        let degree = big.deg() / base.deg();
        let q = base.order();
        let root = if base.deg() == 1 {
            big.zero()
        } else {
            let beta = big.pow(big.gen(), (big.order() - 1) / (q - 1));
            let modulus = base.modulus();
            (0..q - 1)
                .map(|j| big.pow(beta, j))
                .find(|&r| {
                    let mut acc = big.zero();
                    for &c in modulus.iter().rev() {
                        acc = big.add(big.mul(acc, r), big.from_int(c as i64));
                    }
                    acc.is_zero()
                })
                .expect("the subfield of order q contains every root of the base modulus")
        };
        let embed: Vec<FFElement> = base
            .elements()
            .map(|a| {
                let mut acc = big.zero();
                for &c in base.coeffs(a).iter().rev() {
                    acc = big.add(big.mul(acc, root), big.from_int(c as i64));
                }
                acc
            })
            .collect();
        let mut descend = vec![u32::MAX; big.order() as usize];
        for (i, e) in embed.iter().enumerate() {
            descend[e.0 as usize] = i as u32;
        }
        Ok(Self {
            base: base.clone(),
            big: big.clone(),
            degree,
            embed,
            descend,
        })
    }

    pub fn base(&self) -> &FiniteField {
        &self.base
    }

    pub fn big(&self) -> &FiniteField {
        &self.big
    }

    /// Relative degree `f = [F_{q^f} : F_q]`.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn embed(&self, a: FFElement) -> FFElement {
        self.embed[a.0 as usize]
    }

    /// Preimage in the base field, if `b` lies in the embedded copy of `F_q`.
    pub fn descend(&self, b: FFElement) -> Option<FFElement> {
        match self.descend.get(b.0 as usize) {
            Some(&i) if i != u32::MAX => Some(FFElement(i)),
            _ => None,
        }
    }

    /// `Q^f = (q^f - 1)/(q - 1)`.
    pub fn repunit(&self) -> u64 {
        (self.big.order() - 1) / (self.base.order() - 1)
    }

    /// Power basis `1, θ, …, θ^{f-1}` of the big modulus root `θ` over `F_q`.
    pub fn power_basis(&self) -> Vec<FFElement> {
        let theta = self.big.root();
        (0..self.degree as u64).map(|i| self.big.pow(theta, i)).collect()
    }

    /// For every nonzero element of the big field, the first index `i0` with a
    /// nonzero coordinate in the power basis, and that coordinate.
    fn leading_coordinates(&self) -> Vec<(u32, FFElement)> {
        let basis = self.power_basis();
        let q = self.base.order();
        let mut out = vec![(u32::MAX, FFElement(0)); self.big.order() as usize];
        let total = self.big.order();
        for n in 1..total {
            let mut rest = n;
            let mut elem = self.big.zero();
            let mut lead: Option<(u32, FFElement)> = None;
            for (i, &w) in basis.iter().enumerate() {
                let c = FFElement((rest % q) as u32);
                rest /= q;
                if c.is_zero() {
                    continue;
                }
                if lead.is_none() {
                    lead = Some((i as u32, c));
                }
                elem = self.big.add(elem, self.big.mul(self.embed(c), w));
            }
            out[elem.0 as usize] = lead.expect("n > 0 has a nonzero digit");
        }
        out
    }
}

/// `exp(2πi · num/den)` with `0 <= num < den` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RootOfUnity {
    num: u64,
    den: u64,
}

impl RootOfUnity {
    pub fn new(num: i64, den: u64) -> Self {
        assert!(den > 0, "root of unity with zero denominator");
        let num = num.rem_euclid(den as i64) as u64;
        let g = num.gcd(&den);
        Self {
            num: num / g,
            den: den / g,
        }
    }

    pub fn one() -> Self {
        Self { num: 0, den: 1 }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn is_one(&self) -> bool {
        self.num == 0
    }

    pub fn mul(self, other: Self) -> Self {
        let den = self.den.lcm(&other.den);
        let num = self.num * (den / self.den) + other.num * (den / other.den);
        Self::new((num % den) as i64, den)
    }

    pub fn conj(self) -> Self {
        Self::new(-(self.num as i64), self.den)
    }

    /// Whether this value is a `n`-th root of unity.
    pub fn in_mu(&self, n: u64) -> bool {
        n % self.den == 0
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num == 0 {
            write!(f, "1")
        } else if self.den == 2 {
            write!(f, "-1")
        } else {
            write!(f, "exp(2πi·{}/{})", self.num, self.den)
        }
    }
}

/// Multiplicative character of `F_q^×`: `χ(gen^j) = ω^{k j}` for a primitive
/// `(q-1)`-th root of unity `ω`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Character {
    field_order: u64,
    exponent: u64,
}

impl Character {
    pub fn new(field_order: u64, exponent: i64) -> Self {
        let n = field_order - 1;
        Self {
            field_order,
            exponent: exponent.rem_euclid(n as i64) as u64,
        }
    }

    pub fn trivial(field_order: u64) -> Self {
        Self::new(field_order, 0)
    }

    /// All `q - 1` characters, trivial first.
    pub fn all(field_order: u64) -> impl Iterator<Item = Self> {
        (0..field_order - 1).map(move |k| Self::new(field_order, k as i64))
    }

    pub fn field_order(&self) -> u64 {
        self.field_order
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn is_trivial(&self) -> bool {
        self.exponent == 0
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(self.field_order, (self.exponent + other.exponent) as i64)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.field_order, -(self.exponent as i64))
    }

    /// `χ` evaluated on `gen^j`.
    pub fn value_at_log(&self, j: u64) -> RootOfUnity {
        let n = self.field_order - 1;
        RootOfUnity::new(((self.exponent % n) * (j % n) % n) as i64, n)
    }
}

/// Evaluates `χ(a)` for `a ∈ F_q^×`.
pub fn char_value(chi: &Character, field: &FiniteField, a: FFElement) -> Result<RootOfUnity, FieldError> {
    if field.order() != chi.field_order || !field.contains(a) {
        return Err(FieldError::FieldMismatch);
    }
    let j = field.log(a).ok_or(FieldError::ZeroElement)?;
    Ok(chi.value_at_log(j))
}

/// A function `F_{q^f}^× → 𝕋` equivariant for a character of `F_q^×`:
/// `value(a·b) = twist(a) · value(b)`.
#[derive(Debug, Clone)]
pub struct EquivariantTable {
    tower: FieldTower,
    values: Vec<RootOfUnity>,
    twist: Character,
}

impl EquivariantTable {
    pub fn tower(&self) -> &FieldTower {
        &self.tower
    }

    pub fn twist_char(&self) -> Character {
        self.twist
    }

    /// `None` at zero, which is outside the domain.
    pub fn value(&self, b: FFElement) -> Option<RootOfUnity> {
        if b.is_zero() || !self.tower.big.contains(b) {
            None
        } else {
            Some(self.values[b.0 as usize])
        }
    }

    /// Exhaustive check of `value(a·b) = twist(a)·value(b)` over all
    /// `a ∈ F_q^×`, `b ∈ F_{q^f}^×`. Returns the first failing pair.
    pub fn find_equivariance_violation(&self) -> Option<(FFElement, FFElement)> {
        let base = &self.tower.base;
        let big = &self.tower.big;
        for a in base.nonzero_elements() {
            let ta = char_value(&self.twist, base, a).expect("nonzero base element");
            let ea = self.tower.embed(a);
            for b in big.nonzero_elements() {
                let lhs = self.values[big.mul(ea, b).0 as usize];
                if lhs != ta.mul(self.values[b.0 as usize]) {
                    return Some((a, b));
                }
            }
        }
        None
    }
}

fn check_base(chi: &Character, tower: &FieldTower) -> Result<(), FieldError> {
    if chi.field_order != tower.base.order() {
        Err(FieldError::FieldMismatch)
    } else {
        Ok(())
    }
}

/// `Ψ(Σ_{i ≥ i0} b_i θ^i) = ψ(b_{i0})`, where `i0` is the first nonzero
/// coordinate in the power basis of the big modulus root.
pub fn build_psi(psi: &Character, tower: &FieldTower) -> Result<EquivariantTable, FieldError> {
    check_base(psi, tower)?;
    let base = &tower.base;
    let mut values = vec![RootOfUnity::one(); tower.big.order() as usize];
    if !psi.is_trivial() {
        for (idx, &(i0, c)) in tower.leading_coordinates().iter().enumerate().skip(1) {
            debug_assert_ne!(i0, u32::MAX);
            values[idx] = char_value(psi, base, c)?;
        }
    }
    Ok(EquivariantTable {
        tower: tower.clone(),
        values,
        twist: *psi,
    })
}

fn primeness(tower: &FieldTower) -> Result<u64, FieldError> {
    let f = tower.degree;
    let n = tower.base.order() - 1;
    if (f as u64).gcd(&n) != 1 {
        return Err(FieldError::PrimenessViolated { f, q_minus_1: n });
    }
    let qf = tower.repunit();
    // inverse of Q^f modulo q - 1, which exists because Q^f ≡ f (mod q - 1)
    if n == 1 {
        return Ok(0);
    }
    let e = (qf as i64).extended_gcd(&(n as i64));
    Ok(e.x.rem_euclid(n as i64) as u64)
}

/// `X(b) = χ̃(b^{Q^f})` with `χ̃(a^{Q^f}) = χ(a)`; requires `gcd(f, q-1) = 1`.
pub fn build_x(chi: &Character, tower: &FieldTower) -> Result<EquivariantTable, FieldError> {
    check_base(chi, tower)?;
    let inv_q = primeness(tower)?;
    let qf = tower.repunit();
    let base = &tower.base;
    let big = &tower.big;
    let mut values = vec![RootOfUnity::one(); big.order() as usize];
    for b in big.nonzero_elements() {
        let c = tower
            .descend(big.pow(b, qf))
            .expect("b^{Q^f} lies in F_q^×");
        let j = base.log(c).expect("nonzero");
        values[b.0 as usize] = chi.value_at_log(j * inv_q);
    }
    Ok(EquivariantTable {
        tower: tower.clone(),
        values,
        twist: *chi,
    })
}

/// The unique `a ∈ F_q^×` with `(a·β)^{Q^f} = 1`; requires `gcd(f, q-1) = 1`.
pub fn find_unit_correction(tower: &FieldTower, beta: FFElement) -> Result<FFElement, FieldError> {
    let inv_q = primeness(tower)?;
    if beta.is_zero() {
        return Err(FieldError::ZeroElement);
    }
    if !tower.big.contains(beta) {
        return Err(FieldError::FieldMismatch);
    }
    let qf = tower.repunit();
    let base = &tower.base;
    let d = tower
        .descend(tower.big.pow(beta, qf))
        .expect("β^{Q^f} lies in F_q^×");
    let a = base.pow(base.inv(d)?, inv_q);
    debug_assert!(tower.big.pow(tower.big.mul(tower.embed(a), beta), qf) == tower.big.one());
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn enumerate_irreducible_quadratics(p: u64) -> Vec<[u64; 3]> {
        let mut out = Vec::new();
        for c0 in 0..p {
            for c1 in 0..p {
                let has_root = (0..p).any(|x| (x * x + c1 * x + c0) % p == 0);
                if !has_root {
                    out.push([c0, c1, 1]);
                }
            }
        }
        out
    }

    #[test]
    fn prime_field_f2() {
        let f = make_field(2, 1).unwrap();
        assert_eq!(f.modulus(), &[0, 1]);
        assert_eq!(f.gen(), f.one());
        assert_eq!(f.order(), 2);
    }

    #[test]
    fn f4_modulus_is_the_unique_quadratic() {
        let quads = enumerate_irreducible_quadratics(2);
        assert_eq!(quads, vec![[1, 1, 1]]);
        let f = make_field(2, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        assert_eq!(mult_generator(&f), f.root());
    }

    #[test]
    fn f9_modulus_and_generator() {
        let f = make_field(3, 2).unwrap();
        // lex-least irreducible with c0 first: X^2 + 1
        assert_eq!(f.modulus(), enumerate_irreducible_quadratics(3)[0]);
        assert_eq!(f.modulus(), &[1, 0, 1]);
        let g = f.gen();
        assert_eq!(f.mult_order(g), Some(8));
        let mut seen = [false; 9];
        for k in 0..8 {
            let e = f.exp(k);
            assert!(!seen[e.index() as usize]);
            seen[e.index() as usize] = true;
            assert_eq!(f.log(e), Some(k));
        }
        assert!(!seen[0]);
    }

    #[test]
    fn generator_of_f5_is_two() {
        let f = make_field(5, 1).unwrap();
        let g = mult_generator(&f);
        assert_eq!(g, f.from_int(2));
        let powers: Vec<_> = (1..=4).map(|k| f.pow(g, k).index()).collect();
        assert_eq!(powers, vec![2, 4, 3, 1]);
    }

    #[test]
    fn generator_is_lex_least_primitive() {
        for (p, d) in [(2, 3), (2, 4), (3, 2), (3, 3), (5, 2), (7, 2)] {
            let f = make_field(p, d).unwrap();
            let mut elems: Vec<_> = f.nonzero_elements().collect();
            elems.sort_by(|a, b| f.lex_cmp(*a, *b));
            let first = elems
                .into_iter()
                .find(|&a| f.mult_order(a) == Some(f.order() - 1))
                .unwrap();
            assert_eq!(first, f.gen());
        }
    }

    #[test]
    fn field_errors() {
        assert_eq!(make_field(4, 1).unwrap_err(), FieldError::NotPrime(4));
        assert_eq!(make_field(2, 0).unwrap_err(), FieldError::InvalidDegree);
        assert!(matches!(
            make_field(2, 21),
            Err(FieldError::SizeGuardExceeded { .. })
        ));
        assert!(make_field(2, 20).is_ok());
    }

    #[test]
    fn arithmetic_matches_distributivity() {
        let f = make_field(3, 2).unwrap();
        for a in f.elements() {
            for b in f.elements() {
                for c in f.elements() {
                    let lhs = f.mul(a, f.add(b, c));
                    let rhs = f.add(f.mul(a, b), f.mul(a, c));
                    assert_eq!(lhs, rhs);
                }
                assert_eq!(f.add(f.sub(a, b), b), a);
            }
        }
    }

    #[test]
    fn prime_power_split() {
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(2), Some((2, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
        assert_eq!(prime_power(4093), Some((4093, 1)));
    }

    #[test]
    fn char_values() {
        let f3 = make_field(3, 1).unwrap();
        let chi = Character::new(3, 1);
        assert_eq!(f3.gen(), f3.from_int(2));
        assert_eq!(char_value(&chi, &f3, f3.from_int(2)).unwrap(), RootOfUnity::new(1, 2));
        let f5 = make_field(5, 1).unwrap();
        let chi = Character::new(5, 2);
        let a = f5.pow(f5.gen(), 2);
        assert!(char_value(&chi, &f5, a).unwrap().is_one());
        assert_eq!(
            char_value(&Character::trivial(5), &f5, f5.from_int(3)).unwrap(),
            RootOfUnity::one()
        );
        assert_eq!(char_value(&chi, &f5, f5.zero()), Err(FieldError::ZeroElement));
    }

    #[test]
    fn psi_small_example() {
        let base = make_field(3, 1).unwrap();
        let tower = FieldTower::new(&base, 2).unwrap();
        let psi = Character::new(3, 1);
        let table = build_psi(&psi, &tower).unwrap();
        let basis = tower.power_basis();
        assert_eq!(table.value(basis[0]), Some(RootOfUnity::one()));
        let two_theta = tower.big().mul(tower.embed(base.from_int(2)), basis[1]);
        assert_eq!(table.value(two_theta), Some(RootOfUnity::new(1, 2)));
        assert_eq!(table.value(tower.big().zero()), None);
    }

    #[test]
    fn psi_trivial_is_constant() {
        let base = make_field(2, 2).unwrap();
        let tower = FieldTower::new(&base, 2).unwrap();
        let t = build_psi(&Character::trivial(4), &tower).unwrap();
        assert!(tower.big().nonzero_elements().all(|b| t.value(b).unwrap().is_one()));
    }

    #[test]
    fn psi_equivariance_q4_f2() {
        let base = make_field(2, 2).unwrap();
        let tower = FieldTower::new(&base, 2).unwrap();
        for psi in Character::all(4) {
            let t = build_psi(&psi, &tower).unwrap();
            assert_eq!(t.find_equivariance_violation(), None);
        }
    }

    #[test]
    fn tower_embedding_is_a_ring_map() {
        let base = make_field(2, 2).unwrap();
        let tower = FieldTower::new(&base, 3).unwrap();
        for a in base.elements() {
            for b in base.elements() {
                let big = tower.big();
                assert_eq!(tower.embed(base.mul(a, b)), big.mul(tower.embed(a), tower.embed(b)));
                assert_eq!(tower.embed(base.add(a, b)), big.add(tower.embed(a), tower.embed(b)));
            }
            assert_eq!(tower.descend(tower.embed(a)), Some(a));
        }
        assert_eq!(tower.repunit(), 21);
    }

    #[test]
    fn x_table_q3_f3() {
        let base = make_field(3, 1).unwrap();
        let tower = FieldTower::new(&base, 3).unwrap();
        assert_eq!(tower.repunit(), 13);
        let chi = Character::new(3, 1);
        let x = build_x(&chi, &tower).unwrap();
        for b in tower.big().nonzero_elements() {
            let c = tower.descend(tower.big().pow(b, 13)).unwrap();
            assert_eq!(x.value(b), Some(char_value(&chi, &base, c).unwrap()));
        }
        assert_eq!(x.find_equivariance_violation(), None);
        let trivial = build_x(&Character::trivial(3), &tower).unwrap();
        assert!(tower.big().nonzero_elements().all(|b| trivial.value(b).unwrap().is_one()));
    }

    #[test]
    fn x_requires_primeness() {
        let base = make_field(3, 1).unwrap();
        let tower = FieldTower::new(&base, 2).unwrap();
        assert_eq!(
            build_x(&Character::new(3, 1), &tower).unwrap_err(),
            FieldError::PrimenessViolated { f: 2, q_minus_1: 2 }
        );
        let b4 = make_field(2, 2).unwrap();
        assert!(build_x(&Character::new(4, 1), &FieldTower::new(&b4, 2).unwrap()).is_ok());
    }

    #[test]
    fn unit_correction_q2_is_trivial() {
        let base = make_field(2, 1).unwrap();
        for f in 1..=4 {
            let tower = FieldTower::new(&base, f).unwrap();
            for b in tower.big().nonzero_elements() {
                assert_eq!(find_unit_correction(&tower, b).unwrap(), base.one());
            }
        }
    }

    #[test]
    fn unit_correction_q3_f3_exhaustive() {
        let base = make_field(3, 1).unwrap();
        let tower = FieldTower::new(&base, 3).unwrap();
        let big = tower.big();
        for b in big.nonzero_elements() {
            let valid: Vec<_> = base
                .nonzero_elements()
                .filter(|&a| big.pow(big.mul(tower.embed(a), b), 13) == big.one())
                .collect();
            assert_eq!(valid.len(), 1);
            assert_eq!(find_unit_correction(&tower, b).unwrap(), valid[0]);
        }
        assert_eq!(find_unit_correction(&tower, big.zero()), Err(FieldError::ZeroElement));
    }

    #[test]
    fn root_of_unity_normalizes() {
        assert_eq!(RootOfUnity::new(2, 4), RootOfUnity::new(1, 2));
        assert_eq!(RootOfUnity::new(-1, 4), RootOfUnity::new(3, 4));
        assert_eq!(RootOfUnity::new(4, 4), RootOfUnity::one());
        assert_eq!(RootOfUnity::new(1, 4).mul(RootOfUnity::new(1, 4)), RootOfUnity::new(1, 2));
        assert!(RootOfUnity::new(1, 3).in_mu(6));
    }
}
