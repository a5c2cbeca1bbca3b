//! Finitely generated ℤ/2-graded abelian groups over ℤ and its localizations
//! ℤ_S, with the matrix machinery (Smith normal form, kernels, cokernels,
//! stationary colimits) that computes them.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::repunit;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbError {
    #[error("modules over different coefficient rings")]
    RingMismatch,
    #[error("no S-unit determinant within the first {0} stages")]
    NotStationary(u64),
    #[error("matrix entry has a denominator not invertible in the ring")]
    DenominatorNotInvertible,
    #[error("matrix dimensions do not match")]
    DimensionMismatch,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("exterior algebra of rank {0} is too large")]
    RankTooLarge(u32),
}

/// ℤ with a finite set of primes inverted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct CoefficientRing {
    inverted: BTreeSet<u64>,
}

impl CoefficientRing {
    pub fn integers() -> Self {
        Self::default()
    }

    pub fn inverting(primes: impl IntoIterator<Item = u64>) -> Result<Self, AbError> {
        let mut inverted = BTreeSet::new();
        for p in primes {
            if !repunit::is_prime_64(p) {
                return Err(AbError::NotPrime(p));
            }
            inverted.insert(p);
        }
        Ok(Self { inverted })
    }

    /// `ℤ[1/n]`: invert every prime dividing `n`.
    pub fn inverting_divisors_of(n: &BigUint) -> Self {
        let inverted = repunit::prime_support(n)
            .iter()
            .map(|p| p.to_u64().expect("prime divisor of a desk-scale integer fits u64"))
            .collect();
        Self { inverted }
    }

    pub fn inverted(&self) -> &BTreeSet<u64> {
        &self.inverted
    }

    pub fn is_integers(&self) -> bool {
        self.inverted.is_empty()
    }

    /// Smallest ring containing both.
    pub fn join(&self, other: &Self) -> Self {
        Self {
            inverted: self.inverted.union(&other.inverted).copied().collect(),
        }
    }

    pub fn contains_ring(&self, other: &Self) -> bool {
        other.inverted.is_subset(&self.inverted)
    }

    /// The part of `|x|` coprime to every inverted prime.
    pub fn strip(&self, x: &BigInt) -> BigUint {
        let mut m = x.magnitude().clone();
        if m.is_zero() {
            return m;
        }
        for &p in &self.inverted {
            let p = BigUint::from(p);
            while (&m % &p).is_zero() {
                m /= &p;
            }
        }
        m
    }

    pub fn is_unit(&self, x: &BigInt) -> bool {
        self.strip(x).is_one()
    }
}

impl fmt::Display for CoefficientRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverted.is_empty() {
            return write!(f, "Z");
        }
        let primes: Vec<String> = self.inverted.iter().map(|p| format!("{p}")).collect();
        write!(f, "Z[1/{}]", primes.join(","))
    }
}

/// One graded piece in canonical form: free rank plus invariant factors
/// `d₁ | d₂ | …`, each `> 1` and coprime to the inverted primes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Part {
    pub rank: u64,
    pub torsion: Vec<BigUint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Summand {
    Free,
    Cyclic(BigUint),
}

impl Part {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn free(rank: u64) -> Self {
        Self {
            rank,
            torsion: Vec::new(),
        }
    }

    /// Canonical form of `ℤ_S^rank ⊕ ⊕ ℤ_S/d`.
    pub fn from_orders(ring: &CoefficientRing, rank: u64, orders: &[BigUint]) -> Self {
        Self {
            rank,
            torsion: invariant_factors(ring, orders),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn torsion_order(&self) -> BigUint {
        self.torsion.iter().product()
    }

    pub fn summands(&self) -> Vec<Summand> {
        self.torsion
            .iter()
            .cloned()
            .map(Summand::Cyclic)
            .chain((0..self.rank).map(|_| Summand::Free))
            .collect()
    }

    pub fn direct_sum(&self, other: &Self, ring: &CoefficientRing) -> Self {
        let orders: Vec<BigUint> = self.torsion.iter().chain(&other.torsion).cloned().collect();
        Self::from_orders(ring, self.rank + other.rank, &orders)
    }

    /// Image in the larger ring.
    pub fn localize(&self, ring: &CoefficientRing) -> Self {
        Self::from_orders(ring, self.rank, &self.torsion)
    }

    pub fn tensor(&self, other: &Self, ring: &CoefficientRing) -> Self {
        let mut orders = Vec::new();
        for _ in 0..self.rank {
            orders.extend(other.torsion.iter().cloned());
        }
        for _ in 0..other.rank {
            orders.extend(self.torsion.iter().cloned());
        }
        for d in &self.torsion {
            for e in &other.torsion {
                orders.push(d.gcd(e));
            }
        }
        Self::from_orders(ring, self.rank * other.rank, &orders)
    }
}

impl fmt::Display for Part {
    /// E.g. `Z/4 (+) Z`, `Z^3`, `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut pieces: Vec<String> = self.torsion.iter().map(|d| format!("Z/{d}")).collect();
        match self.rank {
            0 => {}
            1 => pieces.push(String::from("Z")),
            r => pieces.push(format!("Z^{r}")),
        }
        if pieces.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", pieces.join(" (+) "))
        }
    }
}

/// Invariant-factor chain of `⊕ ℤ_S/dᵢ`, via primary decomposition.
pub fn invariant_factors(ring: &CoefficientRing, orders: &[BigUint]) -> Vec<BigUint> {
    let mut primary: BTreeMap<BigUint, Vec<u32>> = BTreeMap::new();
    for d in orders {
        let d = ring.strip(&BigInt::from(d.clone()));
        if d.is_zero() || d.is_one() {
            continue;
        }
        for (p, e) in repunit::factorize(&d).factors {
            primary.entry(p).or_default().push(e);
        }
    }
    let len = primary.values().map(Vec::len).max().unwrap_or(0);
    let mut chain = vec![BigUint::one(); len];
    for (p, mut exps) in primary {
        exps.sort_unstable();
        // largest exponents go to the last invariant factors
        let offset = len - exps.len();
        for (i, e) in exps.into_iter().enumerate() {
            chain[offset + i] *= p.pow(e);
        }
    }
    chain
}

/// A ℤ/2-graded module over a coefficient ring, in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GradedModule {
    pub ring: CoefficientRing,
    pub even: Part,
    pub odd: Part,
}

impl GradedModule {
    pub fn new(ring: CoefficientRing, even: Part, odd: Part) -> Self {
        let even = even.localize(&ring);
        let odd = odd.localize(&ring);
        Self { ring, even, odd }
    }

    /// The ring itself in even degree: the unit for the graded tensor product.
    pub fn unit(ring: CoefficientRing) -> Self {
        Self::new(ring, Part::free(1), Part::zero())
    }

    pub fn localize(&self, ring: &CoefficientRing) -> Self {
        let ring = self.ring.join(ring);
        Self::new(ring, self.even.clone(), self.odd.clone())
    }
}

impl fmt::Display for GradedModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "even: {}, odd: {} over {}", self.even, self.odd, self.ring)
    }
}

pub fn graded_tensor(a: &GradedModule, b: &GradedModule) -> Result<GradedModule, AbError> {
    if a.ring != b.ring {
        return Err(AbError::RingMismatch);
    }
    let r = &a.ring;
    let even = a.even.tensor(&b.even, r).direct_sum(&a.odd.tensor(&b.odd, r), r);
    let odd = a.even.tensor(&b.odd, r).direct_sum(&a.odd.tensor(&b.even, r), r);
    Ok(GradedModule::new(r.clone(), even, odd))
}

pub fn module_iso_eq(a: &GradedModule, b: &GradedModule) -> Result<bool, AbError> {
    if a.ring != b.ring {
        return Err(AbError::RingMismatch);
    }
    Ok(a.even == b.even && a.odd == b.odd)
}

/// Ranks of the even and odd parts of the exterior algebra on `ℤ^r`.
pub fn exterior_ranks(r: u32) -> Result<(u64, u64), AbError> {
    if r > 63 {
        return Err(AbError::RankTooLarge(r));
    }
    let (mut even, mut odd) = (0u64, 0u64);
    let mut binom = 1u64;
    for k in 0..=r as u64 {
        if k % 2 == 0 {
            even += binom;
        } else {
            odd += binom;
        }
        // C(r, k+1) = C(r, k) (r-k) / (k+1); exact in u128
        binom = ((binom as u128 * (r as u128 - k as u128)) / (k as u128 + 1)) as u64;
    }
    Ok((even, odd))
}

/// `Λ(ℤ^r)` with its canonical grading.
pub fn exterior_algebra(r: u32, ring: &CoefficientRing) -> Result<GradedModule, AbError> {
    let (even, odd) = exterior_ranks(r)?;
    Ok(GradedModule::new(ring.clone(), Part::free(even), Part::free(odd)))
}

/// Dense integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().cloned().map(Into::into));
        }
        Self {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &Self) -> Result<Self, AbError> {
        if self.cols != other.rows {
            return Err(AbError::DimensionMismatch);
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn to_exact(&self) -> ExactMatrix {
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().cloned().map(BigRational::from_integer).collect(),
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += c · row[src]
    fn add_row(&mut self, dst: usize, src: usize, c: &BigInt) {
        for j in 0..self.cols {
            let v = c * self.get(src, j);
            self.data[dst * self.cols + j] += v;
        }
    }

    /// col[dst] += c · col[src]
    fn add_col(&mut self, dst: usize, src: usize, c: &BigInt) {
        for i in 0..self.rows {
            let v = c * self.get(i, src);
            self.data[i * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j);
            self.data[i * self.cols + j] = v;
        }
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).clone()).collect()
    }

    /// Determinant by fraction-free Bareiss elimination.
    pub fn det(&self) -> Result<BigInt, AbError> {
        if self.rows != self.cols {
            return Err(AbError::DimensionMismatch);
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !m.get(i, k).is_zero()) {
                    Some(i) => {
                        m.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (m.get(i, j) * m.get(k, k) - m.get(i, k) * m.get(k, j)) / &prev;
                    m.set(i, j, v);
                }
            }
            prev = m.get(k, k).clone();
        }
        Ok(sign * m.get(n - 1, n - 1))
    }
}

/// `U·A·V = D` with `U`, `V` unimodular and `D` diagonal, `d₁ | d₂ | …`, `dᵢ ≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snf {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl Snf {
    pub fn invariants(&self) -> Vec<BigInt> {
        self.d.diagonal()
    }

    pub fn rank(&self) -> usize {
        self.invariants().iter().filter(|d| !d.is_zero()).count()
    }
}

pub fn snf(a: &IntMatrix) -> Snf {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    for t in 0..m.min(n) {
        loop {
            // smallest |entry| in the trailing block, first in row-major order
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let x = d.get(i, j);
                    if !x.is_zero()
                        && pivot.is_none_or(|(pi, pj)| x.magnitude() < d.get(pi, pj).magnitude())
                    {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                return finish(u, d, v);
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let p = d.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..m {
                let q = -d.get(i, t).div_floor(&p);
                if !q.is_zero() {
                    d.add_row(i, t, &q);
                    u.add_row(i, t, &q);
                }
                clean &= d.get(i, t).is_zero();
            }
            for j in t + 1..n {
                let q = -d.get(t, j).div_floor(&p);
                if !q.is_zero() {
                    d.add_col(j, t, &q);
                    v.add_col(j, t, &q);
                }
                clean &= d.get(t, j).is_zero();
            }
            if !clean {
                continue;
            }
            let offending = (t + 1..m).find(|&i| (t + 1..n).any(|j| !(d.get(i, j) % &p).is_zero()));
            match offending {
                Some(i) => {
                    let one = BigInt::one();
                    d.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if d.get(t, t).sign() == Sign::Minus {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    finish(u, d, v)
}

fn finish(mut u: IntMatrix, mut d: IntMatrix, v: IntMatrix) -> Snf {
    for t in 0..d.rows.min(d.cols) {
        if d.get(t, t).sign() == Sign::Minus {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    Snf { u, d, v }
}

/// Dense matrix over ℚ; used with denominators supported on inverted primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        IntMatrix::identity(n).to_exact()
    }

    pub fn from_rows(rows: &[Vec<BigRational>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().cloned());
        }
        Self {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigRational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul(&self, other: &Self) -> Result<Self, AbError> {
        if self.cols != other.rows {
            return Err(AbError::DimensionMismatch);
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = a * other.get(k, j);
                    out.data[i * other.cols + j] += v;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[BigRational]) -> Result<Vec<BigRational>, AbError> {
        if x.len() != self.cols {
            return Err(AbError::DimensionMismatch);
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AbError> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(AbError::DimensionMismatch);
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    /// Least common multiple of all denominators.
    pub fn common_denominator(&self) -> BigInt {
        self.data
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
    }

    pub fn denominators_invertible_in(&self, ring: &CoefficientRing) -> bool {
        ring.is_unit(&self.common_denominator())
    }

    /// Integer matrix `c·A` for the common denominator `c`.
    pub fn clear_denominators(&self) -> IntMatrix {
        let c = BigRational::from_integer(self.common_denominator());
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| (x * &c).to_integer()).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        snf(&self.clear_denominators()).rank()
    }

    pub fn det(&self) -> Result<BigRational, AbError> {
        if self.rows != self.cols {
            return Err(AbError::DimensionMismatch);
        }
        let c = self.common_denominator();
        let d = self.clear_denominators().det()?;
        Ok(BigRational::new(d, c.pow(self.rows as u32)))
    }
}

fn checked_integral(a: &ExactMatrix, ring: &CoefficientRing) -> Result<Snf, AbError> {
    if !a.denominators_invertible_in(ring) {
        return Err(AbError::DenominatorNotInvertible);
    }
    Ok(snf(&a.clear_denominators()))
}

/// `coker(A: ℤ_S^cols → ℤ_S^rows)` in canonical form.
pub fn cokernel(a: &ExactMatrix, ring: &CoefficientRing) -> Result<Part, AbError> {
    let s = checked_integral(a, ring)?;
    let orders: Vec<BigUint> = s
        .invariants()
        .iter()
        .filter(|d| !d.is_zero())
        .map(|d| d.magnitude().clone())
        .collect();
    let rank = (a.rows - s.rank()) as u64;
    Ok(Part::from_orders(ring, rank, &orders))
}

/// `ker(A: ℤ_S^cols → ℤ_S^rows)`, always free.
pub fn kernel(a: &ExactMatrix, ring: &CoefficientRing) -> Result<Part, AbError> {
    let s = checked_integral(a, ring)?;
    Ok(Part::free((a.cols - s.rank()) as u64))
}

/// Order of the class of `v` in `coker(A)` over the ring; `None` if infinite.
pub fn element_order(
    a: &ExactMatrix,
    v: &[BigRational],
    ring: &CoefficientRing,
) -> Result<Option<BigUint>, AbError> {
    if v.len() != a.rows {
        return Err(AbError::DimensionMismatch);
    }
    let s = checked_integral(a, ring)?;
    let den = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    if !ring.is_unit(&den) {
        return Err(AbError::DenominatorNotInvertible);
    }
    let scale = BigRational::from_integer(den);
    let col: Vec<Vec<BigInt>> = v.iter().map(|x| vec![(x * &scale).to_integer()]).collect();
    let w = s.u.mul(&IntMatrix::from_rows(&col))?;
    let diag = s.invariants();
    let mut order = BigUint::one();
    for i in 0..a.rows {
        let wi = w.get(i, 0);
        match diag.get(i).filter(|d| !d.is_zero()) {
            Some(d) => {
                let factor = ring.strip(&(d / d.gcd(wi)));
                order = order.lcm(&factor);
            }
            None if !wi.is_zero() => return Ok(None),
            None => {}
        }
    }
    Ok(Some(order))
}

/// Result of a stationary colimit computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Colimit {
    pub part: Part,
    /// First stage from which every connecting map within the probe is invertible.
    pub stationary_from: u64,
}

/// Colimit of `ℤ_S^k → ℤ_S^k → …` with connecting maps `system(m)`, valid
/// once the maps become invertible over the ring.
pub fn colimit_stationary(
    system: impl Fn(u64) -> IntMatrix,
    ring: &CoefficientRing,
    probe: u64,
) -> Result<Colimit, AbError> {
    let mut stationary_from = None;
    let mut size = None;
    for m in 0..probe {
        let a = system(m);
        if a.rows != a.cols || size.is_some_and(|k| k != a.rows) {
            return Err(AbError::DimensionMismatch);
        }
        size = Some(a.rows);
        if ring.is_unit(&a.det()?) {
            stationary_from.get_or_insert(m);
        } else {
            stationary_from = None;
        }
    }
    match (stationary_from, size) {
        (Some(m), Some(k)) => Ok(Colimit {
            part: Part::free(k as u64),
            stationary_from: m,
        }),
        _ => Err(AbError::NotStationary(probe)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn big(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    fn int(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows)
    }

    fn check_snf(a: &IntMatrix) -> Snf {
        let s = snf(a);
        assert_eq!(s.u.mul(a).unwrap().mul(&s.v).unwrap(), s.d);
        assert!(s.d.is_diagonal());
        assert_eq!(s.u.det().unwrap().abs(), BigInt::one());
        assert_eq!(s.v.det().unwrap().abs(), BigInt::one());
        let diag = s.invariants();
        for w in diag.windows(2) {
            assert!(!w[0].is_negative());
            if w[0].is_zero() {
                assert!(w[1].is_zero());
            } else {
                assert!((&w[1] % &w[0]).is_zero());
            }
        }
        s
    }

    #[test]
    fn snf_examples() {
        let s = check_snf(&IntMatrix::identity(2));
        assert_eq!(s.d, IntMatrix::identity(2));
        let s = check_snf(&int(&[vec![2, 4], vec![6, 8]]));
        assert_eq!(s.invariants(), vec![BigInt::from(2), BigInt::from(4)]);
        let s = check_snf(&int(&[vec![0]]));
        assert_eq!(s.invariants(), vec![BigInt::zero()]);
        let s = check_snf(&int(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(s.invariants(), vec![BigInt::from(1), BigInt::from(6)]);
        check_snf(&int(&[vec![0, 0, 3], vec![4, 0, 0]]));
        check_snf(&IntMatrix::zeros(0, 3));
    }

    #[test]
    fn determinants() {
        assert_eq!(int(&[vec![2, 4], vec![6, 8]]).det().unwrap(), BigInt::from(-8));
        assert_eq!(int(&[vec![0, 1], vec![1, 0]]).det().unwrap(), BigInt::from(-1));
        let m = int(&[vec![0, 2, 1], vec![3, 0, 0], vec![1, 1, 1]]);
        assert_eq!(m.det().unwrap(), BigInt::from(-3));
    }

    #[test]
    fn cokernel_examples() {
        let z3 = CoefficientRing::inverting([3]).unwrap();
        let a = int(&[vec![4]]).to_exact();
        assert_eq!(cokernel(&a, &z3).unwrap(), Part::from_orders(&z3, 0, &big(&[4])));
        let z = CoefficientRing::integers();
        assert_eq!(cokernel(&ExactMatrix::zeros(2, 2), &z).unwrap(), Part::free(2));
        // 6 becomes 2 after inverting 3
        let a = int(&[vec![6, 0], vec![0, 9]]).to_exact();
        assert_eq!(cokernel(&a, &z3).unwrap(), Part::from_orders(&z3, 0, &big(&[2])));
        assert_eq!(cokernel(&a, &z).unwrap().torsion, big(&[3, 18]));
        let half = ExactMatrix::from_rows(&[vec![BigRational::new(1.into(), 2.into())]]);
        assert_eq!(cokernel(&half, &z3), Err(AbError::DenominatorNotInvertible));
    }

    #[test]
    fn kernel_examples() {
        let z = CoefficientRing::integers();
        assert_eq!(kernel(&ExactMatrix::identity(3), &z).unwrap(), Part::free(0));
        let ones = int(&[vec![1; 5]]).to_exact();
        assert_eq!(kernel(&ones, &z).unwrap(), Part::free(4));
        assert_eq!(cokernel(&ones, &z).unwrap(), Part::zero());
    }

    #[test]
    fn colimit_examples() {
        let z = CoefficientRing::integers();
        let c = colimit_stationary(|_| IntMatrix::identity(3), &z, 64).unwrap();
        assert_eq!(c.part, Part::free(3));
        let two = colimit_stationary(|_| int(&[vec![2]]), &z, 64);
        assert_eq!(two, Err(AbError::NotStationary(64)));
        let z2 = CoefficientRing::inverting([2]).unwrap();
        let c = colimit_stationary(|m| int(&[vec![if m < 5 { 3 } else { 2 }]]), &z2, 64).unwrap();
        assert_eq!(c.stationary_from, 5);
    }

    #[test]
    fn invariant_factor_chain() {
        let z = CoefficientRing::integers();
        assert_eq!(invariant_factors(&z, &big(&[4, 6])), big(&[2, 12]));
        assert_eq!(invariant_factors(&z, &big(&[2, 3])), big(&[6]));
        assert_eq!(invariant_factors(&z, &big(&[1, 1])), big(&[]));
        let z2 = CoefficientRing::inverting([2]).unwrap();
        assert_eq!(invariant_factors(&z2, &big(&[4, 6, 10])), big(&[15]));
    }

    #[test]
    fn tensor_examples() {
        let z = CoefficientRing::integers();
        let c4 = GradedModule::new(z.clone(), Part::from_orders(&z, 0, &big(&[4])), Part::zero());
        let c6 = GradedModule::new(z.clone(), Part::from_orders(&z, 0, &big(&[6])), Part::zero());
        let t = graded_tensor(&c4, &c6).unwrap();
        assert_eq!(t.even, Part::from_orders(&z, 0, &big(&[2])));
        assert!(t.odd.is_zero());
        let zz = GradedModule::new(z.clone(), Part::free(1), Part::free(1));
        let t = graded_tensor(&zz, &zz).unwrap();
        assert_eq!((t.even.rank, t.odd.rank), (2, 2));
        let unit = GradedModule::unit(z.clone());
        assert_eq!(graded_tensor(&c4, &unit).unwrap(), c4);
        let other = GradedModule::unit(CoefficientRing::inverting([2]).unwrap());
        assert_eq!(graded_tensor(&c4, &other), Err(AbError::RingMismatch));
    }

    #[test]
    fn exterior_examples() {
        assert_eq!(exterior_ranks(0).unwrap(), (1, 0));
        assert_eq!(exterior_ranks(3).unwrap(), (4, 4));
        assert_eq!(exterior_ranks(12).unwrap(), (2048, 2048));
        assert_eq!(exterior_ranks(63).unwrap(), (1 << 62, 1 << 62));
        assert_eq!(exterior_ranks(64), Err(AbError::RankTooLarge(64)));
    }

    #[test]
    fn iso_and_display() {
        let z = CoefficientRing::integers();
        let a = GradedModule::new(z.clone(), Part::from_orders(&z, 1, &big(&[4])), Part::zero());
        let b = GradedModule::new(z.clone(), Part::from_orders(&z, 1, &big(&[2, 2])), Part::zero());
        assert!(module_iso_eq(&a, &a).unwrap());
        assert!(!module_iso_eq(&a, &b).unwrap());
        assert_eq!(format!("{}", a.even), "Z/4 (+) Z");
        assert_eq!(format!("{}", Part::free(3)), "Z^3");
        assert_eq!(format!("{}", Part::zero()), "0");
        assert_eq!(format!("{}", CoefficientRing::inverting([3, 2]).unwrap()), "Z[1/2,3]");
    }
}
