//! Polynomials and rational functions over a finite field `F_q`, their
//! factorization, and places of a rational function field `F_q(X)` lying
//! over `T = 0` or `T = ∞` of an embedded `F_q(T)`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigUint;
use thiserror::Error;

use crate::ffield::{self, FFElement, FieldError, FieldTower, FiniteField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("the zero polynomial has no factorization")]
    ZeroPolynomial,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("the rational function is constant")]
    ConstantFunction,
    #[error("polynomials over different fields")]
    FieldMismatch,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Polynomial over a finite field, coefficients low-to-high, no trailing zeros.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    field: FiniteField,
    coeffs: Vec<FFElement>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", self)
    }
}

impl Poly {
    pub fn new(field: &FiniteField, mut coeffs: Vec<FFElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self {
            field: field.clone(),
            coeffs,
        }
    }

    /// From integer coefficients reduced into the prime subfield.
    pub fn from_ints(field: &FiniteField, coeffs: &[i64]) -> Self {
        Self::new(field, coeffs.iter().map(|&c| field.from_int(c)).collect())
    }

    pub fn zero(field: &FiniteField) -> Self {
        Self::new(field, Vec::new())
    }

    pub fn one(field: &FiniteField) -> Self {
        Self::constant(field, field.one())
    }

    pub fn constant(field: &FiniteField, c: FFElement) -> Self {
        Self::new(field, vec![c])
    }

    /// The indeterminate `X`.
    pub fn x(field: &FiniteField) -> Self {
        Self::new(field, vec![field.zero(), field.one()])
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn coeffs(&self) -> &[FFElement] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FFElement {
        self.coeffs.get(i).copied().unwrap_or(self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == self.field.one()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> FFElement {
        self.coeffs.last().copied().unwrap_or(self.field.zero())
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == self.field.one()
    }

    fn same_field(&self, other: &Self) -> Result<(), PolyError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(PolyError::FieldMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| self.field.add(self.coeff(i), other.coeff(i)))
            .collect();
        Self::new(&self.field, c)
    }

    pub fn neg(&self) -> Self {
        let c = self.coeffs.iter().map(|&a| self.field.neg(a)).collect();
        Self::new(&self.field, c)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: FFElement) -> Self {
        let out = self.coeffs.iter().map(|&a| self.field.mul(a, c)).collect();
        Self::new(&self.field, out)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.field);
        }
        let f = &self.field;
        let mut out = vec![f.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Self::new(f, out)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut result = Self::one(&self.field);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        result
    }

    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self), PolyError> {
        self.same_field(divisor)?;
        let dd = divisor.degree().ok_or(PolyError::DivisionByZero)?;
        let f = &self.field;
        let lead_inv = f.inv(divisor.leading())?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(f), self.clone()));
        }
        let mut quot = vec![f.zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = f.mul(rem[k + dd], lead_inv);
            quot[k] = c;
            if c.is_zero() {
                continue;
            }
            for (i, &d) in divisor.coeffs.iter().enumerate() {
                rem[k + i] = f.sub(rem[k + i], f.mul(c, d));
            }
        }
        rem.truncate(dd);
        Ok((Self::new(f, quot), Self::new(f, rem)))
    }

    pub fn rem(&self, divisor: &Self) -> Result<Self, PolyError> {
        Ok(self.div_rem(divisor)?.1)
    }

    /// Exact quotient; the remainder must vanish.
    fn exact_div(&self, divisor: &Self) -> Self {
        let (q, r) = self.div_rem(divisor).expect("nonzero divisor");
        debug_assert!(r.is_zero());
        q
    }

    /// Monic normalization; zero stays zero.
    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.field.inv(self.leading()).expect("nonzero leading coefficient");
        self.scale(inv)
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Result<Self, PolyError> {
        self.same_field(other)?;
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = b;
            b = r;
        }
        Ok(a.monic())
    }

    pub fn derivative(&self) -> Self {
        let f = &self.field;
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &a)| f.mul(a, f.from_int(i as i64)))
            .collect();
        Self::new(f, c)
    }

    pub fn eval(&self, x: FFElement) -> FFElement {
        let f = &self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(f.zero(), |acc, &c| f.add(f.mul(acc, x), c))
    }

    fn mul_mod(&self, other: &Self, m: &Self) -> Self {
        self.mul(other).rem(m).expect("nonzero modulus")
    }

    /// `self^e mod m` for an arbitrary-precision exponent.
    pub fn pow_mod(&self, e: &BigUint, m: &Self) -> Result<Self, PolyError> {
        let mut result = Self::one(&self.field).rem(m)?;
        let base = self.rem(m)?;
        for i in (0..e.bits()).rev() {
            result = result.mul_mod(&result, m);
            if e.bit(i) {
                result = result.mul_mod(&base, m);
            }
        }
        Ok(result)
    }

    /// Order used for deterministic output: degree, then coefficients
    /// low-to-high, each compared by its coefficient vector over `F_p`.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.coeffs.len().cmp(&other.coeffs.len()).then_with(|| {
            for (a, b) in self.coeffs.iter().zip(&other.coeffs) {
                match self.field.lex_cmp(*a, *b) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }

    /// Whether the polynomial is irreducible over its coefficient field.
    pub fn is_irreducible(&self) -> bool {
        match self.degree() {
            None | Some(0) => false,
            Some(_) => factorize(self)
                .map(|f| f.len() == 1 && f[0].1 == 1)
                .unwrap_or(false),
        }
    }

    /// Maps every coefficient through `map`, changing the coefficient field.
    pub fn map_coeffs(
        &self,
        target: &FiniteField,
        mut map: impl FnMut(FFElement) -> Option<FFElement>,
    ) -> Option<Self> {
        let c = self.coeffs.iter().map(|&a| map(a)).collect::<Option<Vec<_>>>()?;
        Some(Self::new(target, c))
    }
}

fn fmt_coeff(field: &FiniteField, c: FFElement) -> String {
    if field.deg() == 1 {
        format!("{}", c.index())
    } else {
        let parts: Vec<String> = field.coeffs(c).iter().map(|x| format!("{x}")).collect();
        format!("[{}]", parts.join(","))
    }
}

impl fmt::Display for Poly {
    /// Highest degree first, e.g. `X^2+2*X+1` or `[1,1]*X+[0,1]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let field = &self.field;
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            let is_one = c == field.one();
            match i {
                0 => write!(f, "{}", fmt_coeff(field, c))?,
                _ => {
                    if !is_one {
                        write!(f, "{}*", fmt_coeff(field, c))?;
                    }
                    if i == 1 {
                        write!(f, "X")?;
                    } else {
                        write!(f, "X^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Square-free decomposition of a monic polynomial: `(factor, multiplicity)`.
fn square_free(f: &Poly) -> Vec<(Poly, u32)> {
    let field = f.field().clone();
    let p = field.p() as u32;
    let mut out = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return out;
    }
    let d = f.derivative();
    let mut c = f.gcd(&d).expect("same field");
    let mut w = f.exact_div(&c);
    let mut i = 1u32;
    while !w.is_one() {
        let y = w.gcd(&c).expect("same field");
        let fac = w.exact_div(&y);
        if !fac.is_one() {
            out.push((fac, i));
        }
        w = y;
        c = c.exact_div(&w);
        i += 1;
    }
    if !c.is_one() {
        // c is a p-th power
        let root_coeffs = (0..=c.degree().unwrap() / p as usize)
            .map(|k| field.pth_root(c.coeff(k * p as usize)))
            .collect();
        let root = Poly::new(&field, root_coeffs);
        for (g, m) in square_free(&root) {
            out.push((g, m * p));
        }
    }
    out
}

/// Distinct-degree factorization of a monic square-free polynomial.
fn distinct_degree(f: &Poly) -> Vec<(Poly, usize)> {
    let field = f.field().clone();
    let q = BigUint::from(field.order());
    let x = Poly::x(&field);
    let mut out = Vec::new();
    let mut h = f.clone();
    let mut w = x.rem(&h).unwrap();
    let mut i = 1;
    while h.degree().unwrap_or(0) >= 2 * i {
        w = w.pow_mod(&q, &h).unwrap();
        let g = h.gcd(&w.sub(&x)).unwrap();
        if !g.is_one() {
            h = h.exact_div(&g);
            w = w.rem(&h).unwrap();
            out.push((g, i));
        }
        i += 1;
    }
    if h.degree().unwrap_or(0) > 0 {
        let d = h.degree().unwrap();
        out.push((h, d));
    }
    out
}

/// Deterministic splitting candidates: the `n`-th polynomial has the base-`|F|`
/// digits of `n` as coefficient indices.
fn candidate(field: &FiniteField, mut n: u64) -> Poly {
    let q = field.order();
    let mut coeffs = Vec::new();
    while n > 0 {
        coeffs.push(field.element((n % q) as u32).expect("digit below field order"));
        n /= q;
    }
    Poly::new(field, coeffs)
}

/// Equal-degree splitting of a monic square-free `f` whose irreducible
/// factors all have degree `d`.
fn equal_degree(f: &Poly, d: usize, out: &mut Vec<Poly>) {
    let deg = f.degree().unwrap();
    if deg == d {
        out.push(f.clone());
        return;
    }
    let field = f.field().clone();
    let q = field.order();
    let one = Poly::one(&field);
    let exponent = (BigUint::from(q).pow(d as u32) - 1u32) >> 1usize;
    let mut n = q;
    loop {
        let a = candidate(&field, n);
        n += 1;
        if a.degree().unwrap_or(0) >= deg {
            // candidates are exhausted in degree < deg only when deg is tiny;
            // wrap to keep the search total
            n = q;
            continue;
        }
        let b = if q % 2 == 1 {
            a.pow_mod(&exponent, f).unwrap().sub(&one)
        } else {
            // trace from F_{q^d} down to F_2
            let steps = field.deg() as usize * d;
            let mut t = a.rem(f).unwrap();
            let mut acc = t.clone();
            for _ in 1..steps {
                t = t.mul_mod(&t, f);
                acc = acc.add(&t);
            }
            acc
        };
        let g = f.gcd(&b).unwrap();
        let gd = g.degree().unwrap_or(0);
        if gd > 0 && gd < deg {
            equal_degree(&g, d, out);
            equal_degree(&f.exact_div(&g), d, out);
            return;
        }
    }
}

/// Monic irreducible factors with multiplicities, sorted by degree then
/// coefficients. The leading coefficient of `g` is dropped.
pub fn factorize(g: &Poly) -> Result<Vec<(Poly, u32)>, PolyError> {
    if g.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let mut out: Vec<(Poly, u32)> = Vec::new();
    for (sf, mult) in square_free(&g.monic()) {
        for (block, d) in distinct_degree(&sf) {
            let mut irreducibles = Vec::new();
            equal_degree(&block, d, &mut irreducibles);
            for h in irreducibles {
                match out.iter_mut().find(|(e, _)| *e == h) {
                    Some((_, m)) => *m += mult,
                    None => out.push((h, mult)),
                }
            }
        }
    }
    out.sort_by(|a, b| a.0.canonical_cmp(&b.0));
    Ok(out)
}

/// A nonzero rational function in lowest terms with monic denominator.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFunction({})", self)
    }
}

impl RationalFunction {
    pub fn new(num: Poly, den: Poly) -> Result<Self, PolyError> {
        num.same_field(&den)?;
        if den.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        if num.is_zero() {
            let field = den.field().clone();
            return Ok(Self {
                num,
                den: Poly::one(&field),
            });
        }
        let g = num.gcd(&den)?;
        let num = num.exact_div(&g);
        let den = den.exact_div(&g);
        let lead_inv = den.field().inv(den.leading())?;
        Ok(Self {
            num: num.scale(lead_inv),
            den: den.scale(lead_inv),
        })
    }

    pub fn from_poly(num: Poly) -> Self {
        let den = Poly::one(num.field());
        Self { num, den }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn field(&self) -> &FiniteField {
        self.num.field()
    }

    /// `max(deg num, deg den)`, the degree of `F_q(X)` over `F_q(u)`.
    pub fn degree(&self) -> usize {
        self.num.degree().unwrap_or(0).max(self.den.degree().unwrap_or(0))
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    pub fn reciprocal(&self) -> Result<Self, PolyError> {
        Self::new(self.den.clone(), self.num.clone())
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let side = |p: &Poly| {
            if p.coeffs().iter().filter(|c| !c.is_zero()).count() > 1 {
                format!("({p})")
            } else {
                format!("{p}")
            }
        };
        write!(f, "{}/{}", side(&self.num), side(&self.den))
    }
}

/// `F_q(T) ↪ F_q(X)` given by `T ↦ u(X)` with `u` nonconstant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    base_symbol: String,
    image: RationalFunction,
}

impl Embedding {
    pub fn new(image: RationalFunction) -> Result<Self, PolyError> {
        if image.is_constant() {
            return Err(PolyError::ConstantFunction);
        }
        Ok(Self {
            base_symbol: String::from("T"),
            image,
        })
    }

    pub fn base_symbol(&self) -> &str {
        &self.base_symbol
    }

    pub fn image(&self) -> &RationalFunction {
        &self.image
    }

    /// `[F_q(X) : F_q(T)]`.
    pub fn degree(&self) -> usize {
        self.image.degree()
    }

    /// Precomposition with `T ↦ T^{-1}`; swaps the places over `0` and `∞`.
    pub fn twist(&self) -> Self {
        Self {
            base_symbol: self.base_symbol.clone(),
            image: self.image.reciprocal().expect("nonconstant image is nonzero"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Place {
    /// The place of `F_q(X)` at a monic irreducible polynomial.
    Finite(Poly),
    /// The place `1/X`.
    Infinity,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaceData {
    pub place: Place,
    /// Ramification index.
    pub e: u32,
    /// Inertia degree over `F_q`.
    pub f: u32,
}

/// Places of `F_q(X)` where `u` has a zero.
pub fn places_above_zero(u: &RationalFunction) -> Result<Vec<PlaceData>, PolyError> {
    if u.is_constant() {
        return Err(PolyError::ConstantFunction);
    }
    let mut out: Vec<PlaceData> = factorize(u.num())?
        .into_iter()
        .map(|(pi, e)| {
            let f = pi.degree().unwrap() as u32;
            PlaceData {
                place: Place::Finite(pi),
                e,
                f,
            }
        })
        .collect();
    let dn = u.num().degree().unwrap_or(0);
    let dd = u.den().degree().unwrap_or(0);
    if dn < dd {
        out.push(PlaceData {
            place: Place::Infinity,
            e: (dd - dn) as u32,
            f: 1,
        });
    }
    Ok(out)
}

/// Places of `F_q(X)` over the infinite place of `F_q(T)`, computed as the
/// places over `T = 0` of the twisted embedding.
pub fn places_above_infinity(embedding: &Embedding) -> Result<Vec<PlaceData>, PolyError> {
    places_above_zero(embedding.twist().image())
}

/// `Σ e·f` over a list of places.
pub fn degree_sum(places: &[PlaceData]) -> u32 {
    places.iter().map(|p| p.e * p.f).sum()
}

/// `(true, f)` exactly when a single place lies over infinity.
pub fn verify_single_infinite(embedding: &Embedding) -> (bool, Option<u32>) {
    match places_above_infinity(embedding).as_deref() {
        Ok([only]) => (true, Some(only.f)),
        _ => (false, None),
    }
}

/// `(e, f)` of the unique infinite place of the constant field extension
/// `F_{q^ν}(T) / F_q(T)`.
pub fn constant_extension_degrees(nu: u32) -> (u32, u32) {
    (1, nu)
}

/// The function field `F_q(X)` over `F_q(T)` via `T ↦ g(X)^{-1}`, with `g` the
/// minimal polynomial of the fixed primitive element of `F_{q^f}`.
#[derive(Debug, Clone)]
pub struct RemarkField {
    pub q: u64,
    pub f: u32,
    pub g: Poly,
    pub embedding: Embedding,
    pub infinite_places: Vec<PlaceData>,
    pub irreducible: bool,
    pub derivative_nonzero: bool,
    pub single_infinite: bool,
    pub inertia_degree: Option<u32>,
}

impl RemarkField {
    /// All construction claims hold: `g` irreducible of degree `f`,
    /// separable, one infinite place with inertia degree `f`, `Σ e·f = f`.
    pub fn verified(&self) -> bool {
        self.irreducible
            && self.g.degree() == Some(self.f as usize)
            && self.derivative_nonzero
            && self.single_infinite
            && self.inertia_degree == Some(self.f)
            && degree_sum(&self.infinite_places) == self.f
    }
}

/// Minimal polynomial over `F_q` of `ζ ∈ F_{q^f}` as the product over its
/// Frobenius orbit, descended to the base field.
pub fn minimal_polynomial(tower: &FieldTower, zeta: FFElement) -> Poly {
    let big = tower.big();
    let q = tower.base().order();
    let mut orbit = vec![zeta];
    loop {
        let next = big.pow(*orbit.last().unwrap(), q);
        if next == zeta {
            break;
        }
        orbit.push(next);
    }
    let x = Poly::x(big);
    let product = orbit.iter().fold(Poly::one(big), |acc, &r| {
        acc.mul(&x.sub(&Poly::constant(big, r)))
    });
    product
        .map_coeffs(tower.base(), |c| tower.descend(c))
        .expect("coefficients of a Frobenius-stable product lie in F_q")
}

pub fn construct_remark_field(q: u64, f: u32) -> Result<RemarkField, PolyError> {
    let (p, nu) = ffield::prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
    let base = ffield::make_field(p, nu)?;
    let tower = FieldTower::new(&base, f)?;
    let zeta = tower.big().gen();
    let g = minimal_polynomial(&tower, zeta);
    let image = RationalFunction::new(Poly::one(&base), g.clone())?;
    let embedding = Embedding::new(image)?;
    let infinite_places = places_above_infinity(&embedding)?;
    let (single_infinite, inertia_degree) = verify_single_infinite(&embedding);
    Ok(RemarkField {
        q,
        f,
        irreducible: g.is_irreducible(),
        derivative_nonzero: !g.derivative().is_zero(),
        g,
        embedding,
        infinite_places,
        single_infinite,
        inertia_degree,
    })
}

/// Product of factors with multiplicities, for round-trip checks.
pub fn expand_factors(field: &FiniteField, factors: &[(Poly, u32)]) -> Poly {
    factors
        .iter()
        .fold(Poly::one(field), |acc, (p, m)| acc.mul(&p.pow(*m as u64)))
}

/// Whether `g` has a root in `F_{q^d}`, by exhaustive evaluation.
pub fn has_root_in_extension(g: &Poly, d: u32) -> Result<bool, PolyError> {
    let base = g.field();
    let tower = FieldTower::new(base, d)?;
    let lifted = g
        .map_coeffs(tower.big(), |c| Some(tower.embed(c)))
        .expect("embedding is total");
    Ok(tower.big().elements().any(|x| lifted.eval(x).is_zero()))
}
