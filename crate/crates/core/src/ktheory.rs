//! The K-theory pipeline: the additive/roots-of-unity stage, adjoining a
//! prime element via Pimsner–Voiculescu, rationalized ranks, and torsion
//! verdicts. Every stage is computed in closed form and by the matrix engine.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::abgrp::{
    self, AbError, CoefficientRing, ExactMatrix, GradedModule, IntMatrix, Part,
};
use crate::ffield::{self, Character};
use crate::repunit::{self, RepunitError};

pub const DEFAULT_PROBE_BOUND: u64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KError {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("degree n must be at least 1")]
    InvalidDegree,
    #[error("inertia degree f = {f} must satisfy 1 <= f and f | n = {n}")]
    InvalidInertiaDegree { f: u32, n: u32 },
    #[error("the Gamma truncation rank must be at least 1")]
    InvalidGammaRank,
    #[error("gcd(f = {f}, q - 1 = {q_minus_1}) is not 1")]
    PrimenessViolated { f: u32, q_minus_1: u64 },
    #[error("cross-check failed at {stage}: closed form {closed} vs engine {engine}")]
    CrossCheckMismatch {
        stage: &'static str,
        closed: String,
        engine: String,
    },
    #[error(transparent)]
    Algebra(#[from] AbError),
    #[error(transparent)]
    Repunit(#[from] RepunitError),
}

/// `(q, n, f)`: constant field size, degree over `F_q(T)`, inertia degree at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldShape {
    q: u64,
    p: u64,
    n: u32,
    f: u32,
}

impl FieldShape {
    pub fn new(q: u64, n: u32, f: u32) -> Result<Self, KError> {
        let (p, _) = ffield::prime_power(q).ok_or(KError::NotPrimePower(q))?;
        if n == 0 {
            return Err(KError::InvalidDegree);
        }
        if f == 0 || n % f != 0 {
            return Err(KError::InvalidInertiaDegree { f, n });
        }
        Ok(Self { q, p, n, f })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn f(&self) -> u32 {
        self.f
    }

    /// Characteristic.
    pub fn p(&self) -> u64 {
        self.p
    }

    /// `gcd(f, q − 1) = 1`.
    pub fn primeness(&self) -> bool {
        (self.f as u64).gcd(&(self.q - 1)) == 1
    }

    /// `Q^f`.
    pub fn repunit(&self) -> BigUint {
        repunit_or_zero(self.q, self.f)
    }

    /// `ℤ[1/q]`.
    pub fn ring_q(&self) -> CoefficientRing {
        CoefficientRing::inverting([self.p]).expect("characteristic is prime")
    }

    /// `ℤ[1/Q^f]`.
    pub fn ring_repunit(&self) -> CoefficientRing {
        CoefficientRing::inverting_divisors_of(&self.repunit())
    }

    /// The `q − 2` nontrivial characters of `F_q^×`, by exponent.
    pub fn nontrivial_characters(&self) -> Vec<Character> {
        (1..self.q - 1)
            .map(|k| Character::new(self.q, k as i64))
            .collect()
    }
}

/// `Q^k = (q^k − 1)/(q − 1)`, with `Q^0 = 0`.
fn repunit_or_zero(q: u64, k: u32) -> BigUint {
    if k == 0 {
        BigUint::zero()
    } else {
        repunit::repunit_value(q, k).expect("q >= 2 and k >= 1")
    }
}

fn rat(x: BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn q_pow_neg(q: u64, e: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(q).pow(e))
}

/// `(i_{m,m+1})_* = I + Qⁿ·J` on the basis `[e_m p_χ]`, `χ ∈ F_q^×^`.
pub fn connecting_matrix(q: u64, n: u32) -> IntMatrix {
    let size = (q - 1) as usize;
    let c = BigInt::from(repunit_or_zero(q, n));
    let mut m = IntMatrix::zeros(size, size);
    for i in 0..size {
        for j in 0..size {
            let v = if i == j { &c + 1 } else { c.clone() };
            m.set(i, j, v);
        }
    }
    m
}

/// `E_m`: stage-`m` generators `[1_m p_χ]` (trivial `χ` first) to `ℤ[1/q] ⊕ ℤ^{q−2}`.
pub fn eval_matrix(q: u64, n: u32, m: u32) -> ExactMatrix {
    let size = (q - 1) as usize;
    let scale = q_pow_neg(q, m * n);
    let big_q = rat(repunit_or_zero(q, m * n));
    let mut e = ExactMatrix::zeros(size, size);
    let others = BigRational::from_integer(BigInt::from(q - 2));
    e.set(0, 0, &scale * (BigRational::one() + others * &big_q));
    for i in 1..size {
        e.set(i, 0, -BigRational::one());
        e.set(0, i, -(&scale * &big_q));
        e.set(i, i, BigRational::one());
    }
    e
}

/// `(μ_τ)_*` on `ℤ[1/q] ⊕ ℤ^{q−2}`.
pub fn mu_tau_matrix(q: u64, f: u32) -> ExactMatrix {
    let size = (q - 1) as usize;
    let scale = q_pow_neg(q, f);
    let mut m = ExactMatrix::identity(size);
    m.set(0, 0, scale.clone());
    let off = -(&scale * rat(repunit_or_zero(q, f)));
    for j in 1..size {
        m.set(0, j, off.clone());
    }
    m
}

/// `(μ_u)_*` for a unit `u` with `v_T(u) = 0`.
pub fn mu_unit_matrix(q: u64) -> ExactMatrix {
    ExactMatrix::identity((q - 1) as usize)
}

/// A class in `ℤ[1/q] ⊕ ⊕_{χ≠1} ℤ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KClassVector {
    pub head: BigRational,
    pub tail: Vec<BigInt>,
}

impl KClassVector {
    pub fn from_column(col: &[BigRational]) -> Self {
        Self {
            head: col[0].clone(),
            tail: col[1..].iter().map(|x| x.to_integer()).collect(),
        }
    }

    pub fn to_column(&self) -> Vec<BigRational> {
        core::iter::once(self.head.clone())
            .chain(self.tail.iter().cloned().map(BigRational::from_integer))
            .collect()
    }

    /// `[1_m]`.
    pub fn char_fn(shape: &FieldShape, m: u32) -> Self {
        Self {
            head: q_pow_neg(shape.q, m * shape.n),
            tail: vec![BigInt::zero(); (shape.q - 2) as usize],
        }
    }

    /// `[1_m p_χ]` for nontrivial `χ`.
    pub fn proj_class(shape: &FieldShape, m: u32, chi: &Character) -> Self {
        let col = eval_matrix(shape.q, shape.n, m).column(chi.exponent() as usize);
        Self::from_column(&col)
    }

    /// Denominator of the head is a power of `q`.
    pub fn is_well_formed(&self, q: u64) -> bool {
        let mut d = self.head.denom().clone();
        let q = BigInt::from(q);
        while (&d % &q).is_zero() {
            d /= &q;
        }
        d.is_one()
    }
}

impl fmt::Display for KClassVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.head)?;
        for t in &self.tail {
            write!(f, "; {t}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Generator {
    /// `[1_m]`
    CharFn(u32),
    /// `[1_m p_χ]`
    ProjClass(u32, Character),
    /// `[w_χ]`
    WChi(Character),
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::CharFn(m) => write!(f, "CharFn({m})"),
            Generator::ProjClass(m, chi) => write!(f, "ProjClass({m}, chi^{})", chi.exponent()),
            Generator::WChi(chi) => write!(f, "WChi(chi^{})", chi.exponent()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Degree {
    K0,
    K1,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorEntry {
    pub generator: Generator,
    pub degree: Degree,
    /// Coordinates in `ℤ[1/q] ⊕ ℤ^{q−2}`, where that identification applies.
    pub image: Option<KClassVector>,
    /// Order of the class in the group, `None` for infinite order.
    pub order: Option<BigUint>,
}

/// Direct sum of canonical parts, each over its own coefficient ring.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MixedGroup {
    pub parts: Vec<(CoefficientRing, Part)>,
}

impl MixedGroup {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(ring: CoefficientRing, part: Part) -> Self {
        let mut g = Self::zero();
        g.push(ring, part);
        g
    }

    pub fn push(&mut self, ring: CoefficientRing, part: Part) {
        if !part.is_zero() {
            self.parts.push((ring, part));
        }
    }

    /// `G ⊗ R` for a ring containing every tag.
    pub fn localize(&self, ring: &CoefficientRing) -> Part {
        self.parts.iter().fold(Part::zero(), |acc, (r, p)| {
            acc.direct_sum(&p.localize(&r.join(ring)), ring)
        })
    }
}

impl fmt::Display for MixedGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "0");
        }
        let mut pieces: Vec<String> = Vec::new();
        for (ring, part) in &self.parts {
            if ring.is_integers() {
                pieces.push(format!("{part}"));
                continue;
            }
            for d in &part.torsion {
                pieces.push(format!("{ring}/{d}"));
            }
            match part.rank {
                0 => {}
                1 => pieces.push(format!("{ring}")),
                r => pieces.push(format!("{ring}^{r}")),
            }
        }
        write!(f, "{}", pieces.join(" (+) "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Base,
    PrimeAdjoined,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KStageReport {
    pub stage: Stage,
    pub shape: FieldShape,
    pub k0: MixedGroup,
    pub k1: MixedGroup,
    /// Ring the engine path works over.
    pub ring: CoefficientRing,
    pub closed_localized: GradedModule,
    pub engine: GradedModule,
    pub agree: bool,
    pub generators: Vec<GeneratorEntry>,
}

fn ensure_agreement(
    stage: &'static str,
    closed: &GradedModule,
    engine: &GradedModule,
) -> Result<bool, KError> {
    if abgrp::module_iso_eq(closed, engine)? {
        Ok(true)
    } else {
        Err(KError::CrossCheckMismatch {
            stage,
            closed: format!("{closed}"),
            engine: format!("{engine}"),
        })
    }
}

/// `K_*` of `C_0(𝔸_T) ⋊ K ⋊ F_q^×`: `K₀ = ℤ[1/q] ⊕ ℤ^{q−2}`, `K₁ = 0`.
pub fn base_stage(shape: &FieldShape, probe: u64) -> Result<KStageReport, KError> {
    let q = shape.q;
    let ring = shape.ring_q();
    let mut k0 = MixedGroup::single(ring.clone(), Part::free(1));
    k0.push(CoefficientRing::integers(), Part::free(q - 2));
    let k1 = MixedGroup::zero();

    let connecting = connecting_matrix(q, shape.n);
    let colimit = abgrp::colimit_stationary(|_| connecting.clone(), &ring, probe)?;
    let engine = GradedModule::new(ring.clone(), colimit.part, Part::zero());
    let closed_localized = GradedModule::new(ring.clone(), k0.localize(&ring), k1.localize(&ring));
    let agree = ensure_agreement("base stage", &closed_localized, &engine)?;

    // the identification is compatible with the connecting maps and
    // invertible over ℤ[1/q] at each stage
    let connecting = connecting.to_exact();
    for m in 0..3 {
        let lhs = eval_matrix(q, shape.n, m + 1).mul(&connecting)?;
        let det = eval_matrix(q, shape.n, m).det()?;
        let unit = !det.is_zero()
            && ring.is_unit(det.numer())
            && ring.is_unit(det.denom());
        if lhs != eval_matrix(q, shape.n, m) || !unit {
            return Err(KError::CrossCheckMismatch {
                stage: "base stage identification",
                closed: format!("E_{m}"),
                engine: format!("E_{} * (I + Q^n J)", m + 1),
            });
        }
    }

    let mut generators = Vec::new();
    for m in 0..2 {
        generators.push(GeneratorEntry {
            generator: Generator::CharFn(m),
            degree: Degree::K0,
            image: Some(KClassVector::char_fn(shape, m)),
            order: None,
        });
    }
    for chi in shape.nontrivial_characters() {
        generators.push(GeneratorEntry {
            image: Some(KClassVector::proj_class(shape, 0, &chi)),
            generator: Generator::ProjClass(0, chi),
            degree: Degree::K0,
            order: None,
        });
    }
    Ok(KStageReport {
        stage: Stage::Base,
        shape: *shape,
        k0,
        k1,
        ring,
        closed_localized,
        engine,
        agree,
        generators,
    })
}

/// `K_*` after adjoining the prime element `τ`, with the engine path run on
/// the supplied `(μ_τ)_*`.
pub fn adjoin_prime_with(shape: &FieldShape, mu: &ExactMatrix) -> Result<KStageReport, KError> {
    let q = shape.q;
    let ring = shape.ring_q();
    let qf = shape.repunit();
    let mut k0 = MixedGroup::zero();
    k0.push(
        CoefficientRing::integers(),
        Part::from_orders(&CoefficientRing::integers(), 0, core::slice::from_ref(&qf)),
    );
    k0.push(CoefficientRing::integers(), Part::free(q - 2));
    let k1 = MixedGroup::single(CoefficientRing::integers(), Part::free(q - 2));

    let a = ExactMatrix::identity((q - 1) as usize).sub(mu)?;
    let engine = GradedModule::new(
        ring.clone(),
        abgrp::cokernel(&a, &ring)?,
        abgrp::kernel(&a, &ring)?,
    );
    let closed_localized = GradedModule::new(ring.clone(), k0.localize(&ring), k1.localize(&ring));
    let agree = ensure_agreement("prime-adjoined stage", &closed_localized, &engine)?;

    let mut generators = vec![GeneratorEntry {
        generator: Generator::CharFn(0),
        degree: Degree::K0,
        image: None,
        order: abgrp::element_order(&a, &KClassVector::char_fn(shape, 0).to_column(), &ring)?,
    }];
    for chi in shape.nontrivial_characters() {
        let v = KClassVector::proj_class(shape, 0, &chi);
        generators.push(GeneratorEntry {
            order: abgrp::element_order(&a, &v.to_column(), &ring)?,
            image: None,
            generator: Generator::ProjClass(0, chi),
            degree: Degree::K0,
        });
    }
    for chi in shape.nontrivial_characters() {
        generators.push(GeneratorEntry {
            generator: Generator::WChi(chi),
            degree: Degree::K1,
            image: None,
            order: None,
        });
    }
    Ok(KStageReport {
        stage: Stage::PrimeAdjoined,
        shape: *shape,
        k0,
        k1,
        ring,
        closed_localized,
        engine,
        agree,
        generators,
    })
}

pub fn adjoin_prime(shape: &FieldShape) -> Result<KStageReport, KError> {
    adjoin_prime_with(shape, &mu_tau_matrix(shape.q, shape.f))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalizedK {
    pub ring: CoefficientRing,
    pub gamma_rank: u32,
    pub even: u64,
    pub odd: u64,
    pub module: GradedModule,
    /// For `r = 1`: agreement with the prime-adjoined stage after `⊗ ℤ[1/Q^f]`.
    pub consistent_with_adjoin: Option<bool>,
}

/// `(K̃₀(C*(F_q^×)) ⊗ Λ(Γ_r)) ⊗ ℤ[1/Q^f]`.
pub fn rationalized_k(shape: &FieldShape, r: u32) -> Result<RationalizedK, KError> {
    if r == 0 {
        return Err(KError::InvalidGammaRank);
    }
    let ring = shape.ring_repunit();
    let reduced = GradedModule::new(ring.clone(), Part::free(shape.q - 2), Part::zero());
    let module = abgrp::graded_tensor(&reduced, &abgrp::exterior_algebra(r, &ring)?)?;
    let consistent_with_adjoin = if r == 1 {
        let adj = adjoin_prime(shape)?;
        let closed = GradedModule::new(ring.clone(), adj.k0.localize(&ring), adj.k1.localize(&ring));
        let wide = ring.join(&adj.ring);
        let engine = adj.engine.localize(&wide);
        Some(
            abgrp::module_iso_eq(&closed, &module)?
                && abgrp::module_iso_eq(&engine, &module.localize(&wide))?,
        )
    } else {
        None
    };
    Ok(RationalizedK {
        ring,
        gamma_rank: r,
        even: module.even.rank,
        odd: module.odd.rank,
        module,
        consistent_with_adjoin,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TorsionPresence {
    /// An element of exactly this order exists.
    Present { order: BigUint },
    /// The primeness hypothesis fails; no claim is made.
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorsionReport {
    pub repunit: BigUint,
    /// Every torsion order is supported on these primes.
    pub admissible_support: Vec<BigUint>,
    pub support_probable: bool,
    pub primeness: bool,
    pub presence: TorsionPresence,
}

impl TorsionReport {
    /// Whether an element of order `n` is allowed.
    pub fn is_admissible_order(&self, n: &BigUint) -> bool {
        repunit::prime_support(n)
            .iter()
            .all(|p| self.admissible_support.contains(p))
    }

    /// Every torsion order the report asserts.
    pub fn emitted_orders(&self) -> Vec<BigUint> {
        match &self.presence {
            TorsionPresence::Present { order } if !order.is_one() => vec![order.clone()],
            _ => Vec::new(),
        }
    }
}

pub fn torsion_report(shape: &FieldShape) -> TorsionReport {
    let qf = shape.repunit();
    let factorization = repunit::factorize(&qf);
    let primeness = shape.primeness();
    TorsionReport {
        admissible_support: factorization.primes(),
        support_probable: factorization.probable,
        primeness,
        presence: if primeness {
            TorsionPresence::Present { order: qf.clone() }
        } else {
            TorsionPresence::Unknown
        },
        repunit: qf,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distinction {
    pub q: u64,
    pub f1: u32,
    pub f2: u32,
    pub support1: Vec<BigUint>,
    pub support2: Vec<BigUint>,
    /// The K-theories differ: the torsion supports of `Q^{f1}`, `Q^{f2}` differ.
    pub distinct: bool,
}

/// Whether K-theory tells apart fields with inertia degrees `f1`, `f2` at infinity.
pub fn distinguish_fields(q: u64, f1: u32, f2: u32) -> Result<Distinction, KError> {
    ffield::prime_power(q).ok_or(KError::NotPrimePower(q))?;
    for f in [f1, f2] {
        if f == 0 {
            return Err(KError::InvalidInertiaDegree { f, n: f });
        }
        if (f as u64).gcd(&(q - 1)) != 1 {
            return Err(KError::PrimenessViolated { f, q_minus_1: q - 1 });
        }
    }
    let support1 = repunit::prime_support(&repunit_or_zero(q, f1));
    let support2 = repunit::prime_support(&repunit_or_zero(q, f2));
    Ok(Distinction {
        q,
        f1,
        f2,
        distinct: support1 != support2,
        support1,
        support2,
    })
}

/// All stages for one shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KReport {
    pub shape: FieldShape,
    pub base: KStageReport,
    pub adjoined: KStageReport,
    pub rationalized: RationalizedK,
    pub torsion: TorsionReport,
}

pub fn analyze(shape: &FieldShape, gamma_rank: u32, probe: u64) -> Result<KReport, KError> {
    Ok(KReport {
        shape: *shape,
        base: base_stage(shape, probe)?,
        adjoined: adjoin_prime(shape)?,
        rationalized: rationalized_k(shape, gamma_rank)?,
        torsion: torsion_report(shape),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn shape(q: u64, n: u32, f: u32) -> FieldShape {
        FieldShape::new(q, n, f).unwrap()
    }

    #[test]
    fn shape_validation() {
        assert_eq!(FieldShape::new(6, 1, 1), Err(KError::NotPrimePower(6)));
        assert_eq!(FieldShape::new(3, 0, 1), Err(KError::InvalidDegree));
        assert_eq!(
            FieldShape::new(3, 3, 2),
            Err(KError::InvalidInertiaDegree { f: 2, n: 3 })
        );
        assert!(shape(4, 2, 2).primeness());
        assert!(!shape(3, 2, 2).primeness());
    }

    #[test]
    fn connecting_examples() {
        assert_eq!(connecting_matrix(2, 1), IntMatrix::from_rows(&[vec![2]]));
        assert_eq!(connecting_matrix(3, 1), IntMatrix::from_rows(&[vec![2, 1], vec![1, 2]]));
        let c = connecting_matrix(3, 2);
        assert_eq!(c, IntMatrix::from_rows(&[vec![5, 4], vec![4, 5]]));
        assert_eq!(c.det().unwrap(), BigInt::from(9));
    }

    #[test]
    fn eval_examples() {
        let e0 = eval_matrix(5, 2, 0);
        for j in 1..4 {
            assert!(e0.get(0, j).is_zero());
            assert_eq!(e0.get(j, j), &BigRational::one());
        }
        for m in 0..4 {
            assert_eq!(eval_matrix(2, 1, m), ExactMatrix::from_rows(&[vec![r(1, 1 << m)]]));
        }
        let e2 = eval_matrix(3, 1, 2);
        assert_eq!(e2.get(0, 1), &r(-4, 9));
        let lhs = eval_matrix(3, 1, 3).mul(&connecting_matrix(3, 1).to_exact()).unwrap();
        assert_eq!(lhs, e2);
    }

    #[test]
    fn only_the_minus_sign_is_compatible() {
        // with head +q^{-mn}Q^{mn} for χ ≠ 1 the compatibility identity fails
        let (q, n, m) = (3u64, 1u32, 1u32);
        let flip = |mut e: ExactMatrix, m: u32| {
            let scale = q_pow_neg(q, m * n);
            let big_q = rat(repunit_or_zero(q, m * n));
            for j in 1..(q - 1) as usize {
                e.set(0, j, &scale * &big_q);
            }
            e.set(0, 0, &scale * (BigRational::one() - &big_q * BigRational::from_integer(BigInt::from(q - 2))));
            e
        };
        let c = connecting_matrix(q, n).to_exact();
        let plus_lhs = flip(eval_matrix(q, n, m + 1), m + 1).mul(&c).unwrap();
        assert_ne!(plus_lhs, flip(eval_matrix(q, n, m), m));
        let minus_lhs = eval_matrix(q, n, m + 1).mul(&c).unwrap();
        assert_eq!(minus_lhs, eval_matrix(q, n, m));
    }

    #[test]
    fn mu_tau_examples() {
        assert_eq!(
            mu_tau_matrix(3, 1),
            ExactMatrix::from_rows(&[vec![r(1, 3), r(-1, 3)], vec![r(0, 1), r(1, 1)]])
        );
        assert_eq!(mu_tau_matrix(2, 3), ExactMatrix::from_rows(&[vec![r(1, 8)]]));
        let s = shape(5, 2, 2);
        let chi = Character::new(5, 2);
        let v = KClassVector::proj_class(&s, 0, &chi);
        let out = KClassVector::from_column(&mu_tau_matrix(5, 2).mul_vec(&v.to_column()).unwrap());
        assert_eq!(out.head, r(-6, 25));
        assert_eq!(out.tail, v.tail);
    }

    #[test]
    fn mu_tau_matches_class_computation() {
        // (μ_τ)[1_m] = q^{n−f}[1_{m+1}], (μ_τ)[1 p_χ] = Q^{n−f}[1_1] + [1_1 p_χ]
        for (q, n, f) in [(3, 2, 1), (3, 2, 2), (5, 4, 2), (7, 3, 3), (4, 6, 2)] {
            let s = shape(q, n, f);
            let mu = mu_tau_matrix(q, f);
            for m in 0..3 {
                let lhs = mu.mul_vec(&KClassVector::char_fn(&s, m).to_column()).unwrap();
                let scale = BigRational::from_integer(BigInt::from(q).pow(n - f));
                let rhs: Vec<_> = KClassVector::char_fn(&s, m + 1)
                    .to_column()
                    .into_iter()
                    .map(|x| x * &scale)
                    .collect();
                assert_eq!(lhs, rhs);
            }
            let qnf = rat(repunit_or_zero(q, n - f));
            for chi in s.nontrivial_characters() {
                let lhs = mu
                    .mul_vec(&KClassVector::proj_class(&s, 0, &chi).to_column())
                    .unwrap();
                let one1 = KClassVector::char_fn(&s, 1).to_column();
                let p1 = KClassVector::proj_class(&s, 1, &chi).to_column();
                let rhs: Vec<_> = one1.iter().zip(&p1).map(|(a, b)| a * &qnf + b).collect();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn base_stage_examples() {
        let b = base_stage(&shape(2, 1, 1), DEFAULT_PROBE_BOUND).unwrap();
        assert_eq!(format!("{}", b.k0), "Z[1/2]");
        assert_eq!(format!("{}", b.k1), "0");
        let b = base_stage(&shape(5, 1, 1), DEFAULT_PROBE_BOUND).unwrap();
        assert_eq!(format!("{}", b.k0), "Z[1/5] (+) Z^3");
        assert_eq!(b.engine.even, Part::free(4));
        assert!(b.agree);
        assert_eq!(
            b.generators[1].image,
            Some(KClassVector {
                head: r(1, 5),
                tail: vec![BigInt::zero(); 3]
            })
        );
    }

    #[test]
    fn adjoin_examples() {
        let a = adjoin_prime(&shape(3, 1, 1)).unwrap();
        assert_eq!((format!("{}", a.k0), format!("{}", a.k1)), ("Z".into(), "Z".into()));
        let a = adjoin_prime(&shape(3, 2, 2)).unwrap();
        assert_eq!((format!("{}", a.k0), format!("{}", a.k1)), ("Z/4 (+) Z".into(), "Z".into()));
        assert_eq!(a.generators[0].order, Some(BigUint::from(4u32)));
        assert_eq!(a.generators[1].order, None);
        let a = adjoin_prime(&shape(2, 3, 3)).unwrap();
        assert_eq!((format!("{}", a.k0), format!("{}", a.k1)), ("Z/7".into(), "0".into()));
        assert!(a.agree);
    }

    #[test]
    fn mutated_matrix_is_detected() {
        let s = shape(3, 2, 2);
        let mut mu = mu_tau_matrix(3, 2);
        mu.set(0, 1, r(-5, 9));
        assert!(matches!(
            adjoin_prime_with(&s, &mu),
            Err(KError::CrossCheckMismatch { .. })
        ));
    }

    #[test]
    fn rationalized_examples() {
        let k = rationalized_k(&shape(3, 2, 2), 1).unwrap();
        assert_eq!((k.even, k.odd), (1, 1));
        assert_eq!(k.consistent_with_adjoin, Some(true));
        let k = rationalized_k(&shape(5, 2, 2), 3).unwrap();
        assert_eq!((k.even, k.odd), (12, 12));
        for f in 1..4 {
            for r in 1..5 {
                let k = rationalized_k(&shape(2, f, f), r).unwrap();
                assert_eq!((k.even, k.odd), (0, 0));
            }
        }
        assert_eq!(rationalized_k(&shape(3, 1, 1), 0), Err(KError::InvalidGammaRank));
    }

    #[test]
    fn torsion_examples() {
        let t = torsion_report(&shape(3, 2, 2));
        assert_eq!(t.presence, TorsionPresence::Unknown);
        assert_eq!(t.admissible_support, vec![BigUint::from(2u32)]);
        let t = torsion_report(&shape(4, 2, 2));
        assert_eq!(t.presence, TorsionPresence::Present { order: 5u32.into() });
        let t = torsion_report(&shape(2, 4, 4));
        assert_eq!(t.presence, TorsionPresence::Present { order: 15u32.into() });
        assert!(t.is_admissible_order(&45u32.into()));
        assert!(!t.is_admissible_order(&14u32.into()));
    }

    #[test]
    fn distinguish_examples() {
        assert!(!distinguish_fields(4, 2, 2).unwrap().distinct);
        assert_eq!(
            distinguish_fields(4, 3, 3),
            Err(KError::PrimenessViolated { f: 3, q_minus_1: 3 })
        );
        let d = distinguish_fields(2, 2, 3).unwrap();
        assert!(d.distinct);
        assert_eq!(d.support1, vec![BigUint::from(3u32)]);
        assert_eq!(d.support2, vec![BigUint::from(7u32)]);
        assert_eq!(
            distinguish_fields(3, 2, 1),
            Err(KError::PrimenessViolated { f: 2, q_minus_1: 2 })
        );
    }
}
