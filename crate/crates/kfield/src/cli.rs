//! Command dispatch. `run` is the whole program minus process IO.

use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use kfield_core::abgrp::{self, IntMatrix};
use kfield_core::ffield::{self, Character, FieldTower};
use kfield_core::funcfield::{self, Embedding, Poly};
use kfield_core::ktheory::{self, FieldShape, KError, DEFAULT_PROBE_BOUND};
use kfield_core::repunit;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::parse;
use crate::report::{
    self, AnalyzeReport, CollisionJson, ConstructInput, ConstructReport, PlaceJson, PlacesInput,
    PlacesReport, SelftestReport, SuiteJson, SweepInput, SweepReport,
};

pub const PROBE_ENV: &str = "KFIELD_PROBE_BOUND";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USER: i32 = 1;
pub const EXIT_CROSS_CHECK: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "kfield", version, about = "K-theory invariants of ring C*-algebras of function fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Full K-theory report for a field shape (q, n, f).
    Analyze {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        f: u32,
        /// Degree over F_q(T); defaults to f.
        #[arg(long)]
        n: Option<u32>,
        #[arg(long = "gamma-rank", default_value_t = 1)]
        gamma_rank: u32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Build F_q(X) with T -> 1/g(X), g the minimal polynomial of a primitive root of F_{q^f}.
    Construct {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        f: u32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Places of F_q(X) over T = 0 and T = infinity for the embedding T -> EXPR.
    Places {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        expr: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Search for distinct f1, f2 with Q^{f1}, Q^{f2} of equal prime support.
    SweepLemma {
        #[arg(long = "q-max")]
        q_max: u64,
        #[arg(long = "f-max")]
        f_max: u32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run the built-in invariant suites.
    Selftest {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

/// Exit code and output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self::with_code(EXIT_OK, stdout)
    }

    fn with_code(code: i32, stdout: String) -> Self {
        Self {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    fn user_error(msg: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_USER,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        }
    }

    fn cross_check(msg: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_CROSS_CHECK,
            stdout: String::new(),
            stderr: format!("internal cross-check failure: {msg}\n"),
        }
    }
}

fn render<T: Serialize>(format: Format, value: &T, text: impl FnOnce() -> String) -> String {
    match format {
        Format::Json => report::to_json(value),
        Format::Text => text(),
    }
}

/// Parses `argv` (including the program name) and executes the command.
/// `probe_env` is the value of the probe-bound environment variable, if set.
pub fn run<I, T>(argv: I, probe_env: Option<&str>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USER } else { EXIT_OK };
            let rendered = e.render().to_string();
            return if code == EXIT_OK {
                Outcome::ok(rendered)
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: rendered,
                }
            };
        }
    };
    let probe = match probe_env {
        None => DEFAULT_PROBE_BOUND,
        Some(v) => match v.trim().parse::<u64>() {
            Ok(p) if p > 0 => p,
            _ => return Outcome::user_error(format!("{PROBE_ENV} must be a positive integer, got {v:?}")),
        },
    };
    match cli.command {
        Command::Analyze { q, f, n, gamma_rank, format } => analyze(q, f, n.unwrap_or(f), gamma_rank, probe, format),
        Command::Construct { q, f, format } => construct(q, f, format),
        Command::Places { q, expr, format } => places(q, &expr, format),
        Command::SweepLemma { q_max, f_max, format } => sweep(q_max, f_max, format),
        Command::Selftest { format } => selftest(format),
    }
}

fn k_error(e: KError) -> Outcome {
    match e {
        KError::CrossCheckMismatch { .. } => Outcome::cross_check(e),
        other => Outcome::user_error(other),
    }
}

fn analyze(q: u64, f: u32, n: u32, gamma_rank: u32, probe: u64, format: Format) -> Outcome {
    let shape = match FieldShape::new(q, n, f) {
        Ok(s) => s,
        Err(e) => return k_error(e),
    };
    // keep every stage at desk scale
    if q > 1 << 12 || n > 64 || gamma_rank > 63 {
        return Outcome::user_error("inputs exceed supported bounds (q <= 4096, n <= 64, gamma-rank <= 63)");
    }
    let k = match ktheory::analyze(&shape, gamma_rank, probe) {
        Ok(k) => k,
        Err(e) => return k_error(e),
    };
    let r = AnalyzeReport::new(&k, gamma_rank, probe);
    let code = if r.agree { EXIT_OK } else { EXIT_CROSS_CHECK };
    Outcome::with_code(code, render(format, &r, || r.to_text()))
}

fn field_for(q: u64) -> Result<ffield::FiniteField, Outcome> {
    let (p, nu) = ffield::prime_power(q)
        .ok_or_else(|| Outcome::user_error(format!("{q} is not a prime power")))?;
    ffield::make_field(p, nu).map_err(Outcome::user_error)
}

fn construct(q: u64, f: u32, format: Format) -> Outcome {
    if f == 0 {
        return Outcome::user_error("f must be at least 1");
    }
    let r = match funcfield::construct_remark_field(q, f) {
        Ok(r) => r,
        Err(e) => return Outcome::user_error(e),
    };
    let report = ConstructReport {
        schema_version: report::SCHEMA_VERSION.into(),
        command: "construct".into(),
        input: ConstructInput { q, f },
        remark: "Remark ex-ff".into(),
        g: r.g.to_string(),
        embedding: format!("T -> {}", r.embedding.image()),
        infinite_places: r.infinite_places.iter().map(PlaceJson::from).collect(),
        irreducible: r.irreducible,
        derivative_nonzero: r.derivative_nonzero,
        single_infinite: r.single_infinite,
        inertia_degree: r.inertia_degree,
        degree_sum: funcfield::degree_sum(&r.infinite_places),
        verified: r.verified(),
    };
    let code = if report.verified { EXIT_OK } else { EXIT_CROSS_CHECK };
    Outcome::with_code(code, render(format, &report, || report.to_text()))
}

fn places(q: u64, expr: &str, format: Format) -> Outcome {
    let field = match field_for(q) {
        Ok(f) => f,
        Err(o) => return o,
    };
    let u = match parse::parse_rational(expr, &field) {
        Ok(u) => u,
        Err(e) => return Outcome::user_error(e),
    };
    let embedding = match Embedding::new(u.clone()) {
        Ok(e) => e,
        Err(e) => return Outcome::user_error(e),
    };
    let (zero, inf) = match (
        funcfield::places_above_zero(&u),
        funcfield::places_above_infinity(&embedding),
    ) {
        (Ok(z), Ok(i)) => (z, i),
        (Err(e), _) | (_, Err(e)) => return Outcome::user_error(e),
    };
    let degree = embedding.degree();
    let (sz, si) = (funcfield::degree_sum(&zero), funcfield::degree_sum(&inf));
    let report = PlacesReport {
        schema_version: report::SCHEMA_VERSION.into(),
        command: "places".into(),
        input: PlacesInput { q, expr: expr.into() },
        image: u.to_string(),
        degree,
        above_zero: zero.iter().map(PlaceJson::from).collect(),
        above_infinity: inf.iter().map(PlaceJson::from).collect(),
        sum_ef_zero: sz,
        sum_ef_infinity: si,
        fundamental_identity: sz as usize == degree && si as usize == degree,
        single_infinite: funcfield::verify_single_infinite(&embedding).0,
    };
    let code = if report.fundamental_identity { EXIT_OK } else { EXIT_CROSS_CHECK };
    Outcome::with_code(code, render(format, &report, || report.to_text()))
}

fn sweep(q_max: u64, f_max: u32, format: Format) -> Outcome {
    if q_max < 2 || f_max < 1 {
        return Outcome::user_error("sweep bounds must satisfy q-max >= 2 and f-max >= 1");
    }
    if q_max > 1 << 16 || f_max > 256 {
        return Outcome::user_error("sweep bounds exceed supported range (q-max <= 65536, f-max <= 256)");
    }
    let start = Instant::now();
    let collisions = repunit::support_lemma_sweep(q_max, f_max);
    let elapsed = start.elapsed().as_millis();
    let f = f_max as u64;
    let report = SweepReport {
        schema_version: report::SCHEMA_VERSION.into(),
        command: "sweep-lemma".into(),
        input: SweepInput { q_max, f_max },
        pairs_checked: (q_max - 1) * f * (f - 1) / 2,
        counterexamples: collisions
            .iter()
            .map(|c| CollisionJson {
                q: c.q,
                f1: c.f1,
                f2: c.f2,
                support: c.support.iter().map(ToString::to_string).collect(),
            })
            .collect(),
    };
    let code = if report.counterexamples.is_empty() { EXIT_OK } else { EXIT_CROSS_CHECK };
    Outcome::with_code(code, render(format, &report, || report.to_text(elapsed)))
}

struct Suite {
    name: &'static str,
    checks: u64,
    failure: Option<String>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            checks: 0,
            failure: None,
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.failure.is_none() {
            self.failure = Some(what());
        }
    }
}

const Q_RANGE: [u64; 7] = [2, 3, 4, 5, 7, 8, 9];

fn suite_fields() -> Suite {
    let mut s = Suite::new("finite fields and characters");
    for q in [2u64, 3, 4, 5, 7, 8, 9, 16] {
        let base = field_for(q).expect("prime power");
        let gen = ffield::mult_generator(&base);
        s.check(base.mult_order(gen) == Some(q - 1), || format!("generator order in F_{q}"));
        for f in 1..=3u32 {
            if q.pow(f) > 1024 {
                continue;
            }
            let tower = FieldTower::new(&base, f).expect("small tower");
            for chi in Character::all(q) {
                let psi = ffield::build_psi(&chi, &tower).expect("psi");
                s.check(psi.find_equivariance_violation().is_none(), || {
                    format!("Psi equivariance q={q} f={f} chi^{}", chi.exponent())
                });
                if let Ok(x) = ffield::build_x(&chi, &tower) {
                    s.check(x.find_equivariance_violation().is_none(), || {
                        format!("X equivariance q={q} f={f} chi^{}", chi.exponent())
                    });
                }
            }
            s.check(tower.repunit() % (q - 1) == f as u64 % (q - 1), || {
                format!("Q^f congruence q={q} f={f}")
            });
        }
    }
    s
}

fn suite_polynomials() -> Suite {
    let mut s = Suite::new("polynomial factorization and places");
    for (q, f) in [(2, 1), (2, 2), (2, 3), (3, 2), (4, 2), (5, 2), (9, 2)] {
        match funcfield::construct_remark_field(q, f) {
            Ok(r) => s.check(r.verified(), || format!("remark field q={q} f={f}")),
            Err(e) => s.check(false, || format!("remark field q={q} f={f}: {e}")),
        }
    }
    let f3 = field_for(3).expect("F_3");
    let mut g = Poly::one(&f3);
    for c in [&[1i64, 1][..], &[2, 0, 1], &[1, 1], &[0, 1, 0, 1]] {
        g = g.mul(&Poly::from_ints(&f3, c));
        let factors = funcfield::factorize(&g).expect("nonzero");
        s.check(funcfield::expand_factors(&f3, &factors) == g.monic(), || {
            format!("factorization round trip for {g}")
        });
        s.check(factors.iter().all(|(p, _)| p.is_irreducible()), || format!("irreducible factors of {g}"));
    }
    s
}

fn suite_engine() -> Suite {
    let mut s = Suite::new("Smith normal form engine");
    let z = abgrp::CoefficientRing::integers();
    for code in 0..625u32 {
        let digits: Vec<i64> = (0..4).map(|k| ((code / 5u32.pow(k)) % 5) as i64 - 2).collect();
        let a = IntMatrix::from_rows(&[digits[..2].to_vec(), digits[2..].to_vec()]);
        let snf = abgrp::snf(&a);
        let recomposed = snf.u.mul(&a).and_then(|m| m.mul(&snf.v));
        s.check(recomposed.as_ref() == Ok(&snf.d) && snf.d.is_diagonal(), || format!("U A V = D for {a:?}"));
        let det = a.det().expect("square");
        let coker = abgrp::cokernel(&a.to_exact(), &z).expect("integral");
        if !det.is_zero() {
            s.check(BigInt::from(coker.torsion_order()) == det.abs(), || {
                format!("|coker| = |det| for {a:?}")
            });
        }
    }
    s
}

fn suite_ktheory() -> Suite {
    let mut s = Suite::new("K-theory pipeline cross-checks");
    for q in Q_RANGE {
        for n in 1..=3u32 {
            let c = ktheory::connecting_matrix(q, n);
            s.check(c.det().ok() == Some(BigInt::from(q).pow(n)), || format!("det I+Q^nJ q={q} n={n}"));
            let ce = c.to_exact();
            for m in 0..5 {
                let lhs = ktheory::eval_matrix(q, n, m + 1).mul(&ce);
                s.check(lhs.ok() == Some(ktheory::eval_matrix(q, n, m)), || {
                    format!("E-compatibility q={q} n={n} m={m}")
                });
            }
        }
        for f in 1..=3u32 {
            let shape = FieldShape::new(q, f, f).expect("valid shape");
            let adj = ktheory::adjoin_prime(&shape);
            s.check(adj.as_ref().is_ok_and(|a| a.agree), || format!("prime-adjoined stage q={q} f={f}"));
            let rk = ktheory::rationalized_k(&shape, 1);
            s.check(rk.is_ok_and(|r| r.consistent_with_adjoin == Some(true)), || {
                format!("rationalized consistency q={q} f={f}")
            });
        }
    }
    s
}

fn suite_repunit() -> Suite {
    let mut s = Suite::new("repunit number theory");
    s.check(repunit::support_lemma_sweep(8, 8).is_empty(), || "support lemma sweep (8, 8)".into());
    for q in 2..=12u64 {
        for f1 in 1..=8u32 {
            for f2 in 1..=8u32 {
                let g = repunit::gcd_identity_check(q, f1, f2);
                s.check(g.is_ok_and(|g| g.equal), || format!("gcd identity q={q} f1={f1} f2={f2}"));
            }
        }
    }
    for p in [2u64, 3, 5, 7] {
        for e in 0..200u64 {
            let mut oracle = 0;
            let mut pk = p;
            while pk <= e {
                oracle += e / pk;
                pk *= p;
            }
            s.check(repunit::legendre_valuation(p, e) == Ok(oracle), || format!("Legendre p={p} e={e}"));
        }
    }
    s
}

fn selftest(format: Format) -> Outcome {
    let suites: Vec<SuiteJson> = [suite_fields(), suite_polynomials(), suite_engine(), suite_ktheory(), suite_repunit()]
        .into_iter()
        .map(|s| SuiteJson {
            name: s.name.into(),
            passed: s.failure.is_none(),
            checks: s.checks,
            detail: s.failure,
        })
        .collect();
    let report = SelftestReport {
        schema_version: report::SCHEMA_VERSION.into(),
        command: "selftest".into(),
        passed: suites.iter().all(|s| s.passed),
        suites,
    };
    let code = if report.passed { EXIT_OK } else { EXIT_CROSS_CHECK };
    Outcome::with_code(code, render(format, &report, || report.to_text()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_kinds_map_to_exit_codes() {
        let mismatch = KError::CrossCheckMismatch {
            stage: "prime-adjoined stage",
            closed: "Z/4 (+) Z".into(),
            engine: "Z/2 (+) Z".into(),
        };
        let out = k_error(mismatch);
        assert_eq!(out.code, EXIT_CROSS_CHECK);
        assert!(out.stderr.starts_with("internal cross-check failure"));
        assert_eq!(k_error(KError::NotPrimePower(6)).code, EXIT_USER);
    }
}
