//! JSON and text renderings of pipeline results.

use kfield_core::abgrp::Part;
use kfield_core::funcfield::{Place, PlaceData};
use kfield_core::ktheory::{
    Degree, GeneratorEntry, KReport, KStageReport, RationalizedK, TorsionPresence, TorsionReport,
};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartJson {
    pub rank: u64,
    pub torsion: Vec<String>,
    pub display: String,
}

impl From<&Part> for PartJson {
    fn from(p: &Part) -> Self {
        Self {
            rank: p.rank,
            torsion: p.torsion.iter().map(ToString::to_string).collect(),
            display: p.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassJson {
    pub head: String,
    pub tail: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorJson {
    pub generator: String,
    pub degree: String,
    pub image: Option<ClassJson>,
    /// `None` for infinite order or when not computed.
    pub order: Option<String>,
}

impl From<&GeneratorEntry> for GeneratorJson {
    fn from(g: &GeneratorEntry) -> Self {
        Self {
            generator: g.generator.to_string(),
            degree: match g.degree {
                Degree::K0 => "K0".into(),
                Degree::K1 => "K1".into(),
            },
            image: g.image.as_ref().map(|v| ClassJson {
                head: v.head.to_string(),
                tail: v.tail.iter().map(ToString::to_string).collect(),
            }),
            order: g.order.as_ref().map(ToString::to_string),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageJson {
    pub proposition: String,
    pub k0: String,
    pub k1: String,
    pub ring: String,
    pub closed_form_localized: GradedJson,
    pub engine: GradedJson,
    pub engine_method: String,
    pub agree: bool,
    pub generators: Vec<GeneratorJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedJson {
    pub k0: PartJson,
    pub k1: PartJson,
}

impl StageJson {
    fn new(s: &KStageReport, proposition: &str, engine_method: &str) -> Self {
        Self {
            proposition: proposition.into(),
            k0: s.k0.to_string(),
            k1: s.k1.to_string(),
            ring: s.ring.to_string(),
            closed_form_localized: GradedJson {
                k0: (&s.closed_localized.even).into(),
                k1: (&s.closed_localized.odd).into(),
            },
            engine: GradedJson {
                k0: (&s.engine.even).into(),
                k1: (&s.engine.odd).into(),
            },
            engine_method: engine_method.into(),
            agree: s.agree,
            generators: s.generators.iter().map(Into::into).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalizedJson {
    pub theorem: String,
    pub ring: String,
    pub gamma_rank: u32,
    pub even_rank: u64,
    pub odd_rank: u64,
    pub consistent_with_adjoin: Option<bool>,
}

impl From<&RationalizedK> for RationalizedJson {
    fn from(r: &RationalizedK) -> Self {
        Self {
            theorem: "Theorem mainthm1".into(),
            ring: r.ring.to_string(),
            gamma_rank: r.gamma_rank,
            even_rank: r.even,
            odd_rank: r.odd,
            consistent_with_adjoin: r.consistent_with_adjoin,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionJson {
    pub results: String,
    pub repunit: String,
    pub admissible_support: Vec<String>,
    pub support_probable: bool,
    pub primeness: bool,
    pub presence: String,
    pub order: Option<String>,
}

impl From<&TorsionReport> for TorsionJson {
    fn from(t: &TorsionReport) -> Self {
        let (presence, order) = match &t.presence {
            TorsionPresence::Present { order } => ("present", Some(order.to_string())),
            TorsionPresence::Unknown => ("unknown", None),
        };
        Self {
            results: "Corollary torsion-order; Prop torsion-exists".into(),
            repunit: t.repunit.to_string(),
            admissible_support: t.admissible_support.iter().map(ToString::to_string).collect(),
            support_probable: t.support_probable,
            primeness: t.primeness,
            presence: presence.into(),
            order,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalyzeInput {
    pub q: u64,
    pub n: u32,
    pub f: u32,
    pub gamma_rank: u32,
    pub probe_bound: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalyzeReport {
    pub schema_version: String,
    pub command: String,
    pub input: AnalyzeInput,
    pub base_stage: StageJson,
    pub adjoin_prime: StageJson,
    pub rationalized: RationalizedJson,
    pub torsion: TorsionJson,
    pub agree: bool,
}

const BASE_PROP: &str = "Prop K(add&rou)";
const ADJOIN_PROP: &str = "Prop K(AKFtau)";

impl AnalyzeReport {
    pub fn new(k: &KReport, gamma_rank: u32, probe_bound: u64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            command: "analyze".into(),
            input: AnalyzeInput {
                q: k.shape.q(),
                n: k.shape.n(),
                f: k.shape.f(),
                gamma_rank,
                probe_bound,
            },
            base_stage: StageJson::new(
                &k.base,
                BASE_PROP,
                "stationary colimit of I + Q^n J (Lemma i_*)",
            ),
            adjoin_prime: StageJson::new(
                &k.adjoined,
                ADJOIN_PROP,
                "coker/ker of id - (mu_tau)_* (Prop mu_psi)",
            ),
            rationalized: (&k.rationalized).into(),
            torsion: (&k.torsion).into(),
            agree: k.base.agree && k.adjoined.agree,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let i = &self.input;
        let _ = writeln!(out, "kfield analyze: q = {}, n = {}, f = {}", i.q, i.n, i.f);
        let _ = writeln!(out, "Q^f = {}", self.torsion.repunit);
        for (title, s) in [("base stage", &self.base_stage), ("prime-adjoined stage", &self.adjoin_prime)] {
            let _ = writeln!(out);
            let _ = writeln!(out, "[{}] {}", s.proposition, title);
            let _ = writeln!(out, "  K0 = {}", s.k0);
            let _ = writeln!(out, "  K1 = {}", s.k1);
            let _ = writeln!(out, "  engine over {}: {}", s.ring, s.engine_method);
            let _ = writeln!(out, "    K0 = {}", s.engine.k0.display);
            let _ = writeln!(out, "    K1 = {}", s.engine.k1.display);
            let _ = writeln!(out, "  agree: {}", s.agree);
            let _ = writeln!(out, "  generators:");
            for g in &s.generators {
                let mut line = format!("    {} {}", g.degree, g.generator);
                if let Some(img) = &g.image {
                    let _ = write!(line, " -> ({}", img.head);
                    for t in &img.tail {
                        let _ = write!(line, "; {t}");
                    }
                    line.push(')');
                }
                if let Some(o) = &g.order {
                    let _ = write!(line, ", order {o}");
                }
                let _ = writeln!(out, "{line}");
            }
        }
        let r = &self.rationalized;
        let _ = writeln!(out);
        let _ = writeln!(out, "[{}] after inverting Q^f, over {}", r.theorem, r.ring);
        let _ = writeln!(
            out,
            "  Gamma truncated to rank {} (Gamma itself has countably many generators)",
            r.gamma_rank
        );
        let _ = writeln!(out, "  even rank = {}, odd rank = {}", r.even_rank, r.odd_rank);
        if let Some(c) = r.consistent_with_adjoin {
            let _ = writeln!(out, "  consistent with {ADJOIN_PROP}: {c}");
        }
        let t = &self.torsion;
        let _ = writeln!(out);
        let _ = writeln!(out, "[{}] torsion", t.results);
        let mut support = t.admissible_support.join(", ");
        if t.support_probable {
            support.push_str(" (probable primes)");
        }
        let _ = writeln!(out, "  admissible torsion orders: supported on {{{support}}}");
        match &t.order {
            Some(o) if o == "1" => {
                let _ = writeln!(out, "  no torsion: Q^f = 1");
            }
            Some(o) => {
                let _ = writeln!(out, "  torsion of order {o} present (gcd(f, q-1) = 1)");
            }
            None => {
                let _ = writeln!(out, "  presence: UNKNOWN (gcd(f, q-1) != 1)");
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceJson {
    pub place: String,
    pub e: u32,
    pub f: u32,
}

impl From<&PlaceData> for PlaceJson {
    fn from(p: &PlaceData) -> Self {
        Self {
            place: match &p.place {
                Place::Finite(pi) => pi.to_string(),
                Place::Infinity => "infinity".into(),
            },
            e: p.e,
            f: p.f,
        }
    }
}

fn places_text(out: &mut String, places: &[PlaceJson]) {
    for p in places {
        let _ = writeln!(out, "    {}: e = {}, f = {}", p.place, p.e, p.f);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructInput {
    pub q: u64,
    pub f: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructReport {
    pub schema_version: String,
    pub command: String,
    pub input: ConstructInput,
    pub remark: String,
    pub g: String,
    pub embedding: String,
    pub infinite_places: Vec<PlaceJson>,
    pub irreducible: bool,
    pub derivative_nonzero: bool,
    pub single_infinite: bool,
    pub inertia_degree: Option<u32>,
    pub degree_sum: u32,
    pub verified: bool,
}

impl ConstructReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "kfield construct: q = {}, f = {}", self.input.q, self.input.f);
        let _ = writeln!(out, "[{}]", self.remark);
        let _ = writeln!(out, "  g = {}", self.g);
        let _ = writeln!(out, "  embedding: {}", self.embedding);
        let _ = writeln!(out, "  irreducible: {}", self.irreducible);
        let _ = writeln!(out, "  derivative nonzero: {}", self.derivative_nonzero);
        let _ = writeln!(out, "  places above infinity:");
        places_text(&mut out, &self.infinite_places);
        let verdict = if self.single_infinite { "single infinite place" } else { "several infinite places" };
        let _ = writeln!(out, "  {verdict}");
        if let Some(f) = self.inertia_degree {
            let _ = writeln!(out, "  inertia degree {f}");
        }
        let _ = writeln!(out, "  sum e*f = {}", self.degree_sum);
        let _ = writeln!(out, "  verified: {}", self.verified);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacesInput {
    pub q: u64,
    pub expr: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacesReport {
    pub schema_version: String,
    pub command: String,
    pub input: PlacesInput,
    pub image: String,
    pub degree: usize,
    pub above_zero: Vec<PlaceJson>,
    pub above_infinity: Vec<PlaceJson>,
    pub sum_ef_zero: u32,
    pub sum_ef_infinity: u32,
    pub fundamental_identity: bool,
    pub single_infinite: bool,
}

impl PlacesReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "kfield places: q = {}, T -> {}", self.input.q, self.image);
        let _ = writeln!(out, "  degree [F_q(X) : F_q(T)] = {}", self.degree);
        let _ = writeln!(out, "  places above T = 0:");
        places_text(&mut out, &self.above_zero);
        let _ = writeln!(out, "  places above T = infinity:");
        places_text(&mut out, &self.above_infinity);
        let _ = writeln!(
            out,
            "  sum e*f: {} above 0, {} above infinity",
            self.sum_ef_zero, self.sum_ef_infinity
        );
        let _ = writeln!(out, "  fundamental identity holds: {}", self.fundamental_identity);
        let _ = writeln!(out, "  single infinite place: {}", self.single_infinite);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollisionJson {
    pub q: u64,
    pub f1: u32,
    pub f2: u32,
    pub support: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepInput {
    pub q_max: u64,
    pub f_max: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema_version: String,
    pub command: String,
    pub input: SweepInput,
    pub pairs_checked: u64,
    pub counterexamples: Vec<CollisionJson>,
}

impl SweepReport {
    pub fn to_text(&self, elapsed_ms: u128) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "kfield sweep-lemma: 2 <= q <= {}, 1 <= f1 < f2 <= {}",
            self.input.q_max, self.input.f_max
        );
        let _ = writeln!(out, "  pairs checked: {}", self.pairs_checked);
        for c in &self.counterexamples {
            let _ = writeln!(
                out,
                "  counterexample: q = {}, f1 = {}, f2 = {}, support {{{}}}",
                c.q,
                c.f1,
                c.f2,
                c.support.join(", ")
            );
        }
        let _ = writeln!(out, "  {} counterexamples", self.counterexamples.len());
        let _ = writeln!(out, "  elapsed: {elapsed_ms} ms");
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteJson {
    pub name: String,
    pub passed: bool,
    pub checks: u64,
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub schema_version: String,
    pub command: String,
    pub suites: Vec<SuiteJson>,
    pub passed: bool,
}

impl SelftestReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "kfield selftest");
        for s in &self.suites {
            let verdict = if s.passed { "PASS" } else { "FAIL" };
            let _ = write!(out, "  {verdict} {} ({} checks)", s.name, s.checks);
            if let Some(d) = &s.detail {
                let _ = write!(out, ": {d}");
            }
            let _ = writeln!(out);
        }
        let _ = writeln!(out, "{}", if self.passed { "all suites passed" } else { "FAILURES" });
        out
    }
}

/// Pretty JSON with lexicographically sorted keys.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("report types serialize");
    let mut s = serde_json::to_string_pretty(&value).expect("values serialize");
    s.push('\n');
    s
}
