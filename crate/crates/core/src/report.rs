//! JSON analysis reports and the reproduction harness for the worked examples.

use std::fmt::Write as _;
use std::path::PathBuf;

use serde_json::{json, Map, Value};

use crate::charfn::CharFn;
use crate::coalition::Coalition;
use crate::core_solver::{core_extent, core_nonempty, is_constant_sum, profile_core};
use crate::equilibrium::{enumerate_nash, social_optima};
use crate::error::{GameError, Result};
use crate::game::{FiniteGame, Profile, Settings};
use crate::generators::GameSpec;
use crate::io::read_game_file;
use crate::reduction::{check_srp, SrpVerdict};
use crate::separability::theorem1_certificate;
use crate::worth::Concept;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    File(PathBuf),
    Generator(GameSpec),
}

impl Source {
    pub fn load(&self) -> Result<FiniteGame> {
        match self {
            Source::File(path) => read_game_file(path),
            Source::Generator(spec) => spec.build(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Source::File(path) => json!({"file": path.display().to_string()}),
            Source::Generator(spec) => spec.to_json(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Outputs {
    pub core: bool,
    pub profile_core: bool,
    pub certificate: bool,
    pub nash: bool,
    pub social_optima: bool,
}

impl Outputs {
    fn any(&self) -> bool {
        self.core || self.profile_core || self.certificate || self.nash || self.social_optima
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisRequest {
    pub source: Source,
    pub functions: Vec<Concept>,
    pub outputs: Outputs,
    pub settings: Settings,
    /// Substitute `lambda-gen` for `lambda` when the reduction property fails.
    pub allow_gen_fallback: bool,
}

impl AnalysisRequest {
    pub fn validate(&self) -> Result<()> {
        self.settings.validate()?;
        if self.functions.is_empty() && !self.outputs.any() {
            return Err(GameError::InvalidSettings(
                "request at least one characteristic function or output".into(),
            ));
        }
        Ok(())
    }

    /// Requested functions in canonical order without duplicates.
    fn functions(&self) -> Vec<Concept> {
        let mut fs = self.functions.clone();
        fs.sort();
        fs.dedup();
        fs
    }
}

fn profiles_json(profiles: &[Profile]) -> Value {
    json!(profiles)
}

/// Loads the source and runs every requested computation.
pub fn analyze(request: &AnalysisRequest) -> Result<Value> {
    request.validate()?;
    let game = request.source.load()?;
    analyze_game(&game, request)
}

pub fn analyze_game(game: &FiniteGame, request: &AnalysisRequest) -> Result<Value> {
    request.validate()?;
    let settings = &request.settings;
    settings.check_game(game)?;
    let mut warnings: Vec<String> = Vec::new();
    let mut functions = request.functions();
    let wants_profile_core = request.outputs.profile_core;
    if wants_profile_core && !functions.contains(&Concept::LambdaGeneralised) {
        functions.push(Concept::LambdaGeneralised);
        functions.sort();
    }

    let mut charfns: Vec<(Concept, CharFn)> = Vec::with_capacity(functions.len());
    for &concept in &functions {
        let v = match concept.compute(game, settings) {
            Err(GameError::SrpViolation(w))
                if concept == Concept::Lambda && request.allow_gen_fallback =>
            {
                warnings.push(format!(
                    "lambda replaced by lambda-gen: strong reduction property violated ({w})"
                ));
                Concept::LambdaGeneralised.compute(game, settings)?
            }
            other => other?,
        };
        charfns.push((concept, v));
    }

    let mut report = Map::new();
    report.insert("schema".into(), json!(SCHEMA_VERSION));
    report.insert("source".into(), request.source.to_json());
    report.insert("players".into(), json!(game.n()));
    report.insert(
        "strategy_counts".into(),
        json!((0..game.n()).map(|p| game.strategy_count(p)).collect::<Vec<_>>()),
    );
    report.insert("epsilon".into(), json!(settings.epsilon));

    let mut fn_block = Map::new();
    for (concept, v) in &charfns {
        if request.functions.contains(concept) {
            fn_block.insert(concept.name().into(), serde_json::to_value(v).expect("serializable"));
        }
    }
    report.insert("functions".into(), Value::Object(fn_block));

    if request.outputs.core || wants_profile_core {
        let mut cores = Map::new();
        for (concept, v) in &charfns {
            let is_gen = *concept == Concept::LambdaGeneralised;
            let listed = request.functions.contains(concept);
            if !(request.outputs.core && listed) && !(wants_profile_core && is_gen) {
                continue;
            }
            let cr = core_nonempty(v, settings)?;
            let pc = if wants_profile_core && is_gen {
                Some(profile_core(game, v, settings)?)
            } else {
                None
            };
            cores.insert(concept.name().into(), cr.to_json(pc.as_deref()));
        }
        report.insert("cores".into(), Value::Object(cores));
    }

    if request.outputs.nash {
        report.insert("nash".into(), profiles_json(&enumerate_nash(game, settings)?));
    }
    if request.outputs.social_optima {
        let so = social_optima(game, settings)?;
        report.insert(
            "social_optima".into(),
            json!({"value": so.value, "profiles": so.argmax}),
        );
    }
    if request.outputs.certificate {
        report.insert("certificate".into(), theorem1_certificate(game, settings)?.to_json());
    }
    if wants_profile_core && matches!(request.source, Source::Generator(GameSpec::Gamma4 { .. })) {
        warnings.push(GAMMA4_NOTE.into());
    }
    report.insert("warnings".into(), json!(warnings));
    Ok(Value::Object(report))
}

/// Pretty JSON with a trailing newline; key order is insertion order.
pub fn render(report: &Value) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report values are serializable");
    s.push('\n');
    s
}

pub fn certify(game: &FiniteGame, source: &Source, settings: &Settings) -> Result<Value> {
    let cert = theorem1_certificate(game, settings)?;
    Ok(json!({
        "schema": SCHEMA_VERSION,
        "source": source.to_json(),
        "certificate": cert.to_json(),
    }))
}

const GAMMA4_NOTE: &str = "profile core differs from the example's original discussion: \
the only core profile is the social optimum (1, 1/2), which is not a Nash equilibrium; \
the Nash equilibria (0, a2) with a2 >= 1/2 pay (0, 0) and are blocked by player 2";

/// Where an expected value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// Stated with the worked example.
    Reference,
    /// Derived independently by hand and by the brute-force oracle.
    Computed,
}

impl Basis {
    pub fn as_str(self) -> &'static str {
        match self {
            Basis::Reference => "reference",
            Basis::Computed => "computed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub expected: Value,
    pub actual: Value,
    pub basis: Basis,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reproduction {
    pub example: String,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl Reproduction {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA_VERSION,
            "example": self.example,
            "checks": self.checks.iter().map(|c| json!({
                "check": c.name,
                "expected": c.expected,
                "actual": c.actual,
                "basis": c.basis.as_str(),
                "pass": c.pass,
            })).collect::<Vec<_>>(),
            "notes": self.notes,
            "pass": self.pass(),
        })
    }

    /// Fixed-width pass/fail table.
    pub fn table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
        let mut out = String::new();
        let _ = writeln!(out, "{:<6} {:<width$} {:<9} expected => actual", "result", "check", "basis");
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{:<6} {:<width$} {:<9} {} => {}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.basis.as_str(),
                c.expected,
                c.actual
            );
        }
        for note in &self.notes {
            let _ = writeln!(out, "note: {note}");
        }
        let _ = writeln!(out, "{}: {}", self.example, if self.pass() { "PASS" } else { "FAIL" });
        out
    }
}

struct Checks {
    epsilon: f64,
    list: Vec<Check>,
}

impl Checks {
    fn push(&mut self, name: impl Into<String>, expected: Value, actual: Value, basis: Basis, pass: bool) {
        self.list.push(Check {
            name: name.into(),
            expected,
            actual,
            basis,
            pass,
        });
    }

    fn number(&mut self, name: impl Into<String>, expected: f64, actual: f64, basis: Basis) {
        let pass = (expected - actual).abs() <= self.epsilon;
        self.push(name, json!(expected), crate::charfn::worth_to_json(actual), basis, pass);
    }

    fn flag(&mut self, name: impl Into<String>, expected: bool, actual: bool, basis: Basis) {
        self.push(name, json!(expected), json!(actual), basis, expected == actual);
    }

    fn text(&mut self, name: impl Into<String>, expected: &str, actual: &str, basis: Basis) {
        self.push(name, json!(expected), json!(actual), basis, expected == actual);
    }

    fn labels(&mut self, name: impl Into<String>, expected: Vec<Vec<f64>>, actual: Vec<Vec<f64>>, basis: Basis) {
        let pass = expected.len() == actual.len()
            && expected.iter().zip(&actual).all(|(e, a)| {
                e.len() == a.len() && e.iter().zip(a).all(|(x, y)| (x - y).abs() <= self.epsilon)
            });
        self.push(name, json!(expected), json!(actual), basis, pass);
    }
}

fn labels_of(game: &FiniteGame, profiles: &[Profile]) -> Vec<Vec<f64>> {
    profiles
        .iter()
        .map(|p| p.indices().iter().enumerate().map(|(j, &k)| game.grid(j).label(k)).collect())
        .collect()
}

fn coalition_name(c: Coalition) -> String {
    format!("v{c}")
}

/// Example ids accepted by [`reproduce`].
pub const EXAMPLES: [&str; 4] = ["gamma1", "gamma2", "status", "gamma4"];

/// Runs the full pipeline on a worked example and compares against known values.
pub fn reproduce(example: &str, grid_points: usize, n: usize, settings: &Settings) -> Result<Reproduction> {
    let spec = match example {
        "gamma1" | "gamma2" | "gamma4" => GameSpec::from_parts(example, grid_points, None, 0, None)?,
        "status" => GameSpec::Status { n, grid_points },
        other => {
            return Err(GameError::InvalidSettings(format!(
                "unknown example {other:?} (expected one of {})",
                EXAMPLES.join(", ")
            )))
        }
    };
    let game = spec.build()?;
    settings.check_game(&game)?;
    let mut checks = Checks {
        epsilon: settings.epsilon,
        list: Vec::new(),
    };
    let mut notes = Vec::new();
    let v = Concept::LambdaGeneralised.compute(&game, settings)?;
    let core = core_nonempty(&v, settings)?;
    let pcore = profile_core(&game, &v, settings)?;
    let one = Coalition::singleton(0);
    let two = Coalition::singleton(1);
    let grand = game.grand();

    match example {
        "gamma1" => {
            for c in [one, two, grand] {
                checks.number(coalition_name(c), 0.25, v.worth(c), Basis::Reference);
            }
            checks.flag("allocation core nonempty", false, core.nonempty, Basis::Reference);
            checks.labels("profile core", vec![], labels_of(&game, &pcore), Basis::Reference);
            let cert = theorem1_certificate(&game, settings)?;
            checks.text("certificate", "not-applicable", cert.conclusion().as_str(), Basis::Reference);
            checks.text("certificate reason", "not separable", cert.reason().unwrap_or(""), Basis::Reference);
        }
        "gamma2" => {
            checks.number(coalition_name(one), 1.0, v.worth(one), Basis::Reference);
            checks.number(coalition_name(two), -1.0, v.worth(two), Basis::Reference);
            checks.number(coalition_name(grand), 0.25, v.worth(grand), Basis::Reference);
            let nash = enumerate_nash(&game, settings)?;
            checks.labels("nash equilibria", vec![vec![1.0, 0.0]], labels_of(&game, &nash), Basis::Reference);
            let so = social_optima(&game, settings)?;
            checks.labels("social optima", vec![vec![0.5, 0.0]], labels_of(&game, &so.argmax), Basis::Reference);
            checks.labels("profile core", vec![], labels_of(&game, &pcore), Basis::Reference);
            checks.flag("allocation core nonempty", true, core.nonempty, Basis::Computed);
            let cert = theorem1_certificate(&game, settings)?;
            checks.text("certificate", "not-applicable", cert.conclusion().as_str(), Basis::Reference);
            checks.text(
                "certificate reason",
                "no socially optimal Nash equilibrium",
                cert.reason().unwrap_or(""),
                Basis::Reference,
            );
        }
        "status" => {
            let nash = enumerate_nash(&game, settings)?;
            checks.push(
                "nash equilibrium count",
                json!(1u64 << n),
                json!(nash.len()),
                Basis::Reference,
                nash.len() == 1 << n,
            );
            let mismatched: Vec<String> = Coalition::all(n)
                .filter(|&c| (v.worth(c) - c.len() as f64).abs() > settings.epsilon)
                .map(|c| c.to_string())
                .collect();
            checks.push(
                "v(S) = |S| for every S",
                json!([]),
                json!(mismatched),
                Basis::Reference,
                mismatched.is_empty(),
            );
            checks.flag("constant sum", true, is_constant_sum(&v, settings.epsilon), Basis::Reference);
            checks.labels("profile core", vec![vec![1.0; n]], labels_of(&game, &pcore), Basis::Reference);
            checks.flag("allocation core nonempty", true, core.nonempty, Basis::Computed);
            let cert = theorem1_certificate(&game, settings)?;
            checks.text("certificate", "guaranteed-nonempty", cert.conclusion().as_str(), Basis::Reference);
        }
        "gamma4" => {
            checks.number(coalition_name(one), 0.0, v.worth(one), Basis::Reference);
            checks.number(coalition_name(two), 0.5, v.worth(two), Basis::Reference);
            checks.number(coalition_name(grand), 0.5, v.worth(grand), Basis::Reference);
            let extent = core_extent(&v, settings)?;
            let point = extent.as_ref().map(|e| {
                e.iter().map(|&(lo, hi)| json!([lo, hi])).collect::<Vec<_>>()
            });
            let is_point = extent.as_ref().is_some_and(|e| {
                let target = [0.0, 0.5];
                e.iter()
                    .zip(target)
                    .all(|(&(lo, hi), t)| (lo - t).abs() <= settings.epsilon && (hi - t).abs() <= settings.epsilon)
            });
            checks.push(
                "allocation core is the point (0, 0.5)",
                json!([[0.0, 0.0], [0.5, 0.5]]),
                json!(point),
                Basis::Reference,
                is_point,
            );
            let srp = check_srp(&game, settings)?;
            checks.flag("strong reduction property holds", false, srp.holds(), Basis::Reference);
            if let SrpVerdict::Violated(w) = &srp {
                notes.push(format!("first reduction violation: {w}"));
            }
            checks.labels("profile core", vec![vec![1.0, 0.5]], labels_of(&game, &pcore), Basis::Computed);
            notes.push(GAMMA4_NOTE.into());
        }
        _ => unreachable!("example id validated above"),
    }

    Ok(Reproduction {
        example: spec.to_string(),
        checks: checks.list,
        notes,
    })
}
