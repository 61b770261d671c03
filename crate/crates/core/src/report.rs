//! Command drivers behind the `gealab` binary and their reports.
//!
//! Every command returns an [`Outcome`]: a JSON report with sorted keys and
//! floats rounded to 12 significant digits, plus a pass flag. Equal configs
//! give byte-identical JSON. Exit codes: 0 pass, 1 failed property, 2 usage
//! or config error.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::convergence::{
    chain_by_id, default_candidates, grid_chain, join_in_family, join_obstruction_vf, meet_in_family,
    monotone_steps, pointwise_limit, shifted_chain, sigma_report, ChainOrder, ChainTerms, Direction, FormChain,
    Param, SampleConfig, DEFAULT_N_MAX,
};
use crate::form::catalog::{boundary_form, energy_form, robin_form};
use crate::form::{parse_rational, reg_sing_split, FormSpec, Rational};
use crate::forms_gea::{
    oplus, oplus_bar, preceq, FamilyId, FormsGea, OperatorGea, OpVariant, OrderProbe, SaGea,
};
use crate::hilbert::Model;
use crate::instances::{
    even_gap_demo, make_half_open_gea, make_interval_ea, BrokenMax, ConeGea, EvenGapGea, NatGea,
};
use crate::kernel::{check_axioms, is_sub_gea_on_pairs, CheckStrategy, PartialAlgebra};

pub const SCHEMA: &str = "gealab/1";
pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_SAMPLES: usize = 2000;
pub const DEFAULT_CAP: i64 = 50;

pub const COUNTEREXAMPLES: [&str; 5] = ["even-gap-subset", "regular-sum", "diag-dominators", "kato-inf", "bar-inf"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

impl FromStr for Format {
    type Err = UsageError;
    fn from_str(s: &str) -> Result<Format, UsageError> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            _ => Err(UsageError::BadValue {
                flag: "format",
                value: s.into(),
            }),
        }
    }
}

#[derive(Debug, Error)]
pub enum UsageError {
    #[error("unknown instance {0:?}")]
    UnknownInstance(String),
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
    #[error("unknown counterexample {0:?}; expected one of {list}", list = COUNTEREXAMPLES.join(", "))]
    UnknownCounterexample(String),
    #[error("invalid value {value:?} for --{flag}")]
    BadValue { flag: &'static str, value: String },
    #[error("invalid chain config: {0}")]
    BadConfig(String),
    #[error("give exactly one of --instance and --family")]
    Selector,
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

/// Shared options of all commands. `None` picks the command default.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub instance: Option<String>,
    pub family: Option<String>,
    pub chain: Option<String>,
    pub order: Option<String>,
    pub n_max: Option<usize>,
    pub levels: Option<Vec<usize>>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub cap: Option<i64>,
    pub model: Option<Model>,
    pub format: Format,
}

impl RunConfig {
    fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    fn samples(&self) -> usize {
        self.samples.unwrap_or(DEFAULT_SAMPLES)
    }

    fn cap(&self) -> i64 {
        self.cap.unwrap_or(DEFAULT_CAP)
    }

    fn n_max(&self) -> usize {
        self.n_max.unwrap_or(DEFAULT_N_MAX)
    }

    /// Default probe, with `--levels` applied to `model` and `--tol`.
    fn probe(&self, model: Model) -> OrderProbe {
        let mut p = OrderProbe::default();
        if let Some(levels) = &self.levels {
            p = p.with_levels(model, levels.clone());
        }
        if let Some(tol) = self.tol {
            p.tol = tol;
        }
        p
    }

    fn to_json(&self) -> Value {
        json!({
            "cap": self.cap,
            "chain": self.chain,
            "family": self.family,
            "instance": self.instance,
            "levels": self.levels,
            "model": self.model,
            "n_max": self.n_max,
            "order": self.order,
            "samples": self.samples,
            "seed": self.seed(),
            "tol": self.tol,
        })
    }
}

/// Parses a comma-separated level list.
pub fn parse_levels(s: &str) -> Result<Vec<usize>, UsageError> {
    s.split(',')
        .map(|p| p.trim().parse::<usize>().ok().filter(|&l| l > 0))
        .collect::<Option<Vec<_>>>()
        .filter(|v| !v.is_empty())
        .ok_or_else(|| UsageError::BadValue {
            flag: "levels",
            value: s.into(),
        })
}

pub fn parse_model(s: &str) -> Result<Model, UsageError> {
    match s {
        "sequence" | "seq" => Ok(Model::Sequence),
        "grid" => Ok(Model::Grid),
        _ => Err(UsageError::BadValue {
            flag: "model",
            value: s.into(),
        }),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub command: &'static str,
    pub pass: bool,
    pub report: Value,
}

impl Outcome {
    fn new(command: &'static str, config: &RunConfig, pass: bool, body: Value) -> Outcome {
        let report = round_floats(json!({
            "schema": SCHEMA,
            "command": command,
            "config": config.to_json(),
            "pass": pass,
            "report": body,
        }));
        Outcome { command, pass, report }
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("report is valid JSON");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Text => render_text(self),
        }
    }
}

/// Rounds a float to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Applies [`round12`] to every float in `v`.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n
            .as_f64()
            .map(|x| Value::from(round12(x)))
            .unwrap_or(Value::Number(n)),
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_floats(v))).collect()),
        other => other,
    }
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report types serialize")
}

fn axioms_json<A>(alg: &A, target: &str, model: Option<Model>, strategy: CheckStrategy) -> Value
where
    A: PartialAlgebra,
    A::Elem: Serialize,
{
    match check_axioms(alg, strategy) {
        Ok(report) => {
            let verdicts: Map<String, Value> = report
                .verdicts
                .iter()
                .map(|(axiom, v)| (axiom.label().to_string(), to_value(v)))
                .collect();
            json!({
                "target": target,
                "model": model,
                "mode": report.mode,
                "samples_tested": report.samples_tested,
                "verdicts": verdicts,
                "pass": report.all_pass(),
            })
        }
        Err(e) => json!({ "target": target, "model": model, "error": e.to_string(), "pass": false }),
    }
}

fn parse_vector(s: &str, what: &str) -> Result<Vec<i64>, UsageError> {
    s.split(',')
        .map(|p| p.trim().parse::<i64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| UsageError::UnknownInstance(what.into()))
}

fn instance_axioms(id: &str, cfg: &RunConfig) -> Result<Vec<Value>, UsageError> {
    let strategy = CheckStrategy::Sampled {
        n: cfg.samples(),
        seed: cfg.seed(),
    };
    let cap = cfg.cap();
    let bad = || UsageError::UnknownInstance(id.into());
    let one = match id {
        "zplus" => axioms_json(&NatGea { cap }, id, None, strategy),
        "even-gap" => axioms_json(&EvenGapGea { cap }, id, None, strategy),
        "broken-max" => axioms_json(&BrokenMax { cap }, id, None, strategy),
        "cone2" => axioms_json(&ConeGea { cap: [cap, cap] }, id, None, strategy),
        _ => {
            let (kind, arg) = id.split_once(':').ok_or_else(bad)?;
            let v = parse_vector(arg, id)?;
            match (kind, v.as_slice()) {
                ("interval", [u]) => axioms_json(&make_interval_ea(*u).map_err(|_| bad())?, id, None, strategy),
                ("interval", [a, b]) => {
                    axioms_json(&make_interval_ea([*a, *b]).map_err(|_| bad())?, id, None, strategy)
                }
                ("half-open", [u]) => axioms_json(&make_half_open_gea(*u).map_err(|_| bad())?, id, None, strategy),
                ("half-open", [a, b]) => {
                    axioms_json(&make_half_open_gea([*a, *b]).map_err(|_| bad())?, id, None, strategy)
                }
                _ => return Err(bad()),
            }
        }
    };
    Ok(vec![one])
}

fn family_axioms(id: &str, cfg: &RunConfig) -> Result<Vec<Value>, UsageError> {
    let strategy = CheckStrategy::Sampled {
        n: cfg.samples(),
        seed: cfg.seed(),
    };
    let models = match cfg.model {
        Some(m) => vec![m],
        None => vec![Model::Sequence, Model::Grid],
    };
    let mut out = Vec::new();
    for model in models {
        match id {
            "sa" => out.push(axioms_json(&SaGea { model }, id, Some(model), strategy)),
            "operators" => out.push(axioms_json(&OperatorGea { model }, id, Some(model), strategy)),
            _ => {
                if let Ok(gea) = FormsGea::parse(id, model) {
                    out.push(axioms_json(&gea, id, Some(model), strategy));
                }
            }
        }
    }
    if out.is_empty() {
        return Err(UsageError::UnknownFamily(id.into()));
    }
    Ok(out)
}

/// Checks the axioms of an instance (`zplus`, `even-gap`, `broken-max`,
/// `cone2`, `interval:<u>`, `half-open:<u>`, with `<u>` an integer or an
/// integer pair) or a form family (`vf`, `vf-bar`, `bf`, `rf`, `sf`, `gf`,
/// `cf`, `vfd:<tag>`, `sa`, `operators`).
pub fn cmd_axioms(cfg: &RunConfig) -> Result<Outcome, UsageError> {
    let results = match (&cfg.instance, &cfg.family) {
        (Some(i), None) => instance_axioms(i, cfg)?,
        (None, Some(f)) => family_axioms(f, cfg)?,
        _ => return Err(UsageError::Selector),
    };
    let pass = results.iter().all(|r| r["pass"] == Value::Bool(true));
    Ok(Outcome::new(
        "axioms",
        cfg,
        pass,
        json!({ "seed": cfg.seed(), "results": results }),
    ))
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    expected: Value,
    observed: Value,
    holds: bool,
}

fn check<E: Serialize, O: Serialize>(name: &'static str, expected: E, observed: O) -> Check {
    let (expected, observed) = (round_floats(to_value(&expected)), round_floats(to_value(&observed)));
    Check {
        name,
        holds: expected == observed,
        expected,
        observed,
    }
}

fn regularity(t: &FormSpec) -> &'static str {
    match reg_sing_split(t) {
        Ok((_, s)) if s.is_zero() => "regular",
        Ok((r, _)) if r.is_zero() => "singular",
        Ok(_) => "mixed",
        Err(_) => "unknown",
    }
}

fn obstruction(first: &FormSpec, second: &FormSpec) -> Value {
    json!({
        "verdict": "obstruction",
        "first": first,
        "second": second,
        "first_le_second": false,
        "second_le_first": false,
    })
}

fn counterexample_checks(name: &str, cfg: &RunConfig) -> Result<(Vec<Check>, Value), UsageError> {
    let grid_probe = cfg.probe(Model::Grid);
    let n_max = cfg.n_max();
    let conv = |e: crate::convergence::ConvergenceError| UsageError::BadConfig(e.to_string());
    Ok(match name {
        "even-gap-subset" => {
            let r = even_gap_demo(cfg.cap()).map_err(|e| UsageError::BadConfig(e.to_string()))?;
            let checks = vec![
                check("base_axioms_pass", true, r.base_axioms_pass),
                check("subset_axioms_pass", true, r.subset_axioms_pass),
                check("is_sub_gea", false, r.is_sub_gea),
                check("certificate", json!({"kind": "triple", "x": 4, "y": 2, "z": 6}), &r.violation),
                check("four_le_six_in_base", true, r.le_in_base),
                check("four_le_six_in_subset", false, r.le_in_subset),
            ];
            (checks, to_value(&r))
        }
        "regular-sum" => {
            let (tp, t0, t1) = (energy_form(), boundary_form(), robin_form());
            let sum = oplus(&tp, &t0);
            let split = sum.as_ref().map(|s| reg_sing_split(s).ok());
            let parts = match (reg_sing_split(&tp), reg_sing_split(&t0)) {
                (Ok((a, _)), Ok((b, _))) => oplus(&a, &b),
                _ => None,
            };
            let vf = FormsGea::new(FamilyId::Vf, OpVariant::Plain, Model::Grid);
            let rf = is_sub_gea_on_pairs(&vf, |t: &FormSpec| FamilyId::Rf.contains(t), [(tp.clone(), t0.clone())]);
            let checks = vec![
                check("sum", &t1, &sum),
                check("tags", ["regular", "singular", "regular"], [regularity(&tp), regularity(&t0), regularity(&t1)]),
                check("split_of_sum", json!([&t1, FormSpec::zero(Model::Grid)]), split),
                check("sum_of_regular_parts", &tp, parts),
                check("bar_sum_defined", false, oplus_bar(&tp, &t0).is_some()),
                check("energy_prec_robin", true, preceq(&tp, &t1, &grid_probe).unwrap_or(false)),
                check("robin_prec_energy", false, preceq(&t1, &tp, &grid_probe).unwrap_or(true)),
                check(
                    "regular_family_closure",
                    json!({"kind": "triple", "x": &tp, "y": &t0, "z": &t1}),
                    &rf.violation,
                ),
            ];
            (checks, json!({ "energy": tp, "boundary": t0, "robin": t1 }))
        }
        "diag-dominators" => {
            let probe = cfg.probe(Model::Sequence);
            let r = join_obstruction_vf(n_max, Rational::from_integer(1), &probe).map_err(conv)?;
            let checks = vec![
                check("dominates", [true, true], &r.dominates),
                check("incomparable", true, r.incomparable),
                check("maximal_prec_restriction", true, r.maximal_prec_restriction),
                check("verdict", obstruction(&r.dominators[0], &r.dominators[1]), &r.verdict),
            ];
            (checks, to_value(&r))
        }
        "kato-inf" | "bar-inf" => {
            let order = if name == "kato-inf" {
                ChainOrder::Family(FamilyId::Cf)
            } else {
                ChainOrder::Bar
            };
            let chain = shifted_chain().with_order(order.clone());
            let r = meet_in_family(&chain, &order.family(), &default_candidates(&chain, n_max), n_max, &grid_probe)
                .map_err(conv)?;
            let checks = vec![check("verdict", obstruction(&robin_form(), &energy_form()), &r.verdict)];
            (checks, to_value(&r))
        }
        _ => return Err(UsageError::UnknownCounterexample(name.into())),
    })
}

/// Reproduces one of the pinned counterexamples ([`COUNTEREXAMPLES`]).
pub fn cmd_counterexample(name: &str, cfg: &RunConfig) -> Result<Outcome, UsageError> {
    let (checks, witnesses) = counterexample_checks(name, cfg)?;
    let pass = checks.iter().all(|c| c.holds);
    Ok(Outcome::new(
        "counterexample",
        cfg,
        pass,
        json!({ "name": name, "checks": checks, "witnesses": witnesses }),
    ))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum ChainSelector {
    Named(String),
    Grid { grid: GridParams },
}

#[derive(Debug, Clone, Deserialize)]
struct GridParams {
    c: [String; 2],
    #[serde(default = "zero_param")]
    alpha: [String; 2],
    #[serde(default = "zero_param")]
    beta: [String; 2],
    #[serde(default)]
    direction: Option<String>,
}

fn zero_param() -> [String; 2] {
    ["0".into(), "0".into()]
}

/// Chain config JSON: `{"chain": <id> | {"grid": {...}}, "order", "n_max",
/// "levels", "seed"}`. A grid chain lists each parameter as `[base, slope]`
/// for `base + slope/n`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    chain: ChainSelector,
    #[serde(default)]
    order: Option<String>,
    #[serde(default)]
    n_max: Option<usize>,
    #[serde(default)]
    levels: Option<Vec<usize>>,
    #[serde(default)]
    seed: Option<u64>,
}

fn param(p: &[String; 2]) -> Result<Param, UsageError> {
    let r = |s: &str| parse_rational(s).map_err(|e| UsageError::BadConfig(e.to_string()));
    Ok(Param::new(r(&p[0])?, r(&p[1])?))
}

fn build_chain(sel: &ChainSelector) -> Result<FormChain, UsageError> {
    match sel {
        ChainSelector::Named(id) => chain_by_id(id).map_err(|e| UsageError::BadConfig(e.to_string())),
        ChainSelector::Grid { grid } => {
            let (c, a, b) = (param(&grid.c)?, param(&grid.alpha)?, param(&grid.beta)?);
            let slopes = [c.slope, a.slope, b.slope];
            let zero = Rational::from_integer(0);
            let direction = match grid.direction.as_deref() {
                Some(d) => Direction::parse(d).ok_or_else(|| UsageError::BadConfig(format!("direction {d:?}")))?,
                None if slopes.iter().all(|s| *s >= zero) => Direction::Descending,
                None if slopes.iter().all(|s| *s <= zero) => Direction::Ascending,
                None => return Err(UsageError::BadConfig("mixed slopes need an explicit direction".into())),
            };
            grid_chain("custom", c, a, b, direction, ChainOrder::Oplus).map_err(|e| UsageError::BadConfig(e.to_string()))
        }
    }
}

/// Resolves `--chain`: a chain id, inline JSON, or a path to a JSON file.
pub fn resolve_chain(cfg: &RunConfig) -> Result<(FormChain, RunConfig), UsageError> {
    let spec = cfg.chain.clone().unwrap_or_else(|| "kato".into());
    let text = if spec.trim_start().starts_with('{') {
        Some(spec.clone())
    } else if spec.ends_with(".json") {
        Some(std::fs::read_to_string(Path::new(&spec))?)
    } else {
        None
    };
    let mut cfg = cfg.clone();
    let chain = match text {
        Some(t) => {
            let c: ChainConfig = serde_json::from_str(&t).map_err(|e| UsageError::BadConfig(e.to_string()))?;
            cfg.order = cfg.order.or(c.order);
            cfg.n_max = cfg.n_max.or(c.n_max);
            cfg.levels = cfg.levels.or(c.levels);
            cfg.seed = cfg.seed.or(c.seed);
            build_chain(&c.chain)?
        }
        None => build_chain(&ChainSelector::Named(spec))?,
    };
    let chain = match &cfg.order {
        Some(o) => chain.with_order(ChainOrder::parse(o).map_err(|e| UsageError::BadConfig(e.to_string()))?),
        None => chain,
    };
    Ok((chain, cfg))
}

/// Monotonicity, pointwise limit, and meet or join of one chain.
pub fn cmd_chain(cfg: &RunConfig) -> Result<Outcome, UsageError> {
    let (chain, cfg) = resolve_chain(cfg)?;
    let model = chain.model();
    let n_max = cfg.n_max();
    let levels = cfg.levels.clone().unwrap_or_else(|| model.default_levels());
    let probe = cfg.probe(model);
    let family = match &cfg.family {
        Some(f) => FamilyId::parse(f).map_err(|_| UsageError::UnknownFamily(f.clone()))?,
        None => chain.order.family(),
    };
    let bad = |e: crate::convergence::ConvergenceError| UsageError::BadConfig(e.to_string());
    let steps = monotone_steps(&chain, n_max, &probe).map_err(bad)?;
    let violation = steps.iter().find(|s| !s.holds).map(|s| s.n);
    let mut body = json!({
        "chain": chain.id,
        "order": chain.order,
        "family": family.id(),
        "direction": chain.direction,
        "n_max": n_max,
        "levels": levels,
        "steps": steps,
        "monotone": violation.is_none(),
    });
    let mut pass = violation.is_none();
    if let Some(n) = violation {
        body["witness"] = json!({
            "n": n,
            "first": chain.term(n).map_err(bad)?,
            "second": chain.term(n + 1).map_err(bad)?,
        });
    } else {
        let samples = SampleConfig {
            seed: cfg.seed(),
            ..SampleConfig::default()
        };
        match pointwise_limit(&chain, n_max, &levels, &samples) {
            Ok(limit) => {
                pass &= limit.identity_holds && limit.values_monotone && limit.operator_gaps_decreasing != Some(false);
                body["convergence"] = to_value(&limit);
            }
            Err(e) => body["convergence"] = json!({ "error": e.to_string() }),
        }
        let candidates = default_candidates(&chain, n_max);
        let bound = match chain.direction {
            Direction::Descending => meet_in_family(&chain, &family, &candidates, n_max, &probe),
            Direction::Ascending => join_in_family(&chain, &family, &candidates, n_max, &probe),
        };
        body["bound"] = to_value(&bound.map_err(bad)?);
        if matches!(chain.terms, ChainTerms::Truncated) && chain.order == ChainOrder::Oplus {
            let d = join_obstruction_vf(n_max, Rational::from_integer(1), &probe).map_err(bad)?;
            body["dominators"] = to_value(&d);
        }
    }
    Ok(Outcome::new("chain", &cfg, pass, body))
}

/// Meets and joins across all families.
pub fn cmd_sigma(cfg: &RunConfig) -> Result<Outcome, UsageError> {
    let probe = cfg.probe(cfg.model.unwrap_or(Model::Grid));
    let report = sigma_report(cfg.n_max(), &probe).map_err(|e| UsageError::BadConfig(e.to_string()))?;
    Ok(Outcome::new("sigma", cfg, report.all_match, to_value(&report)))
}

fn form_text(v: &Value) -> String {
    FormSpec::from_json_value(v)
        .map(|t| t.to_string())
        .unwrap_or_else(|_| v.to_string())
}

fn verdict_text(v: &Value) -> String {
    match v["verdict"].as_str() {
        Some("found") => format!("found {}", form_text(&v["element"])),
        Some("obstruction") => format!(
            "obstruction ({}, {})",
            form_text(&v["first"]),
            form_text(&v["second"])
        ),
        Some(other) => other.to_string(),
        None => v.to_string(),
    }
}

fn mark(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn render_text(o: &Outcome) -> String {
    let r = &o.report["report"];
    let mut s = String::new();
    let status = if o.pass { "PASS" } else { "FAIL" };
    let _ = writeln!(s, "gealab {}: {status}", o.command);
    match o.command {
        "axioms" => {
            for res in r["results"].as_array().into_iter().flatten() {
                let model = res["model"].as_str().map(|m| format!(" [{m}]")).unwrap_or_default();
                let _ = write!(
                    s,
                    "  {}{model} {} ({} tuples):",
                    res["target"].as_str().unwrap_or("?"),
                    res["mode"]["mode"].as_str().unwrap_or("?"),
                    res["samples_tested"]
                );
                if let Some(e) = res["error"].as_str() {
                    let _ = write!(s, " error: {e}");
                }
                for (axiom, v) in res["verdicts"].as_object().into_iter().flatten() {
                    let verdict = v["verdict"].as_str().unwrap_or("?");
                    let _ = write!(s, " {axiom} {verdict}");
                    if verdict == "fail" {
                        let _ = write!(s, " {}", v["witness"]);
                    }
                }
                s.push('\n');
            }
        }
        "counterexample" => {
            let _ = writeln!(s, "  {}", r["name"].as_str().unwrap_or("?"));
            for c in r["checks"].as_array().into_iter().flatten() {
                let ok = c["holds"] == Value::Bool(true);
                let _ = write!(s, "  [{}] {}", if ok { "ok" } else { "FAIL" }, c["name"].as_str().unwrap_or("?"));
                if !ok {
                    let _ = write!(s, ": expected {}, observed {}", c["expected"], c["observed"]);
                }
                s.push('\n');
            }
        }
        "chain" => {
            let _ = writeln!(
                s,
                "  chain {} ({}, order {}, family {}), n_max {}",
                r["chain"].as_str().unwrap_or("?"),
                r["direction"].as_str().unwrap_or("?"),
                r["order"].as_str().unwrap_or("?"),
                r["family"].as_str().unwrap_or("?"),
                r["n_max"]
            );
            let _ = writeln!(s, "  monotone: {}", mark(r["monotone"] == Value::Bool(true)));
            if !r["witness"].is_null() {
                let w = &r["witness"];
                let _ = writeln!(s, "  step n = {}: {} vs {}", w["n"], form_text(&w["first"]), form_text(&w["second"]));
            }
            let c = &r["convergence"];
            if let Some(e) = c["error"].as_str() {
                let _ = writeln!(s, "  limit: {e}");
            } else if !c.is_null() {
                let _ = writeln!(s, "  limit: {}", form_text(&c["limit"]));
                let _ = writeln!(
                    s,
                    "  gap identity: max relative error {} ({})",
                    c["identity_max_rel_err"],
                    mark(c["identity_holds"] == Value::Bool(true))
                );
                let _ = writeln!(s, "  values monotone in n: {}", mark(c["values_monotone"] == Value::Bool(true)));
                let _ = writeln!(s, "  {:>4} {:>6} {:>12} {:>20} {:>20}", "n", "level", "sample", "t_n(u,u)", "gap");
                for row in c["rows"].as_array().into_iter().flatten() {
                    let n = row["n"].as_u64().unwrap_or(0);
                    if n.is_power_of_two() {
                        let _ = writeln!(
                            s,
                            "  {:>4} {:>6} {:>12} {:>20} {:>20}",
                            n,
                            row["level"].to_string(),
                            row["sample"].as_str().unwrap_or("?"),
                            row["value"].to_string(),
                            row["gap"].to_string()
                        );
                    }
                }
            }
            if !r["bound"].is_null() {
                let b = &r["bound"];
                let _ = writeln!(
                    s,
                    "  {} over {} candidates: {}",
                    b["kind"].as_str().unwrap_or("?"),
                    b["candidates_scanned"],
                    verdict_text(&b["verdict"])
                );
            }
            if !r["dominators"].is_null() {
                let d = &r["dominators"];
                let names: Vec<String> = d["dominators"].as_array().into_iter().flatten().map(form_text).collect();
                let _ = writeln!(
                    s,
                    "  dominators {}: dominate {}, incomparable {}",
                    names.join(" and "),
                    d["dominates"],
                    mark(d["incomparable"] == Value::Bool(true))
                );
            }
        }
        "sigma" => {
            let _ = writeln!(s, "  {:<10} {:<8} {:<6} {:<8} {:<8} {}", "family", "order", "dir", "expect", "observe", "evidence");
            for row in r["rows"].as_array().into_iter().flatten() {
                for cell in row["cells"].as_array().into_iter().flatten() {
                    let ev = &cell["evidence"];
                    let evidence = match ev["kind"].as_str() {
                        Some("meet" | "join" | "dominators") => verdict_text(&ev["verdict"]),
                        Some("sup") => format!("sup {}", form_text(&ev["sup"])),
                        _ => String::new(),
                    };
                    let tick = |v: &Value| match v.as_bool() {
                        Some(true) => "✓",
                        Some(false) => "✗",
                        None => "?",
                    };
                    let _ = writeln!(
                        s,
                        "  {:<10} {:<8} {:<6} {:<8} {:<8} {evidence}",
                        row["family"].as_str().unwrap_or("?"),
                        row["order"].as_str().unwrap_or("?"),
                        cell["direction"].as_str().unwrap_or("?"),
                        tick(&cell["expected"]),
                        tick(&cell["observed"]),
                    );
                }
            }
        }
        _ => {}
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round12(std::f64::consts::PI), 3.14159265359);
        assert_eq!(round12(0.0), 0.0);
        assert_eq!(round12(1e-300), 1e-300);
        assert_eq!(round_floats(json!({"a": [1, 2.0000000000001]})), json!({"a": [1, 2.0]}));
    }

    #[test]
    fn level_lists() {
        assert_eq!(parse_levels("9, 49,199").unwrap(), vec![9, 49, 199]);
        assert!(parse_levels("9,,1").is_err());
        assert!(parse_levels("0").is_err());
    }

    #[test]
    fn broken_max_fails_cancellation() {
        let cfg = RunConfig {
            instance: Some("broken-max".into()),
            cap: Some(4),
            ..RunConfig::default()
        };
        let o = cmd_axioms(&cfg).unwrap();
        assert_eq!(o.exit_code(), 1);
        let v = &o.report["report"]["results"][0]["verdicts"];
        assert_eq!(v["GEiv"]["verdict"], "fail");
        assert_eq!(v["GEi"]["verdict"], "pass");
    }

    #[test]
    fn selectors_are_validated() {
        assert!(matches!(cmd_axioms(&RunConfig::default()), Err(UsageError::Selector)));
        let cfg = RunConfig {
            instance: Some("nope".into()),
            ..RunConfig::default()
        };
        assert!(matches!(cmd_axioms(&cfg), Err(UsageError::UnknownInstance(_))));
        assert!(matches!(
            cmd_counterexample("nope", &RunConfig::default()),
            Err(UsageError::UnknownCounterexample(_))
        ));
    }

    #[test]
    fn every_counterexample_reproduces() {
        let cfg = RunConfig {
            n_max: Some(8),
            ..RunConfig::default()
        };
        for name in COUNTEREXAMPLES {
            let o = cmd_counterexample(name, &cfg).unwrap();
            assert!(o.pass, "{name}: {}", o.render(Format::Text));
        }
    }

    #[test]
    fn custom_grid_chain_from_json() {
        let cfg = RunConfig {
            chain: Some(r#"{"chain": {"grid": {"c": ["1", "1/2"], "alpha": ["1", "0"], "beta": ["1", "0"]}}, "n_max": 4, "levels": [9]}"#.into()),
            ..RunConfig::default()
        };
        let o = cmd_chain(&cfg).unwrap();
        assert!(o.pass, "{}", o.render(Format::Text));
        assert_eq!(o.report["report"]["direction"], "descending");
        assert_eq!(o.report["report"]["bound"]["verdict"]["verdict"], "found");
    }

    #[test]
    fn bad_chain_configs_are_usage_errors() {
        for chain in ["nope", r#"{"chain": "kato", "bogus": 1}"#, r#"{"chain": {"grid": {"c": ["1", "x"]}}}"#] {
            let cfg = RunConfig {
                chain: Some(chain.into()),
                ..RunConfig::default()
            };
            assert!(cmd_chain(&cfg).is_err(), "{chain}");
        }
    }

    #[test]
    fn wrong_direction_reports_the_failing_step() {
        let cfg = RunConfig {
            chain: Some(r#"{"chain": {"grid": {"c": ["0", "1"], "alpha": ["1", "0"], "beta": ["1", "0"], "direction": "ascending"}}, "n_max": 3, "levels": [9]}"#.into()),
            ..RunConfig::default()
        };
        let o = cmd_chain(&cfg).unwrap();
        assert_eq!(o.exit_code(), 1);
        assert_eq!(o.report["report"]["witness"]["n"], 1);
    }
}
