//! Monotone chains of forms: monotonicity checks, pointwise limits, and
//! meet/join searches over finite candidate sets.
//!
//! Chains are parametric. Grid chains carry `c_n`, `α_n`, `β_n` of the form
//! `base + slope/n`; sequence chains scale a diagonal form or truncate
//! `Diag(j)`. Limits are the parameter limits, declared symbolically.
//! Non-existence of a meet or join is reported as an obstruction over the
//! scanned candidates, never as a universal claim.

use std::fmt;

use nalgebra::DVector;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::form::catalog::{
    boundary_form, energy_form, grid_form, identity_form, linear_diag, linear_diag_on_span, robin_form,
};
use crate::form::eval::{matrix_at, representing_operator, to_f64};
use crate::form::{is_closed, DomainTag, FormAtom, FormError, FormSpec, LambdaFn, Rational};
use crate::forms_gea::{le_bar, le_family, le_oplus, preceq, FamilyId, OrderProbe};
use crate::hilbert::{dirichlet_energy, smooth_samples, GridFunction, Model, ModelVector, TestVectorGen};
use crate::linalg::C64;

pub const DEFAULT_N_MAX: usize = 32;
pub const DEFAULT_RANDOM_SAMPLES: usize = 20;
/// Relative tolerance of the exact gap identity.
pub const IDENTITY_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConvergenceError {
    #[error("n_max must be at least {min}, got {got}")]
    InvalidNMax { min: usize, got: usize },
    #[error("chain is not monotone in the declared order at step n = {n}")]
    MonotonicityViolation { n: usize },
    #[error("chain has no declared limit")]
    NoDeclaredLimit,
    #[error("chain term n = {n} is not closed")]
    NotClosedChain { n: usize },
    #[error("dominator is not closed")]
    NotClosedDominator,
    #[error("chain term n = {n} is not below the dominator")]
    NotDominated { n: usize },
    #[error("domain tag changes along the chain tail at n = {n}")]
    MixedTailTags { n: usize },
    #[error("chain parameter {0} becomes negative")]
    NegativeParameter(String),
    #[error("unknown chain {0:?}")]
    UnknownChain(String),
    #[error("unknown order {0:?}")]
    UnknownOrder(String),
    #[error(transparent)]
    Form(#[from] FormError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Ascending,
    Descending,
}

impl Direction {
    pub fn parse(s: &str) -> Option<Direction> {
        match s {
            "ascending" | "up" => Some(Direction::Ascending),
            "descending" | "down" => Some(Direction::Descending),
            _ => None,
        }
    }

    pub fn flipped(self) -> Direction {
        match self {
            Direction::Ascending => Direction::Descending,
            Direction::Descending => Direction::Ascending,
        }
    }
}

/// Order in which a chain is monotone.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ChainOrder {
    /// `≤⊕` on `V_f`
    Oplus,
    /// `⪯`
    Prec,
    /// `≤` of `(Q, ⊕|Q)`
    Family(FamilyId),
    /// `≤` of `(V_f, ⊕̄)`
    Bar,
}

impl ChainOrder {
    pub fn id(&self) -> String {
        match self {
            ChainOrder::Oplus => "oplus".into(),
            ChainOrder::Prec => "prec".into(),
            ChainOrder::Family(q) => q.id(),
            ChainOrder::Bar => "bar".into(),
        }
    }

    /// `oplus`, `prec`, `bar`, or a family id.
    pub fn parse(s: &str) -> Result<ChainOrder, ConvergenceError> {
        match s {
            "oplus" => Ok(ChainOrder::Oplus),
            "prec" => Ok(ChainOrder::Prec),
            "bar" | "vf-bar" => Ok(ChainOrder::Bar),
            _ => FamilyId::parse(s)
                .map(ChainOrder::Family)
                .map_err(|_| ConvergenceError::UnknownOrder(s.into())),
        }
    }

    /// Family whose members are scanned as candidate bounds.
    pub fn family(&self) -> FamilyId {
        match self {
            ChainOrder::Family(q) => q.clone(),
            _ => FamilyId::Vf,
        }
    }

    pub fn le(&self, a: &FormSpec, b: &FormSpec, probe: &OrderProbe) -> bool {
        match self {
            ChainOrder::Oplus => le_oplus(a, b, probe).unwrap_or(false),
            ChainOrder::Prec => preceq(a, b, probe).unwrap_or(false),
            ChainOrder::Family(q) => le_family(q, a, b).unwrap_or(false),
            ChainOrder::Bar => le_bar(a, b),
        }
    }
}

impl fmt::Display for ChainOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl Serialize for ChainOrder {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.id())
    }
}

/// `base + slope/n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Param {
    pub base: Rational,
    pub slope: Rational,
}

impl Param {
    pub fn new(base: Rational, slope: Rational) -> Param {
        Param { base, slope }
    }

    pub fn constant(base: Rational) -> Param {
        Param::new(base, Rational::zero())
    }

    pub fn at(&self, n: usize) -> Rational {
        self.base + self.slope / Rational::from_integer(n as i64)
    }

    pub fn limit(&self) -> Rational {
        self.base
    }

    /// Nonnegative for every `n ≥ 1`.
    fn is_nonnegative(&self) -> bool {
        self.base >= Rational::zero() && self.base + self.slope >= Rational::zero()
    }

    /// `v` lies between the limit (exclusive) and the value at `n_max`
    /// (inclusive): a bound of the first `n_max` terms that is not a bound
    /// of the whole chain.
    fn spurious(&self, v: Rational, n_max: usize) -> bool {
        let (lim, last) = (self.limit(), self.at(n_max));
        (lim < v && v <= last) || (last <= v && v < lim)
    }
}

impl Serialize for Param {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use crate::form::fmt_rational;
        [fmt_rational(&self.base), fmt_rational(&self.slope)].serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChainTerms {
    /// `Dirichlet(c_n) + Boundary(α_n, β_n)` on the grid.
    Grid { c: Param, alpha: Param, beta: Param },
    /// `k_n · Diag(λ)` on `domain` (or everywhere when bounded).
    ScaledDiag {
        lambda: LambdaFn,
        domain: DomainTag,
        coeff: Param,
    },
    /// `Diag(j ≤ n)` everywhere, converging to `Diag(j)` on its maximal
    /// domain.
    Truncated,
    Constant(FormSpec),
    /// Listed terms, the last one repeating; no declared limit.
    Explicit(Vec<FormSpec>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormChain {
    pub id: String,
    pub terms: ChainTerms,
    pub direction: Direction,
    pub order: ChainOrder,
}

fn r(p: i64, q: i64) -> Rational {
    Rational::new(p, q)
}

fn one() -> Rational {
    Rational::one()
}

impl FormChain {
    pub fn model(&self) -> Model {
        match &self.terms {
            ChainTerms::Grid { .. } => Model::Grid,
            ChainTerms::ScaledDiag { .. } | ChainTerms::Truncated => Model::Sequence,
            ChainTerms::Constant(t) => t.model(),
            ChainTerms::Explicit(v) => v.first().map(FormSpec::model).unwrap_or(Model::Sequence),
        }
    }

    /// The `n`-th term, `n ≥ 1`.
    pub fn term(&self, n: usize) -> Result<FormSpec, ConvergenceError> {
        let n = n.max(1);
        Ok(match &self.terms {
            ChainTerms::Grid { c, alpha, beta } => grid_form(c.at(n), alpha.at(n), beta.at(n)),
            ChainTerms::ScaledDiag { lambda, domain, coeff } => scaled_diag(lambda, domain, coeff.at(n))?,
            ChainTerms::Truncated => FormSpec::new(
                Model::Sequence,
                DomainTag::FullSpace,
                vec![FormAtom::diag(LambdaFn::Truncated(n as u32))],
            )?,
            ChainTerms::Constant(t) => t.clone(),
            ChainTerms::Explicit(v) => v
                .get(n - 1)
                .or(v.last())
                .cloned()
                .ok_or(ConvergenceError::NoDeclaredLimit)?,
        })
    }

    /// Terms `1..=n_max`.
    pub fn terms_upto(&self, n_max: usize) -> Result<Vec<FormSpec>, ConvergenceError> {
        (1..=n_max).map(|n| self.term(n)).collect()
    }

    /// The form built from the limit parameters.
    pub fn limit(&self) -> Option<FormSpec> {
        match &self.terms {
            ChainTerms::Grid { c, alpha, beta } => Some(grid_form(c.limit(), alpha.limit(), beta.limit())),
            ChainTerms::ScaledDiag { lambda, domain, coeff } => scaled_diag(lambda, domain, coeff.limit()).ok(),
            ChainTerms::Truncated => Some(linear_diag()),
            ChainTerms::Constant(t) => Some(t.clone()),
            ChainTerms::Explicit(_) => None,
        }
    }

    pub fn with_order(mut self, order: ChainOrder) -> FormChain {
        self.order = order;
        self
    }

    pub fn with_direction(mut self, direction: Direction) -> FormChain {
        self.direction = direction;
        self
    }
}

fn scaled_diag(lambda: &LambdaFn, domain: &DomainTag, k: Rational) -> Result<FormSpec, FormError> {
    FormSpec::natural(
        Model::Sequence,
        domain.clone(),
        vec![FormAtom::Diag {
            lambda: lambda.clone(),
            coeff: k,
        }],
    )
}

/// Grid chain `Dirichlet(c_n) + Boundary(α_n, β_n)`.
pub fn grid_chain(
    id: &str,
    c: Param,
    alpha: Param,
    beta: Param,
    direction: Direction,
    order: ChainOrder,
) -> Result<FormChain, ConvergenceError> {
    for (name, p) in [("c", c), ("alpha", alpha), ("beta", beta)] {
        if !p.is_nonnegative() {
            return Err(ConvergenceError::NegativeParameter(name.into()));
        }
    }
    Ok(FormChain {
        id: id.into(),
        terms: ChainTerms::Grid { c, alpha, beta },
        direction,
        order,
    })
}

/// `(1/n)·Dirichlet + Boundary(1,1)`, descending in `≤|Cf` to the boundary
/// form.
pub fn kato_chain() -> FormChain {
    let b = Param::constant(one());
    grid_chain(
        "kato",
        Param::new(r(0, 1), one()),
        b,
        b,
        Direction::Descending,
        ChainOrder::Family(FamilyId::Cf),
    )
    .expect("valid parameters")
}

/// `(1 + 1/n)·Dirichlet + Boundary(1,1)`, descending in `≤⊕` to the Robin
/// form.
pub fn shifted_chain() -> FormChain {
    let b = Param::constant(one());
    grid_chain("shifted", Param::new(one(), one()), b, b, Direction::Descending, ChainOrder::Oplus)
        .expect("valid parameters")
}

/// `(1 − 1/n)·Dirichlet`, ascending to the energy form and dominated by the
/// Robin form.
pub fn complement_chain() -> FormChain {
    let z = Param::constant(r(0, 1));
    grid_chain("complement", Param::new(one(), -one()), z, z, Direction::Ascending, ChainOrder::Oplus)
        .expect("valid parameters")
}

/// Truncations `Diag(j ≤ n)`, ascending in `≤⊕`.
pub fn diag_chain() -> FormChain {
    FormChain {
        id: "diag".into(),
        terms: ChainTerms::Truncated,
        direction: Direction::Ascending,
        order: ChainOrder::Oplus,
    }
}

/// `(1 − 1/n)·Diag(j)` on the maximal domain, ascending in `⪯`.
pub fn scaled_diag_chain() -> FormChain {
    FormChain {
        id: "diag-scaled".into(),
        terms: ChainTerms::ScaledDiag {
            lambda: LambdaFn::Linear,
            domain: DomainTag::DiagMaximal("j".into()),
            coeff: Param::new(one(), -one()),
        },
        direction: Direction::Ascending,
        order: ChainOrder::Prec,
    }
}

/// `(1 + 1/n)·Diag(1/j)`, descending among bounded forms.
pub fn bounded_diag_chain() -> FormChain {
    FormChain {
        id: "bounded-diag".into(),
        terms: ChainTerms::ScaledDiag {
            lambda: LambdaFn::Reciprocal,
            domain: DomainTag::FullSpace,
            coeff: Param::new(one(), one()),
        },
        direction: Direction::Descending,
        order: ChainOrder::Family(FamilyId::Bf),
    }
}

pub fn constant_chain(t: FormSpec, order: ChainOrder) -> FormChain {
    FormChain {
        id: "constant".into(),
        terms: ChainTerms::Constant(t),
        direction: Direction::Ascending,
        order,
    }
}

pub const CHAIN_IDS: [&str; 6] = ["kato", "shifted", "complement", "diag", "diag-scaled", "bounded-diag"];

pub fn chain_by_id(id: &str) -> Result<FormChain, ConvergenceError> {
    Ok(match id {
        "kato" => kato_chain(),
        "shifted" => shifted_chain(),
        "complement" => complement_chain(),
        "diag" => diag_chain(),
        "diag-scaled" => scaled_diag_chain(),
        "bounded-diag" => bounded_diag_chain(),
        _ => return Err(ConvergenceError::UnknownChain(id.into())),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StepVerdict {
    pub n: usize,
    pub holds: bool,
}

fn require_n_max(n_max: usize, min: usize) -> Result<(), ConvergenceError> {
    if n_max < min {
        Err(ConvergenceError::InvalidNMax { min, got: n_max })
    } else {
        Ok(())
    }
}

/// Verdicts of `t_n ≤ t_{n+1}` (ascending) or `t_{n+1} ≤ t_n` (descending)
/// for `n = 1..n_max-1` in the chain's order.
pub fn monotone_steps(chain: &FormChain, n_max: usize, probe: &OrderProbe) -> Result<Vec<StepVerdict>, ConvergenceError> {
    require_n_max(n_max, 2)?;
    let terms = chain.terms_upto(n_max)?;
    Ok(terms
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let holds = match chain.direction {
                Direction::Ascending => chain.order.le(&w[0], &w[1], probe),
                Direction::Descending => chain.order.le(&w[1], &w[0], probe),
            };
            StepVerdict { n: i + 1, holds }
        })
        .collect())
}

/// Like [`monotone_steps`], failing at the first step that does not hold.
pub fn check_monotone(chain: &FormChain, n_max: usize, probe: &OrderProbe) -> Result<Vec<StepVerdict>, ConvergenceError> {
    let steps = monotone_steps(chain, n_max, probe)?;
    match steps.iter().find(|s| !s.holds) {
        Some(s) => Err(ConvergenceError::MonotonicityViolation { n: s.n }),
        None => Ok(steps),
    }
}

/// All terms from `n = 2` on share one domain tag.
pub fn check_tail_tags(chain: &FormChain, n_max: usize) -> Result<(), ConvergenceError> {
    let terms = chain.terms_upto(n_max)?;
    if let Some(first) = terms.get(1) {
        for (i, t) in terms.iter().enumerate().skip(2) {
            if t.domain() != first.domain() {
                return Err(ConvergenceError::MixedTailTags { n: i + 1 });
            }
        }
    }
    Ok(())
}

/// Test vectors for pointwise limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SampleConfig {
    pub random: usize,
    pub seed: u64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            random: DEFAULT_RANDOM_SAMPLES,
            seed: 7,
        }
    }
}

/// Named vectors followed by seeded random unit vectors. The flag marks
/// named vectors.
pub fn sample_vectors(model: Model, level: usize, cfg: &SampleConfig) -> Vec<(String, DVector<C64>, bool)> {
    let mut out = Vec::new();
    let mut gen = TestVectorGen::new(cfg.seed ^ (level as u64) << 20);
    match model {
        Model::Grid => {
            for (name, u) in smooth_samples(level) {
                out.push((name.to_string(), u.coords().clone(), true));
            }
            for k in 0..cfg.random {
                out.push((format!("random-{k}"), gen.unit_grid(level).coords().clone(), false));
            }
        }
        Model::Sequence => {
            out.push(("geometric".into(), geometric(level), true));
            let mut e1 = DVector::from_element(level, C64::zero());
            e1[0] = C64::one();
            out.push(("e1".into(), e1, true));
            let mut last = DVector::from_element(level, C64::zero());
            last[level - 1] = C64::one();
            out.push(("e-last".into(), last, true));
            for k in 0..cfg.random {
                out.push((format!("random-{k}"), gen.unit_seq(level).coords().clone(), false));
            }
        }
    }
    out
}

/// `(1, 1/2, 1/4, …)` cut to `level` coordinates.
pub fn geometric(level: usize) -> DVector<C64> {
    DVector::from_fn(level, |j, _| C64::new(0.5f64.powi(j as i32), 0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub level: usize,
    pub sample: String,
    pub value: f64,
    pub limit_value: f64,
    /// `t_n(u,u) − t(u,u)`
    pub gap: f64,
    /// The same gap from the chain parameters alone.
    pub predicted_gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorGapRow {
    pub n: usize,
    pub level: usize,
    /// `‖A_n x − A x‖` for the geometric vector.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitReport {
    pub limit: FormSpec,
    pub levels: Vec<usize>,
    pub samples_per_level: usize,
    /// Rows for the named samples only.
    pub rows: Vec<ConvergenceRow>,
    pub identity_max_rel_err: f64,
    pub identity_holds: bool,
    /// Values move monotonically in `n` for every sample and level.
    pub values_monotone: bool,
    pub operator_gaps: Vec<OperatorGapRow>,
    pub operator_gaps_decreasing: Option<bool>,
}

fn quad(m: &nalgebra::DMatrix<C64>, x: &DVector<C64>) -> f64 {
    x.dotc(&(m * x)).re
}

/// `t_n(u,u) − t(u,u)` from the parameters, computed without form matrices.
fn predicted_gap(chain: &FormChain, n: usize, x: &DVector<C64>) -> Option<f64> {
    match &chain.terms {
        ChainTerms::Grid { c, alpha, beta } => {
            let u = GridFunction::new(x.clone());
            let d = |p: &Param| to_f64(&(p.at(n) - p.limit()));
            Some(d(c) * dirichlet_energy(&u) + d(alpha) * u.left().norm_sqr() + d(beta) * u.right().norm_sqr())
        }
        ChainTerms::ScaledDiag { lambda, coeff, .. } => {
            let s: f64 = x.iter().enumerate().map(|(j, z)| lambda.value(j + 1) * z.norm_sqr()).sum();
            Some(to_f64(&(coeff.at(n) - coeff.limit())) * s)
        }
        ChainTerms::Truncated => Some(
            -x.iter()
                .enumerate()
                .skip(n)
                .map(|(j, z)| (j + 1) as f64 * z.norm_sqr())
                .sum::<f64>(),
        ),
        ChainTerms::Constant(_) => Some(0.0),
        ChainTerms::Explicit(_) => None,
    }
}

/// Limit form and convergence table.
///
/// For every level and sample `u` the table records `t_n(u,u) − t(u,u)` and
/// compares it with the gap predicted from the parameters (for the Kato
/// chain, `(1/n)·∫|u′|²`). Sequence chains also record the operator gap on
/// the geometric vector.
pub fn pointwise_limit(
    chain: &FormChain,
    n_max: usize,
    levels: &[usize],
    samples: &SampleConfig,
) -> Result<LimitReport, ConvergenceError> {
    require_n_max(n_max, 1)?;
    let limit = chain.limit().ok_or(ConvergenceError::NoDeclaredLimit)?;
    check_tail_tags(chain, n_max)?;
    let model = chain.model();
    let terms = chain.terms_upto(n_max)?;
    let mut rows = Vec::new();
    let mut max_err: f64 = 0.0;
    let mut values_monotone = true;
    let mut operator_gaps = Vec::new();
    let mut samples_per_level = 0;

    for &level in levels {
        let vectors = sample_vectors(model, level, samples);
        samples_per_level = vectors.len();
        let m_limit = matrix_at(&limit, level)?;
        let limit_values: Vec<f64> = vectors.iter().map(|(_, x, _)| quad(&m_limit, x)).collect();
        let mut previous: Option<Vec<f64>> = None;
        for (i, t) in terms.iter().enumerate() {
            let n = i + 1;
            let m = matrix_at(t, level)?;
            let values: Vec<f64> = vectors.iter().map(|(_, x, _)| quad(&m, x)).collect();
            for (k, (name, x, named)) in vectors.iter().enumerate() {
                let gap = values[k] - limit_values[k];
                let predicted = predicted_gap(chain, n, x);
                if let Some(p) = predicted {
                    let scale = values[k].abs().max(limit_values[k].abs());
                    let err = (gap - p).abs();
                    max_err = max_err.max(if scale > 0.0 { err / scale } else { err });
                }
                if *named {
                    rows.push(ConvergenceRow {
                        n,
                        level,
                        sample: name.clone(),
                        value: values[k],
                        limit_value: limit_values[k],
                        gap,
                        predicted_gap: predicted,
                    });
                }
            }
            if let Some(prev) = &previous {
                for (a, b) in prev.iter().zip(&values) {
                    let slack = 1e-12 * a.abs().max(1.0);
                    let ok = match chain.direction {
                        Direction::Ascending => *b >= a - slack,
                        Direction::Descending => *b <= a + slack,
                    };
                    values_monotone &= ok;
                }
            }
            previous = Some(values);
        }
        if model == Model::Sequence {
            let x = geometric(level);
            let ax = representing_operator(&limit, level)? * &x;
            for (i, t) in terms.iter().enumerate() {
                let gap = (representing_operator(t, level)? * &x - &ax).norm();
                operator_gaps.push(OperatorGapRow { n: i + 1, level, gap });
            }
        }
    }
    let operator_gaps_decreasing = (model == Model::Sequence).then(|| {
        operator_gaps
            .windows(2)
            .filter(|w| w[0].level == w[1].level)
            .all(|w| w[1].gap <= w[0].gap + 1e-12)
    });
    Ok(LimitReport {
        limit,
        levels: levels.to_vec(),
        samples_per_level,
        rows,
        identity_max_rel_err: max_err,
        identity_holds: max_err <= IDENTITY_TOL,
        values_monotone,
        operator_gaps,
        operator_gaps_decreasing,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum BoundVerdict {
    Found {
        element: FormSpec,
    },
    /// Two maximal lower (minimal upper) bounds, incomparable both ways.
    Obstruction {
        first: FormSpec,
        second: FormSpec,
        first_le_second: bool,
        second_le_first: bool,
    },
    NoBound,
}

impl BoundVerdict {
    pub fn found(&self) -> Option<&FormSpec> {
        match self {
            BoundVerdict::Found { element } => Some(element),
            _ => None,
        }
    }

    pub fn is_obstruction(&self) -> bool {
        matches!(self, BoundVerdict::Obstruction { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Meet,
    Join,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub chain: String,
    pub family: String,
    pub order: ChainOrder,
    pub n_max: usize,
    pub candidates_scanned: usize,
    pub bounds: usize,
    pub verdict: BoundVerdict,
    /// Whether a found bound equals the chain's declared limit.
    pub matches_limit: Option<bool>,
}

/// Greatest lower (least upper) bound of `terms` among `candidates`.
fn bound_search(
    order: &ChainOrder,
    terms: &[FormSpec],
    candidates: &[FormSpec],
    kind: BoundKind,
    probe: &OrderProbe,
) -> (BoundVerdict, usize) {
    // `better(x, y)`: y is at least as good a bound as x.
    let better = |x: &FormSpec, y: &FormSpec| match kind {
        BoundKind::Meet => order.le(x, y, probe),
        BoundKind::Join => order.le(y, x, probe),
    };
    let bounds: Vec<&FormSpec> = candidates
        .iter()
        .filter(|c| {
            terms.iter().all(|t| match kind {
                BoundKind::Meet => order.le(c, t, probe),
                BoundKind::Join => order.le(t, c, probe),
            })
        })
        .collect();
    let count = bounds.len();
    if let Some(best) = bounds.iter().find(|m| bounds.iter().all(|b| better(b, m))) {
        return (BoundVerdict::Found { element: (*best).clone() }, count);
    }
    let extremal: Vec<&FormSpec> = bounds
        .iter()
        .copied()
        .filter(|c| !bounds.iter().any(|d| d != c && better(c, d)))
        .collect();
    let verdict = match extremal.as_slice() {
        [first, second, ..] => BoundVerdict::Obstruction {
            first: (*first).clone(),
            second: (*second).clone(),
            first_le_second: order.le(first, second, probe),
            second_le_first: order.le(second, first, probe),
        },
        _ => BoundVerdict::NoBound,
    };
    (verdict, count)
}

fn dedup_members(family: &FamilyId, candidates: &[FormSpec]) -> Vec<FormSpec> {
    let mut out: Vec<FormSpec> = Vec::new();
    for c in candidates {
        if family.contains(c) && !out.contains(c) {
            out.push(c.clone());
        }
    }
    out
}

/// Default candidate set: the limit, catalog forms of the chain's model and,
/// for grid chains, parameter variants `c ∈ {0, 1/2, 1, 2}`,
/// `α, β ∈ {0, 1/2, 1}`. Variants that bound the first `n_max` terms without
/// bounding the whole chain are left out.
pub fn default_candidates(chain: &FormChain, n_max: usize) -> Vec<FormSpec> {
    let mut out: Vec<FormSpec> = chain.limit().into_iter().collect();
    match chain.model() {
        Model::Grid => {
            out.extend([robin_form(), energy_form(), boundary_form(), FormSpec::zero(Model::Grid)]);
            let cs = [r(0, 1), r(1, 2), one(), r(2, 1)];
            let ab = [r(0, 1), r(1, 2), one()];
            for c in cs {
                for a in ab {
                    for b in ab {
                        if let ChainTerms::Grid { c: pc, alpha, beta } = &chain.terms {
                            if pc.spurious(c, n_max) || alpha.spurious(a, n_max) || beta.spurious(b, n_max) {
                                continue;
                            }
                        }
                        out.push(grid_form(c, a, b));
                    }
                }
            }
        }
        Model::Sequence => {
            let inv = FormSpec::new(Model::Sequence, DomainTag::FullSpace, vec![FormAtom::diag(LambdaFn::Reciprocal)])
                .expect("bounded");
            out.extend([
                linear_diag(),
                linear_diag_on_span(),
                linear_diag().scaled(r(2, 1)).expect("nonnegative"),
                FormSpec::new(
                    Model::Sequence,
                    DomainTag::DiagMaximal("j^2".into()),
                    vec![FormAtom::diag(LambdaFn::Square)],
                )
                .expect("valid"),
                inv.scaled(r(1, 2)).expect("nonnegative"),
                inv.clone(),
                inv.scaled(r(2, 1)).expect("nonnegative"),
                identity_form(Model::Sequence),
                FormSpec::zero(Model::Sequence),
            ]);
        }
    }
    out
}

fn search_in_family(
    chain: &FormChain,
    family: &FamilyId,
    candidates: &[FormSpec],
    n_max: usize,
    probe: &OrderProbe,
    kind: BoundKind,
) -> Result<BoundReport, ConvergenceError> {
    check_monotone(chain, n_max, probe)?;
    let terms = chain.terms_upto(n_max)?;
    let candidates = dedup_members(family, candidates);
    let (verdict, bounds) = bound_search(&chain.order, &terms, &candidates, kind, probe);
    let matches_limit = verdict.found().map(|f| Some(f) == chain.limit().as_ref());
    Ok(BoundReport {
        kind,
        chain: chain.id.clone(),
        family: family.id(),
        order: chain.order.clone(),
        n_max,
        candidates_scanned: candidates.len(),
        bounds,
        verdict,
        matches_limit,
    })
}

/// Infimum of a descending chain among the family members of `candidates`,
/// or an obstruction.
pub fn meet_in_family(
    chain: &FormChain,
    family: &FamilyId,
    candidates: &[FormSpec],
    n_max: usize,
    probe: &OrderProbe,
) -> Result<BoundReport, ConvergenceError> {
    if chain.direction != Direction::Descending {
        return Err(ConvergenceError::MonotonicityViolation { n: 1 });
    }
    search_in_family(chain, family, candidates, n_max, probe, BoundKind::Meet)
}

/// Supremum of an ascending chain among the family members of
/// `candidates`, or an obstruction.
pub fn join_in_family(
    chain: &FormChain,
    family: &FamilyId,
    candidates: &[FormSpec],
    n_max: usize,
    probe: &OrderProbe,
) -> Result<BoundReport, ConvergenceError> {
    if chain.direction != Direction::Ascending {
        return Err(ConvergenceError::MonotonicityViolation { n: 1 });
    }
    search_in_family(chain, family, candidates, n_max, probe, BoundKind::Join)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominatorReport {
    pub chain: String,
    pub n_max: usize,
    pub dominators: Vec<FormSpec>,
    /// Each dominator is `≥⊕` every term.
    pub dominates: Vec<bool>,
    /// Neither dominator is `≤⊕` the other.
    pub incomparable: bool,
    /// The maximal-domain form is `⪯` its finite-support restriction.
    pub maximal_prec_restriction: bool,
    pub verdict: BoundVerdict,
}

impl DominatorReport {
    /// Both dominators bound the chain and are incomparable.
    pub fn obstructs(&self) -> bool {
        self.dominates.iter().all(|&d| d) && self.incomparable && self.verdict.is_obstruction()
    }
}

/// The ascending truncation chain of `Diag(j)` has two incomparable
/// dominators in `≤⊕`: `k·Diag(j)` on its maximal domain and `Diag(j)` on
/// finitely supported vectors.
pub fn join_obstruction_vf(n_max: usize, scale: Rational, probe: &OrderProbe) -> Result<DominatorReport, ConvergenceError> {
    require_n_max(n_max, 1)?;
    let chain = diag_chain();
    let terms = chain.terms_upto(n_max)?;
    let t = linear_diag().scaled(scale)?;
    let span = linear_diag_on_span();
    let le = |a: &FormSpec, b: &FormSpec| ChainOrder::Oplus.le(a, b, probe);
    let dominates = [&t, &span]
        .iter()
        .map(|d| terms.iter().all(|tn| le(tn, d)))
        .collect();
    let incomparable = !le(&t, &span) && !le(&span, &t);
    let maximal_prec_restriction = preceq(&linear_diag(), &span, probe)?;
    let mut candidates = vec![t.clone(), span.clone()];
    candidates.extend(default_candidates(&chain, n_max));
    let candidates = dedup_members(&FamilyId::Vf, &candidates);
    let (verdict, _) = bound_search(&ChainOrder::Oplus, &terms, &candidates, BoundKind::Join, probe);
    Ok(DominatorReport {
        chain: chain.id,
        n_max,
        dominators: vec![t, span],
        dominates,
        incomparable,
        maximal_prec_restriction,
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupReport {
    pub chain: String,
    pub n_max: usize,
    pub dominator: FormSpec,
    pub sup: FormSpec,
    pub terms_below_sup: bool,
    pub sup_below_dominator: bool,
    pub upper_candidates: usize,
    pub least_among_candidates: bool,
    pub verified: bool,
}

/// Supremum in `⪯` of an ascending chain of closed forms dominated by a
/// closed form: the limit-parameter form, checked to be the least upper
/// bound among the closed candidates.
pub fn cf_prec_sup(
    chain: &FormChain,
    dominator: &FormSpec,
    candidates: &[FormSpec],
    n_max: usize,
    probe: &OrderProbe,
) -> Result<SupReport, ConvergenceError> {
    require_n_max(n_max, 2)?;
    let terms = chain.terms_upto(n_max)?;
    if let Some(i) = terms.iter().position(|t| !is_closed(t)) {
        return Err(ConvergenceError::NotClosedChain { n: i + 1 });
    }
    if !is_closed(dominator) {
        return Err(ConvergenceError::NotClosedDominator);
    }
    let prec = ChainOrder::Prec;
    check_monotone(&chain.clone().with_order(prec.clone()).with_direction(Direction::Ascending), n_max, probe)?;
    let le = |a: &FormSpec, b: &FormSpec| prec.le(a, b, probe);
    if let Some(i) = terms.iter().position(|t| !le(t, dominator)) {
        return Err(ConvergenceError::NotDominated { n: i + 1 });
    }
    let sup = chain.limit().ok_or(ConvergenceError::NoDeclaredLimit)?;
    let terms_below_sup = is_closed(&sup) && terms.iter().all(|t| le(t, &sup));
    let sup_below_dominator = le(&sup, dominator);
    let uppers: Vec<FormSpec> = dedup_members(&FamilyId::Cf, candidates)
        .into_iter()
        .filter(|c| terms.iter().all(|t| le(t, c)))
        .collect();
    let least_among_candidates = uppers.iter().all(|c| le(&sup, c));
    Ok(SupReport {
        chain: chain.id.clone(),
        n_max,
        dominator: dominator.clone(),
        sup,
        terms_below_sup,
        sup_below_dominator,
        upper_candidates: uppers.len(),
        least_among_candidates,
        verified: terms_below_sup && sup_below_dominator && least_among_candidates,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CellEvidence {
    Bound(BoundReport),
    Dominators(DominatorReport),
    Sup(SupReport),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaCell {
    /// `down` for meets of descending chains, `up` for joins.
    pub direction: &'static str,
    pub chain: String,
    pub expected: bool,
    /// Whether the chain has a bound; `None` when the search was
    /// inconclusive.
    pub observed: Option<bool>,
    pub matches: bool,
    pub evidence: CellEvidence,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaRow {
    pub family: String,
    pub order: ChainOrder,
    pub cells: Vec<SigmaCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaReport {
    pub n_max: usize,
    pub probe: OrderProbe,
    pub rows: Vec<SigmaRow>,
    pub all_match: bool,
}

fn bound_cell(direction: &'static str, expected: bool, report: BoundReport) -> SigmaCell {
    let observed = match &report.verdict {
        BoundVerdict::Found { .. } => Some(report.matches_limit == Some(true)),
        BoundVerdict::Obstruction {
            first_le_second,
            second_le_first,
            ..
        } => (!first_le_second && !second_le_first).then_some(false),
        BoundVerdict::NoBound => None,
    };
    SigmaCell {
        direction,
        chain: report.chain.clone(),
        expected,
        observed,
        matches: observed == Some(expected),
        evidence: CellEvidence::Bound(report),
    }
}

/// Meets and joins of the catalog chains in every family and order.
///
/// * `V_fD` with the total sum: both directions have bounds.
/// * `V_f` with `⊕`: meets exist, the truncation chain of `Diag(j)` has no
///   join.
/// * `B_f`: meets exist.
/// * `R_f`, `C_f` and `V_f` with `⊕̄`: both directions are obstructed by the
///   Robin/energy pair.
/// * `C_f` under `⪯`: joins exist.
pub fn sigma_report(n_max: usize, probe: &OrderProbe) -> Result<SigmaReport, ConvergenceError> {
    require_n_max(n_max, 2)?;
    let mut rows = Vec::new();
    let shifted = shifted_chain();
    let complement = complement_chain();
    let h1 = FamilyId::VfD(DomainTag::H1Grid);

    let both = |family: &FamilyId, order: ChainOrder, expected: bool| -> Result<SigmaRow, ConvergenceError> {
        let down = shifted.clone().with_order(order.clone());
        let up = complement.clone().with_order(order.clone());
        let meet = meet_in_family(&down, family, &default_candidates(&down, n_max), n_max, probe)?;
        let join = join_in_family(&up, family, &default_candidates(&up, n_max), n_max, probe)?;
        Ok(SigmaRow {
            family: match &order {
                ChainOrder::Bar => "vf-bar".into(),
                _ => family.id(),
            },
            order,
            cells: vec![bound_cell("down", expected, meet), bound_cell("up", expected, join)],
        })
    };

    rows.push(both(&h1, ChainOrder::Oplus, true)?);

    let meet = meet_in_family(&shifted, &FamilyId::Vf, &default_candidates(&shifted, n_max), n_max, probe)?;
    let dominators = join_obstruction_vf(n_max, one(), probe)?;
    let observed = dominators.obstructs().then_some(false);
    rows.push(SigmaRow {
        family: FamilyId::Vf.id(),
        order: ChainOrder::Oplus,
        cells: vec![
            bound_cell("down", true, meet),
            SigmaCell {
                direction: "up",
                chain: dominators.chain.clone(),
                expected: false,
                observed,
                matches: observed == Some(false),
                evidence: CellEvidence::Dominators(dominators),
            },
        ],
    });

    let bounded = bounded_diag_chain();
    let meet = meet_in_family(&bounded, &FamilyId::Bf, &default_candidates(&bounded, n_max), n_max, probe)?;
    rows.push(SigmaRow {
        family: FamilyId::Bf.id(),
        order: bounded.order.clone(),
        cells: vec![bound_cell("down", true, meet)],
    });

    for q in [FamilyId::Rf, FamilyId::Cf] {
        rows.push(both(&q, ChainOrder::Family(q.clone()), false)?);
    }
    rows.push(both(&FamilyId::Vf, ChainOrder::Bar, false)?);

    let prec_chain = complement.clone().with_order(ChainOrder::Prec);
    let sup = cf_prec_sup(&prec_chain, &robin_form(), &default_candidates(&prec_chain, n_max), n_max, probe)?;
    let observed = Some(sup.verified && Some(&sup.sup) == complement.limit().as_ref());
    rows.push(SigmaRow {
        family: FamilyId::Cf.id(),
        order: ChainOrder::Prec,
        cells: vec![SigmaCell {
            direction: "up",
            chain: prec_chain.id.clone(),
            expected: true,
            observed,
            matches: observed == Some(true),
            evidence: CellEvidence::Sup(sup),
        }],
    });

    let all_match = rows.iter().all(|r| r.cells.iter().all(|c| c.matches));
    Ok(SigmaReport {
        n_max,
        probe: probe.clone(),
        rows,
        all_match,
    })
}
