//! Positive sesquilinear forms as formal sums of catalog atoms.
//!
//! A [`FormSpec`] is exact: coefficients are rationals and the domain is a
//! symbolic [`DomainTag`]. Matrices only appear when a form is realized at a
//! truncation level (see [`eval`]).

pub mod catalog;
pub mod eval;
pub mod json;
pub mod structure;

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::hilbert::Model;
use crate::linalg::LinalgError;

pub use catalog::*;
pub use eval::*;
pub use structure::*;

pub type Rational = Rational64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormError {
    #[error("atom {atom} does not belong to the {model} model")]
    ModelMismatch { atom: String, model: &'static str },
    #[error("domain {domain} is not allowed here: {reason}")]
    InvalidDomain { domain: String, reason: &'static str },
    #[error("negative coefficient in {0}")]
    NegativeCoefficient(String),
    #[error("expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("vector has support beyond level {level} of a finite-support form")]
    DomainViolation { level: usize },
    #[error("the Hamel-basis form has no matrix realization")]
    SymbolicForm,
    #[error("form is unbounded")]
    UnboundedForm,
    #[error("form is not closed")]
    NotClosed,
    #[error("form lies outside the catalog rules")]
    OutsideCatalog,
    #[error("declared {declared} but largest value grew by a factor {growth:.3} over levels {levels:?}")]
    ClassificationMismatch {
        declared: &'static str,
        growth: f64,
        levels: Vec<usize>,
    },
    #[error("numerical range minimum {min} is negative beyond tolerance")]
    NotPositive { min: f64 },
    #[error("singularity test needs a nonzero vector")]
    ZeroVector,
    #[error("Riesz residual {0:e} exceeds tolerance")]
    RieszResidual(f64),
    #[error("declared sup {declared} disagrees with λ = {lambda}")]
    InconsistentSup { lambda: String, declared: String },
    #[error("cannot parse {what}: {input}")]
    Parse { what: &'static str, input: String },
    #[error("JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Eigen(#[from] LinalgError),
}

/// Symbolic domain of a form.
///
/// Inclusion order: `FiniteSupport ⊂ DiagMaximal(λ) ⊂ FullSpace` and
/// `H1Grid ⊂ FullSpace`. Every tag stands for a dense subspace.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DomainTag {
    FullSpace,
    /// Maximal domain of the diagonal operator with coefficients `λ`.
    DiagMaximal(String),
    /// `span{e_j}`: finitely supported sequences.
    FiniteSupport,
    /// `H¹(0,1)` in the grid model.
    H1Grid,
}

impl DomainTag {
    pub fn id(&self) -> String {
        match self {
            DomainTag::FullSpace => "full".into(),
            DomainTag::DiagMaximal(l) => format!("diag-max:{l}"),
            DomainTag::FiniteSupport => "finite".into(),
            DomainTag::H1Grid => "h1".into(),
        }
    }

    pub fn parse(s: &str) -> Result<DomainTag, FormError> {
        match s {
            "full" => Ok(DomainTag::FullSpace),
            "finite" => Ok(DomainTag::FiniteSupport),
            "h1" => Ok(DomainTag::H1Grid),
            _ => match s.strip_prefix("diag-max:") {
                Some(l) if LambdaFn::parse(l).is_ok() => Ok(DomainTag::DiagMaximal(l.to_string())),
                _ => Err(FormError::Parse {
                    what: "domain tag",
                    input: s.into(),
                }),
            },
        }
    }

    /// `self ⊆ other` in the declared inclusion order.
    pub fn is_subset_of(&self, other: &DomainTag) -> bool {
        self == other
            || *other == DomainTag::FullSpace
            || (*self == DomainTag::FiniteSupport && matches!(other, DomainTag::DiagMaximal(_)))
    }

    /// Intersection, when one tag contains the other.
    pub fn meet(&self, other: &DomainTag) -> Option<DomainTag> {
        if self.is_subset_of(other) {
            Some(self.clone())
        } else if other.is_subset_of(self) {
            Some(other.clone())
        } else {
            None
        }
    }

    pub fn is_dense(&self) -> bool {
        true
    }

    pub fn allowed_in(&self, model: Model) -> bool {
        match self {
            DomainTag::FullSpace => true,
            DomainTag::DiagMaximal(_) | DomainTag::FiniteSupport => model == Model::Sequence,
            DomainTag::H1Grid => model == Model::Grid,
        }
    }
}

impl fmt::Display for DomainTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

pub(crate) fn fmt_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub(crate) fn parse_rational(s: &str) -> Result<Rational, FormError> {
    let err = || FormError::Parse {
        what: "rational",
        input: s.into(),
    };
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim().parse::<i64>().map_err(|_| err())?, q.trim().parse::<i64>().map_err(|_| err())?),
        None => (s.trim().parse::<i64>().map_err(|_| err())?, 1),
    };
    if q == 0 {
        return Err(err());
    }
    Ok(Rational::new(p, q))
}

/// Diagonal coefficient function `j ↦ λ_j` (`j ≥ 1`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LambdaFn {
    /// `λ_j = j`
    Linear,
    /// `λ_j = 1/j`
    Reciprocal,
    /// `λ_j = j²`
    Square,
    /// `λ_j = c`
    Const(Rational),
    /// `λ_j = j` for `j ≤ n`, else `0`.
    Truncated(u32),
}

impl LambdaFn {
    pub fn id(&self) -> String {
        match self {
            LambdaFn::Linear => "j".into(),
            LambdaFn::Reciprocal => "1/j".into(),
            LambdaFn::Square => "j^2".into(),
            LambdaFn::Const(c) => format!("const:{}", fmt_rational(c)),
            LambdaFn::Truncated(n) => format!("j<={n}"),
        }
    }

    pub fn parse(s: &str) -> Result<LambdaFn, FormError> {
        match s {
            "j" => Ok(LambdaFn::Linear),
            "1/j" => Ok(LambdaFn::Reciprocal),
            "j^2" => Ok(LambdaFn::Square),
            _ => {
                if let Some(c) = s.strip_prefix("const:") {
                    let c = parse_rational(c)?;
                    if c < Rational::zero() {
                        return Err(FormError::NegativeCoefficient(s.into()));
                    }
                    return Ok(LambdaFn::Const(c));
                }
                if let Some(n) = s.strip_prefix("j<=") {
                    if let Ok(n) = n.parse::<u32>() {
                        return Ok(LambdaFn::Truncated(n));
                    }
                }
                Err(FormError::Parse {
                    what: "lambda",
                    input: s.into(),
                })
            }
        }
    }

    pub fn value(&self, j: usize) -> f64 {
        let j = j as f64;
        match self {
            LambdaFn::Linear => j,
            LambdaFn::Reciprocal => 1.0 / j,
            LambdaFn::Square => j * j,
            LambdaFn::Const(c) => *c.numer() as f64 / *c.denom() as f64,
            LambdaFn::Truncated(n) => {
                if j <= *n as f64 {
                    j
                } else {
                    0.0
                }
            }
        }
    }

    /// `sup_j λ_j`, `None` when infinite.
    pub fn sup(&self) -> Option<Rational> {
        match self {
            LambdaFn::Linear | LambdaFn::Square => None,
            LambdaFn::Reciprocal => Some(Rational::one()),
            LambdaFn::Const(c) => Some(*c),
            LambdaFn::Truncated(n) => Some(Rational::from_integer(*n as i64)),
        }
    }

    /// Index beyond which the coefficient sequence stops changing shape.
    pub fn cut(&self) -> usize {
        match self {
            LambdaFn::Truncated(n) => *n as usize,
            _ => 0,
        }
    }
}

/// Bounded Hermitian PSD generator family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    /// The identity operator.
    Identity,
    /// Seeded random Hermitian PSD matrix with norm at most 1 at every level.
    Seeded(u64),
}

impl Generator {
    pub fn id(&self) -> String {
        match self {
            Generator::Identity => "id".into(),
            Generator::Seeded(s) => format!("seeded:{s}"),
        }
    }

    pub fn parse(s: &str) -> Result<Generator, FormError> {
        if s == "id" {
            return Ok(Generator::Identity);
        }
        s.strip_prefix("seeded:")
            .and_then(|n| n.parse().ok())
            .map(Generator::Seeded)
            .ok_or_else(|| FormError::Parse {
                what: "generator",
                input: s.into(),
            })
    }
}

/// A positive atom with its nonnegative rational coefficient(s).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FormAtom {
    /// `Σ coeff·λ_j x_j conj(y_j)` (sequence model).
    Diag { lambda: LambdaFn, coeff: Rational },
    /// `c·∫ u′ conj(v′)` (grid model).
    Dirichlet { c: Rational },
    /// `α u(0)conj(v(0)) + β u(1)conj(v(1))` (grid model).
    Boundary { alpha: Rational, beta: Rational },
    /// `coeff·(G u, v)` for a bounded generator `G`.
    BoundedMat { gen: Generator, coeff: Rational },
    /// Everywhere-defined singular form built from a Hamel basis; symbolic only.
    Hamel { coeff: Rational },
    Zero,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum AtomKey {
    Diag(LambdaFn),
    DiagConst,
    Dirichlet,
    Boundary,
    BoundedMat(Generator),
    Hamel,
}

impl FormAtom {
    pub fn diag(lambda: LambdaFn) -> FormAtom {
        FormAtom::Diag {
            lambda,
            coeff: Rational::one(),
        }
    }

    pub fn dirichlet(c: Rational) -> FormAtom {
        FormAtom::Dirichlet { c }
    }

    pub fn boundary(alpha: Rational, beta: Rational) -> FormAtom {
        FormAtom::Boundary { alpha, beta }
    }

    pub fn bounded(gen: Generator) -> FormAtom {
        FormAtom::BoundedMat {
            gen,
            coeff: Rational::one(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            FormAtom::Diag { .. } => "diag",
            FormAtom::Dirichlet { .. } => "dirichlet",
            FormAtom::Boundary { .. } => "boundary",
            FormAtom::BoundedMat { .. } => "bounded_mat",
            FormAtom::Hamel { .. } => "hamel",
            FormAtom::Zero => "zero",
        }
    }

    fn key(&self) -> Option<AtomKey> {
        Some(match self {
            FormAtom::Diag {
                lambda: LambdaFn::Const(_),
                ..
            } => AtomKey::DiagConst,
            FormAtom::Diag { lambda, .. } => AtomKey::Diag(lambda.clone()),
            FormAtom::Dirichlet { .. } => AtomKey::Dirichlet,
            FormAtom::Boundary { .. } => AtomKey::Boundary,
            FormAtom::BoundedMat { gen, .. } => AtomKey::BoundedMat(*gen),
            FormAtom::Hamel { .. } => AtomKey::Hamel,
            FormAtom::Zero => return None,
        })
    }

    /// Coefficient vector in a fixed per-kind layout.
    fn coeffs(&self) -> Vec<Rational> {
        match self {
            FormAtom::Diag {
                lambda: LambdaFn::Const(c),
                coeff,
            } => vec![c * coeff],
            FormAtom::Diag { coeff, .. } | FormAtom::BoundedMat { coeff, .. } | FormAtom::Hamel { coeff } => {
                vec![*coeff]
            }
            FormAtom::Dirichlet { c } => vec![*c],
            FormAtom::Boundary { alpha, beta } => vec![*alpha, *beta],
            FormAtom::Zero => vec![],
        }
    }

    fn from_key(key: &AtomKey, c: &[Rational]) -> FormAtom {
        match key {
            AtomKey::Diag(lambda) => FormAtom::Diag {
                lambda: lambda.clone(),
                coeff: c[0],
            },
            AtomKey::DiagConst => FormAtom::Diag {
                lambda: LambdaFn::Const(c[0]),
                coeff: Rational::one(),
            },
            AtomKey::Dirichlet => FormAtom::Dirichlet { c: c[0] },
            AtomKey::Boundary => FormAtom::Boundary { alpha: c[0], beta: c[1] },
            AtomKey::BoundedMat(gen) => FormAtom::BoundedMat { gen: *gen, coeff: c[0] },
            AtomKey::Hamel => FormAtom::Hamel { coeff: c[0] },
        }
    }

    /// Whether the atom is bounded as a form (and nonzero atoms only).
    pub fn is_bounded(&self) -> bool {
        match self {
            FormAtom::Diag { lambda, .. } => lambda.sup().is_some(),
            FormAtom::BoundedMat { .. } | FormAtom::Zero => true,
            FormAtom::Dirichlet { .. } | FormAtom::Boundary { .. } | FormAtom::Hamel { .. } => false,
        }
    }

    pub fn allowed_in(&self, model: Model) -> bool {
        match self {
            FormAtom::Diag { .. } | FormAtom::Hamel { .. } => model == Model::Sequence,
            FormAtom::Dirichlet { .. } | FormAtom::Boundary { .. } => model == Model::Grid,
            FormAtom::BoundedMat { .. } | FormAtom::Zero => true,
        }
    }

    fn scaled(&self, k: Rational) -> FormAtom {
        match self.key() {
            None => FormAtom::Zero,
            Some(key) => {
                let c: Vec<_> = self.coeffs().iter().map(|c| c * k).collect();
                FormAtom::from_key(&key, &c)
            }
        }
    }
}

impl fmt::Display for FormAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = fmt_rational;
        match self {
            FormAtom::Diag { lambda, coeff } if coeff.is_one() => write!(f, "Diag({})", lambda.id()),
            FormAtom::Diag { lambda, coeff } => write!(f, "{}·Diag({})", r(coeff), lambda.id()),
            FormAtom::Dirichlet { c } => write!(f, "Dirichlet({})", r(c)),
            FormAtom::Boundary { alpha, beta } => write!(f, "Boundary({}, {})", r(alpha), r(beta)),
            FormAtom::BoundedMat { gen, coeff } if coeff.is_one() => write!(f, "Bounded({})", gen.id()),
            FormAtom::BoundedMat { gen, coeff } => write!(f, "{}·Bounded({})", r(coeff), gen.id()),
            FormAtom::Hamel { coeff } if coeff.is_one() => write!(f, "Hamel"),
            FormAtom::Hamel { coeff } => write!(f, "{}·Hamel", r(coeff)),
            FormAtom::Zero => write!(f, "o"),
        }
    }
}

/// Merges atoms with equal keys, drops zero atoms, sorts by key.
fn canonicalize(atoms: Vec<FormAtom>) -> Result<Vec<FormAtom>, FormError> {
    let mut merged: BTreeMap<AtomKey, Vec<Rational>> = BTreeMap::new();
    for atom in atoms {
        let Some(key) = atom.key() else { continue };
        let c = atom.coeffs();
        if c.iter().any(|x| *x < Rational::zero()) {
            return Err(FormError::NegativeCoefficient(atom.to_string()));
        }
        let slot = merged.entry(key).or_insert_with(|| vec![Rational::zero(); c.len()]);
        for (s, x) in slot.iter_mut().zip(c) {
            *s += x;
        }
    }
    Ok(merged
        .into_iter()
        .filter(|(_, c)| c.iter().any(|x| !x.is_zero()))
        .map(|(k, c)| FormAtom::from_key(&k, &c))
        .collect())
}

/// A positive form: canonical atom list, domain tag and model.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FormSpec {
    model: Model,
    domain: DomainTag,
    atoms: Vec<FormAtom>,
}

impl FormSpec {
    /// Builds a form, canonicalizing the atom list and validating model and
    /// domain compatibility.
    pub fn new(model: Model, domain: DomainTag, atoms: Vec<FormAtom>) -> Result<FormSpec, FormError> {
        for a in &atoms {
            if !a.allowed_in(model) {
                return Err(FormError::ModelMismatch {
                    atom: a.to_string(),
                    model: model.name(),
                });
            }
        }
        if !domain.allowed_in(model) {
            return Err(FormError::InvalidDomain {
                domain: domain.id(),
                reason: "tag belongs to the other model",
            });
        }
        let atoms = canonicalize(atoms)?;
        let has_hamel = atoms.iter().any(|a| matches!(a, FormAtom::Hamel { .. }));
        let numeric_unbounded = atoms
            .iter()
            .any(|a| !a.is_bounded() && !matches!(a, FormAtom::Hamel { .. }));
        if has_hamel && (numeric_unbounded || domain != DomainTag::FullSpace) {
            return Err(FormError::InvalidDomain {
                domain: domain.id(),
                reason: "the Hamel form is everywhere defined and combines only with bounded atoms",
            });
        }
        if numeric_unbounded && domain == DomainTag::FullSpace {
            return Err(FormError::InvalidDomain {
                domain: domain.id(),
                reason: "unbounded forms cannot be everywhere defined",
            });
        }
        Ok(FormSpec { model, domain, atoms })
    }

    /// Same as [`FormSpec::new`] with the domain chosen as `FullSpace` for
    /// bounded atom lists and `default_unbounded` otherwise.
    pub fn natural(model: Model, default_unbounded: DomainTag, atoms: Vec<FormAtom>) -> Result<FormSpec, FormError> {
        let canon = canonicalize(atoms)?;
        let bounded = canon.iter().all(|a| a.is_bounded() || matches!(a, FormAtom::Hamel { .. }));
        let domain = if bounded { DomainTag::FullSpace } else { default_unbounded };
        FormSpec::new(model, domain, canon)
    }

    /// The zero form `o` on the whole space.
    pub fn zero(model: Model) -> FormSpec {
        FormSpec {
            model,
            domain: DomainTag::FullSpace,
            atoms: vec![],
        }
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn domain(&self) -> &DomainTag {
        &self.domain
    }

    pub fn atoms(&self) -> &[FormAtom] {
        &self.atoms
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Catalog boundedness: every atom bounded.
    pub fn is_bounded(&self) -> bool {
        self.atoms.iter().all(FormAtom::is_bounded)
    }

    pub fn has_hamel(&self) -> bool {
        self.atoms.iter().any(|a| matches!(a, FormAtom::Hamel { .. }))
    }

    pub fn with_domain(&self, domain: DomainTag) -> Result<FormSpec, FormError> {
        FormSpec::new(self.model, domain, self.atoms.clone())
    }

    /// `k·t` for `k ≥ 0`.
    pub fn scaled(&self, k: Rational) -> Result<FormSpec, FormError> {
        if k < Rational::zero() {
            return Err(FormError::NegativeCoefficient(fmt_rational(&k)));
        }
        let atoms = self.atoms.iter().map(|a| a.scaled(k)).collect();
        let canon = canonicalize(atoms)?;
        let domain = if canon.is_empty() {
            DomainTag::FullSpace
        } else {
            self.domain.clone()
        };
        FormSpec::new(self.model, domain, canon)
    }

    /// Atom-wise sum on `domain`, without any definedness check.
    pub(crate) fn raw_sum(&self, other: &FormSpec, domain: DomainTag) -> Result<FormSpec, FormError> {
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().cloned());
        FormSpec::new(self.model, domain, atoms)
    }

    /// Atom-wise `self − other` with exact coefficients, or the first atom
    /// whose coefficient would turn negative.
    pub(crate) fn atom_difference(&self, other: &FormSpec) -> Result<Vec<FormAtom>, FormError> {
        let mut table: BTreeMap<AtomKey, Vec<Rational>> = BTreeMap::new();
        for a in &self.atoms {
            table.insert(a.key().expect("canonical"), a.coeffs());
        }
        for b in &other.atoms {
            let key = b.key().expect("canonical");
            let bc = b.coeffs();
            let slot = table
                .entry(key)
                .or_insert_with(|| vec![Rational::zero(); bc.len()]);
            for (s, x) in slot.iter_mut().zip(&bc) {
                *s -= x;
            }
            if slot.iter().any(|x| *x < Rational::zero()) {
                return Err(FormError::NegativeCoefficient(b.to_string()));
            }
        }
        Ok(table.into_iter().map(|(k, c)| FormAtom::from_key(&k, &c)).collect())
    }

    /// Splits atoms into bounded and unbounded parts.
    pub(crate) fn partition(&self, pred: impl Fn(&FormAtom) -> bool) -> (Vec<FormAtom>, Vec<FormAtom>) {
        self.atoms.iter().cloned().partition(|a| pred(a))
    }

    /// Largest truncation cut among diagonal atoms.
    pub(crate) fn max_cut(&self) -> usize {
        self.atoms
            .iter()
            .map(|a| match a {
                FormAtom::Diag { lambda, .. } => lambda.cut(),
                _ => 0,
            })
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for FormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return write!(f, "o");
        }
        let parts: Vec<String> = self.atoms.iter().map(|a| a.to_string()).collect();
        write!(f, "{} on {}", parts.join(" + "), self.domain)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q)
    }

    #[test]
    fn canonical_merge_adds_coefficients() {
        let t = FormSpec::new(
            Model::Grid,
            DomainTag::H1Grid,
            vec![
                FormAtom::boundary(r(1, 1), r(0, 1)),
                FormAtom::dirichlet(r(1, 2)),
                FormAtom::Zero,
                FormAtom::boundary(r(0, 1), r(1, 1)),
                FormAtom::dirichlet(r(1, 3)),
            ],
        )
        .unwrap();
        assert_eq!(
            t.atoms(),
            &[FormAtom::dirichlet(r(5, 6)), FormAtom::boundary(r(1, 1), r(1, 1))]
        );
    }

    #[test]
    fn constant_diagonals_merge_into_one_atom() {
        let a = FormAtom::Diag {
            lambda: LambdaFn::Const(r(1, 2)),
            coeff: r(2, 1),
        };
        let b = FormAtom::diag(LambdaFn::Const(r(3, 1)));
        let t = FormSpec::new(Model::Sequence, DomainTag::FullSpace, vec![a, b]).unwrap();
        assert_eq!(t.atoms(), &[FormAtom::diag(LambdaFn::Const(r(4, 1)))]);
    }

    #[test]
    fn unbounded_forms_reject_full_domain() {
        let e = FormSpec::new(Model::Sequence, DomainTag::FullSpace, vec![FormAtom::diag(LambdaFn::Linear)]);
        assert!(matches!(e, Err(FormError::InvalidDomain { .. })));
        let e = FormSpec::new(Model::Grid, DomainTag::FullSpace, vec![FormAtom::boundary(r(1, 1), r(1, 1))]);
        assert!(matches!(e, Err(FormError::InvalidDomain { .. })));
    }

    #[test]
    fn atoms_are_model_checked() {
        let e = FormSpec::new(Model::Sequence, DomainTag::FullSpace, vec![FormAtom::dirichlet(r(1, 1))]);
        assert!(matches!(e, Err(FormError::ModelMismatch { .. })));
        let e = FormSpec::new(Model::Grid, DomainTag::FiniteSupport, vec![]);
        assert!(matches!(e, Err(FormError::InvalidDomain { .. })));
    }

    #[test]
    fn tag_order() {
        let dm = DomainTag::DiagMaximal("j".into());
        assert!(DomainTag::FiniteSupport.is_subset_of(&dm));
        assert!(dm.is_subset_of(&DomainTag::FullSpace));
        assert!(!dm.is_subset_of(&DomainTag::FiniteSupport));
        assert!(DomainTag::H1Grid.is_subset_of(&DomainTag::FullSpace));
        assert_eq!(dm.meet(&DomainTag::FiniteSupport), Some(DomainTag::FiniteSupport));
        assert_eq!(dm.meet(&DomainTag::DiagMaximal("j^2".into())), None);
        for s in ["full", "finite", "h1", "diag-max:j", "diag-max:j^2"] {
            assert_eq!(DomainTag::parse(s).unwrap().id(), s);
        }
        assert!(DomainTag::parse("diag-max:q").is_err());
    }

    #[test]
    fn rationals_parse_both_ways() {
        assert_eq!(parse_rational("3").unwrap(), r(3, 1));
        assert_eq!(parse_rational("6/4").unwrap(), r(3, 2));
        assert_eq!(fmt_rational(&r(6, 4)), "3/2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn lambda_ids_round_trip() {
        for s in ["j", "1/j", "j^2", "const:5/2", "j<=7"] {
            assert_eq!(LambdaFn::parse(s).unwrap().id(), s);
        }
        assert_eq!(LambdaFn::Truncated(3).value(5), 0.0);
        assert_eq!(LambdaFn::Truncated(3).value(2), 2.0);
    }
}
