//! Generalized effect algebras of positive forms.
//!
//! `V_f` holds the densely defined positive forms whose bounded members are
//! everywhere defined. `t ⊕ s` is the pointwise sum, defined when one operand
//! is bounded or both share a domain. `t ⊕̄ s` additionally requires the
//! regular parts to add up. Subfamilies (`B_f`, `R_f`, `S_f`, `G_f`, `C_f`,
//! `V_fD`) carry the restricted operation. Domains are compared as tags.

use std::fmt;
use std::rc::Rc;

use nalgebra::DMatrix;

use num_traits::Zero;
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::form::{
    is_closed, matrix_at, reg_sing_split, DomainTag, FormAtom, FormError, FormSpec, Generator, LambdaFn, Rational,
};
use crate::form::eval::representing_operator;
use crate::hilbert::Model;
use crate::kernel::PartialAlgebra;
use crate::linalg::{inf_norm, psd_check, C64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormsGeaError {
    #[error("{form} is not a member of {family}")]
    NotInFamily { family: String, form: String },
    #[error("{0} is not generated by a catalog operator")]
    NotInGf(String),
    #[error("{0} is not the form of a self-adjoint catalog operator")]
    NotSelfAdjointCatalog(String),
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
    #[error(transparent)]
    Form(#[from] FormError),
}

/// Subfamilies of `V_f`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyId {
    Vf,
    /// bounded
    Bf,
    /// regular
    Rf,
    /// singular
    Sf,
    /// generated by a positive operator
    Gf,
    /// closed
    Cf,
    /// bounded, or defined exactly on the given domain
    VfD(DomainTag),
}

impl FamilyId {
    pub fn id(&self) -> String {
        match self {
            FamilyId::Vf => "vf".into(),
            FamilyId::Bf => "bf".into(),
            FamilyId::Rf => "rf".into(),
            FamilyId::Sf => "sf".into(),
            FamilyId::Gf => "gf".into(),
            FamilyId::Cf => "cf".into(),
            FamilyId::VfD(tag) => format!("vfd:{}", tag.id()),
        }
    }

    pub fn parse(s: &str) -> Result<FamilyId, FormsGeaError> {
        Ok(match s {
            "vf" => FamilyId::Vf,
            "bf" => FamilyId::Bf,
            "rf" => FamilyId::Rf,
            "sf" => FamilyId::Sf,
            "gf" => FamilyId::Gf,
            "cf" => FamilyId::Cf,
            _ => match s.strip_prefix("vfd:").map(DomainTag::parse) {
                Some(Ok(tag)) => FamilyId::VfD(tag),
                _ => return Err(FormsGeaError::UnknownFamily(s.into())),
            },
        })
    }

    /// Membership predicate.
    pub fn contains(&self, t: &FormSpec) -> bool {
        if !in_vf(t) {
            return false;
        }
        match self {
            FamilyId::Vf => true,
            FamilyId::Bf => t.is_bounded(),
            FamilyId::Rf => reg_sing_split(t).is_ok_and(|(_, s)| s.is_zero()),
            FamilyId::Sf => reg_sing_split(t).is_ok_and(|(r, _)| r.is_zero()),
            FamilyId::Gf => is_operator_form(t),
            FamilyId::Cf => is_closed(t),
            FamilyId::VfD(tag) => t.is_bounded() || t.domain() == tag,
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

/// Bounded forms must be everywhere defined.
pub fn in_vf(t: &FormSpec) -> bool {
    !t.is_bounded() || *t.domain() == DomainTag::FullSpace
}

fn is_operator_form(t: &FormSpec) -> bool {
    let atoms_ok = t
        .atoms()
        .iter()
        .all(|a| matches!(a, FormAtom::Diag { .. } | FormAtom::BoundedMat { .. }));
    atoms_ok && (t.is_bounded() || t.model() == Model::Sequence)
}

fn require(family: &FamilyId, t: &FormSpec) -> Result<(), FormsGeaError> {
    if family.contains(t) {
        Ok(())
    } else {
        Err(FormsGeaError::NotInFamily {
            family: family.id(),
            form: t.to_string(),
        })
    }
}

/// `t ⊕ s`: defined when `t` or `s` is bounded or `D(t) = D(s)`.
pub fn oplus(t: &FormSpec, s: &FormSpec) -> Option<FormSpec> {
    if t.model() != s.model() {
        return None;
    }
    if !(t.is_bounded() || s.is_bounded() || t.domain() == s.domain()) {
        return None;
    }
    let domain = t.domain().meet(s.domain())?;
    t.raw_sum(s, domain).ok()
}

/// `t ⊕̄ s`: `t ⊕ s` when additionally `(t + s)_r = t_r + s_r`.
pub fn oplus_bar(t: &FormSpec, s: &FormSpec) -> Option<FormSpec> {
    let sum = oplus(t, s)?;
    let (sum_r, _) = reg_sing_split(&sum).ok()?;
    let (t_r, _) = reg_sing_split(t).ok()?;
    let (s_r, _) = reg_sing_split(s).ok()?;
    let domain = t_r.domain().meet(s_r.domain())?;
    let parts = t_r.raw_sum(&s_r, domain).ok()?;
    (parts == sum_r).then_some(sum)
}

/// `t ⊕|Q s`: the plain sum restricted to `Q`.
pub fn oplus_family(q: &FamilyId, t: &FormSpec, s: &FormSpec) -> Result<Option<FormSpec>, FormsGeaError> {
    require(q, t)?;
    require(q, s)?;
    Ok(oplus(t, s).filter(|sum| q.contains(sum)))
}

/// Levels and tolerance of numerical order checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderProbe {
    pub sequence_levels: Vec<usize>,
    pub grid_levels: Vec<usize>,
    pub tol: f64,
}

impl Default for OrderProbe {
    fn default() -> Self {
        OrderProbe {
            sequence_levels: Model::Sequence.default_levels(),
            grid_levels: Model::Grid.default_levels(),
            tol: 1e-9,
        }
    }
}

impl OrderProbe {
    pub fn levels(&self, model: Model) -> &[usize] {
        match model {
            Model::Sequence => &self.sequence_levels,
            Model::Grid => &self.grid_levels,
        }
    }

    /// Same tolerance with the given levels for `model`.
    pub fn with_levels(&self, model: Model, levels: Vec<usize>) -> OrderProbe {
        let mut p = self.clone();
        match model {
            Model::Sequence => p.sequence_levels = levels,
            Model::Grid => p.grid_levels = levels,
        }
        p
    }
}

fn hamel_coeff(t: &FormSpec) -> Rational {
    t.atoms()
        .iter()
        .find_map(|a| match a {
            FormAtom::Hamel { coeff } => Some(*coeff),
            _ => None,
        })
        .unwrap_or_else(Rational::zero)
}

fn without_hamel(t: &FormSpec) -> FormSpec {
    if !t.has_hamel() {
        return t.clone();
    }
    let (_, rest) = t.partition(|a| matches!(a, FormAtom::Hamel { .. }));
    FormSpec::new(t.model(), DomainTag::FullSpace, rest).expect("Hamel forms combine only with bounded atoms")
}

/// `t ⪯ s`: `D(s) ⊆ D(t)` and `t(x,x) ≤ s(x,x)` on `D(s)`, the latter
/// checked as positive semidefiniteness of `M_s − M_t` at every probe level.
///
/// The symbolic Hamel atom is compared through its coefficient; the rest of
/// the form is compared numerically.
pub fn preceq(t: &FormSpec, s: &FormSpec, probe: &OrderProbe) -> Result<bool, FormError> {
    preceq_by(t, s, probe, |f, level| matrix_at(f, level).map(Rc::new))
}

/// [`preceq`] with a caller-supplied source of form matrices.
pub fn preceq_by<F>(t: &FormSpec, s: &FormSpec, probe: &OrderProbe, mut matrix: F) -> Result<bool, FormError>
where
    F: FnMut(&FormSpec, usize) -> Result<Rc<DMatrix<C64>>, FormError>,
{
    if t.model() != s.model() || !s.domain().is_subset_of(t.domain()) {
        return Ok(false);
    }
    if hamel_coeff(t) > hamel_coeff(s) {
        return Ok(false);
    }
    let (t, s) = (without_hamel(t), without_hamel(s));
    for &level in probe.levels(t.model()) {
        let mt = matrix(&t, level)?;
        let ms = matrix(&s, level)?;
        let scale = inf_norm(&mt).max(inf_norm(&ms));
        if !psd_check(&(ms.as_ref() - mt.as_ref()), probe.tol, scale).psd {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Order of `(V_f, ⊕)`: `t ⪯ s` and `D(t)` is the whole space or `D(s)`.
pub fn le_oplus(t: &FormSpec, s: &FormSpec, probe: &OrderProbe) -> Result<bool, FormError> {
    let domain_ok = *t.domain() == DomainTag::FullSpace || t.domain() == s.domain();
    Ok(domain_ok && preceq(t, s, probe)?)
}

/// `s ⊖ t` by exact atom-wise subtraction.
///
/// `Ok(None)` when the domain condition of `≤⊕` fails; an error when some
/// coefficient of `t` exceeds its counterpart in `s`.
pub fn ominus_forms(s: &FormSpec, t: &FormSpec) -> Result<Option<FormSpec>, FormError> {
    if s.model() != t.model() || !s.domain().is_subset_of(t.domain()) {
        return Ok(None);
    }
    if !(*t.domain() == DomainTag::FullSpace || t.domain() == s.domain()) {
        return Ok(None);
    }
    let atoms = s.atom_difference(t)?;
    let r = FormSpec::natural(s.model(), s.domain().clone(), atoms.clone())
        .or_else(|_| FormSpec::new(s.model(), s.domain().clone(), atoms))?;
    Ok(oplus(t, &r).filter(|sum| sum == s).map(|_| r))
}

/// Order of `(Q, ⊕|Q)`: `s ⊖ t` exists and lies in `Q`.
pub fn le_family(q: &FamilyId, t: &FormSpec, s: &FormSpec) -> Result<bool, FormsGeaError> {
    require(q, t)?;
    require(q, s)?;
    Ok(match ominus_forms(s, t) {
        Ok(Some(r)) => q.contains(&r),
        _ => false,
    })
}

/// Order of `(V_f, ⊕̄)`: `t ⊕̄ (s ⊖ t)` is defined.
pub fn le_bar(t: &FormSpec, s: &FormSpec) -> bool {
    matches!(ominus_forms(s, t), Ok(Some(r)) if oplus_bar(t, &r).is_some())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OpVariant {
    /// `⊕`, restricted to the family.
    Plain,
    /// `⊕̄`, restricted to the family.
    Bar,
    /// The total sum on `V_fD`.
    Total,
}

/// A family of forms with its partial operation, as a [`PartialAlgebra`].
#[derive(Debug, Clone, PartialEq)]
pub struct FormsGea {
    pub family: FamilyId,
    pub variant: OpVariant,
    pub model: Model,
    pub probe: OrderProbe,
}

impl FormsGea {
    pub fn new(family: FamilyId, variant: OpVariant, model: Model) -> FormsGea {
        FormsGea {
            family,
            variant,
            model,
            probe: OrderProbe::default(),
        }
    }

    /// Parses a CLI family id: `vf`, `vf-bar`, `bf`, `rf`, `sf`, `gf`, `cf`,
    /// `vfd:<tag>`.
    pub fn parse(id: &str, model: Model) -> Result<FormsGea, FormsGeaError> {
        if id == "vf-bar" {
            return Ok(FormsGea::new(FamilyId::Vf, OpVariant::Bar, model));
        }
        let family = FamilyId::parse(id)?;
        if let FamilyId::VfD(tag) = &family {
            if !tag.allowed_in(model) || *tag == DomainTag::FullSpace {
                return Err(FormsGeaError::UnknownFamily(id.into()));
            }
            return Ok(FormsGea::new(family, OpVariant::Total, model));
        }
        Ok(FormsGea::new(family, OpVariant::Plain, model))
    }

    pub fn id(&self) -> String {
        match self.variant {
            OpVariant::Bar if self.family == FamilyId::Vf => "vf-bar".into(),
            OpVariant::Bar => format!("{}-bar", self.family.id()),
            _ => self.family.id(),
        }
    }

    /// The default unbounded domain tag of the model.
    pub fn default_tag(model: Model) -> DomainTag {
        match model {
            Model::Sequence => DomainTag::DiagMaximal("j".into()),
            Model::Grid => DomainTag::H1Grid,
        }
    }

    /// The nine form and operator structures checked by the axiom suite.
    pub fn suite(model: Model) -> Vec<FormsGea> {
        let mut v = vec![
            FormsGea::new(FamilyId::Vf, OpVariant::Plain, model),
            FormsGea::new(FamilyId::Vf, OpVariant::Bar, model),
        ];
        for f in [FamilyId::Bf, FamilyId::Rf, FamilyId::Sf, FamilyId::Gf, FamilyId::Cf] {
            v.push(FormsGea::new(f, OpVariant::Plain, model));
        }
        v.push(FormsGea::new(FamilyId::VfD(Self::default_tag(model)), OpVariant::Total, model));
        v
    }
}

impl PartialAlgebra for FormsGea {
    type Elem = FormSpec;

    fn zero(&self) -> FormSpec {
        FormSpec::zero(self.model)
    }

    fn oplus(&self, a: &FormSpec, b: &FormSpec) -> Option<FormSpec> {
        let sum = match self.variant {
            OpVariant::Bar => oplus_bar(a, b),
            OpVariant::Plain | OpVariant::Total => oplus(a, b),
        }?;
        self.family.contains(&sum).then_some(sum)
    }

    fn contains(&self, a: &FormSpec) -> bool {
        a.model() == self.model && self.family.contains(a)
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> FormSpec {
        sample_form(&self.family, self.model, rng)
    }

    fn order_oracle(&self, a: &FormSpec, b: &FormSpec) -> Option<bool> {
        Some(match (self.variant, &self.family) {
            (OpVariant::Bar, FamilyId::Vf) => le_bar(a, b),
            (OpVariant::Bar, q) => matches!(ominus_forms(b, a), Ok(Some(r)) if q.contains(&r) && oplus_bar(a, &r).is_some()),
            (_, FamilyId::Vf) | (OpVariant::Total, _) => le_oplus(a, b, &self.probe).unwrap_or(false),
            (OpVariant::Plain, q) => le_family(q, a, b).unwrap_or(false),
        })
    }

    fn difference_oracle(&self, b: &FormSpec, a: &FormSpec) -> Option<Option<FormSpec>> {
        let r = ominus_forms(b, a).ok().flatten();
        Some(r.filter(|r| self.family.contains(r) && self.oplus(a, r).as_ref() == Some(b)))
    }
}

const COEFFS: [(i64, i64); 8] = [(1, 4), (1, 2), (3, 4), (1, 1), (3, 2), (2, 1), (3, 1), (4, 1)];

fn coeff(rng: &mut ChaCha8Rng) -> Rational {
    let (p, q) = *COEFFS.choose(rng).expect("nonempty");
    Rational::new(p, q)
}

fn bounded_atom(model: Model, rng: &mut ChaCha8Rng) -> FormAtom {
    let pick = match model {
        Model::Sequence => rng.random_range(0..5),
        Model::Grid => rng.random_range(3..5),
    };
    let c = coeff(rng);
    match pick {
        0 => FormAtom::Diag {
            lambda: LambdaFn::Reciprocal,
            coeff: c,
        },
        1 => FormAtom::Diag {
            lambda: LambdaFn::Const(c),
            coeff: Rational::from_integer(1),
        },
        2 => FormAtom::Diag {
            lambda: LambdaFn::Truncated(*[2u32, 3, 5].choose(rng).expect("nonempty")),
            coeff: c,
        },
        3 => FormAtom::BoundedMat {
            gen: Generator::Identity,
            coeff: c,
        },
        _ => FormAtom::BoundedMat {
            gen: Generator::Seeded(rng.random_range(1..4)),
            coeff: c,
        },
    }
}

fn unbounded_atom(model: Model, rng: &mut ChaCha8Rng) -> FormAtom {
    match model {
        Model::Sequence => FormAtom::Diag {
            lambda: if rng.random_bool(0.7) {
                LambdaFn::Linear
            } else {
                LambdaFn::Square
            },
            coeff: coeff(rng),
        },
        Model::Grid => {
            if rng.random_bool(0.5) {
                FormAtom::Dirichlet { c: coeff(rng) }
            } else {
                boundary_atom(rng)
            }
        }
    }
}

fn boundary_atom(rng: &mut ChaCha8Rng) -> FormAtom {
    loop {
        let alpha = if rng.random_bool(0.2) { Rational::zero() } else { coeff(rng) };
        let beta = if rng.random_bool(0.2) { Rational::zero() } else { coeff(rng) };
        if !(alpha.is_zero() && beta.is_zero()) {
            return FormAtom::Boundary { alpha, beta };
        }
    }
}

fn draw_candidate(family: &FamilyId, model: Model, rng: &mut ChaCha8Rng) -> FormSpec {
    if rng.random_bool(0.08) {
        return FormSpec::zero(model);
    }
    let mode = match family {
        FamilyId::Bf => 0,
        FamilyId::Sf => 2,
        FamilyId::Gf if model == Model::Grid => 0,
        _ => match rng.random_range(0..20) {
            0..=7 => 0,
            8..=16 => 1,
            _ => 2,
        },
    };
    let mut atoms = Vec::new();
    let domain;
    match mode {
        0 => {
            for _ in 0..rng.random_range(1..3) {
                atoms.push(bounded_atom(model, rng));
            }
            domain = DomainTag::FullSpace;
        }
        1 => {
            for _ in 0..rng.random_range(1..3) {
                atoms.push(unbounded_atom(model, rng));
            }
            for _ in 0..rng.random_range(0..2) {
                atoms.push(bounded_atom(model, rng));
            }
            domain = match (family, model) {
                (FamilyId::VfD(tag), _) => tag.clone(),
                (_, Model::Grid) => DomainTag::H1Grid,
                (FamilyId::Cf, Model::Sequence) => FormsGea::default_tag(model),
                (_, Model::Sequence) => {
                    if rng.random_bool(0.5) {
                        DomainTag::FiniteSupport
                    } else {
                        FormsGea::default_tag(model)
                    }
                }
            };
        }
        _ => match model {
            Model::Sequence => {
                atoms.push(FormAtom::Hamel { coeff: coeff(rng) });
                if !matches!(family, FamilyId::Sf) && rng.random_bool(0.5) {
                    atoms.push(bounded_atom(model, rng));
                }
                domain = DomainTag::FullSpace;
            }
            Model::Grid => {
                atoms.push(boundary_atom(rng));
                if !matches!(family, FamilyId::Sf) && rng.random_bool(0.5) {
                    atoms.push(bounded_atom(model, rng));
                }
                domain = DomainTag::H1Grid;
            }
        },
    }
    FormSpec::new(model, domain, atoms).unwrap_or_else(|_| FormSpec::zero(model))
}

/// Seeded random member of `family` built from catalog atoms with
/// coefficients in `{1/4, …, 4}`.
pub fn sample_form(family: &FamilyId, model: Model, rng: &mut ChaCha8Rng) -> FormSpec {
    for _ in 0..1000 {
        let t = draw_candidate(family, model, rng);
        if family.contains(&t) {
            return t;
        }
    }
    FormSpec::zero(model)
}

/// A positive operator built from diagonal and bounded atoms, with a
/// domain tag. Bounded operators are everywhere defined.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CatalogOperator {
    form: FormSpec,
}

impl CatalogOperator {
    pub fn new(model: Model, domain: DomainTag, atoms: Vec<FormAtom>) -> Result<CatalogOperator, FormsGeaError> {
        let form = FormSpec::new(model, domain, atoms)?;
        operator_of_form(&form)
    }

    pub fn domain(&self) -> &DomainTag {
        self.form.domain()
    }

    pub fn is_bounded(&self) -> bool {
        self.form.is_bounded()
    }

    pub fn model(&self) -> Model {
        self.form.model()
    }

    /// Matrix of the operator at `level`.
    pub fn matrix_at(&self, level: usize) -> Result<nalgebra::DMatrix<C64>, FormError> {
        representing_operator(&self.form, level)
    }
}

impl Serialize for CatalogOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.form.serialize(s)
    }
}

impl fmt::Display for CatalogOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A[{}]", self.form)
    }
}

/// The form `(A x, y)` on `D(A)`.
pub fn form_of_operator(op: &CatalogOperator) -> FormSpec {
    op.form.clone()
}

/// The generator of a form in `G_f`.
pub fn operator_of_form(t: &FormSpec) -> Result<CatalogOperator, FormsGeaError> {
    if FamilyId::Gf.contains(t) {
        Ok(CatalogOperator { form: t.clone() })
    } else {
        Err(FormsGeaError::NotInGf(t.to_string()))
    }
}

/// `A ⊕_D B`: defined when `A` or `B` is bounded or `D(A) = D(B)`.
pub fn oplus_d(a: &CatalogOperator, b: &CatalogOperator) -> Option<CatalogOperator> {
    oplus(&a.form, &b.form).map(|form| CatalogOperator { form })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsoDirection {
    FormToOperator,
    OperatorToForm,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsoItem {
    Form(FormSpec),
    Operator(CatalogOperator),
}

/// The isomorphism `G_f ≅ V(H)` in either direction.
pub fn gf_vh_iso(direction: IsoDirection, item: &IsoItem) -> Result<IsoItem, FormsGeaError> {
    match (direction, item) {
        (IsoDirection::FormToOperator, IsoItem::Form(t)) => operator_of_form(t).map(IsoItem::Operator),
        (IsoDirection::OperatorToForm, IsoItem::Operator(a)) => Ok(IsoItem::Form(form_of_operator(a))),
        (IsoDirection::FormToOperator, IsoItem::Operator(a)) => Err(FormsGeaError::NotInGf(a.to_string())),
        (IsoDirection::OperatorToForm, IsoItem::Form(t)) => Err(FormsGeaError::NotInGf(t.to_string())),
    }
}

/// `(V(H); ⊕_D, 0)` over catalog operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OperatorGea {
    pub model: Model,
}

impl PartialAlgebra for OperatorGea {
    type Elem = CatalogOperator;

    fn zero(&self) -> CatalogOperator {
        CatalogOperator {
            form: FormSpec::zero(self.model),
        }
    }

    fn oplus(&self, a: &CatalogOperator, b: &CatalogOperator) -> Option<CatalogOperator> {
        oplus_d(a, b)
    }

    fn contains(&self, a: &CatalogOperator) -> bool {
        a.model() == self.model
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> CatalogOperator {
        operator_of_form(&sample_form(&FamilyId::Gf, self.model, rng)).expect("G_f sample")
    }
}

/// A positive self-adjoint operator, represented by its closed form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SaOperator {
    form: FormSpec,
}

impl SaOperator {
    pub fn from_closed_form(t: &FormSpec) -> Result<SaOperator, FormsGeaError> {
        if is_closed(t) && in_vf(t) {
            Ok(SaOperator { form: t.clone() })
        } else {
            Err(FormsGeaError::NotSelfAdjointCatalog(t.to_string()))
        }
    }

    pub fn zero(model: Model) -> SaOperator {
        SaOperator {
            form: FormSpec::zero(model),
        }
    }

    pub fn form(&self) -> &FormSpec {
        &self.form
    }

    /// Matrix of the associated operator at `level`.
    pub fn matrix_at(&self, level: usize) -> Result<nalgebra::DMatrix<C64>, FormError> {
        crate::form::associated_operator(&self.form, level)
    }
}

impl Serialize for SaOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.form.serialize(s)
    }
}

/// Form sum: the operator associated with the sum of the closed forms,
/// defined when that sum is.
pub fn sa_form_sum(a: &SaOperator, b: &SaOperator) -> Result<Option<SaOperator>, FormsGeaError> {
    for x in [a, b] {
        if !is_closed(&x.form) {
            return Err(FormsGeaError::NotSelfAdjointCatalog(x.form.to_string()));
        }
    }
    Ok(oplus(&a.form, &b.form).filter(is_closed).map(|form| SaOperator { form }))
}

/// Positive self-adjoint catalog operators with the form sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SaGea {
    pub model: Model,
}

impl PartialAlgebra for SaGea {
    type Elem = SaOperator;

    fn zero(&self) -> SaOperator {
        SaOperator::zero(self.model)
    }

    fn oplus(&self, a: &SaOperator, b: &SaOperator) -> Option<SaOperator> {
        sa_form_sum(a, b).ok().flatten()
    }

    fn contains(&self, a: &SaOperator) -> bool {
        a.form.model() == self.model && is_closed(&a.form)
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> SaOperator {
        SaOperator {
            form: sample_form(&FamilyId::Cf, self.model, rng),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::catalog::*;
    use rand::SeedableRng;

    fn probe() -> OrderProbe {
        OrderProbe::default()
    }

    #[test]
    fn sums_of_diagonal_forms() {
        let t = linear_diag();
        let two = oplus(&t, &t).unwrap();
        assert_eq!(two, t.scaled(Rational::from_integer(2)).unwrap());
        assert_eq!(oplus(&t, &linear_diag_on_span()), None);
    }

    #[test]
    fn energy_plus_boundary_is_robin() {
        assert_eq!(oplus(&energy_form(), &boundary_form()), Some(robin_form()));
        assert_eq!(oplus_bar(&energy_form(), &boundary_form()), None);
        let b = identity_form(Model::Grid);
        assert_eq!(oplus_bar(&b, &robin_form()), oplus(&b, &robin_form()));
        assert_eq!(oplus_bar(&FormSpec::zero(Model::Grid), &robin_form()), Some(robin_form()));
    }

    #[test]
    fn family_sums() {
        let s = oplus_family(&FamilyId::Cf, &robin_form(), &energy_form()).unwrap().unwrap();
        assert!(is_closed(&s));
        assert!(matches!(
            oplus_family(&FamilyId::Rf, &energy_form(), &boundary_form()),
            Err(FormsGeaError::NotInFamily { .. })
        ));
        let tag = FamilyId::VfD(DomainTag::H1Grid);
        assert!(oplus_family(&tag, &boundary_form(), &energy_form()).unwrap().is_some());
    }

    #[test]
    fn order_examples() {
        let p = probe();
        assert!(preceq(&FormSpec::zero(Model::Grid), &robin_form(), &p).unwrap());
        assert!(preceq(&energy_form(), &robin_form(), &p).unwrap());
        assert!(!preceq(&robin_form(), &energy_form(), &p).unwrap());
        assert!(le_oplus(&truncated_diag(4), &linear_diag(), &p).unwrap());
        assert!(!le_oplus(&linear_diag(), &linear_diag_on_span(), &p).unwrap());
        assert!(!le_oplus(&linear_diag_on_span(), &linear_diag(), &p).unwrap());
        assert!(preceq(&linear_diag(), &linear_diag_on_span(), &p).unwrap());
        assert!(le_oplus(&linear_diag(), &linear_diag(), &p).unwrap());
    }

    #[test]
    fn closed_family_order() {
        assert!(!le_family(&FamilyId::Cf, &energy_form(), &robin_form()).unwrap());
        assert!(le_family(&FamilyId::Cf, &robin_form(), &shifted_term(1)).unwrap());
        assert!(le_family(&FamilyId::Cf, &FormSpec::zero(Model::Grid), &robin_form()).unwrap());
    }

    #[test]
    fn differences() {
        let d = ominus_forms(&shifted_term(3), &robin_form()).unwrap().unwrap();
        assert_eq!(d, energy_form().scaled(Rational::new(1, 3)).unwrap());
        assert_eq!(ominus_forms(&robin_form(), &robin_form()).unwrap(), Some(FormSpec::zero(Model::Grid)));
        assert_eq!(ominus_forms(&robin_form(), &energy_form()).unwrap(), Some(boundary_form()));
        assert!(matches!(
            ominus_forms(&energy_form(), &robin_form()),
            Err(FormError::NegativeCoefficient(_))
        ));
    }

    #[test]
    fn iso_round_trip() {
        let t = linear_diag();
        let IsoItem::Operator(a) = gf_vh_iso(IsoDirection::FormToOperator, &IsoItem::Form(t.clone())).unwrap() else {
            panic!()
        };
        assert_eq!(a.domain(), &DomainTag::DiagMaximal("j".into()));
        assert_eq!(gf_vh_iso(IsoDirection::OperatorToForm, &IsoItem::Operator(a)).unwrap(), IsoItem::Form(t));
        assert!(matches!(operator_of_form(&robin_form()), Err(FormsGeaError::NotInGf(_))));
    }

    #[test]
    fn form_sums_of_self_adjoint_operators() {
        let dm = DomainTag::DiagMaximal("j".into());
        let a = SaOperator::from_closed_form(&diag_form(LambdaFn::Linear, dm.clone())).unwrap();
        let b = SaOperator::from_closed_form(&diag_form(LambdaFn::Square, dm.clone())).unwrap();
        let s = sa_form_sum(&a, &b).unwrap().unwrap();
        let m = s.matrix_at(3).unwrap();
        assert_eq!(m[(2, 2)], C64::new(12.0, 0.0));
        let inv = SaOperator::from_closed_form(&diag_form(LambdaFn::Reciprocal, DomainTag::FullSpace)).unwrap();
        let s = sa_form_sum(&a, &inv).unwrap().unwrap();
        assert_eq!(s.matrix_at(2).unwrap()[(1, 1)], C64::new(2.5, 0.0));
        assert_eq!(sa_form_sum(&SaOperator::zero(Model::Sequence), &a).unwrap(), Some(a));
        assert!(SaOperator::from_closed_form(&linear_diag_on_span()).is_err());
    }

    #[test]
    fn samplers_produce_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for model in [Model::Sequence, Model::Grid] {
            for gea in FormsGea::suite(model) {
                for _ in 0..50 {
                    let t = gea.sample(&mut rng);
                    assert!(gea.contains(&t), "{} produced {t}", gea.id());
                }
            }
        }
    }

    #[test]
    fn parse_family_ids() {
        for id in ["vf", "vf-bar", "bf", "rf", "sf", "gf", "cf"] {
            assert_eq!(FormsGea::parse(id, Model::Grid).unwrap().id(), id);
        }
        assert_eq!(FormsGea::parse("vfd:h1", Model::Grid).unwrap().id(), "vfd:h1");
        assert!(FormsGea::parse("vfd:h1", Model::Sequence).is_err());
        assert!(FormsGea::parse("xx", Model::Grid).is_err());
    }

    #[test]
    fn every_structure_satisfies_the_axioms_on_samples() {
        use crate::kernel::{check_axioms, CheckStrategy};
        for seed in [1, 2, 3] {
            let strategy = CheckStrategy::Sampled { n: 500, seed };
            for model in [Model::Sequence, Model::Grid] {
                for gea in FormsGea::suite(model) {
                    let r = check_axioms(&gea, strategy).unwrap();
                    assert!(r.all_pass(), "{} {:?}: {:?}", gea.id(), model, r.verdicts);
                }
                assert!(check_axioms(&SaGea { model }, strategy).unwrap().all_pass());
                assert!(check_axioms(&OperatorGea { model }, strategy).unwrap().all_pass());
            }
        }
    }
}
