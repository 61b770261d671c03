//! Regular/singular splitting, closedness and the singularity criterion.

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;
use serde::Serialize;

use super::eval::{check_model, matrix_at, representing_operator};
use super::{DomainTag, FormAtom, FormError, FormSpec};
use crate::hilbert::{weighted_inner, Model, ModelVector};
use crate::linalg::{eigen, C64};

/// `(t_r, t_s)` with `t = t_r + t_s`.
///
/// The split is a whole-form rule: a positive Dirichlet coefficient makes the
/// grid form closed, boundary terms included, so nothing is singular. Without
/// it the boundary terms form the singular part. Diagonal and bounded atoms are
/// regular. The Hamel form is purely singular.
pub fn reg_sing_split(t: &FormSpec) -> Result<(FormSpec, FormSpec), FormError> {
    let model = t.model();
    let o = FormSpec::zero(model);
    match model {
        Model::Grid => {
            if t.atoms().iter().any(|a| matches!(a, FormAtom::Dirichlet { .. })) {
                return Ok((t.clone(), o));
            }
            let (singular, regular) = t.partition(|a| matches!(a, FormAtom::Boundary { .. }));
            if singular.is_empty() {
                return Ok((t.clone(), o));
            }
            let regular = FormSpec::new(model, DomainTag::FullSpace, regular)?;
            let singular = FormSpec::new(model, t.domain().clone(), singular)?;
            Ok((regular, singular))
        }
        Model::Sequence => {
            if !t.has_hamel() {
                return Ok((t.clone(), o));
            }
            let (singular, regular) = t.partition(|a| matches!(a, FormAtom::Hamel { .. }));
            if regular.iter().any(|a| !a.is_bounded()) {
                return Err(FormError::OutsideCatalog);
            }
            Ok((
                FormSpec::new(model, DomainTag::FullSpace, regular)?,
                FormSpec::new(model, DomainTag::FullSpace, singular)?,
            ))
        }
    }
}

pub fn is_regular(t: &FormSpec) -> bool {
    reg_sing_split(t).map(|(_, s)| s.is_zero()).unwrap_or(false)
}

pub fn is_singular(t: &FormSpec) -> bool {
    reg_sing_split(t).map(|(r, _)| r.is_zero()).unwrap_or(false)
}

/// Catalog closedness rule.
///
/// Closed: bounded forms on the whole space, diagonal forms on their maximal
/// domain, grid forms with a positive Dirichlet coefficient. Everything else
/// (finite-support restrictions, boundary-only forms, bounded forms on a
/// proper domain, the Hamel form) is not closed.
pub fn is_closed(t: &FormSpec) -> bool {
    if t.has_hamel() {
        return false;
    }
    if t.is_bounded() {
        return *t.domain() == DomainTag::FullSpace;
    }
    match t.model() {
        Model::Grid => t.atoms().iter().any(|a| matches!(a, FormAtom::Dirichlet { .. })),
        Model::Sequence => matches!(t.domain(), DomainTag::DiagMaximal(_)),
    }
}

/// A vector `y` with `t(y,y) < |(x,y)|²`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularityWitness {
    #[serde(skip)]
    pub y: DVector<C64>,
    pub form_value: f64,
    pub overlap: f64,
    /// `t(y,y) / |(x,y)|²`, below 1 for a witness.
    pub ratio: f64,
}

/// Searches for `y` with `t(y,y) < |(x,y)|²`.
///
/// Boundary-only grid forms use `y = x` with the endpoint values zeroed.
/// Otherwise the ratio `t(y,y)/|(x,y)|²` is minimized exactly through the
/// eigen-decomposition of the form matrix. `Ok(None)` means no witness at
/// this level, which is not a proof that none exists.
pub fn singularity_witness<V: ModelVector>(t: &FormSpec, x: &V, level: usize) -> Result<Option<SingularityWitness>, FormError> {
    check_model(t, x)?;
    let model = t.model();
    let xc = x.coords();
    if xc.len() != model.dim(level) {
        return Err(FormError::DimensionMismatch {
            expected: model.dim(level),
            got: xc.len(),
        });
    }
    if xc.iter().all(|z| z.is_zero()) {
        return Err(FormError::ZeroVector);
    }
    let m = matrix_at(t, level)?;
    let boundary_only = model == Model::Grid
        && !t.is_zero()
        && t.atoms().iter().all(|a| matches!(a, FormAtom::Boundary { .. }));
    if boundary_only {
        let mut y = xc.clone();
        let last = y.len() - 1;
        y[0] = C64::zero();
        y[last] = C64::zero();
        if let Some(w) = witness_from(&m, model, level, xc, y)? {
            return Ok(Some(w));
        }
    }
    minimize_ratio(&m, model, level, xc)
}

fn witness_from(
    m: &DMatrix<C64>,
    model: Model,
    level: usize,
    x: &DVector<C64>,
    y: DVector<C64>,
) -> Result<Option<SingularityWitness>, FormError> {
    let overlap = weighted_inner(model, level, x, &y).expect("dimensions agree").norm_sqr();
    if overlap == 0.0 {
        return Ok(None);
    }
    let form_value = y.dotc(&(m * &y)).re.max(0.0);
    let ratio = form_value / overlap;
    Ok((ratio < 1.0).then_some(SingularityWitness {
        y,
        form_value,
        overlap,
        ratio,
    }))
}

fn minimize_ratio(
    m: &DMatrix<C64>,
    model: Model,
    level: usize,
    x: &DVector<C64>,
) -> Result<Option<SingularityWitness>, FormError> {
    let weights = model.weights(level);
    let wx = DVector::from_fn(x.len(), |i, _| x[i] * weights[i]);
    let (vals, vecs) = eigen(m)?;
    let top = vals.last().copied().unwrap_or(0.0).abs().max(1.0);
    let kernel_tol = 1e-12 * top;
    let wnorm = wx.norm();

    // A component of Wx in the kernel of M drives the ratio to zero.
    let mut kernel_part = DVector::from_element(x.len(), C64::zero());
    let mut pinv_part = DVector::from_element(x.len(), C64::zero());
    for (i, &lambda) in vals.iter().enumerate() {
        let v = vecs.column(i);
        let c = v.dotc(&wx);
        if lambda <= kernel_tol {
            kernel_part += v * c;
        } else {
            pinv_part += v * (c / lambda);
        }
    }
    let y = if kernel_part.norm() > 1e-10 * wnorm {
        kernel_part
    } else {
        pinv_part
    };
    witness_from(m, model, level, x, y)
}

/// The unique bounded extension of a bounded form to the whole space: the
/// same atoms on `FullSpace`.
pub fn extend_bounded(t: &FormSpec) -> Result<FormSpec, FormError> {
    if !t.is_bounded() {
        return Err(FormError::UnboundedForm);
    }
    t.with_domain(DomainTag::FullSpace)
}

/// Positive self-adjoint operator of a closed form at `level` (`W⁻¹ M`).
pub fn associated_operator(t: &FormSpec, level: usize) -> Result<DMatrix<C64>, FormError> {
    if !is_closed(t) {
        return Err(FormError::NotClosed);
    }
    representing_operator(t, level)
}
