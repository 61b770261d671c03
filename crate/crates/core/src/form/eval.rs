//! Matrix realization of forms at a truncation level.
//!
//! At level `L` a form is the Hermitian matrix `M` with
//! `t(x, y) = conj(y)ᵀ M x` on the level's coordinates. Boundary values are
//! read directly from the endpoint nodes.

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::{FormAtom, FormError, FormSpec, Generator, Rational};
use crate::hilbert::{mesh_width, weighted_inner, Model, ModelVector, TestVectorGen};
use crate::linalg::{weighted_extremes, C64};

/// Largest level at which a pure-diagonal form is realized by its diagonal
/// only (no dense matrix).
const DIAG_PROBE_LIMIT: usize = 1 << 16;

pub(crate) fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Seeded Hermitian PSD matrix `B B* / ‖B B*‖_F`, spectral norm ≤ 1.
pub fn seeded_generator(seed: u64, dim: usize) -> DMatrix<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (dim as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let b = DMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        C64::new(re, im)
    });
    let g = &b * b.adjoint();
    let n = g.norm();
    let g = g / real(n);
    // Symmetrize away rounding so the matrix is exactly Hermitian.
    (&g + g.adjoint()) / real(2.0)
}

/// Unnormalized first-difference stiffness matrix `(1/h)·tridiag(-1, 2, -1)`
/// with corner entries `1`.
pub fn stiffness(m: usize) -> DMatrix<C64> {
    let n = m + 2;
    let inv_h = 1.0 / mesh_width(m);
    let mut k = DMatrix::from_element(n, n, real(0.0));
    for i in 0..n - 1 {
        k[(i, i)] += real(inv_h);
        k[(i + 1, i + 1)] += real(inv_h);
        k[(i, i + 1)] -= real(inv_h);
        k[(i + 1, i)] -= real(inv_h);
    }
    k
}

fn atom_matrix(atom: &FormAtom, model: Model, level: usize) -> Result<DMatrix<C64>, FormError> {
    let n = model.dim(level);
    let w = model.weights(level);
    Ok(match atom {
        FormAtom::Diag { lambda, coeff } => {
            let c = to_f64(coeff);
            DMatrix::from_diagonal(&DVector::from_fn(n, |j, _| real(c * lambda.value(j + 1))))
        }
        FormAtom::Dirichlet { c } => stiffness(level) * real(to_f64(c)),
        FormAtom::Boundary { alpha, beta } => {
            let mut b = DMatrix::from_element(n, n, real(0.0));
            b[(0, 0)] = real(to_f64(alpha));
            b[(n - 1, n - 1)] = real(to_f64(beta));
            b
        }
        FormAtom::BoundedMat { gen, coeff } => {
            let c = to_f64(coeff);
            let g = match gen {
                Generator::Identity => DMatrix::identity(n, n).map(real),
                Generator::Seeded(s) => seeded_generator(*s, n),
            };
            // Realize G in the weighted coordinates: W^{1/2} G W^{1/2}.
            let s = w.map(f64::sqrt);
            DMatrix::from_fn(n, n, |i, j| g[(i, j)] * (c * s[i] * s[j]))
        }
        FormAtom::Hamel { .. } => return Err(FormError::SymbolicForm),
        FormAtom::Zero => DMatrix::from_element(n, n, real(0.0)),
    })
}

/// Hermitian matrix of `t` at `level`.
pub fn matrix_at(t: &FormSpec, level: usize) -> Result<DMatrix<C64>, FormError> {
    let n = t.model().dim(level);
    let mut m = DMatrix::from_element(n, n, real(0.0));
    for atom in t.atoms() {
        m += atom_matrix(atom, t.model(), level)?;
    }
    Ok(m)
}

/// Diagonal of `t` at `level` when every atom is diagonal.
fn diagonal_values(t: &FormSpec, level: usize) -> Option<Vec<f64>> {
    let mut d = vec![0.0; t.model().dim(level)];
    for atom in t.atoms() {
        match (atom, t.model()) {
            (FormAtom::Diag { lambda, coeff }, _) => {
                let c = to_f64(coeff);
                for (j, v) in d.iter_mut().enumerate() {
                    *v += c * lambda.value(j + 1);
                }
            }
            (
                FormAtom::BoundedMat {
                    gen: Generator::Identity,
                    coeff,
                },
                Model::Sequence,
            ) => {
                let c = to_f64(coeff);
                d.iter_mut().for_each(|v| *v += c);
            }
            _ => return None,
        }
    }
    Some(d)
}

/// Brings `x` to the level's coordinate count. Finite-support forms accept
/// longer vectors whose tail beyond `level` vanishes.
fn conform(t: &FormSpec, x: &DVector<C64>, level: usize) -> Result<DVector<C64>, FormError> {
    let dim = t.model().dim(level);
    if x.len() == dim {
        return Ok(x.clone());
    }
    if *t.domain() == super::DomainTag::FiniteSupport && x.len() > dim {
        if x.iter().skip(dim).all(|z| z.is_zero()) {
            return Ok(x.rows(0, dim).into_owned());
        }
        return Err(FormError::DomainViolation { level });
    }
    Err(FormError::DimensionMismatch {
        expected: dim,
        got: x.len(),
    })
}

/// `t(x, y)` on raw coordinates.
pub fn evaluate_coords(t: &FormSpec, x: &DVector<C64>, y: &DVector<C64>, level: usize) -> Result<C64, FormError> {
    let x = conform(t, x, level)?;
    let y = conform(t, y, level)?;
    let m = matrix_at(t, level)?;
    Ok(y.dotc(&(m * x)))
}

/// `t(x, y)`, linear in `x` and antilinear in `y`.
pub fn evaluate<V: ModelVector>(t: &FormSpec, x: &V, y: &V, level: usize) -> Result<C64, FormError> {
    check_model(t, x)?;
    evaluate_coords(t, x.coords(), y.coords(), level)
}

/// `t(x, x)`.
pub fn quadratic<V: ModelVector>(t: &FormSpec, x: &V, level: usize) -> Result<f64, FormError> {
    Ok(evaluate(t, x, x, level)?.re)
}

pub(crate) fn check_model<V: ModelVector>(t: &FormSpec, x: &V) -> Result<(), FormError> {
    if x.model() != t.model() {
        return Err(FormError::ModelMismatch {
            atom: format!("{} vector", x.model().name()),
            model: t.model().name(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NumericalRange {
    /// `m_t`: least value of `t(x,x)` on unit vectors at this level.
    pub min: f64,
    /// `n_t`: largest value of `t(x,x)` on unit vectors at this level.
    pub max: f64,
}

/// Extreme values of `t(x,x)/‖x‖²` at `level`.
pub fn numerical_range_bounds(t: &FormSpec, level: usize) -> Result<NumericalRange, FormError> {
    let (min, max) = match diagonal_values(t, level) {
        Some(d) => (
            d.iter().copied().fold(f64::INFINITY, f64::min),
            d.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ),
        None => weighted_extremes(&matrix_at(t, level)?, &t.model().weights(level)),
    };
    let (min, max) = if t.is_zero() { (0.0, 0.0) } else { (min, max) };
    if min < -1e-9 * max.abs().max(1.0) {
        return Err(FormError::NotPositive { min });
    }
    Ok(NumericalRange { min, max })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundedness {
    Bounded,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundednessProbe {
    pub verdict: Boundedness,
    pub levels: Vec<usize>,
    /// `n_t` at each probe level (empty for symbolic forms).
    pub sup_values: Vec<f64>,
    pub growth: f64,
}

/// Growth factor of `n_t` across probe levels that marks a form unbounded.
pub const GROWTH_THRESHOLD: f64 = 1.5;

/// Probe levels for `t`, doubled until the first one passes every
/// truncation cut.
pub fn probe_levels(t: &FormSpec) -> Vec<usize> {
    let mut levels = t.model().default_levels();
    let cut = t.max_cut();
    while levels[0] < cut && levels[2] * 2 <= DIAG_PROBE_LIMIT {
        levels.iter_mut().for_each(|l| *l *= 2);
    }
    levels
}

/// Declared boundedness, cross-checked against the growth of `n_t` over
/// three levels.
pub fn classify_boundedness(t: &FormSpec) -> Result<BoundednessProbe, FormError> {
    let verdict = if t.is_bounded() {
        Boundedness::Bounded
    } else {
        Boundedness::Unbounded
    };
    if t.has_hamel() {
        return Ok(BoundednessProbe {
            verdict,
            levels: vec![],
            sup_values: vec![],
            growth: f64::NAN,
        });
    }
    let levels = probe_levels(t);
    let sup_values = levels
        .iter()
        .map(|&l| numerical_range_bounds(t, l).map(|r| r.max))
        .collect::<Result<Vec<_>, _>>()?;
    let (first, last) = (sup_values[0], sup_values[sup_values.len() - 1]);
    let growth = if first > 1e-300 {
        last / first
    } else if last > 1e-300 {
        f64::INFINITY
    } else {
        1.0
    };
    let empirical = if growth >= GROWTH_THRESHOLD {
        Boundedness::Unbounded
    } else {
        Boundedness::Bounded
    };
    if empirical != verdict {
        return Err(FormError::ClassificationMismatch {
            declared: if verdict == Boundedness::Bounded {
                "bounded"
            } else {
                "unbounded"
            },
            growth,
            levels,
        });
    }
    Ok(BoundednessProbe {
        verdict,
        levels,
        sup_values,
        growth,
    })
}

/// Operator `A` with `t(x, y) = (A x, y)` at `level`, i.e. `W⁻¹ M`.
pub fn riesz_operator_of_bounded(t: &FormSpec, level: usize) -> Result<DMatrix<C64>, FormError> {
    if !t.is_bounded() || t.has_hamel() {
        return Err(FormError::UnboundedForm);
    }
    let a = representing_operator(t, level)?;
    let residual = riesz_residual(t, &a, level, 8, 0x5eed)?;
    if residual > 1e-10 {
        return Err(FormError::RieszResidual(residual));
    }
    Ok(a)
}

pub(crate) fn representing_operator(t: &FormSpec, level: usize) -> Result<DMatrix<C64>, FormError> {
    let m = matrix_at(t, level)?;
    let w = t.model().weights(level);
    Ok(DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] / real(w[i])))
}

/// Largest relative mismatch `|t(x,y) − (A x, y)|` over `samples` seeded
/// random pairs.
pub fn riesz_residual(t: &FormSpec, a: &DMatrix<C64>, level: usize, samples: usize, seed: u64) -> Result<f64, FormError> {
    let mut gen = TestVectorGen::new(seed);
    let model = t.model();
    let dim = model.dim(level);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x = gen.complex_normal(dim);
        let y = gen.complex_normal(dim);
        let direct = evaluate_coords(t, &x, &y, level)?;
        let via = weighted_inner(model, level, &(a * &x), &y).expect("dimensions agree");
        let scale = direct.norm().max(1.0);
        worst = worst.max((direct - via).norm() / scale);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::catalog::*;
    use crate::form::{DomainTag, LambdaFn};
    use crate::hilbert::{dirichlet_energy, GridFunction, SeqVector};

    #[test]
    fn diag_matrix_is_the_coefficient_list() {
        let m = matrix_at(&linear_diag(), 3).unwrap();
        assert_eq!(m, DMatrix::from_diagonal(&DVector::from_vec(vec![real(1.), real(2.), real(3.)])));
        let z = matrix_at(&FormSpec::zero(Model::Sequence), 4).unwrap();
        assert!(z.iter().all(|v| v.is_zero()));
    }

    #[test]
    fn robin_form_on_the_identity_function() {
        let u = GridFunction::from_real_fn(9, |x| x);
        assert!((quadratic(&robin_form(), &u, 9).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn constants_see_only_the_boundary() {
        for n in [1, 2, 7, 32] {
            let one = GridFunction::from_real_fn(49, |_| 1.0);
            assert!((quadratic(&kato_term(n), &one, 49).unwrap() - 2.0).abs() < 1e-12);
        }
        let one = GridFunction::from_real_fn(9, |_| 1.0);
        assert_eq!(quadratic(&boundary_form(), &one, 9).unwrap(), 2.0);
    }

    #[test]
    fn stiffness_reproduces_dirichlet_energy() {
        let mut g = TestVectorGen::new(4);
        let u = g.unit_grid(19);
        let e = dirichlet_energy(&u);
        let q = quadratic(&energy_form(), &u, 19).unwrap();
        assert!((e - q).abs() < 1e-10 * e);
    }

    #[test]
    fn numerical_ranges() {
        assert_eq!(
            numerical_range_bounds(&linear_diag(), 5).unwrap(),
            NumericalRange { min: 1.0, max: 5.0 }
        );
        assert_eq!(
            numerical_range_bounds(&FormSpec::zero(Model::Grid), 9).unwrap(),
            NumericalRange { min: 0.0, max: 0.0 }
        );
        for l in [8, 16, 32] {
            assert_eq!(numerical_range_bounds(&linear_diag(), l).unwrap().max, l as f64);
        }
        let id = numerical_range_bounds(&identity_form(Model::Grid), 49).unwrap();
        assert!((id.min - 1.0).abs() < 1e-12 && (id.max - 1.0).abs() < 1e-12);
    }

    #[test]
    fn boundedness_matches_declarations() {
        for (name, t) in catalog_forms() {
            if t.has_hamel() {
                continue;
            }
            let p = classify_boundedness(&t).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(p.verdict == Boundedness::Bounded, t.is_bounded(), "{name}");
        }
        let cut = truncated_diag(100);
        assert_eq!(classify_boundedness(&cut).unwrap().verdict, Boundedness::Bounded);
        assert_eq!(
            classify_boundedness(&hamel_form()).unwrap().verdict,
            Boundedness::Unbounded
        );
    }

    #[test]
    fn finite_support_accepts_zero_tails_only() {
        let t = linear_diag_on_span();
        let x = SeqVector::from_real(&[1.0, 2.0, 0.0, 0.0]);
        assert_eq!(quadratic(&t, &x, 2).unwrap(), 1.0 + 8.0);
        let y = SeqVector::from_real(&[1.0, 2.0, 0.0, 1.0]);
        assert_eq!(quadratic(&t, &y, 2), Err(FormError::DomainViolation { level: 2 }));
        let full = linear_diag();
        assert!(matches!(
            quadratic(&full, &x, 2),
            Err(FormError::DimensionMismatch { expected: 2, got: 4 })
        ));
    }

    #[test]
    fn riesz_operators() {
        let a = riesz_operator_of_bounded(&identity_form(Model::Grid), 9).unwrap();
        assert!((a - DMatrix::identity(11, 11).map(real)).norm() < 1e-12);
        let inv = diag_form(LambdaFn::Reciprocal, DomainTag::FullSpace);
        let a = riesz_operator_of_bounded(&inv, 4).unwrap();
        let expected = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.5, 1.0 / 3.0, 0.25]).map(real));
        assert!((a - expected).norm() < 1e-15);
        assert_eq!(riesz_operator_of_bounded(&robin_form(), 9), Err(FormError::UnboundedForm));
    }

    #[test]
    fn seeded_generator_is_psd_and_contractive() {
        let g = seeded_generator(17, 12);
        let vals = crate::linalg::eigenvalues(&g);
        assert!(vals[0] > -1e-12);
        assert!(vals[11] <= 1.0 + 1e-12);
        assert_eq!(g, seeded_generator(17, 12));
    }

    #[test]
    fn model_mismatch_is_reported() {
        let x = SeqVector::basis(3, 1);
        assert!(matches!(
            quadratic(&robin_form(), &x, 3),
            Err(FormError::ModelMismatch { .. })
        ));
    }
}
