//! Named forms used throughout the experiments.
//!
//! Grid forms (on `L²(0,1)`):
//!
//! | name | form |
//! |------|------|
//! | [`kato_term`]`(n)` | `(1/n)∫|u′|² + |u(0)|² + |u(1)|²` |
//! | [`boundary_form`] | `|u(0)|² + |u(1)|²` |
//! | [`robin_form`] | `∫|u′|² + |u(0)|² + |u(1)|²` |
//! | [`energy_form`] | `∫|u′|²` |
//! | [`shifted_term`]`(n)` | `(1 + 1/n)∫|u′|² + |u(0)|² + |u(1)|²` |
//! | [`complement_term`]`(n)` | `(1 − 1/n)∫|u′|²` |
//!
//! Sequence forms use diagonal atoms `Σ λ_j |x_j|²`.

use num_traits::One;

use super::{DomainTag, FormAtom, FormSpec, Generator, LambdaFn, Rational};
use crate::hilbert::Model;

fn r(p: i64, q: i64) -> Rational {
    Rational::new(p, q)
}

/// Grid form with the given parameters; `FullSpace` when bounded, `H1Grid`
/// otherwise.
pub fn grid_form(c: Rational, alpha: Rational, beta: Rational) -> FormSpec {
    FormSpec::natural(
        Model::Grid,
        DomainTag::H1Grid,
        vec![FormAtom::dirichlet(c), FormAtom::boundary(alpha, beta)],
    )
    .expect("nonnegative grid parameters")
}

pub fn kato_term(n: u32) -> FormSpec {
    grid_form(r(1, n as i64), Rational::one(), Rational::one())
}

pub fn boundary_form() -> FormSpec {
    grid_form(r(0, 1), Rational::one(), Rational::one())
}

pub fn robin_form() -> FormSpec {
    grid_form(Rational::one(), Rational::one(), Rational::one())
}

pub fn energy_form() -> FormSpec {
    grid_form(Rational::one(), r(0, 1), r(0, 1))
}

pub fn shifted_term(n: u32) -> FormSpec {
    grid_form(r(n as i64 + 1, n as i64), Rational::one(), Rational::one())
}

pub fn complement_term(n: u32) -> FormSpec {
    grid_form(r(n as i64 - 1, n as i64), r(0, 1), r(0, 1))
}

/// `Σ λ_j |x_j|²` on `domain`.
pub fn diag_form(lambda: LambdaFn, domain: DomainTag) -> FormSpec {
    FormSpec::new(Model::Sequence, domain, vec![FormAtom::diag(lambda)]).expect("valid diagonal form")
}

/// `Σ j|x_j|²` on the maximal domain of the diagonal operator `e_j ↦ j e_j`.
pub fn linear_diag() -> FormSpec {
    diag_form(LambdaFn::Linear, DomainTag::DiagMaximal("j".into()))
}

/// The same quadratic expression restricted to finitely supported vectors.
pub fn linear_diag_on_span() -> FormSpec {
    diag_form(LambdaFn::Linear, DomainTag::FiniteSupport)
}

/// `Σ_{j≤n} j|x_j|²` on the whole space.
pub fn truncated_diag(n: u32) -> FormSpec {
    diag_form(LambdaFn::Truncated(n), DomainTag::FullSpace)
}

/// `(x, y)` in either model.
pub fn identity_form(model: Model) -> FormSpec {
    FormSpec::new(model, DomainTag::FullSpace, vec![FormAtom::bounded(Generator::Identity)]).expect("bounded")
}

/// `(G x, y)` for the seeded PSD generator `G`.
pub fn seeded_form(model: Model, seed: u64) -> FormSpec {
    FormSpec::new(model, DomainTag::FullSpace, vec![FormAtom::bounded(Generator::Seeded(seed))]).expect("bounded")
}

/// The everywhere-defined singular form built on a Hamel basis. It is
/// symbolic: there is no matrix realization.
pub fn hamel_form() -> FormSpec {
    FormSpec::new(
        Model::Sequence,
        DomainTag::FullSpace,
        vec![FormAtom::Hamel { coeff: Rational::one() }],
    )
    .expect("symbolic form")
}

/// Forms that every suite sweeps over, with display names.
pub fn catalog_forms() -> Vec<(&'static str, FormSpec)> {
    vec![
        ("zero-seq", FormSpec::zero(Model::Sequence)),
        ("zero-grid", FormSpec::zero(Model::Grid)),
        ("diag-j", linear_diag()),
        ("diag-j-span", linear_diag_on_span()),
        ("diag-j2", diag_form(LambdaFn::Square, DomainTag::DiagMaximal("j^2".into()))),
        ("diag-inv", diag_form(LambdaFn::Reciprocal, DomainTag::FullSpace)),
        ("diag-trunc-5", truncated_diag(5)),
        ("identity-seq", identity_form(Model::Sequence)),
        ("seeded-seq", seeded_form(Model::Sequence, 17)),
        ("identity-grid", identity_form(Model::Grid)),
        ("seeded-grid", seeded_form(Model::Grid, 17)),
        ("boundary", boundary_form()),
        ("robin", robin_form()),
        ("energy", energy_form()),
        ("kato-4", kato_term(4)),
        ("shifted-2", shifted_term(2)),
    ]
}
