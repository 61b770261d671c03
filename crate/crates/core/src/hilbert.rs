//! Finite truncations of the two Hilbert-space models.
//!
//! * Sequence model: `ℓ²` cut to `ℂ^L` with the standard basis `e_1..e_L`.
//! * Grid model: `L²(0,1)` sampled at nodes `x_k = k·h`, `h = 1/(M+1)`,
//!   `k = 0..=M+1`, with the trapezoid inner product.
//!
//! A "level" is `L` for the sequence model and the interior node count `M`
//! for the grid model.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type C64 = Complex64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HilbertError {
    #[error("vectors have dimensions {0} and {1}")]
    DimensionMismatch(usize, usize),
    #[error("vectors belong to different models")]
    ModelMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Sequence,
    Grid,
}

impl Model {
    /// Number of coordinates at `level`.
    pub fn dim(self, level: usize) -> usize {
        match self {
            Model::Sequence => level,
            Model::Grid => level + 2,
        }
    }

    /// Quadrature weights of the inner product at `level`.
    pub fn weights(self, level: usize) -> DVector<f64> {
        match self {
            Model::Sequence => DVector::from_element(level, 1.0),
            Model::Grid => {
                let h = mesh_width(level);
                let mut w = DVector::from_element(level + 2, h);
                w[0] = h / 2.0;
                w[level + 1] = h / 2.0;
                w
            }
        }
    }

    /// Default truncation levels used by order checks.
    pub fn default_levels(self) -> Vec<usize> {
        match self {
            Model::Sequence => vec![8, 16, 32],
            Model::Grid => vec![9, 49, 199],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Model::Sequence => "sequence",
            Model::Grid => "grid",
        }
    }
}

/// `h = 1/(M+1)`.
pub fn mesh_width(m: usize) -> f64 {
    1.0 / (m as f64 + 1.0)
}

/// A vector of one of the two models at a fixed level.
pub trait ModelVector {
    fn model(&self) -> Model;
    fn level(&self) -> usize;
    fn coords(&self) -> &DVector<C64>;

    /// `(self, other)`, linear in `self` and antilinear in `other`.
    fn inner(&self, other: &Self) -> Result<C64, HilbertError>
    where
        Self: Sized,
    {
        if self.model() != other.model() {
            return Err(HilbertError::ModelMismatch);
        }
        weighted_inner(self.model(), self.level(), self.coords(), other.coords())
    }

    fn norm(&self) -> f64 {
        let w = self.model().weights(self.level());
        self.coords()
            .iter()
            .zip(w.iter())
            .map(|(z, w)| w * z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Weighted inner product of raw coordinate vectors.
pub fn weighted_inner(model: Model, level: usize, x: &DVector<C64>, y: &DVector<C64>) -> Result<C64, HilbertError> {
    if x.len() != y.len() {
        return Err(HilbertError::DimensionMismatch(x.len(), y.len()));
    }
    if x.len() != model.dim(level) {
        return Err(HilbertError::DimensionMismatch(x.len(), model.dim(level)));
    }
    let w = model.weights(level);
    Ok(x.iter().zip(y.iter()).zip(w.iter()).map(|((a, b), w)| a * b.conj() * *w).sum())
}

/// Element of `ℂ^L ⊂ ℓ²`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeqVector {
    coords: DVector<C64>,
}

impl SeqVector {
    pub fn new(coords: DVector<C64>) -> Self {
        SeqVector { coords }
    }

    pub fn from_real(values: &[f64]) -> Self {
        SeqVector::new(DVector::from_iterator(values.len(), values.iter().map(|&v| C64::new(v, 0.0))))
    }

    /// `e_j` (1-based) at `level`.
    pub fn basis(level: usize, j: usize) -> Self {
        assert!((1..=level).contains(&j), "basis index {j} outside 1..={level}");
        let mut c = DVector::from_element(level, C64::new(0.0, 0.0));
        c[j - 1] = C64::new(1.0, 0.0);
        SeqVector::new(c)
    }
}

impl ModelVector for SeqVector {
    fn model(&self) -> Model {
        Model::Sequence
    }
    fn level(&self) -> usize {
        self.coords.len()
    }
    fn coords(&self) -> &DVector<C64> {
        &self.coords
    }
}

/// Nodal values `u(x_0), …, u(x_{M+1})` of a function on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: DVector<C64>,
}

impl GridFunction {
    /// Wraps `M + 2` nodal values.
    pub fn new(values: DVector<C64>) -> Self {
        assert!(values.len() >= 2, "grid functions need both endpoints");
        GridFunction { values }
    }

    pub fn from_fn(m: usize, f: impl Fn(f64) -> C64) -> Self {
        let h = mesh_width(m);
        GridFunction::new(DVector::from_fn(m + 2, |k, _| f(k as f64 * h)))
    }

    pub fn from_real_fn(m: usize, f: impl Fn(f64) -> f64) -> Self {
        GridFunction::from_fn(m, |x| C64::new(f(x), 0.0))
    }

    pub fn h(&self) -> f64 {
        mesh_width(self.level())
    }

    pub fn left(&self) -> C64 {
        self.values[0]
    }

    pub fn right(&self) -> C64 {
        self.values[self.values.len() - 1]
    }
}

impl ModelVector for GridFunction {
    fn model(&self) -> Model {
        Model::Grid
    }
    fn level(&self) -> usize {
        self.values.len() - 2
    }
    fn coords(&self) -> &DVector<C64> {
        &self.values
    }
}

/// `Σ |u_{k+1} − u_k|² / h`, the discrete `∫|u′|²`.
pub fn dirichlet_energy(u: &GridFunction) -> f64 {
    let v = u.coords();
    let h = u.h();
    (0..v.len() - 1).map(|k| (v[k + 1] - v[k]).norm_sqr()).sum::<f64>() / h
}

/// Recovers a sesquilinear form from its quadratic form:
/// `t(x, y) = ¼ Σ_{k=0..3} iᵏ q(x + iᵏ y)`.
pub fn polarize(q: impl Fn(&DVector<C64>) -> f64, x: &DVector<C64>, y: &DVector<C64>) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    let mut ik = C64::new(1.0, 0.0);
    for _ in 0..4 {
        let v = x + y * ik;
        acc += ik * q(&v);
        ik *= C64::new(0.0, 1.0);
    }
    acc / 4.0
}

/// Seeded source of test vectors.
pub struct TestVectorGen {
    rng: ChaCha8Rng,
}

impl TestVectorGen {
    pub fn new(seed: u64) -> Self {
        TestVectorGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Coordinates with independent standard complex normal entries.
    pub fn complex_normal(&mut self, dim: usize) -> DVector<C64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        DVector::from_fn(dim, |_, _| {
            let re: f64 = StandardNormal.sample(&mut self.rng);
            let im: f64 = StandardNormal.sample(&mut self.rng);
            C64::new(re * s, im * s)
        })
    }

    /// Random unit vector of `ℂ^L`.
    pub fn unit_seq(&mut self, level: usize) -> SeqVector {
        let c = self.complex_normal(level);
        let n = c.norm();
        SeqVector::new(c / C64::new(n, 0.0))
    }

    /// Random grid function of unit `L²` norm.
    pub fn unit_grid(&mut self, m: usize) -> GridFunction {
        let g = GridFunction::new(self.complex_normal(m + 2));
        let n = g.norm();
        GridFunction::new(g.coords() / C64::new(n, 0.0))
    }
}

/// Named smooth samples `1, x, x², sin(πx)` and an interior hat function.
pub fn smooth_samples(m: usize) -> Vec<(&'static str, GridFunction)> {
    vec![
        ("one", GridFunction::from_real_fn(m, |_| 1.0)),
        ("x", GridFunction::from_real_fn(m, |x| x)),
        ("x^2", GridFunction::from_real_fn(m, |x| x * x)),
        ("sin(pi x)", GridFunction::from_real_fn(m, |x| (std::f64::consts::PI * x).sin())),
        ("hat", GridFunction::from_real_fn(m, hat)),
    ]
}

/// Hat function centred at `1/2` with support `[1/4, 3/4]`.
pub fn hat(x: f64) -> f64 {
    (1.0 - (x - 0.5).abs() * 4.0).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_integrates_linear_functions_exactly() {
        for m in [9, 49, 199] {
            let one = GridFunction::from_real_fn(m, |_| 1.0);
            let x = GridFunction::from_real_fn(m, |x| x);
            assert!((one.inner(&one).unwrap().re - 1.0).abs() < 1e-13);
            assert!((x.inner(&one).unwrap().re - 0.5).abs() < 1e-13);
        }
    }

    #[test]
    fn inner_product_is_antilinear_on_the_right() {
        let mut g = TestVectorGen::new(3);
        let x = SeqVector::new(g.complex_normal(5));
        let y = SeqVector::new(g.complex_normal(5));
        let i = C64::new(0.0, 1.0);
        let yi = SeqVector::new(y.coords() * i);
        let lhs = x.inner(&yi).unwrap();
        let rhs = x.inner(&y).unwrap() * i.conj();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn dirichlet_energy_of_linear_function() {
        // ∫|u'|² = 1 for u(x) = x, exactly on any grid.
        for m in [9, 49, 199] {
            let u = GridFunction::from_real_fn(m, |x| x);
            assert!((dirichlet_energy(&u) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn polarization_of_the_inner_product() {
        let mut g = TestVectorGen::new(11);
        let x = g.complex_normal(6);
        let y = g.complex_normal(6);
        let q = |v: &DVector<C64>| v.norm_squared();
        let direct: C64 = x.iter().zip(y.iter()).map(|(a, b)| a * b.conj()).sum();
        assert!((polarize(q, &x, &y) - direct).norm() < 1e-12);
    }

    #[test]
    fn unit_vectors_are_normalized_and_seeded() {
        let a = TestVectorGen::new(5).unit_grid(49);
        let b = TestVectorGen::new(5).unit_grid(49);
        assert_eq!(a, b);
        assert!((a.norm() - 1.0).abs() < 1e-12);
        assert!((TestVectorGen::new(5).unit_seq(16).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mismatched_dimensions_are_rejected() {
        let a = SeqVector::basis(3, 1);
        let b = SeqVector::basis(4, 1);
        assert_eq!(a.inner(&b), Err(HilbertError::DimensionMismatch(3, 4)));
    }
}
