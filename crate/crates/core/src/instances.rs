//! Concrete small GEAs over integer lattices.
//!
//! Infinite carriers such as `ℤ⁺` are enumerated through a capped window so
//! that exhaustive checks stay finite. The window only limits enumeration:
//! `oplus` and `contains` act on the whole carrier.

use std::fmt::Debug;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::kernel::{
    check_axioms, derived_le, is_sub_gea, restrict, CheckStrategy, KernelError, PartialAlgebra, SubGeaViolation,
};

/// Default enumeration cap for infinite carriers.
pub const DEFAULT_CAP: i64 = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InstanceError {
    #[error("interval bound {0} must be strictly positive")]
    NonPositiveBound(String),
}

/// Elements of a positive cone `G⁺` in `ℤ` or `ℤᵈ` with the componentwise order.
pub trait ConeVector: Clone + PartialEq + Debug {
    fn origin() -> Self;
    fn add(&self, other: &Self) -> Self;
    /// Componentwise `self ≤ other`.
    fn le(&self, other: &Self) -> bool;
    /// Every lattice point `g` with `0 ≤ g ≤ self`, lexicographically.
    fn box_below(&self) -> Vec<Self>;
}

impl ConeVector for i64 {
    fn origin() -> Self {
        0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn le(&self, other: &Self) -> bool {
        self <= other
    }
    fn box_below(&self) -> Vec<Self> {
        (0..=*self).collect()
    }
}

impl<const D: usize> ConeVector for [i64; D] {
    fn origin() -> Self {
        [0; D]
    }
    fn add(&self, other: &Self) -> Self {
        std::array::from_fn(|i| self[i] + other[i])
    }
    fn le(&self, other: &Self) -> bool {
        self.iter().zip(other).all(|(a, b)| a <= b)
    }
    fn box_below(&self) -> Vec<Self> {
        let mut out = vec![[0; D]];
        for i in 0..D {
            let mut next = Vec::new();
            for p in &out {
                for v in 0..=self[i].max(-1) {
                    let mut q = *p;
                    q[i] = v;
                    next.push(q);
                }
            }
            out = next;
        }
        out
    }
}

fn is_positive<V: ConeVector>(g: &V) -> bool {
    V::origin().le(g)
}

/// Draws a lattice point of the box `[0, cap]` uniformly.
fn sample_box<V: ConeVector>(cap: &V, rng: &mut ChaCha8Rng) -> V {
    let pts = cap.box_below();
    pts[rng.random_range(0..pts.len())].clone()
}

/// `(ℤ⁺; +, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NatGea {
    pub cap: i64,
}

impl Default for NatGea {
    fn default() -> Self {
        NatGea { cap: DEFAULT_CAP }
    }
}

impl PartialAlgebra for NatGea {
    type Elem = i64;
    fn zero(&self) -> i64 {
        0
    }
    fn oplus(&self, a: &i64, b: &i64) -> Option<i64> {
        Some(a + b)
    }
    fn contains(&self, a: &i64) -> bool {
        *a >= 0
    }
    fn elements(&self) -> Option<Vec<i64>> {
        Some((0..=self.cap).collect())
    }
}

/// Membership in `{0, 4, 6, 8, …}`.
pub fn even_gap_member(x: &i64) -> bool {
    *x == 0 || (*x >= 4 && x % 2 == 0)
}

/// `{0, 4, 6, 8, …}` with the addition inherited from `ℤ⁺`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvenGapGea {
    pub cap: i64,
}

impl Default for EvenGapGea {
    fn default() -> Self {
        EvenGapGea { cap: DEFAULT_CAP }
    }
}

impl PartialAlgebra for EvenGapGea {
    type Elem = i64;
    fn zero(&self) -> i64 {
        0
    }
    fn oplus(&self, a: &i64, b: &i64) -> Option<i64> {
        Some(a + b).filter(even_gap_member)
    }
    fn contains(&self, a: &i64) -> bool {
        even_gap_member(a)
    }
    fn elements(&self) -> Option<Vec<i64>> {
        Some((0..=self.cap).filter(even_gap_member).collect())
    }
}

/// The positive cone `G⁺` with total addition, enumerated inside `[0, cap]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeGea<V> {
    pub cap: V,
}

impl<V: ConeVector> PartialAlgebra for ConeGea<V> {
    type Elem = V;
    fn zero(&self) -> V {
        V::origin()
    }
    fn oplus(&self, a: &V, b: &V) -> Option<V> {
        Some(a.add(b))
    }
    fn contains(&self, a: &V) -> bool {
        is_positive(a)
    }
    fn elements(&self) -> Option<Vec<V>> {
        Some(self.cap.box_below())
    }
    fn sample(&self, rng: &mut ChaCha8Rng) -> V {
        sample_box(&self.cap, rng)
    }
}

/// The interval effect algebra `[0, u]`: `a ⊕ b` is defined iff `a + b ≤ u`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalEa<V> {
    top: V,
}

impl<V: ConeVector> IntervalEa<V> {
    pub fn top(&self) -> &V {
        &self.top
    }

    /// Orthosupplement `u − a`.
    pub fn complement(&self, a: &V) -> Option<V> {
        crate::kernel::ominus(self, &self.top, a).ok().flatten()
    }
}

/// Builds `[0, u]`, rejecting `u = 0` and non-positive `u`.
pub fn make_interval_ea<V: ConeVector>(u: V) -> Result<IntervalEa<V>, InstanceError> {
    if !is_positive(&u) || u == V::origin() {
        return Err(InstanceError::NonPositiveBound(format!("{u:?}")));
    }
    Ok(IntervalEa { top: u })
}

impl<V: ConeVector> PartialAlgebra for IntervalEa<V> {
    type Elem = V;
    fn zero(&self) -> V {
        V::origin()
    }
    fn oplus(&self, a: &V, b: &V) -> Option<V> {
        Some(a.add(b)).filter(|s| s.le(&self.top))
    }
    fn contains(&self, a: &V) -> bool {
        is_positive(a) && a.le(&self.top)
    }
    fn elements(&self) -> Option<Vec<V>> {
        Some(self.top.box_below())
    }
    fn sample(&self, rng: &mut ChaCha8Rng) -> V {
        sample_box(&self.top, rng)
    }
}

/// The half-open interval `[0, u)`: `a ⊕ b` is defined iff `a + b < u`,
/// where `<` means `≤` and `≠`. A GEA without a top element.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfOpenGea<V> {
    bound: V,
}

pub fn make_half_open_gea<V: ConeVector>(u: V) -> Result<HalfOpenGea<V>, InstanceError> {
    if !is_positive(&u) || u == V::origin() {
        return Err(InstanceError::NonPositiveBound(format!("{u:?}")));
    }
    Ok(HalfOpenGea { bound: u })
}

impl<V: ConeVector> HalfOpenGea<V> {
    fn below(&self, g: &V) -> bool {
        g.le(&self.bound) && *g != self.bound
    }
}

impl<V: ConeVector> PartialAlgebra for HalfOpenGea<V> {
    type Elem = V;
    fn zero(&self) -> V {
        V::origin()
    }
    fn oplus(&self, a: &V, b: &V) -> Option<V> {
        Some(a.add(b)).filter(|s| self.below(s))
    }
    fn contains(&self, a: &V) -> bool {
        is_positive(a) && self.below(a)
    }
    fn elements(&self) -> Option<Vec<V>> {
        Some(self.bound.box_below().into_iter().filter(|g| self.below(g)).collect())
    }
}

/// `max` on `{0..=cap}`: satisfies every axiom except cancellation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BrokenMax {
    pub cap: i64,
}

impl PartialAlgebra for BrokenMax {
    type Elem = i64;
    fn zero(&self) -> i64 {
        0
    }
    fn oplus(&self, a: &i64, b: &i64) -> Option<i64> {
        Some(*a.max(b))
    }
    fn contains(&self, a: &i64) -> bool {
        (0..=self.cap).contains(a)
    }
    fn elements(&self) -> Option<Vec<i64>> {
        Some((0..=self.cap).collect())
    }
}

/// Outcome of the even-gap subset experiment on `ℤ⁺`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetOrderReport {
    pub cap: i64,
    pub base_axioms_pass: bool,
    pub subset_axioms_pass: bool,
    pub is_sub_gea: bool,
    pub violation: Option<SubGeaViolation<i64>>,
    /// `4 ≤ 6` in `ℤ⁺`.
    pub le_in_base: bool,
    /// `4 ≤ 6` in the restricted algebra.
    pub le_in_subset: bool,
}

/// Restricts `ℤ⁺` to `{0, 4, 6, 8, …}` and compares the two derived orders.
///
/// The subset is a GEA under the restricted sum, yet it is not a sub-GEA, and
/// `4 ≤ 6` holds in `ℤ⁺` but fails in the subset.
pub fn even_gap_demo(cap: i64) -> Result<SubsetOrderReport, KernelError> {
    subset_order_demo(cap, even_gap_member)
}

/// [`even_gap_demo`] for an arbitrary sum-closed subset of `ℤ⁺`.
pub fn subset_order_demo<F>(cap: i64, member: F) -> Result<SubsetOrderReport, KernelError>
where
    F: Fn(&i64) -> bool + Copy,
{
    let base = NatGea { cap };
    let base_report = check_axioms(&base, CheckStrategy::Exhaustive)?;
    let sub = restrict(base, member)?;
    let sub_report = check_axioms(&sub, CheckStrategy::Exhaustive)?;
    let check = is_sub_gea(&base, member)?;
    let le_in_subset = if member(&4) && member(&6) {
        derived_le(&sub, &4, &6)?
    } else {
        false
    };
    Ok(SubsetOrderReport {
        cap,
        base_axioms_pass: base_report.all_pass(),
        subset_axioms_pass: sub_report.all_pass(),
        is_sub_gea: check.holds,
        violation: check.violation,
        le_in_base: derived_le(&base, &4, &6)?,
        le_in_subset,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{brute_join, meet_search, ominus, Extremum};

    #[test]
    fn interval_rejects_zero_and_negative_bounds() {
        assert!(matches!(make_interval_ea(0i64), Err(InstanceError::NonPositiveBound(_))));
        assert!(make_interval_ea([0i64, 0]).is_err());
        assert!(make_interval_ea([2i64, -1]).is_err());
        assert!(make_interval_ea([0i64, 1]).is_ok());
    }

    #[test]
    fn box_enumeration_is_lexicographic() {
        assert_eq!([1i64, 1].box_below(), vec![[0, 0], [0, 1], [1, 0], [1, 1]]);
        assert_eq!(3i64.box_below(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn interval_top_and_complement() {
        let ea = make_interval_ea([3i64, 2]).unwrap();
        assert_eq!(ea.complement(&[1, 2]), Some([2, 0]));
        assert_eq!(ea.oplus(&[2, 1], &[2, 0]), None);
        assert_eq!(ea.oplus(&[1, 1], &[2, 1]), Some([3, 2]));
    }

    #[test]
    fn half_open_has_incomparable_maximal_elements() {
        let gea = make_half_open_gea([2i64, 2]).unwrap();
        assert_eq!(gea.oplus(&[1, 1], &[1, 1]), None);
        assert!(!gea.contains(&[2, 2]));
        // (2,0) and (0,2) have no common upper bound inside [0, (2,2)).
        assert_eq!(brute_join(&gea, &[[2, 0], [0, 2]]).unwrap(), None);
        assert_eq!(crate::kernel::join_search(&gea, &[[2, 0], [0, 2]]).unwrap(), Extremum::NoBound);
    }

    #[test]
    fn antichain_meet_in_cone_is_componentwise_min() {
        let cone = ConeGea { cap: [3i64, 3] };
        assert_eq!(
            meet_search(&cone, &[[3, 1], [1, 3]]).unwrap(),
            Extremum::Found { element: [1, 1] }
        );
    }

    #[test]
    fn broken_max_fails_only_cancellation() {
        let report = check_axioms(&BrokenMax { cap: 4 }, CheckStrategy::Exhaustive).unwrap();
        let failing: Vec<_> = report
            .verdicts
            .iter()
            .filter(|(_, v)| !v.passed())
            .map(|(a, _)| a.label())
            .collect();
        assert_eq!(failing, vec!["GEiv"]);
    }

    #[test]
    fn even_gap_demo_reports_the_certificate() {
        let r = even_gap_demo(DEFAULT_CAP).unwrap();
        assert!(r.base_axioms_pass && r.subset_axioms_pass);
        assert!(!r.is_sub_gea);
        assert_eq!(r.violation, Some(SubGeaViolation::Triple { x: 4, y: 2, z: 6 }));
        assert!(r.le_in_base);
        assert!(!r.le_in_subset);
    }

    #[test]
    fn even_gap_difference_is_undefined() {
        let s = EvenGapGea::default();
        assert_eq!(ominus(&s, &6, &4).unwrap(), None);
        assert_eq!(ominus(&s, &8, &4).unwrap(), Some(4));
        assert_eq!(ominus(&NatGea::default(), &6, &4).unwrap(), Some(2));
    }

    #[test]
    fn multiples_of_four_are_a_sub_gea_of_naturals() {
        let r = subset_order_demo(40, |x| x % 4 == 0).unwrap();
        assert!(r.is_sub_gea);
        assert!(!r.le_in_subset);
    }
}
