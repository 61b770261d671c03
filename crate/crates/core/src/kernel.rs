//! Partial-algebra kernel.
//!
//! A generalized effect algebra (GEA) is a partial algebra `(E; ⊕, 0)` with
//!
//! * GEi   `x ⊕ y = y ⊕ x` whenever one side is defined,
//! * GEii  `(x ⊕ y) ⊕ z = x ⊕ (y ⊕ z)` whenever one side is defined,
//! * GEiii `x ⊕ 0 = x`,
//! * GEiv  `x ⊕ y = x ⊕ z` implies `y = z`,
//! * GEv   `x ⊕ y = 0` implies `x = y = 0`.
//!
//! The derived order is `x ≤ y` iff `x ⊕ z = y` for some `z`, and that `z` is
//! written `y ⊖ x`. Everything here is generic over [`PartialAlgebra`] and
//! uses exact (structural) equality of elements.

use std::fmt::Debug;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

/// Carriers up to this size are always checked exhaustively, even when a
/// sampled check is requested.
pub const EXHAUSTIVE_PROMOTION_LIMIT: usize = 128;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("no order oracle registered for a non-enumerable carrier")]
    NoOrderOracle,
    #[error("two distinct witnesses {first} and {second} for {b} ⊖ {a}")]
    NonUniqueWitness {
        a: String,
        b: String,
        first: String,
        second: String,
    },
    #[error("exhaustive mode requires an enumerable carrier")]
    NotEnumerable,
    #[error("subset is not closed under ⊕: {x} ⊕ {y} leaves the subset")]
    NotSumClosed { x: String, y: String },
    #[error("subset does not contain zero")]
    ZeroNotInSubset,
    #[error("join oracle reported no supremum")]
    JoinUnavailable,
    #[error("meet oracle reported no infimum")]
    MeetUnavailable,
    #[error("chain is not monotone at position {index}")]
    NotMonotone { index: usize },
    #[error("{0}")]
    VerificationFailed(String),
}

/// A partial algebra `(E; ⊕, 0)` over elements of type `Elem`.
///
/// Finite (or finitely windowed) carriers expose [`PartialAlgebra::elements`];
/// the kernel then decides the derived order by exhaustive witness search.
/// Non-enumerable carriers must register [`PartialAlgebra::order_oracle`] and
/// [`PartialAlgebra::difference_oracle`] instead.
pub trait PartialAlgebra {
    type Elem: Clone + PartialEq + Debug;

    fn zero(&self) -> Self::Elem;

    /// `Some(a ⊕ b)` when defined.
    fn oplus(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem>;

    /// Membership in the full carrier (which may be larger than the
    /// enumeration window).
    fn contains(&self, a: &Self::Elem) -> bool;

    /// Enumeration window of the carrier, `None` when not enumerable.
    fn elements(&self) -> Option<Vec<Self::Elem>> {
        None
    }

    /// Draws a carrier element. The default picks uniformly from
    /// [`PartialAlgebra::elements`] and panics for non-enumerable carriers
    /// that do not override it.
    fn sample(&self, rng: &mut ChaCha8Rng) -> Self::Elem {
        let elems = self
            .elements()
            .expect("non-enumerable algebra must override sample()");
        elems[rng.random_range(0..elems.len())].clone()
    }

    /// Registered decision procedure for `a ≤ b`.
    fn order_oracle(&self, _a: &Self::Elem, _b: &Self::Elem) -> Option<bool> {
        None
    }

    /// Registered difference `b ⊖ a`: `Some(Some(z))` when defined,
    /// `Some(None)` when undefined, `None` when no oracle is registered.
    fn difference_oracle(&self, _b: &Self::Elem, _a: &Self::Elem) -> Option<Option<Self::Elem>> {
        None
    }
}

impl<A: PartialAlgebra + ?Sized> PartialAlgebra for &A {
    type Elem = A::Elem;
    fn zero(&self) -> Self::Elem {
        (**self).zero()
    }
    fn oplus(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        (**self).oplus(a, b)
    }
    fn contains(&self, a: &Self::Elem) -> bool {
        (**self).contains(a)
    }
    fn elements(&self) -> Option<Vec<Self::Elem>> {
        (**self).elements()
    }
    fn sample(&self, rng: &mut ChaCha8Rng) -> Self::Elem {
        (**self).sample(rng)
    }
    fn order_oracle(&self, a: &Self::Elem, b: &Self::Elem) -> Option<bool> {
        (**self).order_oracle(a, b)
    }
    fn difference_oracle(&self, b: &Self::Elem, a: &Self::Elem) -> Option<Option<Self::Elem>> {
        (**self).difference_oracle(b, a)
    }
}

/// `a ≤ b` in the derived order.
pub fn derived_le<A: PartialAlgebra>(alg: &A, a: &A::Elem, b: &A::Elem) -> Result<bool, KernelError> {
    if let Some(elems) = alg.elements() {
        return Ok(elems.iter().any(|z| alg.oplus(a, z).as_ref() == Some(b)));
    }
    alg.order_oracle(a, b).ok_or(KernelError::NoOrderOracle)
}

/// `b ⊖ a`, the unique `z` with `a ⊕ z = b`, or `None` when `a ≰ b`.
pub fn ominus<A: PartialAlgebra>(alg: &A, b: &A::Elem, a: &A::Elem) -> Result<Option<A::Elem>, KernelError> {
    if let Some(elems) = alg.elements() {
        let mut found: Option<&A::Elem> = None;
        for z in &elems {
            if alg.oplus(a, z).as_ref() == Some(b) {
                match found {
                    None => found = Some(z),
                    Some(prev) if prev != z => {
                        return Err(KernelError::NonUniqueWitness {
                            a: format!("{a:?}"),
                            b: format!("{b:?}"),
                            first: format!("{prev:?}"),
                            second: format!("{z:?}"),
                        })
                    }
                    Some(_) => {}
                }
            }
        }
        return Ok(found.cloned());
    }
    alg.difference_oracle(b, a).ok_or(KernelError::NoOrderOracle)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Axiom {
    #[serde(rename = "GEi")]
    Commutativity,
    #[serde(rename = "GEii")]
    Associativity,
    #[serde(rename = "GEiii")]
    Neutrality,
    #[serde(rename = "GEiv")]
    Cancellation,
    #[serde(rename = "GEv")]
    Positivity,
}

impl Axiom {
    pub const ALL: [Axiom; 5] = [
        Axiom::Commutativity,
        Axiom::Associativity,
        Axiom::Neutrality,
        Axiom::Cancellation,
        Axiom::Positivity,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Axiom::Commutativity => "GEi",
            Axiom::Associativity => "GEii",
            Axiom::Neutrality => "GEiii",
            Axiom::Cancellation => "GEiv",
            Axiom::Positivity => "GEv",
        }
    }

    /// Number of elements in a witness tuple.
    pub fn arity(self) -> usize {
        match self {
            Axiom::Neutrality => 1,
            Axiom::Commutativity | Axiom::Positivity => 2,
            Axiom::Associativity | Axiom::Cancellation => 3,
        }
    }

    /// Evaluates the axiom on one tuple. `witness` must hold at least
    /// [`Axiom::arity`] elements; extra elements are ignored.
    pub fn holds<A: PartialAlgebra>(self, alg: &A, witness: &[A::Elem]) -> bool {
        match self {
            Axiom::Commutativity => {
                let (x, y) = (&witness[0], &witness[1]);
                alg.oplus(x, y) == alg.oplus(y, x)
            }
            Axiom::Associativity => {
                let (x, y, z) = (&witness[0], &witness[1], &witness[2]);
                let lhs = alg.oplus(x, y).and_then(|xy| alg.oplus(&xy, z));
                let rhs = alg.oplus(y, z).and_then(|yz| alg.oplus(x, &yz));
                lhs == rhs
            }
            Axiom::Neutrality => {
                let x = &witness[0];
                alg.oplus(x, &alg.zero()).as_ref() == Some(x)
            }
            Axiom::Cancellation => {
                let (x, y, z) = (&witness[0], &witness[1], &witness[2]);
                match (alg.oplus(x, y), alg.oplus(x, z)) {
                    (Some(a), Some(b)) if a == b => y == z,
                    _ => true,
                }
            }
            Axiom::Positivity => {
                let (x, y) = (&witness[0], &witness[1]);
                let zero = alg.zero();
                match alg.oplus(x, y) {
                    Some(s) if s == zero => *x == zero && *y == zero,
                    _ => true,
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Verdict<E> {
    Pass,
    Fail { witness: Vec<E> },
}

impl<E> Verdict<E> {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum CheckStrategy {
    Exhaustive,
    Sampled { n: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport<E> {
    pub verdicts: Vec<(Axiom, Verdict<E>)>,
    pub samples_tested: usize,
    pub mode: CheckStrategy,
}

impl<E> AxiomReport<E> {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|(_, v)| v.passed())
    }

    pub fn verdict(&self, axiom: Axiom) -> &Verdict<E> {
        &self
            .verdicts
            .iter()
            .find(|(a, _)| *a == axiom)
            .expect("report covers every axiom")
            .1
    }
}

/// Tests GEi..GEv on every tuple of the carrier, or on `n` seeded random
/// tuples. Small enumerable carriers are always checked exhaustively.
pub fn check_axioms<A: PartialAlgebra>(alg: &A, strategy: CheckStrategy) -> Result<AxiomReport<A::Elem>, KernelError> {
    let elems = alg.elements();
    let strategy = match (strategy, &elems) {
        (CheckStrategy::Exhaustive, None) => return Err(KernelError::NotEnumerable),
        (CheckStrategy::Sampled { .. }, Some(e)) if e.len() <= EXHAUSTIVE_PROMOTION_LIMIT => CheckStrategy::Exhaustive,
        (s, _) => s,
    };

    let mut failures: Vec<Option<Vec<A::Elem>>> = vec![None; Axiom::ALL.len()];
    let mut record = |axiom: Axiom, tuple: &[A::Elem]| {
        let slot = &mut failures[axiom as usize];
        if slot.is_none() && !axiom.holds(alg, tuple) {
            *slot = Some(tuple[..axiom.arity()].to_vec());
        }
    };

    let samples_tested = match strategy {
        CheckStrategy::Exhaustive => {
            let elems = elems.expect("checked above");
            for x in &elems {
                record(Axiom::Neutrality, std::slice::from_ref(x));
                for y in &elems {
                    let pair = [x.clone(), y.clone()];
                    record(Axiom::Commutativity, &pair);
                    record(Axiom::Positivity, &pair);
                    for z in &elems {
                        let triple = [x.clone(), y.clone(), z.clone()];
                        record(Axiom::Associativity, &triple);
                        record(Axiom::Cancellation, &triple);
                    }
                }
            }
            elems.len().pow(3)
        }
        CheckStrategy::Sampled { n, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..n {
                let triple = [alg.sample(&mut rng), alg.sample(&mut rng), alg.sample(&mut rng)];
                for axiom in Axiom::ALL {
                    record(axiom, &triple);
                }
            }
            n
        }
    };

    let verdicts = Axiom::ALL
        .iter()
        .zip(failures)
        .map(|(&axiom, fail)| {
            let verdict = match fail {
                None => Verdict::Pass,
                Some(witness) => Verdict::Fail { witness },
            };
            (axiom, verdict)
        })
        .collect();
    Ok(AxiomReport {
        verdicts,
        samples_tested,
        mode: strategy,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SubGeaViolation<E> {
    ZeroMissing,
    /// `x ⊕ y = z` with two of the three in `Q` and one outside.
    Triple { x: E, y: E, z: E },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubGeaCheck<E> {
    pub holds: bool,
    pub violation: Option<SubGeaViolation<E>>,
    pub triples_tested: usize,
}

fn two_of_three<E>(member: &impl Fn(&E) -> bool, x: &E, y: &E, z: &E) -> bool {
    let count = [x, y, z].iter().filter(|e| member(e)).count();
    count < 2 || count == 3
}

/// 2-of-3 closure test of `Q` (given by `member`) over the enumeration
/// window. Triples whose first summand lies in `Q` are scanned first, so the
/// certificate is reported in that orientation when one exists.
pub fn is_sub_gea<A, F>(alg: &A, member: F) -> Result<SubGeaCheck<A::Elem>, KernelError>
where
    A: PartialAlgebra,
    F: Fn(&A::Elem) -> bool,
{
    let elems = alg.elements().ok_or(KernelError::NotEnumerable)?;
    if !member(&alg.zero()) {
        return Ok(SubGeaCheck {
            holds: false,
            violation: Some(SubGeaViolation::ZeroMissing),
            triples_tested: 0,
        });
    }
    let (inside, outside): (Vec<_>, Vec<_>) = elems.iter().partition(|e| member(e));
    let mut tested = 0;
    for x in inside.iter().chain(outside.iter()) {
        for y in &elems {
            let Some(z) = alg.oplus(x, y) else { continue };
            tested += 1;
            if !two_of_three(&member, x, y, &z) {
                return Ok(SubGeaCheck {
                    holds: false,
                    violation: Some(SubGeaViolation::Triple {
                        x: (*x).clone(),
                        y: y.clone(),
                        z,
                    }),
                    triples_tested: tested,
                });
            }
        }
    }
    Ok(SubGeaCheck {
        holds: true,
        violation: None,
        triples_tested: tested,
    })
}

/// 2-of-3 closure test over explicitly supplied summand pairs (for
/// non-enumerable carriers). Only pairs whose sum is defined count as tested.
pub fn is_sub_gea_on_pairs<A, F, I>(alg: &A, member: F, pairs: I) -> SubGeaCheck<A::Elem>
where
    A: PartialAlgebra,
    F: Fn(&A::Elem) -> bool,
    I: IntoIterator<Item = (A::Elem, A::Elem)>,
{
    if !member(&alg.zero()) {
        return SubGeaCheck {
            holds: false,
            violation: Some(SubGeaViolation::ZeroMissing),
            triples_tested: 0,
        };
    }
    let mut tested = 0;
    for (x, y) in pairs {
        let Some(z) = alg.oplus(&x, &y) else { continue };
        tested += 1;
        if !two_of_three(&member, &x, &y, &z) {
            return SubGeaCheck {
                holds: false,
                violation: Some(SubGeaViolation::Triple { x, y, z }),
                triples_tested: tested,
            };
        }
    }
    SubGeaCheck {
        holds: true,
        violation: None,
        triples_tested: tested,
    }
}

/// `(S; ⊕|S, 0)`: the operation is defined iff it is defined in the base
/// algebra and the result lies in `S`.
#[derive(Clone)]
pub struct Restricted<A, F> {
    base: A,
    member: F,
}

impl<A, F> Restricted<A, F>
where
    A: PartialAlgebra,
    F: Fn(&A::Elem) -> bool,
{
    pub fn base(&self) -> &A {
        &self.base
    }

    pub fn is_member(&self, a: &A::Elem) -> bool {
        (self.member)(a)
    }
}

/// Restricts `base` to the subset `S` given by `member`, checking that `S`
/// contains zero and is closed under the sums defined in `base` over the
/// enumeration window.
pub fn restrict<A, F>(base: A, member: F) -> Result<Restricted<A, F>, KernelError>
where
    A: PartialAlgebra,
    F: Fn(&A::Elem) -> bool,
{
    if !member(&base.zero()) {
        return Err(KernelError::ZeroNotInSubset);
    }
    if let Some(elems) = base.elements() {
        let subset: Vec<_> = elems.into_iter().filter(|e| member(e)).collect();
        for x in &subset {
            for y in &subset {
                if let Some(z) = base.oplus(x, y) {
                    if !member(&z) {
                        return Err(KernelError::NotSumClosed {
                            x: format!("{x:?}"),
                            y: format!("{y:?}"),
                        });
                    }
                }
            }
        }
    }
    Ok(Restricted { base, member })
}

/// Restriction without the closure check, for carriers where the caller
/// asserts the precondition.
pub fn restrict_unchecked<A, F>(base: A, member: F) -> Restricted<A, F>
where
    A: PartialAlgebra,
    F: Fn(&A::Elem) -> bool,
{
    Restricted { base, member }
}

impl<A, F> PartialAlgebra for Restricted<A, F>
where
    A: PartialAlgebra,
    F: Fn(&A::Elem) -> bool,
{
    type Elem = A::Elem;

    fn zero(&self) -> Self::Elem {
        self.base.zero()
    }

    fn oplus(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.base.oplus(a, b).filter(|s| (self.member)(s))
    }

    fn contains(&self, a: &Self::Elem) -> bool {
        self.base.contains(a) && (self.member)(a)
    }

    fn elements(&self) -> Option<Vec<Self::Elem>> {
        self.base
            .elements()
            .map(|e| e.into_iter().filter(|x| (self.member)(x)).collect())
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Self::Elem {
        if let Some(elems) = self.elements() {
            return elems[rng.random_range(0..elems.len())].clone();
        }
        for _ in 0..10_000 {
            let x = self.base.sample(rng);
            if (self.member)(&x) {
                return x;
            }
        }
        self.zero()
    }
}

/// Outcome of a bound search over an enumerable carrier.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Extremum<E> {
    Found { element: E },
    /// Two maximal lower (or minimal upper) bounds that are incomparable.
    Obstruction { first: E, second: E },
    NoBound,
}

impl<E> Extremum<E> {
    pub fn found(self) -> Option<E> {
        match self {
            Extremum::Found { element } => Some(element),
            _ => None,
        }
    }
}

fn extremum<A: PartialAlgebra>(
    alg: &A,
    elements: &[A::Elem],
    lower: bool,
) -> Result<Extremum<A::Elem>, KernelError> {
    let window = alg.elements().ok_or(KernelError::NotEnumerable)?;
    // `le(x, y)` oriented so that "better" bounds are larger.
    let le = |x: &A::Elem, y: &A::Elem| -> Result<bool, KernelError> {
        if lower {
            derived_le(alg, x, y)
        } else {
            derived_le(alg, y, x)
        }
    };
    let mut bounds = Vec::new();
    'scan: for c in &window {
        for e in elements {
            if !le(c, e)? {
                continue 'scan;
            }
        }
        bounds.push(c.clone());
    }
    if bounds.is_empty() {
        return Ok(Extremum::NoBound);
    }
    let mut maximal = Vec::new();
    for c in &bounds {
        let mut dominated = false;
        for d in &bounds {
            if d != c && le(c, d)? {
                dominated = true;
                break;
            }
        }
        if !dominated {
            maximal.push(c.clone());
        }
    }
    for m in &maximal {
        let mut best = true;
        for b in &bounds {
            if !le(b, m)? {
                best = false;
                break;
            }
        }
        if best {
            return Ok(Extremum::Found { element: m.clone() });
        }
    }
    match maximal.len() {
        0 => Ok(Extremum::NoBound),
        1 => Ok(Extremum::NoBound),
        _ => Ok(Extremum::Obstruction {
            first: maximal[0].clone(),
            second: maximal[1].clone(),
        }),
    }
}

/// Greatest lower bound of `elements` by exhaustive scan.
pub fn brute_meet<A: PartialAlgebra>(alg: &A, elements: &[A::Elem]) -> Result<Option<A::Elem>, KernelError> {
    Ok(extremum(alg, elements, true)?.found())
}

/// Least upper bound of `elements` by exhaustive scan.
pub fn brute_join<A: PartialAlgebra>(alg: &A, elements: &[A::Elem]) -> Result<Option<A::Elem>, KernelError> {
    Ok(extremum(alg, elements, false)?.found())
}

/// Like [`brute_meet`], but reports an obstruction when two incomparable
/// maximal lower bounds exist.
pub fn meet_search<A: PartialAlgebra>(alg: &A, elements: &[A::Elem]) -> Result<Extremum<A::Elem>, KernelError> {
    extremum(alg, elements, true)
}

/// Like [`brute_join`], reporting two incomparable minimal upper bounds as an
/// obstruction.
pub fn join_search<A: PartialAlgebra>(alg: &A, elements: &[A::Elem]) -> Result<Extremum<A::Elem>, KernelError> {
    extremum(alg, elements, false)
}

fn require_defined<E: Debug>(value: Option<E>, what: impl FnOnce() -> String) -> Result<E, KernelError> {
    value.ok_or_else(|| KernelError::VerificationFailed(what()))
}

/// Infimum of a descending chain `a_1 ≥ a_2 ≥ …` computed as
/// `a_1 ⊖ ⋁ₙ (a_1 ⊖ a_n)`.
///
/// A finite slice stands for the eventually constant sequence repeating its
/// last element. The result is checked to be a lower bound and, on enumerable
/// carriers, to dominate every lower bound in the window.
pub fn meet_by_differences<A, J>(alg: &A, chain: &[A::Elem], join_oracle: J) -> Result<A::Elem, KernelError>
where
    A: PartialAlgebra,
    J: Fn(&[A::Elem]) -> Option<A::Elem>,
{
    let Some(first) = chain.first() else {
        return Err(KernelError::VerificationFailed("empty chain".into()));
    };
    for (i, w) in chain.windows(2).enumerate() {
        if !derived_le(alg, &w[1], &w[0])? {
            return Err(KernelError::NotMonotone { index: i + 1 });
        }
    }
    let mut gaps = Vec::with_capacity(chain.len());
    for a in chain {
        let gap = ominus(alg, first, a)?;
        gaps.push(require_defined(gap, || format!("{first:?} ⊖ {a:?} undefined"))?);
    }
    let sup = join_oracle(&gaps).ok_or(KernelError::JoinUnavailable)?;
    let meet = require_defined(ominus(alg, first, &sup)?, || {
        format!("supremum {sup:?} not below {first:?}")
    })?;

    for a in chain {
        if !derived_le(alg, &meet, a)? {
            return Err(KernelError::VerificationFailed(format!("{meet:?} is not below {a:?}")));
        }
    }
    if let Some(window) = alg.elements() {
        for b in &window {
            let mut is_lower = true;
            for a in chain {
                if !derived_le(alg, b, a)? {
                    is_lower = false;
                    break;
                }
            }
            if is_lower && !derived_le(alg, b, &meet)? {
                return Err(KernelError::VerificationFailed(format!(
                    "lower bound {b:?} not below {meet:?}"
                )));
            }
        }
    }
    Ok(meet)
}

/// Supremum of an ascending chain dominated by `bound`, computed as
/// `b ⊖ ⋀ₙ (b ⊖ a_n)`.
///
/// On enumerable carriers the result is checked to be the least upper bound
/// inside `[0, b]`.
pub fn join_by_differences<A, M>(alg: &A, chain: &[A::Elem], bound: &A::Elem, meet_oracle: M) -> Result<A::Elem, KernelError>
where
    A: PartialAlgebra,
    M: Fn(&[A::Elem]) -> Option<A::Elem>,
{
    if chain.is_empty() {
        return Err(KernelError::VerificationFailed("empty chain".into()));
    }
    for (i, w) in chain.windows(2).enumerate() {
        if !derived_le(alg, &w[0], &w[1])? {
            return Err(KernelError::NotMonotone { index: i + 1 });
        }
    }
    let mut gaps = Vec::with_capacity(chain.len());
    for a in chain {
        let gap = ominus(alg, bound, a)?;
        gaps.push(require_defined(gap, || format!("{a:?} is not below the bound {bound:?}"))?);
    }
    let inf = meet_oracle(&gaps).ok_or(KernelError::MeetUnavailable)?;
    let join = require_defined(ominus(alg, bound, &inf)?, || {
        format!("infimum {inf:?} not below {bound:?}")
    })?;

    for a in chain {
        if !derived_le(alg, a, &join)? {
            return Err(KernelError::VerificationFailed(format!("{a:?} is not below {join:?}")));
        }
    }
    if let Some(window) = alg.elements() {
        for c in &window {
            if !derived_le(alg, c, bound)? {
                continue;
            }
            let mut is_upper = true;
            for a in chain {
                if !derived_le(alg, a, c)? {
                    is_upper = false;
                    break;
                }
            }
            if is_upper && !derived_le(alg, &join, c)? {
                return Err(KernelError::VerificationFailed(format!(
                    "upper bound {c:?} not above {join:?}"
                )));
            }
        }
    }
    Ok(join)
}
