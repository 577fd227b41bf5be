//! Semimodules over the nonnegative rationals and the free semimodule on a
//! convex algebra, together with the transposition bijection
//! `affine X → Y  ≅  semimodule F(X) → Y` and its round-trip checks.
//!
//! `F(X)` adjoins a zero to the scaled copies of `X`: an element is either
//! `0` or a pair `(s, x)` with `s > 0`. Addition renormalizes through the
//! convex structure of `X`, scalar action multiplies the scale.

use std::fmt;

use rand::RngCore;
use serde_json::json;
use thiserror::Error;

use crate::convex::{is_affine, ConvexAlgebra, ConvexElement, ConvexError, Mixes};
use crate::formal::{Dist, FormalSum};
use crate::linalg::{self, Vector};
use crate::report::CheckReport;
use crate::sampling;
use crate::scalars::{NonNegRationalSemiring, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemimodError {
    #[error("element {element} does not belong to {module}")]
    ForeignElement { module: String, element: String },
    #[error("scalar {scalar} is not a nonnegative rational")]
    NegativeScalar { scalar: String },
    #[error("join table is not a semilattice: {reason}")]
    BadLattice { reason: String },
    #[error("semimodule law {law} fails at {witness}")]
    LawViolation { law: String, witness: String },
    #[error("map is not a semimodule homomorphism at {witness}")]
    NotHomomorphism { witness: String },
    #[error(transparent)]
    Convex(#[from] ConvexError),
}

/// A finite join semilattice with bottom, as a semimodule: addition is join
/// and the scalar action sends zero to bottom and every nonzero scalar to
/// the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinSemilatticeMod {
    name: String,
    elements: Vec<String>,
    join: Vec<Vec<usize>>,
    bottom: usize,
}

impl JoinSemilatticeMod {
    pub fn new(
        name: impl Into<String>,
        elements: Vec<String>,
        join: Vec<Vec<usize>>,
        bottom: usize,
    ) -> Result<Self, SemimodError> {
        let n = elements.len();
        let bad = |reason: &str| SemimodError::BadLattice { reason: reason.to_string() };
        if n == 0 {
            return Err(bad("empty carrier"));
        }
        if join.len() != n || join.iter().any(|r| r.len() != n) || bottom >= n {
            return Err(bad("join table has wrong shape"));
        }
        if join.iter().flatten().any(|&v| v >= n) {
            return Err(bad("join table index out of range"));
        }
        for a in 0..n {
            if join[a][a] != a {
                return Err(bad("join not idempotent"));
            }
            if join[bottom][a] != a {
                return Err(bad("bottom not neutral"));
            }
            for b in 0..n {
                if join[a][b] != join[b][a] {
                    return Err(bad("join not commutative"));
                }
                for c in 0..n {
                    if join[join[a][b]][c] != join[a][join[b][c]] {
                        return Err(bad("join not associative"));
                    }
                }
            }
        }
        Ok(JoinSemilatticeMod { name: name.into(), elements, join, bottom })
    }

    /// The powerset of `{0, …, n−1}` under union; handy as a roomy codomain.
    pub fn powerset(n: usize) -> Self {
        let size = 1usize << n;
        let elements: Vec<String> = (0..size).map(subset_name).collect();
        let mut join = vec![vec![0; size]; size];
        for (a, row) in join.iter_mut().enumerate() {
            for (b, slot) in row.iter_mut().enumerate() {
                *slot = a | b;
            }
        }
        JoinSemilatticeMod::new(format!("powerset{n}"), elements, join, 0)
            .expect("powerset is a join semilattice")
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn index_of(&self, e: &str) -> Option<usize> {
        self.elements.iter().position(|x| x == e)
    }
}

fn subset_name(mask: usize) -> String {
    let mut parts = Vec::new();
    let mut bit = 0;
    let mut m = mask;
    while m != 0 {
        if m & 1 == 1 {
            parts.push(bit.to_string());
        }
        m >>= 1;
        bit += 1;
    }
    format!("{{{}}}", parts.join(","))
}

/// An element of the free semimodule on a convex algebra: zero, or a
/// positively scaled element of the base.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum FElement {
    Zero,
    Pair(Rational, ConvexElement),
}

impl FElement {
    pub fn pair(s: Rational, x: ConvexElement) -> Result<Self, SemimodError> {
        if s.is_negative() || s.is_zero() {
            return Err(SemimodError::NegativeScalar { scalar: s.to_string() });
        }
        Ok(FElement::Pair(s, x))
    }
}

impl fmt::Display for FElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FElement::Zero => write!(f, "0"),
            FElement::Pair(s, x) => write!(f, "({s}, {x})"),
        }
    }
}

impl fmt::Debug for FElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Addition in `F(X)`: zero is neutral, and two scaled points add by
/// rescaling their mixture, `(s, x) + (t, y) = (s+t, α(s/(s+t)·x + t/(s+t)·y))`.
/// The output scale `s + t` is never zero because both inputs are positive.
pub fn f_add(base: &ConvexAlgebra, u: &FElement, v: &FElement) -> Result<FElement, SemimodError> {
    match (u, v) {
        (FElement::Zero, FElement::Zero) => Ok(FElement::Zero),
        (u, FElement::Zero) => Ok(u.clone()),
        (FElement::Zero, v) => Ok(v.clone()),
        (FElement::Pair(s, x), FElement::Pair(t, y)) => {
            let total = s + t;
            let left = s / &total;
            let right = t / &total;
            let mixed = base.evaluate(
                &Dist::from_weights([(left, x.clone()), (right, y.clone())])
                    .map_err(ConvexError::from)?,
            )?;
            Ok(FElement::Pair(total, mixed))
        }
    }
}

/// Scalar action on `F(X)`: zero scalar or zero element give zero, otherwise
/// the scale multiplies.
pub fn f_smul(s: &Rational, u: &FElement) -> Result<FElement, SemimodError> {
    if s.is_negative() {
        return Err(SemimodError::NegativeScalar { scalar: s.to_string() });
    }
    Ok(match (s.is_zero(), u) {
        (true, _) | (_, FElement::Zero) => FElement::Zero,
        (false, FElement::Pair(t, x)) => FElement::Pair(s * t, x.clone()),
    })
}

/// The semimodule families.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Semimodule {
    JoinSemilattice(JoinSemilatticeMod),
    NonNegOrthant { name: String, dim: usize },
    FreeMultiset { name: String, labels: Vec<String> },
    FreeOnConvex(Box<ConvexAlgebra>),
}

/// An element of one of the semimodule families.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum SemimoduleElement {
    Join(String),
    Vector(Vector),
    Multiset(FormalSum<String, Rational>),
    F(FElement),
}

impl fmt::Display for SemimoduleElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemimoduleElement::Join(e) => write!(f, "{e}"),
            SemimoduleElement::Vector(v) => {
                let parts: Vec<String> = v.iter().map(|c| c.to_string()).collect();
                write!(f, "({})", parts.join(", "))
            }
            SemimoduleElement::Multiset(s) => write!(f, "{s}"),
            SemimoduleElement::F(u) => write!(f, "{u}"),
        }
    }
}

impl fmt::Debug for SemimoduleElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Semimodule {
    pub fn name(&self) -> String {
        match self {
            Semimodule::JoinSemilattice(l) => l.name.clone(),
            Semimodule::NonNegOrthant { name, .. } => name.clone(),
            Semimodule::FreeMultiset { name, .. } => name.clone(),
            Semimodule::FreeOnConvex(x) => format!("F({})", x.name()),
        }
    }

    pub fn zero(&self) -> SemimoduleElement {
        match self {
            Semimodule::JoinSemilattice(l) => SemimoduleElement::Join(l.elements[l.bottom].clone()),
            Semimodule::NonNegOrthant { dim, .. } => SemimoduleElement::Vector(linalg::zeros(*dim)),
            Semimodule::FreeMultiset { .. } => SemimoduleElement::Multiset(FormalSum::empty()),
            Semimodule::FreeOnConvex(_) => SemimoduleElement::F(FElement::Zero),
        }
    }

    pub fn contains(&self, e: &SemimoduleElement) -> bool {
        match (self, e) {
            (Semimodule::JoinSemilattice(l), SemimoduleElement::Join(x)) => l.index_of(x).is_some(),
            (Semimodule::NonNegOrthant { dim, .. }, SemimoduleElement::Vector(v)) => {
                v.len() == *dim && v.iter().all(|c| !c.is_negative())
            }
            (Semimodule::FreeMultiset { labels, .. }, SemimoduleElement::Multiset(s)) => {
                s.terms().all(|(k, c)| labels.contains(k) && !c.is_negative() && !c.is_zero())
            }
            (Semimodule::FreeOnConvex(x), SemimoduleElement::F(u)) => match u {
                FElement::Zero => true,
                FElement::Pair(s, e) => !s.is_zero() && !s.is_negative() && x.contains(e),
            },
            _ => false,
        }
    }

    pub fn add(&self, a: &SemimoduleElement, b: &SemimoduleElement) -> Result<SemimoduleElement, SemimodError> {
        let foreign = |e: &SemimoduleElement| SemimodError::ForeignElement {
            module: self.name(),
            element: e.to_string(),
        };
        if !self.contains(a) {
            return Err(foreign(a));
        }
        if !self.contains(b) {
            return Err(foreign(b));
        }
        match (self, a, b) {
            (Semimodule::JoinSemilattice(l), SemimoduleElement::Join(x), SemimoduleElement::Join(y)) => {
                let (i, j) = (l.index_of(x).unwrap(), l.index_of(y).unwrap());
                Ok(SemimoduleElement::Join(l.elements[l.join[i][j]].clone()))
            }
            (Semimodule::NonNegOrthant { .. }, SemimoduleElement::Vector(x), SemimoduleElement::Vector(y)) => {
                Ok(SemimoduleElement::Vector(linalg::add_vec(x, y)))
            }
            (Semimodule::FreeMultiset { .. }, SemimoduleElement::Multiset(x), SemimoduleElement::Multiset(y)) => {
                let ring = NonNegRationalSemiring;
                let merged = FormalSum::normalize(
                    &ring,
                    x.terms().chain(y.terms()).map(|(k, c)| (c.clone(), k.clone())),
                );
                Ok(SemimoduleElement::Multiset(merged))
            }
            (Semimodule::FreeOnConvex(base), SemimoduleElement::F(u), SemimoduleElement::F(v)) => {
                Ok(SemimoduleElement::F(f_add(base, u, v)?))
            }
            _ => unreachable!("membership already checked"),
        }
    }

    pub fn smul(&self, s: &Rational, a: &SemimoduleElement) -> Result<SemimoduleElement, SemimodError> {
        if s.is_negative() {
            return Err(SemimodError::NegativeScalar { scalar: s.to_string() });
        }
        if !self.contains(a) {
            return Err(SemimodError::ForeignElement { module: self.name(), element: a.to_string() });
        }
        match (self, a) {
            (Semimodule::JoinSemilattice(..), SemimoduleElement::Join(_)) => {
                if s.is_zero() {
                    Ok(self.zero())
                } else {
                    Ok(a.clone())
                }
            }
            (Semimodule::NonNegOrthant { .. }, SemimoduleElement::Vector(v)) => {
                Ok(SemimoduleElement::Vector(linalg::scale(v, s)))
            }
            (Semimodule::FreeMultiset { .. }, SemimoduleElement::Multiset(m)) => {
                let ring = NonNegRationalSemiring;
                let scaled = FormalSum::normalize(&ring, m.terms().map(|(k, c)| (c * s, k.clone())));
                Ok(SemimoduleElement::Multiset(scaled))
            }
            (Semimodule::FreeOnConvex(_), SemimoduleElement::F(u)) => {
                Ok(SemimoduleElement::F(f_smul(s, u)?))
            }
            _ => unreachable!("membership already checked"),
        }
    }

    pub fn sample_element(&self, rng: &mut dyn RngCore) -> SemimoduleElement {
        match self {
            Semimodule::JoinSemilattice(l) => {
                SemimoduleElement::Join(sampling::pick(rng, &l.elements).clone())
            }
            Semimodule::NonNegOrthant { dim, .. } => {
                let v: Vector = (0..*dim).map(|_| sampling::nonneg_rational(rng, 6, 8)).collect();
                SemimoduleElement::Vector(v)
            }
            Semimodule::FreeMultiset { labels, .. } => {
                let ring = NonNegRationalSemiring;
                let size = sampling::below(rng, labels.len().min(3) as u64 + 1) as usize;
                let raw: Vec<(Rational, String)> = (0..size)
                    .map(|_| {
                        (
                            sampling::nonneg_rational(rng, 5, 6),
                            sampling::pick(rng, labels).clone(),
                        )
                    })
                    .collect();
                SemimoduleElement::Multiset(FormalSum::normalize(&ring, raw))
            }
            Semimodule::FreeOnConvex(x) => {
                if sampling::below(rng, 5) == 0 {
                    SemimoduleElement::F(FElement::Zero)
                } else {
                    let mut s = sampling::nonneg_rational(rng, 5, 6);
                    if s.is_zero() {
                        s = Rational::one();
                    }
                    SemimoduleElement::F(FElement::Pair(s, x.sample_element(rng)))
                }
            }
        }
    }

    /// Mixes a rational distribution through the induced convex structure:
    /// `Σ rᵢ xᵢ` evaluated by repeated `add`/`smul`.
    pub fn mix_distribution(&self, dist: &Dist<SemimoduleElement, Rational>) -> Result<SemimoduleElement, SemimodError> {
        let mut acc = self.zero();
        for (e, r) in dist.terms() {
            acc = self.add(&acc, &self.smul(r, e)?)?;
        }
        Ok(acc)
    }
}

impl Mixes for Semimodule {
    type Point = SemimoduleElement;

    fn mix(&self, dist: &Dist<SemimoduleElement, Rational>) -> Result<SemimoduleElement, ConvexError> {
        self.mix_distribution(dist).map_err(|e| match e {
            SemimodError::ForeignElement { module, element } => {
                ConvexError::ForeignElement { algebra: module, element }
            }
            other => ConvexError::NotAffine { witness: other.to_string() },
        })
    }

    fn describe(&self) -> String {
        format!("semimodule:{}", self.name())
    }
}

/// Checks the commutative-monoid and scalar-action laws on sampled elements.
pub fn check_semimodule_axioms(
    module: &Semimodule,
    samples: &[SemimoduleElement],
    scalars: &[Rational],
) -> CheckReport {
    let mut report = CheckReport::new(module.describe(), "semimodule-axioms");
    let mut fails: Vec<(String, String)> = Vec::new();
    let mut note = |law: &str, witness: String| {
        fails.push((law.to_string(), witness));
    };

    let zero = module.zero();
    for a in samples {
        if module.add(a, &zero) != Ok(a.clone()) {
            note("zero-neutral", a.to_string());
        }
        if module.smul(&Rational::one(), a) != Ok(a.clone()) {
            note("one-acts-trivially", a.to_string());
        }
        if module.smul(&Rational::zero(), a) != Ok(zero.clone()) {
            note("zero-scalar-annihilates", a.to_string());
        }
        for b in samples {
            let ab = module.add(a, b);
            if ab != module.add(b, a) {
                note("add-commutative", format!("({a}, {b})"));
            }
            for c in samples {
                let left = module.add(a, b).and_then(|x| module.add(&x, c));
                let right = module.add(b, c).and_then(|x| module.add(a, &x));
                if left != right {
                    note("add-associative", format!("({a}, {b}, {c})"));
                }
            }
        }
    }
    for s in scalars {
        if module.smul(s, &zero) != Ok(zero.clone()) {
            note("scalar-fixes-zero", s.to_string());
        }
        for t in scalars {
            for a in samples {
                let st = module.smul(&(s * t), a);
                let nested = module.smul(t, a).and_then(|x| module.smul(s, &x));
                if st != nested {
                    note("scalar-action-multiplicative", format!("(s={s}, t={t}, {a})"));
                }
                let sum_scalar = module.smul(&(s + t), a);
                let split = module
                    .smul(s, a)
                    .and_then(|x| module.smul(t, a).and_then(|y| module.add(&x, &y)));
                if sum_scalar != split {
                    note("scalar-distributes-over-scalar-sum", format!("(s={s}, t={t}, {a})"));
                }
            }
        }
        for a in samples {
            for b in samples {
                let lhs = module.add(a, b).and_then(|x| module.smul(s, &x));
                let rhs = module
                    .smul(s, a)
                    .and_then(|x| module.smul(s, b).and_then(|y| module.add(&x, &y)));
                if lhs != rhs {
                    note("scalar-distributes-over-add", format!("(s={s}, {a}, {b})"));
                }
            }
        }
    }

    let law_names = [
        "zero-neutral",
        "one-acts-trivially",
        "zero-scalar-annihilates",
        "add-commutative",
        "add-associative",
        "scalar-fixes-zero",
        "scalar-action-multiplicative",
        "scalar-distributes-over-scalar-sum",
        "scalar-distributes-over-add",
    ];
    for law in law_names {
        let witness = fails.iter().filter(|(l, _)| l == law).map(|(_, w)| w.clone()).min();
        report.record(law, witness.is_none(), || json!({ "witness": witness }));
    }
    report
}

/// The upward transposition: an affine map `f: X → Y` becomes the semimodule
/// map `F(X) → Y` with `0 ↦ 0` and `(r, x) ↦ r • f(x)`. The affinity of `f`
/// is verified first; the returned map is checked to be a homomorphism on
/// the provided samples.
#[allow(clippy::type_complexity)]
pub fn transpose_up<'a>(
    base: &'a ConvexAlgebra,
    codomain: &'a Semimodule,
    f: &'a (dyn Fn(&ConvexElement) -> SemimoduleElement + 'a),
    grid: &[Rational],
    samples: &[ConvexElement],
) -> Result<Box<dyn Fn(&FElement) -> SemimoduleElement + 'a>, SemimodError> {
    is_affine(base, codomain, &|x| f(x), grid, samples)?;

    let out = move |u: &FElement| -> SemimoduleElement {
        match u {
            FElement::Zero => codomain.zero(),
            FElement::Pair(r, x) => codomain.smul(r, &f(x)).expect("scale is positive and f lands in Y"),
        }
    };

    // Homomorphism spot-check on pairs built from the samples.
    let f_elems: Vec<FElement> = std::iter::once(FElement::Zero)
        .chain(samples.iter().enumerate().map(|(i, x)| {
            FElement::Pair(Rational::new(i as i64 % 3 + 1, 2), x.clone())
        }))
        .collect();
    for u in &f_elems {
        for v in &f_elems {
            let lhs = out(&f_add(base, u, v)?);
            let rhs = codomain.add(&out(u), &out(v))?;
            if lhs != rhs {
                return Err(SemimodError::NotHomomorphism { witness: format!("({u}) + ({v})") });
            }
        }
        for s in grid {
            let lhs = out(&f_smul(s, u)?);
            let rhs = codomain.smul(s, &out(u))?;
            if lhs != rhs {
                return Err(SemimodError::NotHomomorphism { witness: format!("{s} • ({u})") });
            }
        }
    }

    Ok(Box::new(out))
}

/// The downward transposition: a semimodule map `g: F(X) → Y` restricts to
/// the affine map `x ↦ g(1, x)`. The homomorphism property of `g` is
/// verified on samples first, affinity of the result afterwards.
#[allow(clippy::type_complexity)]
pub fn transpose_down<'a>(
    base: &'a ConvexAlgebra,
    codomain: &'a Semimodule,
    g: &'a (dyn Fn(&FElement) -> SemimoduleElement + 'a),
    grid: &[Rational],
    samples: &[ConvexElement],
) -> Result<Box<dyn Fn(&ConvexElement) -> SemimoduleElement + 'a>, SemimodError> {
    let f_elems: Vec<FElement> = std::iter::once(FElement::Zero)
        .chain(samples.iter().enumerate().map(|(i, x)| {
            FElement::Pair(Rational::new(i as i64 % 4 + 1, 3), x.clone())
        }))
        .collect();
    if g(&FElement::Zero) != codomain.zero() {
        return Err(SemimodError::NotHomomorphism { witness: "0".into() });
    }
    for u in &f_elems {
        for v in &f_elems {
            let lhs = g(&f_add(base, u, v)?);
            let rhs = codomain.add(&g(u), &g(v))?;
            if lhs != rhs {
                return Err(SemimodError::NotHomomorphism { witness: format!("({u}) + ({v})") });
            }
        }
        for s in grid {
            let lhs = g(&f_smul(s, u)?);
            let rhs = codomain.smul(s, &g(u))?;
            if lhs != rhs {
                return Err(SemimodError::NotHomomorphism { witness: format!("{s} • ({u})") });
            }
        }
    }

    let out = move |x: &ConvexElement| -> SemimoduleElement { g(&FElement::Pair(Rational::one(), x.clone())) };
    is_affine(base, codomain, &out, grid, samples)?;
    Ok(Box::new(out))
}

/// Runs the transposition round-trip suite on seeded `(f, g)` pairs for a
/// convex algebra, choosing a codomain that suits its family: a powerset
/// join semilattice for semilattices, a nonnegative orthant otherwise.
pub fn adjunction_round_trip_suite(
    base: &ConvexAlgebra,
    pairs: usize,
    rng: &mut dyn RngCore,
) -> CheckReport {
    let mut report = CheckReport::new(format!("F({}) ⊣ U", base.name()), "free-semimodule-adjunction");
    let grid: Vec<Rational> = crate::convex::standard_grid(rng).into_iter().take(9).collect();
    let samples: Vec<ConvexElement> = base.sample_pool(5, rng).into_iter().take(6).collect();

    enum Co {
        Join(Semimodule),
        Orthant(Semimodule, usize),
    }
    let codomain = match base {
        ConvexAlgebra::Semilattice(_) => Co::Join(Semimodule::JoinSemilattice(JoinSemilatticeMod::powerset(3))),
        ConvexAlgebra::Simplex(_) | ConvexAlgebra::Polytope(_) => {
            Co::Orthant(Semimodule::NonNegOrthant { name: "orthant2".into(), dim: 2 }, 2)
        }
    };

    // Draws one random affine map for the family; resamples until affine
    // for the semilattice case, where arbitrary tables need filtering.
    let draw_affine = |rng: &mut dyn RngCore| -> Option<(Box<dyn Fn(&ConvexElement) -> SemimoduleElement>, &Semimodule)> {
        match (&codomain, base) {
            (Co::Join(y), ConvexAlgebra::Semilattice(l)) => {
                // A random table into the join semilattice; kept only when
                // it happens to be affine (meet-to-join reversing).
                let Semimodule::JoinSemilattice(target) = y else { unreachable!() };
                let table: std::collections::BTreeMap<String, String> = l
                    .elements()
                    .iter()
                    .map(|e| (e.clone(), sampling::pick(rng, target.elements()).clone()))
                    .collect();
                let f = move |x: &ConvexElement| -> SemimoduleElement {
                    let ConvexElement::Lattice(e) = x else { panic!("lattice element") };
                    SemimoduleElement::Join(table[e].clone())
                };
                if is_affine(base, y, &f, &grid, &samples).is_err() {
                    return None;
                }
                Some((Box::new(f), y))
            }
            (Co::Orthant(y, dim), ConvexAlgebra::Simplex(s)) => {
                let table: std::collections::BTreeMap<String, Vec<Rational>> = s
                    .vertices()
                    .iter()
                    .map(|v| {
                        let vec: Vec<Rational> =
                            (0..*dim).map(|_| sampling::nonneg_rational(rng, 4, 8)).collect();
                        (v.clone(), vec)
                    })
                    .collect();
                let f = move |x: &ConvexElement| -> SemimoduleElement {
                    let ConvexElement::Bary(d) = x else { panic!("simplex element") };
                    let mut acc = linalg::zeros(table.values().next().map(|v| v.len()).unwrap_or(0));
                    for (v, r) in d.terms() {
                        acc = linalg::add_vec(&acc, &linalg::scale(&table[v], r));
                    }
                    SemimoduleElement::Vector(acc)
                };
                Some((Box::new(f), y))
            }
            (Co::Orthant(y, dim), ConvexAlgebra::Polytope(p)) => {
                let d_in = p.dim();
                let matrix: Vec<Vec<Rational>> = (0..*dim)
                    .map(|_| (0..d_in).map(|_| sampling::nonneg_rational(rng, 3, 6)).collect())
                    .collect();
                let offset: Vec<Rational> =
                    (0..*dim).map(|_| sampling::nonneg_rational(rng, 3, 6)).collect();
                let f = move |x: &ConvexElement| -> SemimoduleElement {
                    let ConvexElement::Point { coords, .. } = x else { panic!("polytope element") };
                    let v: Vec<Rational> = matrix
                        .iter()
                        .zip(&offset)
                        .map(|(row, c)| &linalg::dot(row, coords) + c)
                        .collect();
                    SemimoduleElement::Vector(v)
                };
                Some((Box::new(f), y))
            }
            _ => None,
        }
    };

    let mut checked = 0usize;
    let mut failure: Option<String> = None;
    let mut attempts = 0usize;
    while checked < pairs && attempts < pairs * 200 {
        attempts += 1;
        let Some((f, codomain_ref)) = draw_affine(rng) else { continue };
        let f_ref: &dyn Fn(&ConvexElement) -> SemimoduleElement = &*f;
        let up = match transpose_up(base, codomain_ref, f_ref, &grid, &samples) {
            Ok(u) => u,
            Err(SemimodError::Convex(ConvexError::NotAffine { .. })) => continue,
            Err(e) => {
                failure = Some(format!("transpose_up failed: {e}"));
                break;
            }
        };
        checked += 1;

        // Round trip one: down(up(f)) = f pointwise.
        let up_ref: &dyn Fn(&FElement) -> SemimoduleElement = &*up;
        match transpose_down(base, codomain_ref, up_ref, &grid, &samples) {
            Ok(down) => {
                for x in &samples {
                    if down(x) != f(x) {
                        failure = Some(format!("down(up(f)) differs at {x}"));
                    }
                }
                // Round trip two: up(down(g)) = g on sampled F-elements,
                // where g = up(f) plays the generic homomorphism.
                let down_ref: &dyn Fn(&ConvexElement) -> SemimoduleElement = &*down;
                match transpose_up(base, codomain_ref, down_ref, &grid, &samples) {
                    Ok(up2) => {
                        let mut felems = vec![FElement::Zero];
                        for (i, x) in samples.iter().enumerate() {
                            felems.push(FElement::Pair(Rational::new(i as i64 + 1, 2), x.clone()));
                        }
                        for u in &felems {
                            if up2(u) != up(u) {
                                failure = Some(format!("up(down(g)) differs at {u}"));
                            }
                        }
                    }
                    Err(e) => failure = Some(format!("second transpose_up failed: {e}")),
                }
            }
            Err(e) => failure = Some(format!("transpose_down failed: {e}")),
        }
        if failure.is_some() {
            break;
        }
    }
    report.record(
        "round-trips-are-identities",
        failure.is_none() && checked >= pairs,
        || json!({ "witness": failure, "pairs_checked": checked }),
    );
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::{MeetSemilattice, PolytopeAlgebra, SimplexAlgebra};
    use crate::scalars::rat;

    fn rng() -> rand_chacha::ChaCha8Rng {
        sampling::rng_for(sampling::DEFAULT_SEED, "semimod-tests")
    }

    fn simplex_ab() -> ConvexAlgebra {
        ConvexAlgebra::Simplex(SimplexAlgebra::new("ab", vec!["a".into(), "b".into()]).unwrap())
    }

    fn one_point() -> ConvexAlgebra {
        ConvexAlgebra::Simplex(SimplexAlgebra::new("pt", vec!["*".into()]).unwrap())
    }

    #[test]
    fn f_add_zero_cases() {
        let x = simplex_ab();
        let u = FElement::Pair(Rational::one(), ConvexElement::vertex("a"));
        assert_eq!(f_add(&x, &u, &FElement::Zero).unwrap(), u);
        assert_eq!(f_add(&x, &FElement::Zero, &u).unwrap(), u);
        assert_eq!(f_add(&x, &FElement::Zero, &FElement::Zero).unwrap(), FElement::Zero);
    }

    #[test]
    fn f_add_collapses_on_a_point() {
        let x = one_point();
        let star = ConvexElement::vertex("*");
        let u = FElement::Pair(rat(3, 2), star.clone());
        let v = FElement::Pair(rat(1, 2), star.clone());
        assert_eq!(f_add(&x, &u, &v).unwrap(), FElement::Pair(rat(2, 1), star));
    }

    #[test]
    fn f_add_mixes_the_base() {
        // (1, a) + (1, b) = (2, 1/2 a + 1/2 b) over the free simplex.
        let x = simplex_ab();
        let u = FElement::Pair(Rational::one(), ConvexElement::vertex("a"));
        let v = FElement::Pair(Rational::one(), ConvexElement::vertex("b"));
        let sum = f_add(&x, &u, &v).unwrap();
        let expected_point = ConvexElement::Bary(
            Dist::from_weights([(rat(1, 2), "a".to_string()), (rat(1, 2), "b".to_string())]).unwrap(),
        );
        assert_eq!(sum, FElement::Pair(rat(2, 1), expected_point));
    }

    #[test]
    fn f_smul_cases() {
        let u = FElement::Pair(rat(2, 1), ConvexElement::vertex("a"));
        assert_eq!(f_smul(&Rational::zero(), &u).unwrap(), FElement::Zero);
        assert_eq!(f_smul(&Rational::one(), &u).unwrap(), u);
        assert_eq!(
            f_smul(&rat(3, 1), &u).unwrap(),
            FElement::Pair(rat(6, 1), ConvexElement::vertex("a"))
        );
        assert_eq!(f_smul(&rat(3, 1), &FElement::Zero).unwrap(), FElement::Zero);
        assert!(f_smul(&rat(-1, 2), &u).is_err());
    }

    #[test]
    fn orthant_axioms() {
        let m = Semimodule::NonNegOrthant { name: "orthant2".into(), dim: 2 };
        let mut rng = rng();
        let samples: Vec<SemimoduleElement> = (0..5).map(|_| m.sample_element(&mut rng)).collect();
        let scalars = vec![Rational::zero(), Rational::one(), rat(1, 2), rat(3, 1)];
        check_semimodule_axioms(&m, &samples, &scalars).expect_all_passed();
    }

    #[test]
    fn free_on_simplex_axioms() {
        let m = Semimodule::FreeOnConvex(Box::new(simplex_ab()));
        let mut rng = rng();
        let mut samples: Vec<SemimoduleElement> =
            (0..5).map(|_| m.sample_element(&mut rng)).collect();
        samples.push(SemimoduleElement::F(FElement::Zero));
        let scalars = vec![Rational::zero(), Rational::one(), rat(2, 3), rat(5, 2)];
        check_semimodule_axioms(&m, &samples, &scalars).expect_all_passed();
    }

    #[test]
    fn join_semilattice_axioms() {
        let m = Semimodule::JoinSemilattice(JoinSemilatticeMod::powerset(2));
        let mut rng = rng();
        let samples: Vec<SemimoduleElement> = (0..6).map(|_| m.sample_element(&mut rng)).collect();
        let scalars = vec![Rational::zero(), Rational::one(), rat(1, 3), rat(7, 2)];
        check_semimodule_axioms(&m, &samples, &scalars).expect_all_passed();
    }

    #[test]
    fn free_multiset_axioms() {
        let m = Semimodule::FreeMultiset { name: "bag".into(), labels: vec!["p".into(), "q".into()] };
        let mut rng = rng();
        let samples: Vec<SemimoduleElement> = (0..5).map(|_| m.sample_element(&mut rng)).collect();
        let scalars = vec![Rational::zero(), Rational::one(), rat(1, 2)];
        check_semimodule_axioms(&m, &samples, &scalars).expect_all_passed();
    }

    #[test]
    fn corrupted_f_add_breaks_associativity() {
        // Forgetting to renormalize: always mix with equal weights.
        fn corrupt_add(base: &ConvexAlgebra, u: &FElement, v: &FElement) -> FElement {
            match (u, v) {
                (FElement::Pair(s, x), FElement::Pair(t, y)) => {
                    let mixed = base
                        .evaluate(
                            &Dist::from_weights([(rat(1, 2), x.clone()), (rat(1, 2), y.clone())])
                                .unwrap(),
                        )
                        .unwrap();
                    FElement::Pair(s + t, mixed)
                }
                (FElement::Zero, v) => v.clone(),
                (u, _) => u.clone(),
            }
        }

        let base = ConvexAlgebra::Simplex(
            SimplexAlgebra::new("abc", vec!["a".into(), "b".into(), "c".into()]).unwrap(),
        );
        let u = FElement::Pair(rat(1, 1), ConvexElement::vertex("a"));
        let v = FElement::Pair(rat(1, 1), ConvexElement::vertex("b"));
        let w = FElement::Pair(rat(2, 1), ConvexElement::vertex("c"));

        let left = corrupt_add(&base, &corrupt_add(&base, &u, &v), &w);
        let right = corrupt_add(&base, &u, &corrupt_add(&base, &v, &w));
        assert_ne!(left, right, "the corrupted addition must fail associativity");

        // The lawful addition passes the same probe.
        let good_left = f_add(&base, &f_add(&base, &u, &v).unwrap(), &w).unwrap();
        let good_right = f_add(&base, &u, &f_add(&base, &v, &w).unwrap()).unwrap();
        assert_eq!(good_left, good_right);
    }

    #[test]
    fn transpose_round_trips_on_simplex_to_orthant() {
        let base = simplex_ab();
        let codomain = Semimodule::NonNegOrthant { name: "orthant2".into(), dim: 2 };
        let mut rng = rng();
        let grid: Vec<Rational> = crate::convex::standard_grid(&mut rng).into_iter().take(9).collect();
        let samples: Vec<ConvexElement> = base.sample_pool(5, &mut rng).into_iter().take(5).collect();

        // f sends a barycentric point to its coordinate vector: affine by
        // freeness.
        let f = |x: &ConvexElement| -> SemimoduleElement {
            let ConvexElement::Bary(d) = x else { panic!("simplex element") };
            let a = d.coeff(&"a".to_string()).cloned().unwrap_or_else(Rational::zero);
            let b = d.coeff(&"b".to_string()).cloned().unwrap_or_else(Rational::zero);
            SemimoduleElement::Vector(vec![a, b])
        };

        let up = transpose_up(&base, &codomain, &f, &grid, &samples).unwrap();

        // Zero maps to zero, pairs scale.
        assert_eq!(up(&FElement::Zero), codomain.zero());
        let probe = FElement::Pair(rat(3, 1), ConvexElement::vertex("a"));
        assert_eq!(up(&probe), SemimoduleElement::Vector(vec![rat(3, 1), rat(0, 1)]));

        // Down after up restores f pointwise.
        let up_ref: &dyn Fn(&FElement) -> SemimoduleElement = &*up;
        let down = transpose_down(&base, &codomain, up_ref, &grid, &samples).unwrap();
        for x in &samples {
            assert_eq!(down(x), f(x));
        }

        // Up after down restores the original semimodule map pointwise.
        let down_ref: &dyn Fn(&ConvexElement) -> SemimoduleElement = &*down;
        let up2 = transpose_up(&base, &codomain, down_ref, &grid, &samples).unwrap();
        let mut felems: Vec<FElement> = vec![FElement::Zero];
        for (i, x) in samples.iter().enumerate() {
            felems.push(FElement::Pair(rat(i as i64 + 1, 2), x.clone()));
        }
        for u in &felems {
            assert_eq!(up2(u), up(u));
        }
    }

    #[test]
    fn transpose_up_sends_constant_top_to_top() {
        // f constant at the top of a join semilattice: (s, x) ↦ top.
        let base = simplex_ab();
        let lattice = JoinSemilatticeMod::powerset(1);
        let top = SemimoduleElement::Join("{0}".into());
        let codomain = Semimodule::JoinSemilattice(lattice);
        let mut rng = rng();
        let grid: Vec<Rational> = crate::convex::standard_grid(&mut rng).into_iter().take(7).collect();
        let samples: Vec<ConvexElement> = base.sample_pool(4, &mut rng).into_iter().take(4).collect();
        let top_for_f = top.clone();
        let f = move |_: &ConvexElement| -> SemimoduleElement { top_for_f.clone() };
        let up = transpose_up(&base, &codomain, &f, &grid, &samples).unwrap();
        assert_eq!(up(&FElement::Pair(rat(7, 3), ConvexElement::vertex("b"))), top);
        assert_eq!(up(&FElement::Zero), codomain.zero());
    }

    #[test]
    fn transpose_down_rejects_non_homomorphisms() {
        let base = simplex_ab();
        let codomain = Semimodule::NonNegOrthant { name: "orthant1".into(), dim: 1 };
        let mut rng = rng();
        let grid: Vec<Rational> = crate::convex::standard_grid(&mut rng).into_iter().take(7).collect();
        let samples: Vec<ConvexElement> = base.sample_pool(4, &mut rng).into_iter().take(4).collect();
        // Constant nonzero map: not additive on F(X).
        let g = |_: &FElement| -> SemimoduleElement { SemimoduleElement::Vector(vec![Rational::one()]) };
        let err = transpose_down(&base, &codomain, &g, &grid, &samples).err();
        assert!(matches!(err, Some(SemimodError::NotHomomorphism { .. })), "got {err:?}");
    }

    #[test]
    fn zero_map_special_case() {
        // The zero map F(X) → 0-dimensional orthant is a homomorphism into
        // the trivial module; its transpose is the constant map.
        let base = simplex_ab();
        let codomain = Semimodule::NonNegOrthant { name: "trivial".into(), dim: 0 };
        let mut rng = rng();
        let grid: Vec<Rational> = crate::convex::standard_grid(&mut rng).into_iter().take(7).collect();
        let samples: Vec<ConvexElement> = base.sample_pool(4, &mut rng).into_iter().take(4).collect();
        let g = |_: &FElement| -> SemimoduleElement { SemimoduleElement::Vector(vec![]) };
        let down = transpose_down(&base, &codomain, &g, &grid, &samples).unwrap();
        assert_eq!(down(&ConvexElement::vertex("a")), SemimoduleElement::Vector(vec![]));
    }

    #[test]
    fn naturality_square_commutes() {
        // Post-composing with a semimodule map h: Y → Z before or after
        // transposing gives the same F(X) → Z map.
        let base = simplex_ab();
        let y = Semimodule::NonNegOrthant { name: "orthant2".into(), dim: 2 };
        let z = Semimodule::NonNegOrthant { name: "orthant1".into(), dim: 1 };
        let mut rng = rng();
        let grid: Vec<Rational> = crate::convex::standard_grid(&mut rng).into_iter().take(9).collect();
        let samples: Vec<ConvexElement> = base.sample_pool(5, &mut rng).into_iter().take(5).collect();

        let f = |x: &ConvexElement| -> SemimoduleElement {
            let ConvexElement::Bary(d) = x else { panic!() };
            let a = d.coeff(&"a".to_string()).cloned().unwrap_or_else(Rational::zero);
            let b = d.coeff(&"b".to_string()).cloned().unwrap_or_else(Rational::zero);
            SemimoduleElement::Vector(vec![a, b])
        };
        // h sums the coordinates: linear, hence a semimodule map.
        let h = |v: &SemimoduleElement| -> SemimoduleElement {
            let SemimoduleElement::Vector(v) = v else { panic!() };
            SemimoduleElement::Vector(vec![&v[0] + &v[1]])
        };

        let up_f = transpose_up(&base, &y, &f, &grid, &samples).unwrap();
        let hf = move |x: &ConvexElement| h(&f(x));
        let up_hf = transpose_up(&base, &z, &hf, &grid, &samples).unwrap();

        let mut felems: Vec<FElement> = vec![FElement::Zero];
        for (i, x) in samples.iter().enumerate() {
            felems.push(FElement::Pair(rat(i as i64 + 1, 3), x.clone()));
        }
        for u in &felems {
            assert_eq!(up_hf(u), h(&up_f(u)));
        }
    }

    #[test]
    fn equality_of_f_elements_by_base_representation() {
        // Over a polytope base, pairs compare by exact coordinates.
        let seg = PolytopeAlgebra::new("seg", 1, vec![vec![Rational::zero()], vec![Rational::one()]]).unwrap();
        let via_weights = seg.element_from_weights(vec![rat(1, 2), rat(1, 2)]).unwrap();
        let via_coords = seg.element_from_coords(vec![rat(1, 2)]).unwrap();
        assert_eq!(
            FElement::Pair(rat(2, 1), via_weights),
            FElement::Pair(rat(2, 1), via_coords)
        );
        // Over a simplex base, by canonical distribution.
        let d1 = ConvexElement::Bary(
            Dist::from_weights([
                (rat(1, 4), "a".to_string()),
                (rat(1, 4), "a".to_string()),
                (rat(1, 2), "b".to_string()),
            ])
            .unwrap(),
        );
        let d2 = ConvexElement::Bary(
            Dist::from_weights([(rat(1, 2), "a".to_string()), (rat(1, 2), "b".to_string())]).unwrap(),
        );
        assert_eq!(FElement::Pair(Rational::one(), d1), FElement::Pair(Rational::one(), d2));
    }

    #[test]
    fn constant_bottom_map_transposes_to_zero_map() {
        let base = ConvexAlgebra::Semilattice(MeetSemilattice::two());
        let codomain = Semimodule::JoinSemilattice(JoinSemilatticeMod::powerset(1));
        let mut rng = rng();
        let grid: Vec<Rational> = crate::convex::standard_grid(&mut rng).into_iter().take(7).collect();
        let samples = base.sample_pool(0, &mut rng);
        let f = |_: &ConvexElement| -> SemimoduleElement { SemimoduleElement::Join("{}".into()) };
        let up = transpose_up(&base, &codomain, &f, &grid, &samples).unwrap();
        assert_eq!(
            up(&FElement::Pair(rat(1, 2), ConvexElement::lattice("1"))),
            SemimoduleElement::Join("{}".into())
        );
    }
}
