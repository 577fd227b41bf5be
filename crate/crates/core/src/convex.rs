//! Convex algebras: structures in which every finite rational convex
//! combination of elements evaluates to an element.
//!
//! Three finitely presentable families cover everything this crate needs:
//! meet semilattices (a combination evaluates to the meet of its support),
//! free simplices (a combination of barycentric points flattens), and
//! rational polytopes (coordinatewise combination). Each family supports
//! both the direct evaluation map and the ternary operation `⟨r, x, y⟩`,
//! plus the recursive peel-one-coefficient evaluation derived from the
//! ternary form; the two evaluation routes are checked against each other.

use std::fmt;

use rand::RngCore;
use serde_json::json;
use thiserror::Error;

use crate::formal::{mult, Dist, FormalSum};
use crate::linalg::{self, LinCon, Vector};
use crate::report::CheckReport;
use crate::sampling;
use crate::scalars::{NonNegRationalSemiring, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConvexError {
    #[error("element {element} does not belong to {algebra}")]
    ForeignElement { algebra: String, element: String },
    #[error("scalar {scalar} lies outside the unit interval")]
    ScalarOutOfRange { scalar: String },
    #[error("point {point} is not in the hull")]
    NotInHull { point: String },
    #[error("meet table is not a semilattice: {reason}")]
    BadSemilattice { reason: String },
    #[error("bad generators: {reason}")]
    BadGenerators { reason: String },
    #[error("map is not affine at {witness}")]
    NotAffine { witness: String },
    #[error(transparent)]
    Formal(#[from] crate::formal::FormalError),
}

/// A finite meet semilattice presented by a total meet table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeetSemilattice {
    name: String,
    elements: Vec<String>,
    meet: Vec<Vec<usize>>,
    top: Option<usize>,
}

impl MeetSemilattice {
    /// Builds and validates a semilattice: associativity, commutativity and
    /// idempotence are checked exhaustively, and a declared top must be
    /// neutral.
    pub fn new(
        name: impl Into<String>,
        elements: Vec<String>,
        meet: Vec<Vec<usize>>,
        top: Option<usize>,
    ) -> Result<Self, ConvexError> {
        let lat = Self::from_table_unchecked(name, elements, meet, top)?;
        let n = lat.elements.len();
        for a in 0..n {
            if lat.meet[a][a] != a {
                return Err(ConvexError::BadSemilattice {
                    reason: format!("not idempotent at {}", lat.elements[a]),
                });
            }
            for b in 0..n {
                if lat.meet[a][b] != lat.meet[b][a] {
                    return Err(ConvexError::BadSemilattice {
                        reason: format!("not commutative at ({}, {})", lat.elements[a], lat.elements[b]),
                    });
                }
                for c in 0..n {
                    if lat.meet[lat.meet[a][b]][c] != lat.meet[a][lat.meet[b][c]] {
                        return Err(ConvexError::BadSemilattice {
                            reason: format!(
                                "not associative at ({}, {}, {})",
                                lat.elements[a], lat.elements[b], lat.elements[c]
                            ),
                        });
                    }
                }
            }
        }
        if let Some(t) = lat.top {
            for a in 0..n {
                if lat.meet[t][a] != a {
                    return Err(ConvexError::BadSemilattice {
                        reason: format!("declared top is not neutral at {}", lat.elements[a]),
                    });
                }
            }
        }
        Ok(lat)
    }

    /// Builds a semilattice without checking the laws. Only shape errors are
    /// rejected. Exists so corrupted tables can be fed to the axiom checkers
    /// as negative controls.
    pub fn from_table_unchecked(
        name: impl Into<String>,
        elements: Vec<String>,
        meet: Vec<Vec<usize>>,
        top: Option<usize>,
    ) -> Result<Self, ConvexError> {
        let n = elements.len();
        if n == 0 {
            return Err(ConvexError::BadSemilattice { reason: "empty carrier".into() });
        }
        let mut sorted = elements.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != n {
            return Err(ConvexError::BadSemilattice { reason: "duplicate elements".into() });
        }
        if meet.len() != n || meet.iter().any(|row| row.len() != n) {
            return Err(ConvexError::BadSemilattice { reason: "meet table has wrong shape".into() });
        }
        if meet.iter().flatten().any(|&v| v >= n) {
            return Err(ConvexError::BadSemilattice { reason: "meet table index out of range".into() });
        }
        if top.is_some_and(|t| t >= n) {
            return Err(ConvexError::BadSemilattice { reason: "top index out of range".into() });
        }
        Ok(MeetSemilattice { name: name.into(), elements, meet, top })
    }

    /// The two-element meet semilattice `{0, 1}`, the Boolean dualizing
    /// object with its meet-induced convex structure.
    pub fn two() -> Self {
        MeetSemilattice::new(
            "two",
            vec!["0".into(), "1".into()],
            vec![vec![0, 0], vec![0, 1]],
            Some(1),
        )
        .expect("two is a semilattice")
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn index_of(&self, e: &str) -> Option<usize> {
        self.elements.iter().position(|x| x == e)
    }

    pub fn meet_idx(&self, a: usize, b: usize) -> usize {
        self.meet[a][b]
    }

    pub fn meet_of(&self, a: &str, b: &str) -> Option<&str> {
        let (i, j) = (self.index_of(a)?, self.index_of(b)?);
        Some(&self.elements[self.meet[i][j]])
    }

    /// `a ≤ b` in the meet order.
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.meet[a][b] == a
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

/// The free convex algebra on a finite vertex set; elements are barycentric
/// rational distributions over the vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplexAlgebra {
    name: String,
    vertices: Vec<String>,
}

impl SimplexAlgebra {
    pub fn new(name: impl Into<String>, mut vertices: Vec<String>) -> Result<Self, ConvexError> {
        if vertices.is_empty() {
            return Err(ConvexError::BadGenerators { reason: "empty vertex set".into() });
        }
        vertices.sort();
        let before = vertices.len();
        vertices.dedup();
        if vertices.len() != before {
            return Err(ConvexError::BadGenerators { reason: "duplicate vertices".into() });
        }
        Ok(SimplexAlgebra { name: name.into(), vertices })
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

/// A convex polytope given by a finite generator list in `ℚ^d`; elements are
/// points carrying an explicit convex-combination certificate over the
/// generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolytopeAlgebra {
    name: String,
    dim: usize,
    generators: Vec<Vector>,
}

impl PolytopeAlgebra {
    pub fn new(name: impl Into<String>, dim: usize, generators: Vec<Vector>) -> Result<Self, ConvexError> {
        if generators.is_empty() {
            return Err(ConvexError::BadGenerators { reason: "empty generator list".into() });
        }
        if generators.iter().any(|g| g.len() != dim) {
            return Err(ConvexError::BadGenerators { reason: "generator with wrong dimension".into() });
        }
        let mut seen = generators.clone();
        seen.sort();
        let before = seen.len();
        seen.dedup();
        if seen.len() != before {
            return Err(ConvexError::BadGenerators { reason: "duplicate generator point".into() });
        }
        Ok(PolytopeAlgebra { name: name.into(), dim, generators })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Vector] {
        &self.generators
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// The element given by explicit generator weights; the certificate is
    /// the weight vector itself.
    pub fn element_from_weights(&self, weights: Vector) -> Result<ConvexElement, ConvexError> {
        let g = self.generators.len();
        if weights.len() != g
            || weights.iter().any(Rational::is_negative)
            || weights.iter().cloned().sum::<Rational>() != Rational::one()
        {
            return Err(ConvexError::NotInHull { point: format!("{weights:?}") });
        }
        let mut coords = linalg::zeros(self.dim);
        for (w, gen) in weights.iter().zip(&self.generators) {
            coords = linalg::add_vec(&coords, &linalg::scale(gen, w));
        }
        Ok(ConvexElement::Point { coords, cert: weights })
    }

    /// Solves for a membership certificate of the given coordinates; this is
    /// the one place a point enters a polytope without carrying weights.
    pub fn element_from_coords(&self, coords: Vector) -> Result<ConvexElement, ConvexError> {
        if coords.len() != self.dim {
            return Err(ConvexError::NotInHull { point: format!("{coords:?}") });
        }
        let g = self.generators.len();
        let mut cons = Vec::new();
        cons.push(LinCon::eq(vec![Rational::one(); g], Rational::one()));
        for d in 0..self.dim {
            let row: Vector = self.generators.iter().map(|gen| gen[d].clone()).collect();
            cons.push(LinCon::eq(row, coords[d].clone()));
        }
        for i in 0..g {
            let mut row = linalg::zeros(g);
            row[i] = Rational::one();
            cons.push(LinCon::ge(row, Rational::zero()));
        }
        let cert = linalg::feasible_point(&cons, g)
            .ok_or_else(|| ConvexError::NotInHull { point: format!("{coords:?}") })?;
        Ok(ConvexElement::Point { coords, cert })
    }

    pub fn vertex_element(&self, index: usize) -> ConvexElement {
        let mut cert = linalg::zeros(self.generators.len());
        cert[index] = Rational::one();
        ConvexElement::Point { coords: self.generators[index].clone(), cert }
    }

    /// Checks a stored certificate against the generator data.
    pub fn certificate_valid(&self, coords: &[Rational], cert: &[Rational]) -> bool {
        if cert.len() != self.generators.len() || coords.len() != self.dim {
            return false;
        }
        if cert.iter().any(Rational::is_negative) {
            return false;
        }
        if cert.iter().cloned().sum::<Rational>() != Rational::one() {
            return false;
        }
        let mut acc = linalg::zeros(self.dim);
        for (w, gen) in cert.iter().zip(&self.generators) {
            acc = linalg::add_vec(&acc, &linalg::scale(gen, w));
        }
        acc == coords
    }
}

/// One of the three convex-algebra families.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConvexAlgebra {
    Semilattice(MeetSemilattice),
    Simplex(SimplexAlgebra),
    Polytope(PolytopeAlgebra),
}

impl ConvexAlgebra {
    pub fn name(&self) -> &str {
        match self {
            ConvexAlgebra::Semilattice(l) => l.name(),
            ConvexAlgebra::Simplex(s) => s.name(),
            ConvexAlgebra::Polytope(p) => p.name(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ConvexAlgebra::Semilattice(_) => "semilattice",
            ConvexAlgebra::Simplex(_) => "simplex",
            ConvexAlgebra::Polytope(_) => "polytope",
        }
    }
}

/// An element of one of the three families. Polytope points compare by
/// coordinates only: two certificates for the same point denote the same
/// element.
#[derive(Clone)]
pub enum ConvexElement {
    Lattice(String),
    Bary(Dist<String, Rational>),
    Point { coords: Vector, cert: Vector },
}

impl ConvexElement {
    pub fn lattice(e: impl Into<String>) -> Self {
        ConvexElement::Lattice(e.into())
    }

    pub fn vertex(v: impl Into<String>) -> Self {
        ConvexElement::Bary(Dist::point(v.into()))
    }

    fn rank(&self) -> u8 {
        match self {
            ConvexElement::Lattice(_) => 0,
            ConvexElement::Bary(_) => 1,
            ConvexElement::Point { .. } => 2,
        }
    }
}

impl PartialEq for ConvexElement {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (ConvexElement::Lattice(a), ConvexElement::Lattice(b)) => a == b,
            (ConvexElement::Bary(a), ConvexElement::Bary(b)) => a == b,
            (ConvexElement::Point { coords: a, .. }, ConvexElement::Point { coords: b, .. }) => a == b,
            _ => false,
        }
    }
}

impl Eq for ConvexElement {}

impl PartialOrd for ConvexElement {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ConvexElement {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match self.rank().cmp(&other.rank()) {
            Ordering::Equal => match (self, other) {
                (ConvexElement::Lattice(a), ConvexElement::Lattice(b)) => a.cmp(b),
                (ConvexElement::Bary(a), ConvexElement::Bary(b)) => a.cmp(b),
                (ConvexElement::Point { coords: a, .. }, ConvexElement::Point { coords: b, .. }) => a.cmp(b),
                _ => unreachable!("ranks matched"),
            },
            o => o,
        }
    }
}

impl fmt::Display for ConvexElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConvexElement::Lattice(e) => write!(f, "{e}"),
            ConvexElement::Bary(d) => write!(f, "{d}"),
            ConvexElement::Point { coords, .. } => {
                let parts: Vec<String> = coords.iter().map(|c| c.to_string()).collect();
                write!(f, "({})", parts.join(", "))
            }
        }
    }
}

impl fmt::Debug for ConvexElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Anything that can evaluate rational convex combinations of its points.
pub trait Mixes {
    type Point: Ord + Clone + fmt::Display;

    fn mix(&self, dist: &Dist<Self::Point, Rational>) -> Result<Self::Point, ConvexError>;

    fn describe(&self) -> String;

    /// Binary mix `⟨r, x, y⟩ = r·x + (1−r)·y`.
    fn ternary(&self, r: &Rational, x: &Self::Point, y: &Self::Point) -> Result<Self::Point, ConvexError> {
        if !r.in_unit_interval() {
            return Err(ConvexError::ScalarOutOfRange { scalar: r.to_string() });
        }
        let one_minus = Rational::one() - r.clone();
        let dist = Dist::from_weights([(r.clone(), x.clone()), (one_minus, y.clone())])?;
        self.mix(&dist)
    }
}

impl ConvexAlgebra {
    pub fn contains(&self, e: &ConvexElement) -> bool {
        match (self, e) {
            (ConvexAlgebra::Semilattice(l), ConvexElement::Lattice(x)) => l.index_of(x).is_some(),
            (ConvexAlgebra::Simplex(s), ConvexElement::Bary(d)) => {
                d.support().all(|v| s.vertices.binary_search(v).is_ok())
            }
            (ConvexAlgebra::Polytope(p), ConvexElement::Point { coords, cert }) => {
                p.certificate_valid(coords, cert)
            }
            _ => false,
        }
    }

    /// Evaluates a distribution over elements of this algebra.
    pub fn evaluate(&self, dist: &Dist<ConvexElement, Rational>) -> Result<ConvexElement, ConvexError> {
        let foreign = |e: &ConvexElement| ConvexError::ForeignElement {
            algebra: self.name().to_string(),
            element: e.to_string(),
        };
        for e in dist.support() {
            if !self.contains(e) {
                return Err(foreign(e));
            }
        }
        let ring = NonNegRationalSemiring;
        match self {
            ConvexAlgebra::Semilattice(l) => {
                let mut acc: Option<usize> = None;
                for e in dist.support() {
                    let ConvexElement::Lattice(x) = e else { unreachable!() };
                    let i = l.index_of(x).expect("membership checked");
                    acc = Some(match acc {
                        None => i,
                        Some(j) => l.meet_idx(i, j),
                    });
                }
                let i = acc.expect("distributions have nonempty support");
                Ok(ConvexElement::Lattice(l.elements[i].clone()))
            }
            ConvexAlgebra::Simplex(_) => {
                let outer: FormalSum<FormalSum<String, Rational>, Rational> = FormalSum::normalize(
                    &ring,
                    dist.terms().map(|(e, r)| {
                        let ConvexElement::Bary(d) = e else { unreachable!() };
                        (r.clone(), d.as_sum().clone())
                    }),
                );
                let flat = mult(&ring, &outer);
                Ok(ConvexElement::Bary(Dist::new(&ring, flat)?))
            }
            ConvexAlgebra::Polytope(p) => {
                let mut coords = linalg::zeros(p.dim);
                let mut cert = linalg::zeros(p.generators.len());
                for (e, r) in dist.terms() {
                    let ConvexElement::Point { coords: c, cert: w } = e else { unreachable!() };
                    coords = linalg::add_vec(&coords, &linalg::scale(c, r));
                    cert = linalg::add_vec(&cert, &linalg::scale(w, r));
                }
                Ok(ConvexElement::Point { coords, cert })
            }
        }
    }

    /// Evaluation by the recursive peel-off formula: take the first summand,
    /// rescale the tail by `1/(1−r₁)`, and fold through the ternary
    /// operation. Agrees with [`ConvexAlgebra::evaluate`] and is invariant
    /// under permutation of the term list.
    pub fn evaluate_recursive(&self, terms: &[(Rational, ConvexElement)]) -> Result<ConvexElement, ConvexError> {
        assert!(!terms.is_empty(), "a convex combination has at least one term");
        let (r1, x1) = &terms[0];
        if r1.is_one() {
            // The remaining coefficients are all zero, so they are absent in
            // canonical form.
            return Ok(x1.clone());
        }
        let rest_scale = (Rational::one() - r1.clone()).recip().expect("r1 < 1");
        let tail: Vec<(Rational, ConvexElement)> = terms[1..]
            .iter()
            .map(|(r, x)| (r * &rest_scale, x.clone()))
            .collect();
        let tail_value = self.evaluate_recursive(&tail)?;
        self.ternary(r1, x1, &tail_value)
    }

    pub fn sample_element(&self, rng: &mut dyn RngCore) -> ConvexElement {
        match self {
            ConvexAlgebra::Semilattice(l) => {
                ConvexElement::Lattice(sampling::pick(rng, &l.elements).clone())
            }
            ConvexAlgebra::Simplex(s) => {
                let n = s.vertices.len();
                let size = 1 + sampling::below(rng, n.min(4) as u64) as usize;
                let mut picked: Vec<String> = Vec::new();
                while picked.len() < size {
                    let v = sampling::pick(rng, &s.vertices).clone();
                    if !picked.contains(&v) {
                        picked.push(v);
                    }
                }
                let weights = sampling::convex_weights(rng, picked.len(), 32);
                ConvexElement::Bary(
                    Dist::from_weights(weights.into_iter().zip(picked)).expect("weights sum to one"),
                )
            }
            ConvexAlgebra::Polytope(p) => {
                let weights = sampling::convex_weights(rng, p.generators.len(), 32);
                p.element_from_weights(weights).expect("weights sum to one")
            }
        }
    }

    /// A deterministic pool of sample elements: the whole carrier for finite
    /// algebras, seeded random points otherwise.
    pub fn sample_pool(&self, count: usize, rng: &mut dyn RngCore) -> Vec<ConvexElement> {
        match self {
            ConvexAlgebra::Semilattice(l) => {
                l.elements.iter().map(|e| ConvexElement::Lattice(e.clone())).collect()
            }
            ConvexAlgebra::Simplex(s) => {
                let mut pool: Vec<ConvexElement> =
                    s.vertices.iter().map(|v| ConvexElement::vertex(v.clone())).collect();
                while pool.len() < count {
                    pool.push(self.sample_element(rng));
                }
                pool.sort();
                pool.dedup();
                pool
            }
            ConvexAlgebra::Polytope(p) => {
                let mut pool: Vec<ConvexElement> =
                    (0..p.generators.len()).map(|i| p.vertex_element(i)).collect();
                while pool.len() < count {
                    pool.push(self.sample_element(rng));
                }
                pool.sort();
                pool.dedup();
                pool
            }
        }
    }
}

impl Mixes for ConvexAlgebra {
    type Point = ConvexElement;

    fn mix(&self, dist: &Dist<ConvexElement, Rational>) -> Result<ConvexElement, ConvexError> {
        self.evaluate(dist)
    }

    /// For semilattices the ternary operation is read off the meet table:
    /// `⟨r, x, y⟩ = x ∧ y` whenever `0 < r < 1`. On a lawful table this
    /// agrees with evaluating the two-term distribution; on a corrupted
    /// table it keeps the diagonal observable (the distribution `r·x +
    /// (1−r)·x` canonically merges to `1·x` before any meet happens).
    fn ternary(&self, r: &Rational, x: &ConvexElement, y: &ConvexElement) -> Result<ConvexElement, ConvexError> {
        if !r.in_unit_interval() {
            return Err(ConvexError::ScalarOutOfRange { scalar: r.to_string() });
        }
        if let ConvexAlgebra::Semilattice(l) = self {
            let foreign = |e: &ConvexElement| ConvexError::ForeignElement {
                algebra: l.name.clone(),
                element: e.to_string(),
            };
            if r.is_zero() {
                return if self.contains(y) { Ok(y.clone()) } else { Err(foreign(y)) };
            }
            if r.is_one() {
                return if self.contains(x) { Ok(x.clone()) } else { Err(foreign(x)) };
            }
            let ConvexElement::Lattice(a) = x else { return Err(foreign(x)) };
            let ConvexElement::Lattice(b) = y else { return Err(foreign(y)) };
            let i = l.index_of(a).ok_or_else(|| foreign(x))?;
            let j = l.index_of(b).ok_or_else(|| foreign(y))?;
            return Ok(ConvexElement::Lattice(l.elements[l.meet_idx(i, j)].clone()));
        }
        let one_minus = Rational::one() - r.clone();
        let dist = Dist::from_weights([(r.clone(), x.clone()), (one_minus, y.clone())])?;
        self.mix(&dist)
    }

    fn describe(&self) -> String {
        format!("{}:{}", self.kind(), self.name())
    }
}

/// The scalar grid used by the axiom checkers: the degenerate and small
/// fractions that hit every special branch, plus seeded random rationals
/// with denominator at most 64.
pub fn standard_grid(rng: &mut dyn RngCore) -> Vec<Rational> {
    let mut grid = vec![
        Rational::zero(),
        Rational::one(),
        Rational::new(1, 2),
        Rational::new(1, 3),
        Rational::new(2, 3),
        Rational::new(1, 4),
        Rational::new(3, 4),
    ];
    for _ in 0..16 {
        grid.push(sampling::unit_rational(rng, 64));
    }
    grid.sort();
    grid.dedup();
    grid
}

/// Checks the four convex-set axioms over the grid and element samples.
pub fn check_convex_axioms<M: Mixes>(
    algebra: &M,
    grid: &[Rational],
    samples: &[M::Point],
) -> CheckReport {
    let mut report = CheckReport::new(algebra.describe(), "convex-axioms");
    let mut fail1: Option<String> = None;
    let mut fail2: Option<String> = None;
    let mut fail3: Option<String> = None;
    let mut fail4: Option<String> = None;
    let note = |slot: &mut Option<String>, w: String| {
        if slot.as_ref().is_none_or(|cur| w < *cur) {
            *slot = Some(w);
        }
    };

    let tern = |r: &Rational, x: &M::Point, y: &M::Point| algebra.ternary(r, x, y);

    for x in samples {
        for y in samples {
            for r in grid {
                // (1) ⟨r, x, y⟩ = ⟨1−r, y, x⟩
                let lhs = tern(r, x, y);
                let rhs = tern(&(Rational::one() - r.clone()), y, x);
                if lhs != rhs {
                    note(&mut fail1, format!("r={r}, x={x}, y={y}"));
                }
                // (3) ⟨0, x, y⟩ = y
                if r.is_zero() && lhs != Ok(y.clone()) {
                    note(&mut fail3, format!("x={x}, y={y}"));
                }
            }
            // (2) ⟨r, x, x⟩ = x
            for r in grid {
                if tern(r, x, x) != Ok(x.clone()) {
                    note(&mut fail2, format!("r={r}, x={x}"));
                }
            }
        }
    }

    // (4) ⟨r, x, ⟨s, y, z⟩⟩ = ⟨r+(1−r)s, ⟨r/(r+(1−r)s), x, y⟩, z⟩,
    // skipped exactly when r+(1−r)s = 0, i.e. r = s = 0.
    let mut skipped4 = 0usize;
    for x in samples {
        for y in samples {
            for z in samples {
                for r in grid {
                    for s in grid {
                        let denom = r + &((Rational::one() - r.clone()) * s.clone());
                        if denom.is_zero() {
                            skipped4 += 1;
                            continue;
                        }
                        let inner = match tern(s, y, z) {
                            Ok(v) => v,
                            Err(e) => {
                                note(&mut fail4, format!("inner failed: {e}"));
                                continue;
                            }
                        };
                        let lhs = tern(r, x, &inner);
                        let ratio = r / &denom;
                        let mid = match tern(&ratio, x, y) {
                            Ok(v) => v,
                            Err(e) => {
                                note(&mut fail4, format!("mid failed: {e}"));
                                continue;
                            }
                        };
                        let rhs = tern(&denom, &mid, z);
                        if lhs != rhs {
                            note(&mut fail4, format!("r={r}, s={s}, x={x}, y={y}, z={z}"));
                        }
                    }
                }
            }
        }
    }

    report.record("axiom-1-swap", fail1.is_none(), || json!({ "witness": fail1 }));
    report.record("axiom-2-idempotence", fail2.is_none(), || json!({ "witness": fail2 }));
    report.record("axiom-3-zero-projects", fail3.is_none(), || json!({ "witness": fail3 }));
    report.record("axiom-4-reassociation", fail4.is_none(), || json!({ "witness": fail4 }));
    if skipped4 > 0 {
        report.skip("axiom-4-degenerate-cases", format!("{skipped4} instances with r+(1-r)s = 0"));
    }
    report
}

/// Sampled version of the axiom check for algebras with infinite carriers:
/// each trial draws two scalars from the grid-plus-random pool and fresh
/// elements, then checks all four axioms on that instance.
pub fn check_convex_axioms_sampled(
    algebra: &ConvexAlgebra,
    trials: usize,
    rng: &mut dyn RngCore,
) -> CheckReport {
    let mut report = CheckReport::new(algebra.describe(), "convex-axioms-sampled");
    let grid = standard_grid(rng);
    let mut fails: [Option<String>; 4] = [None, None, None, None];
    let note = |slot: &mut Option<String>, w: String| {
        if slot.as_ref().is_none_or(|cur| w < *cur) {
            *slot = Some(w);
        }
    };
    let mut skipped4 = 0usize;
    for _ in 0..trials {
        let r = sampling::pick(rng, &grid).clone();
        let s = sampling::pick(rng, &grid).clone();
        let x = algebra.sample_element(rng);
        let y = algebra.sample_element(rng);
        let z = algebra.sample_element(rng);

        if algebra.ternary(&r, &x, &y) != algebra.ternary(&(Rational::one() - r.clone()), &y, &x) {
            note(&mut fails[0], format!("r={r}, x={x}, y={y}"));
        }
        if algebra.ternary(&r, &x, &x) != Ok(x.clone()) {
            note(&mut fails[1], format!("r={r}, x={x}"));
        }
        if algebra.ternary(&Rational::zero(), &x, &y) != Ok(y.clone()) {
            note(&mut fails[2], format!("x={x}, y={y}"));
        }
        let denom = &r + &((Rational::one() - r.clone()) * s.clone());
        if denom.is_zero() {
            skipped4 += 1;
            continue;
        }
        let lhs = algebra
            .ternary(&s, &y, &z)
            .and_then(|inner| algebra.ternary(&r, &x, &inner));
        let rhs = algebra
            .ternary(&(&r / &denom), &x, &y)
            .and_then(|mid| algebra.ternary(&denom, &mid, &z));
        if lhs != rhs {
            note(&mut fails[3], format!("r={r}, s={s}, x={x}, y={y}, z={z}"));
        }
    }
    let names = [
        "axiom-1-swap",
        "axiom-2-idempotence",
        "axiom-3-zero-projects",
        "axiom-4-reassociation",
    ];
    for (name, failure) in names.iter().zip(fails) {
        report.record(*name, failure.is_none(), || json!({ "witness": failure }));
    }
    if skipped4 > 0 {
        report.skip("axiom-4-degenerate-cases", format!("{skipped4} instances with r+(1-r)s = 0"));
    }
    report
}

/// Checks the nested-tuple identity
/// `⟨r, ⟨s, x, y⟩, z⟩ = ⟨rs, x, ⟨r(1−s)/(1−rs), y, z⟩⟩` for `rs ≠ 1`.
pub fn check_nested_tuple_identity_sampled(
    algebra: &ConvexAlgebra,
    trials: usize,
    rng: &mut dyn RngCore,
) -> CheckReport {
    let mut report = CheckReport::new(algebra.describe(), "nested-tuple-identity-sampled");
    let grid = standard_grid(rng);
    let mut failure: Option<String> = None;
    let mut skipped = 0usize;
    for _ in 0..trials {
        let r = sampling::pick(rng, &grid).clone();
        let s = sampling::pick(rng, &grid).clone();
        let rs = &r * &s;
        if rs.is_one() {
            skipped += 1;
            continue;
        }
        let x = algebra.sample_element(rng);
        let y = algebra.sample_element(rng);
        let z = algebra.sample_element(rng);
        let lhs = algebra
            .ternary(&s, &x, &y)
            .and_then(|inner| algebra.ternary(&r, &inner, &z));
        let t = &(&r * &(Rational::one() - s.clone())) / &(Rational::one() - rs.clone());
        let rhs = algebra
            .ternary(&t, &y, &z)
            .and_then(|inner| algebra.ternary(&rs, &x, &inner));
        if lhs != rhs {
            let w = format!("r={r}, s={s}, x={x}, y={y}, z={z}");
            if failure.as_ref().is_none_or(|cur| w < *cur) {
                failure = Some(w);
            }
        }
    }
    report.record("nested-tuple-identity", failure.is_none(), || json!({ "witness": failure }));
    if skipped > 0 {
        report.skip("nested-tuple-degenerate", format!("{skipped} instances with rs = 1"));
    }
    report
}

pub fn check_nested_tuple_identity<M: Mixes>(
    algebra: &M,
    grid: &[Rational],
    samples: &[M::Point],
) -> CheckReport {
    let mut report = CheckReport::new(algebra.describe(), "nested-tuple-identity");
    let mut failure: Option<String> = None;
    let mut skipped = 0usize;
    for x in samples {
        for y in samples {
            for z in samples {
                for r in grid {
                    for s in grid {
                        let rs = r * s;
                        if rs.is_one() {
                            skipped += 1;
                            continue;
                        }
                        let lhs = algebra
                            .ternary(s, x, y)
                            .and_then(|inner| algebra.ternary(r, &inner, z));
                        let t = &(r * &(Rational::one() - s.clone()))
                            / &(Rational::one() - rs.clone());
                        let rhs = algebra
                            .ternary(&t, y, z)
                            .and_then(|inner| algebra.ternary(&rs, x, &inner));
                        if lhs != rhs {
                            let w = format!("r={r}, s={s}, x={x}, y={y}, z={z}");
                            if failure.as_ref().is_none_or(|cur| w < *cur) {
                                failure = Some(w);
                            }
                        }
                    }
                }
            }
        }
    }
    report.record("nested-tuple-identity", failure.is_none(), || json!({ "witness": failure }));
    if skipped > 0 {
        report.skip("nested-tuple-degenerate", format!("{skipped} instances with rs = 1"));
    }
    report
}

/// Verifies the affinity equation `f(⟨r, x, x'⟩) = ⟨r, f(x), f(x')⟩` on the
/// grid and sample pairs.
pub fn is_affine<X: Mixes, Y: Mixes>(
    domain: &X,
    codomain: &Y,
    f: &dyn Fn(&X::Point) -> Y::Point,
    grid: &[Rational],
    samples: &[X::Point],
) -> Result<(), ConvexError> {
    for x in samples {
        for x2 in samples {
            for r in grid {
                let lhs = f(&domain.ternary(r, x, x2)?);
                let rhs = codomain.ternary(r, &f(x), &f(x2))?;
                if lhs != rhs {
                    return Err(ConvexError::NotAffine {
                        witness: format!("r={r}, x={x}, x'={x2}"),
                    });
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rat;

    fn rng() -> rand_chacha::ChaCha8Rng {
        sampling::rng_for(sampling::DEFAULT_SEED, "convex-tests")
    }

    pub(crate) fn diamond() -> MeetSemilattice {
        // 1 on top, incomparable a and b, 0 below: a ∧ b = 0.
        let elements = vec!["0".to_string(), "1".to_string(), "a".to_string(), "b".to_string()];
        // indices: 0 -> "0", 1 -> "1", 2 -> "a", 3 -> "b"
        let meet = vec![
            vec![0, 0, 0, 0],
            vec![0, 1, 2, 3],
            vec![0, 2, 2, 0],
            vec![0, 3, 0, 3],
        ];
        MeetSemilattice::new("diamond", elements, meet, Some(1)).unwrap()
    }

    fn simplex_abc() -> ConvexAlgebra {
        ConvexAlgebra::Simplex(
            SimplexAlgebra::new("abc", vec!["a".into(), "b".into(), "c".into()]).unwrap(),
        )
    }

    fn segment() -> PolytopeAlgebra {
        PolytopeAlgebra::new(
            "interval01",
            1,
            vec![vec![Rational::zero()], vec![Rational::one()]],
        )
        .unwrap()
    }

    fn dist(pairs: Vec<(Rational, ConvexElement)>) -> Dist<ConvexElement, Rational> {
        Dist::from_weights(pairs).unwrap()
    }

    #[test]
    fn semilattice_evaluate_is_meet_of_support() {
        let two = ConvexAlgebra::Semilattice(MeetSemilattice::two());
        let phi = dist(vec![
            (rat(1, 2), ConvexElement::lattice("1")),
            (rat(1, 2), ConvexElement::lattice("0")),
        ]);
        assert_eq!(two.evaluate(&phi).unwrap(), ConvexElement::lattice("0"));
    }

    #[test]
    fn simplex_evaluate_flattens() {
        let s = simplex_abc();
        let phi = dist(vec![
            (rat(1, 3), ConvexElement::vertex("a")),
            (rat(2, 3), ConvexElement::vertex("b")),
        ]);
        let out = s.evaluate(&phi).unwrap();
        let expected = ConvexElement::Bary(
            Dist::from_weights([(rat(1, 3), "a".to_string()), (rat(2, 3), "b".to_string())]).unwrap(),
        );
        assert_eq!(out, expected);
    }

    #[test]
    fn polytope_evaluate_is_coordinatewise() {
        let seg = ConvexAlgebra::Polytope(segment());
        let one = ConvexElement::Point { coords: vec![Rational::one()], cert: vec![Rational::zero(), Rational::one()] };
        let zero = ConvexElement::Point { coords: vec![Rational::zero()], cert: vec![Rational::one(), Rational::zero()] };
        let phi = dist(vec![(rat(1, 4), one), (rat(3, 4), zero)]);
        let out = seg.evaluate(&phi).unwrap();
        match out {
            ConvexElement::Point { coords, cert } => {
                assert_eq!(coords, vec![rat(1, 4)]);
                assert_eq!(cert, vec![rat(3, 4), rat(1, 4)]);
            }
            other => panic!("expected a point, got {other}"),
        }
    }

    #[test]
    fn ternary_edge_scalars() {
        let s = simplex_abc();
        let a = ConvexElement::vertex("a");
        let b = ConvexElement::vertex("b");
        assert_eq!(s.ternary(&Rational::zero(), &a, &b).unwrap(), b);
        assert_eq!(s.ternary(&Rational::one(), &a, &b).unwrap(), a);
        assert!(matches!(
            s.ternary(&rat(3, 2), &a, &b),
            Err(ConvexError::ScalarOutOfRange { .. })
        ));
    }

    #[test]
    fn ternary_on_two_is_meet() {
        let two = ConvexAlgebra::Semilattice(MeetSemilattice::two());
        let out = two
            .ternary(&rat(1, 2), &ConvexElement::lattice("1"), &ConvexElement::lattice("0"))
            .unwrap();
        assert_eq!(out, ConvexElement::lattice("0"));
    }

    #[test]
    fn ternary_agrees_with_two_term_evaluation() {
        // On lawful algebras the table-driven ternary and the two-term
        // distribution route coincide, including at x = y.
        let mut rng = rng();
        let grid = standard_grid(&mut rng);
        for alg in [
            ConvexAlgebra::Semilattice(diamond()),
            simplex_abc(),
            ConvexAlgebra::Polytope(segment()),
        ] {
            let samples: Vec<ConvexElement> =
                alg.sample_pool(4, &mut rng).into_iter().take(4).collect();
            for x in &samples {
                for y in &samples {
                    for r in grid.iter().take(9) {
                        let via_ternary = alg.ternary(r, x, y).unwrap();
                        let via_dist = alg
                            .evaluate(&dist(vec![
                                (r.clone(), x.clone()),
                                (Rational::one() - r.clone(), y.clone()),
                            ]))
                            .unwrap();
                        assert_eq!(via_ternary, via_dist, "r={r}, x={x}, y={y}");
                    }
                }
            }
        }
    }

    #[test]
    fn ternary_quarter_on_segment() {
        let seg = segment();
        let alg = ConvexAlgebra::Polytope(seg.clone());
        let one = seg.element_from_coords(vec![Rational::one()]).unwrap();
        let zero = seg.element_from_coords(vec![Rational::zero()]).unwrap();
        let out = alg.ternary(&rat(1, 4), &one, &zero).unwrap();
        match out {
            ConvexElement::Point { coords, .. } => assert_eq!(coords, vec![rat(1, 4)]),
            other => panic!("expected a point, got {other}"),
        }
    }

    #[test]
    fn evaluate_rejects_foreign_elements() {
        let two = ConvexAlgebra::Semilattice(MeetSemilattice::two());
        let phi = dist(vec![(Rational::one(), ConvexElement::lattice("zap"))]);
        assert!(matches!(two.evaluate(&phi), Err(ConvexError::ForeignElement { .. })));
    }

    #[test]
    fn recursive_evaluation_agrees_and_is_permutation_invariant() {
        let s = simplex_abc();
        let phi = dist(vec![
            (rat(1, 2), ConvexElement::vertex("a")),
            (rat(1, 4), ConvexElement::vertex("b")),
            (rat(1, 4), ConvexElement::vertex("c")),
        ]);
        let direct = s.evaluate(&phi).unwrap();
        let terms: Vec<(Rational, ConvexElement)> =
            phi.terms().map(|(e, r)| (r.clone(), e.clone())).collect();
        let rec = s.evaluate_recursive(&terms).unwrap();
        assert_eq!(direct, rec);

        // All six orders of the three terms give the same value.
        let perms: [[usize; 3]; 6] =
            [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        for p in perms {
            let reordered: Vec<(Rational, ConvexElement)> =
                p.iter().map(|&i| terms[i].clone()).collect();
            assert_eq!(s.evaluate_recursive(&reordered).unwrap(), direct);
        }
    }

    #[test]
    fn recursive_evaluation_point_mass() {
        let s = simplex_abc();
        let x = ConvexElement::vertex("b");
        let rec = s.evaluate_recursive(&[(Rational::one(), x.clone())]).unwrap();
        assert_eq!(rec, x);
    }

    #[test]
    fn convex_axioms_hold_on_diamond() {
        let alg = ConvexAlgebra::Semilattice(diamond());
        let mut rng = rng();
        let grid = standard_grid(&mut rng);
        let samples = alg.sample_pool(0, &mut rng);
        check_convex_axioms(&alg, &grid, &samples).expect_all_passed();
    }

    #[test]
    fn convex_axioms_hold_on_simplex() {
        let alg = simplex_abc();
        let mut rng = rng();
        let grid = standard_grid(&mut rng);
        let samples: Vec<ConvexElement> = alg.sample_pool(6, &mut rng).into_iter().take(5).collect();
        check_convex_axioms(&alg, &grid, &samples).expect_all_passed();
    }

    #[test]
    fn corrupted_meet_table_fails_axiom_2() {
        // x ∧ x = 1 for every x: idempotence is gone.
        let elements = vec!["0".to_string(), "1".to_string()];
        let meet = vec![vec![1, 0], vec![0, 1]];
        let bad = MeetSemilattice::from_table_unchecked("bad", elements, meet, None).unwrap();
        let alg = ConvexAlgebra::Semilattice(bad);
        let mut rng = rng();
        let grid = standard_grid(&mut rng);
        let samples = alg.sample_pool(0, &mut rng);
        let report = check_convex_axioms(&alg, &grid, &samples);
        let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        assert!(failed.contains(&"axiom-2-idempotence"), "failed: {failed:?}");
        // The same table is rejected outright by the validating constructor.
        assert!(MeetSemilattice::new(
            "bad",
            vec!["0".to_string(), "1".to_string()],
            vec![vec![1, 0], vec![0, 1]],
            None
        )
        .is_err());
    }

    #[test]
    fn nested_tuple_identity_worked_example() {
        // r = s = 1/2 over the free simplex:
        // ⟨1/2, ⟨1/2, x, y⟩, z⟩ = 1/4 x + 1/4 y + 1/2 z = ⟨1/4, x, ⟨1/3, y, z⟩⟩.
        let s = simplex_abc();
        let x = ConvexElement::vertex("a");
        let y = ConvexElement::vertex("b");
        let z = ConvexElement::vertex("c");
        let half = rat(1, 2);
        let inner = s.ternary(&half, &x, &y).unwrap();
        let lhs = s.ternary(&half, &inner, &z).unwrap();
        let expected = s
            .evaluate(&dist(vec![
                (rat(1, 4), x.clone()),
                (rat(1, 4), y.clone()),
                (rat(1, 2), z.clone()),
            ]))
            .unwrap();
        assert_eq!(lhs, expected);
        let inner2 = s.ternary(&rat(1, 3), &y, &z).unwrap();
        let rhs = s.ternary(&rat(1, 4), &x, &inner2).unwrap();
        assert_eq!(rhs, expected);
    }

    #[test]
    fn nested_tuple_identity_r_one_and_r_zero() {
        let s = simplex_abc();
        let x = ConvexElement::vertex("a");
        let y = ConvexElement::vertex("b");
        let z = ConvexElement::vertex("c");
        // r = 1: both sides reduce to ⟨s, x, y⟩.
        for sc in [rat(1, 3), rat(2, 3)] {
            let lhs = {
                let inner = s.ternary(&sc, &x, &y).unwrap();
                s.ternary(&Rational::one(), &inner, &z).unwrap()
            };
            let t = &(Rational::one() * (Rational::one() - sc.clone()))
                / &(Rational::one() - sc.clone());
            let rhs = {
                let inner = s.ternary(&t, &y, &z).unwrap();
                s.ternary(&sc, &x, &inner).unwrap()
            };
            assert_eq!(lhs, rhs);
            assert_eq!(lhs, s.ternary(&sc, &x, &y).unwrap());
        }
        // r = 0: both sides are z.
        let lhs = {
            let inner = s.ternary(&rat(1, 2), &x, &y).unwrap();
            s.ternary(&Rational::zero(), &inner, &z).unwrap()
        };
        assert_eq!(lhs, z);
    }

    #[test]
    fn nested_tuple_suite_passes_on_all_families() {
        let mut rng = rng();
        let grid: Vec<Rational> = standard_grid(&mut rng).into_iter().take(9).collect();
        for alg in [
            ConvexAlgebra::Semilattice(diamond()),
            simplex_abc(),
            ConvexAlgebra::Polytope(segment()),
        ] {
            let samples: Vec<ConvexElement> =
                alg.sample_pool(4, &mut rng).into_iter().take(4).collect();
            check_nested_tuple_identity(&alg, &grid, &samples).expect_all_passed();
        }
    }

    #[test]
    fn meet_preserving_map_is_affine() {
        let d = ConvexAlgebra::Semilattice(diamond());
        let two = ConvexAlgebra::Semilattice(MeetSemilattice::two());
        // Collapse the diamond onto {0,1}: 1 ↦ 1, everything else ↦ 0.
        let f = |x: &ConvexElement| -> ConvexElement {
            match x {
                ConvexElement::Lattice(e) if e == "1" => ConvexElement::lattice("1"),
                _ => ConvexElement::lattice("0"),
            }
        };
        let mut rng = rng();
        let grid = standard_grid(&mut rng);
        let samples = d.sample_pool(0, &mut rng);
        is_affine(&d, &two, &f, &grid, &samples).unwrap();
    }

    #[test]
    fn coordinate_projection_is_affine() {
        let square = PolytopeAlgebra::new(
            "square",
            2,
            vec![
                vec![Rational::zero(), Rational::zero()],
                vec![Rational::zero(), Rational::one()],
                vec![Rational::one(), Rational::zero()],
                vec![Rational::one(), Rational::one()],
            ],
        )
        .unwrap();
        let sq = ConvexAlgebra::Polytope(square);
        let seg = ConvexAlgebra::Polytope(segment());
        let seg_alg = match &seg {
            ConvexAlgebra::Polytope(p) => p.clone(),
            _ => unreachable!(),
        };
        let f = move |x: &ConvexElement| -> ConvexElement {
            let ConvexElement::Point { coords, .. } = x else { panic!() };
            seg_alg.element_from_coords(vec![coords[0].clone()]).unwrap()
        };
        let mut rng = rng();
        let grid: Vec<Rational> = standard_grid(&mut rng).into_iter().take(9).collect();
        let samples: Vec<ConvexElement> = sq.sample_pool(6, &mut rng).into_iter().take(6).collect();
        is_affine(&sq, &seg, &f, &grid, &samples).unwrap();
    }

    #[test]
    fn swapping_two_is_not_affine() {
        let two = ConvexAlgebra::Semilattice(MeetSemilattice::two());
        let swap = |x: &ConvexElement| -> ConvexElement {
            match x {
                ConvexElement::Lattice(e) if e == "0" => ConvexElement::lattice("1"),
                _ => ConvexElement::lattice("0"),
            }
        };
        let mut rng = rng();
        let grid = standard_grid(&mut rng);
        let samples = two.sample_pool(0, &mut rng);
        let err = is_affine(&two, &two, &swap, &grid, &samples).unwrap_err();
        assert!(matches!(err, ConvexError::NotAffine { .. }));
    }

    #[test]
    fn polytope_membership_certificates() {
        let seg = segment();
        let inside = seg.element_from_coords(vec![rat(1, 3)]).unwrap();
        assert!(ConvexAlgebra::Polytope(seg.clone()).contains(&inside));
        assert!(matches!(
            seg.element_from_coords(vec![rat(4, 3)]),
            Err(ConvexError::NotInHull { .. })
        ));
    }

    #[test]
    fn polytope_rejects_duplicate_generators() {
        let dup = PolytopeAlgebra::new(
            "dup",
            1,
            vec![vec![Rational::zero()], vec![Rational::zero()]],
        );
        assert!(matches!(dup, Err(ConvexError::BadGenerators { .. })));
    }

    #[test]
    fn flattening_equation_holds() {
        // evaluate(outer of evaluations) = evaluate(mult(outer)) on nestings.
        let mut rng = rng();
        for alg in [
            ConvexAlgebra::Semilattice(diamond()),
            simplex_abc(),
            ConvexAlgebra::Polytope(segment()),
        ] {
            let pool = alg.sample_pool(5, &mut rng);
            for _ in 0..40 {
                let inner_count = 1 + sampling::below(&mut rng, 3) as usize;
                let mut inner_dists = Vec::new();
                for _ in 0..inner_count {
                    let size = 1 + sampling::below(&mut rng, 3) as usize;
                    let mut picked = Vec::new();
                    while picked.len() < size {
                        let e = sampling::pick(&mut rng, &pool).clone();
                        if !picked.contains(&e) {
                            picked.push(e);
                        }
                    }
                    let w = sampling::convex_weights(&mut rng, picked.len(), 16);
                    inner_dists.push(dist(w.into_iter().zip(picked).collect()));
                }
                let outer_weights = sampling::convex_weights(&mut rng, inner_dists.len(), 16);

                // Route 1: evaluate each inner, then mix the evaluations.
                let evaluated: Vec<(Rational, ConvexElement)> = outer_weights
                    .iter()
                    .cloned()
                    .zip(inner_dists.iter().map(|d| alg.evaluate(d).unwrap()))
                    .collect();
                let route1 = alg.evaluate(&dist(evaluated)).unwrap();

                // Route 2: flatten the nested distribution, then evaluate.
                let ring = NonNegRationalSemiring;
                let outer: FormalSum<FormalSum<ConvexElement, Rational>, Rational> =
                    FormalSum::normalize(
                        &ring,
                        outer_weights
                            .into_iter()
                            .zip(inner_dists.iter().map(|d| d.as_sum().clone())),
                    );
                let flat = Dist::new(&ring, mult(&ring, &outer)).unwrap();
                let route2 = alg.evaluate(&flat).unwrap();

                assert_eq!(route1, route2);
            }
        }
    }
}
