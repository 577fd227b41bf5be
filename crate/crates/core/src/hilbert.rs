//! Rational inner-product spaces: the orthomodular lattice of linear
//! subspaces of `ℚⁿ`, its effect-algebra table on a closed finite family,
//! the squared-projection state induced by a unit vector, and the exact
//! witness showing that the assignment of states to unit vectors does not
//! preserve convex mixtures.
//!
//! All subspaces are kept in reduced row echelon form, so equality of
//! subspaces is equality of matrices. The standard inner product on `ℚⁿ`
//! is anisotropic, hence every subspace splits off its orthocomplement and
//! the lattice is orthomodular.

use std::fmt;

use rand::RngCore;
use serde_json::json;
use thiserror::Error;

use crate::effect::EffectTable;
use crate::linalg::{self, Vector};
use crate::report::CheckReport;
use crate::sampling;
use crate::scalars::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HilbertError {
    #[error("ambient dimensions differ: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("vector has squared norm {norm}, not 1")]
    NotUnit { norm: String },
    #[error("closure of the subspace family exceeds {cap} members")]
    ClosureTooLarge { cap: usize },
    #[error("squared-projection map fails to be an effect-algebra map at {witness}")]
    HomViolation { witness: String },
    #[error(transparent)]
    Effect(#[from] crate::effect::EffectError),
}

/// A linear subspace of `ℚⁿ` in canonical reduced-row-echelon form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RationalSubspace {
    ambient: usize,
    basis: Vec<Vector>,
}

impl RationalSubspace {
    pub fn from_spanning(ambient: usize, rows: Vec<Vector>) -> Result<Self, HilbertError> {
        for r in &rows {
            if r.len() != ambient {
                return Err(HilbertError::DimensionMismatch { left: ambient, right: r.len() });
            }
        }
        let mut basis = rows;
        linalg::rref(&mut basis);
        Ok(RationalSubspace { ambient, basis })
    }

    pub fn zero(ambient: usize) -> Self {
        RationalSubspace { ambient, basis: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        let basis = (0..ambient)
            .map(|i| {
                let mut row = linalg::zeros(ambient);
                row[i] = Rational::one();
                row
            })
            .collect();
        RationalSubspace { ambient, basis }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient
    }

    fn check_same_ambient(&self, other: &Self) -> Result<(), HilbertError> {
        if self.ambient != other.ambient {
            return Err(HilbertError::DimensionMismatch {
                left: self.ambient,
                right: other.ambient,
            });
        }
        Ok(())
    }

    /// The span of both subspaces.
    pub fn join(&self, other: &Self) -> Result<Self, HilbertError> {
        self.check_same_ambient(other)?;
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Self::from_spanning(self.ambient, rows)
    }

    /// The orthogonal complement with respect to the standard inner
    /// product: the solution space of `B x = 0`.
    pub fn ortho(&self) -> Self {
        let basis = linalg::nullspace(&self.basis, self.ambient);
        RationalSubspace { ambient: self.ambient, basis }
    }

    /// The intersection, computed as the joint solution space of both
    /// complements' constraint systems.
    pub fn meet(&self, other: &Self) -> Result<Self, HilbertError> {
        self.check_same_ambient(other)?;
        let mut constraint_rows = self.ortho().basis;
        constraint_rows.extend(other.ortho().basis);
        let basis = linalg::nullspace(&constraint_rows, self.ambient);
        Ok(RationalSubspace { ambient: self.ambient, basis })
    }

    pub fn leq(&self, other: &Self) -> Result<bool, HilbertError> {
        self.check_same_ambient(other)?;
        let mut rows = other.basis.clone();
        rows.extend(self.basis.iter().cloned());
        Ok(linalg::rank(&rows) == other.dim())
    }

    pub fn contains_vector(&self, v: &[Rational]) -> bool {
        if v.len() != self.ambient {
            return false;
        }
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        linalg::rank(&rows) == self.dim()
    }

    /// `K ⊥ M` in the orthomodular sense: `K ≤ M^⊥`.
    pub fn orthogonal_to(&self, other: &Self) -> Result<bool, HilbertError> {
        self.leq(&other.ortho())
    }

    pub fn render(&self) -> String {
        if self.basis.is_empty() {
            return "span{}".into();
        }
        let rows: Vec<String> = self
            .basis
            .iter()
            .map(|r| {
                let cells: Vec<String> = r.iter().map(|c| c.to_string()).collect();
                format!("({})", cells.join(","))
            })
            .collect();
        format!("span{{{}}}", rows.join(","))
    }
}

impl fmt::Display for RationalSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// A vector of exact squared norm one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitVector {
    coords: Vector,
}

impl UnitVector {
    pub fn new(coords: Vector) -> Result<Self, HilbertError> {
        let norm = linalg::dot(&coords, &coords);
        if !norm.is_one() {
            return Err(HilbertError::NotUnit { norm: norm.to_string() });
        }
        Ok(UnitVector { coords })
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }
}

impl fmt::Display for UnitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", cells.join(","))
    }
}

/// The squared norm of the orthogonal projection of `a` onto `K`, via the
/// normal equations over `K`'s basis. Exact, and in `[0, 1]` for unit `a`.
pub fn projection_norm_sq(a: &[Rational], k: &RationalSubspace) -> Rational {
    if k.is_zero() {
        return Rational::zero();
    }
    let r = k.dim();
    let mut gram: Vec<Vector> = Vec::with_capacity(r);
    for bi in k.basis() {
        gram.push(k.basis().iter().map(|bj| linalg::dot(bi, bj)).collect());
    }
    let rhs: Vector = k.basis().iter().map(|bi| linalg::dot(bi, a)).collect();
    let coeffs = linalg::solve_unique(&gram, &rhs)
        .expect("the Gram matrix of independent rows is invertible over the rationals");
    let mut projection = linalg::zeros(k.ambient());
    for (c, b) in coeffs.iter().zip(k.basis()) {
        projection = linalg::add_vec(&projection, &linalg::scale(b, c));
    }
    linalg::dot(&projection, &projection)
}

const CLOSURE_CAP: usize = 64;

/// A finite subspace family closed under meet, orthocomplement and joins of
/// orthogonal pairs, together with its effect-algebra table.
#[derive(Debug, Clone)]
pub struct SubspaceFamilyAlgebra {
    pub table: EffectTable,
    pub subspaces: Vec<RationalSubspace>,
}

impl SubspaceFamilyAlgebra {
    pub fn subspace_of(&self, index: usize) -> &RationalSubspace {
        &self.subspaces[index]
    }
}

/// Closes a generating family and builds the effect-algebra table: the sum
/// of two subspaces is defined exactly when they are orthogonal, and is
/// then their join.
pub fn ksub_effect_algebra(
    ambient: usize,
    generators: &[RationalSubspace],
) -> Result<SubspaceFamilyAlgebra, HilbertError> {
    for g in generators {
        if g.ambient() != ambient {
            return Err(HilbertError::DimensionMismatch { left: ambient, right: g.ambient() });
        }
    }
    let mut family: Vec<RationalSubspace> = vec![
        RationalSubspace::zero(ambient),
        RationalSubspace::full(ambient),
    ];
    let push = |family: &mut Vec<RationalSubspace>, s: RationalSubspace| -> Result<bool, HilbertError> {
        if family.contains(&s) {
            return Ok(false);
        }
        if family.len() >= CLOSURE_CAP {
            return Err(HilbertError::ClosureTooLarge { cap: CLOSURE_CAP });
        }
        family.push(s);
        Ok(true)
    };
    for g in generators {
        push(&mut family, g.clone())?;
    }
    loop {
        let mut grew = false;
        let snapshot = family.clone();
        for s in &snapshot {
            grew |= push(&mut family, s.ortho())?;
        }
        for s in &snapshot {
            for t in &snapshot {
                grew |= push(&mut family, s.meet(t)?)?;
                if s.orthogonal_to(t)? {
                    grew |= push(&mut family, s.join(t)?)?;
                }
            }
        }
        if !grew {
            break;
        }
    }
    family.sort();

    let names: Vec<String> = family.iter().map(RationalSubspace::render).collect();
    let zero_name = family
        .iter()
        .position(RationalSubspace::is_zero)
        .map(|i| names[i].clone())
        .expect("zero subspace is in the family");
    let one_name = family
        .iter()
        .position(RationalSubspace::is_full)
        .map(|i| names[i].clone())
        .expect("full subspace is in the family");
    let mut sums = Vec::new();
    for (i, s) in family.iter().enumerate() {
        for (j, t) in family.iter().enumerate() {
            if i <= j && s.orthogonal_to(t)? {
                let joined = s.join(t)?;
                let k = family.iter().position(|u| *u == joined).expect("closed under orthogonal joins");
                sums.push((names[i].clone(), names[j].clone(), names[k].clone()));
            }
        }
    }
    let table = EffectTable::new(format!("ksub{ambient}"), names, &zero_name, &one_name, &sums)?;
    Ok(SubspaceFamilyAlgebra { table, subspaces: family })
}

/// The squared-projection state of a unit vector on a closed family:
/// `K ↦ ‖P_K a‖²`. Additivity on defined sums and monotonicity on
/// comparable pairs are verified; a failure would mean broken arithmetic
/// and surfaces as an error.
pub fn epsilon_state(
    a: &UnitVector,
    fam: &SubspaceFamilyAlgebra,
) -> Result<Vec<Rational>, HilbertError> {
    let report = check_epsilon_report(a, fam);
    if let Some(first) = report.failures().next() {
        return Err(HilbertError::HomViolation {
            witness: format!("{}: {:?}", first.name, first.outcome),
        });
    }
    Ok(fam.subspaces.iter().map(|k| projection_norm_sq(a.coords(), k)).collect())
}

/// The report-shaped version of the squared-projection checks.
pub fn check_epsilon_report(a: &UnitVector, fam: &SubspaceFamilyAlgebra) -> CheckReport {
    let mut report = CheckReport::new(
        format!("epsilon({}) on {}", a, fam.table.name()),
        "projection-state",
    );
    let values: Vec<Rational> =
        fam.subspaces.iter().map(|k| projection_norm_sq(a.coords(), k)).collect();

    let zero_idx = fam.table.zero();
    let one_idx = fam.table.one();
    report.record("zero-maps-to-zero", values[zero_idx].is_zero(), || {
        json!({ "value": values[zero_idx].to_string() })
    });
    report.record("one-maps-to-one", values[one_idx].is_one(), || {
        json!({ "value": values[one_idx].to_string() })
    });

    let mut range: Option<String> = None;
    for (i, v) in values.iter().enumerate() {
        if !v.in_unit_interval() {
            range = Some(format!("{} -> {v}", fam.subspaces[i]));
        }
    }
    report.record("values-in-unit-interval", range.is_none(), || json!({ "witness": range }));

    let mut additive: Option<String> = None;
    for (x, y, z) in fam.table.defined_sums() {
        if &values[x] + &values[y] != values[z] {
            let w = format!(
                "{} + {} vs {}",
                fam.subspaces[x], fam.subspaces[y], fam.subspaces[z]
            );
            if additive.as_ref().is_none_or(|cur| w < *cur) {
                additive = Some(w);
            }
        }
    }
    report.record("additive-on-defined-sums", additive.is_none(), || {
        json!({ "witness": additive })
    });

    let mut monotone: Option<String> = None;
    for (i, s) in fam.subspaces.iter().enumerate() {
        for (j, t) in fam.subspaces.iter().enumerate() {
            if s.leq(t).unwrap_or(false) && values[i] > values[j] {
                let w = format!("{s} <= {t} but values decrease");
                if monotone.as_ref().is_none_or(|cur| w < *cur) {
                    monotone = Some(w);
                }
            }
        }
    }
    report.record("monotone-on-comparable-pairs", monotone.is_none(), || {
        json!({ "witness": monotone })
    });

    let mut complement: Option<String> = None;
    for (i, s) in fam.subspaces.iter().enumerate() {
        let perp = s.ortho();
        if let Some(j) = fam.subspaces.iter().position(|u| *u == perp) {
            if &values[i] + &values[j] != Rational::one() {
                let w = format!("{s} and its complement");
                if complement.as_ref().is_none_or(|cur| w < *cur) {
                    complement = Some(w);
                }
            }
        }
    }
    report.record("complement-identity", complement.is_none(), || {
        json!({ "witness": complement })
    });

    report
}

/// The exact record showing the squared-projection assignment ignores
/// convex mixtures: mixing two unit vectors and projecting differs from
/// mixing their projection values. The mixture leaves the unit sphere,
/// which the record makes explicit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvexityWitness {
    pub a: UnitVector,
    pub b: UnitVector,
    pub lambda: Rational,
    pub subspace: RationalSubspace,
    pub mix_point: Vector,
    pub mix_norm_sq: Rational,
    pub projected_mix: Rational,
    pub mixed_projections: Rational,
}

/// Builds and re-verifies the standard witness in the plane.
pub fn convexity_counterexample() -> ConvexityWitness {
    let a = UnitVector::new(vec![Rational::new(3, 5), Rational::new(4, 5)]).expect("3-4-5");
    let b = UnitVector::new(vec![Rational::new(4, 5), Rational::new(3, 5)]).expect("4-3-5");
    let lambda = Rational::new(1, 2);
    let subspace = RationalSubspace::from_spanning(
        2,
        vec![vec![Rational::one(), Rational::zero()]],
    )
    .expect("the first axis");

    let one_minus = Rational::one() - lambda.clone();
    let mix_point = linalg::add_vec(
        &linalg::scale(a.coords(), &lambda),
        &linalg::scale(b.coords(), &one_minus),
    );
    let mix_norm_sq = linalg::dot(&mix_point, &mix_point);

    // Route one: the general normal-equations projection.
    let projected_mix = projection_norm_sq(&mix_point, &subspace);
    // Route two, independent arithmetic: projecting onto the first axis
    // keeps the first coordinate, so the squared norm is its square.
    let direct = &mix_point[0] * &mix_point[0];
    assert_eq!(projected_mix, direct, "the two projection routes must agree");

    let mixed_projections = &(&lambda * &projection_norm_sq(a.coords(), &subspace))
        + &(&one_minus * &projection_norm_sq(b.coords(), &subspace));

    assert_ne!(projected_mix, mixed_projections, "the witness must witness");

    ConvexityWitness {
        a,
        b,
        lambda,
        subspace,
        mix_point,
        mix_norm_sq,
        projected_mix,
        mixed_projections,
    }
}

/// Samples a random subspace of `ℚⁿ` with small entries.
pub fn sample_subspace(ambient: usize, rng: &mut dyn RngCore) -> RationalSubspace {
    let rows = sampling::below(rng, ambient as u64 + 1) as usize;
    let mat: Vec<Vector> = (0..rows)
        .map(|_| {
            (0..ambient)
                .map(|_| {
                    let num = sampling::below(rng, 7) as i64 - 3;
                    Rational::from_int(num)
                })
                .collect()
        })
        .collect();
    RationalSubspace::from_spanning(ambient, mat).expect("dimensions match")
}

/// Checks the ortholattice laws and orthomodularity on sampled subspaces.
pub fn check_lattice_laws(ambient: usize, trials: usize, rng: &mut dyn RngCore) -> CheckReport {
    let mut report = CheckReport::new(format!("subspaces of Q^{ambient}"), "ortholattice-laws");
    let full = RationalSubspace::full(ambient);
    let zero = RationalSubspace::zero(ambient);

    let mut failure: Option<String> = None;
    let note = |w: String, slot: &mut Option<String>| {
        if slot.as_ref().is_none_or(|cur| w < *cur) {
            *slot = Some(w);
        }
    };

    for _ in 0..trials {
        let k = sample_subspace(ambient, rng);
        let m = sample_subspace(ambient, rng);
        let l = sample_subspace(ambient, rng);

        if k.join(&m).unwrap() != m.join(&k).unwrap() {
            note(format!("join commutativity at ({k}, {m})"), &mut failure);
        }
        if k.meet(&m).unwrap() != m.meet(&k).unwrap() {
            note(format!("meet commutativity at ({k}, {m})"), &mut failure);
        }
        if k.join(&m.join(&l).unwrap()).unwrap() != k.join(&m).unwrap().join(&l).unwrap() {
            note(format!("join associativity at ({k}, {m}, {l})"), &mut failure);
        }
        if k.meet(&m.meet(&l).unwrap()).unwrap() != k.meet(&m).unwrap().meet(&l).unwrap() {
            note(format!("meet associativity at ({k}, {m}, {l})"), &mut failure);
        }
        if k.join(&k.meet(&m).unwrap()).unwrap() != k {
            note(format!("absorption at ({k}, {m})"), &mut failure);
        }
        if k.meet(&k.join(&m).unwrap()).unwrap() != k {
            note(format!("absorption' at ({k}, {m})"), &mut failure);
        }
        if k.ortho().ortho() != k {
            note(format!("involution at {k}"), &mut failure);
        }
        if k.leq(&m).unwrap() && !m.ortho().leq(&k.ortho()).unwrap() {
            note(format!("order reversal at ({k}, {m})"), &mut failure);
        }
        if k.join(&k.ortho()).unwrap() != full {
            note(format!("complement join at {k}"), &mut failure);
        }
        if k.meet(&k.ortho()).unwrap() != zero {
            note(format!("complement meet at {k}"), &mut failure);
        }
    }
    report.record("ortholattice-laws", failure.is_none(), || json!({ "witness": failure }));
    report
}

/// Samples a comparable pair `K ≤ M` by spanning `K` inside `M`.
pub fn sample_comparable_pair(
    ambient: usize,
    rng: &mut dyn RngCore,
) -> (RationalSubspace, RationalSubspace) {
    let m = sample_subspace(ambient, rng);
    if m.is_zero() {
        return (RationalSubspace::zero(ambient), m);
    }
    // Random small combinations of M's basis rows span a subspace of M.
    let take = sampling::below(rng, m.dim() as u64 + 1) as usize;
    let rows: Vec<Vector> = (0..take)
        .map(|_| {
            let mut acc = linalg::zeros(ambient);
            for b in m.basis() {
                let c = sampling::below(rng, 5) as i64 - 2;
                acc = linalg::add_vec(&acc, &linalg::scale(b, &Rational::from_int(c)));
            }
            acc
        })
        .collect();
    let k = RationalSubspace::from_spanning(ambient, rows).expect("dimensions match");
    (k, m)
}

/// Orthomodularity on sampled comparable pairs: `K ≤ M` implies
/// `M = K ∨ (K^⊥ ∧ M)`, exactly.
pub fn check_orthomodular_law(ambient: usize, trials: usize, rng: &mut dyn RngCore) -> CheckReport {
    let mut report = CheckReport::new(format!("subspaces of Q^{ambient}"), "orthomodular-law");
    let mut failure: Option<String> = None;
    let mut tested = 0usize;
    while tested < trials {
        let (k, m) = sample_comparable_pair(ambient, rng);
        debug_assert!(k.leq(&m).unwrap());
        tested += 1;
        let rebuilt = k.join(&k.ortho().meet(&m).unwrap()).unwrap();
        if rebuilt != m {
            let w = format!("K={k}, M={m}");
            if failure.as_ref().is_none_or(|cur| w < *cur) {
                failure = Some(w);
            }
        }
    }
    report.record("orthomodularity", failure.is_none(), || json!({ "witness": failure }));
    report
}
