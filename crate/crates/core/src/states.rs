//! State spaces of finite effect algebras as exact rational polytopes, the
//! effect algebra of unit-interval-valued affine functionals on a convex
//! algebra, and the unit/counit checks tying the two sides together.
//!
//! A state assigns a rational in `[0, 1]` to every element, sends 1 to 1,
//! and is additive on every defined sum. The solution set of these
//! constraints is a bounded polytope; its vertices — the extreme states —
//! are enumerated exactly by reducing the equalities first and then
//! scanning tight subsystems of the remaining bounds with exact rank
//! certificates.

use std::collections::BTreeSet;
use std::fmt;

use rand::RngCore;
use serde_json::json;
use thiserror::Error;

use crate::convex::{ConvexAlgebra, ConvexElement, ConvexError, Mixes, PolytopeAlgebra};
use crate::effect::{EAHom, EffectTable};
use crate::formal::Dist;
use crate::linalg::{self, Vector};
use crate::report::CheckReport;
use crate::sampling;
use crate::scalars::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StatesError {
    #[error("not a state: {witness}")]
    NotAState { witness: String },
    #[error("value assignment violates an affine dependency between generators")]
    DependentGeneratorsUnsatisfiable,
    #[error("functional value {value} outside the unit interval")]
    ValueOutOfRange { value: String },
    #[error("{what} needs {size} combinations, above the cap {cap}")]
    TooLarge { what: String, size: usize, cap: usize },
    #[error("the state space is empty")]
    EmptyStateSpace,
    #[error(transparent)]
    Convex(#[from] ConvexError),
}

/// A state of a finite effect algebra: one rational value per element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct State {
    pub values: Vector,
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// One linear constraint of a state system, kept in named form for reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedConstraint {
    pub label: String,
    pub coeffs: Vector,
    pub rhs: Rational,
    pub is_equality: bool,
}

/// The state space of a finite effect algebra: the full constraint system
/// and the complete list of extreme states, each certified by a maximal
/// tight subsystem of full rank.
#[derive(Debug, Clone)]
pub struct StateSpace {
    pub element_names: Vec<String>,
    pub constraints: Vec<NamedConstraint>,
    pub extreme: Vec<State>,
    /// Indices into `constraints` of the tight rows at each extreme state.
    pub certificates: Vec<Vec<usize>>,
}

impl StateSpace {
    pub fn is_empty(&self) -> bool {
        self.extreme.is_empty()
    }
}

/// Checks the defining state conditions exactly.
pub fn is_state(e: &EffectTable, values: &[Rational]) -> Result<(), StatesError> {
    if values.len() != e.len() {
        return Err(StatesError::NotAState { witness: "wrong arity".into() });
    }
    if !values[e.one()].is_one() {
        return Err(StatesError::NotAState { witness: "f(1) != 1".into() });
    }
    if !values[e.zero()].is_zero() {
        return Err(StatesError::NotAState { witness: "f(0) != 0".into() });
    }
    for v in values {
        if !v.in_unit_interval() {
            return Err(StatesError::NotAState { witness: format!("value {v} outside [0,1]") });
        }
    }
    for (x, y, z) in e.defined_sums() {
        if &values[x] + &values[y] != values[z] {
            return Err(StatesError::NotAState {
                witness: format!(
                    "f({}) + f({}) != f({})",
                    e.element_name(x),
                    e.element_name(y),
                    e.element_name(z)
                ),
            });
        }
    }
    Ok(())
}

const VERTEX_COMBINATION_CAP: usize = 2_000_000;

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Builds the constraint system and enumerates every extreme state. An
/// unsatisfiable system yields an empty polytope, not an error.
pub fn state_space(e: &EffectTable) -> Result<StateSpace, StatesError> {
    let n = e.len();
    let mut constraints = Vec::new();
    let unit_row = |i: usize| {
        let mut row = linalg::zeros(n);
        row[i] = Rational::one();
        row
    };

    constraints.push(NamedConstraint {
        label: format!("f({}) = 0", e.element_name(e.zero())),
        coeffs: unit_row(e.zero()),
        rhs: Rational::zero(),
        is_equality: true,
    });
    constraints.push(NamedConstraint {
        label: format!("f({}) = 1", e.element_name(e.one())),
        coeffs: unit_row(e.one()),
        rhs: Rational::one(),
        is_equality: true,
    });
    let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (x, y, z) in e.defined_sums() {
        let key = (x.min(y), x.max(y));
        if !seen.insert(key) {
            continue;
        }
        let mut row = linalg::zeros(n);
        row[x] = &row[x] + &Rational::one();
        row[y] = &row[y] + &Rational::one();
        row[z] = &row[z] - &Rational::one();
        constraints.push(NamedConstraint {
            label: format!(
                "f({}) + f({}) = f({})",
                e.element_name(x),
                e.element_name(y),
                e.element_name(z)
            ),
            coeffs: row,
            rhs: Rational::zero(),
            is_equality: true,
        });
    }
    for i in 0..n {
        constraints.push(NamedConstraint {
            label: format!("f({}) >= 0", e.element_name(i)),
            coeffs: unit_row(i),
            rhs: Rational::zero(),
            is_equality: false,
        });
        let mut row = linalg::zeros(n);
        row[i] = -Rational::one();
        constraints.push(NamedConstraint {
            label: format!("f({}) <= 1", e.element_name(i)),
            coeffs: row,
            rhs: -Rational::one(),
            is_equality: false,
        });
    }

    let eq_rows: Vec<Vector> = constraints
        .iter()
        .filter(|c| c.is_equality)
        .map(|c| c.coeffs.clone())
        .collect();
    let eq_rhs: Vec<Rational> = constraints
        .iter()
        .filter(|c| c.is_equality)
        .map(|c| c.rhs.clone())
        .collect();

    let element_names = e.elements().to_vec();
    let Some((particular, basis)) = linalg::affine_solutions(&eq_rows, &eq_rhs) else {
        return Ok(StateSpace { element_names, constraints, extreme: Vec::new(), certificates: Vec::new() });
    };
    let k = basis.len();

    // Substitute x = particular + B t into the inequality rows.
    struct ReducedRow {
        coeffs: Vector,
        rhs: Rational,
    }
    let ineq: Vec<(usize, ReducedRow)> = constraints
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_equality)
        .map(|(idx, c)| {
            let coeffs: Vector = basis.iter().map(|b| linalg::dot(&c.coeffs, b)).collect();
            let rhs = &c.rhs - &linalg::dot(&c.coeffs, &particular);
            (idx, ReducedRow { coeffs, rhs })
        })
        .collect();

    let satisfies_all = |t: &[Rational]| {
        ineq.iter().all(|(_, row)| linalg::dot(&row.coeffs, t) >= row.rhs)
    };

    let mut points: BTreeSet<Vector> = BTreeSet::new();
    if k == 0 {
        if satisfies_all(&[]) {
            points.insert(particular.clone());
        }
    } else {
        let m = ineq.len();
        let combos = binomial(m, k);
        if combos > VERTEX_COMBINATION_CAP {
            return Err(StatesError::TooLarge {
                what: "vertex enumeration".into(),
                size: combos,
                cap: VERTEX_COMBINATION_CAP,
            });
        }
        let mut choice: Vec<usize> = (0..k).collect();
        loop {
            let rows: Vec<Vector> = choice.iter().map(|&i| ineq[i].1.coeffs.clone()).collect();
            let rhs: Vec<Rational> = choice.iter().map(|&i| ineq[i].1.rhs.clone()).collect();
            if let Some(t) = linalg::solve_unique(&rows, &rhs) {
                if satisfies_all(&t) {
                    let mut x = particular.clone();
                    for (b, ti) in basis.iter().zip(&t) {
                        x = linalg::add_vec(&x, &linalg::scale(b, ti));
                    }
                    points.insert(x);
                }
            }
            // Next k-combination of m indices.
            let mut i = k;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if choice[i] != i + m - k {
                    choice[i] += 1;
                    for j in i + 1..k {
                        choice[j] = choice[j - 1] + 1;
                    }
                    break;
                }
                if i == 0 {
                    choice.clear();
                    break;
                }
            }
            if choice.is_empty() || choice.len() != k {
                break;
            }
            if choice[0] > m - k {
                break;
            }
        }
    }

    // Certify each vertex: the maximal tight subsystem has full rank.
    let mut extreme = Vec::new();
    let mut certificates = Vec::new();
    for values in points {
        let mut tight: Vec<usize> = constraints
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_equality)
            .map(|(i, _)| i)
            .collect();
        for (idx, c) in constraints.iter().enumerate() {
            if !c.is_equality && linalg::dot(&c.coeffs, &values) == c.rhs {
                tight.push(idx);
            }
        }
        let tight_rows: Vec<Vector> =
            tight.iter().map(|&i| constraints[i].coeffs.clone()).collect();
        let rank = linalg::rank(&tight_rows);
        if rank != n {
            // Not actually a vertex; solve_unique in the reduced space
            // should have prevented this.
            continue;
        }
        debug_assert!(is_state(e, &values).is_ok());
        extreme.push(State { values });
        certificates.push(tight);
    }

    Ok(StateSpace { element_names, constraints, extreme, certificates })
}

/// Mixes states convexly; the result is re-verified against the full
/// constraint system.
pub fn convex_mix_states(
    e: &EffectTable,
    weights: &Dist<usize, Rational>,
    states: &[State],
) -> Result<State, StatesError> {
    let mut values = linalg::zeros(e.len());
    for (&i, r) in weights.terms() {
        let s = states.get(i).ok_or_else(|| StatesError::NotAState {
            witness: format!("no state with index {i}"),
        })?;
        values = linalg::add_vec(&values, &linalg::scale(&s.values, r));
    }
    is_state(e, &values)?;
    Ok(State { values })
}

/// Pulls a state back along an effect-algebra homomorphism.
pub fn state_precompose(
    g: &EAHom,
    e: &EffectTable,
    d: &EffectTable,
    state: &State,
) -> Result<State, StatesError> {
    if g.len() != e.len() || state.values.len() != d.len() {
        return Err(StatesError::NotAState { witness: "arity mismatch".into() });
    }
    let values: Vector = g.iter().map(|&j| state.values[j].clone()).collect();
    is_state(e, &values)?;
    Ok(State { values })
}

/// The effect algebra of affine `[0,1]`-valued functionals on a simplex or
/// polytope, represented by their values on the generators. A value vector
/// is admissible when it respects every affine dependency between the
/// generators; for a simplex there are none.
#[derive(Debug, Clone)]
pub struct FunctionalAlgebra {
    base: ConvexAlgebra,
    dependencies: Vec<Vector>,
    generator_count: usize,
}

/// An affine functional, by its generator values.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Functional {
    pub values: Vector,
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl FunctionalAlgebra {
    pub fn base(&self) -> &ConvexAlgebra {
        &self.base
    }

    pub fn generator_count(&self) -> usize {
        self.generator_count
    }

    pub fn dependency_count(&self) -> usize {
        self.dependencies.len()
    }

    /// Validates a value assignment: inside the unit cube and orthogonal to
    /// every generator dependency.
    pub fn functional(&self, values: Vector) -> Result<Functional, StatesError> {
        if values.len() != self.generator_count {
            return Err(StatesError::DependentGeneratorsUnsatisfiable);
        }
        for v in &values {
            if !v.in_unit_interval() {
                return Err(StatesError::ValueOutOfRange { value: v.to_string() });
            }
        }
        for dep in &self.dependencies {
            if !linalg::dot(dep, &values).is_zero() {
                return Err(StatesError::DependentGeneratorsUnsatisfiable);
            }
        }
        Ok(Functional { values })
    }

    pub fn zero(&self) -> Functional {
        Functional { values: linalg::zeros(self.generator_count) }
    }

    pub fn one(&self) -> Functional {
        Functional { values: vec![Rational::one(); self.generator_count] }
    }

    /// Definedness of the partial sum: the pointwise sum stays within the
    /// unit interval on the whole algebra, which an affine functional
    /// attains at the generators.
    pub fn is_defined(&self, f: &Functional, g: &Functional) -> bool {
        f.values
            .iter()
            .zip(&g.values)
            .all(|(a, b)| (a + b).in_unit_interval())
    }

    pub fn ovee(&self, f: &Functional, g: &Functional) -> Option<Functional> {
        if self.is_defined(f, g) {
            Some(Functional { values: linalg::add_vec(&f.values, &g.values) })
        } else {
            None
        }
    }

    /// The orthosupplement `f⊥ = 1 − f`, pointwise on generators.
    pub fn ortho(&self, f: &Functional) -> Functional {
        Functional {
            values: f.values.iter().map(|v| Rational::one() - v.clone()).collect(),
        }
    }

    /// Evaluates the functional at an element of the base algebra through
    /// its barycentric data.
    pub fn apply(&self, f: &Functional, x: &ConvexElement) -> Result<Rational, StatesError> {
        match (&self.base, x) {
            (ConvexAlgebra::Simplex(s), ConvexElement::Bary(d)) => {
                let mut acc = Rational::zero();
                for (v, r) in d.terms() {
                    let i = s.vertices().iter().position(|w| w == v).ok_or_else(|| {
                        StatesError::NotAState { witness: format!("foreign vertex {v}") }
                    })?;
                    acc = acc + &f.values[i] * r;
                }
                Ok(acc)
            }
            (ConvexAlgebra::Polytope(_), ConvexElement::Point { cert, .. }) => {
                if cert.len() != self.generator_count {
                    return Err(StatesError::NotAState { witness: "certificate arity".into() });
                }
                Ok(linalg::dot(cert, &f.values))
            }
            _ => Err(StatesError::NotAState { witness: "unsupported element".into() }),
        }
    }

    pub fn sample(&self, rng: &mut dyn RngCore) -> Functional {
        match &self.base {
            ConvexAlgebra::Simplex(_) => {
                let values: Vector = (0..self.generator_count)
                    .map(|_| sampling::unit_rational(rng, 16))
                    .collect();
                Functional { values }
            }
            _ => {
                // Sample an affine map on the ambient space and squeeze its
                // generator values into the unit interval; affine images of
                // affine maps remain admissible.
                let dim = match &self.base {
                    ConvexAlgebra::Polytope(p) => p.dim(),
                    _ => 0,
                };
                let gens = match &self.base {
                    ConvexAlgebra::Polytope(p) => p.generators().to_vec(),
                    _ => Vec::new(),
                };
                let coeffs: Vector = (0..dim)
                    .map(|_| {
                        &sampling::nonneg_rational(rng, 4, 6) - &sampling::nonneg_rational(rng, 4, 6)
                    })
                    .collect();
                let offset = sampling::nonneg_rational(rng, 3, 6);
                let raw: Vector = gens.iter().map(|g| &linalg::dot(&coeffs, g) + &offset).collect();
                let lo = raw.iter().min().cloned().unwrap_or_else(Rational::zero);
                let hi = raw.iter().max().cloned().unwrap_or_else(Rational::one);
                let values = if lo == hi {
                    vec![sampling::unit_rational(rng, 16); self.generator_count]
                } else {
                    let span = &hi - &lo;
                    raw.iter().map(|v| &(v - &lo) / &span).collect()
                };
                Functional { values }
            }
        }
    }
}

/// Builds the functional effect algebra on a simplex or polytope.
pub fn affine_functionals(base: &ConvexAlgebra) -> Result<FunctionalAlgebra, StatesError> {
    match base {
        ConvexAlgebra::Simplex(s) => Ok(FunctionalAlgebra {
            base: base.clone(),
            dependencies: Vec::new(),
            generator_count: s.vertices().len(),
        }),
        ConvexAlgebra::Polytope(p) => {
            // Dependencies: vanishing affine combinations of the generators.
            let g = p.generators().len();
            let mut rows: Vec<Vector> = Vec::with_capacity(p.dim() + 1);
            for d in 0..p.dim() {
                rows.push(p.generators().iter().map(|gen| gen[d].clone()).collect());
            }
            rows.push(vec![Rational::one(); g]);
            let dependencies = linalg::nullspace(&rows, g);
            Ok(FunctionalAlgebra { base: base.clone(), dependencies, generator_count: g })
        }
        ConvexAlgebra::Semilattice(_) => Err(StatesError::NotAState {
            witness: "functional algebras are built on simplices and polytopes".into(),
        }),
    }
}

/// Samples the partial-commutative-monoid laws of a functional algebra;
/// the carrier is infinite, so exhaustiveness is not on the table.
pub fn check_functional_algebra(fa: &FunctionalAlgebra, trials: usize, rng: &mut dyn RngCore) -> CheckReport {
    let mut report = CheckReport::new(
        format!("functionals on {}", fa.base.describe()),
        "functional-effect-algebra",
    );
    let mut samples: Vec<Functional> = vec![fa.zero(), fa.one()];
    for _ in 0..trials {
        samples.push(fa.sample(rng));
    }
    let mut failure: Option<String> = None;
    let note = |w: String, slot: &mut Option<String>| {
        if slot.as_ref().is_none_or(|cur| w < *cur) {
            *slot = Some(w);
        }
    };

    for f in &samples {
        // Zero law and orthosupplement identity.
        if fa.ovee(&fa.zero(), f) != Some(f.clone()) {
            note(format!("0 + {f}"), &mut failure);
        }
        let perp = fa.ortho(f);
        if fa.ovee(f, &perp) != Some(fa.one()) {
            note(format!("{f} + ortho"), &mut failure);
        }
        // Positivity: f ⊥ 1 forces f = 0.
        if fa.is_defined(f, &fa.one()) && *f != fa.zero() {
            note(format!("positivity at {f}"), &mut failure);
        }
        for g in &samples {
            if fa.is_defined(f, g) != fa.is_defined(g, f) {
                note(format!("commutativity of definedness at ({f}, {g})"), &mut failure);
            }
            if let (Some(a), Some(b)) = (fa.ovee(f, g), fa.ovee(g, f)) {
                if a != b {
                    note(format!("commutativity at ({f}, {g})"), &mut failure);
                }
            }
            // Uniqueness of the orthosupplement.
            if fa.ovee(f, g) == Some(fa.one()) && *g != fa.ortho(f) {
                note(format!("second orthosupplement at {f}"), &mut failure);
            }
            for h in &samples {
                if let Some(gh) = fa.ovee(g, h) {
                    if let Some(total) = fa.ovee(f, &gh) {
                        let assoc_ok = fa
                            .ovee(f, g)
                            .and_then(|fg| fa.ovee(&fg, h))
                            .is_some_and(|v| v == total);
                        if !assoc_ok {
                            note(format!("associativity at ({f}, {g}, {h})"), &mut failure);
                        }
                    }
                }
            }
        }
    }
    report.record("pcm-laws-on-samples", failure.is_none(), || json!({ "witness": failure }));
    report
}

/// The state polytope as a convex algebra: generators are the extreme
/// states.
pub fn state_polytope(space: &StateSpace) -> Result<PolytopeAlgebra, StatesError> {
    if space.extreme.is_empty() {
        return Err(StatesError::EmptyStateSpace);
    }
    let dim = space.element_names.len();
    let generators: Vec<Vector> = space.extreme.iter().map(|s| s.values.clone()).collect();
    PolytopeAlgebra::new("states", dim, generators).map_err(StatesError::from)
}

/// The unit of the duality at an element `x`: the evaluation functional
/// `f ↦ f(x)` on the state polytope, tabulated by its values at the extreme
/// states.
pub fn unit_eta(
    fa: &FunctionalAlgebra,
    space: &StateSpace,
    x: usize,
) -> Result<Functional, StatesError> {
    let values: Vector = space.extreme.iter().map(|s| s.values[x].clone()).collect();
    fa.functional(values)
}

/// Verifies that the unit is an effect-algebra map: `η(1) = 1`, `η(0) = 0`,
/// and additivity over every defined sum of `E`.
pub fn check_unit_hom(e: &EffectTable, space: &StateSpace) -> Result<CheckReport, StatesError> {
    let mut report = CheckReport::new(format!("eta on effect:{}", e.name()), "duality-unit");
    let poly = state_polytope(space)?;
    let fa = affine_functionals(&ConvexAlgebra::Polytope(poly))?;

    let eta = |x: usize| unit_eta(&fa, space, x);

    report.record("eta-of-one-is-constant-one", eta(e.one())? == fa.one(), || json!({}));
    report.record("eta-of-zero-is-constant-zero", eta(e.zero())? == fa.zero(), || json!({}));

    let mut failure: Option<String> = None;
    for (x, y, z) in e.defined_sums() {
        let fx = eta(x)?;
        let fy = eta(y)?;
        let fz = eta(z)?;
        match fa.ovee(&fx, &fy) {
            Some(sum) if sum == fz => {}
            _ => {
                let w = format!(
                    "eta({}) + eta({}) != eta({})",
                    e.element_name(x),
                    e.element_name(y),
                    e.element_name(z)
                );
                if failure.as_ref().is_none_or(|cur| w < *cur) {
                    failure = Some(w);
                }
            }
        }
    }
    report.record("eta-is-additive", failure.is_none(), || json!({ "witness": failure }));
    Ok(report)
}

/// Verifies the counit at sampled probes: evaluation at an element is a
/// state of the functional algebra (unital, additive on defined sums), and
/// the assignment `x ↦ ε(x)` is affine.
pub fn check_counit(
    base: &ConvexAlgebra,
    trials: usize,
    rng: &mut dyn RngCore,
) -> Result<CheckReport, StatesError> {
    let mut report = CheckReport::new(format!("epsilon on {}", base.describe()), "duality-counit");
    let fa = affine_functionals(base)?;

    let points: Vec<ConvexElement> = base.sample_pool(6, rng);
    let functionals: Vec<Functional> = {
        let mut v = vec![fa.zero(), fa.one()];
        for _ in 0..trials {
            v.push(fa.sample(rng));
        }
        v
    };

    let mut unital: Option<String> = None;
    let mut additive: Option<String> = None;
    for x in &points {
        if fa.apply(&fa.one(), x)? != Rational::one() {
            unital = Some(format!("epsilon({x})(1) != 1"));
        }
        for f in &functionals {
            let v = fa.apply(f, x)?;
            if !v.in_unit_interval() {
                unital = Some(format!("epsilon({x})({f}) outside [0,1]"));
            }
            for g in &functionals {
                if let Some(sum) = fa.ovee(f, g) {
                    let lhs = fa.apply(&sum, x)?;
                    let rhs = &fa.apply(f, x)? + &fa.apply(g, x)?;
                    if lhs != rhs {
                        let w = format!("epsilon({x}) not additive at ({f}, {g})");
                        if additive.as_ref().is_none_or(|cur| w < *cur) {
                            additive = Some(w);
                        }
                    }
                }
            }
        }
    }
    report.record("evaluations-are-states", unital.is_none(), || json!({ "witness": unital }));
    report.record("evaluations-are-additive", additive.is_none(), || json!({ "witness": additive }));

    // Affinity of ε: evaluating a mixture equals mixing the evaluations.
    let mut affine: Option<String> = None;
    for _ in 0..trials {
        let size = 1 + sampling::below(rng, 3) as usize;
        let mut picked: Vec<ConvexElement> = Vec::new();
        while picked.len() < size {
            let p = sampling::pick(rng, &points).clone();
            if !picked.contains(&p) {
                picked.push(p);
            }
        }
        let weights = sampling::convex_weights(rng, picked.len(), 16);
        let dist = Dist::from_weights(weights.iter().cloned().zip(picked.iter().cloned()))
            .expect("weights sum to one");
        let mixed = base.evaluate(&dist)?;
        for f in &functionals {
            let lhs = fa.apply(f, &mixed)?;
            let mut rhs = Rational::zero();
            for (w, p) in weights.iter().zip(&picked) {
                rhs = rhs + w * &fa.apply(f, p)?;
            }
            if lhs != rhs {
                let w = format!("epsilon not affine at {mixed} with {f}");
                if affine.as_ref().is_none_or(|cur| w < *cur) {
                    affine = Some(w);
                }
            }
        }
    }
    report.record("epsilon-is-affine", affine.is_none(), || json!({ "witness": affine }));
    Ok(report)
}

/// For a free simplex the functional algebra is the power of the unit
/// interval: definedness, sum, orthosupplement and the constants all act
/// componentwise on vertex-value vectors. Checked on a grid plus samples.
pub fn composed_adjunction_check(
    labels: &[String],
    trials: usize,
    rng: &mut dyn RngCore,
) -> Result<CheckReport, StatesError> {
    let simplex = ConvexAlgebra::Simplex(
        crate::convex::SimplexAlgebra::new("power-check", labels.to_vec())
            .map_err(StatesError::from)?,
    );
    let fa = affine_functionals(&simplex)?;
    let n = labels.len();
    let mut report = CheckReport::new(
        format!("functionals on a {n}-vertex simplex vs [0,1]^{n}"),
        "composed-adjunction",
    );

    report.record("no-dependencies-on-free-generators", fa.dependency_count() == 0, || json!({}));

    // The power algebra on value vectors.
    let power_defined = |f: &Vector, g: &Vector| {
        f.iter().zip(g).all(|(a, b)| (a + b).in_unit_interval())
    };
    let power_sum = |f: &Vector, g: &Vector| linalg::add_vec(f, g);
    let power_ortho =
        |f: &Vector| f.iter().map(|v| Rational::one() - v.clone()).collect::<Vector>();

    let mut samples: Vec<Functional> = vec![fa.zero(), fa.one()];
    for _ in 0..trials {
        samples.push(fa.sample(rng));
    }

    let mut failure: Option<String> = None;
    let note = |w: String, slot: &mut Option<String>| {
        if slot.as_ref().is_none_or(|cur| w < *cur) {
            *slot = Some(w);
        }
    };
    for f in &samples {
        if fa.ortho(f).values != power_ortho(&f.values) {
            note(format!("ortho at {f}"), &mut failure);
        }
        for g in &samples {
            let lhs_defined = fa.is_defined(f, g);
            let rhs_defined = power_defined(&f.values, &g.values);
            if lhs_defined != rhs_defined {
                note(format!("definedness at ({f}, {g})"), &mut failure);
            }
            if lhs_defined {
                let lhs = fa.ovee(f, g).expect("defined").values;
                if lhs != power_sum(&f.values, &g.values) {
                    note(format!("sum at ({f}, {g})"), &mut failure);
                }
            }
        }
    }
    report.record("componentwise-agreement", failure.is_none(), || json!({ "witness": failure }));
    report.record(
        "constants-are-constant-vectors",
        fa.zero().values == linalg::zeros(n) && fa.one().values == vec![Rational::one(); n],
        || json!({}),
    );
    Ok(report)
}

/// Replays the forcing argument for the rational unit interval: for every
/// denominator `q ≤ max_q` the `q`-fold sum of `1/q` is defined all the way
/// to 1, so additivity pins `f(1/q)` to `1/q` and then `f(p/q)` to `p/q`.
pub fn rational_interval_unique_state(max_q: u64) -> CheckReport {
    let mut report = CheckReport::new("rational unit interval", "unique-state");
    let mut failure: Option<String> = None;
    for q in 1..=max_q {
        let step = Rational::new(1, q as i64);
        // The chain 1/q, 2/q, …, q/q stays inside [0,1], so each partial sum
        // is defined in the interval effect algebra.
        let mut partial = Rational::zero();
        let mut chain_defined = true;
        for _ in 0..q {
            let next = &partial + &step;
            if !next.in_unit_interval() {
                chain_defined = false;
                break;
            }
            partial = next;
        }
        if !chain_defined || !partial.is_one() {
            failure = Some(format!("chain for q={q} broke"));
            continue;
        }
        // Additivity forces f(m/q) = m·f(1/q); with f(1) = 1 this pins
        // f(1/q) = 1/q. Verify the resulting values are exactly p/q.
        let forced = Rational::new(1, q as i64);
        for p in 0..=q {
            let value = Rational::from_int(p as i64) * forced.clone();
            if value != Rational::new(p as i64, q as i64) {
                failure = Some(format!("f({p}/{q}) forced to {value}"));
            }
        }
    }
    report.record("values-forced-to-inclusion", failure.is_none(), || json!({ "witness": failure }));
    report
}
