//! Subalgebras, filters and prime filters of convex algebras; extreme
//! points; and the order isomorphism between prime filters and two-valued
//! affine maps.
//!
//! For finite-carrier semilattices the defining conditions are checked
//! directly by enumerating small distributions. For simplices every vertex
//! subset is a prime filter. For polytopes a subset of generators is prime
//! exactly when a supporting affine functional vanishes on it and is
//! strictly positive elsewhere; when no functional exists the checker
//! produces the violating convex combination instead of just saying no.

use std::collections::BTreeSet;
use std::fmt;

use serde_json::json;
use thiserror::Error;

use crate::convex::{
    is_affine, ConvexAlgebra, ConvexElement, ConvexError, MeetSemilattice, Mixes,
};
use crate::formal::Dist;
use crate::linalg::{self, LinCon, Vector};
use crate::report::CheckReport;
use crate::scalars::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FacesError {
    #[error("{what} has {size} items, above the enumeration cap {cap}")]
    TooLarge { what: String, size: usize, cap: usize },
    #[error("operation requires a finite-carrier semilattice, got {kind}")]
    NotSemilattice { kind: String },
    #[error(transparent)]
    Convex(#[from] ConvexError),
}

/// How a candidate prime filter is represented: an explicit element subset
/// for finite carriers, or a generator-index subset (a face) for simplices
/// and polytopes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum FilterRep {
    Elements(BTreeSet<String>),
    Face(BTreeSet<usize>),
}

/// A verified prime filter. Polytope faces carry the supporting functional
/// `h(p) = coeffs·p + offset` with `h = 0` on the face and `h ≥ 1` on the
/// remaining generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeFilter {
    pub rep: FilterRep,
    pub support_functional: Option<(Vector, Rational)>,
}

impl PrimeFilter {
    /// Bitmask over the carrier/generator order; drives the output order of
    /// enumerations.
    pub fn bitmask(&self, alg: &ConvexAlgebra) -> u64 {
        match (&self.rep, alg) {
            (FilterRep::Elements(set), ConvexAlgebra::Semilattice(l)) => {
                let mut mask = 0u64;
                for (i, e) in l.elements().iter().enumerate() {
                    if set.contains(e) {
                        mask |= 1 << i;
                    }
                }
                mask
            }
            (FilterRep::Face(set), _) => set.iter().fold(0u64, |m, &i| m | (1 << i)),
            _ => 0,
        }
    }

    pub fn describe(&self, alg: &ConvexAlgebra) -> String {
        match (&self.rep, alg) {
            (FilterRep::Elements(set), _) => {
                let items: Vec<&str> = set.iter().map(String::as_str).collect();
                format!("{{{}}}", items.join(","))
            }
            (FilterRep::Face(set), ConvexAlgebra::Simplex(s)) => {
                let items: Vec<&str> = set.iter().map(|&i| s.vertices()[i].as_str()).collect();
                format!("{{{}}}", items.join(","))
            }
            (FilterRep::Face(set), ConvexAlgebra::Polytope(p)) => {
                let items: Vec<String> = set
                    .iter()
                    .map(|&i| {
                        let coords: Vec<String> =
                            p.generators()[i].iter().map(|c| c.to_string()).collect();
                        format!("({})", coords.join(","))
                    })
                    .collect();
                format!("{{{}}}", items.join(","))
            }
            (FilterRep::Face(set), _) => format!("{set:?}"),
        }
    }

    /// Membership of an element in the filter.
    pub fn contains(&self, alg: &ConvexAlgebra, e: &ConvexElement) -> bool {
        match (&self.rep, alg, e) {
            (FilterRep::Elements(set), ConvexAlgebra::Semilattice(_), ConvexElement::Lattice(x)) => {
                set.contains(x)
            }
            (FilterRep::Face(set), ConvexAlgebra::Simplex(s), ConvexElement::Bary(d)) => d
                .support()
                .all(|v| s.vertices().iter().position(|w| w == v).is_some_and(|i| set.contains(&i))),
            (FilterRep::Face(_), ConvexAlgebra::Polytope(_), ConvexElement::Point { coords, .. }) => {
                match &self.support_functional {
                    Some((c, d0)) => (linalg::dot(c, coords) + d0.clone()).is_zero(),
                    // No stored functional: fall back to the certificate
                    // reading (all certificate mass on the face).
                    None => match (&self.rep, e) {
                        (FilterRep::Face(set), ConvexElement::Point { cert, .. }) => cert
                            .iter()
                            .enumerate()
                            .all(|(i, w)| w.is_zero() || set.contains(&i)),
                        _ => false,
                    },
                }
            }
            _ => false,
        }
    }
}

/// The verdict of a prime-filter check, with a replayable witness on
/// failure.
#[derive(Debug, Clone)]
pub struct FilterVerdict {
    pub is_prime: bool,
    pub filter: Option<PrimeFilter>,
    pub witness: Option<serde_json::Value>,
}

/// The least subalgebra of a finite semilattice containing `seed`: closure
/// under binary meets suffices.
pub fn subalgebra_closure(
    alg: &ConvexAlgebra,
    seed: &BTreeSet<String>,
) -> Result<BTreeSet<String>, FacesError> {
    let ConvexAlgebra::Semilattice(l) = alg else {
        return Err(FacesError::NotSemilattice { kind: alg.kind().to_string() });
    };
    let mut closed: BTreeSet<usize> = seed
        .iter()
        .filter_map(|e| l.index_of(e))
        .collect();
    loop {
        let mut added = false;
        let current: Vec<usize> = closed.iter().copied().collect();
        for &a in &current {
            for &b in &current {
                if closed.insert(l.meet_idx(a, b)) {
                    added = true;
                }
            }
        }
        if !added {
            break;
        }
    }
    Ok(closed.into_iter().map(|i| l.elements()[i].clone()).collect())
}

/// All small distributions over the carrier of a finite semilattice:
/// support of size at most three, weights from the scalar grid.
fn small_distributions(
    l: &MeetSemilattice,
    grid: &[Rational],
) -> Vec<Dist<ConvexElement, Rational>> {
    let elems: Vec<ConvexElement> =
        l.elements().iter().map(|e| ConvexElement::lattice(e.clone())).collect();
    let inner: Vec<&Rational> = grid
        .iter()
        .filter(|r| !r.is_zero() && !r.is_one() && r.in_unit_interval())
        .collect();
    let mut out = Vec::new();
    for (i, x) in elems.iter().enumerate() {
        out.push(Dist::from_weights([(Rational::one(), x.clone())]).unwrap());
        for y in elems.iter().skip(i + 1) {
            for r in &inner {
                out.push(
                    Dist::from_weights([
                        ((*r).clone(), x.clone()),
                        (Rational::one() - (*r).clone(), y.clone()),
                    ])
                    .unwrap(),
                );
            }
        }
    }
    for (i, x) in elems.iter().enumerate() {
        for (j, y) in elems.iter().enumerate().skip(i + 1) {
            for z in elems.iter().skip(j + 1) {
                for r in &inner {
                    for s in &inner {
                        let rest = Rational::one() - (*r).clone() - (*s).clone();
                        if rest.is_zero() || rest.is_negative() {
                            continue;
                        }
                        out.push(
                            Dist::from_weights([
                                ((*r).clone(), x.clone()),
                                ((*s).clone(), y.clone()),
                                (rest, z.clone()),
                            ])
                            .unwrap(),
                        );
                    }
                }
            }
        }
    }
    out
}

/// Searches for an affine functional vanishing exactly on the chosen
/// generators and at least one elsewhere. Its existence certifies that the
/// subset is a face, hence a prime filter.
fn face_certificate(p: &crate::convex::PolytopeAlgebra, subset: &BTreeSet<usize>) -> Option<(Vector, Rational)> {
    let d = p.dim();
    // Variables: the functional coefficients followed by the offset.
    let nvars = d + 1;
    let mut cons = Vec::new();
    for (i, g) in p.generators().iter().enumerate() {
        let mut row: Vector = g.clone();
        row.push(Rational::one());
        if subset.contains(&i) {
            cons.push(LinCon::eq(row, Rational::zero()));
        } else {
            cons.push(LinCon::ge(row, Rational::one()));
        }
    }
    let sol = linalg::feasible_point(&cons, nvars)?;
    let (coeffs, offset) = sol.split_at(d);
    Some((coeffs.to_vec(), offset[0].clone()))
}

/// Searches for a convex combination witnessing that the subset is *not* a
/// face: a point of the subset's hull that also has a representation with
/// positive mass outside the subset.
fn escape_witness(p: &crate::convex::PolytopeAlgebra, subset: &BTreeSet<usize>) -> Option<serde_json::Value> {
    let g = p.generators().len();
    let d = p.dim();
    if subset.is_empty() {
        return None;
    }
    // Variables: weights over the subset (as full-length vector masked to
    // the subset) followed by weights over everything.
    let nvars = 2 * g;
    let mut cons = Vec::new();
    let mut mass_inside = linalg::zeros(nvars);
    let mut mass_all = linalg::zeros(nvars);
    for i in 0..g {
        if subset.contains(&i) {
            mass_inside[i] = Rational::one();
        } else {
            // Weights outside the subset are forbidden on the first block.
            let mut row = linalg::zeros(nvars);
            row[i] = Rational::one();
            cons.push(LinCon::eq(row, Rational::zero()));
        }
        mass_all[g + i] = Rational::one();
    }
    cons.push(LinCon::eq(mass_inside, Rational::one()));
    cons.push(LinCon::eq(mass_all, Rational::one()));
    for dim in 0..d {
        let mut row = linalg::zeros(nvars);
        for (i, gen) in p.generators().iter().enumerate() {
            row[i] = gen[dim].clone();
            row[g + i] = -&gen[dim];
        }
        cons.push(LinCon::eq(row, Rational::zero()));
    }
    for i in 0..nvars {
        let mut row = linalg::zeros(nvars);
        row[i] = Rational::one();
        cons.push(LinCon::ge(row, Rational::zero()));
    }
    // Positive mass outside the subset on the second representation.
    let mut outside = linalg::zeros(nvars);
    for i in 0..g {
        if !subset.contains(&i) {
            outside[g + i] = Rational::one();
        }
    }
    cons.push(LinCon::gt(outside, Rational::zero()));

    let sol = linalg::feasible_point(&cons, nvars)?;
    let (inside_w, escape_w) = sol.split_at(g);
    let point = p.element_from_weights(inside_w.to_vec()).ok()?;
    Some(json!({
        "point": point.to_string(),
        "inside_weights": inside_w.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
        "escaping_weights": escape_w.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
    }))
}

/// Decides whether a subset is a prime filter, with a replayable witness
/// when it is not.
pub fn is_prime_filter(alg: &ConvexAlgebra, rep: &FilterRep, grid: &[Rational]) -> FilterVerdict {
    match (alg, rep) {
        (ConvexAlgebra::Semilattice(l), FilterRep::Elements(_)) => {
            let filter = PrimeFilter { rep: rep.clone(), support_functional: None };
            for dist in small_distributions(l, grid) {
                let value = alg.evaluate(&dist).expect("carrier elements");
                let all_in = dist.support().all(|e| filter.contains(alg, e));
                let value_in = filter.contains(alg, &value);
                if all_in && !value_in {
                    return FilterVerdict {
                        is_prime: false,
                        filter: None,
                        witness: Some(json!({
                            "condition": "subalgebra",
                            "distribution": dist.to_string(),
                            "value": value.to_string(),
                        })),
                    };
                }
                if value_in && !all_in {
                    return FilterVerdict {
                        is_prime: false,
                        filter: None,
                        witness: Some(json!({
                            "condition": "filter",
                            "distribution": dist.to_string(),
                            "value": value.to_string(),
                        })),
                    };
                }
            }
            FilterVerdict { is_prime: true, filter: Some(filter), witness: None }
        }
        (ConvexAlgebra::Simplex(_), FilterRep::Face(_)) => {
            // Every vertex subset of a free algebra is a face: supports only
            // ever grow by merging, never shrink, because all weights are
            // positive.
            FilterVerdict {
                is_prime: true,
                filter: Some(PrimeFilter { rep: rep.clone(), support_functional: None }),
                witness: None,
            }
        }
        (ConvexAlgebra::Polytope(p), FilterRep::Face(set)) => match face_certificate(p, set) {
            Some(cert) => FilterVerdict {
                is_prime: true,
                filter: Some(PrimeFilter { rep: rep.clone(), support_functional: Some(cert) }),
                witness: None,
            },
            None => FilterVerdict {
                is_prime: false,
                filter: None,
                witness: escape_witness(p, set),
            },
        },
        _ => FilterVerdict {
            is_prime: false,
            filter: None,
            witness: Some(json!({"condition": "representation mismatch"})),
        },
    }
}

const SUBSET_CAP: usize = 16;
const GENERATOR_CAP: usize = 8;

fn generator_count(alg: &ConvexAlgebra) -> (usize, usize, &'static str) {
    match alg {
        ConvexAlgebra::Semilattice(l) => (l.elements().len(), SUBSET_CAP, "carrier"),
        ConvexAlgebra::Simplex(s) => (s.vertices().len(), GENERATOR_CAP, "vertex set"),
        ConvexAlgebra::Polytope(p) => (p.generators().len(), GENERATOR_CAP, "generator list"),
    }
}

/// Enumerates all prime filters, sorted by subset bitmask.
pub fn enumerate_prime_filters(
    alg: &ConvexAlgebra,
    grid: &[Rational],
) -> Result<Vec<PrimeFilter>, FacesError> {
    let (n, cap, what) = generator_count(alg);
    if n > cap {
        return Err(FacesError::TooLarge { what: what.to_string(), size: n, cap });
    }
    let mut found = Vec::new();
    for mask in 0u64..(1u64 << n) {
        let rep = match alg {
            ConvexAlgebra::Semilattice(l) => {
                let set: BTreeSet<String> = l
                    .elements()
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, e)| e.clone())
                    .collect();
                FilterRep::Elements(set)
            }
            _ => {
                let set: BTreeSet<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
                FilterRep::Face(set)
            }
        };
        let verdict = is_prime_filter(alg, &rep, grid);
        if verdict.is_prime {
            found.push(verdict.filter.expect("prime verdicts carry the filter"));
        }
    }
    found.sort_by_key(|f| f.bitmask(alg));
    Ok(found)
}

/// The extreme points: elements whose singleton is a prime filter.
pub fn extreme_points(
    alg: &ConvexAlgebra,
    grid: &[Rational],
) -> Result<Vec<ConvexElement>, FacesError> {
    let (n, cap, what) = generator_count(alg);
    if n > cap {
        return Err(FacesError::TooLarge { what: what.to_string(), size: n, cap });
    }
    let mut out = Vec::new();
    for i in 0..n {
        let (rep, element) = match alg {
            ConvexAlgebra::Semilattice(l) => {
                let e = l.elements()[i].clone();
                (
                    FilterRep::Elements(BTreeSet::from([e.clone()])),
                    ConvexElement::lattice(e),
                )
            }
            ConvexAlgebra::Simplex(s) => (
                FilterRep::Face(BTreeSet::from([i])),
                ConvexElement::vertex(s.vertices()[i].clone()),
            ),
            ConvexAlgebra::Polytope(p) => {
                (FilterRep::Face(BTreeSet::from([i])), p.vertex_element(i))
            }
        };
        if is_prime_filter(alg, &rep, grid).is_prime {
            out.push(element);
        }
    }
    Ok(out)
}

/// An affine map into the two-element meet semilattice, represented by its
/// "true kernel": the prime filter of elements sent to 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoValuedMap {
    pub filter: PrimeFilter,
}

impl TwoValuedMap {
    pub fn apply(&self, alg: &ConvexAlgebra, e: &ConvexElement) -> ConvexElement {
        if self.filter.contains(alg, e) {
            ConvexElement::lattice("1")
        } else {
            ConvexElement::lattice("0")
        }
    }

    /// Pointwise order against another map: `f ≤ g` when `f(x) ≤ g(x)`
    /// everywhere, which for true-kernel representations is filter
    /// inclusion.
    pub fn leq(&self, other: &TwoValuedMap) -> bool {
        match (&self.filter.rep, &other.filter.rep) {
            (FilterRep::Elements(a), FilterRep::Elements(b)) => a.is_subset(b),
            (FilterRep::Face(a), FilterRep::Face(b)) => a.is_subset(b),
            _ => false,
        }
    }
}

/// The filter of elements a map sends to 1.
pub fn filter_of(map: &TwoValuedMap) -> &PrimeFilter {
    &map.filter
}

/// The map whose true kernel is the given filter.
pub fn map_of(filter: &PrimeFilter) -> TwoValuedMap {
    TwoValuedMap { filter: filter.clone() }
}

/// All affine maps into `{0, 1}`, as true-kernel representations; in
/// bijection with the prime filters by construction, so the interesting
/// content is the verification in [`check_filter_duality`].
pub fn hom_to_two(alg: &ConvexAlgebra, grid: &[Rational]) -> Result<Vec<TwoValuedMap>, FacesError> {
    Ok(enumerate_prime_filters(alg, grid)?.iter().map(map_of).collect())
}

/// Verifies the duality between prime filters and two-valued affine maps:
/// equal counts, mutually inverse translations, affinity of every map on
/// sampled inputs, and the order isomorphism.
pub fn check_filter_duality(
    alg: &ConvexAlgebra,
    grid: &[Rational],
    samples: &[ConvexElement],
) -> Result<CheckReport, FacesError> {
    let mut report = CheckReport::new(alg.describe(), "prime-filter-duality");
    let filters = enumerate_prime_filters(alg, grid)?;
    let maps = hom_to_two(alg, grid)?;

    report.record("counts-agree", filters.len() == maps.len(), || {
        json!({ "filters": filters.len(), "maps": maps.len() })
    });

    let mut round_trip_ok = true;
    for f in &filters {
        if filter_of(&map_of(f)) != f {
            round_trip_ok = false;
        }
    }
    for m in &maps {
        if map_of(filter_of(m)) != *m {
            round_trip_ok = false;
        }
    }
    report.record("round-trips-identity", round_trip_ok, || json!({}));

    // Every map is affine, checked against the meet structure of {0,1}.
    let two = ConvexAlgebra::Semilattice(MeetSemilattice::two());
    let mut affine_failure: Option<String> = None;
    for m in &maps {
        let f = |x: &ConvexElement| m.apply(alg, x);
        if let Err(e) = is_affine(alg, &two, &f, grid, samples) {
            affine_failure = Some(format!("{}: {e}", m.filter.describe(alg)));
            break;
        }
    }
    report.record("maps-are-affine", affine_failure.is_none(), || {
        json!({ "witness": affine_failure })
    });

    // Order isomorphism: inclusion of filters matches the pointwise order,
    // corroborated on the samples.
    let mut order_failure: Option<String> = None;
    'outer: for (i, fi) in filters.iter().enumerate() {
        for (j, fj) in filters.iter().enumerate() {
            let incl = match (&fi.rep, &fj.rep) {
                (FilterRep::Elements(a), FilterRep::Elements(b)) => a.is_subset(b),
                (FilterRep::Face(a), FilterRep::Face(b)) => a.is_subset(b),
                _ => false,
            };
            let map_le = maps[i].leq(&maps[j]);
            if incl != map_le {
                order_failure = Some(format!("{} vs {}", fi.describe(alg), fj.describe(alg)));
                break 'outer;
            }
            if incl {
                for x in samples {
                    let vi = maps[i].apply(alg, x);
                    let vj = maps[j].apply(alg, x);
                    if vi == ConvexElement::lattice("1") && vj != ConvexElement::lattice("1") {
                        order_failure = Some(format!(
                            "pointwise violation at {x} for {} ⊆ {}",
                            fi.describe(alg),
                            fj.describe(alg)
                        ));
                        break 'outer;
                    }
                }
            }
        }
    }
    report.record("order-isomorphism", order_failure.is_none(), || {
        json!({ "witness": order_failure })
    });

    Ok(report)
}

impl fmt::Display for FilterRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterRep::Elements(set) => {
                let items: Vec<&str> = set.iter().map(String::as_str).collect();
                write!(f, "{{{}}}", items.join(","))
            }
            FilterRep::Face(set) => {
                let items: Vec<String> = set.iter().map(|i| i.to_string()).collect();
                write!(f, "{{{}}}", items.join(","))
            }
        }
    }
}
