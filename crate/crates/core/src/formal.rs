//! Canonical finite-support formal sums and the multiset / distribution
//! monads over a semiring, together with executable law checkers for the
//! monad equations and commutativity of the strength maps.
//!
//! A formal sum `s1*x1 + s2*x2 + ...` is stored as an ordered map from
//! element keys to nonzero coefficients, so `s1*x + s2*x` and `(s1+s2)*x`
//! are literally the same value and summand order never matters.

use std::collections::BTreeMap;
use std::fmt;

use rand::RngCore;
use serde_json::json;
use thiserror::Error;

use crate::report::CheckReport;
use crate::sampling;
use crate::scalars::{NonNegRationalSemiring, Rational, ScalarError, Semiring};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormalError {
    #[error("total mass {mass} is not one")]
    NotADistribution { mass: String },
    #[error("coefficient {coeff} is negative")]
    NegativeCoefficient { coeff: String },
    #[error("cannot parse formal sum {text:?}: {reason}")]
    Parse { text: String, reason: String },
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// A finite-support formal sum with nonzero coefficients, canonically
/// ordered by key.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct FormalSum<K: Ord + Clone, E: Clone + Eq> {
    terms: BTreeMap<K, E>,
}

impl<K: Ord + Clone, E: Clone + Eq> Default for FormalSum<K, E> {
    fn default() -> Self {
        FormalSum { terms: BTreeMap::new() }
    }
}

impl<K: Ord + Clone, E: Clone + Eq> FormalSum<K, E> {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Canonicalizes a raw list of weighted elements: duplicate keys are
    /// merged by semiring addition and zero coefficients are dropped.
    pub fn normalize<S>(ring: &S, raw: impl IntoIterator<Item = (E, K)>) -> Self
    where
        S: Semiring<Elem = E>,
    {
        let mut terms: BTreeMap<K, E> = BTreeMap::new();
        for (coeff, key) in raw {
            match terms.remove(&key) {
                Some(existing) => {
                    terms.insert(key, ring.add(&existing, &coeff));
                }
                None => {
                    terms.insert(key, coeff);
                }
            }
        }
        terms.retain(|_, c| !ring.is_zero(c));
        FormalSum { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&K, &E)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }

    pub fn coeff(&self, key: &K) -> Option<&E> {
        self.terms.get(key)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_mass<S>(&self, ring: &S) -> E
    where
        S: Semiring<Elem = E>,
    {
        self.terms.values().fold(ring.zero(), |acc, c| ring.add(&acc, c))
    }

    /// True when every stored coefficient is nonzero; holds by construction
    /// for anything produced by this module.
    pub fn is_canonical<S>(&self, ring: &S) -> bool
    where
        S: Semiring<Elem = E>,
    {
        self.terms.values().all(|c| !ring.is_zero(c))
    }
}

impl<K, E> fmt::Display for FormalSum<K, E>
where
    K: Ord + Clone + fmt::Display,
    E: Clone + Eq + fmt::Display,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let rendered: Vec<String> = self.terms.iter().map(|(k, c)| format!("{c}*{k}")).collect();
        write!(f, "{}", rendered.join(" + "))
    }
}

impl<K, E> fmt::Debug for FormalSum<K, E>
where
    K: Ord + Clone + fmt::Debug,
    E: Clone + Eq + fmt::Debug,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

/// A formal sum whose coefficients add up to one, with the witness checked
/// at construction time. This is the refinement `D_S(X) ⊆ M_S(X)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Dist<K: Ord + Clone, E: Clone + Eq> {
    sum: FormalSum<K, E>,
}

impl<K: Ord + Clone, E: Clone + Eq> Dist<K, E> {
    pub fn new<S>(ring: &S, sum: FormalSum<K, E>) -> Result<Self, FormalError>
    where
        S: Semiring<Elem = E>,
        E: fmt::Display,
    {
        let mass = sum.total_mass(ring);
        if mass != ring.one() {
            return Err(FormalError::NotADistribution { mass: mass.to_string() });
        }
        Ok(Dist { sum })
    }

    pub fn as_sum(&self) -> &FormalSum<K, E> {
        &self.sum
    }

    pub fn into_sum(self) -> FormalSum<K, E> {
        self.sum
    }

    pub fn terms(&self) -> impl Iterator<Item = (&K, &E)> {
        self.sum.terms()
    }

    pub fn support(&self) -> impl Iterator<Item = &K> {
        self.sum.support()
    }

    pub fn coeff(&self, key: &K) -> Option<&E> {
        self.sum.coeff(key)
    }

    pub fn len(&self) -> usize {
        self.sum.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sum.is_empty()
    }
}

impl<K, E> fmt::Display for Dist<K, E>
where
    K: Ord + Clone + fmt::Display,
    E: Clone + Eq + fmt::Display,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.sum)
    }
}

impl<K, E> fmt::Debug for Dist<K, E>
where
    K: Ord + Clone + fmt::Debug,
    E: Clone + Eq + fmt::Debug,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.sum.fmt(f)
    }
}

impl<K: Ord + Clone> Dist<K, Rational> {
    /// Builds a rational distribution from weighted keys, rejecting negative
    /// weights and a total other than one.
    pub fn from_weights(raw: impl IntoIterator<Item = (Rational, K)>) -> Result<Self, FormalError> {
        let ring = NonNegRationalSemiring;
        let raw: Vec<(Rational, K)> = raw.into_iter().collect();
        for (c, _) in &raw {
            if c.is_negative() {
                return Err(FormalError::NegativeCoefficient { coeff: c.to_string() });
            }
        }
        let sum = FormalSum::normalize(&ring, raw.into_iter().map(|(c, k)| (c, k)));
        Dist::new(&ring, sum)
    }

    /// The one-point distribution.
    pub fn point(key: K) -> Self {
        Dist { sum: FormalSum { terms: BTreeMap::from([(key, Rational::one())]) } }
    }
}

/// Monad unit: `x ↦ 1*x`.
pub fn unit<S, K>(ring: &S, x: K) -> Dist<K, S::Elem>
where
    S: Semiring,
    K: Ord + Clone,
{
    Dist { sum: FormalSum { terms: BTreeMap::from([(x, ring.one())]) } }
}

/// Monad multiplication: flattens a formal sum of formal sums,
/// `μ(Σ_i s_i φ_i)(x) = Σ_i s_i · φ_i(x)`.
pub fn mult<S, K>(ring: &S, outer: &FormalSum<FormalSum<K, S::Elem>, S::Elem>) -> FormalSum<K, S::Elem>
where
    S: Semiring,
    K: Ord + Clone,
{
    let mut raw = Vec::new();
    for (inner, s) in outer.terms() {
        for (x, t) in inner.terms() {
            raw.push((ring.mul(s, t), x.clone()));
        }
    }
    FormalSum::normalize(ring, raw)
}

/// Flattening restricted to distributions; the output mass is one again and
/// the witness is re-checked rather than assumed.
pub fn mult_dist<S, K>(ring: &S, outer: &Dist<Dist<K, S::Elem>, S::Elem>) -> Result<Dist<K, S::Elem>, FormalError>
where
    S: Semiring,
    K: Ord + Clone,
    S::Elem: fmt::Display,
{
    let as_sums = FormalSum::normalize(
        ring,
        outer.terms().map(|(d, s)| (s.clone(), d.as_sum().clone())),
    );
    Dist::new(ring, mult(ring, &as_sums))
}

/// Functorial action: push a sum forward along `f`, merging collisions.
pub fn map_sum<S, K, K2>(ring: &S, f: impl Fn(&K) -> K2, phi: &FormalSum<K, S::Elem>) -> FormalSum<K2, S::Elem>
where
    S: Semiring,
    K: Ord + Clone,
    K2: Ord + Clone,
{
    FormalSum::normalize(ring, phi.terms().map(|(k, c)| (c.clone(), f(k))))
}

/// Strength: `st(x, v) = Σ_y v(y)·(x, y)`.
pub fn strength<S, A, B>(ring: &S, x: &A, v: &FormalSum<B, S::Elem>) -> FormalSum<(A, B), S::Elem>
where
    S: Semiring,
    A: Ord + Clone,
    B: Ord + Clone,
{
    map_sum(ring, |y| (x.clone(), y.clone()), v)
}

/// Swapped strength: `st'(u, y) = Σ_x u(x)·(x, y)`.
pub fn strength_swapped<S, A, B>(ring: &S, u: &FormalSum<A, S::Elem>, y: &B) -> FormalSum<(A, B), S::Elem>
where
    S: Semiring,
    A: Ord + Clone,
    B: Ord + Clone,
{
    map_sum(ring, |x| (x.clone(), y.clone()), u)
}

/// Changes scalars along a semiring homomorphism by mapping each
/// coefficient and re-canonicalizing.
pub fn change_scalars<K, E1, S2>(
    h: impl Fn(&E1) -> S2::Elem,
    target: &S2,
    phi: &FormalSum<K, E1>,
) -> FormalSum<K, S2::Elem>
where
    K: Ord + Clone,
    E1: Clone + Eq,
    S2: Semiring,
{
    FormalSum::normalize(target, phi.terms().map(|(k, c)| (h(c), k.clone())))
}

/// Which of the two monads a law check targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonadKind {
    Multiset,
    Distribution,
}

impl fmt::Display for MonadKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonadKind::Multiset => write!(f, "multiset"),
            MonadKind::Distribution => write!(f, "distribution"),
        }
    }
}

const MAX_EXHAUSTIVE_LEVEL: usize = 400;

/// Enumerates formal sums over the carrier with coefficients drawn from a
/// finite semiring: every coefficient assignment, zeros meaning "absent".
fn enumerate_sums<S, K>(ring: &S, carrier: &[K]) -> Option<Vec<FormalSum<K, S::Elem>>>
where
    S: Semiring,
    K: Ord + Clone,
{
    let elems = ring.elements()?;
    let mut sums = vec![FormalSum::<K, S::Elem>::empty()];
    for x in carrier {
        let mut next = Vec::with_capacity(sums.len() * elems.len());
        for sum in &sums {
            for c in &elems {
                let mut terms = sum.terms.clone();
                if !ring.is_zero(c) {
                    terms.insert(x.clone(), c.clone());
                }
                next.push(FormalSum { terms });
            }
        }
        sums = next;
        if sums.len() > MAX_EXHAUSTIVE_LEVEL * elems.len() {
            break;
        }
    }
    sums.sort();
    sums.dedup();
    Some(sums)
}

fn random_sum<S, K>(ring: &S, carrier: &[K], kind: MonadKind, rng: &mut dyn RngCore) -> FormalSum<K, S::Elem>
where
    S: ConvexSampling,
    K: Ord + Clone,
{
    let max_support = carrier.len().min(4);
    match kind {
        MonadKind::Multiset => {
            let size = sampling::below(rng, max_support as u64 + 1) as usize;
            let mut picked = Vec::new();
            let mut raw = Vec::new();
            while picked.len() < size {
                let k = sampling::pick(rng, carrier).clone();
                if picked.contains(&k) {
                    continue;
                }
                let mut c = ring.sample(rng);
                let mut attempts = 0;
                while ring.is_zero(&c) && attempts < 16 {
                    c = ring.sample(rng);
                    attempts += 1;
                }
                if ring.is_zero(&c) {
                    break;
                }
                raw.push((c, k.clone()));
                picked.push(k);
            }
            FormalSum::normalize(ring, raw)
        }
        MonadKind::Distribution => {
            let size = 1 + sampling::below(rng, max_support as u64) as usize;
            let mut picked: Vec<K> = Vec::new();
            while picked.len() < size {
                let k = sampling::pick(rng, carrier).clone();
                if !picked.contains(&k) {
                    picked.push(k);
                }
            }
            match ring.sample_convex_weights(rng, picked.len()) {
                Some(weights) => FormalSum::normalize(
                    ring,
                    weights.into_iter().zip(picked.iter().cloned()),
                ),
                // Fallback for semirings where the only unit partitions are
                // trivial: a point distribution.
                None => FormalSum {
                    terms: BTreeMap::from([(picked[0].clone(), ring.one())]),
                },
            }
        }
    }
}

/// Extension point used by the sampled distribution-law checks: a list of
/// nonzero coefficients of the given length summing to one, when the
/// semiring can produce a nontrivial one.
pub trait ConvexSampling: Semiring {
    fn sample_convex_weights(&self, _rng: &mut dyn RngCore, len: usize) -> Option<Vec<Self::Elem>> {
        if len == 1 {
            Some(vec![self.one()])
        } else {
            None
        }
    }
}

impl ConvexSampling for crate::scalars::NatSemiring {}
impl ConvexSampling for crate::scalars::BoolSemiring {
    fn sample_convex_weights(&self, _rng: &mut dyn RngCore, len: usize) -> Option<Vec<Self::Elem>> {
        Some(vec![crate::scalars::Bit(true); len])
    }
}
impl ConvexSampling for crate::scalars::ModSemiring {}
impl ConvexSampling for NonNegRationalSemiring {
    fn sample_convex_weights(&self, rng: &mut dyn RngCore, len: usize) -> Option<Vec<Rational>> {
        Some(sampling::convex_weights(rng, len, 24))
    }
}

fn keep_mass_one<S, K>(ring: &S, sums: Vec<FormalSum<K, S::Elem>>) -> Vec<FormalSum<K, S::Elem>>
where
    S: Semiring,
    K: Ord + Clone,
{
    sums.into_iter().filter(|s| s.total_mass(ring) == ring.one()).collect()
}

/// Checks the three monad laws for `M_S` or `D_S` over a finite carrier.
///
/// With a finite scalar semiring the check enumerates sums exhaustively
/// (bounded per level); otherwise it runs `trials` seeded samples. Shapes at
/// depth two and three are built from the level-one pool.
pub fn check_monad_laws<S, K>(
    ring: &S,
    kind: MonadKind,
    carrier: &[K],
    trials: usize,
    rng: &mut dyn RngCore,
) -> CheckReport
where
    S: ConvexSampling,
    K: Ord + Clone + fmt::Display,
    S::Elem: fmt::Display,
{
    let mut report = CheckReport::new(
        format!("{}({}) on {} points", kind, ring.name(), carrier.len()),
        "monad-laws",
    );
    assert!(!carrier.is_empty(), "carrier must be nonempty");

    // Level-one pool.
    let level1: Vec<FormalSum<K, S::Elem>> = match enumerate_sums(ring, carrier) {
        Some(all) => match kind {
            MonadKind::Multiset => all,
            MonadKind::Distribution => keep_mass_one(ring, all),
        },
        None => {
            let mut pool: Vec<FormalSum<K, S::Elem>> =
                (0..trials).map(|_| random_sum(ring, carrier, kind, rng)).collect();
            pool.sort();
            pool.dedup();
            pool
        }
    };

    // Unit law μ ∘ η_T = id: flatten the one-point sum at φ.
    let mut unit1_failures = Vec::new();
    for phi in &level1 {
        let eta_phi = FormalSum {
            terms: BTreeMap::from([(phi.clone(), ring.one())]),
        };
        let flattened = mult(ring, &eta_phi);
        if flattened != *phi {
            unit1_failures.push(format!("{phi}"));
        }
    }
    report.record("mult-after-unit-is-identity", unit1_failures.is_empty(), || {
        json!({ "witness": unit1_failures.iter().min().cloned() })
    });

    // Unit law μ ∘ T(η) = id.
    let mut unit2_failures = Vec::new();
    for phi in &level1 {
        let t_eta = map_sum(ring, |x: &K| unit(ring, x.clone()).into_sum(), phi);
        let flattened = mult(ring, &t_eta);
        if flattened != *phi {
            unit2_failures.push(format!("{phi}"));
        }
    }
    report.record("mult-after-mapped-unit-is-identity", unit2_failures.is_empty(), || {
        json!({ "witness": unit2_failures.iter().min().cloned() })
    });

    // Associativity μ ∘ μ_T = μ ∘ T(μ) on depth-three sums assembled from
    // the pool: outer supports of size ≤ 2 keep the exhaustive case small.
    let level2: Vec<FormalSum<FormalSum<K, S::Elem>, S::Elem>> = build_level(ring, kind, &level1, trials, rng);
    let level3: Vec<FormalSum<FormalSum<FormalSum<K, S::Elem>, S::Elem>, S::Elem>> =
        build_level(ring, kind, &level2, trials, rng);

    let mut assoc_failures = Vec::new();
    for psi in &level3 {
        let route1 = mult(ring, &mult(ring, psi));
        let route2 = mult(ring, &map_sum(ring, |inner| mult(ring, inner), psi));
        if route1 != route2 {
            assoc_failures.push(format!("{psi}"));
        }
    }
    report.record("mult-is-associative", assoc_failures.is_empty(), || {
        json!({ "witness": assoc_failures.iter().min().cloned() })
    });

    // Mass preservation for distributions.
    if kind == MonadKind::Distribution {
        let mut mass_failures = Vec::new();
        for outer in &level2 {
            let flattened = mult(ring, outer);
            if flattened.total_mass(ring) != ring.one() {
                mass_failures.push(format!("{outer}"));
            }
        }
        report.record("mult-preserves-unit-mass", mass_failures.is_empty(), || {
            json!({ "witness": mass_failures.iter().min().cloned() })
        });
    }

    report
}

/// Builds depth-(n+1) sums whose summands come from a depth-n pool.
fn build_level<S, K>(
    ring: &S,
    kind: MonadKind,
    pool: &[FormalSum<K, S::Elem>],
    trials: usize,
    rng: &mut dyn RngCore,
) -> Vec<FormalSum<FormalSum<K, S::Elem>, S::Elem>>
where
    S: ConvexSampling,
    K: Ord + Clone,
{
    let mut out = Vec::new();
    if pool.is_empty() {
        return out;
    }
    match ring.elements() {
        Some(elems) if pool.len() <= MAX_EXHAUSTIVE_LEVEL => {
            let nonzero: Vec<S::Elem> = elems.into_iter().filter(|c| !ring.is_zero(c)).collect();
            // Outer support of size one or two.
            for (i, a) in pool.iter().enumerate() {
                for ca in &nonzero {
                    let single = FormalSum { terms: BTreeMap::from([(a.clone(), ca.clone())]) };
                    if kind == MonadKind::Distribution && single.total_mass(ring) != ring.one() {
                        continue;
                    }
                    out.push(single);
                }
                for b in pool.iter().skip(i + 1) {
                    for ca in &nonzero {
                        for cb in &nonzero {
                            let pair = FormalSum {
                                terms: BTreeMap::from([(a.clone(), ca.clone()), (b.clone(), cb.clone())]),
                            };
                            if kind == MonadKind::Distribution && pair.total_mass(ring) != ring.one() {
                                continue;
                            }
                            out.push(pair);
                        }
                    }
                }
            }
        }
        _ => {
            // Either an infinite scalar semiring or a pool too large to pair
            // exhaustively; fall back to seeded samples, never to vacuity.
            for _ in 0..trials.max(100) {
                out.push(random_sum(ring, pool, kind, rng));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Checks that the two strength composites `T(X) × T(Y) → T(X × Y)` agree,
/// for `T` the multiset or the distribution monad.
pub fn check_commutativity<S, A, B>(
    ring: &S,
    kind: MonadKind,
    xs: &[A],
    ys: &[B],
    trials: usize,
    rng: &mut dyn RngCore,
) -> CheckReport
where
    S: ConvexSampling,
    A: Ord + Clone + fmt::Display,
    B: Ord + Clone + fmt::Display,
    S::Elem: fmt::Display,
{
    let mut report = CheckReport::new(
        format!("{}({}) strength on |X|={} |Y|={}", kind, ring.name(), xs.len(), ys.len()),
        "commutativity",
    );

    let us: Vec<FormalSum<A, S::Elem>> = match enumerate_sums(ring, xs) {
        Some(all) => match kind {
            MonadKind::Multiset => all,
            MonadKind::Distribution => keep_mass_one(ring, all),
        },
        None => (0..trials).map(|_| random_sum(ring, xs, kind, rng)).collect(),
    };
    let vs: Vec<FormalSum<B, S::Elem>> = match enumerate_sums(ring, ys) {
        Some(all) => match kind {
            MonadKind::Multiset => all,
            MonadKind::Distribution => keep_mass_one(ring, all),
        },
        None => (0..trials).map(|_| random_sum(ring, ys, kind, rng)).collect(),
    };

    let mut failures = Vec::new();
    for u in &us {
        for v in &vs {
            let top = {
                // st, then T(st'), then μ.
                let stage1 = strength(ring, u, v);
                let stage2 = map_sum(ring, |(u2, y): &(FormalSum<A, S::Elem>, B)| strength_swapped(ring, u2, y), &stage1);
                mult(ring, &stage2)
            };
            let bottom = {
                // st', then T(st), then μ.
                let stage1 = strength_swapped(ring, u, v);
                let stage2 = map_sum(ring, |(x, v2): &(A, FormalSum<B, S::Elem>)| strength(ring, x, v2), &stage1);
                mult(ring, &stage2)
            };
            if top != bottom {
                failures.push(format!("u={u}, v={v}"));
            }
        }
    }
    report.record("strength-composites-agree", failures.is_empty(), || {
        json!({ "witness": failures.iter().min().cloned() })
    });
    report
}

/// Parses the textual form `s1*e1 + s2*e2 + ...` over string element ids.
/// Duplicate mentions of an element merge; they are never an error.
pub fn parse_formal_sum<S>(ring: &S, text: &str) -> Result<FormalSum<String, S::Elem>, FormalError>
where
    S: Semiring,
{
    let trimmed = text.trim();
    if trimmed == "0" {
        return Ok(FormalSum::empty());
    }
    let mut raw = Vec::new();
    for part in trimmed.split('+') {
        let part = part.trim();
        let (scalar, elem) = part.split_once('*').ok_or_else(|| FormalError::Parse {
            text: text.to_string(),
            reason: format!("term {part:?} is missing '*'"),
        })?;
        let coeff = ring.parse_elem(scalar.trim())?;
        let key = elem.trim();
        if key.is_empty() {
            return Err(FormalError::Parse {
                text: text.to_string(),
                reason: "empty element id".into(),
            });
        }
        raw.push((coeff, key.to_string()));
    }
    Ok(FormalSum::normalize(ring, raw))
}
