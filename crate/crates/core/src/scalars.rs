//! Scalars: exact rational arithmetic, the semiring abstraction, and the
//! structural predicates (zerosumfree, integral, semifield) together with
//! the support homomorphism into the Boolean semiring.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::RngCore;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::sampling;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("invalid scalar literal {literal:?}: {reason}")]
    Parse { literal: String, reason: String },
    #[error("semiring law {law} fails at witness {witness}")]
    LawViolation { law: String, witness: String },
    #[error("semiring is not eligible for the support homomorphism: {predicate} fails at {witness}")]
    NotEligible { predicate: String, witness: String },
}

/// An exact rational number in canonical form: the denominator is positive
/// and coprime to the numerator. Equality is structural.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    /// Builds `p/q` from machine integers. Panics when `q == 0`; use the
    /// string parser for untrusted input.
    pub fn new(p: i64, q: i64) -> Self {
        assert!(q != 0, "denominator must be nonzero");
        Rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn from_int(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_big(p: BigInt, q: BigInt) -> Result<Self, ScalarError> {
        if q.is_zero() {
            return Err(ScalarError::Parse {
                literal: format!("{p}/{q}"),
                reason: "denominator is zero".into(),
            });
        }
        Ok(Rational(BigRational::new(p, q)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Rational(self.0.recip()))
        }
    }

    /// True when the value lies in the closed unit interval.
    pub fn in_unit_interval(&self) -> bool {
        !self.is_negative() && self.0 <= BigRational::one()
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Rational {
    type Err = ScalarError;

    /// Scalar literal grammar: optional sign, digits, optionally `/` digits.
    /// The denominator carries no sign; a zero denominator is a parse error.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |reason: &str| ScalarError::Parse {
            literal: s.to_string(),
            reason: reason.to_string(),
        };
        let (num_part, den_part) = match s.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (s, None),
        };
        let digits = num_part.strip_prefix(['+', '-']).unwrap_or(num_part);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad("numerator must be an optionally signed integer"));
        }
        let numer: BigInt = num_part.parse().map_err(|_| bad("bad numerator"))?;
        let denom: BigInt = match den_part {
            None => BigInt::one(),
            Some(d) => {
                if d.is_empty() || !d.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(bad("denominator must be an unsigned integer"));
                }
                d.parse().map_err(|_| bad("bad denominator"))?
            }
        };
        if denom.is_zero() {
            return Err(bad("denominator is zero"));
        }
        Ok(Rational(BigRational::new(numer, denom)))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(|e: ScalarError| D::Error::custom(e.to_string()))
    }
}

macro_rules! rational_binop {
    ($trait:ident, $method:ident) => {
        impl std::ops::$trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl std::ops::$trait for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl std::ops::$trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((self.0).$method(&rhs.0))
            }
        }
    };
}

rational_binop!(Add, add);
rational_binop!(Sub, sub);
rational_binop!(Mul, mul);
rational_binop!(Div, div);

impl std::ops::Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl std::ops::Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

/// Convenience constructor used pervasively in tests.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(p, q)
}

/// The four structural flags of a semiring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemiringProfile {
    pub nontrivial: bool,
    pub zerosumfree: bool,
    pub integral: bool,
    pub semifield: bool,
}

impl SemiringProfile {
    pub fn consistent(&self) -> bool {
        !self.semifield || (self.nontrivial && self.zerosumfree && self.integral)
    }
}

/// A commutative semiring presented as a value universe with operations.
///
/// Finite instances expose their full element list through [`Semiring::elements`];
/// infinite instances return `None` there and are law-checked by sampling
/// against their declared profile.
pub trait Semiring {
    type Elem: Clone + Eq + Ord + fmt::Debug + fmt::Display;

    fn name(&self) -> String;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    /// Complete element enumeration for finite instances.
    fn elements(&self) -> Option<Vec<Self::Elem>>;

    /// Multiplicative inverse of a nonzero element, when one exists.
    fn invert(&self, a: &Self::Elem) -> Option<Self::Elem>;

    /// The profile this instance is known to have. For finite instances the
    /// classifier recomputes it; for infinite ones sampling can only refute.
    fn declared_profile(&self) -> SemiringProfile;

    fn sample(&self, rng: &mut dyn RngCore) -> Self::Elem;

    fn parse_elem(&self, s: &str) -> Result<Self::Elem, ScalarError>;

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }
}

/// An element of the Boolean semiring `2`, with join as sum and meet as
/// multiplication.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Bit(pub bool);

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if self.0 { 1 } else { 0 })
    }
}

/// The Boolean semiring `2 = {0, 1}`.
#[derive(Debug, Clone, Copy, Default)]
pub struct BoolSemiring;

impl Semiring for BoolSemiring {
    type Elem = Bit;

    fn name(&self) -> String {
        "bool".into()
    }
    fn zero(&self) -> Bit {
        Bit(false)
    }
    fn one(&self) -> Bit {
        Bit(true)
    }
    fn add(&self, a: &Bit, b: &Bit) -> Bit {
        Bit(a.0 || b.0)
    }
    fn mul(&self, a: &Bit, b: &Bit) -> Bit {
        Bit(a.0 && b.0)
    }
    fn elements(&self) -> Option<Vec<Bit>> {
        Some(vec![Bit(false), Bit(true)])
    }
    fn invert(&self, a: &Bit) -> Option<Bit> {
        a.0.then_some(Bit(true))
    }
    fn declared_profile(&self) -> SemiringProfile {
        SemiringProfile { nontrivial: true, zerosumfree: true, integral: true, semifield: true }
    }
    fn sample(&self, rng: &mut dyn RngCore) -> Bit {
        Bit(rng.next_u64() % 2 == 1)
    }
    fn parse_elem(&self, s: &str) -> Result<Bit, ScalarError> {
        match s.trim() {
            "0" => Ok(Bit(false)),
            "1" => Ok(Bit(true)),
            other => Err(ScalarError::Parse {
                literal: other.to_string(),
                reason: "expected 0 or 1".into(),
            }),
        }
    }
}

/// The semiring of natural numbers.
#[derive(Debug, Clone, Copy, Default)]
pub struct NatSemiring;

impl Semiring for NatSemiring {
    type Elem = BigUint;

    fn name(&self) -> String {
        "nat".into()
    }
    fn zero(&self) -> BigUint {
        BigUint::zero()
    }
    fn one(&self) -> BigUint {
        BigUint::one()
    }
    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        a + b
    }
    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        a * b
    }
    fn elements(&self) -> Option<Vec<BigUint>> {
        None
    }
    fn invert(&self, a: &BigUint) -> Option<BigUint> {
        a.is_one().then(BigUint::one)
    }
    fn declared_profile(&self) -> SemiringProfile {
        SemiringProfile { nontrivial: true, zerosumfree: true, integral: true, semifield: false }
    }
    fn sample(&self, rng: &mut dyn RngCore) -> BigUint {
        BigUint::from(sampling::below(rng, 7))
    }
    fn parse_elem(&self, s: &str) -> Result<BigUint, ScalarError> {
        let t = s.trim();
        if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ScalarError::Parse {
                literal: s.to_string(),
                reason: "expected an unsigned integer".into(),
            });
        }
        t.parse().map_err(|_| ScalarError::Parse {
            literal: s.to_string(),
            reason: "bad natural literal".into(),
        })
    }
}

/// The semifield of nonnegative rationals.
#[derive(Debug, Clone, Copy, Default)]
pub struct NonNegRationalSemiring;

impl Semiring for NonNegRationalSemiring {
    type Elem = Rational;

    fn name(&self) -> String {
        "nonneg_rational".into()
    }
    fn zero(&self) -> Rational {
        Rational::zero()
    }
    fn one(&self) -> Rational {
        Rational::one()
    }
    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        debug_assert!(!a.is_negative() && !b.is_negative());
        a + b
    }
    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        a * b
    }
    fn elements(&self) -> Option<Vec<Rational>> {
        None
    }
    fn invert(&self, a: &Rational) -> Option<Rational> {
        a.recip()
    }
    fn declared_profile(&self) -> SemiringProfile {
        SemiringProfile { nontrivial: true, zerosumfree: true, integral: true, semifield: true }
    }
    fn sample(&self, rng: &mut dyn RngCore) -> Rational {
        sampling::nonneg_rational(rng, 8, 8)
    }
    fn parse_elem(&self, s: &str) -> Result<Rational, ScalarError> {
        let q: Rational = s.trim().parse()?;
        if q.is_negative() {
            return Err(ScalarError::Parse {
                literal: s.to_string(),
                reason: "negative scalar outside this semiring".into(),
            });
        }
        Ok(q)
    }
}

/// A residue modulo `n`. Carries its modulus so that mixing moduli is a
/// detectable bug instead of silent garbage.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ZMod {
    pub value: u64,
    pub modulus: u64,
}

impl fmt::Display for ZMod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// The quotient ring of integers modulo `n`, seen as a semiring.
#[derive(Debug, Clone, Copy)]
pub struct ModSemiring {
    pub n: u64,
}

impl ModSemiring {
    pub fn new(n: u64) -> Self {
        assert!(n >= 1);
        ModSemiring { n }
    }

    fn elem(&self, v: u64) -> ZMod {
        ZMod { value: v % self.n, modulus: self.n }
    }

    fn is_prime(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                return false;
            }
            d += 1;
        }
        true
    }
}

impl Semiring for ModSemiring {
    type Elem = ZMod;

    fn name(&self) -> String {
        format!("mod{}", self.n)
    }
    fn zero(&self) -> ZMod {
        self.elem(0)
    }
    fn one(&self) -> ZMod {
        self.elem(1 % self.n)
    }
    fn add(&self, a: &ZMod, b: &ZMod) -> ZMod {
        assert_eq!(a.modulus, self.n);
        assert_eq!(b.modulus, self.n);
        self.elem((a.value + b.value) % self.n)
    }
    fn mul(&self, a: &ZMod, b: &ZMod) -> ZMod {
        assert_eq!(a.modulus, self.n);
        assert_eq!(b.modulus, self.n);
        self.elem((a.value * b.value) % self.n)
    }
    fn elements(&self) -> Option<Vec<ZMod>> {
        Some((0..self.n).map(|v| self.elem(v)).collect())
    }
    fn invert(&self, a: &ZMod) -> Option<ZMod> {
        (1..self.n).map(|v| self.elem(v)).find(|b| self.mul(a, b) == self.one())
    }
    fn declared_profile(&self) -> SemiringProfile {
        let nontrivial = self.n > 1;
        // A nonzero residue sum cannot vanish... except it can: 2+4=0 mod 6.
        let zerosumfree = self.n == 1;
        let integral = Self::is_prime(self.n) || self.n == 1;
        SemiringProfile { nontrivial, zerosumfree, integral, semifield: false }
    }
    fn sample(&self, rng: &mut dyn RngCore) -> ZMod {
        self.elem(sampling::below(rng, self.n))
    }
    fn parse_elem(&self, s: &str) -> Result<ZMod, ScalarError> {
        let v: u64 = s.trim().parse().map_err(|_| ScalarError::Parse {
            literal: s.to_string(),
            reason: "expected an unsigned integer".into(),
        })?;
        Ok(self.elem(v))
    }
}

fn pair_witness<E: fmt::Display>(a: &E, b: &E) -> String {
    format!("({a}, {b})")
}

fn triple_witness<E: fmt::Display>(a: &E, b: &E, c: &E) -> String {
    format!("({a}, {b}, {c})")
}

/// Checks the semiring laws on a list of element triples; used both for the
/// exhaustive finite scan and for the sampled smoke test on infinite rings.
fn check_laws_on<S: Semiring>(ring: &S, triples: &[(S::Elem, S::Elem, S::Elem)]) -> Result<(), ScalarError> {
    let zero = ring.zero();
    let one = ring.one();
    let fail = |law: &str, witness: String| ScalarError::LawViolation { law: law.into(), witness };
    for (a, b, c) in triples {
        if ring.add(a, b) != ring.add(b, a) {
            return Err(fail("add commutativity", pair_witness(a, b)));
        }
        if ring.add(&ring.add(a, b), c) != ring.add(a, &ring.add(b, c)) {
            return Err(fail("add associativity", triple_witness(a, b, c)));
        }
        if ring.add(a, &zero) != *a {
            return Err(fail("additive identity", format!("{a}")));
        }
        if ring.mul(a, b) != ring.mul(b, a) {
            return Err(fail("mul commutativity", pair_witness(a, b)));
        }
        if ring.mul(&ring.mul(a, b), c) != ring.mul(a, &ring.mul(b, c)) {
            return Err(fail("mul associativity", triple_witness(a, b, c)));
        }
        if ring.mul(a, &one) != *a {
            return Err(fail("multiplicative identity", format!("{a}")));
        }
        if ring.mul(a, &ring.add(b, c)) != ring.add(&ring.mul(a, b), &ring.mul(a, c)) {
            return Err(fail("distributivity", triple_witness(a, b, c)));
        }
        if ring.mul(a, &zero) != zero {
            return Err(fail("zero annihilation", format!("{a}")));
        }
    }
    Ok(())
}

/// Classifies a semiring: law check first (exhaustive when finite, sampled
/// otherwise), then the four structural flags. Finite instances are
/// classified exactly; infinite ones report their declared profile after a
/// sampled cross-check.
pub fn classify_semiring<S: Semiring>(ring: &S, budget: usize, rng: &mut dyn RngCore) -> Result<SemiringProfile, ScalarError> {
    match ring.elements() {
        Some(elems) => {
            let mut triples = Vec::new();
            for a in &elems {
                for b in &elems {
                    for c in &elems {
                        triples.push((a.clone(), b.clone(), c.clone()));
                    }
                }
            }
            check_laws_on(ring, &triples)?;

            let zero = ring.zero();
            let nontrivial = ring.one() != zero;
            let mut zerosumfree = true;
            let mut integral = true;
            for a in &elems {
                for b in &elems {
                    if ring.add(a, b) == zero && (*a != zero || *b != zero) {
                        zerosumfree = false;
                    }
                    if ring.mul(a, b) == zero && *a != zero && *b != zero {
                        integral = false;
                    }
                }
            }
            let invertible = elems
                .iter()
                .filter(|a| **a != zero)
                .all(|a| ring.invert(a).is_some_and(|b| ring.mul(a, &b) == ring.one()));
            let semifield = nontrivial && zerosumfree && integral && invertible;
            Ok(SemiringProfile { nontrivial, zerosumfree, integral, semifield })
        }
        None => {
            let mut triples = Vec::with_capacity(budget);
            for _ in 0..budget {
                triples.push((ring.sample(rng), ring.sample(rng), ring.sample(rng)));
            }
            check_laws_on(ring, &triples)?;

            let declared = ring.declared_profile();
            let zero = ring.zero();
            for (a, b, _) in &triples {
                if declared.zerosumfree && ring.add(a, b) == zero && (*a != zero || *b != zero) {
                    return Err(ScalarError::LawViolation {
                        law: "declared zerosumfree".into(),
                        witness: pair_witness(a, b),
                    });
                }
                if declared.integral && ring.mul(a, b) == zero && *a != zero && *b != zero {
                    return Err(ScalarError::LawViolation {
                        law: "declared integral".into(),
                        witness: pair_witness(a, b),
                    });
                }
                if declared.semifield && *a != zero {
                    let inv = ring.invert(a);
                    if !inv.is_some_and(|i| ring.mul(a, &i) == ring.one()) {
                        return Err(ScalarError::LawViolation {
                            law: "declared semifield".into(),
                            witness: format!("{a}"),
                        });
                    }
                }
            }
            Ok(declared)
        }
    }
}

/// The support homomorphism into the Boolean semiring: `h(x) = 0` exactly
/// when `x = 0`. Exists precisely when the semiring is nontrivial,
/// zerosumfree and integral.
pub struct SupportHom<S: Semiring> {
    ring_name: String,
    zero: S::Elem,
}

impl<S: Semiring> fmt::Debug for SupportHom<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SupportHom({} -> bool)", self.ring_name)
    }
}

impl<S: Semiring> SupportHom<S> {
    pub fn apply(&self, x: &S::Elem) -> Bit {
        Bit(*x != self.zero)
    }

    pub fn ring_name(&self) -> &str {
        &self.ring_name
    }
}

/// Builds the support homomorphism, verifying eligibility and then checking
/// preservation of `(0, +)` and `(1, ·)` on enumerated or sampled pairs.
pub fn support_hom<S: Semiring>(ring: &S, budget: usize, rng: &mut dyn RngCore) -> Result<SupportHom<S>, ScalarError> {
    let zero = ring.zero();

    // Eligibility, with the lexicographically least witness on failure.
    match ring.elements() {
        Some(elems) => {
            if ring.one() == zero {
                return Err(ScalarError::NotEligible {
                    predicate: "nontrivial".into(),
                    witness: "0 = 1".into(),
                });
            }
            for a in &elems {
                for b in &elems {
                    if ring.mul(a, b) == zero && *a != zero && *b != zero {
                        return Err(ScalarError::NotEligible {
                            predicate: "integral".into(),
                            witness: format!("{a}*{b}=0"),
                        });
                    }
                }
            }
            for a in &elems {
                for b in &elems {
                    if ring.add(a, b) == zero && (*a != zero || *b != zero) {
                        return Err(ScalarError::NotEligible {
                            predicate: "zerosumfree".into(),
                            witness: format!("{a}+{b}=0"),
                        });
                    }
                }
            }
        }
        None => {
            let declared = ring.declared_profile();
            if !(declared.nontrivial && declared.zerosumfree && declared.integral) {
                return Err(ScalarError::NotEligible {
                    predicate: "declared profile".into(),
                    witness: format!("{:?}", declared),
                });
            }
        }
    }

    let hom = SupportHom::<S> { ring_name: ring.name(), zero: zero.clone() };
    let two = BoolSemiring;

    let pairs: Vec<(S::Elem, S::Elem)> = match ring.elements() {
        Some(elems) => {
            let mut v = Vec::new();
            for a in &elems {
                for b in &elems {
                    v.push((a.clone(), b.clone()));
                }
            }
            v
        }
        None => (0..budget).map(|_| (ring.sample(rng), ring.sample(rng))).collect(),
    };
    for (a, b) in &pairs {
        let lhs_add = hom.apply(&ring.add(a, b));
        let rhs_add = two.add(&hom.apply(a), &hom.apply(b));
        if lhs_add != rhs_add {
            return Err(ScalarError::LawViolation {
                law: "support hom preserves +".into(),
                witness: pair_witness(a, b),
            });
        }
        let lhs_mul = hom.apply(&ring.mul(a, b));
        let rhs_mul = two.mul(&hom.apply(a), &hom.apply(b));
        if lhs_mul != rhs_mul {
            return Err(ScalarError::LawViolation {
                law: "support hom preserves *".into(),
                witness: pair_witness(a, b),
            });
        }
    }

    Ok(hom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(0xC0FFEE)
    }

    #[test]
    fn rational_canonical_form() {
        assert_eq!(rat(2, 4), rat(1, 2));
        assert_eq!(rat(-2, -4), rat(1, 2));
        assert_eq!(rat(1, -2), rat(-1, 2));
        assert_eq!(rat(0, 5), Rational::zero());
        assert_eq!(rat(3, 5).to_string(), "3/5");
        assert_eq!(rat(-7, 1).to_string(), "-7");
    }

    #[test]
    fn rational_parsing() {
        assert_eq!("3/5".parse::<Rational>().unwrap(), rat(3, 5));
        assert_eq!("-3/6".parse::<Rational>().unwrap(), rat(-1, 2));
        assert_eq!("+4".parse::<Rational>().unwrap(), rat(4, 1));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("1/-2".parse::<Rational>().is_err());
        assert!("".parse::<Rational>().is_err());
        assert!("a/2".parse::<Rational>().is_err());
        assert!("1.5".parse::<Rational>().is_err());
    }

    proptest! {
        #[test]
        fn rational_render_parse_round_trip(p in -10_000i64..10_000, q in 1i64..10_000) {
            let x = rat(p, q);
            let back: Rational = x.to_string().parse().unwrap();
            prop_assert_eq!(back, x);
        }

        #[test]
        fn rational_field_laws(a in -100i64..100, b in 1i64..100, c in -100i64..100, d in 1i64..100) {
            let x = rat(a, b);
            let y = rat(c, d);
            prop_assert_eq!(&x + &y, &y + &x);
            prop_assert_eq!(&x * &y, &y * &x);
            prop_assert_eq!((&x + &y) - &y, x);
        }
    }

    #[test]
    fn nat_profile() {
        let p = classify_semiring(&NatSemiring, 200, &mut rng()).unwrap();
        assert!(p.nontrivial && p.zerosumfree && p.integral && !p.semifield);
    }

    #[test]
    fn nonneg_rational_is_semifield() {
        let p = classify_semiring(&NonNegRationalSemiring, 200, &mut rng()).unwrap();
        assert!(p.semifield);
        assert!(p.consistent());
    }

    #[test]
    fn bool_is_semifield() {
        let p = classify_semiring(&BoolSemiring, 0, &mut rng()).unwrap();
        assert!(p.semifield);
    }

    #[test]
    fn z6_is_not_integral() {
        let p = classify_semiring(&ModSemiring::new(6), 0, &mut rng()).unwrap();
        assert!(p.nontrivial);
        assert!(!p.integral);
        assert!(!p.zerosumfree);
        assert!(!p.semifield);
    }

    #[test]
    fn z5_is_integral() {
        let p = classify_semiring(&ModSemiring::new(5), 0, &mut rng()).unwrap();
        assert!(p.integral);
        // Still not a semifield here: 1+4 = 0, so not zerosumfree.
        assert!(!p.zerosumfree);
    }

    #[test]
    fn support_hom_on_nat() {
        let h = support_hom(&NatSemiring, 200, &mut rng()).unwrap();
        assert_eq!(h.apply(&BigUint::from(3u32)), Bit(true));
        assert_eq!(h.apply(&BigUint::zero()), Bit(false));
    }

    #[test]
    fn support_hom_on_two_is_identity() {
        let h = support_hom(&BoolSemiring, 0, &mut rng()).unwrap();
        assert_eq!(h.apply(&Bit(false)), Bit(false));
        assert_eq!(h.apply(&Bit(true)), Bit(true));
    }

    #[test]
    fn support_hom_rejects_z6_with_witness() {
        let err = support_hom(&ModSemiring::new(6), 0, &mut rng()).unwrap_err();
        match err {
            ScalarError::NotEligible { predicate, witness } => {
                assert_eq!(predicate, "integral");
                // Lexicographically least failing pair under the element order.
                assert_eq!(witness, "2*3=0");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn z6_integrality_witness_is_2_times_3() {
        // After excluding zerosumfreeness, the integral scan still has its
        // canonical witness; probe it directly.
        let ring = ModSemiring::new(6);
        let elems = ring.elements().unwrap();
        let mut witness = None;
        'outer: for a in &elems {
            for b in &elems {
                if ring.mul(a, b) == ring.zero() && *a != ring.zero() && *b != ring.zero() {
                    witness = Some((a.value, b.value));
                    break 'outer;
                }
            }
        }
        assert_eq!(witness, Some((2, 3)));
    }

    #[test]
    fn law_violation_reports_witness() {
        // A deliberately broken "semiring": mod arithmetic with a corrupted add.
        #[derive(Debug)]
        struct Broken;
        impl Semiring for Broken {
            type Elem = ZMod;
            fn name(&self) -> String {
                "broken".into()
            }
            fn zero(&self) -> ZMod {
                ZMod { value: 0, modulus: 4 }
            }
            fn one(&self) -> ZMod {
                ZMod { value: 1, modulus: 4 }
            }
            fn add(&self, a: &ZMod, b: &ZMod) -> ZMod {
                // Drops the carry, so 2+3 = 1 but 3+2 = 1 as well; breaks
                // distributivity instead of commutativity.
                ZMod { value: (a.value.max(b.value)) % 4, modulus: 4 }
            }
            fn mul(&self, a: &ZMod, b: &ZMod) -> ZMod {
                ZMod { value: (a.value * b.value) % 4, modulus: 4 }
            }
            fn elements(&self) -> Option<Vec<ZMod>> {
                Some((0..4).map(|value| ZMod { value, modulus: 4 }).collect())
            }
            fn invert(&self, _: &ZMod) -> Option<ZMod> {
                None
            }
            fn declared_profile(&self) -> SemiringProfile {
                SemiringProfile { nontrivial: true, zerosumfree: false, integral: false, semifield: false }
            }
            fn sample(&self, rng: &mut dyn RngCore) -> ZMod {
                ZMod { value: rng.next_u64() % 4, modulus: 4 }
            }
            fn parse_elem(&self, _: &str) -> Result<ZMod, ScalarError> {
                unimplemented!()
            }
        }
        let err = classify_semiring(&Broken, 0, &mut rng()).unwrap_err();
        assert!(matches!(err, ScalarError::LawViolation { .. }));
    }
}
