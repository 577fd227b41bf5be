//! Exact-rational workbench for convex algebras, effect algebras and the
//! dualities between them.
//!
//! Everything here computes over arbitrary-precision rationals; no check in
//! this crate ever compares floating-point numbers. The crate is organised
//! around a handful of finitely presentable structure families:
//!
//! * [`scalars`] — semirings and the rational scalar type,
//! * [`formal`] — finite-support formal sums, the multiset and distribution
//!   monads, and their law checkers,
//! * [`convex`] — convex algebras (meet semilattices, free simplices and
//!   rational polytopes) with the ternary mixing operation,
//! * [`semimod`] — semimodules and the free-semimodule adjunction,
//! * [`faces`] — subalgebras, prime filters and extreme points,
//! * [`preframes`] — finite preframes, Scott-open filters and the duality
//!   with convex algebras over the Boolean dualizing object,
//! * [`effect`] — effect algebras as partial commutative monoid tables,
//! * [`states`] — state spaces as exact rational polytopes and the duality
//!   with convex algebras over the unit interval,
//! * [`hilbert`] — rational inner-product spaces and their subspace
//!   orthomodular lattices,
//! * [`structio`] — structure-file parsing and the command-line driver.

pub mod convex;
pub mod effect;
pub mod faces;
pub mod formal;
pub mod hilbert;
pub mod linalg;
pub mod preframes;
pub mod report;
pub mod sampling;
pub mod scalars;
pub mod semimod;
pub mod states;
pub mod structio;

pub use scalars::Rational;
