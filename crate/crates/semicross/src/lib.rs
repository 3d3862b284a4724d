//! Exact computation with finite inverse semigroups.
//!
//! The crate provides:
//!
//! - [`isn`]: elements of the inverse symmetric semigroup IS_n (partial
//!   injective self-maps of {1,…,n}), cycle/chain notation and
//!   decomposition, enumeration;
//! - [`semigroup`]: a uniform finite-inverse-semigroup value over which the
//!   higher layers run unchanged (IS_n, partial wreath products, ingested
//!   Cayley tables), plus subsemigroup closure and isomorphism testing;
//! - [`wreath`]: the partial wreath product S ≀ IS(M) — pairs (f, a) with
//!   dom(f) = dom(a) and product (f,a)·(g,b) = (f·g^a, ab) — and its
//!   iterated powers, which model partial automorphisms of regular rooted
//!   trees;
//! - [`green`]: Green's R and L relations, both the generic ideal-based
//!   definitions and the fast structural characterizations;
//! - [`cross_section`]: construction and verification of R- and
//!   L-cross-sections (one member per Green class, closed under products);
//! - [`search`]: exhaustive cross-section enumeration by pruned
//!   backtracking, ordered-partition generation, and count reports;
//! - [`counting`]: exact big-integer/rational evaluation of the counting
//!   formulas.

pub mod counting;
pub mod cross_section;
pub mod green;
pub mod isn;
pub mod notation;
pub mod rng;
pub mod search;
pub mod semigroup;
pub mod wreath;

pub use cross_section::{CrossSection, CrossSectionViolation, OrderedPartition};
pub use green::GreenRelation;
pub use isn::{ChainDecomposition, PartialBijection, Point};
pub use semigroup::{ElementId, FiniteInverseSemigroup, Multiplication, PlainSemigroup};
pub use wreath::{PartialMapToS, WreathContext, WreathElement};
