//! Exact-arithmetic engine for reasoning about partial knowledge and its flow
//! through networks of communicating subjects.
//!
//! The crate is organized around a single primitive: a *source element*, a
//! finitely supported sub-probability assignment of exact rational weights to
//! labels. Everything else is built on top of it:
//!
//! * [`weights`] — labels, weights, source elements, orderings (weight-sorted
//!   enumerations of labels), and the prefix-sum / difference calculus on
//!   descending sequences.
//! * [`majorization`] — the majorization preorder on source elements, with
//!   three mutually verifiable characterizations: prefix-sum domination,
//!   doubly substochastic transport witnesses, and convex combinations of
//!   partial permutations (via dilation and Birkhoff decomposition).
//! * [`lattice`] — preference consistency for sets of source elements,
//!   consistency classes, the hat operator that imposes consistency, and the
//!   meet / join / fusion operations of the majorization lattice.
//! * [`resources`] — resources as finite maps from input labels to source
//!   elements, their sequential composition, request/policy shaping, and
//!   pointwise fusion, meet, and comparison.
//! * [`protocol`] — networks of subjects holding resources, request-policy
//!   protocol steps, scripted runs with per-subject accumulation, and the
//!   local / strong privacy checks.
//! * [`noninterference`] — shared deterministic machines with per-subject
//!   action alphabets and observations, brute-force and product-construction
//!   noninterference checks, and the three equivalent formulations for
//!   deterministic resources under castings.
//!
//! All arithmetic is exact (arbitrary-precision rationals); all container
//! types iterate in a deterministic order, so every operation is reproducible
//! byte for byte.

pub mod error;
pub mod lattice;
pub mod majorization;
pub mod noninterference;
pub mod protocol;
pub mod ratio;
pub mod resources;
pub mod weights;

pub use error::Error;
