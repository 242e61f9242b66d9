//! Symbolic calculator for the sheaf categories over a weighted
//! projective line of genus one.
//!
//! The crate computes in the Grothendieck lattice of the line (Euler
//! form, rank, degree, slope), in the combinatorics of stable tubes, and
//! in the algebra of formal direct sums of indecomposable descriptors:
//! coherent tube objects and line bundles, Pruefer and adic limits, and
//! the generic object of each slope. Hom and Ext¹ between descriptors are
//! answered by a rule table with stable citation identifiers; every
//! verdict that is not `Unknown` carries at least one citation. A
//! brute-force referee (`oracle`) checks the tube formulas with exact
//! linear algebra over nilpotent representations of a cyclic quiver.
//!
//! The numeric core is generic over the integer scalar (`scalar::Scalar`);
//! the aliases below fix the defaults used by the rest of the crate.

pub mod geometry;
pub mod homext;
pub mod ktheory;
pub mod linalg;
pub mod oracle;
pub mod scalar;
pub mod sequences;
pub mod slope;
pub mod tube;

/// Default lattice coefficient type.
pub type Coeff = i64;
/// Wider scalar for the brute-force solver, where elimination
/// intermediates can outgrow the lattice range.
pub type OracleCoeff = i128;

pub type KClass = ktheory::KClass<Coeff>;
pub type EulerTable = ktheory::EulerTable<Coeff>;

pub use geometry::{make_geometry, Geometry, LElement, PointId};
pub use homext::{DimInfo, Engine, FormalObject, HomExtReport, IndecDescriptor};
pub use slope::Slope;
