//! Exact cohomology of Lie algebras built from weighted oriented tree diagrams.
//!
//! A diagram is a tree whose edges point from lower to higher node number and
//! carry positive integer weights.  Each diagram generates a nilpotent Lie
//! algebra of polynomial differential operators ([`liealg`]), whose cochain
//! complex is graded by lattice weights ([`complex`]).  Betti numbers are
//! computed blockwise with exact integer linear algebra and cross-checked two
//! ways.  For the branched-path family there are closed-form harmonic bases
//! and generating functions ([`closedform`]), and [`verify`] packages identity
//! checks (Euler products, determinant identities, rank bounds) as reports.

pub mod closedform;
pub mod complex;
pub mod diagram;
pub mod liealg;
pub mod verify;

pub use closedform::{BasicElement, IntPoly, Tableau, TotalOrder};
pub use complex::{BettiMethod, BettiTable, ChainVector, ExteriorComplex, ExteriorMonomial};
pub use verify::{CheckReport, LaurentPoly, VerifyError};
pub use diagram::{BuiltinFamily, TreeDiagram};
pub use liealg::{Flavor, LieAlgebraModel, MonomialOperator, WeightVector};
