//! Exact divided-power de Rham calculus on finite simplicial sets.

pub mod bar;
pub mod dp;
pub mod error;
pub mod form;
pub mod integrate;
pub mod ordinal;
pub mod random;
pub mod sform;
pub mod sset;
pub mod verify;

pub use dp::{CoeffImage, CoeffTarget, DividedPowerPoly, DividedRationalPoly, RationalPoly};
pub use error::{Error, Result};
pub use ordinal::{ChainSections, MaximalChain, OrdinalMap, Step};
pub use form::{ChainSplit, RationalForm, SimplexForm};
pub use integrate::{BoundSymbol, IntegralSpec, IntegralStep, PrismForm};
pub use sset::{FiniteSimplicialSet, Simplex, SimplicialMap};
pub use sform::{PathSimplex, SimplicialForm};
