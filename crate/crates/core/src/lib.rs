//! Finite valued Abelian groups: exact values, completion of cost functions,
//! one-point extensions, amalgamation, free valued groups and Fraïssé chains.

#![allow(clippy::needless_range_loop)]

pub mod amalgam;
pub mod cli;
pub mod error;
pub mod extension;
pub mod fraisse;
pub mod free;
pub mod gen;
pub mod group;
pub mod json;
pub mod modulus;
pub mod pv;
pub mod rational;
pub mod snf;
pub mod suites;
pub mod values;

pub use error::{AxiomViolation, Error, Result};
pub use extension::{KatetovMap, OneGenExtension};
pub use group::{FiniteAbelianGroup, GroupElement, GroupHom, Subgroup, SubgroupHom};
pub use modulus::{Modulus, PiecewiseLinear};
pub use rational::{Extended, Rational};
pub use values::{Cap, CostFunction, Semivalue, ValuedGroup};
