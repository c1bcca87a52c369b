//! Exact computations for intersecting sets in finite permutation groups.
//!
//! The crate enumerates small permutation groups (with special support for the
//! affine groups `AGL(n,2)`), builds their derangement graphs and derangement
//! matrices, and checks the character-theoretic and spectral facts that decide
//! whether every maximum intersecting set is a coset of a point stabilizer.
//!
//! Every hot loop goes through [`Exec`], which runs on rayon when the
//! `parallel` feature is enabled and falls back to plain iteration otherwise.

pub mod action;
pub mod affine;
pub mod character;
pub mod dgraph;
pub mod dmatrix;
mod error;
pub mod exec;
pub mod gf2;
pub mod group;
pub mod orbit_tables;
pub mod perm;
pub mod rational;
pub mod suite;

pub use error::{Error, Result};
pub use exec::Exec;
pub use group::{CosetDescriptor, CosetSet, ElemId, GroupTable};
pub use perm::Permutation;
