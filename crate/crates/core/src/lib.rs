//! Exact arithmetic for finite p-groups given by power-commutator presentations, with tools for
//! p-groups of maximal class: standard generators, degree of commutativity, derivations and the
//! automorphisms `1 + delta` they induce.

pub mod autom;
pub mod blackburn;
pub mod derivations;
pub mod error;
pub mod maxclass;
pub mod pcgroup;
pub mod search;
pub mod selftest;

pub use error::{Error, Result};
pub use maxclass::MaxClassProfile;
pub use pcgroup::{Element, PcGroup, PcPresentation, Subgroup, Word};
