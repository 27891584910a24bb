//! Finite p-groups given by weighted power-commutator presentations.

mod collect;
mod consistency;
mod pcgs;
mod presentation;
mod series;
mod subgroup;

pub use collect::PcGroup;
pub use consistency::{consistency_check, ConsistencyReport, Overlap, OverlapFailure};
pub use pcgs::PcSequence;
pub use presentation::{Element, PcPresentation, Word, MAX_GENERATORS, MAX_PRIME};
pub use series::{centralizer_mod, lower_central_series, quotient_by_subgroup, quotient_by_term, SeriesChain};
pub use subgroup::{Section, Subgroup};

pub(crate) use presentation::is_prime;
pub(crate) use subgroup::linear_kernel;
