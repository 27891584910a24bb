//! Group maps given by generator images, the `phi_{u,v}` families, and the theorem drivers.

mod drivers;
mod family;
mod map;
mod report;

pub use drivers::{verify_thm_main1, verify_thm_main2, verify_thm_metabelian};
pub use family::{build_h, h_cap_inn_check, phi, phi_parameters, AutFamily, ClosureReport, HcapInnReport, MAX_FAMILY};
pub use map::{check_homomorphism, check_homomorphism_between, inner_automorphism, GroupMap, MapKind};
pub(crate) use family::random_element;
pub use report::{Budgets, CheckResult, VerificationReport};
