//! Randomized search for nonmetabelian groups of maximal class near `G'(p, n)`.
//!
//! Candidates keep the shape of the `G'` presentation and multiply selected tails by powers of
//! the last generator `z = s_{n-1}'`: commutators `[s_j', s_i']` with `i + j <= n - 1`, and the
//! power relations of `s'` and `s_i'`. A candidate is accepted when it is consistent, of maximal
//! class, and `G_2` is nonabelian.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::blackburn::build_blackburn_presentation;
use crate::error::Result;
use crate::maxclass::MaxClassProfile;
use crate::pcgroup::{consistency_check, PcGroup, PcPresentation};

pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// The group found by `tail_perturbation_search(5, 8, DEFAULT_BUDGET, 1)`, as a group file.
pub const NONMETABELIAN_5_8: &str = include_str!("../fixtures/nonmetabelian_5_8.grp");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Site {
    /// `[s_j', s_i']` with `1 <= i < j`
    Commutator { j: usize, i: usize },
    /// `s_i'^p`, where `i = 0` is `s'`
    Power { i: usize },
}

/// Tails that may be multiplied by a power of `z` without breaking the weight conditions.
pub fn perturbation_sites(n: usize) -> Vec<Site> {
    let mut sites: Vec<Site> = (0..n - 1).map(|i| Site::Power { i }).collect();
    for j in 2..n - 1 {
        for i in 1..j {
            if i + j < n {
                sites.push(Site::Commutator { j, i });
            }
        }
    }
    sites
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchOutcome {
    pub p: u32,
    pub n: usize,
    pub seed: u64,
    pub budget: u64,
    pub candidates: u64,
    pub consistent: u64,
    /// `(site, exponent of z)` for the accepted candidate
    pub perturbation: Vec<(Site, u32)>,
    #[serde(skip)]
    pub found: Option<PcPresentation>,
}

/// Apply `z^c` perturbations to the `G'(p, n)` presentation.
pub fn perturbed_presentation(p: u32, n: usize, perturbation: &[(Site, u32)]) -> Result<PcPresentation> {
    let mut pres = build_blackburn_presentation(p, n)?;
    for &(site, c) in perturbation {
        let bump = |tail: &crate::Element| {
            let mut e = tail.exponents().to_vec();
            e[n - 1] = (e[n - 1] + c) % p;
            crate::Element::from_exponents(e)
        };
        match site {
            Site::Power { i } => {
                let t = bump(pres.power_tail(i));
                pres.set_power_tail(i, t)?;
            }
            Site::Commutator { j, i } => {
                let t = bump(pres.commutator_tail(j, i));
                pres.set_commutator_tail(j, i, t)?;
            }
        }
    }
    Ok(pres)
}

/// Draw up to `budget` candidates; each site is perturbed with probability one half.
pub fn tail_perturbation_search(p: u32, n: usize, budget: u64, seed: u64) -> Result<SearchOutcome> {
    let sites = perturbation_sites(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut outcome = SearchOutcome {
        p,
        n,
        seed,
        budget,
        candidates: 0,
        consistent: 0,
        perturbation: Vec::new(),
        found: None,
    };
    while outcome.candidates < budget {
        outcome.candidates += 1;
        let perturbation: Vec<(Site, u32)> = sites
            .iter()
            .filter_map(|&s| rng.gen_bool(0.5).then(|| (s, rng.gen_range(1..p))))
            .collect();
        let pres = perturbed_presentation(p, n, &perturbation)?;
        if !consistency_check(&pres).passed {
            continue;
        }
        outcome.consistent += 1;
        let Ok(group) = PcGroup::new(pres.clone()) else { continue };
        match MaxClassProfile::analyze(group) {
            Ok(prof) if !prof.metabelian() => {
                outcome.perturbation = perturbation;
                outcome.found = Some(pres);
                break;
            }
            _ => continue,
        }
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sites_for_n_8() {
        let sites = perturbation_sites(8);
        assert_eq!(sites.iter().filter(|s| matches!(s, Site::Power { .. })).count(), 7);
        assert!(sites.contains(&Site::Commutator { j: 3, i: 2 }));
        assert!(!sites.contains(&Site::Commutator { j: 6, i: 2 }));
        assert!(!sites.contains(&Site::Commutator { j: 5, i: 3 }));
    }

    #[test]
    fn frozen_fixture_matches_search() {
        let out = tail_perturbation_search(5, 8, DEFAULT_BUDGET, 1).unwrap();
        let frozen = PcPresentation::from_file_str(NONMETABELIAN_5_8).unwrap();
        assert_eq!(out.found.as_ref(), Some(&frozen));
        assert_eq!(perturbed_presentation(5, 8, &out.perturbation).unwrap(), frozen);
    }

    #[test]
    fn empty_perturbation_is_g_prime() {
        let pres = perturbed_presentation(5, 7, &[]).unwrap();
        assert_eq!(pres, build_blackburn_presentation(5, 7).unwrap());
    }
}
