use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::map::GroupMap;
use crate::derivations::DerivationSpace;
use crate::error::{Error, Result};
use crate::maxclass::{conjugacy_facts, MaxClassProfile};
use crate::pcgroup::{Element, PcGroup, Subgroup};

/// Largest `|A|` for which `H` is materialized.
pub const MAX_FAMILY: u64 = 100_000;
/// Composition closure of `H` is checked on all pairs up to this many members.
pub const EXHAUSTIVE_CLOSURE_MEMBERS: usize = 125;
pub const CLOSURE_SAMPLES: usize = 1_000;

/// `phi_{u,v} : s -> s u, s_1 -> s_1 v` for `u, v` in the space's target.
pub fn phi(space: &DerivationSpace<'_>, u: &Element, v: &Element) -> Result<GroupMap> {
    Ok(space.make(u, v)?.one_plus().clone())
}

/// `(s^{-1} (s alpha), s_1^{-1} (s_1 alpha))`.
pub fn phi_parameters(profile: &MaxClassProfile, alpha: &GroupMap) -> (Element, Element) {
    let g = profile.group();
    let u = g.multiply(&g.invert(profile.s()), &alpha.apply(g, profile.s()));
    let v = g.multiply(&g.invert(profile.s1()), &alpha.apply(g, profile.s1()));
    (u, v)
}

/// A set of validated automorphisms indexed by parameters.
pub struct AutFamily {
    pub description: String,
    pub order_exponent: usize,
    pub parameters: Vec<(Element, Element)>,
    pub members: Vec<GroupMap>,
}

impl AutFamily {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosureReport {
    pub passed: bool,
    pub exhaustive: bool,
    pub pairs_checked: u64,
    pub members: usize,
    pub order_exponent: usize,
    pub identity_member: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

/// All elements of `sub` in coordinate order.
pub(crate) fn subgroup_element(g: &PcGroup, sub: &Subgroup, mut index: u64) -> Element {
    let p = g.p() as u64;
    let coords: Vec<u32> = (0..sub.order_exponent())
        .map(|_| {
            let c = (index % p) as u32;
            index /= p;
            c
        })
        .collect();
    sub.element_from_coords(g, &coords)
}

pub(crate) fn random_element(g: &PcGroup, sub: &Subgroup, rng: &mut impl Rng) -> Element {
    let coords: Vec<u32> = (0..sub.order_exponent()).map(|_| rng.gen_range(0..g.p())).collect();
    sub.element_from_coords(g, &coords)
}

/// `H = { phi_{1,v} : v in A }` together with a check that it is closed under composition.
pub fn build_h(profile: &MaxClassProfile, seed: u64) -> Result<(AutFamily, ClosureReport)> {
    let g = profile.group();
    let a = profile.a();
    let size = (g.p() as u64).pow(a.order_exponent() as u32);
    if size > MAX_FAMILY {
        return Err(Error::Caps(format!("|A| = {size} exceeds {MAX_FAMILY}")));
    }
    let space = DerivationSpace::new(profile, a.clone())?.in_theorem_context();
    let id = g.identity();
    let built: Vec<Result<(Element, GroupMap)>> = (0..size)
        .into_par_iter()
        .map(|k| {
            let v = subgroup_element(g, &a, k);
            Ok((v.clone(), phi(&space, &id, &v)?))
        })
        .collect();
    let mut parameters = Vec::with_capacity(size as usize);
    let mut members = Vec::with_capacity(size as usize);
    for r in built {
        let (v, m) = r?;
        parameters.push((id.clone(), v));
        members.push(m);
    }
    let index: HashMap<&Element, usize> = parameters.iter().enumerate().map(|(k, (_, v))| (v, k)).collect();
    let check = |x: usize, y: usize| -> Option<String> {
        let c = members[x].then(g, &members[y]);
        let (u, v) = phi_parameters(profile, &c);
        if !u.is_identity() {
            return Some(format!("composite of members {x} and {y} moves s"));
        }
        match index.get(&v) {
            Some(&k) if members[k] == c => None,
            _ => Some(format!("composite of members {x} and {y} is not phi_(1, {v})")),
        }
    };
    let n = members.len();
    let exhaustive = n <= EXHAUSTIVE_CLOSURE_MEMBERS;
    let pairs: Vec<(usize, usize)> = if exhaustive {
        (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..CLOSURE_SAMPLES).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect()
    };
    let first_failure = pairs.par_iter().find_map_first(|&(x, y)| check(x, y));
    let identity_member = members[0].is_identity(g);
    let order_exponent = a.order_exponent();
    let report = ClosureReport {
        passed: first_failure.is_none() && identity_member && order_exponent == profile.n() - profile.r(),
        exhaustive,
        pairs_checked: pairs.len() as u64,
        members: n,
        order_exponent,
        identity_member,
        first_failure,
    };
    let family = AutFamily {
        description: "phi_(1, v) for v in A".into(),
        order_exponent,
        parameters,
        members,
    };
    Ok((family, report))
}

#[derive(Clone, Debug, Serialize)]
pub struct HcapInnReport {
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub centralizer_of_s_order_exponent: Option<usize>,
    pub candidates: usize,
    pub nontrivial_values: usize,
    pub values_in_g2_minus_g3: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

/// `H` meets `Inn(G)` trivially when `r > 2`. An inner automorphism in `H` fixes `s`, so it is
/// conjugation by some `g` in `C_G(s) = <s, G_{n-1}>`, and then `[s_1, g]` must lie in `A`.
pub fn h_cap_inn_check(profile: &MaxClassProfile) -> Result<HcapInnReport> {
    if profile.r() <= 2 {
        return Err(Error::Precondition(
            "r = 2: the metabelian case is handled by the all-pairs theorem for G_2, not by H".into(),
        ));
    }
    let g = profile.group();
    let n = profile.n();
    let p = g.p();
    let facts = conjugacy_facts(profile, profile.s())?;
    let centre = profile.term(n - 1);
    let cs = centre.extended(g, &[profile.s().clone()], false);
    let centralizer_is_known = facts.orbit_is_coset
        && facts.centralized_by_g_and_centre
        && cs.order_exponent() == 2
        && facts.centralizer_order_exponent == Some(2);
    let a = profile.a();
    let g2 = profile.term(2);
    let g3 = profile.term(3);
    let mut nontrivial = 0;
    let mut in_g2_minus_g3 = true;
    let mut first_failure = (!centralizer_is_known).then(|| "C_G(s) is not <s, G_{n-1}>".to_string());
    let candidates = cs.elements(g);
    for c in &candidates {
        let v = g.commutator(profile.s1(), c);
        if v.is_identity() {
            continue;
        }
        nontrivial += 1;
        in_g2_minus_g3 &= g2.contains(g, &v) && !g3.contains(g, &v);
        if a.contains(g, &v) && first_failure.is_none() {
            first_failure = Some(format!("conjugation by {c} lies in H"));
        }
    }
    debug_assert_eq!(candidates.len(), (p * p) as usize);
    Ok(HcapInnReport {
        passed: first_failure.is_none(),
        centralizer_of_s_order_exponent: facts.centralizer_order_exponent,
        candidates: candidates.len(),
        nontrivial_values: nontrivial,
        values_in_g2_minus_g3: in_g2_minus_g3,
        first_failure,
    })
}
