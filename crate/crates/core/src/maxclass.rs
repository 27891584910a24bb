//! Analysis specific to p-groups of maximal class.
//!
//! Term numbering follows the usual convention: `G_i = gamma_i(G)` for `i >= 2`, while
//! `G_1 = C_G(G_2 / G_4)` is the fundamental maximal subgroup rather than `G` itself.
//! Terms `G_k` with `k >= n` are trivial.

use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pcgroup::{centralizer_mod, lower_central_series, Element, PcGroup, PcSequence, SeriesChain, Subgroup};

/// `C(p, k)` for `p <= 61`.
pub fn binomial(p: u64, k: u64) -> u64 {
    if k > p {
        return 0;
    }
    let k = k.min(p - k);
    (0..k).fold(1u64, |acc, i| acc * (p - i) / (i + 1))
}

#[derive(Clone, Debug, Serialize)]
pub struct MaxClassReport {
    pub passed: bool,
    pub order_exponent: usize,
    pub class: usize,
    pub series_order_exponents: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

/// Confirm nilpotency class `n - 1` with `|G : G_2| = p^2` and `|G_i : G_{i+1}| = p` after that.
pub fn validate_maximal_class(group: &PcGroup) -> MaxClassReport {
    let series = lower_central_series(group);
    check_series(group.n(), &series)
}

fn check_series(n: usize, series: &SeriesChain) -> MaxClassReport {
    let exps = series.order_exponents();
    let class = series.class();
    let mut reason = None;
    if n < 2 {
        reason = Some(format!("order p^{n} is too small"));
    } else if class != n - 1 {
        reason = Some(format!("class {class} differs from n - 1 = {}", n - 1));
    } else if exps.get(1) != Some(&(n - 2)) {
        reason = Some("|G : G_2| is not p^2".to_string());
    } else if exps.windows(2).skip(1).any(|w| w[0] != w[1] + 1) {
        reason = Some("a lower central factor below G_2 is not of order p".to_string());
    }
    MaxClassReport {
        passed: reason.is_none(),
        order_exponent: n,
        class,
        series_order_exponents: exps,
        reason,
    }
}

/// `G_1 = C_G(G_2 / G_4)`.
pub fn compute_g1(group: &PcGroup, series: &SeriesChain) -> Result<Subgroup> {
    if group.n() < 4 {
        return Err(Error::Precondition(format!("G_1 needs n >= 4, got n = {}", group.n())));
    }
    centralizer_mod(group, &series.term(2), &series.term(4))
}

/// The named objects attached to one group of maximal class.
pub struct MaxClassProfile {
    group: PcGroup,
    series: SeriesChain,
    g1: Subgroup,
    // standard[0] = s, standard[i] = s_i for 1 <= i <= n-1
    standard: Vec<Element>,
    standard_pcgs: PcSequence,
    // coordinates of each pc generator along (s, s_1, ..., s_{n-1})
    generator_coords: Vec<Vec<u32>>,
    l: usize,
    g1_abelian: bool,
    metabelian: bool,
}

impl MaxClassProfile {
    /// Validate, compute `G_1`, choose standard generators and the degree of commutativity.
    pub fn analyze(group: PcGroup) -> Result<Self> {
        let series = lower_central_series(&group);
        let report = check_series(group.n(), &series);
        if !report.passed {
            return Err(Error::NotMaximalClass(report.reason.unwrap_or_default()));
        }
        let g1 = compute_g1(&group, &series)?;
        if g1.order_exponent() + 1 != group.n() {
            return Err(Error::NotMaximalClass("G_1 is not a maximal subgroup".into()));
        }
        let (s, s1) = choose_standard(&group, &series, &g1)?;
        let n = group.n();
        let mut standard = vec![s.clone(), s1];
        for i in 1..n - 1 {
            let next = group.commutator(&standard[i], &s);
            standard.push(next);
        }
        let standard_pcgs = PcSequence::new(&group, standard.clone())
            .map_err(|e| Error::NotMaximalClass(format!("standard generators do not form a pc sequence: {e}")))?;
        // G_i = <s_i, G_{i+1}>: the tails of the standard sequence are the named terms
        for i in 1..n {
            let named = if i == 1 { g1.clone() } else { series.term(i) };
            if *standard_pcgs.term(i) != named {
                return Err(Error::NotMaximalClass(format!("G_{i} is not <s_{i}, G_{}>", i + 1)));
            }
        }
        let generator_coords = (0..n).map(|k| standard_pcgs.coords(&group, &group.generator(k))).collect();
        let g1_abelian = g1.is_abelian(&group);
        let g2 = series.term(2);
        let metabelian = g2.is_abelian(&group);
        let mut profile = MaxClassProfile {
            group,
            series,
            g1,
            standard,
            standard_pcgs,
            generator_coords,
            l: 0,
            g1_abelian,
            metabelian,
        };
        profile.l = profile.compute_degree_of_commutativity();
        Ok(profile)
    }

    pub fn group(&self) -> &PcGroup {
        &self.group
    }

    pub fn p(&self) -> u32 {
        self.group.p()
    }

    pub fn n(&self) -> usize {
        self.group.n()
    }

    pub fn series(&self) -> &SeriesChain {
        &self.series
    }

    pub fn g1(&self) -> &Subgroup {
        &self.g1
    }

    /// `G_i` with `G_1` the fundamental subgroup; `term(0)` is the whole group.
    pub fn term(&self, i: usize) -> Subgroup {
        match i {
            0 => Subgroup::whole(&self.group),
            1 => self.g1.clone(),
            _ if i >= self.n() => Subgroup::trivial(self.n()),
            _ => self.series.term(i),
        }
    }

    pub fn s(&self) -> &Element {
        &self.standard[0]
    }

    pub fn s1(&self) -> &Element {
        &self.standard[1]
    }

    /// `s_i` for `1 <= i`; identity for `i >= n`.
    pub fn s_i(&self, i: usize) -> Element {
        assert!(i >= 1);
        self.standard.get(i).cloned().unwrap_or_else(|| self.group.identity())
    }

    /// `(s, s_1, ..., s_{n-1})`.
    pub fn standard(&self) -> &[Element] {
        &self.standard
    }

    pub fn standard_pcgs(&self) -> &PcSequence {
        &self.standard_pcgs
    }

    /// Images of the pc generators under the homomorphism with `s -> x0`, `s_1 -> x1`, assuming
    /// one exists: `s_{i+1}` goes to the iterated commutator and each `a_k` to its standard word.
    pub fn images_from_standard(&self, x0: &Element, x1: &Element) -> Vec<Element> {
        let g = &self.group;
        let mut values = Vec::with_capacity(self.n());
        values.push(x0.clone());
        values.push(x1.clone());
        for i in 1..self.n() - 1 {
            let next = g.commutator(&values[i], x0);
            values.push(next);
        }
        self.generator_coords
            .iter()
            .map(|c| PcSequence::evaluate(g, &values, c))
            .collect()
    }

    /// Degree of commutativity.
    pub fn l(&self) -> usize {
        self.l
    }

    /// `r = n - l - 1`.
    pub fn r(&self) -> usize {
        self.n() - self.l - 1
    }

    /// `t = max(n - l - 1, ceil((n + 1) / 2))`.
    pub fn t(&self) -> usize {
        self.r().max((self.n() + 2) / 2)
    }

    /// `A = G_r`.
    pub fn a(&self) -> Subgroup {
        self.term(self.r())
    }

    /// `N = G_{l+2}`.
    pub fn big_n(&self) -> Subgroup {
        self.term(self.l + 2)
    }

    pub fn metabelian(&self) -> bool {
        self.metabelian
    }

    pub fn g1_abelian(&self) -> bool {
        self.g1_abelian
    }

    /// Largest `k` with `[G_i, G_j] <= G_k`, or `None` when the commutator is trivial.
    fn commutator_depth(&self, i: usize, j: usize) -> Option<usize> {
        let comm = self.term(i).commutator_with(&self.group, &self.term(j));
        if comm.is_trivial() {
            return None;
        }
        let mut k = 1;
        while self.term(k + 1).order_exponent() >= comm.order_exponent()
            && comm.is_subgroup_of(&self.group, &self.term(k + 1))
        {
            k += 1;
        }
        Some(k)
    }

    fn compute_degree_of_commutativity(&self) -> usize {
        let n = self.n();
        if self.g1_abelian {
            return n - 3;
        }
        let mut l = n - 3;
        for i in 1..n {
            for j in i..n {
                if let Some(k) = self.commutator_depth(i, j) {
                    l = l.min(k.saturating_sub(i + j));
                }
            }
        }
        l
    }

    /// Express `x` as `s^{e_0} s_1^{e_1} ... s_{n-1}^{e_{n-1}}`.
    pub fn standard_coords(&self, x: &Element) -> Vec<u32> {
        self.standard_pcgs.coords(&self.group, x)
    }

    pub fn report(&self) -> ProfileReport {
        ProfileReport {
            p: self.p(),
            n: self.n(),
            class: self.series.class(),
            l: self.l,
            r: self.r(),
            t: self.t(),
            metabelian: self.metabelian,
            g1_abelian: self.g1_abelian,
            s: self.s().exponents().to_vec(),
            s1: self.s1().exponents().to_vec(),
            series_order_exponents: self.series.order_exponents(),
            g1_order_exponent: self.g1.order_exponent(),
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ProfileReport {
    pub p: u32,
    pub n: usize,
    pub class: usize,
    pub l: usize,
    pub r: usize,
    pub t: usize,
    pub metabelian: bool,
    pub g1_abelian: bool,
    pub s: Vec<u32>,
    pub s1: Vec<u32>,
    pub series_order_exponents: Vec<usize>,
    pub g1_order_exponent: usize,
}

/// `s`: first candidate outside `G_1`; `s_1`: first candidate in `G_1 \ G_2`. Candidates are
/// the two pc generators at depths missing from `G_2`, then their products in lexicographic order.
fn choose_standard(group: &PcGroup, series: &SeriesChain, g1: &Subgroup) -> Result<(Element, Element)> {
    let g2 = series.term(2);
    let g2_depths = g2.depths();
    let free: Vec<usize> = (0..group.n()).filter(|d| !g2_depths.contains(d)).collect();
    let [d1, d2] = free[..] else {
        return Err(Error::NotMaximalClass("G / G_2 is not of rank 2".into()));
    };
    let a = group.generator(d1);
    let b = group.generator(d2);
    let mut candidates = vec![a.clone(), b.clone()];
    for x in 0..group.p() {
        for y in 0..group.p() {
            if x != 0 && y != 0 {
                candidates.push(group.multiply(&group.power_u64(&a, x as u64), &group.power_u64(&b, y as u64)));
            }
        }
    }
    let s = candidates
        .iter()
        .find(|c| !g1.contains(group, c))
        .cloned()
        .ok_or_else(|| Error::NotMaximalClass("no element outside G_1".into()))?;
    let s1 = candidates
        .iter()
        .find(|c| g1.contains(group, c) && !g2.contains(group, c))
        .cloned()
        .ok_or_else(|| Error::NotMaximalClass("no element in G_1 \\ G_2".into()))?;
    Ok((s, s1))
}

/// Degree of commutativity straight from the definition: the largest `l <= n - 3` with
/// `[G_i, G_j] <= G_{i+j+l}` for all `i, j >= 1`.
pub fn degree_of_commutativity(profile: &MaxClassProfile) -> usize {
    profile.l()
}

#[derive(Clone, Debug, Serialize)]
pub struct ExponentRelationReport {
    pub passed: bool,
    /// indices `i` (1-based) where `s_i^p s_{i+1}^{C(p,2)} ... s_{i+p-1} = 1` holds exactly
    pub exact_for: Vec<usize>,
    /// indices where it holds modulo `N`
    pub congruent_for: Vec<usize>,
    pub s_power_in_n: bool,
    pub s_s1_power_in_n: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

/// `s_i^p s_{i+1}^{C(p,2)} ... s_{i+p-1}^{C(p,p)}`.
pub fn expo_product(profile: &MaxClassProfile, i: usize) -> Element {
    let g = profile.group();
    let p = profile.p() as u64;
    let mut x = g.identity();
    for k in 1..=p {
        let si = profile.s_i(i + k as usize - 1);
        x = g.multiply(&x, &g.power_u64(&si, binomial(p, k)));
    }
    x
}

/// Check the exact relation for `i >= r` and the congruence modulo `N` for every `i >= 1`.
pub fn verify_exponent_relations(profile: &MaxClassProfile) -> Result<ExponentRelationReport> {
    let n = profile.n();
    let p = profile.p() as usize;
    if n <= p + 1 {
        return Err(Error::Precondition(format!("needs n > p + 1, got n = {n}, p = {p}")));
    }
    let g = profile.group();
    let nn = profile.big_n();
    let mut exact_for = Vec::new();
    let mut congruent_for = Vec::new();
    let mut first_failure = None;
    for i in 1..n {
        let x = expo_product(profile, i);
        if x.is_identity() {
            exact_for.push(i);
        } else if i >= profile.r() && first_failure.is_none() {
            first_failure = Some(format!("exact relation fails at i = {i}: {x}"));
        }
        if nn.contains(g, &x) {
            congruent_for.push(i);
        } else if first_failure.is_none() {
            first_failure = Some(format!("congruence mod N fails at i = {i}"));
        }
    }
    let s_power_in_n = nn.contains(g, &g.power_u64(profile.s(), p as u64));
    let ss1 = g.multiply(profile.s(), profile.s1());
    let s_s1_power_in_n = nn.contains(g, &g.power_u64(&ss1, p as u64));
    if first_failure.is_none() && !(s_power_in_n && s_s1_power_in_n) {
        first_failure = Some("s^p or (s s_1)^p not in N".into());
    }
    Ok(ExponentRelationReport {
        passed: first_failure.is_none(),
        exact_for,
        congruent_for,
        s_power_in_n,
        s_s1_power_in_n,
        first_failure,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjugacyReport {
    pub passed: bool,
    pub power_in_centre: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbit_size_exponent: Option<usize>,
    pub orbit_is_coset: bool,
    pub centralized_by_g_and_centre: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub centralizer_order_exponent: Option<usize>,
}

/// For `g` outside `G_1`: `g^p` lies in `G_{n-1}`, the class of `g` is `g G_2`, and
/// `<g, G_{n-1}>` centralizes `g`.
pub fn conjugacy_facts(profile: &MaxClassProfile, g: &Element) -> Result<ConjugacyReport> {
    let n = profile.n();
    let p = profile.p();
    if n <= p as usize + 1 {
        return Err(Error::Precondition(format!("needs n > p + 1, got n = {n}, p = {p}")));
    }
    let group = profile.group();
    if profile.g1().contains(group, g) {
        return Err(Error::Precondition("element lies in G_1".into()));
    }
    let centre = profile.term(n - 1);
    let power_in_centre = centre.contains(group, &group.power_u64(g, p as u64));

    let g2 = profile.term(2);
    let g_inv = group.invert(g);
    let conjugators = [profile.s().clone(), profile.s1().clone()];
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(g.clone());
    queue.push_back(g.clone());
    let mut orbit_is_coset = true;
    let cap = 1usize << 24;
    while let Some(x) = queue.pop_front() {
        if !g2.contains(group, &group.multiply(&g_inv, &x)) {
            orbit_is_coset = false;
            break;
        }
        for c in &conjugators {
            let y = group.conjugate(&x, c);
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
        if seen.len() > cap {
            return Err(Error::Caps("conjugacy orbit exceeds enumeration cap".into()));
        }
    }
    let orbit = seen.len();
    let expected = (p as usize).pow(g2.order_exponent() as u32);
    orbit_is_coset &= orbit == expected;
    let orbit_exp = (orbit as f64).log(p as f64).round() as usize;
    let orbit_size_exponent = ((p as usize).pow(orbit_exp as u32) == orbit).then_some(orbit_exp);

    let centralized_by_g_and_centre = centre.basis().all(|z| group.commutator(g, z).is_identity());
    let centralizer_order_exponent = orbit_size_exponent.map(|e| n - e);
    Ok(ConjugacyReport {
        passed: power_in_centre && orbit_is_coset && centralized_by_g_and_centre,
        power_in_centre,
        orbit_size_exponent,
        orbit_is_coset,
        centralized_by_g_and_centre,
        centralizer_order_exponent,
    })
}
