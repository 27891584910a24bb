use super::collect::PcGroup;
use super::presentation::Element;
use super::subgroup::{linear_kernel, Section, Subgroup};
use crate::error::{Error, Result};

/// A descending chain of normal subgroups; `term(1)` is the whole group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesChain {
    terms: Vec<Subgroup>,
}

impl SeriesChain {
    /// Term `i` (1-based). Indices past the end give the trivial subgroup.
    pub fn term(&self, i: usize) -> Subgroup {
        assert!(i >= 1, "series terms are 1-based");
        self.terms
            .get(i - 1)
            .cloned()
            .unwrap_or_else(|| Subgroup::trivial(self.terms[0].ambient_n()))
    }

    /// Number of stored terms, the final trivial term included.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[Subgroup] {
        &self.terms
    }

    pub fn order_exponents(&self) -> Vec<usize> {
        self.terms.iter().map(Subgroup::order_exponent).collect()
    }

    /// Nilpotency class: number of nontrivial terms.
    pub fn class(&self) -> usize {
        self.terms.iter().filter(|t| !t.is_trivial()).count()
    }
}

/// `gamma_1 = G`, `gamma_{i+1} = [gamma_i, G]`, ending with the trivial subgroup.
pub fn lower_central_series(group: &PcGroup) -> SeriesChain {
    let gens = group.generators();
    let mut terms = vec![Subgroup::whole(group)];
    loop {
        let last = terms.last().expect("nonempty");
        if last.is_trivial() {
            break;
        }
        let comms: Vec<Element> = last
            .basis()
            .flat_map(|x| gens.iter().map(move |y| (x, y)))
            .map(|(x, y)| group.commutator(x, y))
            .collect();
        let next = Subgroup::generated(group, &comms, true);
        debug_assert!(next.order_exponent() < last.order_exponent());
        terms.push(next);
    }
    SeriesChain { terms }
}

/// `{g : [h, g] in K for every h in H}` for normal subgroups `K <= H`.
///
/// Works down the series `H = H_0 > H_1 > ... > K` with `H_{j+1} = H_j^p [H_j, G] K`. On
/// `C_G(H / H_j)` the map `g -> ([h, g] H_{j+1})_h` is a homomorphism into an elementary
/// abelian group, and its kernel is `C_G(H / H_{j+1})`.
pub fn centralizer_mod(group: &PcGroup, h: &Subgroup, k: &Subgroup) -> Result<Subgroup> {
    if !k.is_subgroup_of(group, h) {
        return Err(Error::Precondition("centralizer_mod: K is not contained in H".into()));
    }
    if !k.is_normal(group) {
        return Err(Error::Precondition("centralizer_mod: K is not normal".into()));
    }
    if !h.is_normal(group) {
        return Err(Error::Precondition("centralizer_mod: H is not normal".into()));
    }
    let h_gens: Vec<Element> = h.basis().cloned().collect();
    let mut cent = Subgroup::whole(group);
    let mut upper = h.clone();
    while upper != *k {
        let lower = upper.next_central_layer(group).extended(group, &k.basis().cloned().collect::<Vec<_>>(), true);
        let section = Section::new(group, &upper, &lower)?;
        let dim = section.dim();
        cent = linear_kernel(group, &cent, dim * h_gens.len(), |g| {
            h_gens
                .iter()
                .flat_map(|x| section.coords(group, &group.commutator(x, g)))
                .collect()
        });
        upper = lower;
    }
    Ok(cent)
}

/// Presentation of `G / <a_{k+1}, ..., a_n>`.
pub fn quotient_by_term(group: &PcGroup, k: usize) -> Result<PcGroup> {
    let pres = group.presentation().truncate(k)?;
    PcGroup::new(pres)
}

/// Presentation of `G / N` where `N` must be exactly `<a_{k+1}, ..., a_n>` for some `k`.
pub fn quotient_by_subgroup(group: &PcGroup, normal: &Subgroup) -> Result<PcGroup> {
    let k = group.n() - normal.order_exponent();
    if *normal != Subgroup::tail_span(group, k) {
        return Err(Error::Precondition(
            "subgroup is not spanned by a trailing segment of the pc generators".into(),
        ));
    }
    quotient_by_term(group, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pcgroup::presentation::PcPresentation;

    fn heisenberg() -> PcGroup {
        let mut p = PcPresentation::new(3, 3).unwrap();
        p.set_commutator_tail(1, 0, Element::from_exponents(vec![0, 0, 1])).unwrap();
        PcGroup::new(p).unwrap()
    }

    #[test]
    fn abelian_series_has_two_terms() {
        let g = PcGroup::new(PcPresentation::new(5, 3).unwrap()).unwrap();
        let s = lower_central_series(&g);
        assert_eq!(s.order_exponents(), vec![3, 0]);
        assert_eq!(s.class(), 1);
    }

    #[test]
    fn heisenberg_series_and_centre() {
        let g = heisenberg();
        let s = lower_central_series(&g);
        assert_eq!(s.order_exponents(), vec![3, 1, 0]);
        let z = centralizer_mod(&g, &Subgroup::whole(&g), &Subgroup::trivial(3)).unwrap();
        assert_eq!(z, Subgroup::tail_span(&g, 2));
        assert!(s.term(7).is_trivial());
    }

    #[test]
    fn centralizer_of_abelian_group_is_everything() {
        let g = PcGroup::new(PcPresentation::new(3, 2).unwrap()).unwrap();
        let c = centralizer_mod(&g, &Subgroup::whole(&g), &Subgroup::trivial(2)).unwrap();
        assert_eq!(c, Subgroup::whole(&g));
    }

    #[test]
    fn centralizer_rejects_bad_arguments() {
        let g = heisenberg();
        let centre = Subgroup::tail_span(&g, 2);
        let non_normal = Subgroup::generated(&g, &[g.generator(1)], false);
        assert!(centralizer_mod(&g, &centre, &Subgroup::whole(&g)).is_err());
        assert!(centralizer_mod(&g, &Subgroup::whole(&g), &non_normal).is_err());
    }

    #[test]
    fn quotient_by_all_generators_is_identity_operation() {
        let g = heisenberg();
        let q = quotient_by_term(&g, 3).unwrap();
        assert_eq!(q.presentation(), g.presentation());
        let q2 = quotient_by_term(&g, 2).unwrap();
        assert!(q2.presentation().is_abelian_presentation());
        assert!(quotient_by_subgroup(&g, &Subgroup::generated(&g, &[g.generator(1)], false)).is_err());
    }
}
