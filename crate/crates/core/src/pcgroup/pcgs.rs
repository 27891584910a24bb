use super::collect::PcGroup;
use super::presentation::{Element, PcPresentation};
use super::subgroup::{Section, Subgroup};
use crate::error::{Error, Result};

/// Coordinates with respect to a pc sequence `g_1, ..., g_n` of a group: every element is
/// uniquely `g_1^{e_1} ... g_n^{e_n}`.
pub struct PcSequence {
    elements: Vec<Element>,
    // terms[i] = <g_{i+1}, ..., g_n>, terms[n] trivial
    terms: Vec<Subgroup>,
    sections: Vec<Section>,
    lead: Vec<u32>,
}

impl PcSequence {
    /// Requires `|P_i : P_{i+1}| = p` with `P_i = <g_i, ..., g_n>` a descending chain
    /// in which each term is normal in the previous one.
    pub fn new(group: &PcGroup, elements: Vec<Element>) -> Result<Self> {
        let n = group.n();
        if elements.len() != n {
            return Err(Error::Precondition(format!("pc sequence needs {n} elements")));
        }
        let mut terms = vec![Subgroup::trivial(n)];
        for (k, g) in elements.iter().enumerate().rev() {
            let prev = terms.last().expect("nonempty");
            let next = prev.extended(group, std::slice::from_ref(g), false);
            if next.order_exponent() != prev.order_exponent() + 1 {
                return Err(Error::Precondition(format!(
                    "element {} does not extend the tail of the sequence by index p",
                    k + 1
                )));
            }
            if prev.basis().any(|b| !prev.contains(group, &group.conjugate(b, g))) {
                return Err(Error::Precondition(format!("tail after element {} is not normalized", k + 1)));
            }
            terms.push(next);
        }
        terms.reverse();
        let mut sections = Vec::with_capacity(n);
        let mut lead = Vec::with_capacity(n);
        for k in 0..n {
            let section = Section::new(group, &terms[k], &terms[k + 1])?;
            let c = section.coords(group, &elements[k])[0];
            debug_assert_ne!(c, 0);
            lead.push(c);
            sections.push(section);
        }
        Ok(PcSequence { elements, terms, sections, lead })
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    /// `<g_{k+1}, ..., g_n>` for 0-based `k`.
    pub fn term(&self, k: usize) -> &Subgroup {
        &self.terms[k]
    }

    /// Exponents of `x` along the sequence.
    pub fn coords(&self, group: &PcGroup, x: &Element) -> Vec<u32> {
        let p = group.p();
        let mut x = x.clone();
        let mut out = Vec::with_capacity(self.elements.len());
        for (k, g) in self.elements.iter().enumerate() {
            let c = self.sections[k].coords(group, &x)[0];
            let e = (c as u64 * super::subgroup::inv_mod(self.lead[k], p) as u64 % p as u64) as u32;
            out.push(e);
            if e != 0 {
                let inv = group.power(g, -(e as i64));
                x = group.multiply(&inv, &x);
            }
        }
        debug_assert!(x.is_identity());
        out
    }

    /// `g_1^{e_1} ... g_n^{e_n}` evaluated with substituted values for the `g_i`.
    pub fn evaluate(group: &PcGroup, values: &[Element], coords: &[u32]) -> Element {
        let mut x = group.identity();
        for (v, &e) in values.iter().zip(coords) {
            if e != 0 {
                x = group.multiply(&x, &group.power_u64(v, e as u64));
            }
        }
        x
    }

    /// The pc presentation of the group with respect to this sequence.
    pub fn presentation(&self, group: &PcGroup) -> Result<PcPresentation> {
        let n = group.n();
        let p = group.p();
        let mut pres = PcPresentation::new(p, n)?;
        for (i, g) in self.elements.iter().enumerate() {
            let tail = self.coords(group, &group.power_u64(g, p as u64));
            pres.set_power_tail(i, Element::from_exponents(tail))?;
            for j in i + 1..n {
                let c = group.commutator(&self.elements[j], g);
                pres.set_commutator_tail(j, i, Element::from_exponents(self.coords(group, &c)))?;
            }
        }
        Ok(pres)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rewriting_heisenberg_along_another_sequence() {
        let mut pres = PcPresentation::new(3, 3).unwrap();
        pres.set_commutator_tail(1, 0, Element::from_exponents(vec![0, 0, 1])).unwrap();
        let g = PcGroup::new(pres).unwrap();
        let seq = vec![
            g.element(&[0, 1, 0]).unwrap(),
            g.element(&[1, 1, 0]).unwrap(),
            g.element(&[0, 0, 2]).unwrap(),
        ];
        let seq = PcSequence::new(&g, seq).unwrap();
        for x in g.elements() {
            let c = seq.coords(&g, &x);
            assert_eq!(PcSequence::evaluate(&g, seq.elements(), &c), x);
        }
        let h = PcGroup::new(seq.presentation(&g).unwrap()).unwrap();
        assert!(!h.presentation().is_abelian_presentation());
    }

    #[test]
    fn rejects_non_sequences() {
        let g = PcGroup::new(PcPresentation::new(3, 2).unwrap()).unwrap();
        let bad = vec![g.generator(0), g.generator(0)];
        assert!(PcSequence::new(&g, bad).is_err());
    }
}
