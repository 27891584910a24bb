use std::sync::OnceLock;

use super::consistency::{consistency_check, ConsistencyReport};
use super::presentation::{Element, PcPresentation, Word};
use super::subgroup::{Section, Subgroup};
use crate::error::{Error, Result};

/// A finite p-group given by a consistent pc presentation, with precomputed collection tables.
///
/// Construct with [`PcGroup::new`], which refuses inconsistent presentations.
#[derive(Clone, Debug)]
pub struct PcGroup {
    pres: PcPresentation,
    p: u32,
    n: usize,
    // power tail of a_i as letters
    power_words: Vec<Vec<(usize, u32)>>,
    // conj_words[k][i] = letters of a_k^{a_i} = a_k [a_k, a_i], k > i
    conj_words: Vec<Vec<Vec<(usize, u32)>>>,
    // commutes[k][i]: [a_k, a_i] trivial
    commutes: Vec<Vec<bool>>,
    gen_inverses: Vec<Element>,
    frattini: OnceLock<(Subgroup, Section)>,
}

impl PcGroup {
    /// Build the group, running the overlap consistency test first.
    pub fn new(pres: PcPresentation) -> Result<Self> {
        let report = consistency_check(&pres);
        if !report.passed {
            return Err(Error::Inconsistent(report.describe()));
        }
        Ok(Self::unchecked(pres))
    }

    /// Build collection tables without the consistency test. Normal forms are only
    /// meaningful when the presentation is consistent.
    pub fn unchecked(pres: PcPresentation) -> Self {
        let p = pres.p();
        let n = pres.n();
        let power_words = (0..n).map(|i| pres.power_tail(i).letters().collect()).collect();
        let mut conj_words = vec![vec![Vec::new(); n]; n];
        let mut commutes = vec![vec![true; n]; n];
        for k in 0..n {
            for i in 0..k {
                let tail = pres.commutator_tail(k, i);
                let mut w = vec![(k, 1)];
                w.extend(tail.letters());
                conj_words[k][i] = w;
                commutes[k][i] = tail.is_identity();
            }
        }
        let mut group = PcGroup {
            pres,
            p,
            n,
            power_words,
            conj_words,
            commutes,
            gen_inverses: Vec::new(),
            frattini: OnceLock::new(),
        };
        group.gen_inverses = (0..n).map(|i| group.invert(&Element::generator(n, i))).collect();
        group
    }

    /// The Frattini subgroup `G^p [G, G]`.
    pub fn frattini(&self) -> &Subgroup {
        &self.frattini_section().0
    }

    fn frattini_section(&self) -> &(Subgroup, Section) {
        self.frattini.get_or_init(|| {
            let whole = Subgroup::whole(self);
            let phi = whole.next_central_layer(self);
            let section = Section::new(self, &whole, &phi).expect("G / Phi(G) is elementary abelian");
            (phi, section)
        })
    }

    /// Whether `elements` generate the group, i.e. span `G / Phi(G)`.
    pub fn generates(&self, elements: &[Element]) -> bool {
        let (_, section) = self.frattini_section();
        let rows: Vec<Vec<u32>> = elements.iter().map(|e| section.coords(self, e)).collect();
        super::subgroup::rank(&rows, section.dim(), self.p) == section.dim()
    }

    pub fn check_consistency(&self) -> ConsistencyReport {
        consistency_check(&self.pres)
    }

    pub fn presentation(&self) -> &PcPresentation {
        &self.pres
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn identity(&self) -> Element {
        Element::identity(self.n)
    }

    pub fn generator(&self, i: usize) -> Element {
        Element::generator(self.n, i)
    }

    pub fn generators(&self) -> Vec<Element> {
        (0..self.n).map(|i| self.generator(i)).collect()
    }

    /// Reduce arbitrary exponents into an element, checking the length.
    pub fn element(&self, exponents: &[u32]) -> Result<Element> {
        if exponents.len() != self.n {
            return Err(Error::BadElement { got: exponents.len(), expected: self.n });
        }
        Ok(self.collect_word(&Word(
            exponents.iter().enumerate().map(|(i, &e)| (i, e as i64)).collect(),
        ))
        .expect("indices in range"))
    }

    /// Collect `stack` (popped from the end) onto `x` from the left.
    ///
    /// Every stacked letter has exponent in `[1, p)`.
    fn collect_onto(&self, x: &mut [u32], stack: &mut Vec<(usize, u32)>) {
        let p = self.p;
        let n = self.n;
        while let Some((i, e)) = stack.pop() {
            debug_assert!(e > 0 && e < p);
            let commuting = (i + 1..n).all(|k| x[k] == 0 || self.commutes[k][i]);
            if commuting {
                let s = x[i] + e;
                if s < p {
                    x[i] = s;
                    continue;
                }
                x[i] = s - p;
                if self.power_words[i].is_empty() {
                    continue;
                }
                // prefix * a_i^{s-p} * tail_i * suffix
                for k in (i + 1..n).rev() {
                    if x[k] != 0 {
                        stack.push((k, x[k]));
                        x[k] = 0;
                    }
                }
                stack.extend(self.power_words[i].iter().rev().copied());
                continue;
            }
            if e > 1 {
                stack.push((i, e - 1));
            }
            // prefix * a_i^{x_i + 1} * suffix^{a_i}
            for k in (i + 1..n).rev() {
                let f = x[k];
                if f == 0 {
                    continue;
                }
                x[k] = 0;
                if self.commutes[k][i] {
                    stack.push((k, f));
                } else {
                    for _ in 0..f {
                        stack.extend(self.conj_words[k][i].iter().rev().copied());
                    }
                }
            }
            if x[i] + 1 == p {
                x[i] = 0;
                stack.extend(self.power_words[i].iter().rev().copied());
            } else {
                x[i] += 1;
            }
        }
    }

    fn push_element(&self, stack: &mut Vec<(usize, u32)>, e: &Element) {
        stack.extend(e.letters().rev());
    }

    /// Normal form of a word.
    pub fn collect_word(&self, w: &Word) -> Result<Element> {
        let mut x = vec![0; self.n];
        let mut stack = Vec::new();
        for &(i, _) in &w.0 {
            if i >= self.n {
                return Err(Error::IndexOutOfRange { index: i, n: self.n });
            }
        }
        for &(i, e) in &w.0 {
            if e >= 0 {
                let mut left = e as u64;
                while left > 0 {
                    let chunk = left.min(self.p as u64 - 1) as u32;
                    stack.push((i, chunk));
                    self.collect_onto(&mut x, &mut stack);
                    left -= chunk as u64;
                }
            } else {
                for _ in 0..e.unsigned_abs() {
                    self.push_element(&mut stack, &self.gen_inverses[i]);
                    self.collect_onto(&mut x, &mut stack);
                }
            }
        }
        Ok(Element(x))
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Element {
        let mut x = a.0.clone();
        let mut stack = Vec::with_capacity(4 * self.n);
        self.push_element(&mut stack, b);
        self.collect_onto(&mut x, &mut stack);
        Element(x)
    }

    /// `a * a_i^e` for `e` in `[1, p)`.
    pub(crate) fn multiply_generator(&self, a: &mut Element, i: usize, e: u32) {
        let mut stack = vec![(i, e)];
        self.collect_onto(&mut a.0, &mut stack);
    }

    /// Inverse by killing exponents left to right: if `x * a_1^{k_1} ... a_n^{k_n} = 1`
    /// then the `k_i` are the normal form of `x^{-1}`.
    pub fn invert(&self, a: &Element) -> Element {
        let mut w = a.clone();
        let mut k = vec![0; self.n];
        for i in 0..self.n {
            let c = w.0[i];
            if c != 0 {
                k[i] = self.p - c;
                self.multiply_generator(&mut w, i, self.p - c);
            }
        }
        debug_assert!(w.is_identity());
        Element(k)
    }

    /// `a^k` by square-and-multiply; negative `k` powers the inverse.
    pub fn power(&self, a: &Element, k: i64) -> Element {
        let base = if k < 0 { self.invert(a) } else { a.clone() };
        self.power_u64(&base, k.unsigned_abs())
    }

    pub fn power_u64(&self, a: &Element, mut k: u64) -> Element {
        let mut result = self.identity();
        let mut base = a.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = self.multiply(&result, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.multiply(&base, &base);
            }
        }
        result
    }

    /// `[a, b] = a^{-1} b^{-1} a b`.
    pub fn commutator(&self, a: &Element, b: &Element) -> Element {
        let ab = self.multiply(a, b);
        let ba = self.multiply(b, a);
        // [a,b] = (ba)^{-1} (ab)
        self.multiply(&self.invert(&ba), &ab)
    }

    /// `a^b = b^{-1} a b`.
    pub fn conjugate(&self, a: &Element, b: &Element) -> Element {
        let ab = self.multiply(a, b);
        self.multiply(&self.invert(b), &ab)
    }

    /// Least `k >= 1` with `a^k = 1`; always a power of `p`.
    pub fn element_order(&self, a: &Element) -> u64 {
        let mut order = 1u64;
        let mut x = a.clone();
        while !x.is_identity() {
            x = self.power_u64(&x, self.p as u64);
            order *= self.p as u64;
        }
        order
    }

    pub fn is_element(&self, a: &Element) -> bool {
        a.len() == self.n && a.0.iter().all(|&e| e < self.p)
    }

    pub fn check_element(&self, a: &Element) -> Result<()> {
        if a.len() != self.n {
            return Err(Error::BadElement { got: a.len(), expected: self.n });
        }
        if !self.is_element(a) {
            return Err(Error::InvalidPresentation(format!("exponents of {a} not reduced mod {}", self.p)));
        }
        Ok(())
    }

    /// Product of a sequence of elements, left to right.
    pub fn product<'a>(&self, items: impl IntoIterator<Item = &'a Element>) -> Element {
        let mut x = self.identity();
        let mut stack = Vec::new();
        for e in items {
            self.push_element(&mut stack, e);
            self.collect_onto(&mut x.0, &mut stack);
        }
        x
    }

    /// Every element of the group; only sensible for small orders.
    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        let n = self.n;
        let p = self.p;
        let total = (p as u64).checked_pow(n as u32).expect("group order fits in u64");
        (0..total).map(move |mut idx| {
            let mut e = vec![0; n];
            for slot in e.iter_mut().rev() {
                *slot = (idx % p as u64) as u32;
                idx /= p as u64;
            }
            Element(e)
        })
    }

    pub fn order_exponent(&self) -> usize {
        self.n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Extraspecial group of order 27 and exponent 3: [a2, a1] = a3.
    fn heisenberg() -> PcGroup {
        let mut p = PcPresentation::new(3, 3).unwrap();
        p.set_commutator_tail(1, 0, Element(vec![0, 0, 1])).unwrap();
        PcGroup::new(p).unwrap()
    }

    #[test]
    fn empty_word_is_identity() {
        let g = heisenberg();
        assert!(g.collect_word(&Word::new()).unwrap().is_identity());
    }

    #[test]
    fn word_index_out_of_range() {
        let g = heisenberg();
        assert!(matches!(
            g.collect_word(&Word::new().letter(7, 1)),
            Err(Error::IndexOutOfRange { index: 7, n: 3 })
        ));
    }

    #[test]
    fn heisenberg_swap() {
        let g = heisenberg();
        // a2 a1 = a1 a2 [a2, a1] = a1 a2 a3
        let x = g.collect_word(&Word::new().letter(1, 1).letter(0, 1)).unwrap();
        assert_eq!(x.exponents(), &[1, 1, 1]);
        let a1 = g.generator(0);
        let a2 = g.generator(1);
        assert_eq!(g.commutator(&a2, &a1).exponents(), &[0, 0, 1]);
        assert_eq!(g.commutator(&a1, &a2).exponents(), &[0, 0, 2]);
    }

    #[test]
    fn inverse_and_negative_letters() {
        let g = heisenberg();
        for x in g.elements() {
            let y = g.invert(&x);
            assert!(g.multiply(&x, &y).is_identity());
            assert!(g.multiply(&y, &x).is_identity());
            let w = Word(x.letters().rev().map(|(i, e)| (i, -(e as i64))).collect());
            assert_eq!(g.collect_word(&w).unwrap(), y);
        }
    }

    #[test]
    fn order_of_identity_and_generators() {
        let g = heisenberg();
        assert_eq!(g.element_order(&g.identity()), 1);
        for i in 0..3 {
            assert_eq!(g.element_order(&g.generator(i)), 3);
        }
    }

    #[test]
    fn large_exponent_letters_wrap_through_power_relation() {
        // cyclic group of order 9: a1^3 = a2
        let mut p = PcPresentation::new(3, 2).unwrap();
        p.set_power_tail(0, Element(vec![0, 1])).unwrap();
        let g = PcGroup::new(p).unwrap();
        let x = g.collect_word(&Word::new().letter(0, 7)).unwrap();
        assert_eq!(x.exponents(), &[1, 2]);
        assert_eq!(g.element_order(&g.generator(0)), 9);
        assert_eq!(g.power(&g.generator(0), -1).exponents(), &[2, 2]);
    }
}
