use super::collect::PcGroup;
use super::presentation::Element;
use crate::error::{Error, Result};

/// Modular inverse of a nonzero residue mod a prime.
pub(crate) fn inv_mod(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = a as u64 % p as u64;
    let mut e = p as u64 - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

/// A subgroup stored by an induced pc sequence: at most one basis element per depth,
/// each with leading exponent 1, reduced to canonical form so equal subgroups compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subgroup {
    slots: Vec<Option<Element>>,
}

impl Subgroup {
    pub fn trivial(n: usize) -> Self {
        Subgroup { slots: vec![None; n] }
    }

    pub fn whole(group: &PcGroup) -> Self {
        Subgroup {
            slots: (0..group.n()).map(|i| Some(group.generator(i))).collect(),
        }
    }

    /// `<a_from, ..., a_n>`, always normal.
    pub fn tail_span(group: &PcGroup, from: usize) -> Self {
        Subgroup {
            slots: (0..group.n()).map(|i| (i >= from).then(|| group.generator(i))).collect(),
        }
    }

    /// Number of generators of the ambient group.
    pub fn ambient_n(&self) -> usize {
        self.slots.len()
    }

    /// `|H| = p^order_exponent`.
    pub fn order_exponent(&self) -> usize {
        self.slots.iter().flatten().count()
    }

    pub fn is_trivial(&self) -> bool {
        self.order_exponent() == 0
    }

    pub fn basis(&self) -> impl Iterator<Item = &Element> + Clone {
        self.slots.iter().flatten()
    }

    pub fn depths(&self) -> Vec<usize> {
        self.slots
            .iter()
            .enumerate()
            .filter_map(|(d, s)| s.as_ref().map(|_| d))
            .collect()
    }

    pub(crate) fn slot(&self, depth: usize) -> Option<&Element> {
        self.slots[depth].as_ref()
    }

    /// Sift `g` through the basis; returns the remainder (identity iff `g` is a member).
    pub fn sift(&self, group: &PcGroup, g: &Element) -> Element {
        let p = group.p();
        let mut x = g.clone();
        while let Some(d) = x.depth() {
            match &self.slots[d] {
                None => return x,
                Some(b) => {
                    let c = x.0[d];
                    x = group.multiply(&x, &group.power_u64(b, (p - c) as u64));
                }
            }
        }
        x
    }

    pub fn contains(&self, group: &PcGroup, g: &Element) -> bool {
        self.sift(group, g).is_identity()
    }

    pub fn is_subgroup_of(&self, group: &PcGroup, other: &Subgroup) -> bool {
        self.order_exponent() <= other.order_exponent() && self.basis().all(|b| other.contains(group, b))
    }

    pub fn is_normal(&self, group: &PcGroup) -> bool {
        self.basis().all(|b| {
            (0..group.n()).all(|i| self.contains(group, &group.commutator(b, &group.generator(i))))
        })
    }

    pub fn is_abelian(&self, group: &PcGroup) -> bool {
        let basis: Vec<_> = self.basis().collect();
        basis
            .iter()
            .enumerate()
            .all(|(k, a)| basis[..k].iter().all(|b| group.commutator(a, b).is_identity()))
    }

    /// Subgroup generated by `gens`; with `normal` set, the normal closure in the whole group.
    pub fn generated(group: &PcGroup, gens: &[Element], normal: bool) -> Self {
        Self::trivial(group.n()).extended(group, gens, normal)
    }

    /// The subgroup generated by `self` and `gens`.
    pub fn extended(&self, group: &PcGroup, gens: &[Element], normal: bool) -> Self {
        let mut h = self.clone();
        h.close(group, gens.to_vec(), normal);
        h.canonicalize(group);
        h
    }

    fn close(&mut self, group: &PcGroup, mut queue: Vec<Element>, normal: bool) {
        let p = group.p();
        while let Some(g) = queue.pop() {
            let r = self.sift(group, &g);
            let Some(d) = r.depth() else { continue };
            let r = group.power_u64(&r, inv_mod(r.0[d], p) as u64);
            queue.push(group.power_u64(&r, p as u64));
            for b in self.basis() {
                queue.push(group.commutator(&r, b));
            }
            if normal {
                for i in 0..group.n() {
                    queue.push(group.commutator(&r, &group.generator(i)));
                }
            }
            self.slots[d] = Some(r);
        }
    }

    /// Clear every basis element's exponents at the other basis depths below its own.
    fn canonicalize(&mut self, group: &PcGroup) {
        let p = group.p();
        let depths = self.depths();
        for (k, &d) in depths.iter().enumerate() {
            let mut b = self.slots[d].take().expect("occupied");
            for &e in &depths[k + 1..] {
                let c = b.0[e];
                if c != 0 {
                    let other = self.slots[e].as_ref().expect("occupied");
                    b = group.multiply(&b, &group.power_u64(other, (p - c) as u64));
                }
            }
            self.slots[d] = Some(b);
        }
    }

    /// All members, `p^k` of them.
    pub fn elements(&self, group: &PcGroup) -> Vec<Element> {
        let mut out = vec![group.identity()];
        // later basis elements vary fastest: x = b_1^{e_1} ... b_k^{e_k}
        for b in self.basis().collect::<Vec<_>>().into_iter().rev() {
            let powers: Vec<Element> = (0..group.p()).map(|e| group.power_u64(b, e as u64)).collect();
            let mut next = Vec::with_capacity(out.len() * powers.len());
            for pw in &powers {
                for x in &out {
                    next.push(group.multiply(pw, x));
                }
            }
            out = next;
        }
        out
    }

    /// `b_1^{e_1} ... b_k^{e_k}` for exponents over this basis.
    pub fn element_from_coords(&self, group: &PcGroup, coords: &[u32]) -> Element {
        let mut x = group.identity();
        for (b, &e) in self.basis().zip(coords) {
            if e != 0 {
                x = group.multiply(&x, &group.power_u64(b, e as u64));
            }
        }
        x
    }

    /// Subgroup generated by the commutators of the two bases, closed normally.
    /// Equals `[H, K]` when both are normal.
    pub fn commutator_with(&self, group: &PcGroup, other: &Subgroup) -> Subgroup {
        let gens: Vec<_> = self
            .basis()
            .flat_map(|a| other.basis().map(move |b| (a, b)))
            .map(|(a, b)| group.commutator(a, b))
            .collect();
        Subgroup::generated(group, &gens, true)
    }

    /// `H^p [H, G]`: the next term of the lower exponent-p central series relative to the whole group.
    pub(crate) fn next_central_layer(&self, group: &PcGroup) -> Subgroup {
        let p = group.p() as u64;
        let mut gens: Vec<_> = self.basis().map(|b| group.power_u64(b, p)).collect();
        for b in self.basis() {
            for i in 0..group.n() {
                gens.push(group.commutator(b, &group.generator(i)));
            }
        }
        Subgroup::generated(group, &gens, true)
    }
}

/// Coordinates on an elementary abelian section `X / Y`.
#[derive(Clone, Debug)]
pub struct Section {
    combined: Subgroup,
    // index of each factor depth among the coordinates
    factor_index: Vec<Option<usize>>,
    dim: usize,
}

impl Section {
    /// Requires `Y <= X`, `Y` normal in `X`, and `X / Y` elementary abelian.
    pub fn new(group: &PcGroup, upper: &Subgroup, lower: &Subgroup) -> Result<Self> {
        if !lower.is_subgroup_of(group, upper) {
            return Err(Error::Precondition("section: lower term not contained in upper".into()));
        }
        // slots at the lower term's depths must stay inside the lower term, so no canonicalizing
        let mut combined = lower.clone();
        combined.close(group, upper.basis().cloned().collect(), false);
        debug_assert_eq!(combined.order_exponent(), upper.order_exponent());
        let p = group.p() as u64;
        for a in upper.basis() {
            if !lower.contains(group, &group.power_u64(a, p)) {
                return Err(Error::Precondition("section is not of exponent p".into()));
            }
            for b in upper.basis() {
                if !lower.contains(group, &group.commutator(a, b)) {
                    return Err(Error::Precondition("section is not abelian".into()));
                }
            }
        }
        let lower_depths = lower.depths();
        let mut factor_index = vec![None; group.n()];
        let mut dim = 0;
        for d in combined.depths() {
            if !lower_depths.contains(&d) {
                factor_index[d] = Some(dim);
                dim += 1;
            }
        }
        Ok(Section { combined, factor_index, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Coordinates of `x` modulo the lower term; `x` must lie in the upper term.
    pub fn coords(&self, group: &PcGroup, x: &Element) -> Vec<u32> {
        let p = group.p();
        let mut v = vec![0; self.dim];
        let mut x = x.clone();
        while let Some(d) = x.depth() {
            let b = self.combined.slot(d).expect("element lies in the section's upper term");
            let c = x.0[d];
            if let Some(k) = self.factor_index[d] {
                v[k] = (v[k] + c) % p;
            }
            x = group.multiply(&x, &group.power_u64(b, (p - c) as u64));
        }
        v
    }
}

/// Rank of a matrix over `F_p`.
pub(crate) fn rank(rows: &[Vec<u32>], cols: usize, p: u32) -> usize {
    rows.len() - left_nullspace(rows, cols, p).len()
}

/// Nullspace of the map `F_p^rows -> F_p^cols` given by `rows`, in echelon form with
/// distinct leading positions.
pub(crate) fn left_nullspace(rows: &[Vec<u32>], cols: usize, p: u32) -> Vec<Vec<u32>> {
    let k = rows.len();
    let pm = p as u64;
    // augmented [row | identity]
    let mut m: Vec<Vec<u32>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut v = r.clone();
            v.resize(cols, 0);
            v.extend((0..k).map(|j| (i == j) as u32));
            v
        })
        .collect();
    let mut pivot_row = 0;
    for c in 0..cols {
        let Some(r) = (pivot_row..k).find(|&r| m[r][c] != 0) else { continue };
        m.swap(pivot_row, r);
        let inv = inv_mod(m[pivot_row][c], p) as u64;
        for x in m[pivot_row].iter_mut() {
            *x = (*x as u64 * inv % pm) as u32;
        }
        for r in 0..k {
            if r != pivot_row && m[r][c] != 0 {
                let f = m[r][c] as u64;
                let (head, tail) = if r < pivot_row {
                    let (a, b) = m.split_at_mut(pivot_row);
                    (&mut a[r], &b[0])
                } else {
                    let (a, b) = m.split_at_mut(r);
                    (&mut b[0], &a[pivot_row])
                };
                for (x, y) in head.iter_mut().zip(tail.iter()) {
                    *x = ((*x as u64 + (pm - f) * *y as u64) % pm) as u32;
                }
            }
        }
        pivot_row += 1;
    }
    // rows below pivot_row have zero left part; their right parts span the nullspace
    let mut null: Vec<Vec<u32>> = m[pivot_row..].iter().map(|r| r[cols..].to_vec()).collect();
    // echelonize so leading positions are distinct
    let mut out = Vec::new();
    for c in 0..k {
        let Some(r) = (0..null.len()).find(|&r| null[r][c] != 0 && null[r][..c].iter().all(|&x| x == 0)) else {
            continue;
        };
        let mut row = null.swap_remove(r);
        let inv = inv_mod(row[c], p) as u64;
        for x in row.iter_mut() {
            *x = (*x as u64 * inv % pm) as u32;
        }
        for other in null.iter_mut() {
            let f = other[c] as u64;
            if f != 0 {
                for (x, y) in other.iter_mut().zip(&row) {
                    *x = ((*x as u64 + (pm - f) * *y as u64) % pm) as u32;
                }
            }
        }
        out.push(row);
    }
    out
}

/// Kernel of a homomorphism from `domain` into an elementary abelian group `F_p^dim`,
/// given by its values `f` on elements.
///
/// Values on `b_1^{e_1} ... b_k^{e_k}` are linear in the exponents, so the kernel is
/// spanned by the elements attached to an echelon basis of the nullspace.
pub(crate) fn linear_kernel(
    group: &PcGroup,
    domain: &Subgroup,
    dim: usize,
    f: impl Fn(&Element) -> Vec<u32>,
) -> Subgroup {
    let rows: Vec<Vec<u32>> = domain.basis().map(&f).collect();
    let null = left_nullspace(&rows, dim, group.p());
    let gens: Vec<Element> = null.iter().map(|v| domain.element_from_coords(group, v)).collect();
    let kernel = Subgroup::generated(group, &gens, false);
    debug_assert_eq!(kernel.order_exponent(), null.len());
    kernel
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pcgroup::presentation::PcPresentation;

    fn heisenberg() -> PcGroup {
        let mut p = PcPresentation::new(3, 3).unwrap();
        p.set_commutator_tail(1, 0, Element(vec![0, 0, 1])).unwrap();
        PcGroup::new(p).unwrap()
    }

    #[test]
    fn trivial_subgroup_from_nothing() {
        let g = heisenberg();
        let h = Subgroup::generated(&g, &[], false);
        assert_eq!(h.order_exponent(), 0);
        assert!(h.contains(&g, &g.identity()));
    }

    #[test]
    fn generated_versus_normal_closure() {
        let g = heisenberg();
        let a2 = g.generator(1);
        assert_eq!(Subgroup::generated(&g, &[a2.clone()], false).order_exponent(), 1);
        assert_eq!(Subgroup::generated(&g, &[a2], true).order_exponent(), 2);
        let h = Subgroup::generated(&g, &[g.generator(0), g.generator(1)], false);
        assert_eq!(h, Subgroup::whole(&g));
    }

    #[test]
    fn elements_are_distinct_members() {
        let g = heisenberg();
        let h = Subgroup::generated(&g, &[g.element(&[1, 2, 0]).unwrap()], true);
        let els = h.elements(&g);
        assert_eq!(els.len(), 9);
        let set: std::collections::HashSet<_> = els.iter().cloned().collect();
        assert_eq!(set.len(), 9);
        assert!(els.iter().all(|x| h.contains(&g, x)));
    }

    #[test]
    fn nullspace_echelon() {
        let rows = vec![vec![1, 0], vec![2, 0], vec![0, 1], vec![1, 1]];
        let null = left_nullspace(&rows, 2, 5);
        assert_eq!(null.len(), 2);
        for v in &null {
            for c in 0..2 {
                let s: u32 = v.iter().zip(&rows).map(|(a, r)| a * r[c]).sum();
                assert_eq!(s % 5, 0);
            }
        }
        assert_ne!(null[0].iter().position(|&x| x != 0), null[1].iter().position(|&x| x != 0));
    }

    #[test]
    fn section_coordinates() {
        let g = heisenberg();
        let whole = Subgroup::whole(&g);
        let centre = Subgroup::tail_span(&g, 2);
        let s = Section::new(&g, &whole, &centre).unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(s.coords(&g, &g.element(&[2, 1, 1]).unwrap()), vec![2, 1]);
        assert!(Section::new(&g, &whole, &Subgroup::trivial(3)).is_err());
    }
}
