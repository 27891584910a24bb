//! Derivations `delta : G -> A` into an abelian normal subgroup, with `G` acting on `A` by
//! conjugation on the right: `(gh) delta = (g delta)^h (h delta)`.
//!
//! Values are written multiplicatively, so the sum of two derivations is their pointwise
//! product. A derivation is stored through its endomorphism `1 + delta : g -> g (g delta)`.

use crate::autom::GroupMap;
use crate::error::{Error, Result};
use crate::maxclass::MaxClassProfile;
use crate::pcgroup::{linear_kernel, lower_central_series, Element, PcGroup, Section, Subgroup};
use serde::Serialize;

/// Derivations of a maximal-class group into a fixed abelian normal subgroup `A`, determined by
/// the values `u = s delta` and `v = s_1 delta`.
pub struct DerivationSpace<'a> {
    profile: &'a MaxClassProfile,
    target: Subgroup,
    theorem_context: bool,
}

impl<'a> DerivationSpace<'a> {
    pub fn new(profile: &'a MaxClassProfile, target: Subgroup) -> Result<Self> {
        let g = profile.group();
        if !target.is_normal(g) {
            return Err(Error::Precondition("derivation target is not normal".into()));
        }
        if !target.is_abelian(g) {
            return Err(Error::Precondition("derivation target is not abelian".into()));
        }
        Ok(DerivationSpace { profile, target, theorem_context: false })
    }

    /// Validation failures are reported as theorem violations from now on.
    pub fn in_theorem_context(mut self) -> Self {
        self.theorem_context = true;
        self
    }

    pub fn profile(&self) -> &'a MaxClassProfile {
        self.profile
    }

    pub fn group(&self) -> &'a PcGroup {
        self.profile.group()
    }

    pub fn target(&self) -> &Subgroup {
        &self.target
    }

    /// The derivation with `s delta = u`, `s_1 delta = v`, if there is one.
    pub fn make(&self, u: &Element, v: &Element) -> Result<Derivation<'_>> {
        let g = self.group();
        for (name, x) in [("u", u), ("v", v)] {
            if !g.is_element(x) || !self.target.contains(g, x) {
                return Err(Error::Precondition(format!("{name} = {x} does not lie in the target")));
            }
        }
        let p = self.profile;
        let su = g.multiply(p.s(), u);
        let s1v = g.multiply(p.s1(), v);
        let images = p.images_from_standard(&su, &s1v);
        let fail = |reason: String| Error::ValidationFailed { reason, theorem: self.theorem_context };
        let alpha = crate::autom::check_homomorphism(g, images).map_err(|e| match e {
            Error::HomCheckFailed(r) => fail(format!("(u, v) = ({u}, {v}): {r}")),
            other => other,
        })?;
        if alpha.apply(g, p.s()) != su || alpha.apply(g, p.s1()) != s1v {
            return Err(fail(format!("(u, v) = ({u}, {v}): images of s and s_1 are not s u and s_1 v")));
        }
        Ok(Derivation { space: self, u: u.clone(), v: v.clone(), alpha })
    }

    pub fn zero(&self) -> Derivation<'_> {
        let id = self.group().identity();
        self.make(&id, &id).expect("the zero derivation exists")
    }
}

/// Convenience wrapper for [`DerivationSpace::make`].
pub fn make_derivation<'a>(space: &'a DerivationSpace<'a>, u: &Element, v: &Element) -> Result<Derivation<'a>> {
    space.make(u, v)
}

#[derive(Clone)]
pub struct Derivation<'a> {
    space: &'a DerivationSpace<'a>,
    u: Element,
    v: Element,
    alpha: GroupMap,
}

impl PartialEq for Derivation<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.u == other.u && self.v == other.v
    }
}

impl std::fmt::Debug for Derivation<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Derivation").field("u", &self.u).field("v", &self.v).finish()
    }
}

impl<'a> Derivation<'a> {
    pub fn space(&self) -> &'a DerivationSpace<'a> {
        self.space
    }

    fn group(&self) -> &'a PcGroup {
        self.space.group()
    }

    /// `s delta`.
    pub fn u(&self) -> &Element {
        &self.u
    }

    /// `s_1 delta`.
    pub fn v(&self) -> &Element {
        &self.v
    }

    /// `g delta = g^{-1} (g alpha)`.
    pub fn eval(&self, g: &Element) -> Element {
        let grp = self.group();
        grp.multiply(&grp.invert(g), &self.alpha.apply(grp, g))
    }

    /// `1 + delta`.
    pub fn one_plus(&self) -> &GroupMap {
        &self.alpha
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_identity() && self.v.is_identity()
    }

    /// Pointwise product of values.
    pub fn add(&self, other: &Derivation<'a>) -> Result<Derivation<'a>> {
        let g = self.group();
        self.space.make(&g.multiply(&self.u, &other.u), &g.multiply(&self.v, &other.v))
    }

    pub fn negate(&self) -> Result<Derivation<'a>> {
        let g = self.group();
        self.space.make(&g.invert(&self.u), &g.invert(&self.v))
    }

    /// `delta_1 + delta_2 + delta_1 delta_2`, which corresponds to `(1 + delta_1)(1 + delta_2)`.
    pub fn bullet(&self, other: &Derivation<'a>) -> Result<Derivation<'a>> {
        let g = self.group();
        let value = |x: &Element| g.multiply(x, &other.eval(x));
        let u = g.multiply(&value(&self.u), &other.u);
        let v = g.multiply(&value(&self.v), &other.v);
        self.space.make(&u, &v)
    }

    /// The composite map `g -> (g delta_1) delta_2`.
    pub fn compose<'b>(&'b self, other: &'b Derivation<'a>) -> ComposedMap<'b, 'a> {
        ComposedMap { first: self, second: other }
    }

    /// `{g : g delta = 1}`, a subgroup that need not be normal.
    ///
    /// Along `A = A_0 > A_1 > ...` with `A_{j+1} = A_j^p [A_j, G]`, the set of `g` with
    /// `g delta` in `A_j` is a subgroup on which `g -> g delta A_{j+1}` is a homomorphism.
    pub fn kernel(&self) -> Subgroup {
        let g = self.group();
        let mut kernel = Subgroup::whole(g);
        let mut upper = self.space.target.clone();
        while !upper.is_trivial() {
            let lower = upper.next_central_layer(g);
            let section = Section::new(g, &upper, &lower).expect("central layers have elementary abelian factors");
            kernel = linear_kernel(g, &kernel, section.dim(), |x| section.coords(g, &self.eval(x)));
            upper = lower;
        }
        kernel
    }
}

/// Composite of two derivations; not a derivation in general.
pub struct ComposedMap<'b, 'a> {
    first: &'b Derivation<'a>,
    second: &'b Derivation<'a>,
}

impl ComposedMap<'_, '_> {
    pub fn eval(&self, g: &Element) -> Element {
        self.second.eval(&self.first.eval(g))
    }
}

pub fn kernel_of(delta: &Derivation<'_>) -> Subgroup {
    delta.kernel()
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaDownReport {
    pub passed: bool,
    pub r: usize,
    /// `(i, holds)` for `gamma_i delta <= gamma_{i+r-1}`
    pub rows: Vec<(usize, bool)>,
}

/// For `delta` into `gamma_r(G)`: `gamma_i(G) delta <= gamma_{i+r-1}(G)` for every `i >= 1`,
/// checked on a basis of each `gamma_i`.
pub fn check_lemma_down(delta: &Derivation<'_>, r: usize) -> Result<LemmaDownReport> {
    let g = delta.group();
    let gamma = lower_central_series(g);
    if r < 1 {
        return Err(Error::Precondition("r must be positive".into()));
    }
    let gr = gamma.term(r);
    if !delta.space.target.is_subgroup_of(g, &gr) || !gr.is_abelian(g) {
        return Err(Error::Precondition(format!("derivation does not map into the abelian term gamma_{r}")));
    }
    let mut rows = Vec::new();
    let mut i = 1;
    loop {
        let gi = gamma.term(i);
        if gi.is_trivial() {
            break;
        }
        let dest = gamma.term(i + r - 1);
        rows.push((i, gi.basis().all(|b| dest.contains(g, &delta.eval(b)))));
        i += 1;
    }
    Ok(LemmaDownReport { passed: rows.iter().all(|r| r.1), r, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blackburn::build_blackburn_pc;

    fn profile(p: u32, n: usize) -> MaxClassProfile {
        MaxClassProfile::analyze(build_blackburn_pc(p, n).unwrap()).unwrap()
    }

    #[test]
    fn zero_derivation_and_identity_map() {
        let prof = profile(3, 5);
        let space = DerivationSpace::new(&prof, prof.a()).unwrap();
        let z = space.zero();
        assert!(z.one_plus().is_identity(prof.group()));
        assert_eq!(z.kernel(), Subgroup::whole(prof.group()));
        for x in prof.group().elements().take(50) {
            assert!(z.eval(&x).is_identity());
        }
    }

    #[test]
    fn rejects_non_normal_target_and_values_outside() {
        let prof = profile(3, 5);
        let g = prof.group();
        let not_normal = Subgroup::generated(g, &[prof.s().clone()], false);
        assert!(DerivationSpace::new(&prof, not_normal).is_err());
        let space = DerivationSpace::new(&prof, prof.term(3)).unwrap();
        assert!(matches!(space.make(&prof.s_i(2), &g.identity()), Err(Error::Precondition(_))));
    }

    #[test]
    fn values_on_generators_and_inverse_rule() {
        let prof = profile(5, 5);
        let g = prof.group();
        let space = DerivationSpace::new(&prof, prof.term(2)).unwrap();
        let d = space.make(&prof.s_i(3), &prof.s_i(2)).unwrap();
        assert_eq!(d.eval(prof.s()), prof.s_i(3));
        assert!(d.eval(&g.identity()).is_identity());
        for x in g.elements().step_by(37) {
            let inv = g.invert(&x);
            let expected = g.conjugate(&g.invert(&d.eval(&x)), &inv);
            assert_eq!(d.eval(&inv), expected);
        }
    }

    #[test]
    fn nonabelian_target_rejected() {
        let prof = profile(5, 7);
        let g = prof.group();
        let space = DerivationSpace::new(&prof, Subgroup::whole(g)).err();
        assert!(space.is_some());
        let space = DerivationSpace::new(&prof, prof.g1().clone()).unwrap().in_theorem_context();
        match space.make(&g.identity(), &g.identity()) {
            Ok(d) => assert!(d.is_zero()),
            Err(e) => panic!("{e}"),
        }
    }
}
