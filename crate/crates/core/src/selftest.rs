//! Seeded property suites for the derivation calculus and the structural facts about groups of
//! maximal class. Each suite returns an in-band result rather than panicking.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::autom::{random_element, GroupMap};
use crate::blackburn::build_blackburn_pc;
use crate::derivations::{check_lemma_down, Derivation, DerivationSpace};
use crate::error::{Error, Result};
use crate::maxclass::{conjugacy_facts, MaxClassProfile};
use crate::pcgroup::{lower_central_series, Element, PcGroup, PcPresentation, Subgroup};
use crate::search::NONMETABELIAN_5_8;

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub cases: u64,
    pub detail: String,
}

impl SuiteResult {
    fn new(name: &str, cases: u64, failure: Option<String>) -> Self {
        SuiteResult {
            name: name.into(),
            passed: failure.is_none(),
            cases,
            detail: failure.unwrap_or_else(|| format!("{cases} cases hold")),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub passed: bool,
    pub suites: Vec<SuiteResult>,
}

fn random_group_element(g: &PcGroup, rng: &mut impl Rng) -> Element {
    Element::from_exponents((0..g.n()).map(|_| rng.gen_range(0..g.p())).collect())
}

/// `count` derivations with seeded random values; pairs without a derivation are redrawn.
pub fn random_derivations<'a>(space: &'a DerivationSpace<'a>, count: usize, rng: &mut impl Rng) -> Result<Vec<Derivation<'a>>> {
    let g = space.group();
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        if attempts > 1000 * count.max(1) {
            return Err(Error::Caps("too few random pairs give derivations".into()));
        }
        let u = random_element(g, space.target(), rng);
        let v = random_element(g, space.target(), rng);
        match space.make(&u, &v) {
            Ok(d) => out.push(d),
            Err(Error::ValidationFailed { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// `(gh) delta = (g delta)^h (h delta)` on seeded pairs.
pub fn cocycle_suite(space: &DerivationSpace<'_>, derivations: usize, pairs: usize, seed: u64) -> Result<SuiteResult> {
    let g = space.group();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ds = random_derivations(space, derivations, &mut rng)?;
    let mut failure = None;
    'outer: for d in &ds {
        if !d.eval(&g.identity()).is_identity() {
            failure = Some(format!("{d:?} is nontrivial at 1"));
            break;
        }
        for _ in 0..pairs {
            let x = random_group_element(g, &mut rng);
            let y = random_group_element(g, &mut rng);
            let lhs = d.eval(&g.multiply(&x, &y));
            let rhs = g.multiply(&g.conjugate(&d.eval(&x), &y), &d.eval(&y));
            let inv = g.invert(&x);
            let inverse_rule = d.eval(&inv) == g.conjugate(&g.invert(&d.eval(&x)), &inv);
            if lhs != rhs || !inverse_rule || !space.target().contains(g, &lhs) {
                failure = Some(format!("{d:?} at ({x}, {y})"));
                break 'outer;
            }
        }
    }
    Ok(SuiteResult::new("cocycle", (derivations * pairs) as u64, failure))
}

/// Abelian group laws for `+`, monoid laws for the bullet product, and `1 + (d1 . d2) = (1 + d1)(1 + d2)`.
pub fn derivation_law_suite(space: &DerivationSpace<'_>, size: usize, seed: u64) -> Result<SuiteResult> {
    let g = space.group();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ds = random_derivations(space, size, &mut rng)?;
    let zero = space.zero();
    let mut cases = 0u64;
    let mut failure = None;
    let mut fail = |ok: bool, what: String| {
        cases += 1;
        if !ok && failure.is_none() {
            failure = Some(what);
        }
    };
    for (i, a) in ds.iter().enumerate() {
        fail(a.add(&zero)? == *a, format!("{a:?} + 0"));
        fail(a.add(&a.negate()?)?.is_zero(), format!("{a:?} - itself"));
        fail(a.bullet(&zero)? == *a && zero.bullet(a)? == *a, format!("{a:?} . 0"));
        for b in &ds {
            fail(a.add(b)? == b.add(a)?, format!("{a:?} + {b:?} commutes"));
            let ab = a.bullet(b)?;
            let composite: GroupMap = a.one_plus().then(g, b.one_plus());
            fail(ab.one_plus() == &composite, format!("1 + ({a:?} . {b:?})"));
            // the bullet product pointwise: x (d1 . d2) = x d1 + x d2 + x d1 d2
            let x = random_group_element(g, &mut rng);
            let expected = g.product([&a.eval(&x), &b.eval(&x), &a.compose(b).eval(&x)]);
            fail(ab.eval(&x) == expected, format!("{a:?} . {b:?} at {x}"));
        }
        // associativity on a window of triples
        for b in ds.iter().skip(i).take(4) {
            for c in ds.iter().take(4) {
                fail(a.add(b)?.add(c)? == a.add(&b.add(c)?)?, format!("({a:?} + {b:?}) + {c:?}"));
                fail(
                    a.bullet(b)?.bullet(c)? == a.bullet(&b.bullet(c)?)?,
                    format!("({a:?} . {b:?}) . {c:?}"),
                );
            }
        }
    }
    Ok(SuiteResult::new("derivation_laws", cases, failure))
}

/// For derivations that vanish on their target: `d^2 = 0`, the bullet product is the sum, and
/// `(1 + d)(1 - d) = 1`.
pub fn square_zero_suite(space: &DerivationSpace<'_>, size: usize, seed: u64) -> Result<SuiteResult> {
    let g = space.group();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ds = random_derivations(space, size, &mut rng)?;
    let basis: Vec<Element> = space.target().basis().cloned().collect();
    let mut cases = 0;
    let mut failure = None;
    for a in &ds {
        if basis.iter().any(|b| !a.eval(b).is_identity()) {
            return Err(Error::Precondition("derivation does not vanish on its target".into()));
        }
        cases += 1;
        let x = random_group_element(g, &mut rng);
        let inverse = a.one_plus().then(g, a.negate()?.one_plus());
        if !a.compose(a).eval(&x).is_identity() || !inverse.is_identity(g) {
            failure = failure.or(Some(format!("{a:?}")));
        }
        for b in &ds {
            cases += 1;
            if a.bullet(b)? != a.add(b)? {
                failure = failure.or(Some(format!("{a:?} . {b:?} differs from the sum")));
            }
        }
    }
    Ok(SuiteResult::new("square_zero", cases, failure))
}

/// `gamma_i delta <= gamma_{i+r-1}` for derivations into `gamma_r`, cycling `r` over the abelian terms.
pub fn lemma_down_suite(profile: &MaxClassProfile, count: usize, seed: u64) -> Result<SuiteResult> {
    let g = profile.group();
    let gamma = lower_central_series(g);
    let rs: Vec<usize> = (2..profile.n()).filter(|&r| gamma.term(r).is_abelian(g)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failure = None;
    let mut cases = 0;
    for k in 0..count {
        let r = rs[k % rs.len()];
        let space = DerivationSpace::new(profile, gamma.term(r))?;
        let d = random_derivations(&space, 1, &mut rng)?.remove(0);
        let rep = check_lemma_down(&d, r)?;
        cases += rep.rows.len() as u64;
        if !rep.passed {
            failure = failure.or(Some(format!("r = {r}, {d:?}: {:?}", rep.rows)));
        }
    }
    Ok(SuiteResult::new("lemma_down", cases, failure))
}

/// `G_{n-r+1} <= ker delta` for derivations into `G_r` with `2r >= n - l`.
pub fn lemma_kernel_suite(profile: &MaxClassProfile, per_r: usize, seed: u64) -> Result<SuiteResult> {
    let g = profile.group();
    let (n, l) = (profile.n(), profile.l());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failure = None;
    let mut cases = 0;
    for r in ((n - l).div_ceil(2)).max(2)..n {
        let target = profile.term(r);
        if !target.is_abelian(g) {
            continue;
        }
        let space = DerivationSpace::new(profile, target)?;
        for d in random_derivations(&space, per_r, &mut rng)? {
            cases += 1;
            if !profile.term(n - r + 1).is_subgroup_of(g, &d.kernel()) {
                failure = failure.or(Some(format!("r = {r}, {d:?}")));
            }
        }
    }
    Ok(SuiteResult::new("lemma_kernel", cases, failure))
}

/// `[gu, hv] = [g, v]^u [g, h]^{vu} [u, v] [u, h]^v`.
pub fn commutator_identity_suite(g: &PcGroup, tuples: usize, seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failure = None;
    for _ in 0..tuples {
        let [x, u, h, v] = std::array::from_fn(|_| random_group_element(g, &mut rng));
        let lhs = g.commutator(&g.multiply(&x, &u), &g.multiply(&h, &v));
        let rhs = g.product([
            &g.conjugate(&g.commutator(&x, &v), &u),
            &g.conjugate(&g.commutator(&x, &h), &g.multiply(&v, &u)),
            &g.commutator(&u, &v),
            &g.conjugate(&g.commutator(&u, &h), &v),
        ]);
        if lhs != rhs {
            failure = Some(format!("({x}, {u}, {h}, {v})"));
            break;
        }
    }
    SuiteResult::new("commutator_identity", tuples as u64, failure)
}

/// `g^G = g G_2`, `g^p in G_{n-1}` and `<g, G_{n-1}>` centralizes `g`, for seeded `g` outside `G_1`.
pub fn conjugacy_suite(profile: &MaxClassProfile, count: usize, seed: u64) -> Result<SuiteResult> {
    let g = profile.group();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failure = None;
    let mut cases = 0;
    while cases < count as u64 {
        let x = random_group_element(g, &mut rng);
        if profile.g1().contains(g, &x) {
            continue;
        }
        cases += 1;
        let rep = conjugacy_facts(profile, &x)?;
        if !rep.passed {
            failure = failure.or(Some(format!("{x}: {rep:?}")));
        }
    }
    Ok(SuiteResult::new("conjugacy_facts", cases, failure))
}

/// `G_1 = C_G(G_i / G_{i+2})` for `2 <= i <= n-2`, and `[G_i, G_j] <= G_{i+j+l}` on generators.
pub fn structure_suite(profile: &MaxClassProfile) -> Result<SuiteResult> {
    let g = profile.group();
    let n = profile.n();
    let mut failure = None;
    let mut cases = 0;
    for i in 2..n - 1 {
        cases += 1;
        let c = crate::pcgroup::centralizer_mod(g, &profile.term(i), &profile.term(i + 2))?;
        if c != *profile.g1() {
            failure = failure.or(Some(format!("C_G(G_{i} / G_{}) differs from G_1", i + 2)));
        }
    }
    for i in 1..n {
        for j in 1..n {
            cases += 1;
            let comm: Subgroup = profile.term(i).commutator_with(g, &profile.term(j));
            if !comm.is_subgroup_of(g, &profile.term(i + j + profile.l())) {
                failure = failure.or(Some(format!("[G_{i}, G_{j}] not in G_(i+j+l)")));
            }
        }
    }
    Ok(SuiteResult::new("structure", cases, failure))
}

pub fn nonmetabelian_fixture() -> Result<PcGroup> {
    PcGroup::new(PcPresentation::from_file_str(NONMETABELIAN_5_8)?)
}

/// Every suite at its default size on `G'(5,5)`, `G'(5,7)` and the nonmetabelian fixture.
pub fn run(seed: u64) -> Result<SelftestReport> {
    let g55 = MaxClassProfile::analyze(build_blackburn_pc(5, 5)?)?;
    let g57 = MaxClassProfile::analyze(build_blackburn_pc(5, 7)?)?;
    let fixture = MaxClassProfile::analyze(nonmetabelian_fixture()?)?;
    let mut suites = Vec::new();

    let a57 = DerivationSpace::new(&g57, g57.a())?;
    suites.push(cocycle_suite(&a57, 20, 1000, seed)?);
    let a_fix = DerivationSpace::new(&fixture, fixture.a())?;
    suites.push(cocycle_suite(&a_fix, 5, 200, seed)?.renamed("cocycle_nonmetabelian"));
    let a55 = DerivationSpace::new(&g55, g55.term(2))?;
    suites.push(derivation_law_suite(&a55, 20, seed)?);
    let t57 = DerivationSpace::new(&g57, g57.term(g57.t()))?;
    suites.push(square_zero_suite(&t57, 10, seed)?);
    suites.push(lemma_down_suite(&g57, 10, seed)?);
    suites.push(lemma_down_suite(&fixture, 10, seed)?.renamed("lemma_down_nonmetabelian"));
    suites.push(lemma_kernel_suite(&g57, 3, seed)?);
    suites.push(lemma_kernel_suite(&fixture, 3, seed)?.renamed("lemma_kernel_nonmetabelian"));
    suites.push(commutator_identity_suite(fixture.group(), 500, seed));
    suites.push(conjugacy_suite(&g57, 100, seed)?);
    suites.push(structure_suite(&g57)?);
    suites.push(structure_suite(&fixture)?.renamed("structure_nonmetabelian"));
    Ok(SelftestReport { seed, passed: suites.iter().all(|s| s.passed), suites })
}

impl SuiteResult {
    fn renamed(mut self, name: &str) -> Self {
        self.name = name.into();
        self
    }
}
