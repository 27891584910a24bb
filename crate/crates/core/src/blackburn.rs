//! The metabelian maximal-class group `G'(p, n)`: its pc presentation, the abelian maximal
//! subgroup `M = <s_1', ..., s_{n-1}'>`, and the additive model `Z[theta] / (theta - 1)^{n-1}` of `M`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::autom::{check_homomorphism, GroupMap};
use crate::derivations::{Derivation, DerivationSpace};
use crate::error::{Error, Result};
use crate::maxclass::{binomial, MaxClassProfile};
use crate::pcgroup::{is_prime, Element, PcGroup, PcPresentation, Subgroup, MAX_GENERATORS, MAX_PRIME};

/// Exhaustive cross-model checks run when `|M| <= EXHAUSTIVE_LIMIT`.
pub const EXHAUSTIVE_LIMIT: u64 = 10_000;
pub const DEFAULT_SAMPLES: usize = 100_000;

/// `Z[theta] / (theta - 1)^{n-1}` with `theta` a primitive `p`-th root of unity, on the basis
/// `b_i = (theta - 1)^{i-1}`, `i = 1..n-1`. Elements are coefficient vectors with entries in `[0, p)`.
#[derive(Clone, Debug)]
pub struct RingModule {
    p: u32,
    n: usize,
    // p^e vanishes in the ring, so coefficients may be reduced modulo p^e
    modulus: i128,
    binomials: Vec<i128>,
}

impl RingModule {
    pub fn new(p: u32, n: usize) -> Result<Self> {
        if !is_prime(p) || !(3..=MAX_PRIME).contains(&p) {
            return Err(Error::InvalidPresentation(format!("p = {p} must be an odd prime at most {MAX_PRIME}")));
        }
        if !(2..=MAX_GENERATORS).contains(&n) {
            return Err(Error::Caps(format!("n = {n} must lie in 2..={MAX_GENERATORS}")));
        }
        // p = -(theta - 1)^{p-1} * unit
        let e = (n - 1).div_ceil(p as usize - 1) as u32;
        let modulus = (p as i128).pow(e.max(1));
        let binomials = (0..=p as u64).map(|k| binomial(p as u64, k) as i128).collect();
        Ok(RingModule { p, n, modulus, binomials })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of coefficients, `n - 1`.
    pub fn dim(&self) -> usize {
        self.n - 1
    }

    pub fn zero(&self) -> Vec<u32> {
        vec![0; self.dim()]
    }

    /// `b_i` for `i >= 1`; zero once `i >= n`.
    pub fn basis(&self, i: usize) -> Vec<u32> {
        assert!(i >= 1, "basis elements are numbered from 1");
        let mut v = self.zero();
        if i < self.n {
            v[i - 1] = 1;
        }
        v
    }

    /// Reduce integer coefficients using `p b_i = -sum_{k=2}^{p} C(p,k) b_{i+k-1}`.
    pub fn normalize(&self, coeffs: &[i128]) -> Vec<u32> {
        let d = self.dim();
        let p = self.p as i128;
        let mut c: Vec<i128> = (0..d).map(|i| coeffs.get(i).copied().unwrap_or(0).rem_euclid(self.modulus)).collect();
        for i in 0..d {
            let q = c[i].div_euclid(p);
            c[i] = c[i].rem_euclid(p);
            if q == 0 {
                continue;
            }
            for k in 2..=self.p as usize {
                let idx = i + k - 1;
                if idx >= d {
                    break;
                }
                c[idx] = (c[idx] - q * self.binomials[k]).rem_euclid(self.modulus);
            }
        }
        c.into_iter().map(|x| x as u32).collect()
    }

    pub fn add(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let sum: Vec<i128> = a.iter().zip(b).map(|(&x, &y)| x as i128 + y as i128).collect();
        self.normalize(&sum)
    }

    pub fn negate(&self, a: &[u32]) -> Vec<u32> {
        self.scalar_multiply(a, -1)
    }

    pub fn scalar_multiply(&self, a: &[u32], k: i64) -> Vec<u32> {
        let k = (k as i128).rem_euclid(self.modulus);
        let v: Vec<i128> = a.iter().map(|&x| x as i128 * k).collect();
        self.normalize(&v)
    }

    /// Multiplication by `theta - 1`: `b_i -> b_{i+1}`.
    pub fn shift(&self, a: &[u32]) -> Vec<u32> {
        let mut v = vec![0i128; self.dim()];
        for i in 1..self.dim() {
            v[i] = a[i - 1] as i128;
        }
        self.normalize(&v)
    }

    /// Multiplication by `theta = 1 + (theta - 1)`: `b_i -> b_i + b_{i+1}`.
    pub fn theta_multiply(&self, a: &[u32]) -> Vec<u32> {
        self.add(a, &self.shift(a))
    }

    /// Ring product.
    pub fn multiply(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let d = self.dim();
        let mut v = vec![0i128; d];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                if i + j < d {
                    v[i + j] = (v[i + j] + x as i128 * y as i128).rem_euclid(self.modulus);
                }
            }
        }
        self.normalize(&v)
    }

    /// `sum_k coeffs[k] theta^k`.
    pub fn from_theta_polynomial(&self, coeffs: &[i64]) -> Vec<u32> {
        let mut acc = self.zero();
        let mut power = self.basis(1);
        for &c in coeffs {
            acc = self.add(&acc, &self.scalar_multiply(&power, c));
            power = self.theta_multiply(&power);
        }
        acc
    }

    /// All `p^{n-1}` normal forms in lexicographic order of coefficient vectors.
    pub fn elements(&self) -> impl Iterator<Item = Vec<u32>> + '_ {
        let d = self.dim();
        let total = (self.p as u64).pow(d as u32);
        (0..total).map(move |mut k| {
            let mut v = vec![0; d];
            for x in v.iter_mut().rev() {
                *x = (k % self.p as u64) as u32;
                k /= self.p as u64;
            }
            v
        })
    }

    pub fn random(&self, rng: &mut impl Rng) -> Vec<u32> {
        (0..self.dim()).map(|_| rng.gen_range(0..self.p)).collect()
    }

    /// Normal form of `p b_i` for `1 <= i <= n-1`.
    pub fn p_times_basis(&self, i: usize) -> Vec<u32> {
        self.scalar_multiply(&self.basis(i), self.p as i64)
    }
}

fn check_parameters(p: u32, n: usize) -> Result<()> {
    if n < 4 {
        return Err(Error::Precondition(format!("G'(p, n) needs n >= 4, got {n}")));
    }
    RingModule::new(p, n).map(|_| ())
}

fn labels(n: usize) -> Vec<String> {
    std::iter::once("s".to_string()).chain((1..n).map(|i| format!("s_{i}"))).collect()
}

/// The presentation of `G'(p, n)` on `s', s_1', ..., s_{n-1}'`.
pub fn build_blackburn_presentation(p: u32, n: usize) -> Result<PcPresentation> {
    check_parameters(p, n)?;
    let ring = RingModule::new(p, n)?;
    let mut pres = PcPresentation::new(p, n)?;
    pres.set_labels(labels(n))?;
    for i in 1..n {
        let mut tail = vec![0];
        tail.extend(ring.p_times_basis(i));
        pres.set_power_tail(i, Element::from_exponents(tail))?;
    }
    for j in 1..n - 1 {
        pres.set_commutator_tail(j, 0, Element::generator(n, j + 1))?;
    }
    Ok(pres)
}

/// `G'(p, n)`, checked for consistency.
pub fn build_blackburn_pc(p: u32, n: usize) -> Result<PcGroup> {
    let pres = build_blackburn_presentation(p, n)?;
    PcGroup::new(pres).map_err(|e| match e {
        Error::Inconsistent(msg) => Error::Inconsistent(format!("G'({p},{n}) presentation failed consistency: {msg}")),
        other => other,
    })
}

/// The abelian group `M` on `s_1', ..., s_{n-1}'` with the same power relations.
pub fn build_m_pc(p: u32, n: usize) -> Result<PcGroup> {
    check_parameters(p, n)?;
    let ring = RingModule::new(p, n)?;
    let mut pres = PcPresentation::new(p, n - 1)?;
    pres.set_labels((1..n).map(|i| format!("s_{i}")).collect())?;
    for i in 1..n {
        pres.set_power_tail(i - 1, Element::from_exponents(ring.p_times_basis(i)))?;
    }
    PcGroup::new(pres)
}

/// `M` as the subgroup `<s_1', ..., s_{n-1}'>` of `G'`.
pub fn m_subgroup(group: &PcGroup) -> Subgroup {
    Subgroup::tail_span(group, 1)
}

/// Dictionary from the ring model to `M`: coefficients become exponents of `s_i'`.
pub fn ring_to_m(coeffs: &[u32]) -> Element {
    Element::from_exponents(coeffs.to_vec())
}

/// The same dictionary into `G'`.
pub fn ring_to_g(coeffs: &[u32]) -> Element {
    let mut v = vec![0];
    v.extend_from_slice(coeffs);
    Element::from_exponents(v)
}

/// `sigma : s_i' -> s_i' s_{i+1}'` on `M`.
pub fn sigma(p: u32, n: usize) -> Result<(PcGroup, GroupMap)> {
    let m = build_m_pc(p, n)?;
    let d = n - 1;
    let images = (0..d)
        .map(|i| {
            let mut v = vec![0; d];
            v[i] = 1;
            if i + 1 < d {
                v[i + 1] = 1;
            }
            Element::from_exponents(v)
        })
        .collect();
    let map = check_homomorphism(&m, images)?;
    Ok((m, map))
}

#[derive(Clone, Debug, Serialize)]
pub struct SigmaReport {
    pub passed: bool,
    pub automorphism: bool,
    pub order: u64,
    pub matches_theta: bool,
}

/// `sigma` is an automorphism of order exactly `p` acting on each `s_i'` as `theta` acts on `b_i`.
pub fn verify_sigma(p: u32, n: usize) -> Result<SigmaReport> {
    let (m, s) = sigma(p, n)?;
    let ring = RingModule::new(p, n)?;
    let automorphism = s.is_automorphism();
    let order = if automorphism { s.order(&m, p as u64 * p as u64)? } else { 0 };
    let matches_theta =
        (1..n).all(|i| s.apply(&m, &ring_to_m(&ring.basis(i))) == ring_to_m(&ring.theta_multiply(&ring.basis(i))));
    Ok(SigmaReport {
        passed: automorphism && order == p as u64 && matches_theta,
        automorphism,
        order,
        matches_theta,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossModelReport {
    pub passed: bool,
    pub exhaustive: bool,
    pub seed: u64,
    pub pairs_checked: u64,
    pub elements_checked: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

/// Compare ring addition, negation and `theta` with multiplication, inversion and `sigma` in `M`.
pub fn cross_model_check(p: u32, n: usize, seed: u64, samples: usize) -> Result<CrossModelReport> {
    let ring = RingModule::new(p, n)?;
    let (m, s) = sigma(p, n)?;
    let g = build_blackburn_pc(p, n)?;
    let s_prime = g.generator(0);
    let size = (p as u64).checked_pow(ring.dim() as u32).unwrap_or(u64::MAX);
    let exhaustive = size <= EXHAUSTIVE_LIMIT;

    let check_one = |x: &[u32]| -> Option<String> {
        let mx = ring_to_m(x);
        if m.invert(&mx) != ring_to_m(&ring.negate(x)) {
            return Some(format!("negation of {x:?}"));
        }
        if s.apply(&m, &mx) != ring_to_m(&ring.theta_multiply(x)) {
            return Some(format!("sigma versus theta on {x:?}"));
        }
        // s' acts on M inside G' as sigma
        if g.conjugate(&ring_to_g(x), &s_prime) != ring_to_g(&ring.theta_multiply(x)) {
            return Some(format!("conjugation by s' versus theta on {x:?}"));
        }
        None
    };
    let check_pair = |x: &[u32], y: &[u32]| -> Option<String> {
        let sum = ring_to_m(&ring.add(x, y));
        (m.multiply(&ring_to_m(x), &ring_to_m(y)) != sum).then(|| format!("addition of {x:?} and {y:?}"))
    };

    let mut first_failure = None;
    let (pairs_checked, elements_checked);
    if exhaustive {
        let all: Vec<Vec<u32>> = ring.elements().collect();
        if all.iter().collect::<std::collections::HashSet<_>>().len() as u64 != size {
            first_failure = Some("ring normal forms are not distinct".into());
        }
        first_failure = first_failure.or_else(|| all.iter().find_map(|x| check_one(x)));
        first_failure = first_failure.or_else(|| all.iter().find_map(|x| all.iter().find_map(|y| check_pair(x, y))));
        elements_checked = size;
        pairs_checked = size * size;
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let x = ring.random(&mut rng);
            let y = ring.random(&mut rng);
            first_failure = check_one(&x).or_else(|| check_pair(&x, &y));
            if first_failure.is_some() {
                break;
            }
        }
        elements_checked = samples as u64;
        pairs_checked = samples as u64;
    }
    Ok(CrossModelReport {
        passed: first_failure.is_none(),
        exhaustive,
        seed,
        pairs_checked,
        elements_checked,
        first_failure,
    })
}

/// Orders of the cyclic factors of `M`, ascending, read off from `|p^k M|`.
pub fn abelian_invariants(p: u32, n: usize) -> Result<Vec<u64>> {
    let m = build_m_pc(p, n)?;
    let mut exps = vec![m.n()];
    let mut gens = m.generators();
    while *exps.last().expect("nonempty") > 0 {
        gens = gens.iter().map(|x| m.power_u64(x, p as u64)).collect();
        exps.push(Subgroup::generated(&m, &gens, false).order_exponent());
    }
    // factors of order at least p^{k+1}: exps[k] - exps[k+1]
    let at_least: Vec<usize> = exps.windows(2).map(|w| w[0] - w[1]).collect();
    let mut out = Vec::new();
    for k in 0..at_least.len() {
        let exactly = at_least[k] - at_least.get(k + 1).copied().unwrap_or(0);
        out.extend(std::iter::repeat_n((p as u64).pow(k as u32 + 1), exactly));
    }
    Ok(out)
}

/// The derivation of `G'` into `M` with `s' -> 1` and `s_1' -> f(theta) b_1`, where
/// `f = sum_k coeffs[k] theta^k`.
pub fn module_derivation_from_polynomial<'a>(
    space: &'a DerivationSpace<'a>,
    ring: &RingModule,
    coeffs: &[i64],
) -> Result<Derivation<'a>> {
    let profile: &MaxClassProfile = space.profile();
    let g = profile.group();
    if ring.p() != g.p() || ring.n() != g.n() {
        return Err(Error::Precondition("ring model does not match the group".into()));
    }
    if profile.s() != &g.generator(0) || profile.s1() != &g.generator(1) {
        return Err(Error::Precondition("group is not given on the standard generators of G'".into()));
    }
    if *space.target() != m_subgroup(g) {
        return Err(Error::Precondition("derivation target must be M".into()));
    }
    if coeffs.len() >= g.n() {
        return Err(Error::Precondition(format!("polynomial degree must be below {}", g.n() - 1)));
    }
    let v = ring_to_g(&ring.from_theta_polynomial(coeffs));
    space.make(&g.identity(), &v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn reduction_for_p5() {
        let ring = RingModule::new(5, 7).unwrap();
        // 5 b_1 = -(10 b_2 + 10 b_3 + 5 b_4 + b_5), then the 10s and 5 carry further
        let direct = ring.p_times_basis(1);
        let expanded = ring.normalize(&[0, -10, -10, -5, -1, 0]);
        assert_eq!(direct, expanded);
        assert_eq!(ring.theta_multiply(&ring.basis(2)), vec![0, 1, 1, 0, 0, 0]);
        assert_eq!(ring.theta_multiply(&ring.basis(6)), ring.basis(6));
    }

    #[test]
    fn ring_has_p_to_n_minus_1_elements_for_3_5() {
        let ring = RingModule::new(3, 5).unwrap();
        let all: std::collections::HashSet<_> = ring.elements().collect();
        assert_eq!(all.len(), 81);
        // every element is a fixed point of normalization
        for x in &all {
            let wide: Vec<i128> = x.iter().map(|&c| c as i128).collect();
            assert_eq!(&ring.normalize(&wide), x);
        }
    }

    #[test]
    fn theta_has_order_p() {
        for (p, n) in [(3, 5), (5, 7), (7, 9)] {
            let ring = RingModule::new(p, n).unwrap();
            let mut x = ring.basis(1);
            for _ in 0..p {
                x = ring.theta_multiply(&x);
            }
            assert_eq!(x, ring.basis(1));
        }
    }

    #[test]
    fn power_tail_of_s1_for_5_7() {
        let g = build_blackburn_pc(5, 7).unwrap();
        let ring = RingModule::new(5, 7).unwrap();
        let tail = g.power_u64(&g.generator(1), 5);
        let expected = ring.normalize(&[0, -10, -10, -5, -1, 0]);
        assert_eq!(tail, ring_to_g(&expected));
        assert!(g.power_u64(&g.generator(0), 5).is_identity());
    }

    #[test]
    fn naive_rewriting_oracle_for_a3_a1() {
        // s_1' s' = s' (s_1')^{s'} = s' s_1' s_2'
        let g = build_blackburn_pc(5, 7).unwrap();
        let w = crate::Word::new().letter(2, 1).letter(0, 1);
        assert_eq!(g.collect_word(&w).unwrap(), g.element(&[1, 0, 1, 1, 0, 0, 0]).unwrap());
    }

    #[test]
    fn construction_grid_is_maximal_class() {
        for (p, n) in [(3, 4), (3, 5), (5, 5), (5, 7)] {
            let g = build_blackburn_pc(p, n).unwrap();
            let prof = MaxClassProfile::analyze(g).unwrap();
            assert!(prof.metabelian());
            assert_eq!(prof.l(), n - 3);
            assert_eq!(prof.g1(), &m_subgroup(prof.group()));
        }
        assert!(build_blackburn_pc(5, 3).is_err());
    }

    #[test]
    fn sigma_has_order_p() {
        let r = verify_sigma(5, 7).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.order, 5);
    }

    #[test]
    fn cross_model_small() {
        let r = cross_model_check(3, 5, 1, 0).unwrap();
        assert!(r.passed && r.exhaustive);
        assert_eq!(r.pairs_checked, 81 * 81);
    }

    #[test]
    fn invariants_match_element_order_census() {
        for (p, n) in [(3, 5), (3, 6), (5, 7)] {
            let inv = abelian_invariants(p, n).unwrap();
            assert_eq!(inv.iter().product::<u64>(), (p as u64).pow(n as u32 - 1));
            // census oracle: number of elements of each order in the ring model
            let ring = RingModule::new(p, n).unwrap();
            let mut census: HashMap<u64, usize> = HashMap::new();
            for x in ring.elements() {
                let mut k = 1u64;
                let mut y = x.clone();
                while y.iter().any(|&c| c != 0) {
                    y = ring.add(&y, &x);
                    k += 1;
                }
                *census.entry(k).or_default() += 1;
            }
            // the same census for a direct product of cyclic groups
            let mut expected: HashMap<u64, usize> = HashMap::new();
            let total: u64 = inv.iter().product();
            for mut idx in 0..total {
                let mut ord = 1u64;
                for &q in &inv {
                    let c = idx % q;
                    idx /= q;
                    let o = q / gcd(c, q);
                    ord = ord.max(o);
                }
                *expected.entry(ord).or_default() += 1;
            }
            assert_eq!(census, expected, "p = {p}, n = {n}");
        }
    }

    fn gcd(a: u64, b: u64) -> u64 {
        if a == 0 {
            b
        } else {
            gcd(b % a, a)
        }
    }
}
