use std::fmt;

use crate::error::{Error, Result};
use crate::pcgroup::{Element, PcGroup};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MapKind {
    Unvalidated,
    /// Validated homomorphism between two different presentations.
    Homomorphism,
    /// Validated homomorphism that is also bijective.
    Isomorphism,
    Endomorphism,
    Automorphism,
    Inner(Element),
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapKind::Unvalidated => f.write_str("unvalidated"),
            MapKind::Homomorphism => f.write_str("homomorphism"),
            MapKind::Isomorphism => f.write_str("isomorphism"),
            MapKind::Endomorphism => f.write_str("endomorphism"),
            MapKind::Automorphism => f.write_str("automorphism"),
            MapKind::Inner(g) => write!(f, "inner({g})"),
        }
    }
}

/// A map given by the images of the pc generators; maps act on the right, so
/// `a.then(b)` is `x -> (x a) b`.
#[derive(Clone, Debug)]
pub struct GroupMap {
    images: Vec<Element>,
    kind: MapKind,
}

impl PartialEq for GroupMap {
    fn eq(&self, other: &Self) -> bool {
        self.images == other.images
    }
}

impl Eq for GroupMap {}

impl GroupMap {
    pub fn unvalidated(images: Vec<Element>) -> Self {
        GroupMap { images, kind: MapKind::Unvalidated }
    }

    pub fn identity(group: &PcGroup) -> Self {
        GroupMap { images: group.generators(), kind: MapKind::Automorphism }
    }

    pub fn images(&self) -> &[Element] {
        &self.images
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    pub fn is_endomorphism(&self) -> bool {
        matches!(self.kind, MapKind::Endomorphism | MapKind::Automorphism | MapKind::Inner(_))
    }

    pub fn is_automorphism(&self) -> bool {
        matches!(self.kind, MapKind::Automorphism | MapKind::Inner(_))
    }

    pub fn is_identity(&self, group: &PcGroup) -> bool {
        self.images.iter().enumerate().all(|(k, x)| *x == group.generator(k))
    }

    /// Image of `x`, computed in `target` from the normal form of `x`.
    pub fn apply(&self, target: &PcGroup, x: &Element) -> Element {
        let mut out = target.identity();
        for (k, e) in x.letters() {
            out = target.multiply(&out, &target.power_u64(&self.images[k], e as u64));
        }
        out
    }

    /// `x -> (x self) other` on a single group.
    pub fn then(&self, group: &PcGroup, other: &GroupMap) -> GroupMap {
        let images = self.images.iter().map(|x| other.apply(group, x)).collect();
        let kind = match (&self.kind, &other.kind) {
            (MapKind::Inner(g), MapKind::Inner(h)) => MapKind::Inner(group.multiply(g, h)),
            _ if self.is_automorphism() && other.is_automorphism() => MapKind::Automorphism,
            _ if self.is_endomorphism() && other.is_endomorphism() => MapKind::Endomorphism,
            _ => MapKind::Unvalidated,
        };
        GroupMap { images, kind }
    }

    pub fn power(&self, group: &PcGroup, k: u64) -> GroupMap {
        let mut out = GroupMap::identity(group);
        if !self.is_automorphism() {
            out.kind = if self.is_endomorphism() { MapKind::Endomorphism } else { MapKind::Unvalidated };
        }
        for _ in 0..k {
            out = out.then(group, self);
        }
        out
    }

    /// Order of an automorphism, by repeated composition up to `cap`.
    pub fn order(&self, group: &PcGroup, cap: u64) -> Result<u64> {
        if !self.is_automorphism() {
            return Err(Error::Precondition("order is defined for automorphisms only".into()));
        }
        let mut x = self.clone();
        for k in 1..=cap {
            if x.is_identity(group) {
                return Ok(k);
            }
            x = x.then(group, self);
        }
        Err(Error::Caps(format!("automorphism order exceeds {cap}")))
    }

    /// Inverse of an automorphism; inner automorphisms invert directly, others by powering.
    pub fn inverse(&self, group: &PcGroup) -> Result<GroupMap> {
        if let MapKind::Inner(g) = &self.kind {
            return Ok(inner_automorphism(group, &group.invert(g)));
        }
        let order = self.order(group, 1 << 20)?;
        Ok(self.power(group, order - 1))
    }

    /// `other^{-1} self other`.
    pub fn conjugate_by(&self, group: &PcGroup, other: &GroupMap) -> Result<GroupMap> {
        Ok(other.inverse(group)?.then(group, self).then(group, other))
    }
}

/// Check every defining relation of `source` under the substitution `a_k -> images[k]` in `target`.
fn relation_failure(source: &PcGroup, target: &PcGroup, images: &[Element]) -> Option<String> {
    let pres = source.presentation();
    let map = GroupMap::unvalidated(images.to_vec());
    let p = source.p() as u64;
    for i in 0..source.n() {
        let lhs = target.power_u64(&images[i], p);
        let rhs = map.apply(target, pres.power_tail(i));
        if lhs != rhs {
            return Some(format!("a{}^p = {} maps to {} instead of {}", i + 1, pres.power_tail(i), lhs, rhs));
        }
    }
    for j in 0..source.n() {
        for i in 0..j {
            let lhs = target.commutator(&images[j], &images[i]);
            let rhs = map.apply(target, pres.commutator_tail(j, i));
            if lhs != rhs {
                return Some(format!(
                    "[a{}, a{}] = {} maps to {} instead of {}",
                    j + 1,
                    i + 1,
                    pres.commutator_tail(j, i),
                    lhs,
                    rhs
                ));
            }
        }
    }
    None
}

fn check_images(source: &PcGroup, target: &PcGroup, images: &[Element]) -> Result<()> {
    if images.len() != source.n() {
        return Err(Error::HomCheckFailed(format!("expected {} images, got {}", source.n(), images.len())));
    }
    if let Some(bad) = images.iter().find(|x| !target.is_element(x)) {
        return Err(Error::HomCheckFailed(format!("{bad} is not an element of the target")));
    }
    Ok(())
}

/// Validate `a_k -> images[k]` as an endomorphism; upgrades to automorphism when the images generate.
pub fn check_homomorphism(group: &PcGroup, images: Vec<Element>) -> Result<GroupMap> {
    check_images(group, group, &images)?;
    if let Some(reason) = relation_failure(group, group, &images) {
        return Err(Error::HomCheckFailed(reason));
    }
    let kind = if group.generates(&images) { MapKind::Automorphism } else { MapKind::Endomorphism };
    Ok(GroupMap { images, kind })
}

/// Validate `a_k -> images[k]` as a homomorphism from `source` to `target`.
pub fn check_homomorphism_between(source: &PcGroup, target: &PcGroup, images: Vec<Element>) -> Result<GroupMap> {
    check_images(source, target, &images)?;
    if let Some(reason) = relation_failure(source, target, &images) {
        return Err(Error::HomCheckFailed(reason));
    }
    let bijective = source.n() == target.n() && target.generates(&images);
    let kind = if bijective { MapKind::Isomorphism } else { MapKind::Homomorphism };
    Ok(GroupMap { images, kind })
}

/// `x -> x^g`.
pub fn inner_automorphism(group: &PcGroup, g: &Element) -> GroupMap {
    let images = group.generators().iter().map(|x| group.conjugate(x, g)).collect();
    GroupMap { images, kind: MapKind::Inner(g.clone()) }
}
