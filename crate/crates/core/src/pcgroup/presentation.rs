use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest prime accepted. Keeps every binomial C(p, k) inside `i64`.
pub const MAX_PRIME: u32 = 61;
/// Largest number of pc generators accepted.
pub const MAX_GENERATORS: usize = 64;

/// A group element in normal form `a_1^{e_1} ... a_n^{e_n}`, each exponent in `[0, p)`.
///
/// Generator indices are 0-based in the API and 1-based in files and reports.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element(pub(crate) Vec<u32>);

impl Element {
    pub fn identity(n: usize) -> Self {
        Element(vec![0; n])
    }

    /// The pc generator `a_index`.
    pub fn generator(n: usize, index: usize) -> Self {
        let mut e = vec![0; n];
        e[index] = 1;
        Element(e)
    }

    pub fn from_exponents(exponents: Vec<u32>) -> Self {
        Element(exponents)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Index of the first nonzero exponent, or `None` for the identity.
    pub fn depth(&self) -> Option<usize> {
        self.0.iter().position(|&e| e != 0)
    }

    /// Nonzero `(generator, exponent)` pairs in increasing generator order.
    pub fn letters(&self) -> impl DoubleEndedIterator<Item = (usize, u32)> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e != 0)
            .map(|(i, &e)| (i, e))
    }

    pub(crate) fn support_starts_after(&self, index: usize) -> bool {
        self.0[..=index].iter().all(|&e| e == 0)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, e) in self.letters() {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "a{}", i + 1)?;
            } else {
                write!(f, "a{}^{}", i + 1, e)?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// A word in the pc generators with signed exponents, read left to right.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Word(pub Vec<(usize, i64)>);

impl Word {
    pub fn new() -> Self {
        Word(Vec::new())
    }

    pub fn letter(mut self, index: usize, exponent: i64) -> Self {
        self.0.push((index, exponent));
        self
    }
}

impl From<&Element> for Word {
    fn from(e: &Element) -> Self {
        Word(e.letters().map(|(i, x)| (i, x as i64)).collect())
    }
}

/// A power-commutator presentation of a finite p-group of order `p^n`.
///
/// Relations are `a_i^p = power_tail(i)` with support beyond `i`, and
/// `[a_j, a_i] = commutator_tail(j, i)` for `j > i` with support beyond `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PcPresentation {
    p: u32,
    n: usize,
    labels: Vec<String>,
    power_tails: Vec<Element>,
    // comm[j][i] for i < j
    commutator_tails: Vec<Vec<Element>>,
}

pub(crate) fn is_prime(p: u32) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

impl PcPresentation {
    /// Elementary abelian presentation: every tail trivial.
    pub fn new(p: u32, n: usize) -> Result<Self> {
        if !is_prime(p) || p < 3 {
            return Err(Error::InvalidPresentation(format!("p = {p} must be an odd prime")));
        }
        if p > MAX_PRIME {
            return Err(Error::Caps(format!("p = {p} exceeds {MAX_PRIME}")));
        }
        if n == 0 || n > MAX_GENERATORS {
            return Err(Error::Caps(format!("n = {n} outside 1..={MAX_GENERATORS}")));
        }
        Ok(PcPresentation {
            p,
            n,
            labels: (1..=n).map(|i| format!("a{i}")).collect(),
            power_tails: vec![Element::identity(n); n],
            commutator_tails: (0..n).map(|j| vec![Element::identity(n); j]).collect(),
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn set_labels(&mut self, labels: Vec<String>) -> Result<()> {
        if labels.len() != self.n {
            return Err(Error::InvalidPresentation(format!(
                "{} labels for {} generators",
                labels.len(),
                self.n
            )));
        }
        self.labels = labels;
        Ok(())
    }

    pub fn power_tail(&self, i: usize) -> &Element {
        &self.power_tails[i]
    }

    /// Tail of `[a_j, a_i]`, requires `j > i`.
    pub fn commutator_tail(&self, j: usize, i: usize) -> &Element {
        &self.commutator_tails[j][i]
    }

    fn check_tail(&self, tail: &Element, after: usize, what: &str) -> Result<()> {
        if tail.len() != self.n {
            return Err(Error::BadElement { got: tail.len(), expected: self.n });
        }
        if tail.0.iter().any(|&e| e >= self.p) {
            return Err(Error::InvalidPresentation(format!("{what}: exponent not reduced mod {}", self.p)));
        }
        if !tail.support_starts_after(after) {
            return Err(Error::InvalidPresentation(format!(
                "{what}: tail {tail} must be supported beyond a{}",
                after + 1
            )));
        }
        Ok(())
    }

    pub fn set_power_tail(&mut self, i: usize, tail: Element) -> Result<()> {
        if i >= self.n {
            return Err(Error::IndexOutOfRange { index: i, n: self.n });
        }
        self.check_tail(&tail, i, &format!("power tail of a{}", i + 1))?;
        self.power_tails[i] = tail;
        Ok(())
    }

    pub fn set_commutator_tail(&mut self, j: usize, i: usize, tail: Element) -> Result<()> {
        if j >= self.n {
            return Err(Error::IndexOutOfRange { index: j, n: self.n });
        }
        if i >= j {
            return Err(Error::InvalidPresentation(format!(
                "commutator [a{}, a{}] needs j > i",
                j + 1,
                i + 1
            )));
        }
        self.check_tail(&tail, j, &format!("commutator tail [a{}, a{}]", j + 1, i + 1))?;
        self.commutator_tails[j][i] = tail;
        Ok(())
    }

    /// Presentation of `G / <a_{k+1}, ..., a_n>` on the first `k` generators.
    ///
    /// The trailing generators always span a normal subgroup, so truncating the tails
    /// gives a consistent presentation whenever `self` is consistent.
    pub fn truncate(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.n {
            return Err(Error::Precondition(format!("cannot keep {k} of {} generators", self.n)));
        }
        let cut = |e: &Element| Element(e.0[..k].to_vec());
        Ok(PcPresentation {
            p: self.p,
            n: k,
            labels: self.labels[..k].to_vec(),
            power_tails: self.power_tails[..k].iter().map(cut).collect(),
            commutator_tails: self.commutator_tails[..k]
                .iter()
                .map(|row| row.iter().map(cut).collect())
                .collect(),
        })
    }

    /// True when every commutator tail is trivial.
    pub fn is_abelian_presentation(&self) -> bool {
        self.commutator_tails.iter().flatten().all(Element::is_identity)
    }

    pub fn to_file_string(&self) -> String {
        let file = GroupFile {
            p: self.p,
            n: self.n,
            labels: self.labels.clone(),
            power_tails: self.power_tails.iter().map(|e| e.0.clone()).collect(),
            commutator: (0..self.n)
                .flat_map(|j| (0..j).map(move |i| (j, i)))
                .map(|(j, i)| CommutatorRow {
                    pair: [j + 1, i + 1],
                    tail: self.commutator_tails[j][i].0.clone(),
                })
                .collect(),
        };
        let mut out = String::from("# power-commutator presentation; generators are 1-based\n");
        out.push_str(&toml::to_string(&file).expect("group file serializes"));
        out
    }

    pub fn from_file_str(text: &str) -> Result<Self> {
        let file: GroupFile = toml::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        let mut pres = PcPresentation::new(file.p, file.n)?;
        if file.n != file.labels.len() && !file.labels.is_empty() {
            return Err(Error::Format(format!("expected {} labels", file.n)));
        }
        if !file.labels.is_empty() {
            pres.set_labels(file.labels)?;
        }
        if file.power_tails.len() != file.n {
            return Err(Error::Format(format!(
                "expected {} power_tails rows, found {}",
                file.n,
                file.power_tails.len()
            )));
        }
        for (i, row) in file.power_tails.into_iter().enumerate() {
            pres.set_power_tail(i, Element(row))?;
        }
        for row in file.commutator {
            let [j, i] = row.pair;
            if i == 0 || j == 0 {
                return Err(Error::Format("commutator pairs are 1-based".into()));
            }
            pres.set_commutator_tail(j - 1, i - 1, Element(row.tail))?;
        }
        Ok(pres)
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        Self::from_file_str(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_file_string())?;
        Ok(())
    }
}

/// On-disk schema of a group file. Pairs absent from `commutator` are trivial.
#[derive(Serialize, Deserialize)]
struct GroupFile {
    p: u32,
    n: usize,
    #[serde(default)]
    labels: Vec<String>,
    power_tails: Vec<Vec<u32>>,
    #[serde(default)]
    commutator: Vec<CommutatorRow>,
}

#[derive(Serialize, Deserialize)]
struct CommutatorRow {
    pair: [usize; 2],
    tail: Vec<u32>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_primes_and_caps() {
        assert!(PcPresentation::new(4, 3).is_err());
        assert!(PcPresentation::new(2, 3).is_err());
        assert!(matches!(PcPresentation::new(67, 3), Err(Error::Caps(_))));
        assert!(matches!(PcPresentation::new(5, 65), Err(Error::Caps(_))));
    }

    #[test]
    fn tails_must_respect_weights() {
        let mut p = PcPresentation::new(5, 4).unwrap();
        assert!(p.set_power_tail(1, Element(vec![0, 1, 0, 0])).is_err());
        assert!(p.set_power_tail(1, Element(vec![0, 0, 5, 0])).is_err());
        assert!(p.set_commutator_tail(2, 1, Element(vec![0, 0, 1, 0])).is_err());
        assert!(p.set_commutator_tail(1, 2, Element(vec![0, 0, 0, 1])).is_err());
        p.set_commutator_tail(2, 0, Element(vec![0, 0, 0, 3])).unwrap();
        assert_eq!(p.commutator_tail(2, 0).exponents(), &[0, 0, 0, 3]);
    }

    #[test]
    fn file_round_trip() {
        let mut p = PcPresentation::new(3, 4).unwrap();
        p.set_commutator_tail(1, 0, Element(vec![0, 0, 1, 0])).unwrap();
        p.set_commutator_tail(2, 0, Element(vec![0, 0, 0, 1])).unwrap();
        p.set_power_tail(1, Element(vec![0, 0, 0, 2])).unwrap();
        let text = p.to_file_string();
        assert_eq!(PcPresentation::from_file_str(&text).unwrap(), p);
    }

    #[test]
    fn file_rejects_bad_support() {
        let text = "p = 5\nn = 2\npower_tails = [[0,0],[0,0]]\n[[commutator]]\npair = [2, 1]\ntail = [1, 0]\n";
        assert!(PcPresentation::from_file_str(text).is_err());
    }
}
