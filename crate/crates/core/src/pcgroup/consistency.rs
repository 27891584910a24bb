use std::fmt;

use super::collect::PcGroup;
use super::presentation::{Element, PcPresentation, Word};

/// One of the overlap tests for a weighted pc presentation (generator indices 0-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Overlap {
    /// `(a_k a_j) a_i = a_k (a_j a_i)` for `k > j > i`.
    Associativity { k: usize, j: usize, i: usize },
    /// `(a_j^p) a_i = a_j^{p-1} (a_j a_i)` for `j > i`.
    PowerLeft { j: usize, i: usize },
    /// `a_j (a_i^p) = (a_j a_i) a_i^{p-1}` for `j > i`.
    PowerRight { j: usize, i: usize },
    /// `(a_i^p) a_i = a_i (a_i^p)`.
    PowerSelf { i: usize },
}

impl fmt::Display for Overlap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Overlap::Associativity { k, j, i } => {
                write!(f, "(a{0} a{1}) a{2} = a{0} (a{1} a{2})", k + 1, j + 1, i + 1)
            }
            Overlap::PowerLeft { j, i } => write!(f, "(a{0}^p) a{1} = a{0}^(p-1) (a{0} a{1})", j + 1, i + 1),
            Overlap::PowerRight { j, i } => write!(f, "a{0} (a{1}^p) = (a{0} a{1}) a{1}^(p-1)", j + 1, i + 1),
            Overlap::PowerSelf { i } => write!(f, "(a{0}^p) a{0} = a{0} (a{0}^p)", i + 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverlapFailure {
    pub overlap: Overlap,
    pub left: Element,
    pub right: Element,
}

#[derive(Clone, Debug)]
pub struct ConsistencyReport {
    pub passed: bool,
    pub overlaps_checked: usize,
    pub first_failure: Option<OverlapFailure>,
}

impl ConsistencyReport {
    pub fn describe(&self) -> String {
        match &self.first_failure {
            None => format!("all {} overlaps agree", self.overlaps_checked),
            Some(f) => format!("overlap {} collects to {} vs {}", f.overlap, f.left, f.right),
        }
    }
}

/// Run the standard overlap tests; stops at the first disagreement.
pub fn consistency_check(pres: &PcPresentation) -> ConsistencyReport {
    let g = PcGroup::unchecked(pres.clone());
    let n = pres.n();
    let p = pres.p();
    let gen = |i| g.generator(i);
    let pow = |i, e| {
        let mut x = g.identity();
        x.0[i] = e;
        x
    };
    let pair = |j: usize, i: usize| g.collect_word(&Word::new().letter(j, 1).letter(i, 1)).expect("in range");

    let mut checked = 0;
    let mut check = |overlap: Overlap, left: Element, right: Element| -> Option<OverlapFailure> {
        checked += 1;
        (left != right).then_some(OverlapFailure { overlap, left, right })
    };

    let mut failure = None;
    'outer: {
        for k in 0..n {
            for j in 0..k {
                for i in 0..j {
                    let left = g.multiply(&pair(k, j), &gen(i));
                    let right = g.multiply(&gen(k), &pair(j, i));
                    if let Some(f) = check(Overlap::Associativity { k, j, i }, left, right) {
                        failure = Some(f);
                        break 'outer;
                    }
                }
            }
        }
        for j in 0..n {
            for i in 0..j {
                let left = g.multiply(pres.power_tail(j), &gen(i));
                let right = g.multiply(&pow(j, p - 1), &pair(j, i));
                if let Some(f) = check(Overlap::PowerLeft { j, i }, left, right) {
                    failure = Some(f);
                    break 'outer;
                }
                let left = g.multiply(&gen(j), pres.power_tail(i));
                let right = g.multiply(&pair(j, i), &pow(i, p - 1));
                if let Some(f) = check(Overlap::PowerRight { j, i }, left, right) {
                    failure = Some(f);
                    break 'outer;
                }
            }
        }
        for i in 0..n {
            let left = g.multiply(pres.power_tail(i), &gen(i));
            let right = g.multiply(&gen(i), pres.power_tail(i));
            if let Some(f) = check(Overlap::PowerSelf { i }, left, right) {
                failure = Some(f);
                break 'outer;
            }
        }
    }
    ConsistencyReport {
        passed: failure.is_none(),
        overlaps_checked: checked,
        first_failure: failure,
    }
}
