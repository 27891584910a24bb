use serde::{Deserialize, Serialize};

use crate::maxclass::MaxClassProfile;

/// Sampling and enumeration limits, echoed in every report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    /// pair families up to this size are enumerated in full
    pub exhaustive_pairs: u64,
    /// seeded pairs checked when a family is too large to enumerate
    pub samples: usize,
    /// pairs of family members checked for commutativity
    pub commutativity_pairs: u64,
    /// seeded members of the main1 family used as conjugators
    pub main1_conjugators: usize,
    /// seeded members conjugated in the closure check, beyond the generating members
    pub conjugation_samples: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            exhaustive_pairs: 1_000_000,
            samples: 1_000,
            commutativity_pairs: 10_000,
            main1_conjugators: 5,
            conjugation_samples: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub theorem: String,
    pub p: u32,
    pub n: usize,
    pub l: usize,
    pub r: usize,
    pub t: usize,
    pub metabelian: bool,
    pub seed: u64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub required_exponent: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub achieved_exponent: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub budgets: Budgets,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub(crate) fn new(theorem: &str, profile: &MaxClassProfile, seed: u64, budgets: &Budgets) -> Self {
        VerificationReport {
            theorem: theorem.into(),
            p: profile.p(),
            n: profile.n(),
            l: profile.l(),
            r: profile.r(),
            t: profile.t(),
            metabelian: profile.metabelian(),
            seed,
            passed: true,
            required_exponent: None,
            achieved_exponent: None,
            witness: None,
            budgets: budgets.clone(),
            checks: Vec::new(),
        }
    }

    pub(crate) fn record(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        let detail = detail.into();
        if !passed {
            self.passed = false;
            if self.witness.is_none() {
                self.witness = Some(format!("{name}: {detail}"));
            }
        }
        self.checks.push(CheckResult { name: name.into(), passed, detail });
    }

    /// Absorb the checks of a sub-report under a prefix.
    pub(crate) fn absorb(&mut self, prefix: &str, other: VerificationReport) {
        for c in other.checks {
            self.record(&format!("{prefix}.{}", c.name), c.passed, c.detail);
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("reports serialize")
    }
}
