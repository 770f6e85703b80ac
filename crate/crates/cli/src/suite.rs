//! The verification suite behind `subdiff verify`.

use std::fmt::Write as _;

use crate::criteria::{extended_checks, known_shortfall, primary_criteria, CheckOptions, CheckOutcome, Criterion};

/// `Quick` runs the property checks only; `Full` adds the six reconstruction
/// experiments and the two long-running solver checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteLevel {
    Quick,
    Full,
}

impl SuiteLevel {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "quick" => Some(Self::Quick),
            "full" => Some(Self::Full),
            _ => None,
        }
    }
}

/// Outcomes in a fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub outcomes: Vec<CheckOutcome>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn failures(&self) -> Vec<&CheckOutcome> {
        self.outcomes.iter().filter(|o| !o.passed).collect()
    }

    /// One line per check, then a summary line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for o in &self.outcomes {
            let _ = writeln!(s, "{}", o.line());
            if let (false, Some(why)) = (o.passed, known_shortfall(o.name)) {
                let _ = writeln!(s, "    known shortfall: {why}");
            }
        }
        let failed = self.failures().len();
        let _ = writeln!(s, "{} of {} checks passed", self.outcomes.len() - failed, self.outcomes.len());
        s
    }
}

/// Checks run at each level, in order.
pub fn suite_checks(level: SuiteLevel) -> Vec<Criterion> {
    let primary = primary_criteria();
    match level {
        SuiteLevel::Quick => primary.into_iter().skip(4).collect(),
        SuiteLevel::Full => primary.into_iter().chain(extended_checks()).collect(),
    }
}

pub fn run_verification_suite(level: SuiteLevel, opts: &CheckOptions) -> SuiteReport {
    let outcomes = suite_checks(level)
        .iter()
        .map(|c| {
            log::info!("running {}", c.name);
            c.evaluate(opts)
        })
        .collect();
    SuiteReport { outcomes }
}
