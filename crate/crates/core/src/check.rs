//! Named pass/fail records with exact witness values.

use alloc::string::String;
use alloc::vec::Vec;

use crate::ExactRatio;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Pass,
    Fail,
    /// Computed and shown, not asserted (claims with implicit constants).
    Reported,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Reported => "reported",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub witnesses: Vec<(String, ExactRatio)>,
}

impl Check {
    pub fn assert(name: impl Into<String>, ok: bool) -> Self {
        Check { name: name.into(), status: if ok { Status::Pass } else { Status::Fail }, witnesses: Vec::new() }
    }

    pub fn reported(name: impl Into<String>) -> Self {
        Check { name: name.into(), status: Status::Reported, witnesses: Vec::new() }
    }

    pub fn with(mut self, key: impl Into<String>, value: impl Into<ExactRatio>) -> Self {
        self.witnesses.push((key.into(), value.into()));
        self
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| !c.failed())
}
