use std::fmt;

use serde::{Deserialize, Serialize};

/// One of the two candidates tracked by the pipeline.
///
/// Frames, polls and reports are always indexed in `[A, B]` order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Candidate {
    A,
    B,
}

impl Candidate {
    pub const ALL: [Candidate; 2] = [Candidate::A, Candidate::B];

    pub fn index(self) -> usize {
        match self {
            Candidate::A => 0,
            Candidate::B => 1,
        }
    }

    pub fn other(self) -> Candidate {
        match self {
            Candidate::A => Candidate::B,
            Candidate::B => Candidate::A,
        }
    }
}

impl fmt::Display for Candidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Candidate::A => f.write_str("A"),
            Candidate::B => f.write_str("B"),
        }
    }
}

/// Display names, used for polling columns and frame headers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateNames {
    pub a: String,
    pub b: String,
}

impl Default for CandidateNames {
    fn default() -> Self {
        Self {
            a: "Biden".to_string(),
            b: "Trump".to_string(),
        }
    }
}

impl CandidateNames {
    pub fn new(a: impl Into<String>, b: impl Into<String>) -> Self {
        Self {
            a: a.into(),
            b: b.into(),
        }
    }

    pub fn name(&self, candidate: Candidate) -> &str {
        match candidate {
            Candidate::A => &self.a,
            Candidate::B => &self.b,
        }
    }

    /// Resolves a user-supplied label: a display name (case-insensitive) or `a`/`b`.
    pub fn resolve(&self, label: &str) -> Option<Candidate> {
        let label = label.trim();
        if label.eq_ignore_ascii_case(&self.a) || label.eq_ignore_ascii_case("a") {
            Some(Candidate::A)
        } else if label.eq_ignore_ascii_case(&self.b) || label.eq_ignore_ascii_case("b") {
            Some(Candidate::B)
        } else {
            None
        }
    }
}
