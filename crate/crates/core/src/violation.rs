use std::fmt;

use serde::{Deserialize, Serialize};

/// A broken invariant found while validating a corpus, knowledge base or lexicon.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Violation {
    /// The offending entity, e.g. a citation path or `concept:electric motorcycle`.
    pub subject: String,
    /// Short machine-readable rule name.
    pub rule: String,
    pub detail: String,
}

impl Violation {
    pub fn new(subject: impl Into<String>, rule: &str, detail: impl Into<String>) -> Self {
        Self {
            subject: subject.into(),
            rule: rule.to_owned(),
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]: {}", self.subject, self.rule, self.detail)
    }
}
