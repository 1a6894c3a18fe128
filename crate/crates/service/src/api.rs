//! Request and response bodies.

use std::collections::BTreeSet;

use lexsearch_core::corpus::Level;
use lexsearch_core::{Answer, AnswerItem, Penalty, TermSource, Violation};
use serde::{Deserialize, Serialize};

pub const MAX_TEXT_CHARS: usize = 1000;
pub const DEFAULT_MAX_RESULTS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryRequest {
    pub text: String,
    #[serde(default)]
    pub max_results: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseItem {
    pub query_class: String,
    pub summary: String,
    pub provision: String,
    /// Citation such as `QCVN 41:2019/Art.3/Cl.3.31`.
    pub legal_ref: String,
    /// Wire path accepted by `/provisions?ref=`.
    pub ref_path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub penalty: Option<Penalty>,
    pub score: f64,
    pub matched_concepts: BTreeSet<String>,
    pub matched_rules: BTreeSet<String>,
}

impl From<&AnswerItem> for ResponseItem {
    fn from(item: &AnswerItem) -> Self {
        ResponseItem {
            query_class: item.query_class.to_string(),
            summary: item.summary.clone(),
            provision: item.provision.clone(),
            legal_ref: item.legal_ref.to_string(),
            ref_path: item.legal_ref.wire_path(),
            penalty: item.penalty.clone(),
            score: item.score,
            matched_concepts: item.matched_concepts.clone(),
            matched_rules: item.matched_rules.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpandedKeyword {
    pub term: String,
    pub source: TermSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryResponse {
    pub query_class: String,
    pub items: Vec<ResponseItem>,
    pub expanded_keywords: Vec<ExpandedKeyword>,
    pub elapsed_ms: u64,
}

impl QueryResponse {
    pub fn new(answer: &Answer, max_results: usize, elapsed_ms: u64) -> Self {
        QueryResponse {
            query_class: answer.query_class.to_string(),
            items: answer
                .items
                .iter()
                .take(max_results)
                .map(ResponseItem::from)
                .collect(),
            expanded_keywords: answer
                .expanded_keywords
                .iter()
                .map(|(term, source)| ExpandedKeyword {
                    term: term.to_owned(),
                    source,
                })
                .collect(),
            elapsed_ms,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProvisionResponse {
    pub legal_ref: String,
    pub ref_path: String,
    pub document_id: String,
    pub document_title: String,
    pub level: Level,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heading: Option<String>,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HealthResponse {
    pub status: String,
    pub documents: usize,
    pub concepts: usize,
    pub relations: usize,
    pub rules: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<Violation>,
}
