//! Labeled-query evaluation in the layout of the original results table.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use lexsearch_core::{LegalRef, QueryClass, SearchEngine, Violation};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalRecord {
    pub text: String,
    pub label: QueryClass,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_ref: Option<LegalRef>,
}

/// Parses a queries file; out-of-scope records must not carry an expected citation.
pub fn parse_records(raw: &[u8]) -> Result<Vec<EvalRecord>, Vec<Violation>> {
    let records: Vec<EvalRecord> = serde_json::from_slice(raw).map_err(|e| {
        vec![Violation::new(
            "queries",
            "syntax",
            format!("line {}, column {}: {e}", e.line(), e.column()),
        )]
    })?;
    let violations: Vec<Violation> = records
        .iter()
        .enumerate()
        .filter(|(_, r)| r.label == QueryClass::OutOfScope && r.expected_ref.is_some())
        .map(|(i, _)| {
            Violation::new(
                format!("queries[{i}]"),
                "expected-ref",
                "out-of-scope records must not have expected_ref",
            )
        })
        .collect();
    if violations.is_empty() {
        Ok(records)
    } else {
        Err(violations)
    }
}

/// `round(100 * correct / total)` with halves rounded up; `None` when `total` is zero.
pub fn rate_percent(correct: usize, total: usize) -> Option<usize> {
    (total > 0).then(|| (200 * correct + total) / (2 * total))
}

pub fn render_rate(rate: Option<usize>) -> String {
    rate.map_or_else(|| "n/a".to_owned(), |r| format!("{r}%"))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub total: usize,
    pub correct: usize,
    /// Integer percent, absent when `total` is zero.
    pub rate: Option<usize>,
}

impl Tally {
    pub fn new(total: usize, correct: usize) -> Self {
        Tally {
            total,
            correct,
            rate: rate_percent(correct, total),
        }
    }

    fn add(&mut self, correct: bool) {
        *self = Tally::new(self.total + 1, self.correct + usize::from(correct));
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordOutcome {
    pub text: String,
    pub label: QueryClass,
    pub predicted: QueryClass,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_ref: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top_ref: Option<String>,
    /// Absent for out-of-scope records, which are not scored for retrieval.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retrieval_correct: Option<bool>,
}

/// Retrieval is scored on concept and penalty records only: correct iff the top item cites
/// the expected provision. Classification is scored on every record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub per_class: BTreeMap<QueryClass, Tally>,
    pub overall: Tally,
    pub classification: Tally,
    pub classification_accuracy: Option<f64>,
    pub records: Vec<RecordOutcome>,
}

pub fn evaluate(engine: &SearchEngine, records: &[EvalRecord]) -> EvalReport {
    let mut per_class: BTreeMap<QueryClass, Tally> = [QueryClass::Concept, QueryClass::Penalty]
        .into_iter()
        .map(|c| (c, Tally::default()))
        .collect();
    let mut overall = Tally::default();
    let mut classification = Tally::default();
    let mut outcomes = Vec::with_capacity(records.len());

    for record in records {
        let answer = engine.answer(&record.text);
        let top = answer.top().map(|item| &item.legal_ref);
        let retrieval_correct = match (&record.expected_ref, top) {
            (Some(expected), Some(top)) => expected.same_provision(top),
            _ => false,
        };
        classification.add(answer.query_class == record.label);
        let scored = per_class.get_mut(&record.label).map(|tally| {
            tally.add(retrieval_correct);
            overall.add(retrieval_correct);
            retrieval_correct
        });
        outcomes.push(RecordOutcome {
            text: record.text.clone(),
            label: record.label,
            predicted: answer.query_class,
            expected_ref: record.expected_ref.as_ref().map(LegalRef::to_string),
            top_ref: top.map(LegalRef::to_string),
            retrieval_correct: scored,
        });
    }

    EvalReport {
        per_class,
        overall,
        classification,
        classification_accuracy: (classification.total > 0)
            .then(|| classification.correct as f64 / classification.total as f64),
        records: outcomes,
    }
}

const ROW_LABELS: [(QueryClass, &str); 2] = [
    (QueryClass::Concept, "Queries about concepts / definitions"),
    (QueryClass::Penalty, "Queries about penalties and fines"),
];

impl EvalReport {
    /// Kind / Quantity / Correct / Rate table followed by classification accuracy.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let row = |out: &mut String, kind: &str, tally: &Tally| {
            let _ = writeln!(
                out,
                "{kind:<40}{:>10}{:>10}{:>8}",
                tally.total,
                tally.correct,
                render_rate(tally.rate)
            );
        };
        let _ = writeln!(
            out,
            "{:<40}{:>10}{:>10}{:>8}",
            "Kind", "Quantity", "Correct", "Rate"
        );
        for (class, label) in ROW_LABELS {
            row(
                &mut out,
                label,
                &self.per_class.get(&class).copied().unwrap_or_default(),
            );
        }
        row(&mut out, "Total", &self.overall);
        let _ = writeln!(
            out,
            "Classification accuracy: {}/{} ({})",
            self.classification.correct,
            self.classification.total,
            render_rate(self.classification.rate)
        );
        out
    }
}
