//! Human and JSON renderings of an [`Answer`].

use std::fmt::Write as _;

use lexsearch_core::{Answer, Penalty, QueryClass, TermSource};

/// `1234567` as `1,234,567`.
pub fn group_thousands(n: i64) -> String {
    let digits = n.unsigned_abs().to_string();
    let mut out = String::with_capacity(digits.len() + digits.len() / 3 + 1);
    if n < 0 {
        out.push('-');
    }
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(ch);
    }
    out
}

pub fn fine_range(penalty: &Penalty) -> Option<String> {
    match (penalty.fine_min, penalty.fine_max) {
        (Some(lo), Some(hi)) if lo == hi => Some(format!("{} VND", group_thousands(lo))),
        (Some(lo), Some(hi)) => Some(format!(
            "{}-{} VND",
            group_thousands(lo),
            group_thousands(hi)
        )),
        (Some(lo), None) => Some(format!("from {} VND", group_thousands(lo))),
        (None, Some(hi)) => Some(format!("up to {} VND", group_thousands(hi))),
        (None, None) => None,
    }
}

fn source_label(source: TermSource) -> &'static str {
    match source {
        TermSource::Query => "query",
        TermSource::TypoCorrected => "corrected",
        TermSource::Synonym => "synonym",
        TermSource::KbSimilar => "related",
    }
}

/// Pretty JSON of the whole answer. Contains no timings, so equal inputs give equal bytes.
pub fn answer_json(answer: &Answer) -> String {
    let mut out = serde_json::to_string_pretty(answer).expect("answer serializes");
    out.push('\n');
    out
}

pub fn answer_table(answer: &Answer) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Class: {}", answer.query_class);
    let keywords: Vec<String> = answer
        .expanded_keywords
        .iter()
        .map(|(term, source)| format!("{term} ({})", source_label(source)))
        .collect();
    let _ = writeln!(out, "Keywords: {}", keywords.join(", "));

    if answer.query_class == QueryClass::OutOfScope {
        let _ = writeln!(
            out,
            "The query asks neither for a definition nor for a penalty; no provisions returned."
        );
        return out;
    }
    if answer.items.is_empty() {
        let _ = writeln!(out, "No matching provisions.");
        return out;
    }
    for (rank, item) in answer.items.iter().enumerate() {
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{}. {}  (score {:.3})",
            rank + 1,
            item.legal_ref,
            item.score
        );
        let _ = writeln!(out, "   {}", item.summary);
        if let Some(penalty) = &item.penalty {
            if let Some(range) = fine_range(penalty) {
                let _ = writeln!(out, "   Fine: {range} ({})", penalty.subject);
            }
            for extra in &penalty.supplementary {
                let _ = writeln!(out, "   Also: {extra}");
            }
        }
        let _ = writeln!(out, "   {}", item.provision);
    }
    out
}
