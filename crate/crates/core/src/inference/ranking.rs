use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::config::RankingWeights;
use crate::corpus::LegalRef;
use crate::ontology::Penalty;
use crate::pipeline::{KeywordSet, QueryClass};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerItem {
    pub query_class: QueryClass,
    pub summary: String,
    pub provision: String,
    pub legal_ref: LegalRef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub penalty: Option<Penalty>,
    pub matched_concepts: BTreeSet<String>,
    pub matched_rules: BTreeSet<String>,
    /// Query-origin terms that are keywords of an entity behind this item.
    pub matched_terms: BTreeSet<String>,
    /// Hypothesis size of the offence rule; `None` for concept answers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypothesis_facts: Option<usize>,
    /// Rule id or concept key; last component of the sort key.
    pub key: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Answer {
    pub query_class: QueryClass,
    pub items: Vec<AnswerItem>,
    pub expanded_keywords: KeywordSet,
}

impl Answer {
    pub fn empty(query_class: QueryClass, expanded_keywords: KeywordSet) -> Self {
        Answer {
            query_class,
            items: Vec::new(),
            expanded_keywords,
        }
    }

    pub fn top(&self) -> Option<&AnswerItem> {
        self.items.first()
    }
}

/// Ranking order: score descending, then citation, then key.
pub fn compare_items(a: &AnswerItem, b: &AnswerItem) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then_with(|| a.legal_ref.to_string().cmp(&b.legal_ref.to_string()))
        .then_with(|| a.key.cmp(&b.key))
}

/// Scores and sorts candidates.
///
/// coverage = matched query-origin terms / query-origin terms; specificity = hypothesis
/// facts / the largest hypothesis among candidates, or 1 for items without a rule.
/// Candidates sharing a citation and key are collapsed into the first.
pub fn rank_results(
    candidates: Vec<AnswerItem>,
    keywords: &KeywordSet,
    query_class: QueryClass,
    weights: &RankingWeights,
) -> Answer {
    let query_terms: BTreeSet<&str> = keywords.query_terms().collect();
    let max_facts = candidates
        .iter()
        .filter_map(|c| c.hypothesis_facts)
        .max()
        .unwrap_or(0);

    let mut seen = BTreeSet::new();
    let mut items: Vec<AnswerItem> = candidates
        .into_iter()
        .filter(|c| seen.insert((c.legal_ref.address(), c.key.clone())))
        .map(|mut item| {
            let coverage = if query_terms.is_empty() {
                0.0
            } else {
                let hits = item
                    .matched_terms
                    .iter()
                    .filter(|t| query_terms.contains(t.as_str()))
                    .count();
                hits as f64 / query_terms.len() as f64
            };
            let specificity = match item.hypothesis_facts {
                Some(facts) if max_facts > 0 => facts as f64 / max_facts as f64,
                _ => 1.0,
            };
            item.score = (weights.coverage_weight * coverage
                + weights.specificity_weight * specificity)
                .clamp(0.0, 1.0);
            item
        })
        .collect();
    items.sort_by(compare_items);
    Answer {
        query_class,
        items,
        expanded_keywords: keywords.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::TermSource;

    fn item(doc: &str, key: &str, terms: &[&str], facts: Option<usize>) -> AnswerItem {
        AnswerItem {
            query_class: QueryClass::Penalty,
            summary: String::new(),
            provision: String::new(),
            legal_ref: LegalRef::article(doc, "1"),
            penalty: None,
            matched_concepts: BTreeSet::new(),
            matched_rules: BTreeSet::new(),
            matched_terms: terms.iter().map(|t| t.to_string()).collect(),
            hypothesis_facts: facts,
            key: key.into(),
            score: 0.0,
        }
    }

    fn keywords(terms: &[&str]) -> KeywordSet {
        let mut w: KeywordSet = terms.iter().map(|t| (*t, TermSource::Query)).collect();
        w.insert("expanded", TermSource::Synonym);
        w
    }

    #[test]
    fn single_candidate() {
        let a = rank_results(
            vec![item("d", "r1", &["x"], Some(1))],
            &keywords(&["x", "y"]),
            QueryClass::Penalty,
            &RankingWeights::default(),
        );
        assert_eq!(a.items.len(), 1);
        // 0.7 * 1/2 + 0.3 * 1/1
        assert!((a.items[0].score - 0.65).abs() < 1e-12);
    }

    #[test]
    fn higher_coverage_first() {
        // Hand-computed: coverage 1.0 -> 0.7 + 0.3 = 1.0; coverage 0.5 -> 0.35 + 0.3 = 0.65.
        let a = rank_results(
            vec![
                item("a", "half", &["x"], Some(2)),
                item("b", "full", &["x", "y"], Some(2)),
            ],
            &keywords(&["x", "y"]),
            QueryClass::Penalty,
            &RankingWeights::default(),
        );
        assert_eq!(a.items[0].key, "full");
        assert!((a.items[0].score - 1.0).abs() < 1e-12);
        assert!((a.items[1].score - 0.65).abs() < 1e-12);
    }

    #[test]
    fn specificity_is_relative_to_largest_hypothesis() {
        let a = rank_results(
            vec![
                item("a", "one", &["x"], Some(1)),
                item("b", "two", &["x"], Some(2)),
            ],
            &keywords(&["x"]),
            QueryClass::Penalty,
            &RankingWeights::default(),
        );
        assert_eq!(a.items[0].key, "two");
        assert!((a.items[1].score - (0.7 + 0.15)).abs() < 1e-12);
    }

    #[test]
    fn ties_break_on_citation_then_key() {
        let a = rank_results(
            vec![
                item("b", "r1", &["x"], None),
                item("a", "r9", &["x"], None),
                item("a", "r2", &["x"], None),
            ],
            &keywords(&["x"]),
            QueryClass::Concept,
            &RankingWeights::default(),
        );
        let order: Vec<_> = a.items.iter().map(|i| i.key.as_str()).collect();
        assert_eq!(order, ["r2", "r9", "r1"]);
    }

    #[test]
    fn duplicates_collapse() {
        let a = rank_results(
            vec![item("a", "r1", &["x"], None), item("a", "r1", &[], None)],
            &keywords(&["x"]),
            QueryClass::Concept,
            &RankingWeights::default(),
        );
        assert_eq!(a.items.len(), 1);
        assert_eq!(a.items[0].matched_terms.len(), 1);
    }
}
