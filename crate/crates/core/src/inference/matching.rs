use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::closure::{infer_closure, match_patterns, Binding};
use crate::ontology::{EntityKind, EntityRef, Fact, KnowledgeBase, OffenceOutcome, RuleKind};
use crate::pipeline::KeywordSet;

/// Concepts (G), rules (P) and relations reached from a keyword set.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchResult {
    pub concepts: BTreeSet<String>,
    pub rules: BTreeSet<String>,
    pub relations: BTreeSet<String>,
    pub term_hits: BTreeMap<String, BTreeSet<EntityRef>>,
}

impl MatchResult {
    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty() && self.rules.is_empty() && self.relations.is_empty()
    }
}

/// Candidate ground facts: every matched relation applied to every tuple of `concepts`
/// that fits the relation's declared parameter classes.
pub fn induce_facts(
    kb: &KnowledgeBase,
    relations: &BTreeSet<String>,
    concepts: &BTreeSet<String>,
) -> BTreeSet<Fact> {
    let mut out = BTreeSet::new();
    for key in relations {
        let Some(relation) = kb.relation_by_key(key) else {
            continue;
        };
        let slots: Vec<Vec<&String>> = relation
            .conc
            .iter()
            .map(|param| concepts.iter().filter(|c| kb.fits(c, param)).collect())
            .collect();
        let mut tuples: Vec<Vec<String>> = vec![Vec::new()];
        for slot in &slots {
            tuples = tuples
                .into_iter()
                .flat_map(|prefix| {
                    slot.iter().map(move |c| {
                        let mut next = prefix.clone();
                        next.push((*c).clone());
                        next
                    })
                })
                .collect();
        }
        out.extend(tuples.into_iter().map(|args| Fact {
            relation: key.clone(),
            args,
        }));
    }
    out
}

/// Keyword hits, their inferential closure, and the rules that touch them.
pub fn match_concepts_and_rules(keywords: &KeywordSet, kb: &KnowledgeBase) -> MatchResult {
    let mut result = MatchResult::default();
    for term in keywords.terms() {
        let hits = kb.lookup_by_keyword(term);
        if hits.is_empty() {
            continue;
        }
        for hit in &hits {
            match hit.kind {
                EntityKind::Concept => result.concepts.insert(hit.name.clone()),
                EntityKind::Relation => result.relations.insert(hit.name.clone()),
            };
        }
        result.term_hits.insert(term.to_owned(), hits);
    }

    let derived = infer_closure(kb, &induce_facts(kb, &result.relations, &result.concepts));
    for fact in &derived {
        for arg in &fact.args {
            if kb.concept_by_key(arg).is_some() {
                result.concepts.insert(arg.clone());
            }
        }
    }

    for rule in kb.rules() {
        let touches = rule.hypothesis.iter().any(|p| {
            result.relations.contains(&p.relation)
                || p.concepts().any(|c| result.concepts.contains(c))
        });
        if touches {
            result.rules.insert(rule.id.clone());
        }
    }
    result
}

/// An offence rule whose hypothesis holds, with every satisfying binding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OffenceMatch {
    pub rule_id: String,
    pub outcome: OffenceOutcome,
    pub bindings: BTreeSet<Binding>,
    pub hypothesis_facts: usize,
}

impl OffenceMatch {
    /// Concepts bound by any binding plus the rule's ground concept arguments.
    pub fn concepts(&self, kb: &KnowledgeBase) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = self
            .bindings
            .iter()
            .flat_map(|b| b.values().cloned())
            .collect();
        if let Some(rule) = kb.rule(&self.rule_id) {
            out.extend(
                rule.hypothesis
                    .iter()
                    .flat_map(|p| p.concepts().map(str::to_owned)),
            );
        }
        out
    }

    pub fn relations(&self, kb: &KnowledgeBase) -> BTreeSet<String> {
        kb.rule(&self.rule_id)
            .map(|r| r.hypothesis.iter().map(|p| p.relation.clone()).collect())
            .unwrap_or_default()
    }
}

/// Offence rules satisfiable over the closure of the facts induced by the match, with
/// variables bound to matched concepts only. Ordered by rule id.
pub fn find_offences(matched: &MatchResult, kb: &KnowledgeBase) -> Vec<OffenceMatch> {
    let facts = infer_closure(kb, &induce_facts(kb, &matched.relations, &matched.concepts));
    kb.rules_of_kind(RuleKind::Offence)
        .filter_map(|rule| {
            let outcome = rule.outcome()?;
            let bindings: BTreeSet<Binding> = match_patterns(&rule.hypothesis, &facts, kb)
                .into_iter()
                .filter(|b| b.values().all(|c| matched.concepts.contains(c)))
                .collect();
            (!bindings.is_empty()).then(|| OffenceMatch {
                rule_id: rule.id.clone(),
                outcome: outcome.clone(),
                bindings,
                hypothesis_facts: rule.hypothesis.len(),
            })
        })
        .collect()
}
