use std::collections::BTreeSet;

use super::matching::{find_offences, match_concepts_and_rules, MatchResult};
use super::ranking::{rank_results, Answer, AnswerItem};
use crate::config::RankingWeights;
use crate::corpus::Corpus;
use crate::ontology::{EntityKind, EntityRef, KnowledgeBase};
use crate::pipeline::{
    expand_keywords, extract_keywords, KeywordSet, Lexicon, QueryClass, TermSource,
};

/// Answers a natural-language query end to end.
pub fn answer_query(
    kb: &KnowledgeBase,
    corpus: &Corpus,
    lexicon: &Lexicon,
    weights: &RankingWeights,
    text: &str,
) -> Answer {
    let (class, keywords) = extract_keywords(text, lexicon);
    let expanded = expand_keywords(&keywords, kb, lexicon);
    let candidates = match class {
        QueryClass::OutOfScope => return Answer::empty(class, expanded),
        QueryClass::Concept => {
            let matched = match_concepts_and_rules(&expanded, kb);
            concept_items(&matched, &expanded, kb, corpus)
        }
        QueryClass::Penalty => {
            let matched = match_concepts_and_rules(&expanded, kb);
            offence_items(&matched, &expanded, kb, corpus)
        }
    };
    rank_results(candidates, &expanded, class, weights)
}

fn matched_terms<'a>(
    keywords: &KeywordSet,
    entity_keywords: impl IntoIterator<Item = &'a BTreeSet<String>>,
) -> BTreeSet<String> {
    let pool: BTreeSet<&String> = entity_keywords.into_iter().flatten().collect();
    keywords
        .query_terms()
        .filter(|t| pool.iter().any(|k| k.as_str() == *t))
        .map(str::to_owned)
        .collect()
}

/// Concepts whose name the user typed (directly, corrected, or via a synonym) win. Without
/// one, concepts hit by those terms, and failing that, everything matched.
fn definition_targets(matched: &MatchResult, keywords: &KeywordSet) -> BTreeSet<String> {
    let direct: Vec<&str> = keywords
        .iter()
        .filter(|(_, s)| *s != TermSource::KbSimilar)
        .map(|(t, _)| t)
        .collect();
    let named: BTreeSet<String> = direct
        .iter()
        .filter(|t| matched.concepts.contains(**t))
        .map(|t| (*t).to_owned())
        .collect();
    if !named.is_empty() {
        return named;
    }
    let hit: BTreeSet<String> = direct
        .iter()
        .filter_map(|t| matched.term_hits.get(*t))
        .flatten()
        .filter(|e| e.kind == EntityKind::Concept)
        .map(|e| e.name.clone())
        .collect();
    if !hit.is_empty() {
        return hit;
    }
    matched.concepts.clone()
}

fn concept_items(
    matched: &MatchResult,
    keywords: &KeywordSet,
    kb: &KnowledgeBase,
    corpus: &Corpus,
) -> Vec<AnswerItem> {
    let mut items = Vec::new();
    for key in definition_targets(matched, keywords) {
        let Some(concept) = kb.concept_by_key(&key) else {
            continue;
        };
        for reference in concept.legal_refs() {
            let Ok(node) = corpus.resolve(reference) else {
                continue;
            };
            items.push(AnswerItem {
                query_class: QueryClass::Concept,
                summary: format!("{}: {}", concept.name, concept.meaning),
                provision: node.provision_text(),
                legal_ref: reference.clone(),
                penalty: None,
                matched_concepts: BTreeSet::from([key.clone()]),
                matched_rules: BTreeSet::new(),
                matched_terms: matched_terms(keywords, [&concept.keywords]),
                hypothesis_facts: None,
                key: key.clone(),
                score: 0.0,
            });
        }
    }
    items
}

fn offence_items(
    matched: &MatchResult,
    keywords: &KeywordSet,
    kb: &KnowledgeBase,
    corpus: &Corpus,
) -> Vec<AnswerItem> {
    find_offences(matched, kb)
        .into_iter()
        .filter_map(|offence| {
            let node = corpus.resolve(&offence.outcome.legal_ref).ok()?;
            let concepts = offence.concepts(kb);
            let relations = offence.relations(kb);
            let entities: Vec<EntityRef> = concepts
                .iter()
                .map(|c| EntityRef {
                    kind: EntityKind::Concept,
                    name: c.clone(),
                })
                .chain(relations.iter().map(|r| EntityRef {
                    kind: EntityKind::Relation,
                    name: r.clone(),
                }))
                .collect();
            let terms = matched_terms(
                keywords,
                entities.iter().filter_map(|e| kb.entity_keywords(e)),
            );
            Some(AnswerItem {
                query_class: QueryClass::Penalty,
                summary: offence.outcome.summary.clone(),
                provision: node.provision_text(),
                legal_ref: offence.outcome.legal_ref.clone(),
                penalty: Some(offence.outcome.penalty.clone()),
                matched_concepts: concepts,
                matched_rules: BTreeSet::from([offence.rule_id.clone()]),
                matched_terms: terms,
                hypothesis_facts: Some(offence.hypothesis_facts),
                key: offence.rule_id,
                score: 0.0,
            })
        })
        .collect()
}
