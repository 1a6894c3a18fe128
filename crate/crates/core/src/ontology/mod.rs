//! The knowledge base: concepts, relations and rules, with a keyword index.

mod model;
mod validate;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use model::{
    AttrValue, Concept, Conclusion, EntityKind, EntityRef, Fact, FactPattern, OffenceOutcome,
    Penalty, Relation, RelationProperty, Rule, RuleKind, Term,
};
pub use validate::validate_kb;

use crate::corpus::{join_violations, Corpus};
use crate::snapshot::{self, SnapshotError, SnapshotFile};
use crate::text::normalize_term;
use crate::violation::Violation;

#[derive(Debug, Error)]
pub enum KbError {
    #[error("ontology syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("knowledge base invalid: {}", join_violations(.0))]
    Validation(Vec<Violation>),
    #[error(transparent)]
    Snapshot(#[from] SnapshotError),
    #[error("{kind:?} {name:?} not found")]
    NotFound { kind: EntityKind, name: String },
}

/// Ontology file as authored.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct OntologyFile {
    #[serde(default)]
    pub classes: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub concepts: Vec<Concept>,
    #[serde(default)]
    pub relations: Vec<Relation>,
    #[serde(default)]
    pub rules: Vec<Rule>,
}

impl OntologyFile {
    pub fn parse(raw: &[u8]) -> Result<Self, KbError> {
        if raw.iter().all(u8::is_ascii_whitespace) {
            return Ok(Self::default());
        }
        serde_json::from_slice(raw).map_err(|e| KbError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }
}

/// Serialised form of a knowledge base inside a snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct KbPayload {
    classes: BTreeMap<String, BTreeSet<String>>,
    concepts: Vec<Concept>,
    relations: Vec<Relation>,
    rules: Vec<Rule>,
    keyword_index: BTreeMap<String, BTreeSet<EntityRef>>,
}

type KeywordIndex = BTreeMap<String, BTreeSet<EntityRef>>;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KnowledgeBase {
    concepts: BTreeMap<String, Concept>,
    relations: BTreeMap<String, Relation>,
    rules: BTreeMap<String, Rule>,
    /// class -> direct subclasses
    classes: BTreeMap<String, BTreeSet<String>>,
    keyword_index: KeywordIndex,
    /// concept key -> every class it belongs to, itself included
    memberships: BTreeMap<String, BTreeSet<String>>,
}

impl KnowledgeBase {
    /// Parses an ontology file and builds a validated knowledge base against `corpus`.
    pub fn build(corpus: &Corpus, ontology_raw: &[u8]) -> Result<Self, KbError> {
        Self::from_file(corpus, OntologyFile::parse(ontology_raw)?)
    }

    pub fn from_file(corpus: &Corpus, file: OntologyFile) -> Result<Self, KbError> {
        let mut violations = Vec::new();

        let mut concepts = BTreeMap::new();
        for mut concept in file.concepts {
            concept.keywords = normalize_keywords(&concept.keywords);
            let key = concept.key();
            if concepts.insert(key.clone(), concept).is_some() {
                violations.push(Violation::new(
                    format!("concept:{key}"),
                    "duplicate-concept",
                    "concept name declared more than once",
                ));
            }
        }

        let mut relations = BTreeMap::new();
        for mut relation in file.relations {
            relation.conc = relation.conc.iter().map(|c| normalize_term(c)).collect();
            relation.keywords = normalize_keywords(&relation.keywords);
            let key = relation.key();
            if relations.insert(key.clone(), relation).is_some() {
                violations.push(Violation::new(
                    format!("relation:{key}"),
                    "duplicate-relation",
                    "relation name declared more than once",
                ));
            }
        }

        let mut rules = BTreeMap::new();
        for mut rule in file.rules {
            rule.hypothesis = rule
                .hypothesis
                .iter()
                .map(FactPattern::normalized)
                .collect();
            if let Conclusion::Infer(pattern) = &mut rule.conclusion {
                *pattern = pattern.normalized();
            }
            let id = rule.id.clone();
            if rules.insert(id.clone(), rule).is_some() {
                violations.push(Violation::new(
                    format!("rule:{id}"),
                    "duplicate-rule",
                    "rule id declared more than once",
                ));
            }
        }

        let classes = file
            .classes
            .iter()
            .map(|(class, subs)| {
                (
                    normalize_term(class),
                    subs.iter().map(|s| normalize_term(s)).collect(),
                )
            })
            .collect();

        let kb = Self::assemble(concepts, relations, rules, classes);
        violations.extend(validate_kb(&kb, corpus));
        if violations.is_empty() {
            Ok(kb)
        } else {
            violations.sort();
            Err(KbError::Validation(violations))
        }
    }

    fn assemble(
        concepts: BTreeMap<String, Concept>,
        relations: BTreeMap<String, Relation>,
        rules: BTreeMap<String, Rule>,
        classes: BTreeMap<String, BTreeSet<String>>,
    ) -> Self {
        let keyword_index = build_index(&concepts, &relations);
        let memberships = concepts
            .iter()
            .map(|(key, concept)| (key.clone(), class_memberships(key, concept, &classes)))
            .collect();
        KnowledgeBase {
            concepts,
            relations,
            rules,
            classes,
            keyword_index,
            memberships,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty() && self.relations.is_empty() && self.rules.is_empty()
    }

    pub fn concepts(&self) -> impl Iterator<Item = (&str, &Concept)> {
        self.concepts.iter().map(|(k, c)| (k.as_str(), c))
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, &Relation)> {
        self.relations.iter().map(|(k, r)| (k.as_str(), r))
    }

    pub fn rules(&self) -> impl Iterator<Item = &Rule> {
        self.rules.values()
    }

    pub fn rules_of_kind(&self, kind: RuleKind) -> impl Iterator<Item = &Rule> {
        self.rules.values().filter(move |r| r.kind() == kind)
    }

    pub fn classes(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.classes
    }

    pub fn concept_count(&self) -> usize {
        self.concepts.len()
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }

    pub fn rule_count(&self) -> usize {
        self.rules.len()
    }

    /// Case-insensitive lookup on the normalised name.
    pub fn get_concept(&self, name: &str) -> Result<&Concept, KbError> {
        self.concepts
            .get(&normalize_term(name))
            .ok_or_else(|| KbError::NotFound {
                kind: EntityKind::Concept,
                name: name.to_owned(),
            })
    }

    pub fn get_relation(&self, name: &str) -> Result<&Relation, KbError> {
        self.relations
            .get(&normalize_term(name))
            .ok_or_else(|| KbError::NotFound {
                kind: EntityKind::Relation,
                name: name.to_owned(),
            })
    }

    pub fn rule(&self, id: &str) -> Option<&Rule> {
        self.rules.get(id)
    }

    pub fn concept_by_key(&self, key: &str) -> Option<&Concept> {
        self.concepts.get(key)
    }

    pub fn relation_by_key(&self, key: &str) -> Option<&Relation> {
        self.relations.get(key)
    }

    /// Entities whose keyword set contains `term` exactly. `term` must already be normalised.
    pub fn lookup_by_keyword(&self, term: &str) -> BTreeSet<EntityRef> {
        self.keyword_index.get(term).cloned().unwrap_or_default()
    }

    pub fn keywords(&self) -> impl Iterator<Item = &str> {
        self.keyword_index.keys().map(String::as_str)
    }

    pub fn entity_keywords(&self, entity: &EntityRef) -> Option<&BTreeSet<String>> {
        match entity.kind {
            EntityKind::Concept => self.concepts.get(&entity.name).map(|c| &c.keywords),
            EntityKind::Relation => self.relations.get(&entity.name).map(|r| &r.keywords),
        }
    }

    /// Classes `concept` belongs to: itself, its `kind`, and every superclass of that kind.
    pub fn memberships(&self, concept: &str) -> Option<&BTreeSet<String>> {
        self.memberships.get(concept)
    }

    /// Whether `concept` belongs to `class`.
    pub fn fits(&self, concept: &str, class: &str) -> bool {
        self.memberships
            .get(concept)
            .is_some_and(|classes| classes.contains(class))
    }

    /// Every name usable as a class constraint.
    pub(crate) fn known_classes(&self) -> BTreeSet<String> {
        let mut known: BTreeSet<String> = self.classes.keys().cloned().collect();
        known.extend(self.classes.values().flatten().cloned());
        known.extend(self.memberships.values().flatten().cloned());
        known
    }

    pub(crate) fn stored_index(&self) -> &KeywordIndex {
        &self.keyword_index
    }

    pub(crate) fn rebuilt_index(&self) -> KeywordIndex {
        build_index(&self.concepts, &self.relations)
    }

    pub(crate) fn to_payload(&self) -> KbPayload {
        KbPayload {
            classes: self.classes.clone(),
            concepts: self.concepts.values().cloned().collect(),
            relations: self.relations.values().cloned().collect(),
            rules: self.rules.values().cloned().collect(),
            keyword_index: self.keyword_index.clone(),
        }
    }

    pub(crate) fn from_payload(payload: KbPayload) -> Result<Self, SnapshotError> {
        let corrupt = |what: &str| SnapshotError::Corrupt(what.to_owned());
        let mut concepts = BTreeMap::new();
        for concept in payload.concepts {
            if concepts.insert(concept.key(), concept).is_some() {
                return Err(corrupt("duplicate concept"));
            }
        }
        let mut relations = BTreeMap::new();
        for relation in payload.relations {
            if relations.insert(relation.key(), relation).is_some() {
                return Err(corrupt("duplicate relation"));
            }
        }
        let mut rules = BTreeMap::new();
        for rule in payload.rules {
            if rules.insert(rule.id.clone(), rule).is_some() {
                return Err(corrupt("duplicate rule"));
            }
        }
        let kb = Self::assemble(concepts, relations, rules, payload.classes);
        if kb.keyword_index != payload.keyword_index {
            return Err(corrupt(
                "stored keyword index does not match entity keywords",
            ));
        }
        Ok(kb)
    }

    /// Versioned snapshot bytes.
    pub fn snapshot(&self) -> Vec<u8> {
        snapshot::encode(&SnapshotFile {
            kb: self.to_payload(),
            corpus: None,
            lexicon: None,
        })
    }

    pub fn load_snapshot(raw: &[u8]) -> Result<Self, KbError> {
        let file = snapshot::decode(raw)?;
        Ok(Self::from_payload(file.kb)?)
    }
}

fn normalize_keywords(keywords: &BTreeSet<String>) -> BTreeSet<String> {
    keywords
        .iter()
        .map(|k| normalize_term(k))
        .filter(|k| !k.is_empty())
        .collect()
}

fn build_index(
    concepts: &BTreeMap<String, Concept>,
    relations: &BTreeMap<String, Relation>,
) -> KeywordIndex {
    let mut index = KeywordIndex::new();
    for (key, concept) in concepts {
        for keyword in &concept.keywords {
            index.entry(keyword.clone()).or_default().insert(EntityRef {
                kind: EntityKind::Concept,
                name: key.clone(),
            });
        }
    }
    for (key, relation) in relations {
        for keyword in &relation.keywords {
            index.entry(keyword.clone()).or_default().insert(EntityRef {
                kind: EntityKind::Relation,
                name: key.clone(),
            });
        }
    }
    index
}

fn class_memberships(
    key: &str,
    concept: &Concept,
    classes: &BTreeMap<String, BTreeSet<String>>,
) -> BTreeSet<String> {
    let mut out = BTreeSet::from([key.to_owned()]);
    let Some(kind) = concept.kind().map(normalize_term) else {
        return out;
    };
    let mut visited = BTreeSet::new();
    let mut queue = VecDeque::from([kind]);
    while let Some(class) = queue.pop_front() {
        if !visited.insert(class.clone()) {
            continue;
        }
        for (parent, subs) in classes {
            if subs.contains(&class) {
                queue.push_back(parent.clone());
            }
        }
        out.insert(class);
    }
    out
}
