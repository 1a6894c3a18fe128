use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::join_violations;
use crate::ontology::KnowledgeBase;
use crate::text::normalize_term;
use crate::violation::Violation;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("lexicon syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("lexicon invalid: {}", join_violations(.0))]
    Validation(Vec<Violation>),
}

fn default_concept_markers() -> Vec<String> {
    ["what is", "define", "meaning of", "definition of"]
        .map(String::from)
        .to_vec()
}

fn default_penalty_markers() -> Vec<String> {
    ["fine", "fines", "penalty", "penalties", "how much"]
        .map(String::from)
        .to_vec()
}

/// Lexicon file as authored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconFile {
    #[serde(default)]
    pub stop_words: Vec<String>,
    #[serde(default)]
    pub synonym_groups: Vec<Vec<String>>,
    #[serde(default = "default_concept_markers")]
    pub concept_markers: Vec<String>,
    #[serde(default = "default_penalty_markers")]
    pub penalty_markers: Vec<String>,
}

impl Default for LexiconFile {
    fn default() -> Self {
        Self {
            stop_words: Vec::new(),
            synonym_groups: Vec::new(),
            concept_markers: default_concept_markers(),
            penalty_markers: default_penalty_markers(),
        }
    }
}

impl LexiconFile {
    pub fn parse(raw: &[u8]) -> Result<Self, LexiconError> {
        serde_json::from_slice(raw).map_err(|e| LexiconError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }
}

/// Stop words, synonym groups, intent markers, and the vocabulary used for phrase
/// merging and typo correction. The vocabulary is the union of KB keywords, markers and
/// synonym members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    stop_words: BTreeSet<String>,
    synonyms: Vec<BTreeSet<String>>,
    concept_markers: Vec<String>,
    penalty_markers: Vec<String>,
    vocabulary: BTreeSet<String>,
    max_phrase_words: usize,
}

fn normalize_list(items: &[String]) -> Vec<String> {
    let mut seen = BTreeSet::new();
    items
        .iter()
        .map(|s| normalize_term(s))
        .filter(|s| !s.is_empty() && seen.insert(s.clone()))
        .collect()
}

impl Lexicon {
    pub fn new(file: &LexiconFile, kb: &KnowledgeBase) -> Result<Self, LexiconError> {
        let lexicon = Self::assemble(file, kb);
        let violations = lexicon.validate();
        if violations.is_empty() {
            Ok(lexicon)
        } else {
            Err(LexiconError::Validation(violations))
        }
    }

    fn assemble(file: &LexiconFile, kb: &KnowledgeBase) -> Self {
        let stop_words = normalize_list(&file.stop_words).into_iter().collect();
        let synonyms: Vec<BTreeSet<String>> = file
            .synonym_groups
            .iter()
            .map(|group| normalize_list(group).into_iter().collect())
            .collect();
        let concept_markers = normalize_list(&file.concept_markers);
        let penalty_markers = normalize_list(&file.penalty_markers);

        let mut vocabulary: BTreeSet<String> = kb.keywords().map(str::to_owned).collect();
        vocabulary.extend(concept_markers.iter().cloned());
        vocabulary.extend(penalty_markers.iter().cloned());
        vocabulary.extend(synonyms.iter().flatten().cloned());
        let max_phrase_words = vocabulary
            .iter()
            .map(|t| t.split(' ').count())
            .max()
            .unwrap_or(1);

        Lexicon {
            stop_words,
            synonyms,
            concept_markers,
            penalty_markers,
            vocabulary,
            max_phrase_words,
        }
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.concept_markers.is_empty() {
            out.push(Violation::new(
                "lexicon",
                "markers",
                "concept marker list is empty",
            ));
        }
        if self.penalty_markers.is_empty() {
            out.push(Violation::new(
                "lexicon",
                "markers",
                "penalty marker list is empty",
            ));
        }
        for (i, group) in self.synonyms.iter().enumerate() {
            if group.len() < 2 {
                out.push(Violation::new(
                    format!("lexicon:synonym_groups[{i}]"),
                    "synonym-group",
                    "synonym group needs at least two distinct terms",
                ));
            }
        }
        for marker in self.concept_markers.iter().chain(&self.penalty_markers) {
            if self.stop_words.contains(marker) {
                out.push(Violation::new(
                    format!("lexicon:{marker}"),
                    "stop-word-marker",
                    "marker is also a stop word",
                ));
            }
        }
        out
    }

    pub fn to_file(&self) -> LexiconFile {
        LexiconFile {
            stop_words: self.stop_words.iter().cloned().collect(),
            synonym_groups: self
                .synonyms
                .iter()
                .map(|g| g.iter().cloned().collect())
                .collect(),
            concept_markers: self.concept_markers.clone(),
            penalty_markers: self.penalty_markers.clone(),
        }
    }

    pub fn stop_words(&self) -> &BTreeSet<String> {
        &self.stop_words
    }

    pub fn synonym_groups(&self) -> &[BTreeSet<String>] {
        &self.synonyms
    }

    pub fn concept_markers(&self) -> &[String] {
        &self.concept_markers
    }

    pub fn penalty_markers(&self) -> &[String] {
        &self.penalty_markers
    }

    pub fn vocabulary(&self) -> &BTreeSet<String> {
        &self.vocabulary
    }

    pub fn max_phrase_words(&self) -> usize {
        self.max_phrase_words
    }

    pub fn is_marker(&self, term: &str) -> bool {
        self.concept_markers.iter().any(|m| m == term)
            || self.penalty_markers.iter().any(|m| m == term)
    }

    pub fn is_stop_word(&self, term: &str) -> bool {
        self.stop_words.contains(term)
    }

    /// Known to the lexicon: vocabulary or stop word.
    pub fn is_known(&self, term: &str) -> bool {
        self.vocabulary.contains(term) || self.stop_words.contains(term)
    }
}
