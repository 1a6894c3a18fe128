//! From raw query text to a classified, expanded keyword set.
//!
//! normalise → correct typos → drop stop words → classify → keep vocabulary terms → expand.

mod lexicon;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use lexicon::{Lexicon, LexiconError, LexiconFile};

use crate::ontology::KnowledgeBase;
use crate::text::words;

/// Tokens shorter than this are never typo-corrected.
pub const MIN_TYPO_LEN: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum QueryClass {
    Concept,
    Penalty,
    OutOfScope,
}

impl fmt::Display for QueryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QueryClass::Concept => "Concept",
            QueryClass::Penalty => "Penalty",
            QueryClass::OutOfScope => "OutOfScope",
        })
    }
}

impl std::str::FromStr for QueryClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Concept" => Ok(QueryClass::Concept),
            "Penalty" => Ok(QueryClass::Penalty),
            "OutOfScope" => Ok(QueryClass::OutOfScope),
            other => Err(format!("unknown query class {other:?}")),
        }
    }
}

/// Where a keyword came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TermSource {
    Query,
    TypoCorrected,
    Synonym,
    KbSimilar,
}

impl TermSource {
    /// Typed by the user, possibly after typo correction.
    pub fn is_query_origin(self) -> bool {
        matches!(self, TermSource::Query | TermSource::TypoCorrected)
    }
}

/// Normalised terms with their origin. The first recorded origin of a term is kept.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct KeywordSet {
    terms: BTreeMap<String, TermSource>,
}

impl KeywordSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns `true` if the term was not present.
    pub fn insert(&mut self, term: impl Into<String>, source: TermSource) -> bool {
        let term = term.into();
        if self.terms.contains_key(&term) {
            return false;
        }
        self.terms.insert(term, source);
        true
    }

    pub fn contains(&self, term: &str) -> bool {
        self.terms.contains_key(term)
    }

    pub fn source(&self, term: &str) -> Option<TermSource> {
        self.terms.get(term).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, TermSource)> {
        self.terms.iter().map(|(t, s)| (t.as_str(), *s))
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.terms.keys().map(String::as_str)
    }

    pub fn query_terms(&self) -> impl Iterator<Item = &str> {
        self.iter()
            .filter(|(_, s)| s.is_query_origin())
            .map(|(t, _)| t)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<S: Into<String>> FromIterator<(S, TermSource)> for KeywordSet {
    fn from_iter<I: IntoIterator<Item = (S, TermSource)>>(iter: I) -> Self {
        let mut set = KeywordSet::new();
        for (term, source) in iter {
            set.insert(term, source);
        }
        set
    }
}

/// Splits query text into normalised tokens.
pub trait Tokenizer {
    fn tokenize(&self, text: &str, lexicon: &Lexicon) -> Vec<String>;
}

/// Splits on non-word characters, then greedily merges the longest run of words that
/// forms a vocabulary phrase.
#[derive(Debug, Clone, Copy, Default)]
pub struct PhraseTokenizer;

impl Tokenizer for PhraseTokenizer {
    fn tokenize(&self, text: &str, lexicon: &Lexicon) -> Vec<String> {
        let words = words(text);
        let max = lexicon.max_phrase_words();
        let mut out = Vec::with_capacity(words.len());
        let mut i = 0;
        while i < words.len() {
            let longest = (2..=max.min(words.len() - i))
                .rev()
                .map(|n| (n, words[i..i + n].join(" ")))
                .find(|(_, phrase)| lexicon.vocabulary().contains(phrase));
            match longest {
                Some((n, phrase)) => {
                    out.push(phrase);
                    i += n;
                }
                None => {
                    out.push(words[i].clone());
                    i += 1;
                }
            }
        }
        out
    }
}

pub fn normalize_text(text: &str, lexicon: &Lexicon) -> Vec<String> {
    PhraseTokenizer.tokenize(text, lexicon)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrectedToken {
    pub term: String,
    /// The token as typed, when it was replaced.
    pub corrected_from: Option<String>,
}

impl CorrectedToken {
    pub fn source(&self) -> TermSource {
        if self.corrected_from.is_some() {
            TermSource::TypoCorrected
        } else {
            TermSource::Query
        }
    }
}

impl AsRef<str> for CorrectedToken {
    fn as_ref(&self) -> &str {
        &self.term
    }
}

/// Replaces each unknown token that is one edit away from exactly one vocabulary term.
pub fn correct_typos<S: AsRef<str>>(tokens: &[S], lexicon: &Lexicon) -> Vec<CorrectedToken> {
    tokens
        .iter()
        .map(|token| {
            let token = token.as_ref();
            let unchanged = CorrectedToken {
                term: token.to_owned(),
                corrected_from: None,
            };
            if lexicon.is_known(token) || token.chars().count() < MIN_TYPO_LEN {
                return unchanged;
            }
            match unique_neighbour(token, lexicon) {
                Some(term) => CorrectedToken {
                    term: term.to_owned(),
                    corrected_from: Some(token.to_owned()),
                },
                None => unchanged,
            }
        })
        .collect()
}

fn unique_neighbour<'a>(token: &str, lexicon: &'a Lexicon) -> Option<&'a str> {
    let len = token.chars().count();
    let mut found = None;
    for term in lexicon.vocabulary() {
        if term.chars().count().abs_diff(len) > 1 {
            continue;
        }
        if strsim::levenshtein(token, term) == 1 {
            if found.is_some() {
                return None;
            }
            found = Some(term.as_str());
        }
    }
    found
}

/// Order-preserving stop-word filter. Markers are never removed.
pub fn remove_stopwords<T: AsRef<str>>(tokens: Vec<T>, lexicon: &Lexicon) -> Vec<T> {
    tokens
        .into_iter()
        .filter(|t| {
            let t = t.as_ref();
            !lexicon.is_stop_word(t) || lexicon.is_marker(t)
        })
        .collect()
}

/// Penalty markers win over concept markers; no marker means out of scope.
pub fn classify_query<T: AsRef<str>>(tokens: &[T], lexicon: &Lexicon) -> QueryClass {
    let has = |markers: &[String]| {
        tokens
            .iter()
            .any(|t| markers.iter().any(|m| m == t.as_ref()))
    };
    if has(lexicon.penalty_markers()) {
        QueryClass::Penalty
    } else if has(lexicon.concept_markers()) {
        QueryClass::Concept
    } else {
        QueryClass::OutOfScope
    }
}

pub fn extract_keywords(text: &str, lexicon: &Lexicon) -> (QueryClass, KeywordSet) {
    extract_keywords_with(&PhraseTokenizer, text, lexicon)
}

/// Classified query keywords. Only vocabulary terms are kept; the classifying marker is
/// one of them.
pub fn extract_keywords_with(
    tokenizer: &dyn Tokenizer,
    text: &str,
    lexicon: &Lexicon,
) -> (QueryClass, KeywordSet) {
    let tokens = tokenizer.tokenize(text, lexicon);
    let corrected = correct_typos(&tokens, lexicon);
    let kept = remove_stopwords(corrected, lexicon);
    let class = classify_query(&kept, lexicon);
    let keywords = kept
        .iter()
        .filter(|t| lexicon.vocabulary().contains(&t.term))
        .map(|t| (t.term.clone(), t.source()))
        .collect();
    (class, keywords)
}

/// Adds, for every query-origin term, the co-members of its synonym groups (including
/// groups of the words and sub-phrases inside a multi-word term) and every keyword of
/// each KB entity the term is a keyword of. Added terms are not expanded further.
pub fn expand_keywords(keywords: &KeywordSet, kb: &KnowledgeBase, lexicon: &Lexicon) -> KeywordSet {
    let mut out = keywords.clone();
    for term in keywords.query_terms() {
        for part in sub_phrases(term) {
            for group in lexicon
                .synonym_groups()
                .iter()
                .filter(|g| g.contains(&part))
            {
                for member in group.iter().filter(|m| **m != part) {
                    out.insert(member.clone(), TermSource::Synonym);
                }
            }
        }
        for entity in kb.lookup_by_keyword(term) {
            for keyword in kb.entity_keywords(&entity).into_iter().flatten() {
                out.insert(keyword.clone(), TermSource::KbSimilar);
            }
        }
    }
    out
}

/// The term itself followed by every shorter contiguous run of its words.
fn sub_phrases(term: &str) -> Vec<String> {
    let words: Vec<&str> = term.split(' ').collect();
    let mut out = Vec::new();
    for len in (1..=words.len()).rev() {
        for start in 0..=words.len() - len {
            out.push(words[start..start + len].join(" "));
        }
    }
    out
}
