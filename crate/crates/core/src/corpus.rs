//! Statute documents and citations into them.
//!
//! A document is a tree rooted at [`Level::Document`]. Below it, nodes follow the order
//! part > chapter > section > article > clause > point. Parts and sections are optional.
//! Articles are addressed by label across the whole document, and clauses and points
//! are addressed relative to their parent.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::violation::Violation;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("corpus syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("corpus structure invalid: {}", join_violations(.0))]
    Structure(Vec<Violation>),
    #[error("provision {requested} not found (resolved up to {})", .resolved.as_deref().unwrap_or("nothing"))]
    NotFound {
        requested: String,
        resolved: Option<String>,
    },
    #[error("malformed provision path {0:?}")]
    MalformedPath(String),
}

pub(crate) fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Document,
    Part,
    Chapter,
    Section,
    Article,
    Clause,
    Point,
}

impl Level {
    /// Levels that may directly contain `self`.
    fn allowed_parents(self) -> &'static [Level] {
        match self {
            Level::Document => &[],
            Level::Part => &[Level::Document],
            Level::Chapter => &[Level::Document, Level::Part],
            Level::Section => &[Level::Chapter],
            Level::Article => &[Level::Chapter, Level::Section],
            Level::Clause => &[Level::Article],
            Level::Point => &[Level::Clause],
        }
    }

    fn path_prefix(self) -> &'static str {
        match self {
            Level::Document => "",
            Level::Part => "Part.",
            Level::Chapter => "Ch.",
            Level::Section => "Sec.",
            Level::Article => "Art.",
            Level::Clause => "Cl.",
            Level::Point => "Pt.",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DocType {
    Law,
    Decree,
    Regulation,
}

/// Citation of a provision: document, optional containers, article, clause and point.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LegalRef {
    pub document_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub part: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chapter: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub section: Option<String>,
    pub article: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clause: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<String>,
}

impl LegalRef {
    pub fn article(document_id: &str, article: &str) -> Self {
        Self {
            document_id: document_id.to_owned(),
            part: None,
            chapter: None,
            section: None,
            article: article.to_owned(),
            clause: None,
            point: None,
        }
    }

    pub fn with_clause(mut self, clause: &str) -> Self {
        self.clause = Some(clause.to_owned());
        self
    }

    pub fn with_point(mut self, point: &str) -> Self {
        self.point = Some(point.to_owned());
        self
    }

    /// The same citation without part/chapter/section. Article labels are unique per
    /// document, so two refs address the same provision iff their addresses are equal.
    pub fn address(&self) -> LegalRef {
        LegalRef {
            part: None,
            chapter: None,
            section: None,
            ..self.clone()
        }
    }

    pub fn same_provision(&self, other: &LegalRef) -> bool {
        self.document_id == other.document_id
            && self.article == other.article
            && self.clause == other.clause
            && self.point == other.point
    }

    /// URL-safe form `doc-key/article[/clause[/point]]`.
    pub fn wire_path(&self) -> String {
        let mut out = document_key(&self.document_id);
        for label in [
            Some(&self.article),
            self.clause.as_ref(),
            self.point.as_ref(),
        ]
        .into_iter()
        .flatten()
        {
            out.push('/');
            out.push_str(label);
        }
        out
    }

    /// Problems with the citation itself, independent of any corpus.
    pub fn check(&self) -> Vec<String> {
        let mut problems = Vec::new();
        if self.document_id.trim().is_empty() {
            problems.push("document_id is empty".to_owned());
        }
        if self.article.is_empty() {
            problems.push("article is empty".to_owned());
        }
        if self.point.is_some() && self.clause.is_none() {
            problems.push("point given without clause".to_owned());
        }
        let labels = [
            &self.part,
            &self.chapter,
            &self.section,
            &Some(self.article.clone()),
            &self.clause,
            &self.point,
        ];
        for label in labels.into_iter().flatten() {
            if label.chars().any(char::is_whitespace) {
                problems.push(format!("label {label:?} contains whitespace"));
            }
        }
        problems
    }
}

impl fmt::Display for LegalRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/Art.{}", self.document_id, self.article)?;
        if let Some(clause) = &self.clause {
            write!(f, "/Cl.{clause}")?;
        }
        if let Some(point) = &self.point {
            write!(f, "/Pt.{point}")?;
        }
        Ok(())
    }
}

/// Hyphenated document id used in URLs: `100/2019/ND-CP` becomes `100-2019-ND-CP`.
pub fn document_key(document_id: &str) -> String {
    let mut out = String::with_capacity(document_id.len());
    for ch in document_id.chars() {
        if ch.is_alphanumeric() {
            out.push(ch);
        } else if !out.ends_with('-') {
            out.push('-');
        }
    }
    out.trim_matches('-').to_owned()
}

/// Parsed wire path, see [`LegalRef::wire_path`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefPath {
    pub document_key: String,
    pub article: String,
    pub clause: Option<String>,
    pub point: Option<String>,
}

impl std::str::FromStr for RefPath {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let segments: Vec<&str> = s.split('/').collect();
        let well_formed = (2..=4).contains(&segments.len())
            && segments
                .iter()
                .all(|seg| !seg.is_empty() && !seg.chars().any(char::is_whitespace));
        if !well_formed {
            return Err(CorpusError::MalformedPath(s.to_owned()));
        }
        Ok(RefPath {
            document_key: segments[0].to_owned(),
            article: segments[1].to_owned(),
            clause: segments.get(2).map(|s| (*s).to_owned()),
            point: segments.get(3).map(|s| (*s).to_owned()),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProvisionNode {
    pub level: Level,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heading: Option<String>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub text: String,
    #[serde(default)]
    pub children: Vec<ProvisionNode>,
}

impl ProvisionNode {
    /// Heading, body and every descendant body in document order, one per line.
    pub fn provision_text(&self) -> String {
        let mut parts = Vec::new();
        self.collect_text(&mut parts);
        parts.join("\n")
    }

    fn collect_text<'a>(&'a self, out: &mut Vec<&'a str>) {
        if let Some(heading) = self.heading.as_deref().filter(|h| !h.is_empty()) {
            out.push(heading);
        }
        if !self.text.is_empty() {
            out.push(&self.text);
        }
        for child in &self.children {
            child.collect_text(out);
        }
    }

    fn child(&self, level: Level, label: &str) -> Option<&ProvisionNode> {
        self.children
            .iter()
            .find(|c| c.level == level && c.label == label)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusDocument {
    pub document_id: String,
    pub title: String,
    pub doc_type: DocType,
    pub language: String,
    pub root: ProvisionNode,
}

/// Container labels seen on the way down to a node.
#[derive(Debug, Clone, Default)]
struct Containers {
    part: Option<String>,
    chapter: Option<String>,
    section: Option<String>,
}

impl CorpusDocument {
    /// Every article, clause and point in document order, with its fully populated ref.
    pub fn provisions(&self) -> Vec<(LegalRef, &ProvisionNode)> {
        let mut out = Vec::new();
        self.visit_articles(
            &self.root,
            &mut Containers::default(),
            &mut |containers, article| {
                let base = LegalRef {
                    document_id: self.document_id.clone(),
                    part: containers.part.clone(),
                    chapter: containers.chapter.clone(),
                    section: containers.section.clone(),
                    article: article.label.clone(),
                    clause: None,
                    point: None,
                };
                out.push((base.clone(), article));
                for clause in article.children.iter().filter(|c| c.level == Level::Clause) {
                    let clause_ref = base.clone().with_clause(&clause.label);
                    out.push((clause_ref.clone(), clause));
                    for point in clause.children.iter().filter(|c| c.level == Level::Point) {
                        out.push((clause_ref.clone().with_point(&point.label), point));
                    }
                }
            },
        );
        out
    }

    fn visit_articles<'a>(
        &'a self,
        node: &'a ProvisionNode,
        containers: &mut Containers,
        f: &mut impl FnMut(&Containers, &'a ProvisionNode),
    ) {
        for child in &node.children {
            match child.level {
                Level::Article => f(containers, child),
                Level::Part | Level::Chapter | Level::Section => {
                    let saved = containers.clone();
                    let slot = match child.level {
                        Level::Part => &mut containers.part,
                        Level::Chapter => &mut containers.chapter,
                        _ => &mut containers.section,
                    };
                    *slot = Some(child.label.clone());
                    self.visit_articles(child, containers, f);
                    *containers = saved;
                }
                _ => {}
            }
        }
    }

    fn find_article(&self, reference: &LegalRef) -> Option<&ProvisionNode> {
        let mut found = None;
        self.visit_articles(
            &self.root,
            &mut Containers::default(),
            &mut |containers, article| {
                let matches = |wanted: &Option<String>, seen: &Option<String>| {
                    wanted.is_none() || wanted == seen
                };
                if found.is_none()
                    && article.label == reference.article
                    && matches(&reference.part, &containers.part)
                    && matches(&reference.chapter, &containers.chapter)
                    && matches(&reference.section, &containers.section)
                {
                    found = Some(article);
                }
            },
        );
        found
    }

    /// Every broken structural invariant of this document.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.document_id.trim().is_empty() {
            out.push(Violation::new(
                "<unnamed>",
                "document-id",
                "document_id is empty",
            ));
        }
        if self.language.trim().is_empty() {
            out.push(Violation::new(
                &self.document_id,
                "language",
                "language tag is empty",
            ));
        }
        if self.root.level != Level::Document {
            out.push(Violation::new(
                &self.document_id,
                "root-level",
                format!("root level is {:?}, expected document", self.root.level),
            ));
        }
        self.validate_children(&self.root, &self.document_id, &mut out);

        let mut articles: BTreeMap<String, usize> = BTreeMap::new();
        for (reference, _) in self.provisions() {
            if reference.clause.is_none() {
                *articles.entry(reference.article).or_default() += 1;
            }
        }
        for (label, count) in articles {
            if count > 1 {
                out.push(Violation::new(
                    format!("{}/Art.{label}", self.document_id),
                    "duplicate-article",
                    format!("article label {label:?} occurs {count} times in the document"),
                ));
            }
        }
        out
    }

    fn validate_children(&self, node: &ProvisionNode, path: &str, out: &mut Vec<Violation>) {
        let mut seen: BTreeMap<(Level, &str), usize> = BTreeMap::new();
        for (index, child) in node.children.iter().enumerate() {
            let child_path = format!("{path}/{}{}", child.level.path_prefix(), child.label);
            if !child.level.allowed_parents().contains(&node.level) {
                out.push(Violation::new(
                    &child_path,
                    "hierarchy",
                    format!("{:?} cannot be a child of {:?}", child.level, node.level),
                ));
            }
            if child.label.is_empty() {
                out.push(Violation::new(&child_path, "label", "label is empty"));
            } else if child.label.chars().any(char::is_whitespace) {
                out.push(Violation::new(
                    &child_path,
                    "label",
                    format!("label {:?} contains whitespace", child.label),
                ));
            }
            if let Some(first) = seen.insert((child.level, child.label.as_str()), index) {
                out.push(Violation::new(
                    &child_path,
                    "duplicate-sibling",
                    format!(
                        "children #{} and #{} of {path} share this ref",
                        first + 1,
                        index + 1
                    ),
                ));
            }
            self.validate_children(child, &child_path, out);
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
struct CorpusFile {
    #[serde(default)]
    documents: Vec<CorpusDocument>,
}

/// A validated, immutable set of statute documents.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    documents: Vec<CorpusDocument>,
}

impl Corpus {
    /// Parses the JSON corpus format and rejects documents that break any invariant.
    pub fn parse(raw: &[u8]) -> Result<Self, CorpusError> {
        let file: CorpusFile = serde_json::from_slice(raw).map_err(|e| CorpusError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Self::from_documents(file.documents)
    }

    pub fn from_documents(documents: Vec<CorpusDocument>) -> Result<Self, CorpusError> {
        let corpus = Corpus { documents };
        let violations = corpus.validate();
        if violations.is_empty() {
            Ok(corpus)
        } else {
            Err(CorpusError::Structure(violations))
        }
    }

    /// Canonical serialisation; `parse(serialize(c)) == c`.
    pub fn serialize(&self) -> Vec<u8> {
        serialize_documents(&self.documents)
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut ids = BTreeSet::new();
        for doc in &self.documents {
            if !ids.insert(doc.document_id.as_str()) {
                out.push(Violation::new(
                    &doc.document_id,
                    "duplicate-document",
                    "document_id occurs more than once",
                ));
            }
            out.extend(doc.validate());
        }
        out
    }

    pub fn documents(&self) -> &[CorpusDocument] {
        &self.documents
    }

    pub fn document(&self, document_id: &str) -> Option<&CorpusDocument> {
        self.documents.iter().find(|d| d.document_id == document_id)
    }

    pub fn document_by_key(&self, key: &str) -> Option<&CorpusDocument> {
        self.documents
            .iter()
            .find(|d| document_key(&d.document_id).eq_ignore_ascii_case(key))
    }

    /// The node addressed by the deepest populated field of `reference`.
    pub fn resolve(&self, reference: &LegalRef) -> Result<&ProvisionNode, CorpusError> {
        let not_found = |resolved: Option<String>| CorpusError::NotFound {
            requested: reference.to_string(),
            resolved,
        };
        let doc = self
            .document(&reference.document_id)
            .ok_or_else(|| not_found(None))?;
        let article = doc
            .find_article(reference)
            .ok_or_else(|| not_found(Some(doc.document_id.clone())))?;
        let Some(clause_label) = &reference.clause else {
            return if reference.point.is_some() {
                Err(not_found(Some(reference.address().to_string())))
            } else {
                Ok(article)
            };
        };
        let article_path = format!("{}/Art.{}", doc.document_id, article.label);
        let clause = article
            .child(Level::Clause, clause_label)
            .ok_or_else(|| not_found(Some(article_path.clone())))?;
        let Some(point_label) = &reference.point else {
            return Ok(clause);
        };
        clause
            .child(Level::Point, point_label)
            .ok_or_else(|| not_found(Some(format!("{article_path}/Cl.{clause_label}"))))
    }

    /// Resolves a wire path, returning the canonical citation alongside the node.
    pub fn resolve_path(&self, path: &RefPath) -> Result<(LegalRef, &ProvisionNode), CorpusError> {
        let doc =
            self.document_by_key(&path.document_key)
                .ok_or_else(|| CorpusError::NotFound {
                    requested: path.document_key.clone(),
                    resolved: None,
                })?;
        let reference = LegalRef {
            document_id: doc.document_id.clone(),
            part: None,
            chapter: None,
            section: None,
            article: path.article.clone(),
            clause: path.clause.clone(),
            point: path.point.clone(),
        };
        let node = self.resolve(&reference)?;
        Ok((reference, node))
    }
}

pub fn serialize_documents(documents: &[CorpusDocument]) -> Vec<u8> {
    #[derive(Serialize)]
    struct Borrowed<'a> {
        documents: &'a [CorpusDocument],
    }
    let mut out = serde_json::to_vec_pretty(&Borrowed { documents })
        .expect("corpus documents always serialise");
    out.push(b'\n');
    out
}
