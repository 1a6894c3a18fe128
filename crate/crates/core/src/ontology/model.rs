use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::corpus::LegalRef;
use crate::text::normalize_term;

/// Attribute value of a concept: free text, or the `legal` list of citations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AttrValue {
    Text(String),
    Legal(Vec<LegalRef>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Concept {
    pub name: String,
    pub meaning: String,
    #[serde(default)]
    pub attrs: BTreeMap<String, AttrValue>,
    pub keywords: BTreeSet<String>,
    #[serde(default = "default_language")]
    pub language: String,
}

pub(crate) fn default_language() -> String {
    "en".to_owned()
}

impl Concept {
    pub fn key(&self) -> String {
        normalize_term(&self.name)
    }

    pub fn kind(&self) -> Option<&str> {
        match self.attrs.get("kind") {
            Some(AttrValue::Text(kind)) => Some(kind),
            _ => None,
        }
    }

    pub fn legal_refs(&self) -> &[LegalRef] {
        match self.attrs.get("legal") {
            Some(AttrValue::Legal(refs)) => refs,
            _ => &[],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationProperty {
    Transitive,
    Symmetric,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub name: String,
    pub conc: Vec<String>,
    pub meaning: String,
    #[serde(default)]
    pub prop: BTreeSet<RelationProperty>,
    pub keywords: BTreeSet<String>,
}

impl Relation {
    pub fn key(&self) -> String {
        normalize_term(&self.name)
    }

    pub fn arity(&self) -> usize {
        self.conc.len()
    }

    pub fn is(&self, prop: RelationProperty) -> bool {
        self.prop.contains(&prop)
    }
}

/// Argument of a fact pattern.
///
/// Written as a concept name (`motorcycle helmet`), a bare variable (`?x`), or a
/// class-constrained variable (`?o:motorcycle operator`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Concept(String),
    Var { name: String, class: Option<String> },
}

impl Term {
    pub fn var(name: &str, class: Option<&str>) -> Self {
        Term::Var {
            name: name.to_owned(),
            class: class.map(normalize_term),
        }
    }

    pub fn concept(name: &str) -> Self {
        Term::Concept(normalize_term(name))
    }

    pub fn parse(raw: &str) -> Self {
        match raw.trim().strip_prefix('?') {
            Some(rest) => match rest.split_once(':') {
                Some((name, class)) => Term::var(name.trim(), Some(class)),
                None => Term::var(rest.trim(), None),
            },
            None => Term::concept(raw),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Concept(c) => f.write_str(c),
            Term::Var { name, class: None } => write!(f, "?{name}"),
            Term::Var {
                name,
                class: Some(class),
            } => write!(f, "?{name}:{class}"),
        }
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        Ok(Term::parse(&raw))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FactPattern {
    pub relation: String,
    pub args: Vec<Term>,
}

impl FactPattern {
    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(|t| match t {
            Term::Var { name, .. } => Some(name.as_str()),
            Term::Concept(_) => None,
        })
    }

    pub fn concepts(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(|t| match t {
            Term::Concept(c) => Some(c.as_str()),
            Term::Var { .. } => None,
        })
    }

    pub(crate) fn normalized(&self) -> FactPattern {
        FactPattern {
            relation: normalize_term(&self.relation),
            args: self
                .args
                .iter()
                .map(|t| match t {
                    Term::Concept(c) => Term::Concept(normalize_term(c)),
                    Term::Var { name, class } => Term::Var {
                        name: name.clone(),
                        class: class.as_deref().map(normalize_term),
                    },
                })
                .collect(),
        }
    }
}

impl fmt::Display for FactPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.relation)?;
        for (i, arg) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{arg}")?;
        }
        f.write_str(")")
    }
}

/// A ground relation instance over concept keys.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Fact {
    pub relation: String,
    pub args: Vec<String>,
}

impl Fact {
    pub fn new<S: AsRef<str>>(relation: &str, args: &[S]) -> Self {
        Fact {
            relation: relation.to_owned(),
            args: args.iter().map(|a| a.as_ref().to_owned()).collect(),
        }
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.relation, self.args.join(", "))
    }
}

/// Fine range in VND plus supplementary sanctions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Penalty {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fine_min: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fine_max: Option<i64>,
    #[serde(default)]
    pub supplementary: Vec<String>,
    pub subject: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OffenceOutcome {
    pub legal_ref: LegalRef,
    pub penalty: Penalty,
    pub summary: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleKind {
    Infer,
    Offence,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "conclusion", rename_all = "lowercase")]
#[allow(clippy::large_enum_variant)]
pub enum Conclusion {
    Infer(FactPattern),
    Offence(OffenceOutcome),
}

/// `hypothesis -> conclusion`. Infer rules derive a new fact; offence rules name the
/// provision and penalty that apply when every hypothesis fact holds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    pub id: String,
    pub hypothesis: Vec<FactPattern>,
    #[serde(flatten)]
    pub conclusion: Conclusion,
}

impl Rule {
    pub fn kind(&self) -> RuleKind {
        match self.conclusion {
            Conclusion::Infer(_) => RuleKind::Infer,
            Conclusion::Offence(_) => RuleKind::Offence,
        }
    }

    pub fn outcome(&self) -> Option<&OffenceOutcome> {
        match &self.conclusion {
            Conclusion::Offence(outcome) => Some(outcome),
            Conclusion::Infer(_) => None,
        }
    }

    pub fn hypothesis_variables(&self) -> BTreeSet<&str> {
        self.hypothesis.iter().flat_map(|p| p.variables()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityKind {
    Concept,
    Relation,
}

/// An index entry: a concept or relation, by normalised key.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EntityRef {
    pub kind: EntityKind,
    pub name: String,
}

impl EntityRef {
    pub fn concept(name: &str) -> Self {
        EntityRef {
            kind: EntityKind::Concept,
            name: normalize_term(name),
        }
    }

    pub fn relation(name: &str) -> Self {
        EntityRef {
            kind: EntityKind::Relation,
            name: normalize_term(name),
        }
    }
}
