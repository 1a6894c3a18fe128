//! Ontology-backed search over road-traffic statutes.
//!
//! The crate is organised around four pieces that are composed by [`engine::SearchEngine`]:
//!
//! - [`corpus`]: statute documents as a Part > Chapter > Section > Article > Clause > Point tree,
//!   with citation resolution.
//! - [`ontology`]: the knowledge base of concepts, relations and rules (inference rules and
//!   offence rules), plus its keyword index and snapshot format.
//! - [`pipeline`]: query normalisation, typo correction, stop-word removal, intent
//!   classification and keyword expansion.
//! - [`inference`]: concept/rule matching, forward-chaining closure, offence resolution and
//!   answer ranking.

pub mod config;
pub mod corpus;
pub mod engine;
pub mod inference;
pub mod ontology;
#[cfg(feature = "oracle")]
pub mod oracle;
pub mod pipeline;
pub mod snapshot;
pub mod text;

mod violation;

pub use config::{Config, ConfigError, RankingWeights};
pub use corpus::{Corpus, CorpusDocument, CorpusError, LegalRef, Level, ProvisionNode, RefPath};
pub use engine::{EngineError, SearchEngine};
pub use inference::{Answer, AnswerItem, MatchResult, OffenceMatch};
pub use ontology::{Concept, KbError, KnowledgeBase, Penalty, Relation, Rule};
pub use pipeline::{KeywordSet, Lexicon, QueryClass, TermSource};
pub use violation::Violation;
