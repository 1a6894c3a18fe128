//! A corpus, knowledge base, lexicon and ranking configuration bundled for answering.

use thiserror::Error;

use crate::config::{Config, ConfigError};
use crate::corpus::{Corpus, CorpusError};
use crate::inference::{answer_query, Answer};
use crate::ontology::{KbError, KnowledgeBase};
use crate::pipeline::{Lexicon, LexiconError, LexiconFile};
use crate::snapshot::{self, SnapshotError, SnapshotFile};
use crate::violation::Violation;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Kb(#[from] KbError),
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Snapshot(#[from] SnapshotError),
    #[error("snapshot does not contain a {0}")]
    Incomplete(&'static str),
}

fn syntax(subject: &str, line: usize, column: usize, message: &str) -> Violation {
    Violation::new(
        subject,
        "syntax",
        format!("line {line}, column {column}: {message}"),
    )
}

impl EngineError {
    /// The error as a list of violations, so load failures of every kind can be reported
    /// the same way.
    pub fn violations(&self) -> Vec<Violation> {
        match self {
            EngineError::Corpus(CorpusError::Structure(v))
            | EngineError::Kb(KbError::Validation(v))
            | EngineError::Lexicon(LexiconError::Validation(v)) => v.clone(),
            EngineError::Corpus(CorpusError::Syntax {
                line,
                column,
                message,
            }) => {
                vec![syntax("corpus", *line, *column, message)]
            }
            EngineError::Kb(KbError::Syntax {
                line,
                column,
                message,
            }) => {
                vec![syntax("ontology", *line, *column, message)]
            }
            EngineError::Lexicon(LexiconError::Syntax {
                line,
                column,
                message,
            }) => {
                vec![syntax("lexicon", *line, *column, message)]
            }
            EngineError::Config(e) => vec![Violation::new("config", "config", e.to_string())],
            EngineError::Snapshot(e) | EngineError::Kb(KbError::Snapshot(e)) => {
                vec![Violation::new("snapshot", "snapshot", e.to_string())]
            }
            other => vec![Violation::new("engine", "load", other.to_string())],
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchEngine {
    corpus: Corpus,
    kb: KnowledgeBase,
    lexicon: Lexicon,
    config: Config,
}

impl SearchEngine {
    pub fn new(corpus: Corpus, kb: KnowledgeBase, lexicon: Lexicon, config: Config) -> Self {
        Self {
            corpus,
            kb,
            lexicon,
            config,
        }
    }

    /// Parses and validates the source files; the KB is checked against the corpus and the
    /// lexicon against the KB.
    pub fn from_sources(
        corpus_raw: &[u8],
        ontology_raw: &[u8],
        lexicon_raw: &[u8],
        config: Config,
    ) -> Result<Self, EngineError> {
        let corpus = Corpus::parse(corpus_raw)?;
        let kb = KnowledgeBase::build(&corpus, ontology_raw)?;
        let lexicon = Lexicon::new(&LexiconFile::parse(lexicon_raw)?, &kb)?;
        Ok(Self::new(corpus, kb, lexicon, config))
    }

    /// Snapshot carrying the corpus and lexicon as well as the knowledge base.
    pub fn snapshot(&self) -> Vec<u8> {
        snapshot::encode(&SnapshotFile {
            kb: self.kb.to_payload(),
            corpus: Some(self.corpus.documents().to_vec()),
            lexicon: Some(self.lexicon.to_file()),
        })
    }

    pub fn load_snapshot(raw: &[u8], config: Config) -> Result<Self, EngineError> {
        let file = snapshot::decode(raw)?;
        let documents = file.corpus.ok_or(EngineError::Incomplete("corpus"))?;
        let lexicon_file = file.lexicon.ok_or(EngineError::Incomplete("lexicon"))?;
        let corpus = Corpus::from_documents(documents)?;
        let kb = KnowledgeBase::from_payload(file.kb)?;
        let violations = crate::ontology::validate_kb(&kb, &corpus);
        if !violations.is_empty() {
            return Err(KbError::Validation(violations).into());
        }
        let lexicon = Lexicon::new(&lexicon_file, &kb)?;
        Ok(Self::new(corpus, kb, lexicon, config))
    }

    pub fn answer(&self, text: &str) -> Answer {
        answer_query(
            &self.kb,
            &self.corpus,
            &self.lexicon,
            &self.config.ranking,
            text,
        )
    }

    pub fn corpus(&self) -> &Corpus {
        &self.corpus
    }

    pub fn kb(&self) -> &KnowledgeBase {
        &self.kb
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn config(&self) -> &Config {
        &self.config
    }
}
