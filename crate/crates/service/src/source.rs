use std::io;
use std::path::{Path, PathBuf};

use lexsearch_core::{Config, EngineError, SearchEngine, Violation};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

impl LoadError {
    pub fn violations(&self) -> Vec<Violation> {
        match self {
            LoadError::Io { path, source } => {
                vec![Violation::new(
                    path.display().to_string(),
                    "io",
                    source.to_string(),
                )]
            }
            LoadError::Engine(e) => e.violations(),
        }
    }
}

/// Where an engine is loaded from, and reloaded from on request.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EngineSource {
    Files {
        corpus: PathBuf,
        ontology: PathBuf,
        lexicon: PathBuf,
    },
    Snapshot(PathBuf),
}

pub(crate) fn read(path: &Path) -> Result<Vec<u8>, LoadError> {
    std::fs::read(path).map_err(|source| LoadError::Io {
        path: path.to_owned(),
        source,
    })
}

impl EngineSource {
    pub fn load(&self, config: &Config) -> Result<SearchEngine, LoadError> {
        match self {
            EngineSource::Files {
                corpus,
                ontology,
                lexicon,
            } => {
                let (corpus, ontology, lexicon) = (read(corpus)?, read(ontology)?, read(lexicon)?);
                Ok(SearchEngine::from_sources(
                    &corpus,
                    &ontology,
                    &lexicon,
                    config.clone(),
                )?)
            }
            EngineSource::Snapshot(path) => {
                Ok(SearchEngine::load_snapshot(&read(path)?, config.clone())?)
            }
        }
    }
}
