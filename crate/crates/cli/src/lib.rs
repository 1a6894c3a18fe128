//! Command-line front end: build snapshots, validate sources, run queries, evaluate labeled
//! query sets and serve the HTTP API.
//!
//! Exit codes: `0` success, `1` validation failures and usage errors, `2` I/O errors, `3` an
//! out-of-scope query under `query --strict`.

pub mod eval;
pub mod render;

use std::io::{self, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lexsearch_core::{Config, QueryClass, SearchEngine, Violation};
use lexsearch_service::{AppState, EngineSource, LoadError};
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(
    name = "lexsearch",
    version,
    about = "Ontology-backed search over traffic statutes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate the sources and write a knowledge-base snapshot.
    Ingest {
        #[command(flatten)]
        sources: SourceFiles,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Snapshot file to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Validate the sources and report every violation found.
    Validate {
        #[command(flatten)]
        sources: SourceFiles,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Answer one query against a snapshot.
    Query {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        /// Exit with status 3 when the query is out of scope.
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        max_results: Option<usize>,
        text: String,
    },
    /// Score a labeled query set and print the results table.
    Eval {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// JSON array of `{text, label, expected_ref}` records.
        #[arg(long)]
        queries: PathBuf,
        /// Where to write the full JSON report.
        #[arg(long, default_value = "eval-report.json")]
        report: PathBuf,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, env = "LEXSEARCH_ADDR", default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Load from a snapshot instead of source files.
        #[arg(long, conflicts_with_all = ["corpus", "ontology", "lexicon"])]
        snapshot: Option<PathBuf>,
        #[arg(long, requires_all = ["ontology", "lexicon"])]
        corpus: Option<PathBuf>,
        #[arg(long, requires_all = ["corpus", "lexicon"])]
        ontology: Option<PathBuf>,
        #[arg(long, requires_all = ["corpus", "ontology"])]
        lexicon: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct SourceFiles {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub ontology: PathBuf,
    #[arg(long)]
    pub lexicon: PathBuf,
}

impl From<SourceFiles> for EngineSource {
    fn from(s: SourceFiles) -> Self {
        EngineSource::Files {
            corpus: s.corpus,
            ontology: s.ontology,
            lexicon: s.lexicon,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{} violation(s)", .0.len())]
    Invalid(Vec<Violation>),
    #[error("{context} {}: {source}", path.display())]
    Io {
        context: &'static str,
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error("query is out of scope")]
    OutOfScope,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) | CliError::Usage(_) => 1,
            CliError::Io { .. } => 2,
            CliError::OutOfScope => 3,
        }
    }
}

impl From<LoadError> for CliError {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Io { path, source } => CliError::Io {
                context: "cannot read",
                path,
                source,
            },
            LoadError::Engine(e) => CliError::Invalid(e.violations()),
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|source| CliError::Io {
        context: "cannot read",
        path: path.to_owned(),
        source,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|source| CliError::Io {
        context: "cannot write",
        path: path.to_owned(),
        source,
    })
}

pub fn load_config(path: Option<&Path>) -> Result<Config, CliError> {
    let Some(path) = path else {
        return Ok(Config::default());
    };
    let raw = read(path)?;
    let raw = String::from_utf8(raw)
        .map_err(|e| CliError::Invalid(vec![Violation::new("config", "syntax", e.to_string())]))?;
    Config::parse(&raw)
        .map_err(|e| CliError::Invalid(vec![Violation::new("config", "config", e.to_string())]))
}

fn stdout_err(source: io::Error) -> CliError {
    CliError::Io {
        context: "cannot write to",
        path: PathBuf::from("<stdout>"),
        source,
    }
}

/// Runs a parsed command, writing results to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Ingest {
            sources,
            config,
            out: target,
        } => {
            let config = load_config(config.as_deref())?;
            let engine = EngineSource::from(sources).load(&config)?;
            write_file(&target, &engine.snapshot())?;
            writeln!(
                out,
                "wrote {}: {} documents, {} concepts, {} relations, {} rules",
                target.display(),
                engine.corpus().documents().len(),
                engine.kb().concept_count(),
                engine.kb().relation_count(),
                engine.kb().rule_count()
            )
            .map_err(stdout_err)
        }
        Command::Validate { sources, config } => {
            let config = load_config(config.as_deref())?;
            EngineSource::from(sources).load(&config)?;
            writeln!(out, "ok").map_err(stdout_err)
        }
        Command::Query {
            snapshot,
            config,
            format,
            strict,
            max_results,
            text,
        } => {
            let config = load_config(config.as_deref())?;
            let engine = EngineSource::Snapshot(snapshot).load(&config)?;
            let mut answer = engine.answer(&text);
            if let Some(n) = max_results {
                answer.items.truncate(n);
            }
            let rendered = match format {
                Format::Json => render::answer_json(&answer),
                Format::Table => render::answer_table(&answer),
            };
            out.write_all(rendered.as_bytes()).map_err(stdout_err)?;
            if strict && answer.query_class == QueryClass::OutOfScope {
                return Err(CliError::OutOfScope);
            }
            Ok(())
        }
        Command::Eval {
            snapshot,
            config,
            queries,
            report,
        } => {
            let config = load_config(config.as_deref())?;
            let engine = EngineSource::Snapshot(snapshot).load(&config)?;
            let records = eval::parse_records(&read(&queries)?).map_err(CliError::Invalid)?;
            let result = eval::evaluate(&engine, &records);
            let json = serde_json::to_vec_pretty(&result).expect("report serializes");
            write_file(&report, &json)?;
            out.write_all(result.render_table().as_bytes())
                .map_err(stdout_err)
        }
        Command::Serve {
            addr,
            config,
            snapshot,
            corpus,
            ontology,
            lexicon,
        } => {
            let config = load_config(config.as_deref())?;
            let source = match (snapshot, corpus, ontology, lexicon) {
                (Some(path), ..) => EngineSource::Snapshot(path),
                (None, Some(corpus), Some(ontology), Some(lexicon)) => EngineSource::Files {
                    corpus,
                    ontology,
                    lexicon,
                },
                _ => {
                    return Err(CliError::Usage(
                        "serve needs --snapshot or all of --corpus, --ontology and --lexicon"
                            .into(),
                    ))
                }
            };
            let engine = source.load(&config)?;
            serve(engine, source, addr)
        }
    }
}

fn serve(engine: SearchEngine, source: EngineSource, addr: SocketAddr) -> Result<(), CliError> {
    let io_err = |source| CliError::Io {
        context: "cannot serve on",
        path: PathBuf::from(addr.to_string()),
        source,
    };
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(io_err)?;
    let state = AppState::new(engine, Some(source));
    runtime
        .block_on(lexsearch_service::serve(state, addr))
        .map_err(io_err)
}

/// Reports an error on `err` and maps it to a process exit code.
pub fn report(error: &CliError, err: &mut dyn Write) -> ExitCode {
    let _ = writeln!(err, "error: {error}");
    if let CliError::Invalid(violations) = error {
        for v in violations {
            let _ = writeln!(err, "  {v}");
        }
    }
    ExitCode::from(error.exit_code())
}
