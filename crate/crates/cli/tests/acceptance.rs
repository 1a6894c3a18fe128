//! Acceptance gate. Every criterion runs, prints one PASS/FAIL line, and the test fails if
//! any criterion failed.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use clap::Parser;
use http_body_util::BodyExt;
use lexsearch::eval::{self, rate_percent, render_rate, EvalReport, Tally};
use lexsearch::{run, Cli};
use lexsearch_core::inference::{find_offences, infer_closure, Binding};
use lexsearch_core::ontology::AttrValue;
use lexsearch_core::oracle::{brute_force_offences, closure_case, naive_closure, offence_case};
use lexsearch_core::pipeline::{expand_keywords, extract_keywords};
use lexsearch_core::{Answer, Config, Corpus, KnowledgeBase, LegalRef, QueryClass, SearchEngine};
use lexsearch_service::{router, AppState, EngineSource};
use serde_json::Value;
use tower::ServiceExt;

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if let false = $cond {
            return Err(format!($($msg)+));
        }
    };
}

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(name: &str) -> PathBuf {
    root().join(name)
}

fn read(name: &str) -> Vec<u8> {
    std::fs::read(fixture(name)).unwrap()
}

fn engine() -> SearchEngine {
    SearchEngine::from_sources(
        &read("corpus/sample.json"),
        &read("ontology/ontology.json"),
        &read("lexicon/en.json"),
        Config::default(),
    )
    .unwrap()
}

fn cli(args: &[&str]) -> Result<String, String> {
    let parsed = Cli::try_parse_from(std::iter::once("lexsearch").chain(args.iter().copied()))
        .map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    run(parsed, &mut out).map_err(|e| e.to_string())?;
    String::from_utf8(out).map_err(|e| e.to_string())
}

fn ingest(dir: &Path) -> PathBuf {
    let snapshot = dir.join("kb.snap");
    let path = |n: &str| fixture(n).display().to_string();
    cli(&[
        "ingest",
        "--corpus",
        &path("corpus/sample.json"),
        "--ontology",
        &path("ontology/ontology.json"),
        "--lexicon",
        &path("lexicon/en.json"),
        "--out",
        &snapshot.display().to_string(),
    ])
    .unwrap();
    snapshot
}

/// Runs `query --format json` against the snapshot, timing the whole command.
fn cmd_query(snapshot: &Path, text: &str) -> Result<(Answer, Duration), String> {
    let started = Instant::now();
    let out = cli(&[
        "query",
        "--snapshot",
        &snapshot.display().to_string(),
        "--format",
        "json",
        text,
    ])?;
    let elapsed = started.elapsed();
    let answer = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    Ok((answer, elapsed))
}

fn terms(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn definition_query(snapshot: &Path) -> Check {
    let (answer, elapsed) = cmd_query(snapshot, "What is motorcycle?")?;
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    ensure!(
        answer.query_class == QueryClass::Concept,
        "class {}",
        answer.query_class
    );
    let top = answer.top().ok_or("no items")?;
    ensure!(
        top.provision
            .starts_with("Motorcycle means a motor vehicle that has two or three wheels"),
        "provision {:?}",
        top.provision
    );
    let expected = LegalRef::article("QCVN 41:2019", "3").with_clause("3.31");
    ensure!(
        top.legal_ref.same_provision(&expected),
        "top ref {}",
        top.legal_ref
    );
    Ok(())
}

fn penalty_query(snapshot: &Path, engine: &SearchEngine) -> Check {
    let q2 = "The fines of operator of motorbike driver who does not wear helmet";
    let (class, keywords) = extract_keywords(q2, engine.lexicon());
    ensure!(class == QueryClass::Penalty, "class {class}");
    let extracted: BTreeSet<String> = keywords.terms().map(str::to_owned).collect();
    ensure!(
        extracted == terms(&["fines", "not wear", "helmet", "operator of motorbike"]),
        "keywords {extracted:?}"
    );
    let expanded = expand_keywords(&keywords, engine.kb(), engine.lexicon());
    ensure!(
        expanded.contains("motorcycle"),
        "expansion lacks motorcycle"
    );

    let (answer, elapsed) = cmd_query(snapshot, q2)?;
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    ensure!(
        answer.expanded_keywords.contains("motorcycle"),
        "answer expansion lacks motorcycle"
    );
    let top = answer.top().ok_or("no items")?;
    let expected = LegalRef::article("100/2019/ND-CP", "6")
        .with_clause("2")
        .with_point("i");
    ensure!(
        top.legal_ref.same_provision(&expected),
        "top ref {}",
        top.legal_ref
    );
    let penalty = top.penalty.as_ref().ok_or("no penalty")?;
    ensure!(
        (penalty.fine_min, penalty.fine_max) == (Some(200_000), Some(300_000)),
        "fine {:?}-{:?}",
        penalty.fine_min,
        penalty.fine_max
    );
    Ok(())
}

fn reference_records(engine: &SearchEngine) -> Check {
    let c = engine
        .kb()
        .get_concept("Electric motorcycle")
        .map_err(|e| e.to_string())?;
    ensure!(c.name == "Electric motorcycle", "name {:?}", c.name);
    ensure!(
        c.meaning
            == "a two-wheel vehicle operated by an electric engine with power not exceeding 4 kW and maximum speed not exceeding 50 km/h",
        "meaning {:?}",
        c.meaning
    );
    let expected_attrs = BTreeMap::from([
        (
            "kind".to_owned(),
            AttrValue::Text("road traffic vehicle".into()),
        ),
        (
            "type".to_owned(),
            AttrValue::Text("two-wheel vehicle".into()),
        ),
        (
            "legal".to_owned(),
            AttrValue::Legal(vec![LegalRef::article("100/2019/ND-CP", "3")
                .with_clause("1")
                .with_point("d")]),
        ),
    ]);
    ensure!(c.attrs == expected_attrs, "attrs {:?}", c.attrs);
    ensure!(
        c.keywords
            == terms(&[
                "motorcycle",
                "electric",
                "two-wheel vehicle",
                "electric motorcycle"
            ]),
        "keywords {:?}",
        c.keywords
    );

    let r = engine
        .kb()
        .get_relation("comply")
        .map_err(|e| e.to_string())?;
    ensure!(r.conc == ["car", "traffic light"], "conc {:?}", r.conc);
    ensure!(
        r.meaning
            == "Operators of car and car-like vehicles failed to comply with the traffic lights",
        "meaning {:?}",
        r.meaning
    );
    ensure!(
        r.keywords == terms(&["comply", "over"]),
        "keywords {:?}",
        r.keywords
    );
    Ok(())
}

fn closure_oracle() -> Check {
    let started = Instant::now();
    for seed in 0..100 {
        let case = closure_case(seed);
        ensure!(
            case.kb.concept_count() <= 50 && case.kb.rule_count() <= 20,
            "seed {seed}: oversized KB"
        );
        let fast = infer_closure(&case.kb, &case.facts);
        let naive = naive_closure(&case.kb, &case.facts);
        ensure!(
            fast == naive,
            "seed {seed}: {} facts vs oracle {}",
            fast.len(),
            naive.len()
        );
    }
    let elapsed = started.elapsed();
    ensure!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    Ok(())
}

fn offence_oracle() -> Check {
    let started = Instant::now();
    for seed in 0..50 {
        let case = offence_case(seed);
        let found: BTreeMap<String, BTreeSet<Binding>> = find_offences(&case.matched, &case.kb)
            .into_iter()
            .map(|m| (m.rule_id, m.bindings))
            .collect();
        let expected = brute_force_offences(&case.kb, &case.matched);
        ensure!(
            found == expected,
            "seed {seed}: {found:?} vs oracle {expected:?}"
        );
    }
    let elapsed = started.elapsed();
    ensure!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    Ok(())
}

fn classification(engine: &SearchEngine) -> Check {
    let records =
        eval::parse_records(&read("queries/labeled.json")).map_err(|v| format!("{v:?}"))?;
    ensure!(
        records.len() >= 60,
        "only {} labeled queries",
        records.len()
    );
    let report = eval::evaluate(engine, &records);
    let accuracy = report.classification_accuracy.ok_or("no records")?;
    ensure!(accuracy >= 0.9, "classification accuracy {accuracy:.3}");

    for ((total, correct), rate) in [((54, 42), 78), ((83, 61), 73), ((137, 103), 75)] {
        ensure!(
            rate_percent(correct, total) == Some(rate),
            "({total},{correct})"
        );
    }
    ensure!(
        render_rate(rate_percent(0, 0)) == "n/a",
        "empty class not rendered n/a"
    );
    let table = EvalReport {
        per_class: BTreeMap::from([
            (QueryClass::Concept, Tally::new(54, 42)),
            (QueryClass::Penalty, Tally::new(83, 61)),
        ]),
        overall: Tally::new(137, 103),
        classification: Tally::new(137, 137),
        classification_accuracy: Some(1.0),
        records: Vec::new(),
    }
    .render_table();
    for pct in ["78%", "73%", "75%"] {
        ensure!(table.contains(pct), "table lacks {pct}:\n{table}");
    }
    Ok(())
}

fn soundness(engine: &SearchEngine) -> Check {
    let records =
        eval::parse_records(&read("queries/labeled.json")).map_err(|v| format!("{v:?}"))?;
    let reloaded = SearchEngine::load_snapshot(&engine.snapshot(), Config::default())
        .map_err(|e| e.to_string())?;
    for record in &records {
        let first = serde_json::to_vec(&engine.answer(&record.text)).unwrap();
        let second = serde_json::to_vec(&engine.answer(&record.text)).unwrap();
        let third = serde_json::to_vec(&reloaded.answer(&record.text)).unwrap();
        ensure!(
            first == second && first == third,
            "nondeterministic answer for {:?}",
            record.text
        );
        for item in engine.answer(&record.text).items {
            ensure!(
                engine.corpus().resolve(&item.legal_ref).is_ok(),
                "dangling citation {} for {:?}",
                item.legal_ref,
                record.text
            );
        }
    }

    let corpus = engine.corpus();
    let reparsed = Corpus::parse(&corpus.serialize()).map_err(|e| e.to_string())?;
    ensure!(&reparsed == corpus, "corpus round trip differs");
    ensure!(
        reparsed.serialize() == corpus.serialize(),
        "corpus serialization unstable"
    );

    let kb_bytes = engine.kb().snapshot();
    let kb = KnowledgeBase::load_snapshot(&kb_bytes).map_err(|e| e.to_string())?;
    ensure!(&kb == engine.kb(), "KB snapshot round trip differs");
    ensure!(kb.snapshot() == kb_bytes, "KB snapshot bytes unstable");
    ensure!(
        reloaded.snapshot() == engine.snapshot(),
        "engine snapshot bytes unstable"
    );
    Ok(())
}

async fn call(app: &Router, request: Request<Body>) -> (StatusCode, Value) {
    let response = app.clone().oneshot(request).await.unwrap();
    let status = response.status();
    let body = response.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&body).unwrap_or(Value::Null))
}

async fn get(app: &Router, uri: &str) -> (StatusCode, Value) {
    call(app, Request::get(uri).body(Body::empty()).unwrap()).await
}

async fn post(app: &Router, uri: &str, body: &str) -> (StatusCode, Value) {
    let request = Request::post(uri)
        .header("content-type", "application/json")
        .body(Body::from(body.to_owned()))
        .unwrap();
    call(app, request).await
}

async fn service_contract(dir: &Path) -> Check {
    let copy = |name: &str, file: &str| {
        let to = dir.join(file);
        std::fs::copy(fixture(name), &to).unwrap();
        to
    };
    let source = EngineSource::Files {
        corpus: copy("corpus/sample.json", "corpus.json"),
        ontology: copy("ontology/ontology.json", "ontology.json"),
        lexicon: copy("lexicon/en.json", "lexicon.json"),
    };
    let state = AppState::new(
        source.load(&Config::default()).map_err(|e| e.to_string())?,
        Some(source),
    );
    let app = router(Arc::clone(&state));

    let (status, body) = post(&app, "/query", r#"{"text":"What is motorcycle?"}"#).await;
    ensure!(status == StatusCode::OK, "q1 status {status}");
    ensure!(
        body["query_class"] == "Concept",
        "q1 class {}",
        body["query_class"]
    );
    ensure!(
        body["items"][0]["legal_ref"] == "QCVN 41:2019/Art.3/Cl.3.31",
        "q1 top {}",
        body["items"][0]["legal_ref"]
    );

    let (status, _) = post(&app, "/query", r#"{"text":""}"#).await;
    ensure!(
        status == StatusCode::BAD_REQUEST,
        "empty text status {status}"
    );

    let helmet = r#"{"text":"fines for not wearing helmet on motorbike"}"#;
    let (status, body) = post(&app, "/query", helmet).await;
    ensure!(status == StatusCode::OK, "helmet status {status}");
    ensure!(
        body["items"][0]["penalty"]["fine_min"] == 200_000,
        "helmet fine {}",
        body["items"][0]["penalty"]
    );
    let (_, again) = post(&app, "/query", helmet).await;
    ensure!(
        serde_json::to_vec(&body["items"]).unwrap() == serde_json::to_vec(&again["items"]).unwrap(),
        "repeated query differs"
    );

    let (status, body) = get(&app, "/concepts/electric-motorcycle").await;
    ensure!(status == StatusCode::OK, "concept status {status}");
    ensure!(
        body["name"] == "Electric motorcycle",
        "concept name {}",
        body["name"]
    );
    ensure!(
        body["keywords"].as_array().map(Vec::len) == Some(4),
        "concept keywords {}",
        body["keywords"]
    );
    let (status, _) = get(&app, "/concepts/unknown").await;
    ensure!(
        status == StatusCode::NOT_FOUND,
        "unknown concept status {status}"
    );
    let (status, _) = get(&app, "/concepts/Electric-Motorcycle").await;
    ensure!(
        status == StatusCode::OK,
        "mixed-case concept status {status}"
    );

    let (status, body) = get(&app, "/provisions?ref=100-2019-ND-CP/6/2/i").await;
    ensure!(status == StatusCode::OK, "provision status {status}");
    ensure!(
        body["text"]
            .as_str()
            .is_some_and(|t| t.contains("does not wear a motorcycle helmet")),
        "provision text {}",
        body["text"]
    );
    let (status, _) = get(&app, "/provisions?ref=100-2019-ND-CP/999").await;
    ensure!(
        status == StatusCode::NOT_FOUND,
        "missing provision status {status}"
    );
    let (status, _) = get(&app, "/provisions?ref=garbage").await;
    ensure!(
        status == StatusCode::BAD_REQUEST,
        "garbage ref status {status}"
    );

    let (status, body) = get(&app, "/health").await;
    ensure!(status == StatusCode::OK, "health status {status}");
    ensure!(
        body["concepts"] == state.engine().kb().concept_count(),
        "health concepts {}",
        body["concepts"]
    );

    let before = state.engine();
    std::fs::write(dir.join("ontology.json"), b"{\"concepts\": [").unwrap();
    let (status, body) = post(&app, "/admin/reload", "").await;
    ensure!(
        status == StatusCode::CONFLICT,
        "broken reload status {status}"
    );
    ensure!(
        !body["violations"].as_array().is_none_or(Vec::is_empty),
        "no violations reported"
    );
    ensure!(
        Arc::ptr_eq(&before, &state.engine()),
        "engine swapped on failure"
    );
    let (status, body) = post(&app, "/query", r#"{"text":"What is motorcycle?"}"#).await;
    ensure!(
        status == StatusCode::OK && body["items"][0]["legal_ref"] == "QCVN 41:2019/Art.3/Cl.3.31",
        "query after failed reload: {status} {}",
        body["items"][0]["legal_ref"]
    );

    std::fs::copy(fixture("ontology/ontology.json"), dir.join("ontology.json")).unwrap();
    let (status, _) = post(&app, "/admin/reload", "").await;
    ensure!(status == StatusCode::OK, "valid reload status {status}");
    ensure!(
        !Arc::ptr_eq(&before, &state.engine()),
        "engine not swapped on success"
    );
    Ok(())
}

#[test]
fn acceptance() {
    let dir = tempfile::tempdir().unwrap();
    let snapshot = ingest(dir.path());
    let engine = engine();
    let service_dir = tempfile::tempdir().unwrap();
    let runtime = tokio::runtime::Runtime::new().unwrap();

    let results: Vec<(&str, Check)> = vec![
        (
            "definition query reproduces the motorcycle example",
            definition_query(&snapshot),
        ),
        (
            "penalty query reproduces the helmet-fines example",
            penalty_query(&snapshot, &engine),
        ),
        (
            "concept and relation records match the reference records",
            reference_records(&engine),
        ),
        (
            "closure equals the naive fixpoint on 100 random KBs",
            closure_oracle(),
        ),
        (
            "offence matching equals exhaustive enumeration on 50 fixtures",
            offence_oracle(),
        ),
        (
            "classification accuracy and rate rendering",
            classification(&engine),
        ),
        (
            "citations resolve, round trips hold, answers are deterministic",
            soundness(&engine),
        ),
        (
            "service contract and failed-reload isolation",
            runtime.block_on(service_contract(service_dir.path())),
        ),
    ];

    let mut failed = 0;
    for (name, result) in &results {
        match result {
            Ok(()) => println!("PASS {name}"),
            Err(reason) => {
                failed += 1;
                println!("FAIL {name}: {reason}");
            }
        }
    }
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
