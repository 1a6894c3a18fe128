use std::io::{Read, Write};
use std::net::{TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Output, Stdio};
use std::time::{Duration, Instant};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(name)
        .display()
        .to_string()
}

fn lexsearch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lexsearch"))
        .args(args)
        .env("RUST_LOG", "off")
        .output()
        .unwrap()
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn sources<'a>(corpus: &'a str, ontology: &'a str, lexicon: &'a str) -> Vec<&'a str> {
    vec![
        "--corpus",
        corpus,
        "--ontology",
        ontology,
        "--lexicon",
        lexicon,
    ]
}

fn snapshot(dir: &Path) -> String {
    let out = dir.join("kb.snap").display().to_string();
    let (c, o, l) = (
        fixture("corpus/sample.json"),
        fixture("ontology/ontology.json"),
        fixture("lexicon/en.json"),
    );
    let mut args = vec!["ingest"];
    args.extend(sources(&c, &o, &l));
    args.extend(["--out", &out]);
    let output = lexsearch(&args);
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    out
}

#[test]
fn ingest_writes_a_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let path = snapshot(dir.path());
    let bytes = std::fs::read(&path).unwrap();
    assert!(bytes.starts_with(b"LEXKB v1\n"));
}

#[test]
fn ingest_and_validate_report_violations_and_io_errors() {
    let dir = tempfile::tempdir().unwrap();
    let (c, l) = (fixture("corpus/sample.json"), fixture("lexicon/en.json"));
    let broken = dir.path().join("broken.json");
    let dangling = std::fs::read_to_string(fixture("ontology/ontology.json"))
        .unwrap()
        .replace("\"3.31\"", "\"3.99\"");
    std::fs::write(&broken, dangling).unwrap();
    let broken = broken.display().to_string();
    let out = dir.path().join("kb.snap").display().to_string();

    let mut ingest = vec!["ingest"];
    ingest.extend(sources(&c, &broken, &l));
    ingest.extend(["--out", &out]);
    let output = lexsearch(&ingest);
    assert_eq!(output.status.code(), Some(1));
    assert!(
        stderr(&output).contains("[dangling-ref]"),
        "{}",
        stderr(&output)
    );
    assert!(!Path::new(&out).exists());

    let mut validate = vec!["validate"];
    validate.extend(sources(&c, &broken, &l));
    assert_eq!(lexsearch(&validate).status.code(), Some(1));

    let o = fixture("ontology/ontology.json");
    let mut validate = vec!["validate"];
    validate.extend(sources(&c, &o, &l));
    let output = lexsearch(&validate);
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));

    let mut missing = vec!["validate"];
    missing.extend(sources("/nonexistent/corpus.json", &o, &l));
    let output = lexsearch(&missing);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("/nonexistent/corpus.json"));

    assert_eq!(
        lexsearch(&["validate", "--corpus", &c]).status.code(),
        Some(1)
    );
}

#[test]
fn query_renders_definitions_and_fines() {
    let dir = tempfile::tempdir().unwrap();
    let snap = snapshot(dir.path());

    let output = lexsearch(&["query", "--snapshot", &snap, "What is motorcycle?"]);
    assert_eq!(output.status.code(), Some(0));
    let text = stdout(&output);
    assert!(text.contains("QCVN 41:2019/Art.3/Cl.3.31"), "{text}");
    assert!(text.contains("Motorcycle means a motor vehicle that has two or three wheels"));

    let output = lexsearch(&[
        "query",
        "--snapshot",
        &snap,
        "fines for not wearing helmet on motorbike",
    ]);
    let text = stdout(&output);
    assert!(text.contains("200,000-300,000 VND"), "{text}");
    assert!(text.contains("Art.6/Cl.2/Pt.i"));

    let output = lexsearch(&["query", "--snapshot", &snap, "hello"]);
    assert_eq!(output.status.code(), Some(0));
    assert!(stdout(&output).contains("neither for a definition nor for a penalty"));
    let strict = lexsearch(&["query", "--snapshot", &snap, "--strict", "hello"]);
    assert_eq!(strict.status.code(), Some(3));
    let strict = lexsearch(&[
        "query",
        "--snapshot",
        &snap,
        "--strict",
        "What is motorcycle?",
    ]);
    assert_eq!(strict.status.code(), Some(0));
}

#[test]
fn json_output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let snap = snapshot(dir.path());
    let args = [
        "query",
        "--snapshot",
        &snap,
        "--format",
        "json",
        "Penalty for passenger on motorbike not wearing helmet",
    ];
    let first = lexsearch(&args);
    let second = lexsearch(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let value: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(value["query_class"], "Penalty");
}

#[test]
fn query_with_missing_snapshot_is_an_io_error() {
    let output = lexsearch(&[
        "query",
        "--snapshot",
        "/nonexistent/kb.snap",
        "What is motorcycle?",
    ]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn eval_prints_table_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let snap = snapshot(dir.path());
    let report = dir.path().join("report.json");
    let output = lexsearch(&[
        "eval",
        "--snapshot",
        &snap,
        "--queries",
        &fixture("queries/labeled.json"),
        "--report",
        &report.display().to_string(),
    ]);
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let table = stdout(&output);
    assert!(table.starts_with("Kind"));
    assert!(table.contains("Queries about concepts / definitions"));
    assert!(table.contains("Queries about penalties and fines"));
    assert!(table.contains("Classification accuracy:"));

    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    let concept = &report["per_class"]["Concept"];
    let penalty = &report["per_class"]["Penalty"];
    assert_eq!(
        report["overall"]["total"],
        concept["total"].as_u64().unwrap() + penalty["total"].as_u64().unwrap()
    );
    assert_eq!(
        report["records"].as_array().unwrap().len(),
        report["classification"]["total"]
    );
}

#[test]
fn eval_handles_empty_and_malformed_query_files() {
    let dir = tempfile::tempdir().unwrap();
    let snap = snapshot(dir.path());
    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, "[]").unwrap();
    let report = dir.path().join("report.json").display().to_string();
    let output = lexsearch(&[
        "eval",
        "--snapshot",
        &snap,
        "--queries",
        &empty.display().to_string(),
        "--report",
        &report,
    ]);
    assert_eq!(output.status.code(), Some(0));
    let table = stdout(&output);
    assert!(table.lines().nth(3).unwrap().starts_with("Total"));
    assert_eq!(table.matches("n/a").count(), 4, "{table}");

    let malformed = dir.path().join("bad.json");
    std::fs::write(&malformed, r#"[{"text": "hi", "label": "Nonsense"}]"#).unwrap();
    let output = lexsearch(&[
        "eval",
        "--snapshot",
        &snap,
        "--queries",
        &malformed.display().to_string(),
        "--report",
        &report,
    ]);
    assert_eq!(output.status.code(), Some(1));
}

fn free_port() -> u16 {
    TcpListener::bind("127.0.0.1:0")
        .unwrap()
        .local_addr()
        .unwrap()
        .port()
}

fn get_status(addr: &str, path: &str) -> Option<String> {
    let mut stream = TcpStream::connect(addr).ok()?;
    stream.set_read_timeout(Some(Duration::from_secs(5))).ok()?;
    write!(
        stream,
        "GET {path} HTTP/1.1\r\nHost: {addr}\r\nConnection: close\r\n\r\n"
    )
    .ok()?;
    let mut response = String::new();
    stream.read_to_string(&mut response).ok()?;
    response.lines().next().map(str::to_owned)
}

struct Server(Child);

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.0.kill();
        let _ = self.0.wait();
    }
}

#[test]
fn serve_answers_health() {
    let dir = tempfile::tempdir().unwrap();
    let snap = snapshot(dir.path());
    let addr = format!("127.0.0.1:{}", free_port());
    let _server = Server(
        Command::new(env!("CARGO_BIN_EXE_lexsearch"))
            .args(["serve", "--snapshot", &snap])
            .env("LEXSEARCH_ADDR", &addr)
            .env("RUST_LOG", "off")
            .stdout(Stdio::null())
            .stderr(Stdio::null())
            .spawn()
            .unwrap(),
    );
    let deadline = Instant::now() + Duration::from_secs(20);
    let status = loop {
        if let Some(line) = get_status(&addr, "/health") {
            break line;
        }
        assert!(
            Instant::now() < deadline,
            "server did not come up on {addr}"
        );
        std::thread::sleep(Duration::from_millis(50));
    };
    assert!(status.starts_with("HTTP/1.1 200"), "{status}");
}

#[test]
fn serve_without_sources_is_a_usage_error() {
    assert_eq!(lexsearch(&["serve"]).status.code(), Some(1));
}
