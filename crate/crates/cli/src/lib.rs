//! Library side of the `degenkit` command: input format, reports, and the
//! per-file evaluation driver.

pub mod commands;
pub mod report;
pub mod schema;

use std::path::{Path, PathBuf};
use std::thread;

use degenkit_core::generate::{self, DatumShape, GraphShape};
use serde_json::Value;

pub use commands::{evaluate, Command, InputError, Options};
pub use report::Report;

pub const FIXTURES_ENV: &str = "DEGENKIT_FIXTURES";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSIFIED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// The shipped fixture directory, unless `DEGENKIT_FIXTURES` points
/// elsewhere.
pub fn fixtures_dir() -> PathBuf {
    std::env::var_os(FIXTURES_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures"))
}

/// A path as given, or failing that the same name in the fixture directory.
pub fn resolve(path: &Path) -> PathBuf {
    if path.exists() {
        return path.to_path_buf();
    }
    let dir = fixtures_dir();
    let candidate = dir.join(path);
    if candidate.exists() {
        return candidate;
    }
    match path.file_name() {
        Some(name) => dir.join(name),
        None => path.to_path_buf(),
    }
}

#[derive(Debug)]
pub enum FileOutcome {
    Report(Report),
    InputError {
        file: String,
        message: String,
    },
    /// The evaluation panicked: an internal cross-check failed.
    Crashed {
        file: String,
        message: String,
    },
}

impl FileOutcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            FileOutcome::Report(r) if r.falsified() => EXIT_FALSIFIED,
            FileOutcome::Report(_) => EXIT_OK,
            FileOutcome::InputError { .. } => EXIT_INPUT,
            FileOutcome::Crashed { .. } => EXIT_FALSIFIED,
        }
    }
}

fn label(path: &Path) -> String {
    path.file_name().map_or_else(
        || path.display().to_string(),
        |n| n.to_string_lossy().into_owned(),
    )
}

fn evaluate_file(command: Command, path: &Path, opts: &Options) -> FileOutcome {
    let file = label(path);
    let bytes = match std::fs::read(resolve(path)) {
        Ok(b) => b,
        Err(e) => {
            return FileOutcome::InputError {
                file,
                message: format!("cannot read {}: {e}", path.display()),
            }
        }
    };
    match evaluate(command, &file, &bytes, opts) {
        Ok(r) => FileOutcome::Report(r),
        Err(InputError(message)) => FileOutcome::InputError { file, message },
    }
}

fn panic_message(payload: &(dyn std::any::Any + Send)) -> String {
    payload
        .downcast_ref::<String>()
        .cloned()
        .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_else(|| "internal check failed".into())
}

/// Evaluates every file on its own thread; outcomes come back in input order.
pub fn evaluate_all(command: Command, paths: &[PathBuf], opts: &Options) -> Vec<FileOutcome> {
    thread::scope(|s| {
        let handles: Vec<_> = paths
            .iter()
            .map(|p| s.spawn(move || evaluate_file(command, p, opts)))
            .collect();
        handles
            .into_iter()
            .zip(paths)
            .map(|(h, p)| {
                h.join().unwrap_or_else(|payload| FileOutcome::Crashed {
                    file: label(p),
                    message: panic_message(&*payload),
                })
            })
            .collect()
    })
}

/// Rendered stdout, rendered stderr, and the exit code.
pub fn render(outcomes: &[FileOutcome], json: bool) -> (String, String, i32) {
    let mut stdout = String::new();
    let mut stderr = String::new();
    let mut values = Vec::new();
    for o in outcomes {
        match o {
            FileOutcome::Report(r) if json => values.push(r.to_value()),
            FileOutcome::Report(r) => stdout.push_str(&r.to_text()),
            FileOutcome::InputError { file, message } => {
                stderr.push_str(&format!("{file}: error: {message}\n"))
            }
            FileOutcome::Crashed { file, message } => {
                stderr.push_str(&format!("{file}: FALSIFIED: {message}\n"))
            }
        }
    }
    if json {
        let doc = if values.len() == 1 && outcomes.len() == 1 {
            values.pop().unwrap()
        } else {
            Value::Array(values)
        };
        stdout = serde_json::to_string_pretty(&doc).expect("values serialize") + "\n";
    }
    let code = outcomes
        .iter()
        .map(FileOutcome::exit_code)
        .max_by_key(|&c| severity(c))
        .unwrap_or(EXIT_OK);
    (stdout, stderr, code)
}

fn severity(code: i32) -> u8 {
    match code {
        EXIT_INPUT => 2,
        EXIT_FALSIFIED => 1,
        _ => 0,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenerateKind {
    Datum,
    ToricAdditive,
    Polarized,
    Graph,
}

/// A seeded random input document.
pub fn generate_document(kind: GenerateKind, seed: u64) -> schema::Document {
    let mut rng = generate::rng(seed);
    let shape = DatumShape::default();
    let (mut doc, name) = match kind {
        GenerateKind::Datum => (
            schema::datum_document(&generate::random_datum(&mut rng, shape)),
            "random datum",
        ),
        GenerateKind::ToricAdditive => (
            schema::datum_document(&generate::random_ta_datum(&mut rng, shape)),
            "random toric additive datum",
        ),
        GenerateKind::Polarized => (
            schema::datum_document(&generate::random_polarized_datum(&mut rng, shape, 2)),
            "random polarized datum",
        ),
        GenerateKind::Graph => (
            schema::graph_document(&generate::random_graph(&mut rng, GraphShape::default())),
            "random graph",
        ),
    };
    let name = format!("{name}, seed {seed}");
    if let Some(d) = doc.datum.as_mut() {
        d.name = name;
    } else if let Some(g) = doc.graph.as_mut() {
        g.name = name;
    }
    doc
}
