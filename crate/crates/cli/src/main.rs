use std::fmt::Write as _;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ontorank_core::engine::LoadReport;
use ontorank_core::{
    generate, ApiError, Bundle, BundleError, Engine, ErrorCode, IngestMode, LoadError, MatchKind, MeasureSpec,
    QueryRequest, QueryResponse, SimilarityError,
};
use ontorank_server::AppState;

const EXIT_IO: u8 = 2;
const EXIT_INVALID_INPUT: u8 = 3;
const EXIT_UNKNOWN_CONCEPT: u8 = 4;
const EXIT_BAD_ARGUMENTS: u8 = 5;

#[derive(Parser)]
#[command(name = "ontorank", version, about = "Rank ontology-annotated documents against concept queries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an ontology and an annotation file and write an index bundle.
    Index {
        #[arg(long)]
        ontology: PathBuf,
        #[arg(long)]
        annotations: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Strict)]
        mode: Mode,
    },
    /// Run one query and print the ranked documents.
    Query {
        #[command(flatten)]
        source: Source,
        /// Comma-separated concept ids.
        #[arg(long, value_delimiter = ',', required = true)]
        concepts: Vec<String>,
        #[arg(long, allow_negative_numbers = true)]
        q: Option<f64>,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        limit: Option<u64>,
        /// jd, rada, ho, disa, resnik or lin; IC-based measures take an
        /// optional `:intrinsic` or `:extensional` suffix.
        #[arg(long)]
        measure: Option<String>,
        /// Turn cost for the Hirst–St Onge measure.
        #[arg(long = "K")]
        k: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Print the raw value and [0, 1] similarity of two concepts.
    Sim {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = "jd")]
        measure: String,
        /// Exactly two comma-separated concept ids.
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        concepts: Vec<String>,
        #[arg(long = "K")]
        k: Option<f64>,
    },
    /// Serve the HTTP API.
    Serve {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: SocketAddr,
    },
    /// Write a seeded synthetic ontology and annotation file.
    Generate {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        concept_count: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        doc_count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path of the ontology.
        #[arg(long)]
        ontology: PathBuf,
        /// Output path of the annotation table.
        #[arg(long)]
        annotations: PathBuf,
    },
}

/// Where an engine comes from: a bundle, or the two source files.
#[derive(Args)]
struct Source {
    #[arg(long, conflicts_with_all = ["ontology", "annotations"], required_unless_present_all = ["ontology", "annotations"])]
    index: Option<PathBuf>,
    #[arg(long, requires = "annotations")]
    ontology: Option<PathBuf>,
    #[arg(long, requires = "ontology")]
    annotations: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Mode::Strict)]
    mode: Mode,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Strict,
    Lenient,
}

impl From<Mode> for IngestMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Strict => IngestMode::Strict,
            Mode::Lenient => IngestMode::Lenient,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_BAD_ARGUMENTS)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Index {
            ontology,
            annotations,
            out,
            mode,
        } => index(&ontology, &annotations, &out, mode.into()),
        Command::Query {
            source,
            concepts,
            q,
            threshold,
            limit,
            measure,
            k,
            format,
        } => {
            let request = QueryRequest {
                concepts,
                q,
                threshold,
                limit,
                measure,
                weights: None,
                k,
            };
            query(&load(&source)?, &request, format)
        }
        Command::Sim {
            source,
            measure,
            concepts,
            k,
        } => {
            let [c1, c2] = <[String; 2]>::try_from(concepts)
                .map_err(|_| Failure::new(EXIT_BAD_ARGUMENTS, "--concepts takes exactly two ids for sim"))?;
            let mut spec: MeasureSpec = measure.parse().map_err(bad_args)?;
            if let Some(k) = k {
                spec = spec.with_k(k).map_err(bad_args)?;
            }
            sim(&load(&source)?, spec, &c1, &c2)
        }
        Command::Serve { source, bind } => serve(source, bind),
        Command::Generate {
            concept_count,
            doc_count,
            seed,
            ontology,
            annotations,
        } => {
            let data = generate(concept_count as usize, doc_count as usize, seed);
            write(&ontology, &data.ontology)?;
            write(&annotations, &data.annotations)?;
            println!(
                "wrote {concept_count} concepts to {} and {doc_count} documents to {}",
                ontology.display(),
                annotations.display()
            );
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Outcome {
    std::fs::write(path, contents).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
}

fn bad_args(e: impl std::fmt::Display) -> Failure {
    Failure::new(EXIT_BAD_ARGUMENTS, e.to_string())
}

fn from_sources(ontology: &Path, annotations: &Path, mode: IngestMode) -> Result<(Engine, LoadReport, [String; 2]), Failure> {
    let (obo, tsv) = (read(ontology)?, read(annotations)?);
    let (engine, report) = Engine::from_sources(&obo, &tsv, mode).map_err(|e| {
        let path = match e {
            LoadError::Ontology(_) => ontology,
            LoadError::Corpus(_) => annotations,
        };
        Failure::new(EXIT_INVALID_INPUT, format!("{}: {e}", path.display()))
    })?;
    Ok((engine, report, [obo, tsv]))
}

fn load_bundle(path: &Path) -> Result<Engine, Failure> {
    let code = |e: &BundleError| match e {
        BundleError::Io(_) => EXIT_IO,
        _ => EXIT_INVALID_INPUT,
    };
    Bundle::load(path)
        .and_then(Bundle::into_engine)
        .map_err(|e| Failure::new(code(&e), format!("{}: {e}", path.display())))
}

fn load(source: &Source) -> Result<Engine, Failure> {
    match (&source.index, &source.ontology, &source.annotations) {
        (Some(index), _, _) => load_bundle(index),
        (None, Some(o), Some(a)) => Ok(from_sources(o, a, source.mode.into())?.0),
        _ => Err(Failure::new(EXIT_BAD_ARGUMENTS, "give --index, or --ontology with --annotations")),
    }
}

fn index(ontology: &Path, annotations: &Path, out: &Path, mode: IngestMode) -> Outcome {
    let (engine, report, [obo, tsv]) = from_sources(ontology, annotations, mode)?;
    let built_at = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let bundle = Bundle::from_engine(obo.as_bytes(), tsv.as_bytes(), built_at, &engine);
    bundle
        .save(out)
        .map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", out.display())))?;
    let a = &report.annotations;
    println!("concepts: {}", engine.graph().len());
    println!("is_a edges: {}", engine.graph().edge_count());
    println!("skipped relationships: {}", report.ontology.skipped_relationships);
    println!("documents: {}", engine.corpus().len());
    println!("annotation rows: {}", a.rows);
    println!("dropped rows: {}", a.dropped_rows);
    if !a.dropped_documents.is_empty() {
        println!("dropped documents: {}", a.dropped_documents.join(","));
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn api_failure(e: ApiError) -> Failure {
    let code = match e.code {
        ErrorCode::UnknownConcept => EXIT_UNKNOWN_CONCEPT,
        ErrorCode::BadQuery | ErrorCode::NotFound => EXIT_BAD_ARGUMENTS,
    };
    Failure::new(code, e.message)
}

fn query(engine: &Engine, request: &QueryRequest, format: Format) -> Outcome {
    let started = Instant::now();
    let mut response = engine.respond(request).map_err(api_failure)?;
    response.timing_ms = started.elapsed().as_secs_f64() * 1e3;
    match format {
        Format::Json => println!("{}", serde_json::to_string(&response).expect("responses serialize")),
        Format::Table => print!("{}", table(&response)),
    }
    Ok(())
}

fn kind_name(kind: MatchKind) -> &'static str {
    match kind {
        MatchKind::Exact => "Exact",
        MatchKind::Hyponym => "Hyponym",
        MatchKind::Hypernym => "Hypernym",
        MatchKind::None => "None",
    }
}

fn table(response: &QueryResponse) -> String {
    let mut out = String::from("rank\tdocId\trsv");
    for c in &response.query.concepts {
        let _ = write!(out, "\t{c}");
    }
    out.push('\n');
    for r in &response.results {
        let _ = write!(out, "{}\t{}\t{:.4}", r.rank, r.doc_id, r.rsv);
        for e in &r.elementary {
            let _ = write!(out, "\t{:.4}({})", e.score, kind_name(e.kind));
        }
        out.push('\n');
    }
    out
}

fn sim(engine: &Engine, spec: MeasureSpec, c1: &str, c2: &str) -> Outcome {
    let pair = engine.similarity(spec, c1, c2).map_err(|e| match e {
        SimilarityError::UnknownConcept(_) => Failure::new(EXIT_UNKNOWN_CONCEPT, e.to_string()),
        _ => Failure::new(EXIT_BAD_ARGUMENTS, e.to_string()),
    })?;
    println!("raw {}", pair.raw_text());
    println!("sim {:.6}", pair.similarity);
    Ok(())
}

fn serve(source: Source, bind: SocketAddr) -> Outcome {
    let engine = load(&source)?;
    let health = engine.health();
    let reloader: ontorank_server::Reloader = match (source.index, source.ontology, source.annotations) {
        (Some(index), _, _) => Box::new(move || load_bundle(&index).map_err(|f| f.message)),
        (None, Some(o), Some(a)) => {
            let mode = source.mode.into();
            Box::new(move || from_sources(&o, &a, mode).map(|(e, _, _)| e).map_err(|f| f.message))
        }
        _ => unreachable!("load() accepted the source"),
    };
    let state = Arc::new(AppState::new(engine).with_reloader(reloader));
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(bind)
            .await
            .map_err(|e| Failure::new(EXIT_IO, format!("cannot bind {bind}: {e}")))?;
        let local = listener.local_addr().map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
        println!(
            "serving {} documents over {} concepts on http://{local}",
            health.doc_count, health.concept_count
        );
        ontorank_server::serve_on(listener, state)
            .await
            .map_err(|e| Failure::new(EXIT_IO, e.to_string()))
    })
}
