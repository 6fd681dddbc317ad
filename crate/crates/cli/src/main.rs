//! Command-line pipeline: ingest, train embeddings, train the classifier,
//! extract triples into a graph file, query it, evaluate, export.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use relext::ckg::{evaluate_query, import_srt, parse_query, Graph};
use relext::classifier::{
    CheckpointMetadata, LabeledExample, RelationModel, TrainConfig, DEFAULT_HIDDEN,
};
use relext::corpus::{corpus_stats, ingest_cve_json, ingest_text, Document};
use relext::embeddings::{train_embeddings, EmbeddingTable, SgnsConfig};
use relext::error::Error;
use relext::metrics::{evaluate, stratified_split, SPLIT_PRESETS};
use relext::ner::{load_standoff, EntityMention, Gazetteer};
use relext::pipeline::{run_extract, ExtractConfig};
use relext::schema::{RelationType, SchemaMatrix};

const EXIT_GENERIC: u8 = 1;
const EXIT_MISSING_INPUT: u8 = 2;
const EXIT_QUERY_PARSE: u8 = 3;

#[derive(Parser)]
#[command(name = "relext", version, about = "Relation extraction over cybersecurity text")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CorpusArgs {
    /// Directory of input documents (*.json parsed as CVE feeds, everything
    /// else as plain text)
    #[arg(long)]
    corpus_dir: Vec<PathBuf>,
    /// Individual plain-text document
    #[arg(long)]
    text: Vec<PathBuf>,
    /// Individual CVE JSON feed
    #[arg(long)]
    cve_json: Vec<PathBuf>,
}

#[derive(Args)]
struct SchemaArg {
    /// Schema config file; defaults to the built-in UCO 2.0 matrix
    #[arg(long, env = "RELEXT_SCHEMA")]
    schema: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Tokenize a corpus and print its statistics
    Ingest {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        json: bool,
    },
    /// Train skip-gram word embeddings on a corpus
    TrainEmbeddings {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Output embedding file
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 200)]
        dim: usize,
        #[arg(long, default_value_t = 5)]
        context_window: usize,
        #[arg(long, default_value_t = 5)]
        negatives: usize,
        #[arg(long, default_value_t = 2)]
        min_count: usize,
        #[arg(long, default_value_t = 5)]
        epochs: usize,
        #[arg(long, default_value_t = 0.025)]
        learning_rate: f64,
        #[arg(long, default_value_t = 1e-3)]
        subsample: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Train the relation classifier from source/relation/target triples
    TrainClassifier {
        /// Training triples, TSV: source, source class, relation, target,
        /// target class
        #[arg(long)]
        srt: PathBuf,
        /// Embedding file from train-embeddings
        #[arg(long)]
        embeddings: PathBuf,
        /// Output model checkpoint (JSON)
        #[arg(long)]
        output: PathBuf,
        /// Comma-separated label set; defaults to the schema's relations
        #[arg(long)]
        labels: Option<String>,
        #[command(flatten)]
        schema: SchemaArg,
        #[arg(long, default_value_t = 100)]
        batch_size: usize,
        #[arg(long, default_value_t = 50)]
        epochs: usize,
        #[arg(long, default_value_t = 0.01)]
        learning_rate: f64,
        #[arg(long, default_value_t = 0.9)]
        momentum: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Run the full pipeline and assert predicted triples into a graph file
    Extract {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Gazetteer TSV for entity annotation
        #[arg(long, conflicts_with = "standoff")]
        gazetteer: Option<PathBuf>,
        /// Standoff JSONL with externally produced mentions
        #[arg(long)]
        standoff: Option<PathBuf>,
        #[arg(long)]
        embeddings: PathBuf,
        #[arg(long)]
        model: PathBuf,
        /// Graph file to update (created when absent)
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        schema: SchemaArg,
        /// Proximity window in word tokens
        #[arg(long, default_value_t = 35)]
        window: usize,
        /// Minimum softmax confidence for an assertion
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        /// Zero out probabilities outside the schema candidate set
        #[arg(long)]
        schema_mask: bool,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a conjunctive query against a graph file
    Query {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        schema: SchemaArg,
        /// e.g. `SELECT ?x WHERE { ?x :type :software. }`
        query: String,
    },
    /// Train on a stratified split and report accuracy, P/R/F1, confusion
    Eval {
        #[arg(long)]
        srt: PathBuf,
        #[arg(long)]
        embeddings: PathBuf,
        #[command(flatten)]
        schema: SchemaArg,
        /// Split preset: 80-20, 70-30, or 66-34
        #[arg(long, default_value = "80-20")]
        split: String,
        #[arg(long, default_value_t = 100)]
        batch_size: usize,
        #[arg(long, default_value_t = 50)]
        epochs: usize,
        #[arg(long, default_value_t = 0.01)]
        learning_rate: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Serialize a graph file
    Export {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        schema: SchemaArg,
        #[arg(long, value_enum, default_value_t = ExportFormat::Ntriples)]
        format: ExportFormat,
        /// Output file; stdout when omitted
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    Ntriples,
    Json,
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn new(code: u8, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io { .. } => EXIT_MISSING_INPUT,
            Error::Query { .. } => EXIT_QUERY_PARSE,
            _ => EXIT_GENERIC,
        };
        CliError::new(code, e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn require_file(path: &Path, what: &str) -> CliResult<()> {
    if !path.is_file() {
        return Err(CliError::new(
            EXIT_MISSING_INPUT,
            format!("missing {what}: {}", path.display()),
        ));
    }
    Ok(())
}

fn load_corpus(args: &CorpusArgs) -> CliResult<Vec<Document>> {
    let mut docs = Vec::new();
    for dir in &args.corpus_dir {
        if !dir.is_dir() {
            return Err(CliError::new(
                EXIT_MISSING_INPUT,
                format!("missing corpus directory: {}", dir.display()),
            ));
        }
        let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)
            .map_err(|e| CliError::new(EXIT_MISSING_INPUT, e.to_string()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file())
            .collect();
        entries.sort();
        for path in entries {
            if path.extension().is_some_and(|e| e == "json") {
                docs.extend(ingest_cve_json(&path)?.documents);
            } else {
                let id = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| path.display().to_string());
                docs.push(ingest_text(&path, &id)?);
            }
        }
    }
    for path in &args.text {
        require_file(path, "text document")?;
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        docs.push(ingest_text(path, &id)?);
    }
    for path in &args.cve_json {
        require_file(path, "CVE feed")?;
        docs.extend(ingest_cve_json(path)?.documents);
    }
    if docs.is_empty() {
        return Err(CliError::new(
            EXIT_MISSING_INPUT,
            "no input documents (use --corpus-dir, --text, or --cve-json)",
        ));
    }
    Ok(docs)
}

fn load_schema(arg: &SchemaArg) -> CliResult<SchemaMatrix> {
    if let Some(path) = &arg.schema {
        require_file(path, "schema config")?;
    }
    Ok(SchemaMatrix::load(arg.schema.as_deref())?)
}

fn load_graph(path: &Path, schema: &SchemaMatrix) -> CliResult<Graph> {
    if path.is_file() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::new(EXIT_MISSING_INPUT, e.to_string()))?;
        Ok(Graph::import_json(&text, schema.clone())?)
    } else {
        Ok(Graph::new(schema.clone()))
    }
}

// Write via temp file + rename so a failed run never leaves a partial file.
fn atomic_write(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let tmp = match dir {
        Some(d) => d.join(format!(
            ".{}.tmp",
            path.file_name().unwrap_or_default().to_string_lossy()
        )),
        None => PathBuf::from(format!(".{}.tmp", path.display())),
    };
    std::fs::write(&tmp, bytes)
        .and_then(|_| std::fs::rename(&tmp, path))
        .map_err(|e| CliError::new(EXIT_GENERIC, format!("writing {}: {e}", path.display())))
}

fn labeled_examples(
    srt: &Path,
    table: &EmbeddingTable,
) -> CliResult<(Vec<LabeledExample>, usize)> {
    require_file(srt, "training triples file")?;
    let (triples, malformed) = import_srt(srt)?;
    let examples = triples
        .iter()
        .map(|t| LabeledExample {
            subject_vector: table.surface_vector(&t.subject),
            object_vector: table.surface_vector(&t.object),
            label: t.relation.clone(),
        })
        .collect();
    for (line, reason) in &malformed {
        eprintln!("warning: {srt:?} line {line}: {reason}", srt = srt.display());
    }
    Ok((examples, malformed.len()))
}

// Input width follows the embedding dim (subject + object concatenated);
// the hidden stack keeps its standard shape.
fn init_for_table(
    labels: &[RelationType],
    table: &EmbeddingTable,
    seed: u64,
) -> CliResult<RelationModel> {
    let dims = [
        2 * table.dim,
        DEFAULT_HIDDEN[0],
        DEFAULT_HIDDEN[1],
        DEFAULT_HIDDEN[2],
        labels.len(),
    ];
    Ok(RelationModel::init_with_dims(labels, &dims, seed)?)
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Ingest { corpus, json } => {
            let docs = load_corpus(&corpus)?;
            let stats = corpus_stats(&docs)?;
            if json {
                println!(
                    "{}",
                    serde_json::json!({
                        "documents": docs.len(),
                        "tokens": stats.token_count,
                        "sentences": stats.sentence_count,
                        "avg_sentence_length": stats.avg_sentence_length,
                    })
                );
            } else {
                println!("documents            {}", docs.len());
                println!("tokens               {}", stats.token_count);
                println!("sentences            {}", stats.sentence_count);
                println!("avg sentence length  {:.2}", stats.avg_sentence_length);
            }
            Ok(())
        }

        Command::TrainEmbeddings {
            corpus,
            output,
            dim,
            context_window,
            negatives,
            min_count,
            epochs,
            learning_rate,
            subsample,
            seed,
        } => {
            let docs = load_corpus(&corpus)?;
            let cfg = SgnsConfig {
                dim,
                context_window,
                negatives_per_positive: negatives,
                min_count,
                epochs,
                learning_rate,
                subsample_threshold: subsample,
                seed,
            };
            let (table, losses) = train_embeddings(&docs, &cfg)?;
            table.save(&output)?;
            eprintln!(
                "trained {} vectors of dim {dim}; final epoch loss {:.4}",
                table.vocab().len(),
                losses.last().copied().unwrap_or(f64::NAN)
            );
            Ok(())
        }

        Command::TrainClassifier {
            srt,
            embeddings,
            output,
            labels,
            schema,
            batch_size,
            epochs,
            learning_rate,
            momentum,
            seed,
        } => {
            require_file(&embeddings, "embedding file")?;
            let schema = load_schema(&schema)?;
            let table = EmbeddingTable::load(&embeddings)?;
            let label_set: Vec<RelationType> = match labels {
                Some(list) => list.split(',').map(|s| RelationType::new(s.trim())).collect(),
                None => schema.relations().iter().cloned().collect(),
            };
            for label in &label_set {
                if !schema.has_relation(label) {
                    return Err(CliError::new(
                        EXIT_GENERIC,
                        format!("label '{label}' is not declared in the schema"),
                    ));
                }
            }
            let (examples, _) = labeled_examples(&srt, &table)?;
            let mut model = init_for_table(&label_set, &table, seed)?;
            let cfg = TrainConfig {
                batch_size,
                epochs,
                learning_rate,
                momentum,
                seed,
                confidence_threshold: 0.5,
            };
            let history = model.train(&examples, &cfg)?;
            let meta = CheckpointMetadata {
                seed,
                epochs,
                final_loss: history.last().copied(),
            };
            model.save(&output, meta)?;
            eprintln!(
                "trained on {} examples; final epoch loss {:.4}",
                examples.len(),
                history.last().copied().unwrap_or(f64::NAN)
            );
            Ok(())
        }

        Command::Extract {
            corpus,
            gazetteer,
            standoff,
            embeddings,
            model,
            graph,
            schema,
            window,
            threshold,
            schema_mask,
            json,
        } => {
            require_file(&embeddings, "embedding file")?;
            require_file(&model, "model checkpoint")?;
            let schema = load_schema(&schema)?;
            let docs = load_corpus(&corpus)?;
            let table = EmbeddingTable::load(&embeddings)?;
            let (model, _) = RelationModel::load(&model)?;

            let mentions: Vec<EntityMention> = match (&gazetteer, &standoff) {
                (Some(path), None) => {
                    require_file(path, "gazetteer")?;
                    let loaded = Gazetteer::load(path, &schema)?;
                    docs.iter().flat_map(|d| loaded.gazetteer.annotate(d)).collect()
                }
                (None, Some(path)) => {
                    require_file(path, "standoff annotations")?;
                    let loaded = load_standoff(path, &docs, &schema)?;
                    for (line, reason) in &loaded.rejected {
                        eprintln!("warning: standoff line {line}: {reason}");
                    }
                    loaded.mentions
                }
                _ => {
                    return Err(CliError::new(
                        EXIT_MISSING_INPUT,
                        "exactly one of --gazetteer or --standoff is required",
                    ))
                }
            };

            let mut graph_state = load_graph(&graph, &schema)?;
            let cfg = ExtractConfig {
                window,
                confidence_threshold: threshold,
                schema_mask,
            };
            let summary = run_extract(
                &docs,
                &mentions,
                &schema,
                &table,
                &model,
                &mut graph_state,
                &cfg,
            )?;
            atomic_write(&graph, graph_state.export_json().as_bytes())?;

            if json {
                println!("{}", serde_json::to_string_pretty(&summary).unwrap());
            } else {
                println!("documents            {}", summary.documents);
                println!("mentions             {}", summary.mentions);
                println!("pairs generated      {}", summary.pairs_generated);
                println!("pairs kept           {}", summary.pairs_kept);
                println!("relations predicted  {}", summary.relations_predicted);
                println!("triples asserted     {}", summary.triples_asserted);
            }
            Ok(())
        }

        Command::Query {
            graph,
            schema,
            query,
        } => {
            require_file(&graph, "graph file")?;
            let schema = load_schema(&schema)?;
            let graph = load_graph(&graph, &schema)?;
            let parsed = parse_query(&query).map_err(|e| {
                if let Error::Query { position, message } = &e {
                    let mut caret = String::new();
                    caret.push_str(&query);
                    caret.push('\n');
                    caret.push_str(&" ".repeat(*position));
                    caret.push('^');
                    CliError::new(EXIT_QUERY_PARSE, format!("{message}\n{caret}"))
                } else {
                    CliError::from(e)
                }
            })?;
            let results = evaluate_query(&graph, &parsed)?;
            for binding in results {
                let line: Vec<String> = parsed
                    .select_vars
                    .iter()
                    .map(|v| format!("?{v} = {}", binding[v]))
                    .collect();
                println!("{}", line.join(", "));
            }
            Ok(())
        }

        Command::Eval {
            srt,
            embeddings,
            schema,
            split,
            batch_size,
            epochs,
            learning_rate,
            seed,
            json,
        } => {
            require_file(&embeddings, "embedding file")?;
            let schema = load_schema(&schema)?;
            let table = EmbeddingTable::load(&embeddings)?;
            let fraction = SPLIT_PRESETS
                .iter()
                .find(|(name, _)| *name == split)
                .map(|(_, f)| *f)
                .or_else(|| split.parse::<f64>().ok())
                .ok_or_else(|| {
                    CliError::new(
                        EXIT_GENERIC,
                        format!("unknown split '{split}' (expected 80-20, 70-30, 66-34, or a fraction)"),
                    )
                })?;
            let (examples, _) = labeled_examples(&srt, &table)?;
            let split_result = stratified_split(&examples, fraction, seed)?;
            for w in &split_result.warnings {
                eprintln!("warning: {w}");
            }
            let labels: Vec<RelationType> = schema.relations().iter().cloned().collect();
            let mut model = init_for_table(&labels, &table, seed)?;
            let cfg = TrainConfig {
                batch_size,
                epochs,
                learning_rate,
                momentum: 0.9,
                seed,
                confidence_threshold: 0.5,
            };
            model.train(&split_result.train, &cfg)?;
            let predictions: Vec<(RelationType, Option<RelationType>)> = split_result
                .test
                .iter()
                .map(|ex| {
                    let probs = model.forward(&ex.subject_vector, &ex.object_vector)?;
                    let best = probs
                        .iter()
                        .enumerate()
                        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                        .unwrap()
                        .0;
                    Ok((ex.label.clone(), Some(model.labels()[best].clone())))
                })
                .collect::<Result<_, Error>>()?;
            let report = evaluate(&labels, &predictions)?;
            if json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.to_table());
            }
            Ok(())
        }

        Command::Export {
            graph,
            schema,
            format,
            output,
        } => {
            require_file(&graph, "graph file")?;
            let schema = load_schema(&schema)?;
            let graph = load_graph(&graph, &schema)?;
            let serialized = match format {
                ExportFormat::Ntriples => graph.export_ntriples(),
                ExportFormat::Json => graph.export_json(),
            };
            match output {
                Some(path) => atomic_write(&path, serialized.as_bytes())?,
                None => print!("{serialized}"),
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
