//! Acceptance gate for the whole toolkit. Each test covers one criterion and
//! prints a single PASS line when it holds; run with
//! `cargo test -p relext-cli --test acceptance -- --nocapture` to see them.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use relext::ckg::{evaluate_query, parse_query, Graph, Pattern, Query, Term, Triple};
use relext::classifier::{LabeledExample, RelationModel, TrainConfig};
use relext::corpus::{Document, DocumentSource};
use relext::embeddings::{cosine, train_embeddings, EmbeddingTable, SgnsConfig};
use relext::metrics::{evaluate, f1_score, percent, stratified_split};
use relext::ner::{EntityMention, Gazetteer};
use relext::pairing::generate_pairs;
use relext::pipeline::{run_extract, ExtractConfig};
use relext::schema::{EntityClass, RelationType, SchemaMatrix};

fn labels(names: &[&str]) -> Vec<RelationType> {
    names.iter().copied().map(RelationType::new).collect()
}

fn random_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(-2.0..2.0)).collect()
}

fn demo_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../demo")
}

#[test]
fn c01_analytic_gradients_match_numeric_differences() {
    let start = Instant::now();
    let lbls = labels(&["uses", "mitigates", "indicates"]);
    for seed in 0..100u64 {
        let model = RelationModel::init_with_dims(&lbls, &[8, 6, 5, 4, 3], seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xABCD);
        let example = LabeledExample {
            subject_vector: random_vec(&mut rng, 4),
            object_vector: random_vec(&mut rng, 4),
            label: lbls[(seed % 3) as usize].clone(),
        };
        let max_err = model.gradient_check(&example, 1e-5).unwrap();
        assert!(max_err <= 1e-4, "seed {seed}: gradient error {max_err:e}");
    }
    assert!(start.elapsed() < Duration::from_secs(10), "took {:?}", start.elapsed());
    println!("PASS: C1 gradient check within 1e-4 across 100 seeded models");
}

#[test]
fn c02_forward_yields_distributions_and_shift_invariance() {
    let lbls = labels(&["uses", "mitigates", "indicates", "related-to"]);
    let mut model = RelationModel::init_with_dims(&lbls, &[8, 6, 5, 4, 4], 42).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);

    let inputs: Vec<(Vec<f64>, Vec<f64>)> = (0..1000)
        .map(|_| (random_vec(&mut rng, 4), random_vec(&mut rng, 4)))
        .collect();
    let baseline: Vec<Vec<f64>> = inputs
        .iter()
        .map(|(s, o)| {
            let p = model.forward(s, o).unwrap();
            let sum: f64 = p.iter().sum();
            assert!((sum - 1.0).abs() < 1e-9, "sum {sum}");
            assert!(p.iter().all(|v| *v > 0.0 && *v < 1.0));
            p
        })
        .collect();

    // Adding a constant to every output logit must not move the softmax.
    for b in &mut model.layers_mut().last_mut().unwrap().biases {
        *b += 37.25;
    }
    for ((s, o), base) in inputs.iter().zip(&baseline) {
        let shifted = model.forward(s, o).unwrap();
        for (a, b) in shifted.iter().zip(base) {
            assert!((a - b).abs() < 1e-12, "shift changed output: {a} vs {b}");
        }
    }
    println!("PASS: C2 softmax outputs are distributions and logit-shift invariant");
}

#[test]
fn c03_f1_arithmetic_reconstructs_reported_scores() {
    let cases: [(f64, f64, i64); 5] = [
        (0.49, 0.97, 65),
        (0.92, 0.74, 82),
        (1.00, 0.88, 94),
        (0.80, 0.90, 85),
        (0.55, 0.70, 62),
    ];
    for (p, r, expected) in cases {
        let got = percent(f1_score(p, r));
        assert!(
            (got - expected).abs() <= 1,
            "P={p} R={r}: got {got}, expected {expected}±1"
        );
    }
    println!("PASS: C3 per-class F1 reconstructed within ±1 integer percent");
}

#[test]
fn c04_end_to_end_learns_synthetic_relations() {
    let start = Instant::now();
    let relation_names = ["uses", "mitigates", "indicates", "hasVulnerability"];

    // Four relations, each with its own disjoint subject/object token
    // families, so the embedding space is separable by construction.
    let mut sentences = Vec::new();
    for (r, _) in relation_names.iter().enumerate() {
        for i in 0..10 {
            for j in 0..10 {
                for _ in 0..3 {
                    sentences.push(format!("s{r}x{i} v{r} o{r}x{j}."));
                }
            }
        }
    }
    let doc = Document::new("synthetic", DocumentSource::PlainText, sentences.join(" "));

    let emb_cfg = SgnsConfig {
        dim: 16,
        context_window: 2,
        min_count: 1,
        epochs: 20,
        seed: 11,
        ..SgnsConfig::default()
    };
    let (table, _) = train_embeddings(&[doc], &emb_cfg).unwrap();

    let lbls = labels(&relation_names);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let examples: Vec<LabeledExample> = (0..2000)
        .map(|k| {
            let r = k % 4;
            let i = rng.gen_range(0..10);
            let j = rng.gen_range(0..10);
            LabeledExample {
                subject_vector: table.vector(&format!("s{r}x{i}")).to_vec(),
                object_vector: table.vector(&format!("o{r}x{j}")).to_vec(),
                label: lbls[r].clone(),
            }
        })
        .collect();
    assert!(examples.len() >= 2000);

    let split = stratified_split(&examples, 0.8, 17).unwrap();
    let mut model =
        RelationModel::init_with_dims(&lbls, &[32, 200, 100, 50, 4], 17).unwrap();
    let cfg = TrainConfig {
        batch_size: 100,
        epochs: 50,
        seed: 17,
        ..TrainConfig::default()
    };
    model.train(&split.train, &cfg).unwrap();

    let predictions: Vec<(RelationType, Option<RelationType>)> = split
        .test
        .iter()
        .map(|ex| {
            let probs = model.forward(&ex.subject_vector, &ex.object_vector).unwrap();
            let best = probs
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap()
                .0;
            (ex.label.clone(), Some(model.labels()[best].clone()))
        })
        .collect();
    let report = evaluate(&lbls, &predictions).unwrap();
    assert!(
        report.accuracy >= 0.90,
        "held-out accuracy {:.3} below 0.90",
        report.accuracy
    );
    assert!(start.elapsed() < Duration::from_secs(120), "took {:?}", start.elapsed());
    println!(
        "PASS: C4 end-to-end synthetic accuracy {:.3} >= 0.90 in {:?}",
        report.accuracy,
        start.elapsed()
    );
}

// --- C5: candidate pairing vs an independent brute force -------------------

fn brute_gap(doc: &Document, a: &EntityMention, b: &EntityMention) -> usize {
    let (lo, hi) = if a.first_token < b.first_token {
        (a.last_token, b.first_token)
    } else {
        (b.last_token, a.first_token)
    };
    (0..doc.tokens.len())
        .filter(|&idx| idx > lo && idx < hi && doc.tokens[idx].is_word())
        .count()
}

#[test]
fn c05_pair_filters_match_brute_force_and_window_boundary() {
    let schema = SchemaMatrix::default_matrix();
    let classes: Vec<EntityClass> = schema.classes().iter().cloned().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(31337);

    for case in 0..500 {
        let len = rng.gen_range(1..=200);
        let words: Vec<String> = (0..len)
            .map(|i| if rng.gen_bool(0.15) { ";".into() } else { format!("w{i}") })
            .collect();
        let doc = Document::new("d", DocumentSource::PlainText, words.join(" "));

        let mut mentions = Vec::new();
        let mut next = 0usize;
        while mentions.len() < 20 && next < doc.tokens.len() {
            if rng.gen_bool(0.25) {
                mentions.push(EntityMention {
                    doc_id: "d".into(),
                    first_token: next,
                    last_token: next,
                    surface: doc.tokens[next].surface.clone(),
                    entity_class: classes[rng.gen_range(0..classes.len())].clone(),
                });
            }
            next += 1;
        }
        let window = rng.gen_range(0..=40);

        let mut expected = Vec::new();
        for (i, subj) in mentions.iter().enumerate() {
            for (j, obj) in mentions.iter().enumerate() {
                if i != j
                    && brute_gap(&doc, subj, obj) <= window
                    && !schema
                        .candidate_relations(&subj.entity_class, &obj.entity_class)
                        .unwrap()
                        .is_empty()
                {
                    expected.push((subj.first_token, obj.first_token));
                }
            }
        }
        expected.sort();

        let (pairs, report) = generate_pairs(&doc, &mentions, &schema, window).unwrap();
        let got: Vec<(usize, usize)> =
            pairs.iter().map(|p| (p.subject.first_token, p.object.first_token)).collect();
        assert_eq!(got, expected, "case {case} window {window}");
        assert_eq!(report.kept, expected.len());
        assert_eq!(
            report.kept + report.window_dropped + report.schema_dropped,
            report.generated
        );
    }

    // Inclusive boundary: a gap of exactly 35 word tokens survives, 36 does not.
    let text = (0..80).map(|i| format!("w{i}")).collect::<Vec<_>>().join(" ");
    let doc = Document::new("d", DocumentSource::PlainText, text);
    let mention = |at: usize, class: &str| EntityMention {
        doc_id: "d".into(),
        first_token: at,
        last_token: at,
        surface: format!("w{at}"),
        entity_class: EntityClass::new(class),
    };
    let (pairs, _) =
        generate_pairs(&doc, &[mention(0, "malware"), mention(36, "tool")], &schema, 35).unwrap();
    assert_eq!(pairs.len(), 2);
    let (pairs, _) =
        generate_pairs(&doc, &[mention(0, "malware"), mention(37, "tool")], &schema, 35).unwrap();
    assert!(pairs.is_empty());
    println!("PASS: C5 pairing matches brute force on 500 cases; 35/36 boundary holds");
}

// --- C6: query evaluation vs an exhaustive assignment search ---------------

fn brute_force_query(graph: &Graph, query: &Query) -> BTreeSet<Vec<(String, String)>> {
    let triples = graph.triples();
    let mut domain: Vec<String> = graph.entities().map(|(l, _)| l.clone()).collect();
    domain.extend(graph.schema().classes().iter().map(|c| c.name().to_string()));
    domain.sort();
    domain.dedup();

    let mut vars = BTreeSet::new();
    for p in &query.patterns {
        for t in [&p.subject, &p.predicate, &p.object] {
            if let Term::Var(v) = t {
                vars.insert(v.clone());
            }
        }
    }
    let vars: Vec<String> = vars.into_iter().collect();
    let mut results = BTreeSet::new();
    if domain.is_empty() {
        return results;
    }

    let satisfied = |assignment: &BTreeMap<String, String>| {
        query.patterns.iter().all(|p| {
            let resolve = |t: &Term| match t {
                Term::Var(v) => assignment[v].clone(),
                Term::Constant(c) => c.clone(),
            };
            let s = resolve(&p.subject);
            let o = resolve(&p.object);
            match &p.predicate {
                Term::Constant(c) if c.eq_ignore_ascii_case("type") => graph
                    .entity_class(&s)
                    .is_some_and(|cl| cl.name().eq_ignore_ascii_case(&o)),
                Term::Constant(rel) => triples.iter().any(|t| {
                    t.subject == s && t.relation.name().eq_ignore_ascii_case(rel) && t.object == o
                }),
                Term::Var(_) => unreachable!(),
            }
        })
    };

    let mut indices = vec![0usize; vars.len()];
    loop {
        let assignment: BTreeMap<String, String> = vars
            .iter()
            .zip(&indices)
            .map(|(v, &i)| (v.clone(), domain[i].clone()))
            .collect();
        if satisfied(&assignment) {
            results.insert(
                query
                    .select_vars
                    .iter()
                    .map(|v| (v.clone(), assignment[v].clone()))
                    .collect(),
            );
        }
        let mut k = 0;
        loop {
            if k == indices.len() {
                return results;
            }
            indices[k] += 1;
            if indices[k] < domain.len() {
                break;
            }
            indices[k] = 0;
            k += 1;
        }
    }
}

#[test]
fn c06_query_matches_brute_force_and_flagship_lookup() {
    let schema = SchemaMatrix::default_matrix();
    let relations: Vec<RelationType> = schema.relations().iter().cloned().collect();
    let classes: Vec<EntityClass> = schema.classes().iter().cloned().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(4242);

    let mut cases = 0;
    while cases < 500 {
        let entity_count = rng.gen_range(2..=10);
        let entities: Vec<(String, EntityClass)> = (0..entity_count)
            .map(|i| (format!("e{i}"), classes[rng.gen_range(0..classes.len())].clone()))
            .collect();
        let mut graph = Graph::new(schema.clone());
        let triples: Vec<Triple> = (0..rng.gen_range(0..=50))
            .map(|_| {
                let (s, sc) = &entities[rng.gen_range(0..entities.len())];
                let (o, oc) = &entities[rng.gen_range(0..entities.len())];
                let r = &relations[rng.gen_range(0..relations.len())];
                Triple::new(s.clone(), sc.clone(), r.clone(), o.clone(), oc.clone())
            })
            .collect();
        graph.assert_triples(&triples, true);

        let entity_labels: Vec<String> = graph.entities().map(|(l, _)| l.clone()).collect();
        let vars = ["a", "b", "c"];
        let mut used = BTreeSet::new();
        let mut patterns = Vec::new();
        for _ in 0..rng.gen_range(1..=3) {
            let term = |rng: &mut ChaCha8Rng, pool: &[String], used: &mut BTreeSet<String>| {
                if pool.is_empty() || rng.gen_bool(0.6) {
                    let v = vars[rng.gen_range(0..vars.len())].to_string();
                    used.insert(v.clone());
                    Term::Var(v)
                } else {
                    Term::Constant(pool[rng.gen_range(0..pool.len())].clone())
                }
            };
            if rng.gen_bool(0.4) {
                let class_names: Vec<String> =
                    classes.iter().map(|c| c.name().to_string()).collect();
                patterns.push(Pattern {
                    subject: term(&mut rng, &entity_labels, &mut used),
                    predicate: Term::Constant("type".into()),
                    object: term(&mut rng, &class_names, &mut used),
                });
            } else {
                let rel = relations[rng.gen_range(0..relations.len())].name().to_string();
                patterns.push(Pattern {
                    subject: term(&mut rng, &entity_labels, &mut used),
                    predicate: Term::Constant(rel),
                    object: term(&mut rng, &entity_labels, &mut used),
                });
            }
        }
        if used.is_empty() {
            continue;
        }
        cases += 1;
        let query = Query {
            select_vars: used.into_iter().collect(),
            patterns,
        };

        let got: BTreeSet<Vec<(String, String)>> = evaluate_query(&graph, &query)
            .unwrap()
            .into_iter()
            .map(|b| b.into_iter().collect())
            .collect();
        assert_eq!(got, brute_force_query(&graph, &query), "case {cases}: {query}");
    }

    // The flagship lookup: which software has a known vulnerability?
    let mut graph = Graph::new(schema.clone());
    graph.assert_triples(
        &[
            Triple::new(
                "Adobe Flash Player",
                "software",
                "hasVulnerability",
                "cve-2016-4117",
                "vulnerability",
            ),
            Triple::new("xrat", "malware", "uses", "java", "tool"),
            Triple::new("dark caracal", "campaign", "uses", "pallas", "malware"),
        ],
        false,
    );
    let q = parse_query(
        "SELECT ?x WHERE { ?x :type :SOFTWARE. ?y :type :VULNERABILITY. ?x :hasVulnerability ?y. }",
    )
    .unwrap();
    let results = evaluate_query(&graph, &q).unwrap();
    assert_eq!(results.len(), 1);
    assert_eq!(results[0]["x"], "adobe flash player");
    println!("PASS: C6 query evaluation matches brute force; flagship lookup returns adobe flash player");
}

#[test]
fn c07_embeddings_separate_cooccurrence_clusters() {
    let start = Instant::now();
    let clusters = [["aa", "bb", "cc"], ["xx", "yy", "zz"]];
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut docs = Vec::new();
    for (ci, words) in clusters.iter().enumerate() {
        for s in 0..1000 {
            let text: Vec<&str> =
                (0..5).map(|_| words[rng.gen_range(0..words.len())]).collect();
            docs.push(Document::new(
                format!("c{ci}s{s}"),
                DocumentSource::PlainText,
                text.join(" "),
            ));
        }
    }
    let cfg = SgnsConfig {
        dim: 25,
        epochs: 6,
        min_count: 1,
        seed: 7,
        ..SgnsConfig::default()
    };
    let (table, losses) = train_embeddings(&docs, &cfg).unwrap();

    for w in losses[..5].windows(2) {
        assert!(w[1] <= w[0] + 1e-9, "loss increased in the first 5 epochs: {losses:?}");
    }

    let group_a = ["aa", "bb", "cc"];
    let group_b = ["xx", "yy", "zz"];
    let mut intra = Vec::new();
    let mut inter = Vec::new();
    for g in [&group_a, &group_b] {
        for i in 0..3 {
            for j in (i + 1)..3 {
                intra.push(cosine(table.vector(g[i]), table.vector(g[j])));
            }
        }
    }
    for a in group_a {
        for b in group_b {
            inter.push(cosine(table.vector(a), table.vector(b)));
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let margin = mean(&intra) - mean(&inter);
    assert!(margin >= 0.2, "cluster margin {margin:.3} below 0.2");
    assert!(start.elapsed() < Duration::from_secs(30), "took {:?}", start.elapsed());
    println!("PASS: C7 embedding cluster margin {margin:.3} >= 0.2 with non-increasing loss");
}

// --- C8: the CLI is bit-for-bit reproducible --------------------------------

fn sha256_file(path: &Path) -> String {
    let bytes = std::fs::read(path).unwrap();
    format!("{:x}", Sha256::digest(&bytes))
}

fn run_cli(args: &[&str]) {
    let status = Command::new(env!("CARGO_BIN_EXE_relext"))
        .args(args)
        .status()
        .unwrap();
    assert!(status.success(), "relext {args:?} failed");
}

#[test]
fn c08_cli_runs_are_bit_for_bit_reproducible() {
    let demo = demo_dir();
    let corpus = demo.join("corpus");
    let gazetteer = demo.join("gazetteer.tsv");
    let srt = demo.join("training.tsv");
    let tmp = tempfile::tempdir().unwrap();

    let mut hashes: Vec<(String, String, String)> = Vec::new();
    for run in ["one", "two"] {
        let emb = tmp.path().join(format!("emb-{run}.txt"));
        let model = tmp.path().join(format!("model-{run}.json"));
        let graph = tmp.path().join(format!("graph-{run}.json"));
        run_cli(&[
            "train-embeddings",
            "--corpus-dir", corpus.to_str().unwrap(),
            "--output", emb.to_str().unwrap(),
            "--dim", "16", "--min-count", "1", "--epochs", "3", "--seed", "5",
        ]);
        run_cli(&[
            "train-classifier",
            "--srt", srt.to_str().unwrap(),
            "--embeddings", emb.to_str().unwrap(),
            "--output", model.to_str().unwrap(),
            "--batch-size", "8", "--epochs", "10", "--seed", "5",
        ]);
        run_cli(&[
            "extract",
            "--corpus-dir", corpus.to_str().unwrap(),
            "--gazetteer", gazetteer.to_str().unwrap(),
            "--embeddings", emb.to_str().unwrap(),
            "--model", model.to_str().unwrap(),
            "--graph", graph.to_str().unwrap(),
            "--threshold", "0.3",
        ]);
        hashes.push((sha256_file(&emb), sha256_file(&model), sha256_file(&graph)));
    }
    assert_eq!(hashes[0], hashes[1], "repeated runs diverged");
    println!("PASS: C8 repeated CLI runs produce identical embeddings, model, and graph");
}

// --- C9 and C10 use a small shared fixture ---------------------------------

fn demo_fixture() -> (Vec<Document>, Vec<EntityMention>, SchemaMatrix, EmbeddingTable) {
    let schema = SchemaMatrix::default_matrix();
    let demo = demo_dir();
    let mut docs = Vec::new();
    for name in ["advisory-java.txt", "report-flash.txt", "report-xrat.txt"] {
        docs.push(
            relext::corpus::ingest_text(&demo.join("corpus").join(name), name).unwrap(),
        );
    }
    let gazetteer = Gazetteer::load(&demo.join("gazetteer.tsv"), &schema).unwrap().gazetteer;
    let mentions: Vec<EntityMention> = docs.iter().flat_map(|d| gazetteer.annotate(d)).collect();
    let cfg = SgnsConfig {
        dim: 12,
        min_count: 1,
        epochs: 2,
        seed: 9,
        ..SgnsConfig::default()
    };
    let (table, _) = train_embeddings(&docs, &cfg).unwrap();
    (docs, mentions, schema, table)
}

#[test]
fn c09_predictions_never_exceed_kept_pairs() {
    let (docs, mentions, schema, table) = demo_fixture();
    let lbls: Vec<RelationType> = schema.relations().iter().cloned().collect();
    let model = RelationModel::init_with_dims(&lbls, &[24, 10, 8, 6, lbls.len()], 3).unwrap();

    for threshold in [0.0, 0.2, 0.5, 0.9] {
        for mask in [false, true] {
            let mut graph = Graph::new(schema.clone());
            let cfg = ExtractConfig {
                window: 35,
                confidence_threshold: threshold,
                schema_mask: mask,
            };
            let summary =
                run_extract(&docs, &mentions, &schema, &table, &model, &mut graph, &cfg).unwrap();
            assert!(
                summary.relations_predicted <= summary.pairs_kept,
                "threshold {threshold} mask {mask}: {} predicted > {} kept",
                summary.relations_predicted,
                summary.pairs_kept
            );
            if threshold == 0.0 && !mask {
                assert_eq!(summary.relations_predicted, summary.pairs_kept);
            }
        }
    }
    println!("PASS: C9 predictions bounded by kept pairs; equality at zero threshold");
}

#[test]
fn c10_artifacts_round_trip_exactly() {
    let (_, _, schema, table) = demo_fixture();
    let tmp = tempfile::tempdir().unwrap();

    // Embedding text file: every vector restores bit-for-bit.
    let emb_path = tmp.path().join("emb.txt");
    table.save(&emb_path).unwrap();
    let restored = EmbeddingTable::load(&emb_path).unwrap();
    assert_eq!(table.dim, restored.dim);
    for idx in 0..table.vocab().len() {
        let token = table.vocab().token(idx);
        assert_eq!(table.vector(token), restored.vector(token), "vector for {token}");
    }

    // Model checkpoint: weights and biases restore bit-for-bit.
    let lbls: Vec<RelationType> = schema.relations().iter().cloned().collect();
    let model = RelationModel::init_with_dims(&lbls, &[24, 10, 8, 6, lbls.len()], 3).unwrap();
    let model_path = tmp.path().join("model.json");
    model
        .save(&model_path, relext::classifier::CheckpointMetadata {
            seed: 3,
            epochs: 0,
            final_loss: None,
        })
        .unwrap();
    let (loaded, _) = RelationModel::load(&model_path).unwrap();
    assert_eq!(model.labels(), loaded.labels());
    for (a, b) in model.layers().iter().zip(loaded.layers()) {
        assert_eq!(a.weights, b.weights);
        assert_eq!(a.biases, b.biases);
    }

    // Graph: JSON and ntriples exports both restore the same triple set.
    let mut graph = Graph::new(schema.clone());
    graph.assert_triples(
        &[
            Triple::new(
                "adobe flash player", "software",
                "hasVulnerability",
                "cve-2016-4117", "vulnerability",
            )
            .with_provenance("report-flash", 0.91),
            Triple::new("xrat", "malware", "uses", "java", "tool"),
        ],
        false,
    );
    let json = graph.export_json();
    let from_json = Graph::import_json(&json, schema.clone()).unwrap();
    assert_eq!(from_json.export_json(), json);
    let from_nt = Graph::import_ntriples(&graph.export_ntriples(), schema).unwrap();
    assert_eq!(from_nt.export_ntriples(), graph.export_ntriples());
    let set = |g: &Graph| -> BTreeSet<(String, String, String)> {
        g.triples()
            .into_iter()
            .map(|t| (t.subject, t.relation.name().to_string(), t.object))
            .collect()
    };
    assert_eq!(set(&graph), set(&from_json));
    assert_eq!(set(&graph), set(&from_nt));
    println!("PASS: C10 embeddings, checkpoints, and graphs round-trip exactly");
}
