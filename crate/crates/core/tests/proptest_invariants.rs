use proptest::prelude::*;

use relext::ckg::{evaluate_query, parse_query, Graph, Triple};
use relext::classifier::RelationModel;
use relext::corpus::{corpus_stats, tokenize, Document, DocumentSource};
use relext::pairing::generate_pairs;
use relext::schema::{EntityClass, RelationType, SchemaMatrix};

proptest! {
    #[test]
    fn token_offsets_ordered_and_in_range(text in "\\PC{0,200}") {
        let tokens = tokenize(&text);
        let n = text.chars().count();
        let mut prev_end = 0usize;
        for t in &tokens {
            prop_assert!(t.start < t.end);
            prop_assert!(t.start >= prev_end);
            prop_assert!(t.end <= n);
            prev_end = t.end;
        }
    }

    #[test]
    fn token_surfaces_match_lowercased_spans(text in "\\PC{0,200}") {
        let chars: Vec<char> = text.chars().collect();
        for t in tokenize(&text) {
            let span: String = chars[t.start..t.end].iter().collect();
            prop_assert_eq!(&t.surface, &span.to_lowercase());
        }
    }

    #[test]
    fn tokenization_is_deterministic(text in "\\PC{0,200}") {
        prop_assert_eq!(tokenize(&text), tokenize(&text));
    }

    #[test]
    fn stats_permutation_invariant(texts in proptest::collection::vec("[a-z. ]{1,60}", 1..6)) {
        let docs: Vec<Document> = texts
            .iter()
            .enumerate()
            .map(|(i, t)| Document::new(format!("d{i}"), DocumentSource::PlainText, t.clone()))
            .collect();
        let mut reversed = docs.clone();
        reversed.reverse();
        prop_assert_eq!(corpus_stats(&docs).unwrap(), corpus_stats(&reversed).unwrap());
    }

    #[test]
    fn forward_is_a_distribution(
        subj in proptest::collection::vec(-5.0f64..5.0, 3),
        obj in proptest::collection::vec(-5.0f64..5.0, 3),
        seed in 0u64..1000,
    ) {
        let labels: Vec<RelationType> =
            (0..4).map(|i| RelationType::new(format!("r{i}"))).collect();
        let model = RelationModel::init_with_dims(&labels, &[6, 5, 4, 3, 4], seed).unwrap();
        let probs = model.forward(&subj, &obj).unwrap();
        let sum: f64 = probs.iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-9);
        prop_assert!(probs.iter().all(|p| *p > 0.0 && *p < 1.0));
    }

    #[test]
    fn window_widening_only_adds_pairs(
        positions in proptest::collection::btree_set(0usize..60, 2..8),
        w1 in 0usize..40,
        extra in 0usize..20,
    ) {
        let schema = SchemaMatrix::default_matrix();
        let classes = ["malware", "tool", "software", "campaign"];
        let text = (0..60).map(|i| format!("t{i}")).collect::<Vec<_>>().join(" ");
        let doc = Document::new("d", DocumentSource::PlainText, text);
        let mentions: Vec<_> = positions
            .iter()
            .enumerate()
            .map(|(i, &p)| relext::ner::EntityMention {
                doc_id: "d".into(),
                first_token: p,
                last_token: p,
                surface: format!("t{p}"),
                entity_class: EntityClass::new(classes[i % classes.len()]),
            })
            .collect();
        let (narrow, _) = generate_pairs(&doc, &mentions, &schema, w1).unwrap();
        let (wide, _) = generate_pairs(&doc, &mentions, &schema, w1 + extra).unwrap();
        for p in &narrow {
            prop_assert!(wide.contains(p));
        }
    }

    #[test]
    fn query_parse_print_round_trip(
        var_count in 1usize..3,
        use_type in proptest::bool::ANY,
    ) {
        let vars: Vec<String> = (0..var_count).map(|i| format!("v{i}")).collect();
        let mut q = String::from("SELECT");
        for v in &vars {
            q.push_str(&format!(" ?{v}"));
        }
        q.push_str(" WHERE {");
        for v in &vars {
            if use_type {
                q.push_str(&format!(" ?{v} :type :software."));
            } else {
                q.push_str(&format!(" ?{v} :uses :java."));
            }
        }
        q.push_str(" }");
        let parsed = parse_query(&q).unwrap();
        prop_assert_eq!(parse_query(&parsed.to_string()).unwrap(), parsed);
    }

    #[test]
    fn query_results_satisfy_every_pattern(seed in 0u64..200) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let schema = SchemaMatrix::default_matrix();
        let mut graph = Graph::new(schema.clone());
        let relations: Vec<_> = schema.relations().iter().cloned().collect();
        for _ in 0..rng.gen_range(1..20) {
            let s = format!("e{}", rng.gen_range(0..6));
            let o = format!("e{}", rng.gen_range(0..6));
            let r = relations[rng.gen_range(0..relations.len())].clone();
            let _ = graph.assert_triples(
                &[Triple::new(s, "software", r, o, "software")],
                true,
            );
        }
        let q = parse_query("SELECT ?x ?y WHERE { ?x :uses ?y. ?x :type :software. }").unwrap();
        for b in evaluate_query(&graph, &q).unwrap() {
            prop_assert!(graph.contains(&b["x"], &RelationType::new("uses"), &b["y"]));
            prop_assert_eq!(
                graph.entity_class(&b["x"]),
                Some(&EntityClass::new("software"))
            );
        }
    }
}
