//! Random-instance equivalence between `generate_pairs` and an independent
//! brute-force enumeration that applies the window and schema filters
//! separately.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use relext::corpus::{Document, DocumentSource};
use relext::ner::EntityMention;
use relext::pairing::generate_pairs;
use relext::schema::{EntityClass, SchemaMatrix};

fn random_document(rng: &mut ChaCha8Rng, id: &str) -> Document {
    let len = rng.gen_range(1..=200);
    let mut words = Vec::with_capacity(len);
    for i in 0..len {
        if rng.gen_bool(0.15) {
            words.push(",".to_string());
        } else {
            words.push(format!("w{i}"));
        }
    }
    Document::new(id, DocumentSource::PlainText, words.join(" "))
}

fn random_mentions(
    rng: &mut ChaCha8Rng,
    doc: &Document,
    classes: &[EntityClass],
) -> Vec<EntityMention> {
    let mut mentions = Vec::new();
    let mut next = 0usize;
    while mentions.len() < 20 && next < doc.tokens.len() {
        if rng.gen_bool(0.25) {
            let span = rng.gen_range(1..=2.min(doc.tokens.len() - next));
            let last = next + span - 1;
            mentions.push(EntityMention {
                doc_id: doc.id.clone(),
                first_token: next,
                last_token: last,
                surface: doc.tokens[next..=last]
                    .iter()
                    .map(|t| t.surface.clone())
                    .collect::<Vec<_>>()
                    .join(" "),
                entity_class: classes[rng.gen_range(0..classes.len())].clone(),
            });
            next = last + 1;
        } else {
            next += 1;
        }
    }
    mentions
}

// Independent gap computation: walk every token index between the spans.
fn brute_gap(doc: &Document, a: &EntityMention, b: &EntityMention) -> usize {
    let (lo, hi) = if a.first_token < b.first_token {
        (a.last_token, b.first_token)
    } else {
        (b.last_token, a.first_token)
    };
    let mut count = 0;
    for idx in 0..doc.tokens.len() {
        if idx > lo && idx < hi && doc.tokens[idx].is_word() {
            count += 1;
        }
    }
    count
}

fn brute_force(
    doc: &Document,
    mentions: &[EntityMention],
    schema: &SchemaMatrix,
    window: usize,
) -> Vec<(usize, usize)> {
    let mut kept = Vec::new();
    for (i, subj) in mentions.iter().enumerate() {
        for (j, obj) in mentions.iter().enumerate() {
            if i == j {
                continue;
            }
            if brute_gap(doc, subj, obj) > window {
                continue;
            }
            let candidates = schema
                .candidate_relations(&subj.entity_class, &obj.entity_class)
                .unwrap();
            if candidates.is_empty() {
                continue;
            }
            kept.push((subj.first_token, obj.first_token));
        }
    }
    kept.sort();
    kept
}

#[test]
fn matches_brute_force_on_500_random_documents() {
    let schema = SchemaMatrix::default_matrix();
    let classes: Vec<EntityClass> = schema.classes().iter().cloned().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);

    for case in 0..500 {
        let doc = random_document(&mut rng, &format!("doc{case}"));
        let mentions = random_mentions(&mut rng, &doc, &classes);
        let window = rng.gen_range(0..=40);

        let (pairs, report) = generate_pairs(&doc, &mentions, &schema, window).unwrap();
        let got: Vec<(usize, usize)> = pairs
            .iter()
            .map(|p| (p.subject.first_token, p.object.first_token))
            .collect();
        let expected = brute_force(&doc, &mentions, &schema, window);
        assert_eq!(got, expected, "case {case} window {window}");
        assert_eq!(report.kept, expected.len(), "case {case}");
    }
}

#[test]
fn boundary_gap_35_kept_36_dropped() {
    let schema = SchemaMatrix::default_matrix();
    let text = (0..80).map(|i| format!("w{i}")).collect::<Vec<_>>().join(" ");
    let doc = Document::new("d", DocumentSource::PlainText, text);
    let mention = |at: usize, class: &str| EntityMention {
        doc_id: "d".into(),
        first_token: at,
        last_token: at,
        surface: format!("w{at}"),
        entity_class: EntityClass::new(class),
    };

    let kept = vec![mention(0, "malware"), mention(36, "tool")];
    let (pairs, _) = generate_pairs(&doc, &kept, &schema, 35).unwrap();
    assert_eq!(pairs.len(), 2);
    assert!(pairs.iter().all(|p| p.gap == 35));

    let dropped = vec![mention(0, "malware"), mention(37, "tool")];
    let (pairs, report) = generate_pairs(&doc, &dropped, &schema, 35).unwrap();
    assert!(pairs.is_empty());
    assert_eq!(report.window_dropped, 2);
}
