use std::path::{Path, PathBuf};

use triplescore::dataset::load_dataset;
use triplescore::pipeline::{self, parse_key_values, PipelineConfig, Resources};
use triplescore::{FeatureVector, Predicate, SuperClassifier, WsdmTriple};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn config() -> PipelineConfig {
    let text = std::fs::read_to_string(fixtures().join("pipeline.conf")).unwrap();
    let mut cfg = PipelineConfig::default();
    for (_, k, v) in parse_key_values(&text, "pipeline.conf").unwrap() {
        cfg.set(&k, &v, &fixtures()).unwrap();
    }
    cfg
}

fn labeled() -> Vec<triplescore::LabeledTriple> {
    let mut rows = load_dataset(&fixtures().join("nationality.train.tsv"), Predicate::Nationality, true).unwrap();
    rows.extend(load_dataset(&fixtures().join("profession.train.tsv"), Predicate::Profession, true).unwrap());
    rows
}

#[test]
fn fixture_dataset_contains_the_loewe_rows() {
    let rows = labeled();
    assert_eq!(rows.len(), 24);
    let loewe: Vec<(&str, u8)> = rows
        .iter()
        .filter(|r| r.triple.subject == "Frederick Loewe" && r.triple.predicate == Predicate::Nationality)
        .map(|r| (r.triple.object.as_str(), r.score.unwrap()))
        .collect();
    assert_eq!(
        loewe,
        vec![("United States of America", 7), ("Austria", 5), ("Germany", 3)]
    );
}

#[test]
fn trained_model_round_trips() {
    let cfg = config();
    let res = Resources::load(&cfg).unwrap();
    let outcome = pipeline::train(&res, &labeled(), &cfg.cv).unwrap();
    let text = outcome.model.to_text();
    assert_eq!(text.lines().count(), 9);
    assert_eq!(SuperClassifier::from_text(&text, "model").unwrap(), outcome.model);
    assert_eq!(outcome.model.seed, 2017);
    assert_eq!(outcome.features.len(), 24);
}

#[test]
fn scoring_keeps_rows_and_order() {
    let cfg = config();
    let res = Resources::load(&cfg).unwrap();
    let triples: Vec<WsdmTriple> = load_dataset(&fixtures().join("profession.test.tsv"), Predicate::Profession, false)
        .unwrap()
        .into_iter()
        .map(|r| r.triple)
        .collect();
    let scored = pipeline::score_triples(&res, &SuperClassifier::published(), &triples, false);
    assert_eq!(scored.len(), triples.len());
    for (s, t) in scored.iter().zip(&triples) {
        assert_eq!(&s.triple, t);
        assert!(s.score == 2 || s.score == 5);
        assert!(s.feature_trace.is_none());
    }
}

#[test]
fn published_model_example_chain() {
    let model = SuperClassifier::published();
    let f = FeatureVector::new([5.0, 0.0, 0.0, 7.0, 0.0]).unwrap();
    assert!((model.lr_score(&f) - 4.7387).abs() < 1e-9);
    assert_eq!(model.predict(&f), 5);
}

#[test]
fn profession_triples_have_no_demonym_scores() {
    let res = Resources::load(&config()).unwrap();
    let t = WsdmTriple::new("Albert Einstein", Predicate::Profession, "Physicist").unwrap();
    let f = pipeline::extract_features(&t, &res);
    assert_eq!(f.0[2], 0.0);
    assert_eq!(f.0[4], 0.0);
    assert_eq!(f.0[0], 5.0);
    assert_eq!(f.0[1], 7.0);
}
