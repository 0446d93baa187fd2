//! End-to-end orchestration: configuration, resource loading, feature
//! extraction, training, scoring and evaluation.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use crate::cv::{self, CvOptions, CvReport};
use crate::dataset::{LabeledTriple, Predicate, WsdmTriple};
use crate::error::{Error, Result};
use crate::graph_cross::{graph_cross_scores, ConceptGraph, DemonymMap, GraphCrossConfig, WeightMode};
use crate::kg::{self, build_index, GraphIndex};
use crate::metrics::{self, EvalReport, TauSummary};
use crate::skipgram::{self, CandidateSet, VectorStore, ABSTAIN_SCORE};
use crate::stacker::{fit_ridge, FeatureVector, SuperClassifier};
use crate::starpath::{self, PathWeight, PredicateMapping, SwmConfig, TokenDistance, DBPEDIA_RESOURCE};
use crate::tsv;

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub kg: Option<PathBuf>,
    pub concepts: Option<PathBuf>,
    pub concept_weights: WeightMode,
    pub demonyms: Option<PathBuf>,
    pub vectors: Option<PathBuf>,
    pub candidates: Option<PathBuf>,
    /// Predicate mapping; built-in defaults when absent.
    pub mapping: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub entity_prefix: String,
    pub swm: SwmConfig,
    pub graph_cross: GraphCrossConfig,
    pub cv: CvOptions,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            kg: None,
            concepts: None,
            concept_weights: WeightMode::RawCounts,
            demonyms: None,
            vectors: None,
            candidates: None,
            mapping: None,
            model: None,
            entity_prefix: DBPEDIA_RESOURCE.to_string(),
            swm: SwmConfig::default(),
            graph_cross: GraphCrossConfig::default(),
            cv: CvOptions::default(),
        }
    }
}

/// `key = value` lines; blank lines and `#` comments ignored.
pub fn parse_key_values(text: &str, context: &str) -> Result<Vec<(usize, String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(context, i + 1, "expected `key = value`"))?;
        out.push((i + 1, k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

impl PipelineConfig {
    /// Sets one option. Relative paths are resolved against `base`.
    pub fn set(&mut self, key: &str, value: &str, base: &Path) -> Result<()> {
        let path = || Some(base.join(value));
        let num = |what: &str| -> Result<f64> {
            value
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Config(format!("{what}: expected a number, got {value:?}")))
        };
        match key {
            "kg" => self.kg = path(),
            "concepts" => self.concepts = path(),
            "demonyms" => self.demonyms = path(),
            "vectors" => self.vectors = path(),
            "candidates" => self.candidates = path(),
            "mapping" => self.mapping = path(),
            "model" => self.model = path(),
            "concept_weights" => {
                self.concept_weights = match value {
                    "raw" | "counts" => WeightMode::RawCounts,
                    "normalized" => WeightMode::Normalized,
                    _ => {
                        return Err(Error::Config(format!(
                            "concept_weights: expected raw or normalized, got {value:?}"
                        )))
                    }
                }
            }
            "entity_prefix" => self.entity_prefix = value.to_string(),
            "theta" => self.swm.theta = num(key)?,
            "token_distance" => {
                self.swm.token_distance = match value {
                    "levenshtein" => TokenDistance::NormalizedLevenshtein,
                    "exact" => TokenDistance::Exact,
                    _ => {
                        return Err(Error::Config(format!(
                            "token_distance: expected levenshtein or exact, got {value:?}"
                        )))
                    }
                }
            }
            "path_weight" => {
                self.swm.path_weight = match value {
                    "inverse_length" => PathWeight::InverseLength,
                    "token_share" => PathWeight::TokenShare,
                    _ => {
                        return Err(Error::Config(format!(
                            "path_weight: expected inverse_length or token_share, got {value:?}"
                        )))
                    }
                }
            }
            "a" => self.graph_cross.a = num(key)?,
            "seed" => {
                self.cv.seed = value
                    .parse()
                    .map_err(|_| Error::Config(format!("seed: expected an unsigned integer, got {value:?}")))?
            }
            "folds" => {
                self.cv.k = value
                    .parse()
                    .map_err(|_| Error::Config(format!("folds: expected an integer, got {value:?}")))?
            }
            "ridge" => self.cv.ridge = num(key)?,
            other => return Err(Error::Config(format!("unknown option {other:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.swm.validate()?;
        self.graph_cross.validate()?;
        if self.cv.k < 2 {
            return Err(Error::Config(format!("folds must be >= 2, got {}", self.cv.k)));
        }
        if self.cv.ridge < 0.0 {
            return Err(Error::Config("ridge must be >= 0".into()));
        }
        Ok(())
    }

    fn require<'a>(&self, value: &'a Option<PathBuf>, key: &str) -> Result<&'a Path> {
        let path = value
            .as_deref()
            .ok_or_else(|| Error::Config(format!("missing required option {key}")))?;
        if !path.is_file() {
            return Err(Error::io(
                path,
                io::Error::new(io::ErrorKind::NotFound, "file not found"),
            ));
        }
        Ok(path)
    }
}

/// Everything the three evidence modules need, loaded once and shared
/// read-only.
#[derive(Debug, Clone)]
pub struct Resources {
    pub kg: GraphIndex,
    pub mapping: PredicateMapping,
    pub concepts: ConceptGraph,
    pub demonyms: DemonymMap,
    pub vectors: VectorStore,
    pub candidates: BTreeMap<Predicate, CandidateSet>,
    pub entity_prefix: String,
    pub swm: SwmConfig,
    pub graph_cross: GraphCrossConfig,
}

impl Resources {
    pub fn load(cfg: &PipelineConfig) -> Result<Self> {
        cfg.validate()?;
        let kg_path = cfg.require(&cfg.kg, "kg")?;
        let concepts = cfg.require(&cfg.concepts, "concepts")?;
        let demonyms = cfg.require(&cfg.demonyms, "demonyms")?;
        let vectors = cfg.require(&cfg.vectors, "vectors")?;
        let candidates = cfg.require(&cfg.candidates, "candidates")?;
        let mapping = match &cfg.mapping {
            Some(_) => PredicateMapping::load(cfg.require(&cfg.mapping, "mapping")?)?,
            None => PredicateMapping::default(),
        };
        let graph = build_index(kg::load_ntriples(kg_path)?).entail_closure();
        log::info!("knowledge graph: {} triples after closure", graph.len());
        Ok(Resources {
            kg: graph,
            mapping,
            concepts: ConceptGraph::load(concepts, cfg.concept_weights)?,
            demonyms: DemonymMap::load(demonyms)?,
            vectors: VectorStore::load(vectors)?,
            candidates: skipgram::load_candidates(candidates)?,
            entity_prefix: cfg.entity_prefix.clone(),
            swm: cfg.swm,
            graph_cross: cfg.graph_cross,
        })
    }
}

/// The five module scores of one triple.
pub fn extract_features(triple: &WsdmTriple, res: &Resources) -> FeatureVector {
    let s1 = match starpath::locate_entity(&res.entity_prefix, &triple.subject) {
        Ok(iri) => starpath::score1(&res.kg, &iri, triple.predicate, &triple.object, &res.mapping, &res.swm),
        Err(_) => starpath::EvidenceScore::None,
    };
    let (s2, s3) = graph_cross_scores(&res.concepts, &res.demonyms, &res.graph_cross, triple);
    let (s4, s5) = match res.candidates.get(&triple.predicate) {
        Some(cands) => (
            skipgram::score4(&res.vectors, &triple.subject, cands, &triple.object),
            skipgram::score5(
                &res.vectors,
                &triple.subject,
                triple.predicate,
                &triple.object,
                &res.demonyms,
                cands,
            ),
        ),
        None => (
            ABSTAIN_SCORE,
            match triple.predicate {
                Predicate::Nationality => ABSTAIN_SCORE,
                Predicate::Profession => 0.0,
            },
        ),
    };
    FeatureVector([f64::from(s1.value()), f64::from(s2), f64::from(s3), s4, s5])
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: SuperClassifier,
    pub cv: CvReport,
    pub features: Vec<FeatureVector>,
}

/// Extracts features for every labeled row (all predicates merged), cross
/// validates, then fits the final ridge model on all rows. The deployed
/// threshold is the one fitted on the pooled out-of-fold scores.
pub fn train(res: &Resources, rows: &[LabeledTriple], opts: &CvOptions) -> Result<TrainOutcome> {
    let mut features = Vec::with_capacity(rows.len());
    let mut truths = Vec::with_capacity(rows.len());
    let mut subjects = Vec::with_capacity(rows.len());
    for r in rows {
        let score = r.score.ok_or_else(|| {
            Error::InvalidInput(format!(
                "training row ({}, {}) has no score",
                r.triple.subject, r.triple.object
            ))
        })?;
        features.push(extract_features(&r.triple, res));
        truths.push(f64::from(score));
        subjects.push(format!("{}\u{0}{}", r.triple.predicate, r.triple.subject));
    }
    let x: Vec<_> = features.iter().map(|f| f.0).collect();
    let cv = cv::cross_validate(&x, &truths, &subjects, opts)?;
    let ridge = fit_ridge(&x, &truths, opts.ridge)?;
    Ok(TrainOutcome {
        model: SuperClassifier {
            ridge,
            threshold: cv.pooled_threshold,
            seed: opts.seed,
        },
        cv,
        features,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredTriple {
    pub triple: WsdmTriple,
    pub score: u8,
    pub feature_trace: Option<(FeatureVector, f64)>,
}

pub fn score_triples(
    res: &Resources,
    model: &SuperClassifier,
    triples: &[WsdmTriple],
    trace: bool,
) -> Vec<ScoredTriple> {
    triples
        .iter()
        .map(|t| {
            let f = extract_features(t, res);
            let lr = model.lr_score(&f);
            ScoredTriple {
                triple: t.clone(),
                score: crate::stacker::classify(lr, &model.threshold),
                feature_trace: trace.then_some((f, lr)),
            }
        })
        .collect()
}

/// `subject<TAB>object<TAB>score`, plus `s1..s5<TAB>lr_score` when traced.
pub fn write_scored(out: &mut impl Write, scored: &[ScoredTriple]) -> io::Result<()> {
    for s in scored {
        write!(out, "{}\t{}\t{}", s.triple.subject, s.triple.object, s.score)?;
        if let Some((f, lr)) = &s.feature_trace {
            for v in f.values() {
                write!(out, "\t{v:?}")?;
            }
            write!(out, "\t{lr:?}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// A `(subject, object, score)` row of a prediction or truth file. Extra
/// columns, such as trace output, are ignored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreRow {
    pub subject: String,
    pub object: String,
    pub score: u8,
}

pub fn parse_score_rows(text: &str, context: &str) -> Result<Vec<ScoreRow>> {
    tsv::records(text, false)
        .map(|(line, fields)| {
            if fields.len() < 3 {
                return Err(Error::parse(context, line, "expected subject<TAB>object<TAB>score"));
            }
            let score = crate::dataset::parse_score(fields[2]).map_err(|m| Error::parse(context, line, m))?;
            Ok(ScoreRow {
                subject: fields[0].trim().to_string(),
                object: fields[1].trim().to_string(),
                score,
            })
        })
        .collect()
}

pub fn load_score_rows(path: &Path) -> Result<Vec<ScoreRow>> {
    parse_score_rows(&tsv::read_to_string(path)?, &path.display().to_string())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalOutcome {
    pub accuracy2: f64,
    pub asd: f64,
    pub tau: Option<TauSummary>,
    pub groups_total: usize,
}

fn key_error(row: &ScoreRow, reason: &str) -> Error {
    Error::KeyMismatch {
        subject: row.subject.clone(),
        object: row.object.clone(),
        reason: reason.to_string(),
    }
}

/// Pairs predictions with truths on `(subject, object)` and computes the
/// challenge metrics, grouping by subject for Kendall tau.
pub fn evaluate(pred: &[ScoreRow], truth: &[ScoreRow]) -> Result<EvalOutcome> {
    let mut by_key: HashMap<(&str, &str), u8> = HashMap::new();
    for p in pred {
        if by_key.insert((&p.subject, &p.object), p.score).is_some() {
            return Err(key_error(p, "duplicate key in predictions"));
        }
    }
    let mut seen = HashSet::new();
    let mut pairs = Vec::with_capacity(truth.len());
    for t in truth {
        if !seen.insert((t.subject.as_str(), t.object.as_str())) {
            return Err(key_error(t, "duplicate key in truth file"));
        }
        let p = by_key
            .get(&(t.subject.as_str(), t.object.as_str()))
            .ok_or_else(|| key_error(t, "missing from predictions"))?;
        pairs.push((t.subject.as_str(), f64::from(*p), f64::from(t.score)));
    }
    if let Some(extra) = pred
        .iter()
        .find(|p| !seen.contains(&(p.subject.as_str(), p.object.as_str())))
    {
        return Err(key_error(extra, "not present in truth file"));
    }
    let subjects: Vec<&str> = pairs.iter().map(|p| p.0).collect();
    let p: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let t: Vec<f64> = pairs.iter().map(|p| p.2).collect();
    let groups = metrics::group_by_subject(&subjects, &p, &t);
    Ok(EvalOutcome {
        accuracy2: metrics::accuracy2(&p, &t)?,
        asd: metrics::asd(&p, &t)?,
        tau: metrics::kendall_tau_per_subject(groups.iter().map(|(a, b)| (a.as_slice(), b.as_slice()))).ok(),
        groups_total: groups.len(),
    })
}

pub fn format_eval(e: &EvalOutcome) -> String {
    let mut out = String::new();
    writeln!(out, "accuracy2 = {:.2}", e.accuracy2 * 100.0).unwrap();
    writeln!(out, "asd = {:.2}", e.asd).unwrap();
    match &e.tau {
        Some(t) => writeln!(
            out,
            "kendall_tau = {:.2} ({} subjects, {} skipped)",
            t.mean, t.groups_used, t.groups_skipped
        )
        .unwrap(),
        None => writeln!(
            out,
            "kendall_tau = undefined (all {} subject groups skipped)",
            e.groups_total
        )
        .unwrap(),
    }
    out
}

pub fn format_cv_report(report: &EvalReport, folds: usize, tau: f64) -> String {
    let mut out = String::new();
    writeln!(out, "folds = {folds}").unwrap();
    writeln!(out, "accuracy2 = {:.2}", report.accuracy2 * 100.0).unwrap();
    writeln!(out, "asd = {:.2}", report.asd).unwrap();
    match report.kendall_tau {
        Some(t) => writeln!(out, "kendall_tau = {t:.2}").unwrap(),
        None => writeln!(out, "kendall_tau = undefined").unwrap(),
    }
    if report.rho_defined {
        writeln!(out, "rho = {:.4}", report.rho).unwrap();
    } else {
        writeln!(out, "rho = 0.0000 (undefined: constant scores)").unwrap();
    }
    writeln!(out, "tau_threshold = {tau:?}").unwrap();
    out
}
