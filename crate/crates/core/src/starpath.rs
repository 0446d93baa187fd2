//! Graph evidence: token matching of a candidate value against the labelled
//! paths of a subject's SCC, reduced to a three-level evidence score.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path as FsPath;

use crate::dataset::Predicate;
use crate::error::{Error, Result};
use crate::kg::vocab::RDF_TYPE;
use crate::kg::{GraphIndex, Iri, Scc, Term};
use crate::tsv;

pub const DBPEDIA_RESOURCE: &str = "http://dbpedia.org/resource/";
const DBO: &str = "http://dbpedia.org/ontology/";
const DBP: &str = "http://dbpedia.org/property/";

/// A lowercased token without whitespace.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Token(String);

impl Token {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Lowercases and splits on anything that is not alphanumeric. Repeated
/// tokens are dropped; first-occurrence order is kept.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut seen = BTreeSet::new();
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|s| !s.is_empty())
        .map(str::to_lowercase)
        .filter(|s| seen.insert(s.clone()))
        .map(Token)
        .collect()
}

/// A keyword query; here, the label of the candidate object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NlQuery(String);

impl NlQuery {
    pub fn new(text: impl Into<String>) -> Result<Self> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(Error::InvalidInput("query must be non-empty".into()));
        }
        Ok(NlQuery(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn tokens(&self) -> Vec<Token> {
        tokenize(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenDistance {
    /// Levenshtein edits divided by the longer token's length (in chars).
    NormalizedLevenshtein,
    /// 0 for identical tokens, 1 otherwise.
    Exact,
}

impl TokenDistance {
    pub fn distance(self, a: &str, b: &str) -> f64 {
        match self {
            TokenDistance::NormalizedLevenshtein => {
                let longest = a.chars().count().max(b.chars().count());
                if longest == 0 {
                    0.0
                } else {
                    strsim::levenshtein(a, b) as f64 / longest as f64
                }
            }
            TokenDistance::Exact => {
                if a == b {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathWeight {
    /// `1 / |path|`; 1 for every single-edge path.
    InverseLength,
    /// `1 / |tokens of the path label|`, so a path scores the share of its
    /// label that matched.
    TokenShare,
}

impl PathWeight {
    fn weight(self, path: &Path) -> f64 {
        match self {
            PathWeight::InverseLength => 1.0 / path.edges.len() as f64,
            PathWeight::TokenShare => 1.0 / tokenize(&path.label).len().max(1) as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwmConfig {
    pub theta: f64,
    pub token_distance: TokenDistance,
    pub path_weight: PathWeight,
}

impl Default for SwmConfig {
    fn default() -> Self {
        SwmConfig {
            theta: 0.35,
            token_distance: TokenDistance::NormalizedLevenshtein,
            path_weight: PathWeight::InverseLength,
        }
    }
}

impl SwmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(Error::Config(format!("theta must be in [0, 1], got {}", self.theta)));
        }
        Ok(())
    }
}

/// A non-empty edge sequence rooted at the SCC subject, with its label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    pub edges: Vec<(Iri, Term)>,
    pub label: String,
}

impl Path {
    pub fn new(edges: Vec<(Iri, Term)>, scc: &Scc) -> Self {
        assert!(!edges.is_empty(), "a path has at least one edge");
        let label = edges
            .iter()
            .flat_map(|(p, o)| [term_label(&Term::Iri(p.clone()), scc), term_label(o, scc)])
            .collect::<Vec<_>>()
            .join(" ");
        Path { edges, label }
    }
}

fn term_label(term: &Term, scc: &Scc) -> String {
    match term {
        Term::Literal(lit) => lit.lexical.clone(),
        Term::Iri(iri) => {
            let labels = scc.labels_of(iri);
            if labels.is_empty() {
                iri.local_name().to_string()
            } else {
                labels.join(" ")
            }
        }
    }
}

/// The SCC's statements as single-edge paths.
pub fn paths(scc: &Scc) -> Vec<Path> {
    scc.statements()
        .iter()
        .map(|t| Path::new(vec![(t.predicate.clone(), t.object.clone())], scc))
        .collect()
}

/// Tokens of the path label lying within distance `theta` of some query token.
pub fn tp(path: &Path, q: &NlQuery, cfg: &SwmConfig) -> BTreeSet<Token> {
    let query = q.tokens();
    tokenize(&path.label)
        .into_iter()
        .filter(|t| {
            query
                .iter()
                .any(|qt| cfg.token_distance.distance(t.as_str(), qt.as_str()) < cfg.theta)
        })
        .collect()
}

struct Matched {
    path: Path,
    tokens: BTreeSet<Token>,
    score: f64,
}

fn match_all(scc: &Scc, q: &NlQuery, cfg: &SwmConfig) -> Vec<Matched> {
    paths(scc)
        .into_iter()
        .map(|path| {
            let tokens = tp(&path, q, cfg);
            let score = cfg.path_weight.weight(&path) * tokens.len() as f64;
            Matched { path, tokens, score }
        })
        .collect()
}

fn best_score(matched: &[Matched]) -> f64 {
    matched.iter().map(|m| m.score).fold(0.0, f64::max)
}

/// `tp(path)` if the path attains the maximal weighted match count over the
/// SCC, otherwise empty.
pub fn mtp(path: &Path, q: &NlQuery, scc: &Scc, cfg: &SwmConfig) -> BTreeSet<Token> {
    let best = best_score(&match_all(scc, q, cfg));
    let tokens = tp(path, q, cfg);
    let score = cfg.path_weight.weight(path) * tokens.len() as f64;
    if score >= best {
        tokens
    } else {
        BTreeSet::new()
    }
}

/// Sum of the weighted match counts of all maximal paths. Maximal paths with
/// the same number of matched tokens that share a matched token are counted
/// once, keeping the one with the smallest label.
pub fn scc_score(scc: &Scc, q: &NlQuery, cfg: &SwmConfig) -> f64 {
    let matched = match_all(scc, q, cfg);
    let best = best_score(&matched);
    let mut winners: Vec<&Matched> = matched
        .iter()
        .filter(|m| !m.tokens.is_empty() && m.score >= best)
        .collect();
    winners.sort_by(|a, b| a.path.label.cmp(&b.path.label));

    let mut kept: Vec<&Matched> = Vec::new();
    for m in winners {
        let duplicate = kept
            .iter()
            .any(|k| k.tokens.len() == m.tokens.len() && k.score == m.score && !k.tokens.is_disjoint(&m.tokens));
        if !duplicate {
            kept.push(m);
        }
    }
    kept.iter().map(|m| m.score).sum()
}

/// Full, partial or no graph evidence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EvidenceScore {
    None = 2,
    Partial = 3,
    Full = 5,
}

impl EvidenceScore {
    pub fn from_scc_score(score: f64) -> Self {
        if score >= 1.0 {
            EvidenceScore::Full
        } else if score > 0.0 {
            EvidenceScore::Partial
        } else {
            EvidenceScore::None
        }
    }

    pub fn value(self) -> u8 {
        self as u8
    }
}

/// Which KG properties count as evidence for each relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateMapping {
    properties: BTreeMap<Predicate, BTreeSet<Iri>>,
}

impl Default for PredicateMapping {
    fn default() -> Self {
        let iris = |list: &[String]| list.iter().map(|s| Iri::new(s.as_str()).expect("static IRI")).collect();
        let nationality = [
            format!("{DBP}birthPlace"),
            format!("{DBO}birthPlace"),
            format!("{DBP}citizenship"),
        ];
        let profession = [
            RDF_TYPE.to_string(),
            format!("{DBP}profession"),
            format!("{DBO}profession"),
            format!("{DBO}occupation"),
        ];
        PredicateMapping {
            properties: BTreeMap::from([
                (Predicate::Nationality, iris(&nationality)),
                (Predicate::Profession, iris(&profession)),
            ]),
        }
    }
}

impl PredicateMapping {
    pub fn properties(&self, predicate: Predicate) -> &BTreeSet<Iri> {
        static EMPTY: BTreeSet<Iri> = BTreeSet::new();
        self.properties.get(&predicate).unwrap_or(&EMPTY)
    }

    /// Parses `predicate<TAB>property` rows. Properties are full IRIs
    /// (optionally in angle brackets) or `dbo:`/`dbp:`/`dbr:`/`rdf:`/`rdfs:`
    /// prefixed names. The file replaces the defaults entirely.
    pub fn parse(text: &str, context: &str) -> Result<Self> {
        let mut properties: BTreeMap<Predicate, BTreeSet<Iri>> = BTreeMap::new();
        for (line, fields) in tsv::records(text, true) {
            let [pred, prop] = fields[..] else {
                return Err(Error::parse(context, line, "expected predicate<TAB>property"));
            };
            let pred: Predicate = pred
                .parse()
                .map_err(|e: Error| Error::parse(context, line, e.to_string()))?;
            let iri = expand_name(prop.trim()).map_err(|e| Error::parse(context, line, e.to_string()))?;
            properties.entry(pred).or_default().insert(iri);
        }
        Ok(PredicateMapping { properties })
    }

    pub fn load(path: &FsPath) -> Result<Self> {
        Self::parse(&tsv::read_to_string(path)?, &path.display().to_string())
    }
}

fn expand_name(name: &str) -> Result<Iri> {
    let name = name.strip_prefix('<').and_then(|n| n.strip_suffix('>')).unwrap_or(name);
    let prefixes = [
        ("dbo:", DBO),
        ("dbp:", DBP),
        ("dbr:", DBPEDIA_RESOURCE),
        ("rdf:", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"),
        ("rdfs:", "http://www.w3.org/2000/01/rdf-schema#"),
    ];
    for (prefix, ns) in prefixes {
        if let Some(local) = name.strip_prefix(prefix) {
            return Iri::new(format!("{ns}{local}"));
        }
    }
    Iri::new(name)
}

/// Maps a display name onto a KG resource: namespace prefix plus the name
/// with spaces replaced by underscores.
pub fn locate_entity(prefix: &str, name: &str) -> Result<Iri> {
    Iri::new(format!("{prefix}{}", name.trim().replace(' ', "_")))
}

/// Graph evidence for `(subject, predicate, object_label)`.
pub fn score1(
    index: &GraphIndex,
    subject: &Iri,
    predicate: Predicate,
    object_label: &str,
    mapping: &PredicateMapping,
    cfg: &SwmConfig,
) -> EvidenceScore {
    let Ok(query) = NlQuery::new(object_label) else {
        return EvidenceScore::None;
    };
    let scc = index.scc(subject).restrict(mapping.properties(predicate));
    EvidenceScore::from_scc_score(scc_score(&scc, &query, cfg))
}
