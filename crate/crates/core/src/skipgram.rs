//! Word-embedding evidence: cosine similarity between a person's vector and
//! the vectors of every candidate value, rescaled onto `[2, 7]`.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::LazyLock;

use regex::Regex;

use crate::dataset::Predicate;
use crate::error::{Error, Result};
use crate::graph_cross::DemonymMap;
use crate::tsv;

/// Score given whenever there is nothing to discriminate with: an unknown
/// subject or object, or all candidates equally similar.
pub const ABSTAIN_SCORE: f64 = 7.0;

static ANNOTATION: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\[([^\[\]|]+)\|[^\[\]]*\]").expect("static regex"));

fn brackets_balanced(line: &str) -> bool {
    let mut depth = 0i64;
    for c in line.chars() {
        match c {
            '[' => depth += 1,
            ']' => {
                depth -= 1;
                if depth < 0 {
                    return false;
                }
            }
            _ => {}
        }
    }
    depth == 0
}

/// Rewrites every `[Entity_Id|surface text]` annotation to `Entity_Id`.
/// Lines with unbalanced brackets are returned unchanged.
pub fn preprocess_corpus_line(line: &str) -> String {
    if !brackets_balanced(line) {
        log::warn!("unbalanced annotation brackets, line left unchanged: {line}");
        return line.to_string();
    }
    let mut current = line.to_string();
    loop {
        let next = ANNOTATION.replace_all(&current, "$1").into_owned();
        if next == current {
            return current;
        }
        current = next;
    }
}

/// Dictionary token for a display name: spaces become underscores.
pub fn normalize_entity_name(name: &str) -> String {
    name.replace(' ', "_")
}

pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv = v.iter().map(|b| b * b).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((dot / (nu * nv)).clamp(-1.0, 1.0))
}

/// Token → vector dictionary; every vector has the same dimension.
#[derive(Debug, Clone, Default)]
pub struct VectorStore {
    vectors: HashMap<String, Vec<f64>>,
    dimension: usize,
}

impl VectorStore {
    pub fn new(dimension: usize) -> Self {
        VectorStore {
            vectors: HashMap::new(),
            dimension,
        }
    }

    pub fn insert(&mut self, token: impl Into<String>, vector: Vec<f64>) -> Result<()> {
        let token = token.into();
        if vector.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                left: self.dimension,
                right: vector.len(),
            });
        }
        if vector.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite component in vector for {token:?}"
            )));
        }
        if self.vectors.contains_key(&token) {
            return Err(Error::InvalidInput(format!("duplicate token {token:?}")));
        }
        self.vectors.insert(token, vector);
        Ok(())
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.vectors.get(token).map(Vec::as_slice)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Cosine between two dictionary tokens; `None` if either is missing or
    /// zero.
    pub fn similarity(&self, a: &str, b: &str) -> Option<f64> {
        cosine(self.get(a)?, self.get(b)?).ok()
    }

    /// Parses the word2vec text format: a `count dimension` header, then
    /// `token v1 ... vd` rows.
    pub fn parse(text: &str, context: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse(context, 1, "missing `count dimension` header"))?;
        let header: Vec<&str> = header.split_whitespace().collect();
        let (count, dimension) = match header[..] {
            [c, d] => (
                c.parse::<usize>()
                    .map_err(|_| Error::parse(context, 1, "bad vector count"))?,
                d.parse::<usize>()
                    .map_err(|_| Error::parse(context, 1, "bad dimension"))?,
            ),
            _ => return Err(Error::parse(context, 1, "expected `count dimension` header")),
        };
        let mut store = VectorStore::new(dimension);
        for (i, line) in lines {
            let mut fields = line.split_whitespace();
            let token = fields.next().expect("non-blank line has a field");
            let vector = fields
                .map(str::parse::<f64>)
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::parse(context, i + 1, format!("bad component: {e}")))?;
            store
                .insert(token, vector)
                .map_err(|e| Error::parse(context, i + 1, e.to_string()))?;
        }
        if store.len() != count {
            return Err(Error::parse(
                context,
                1,
                format!("header announces {count} vectors, file has {}", store.len()),
            ));
        }
        Ok(store)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&tsv::read_to_string(path)?, &path.display().to_string())
    }
}

/// Every admissible object for one predicate, in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSet {
    predicate: Predicate,
    objects: Vec<String>,
}

impl CandidateSet {
    pub fn new(predicate: Predicate, objects: Vec<String>) -> Result<Self> {
        if objects.is_empty() {
            return Err(Error::InvalidInput(format!("no candidates for {predicate}")));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = objects.iter().find(|o| !seen.insert(o.as_str())) {
            return Err(Error::InvalidInput(format!(
                "duplicate candidate {dup:?} for {predicate}"
            )));
        }
        Ok(CandidateSet { predicate, objects })
    }

    pub fn predicate(&self) -> Predicate {
        self.predicate
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn contains(&self, object: &str) -> bool {
        self.objects.iter().any(|o| o == object)
    }
}

/// Reads `predicate<TAB>object_label` rows into one set per predicate.
pub fn parse_candidates(text: &str, context: &str) -> Result<BTreeMap<Predicate, CandidateSet>> {
    let mut grouped: BTreeMap<Predicate, Vec<String>> = BTreeMap::new();
    for (line, fields) in tsv::records(text, true) {
        let [pred, object] = fields[..] else {
            return Err(Error::parse(context, line, "expected predicate<TAB>object"));
        };
        let pred: Predicate = pred
            .parse()
            .map_err(|e: Error| Error::parse(context, line, e.to_string()))?;
        let object = object.trim();
        if object.is_empty() {
            return Err(Error::parse(context, line, "empty object label"));
        }
        let objects = grouped.entry(pred).or_default();
        if objects.iter().any(|o| o == object) {
            return Err(Error::parse(context, line, format!("duplicate candidate {object:?}")));
        }
        objects.push(object.to_string());
    }
    grouped
        .into_iter()
        .map(|(p, objects)| Ok((p, CandidateSet::new(p, objects)?)))
        .collect()
}

pub fn load_candidates(path: &Path) -> Result<BTreeMap<Predicate, CandidateSet>> {
    parse_candidates(&tsv::read_to_string(path)?, &path.display().to_string())
}

/// `2 + 5 (σ - m) / (M - m)`, with [`ABSTAIN_SCORE`] when `M == m`.
pub fn rescale(sigma: f64, min: f64, max: f64) -> f64 {
    if max <= min {
        return ABSTAIN_SCORE;
    }
    (2.0 + 5.0 * ((sigma - min) / (max - min))).clamp(2.0, 7.0)
}

fn rescale_among(target: Option<f64>, resolvable: impl Iterator<Item = f64>) -> f64 {
    let Some(sigma) = target else {
        return ABSTAIN_SCORE;
    };
    let (min, max) = resolvable
        .chain(std::iter::once(sigma))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s), hi.max(s)));
    rescale(sigma, min, max)
}

/// Embedding score of `object` for `subject` relative to all candidates.
/// Candidates without a usable vector are left out of the min/max; an
/// unknown subject or object yields [`ABSTAIN_SCORE`].
pub fn score4(store: &VectorStore, subject: &str, candidates: &CandidateSet, object: &str) -> f64 {
    let subject = normalize_entity_name(subject);
    if store.get(&subject).is_none() {
        return ABSTAIN_SCORE;
    }
    let sigma = |label: &str| store.similarity(&subject, &normalize_entity_name(label));
    rescale_among(sigma(object), candidates.objects().iter().filter_map(|c| sigma(c)))
}

/// Best similarity between `subject` and any demonym of `country`.
fn demonym_similarity(store: &VectorStore, subject: &str, country: &str, dm: &DemonymMap) -> Option<f64> {
    dm.demonyms(country)
        .filter_map(|d| store.similarity(subject, &normalize_entity_name(d)))
        .reduce(f64::max)
}

/// Demonym variant of [`score4`] for nationality; always 0 for profession.
pub fn score5(
    store: &VectorStore,
    subject: &str,
    predicate: Predicate,
    country: &str,
    dm: &DemonymMap,
    candidates: &CandidateSet,
) -> f64 {
    if predicate == Predicate::Profession {
        return 0.0;
    }
    let subject = normalize_entity_name(subject);
    if store.get(&subject).is_none() {
        return ABSTAIN_SCORE;
    }
    rescale_among(
        demonym_similarity(store, &subject, country, dm),
        candidates
            .objects()
            .iter()
            .filter_map(|c| demonym_similarity(store, &subject, c, dm)),
    )
}
