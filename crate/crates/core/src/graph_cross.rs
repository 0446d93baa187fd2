//! Concept-taxonomy evidence: direct instance/concept lookups and demonym
//! counting over an instance's concepts.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{self, Write};
use std::path::Path;

use crate::dataset::{LabeledTriple, Predicate, WsdmTriple};
use crate::error::{Error, Result};
use crate::tsv;

/// Lookup key for instances, concepts, countries and demonyms: lowercased,
/// underscores read as spaces, whitespace collapsed.
pub fn normalize_key(s: &str) -> String {
    s.replace('_', " ")
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConceptEdge {
    pub instance: String,
    pub concept: String,
    pub weight: u8,
}

/// Weighted instance→concept edges, one per (instance, concept) pair.
#[derive(Debug, Clone, Default)]
pub struct ConceptGraph {
    edges: HashMap<String, Vec<ConceptEdge>>,
    raw_weight_stats: Option<(f64, f64)>,
}

/// Whether the third concept-graph column holds raw counts or weights that
/// are already in `1..=7`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightMode {
    #[default]
    RawCounts,
    Normalized,
}

fn weight_from_count(count: f64, min: f64, max: f64) -> u8 {
    if max == min {
        return 7;
    }
    let scaled = 6.0 * (count.ln() - min.ln()) / (max.ln() - min.ln());
    1 + scaled.round().clamp(0.0, 6.0) as u8
}

/// Log-scale min-max normalisation of raw counts onto `1..=7`. When all
/// counts are equal every edge gets 7.
pub fn normalize_weights<I, S>(raw: I) -> Result<ConceptGraph>
where
    I: IntoIterator<Item = (S, S, f64)>,
    S: Into<String>,
{
    let raw: Vec<(String, String, f64)> = raw.into_iter().map(|(i, c, n)| (i.into(), c.into(), n)).collect();
    if raw.is_empty() {
        return Err(Error::InvalidInput("concept graph has no edges".into()));
    }
    if let Some((i, c, n)) = raw.iter().find(|(_, _, n)| !(n.is_finite() && *n >= 1.0)) {
        return Err(Error::InvalidInput(format!(
            "count for ({i}, {c}) must be a finite number >= 1, got {n}"
        )));
    }
    let min = raw.iter().map(|r| r.2).fold(f64::INFINITY, f64::min);
    let max = raw.iter().map(|r| r.2).fold(f64::NEG_INFINITY, f64::max);
    let mut graph = ConceptGraph {
        raw_weight_stats: Some((min, max)),
        ..ConceptGraph::default()
    };
    for (instance, concept, count) in raw {
        graph.add(instance, concept, weight_from_count(count, min, max))?;
    }
    Ok(graph)
}

impl ConceptGraph {
    /// Builds a graph from weights already in `1..=7`.
    pub fn from_weighted<I, S>(edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, S, u8)>,
        S: Into<String>,
    {
        let mut graph = ConceptGraph::default();
        for (i, c, w) in edges {
            graph.add(i.into(), c.into(), w)?;
        }
        Ok(graph)
    }

    fn add(&mut self, instance: String, concept: String, weight: u8) -> Result<()> {
        if !(1..=7).contains(&weight) {
            return Err(Error::InvalidInput(format!(
                "weight {weight} for ({instance}, {concept}) outside 1..=7"
            )));
        }
        let key = normalize_key(&instance);
        let edges = self.edges.entry(key).or_default();
        let concept_key = normalize_key(&concept);
        if edges.iter().any(|e| normalize_key(&e.concept) == concept_key) {
            return Err(Error::InvalidInput(format!(
                "duplicate concept edge ({instance}, {concept})"
            )));
        }
        edges.push(ConceptEdge {
            instance,
            concept,
            weight,
        });
        Ok(())
    }

    /// Every edge of `instance` (case-insensitive), in load order.
    pub fn lookup(&self, instance: &str) -> &[ConceptEdge] {
        self.edges
            .get(&normalize_key(instance))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn edge_count(&self) -> usize {
        self.edges.values().map(Vec::len).sum()
    }

    /// `(min, max)` of the raw counts, when built from counts.
    pub fn raw_weight_stats(&self) -> Option<(f64, f64)> {
        self.raw_weight_stats
    }

    /// Reads `instance<TAB>concept<TAB>count-or-weight` rows.
    pub fn parse(text: &str, mode: WeightMode, context: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (line, fields) in tsv::records(text, true) {
            let [instance, concept, value] = fields[..] else {
                return Err(Error::parse(context, line, "expected instance<TAB>concept<TAB>value"));
            };
            if instance.trim().is_empty() || concept.trim().is_empty() {
                return Err(Error::parse(context, line, "empty instance or concept"));
            }
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::parse(context, line, format!("bad numeric value {value:?}")))?;
            rows.push((line, instance.trim(), concept.trim(), value));
        }
        let at_line = |line: usize| move |e: Error| Error::parse(context, line, e.to_string());
        match mode {
            WeightMode::RawCounts => {
                if let Some((line, ..)) = rows.iter().find(|r| !(r.3.is_finite() && r.3 >= 1.0)) {
                    return Err(Error::parse(context, *line, "counts must be >= 1"));
                }
                let min = rows.iter().map(|r| r.3).fold(f64::INFINITY, f64::min);
                let max = rows.iter().map(|r| r.3).fold(f64::NEG_INFINITY, f64::max);
                if rows.is_empty() {
                    return Err(Error::InvalidInput(format!("{context}: concept graph has no edges")));
                }
                let mut graph = ConceptGraph {
                    raw_weight_stats: Some((min, max)),
                    ..ConceptGraph::default()
                };
                for (line, i, c, n) in rows {
                    graph
                        .add(i.into(), c.into(), weight_from_count(n, min, max))
                        .map_err(at_line(line))?;
                }
                Ok(graph)
            }
            WeightMode::Normalized => {
                let mut graph = ConceptGraph::default();
                for (line, i, c, w) in rows {
                    if w.fract() != 0.0 || !(1.0..=7.0).contains(&w) {
                        return Err(Error::parse(
                            context,
                            line,
                            format!("weight {w} is not an integer in 1..=7"),
                        ));
                    }
                    graph.add(i.into(), c.into(), w as u8).map_err(at_line(line))?;
                }
                Ok(graph)
            }
        }
    }

    pub fn load(path: &Path, mode: WeightMode) -> Result<Self> {
        Self::parse(&tsv::read_to_string(path)?, mode, &path.display().to_string())
    }
}

/// Country ↔ demonym gazetteer with case-insensitive lookups.
#[derive(Debug, Clone, Default)]
pub struct DemonymMap {
    country_to_demonyms: BTreeMap<String, BTreeSet<String>>,
    demonym_to_country: BTreeMap<String, BTreeSet<String>>,
}

impl DemonymMap {
    pub fn insert(&mut self, country: &str, demonym: &str) {
        let country = normalize_key(country);
        let demonym = demonym.split_whitespace().collect::<Vec<_>>().join(" ");
        self.country_to_demonyms
            .entry(country.clone())
            .or_default()
            .insert(demonym.clone());
        self.demonym_to_country
            .entry(normalize_key(&demonym))
            .or_default()
            .insert(country);
    }

    /// Demonyms of `country` as written in the gazetteer; empty when unknown.
    pub fn demonyms(&self, country: &str) -> impl Iterator<Item = &str> {
        self.country_to_demonyms
            .get(&normalize_key(country))
            .into_iter()
            .flatten()
            .map(String::as_str)
    }

    pub fn countries_of(&self, demonym: &str) -> impl Iterator<Item = &str> {
        self.demonym_to_country
            .get(&normalize_key(demonym))
            .into_iter()
            .flatten()
            .map(String::as_str)
    }

    pub fn countries(&self) -> impl Iterator<Item = &str> {
        self.country_to_demonyms.keys().map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.country_to_demonyms.is_empty()
    }

    /// Reads `country<TAB>demonym` rows; a country may appear on many rows.
    pub fn parse(text: &str, context: &str) -> Result<Self> {
        let mut map = DemonymMap::default();
        for (line, fields) in tsv::records(text, true) {
            match fields[..] {
                [country, demonym] if !country.trim().is_empty() && !demonym.trim().is_empty() => {
                    map.insert(country, demonym)
                }
                _ => return Err(Error::parse(context, line, "expected country<TAB>demonym")),
            }
        }
        Ok(map)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&tsv::read_to_string(path)?, &path.display().to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphCrossConfig {
    /// Points per demonym occurrence before saturation at 7.
    pub a: f64,
}

impl Default for GraphCrossConfig {
    fn default() -> Self {
        GraphCrossConfig { a: 3.0 }
    }
}

impl GraphCrossConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a <= 7.0) {
            return Err(Error::Config(format!("a must be in (0, 7], got {}", self.a)));
        }
        Ok(())
    }
}

/// Weight of the `(subject, object)` concept edge, or 0 without one.
pub fn score2(cg: &ConceptGraph, subject: &str, object: &str) -> u8 {
    let object = normalize_key(object);
    cg.lookup(subject)
        .iter()
        .find(|e| normalize_key(&e.concept) == object)
        .map_or(0, |e| e.weight)
}

fn words(s: &str) -> Vec<String> {
    s.split(|c: char| c.is_whitespace() || c == '-')
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect()
}

fn contains_phrase(haystack: &[String], phrase: &[String]) -> bool {
    !phrase.is_empty() && haystack.windows(phrase.len()).any(|w| w == phrase)
}

/// Number of `subject`'s concepts naming one of `country`'s demonyms as a
/// whole word ("german scientist" counts for Germany, "germane" does not).
pub fn count_demonym_occurrences(cg: &ConceptGraph, subject: &str, country: &str, dm: &DemonymMap) -> u32 {
    let demonyms: Vec<Vec<String>> = dm.demonyms(country).map(words).collect();
    if demonyms.is_empty() {
        return 0;
    }
    cg.lookup(subject)
        .iter()
        .filter(|e| {
            let concept = words(&e.concept);
            demonyms.iter().any(|d| contains_phrase(&concept, d))
        })
        .count() as u32
}

/// `a·d` (rounded) below the cap `7/a`, otherwise 7.
pub fn score3(d: u32, cfg: &GraphCrossConfig) -> u8 {
    let d = f64::from(d);
    if d < 7.0 / cfg.a {
        (cfg.a * d).round().min(7.0) as u8
    } else {
        7
    }
}

/// Both concept-graph scores of one triple. The demonym score only applies to
/// nationality and is 0 for profession.
pub fn graph_cross_scores(cg: &ConceptGraph, dm: &DemonymMap, cfg: &GraphCrossConfig, triple: &WsdmTriple) -> (u8, u8) {
    let s2 = score2(cg, &triple.subject, &triple.object);
    let s3 = match triple.predicate {
        Predicate::Nationality => score3(count_demonym_occurrences(cg, &triple.subject, &triple.object, dm), cfg),
        Predicate::Profession => 0,
    };
    (s2, s3)
}

// One subject/predicate group with its scored objects.
type SubjectRows = (String, Predicate, Vec<(String, u8)>);

/// Training scores keyed by subject, then object. Keeps first-seen subject
/// and object order so predictions come out in input order.
#[derive(Debug, Clone, Default)]
pub struct TrainingTable {
    rows: Vec<SubjectRows>,
    position: HashMap<(String, Predicate), usize>,
}

impl TrainingTable {
    pub fn from_labeled(rows: &[LabeledTriple]) -> Result<Self> {
        let mut table = TrainingTable::default();
        for r in rows {
            let score = r.score.ok_or_else(|| {
                Error::InvalidInput(format!("unlabeled row ({}, {})", r.triple.subject, r.triple.object))
            })?;
            table.insert(&r.triple, score)?;
        }
        Ok(table)
    }

    pub fn insert(&mut self, triple: &WsdmTriple, score: u8) -> Result<()> {
        if score > 7 {
            return Err(Error::InvalidInput(format!("score {score} outside 0..=7")));
        }
        let key = (triple.subject.clone(), triple.predicate);
        let idx = *self.position.entry(key).or_insert_with(|| {
            self.rows.push((triple.subject.clone(), triple.predicate, Vec::new()));
            self.rows.len() - 1
        });
        let objects = &mut self.rows[idx].2;
        match objects.iter_mut().find(|(o, _)| *o == triple.object) {
            Some(slot) => slot.1 = score,
            None => objects.push((triple.object.clone(), score)),
        }
        Ok(())
    }

    pub fn get(&self, subject: &str, predicate: Predicate, object: &str) -> Option<u8> {
        let idx = *self.position.get(&(subject.to_string(), predicate))?;
        self.rows[idx].2.iter().find(|(o, _)| o == object).map(|(_, s)| *s)
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(|r| r.2.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (WsdmTriple, u8)> + '_ {
        self.rows.iter().flat_map(|(s, p, objects)| {
            objects.iter().map(move |(o, score)| {
                (
                    WsdmTriple {
                        subject: s.clone(),
                        predicate: *p,
                        object: o.clone(),
                    },
                    *score,
                )
            })
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphCrossPrediction {
    pub triple: WsdmTriple,
    pub truth: u8,
    pub score2: u8,
    pub score3: u8,
}

/// Runs both predictions for every training triple; one record per entry, in
/// table order.
pub fn graph_cross_predict(
    training: &TrainingTable,
    cg: &ConceptGraph,
    dm: &DemonymMap,
    cfg: &GraphCrossConfig,
) -> Vec<GraphCrossPrediction> {
    training
        .iter()
        .map(|(triple, truth)| {
            let (score2, score3) = graph_cross_scores(cg, dm, cfg, &triple);
            GraphCrossPrediction {
                triple,
                truth,
                score2,
                score3,
            }
        })
        .collect()
}

/// `subject<TAB>predicate<TAB>object<TAB>truth<TAB>score2<TAB>score3` rows.
pub fn write_predictions(out: &mut impl Write, predictions: &[GraphCrossPrediction]) -> io::Result<()> {
    for p in predictions {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            p.triple.subject, p.triple.predicate, p.triple.object, p.truth, p.score2, p.score3
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> (ConceptGraph, DemonymMap) {
        let cg = ConceptGraph::from_weighted([
            ("albert einstein", "physicist", 6),
            ("albert einstein", "german scientist", 5),
            ("albert einstein", "german-born physicist", 4),
            ("albert einstein", "germane thinker", 2),
        ])
        .unwrap();
        let dm = DemonymMap::parse("Germany\tGerman\nPoland\tPolish\nPoland\tPole\n", "d").unwrap();
        (cg, dm)
    }

    #[test]
    fn normalization_endpoints() {
        let g = normalize_weights([("a", "x", 1.0), ("a", "y", 1000.0)]).unwrap();
        let w: Vec<_> = g.lookup("a").iter().map(|e| e.weight).collect();
        assert_eq!(w, vec![1, 7]);
        assert_eq!(g.raw_weight_stats(), Some((1.0, 1000.0)));
    }

    #[test]
    fn normalization_degenerate_range() {
        let g = normalize_weights([("a", "x", 4.0), ("b", "y", 4.0)]).unwrap();
        assert_eq!(g.lookup("a")[0].weight, 7);
        assert_eq!(g.lookup("b")[0].weight, 7);
    }

    #[test]
    fn normalization_log_midpoint() {
        // ln 31.6 / ln 1000 = 0.49988..., 6 * that rounds to 3
        let g = normalize_weights([("a", "x", 1.0), ("a", "y", 31.6), ("a", "z", 1000.0)]).unwrap();
        let w: Vec<_> = g.lookup("a").iter().map(|e| e.weight).collect();
        assert_eq!(w, vec![1, 4, 7]);
    }

    #[test]
    fn normalization_rejects_bad_input() {
        assert!(normalize_weights(Vec::<(&str, &str, f64)>::new()).is_err());
        assert!(normalize_weights([("a", "x", 0.0)]).is_err());
        assert!(normalize_weights([("a", "x", 2.0), ("A", "X", 3.0)]).is_err());
    }

    #[test]
    fn score2_lookup() {
        let (cg, _) = fixture();
        assert_eq!(score2(&cg, "Albert Einstein", "physicist"), 6);
        assert_eq!(score2(&cg, "Albert Einstein", "Physicist"), 6);
        assert_eq!(score2(&cg, "Albert_Einstein", "PHYSICIST"), 6);
        assert_eq!(score2(&cg, "Albert Einstein", "chemist"), 0);
        assert_eq!(score2(&cg, "Nobody", "physicist"), 0);
    }

    #[test]
    fn demonym_counting() {
        let (cg, dm) = fixture();
        assert_eq!(count_demonym_occurrences(&cg, "Albert Einstein", "Germany", &dm), 2);
        assert_eq!(count_demonym_occurrences(&cg, "Albert Einstein", "Poland", &dm), 0);
        assert_eq!(count_demonym_occurrences(&cg, "Nobody", "Germany", &dm), 0);
        assert_eq!(count_demonym_occurrences(&cg, "Albert Einstein", "Atlantis", &dm), 0);
        let single = ConceptGraph::from_weighted([("albert einstein", "german scientist", 5)]).unwrap();
        assert_eq!(count_demonym_occurrences(&single, "Albert Einstein", "germany", &dm), 1);
    }

    #[test]
    fn multiword_demonyms_match_as_phrases() {
        let cg = ConceptGraph::from_weighted([("x", "new zealander author", 3), ("y", "zealander new", 3)]).unwrap();
        let dm = DemonymMap::parse("New Zealand\tNew Zealander\n", "d").unwrap();
        assert_eq!(count_demonym_occurrences(&cg, "x", "New Zealand", &dm), 1);
        assert_eq!(count_demonym_occurrences(&cg, "y", "New Zealand", &dm), 0);
    }

    #[test]
    fn eq7_table() {
        let cfg = GraphCrossConfig::default();
        let got: Vec<_> = [0, 1, 2, 3, 10].iter().map(|&d| score3(d, &cfg)).collect();
        assert_eq!(got, vec![0, 3, 6, 7, 7]);
    }

    #[test]
    fn config_bounds() {
        assert!(GraphCrossConfig { a: 0.0 }.validate().is_err());
        assert!(GraphCrossConfig { a: 7.5 }.validate().is_err());
        assert!(GraphCrossConfig { a: 7.0 }.validate().is_ok());
    }

    #[test]
    fn demonym_map_is_consistent() {
        let (_, dm) = fixture();
        for country in dm.countries() {
            for d in dm.demonyms(country) {
                assert!(dm.countries_of(d).any(|c| c == country));
            }
        }
        let polish: Vec<_> = dm.demonyms("POLAND").collect();
        assert_eq!(polish, vec!["Pole", "Polish"]);
        assert_eq!(dm.countries_of("POLISH").collect::<Vec<_>>(), vec!["poland"]);
    }

    #[test]
    fn parse_concepts_both_modes() {
        let g = ConceptGraph::parse("a\tx\t1\na\ty\t1000\n", WeightMode::RawCounts, "c").unwrap();
        assert_eq!(g.edge_count(), 2);
        let g = ConceptGraph::parse("a\tx\t7\n", WeightMode::Normalized, "c").unwrap();
        assert_eq!(score2(&g, "a", "x"), 7);
        assert!(ConceptGraph::parse("a\tx\t8\n", WeightMode::Normalized, "c").is_err());
        assert!(ConceptGraph::parse("a\tx\n", WeightMode::RawCounts, "c").is_err());
        let err = ConceptGraph::parse("a\tx\t3\na\tx\t4\n", WeightMode::RawCounts, "c").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn predictions_cover_every_row() {
        let (cg, dm) = fixture();
        let mut table = TrainingTable::default();
        let t = |s: &str, p, o: &str| WsdmTriple::new(s, p, o).unwrap();
        table
            .insert(&t("Albert Einstein", Predicate::Nationality, "Germany"), 6)
            .unwrap();
        table
            .insert(&t("Albert Einstein", Predicate::Profession, "Physicist"), 7)
            .unwrap();
        table
            .insert(&t("Unknown Person", Predicate::Nationality, "Germany"), 2)
            .unwrap();
        let preds = graph_cross_predict(&table, &cg, &dm, &GraphCrossConfig::default());
        assert_eq!(preds.len(), 3);
        assert_eq!((preds[0].score2, preds[0].score3), (0, 6));
        assert_eq!((preds[1].score2, preds[1].score3), (6, 0));
        assert_eq!((preds[2].score2, preds[2].score3), (0, 0));
        assert_eq!(
            table.get("Albert Einstein", Predicate::Profession, "Physicist"),
            Some(7)
        );

        let mut a = Vec::new();
        let mut b = Vec::new();
        write_predictions(&mut a, &preds).unwrap();
        write_predictions(
            &mut b,
            &graph_cross_predict(&table, &cg, &dm, &GraphCrossConfig::default()),
        )
        .unwrap();
        assert_eq!(a, b);
        assert_eq!(String::from_utf8(a).unwrap().lines().count(), 3);
    }
}
