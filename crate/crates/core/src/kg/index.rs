use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::vocab::{RDFS_LABEL, RDFS_SUBCLASS_OF, RDF_TYPE};
use super::{Iri, Term, Triple};

/// A deduplicated triple set with subject, label and subclass indexes.
///
/// Triples are kept in a `BTreeSet` ordered subject-first, so the triples of
/// one subject form a contiguous range; that range is the subject index.
#[derive(Debug, Clone, Default)]
pub struct GraphIndex {
    triples: BTreeSet<Triple>,
    labels: HashMap<Iri, BTreeSet<String>>,
    subclass_edges: HashMap<Iri, BTreeSet<Iri>>,
    closed: bool,
}

pub fn build_index(triples: impl IntoIterator<Item = Triple>) -> GraphIndex {
    let mut index = GraphIndex::default();
    for t in triples {
        index.insert(t);
    }
    index
}

impl GraphIndex {
    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn triples(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.triples.contains(t)
    }

    /// All triples whose subject is `s`, in triple order.
    pub fn by_subject<'a>(&'a self, s: &'a Iri) -> impl Iterator<Item = &'a Triple> + 'a {
        let lower = Triple {
            subject: s.clone(),
            predicate: Iri::min_bound(),
            object: Term::Iri(Iri::min_bound()),
        };
        self.triples.range(lower..).take_while(move |t| &t.subject == s)
    }

    pub fn subjects(&self) -> impl Iterator<Item = &Iri> {
        let mut last: Option<&Iri> = None;
        self.triples.iter().filter_map(move |t| {
            if last == Some(&t.subject) {
                None
            } else {
                last = Some(&t.subject);
                last
            }
        })
    }

    /// Lexical forms of every `rdfs:label` literal attached to `term`.
    pub fn labels_of(&self, term: &Iri) -> BTreeSet<String> {
        self.labels.get(term).cloned().unwrap_or_default()
    }

    pub fn direct_superclasses(&self, class: &Iri) -> Option<&BTreeSet<Iri>> {
        self.subclass_edges.get(class)
    }

    fn insert(&mut self, t: Triple) -> bool {
        if self.triples.contains(&t) {
            return false;
        }
        match (t.predicate.as_str(), &t.object) {
            (RDFS_LABEL, Term::Literal(lit)) => {
                self.labels
                    .entry(t.subject.clone())
                    .or_default()
                    .insert(lit.lexical.clone());
            }
            (RDFS_SUBCLASS_OF, Term::Iri(sup)) => {
                self.subclass_edges
                    .entry(t.subject.clone())
                    .or_default()
                    .insert(sup.clone());
            }
            _ => {}
        }
        self.closed = false;
        self.triples.insert(t)
    }

    /// Materialises `rdfs:subClassOf` transitivity and `rdf:type` propagation
    /// along it. Cycles are allowed; a class on a cycle becomes its own
    /// subclass, exactly as repeated rule application would produce.
    pub fn entail_closure(mut self) -> GraphIndex {
        let reach = self.superclass_reach();
        let subclass_of = Iri(RDFS_SUBCLASS_OF.to_string());
        let rdf_type = Iri(RDF_TYPE.to_string());

        let mut derived = Vec::new();
        for (class, supers) in &reach {
            for sup in supers {
                derived.push(Triple::new(class.clone(), subclass_of.clone(), sup.clone()));
            }
        }
        for t in &self.triples {
            if t.predicate != rdf_type {
                continue;
            }
            let Some(supers) = t.object.as_iri().and_then(|c| reach.get(c)) else {
                continue;
            };
            for sup in supers {
                derived.push(Triple::new(t.subject.clone(), rdf_type.clone(), sup.clone()));
            }
        }
        for t in derived {
            self.insert(t);
        }
        self.closed = true;
        self
    }

    // Every class reachable through one or more subClassOf edges.
    fn superclass_reach(&self) -> BTreeMap<Iri, BTreeSet<Iri>> {
        let mut reach = BTreeMap::new();
        for start in self.subclass_edges.keys() {
            let mut seen = BTreeSet::new();
            let mut stack: Vec<&Iri> = self.subclass_edges[start].iter().collect();
            while let Some(c) = stack.pop() {
                if seen.insert(c.clone()) {
                    if let Some(next) = self.subclass_edges.get(c) {
                        stack.extend(next.iter());
                    }
                }
            }
            reach.insert(start.clone(), seen);
        }
        reach
    }

    /// The semantic connected component of `s`: every triple with subject
    /// `s`, plus the `rdfs:label` triples of their predicates and objects.
    /// The index should be closed first so entailed triples are included.
    pub fn scc(&self, s: &Iri) -> Scc {
        let statements: Vec<Triple> = self.by_subject(s).cloned().collect();
        let mut label_statements = BTreeSet::new();
        for t in &statements {
            self.collect_labels(&t.predicate, &mut label_statements);
            if let Term::Iri(o) = &t.object {
                self.collect_labels(o, &mut label_statements);
            }
        }
        Scc {
            subject: s.clone(),
            statements,
            label_statements: label_statements.into_iter().collect(),
        }
    }

    fn collect_labels(&self, term: &Iri, out: &mut BTreeSet<Triple>) {
        out.extend(
            self.by_subject(term)
                .filter(|t| t.predicate.as_str() == RDFS_LABEL)
                .cloned(),
        );
    }
}

/// A subject's star of statements together with the labels needed to
/// verbalise them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scc {
    subject: Iri,
    statements: Vec<Triple>,
    label_statements: Vec<Triple>,
}

impl Scc {
    pub fn new(subject: Iri, statements: Vec<Triple>, label_statements: Vec<Triple>) -> Self {
        Scc {
            subject,
            statements,
            label_statements,
        }
    }

    pub fn subject(&self) -> &Iri {
        &self.subject
    }

    /// Triples with the SCC subject in subject position.
    pub fn statements(&self) -> &[Triple] {
        &self.statements
    }

    pub fn label_statements(&self) -> &[Triple] {
        &self.label_statements
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.statements.iter().chain(&self.label_statements)
    }

    pub fn len(&self) -> usize {
        self.statements.len() + self.label_statements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty() && self.label_statements.is_empty()
    }

    /// Literal labels of `term` carried by this SCC, sorted.
    pub fn labels_of(&self, term: &Iri) -> Vec<&str> {
        let mut labels: Vec<&str> = self
            .label_statements
            .iter()
            .filter(|t| &t.subject == term)
            .filter_map(|t| match &t.object {
                Term::Literal(l) => Some(l.lexical.as_str()),
                Term::Iri(_) => None,
            })
            .collect();
        labels.sort_unstable();
        labels.dedup();
        labels
    }

    /// Keeps only statements whose predicate is in `predicates`, and only the
    /// label triples those statements still refer to.
    pub fn restrict(&self, predicates: &BTreeSet<Iri>) -> Scc {
        let statements: Vec<Triple> = self
            .statements
            .iter()
            .filter(|t| predicates.contains(&t.predicate))
            .cloned()
            .collect();
        let referenced: BTreeSet<&Iri> = statements
            .iter()
            .flat_map(|t| std::iter::once(&t.predicate).chain(t.object.as_iri()))
            .collect();
        let label_statements = self
            .label_statements
            .iter()
            .filter(|t| referenced.contains(&t.subject))
            .cloned()
            .collect();
        Scc {
            subject: self.subject.clone(),
            statements,
            label_statements,
        }
    }
}
