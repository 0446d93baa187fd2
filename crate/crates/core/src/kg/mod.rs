//! RDF terms, N-Triples I/O and an entailment-closed, subject-indexed store.

mod index;
mod ntriples;

use std::fmt;

pub use index::{build_index, GraphIndex, Scc};
pub use ntriples::{load_ntriples, parse_ntriples, write_ntriples};

use crate::error::{Error, Result};

pub mod vocab {
    pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
    pub const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
    pub const RDFS_SUBCLASS_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
}

/// An absolute IRI, stored without angle brackets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Iri(String);

impl Iri {
    pub fn new(value: impl Into<String>) -> Result<Self> {
        let value = value.into();
        validate_iri(&value).map_err(Error::InvalidInput)?;
        Ok(Iri(value))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Fragment or last path segment, used when a term carries no label.
    pub fn local_name(&self) -> &str {
        let s = self.0.trim_end_matches(['/', '#']);
        match s.rfind(['#', '/']) {
            Some(i) => &s[i + 1..],
            None => s.rsplit(':').next().unwrap_or(s),
        }
    }

    // Smallest possible IRI in the derived ordering; only used as a range
    // bound and never stored.
    pub(crate) fn min_bound() -> Self {
        Iri(String::new())
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn validate_iri(value: &str) -> std::result::Result<(), String> {
    if value.is_empty() {
        return Err("empty IRI".into());
    }
    if let Some(c) = value
        .chars()
        .find(|c| c.is_whitespace() || c.is_control() || "<>\"{}|^`\\".contains(*c))
    {
        return Err(format!("character {c:?} not allowed in IRI {value:?}"));
    }
    let scheme = value.split(':').next().unwrap_or("");
    let valid_scheme = value.contains(':')
        && scheme.starts_with(|c: char| c.is_ascii_alphabetic())
        && scheme.chars().all(|c| c.is_ascii_alphanumeric() || "+-.".contains(c));
    if !valid_scheme {
        return Err(format!("IRI {value:?} is not absolute"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub lexical: String,
    pub lang: Option<String>,
    /// Datatype IRI, kept as opaque text.
    pub datatype: Option<String>,
}

impl Literal {
    pub fn plain(lexical: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            lang: None,
            datatype: None,
        }
    }

    pub fn lang(lexical: impl Into<String>, lang: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            lang: Some(lang.into()),
            datatype: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(Iri),
    Literal(Literal),
}

impl Term {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            Term::Literal(_) => None,
        }
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

impl From<Literal> for Term {
    fn from(lit: Literal) -> Self {
        Term::Literal(lit)
    }
}

/// An RDF statement. Subjects and predicates are always IRIs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Iri,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Iri, predicate: Iri, object: impl Into<Term>) -> Self {
        Triple {
            subject,
            predicate,
            object: object.into(),
        }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}> <{}> ", self.subject, self.predicate)?;
        match &self.object {
            Term::Iri(iri) => write!(f, "<{iri}>")?,
            Term::Literal(lit) => {
                f.write_str("\"")?;
                ntriples::escape_into(f, &lit.lexical)?;
                f.write_str("\"")?;
                if let Some(lang) = &lit.lang {
                    write!(f, "@{lang}")?;
                } else if let Some(dt) = &lit.datatype {
                    write!(f, "^^<{dt}>")?;
                }
            }
        }
        f.write_str(" .")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iri_validation() {
        assert!(Iri::new("http://dbpedia.org/resource/Austria").is_ok());
        assert!(Iri::new("e:A").is_ok());
        assert!(Iri::new("").is_err());
        assert!(Iri::new("http://x.org/a b").is_err());
        assert!(Iri::new("relative/path").is_err());
        assert!(Iri::new("1http://x").is_err());
    }

    #[test]
    fn local_names() {
        let iri = Iri::new("http://dbpedia.org/resource/Frederick_Loewe").unwrap();
        assert_eq!(iri.local_name(), "Frederick_Loewe");
        let iri = Iri::new("http://www.w3.org/2000/01/rdf-schema#label").unwrap();
        assert_eq!(iri.local_name(), "label");
        assert_eq!(Iri::new("e:A").unwrap().local_name(), "A");
    }

    #[test]
    fn display_escapes_literals() {
        let t = Triple::new(
            Iri::new("e:A").unwrap(),
            Iri::new("e:p").unwrap(),
            Literal::plain("say \"hi\"\n\\"),
        );
        assert_eq!(t.to_string(), r#"<e:A> <e:p> "say \"hi\"\n\\" ."#);
    }
}
