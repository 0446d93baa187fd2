//! Input triples and the TSV datasets they come from.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::tsv;

/// The two relations the scorer handles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Predicate {
    Nationality,
    Profession,
}

impl Predicate {
    pub const ALL: [Predicate; 2] = [Predicate::Nationality, Predicate::Profession];

    pub fn as_str(self) -> &'static str {
        match self {
            Predicate::Nationality => "nationality",
            Predicate::Profession => "profession",
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Predicate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "nationality" => Ok(Predicate::Nationality),
            "profession" => Ok(Predicate::Profession),
            other => Err(Error::InvalidInput(format!(
                "unknown predicate {other:?} (expected nationality or profession)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WsdmTriple {
    pub subject: String,
    pub predicate: Predicate,
    pub object: String,
}

impl WsdmTriple {
    pub fn new(subject: impl Into<String>, predicate: Predicate, object: impl Into<String>) -> Result<Self> {
        let subject = subject.into();
        let object = object.into();
        if subject.trim().is_empty() || object.trim().is_empty() {
            return Err(Error::InvalidInput(
                "triple subject and object must be non-empty".into(),
            ));
        }
        Ok(WsdmTriple {
            subject,
            predicate,
            object,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledTriple {
    pub triple: WsdmTriple,
    pub score: Option<u8>,
}

/// Parses a dataset. Labeled rows are `subject<TAB>object<TAB>score` with an
/// integer score in `0..=7`; unlabeled rows are `subject<TAB>object`. Blank
/// lines are skipped.
pub fn parse_dataset(text: &str, predicate: Predicate, labeled: bool, context: &str) -> Result<Vec<LabeledTriple>> {
    let want = if labeled { 3 } else { 2 };
    let mut rows = Vec::new();
    for (line, fields) in tsv::records(text, false) {
        if fields.len() != want {
            return Err(Error::parse(
                context,
                line,
                format!("expected {want} tab-separated columns, found {}", fields.len()),
            ));
        }
        let triple = WsdmTriple::new(fields[0].trim(), predicate, fields[1].trim())
            .map_err(|e| Error::parse(context, line, e.to_string()))?;
        let score = if labeled {
            Some(parse_score(fields[2]).map_err(|m| Error::parse(context, line, m))?)
        } else {
            None
        };
        rows.push(LabeledTriple { triple, score });
    }
    Ok(rows)
}

pub fn load_dataset(path: &Path, predicate: Predicate, labeled: bool) -> Result<Vec<LabeledTriple>> {
    let text = tsv::read_to_string(path)?;
    parse_dataset(&text, predicate, labeled, &path.display().to_string())
}

pub(crate) fn parse_score(field: &str) -> std::result::Result<u8, String> {
    let field = field.trim();
    match field.parse::<u8>() {
        Ok(s) if s <= 7 => Ok(s),
        Ok(s) => Err(format!("score {s} outside 0..=7")),
        Err(_) => Err(format!("score {field:?} is not an integer in 0..=7")),
    }
}
