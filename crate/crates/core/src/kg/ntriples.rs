use std::fmt::{self, Write as _};
use std::path::Path;

use super::{validate_iri, Iri, Literal, Term, Triple};
use crate::error::{Error, Result};
use crate::tsv;

/// Parses an N-Triples document. Blank lines and `#` comment lines are
/// skipped; any malformed statement fails the whole parse with its line
/// number.
pub fn parse_ntriples(text: &str) -> Result<Vec<Triple>> {
    parse_with_context(text, "n-triples")
}

pub fn load_ntriples(path: &Path) -> Result<Vec<Triple>> {
    let text = tsv::read_to_string(path)?;
    parse_with_context(&text, &path.display().to_string())
}

pub fn write_ntriples<'a>(triples: impl IntoIterator<Item = &'a Triple>) -> String {
    let mut out = String::new();
    for t in triples {
        writeln!(out, "{t}").expect("writing to a String cannot fail");
    }
    out
}

fn parse_with_context(text: &str, context: &str) -> Result<Vec<Triple>> {
    let mut triples = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let triple = Cursor::new(line)
            .statement()
            .map_err(|msg| Error::parse(context, i + 1, msg))?;
        triples.push(triple);
    }
    Ok(triples)
}

pub(super) fn escape_into(f: &mut fmt::Formatter<'_>, s: &str) -> fmt::Result {
    for c in s.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            '\n' => f.write_str("\\n")?,
            '\r' => f.write_str("\\r")?,
            '\t' => f.write_str("\\t")?,
            c if c.is_control() => write!(f, "\\u{:04X}", c as u32)?,
            c => f.write_char(c)?,
        }
    }
    Ok(())
}

type Step<T> = std::result::Result<T, String>;

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t')) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, want: char) -> Step<()> {
        match self.bump() {
            Some(c) if c == want => Ok(()),
            Some(c) => Err(format!("expected '{want}', found '{c}'")),
            None => Err(format!("expected '{want}', found end of line")),
        }
    }

    fn statement(&mut self) -> Step<Triple> {
        let subject = self.subject()?;
        self.skip_ws();
        let predicate = self.iri().map_err(|e| format!("predicate: {e}"))?;
        self.skip_ws();
        let object = self.object()?;
        self.skip_ws();
        self.expect('.')?;
        self.skip_ws();
        match self.peek() {
            None | Some('#') => Ok(Triple {
                subject,
                predicate,
                object,
            }),
            Some(c) => Err(format!("unexpected '{c}' after statement terminator")),
        }
    }

    fn subject(&mut self) -> Step<Iri> {
        match self.peek() {
            Some('"') => Err("literal in subject position".into()),
            Some('_') => Err("blank nodes are not supported".into()),
            _ => self.iri().map_err(|e| format!("subject: {e}")),
        }
    }

    fn object(&mut self) -> Step<Term> {
        match self.peek() {
            Some('<') => Ok(Term::Iri(self.iri()?)),
            Some('"') => Ok(Term::Literal(self.literal()?)),
            Some('_') => Err("blank nodes are not supported".into()),
            Some(c) => Err(format!("object: unexpected '{c}'")),
            None => Err("missing object".into()),
        }
    }

    fn iri(&mut self) -> Step<Iri> {
        self.expect('<')?;
        let mut value = String::new();
        loop {
            match self.bump() {
                Some('>') => break,
                Some('\\') => value.push(self.unicode_escape()?),
                Some(c) => value.push(c),
                None => return Err("unterminated IRI".into()),
            }
        }
        validate_iri(&value)?;
        Ok(Iri(value))
    }

    fn literal(&mut self) -> Step<Literal> {
        self.expect('"')?;
        let mut lexical = String::new();
        loop {
            match self.bump() {
                Some('"') => break,
                Some('\\') => {
                    let c = match self.peek() {
                        Some('u' | 'U') => self.unicode_escape()?,
                        Some(e) => {
                            self.bump();
                            match e {
                                't' => '\t',
                                'b' => '\u{8}',
                                'n' => '\n',
                                'r' => '\r',
                                'f' => '\u{c}',
                                '"' => '"',
                                '\'' => '\'',
                                '\\' => '\\',
                                other => return Err(format!("unknown escape '\\{other}'")),
                            }
                        }
                        None => return Err("unterminated literal".into()),
                    };
                    lexical.push(c);
                }
                Some(c) => lexical.push(c),
                None => return Err("unterminated literal".into()),
            }
        }
        let mut lit = Literal::plain(lexical);
        if self.peek() == Some('@') {
            self.bump();
            let start = self.pos;
            while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '-') {
                self.bump();
            }
            let tag = &self.src[start..self.pos];
            if tag.is_empty() || tag.starts_with('-') || tag.ends_with('-') {
                return Err(format!("invalid language tag '{tag}'"));
            }
            lit.lang = Some(tag.to_string());
        } else if self.rest().starts_with("^^") {
            self.pos += 2;
            let dt = self.iri().map_err(|e| format!("datatype: {e}"))?;
            lit.datatype = Some(dt.0);
        }
        Ok(lit)
    }

    // Called with the cursor just past a backslash (IRIs) or on the `u`/`U`
    // (literals); both forms are accepted.
    fn unicode_escape(&mut self) -> Step<char> {
        let width = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            Some(c) => return Err(format!("unknown escape '\\{c}'")),
            None => return Err("dangling escape".into()),
        };
        let rest = self.rest();
        let hex = rest
            .get(..width)
            .filter(|h| h.chars().all(|c| c.is_ascii_hexdigit()))
            .ok_or_else(|| "malformed unicode escape".to_string())?;
        self.pos += width;
        let code = u32::from_str_radix(hex, 16).map_err(|e| e.to_string())?;
        char::from_u32(code).ok_or_else(|| format!("invalid code point U+{code:X}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::vocab::RDFS_LABEL;

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    #[test]
    fn label_statement() {
        let triples = parse_ntriples("<e:A> <rdfs:label> \"Alice\" .").unwrap();
        assert_eq!(
            triples,
            vec![Triple::new(iri("e:A"), iri("rdfs:label"), Literal::plain("Alice"))]
        );
    }

    #[test]
    fn empty_document() {
        assert!(parse_ntriples("").unwrap().is_empty());
        assert!(parse_ntriples("\n# only a comment\n   \n").unwrap().is_empty());
    }

    #[test]
    fn missing_object_reports_line() {
        let err = parse_ntriples("<e:A> <rdfs:label>").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected error {other:?}"),
        }
        let err = parse_ntriples("<e:A> <e:p> <e:B> .\n\n<e:A> <e:p> \"x\"").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn order_preserved_and_escapes_decoded() {
        let doc = format!(
            "<e:B> <{RDFS_LABEL}> \"tab\\there \\\"q\\\" \\u00E9\"@en .\n\
             <e:A> <e:age> \"30\"^^<http://www.w3.org/2001/XMLSchema#integer> . # trailing\n"
        );
        let triples = parse_ntriples(&doc).unwrap();
        assert_eq!(triples.len(), 2);
        assert_eq!(triples[0].subject, iri("e:B"));
        assert_eq!(
            triples[0].object,
            Term::Literal(Literal::lang("tab\there \"q\" é", "en"))
        );
        match &triples[1].object {
            Term::Literal(l) => {
                assert_eq!(l.lexical, "30");
                assert_eq!(l.datatype.as_deref(), Some("http://www.w3.org/2001/XMLSchema#integer"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_bad_statements() {
        for bad in [
            "\"lit\" <e:p> <e:o> .",
            "_:b <e:p> <e:o> .",
            "<e:s> <e:p> <e:o>",
            "<e:s> <e:p> <e:o> . extra",
            "<e:s> <e:p> \"unterminated .",
            "<e:s> <bad iri> <e:o> .",
            "<e:s> <e:p> \"x\"@ .",
            "<e:s> <e:p> \"\\q\" .",
        ] {
            assert!(parse_ntriples(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn unicode_is_preserved() {
        let t =
            parse_ntriples("<http://dbpedia.org/resource/N\u{fa}ria_Espert> <e:p> \"N\u{fa}ria Espert\" .").unwrap();
        assert_eq!(t[0].subject.as_str(), "http://dbpedia.org/resource/Núria_Espert");
    }

    #[test]
    fn serialize_then_parse() {
        let doc = "<e:A> <e:p> \"a\\\\b\\nc\"@de .\n<e:A> <e:q> <e:B> .\n";
        let triples = parse_ntriples(doc).unwrap();
        assert_eq!(write_ntriples(&triples), doc);
    }
}
