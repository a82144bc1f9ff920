//! Line-oriented parser for the pathway (`.pw`) file format.
//!
//! ```text
//! # comment
//! R1: A + B -> C + D [E, F]     # id ':' reactants '->' products [catalysts]
//! A -> B                        # id optional; auto-assigned R<k> by position
//! init: A, E                    # zero or more init lines; union semantics
//! ```
//!
//! Species tokens are maximal runs of letters, digits and `_ - * ( ) '`.
//! `->` takes lexical priority over a trailing `-` in a name, so `A->B`
//! splits as `A`, `->`, `B`. Text after `#` is a comment.

use crate::pathway::{is_name_char, BuildError, Pathway, PathwayBuilder};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}, column {col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("expected {0}")]
    Expected(&'static str),
    #[error("unknown directive `{0}`")]
    UnknownDirective(String),
    #[error("{0}")]
    Build(#[from] BuildError),
}

struct LineScanner<'a> {
    chars: Vec<char>,
    line_no: usize,
    pos: usize,
    text: &'a str,
}

impl<'a> LineScanner<'a> {
    fn new(text: &'a str, line_no: usize) -> Self {
        LineScanner {
            chars: text.chars().collect(),
            line_no,
            pos: 0,
            text,
        }
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: self.line_no,
            col: self.pos + 1,
            kind,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn at_arrow(&self) -> bool {
        self.chars.get(self.pos) == Some(&'-') && self.chars.get(self.pos + 1) == Some(&'>')
    }

    fn eat_arrow(&mut self) -> Result<(), ParseError> {
        if self.at_arrow() {
            self.pos += 2;
            Ok(())
        } else {
            Err(self.err(ParseErrorKind::Expected("`->`")))
        }
    }

    fn eat(&mut self, c: char, what: &'static str) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(ParseErrorKind::Expected(what)))
        }
    }

    /// Maximal run of name characters, stopping before `->`.
    fn name(&mut self) -> Result<String, ParseError> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if !is_name_char(c) || self.at_arrow() {
                break;
            }
            self.pos += 1;
        }
        if self.pos == start {
            match self.peek() {
                Some(c) => Err(self.err(ParseErrorKind::UnexpectedChar(c))),
                None => Err(self.err(ParseErrorKind::Expected("species name"))),
            }
        } else {
            Ok(self.chars[start..self.pos].iter().collect())
        }
    }

    fn end(&mut self) -> Result<(), ParseError> {
        self.skip_ws();
        match self.peek() {
            None => Ok(()),
            Some(c) => Err(self.err(ParseErrorKind::UnexpectedChar(c))),
        }
    }

    /// `name (sep name)*` up to `stop_at` or end of line.
    fn name_list(&mut self, sep: char) -> Result<Vec<String>, ParseError> {
        let mut names = vec![self.name()?];
        loop {
            self.skip_ws();
            if self.peek() == Some(sep) {
                self.pos += 1;
                self.skip_ws();
                names.push(self.name()?);
            } else {
                return Ok(names);
            }
        }
    }

    fn contains_arrow(&self) -> bool {
        self.text.contains("->")
    }
}

/// Parse pathway-file content. Reactant/product order is preserved exactly.
pub fn parse_pathway(text: &str) -> Result<Pathway, ParseError> {
    let mut builder = PathwayBuilder::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = match raw_line.find('#') {
            Some(i) => &raw_line[..i],
            None => raw_line,
        };
        if content.trim().is_empty() {
            continue;
        }
        let mut sc = LineScanner::new(content, line_no);
        sc.skip_ws();
        if sc.contains_arrow() {
            parse_reaction_line(&mut sc, &mut builder)?;
        } else {
            parse_directive_line(&mut sc, &mut builder)?;
        }
    }
    Ok(builder.build())
}

fn parse_reaction_line(
    sc: &mut LineScanner<'_>,
    builder: &mut PathwayBuilder,
) -> Result<(), ParseError> {
    // An id is a leading token followed by ':' before the '->'.
    let save = sc.pos;
    let first = sc.name()?;
    sc.skip_ws();
    let id = if sc.peek() == Some(':') {
        sc.pos += 1;
        sc.skip_ws();
        Some(first)
    } else {
        sc.pos = save;
        None
    };
    let reactants = sc.name_list('+')?;
    sc.skip_ws();
    sc.eat_arrow()?;
    sc.skip_ws();
    let products = sc.name_list('+')?;
    sc.skip_ws();
    let mut catalysts = Vec::new();
    if sc.peek() == Some('[') {
        sc.pos += 1;
        sc.skip_ws();
        if sc.peek() != Some(']') {
            catalysts = sc.name_list(',')?;
            sc.skip_ws();
        }
        sc.eat(']', "`]`")?;
    }
    sc.end()?;
    fn as_refs(v: &[String]) -> Vec<&str> {
        v.iter().map(String::as_str).collect()
    }
    builder
        .add_reaction(
            id.as_deref(),
            &as_refs(&reactants),
            &as_refs(&products),
            &as_refs(&catalysts),
        )
        .map_err(|e| sc.err(e.into()))
}

fn parse_directive_line(
    sc: &mut LineScanner<'_>,
    builder: &mut PathwayBuilder,
) -> Result<(), ParseError> {
    let start = sc.pos;
    let word = sc.name()?;
    sc.skip_ws();
    if sc.peek() != Some(':') {
        sc.pos = start;
        return Err(sc.err(ParseErrorKind::Expected("`->` or a directive")));
    }
    sc.pos += 1;
    if word != "init" {
        sc.pos = start;
        return Err(sc.err(ParseErrorKind::UnknownDirective(word)));
    }
    sc.skip_ws();
    let names = sc.name_list(',')?;
    sc.end()?;
    for name in &names {
        builder.add_init(name).map_err(|e| sc.err(e.into()))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pathway::validate_normal_form;

    #[test]
    fn single_catalysed_reaction() {
        let p = parse_pathway("R1: A -> B [D]\n").unwrap();
        let r = &p.reactions()[0];
        assert_eq!(r.id, "R1");
        assert_eq!(p.name(r.reactants[0]), "A");
        assert_eq!(p.name(r.products[0]), "B");
        assert_eq!(p.name(r.catalysts[0]), "D");
    }

    #[test]
    fn kinase_step_with_starred_catalyst() {
        let p = parse_pathway("Rm: MEK -> MEK-P [Raf*]\n").unwrap();
        let r = &p.reactions()[0];
        assert_eq!(p.name(r.reactants[0]), "MEK");
        assert_eq!(p.name(r.products[0]), "MEK-P");
        assert_eq!(p.name(r.catalysts[0]), "Raf*");
    }

    #[test]
    fn duplicate_reactant_is_an_error() {
        let err = parse_pathway("R: A + A -> B + C\n").unwrap_err();
        assert!(matches!(
            err.kind,
            ParseErrorKind::Build(BuildError::DuplicateInRole { .. })
        ));
        assert_eq!(err.line, 1);
    }

    #[test]
    fn init_lines_union() {
        let p = parse_pathway("A -> B\ninit: A\ninit: X, A\n").unwrap();
        let present: Vec<&str> = p.initial().present().iter().map(|&s| p.name(s)).collect();
        assert_eq!(present, vec!["A", "X"]);
        assert_eq!(p.unused_species(), vec![p.species_by_name("X").unwrap()]);
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let p = parse_pathway("# header\n\nR1: A -> B [D]  # trailing\n").unwrap();
        assert_eq!(p.reactions().len(), 1);
    }

    #[test]
    fn arrow_splits_names_without_spaces() {
        let p = parse_pathway("A->B\n").unwrap();
        let r = &p.reactions()[0];
        assert_eq!(p.name(r.reactants[0]), "A");
        assert_eq!(p.name(r.products[0]), "B");
        assert_eq!(r.id, "R1");
    }

    #[test]
    fn order_of_reactants_is_preserved() {
        let p = parse_pathway("R: Z + A -> Q + B\n").unwrap();
        let r = &p.reactions()[0];
        let names: Vec<&str> = r.reactants.iter().map(|&s| p.name(s)).collect();
        assert_eq!(names, vec!["Z", "A"]);
    }

    #[test]
    fn unknown_directive_reported() {
        let err = parse_pathway("rate: 0.5\n").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownDirective("rate".into()));
    }

    #[test]
    fn duplicate_id_reported_with_position() {
        let err = parse_pathway("R1: A -> B\nR1: B -> A\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(matches!(
            err.kind,
            ParseErrorKind::Build(BuildError::DuplicateReactionId(_))
        ));
    }

    #[test]
    fn lexical_error_has_position() {
        let err = parse_pathway("R1: A -> B | C\n").unwrap_err();
        assert_eq!((err.line, err.col), (1, 12));
        assert_eq!(err.kind, ParseErrorKind::UnexpectedChar('|'));
    }

    #[test]
    fn empty_catalyst_brackets_mean_no_catalysts() {
        let p = parse_pathway("R1: A -> B []\n").unwrap();
        assert!(p.reactions()[0].catalysts.is_empty());
    }

    #[test]
    fn parenthesised_species_names() {
        let p = parse_pathway("v7: (EGF-EGFR*)2 -> (EGF-EGFR*)2-GAP [GAP]\n").unwrap();
        assert!(p.species_by_name("(EGF-EGFR*)2").is_some());
        assert!(p.species_by_name("(EGF-EGFR*)2-GAP").is_some());
    }

    #[test]
    fn roundtrip_print_parse_isomorphic() {
        let text = "R1: A -> B [D]\nR2: B -> A [D]\nR3: A + D -> C + E\ninit: A, D\n";
        let p = parse_pathway(text).unwrap();
        let printed = p.to_pw_string();
        let q = parse_pathway(&printed).unwrap();
        assert_eq!(p.reactions().len(), q.reactions().len());
        for (a, b) in p.reactions().iter().zip(q.reactions()) {
            assert_eq!(a.id, b.id);
            let names = |pw: &Pathway, ids: &[crate::SpeciesId]| {
                ids.iter()
                    .map(|&s| pw.name(s).to_string())
                    .collect::<Vec<_>>()
            };
            assert_eq!(names(&p, &a.reactants), names(&q, &b.reactants));
            assert_eq!(names(&p, &a.products), names(&q, &b.products));
            assert_eq!(names(&p, &a.catalysts), names(&q, &b.catalysts));
        }
        let pres = |pw: &Pathway| {
            pw.initial()
                .present()
                .iter()
                .map(|&s| pw.name(s).to_string())
                .collect::<Vec<_>>()
        };
        assert_eq!(pres(&p), pres(&q));
    }

    #[test]
    fn normal_form_validation_is_pure_reporting() {
        let p = parse_pathway("R1: A + B -> C\n").unwrap();
        let v = validate_normal_form(&p);
        assert_eq!(v.len(), 1);
        assert_eq!((v[0].reactant_count, v[0].product_count), (2, 1));
        // calling again gives the same answer
        assert_eq!(validate_normal_form(&p), v);
    }
}
