//! `ACTL-` formulas: universal CTL without `AX`, negation on literals only.
//!
//! Grammar (precedence low→high): `->` < `|` < `&` < prefix `!` < atoms.
//! Atoms: `true`, `false`, species literals, `A[ f U g ]`, `A[ f W g ]`
//! (weak until), `AF f`, `AG f`, and parenthesised formulas. `AF f` and
//! `AG f` desugar to `A[true U f]` and `A[f W false]` at parse time;
//! `p -> f` (propositional `p`) and `!` on parenthesised propositional
//! groups desugar by De Morgan, so the AST only ever carries negation on
//! literals. Negating a temporal formula is rejected.
//!
//! Species names may themselves contain parentheses (`(EGF-EGFR*)2-GAP`),
//! so the lexer resolves name-shaped runs against the pathway's species
//! table: a maximal run that is a known name (or has a known name as a
//! prefix) is a literal; otherwise a leading `(`/`)` is structural. The
//! words `A AF AG U W true false` are reserved and shadow species with
//! those exact names.

use crate::pathway::{is_name_char, Pathway, SpeciesId};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    True,
    False,
    Lit {
        species: SpeciesId,
        negated: bool,
    },
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    /// `A[f U g]`
    Until(Box<Formula>, Box<Formula>),
    /// `A[f W g]`
    WeakUntil(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn lit(species: SpeciesId) -> Formula {
        Formula::Lit {
            species,
            negated: false,
        }
    }

    pub fn not_lit(species: SpeciesId) -> Formula {
        Formula::Lit {
            species,
            negated: true,
        }
    }

    pub fn af(f: Formula) -> Formula {
        Formula::Until(Box::new(Formula::True), Box::new(f))
    }

    pub fn ag(f: Formula) -> Formula {
        Formula::WeakUntil(Box::new(f), Box::new(Formula::False))
    }

    pub fn is_propositional(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Lit { .. } => true,
            Formula::And(a, b) | Formula::Or(a, b) => a.is_propositional() && b.is_propositional(),
            Formula::Until(..) | Formula::WeakUntil(..) => false,
        }
    }

    /// Species mentioned anywhere in the formula.
    pub fn species(&self) -> Vec<SpeciesId> {
        let mut out = Vec::new();
        self.collect_species(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_species(&self, out: &mut Vec<SpeciesId>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Lit { species, .. } => out.push(*species),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Until(a, b)
            | Formula::WeakUntil(a, b) => {
                a.collect_species(out);
                b.collect_species(out);
            }
        }
    }

    /// De Morgan negation of a propositional formula.
    fn negate_propositional(&self) -> Formula {
        match self {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Lit { species, negated } => Formula::Lit {
                species: *species,
                negated: !negated,
            },
            Formula::And(a, b) => Formula::Or(
                Box::new(a.negate_propositional()),
                Box::new(b.negate_propositional()),
            ),
            Formula::Or(a, b) => Formula::And(
                Box::new(a.negate_propositional()),
                Box::new(b.negate_propositional()),
            ),
            Formula::Until(..) | Formula::WeakUntil(..) => {
                unreachable!("negation is restricted to propositional formulas")
            }
        }
    }

    /// Canonical rendering with species names from the pathway.
    pub fn display(&self, p: &Pathway) -> String {
        match self {
            Formula::True => "true".into(),
            Formula::False => "false".into(),
            Formula::Lit { species, negated } => {
                if *negated {
                    format!("!{}", p.name(*species))
                } else {
                    p.name(*species).to_string()
                }
            }
            Formula::And(a, b) => format!("({} & {})", a.display(p), b.display(p)),
            Formula::Or(a, b) => format!("({} | {})", a.display(p), b.display(p)),
            Formula::Until(a, b) => format!("A[{} U {}]", a.display(p), b.display(p)),
            Formula::WeakUntil(a, b) => format!("A[{} W {}]", a.display(p), b.display(p)),
        }
    }
}

/// Formula flattened to an indexed DAG with literal bits resolved against a
/// system; node `i`'s children have indices `< i` (post-order).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Node {
    True,
    False,
    Lit { bit: usize, negated: bool },
    And(usize, usize),
    Or(usize, usize),
    Until(usize, usize),
    WeakUntil(usize, usize),
}

/// Resolve literals to bit positions of `system`. Fails with the offending
/// species when the formula mentions one outside the system's scope.
pub(crate) fn flatten(
    f: &Formula,
    system: &crate::semantics::System,
) -> Result<Vec<Node>, SpeciesId> {
    fn go(
        f: &Formula,
        system: &crate::semantics::System,
        out: &mut Vec<Node>,
    ) -> Result<usize, SpeciesId> {
        let node = match f {
            Formula::True => Node::True,
            Formula::False => Node::False,
            Formula::Lit { species, negated } => Node::Lit {
                bit: system.bit_of(*species).ok_or(*species)?,
                negated: *negated,
            },
            Formula::And(a, b) => Node::And(go(a, system, out)?, go(b, system, out)?),
            Formula::Or(a, b) => Node::Or(go(a, system, out)?, go(b, system, out)?),
            Formula::Until(a, b) => Node::Until(go(a, system, out)?, go(b, system, out)?),
            Formula::WeakUntil(a, b) => Node::WeakUntil(go(a, system, out)?, go(b, system, out)?),
        };
        out.push(node);
        Ok(out.len() - 1)
    }
    let mut out = Vec::new();
    go(f, system, &mut out)?;
    Ok(out)
}

/// Display strings for each node of [`flatten`]'s output, same order.
pub(crate) fn subformula_displays(f: &Formula, p: &Pathway) -> Vec<String> {
    fn go(f: &Formula, p: &Pathway, out: &mut Vec<String>) {
        match f {
            Formula::True | Formula::False | Formula::Lit { .. } => {}
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Until(a, b)
            | Formula::WeakUntil(a, b) => {
                go(a, p, out);
                go(b, p, out);
            }
        }
        out.push(f.display(p));
    }
    let mut out = Vec::new();
    go(f, p, &mut out);
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}, column {col}: {kind}")]
pub struct FormulaError {
    pub line: usize,
    pub col: usize,
    pub kind: FormulaErrorKind,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormulaErrorKind {
    #[error("unknown species `{0}`")]
    UnknownSpecies(String),
    #[error("negation is allowed on literals only")]
    NegationOfTemporal,
    #[error("left operand of `->` must be propositional")]
    TemporalImplicationLhs,
    #[error("expected {0}")]
    Expected(&'static str),
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("unexpected end of formula")]
    UnexpectedEnd,
    #[error("trailing input after formula")]
    TrailingInput,
    #[error("missing `:` between property name and formula")]
    MissingColon,
    #[error("duplicate property name `{0}`")]
    DuplicateProperty(String),
}

/// Words with structural meaning. `A`, `U`, `W` are resolved by parse
/// context (so species with those names stay usable); the others shadow
/// same-named species.
const FORMULA_WORDS: [&str; 7] = ["A", "AF", "AG", "U", "W", "true", "false"];

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word {
        text: String,
        species: Option<SpeciesId>,
    },
    Arrow,
    Or,
    And,
    Not,
    LParen,
    RParen,
    LBracket,
    RBracket,
}

struct Lexer<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    pathway: &'a Pathway,
}

impl<'a> Lexer<'a> {
    fn err(&self, col: usize, kind: FormulaErrorKind) -> FormulaError {
        FormulaError {
            line: self.line,
            col: col + 1,
            kind,
        }
    }

    fn run_at(&self, start: usize) -> String {
        let mut end = start;
        while end < self.chars.len() && is_name_char(self.chars[end]) {
            if self.chars[end] == '-' && self.chars.get(end + 1) == Some(&'>') {
                break;
            }
            end += 1;
        }
        self.chars[start..end].iter().collect()
    }

    fn tokens(&mut self) -> Result<Vec<(usize, Tok)>, FormulaError> {
        let mut out = Vec::new();
        while self.pos < self.chars.len() {
            let c = self.chars[self.pos];
            if c.is_whitespace() {
                self.pos += 1;
                continue;
            }
            let start = self.pos;
            let run = self.run_at(start);
            if run.is_empty() {
                let tok = match c {
                    '-' if self.chars.get(start + 1) == Some(&'>') => {
                        self.pos += 2;
                        out.push((start, Tok::Arrow));
                        continue;
                    }
                    '|' => Tok::Or,
                    '&' => Tok::And,
                    '!' => Tok::Not,
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    other => return Err(self.err(start, FormulaErrorKind::UnexpectedChar(other))),
                };
                self.pos += 1;
                out.push((start, tok));
                continue;
            }
            let word = |text: String, lexer: &Lexer<'_>| Tok::Word {
                species: lexer.pathway.species_by_name(&text),
                text,
            };
            if FORMULA_WORDS.contains(&run.as_str()) || self.pathway.species_by_name(&run).is_some()
            {
                self.pos += run.chars().count();
                let tok = word(run, self);
                out.push((start, tok));
                continue;
            }
            // longest formula word or known species that is a prefix of the
            // run; only parentheses may glue to a word, so the split point
            // must sit at one
            let run_chars: Vec<char> = run.chars().collect();
            let prefix = (1..run_chars.len())
                .rev()
                .filter(|&k| matches!(run_chars[k], '(' | ')'))
                .map(|k| run_chars[..k].iter().collect::<String>())
                .find(|pfx| {
                    FORMULA_WORDS.contains(&pfx.as_str())
                        || self.pathway.species_by_name(pfx).is_some()
                });
            if let Some(pfx) = prefix {
                self.pos += pfx.chars().count();
                let tok = word(pfx, self);
                out.push((start, tok));
                continue;
            }
            match c {
                '(' => {
                    self.pos += 1;
                    out.push((start, Tok::LParen));
                }
                ')' => {
                    self.pos += 1;
                    out.push((start, Tok::RParen));
                }
                _ => return Err(self.err(start, FormulaErrorKind::UnknownSpecies(run))),
            }
        }
        Ok(out)
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    line: usize,
    end_col: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn col(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(c, _)| *c)
            .unwrap_or(self.end_col)
    }

    fn err(&self, kind: FormulaErrorKind) -> FormulaError {
        FormulaError {
            line: self.line,
            col: self.col() + 1,
            kind,
        }
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &'static str) -> Result<(), FormulaError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(FormulaErrorKind::Expected(what)))
        }
    }

    fn formula(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Tok::Arrow) {
            let arrow_col = self.col();
            self.pos += 1;
            if !lhs.is_propositional() {
                return Err(FormulaError {
                    line: self.line,
                    col: arrow_col + 1,
                    kind: FormulaErrorKind::TemporalImplicationLhs,
                });
            }
            let rhs = self.formula()?;
            return Ok(Formula::Or(
                Box::new(lhs.negate_propositional()),
                Box::new(rhs),
            ));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, FormulaError> {
        let mut f = self.conjunction()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            let rhs = self.conjunction()?;
            f = Formula::Or(Box::new(f), Box::new(rhs));
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula, FormulaError> {
        let mut f = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            let rhs = self.unary()?;
            f = Formula::And(Box::new(f), Box::new(rhs));
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        if self.peek() == Some(&Tok::Not) {
            self.pos += 1;
            let operand_col = self.col();
            return match self.peek() {
                Some(Tok::Word { text, species }) => {
                    let f = match (text.as_str(), species) {
                        ("true", _) => Formula::False,
                        ("false", _) => Formula::True,
                        (_, Some(id)) => Formula::not_lit(*id),
                        (other, None) => {
                            return Err(
                                self.err(FormulaErrorKind::UnknownSpecies(other.to_string()))
                            )
                        }
                    };
                    self.pos += 1;
                    Ok(f)
                }
                // a parenthesised group may be negated if it stays
                // propositional; De Morgan keeps the AST negation-normal
                Some(Tok::LParen) => {
                    let f = self.atom()?;
                    if f.is_propositional() {
                        Ok(f.negate_propositional())
                    } else {
                        Err(FormulaError {
                            line: self.line,
                            col: operand_col + 1,
                            kind: FormulaErrorKind::NegationOfTemporal,
                        })
                    }
                }
                _ => Err(self.err(FormulaErrorKind::NegationOfTemporal)),
            };
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula, FormulaError> {
        let col = self.col();
        match self.next() {
            Some(Tok::Word { text, species }) => match text.as_str() {
                "true" => Ok(Formula::True),
                "false" => Ok(Formula::False),
                "AF" => Ok(Formula::af(self.unary()?)),
                "AG" => Ok(Formula::ag(self.unary()?)),
                // `A` is the path quantifier only in front of `[`
                "A" if self.peek() == Some(&Tok::LBracket) => {
                    self.pos += 1;
                    let f = self.formula()?;
                    let weak = match self.next() {
                        Some(Tok::Word { text, .. }) if text == "U" => false,
                        Some(Tok::Word { text, .. }) if text == "W" => true,
                        _ => {
                            self.pos = self.pos.saturating_sub(1);
                            return Err(self.err(FormulaErrorKind::Expected("`U` or `W`")));
                        }
                    };
                    let g = self.formula()?;
                    self.expect(Tok::RBracket, "`]`")?;
                    if weak {
                        Ok(Formula::WeakUntil(Box::new(f), Box::new(g)))
                    } else {
                        Ok(Formula::Until(Box::new(f), Box::new(g)))
                    }
                }
                _ => match species {
                    Some(id) => Ok(Formula::lit(id)),
                    None => Err(FormulaError {
                        line: self.line,
                        col: col + 1,
                        kind: FormulaErrorKind::UnknownSpecies(text),
                    }),
                },
            },
            Some(Tok::LParen) => {
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(_) => {
                self.pos -= 1;
                Err(self.err(FormulaErrorKind::Expected("a formula")))
            }
            None => Err(self.err(FormulaErrorKind::UnexpectedEnd)),
        }
    }
}

fn parse_with_line(text: &str, p: &Pathway, line: usize) -> Result<Formula, FormulaError> {
    let mut lexer = Lexer {
        chars: text.chars().collect(),
        pos: 0,
        line,
        pathway: p,
    };
    let end_col = lexer.chars.len();
    let toks = lexer.tokens()?;
    let mut parser = Parser {
        toks,
        pos: 0,
        line,
        end_col,
    };
    let f = parser.formula()?;
    if parser.peek().is_some() {
        return Err(parser.err(FormulaErrorKind::TrailingInput));
    }
    Ok(f)
}

/// Parse one formula against a pathway's species table.
pub fn parse_formula(text: &str, p: &Pathway) -> Result<Formula, FormulaError> {
    parse_with_line(text, p, 1)
}

/// One `name: formula` line of a property file.
#[derive(Debug, Clone)]
pub struct NamedProperty {
    pub name: String,
    pub formula: Formula,
    pub line: usize,
}

/// Parse a property file: one named property per line, `#` comments and
/// blank lines ignored.
pub fn parse_property_file(text: &str, p: &Pathway) -> Result<Vec<NamedProperty>, FormulaError> {
    let mut out: Vec<NamedProperty> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        if content.trim().is_empty() {
            continue;
        }
        let Some((name, rest)) = content.split_once(':') else {
            return Err(FormulaError {
                line: line_no,
                col: 1,
                kind: FormulaErrorKind::MissingColon,
            });
        };
        let name = name.trim().to_string();
        if name.is_empty() || name.contains(char::is_whitespace) {
            return Err(FormulaError {
                line: line_no,
                col: 1,
                kind: FormulaErrorKind::Expected("property name before `:`"),
            });
        }
        if out.iter().any(|prop| prop.name == name) {
            return Err(FormulaError {
                line: line_no,
                col: 1,
                kind: FormulaErrorKind::DuplicateProperty(name),
            });
        }
        let formula = parse_with_line(rest, p, line_no)?;
        out.push(NamedProperty {
            name,
            formula,
            line: line_no,
        });
    }
    Ok(out)
}
