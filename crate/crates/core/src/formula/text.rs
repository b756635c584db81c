//! Formula reader and printer.
//!
//! Text syntax: `p<k>`, `j<k>`, `false`, `true`, `~`, `&`, `|`, `->`,
//! `<label> phi`, `[label] phi`. `->` associates to the right and binds
//! weakest, then `|`, then `&`; prefix operators bind tightest.
//! The reader also accepts the LaTeX produced by [`render`] with
//! [`Format::Latex`], so both outputs round-trip.

use std::fmt::Write as _;

use thiserror::Error;

use super::Formula;
use crate::diagram::{is_identifier, Label};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Latex,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at offset {offset}: {message}")]
pub struct FormulaParseError {
    pub offset: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    Not,
    And,
    Or,
    Implies,
    Bot,
    Top,
    Var(usize),
    Nominal(usize),
    Diamond(Label),
    Box(Label),
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn err(&self, message: impl Into<String>) -> FormulaParseError {
        FormulaParseError { offset: self.pos, message: message.into() }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &'a str {
        let rest = self.rest();
        let len = rest.find(|c: char| !pred(c)).unwrap_or(rest.len());
        self.pos += len;
        &rest[..len]
    }

    fn index(&mut self) -> Result<usize, FormulaParseError> {
        // `12`, `_12` or `_{12}`
        let braced = self.eat("_{");
        if !braced {
            self.eat("_");
        }
        let digits = self.take_while(|c| c.is_ascii_digit());
        if digits.is_empty() {
            return Err(self.err("expected an index"));
        }
        let k = digits.parse().map_err(|_| self.err("index out of range"))?;
        if braced && !self.eat("}") {
            return Err(self.err("expected `}`"));
        }
        Ok(k)
    }

    fn label_until(&mut self, close: char) -> Result<Label, FormulaParseError> {
        let name = self.take_while(|c| c != close);
        if !self.eat(&close.to_string()) {
            return Err(self.err(format!("expected `{close}`")));
        }
        if !is_identifier(name) {
            return Err(self.err(format!("invalid label `{name}`")));
        }
        Ok(Label::new(name).expect("checked identifier"))
    }

    fn latex_label(&mut self) -> Result<Label, FormulaParseError> {
        if self.eat("_{") {
            self.label_until('}')
        } else if self.eat("_") {
            let name = self.take_while(|c| c.is_ascii_alphanumeric());
            Label::new(name).map_err(|_| self.err("invalid label"))
        } else {
            Err(self.err("expected a modality subscript"))
        }
    }

    fn tokens(mut self) -> Result<Vec<(usize, Tok)>, FormulaParseError> {
        let mut out = Vec::new();
        loop {
            self.take_while(char::is_whitespace);
            let start = self.pos;
            let Some(c) = self.rest().chars().next() else { break };
            let tok = match c {
                '(' => {
                    self.pos += 1;
                    Tok::LParen
                }
                ')' => {
                    self.pos += 1;
                    Tok::RParen
                }
                '~' => {
                    self.pos += 1;
                    Tok::Not
                }
                '&' => {
                    self.pos += 1;
                    Tok::And
                }
                '|' => {
                    self.pos += 1;
                    Tok::Or
                }
                '-' if self.eat("->") => Tok::Implies,
                '<' => {
                    self.pos += 1;
                    Tok::Diamond(self.label_until('>')?)
                }
                '[' => {
                    self.pos += 1;
                    Tok::Box(self.label_until(']')?)
                }
                '\\' => {
                    self.pos += 1;
                    let cmd = self.take_while(|c| c.is_ascii_alphabetic());
                    match cmd {
                        "neg" | "lnot" => Tok::Not,
                        "land" | "wedge" => Tok::And,
                        "lor" | "vee" => Tok::Or,
                        "to" | "rightarrow" => Tok::Implies,
                        "bot" => Tok::Bot,
                        "top" => Tok::Top,
                        "Diamond" => Tok::Diamond(self.latex_label()?),
                        "Box" => Tok::Box(self.latex_label()?),
                        other => return Err(self.err(format!("unknown command `\\{other}`"))),
                    }
                }
                'p' | 'j' if self.rest()[1..].starts_with(|d: char| d.is_ascii_digit() || d == '_') => {
                    self.pos += 1;
                    let k = self.index()?;
                    if c == 'p' {
                        Tok::Var(k)
                    } else {
                        Tok::Nominal(k)
                    }
                }
                _ => {
                    let word = self.take_while(|c| c.is_ascii_alphanumeric() || c == '_');
                    match word {
                        "false" => Tok::Bot,
                        "true" => Tok::Top,
                        "" => return Err(self.err(format!("unexpected character `{c}`"))),
                        w => {
                            self.pos = start;
                            return Err(self.err(format!("unexpected word `{w}`")));
                        }
                    }
                }
            };
            out.push((start, tok));
        }
        Ok(out)
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn err(&self, message: impl Into<String>) -> FormulaParseError {
        FormulaParseError { offset: self.offset(), message: message.into() }
    }

    fn implication(&mut self) -> Result<Formula, FormulaParseError> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Tok::Implies) {
            self.pos += 1;
            let rhs = self.implication()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, FormulaParseError> {
        let mut items = vec![self.conjunction()?];
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            items.push(self.conjunction()?);
        }
        Ok(if items.len() == 1 { items.pop().expect("one") } else { Formula::Or(items) })
    }

    fn conjunction(&mut self) -> Result<Formula, FormulaParseError> {
        let mut items = vec![self.unary()?];
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            items.push(self.unary()?);
        }
        Ok(if items.len() == 1 { items.pop().expect("one") } else { Formula::And(items) })
    }

    fn unary(&mut self) -> Result<Formula, FormulaParseError> {
        let tok = self.peek().cloned().ok_or_else(|| self.err("unexpected end of formula"))?;
        self.pos += 1;
        Ok(match tok {
            Tok::Not => Formula::not(self.unary()?),
            Tok::Diamond(l) => Formula::diamond(l, self.unary()?),
            Tok::Box(l) => Formula::boxed(l, self.unary()?),
            Tok::Bot => Formula::Bot,
            Tok::Top => Formula::top(),
            Tok::Var(k) => Formula::Var(k),
            Tok::Nominal(k) => Formula::Nominal(k),
            Tok::LParen => {
                let inner = self.implication()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                inner
            }
            _ => {
                self.pos -= 1;
                return Err(self.err("expected a formula"));
            }
        })
    }
}

/// Reads a formula in either the text or the LaTeX syntax.
pub fn parse_formula(src: &str) -> Result<Formula, FormulaParseError> {
    let toks = Lexer { src, pos: 0 }.tokens()?;
    let mut p = Parser { toks, pos: 0, end: src.len() };
    let f = p.implication()?;
    if p.pos != p.toks.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(f)
}

const PREC_IMPLIES: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_UNARY: u8 = 4;

fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Implies(..) => PREC_IMPLIES,
        Formula::Or(_) => PREC_OR,
        Formula::And(_) => PREC_AND,
        _ => PREC_UNARY,
    }
}

struct Symbols {
    bot: &'static str,
    not: &'static str,
    and: &'static str,
    or: &'static str,
    implies: &'static str,
}

const TEXT: Symbols = Symbols { bot: "false", not: "~", and: " & ", or: " | ", implies: " -> " };
const LATEX: Symbols =
    Symbols { bot: "\\bot", not: "\\neg ", and: " \\land ", or: " \\lor ", implies: " \\to " };

/// Deterministic pretty-printer.
pub fn render(f: &Formula, format: Format) -> String {
    let mut out = String::new();
    write_formula(&mut out, f, format);
    out
}

fn write_child(out: &mut String, f: &Formula, format: Format, paren: bool) {
    if paren {
        out.push('(');
        write_formula(out, f, format);
        out.push(')');
    } else {
        write_formula(out, f, format);
    }
}

fn write_formula(out: &mut String, f: &Formula, format: Format) {
    let sym = match format {
        Format::Text => &TEXT,
        Format::Latex => &LATEX,
    };
    match f {
        Formula::Bot => out.push_str(sym.bot),
        Formula::Var(k) => match format {
            Format::Text => write!(out, "p{k}").expect("string write"),
            Format::Latex => write!(out, "p_{{{k}}}").expect("string write"),
        },
        Formula::Nominal(k) => match format {
            Format::Text => write!(out, "j{k}").expect("string write"),
            Format::Latex => write!(out, "j_{{{k}}}").expect("string write"),
        },
        Formula::Not(a) => {
            out.push_str(sym.not);
            write_child(out, a, format, precedence(a) < PREC_UNARY);
        }
        Formula::Diamond(l, a) | Formula::Box(l, a) => {
            let is_box = matches!(f, Formula::Box(..));
            match (format, is_box) {
                (Format::Text, false) => write!(out, "<{l}> "),
                (Format::Text, true) => write!(out, "[{l}] "),
                (Format::Latex, false) => write!(out, "\\Diamond_{{{l}}} "),
                (Format::Latex, true) => write!(out, "\\Box_{{{l}}} "),
            }
            .expect("string write");
            write_child(out, a, format, precedence(a) < PREC_UNARY);
        }
        Formula::And(xs) | Formula::Or(xs) => {
            let (sep, prec) = if matches!(f, Formula::And(_)) {
                (sym.and, PREC_AND)
            } else {
                (sym.or, PREC_OR)
            };
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    out.push_str(sep);
                }
                write_child(out, x, format, precedence(x) <= prec);
            }
        }
        Formula::Implies(a, b) => {
            write_child(out, a, format, precedence(a) <= PREC_IMPLIES);
            out.push_str(sym.implies);
            write_child(out, b, format, precedence(b) < PREC_IMPLIES);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn a() -> Label {
        Label::new("a").unwrap()
    }

    #[test]
    fn renders_simple_implication() {
        let f = Formula::implies(Formula::var(1), Formula::diamond(a(), Formula::var(1)));
        assert_eq!(render(&f, Format::Text), "p1 -> <a> p1");
        assert_eq!(render(&f, Format::Latex), "p_{1} \\to \\Diamond_{a} p_{1}");
    }

    #[test]
    fn parses_precedence() {
        let f = parse_formula("p1 & p2 | p3 -> p4 -> p5").unwrap();
        let want = Formula::implies(
            Formula::Or(vec![Formula::And(vec![Formula::var(1), Formula::var(2)]), Formula::var(3)]),
            Formula::implies(Formula::var(4), Formula::var(5)),
        );
        assert_eq!(f, want);
        assert_eq!(parse_formula("~<a> [b] j3").unwrap(), Formula::not(Formula::diamond(a(), Formula::boxed(Label::new("b").unwrap(), Formula::nominal(3)))));
        assert_eq!(parse_formula("true").unwrap(), Formula::top());
        assert_eq!(parse_formula("\\Diamond_{a} \\top").unwrap(), Formula::diamond(a(), Formula::top()));
    }

    #[test]
    fn parse_errors() {
        for bad in ["", "p1 &", "(p1", "p1 p2", "<1a> p1", "q1", "\\foo", "p"] {
            assert!(parse_formula(bad).is_err(), "{bad:?} should not parse");
        }
    }

    #[test]
    fn nested_conjunctions_keep_structure() {
        let inner = Formula::And(vec![Formula::var(1), Formula::var(2)]);
        let f = Formula::And(vec![inner, Formula::var(3)]);
        assert_eq!(render(&f, Format::Text), "(p1 & p2) & p3");
        assert_eq!(parse_formula(&render(&f, Format::Text)).unwrap(), f);
    }

    fn arb_formula() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            Just(Formula::Bot),
            (0usize..5).prop_map(Formula::Var),
            (0usize..4).prop_map(Formula::Nominal),
        ];
        let label = prop_oneof![Just("a"), Just("b"), Just("R_1")].prop_map(|s| Label::new(s).unwrap());
        leaf.prop_recursive(5, 40, 4, move |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::And),
                prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::Or),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
                (label.clone(), inner.clone()).prop_map(|(l, a)| Formula::diamond(l, a)),
                (label.clone(), inner).prop_map(|(l, a)| Formula::boxed(l, a)),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]
        #[test]
        fn text_round_trip(f in arb_formula()) {
            prop_assert_eq!(parse_formula(&render(&f, Format::Text)).unwrap(), f);
        }

        #[test]
        fn latex_round_trip(f in arb_formula()) {
            prop_assert_eq!(parse_formula(&render(&f, Format::Latex)).unwrap(), f);
        }
    }
}
