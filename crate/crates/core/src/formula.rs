//! Formulas of the conditional language: AST, parser, printer and desugaring.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{ModelError, ParseError};

const RESERVED: [&str; 5] = ["box", "dia", "top", "bot", "indep"];

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String),
    Not(Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Box(Box<Formula>),
    /// `(consequent | antecedent)`.
    Cond(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Dia(Box<Formula>),
    Top,
    Bot,
    /// `indep(psi, phi)`: psi is logically independent of phi.
    Indep(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(name.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn boxed(f: Formula) -> Formula {
        Formula::Box(Box::new(f))
    }

    pub fn cond(consequent: Formula, antecedent: Formula) -> Formula {
        Formula::Cond(Box::new(consequent), Box::new(antecedent))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn dia(f: Formula) -> Formula {
        Formula::Dia(Box::new(f))
    }

    pub fn indep(psi: Formula, phi: Formula) -> Formula {
        Formula::Indep(Box::new(psi), Box::new(phi))
    }

    /// Atom names in order of first appearance.
    pub fn atoms(&self) -> Vec<String> {
        let mut seen = Vec::new();
        self.collect_atoms(&mut seen);
        seen
    }

    fn collect_atoms(&self, out: &mut Vec<String>) {
        match self {
            Formula::Atom(n) => {
                if !out.contains(n) {
                    out.push(n.clone());
                }
            }
            Formula::Top | Formula::Bot => {}
            Formula::Not(a) | Formula::Box(a) | Formula::Dia(a) => a.collect_atoms(out),
            Formula::Implies(a, b)
            | Formula::Cond(a, b)
            | Formula::Or(a, b)
            | Formula::And(a, b)
            | Formula::Iff(a, b)
            | Formula::Indep(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// True when neither `box`, `dia` nor `indep` occurs.
    pub fn is_modal_free(&self) -> bool {
        match self {
            Formula::Box(_) | Formula::Dia(_) | Formula::Indep(..) => false,
            Formula::Atom(_) | Formula::Top | Formula::Bot => true,
            Formula::Not(a) => a.is_modal_free(),
            Formula::Implies(a, b)
            | Formula::Cond(a, b)
            | Formula::Or(a, b)
            | Formula::And(a, b)
            | Formula::Iff(a, b) => a.is_modal_free() && b.is_modal_free(),
        }
    }

    /// Nesting depth of the conditional operator.
    pub fn cond_depth(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Top | Formula::Bot => 0,
            Formula::Not(a) | Formula::Box(a) | Formula::Dia(a) => a.cond_depth(),
            Formula::Cond(a, b) | Formula::Indep(a, b) => 1 + a.cond_depth().max(b.cond_depth()),
            Formula::Implies(a, b) | Formula::Or(a, b) | Formula::And(a, b) | Formula::Iff(a, b) => {
                a.cond_depth().max(b.cond_depth())
            }
        }
    }

    pub fn is_core(&self) -> bool {
        match self {
            Formula::Atom(_) => true,
            Formula::Not(a) | Formula::Box(a) => a.is_core(),
            Formula::Implies(a, b) | Formula::Cond(a, b) => a.is_core() && b.is_core(),
            _ => false,
        }
    }
}

/// Ordered, duplicate-free atom names. The first atom anchors `top` and `bot`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AtomContext {
    names: Vec<String>,
}

impl AtomContext {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self, ModelError> {
        if names.is_empty() {
            return Err(ModelError::EmptyContext);
        }
        let mut out: Vec<String> = Vec::with_capacity(names.len());
        for n in names {
            let n = n.as_ref();
            if !is_identifier(n) || RESERVED.contains(&n) {
                return Err(ModelError::UnknownAtom(n.to_string()));
            }
            if out.iter().any(|m| m == n) {
                return Err(ModelError::Duplicate(n.to_string()));
            }
            out.push(n.to_string());
        }
        Ok(AtomContext { names: out })
    }

    /// `p, q, r, s, t, u, v, w`, then `a0, a1, ...` past eight atoms.
    pub fn standard(count: usize) -> Result<Self, ModelError> {
        const LETTERS: [&str; 8] = ["p", "q", "r", "s", "t", "u", "v", "w"];
        let names: Vec<String> = if count <= LETTERS.len() {
            LETTERS[..count].iter().map(|s| s.to_string()).collect()
        } else {
            (0..count).map(|i| format!("a{i}")).collect()
        };
        AtomContext::new(&names)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn first(&self) -> &str {
        &self.names[0]
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => chars.all(|c| c.is_ascii_alphanumeric() || c == '_'),
        _ => false,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Tilde,
    Arrow,
    DoubleArrow,
    OrOp,
    AndOp,
    LParen,
    RParen,
    Bar,
    Comma,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let rest = &text[i..];
        let (tok, width) = if rest.starts_with("<->") {
            (Tok::DoubleArrow, 3)
        } else if rest.starts_with("->") {
            (Tok::Arrow, 2)
        } else if rest.starts_with("\\/") {
            (Tok::OrOp, 2)
        } else if rest.starts_with("/\\") {
            (Tok::AndOp, 2)
        } else {
            match c {
                b'~' => (Tok::Tilde, 1),
                b'(' => (Tok::LParen, 1),
                b')' => (Tok::RParen, 1),
                b'|' => (Tok::Bar, 1),
                b',' => (Tok::Comma, 1),
                c if c.is_ascii_lowercase() => {
                    let len = rest
                        .bytes()
                        .take_while(|b| b.is_ascii_alphanumeric() || *b == b'_')
                        .count();
                    (Tok::Ident(rest[..len].to_string()), len)
                }
                _ => {
                    let ch = rest.chars().next().unwrap_or('?');
                    return Err(ParseError::new(i, format!("unexpected character `{ch}`")));
                }
            }
        };
        out.push((tok, i));
        i += width;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(_, o)| *o).unwrap_or(self.end)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else if self.peek() == Some(&Tok::Bar) {
            Err(ParseError::new(self.offset(), "conditional requires parentheses"))
        } else {
            Err(ParseError::new(self.offset(), format!("expected {what}")))
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.imp()?;
        while self.eat(&Tok::DoubleArrow) {
            let right = self.imp()?;
            left = Formula::iff(left, right);
        }
        Ok(left)
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let left = self.or()?;
        if self.eat(&Tok::Arrow) {
            let right = self.imp()?;
            return Ok(Formula::implies(left, right));
        }
        Ok(left)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.and()?;
        while self.eat(&Tok::OrOp) {
            let right = self.and()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.unary()?;
        while self.eat(&Tok::AndOp) {
            let right = self.unary()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if self.eat(&Tok::Tilde) {
            return Ok(Formula::not(self.unary()?));
        }
        match self.peek() {
            Some(Tok::Ident(n)) if n == "box" => {
                self.pos += 1;
                Ok(Formula::boxed(self.unary()?))
            }
            Some(Tok::Ident(n)) if n == "dia" => {
                self.pos += 1;
                Ok(Formula::dia(self.unary()?))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "top" => Ok(Formula::Top),
                    "bot" => Ok(Formula::Bot),
                    "indep" => {
                        self.expect(&Tok::LParen, "`(` after indep")?;
                        let psi = self.formula()?;
                        self.expect(&Tok::Comma, "`,`")?;
                        let phi = self.formula()?;
                        self.expect(&Tok::RParen, "`)`")?;
                        Ok(Formula::indep(psi, phi))
                    }
                    "box" | "dia" => Err(ParseError::new(at, format!("reserved word `{name}` used as atom"))),
                    _ => Ok(Formula::Atom(name)),
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let first = self.formula()?;
                if self.eat(&Tok::Bar) {
                    let second = self.formula()?;
                    self.expect(&Tok::RParen, "`)`")?;
                    Ok(Formula::cond(first, second))
                } else {
                    self.expect(&Tok::RParen, "`)` or `|`")?;
                    Ok(first)
                }
            }
            Some(Tok::Bar) => Err(ParseError::new(at, "conditional requires parentheses")),
            Some(_) => Err(ParseError::new(at, "expected a formula")),
            None => Err(ParseError::new(at, "unexpected end of input")),
        }
    }
}

/// Parses without checking atom names against a context.
pub fn parse_unchecked(text: &str) -> Result<Formula, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0, end: text.len() };
    let f = p.formula()?;
    if p.pos < p.toks.len() {
        let at = p.offset();
        return Err(if p.peek() == Some(&Tok::Bar) {
            ParseError::new(at, "conditional requires parentheses")
        } else {
            ParseError::new(at, "unexpected trailing input")
        });
    }
    Ok(f)
}

pub fn parse(text: &str, ctx: &AtomContext) -> Result<Formula, ParseError> {
    let f = parse_unchecked(text)?;
    if let Some(bad) = f.atoms().into_iter().find(|a| ctx.index_of(a).is_none()) {
        let at = find_word(text, &bad).unwrap_or(0);
        return Err(ParseError::new(at, format!("unknown atom `{bad}`")));
    }
    Ok(f)
}

fn find_word(text: &str, word: &str) -> Option<usize> {
    let bytes = text.as_bytes();
    let mut from = 0;
    while let Some(rel) = text[from..].find(word) {
        let at = from + rel;
        let before_ok = at == 0 || !(bytes[at - 1].is_ascii_alphanumeric() || bytes[at - 1] == b'_');
        let after = at + word.len();
        let after_ok = after >= bytes.len() || !(bytes[after].is_ascii_alphanumeric() || bytes[after] == b'_');
        if before_ok && after_ok {
            return Some(at);
        }
        from = at + 1;
    }
    None
}

/// Rewrites every sugar node into Atom/Not/Implies/Box/Cond.
pub fn desugar(f: &Formula, ctx: &AtomContext) -> Formula {
    let top = || {
        let a = Formula::atom(ctx.first());
        Formula::implies(a.clone(), a)
    };
    let or = |a: Formula, b: Formula| Formula::implies(Formula::not(a), b);
    let and = |a: Formula, b: Formula| Formula::not(or(Formula::not(a), Formula::not(b)));
    let iff = |a: Formula, b: Formula| {
        and(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
    };
    match f {
        Formula::Atom(_) => f.clone(),
        Formula::Not(a) => Formula::not(desugar(a, ctx)),
        Formula::Implies(a, b) => Formula::implies(desugar(a, ctx), desugar(b, ctx)),
        Formula::Box(a) => Formula::boxed(desugar(a, ctx)),
        Formula::Cond(a, b) => Formula::cond(desugar(a, ctx), desugar(b, ctx)),
        Formula::Or(a, b) => or(desugar(a, ctx), desugar(b, ctx)),
        Formula::And(a, b) => and(desugar(a, ctx), desugar(b, ctx)),
        Formula::Iff(a, b) => iff(desugar(a, ctx), desugar(b, ctx)),
        Formula::Dia(a) => Formula::not(Formula::boxed(Formula::not(desugar(a, ctx)))),
        Formula::Top => top(),
        Formula::Bot => Formula::not(top()),
        Formula::Indep(psi, phi) => {
            let psi = desugar(psi, ctx);
            let phi = desugar(phi, ctx);
            Formula::boxed(iff(Formula::cond(psi.clone(), phi), psi))
        }
    }
}

// Binding strength, loosest first.
const P_IFF: u8 = 1;
const P_IMP: u8 = 2;
const P_OR: u8 = 3;
const P_AND: u8 = 4;
const P_UNARY: u8 = 5;

pub fn render(f: &Formula) -> String {
    let mut s = String::new();
    write_formula(f, P_IFF, &mut s);
    s
}

fn write_formula(f: &Formula, need: u8, out: &mut String) {
    let own = match f {
        Formula::Iff(..) => P_IFF,
        Formula::Implies(..) => P_IMP,
        Formula::Or(..) => P_OR,
        Formula::And(..) => P_AND,
        _ => P_UNARY,
    };
    let wrap = own < need;
    if wrap {
        out.push('(');
    }
    match f {
        Formula::Atom(n) => out.push_str(n),
        Formula::Top => out.push_str("top"),
        Formula::Bot => out.push_str("bot"),
        Formula::Not(a) => {
            out.push('~');
            write_formula(a, P_UNARY, out);
        }
        Formula::Box(a) => {
            out.push_str("box ");
            write_formula(a, P_UNARY, out);
        }
        Formula::Dia(a) => {
            out.push_str("dia ");
            write_formula(a, P_UNARY, out);
        }
        Formula::Cond(a, b) => {
            out.push('(');
            write_formula(a, P_IFF, out);
            out.push_str(" | ");
            write_formula(b, P_IFF, out);
            out.push(')');
        }
        Formula::Indep(a, b) => {
            out.push_str("indep(");
            write_formula(a, P_IFF, out);
            out.push_str(", ");
            write_formula(b, P_IFF, out);
            out.push(')');
        }
        Formula::Iff(a, b) => binary(a, " <-> ", b, P_IFF, P_IMP, out),
        Formula::Implies(a, b) => binary(a, " -> ", b, P_OR, P_IMP, out),
        Formula::Or(a, b) => binary(a, " \\/ ", b, P_OR, P_AND, out),
        Formula::And(a, b) => binary(a, " /\\ ", b, P_AND, P_UNARY, out),
    }
    if wrap {
        out.push(')');
    }
}

fn binary(a: &Formula, op: &str, b: &Formula, left: u8, right: u8, out: &mut String) {
    write_formula(a, left, out);
    out.push_str(op);
    write_formula(b, right, out);
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

/// Distinct atom names used by a set of formulas, sorted alphabetically.
pub fn sorted_atoms<'a>(formulas: impl IntoIterator<Item = &'a Formula>) -> Vec<String> {
    let mut set = BTreeSet::new();
    for f in formulas {
        set.extend(f.atoms());
    }
    set.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx2() -> AtomContext {
        AtomContext::new(&["p", "q"]).unwrap()
    }

    fn p(s: &str) -> Formula {
        parse(s, &ctx2()).unwrap()
    }

    #[test]
    fn conditional_production() {
        assert_eq!(p("(q | p)"), Formula::cond(Formula::atom("q"), Formula::atom("p")));
    }

    #[test]
    fn negation_inside_the_bar() {
        let expected = Formula::not(Formula::cond(
            Formula::not(Formula::atom("q")),
            Formula::atom("p"),
        ));
        assert_eq!(p("~(~q | p)"), expected);
    }

    #[test]
    fn bare_bar_is_rejected() {
        let err = parse("q | p", &ctx2()).unwrap_err();
        assert_eq!(err.message, "conditional requires parentheses");
        assert_eq!(err.position, 2);
        let err = parse("(q | p | p)", &ctx2()).unwrap_err();
        assert_eq!(err.message, "conditional requires parentheses");
    }

    #[test]
    fn unknown_and_reserved_atoms() {
        let err = parse("p -> zz", &ctx2()).unwrap_err();
        assert!(err.message.contains("unknown atom"));
        assert_eq!(err.position, 5);
        assert!(parse("box", &ctx2()).is_err());
        assert!(AtomContext::new(&["top"]).is_err());
        assert!(AtomContext::new(&["p", "p"]).is_err());
        assert!(AtomContext::new::<&str>(&[]).is_err());
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(p("~p /\\ q"), Formula::and(Formula::not(Formula::atom("p")), Formula::atom("q")));
        assert_eq!(
            p("p -> q -> p"),
            Formula::implies(Formula::atom("p"), Formula::implies(Formula::atom("q"), Formula::atom("p")))
        );
        assert_eq!(
            p("p \\/ q /\\ p"),
            Formula::or(Formula::atom("p"), Formula::and(Formula::atom("q"), Formula::atom("p")))
        );
        assert_eq!(p("~box p"), Formula::not(Formula::boxed(Formula::atom("p"))));
        assert_eq!(p("indep(q, p)"), Formula::indep(Formula::atom("q"), Formula::atom("p")));
    }

    #[test]
    fn desugar_or_and_indep() {
        let c = ctx2();
        assert_eq!(
            desugar(&p("p \\/ q"), &c),
            Formula::implies(Formula::not(Formula::atom("p")), Formula::atom("q"))
        );
        let ind = desugar(&p("indep(q, p)"), &c);
        let inner = desugar(&p("(q | p) <-> q"), &c);
        assert_eq!(ind, Formula::boxed(inner));
        assert_eq!(desugar(&p("p"), &c), Formula::atom("p"));
        let top = Formula::implies(Formula::atom("p"), Formula::atom("p"));
        assert_eq!(desugar(&Formula::Top, &c), top);
        assert_eq!(desugar(&Formula::Bot, &c), Formula::not(top));
    }

    #[test]
    fn render_examples() {
        assert_eq!(render(&Formula::cond(Formula::atom("q"), Formula::atom("p"))), "(q | p)");
        assert_eq!(
            render(&Formula::implies(Formula::not(Formula::atom("p")), Formula::atom("q"))),
            "~p -> q"
        );
        assert_eq!(render(&Formula::boxed(Formula::atom("p"))), "box p");
        assert_eq!(render(&p("(p -> q) -> p")), "(p -> q) -> p");
        assert_eq!(render(&p("(p <-> q) <-> p")), "p <-> q <-> p");
        assert_eq!(render(&p("p <-> (q <-> p)")), "p <-> (q <-> p)");
    }

    #[test]
    fn counts() {
        let f = p("((q | p) | box (p | q)) /\\ p");
        assert_eq!(f.cond_depth(), 2);
        assert!(!f.is_modal_free());
        assert_eq!(f.atoms(), vec!["q".to_string(), "p".to_string()]);
        assert_eq!(sorted_atoms([&f]), vec!["p".to_string(), "q".to_string()]);
    }
}
