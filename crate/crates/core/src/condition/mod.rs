//! Strong Maltsev conditions and minor conditions.
//!
//! Text format (`;` also separates directives):
//!
//! ```text
//! condition
//! sym p 3
//! eq p(x,x,y) = p(y,y,y)
//! eq p(y,x,x) = p(y,y,y)
//! end
//! ```
//!
//! The `condition` header and `end` are optional. Terms nest freely and a
//! side may be a bare variable. A bare name that is declared as a nullary
//! symbol denotes that constant; `c()` works as well.

mod interpretation;
pub(crate) mod satisfy;
mod trivial;

pub use interpretation::{evaluate_term, satisfies, Interpretation};
pub use satisfy::find_satisfying_interpretation;
pub use trivial::ProjectionChoice;

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::text::{self, Line, Token, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum Term {
    Var(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn app(symbol: impl Into<String>, args: Vec<Term>) -> Self {
        Term::App(symbol.into(), args)
    }

    /// Variables in order of first occurrence.
    pub fn variables(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Term::Var(v) => {
                if !out.contains(&v.as_str()) {
                    out.push(v);
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_variables(out)),
        }
    }

    /// One symbol applied to variables only.
    pub fn is_flat(&self) -> bool {
        matches!(self, Term::App(_, args) if args.iter().all(|a| matches!(a, Term::Var(_))))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::App(s, args) => {
                write!(f, "{s}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct StrongMaltsevCondition {
    pub symbols: Vec<(String, usize)>,
    pub equations: Vec<(Term, Term)>,
}

/// `symbol(args)` with indices into the owning condition's tables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct MinorAtom {
    pub symbol: usize,
    pub args: Vec<usize>,
}

/// A condition whose every side is a single symbol applied to variables.
///
/// Symbols and variables are interned; each equation is quantified over
/// the variables occurring on either of its sides.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct MinorCondition {
    pub symbols: Vec<(String, usize)>,
    pub variables: Vec<String>,
    pub equations: Vec<(MinorAtom, MinorAtom)>,
}

impl MinorCondition {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn symbol(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|(s, _)| s == name)
    }

    pub fn add_symbol(&mut self, name: impl Into<String>, arity: usize) -> Result<usize> {
        let name = name.into();
        if self.symbol(&name).is_some() {
            return Err(Error::InvalidParameter(format!("symbol `{name}` declared twice")));
        }
        self.symbols.push((name, arity));
        Ok(self.symbols.len() - 1)
    }

    /// Interns a variable name.
    pub fn variable(&mut self, name: &str) -> usize {
        match self.variables.iter().position(|v| v == name) {
            Some(i) => i,
            None => {
                self.variables.push(name.to_string());
                self.variables.len() - 1
            }
        }
    }

    pub fn add_equation(&mut self, lhs: MinorAtom, rhs: MinorAtom) -> Result<()> {
        for atom in [&lhs, &rhs] {
            let (name, arity) = self
                .symbols
                .get(atom.symbol)
                .ok_or_else(|| Error::UnknownSymbol(format!("#{}", atom.symbol)))?;
            if *arity != atom.args.len() {
                return Err(Error::ArityMismatch {
                    symbol: name.clone(),
                    expected: *arity,
                    found: atom.args.len(),
                });
            }
            if let Some(&v) = atom.args.iter().find(|&&v| v >= self.variables.len()) {
                return Err(Error::InvalidParameter(format!("variable #{v} is not interned")));
            }
        }
        self.equations.push((lhs, rhs));
        Ok(())
    }

    /// Variables of equation `i`, left side first, in order of first occurrence.
    pub fn equation_variables(&self, i: usize) -> Vec<usize> {
        let (l, r) = &self.equations[i];
        let mut out: Vec<usize> = Vec::new();
        for &v in l.args.iter().chain(&r.args) {
            if !out.contains(&v) {
                out.push(v);
            }
        }
        out
    }

    pub fn atom_text(&self, atom: &MinorAtom) -> String {
        let args: Vec<&str> = atom.args.iter().map(|&v| self.variables[v].as_str()).collect();
        format!("{}({})", self.symbols[atom.symbol].0, args.join(","))
    }

    /// `lhs = rhs` as it appears after `eq` in the text format.
    pub fn equation_text(&self, i: usize) -> String {
        let (l, r) = &self.equations[i];
        format!("{} = {}", self.atom_text(l), self.atom_text(r))
    }

    pub fn max_arity(&self) -> usize {
        self.symbols.iter().map(|&(_, a)| a).max().unwrap_or(0)
    }

    pub fn to_strong(&self) -> StrongMaltsevCondition {
        let term = |a: &MinorAtom| {
            Term::App(
                self.symbols[a.symbol].0.clone(),
                a.args.iter().map(|&v| Term::Var(self.variables[v].clone())).collect(),
            )
        };
        StrongMaltsevCondition {
            symbols: self.symbols.clone(),
            equations: self.equations.iter().map(|(l, r)| (term(l), term(r))).collect(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("condition\n");
        for (s, a) in &self.symbols {
            out.push_str(&format!("sym {s} {a}\n"));
        }
        for i in 0..self.equations.len() {
            out.push_str(&format!("eq {}\n", self.equation_text(i)));
        }
        out.push_str("end\n");
        out
    }
}

impl StrongMaltsevCondition {
    pub fn arity_of(&self, symbol: &str) -> Option<usize> {
        self.symbols.iter().find(|(s, _)| s == symbol).map(|&(_, a)| a)
    }

    pub fn is_minor(&self) -> bool {
        self.equations.iter().all(|(l, r)| l.is_flat() && r.is_flat())
    }

    /// The same condition with interned atoms, if it is minor.
    pub fn to_minor(&self) -> Option<MinorCondition> {
        if !self.is_minor() {
            return None;
        }
        let mut m = MinorCondition {
            symbols: self.symbols.clone(),
            ..MinorCondition::default()
        };
        for (l, r) in &self.equations {
            let mut atom = |t: &Term| {
                let Term::App(s, args) = t else { unreachable!() };
                let args = args
                    .iter()
                    .map(|a| match a {
                        Term::Var(v) => m.variable(v),
                        Term::App(..) => unreachable!(),
                    })
                    .collect();
                MinorAtom { symbol: m.symbol(s).expect("declared symbol"), args }
            };
            let (l, r) = (atom(l), atom(r));
            m.equations.push((l, r));
        }
        Some(m)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("condition\n");
        for (s, a) in &self.symbols {
            out.push_str(&format!("sym {s} {a}\n"));
        }
        for (l, r) in &self.equations {
            out.push_str(&format!("eq {l} = {r}\n"));
        }
        out.push_str("end\n");
        out
    }
}

/// A parsed condition, classified by shape.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Condition {
    Minor(MinorCondition),
    Strong(StrongMaltsevCondition),
}

impl Condition {
    pub fn parse(source: &str) -> Result<Self> {
        parse_condition(source)
    }

    pub fn symbols(&self) -> &[(String, usize)] {
        match self {
            Condition::Minor(m) => &m.symbols,
            Condition::Strong(s) => &s.symbols,
        }
    }

    pub fn to_strong(&self) -> StrongMaltsevCondition {
        match self {
            Condition::Minor(m) => m.to_strong(),
            Condition::Strong(s) => s.clone(),
        }
    }

    pub fn as_minor(&self) -> Option<&MinorCondition> {
        match self {
            Condition::Minor(m) => Some(m),
            Condition::Strong(_) => None,
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            Condition::Minor(m) => m.to_text(),
            Condition::Strong(s) => s.to_text(),
        }
    }
}

/// Parses the condition text format and classifies the result.
pub fn parse_condition(source: &str) -> Result<Condition> {
    let lines = text::lines(source, true);
    let mut symbols: Vec<(String, usize)> = Vec::new();
    let mut equations: Vec<&Line<'_>> = Vec::new();
    let mut ended = false;
    for (n, line) in lines.iter().enumerate() {
        if ended {
            return Err(line.error("unexpected text after `end`"));
        }
        let words = line.words();
        match words[0].1 {
            "condition" if n == 0 && words.len() == 1 => {}
            "end" if words.len() == 1 => ended = true,
            "sym" => {
                if words.len() != 3 || !text::is_identifier(words[1].1) {
                    return Err(line.error("expected `sym <name> <arity>`"));
                }
                let name = words[1].1;
                if symbols.iter().any(|(s, _)| s == name) {
                    return Err(line.error_at(words[1].0, format!("symbol `{name}` declared twice")));
                }
                let arity = text::parse_usize(line, words[2].0, words[2].1)?;
                symbols.push((name.to_string(), arity));
            }
            "eq" => equations.push(line),
            _ => return Err(line.error_at(words[0].0, format!("unknown directive `{}`", words[0].1))),
        }
    }
    let arities: HashMap<&str, usize> = symbols.iter().map(|(s, a)| (s.as_str(), *a)).collect();
    let mut parsed = Vec::with_capacity(equations.len());
    for line in equations {
        let tokens = text::tokenize(line)?;
        // tokens[0] is the `eq` keyword
        let mut p = TermParser { line, tokens: &tokens[1..], pos: 0, arities: &arities };
        let lhs = p.term()?;
        p.expect('=')?;
        let rhs = p.term()?;
        if let Some(t) = p.tokens.get(p.pos) {
            return Err(line.error_at(t.column, "unexpected text after the equation"));
        }
        parsed.push((lhs, rhs));
    }
    let strong = StrongMaltsevCondition { symbols, equations: parsed };
    Ok(match strong.to_minor() {
        Some(m) => Condition::Minor(m),
        None => Condition::Strong(strong),
    })
}

struct TermParser<'t, 'l> {
    line: &'l Line<'l>,
    tokens: &'t [Token],
    pos: usize,
    arities: &'t HashMap<&'t str, usize>,
}

impl TermParser<'_, '_> {
    fn end_error(&self) -> Error {
        self.line
            .error_at(self.line.column + self.line.text.chars().count(), "unexpected end of equation")
    }

    fn expect(&mut self, c: char) -> Result<()> {
        match self.tokens.get(self.pos) {
            Some(t) if t.is(c) => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.line.error_at(t.column, format!("expected `{c}`"))),
            None => Err(self.end_error()),
        }
    }

    fn term(&mut self) -> Result<Term> {
        let tok = self.tokens.get(self.pos).ok_or_else(|| self.end_error())?;
        let TokenKind::Ident(name) = &tok.kind else {
            return Err(self.line.error_at(tok.column, "expected a term"));
        };
        self.pos += 1;
        let applied = self.tokens.get(self.pos).is_some_and(|t| t.is('('));
        if !applied {
            return match self.arities.get(name.as_str()) {
                None => Ok(Term::Var(name.clone())),
                Some(0) => Ok(Term::App(name.clone(), Vec::new())),
                Some(&expected) => Err(Error::ArityMismatch {
                    symbol: name.clone(),
                    expected,
                    found: 0,
                }),
            };
        }
        self.pos += 1;
        let expected = *self
            .arities
            .get(name.as_str())
            .ok_or_else(|| Error::UnknownSymbol(name.clone()))?;
        let mut args = Vec::new();
        if self.tokens.get(self.pos).is_some_and(|t| t.is(')')) {
            self.pos += 1;
        } else {
            loop {
                args.push(self.term()?);
                let t = self.tokens.get(self.pos).ok_or_else(|| self.end_error())?;
                self.pos += 1;
                if t.is(')') {
                    break;
                }
                if !t.is(',') {
                    return Err(self.line.error_at(t.column, "expected `,` or `)`"));
                }
            }
        }
        if args.len() != expected {
            return Err(Error::ArityMismatch {
                symbol: name.clone(),
                expected,
                found: args.len(),
            });
        }
        Ok(Term::App(name.clone(), args))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const EX10: &str = "sym m 3; eq m(x,x,y)=m(y,y,y); eq m(y,x,x)=m(y,y,y)";
    pub(crate) const NESTED: &str = "condition
sym f 2
sym g 2
sym h 3
eq f(g(f(x,y),y),z) = g(x,h(y,y,z))
eq f(x,y) = g(g(x,y),x)
end
";

    #[test]
    fn minor_example() {
        let Condition::Minor(m) = parse_condition(EX10).unwrap() else { panic!() };
        assert_eq!(m.equations.len(), 2);
        assert_eq!(m.variables, vec!["x", "y"]);
        assert_eq!(m.equation_text(0), "m(x,x,y) = m(y,y,y)");
    }

    #[test]
    fn nested_example_is_strong() {
        let Condition::Strong(s) = parse_condition(NESTED).unwrap() else { panic!() };
        assert_eq!(s.equations.len(), 2);
        assert_eq!(s.equations[0].0.to_string(), "f(g(f(x,y),y),z)");
        assert_eq!(s.equations[0].0.variables(), vec!["x", "y", "z"]);
    }

    #[test]
    fn bare_variable_side_is_not_minor() {
        let c = parse_condition("sym m 3\neq m(x,x,y) = x").unwrap();
        assert!(matches!(c, Condition::Strong(_)));
    }

    #[test]
    fn arity_mismatch() {
        let e = parse_condition("sym m 2; eq m(x,y)=m(x)").unwrap_err();
        assert_eq!(
            e,
            Error::ArityMismatch { symbol: "m".into(), expected: 2, found: 1 }
        );
    }

    #[test]
    fn undeclared_symbol() {
        let e = parse_condition("sym m 2; eq m(x,y)=k(x,y)").unwrap_err();
        assert_eq!(e, Error::UnknownSymbol("k".into()));
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(
            parse_condition("sym m 2\neq m(x,y) m(y,x)"),
            Err(Error::Syntax { line: 2, column: 11, .. })
        ));
        assert!(matches!(parse_condition("sym m 2\neq m(x,"), Err(Error::Syntax { line: 2, .. })));
        assert!(matches!(parse_condition("frobnicate"), Err(Error::Syntax { line: 1, .. })));
        assert!(matches!(parse_condition("sym 1m 2"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn nullary_constants() {
        let Condition::Minor(m) = parse_condition("sym c 0; sym f 1; eq f(x) = c").unwrap() else {
            panic!()
        };
        assert_eq!(m.equation_text(0), "f(x) = c()");
        assert!(parse_condition("sym f 1; eq f(x) = f").is_err());
    }

    #[test]
    fn text_roundtrip() {
        for src in [EX10, NESTED, "sym f 2; sym g 2; eq f(x,y)=g(y,x)", ""] {
            let c = parse_condition(src).unwrap();
            assert_eq!(parse_condition(&c.to_text()).unwrap(), c);
        }
    }

    #[test]
    fn minor_strong_conversion() {
        let Condition::Minor(m) = parse_condition(EX10).unwrap() else { panic!() };
        assert_eq!(m.to_strong().to_minor().unwrap(), m);
    }
}
