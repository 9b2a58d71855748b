//! Primitive positive sentences in prenex form: a list of existentially
//! quantified variables, a conjunction of atoms, and optional equalities.
//!
//! Text format, one directive per line (`;` also separates directives):
//!
//! ```text
//! instance
//! vars x1 x2 x3
//! N(x1,x2) ∧ N(x2,x3)
//! eq x1 x3
//! end
//! ```
//!
//! `instance`/`end` are optional, `exists` is accepted for `vars`, and
//! atoms on one line may be joined with `∧` or `&`.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::structure::{RelationalStructure, Signature};
use crate::text::{self, Token, TokenKind};
use crate::union_find::UnionFind;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Conjunct {
    pub symbol: String,
    /// Indices into [`PPInstance::variables`].
    pub args: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct PPInstance {
    pub variables: Vec<String>,
    pub conjuncts: Vec<Conjunct>,
    pub equalities: Vec<(usize, usize)>,
}

/// Parses an instance, checking only its internal consistency.
pub fn parse_instance(source: &str) -> Result<PPInstance> {
    parse(source, None)
}

/// Parses an instance and checks every atom against `signature`.
pub fn parse_instance_with(source: &str, signature: &Signature) -> Result<PPInstance> {
    parse(source, Some(signature))
}

fn parse(source: &str, signature: Option<&Signature>) -> Result<PPInstance> {
    let lines = text::lines(source, true);
    let mut inst = PPInstance::default();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut arities: HashMap<String, usize> = HashMap::new();
    let mut ended = false;
    for (n, line) in lines.iter().enumerate() {
        if ended {
            return Err(line.error("unexpected text after `end`"));
        }
        let words = line.words();
        match words[0].1 {
            "instance" if n == 0 && words.len() == 1 => {}
            "end" if words.len() == 1 => ended = true,
            "vars" | "exists" => {
                for &(col, w) in &words[1..] {
                    if !text::is_identifier(w) {
                        return Err(line.error_at(col, format!("`{w}` is not a variable name")));
                    }
                    if index.contains_key(w) {
                        return Err(line.error_at(col, format!("variable `{w}` declared twice")));
                    }
                    index.insert(w.to_string(), inst.variables.len());
                    inst.variables.push(w.to_string());
                }
            }
            "eq" => {
                if words.len() != 3 {
                    return Err(line.error("expected `eq <var> <var>`"));
                }
                let lookup = |(col, w): (usize, &str)| {
                    index.get(w).copied().ok_or_else(|| Error::UndeclaredVariable {
                        name: w.to_string(),
                        line: line.number,
                        column: col,
                    })
                };
                let a = lookup(words[1])?;
                let b = lookup(words[2])?;
                inst.equalities.push((a, b));
            }
            _ => {
                let tokens = text::tokenize(line)?;
                let mut pos = 0;
                loop {
                    let (symbol, args) = parse_atom(line, &tokens, &mut pos)?;
                    let arg_ids = args
                        .into_iter()
                        .map(|(c, name)| {
                            index.get(&name).copied().ok_or(Error::UndeclaredVariable {
                                name,
                                line: line.number,
                                column: c,
                            })
                        })
                        .collect::<Result<Vec<_>>>()?;
                    check_symbol(&symbol, arg_ids.len(), signature, &mut arities)?;
                    inst.conjuncts.push(Conjunct { symbol, args: arg_ids });
                    match tokens.get(pos) {
                        None => break,
                        Some(t) if t.is('&') => pos += 1,
                        Some(t) => return Err(line.error_at(t.column, "expected `∧` between atoms")),
                    }
                }
            }
        }
    }
    Ok(inst)
}

fn check_symbol(
    symbol: &str,
    found: usize,
    signature: Option<&Signature>,
    arities: &mut HashMap<String, usize>,
) -> Result<()> {
    let expected = match signature {
        Some(sig) => sig
            .arity_of(symbol)
            .ok_or_else(|| Error::UnknownSymbol(symbol.to_string()))?,
        None => *arities.entry(symbol.to_string()).or_insert(found),
    };
    if expected != found {
        return Err(Error::ArityMismatch {
            symbol: symbol.to_string(),
            expected,
            found,
        });
    }
    Ok(())
}

type Atom = (String, Vec<(usize, String)>);

fn parse_atom(line: &text::Line<'_>, tokens: &[Token], pos: &mut usize) -> Result<Atom> {
    let err_end = || line.error_at(line.column + line.text.chars().count(), "unexpected end of atom");
    let tok = tokens.get(*pos).ok_or_else(err_end)?;
    let TokenKind::Ident(symbol) = &tok.kind else {
        return Err(line.error_at(tok.column, "expected a relation symbol"));
    };
    *pos += 1;
    match tokens.get(*pos) {
        Some(t) if t.is('(') => *pos += 1,
        Some(t) => return Err(line.error_at(t.column, "expected `(`")),
        None => return Err(err_end()),
    }
    let mut args = Vec::new();
    if tokens.get(*pos).is_some_and(|t| t.is(')')) {
        *pos += 1;
        return Ok((symbol.clone(), args));
    }
    loop {
        let t = tokens.get(*pos).ok_or_else(err_end)?;
        let TokenKind::Ident(name) = &t.kind else {
            return Err(line.error_at(t.column, "expected a variable"));
        };
        args.push((t.column, name.clone()));
        *pos += 1;
        let t = tokens.get(*pos).ok_or_else(err_end)?;
        *pos += 1;
        if t.is(')') {
            break;
        }
        if !t.is(',') {
            return Err(line.error_at(t.column, "expected `,` or `)`"));
        }
    }
    Ok((symbol.clone(), args))
}

/// Canonical text form; [`parse_instance`] reads it back unchanged.
pub fn serialize_instance(inst: &PPInstance) -> String {
    let mut out = String::from("instance\nvars");
    for v in &inst.variables {
        out.push(' ');
        out.push_str(v);
    }
    out.push('\n');
    for c in &inst.conjuncts {
        let args: Vec<&str> = c.args.iter().map(|&a| inst.variables[a].as_str()).collect();
        let _ = writeln!(out, "{}({})", c.symbol, args.join(","));
    }
    for &(a, b) in &inst.equalities {
        let _ = writeln!(out, "eq {} {}", inst.variables[a], inst.variables[b]);
    }
    out.push_str("end\n");
    out
}

impl PPInstance {
    pub fn parse(source: &str) -> Result<Self> {
        parse_instance(source)
    }

    pub fn to_text(&self) -> String {
        serialize_instance(self)
    }

    pub fn variable(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    /// Checks symbols and arities against a signature.
    pub fn check_signature(&self, signature: &Signature) -> Result<()> {
        for c in &self.conjuncts {
            let expected = signature
                .arity_of(&c.symbol)
                .ok_or_else(|| Error::UnknownSymbol(c.symbol.clone()))?;
            if expected != c.args.len() {
                return Err(Error::ArityMismatch {
                    symbol: c.symbol.clone(),
                    expected,
                    found: c.args.len(),
                });
            }
        }
        Ok(())
    }

    /// Merges every equality class into its first-declared variable.
    ///
    /// Returns the equality-free instance together with the map from old
    /// variable indices to new ones.
    pub fn normalize_with_map(&self) -> (PPInstance, Vec<usize>) {
        let mut uf = UnionFind::new(self.variables.len());
        for &(a, b) in &self.equalities {
            uf.union(a, b);
        }
        let (ids, reps) = uf.classes();
        let inst = PPInstance {
            variables: reps.iter().map(|&r| self.variables[r].clone()).collect(),
            conjuncts: self
                .conjuncts
                .iter()
                .map(|c| Conjunct {
                    symbol: c.symbol.clone(),
                    args: c.args.iter().map(|&a| ids[a]).collect(),
                })
                .collect(),
            equalities: Vec::new(),
        };
        (inst, ids)
    }

    pub fn normalize(&self) -> PPInstance {
        self.normalize_with_map().0
    }

    pub fn is_normalized(&self) -> bool {
        self.equalities.is_empty()
    }

    /// True iff `assignment` (one value per variable) satisfies every atom
    /// in `s` and every equality.
    pub fn is_satisfied_by(&self, assignment: &[usize], s: &RelationalStructure) -> bool {
        assignment.len() == self.variables.len()
            && self.equalities.iter().all(|&(a, b)| assignment[a] == assignment[b])
            && self.conjuncts.iter().all(|c| {
                let image: Vec<usize> = c.args.iter().map(|&a| assignment[a]).collect();
                s.relation(&c.symbol).is_some_and(|r| r.contains(&image))
            })
    }
}
