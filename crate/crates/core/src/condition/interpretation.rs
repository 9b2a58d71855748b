//! Interpretations of condition symbols and checking equations under them.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::{MinorCondition, StrongMaltsevCondition, Term};
use crate::error::{Error, Result};
use crate::function::{parse_table, FunctionTable};
use crate::search::{checked_pow, digits, radix};
use crate::text;

/// Function tables for condition symbols, all over one `in -> out` pair of
/// domains.
///
/// Text format:
///
/// ```text
/// interpretation
/// symbol f
/// fn 2 2 2
/// 0 0
/// 1 1
/// end
/// end
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Interpretation {
    pub in_domain: usize,
    pub out_domain: usize,
    pub tables: BTreeMap<String, FunctionTable>,
}

impl Interpretation {
    pub fn new(in_domain: usize, out_domain: usize) -> Self {
        Interpretation {
            in_domain,
            out_domain,
            tables: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, symbol: impl Into<String>, table: FunctionTable) -> Result<()> {
        if table.in_domain != self.in_domain || table.out_domain != self.out_domain {
            return Err(Error::DomainMismatch(format!(
                "table maps {} -> {} elements, interpretation is {} -> {}",
                table.in_domain, table.out_domain, self.in_domain, self.out_domain
            )));
        }
        self.tables.insert(symbol.into(), table);
        Ok(())
    }

    pub fn get(&self, symbol: &str) -> Result<&FunctionTable> {
        self.tables
            .get(symbol)
            .ok_or_else(|| Error::UnknownSymbol(symbol.to_string()))
    }

    fn table_for(&self, symbol: &str, arity: usize) -> Result<&FunctionTable> {
        let t = self.get(symbol)?;
        if t.arity != arity {
            return Err(Error::ArityMismatch {
                symbol: symbol.to_string(),
                expected: arity,
                found: t.arity,
            });
        }
        Ok(t)
    }

    pub fn parse(source: &str) -> Result<Self> {
        let lines = text::lines(source, false);
        let mut rest = &lines[..];
        match rest.first() {
            Some(l) if l.text == "interpretation" => rest = &rest[1..],
            Some(l) => return Err(l.error("expected `interpretation`")),
            None => return Err(text::unexpected_eof(source, "interpretation")),
        }
        let mut domains: Option<(usize, usize)> = None;
        let mut tables = BTreeMap::new();
        loop {
            let line = rest.first().ok_or_else(|| text::unexpected_eof(source, "interpretation"))?;
            let words = line.words();
            if words.len() == 1 && words[0].1 == "end" {
                if let Some(extra) = rest.get(1) {
                    return Err(extra.error("unexpected text after `end`"));
                }
                break;
            }
            if words.len() != 2 || words[0].1 != "symbol" || !text::is_identifier(words[1].1) {
                return Err(line.error("expected `symbol <name>` or `end`"));
            }
            if tables.contains_key(words[1].1) {
                return Err(line.error_at(words[1].0, format!("symbol `{}` given twice", words[1].1)));
            }
            let (table, after) = parse_table(&rest[1..], source)?;
            let pair = (table.in_domain, table.out_domain);
            if *domains.get_or_insert(pair) != pair {
                return Err(rest[1].error("all tables must share their domains"));
            }
            tables.insert(words[1].1.to_string(), table);
            rest = after;
        }
        // An empty interpretation has no tables to fix its domains.
        let (in_domain, out_domain) = domains.unwrap_or((1, 1));
        Ok(Interpretation {
            in_domain,
            out_domain,
            tables,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("interpretation\n");
        for (s, t) in &self.tables {
            out.push_str(&format!("symbol {s}\n"));
            out.push_str(&t.to_text());
        }
        out.push_str("end\n");
        out
    }
}

/// Evaluates `term` with its variables read from `assignment`.
///
/// Nested applications feed outputs back in as inputs, which only makes
/// sense when both domains coincide.
pub fn evaluate_term(term: &Term, interp: &Interpretation, assignment: &HashMap<String, usize>) -> Result<usize> {
    match term {
        Term::Var(v) => assignment
            .get(v)
            .copied()
            .ok_or_else(|| Error::InvalidParameter(format!("variable `{v}` is unassigned"))),
        Term::App(symbol, args) => {
            if interp.in_domain != interp.out_domain && args.iter().any(|a| matches!(a, Term::App(..))) {
                return Err(nesting_error(interp));
            }
            let table = interp.table_for(symbol, args.len())?;
            let values = args
                .iter()
                .map(|a| evaluate_term(a, interp, assignment))
                .collect::<Result<Vec<_>>>()?;
            table.apply(&values)
        }
    }
}

fn nesting_error(interp: &Interpretation) -> Error {
    Error::NestingAcrossDomains {
        input: interp.in_domain,
        output: interp.out_domain,
    }
}

/// Checks every equation for every assignment of its variables.
///
/// Comparing a bare variable with an applied symbol mixes input and
/// output values, so such sides need equal domains as well.
pub fn satisfies(condition: &StrongMaltsevCondition, interp: &Interpretation) -> Result<bool> {
    let n = interp.in_domain;
    for (lhs, rhs) in &condition.equations {
        for side in [lhs, rhs] {
            if let Term::App(s, args) = side {
                let declared = condition.arity_of(s).ok_or_else(|| Error::UnknownSymbol(s.clone()))?;
                if declared != args.len() {
                    return Err(Error::ArityMismatch { symbol: s.clone(), expected: declared, found: args.len() });
                }
            }
        }
        let bare = matches!(lhs, Term::Var(_)) || matches!(rhs, Term::Var(_));
        if bare && n != interp.out_domain {
            return Err(nesting_error(interp));
        }
        let mut vars: Vec<&str> = lhs.variables();
        for v in rhs.variables() {
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
        let count = checked_pow(n, vars.len())
            .ok_or_else(|| Error::InvalidParameter("too many variables to quantify over".into()))?;
        let mut assignment: HashMap<String, usize> = vars.iter().map(|v| (v.to_string(), 0)).collect();
        for index in 0..count {
            for (v, value) in vars.iter().zip(digits(n, vars.len(), index)) {
                *assignment.get_mut(*v).expect("variable present") = value;
            }
            if evaluate_term(lhs, interp, &assignment)? != evaluate_term(rhs, interp, &assignment)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

impl MinorCondition {
    /// Table-level check: for every map `h` from an equation's variables to
    /// the input domain, cell `f[h(u)]` equals cell `g[h(v)]`.
    pub fn satisfied_by(&self, interp: &Interpretation) -> Result<bool> {
        let tables = self
            .symbols
            .iter()
            .map(|(s, a)| interp.table_for(s, *a))
            .collect::<Result<Vec<_>>>()?;
        let n = interp.in_domain;
        for (i, (lhs, rhs)) in self.equations.iter().enumerate() {
            let vars = self.equation_variables(i);
            let mut slot = vec![0usize; self.variables.len()];
            let count = checked_pow(n, vars.len())
                .ok_or_else(|| Error::InvalidParameter("too many variables to quantify over".into()))?;
            for index in 0..count {
                for (&v, value) in vars.iter().zip(digits(n, vars.len(), index)) {
                    slot[v] = value;
                }
                let cell = |a: &super::MinorAtom| radix(n, a.args.iter().map(|&v| slot[v]));
                if tables[lhs.symbol].table[cell(lhs)] != tables[rhs.symbol].table[cell(rhs)] {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}
