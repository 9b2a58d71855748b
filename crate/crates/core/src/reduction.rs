//! Translations between PCSP instances and minor conditions.
//!
//! Forward: an instance over `(A, B)` becomes a minor condition with one
//! `|A|`-ary symbol `g_<var>` per variable and one `|R^A|`-ary symbol
//! `f_<k>` per conjunct (numbered from 1). The instance is true in `A`
//! only if the condition is trivial, and any interpretation of the
//! condition in `Pol(A, B)` decodes to a `B`-satisfying assignment.
//!
//! Reverse: a minor condition becomes an instance whose variables are the
//! table cells of its symbols, merged along the equations.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::condition::satisfy::CellLayout;
use crate::condition::{Interpretation, MinorAtom, MinorCondition};
use crate::error::{Error, Result};
use crate::function::{projection, FunctionTable};
use crate::instance::{Conjunct, PPInstance};
use crate::search::{checked_pow, digits, Budget};
use crate::structure::{PcspTemplate, RelationalStructure};
use crate::text;

/// Instance variable to condition symbol, in variable order.
///
/// Text form: one `map <variable> <symbol>` line each.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct SymbolMap(pub Vec<(String, String)>);

impl SymbolMap {
    pub fn symbol_for(&self, variable: &str) -> Option<&str> {
        self.0.iter().find(|(v, _)| v == variable).map(|(_, s)| s.as_str())
    }

    pub fn parse(source: &str) -> Result<Self> {
        let mut out = Vec::new();
        for line in text::lines(source, false) {
            let words = line.words();
            if words.len() != 3 || words[0].1 != "map" {
                return Err(line.error("expected `map <variable> <symbol>`"));
            }
            for &(col, w) in &words[1..] {
                if !text::is_identifier(w) {
                    return Err(line.error_at(col, format!("`{w}` is not an identifier")));
                }
            }
            if out.iter().any(|(v, _): &(String, String)| v == words[1].1) {
                return Err(line.error_at(words[1].0, format!("variable `{}` mapped twice", words[1].1)));
            }
            out.push((words[1].1.to_string(), words[2].1.to_string()));
        }
        Ok(SymbolMap(out))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (v, s) in &self.0 {
            let _ = writeln!(out, "map {v} {s}");
        }
        out
    }
}

/// Output of [`instance_to_condition`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionArtifacts {
    pub condition: MinorCondition,
    pub variable_symbols: SymbolMap,
    /// Symbol of conjunct `i` (0-based) at index `i`.
    pub conjunct_symbols: Vec<String>,
    /// For each relation used, the enumeration of `R^A` that indexes the
    /// arguments of the `f` symbols.
    pub tuple_order: BTreeMap<String, Vec<Vec<usize>>>,
}

/// Builds the minor condition of a normalized instance.
///
/// `R^A` is enumerated in the order its tuples are stored in the
/// yes-structure. Condition variables are `x_0, ..., x_{|A|-1}`, one per
/// element of `A`.
pub fn instance_to_condition(inst: &PPInstance, template: &PcspTemplate) -> Result<ReductionArtifacts> {
    if !inst.is_normalized() {
        return Err(Error::NotNormalized);
    }
    let a = &template.yes;
    inst.check_signature(&a.signature())?;
    let n = a.domain_size;

    let mut condition = MinorCondition::new();
    let xs: Vec<usize> = (0..n).map(|e| condition.variable(&format!("x_{e}"))).collect();
    let mut variable_symbols = Vec::with_capacity(inst.variables.len());
    let mut g = Vec::with_capacity(inst.variables.len());
    for v in &inst.variables {
        let name = format!("g_{v}");
        g.push(condition.add_symbol(name.clone(), n)?);
        variable_symbols.push((v.clone(), name));
    }
    let mut conjunct_symbols = Vec::with_capacity(inst.conjuncts.len());
    let mut tuple_order = BTreeMap::new();
    for (k, c) in inst.conjuncts.iter().enumerate() {
        let rel = a.relation(&c.symbol).expect("signature checked");
        if rel.is_empty() {
            return Err(Error::EmptyRelation {
                conjunct: k + 1,
                symbol: c.symbol.clone(),
            });
        }
        tuple_order
            .entry(c.symbol.clone())
            .or_insert_with(|| rel.tuples.clone());
        let name = format!("f_{}", k + 1);
        let f = condition.add_symbol(name.clone(), rel.len())?;
        conjunct_symbols.push(name);
        for (p, &var) in c.args.iter().enumerate() {
            let lhs = MinorAtom {
                symbol: f,
                args: rel.tuples.iter().map(|t| xs[t[p]]).collect(),
            };
            let rhs = MinorAtom {
                symbol: g[var],
                args: xs.clone(),
            };
            condition.add_equation(lhs, rhs)?;
        }
    }
    Ok(ReductionArtifacts {
        condition,
        variable_symbols: SymbolMap(variable_symbols),
        conjunct_symbols,
        tuple_order,
    })
}

/// Reads off `a -> g_a(0, 1, ..., |A|-1)` and checks the result in `B`.
pub fn certificate_to_assignment(
    interp: &Interpretation,
    map: &SymbolMap,
    inst: &PPInstance,
    template: &PcspTemplate,
) -> Result<Vec<usize>> {
    let n = template.yes.domain_size;
    // An interpretation without tables carries no domain information.
    let sized = !interp.tables.is_empty();
    if sized && (interp.in_domain != n || interp.out_domain != template.no.domain_size) {
        return Err(Error::DomainMismatch(format!(
            "interpretation maps {} -> {} elements but the template is {} -> {}",
            interp.in_domain, interp.out_domain, n, template.no.domain_size
        )));
    }
    let canonical: Vec<usize> = (0..n).collect();
    let assignment = inst
        .variables
        .iter()
        .map(|v| {
            let symbol = map
                .symbol_for(v)
                .ok_or_else(|| Error::InvalidParameter(format!("no symbol mapped for variable `{v}`")))?;
            interp.get(symbol)?.apply(&canonical)
        })
        .collect::<Result<Vec<_>>>()?;
    if !inst.is_satisfied_by(&assignment, &template.no) {
        return Err(Error::VerificationFailed(
            "decoded assignment does not satisfy the instance in the no-structure".into(),
        ));
    }
    Ok(assignment)
}

/// The interpretation induced by an `A`-satisfying assignment `s`:
/// `g_a` is the projection onto coordinate `s(a)` and `f_C` the projection
/// onto the position of `s(C)` in `R^A`, each followed by the template's
/// homomorphism into `B`.
pub fn witness_interpretation(
    art: &ReductionArtifacts,
    inst: &PPInstance,
    template: &PcspTemplate,
    assignment: &[usize],
) -> Result<Interpretation> {
    if !inst.is_satisfied_by(assignment, &template.yes) {
        return Err(Error::InvalidParameter("assignment does not satisfy the instance in A".into()));
    }
    let n = template.yes.domain_size;
    let h = &template.witness;
    let lift = |p: FunctionTable| {
        FunctionTable::new(n, template.no.domain_size, p.arity, p.table.iter().map(|&x| h.apply(x)).collect())
    };
    let mut interp = Interpretation::new(n, template.no.domain_size);
    for (var, (_, symbol)) in art.variable_symbols.0.iter().enumerate() {
        interp.insert(symbol.clone(), lift(projection(n, assignment[var] + 1, n)?)?)?;
    }
    for (c, symbol) in inst.conjuncts.iter().zip(&art.conjunct_symbols) {
        let order = &art.tuple_order[&c.symbol];
        let image: Vec<usize> = c.args.iter().map(|&a| assignment[a]).collect();
        let pos = order.iter().position(|t| *t == image).expect("satisfied conjunct");
        interp.insert(symbol.clone(), lift(projection(order.len(), pos + 1, n)?)?)?;
    }
    Ok(interp)
}

/// Output of [`condition_to_instance`]: the instance plus the cell layout
/// needed to turn its solutions back into tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellInstance {
    pub instance: PPInstance,
    symbols: Vec<(String, usize)>,
    offsets: Vec<usize>,
    /// Instance variable of every cell.
    cell_variable: Vec<usize>,
    in_domain: usize,
}

impl CellInstance {
    /// Tables read off a solution of the instance in a structure with
    /// `out_domain` elements.
    pub fn interpretation(&self, assignment: &[usize], out_domain: usize) -> Result<Interpretation> {
        let mut interp = Interpretation::new(self.in_domain, out_domain);
        for (s, (name, arity)) in self.symbols.iter().enumerate() {
            let cells = checked_pow(self.in_domain, *arity).expect("layout fits");
            let base = self.offsets[s];
            let table = (0..cells).map(|c| assignment[self.cell_variable[base + c]]).collect();
            interp.insert(name.clone(), FunctionTable::new(self.in_domain, out_domain, *arity, table)?)?;
        }
        Ok(interp)
    }
}

/// Builds the instance whose solutions in `B` are the interpretations of
/// `condition` in `Pol(s, B)`.
///
/// Cells `f[t]` for `t` in `s^ar(f)` become variables, merged along the
/// equations. For every relation `R` of `s` and every choice of `ar(f)`
/// tuples of `R`, the columns of that matrix give one `R` conjunct.
/// Repeated conjuncts are dropped. Variables are named
/// `v<symbol index>_<t_1>_..._<t_k>` after their smallest cell.
pub fn condition_to_instance(condition: &MinorCondition, s: &RelationalStructure, budget: u64) -> Result<CellInstance> {
    let n = s.domain_size;
    let mut meter = Budget::new(budget);
    let layout = CellLayout::new(condition, n, budget)?;
    let (cell_variable, reps) = layout.merge(condition, n, &mut meter)?.classes();

    let cell_name = |cell: usize| {
        let sym = layout.offsets.partition_point(|&o| o <= cell) - 1;
        let arity = condition.symbols[sym].1;
        let mut name = format!("v{sym}");
        for e in digits(n, arity, cell - layout.offsets[sym]) {
            let _ = write!(name, "_{e}");
        }
        name
    };
    let variables: Vec<String> = reps.iter().map(|&r| cell_name(r)).collect();

    let mut conjuncts = Vec::new();
    let mut seen = HashSet::new();
    for rel in &s.relations {
        for (sym, &(_, k)) in condition.symbols.iter().enumerate() {
            let choices = checked_pow(rel.len(), k).ok_or(Error::ResourceLimit { budget })?;
            meter.spend(choices as u64)?;
            for choice in 0..choices {
                let rows = digits(rel.len(), k, choice);
                let args: Vec<usize> = (0..rel.arity)
                    .map(|p| {
                        let col = crate::search::radix(n, rows.iter().map(|&r| rel.tuples[r][p]));
                        cell_variable[layout.offsets[sym] + col]
                    })
                    .collect();
                let c = Conjunct {
                    symbol: rel.symbol.clone(),
                    args,
                };
                if seen.insert(c.clone()) {
                    conjuncts.push(c);
                }
            }
        }
    }
    Ok(CellInstance {
        instance: PPInstance {
            variables,
            conjuncts,
            equalities: Vec::new(),
        },
        symbols: condition.symbols.clone(),
        offsets: layout.offsets,
        cell_variable,
        in_domain: n,
    })
}
