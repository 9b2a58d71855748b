//! Deciding whether a minor condition holds in `Pol(A, B)`.
//!
//! Every table cell of every symbol is a search variable over `B`. Minor
//! equations force cells to be equal, so equal cells are merged up front
//! with a union-find; compatibility with each relation pair then becomes
//! an ordinary constraint over the merged cells.

use std::sync::Arc;

use super::{Interpretation, MinorCondition};
use crate::error::{Error, Result};
use crate::function::FunctionTable;
use crate::polymorphism::{is_polymorphism, CompiledTemplate};
use crate::search::{checked_pow, digits, radix, Budget, ProblemBuilder};
use crate::structure::PcspTemplate;
use crate::union_find::UnionFind;

/// Cell layout of a condition's tables over an `n`-element input domain.
pub(crate) struct CellLayout {
    pub offsets: Vec<usize>,
    pub total: usize,
}

impl CellLayout {
    pub fn new(condition: &MinorCondition, n: usize, budget: u64) -> Result<Self> {
        let mut offsets = Vec::with_capacity(condition.symbols.len());
        let mut total = 0usize;
        for &(_, a) in &condition.symbols {
            offsets.push(total);
            total = checked_pow(n, a)
                .and_then(|c| total.checked_add(c))
                .filter(|&t| t as u64 <= budget)
                .ok_or(Error::ResourceLimit { budget })?;
        }
        Ok(CellLayout { offsets, total })
    }

    /// Merges cells linked by the equations: `f[h(u)] ~ g[h(v)]` for every
    /// map `h` from the equation's variables into `0..n`.
    pub fn merge(&self, condition: &MinorCondition, n: usize, budget: &mut Budget) -> Result<UnionFind> {
        let mut uf = UnionFind::new(self.total);
        let mut slot = vec![0usize; condition.variables.len()];
        for (i, (lhs, rhs)) in condition.equations.iter().enumerate() {
            let vars = condition.equation_variables(i);
            let count = checked_pow(n, vars.len()).ok_or(Error::ResourceLimit { budget: budget.limit })?;
            budget.spend(count as u64)?;
            for index in 0..count {
                for (&v, value) in vars.iter().zip(digits(n, vars.len(), index)) {
                    slot[v] = value;
                }
                let a = self.offsets[lhs.symbol] + radix(n, lhs.args.iter().map(|&v| slot[v]));
                let b = self.offsets[rhs.symbol] + radix(n, rhs.args.iter().map(|&v| slot[v]));
                uf.union(a, b);
            }
        }
        Ok(uf)
    }
}

/// Searches `Pol(A, B)` for tables of the condition's symbols that satisfy
/// all of its equations.
///
/// Symbols may have arity at most `max_arity`. A returned interpretation
/// has been re-checked: every table is a polymorphism and every equation
/// holds. `threads > 1` splits the first cell's values across threads;
/// the lowest witness is kept, so the answer does not depend on `threads`.
pub fn find_satisfying_interpretation(
    condition: &MinorCondition,
    template: &PcspTemplate,
    max_arity: usize,
    budget: u64,
    threads: usize,
) -> Result<Option<Interpretation>> {
    if let Some((symbol, arity)) = condition.symbols.iter().find(|&&(_, a)| a > max_arity) {
        return Err(Error::ArityBound {
            symbol: symbol.clone(),
            arity: *arity,
            bound: max_arity,
        });
    }
    let n = template.yes.domain_size;
    let mut meter = Budget::new(budget);
    let layout = CellLayout::new(condition, n, budget)?;
    let (class_of, reps) = layout.merge(condition, n, &mut meter)?.classes();
    let num_classes = reps.len();

    let mut builder = ProblemBuilder::new(num_classes, template.no.domain_size);
    let compiled = CompiledTemplate::new(template, &mut builder)?;
    for (s, &(_, arity)) in condition.symbols.iter().enumerate() {
        let base = layout.offsets[s];
        compiled.constrain_symbol(&mut builder, arity, &|cell| class_of[base + cell], &mut meter)?;
    }
    let problem = Arc::new(builder.build());
    let Some(values) = problem.first_solution(budget, threads)? else {
        return Ok(None);
    };

    let mut interp = Interpretation::new(n, template.no.domain_size);
    for (s, (name, arity)) in condition.symbols.iter().enumerate() {
        let base = layout.offsets[s];
        let cells = checked_pow(n, *arity).expect("layout fits");
        let table = (0..cells).map(|c| values[class_of[base + c]]).collect();
        let f = FunctionTable::new(n, template.no.domain_size, *arity, table)?;
        if !is_polymorphism(&f, template, budget)? {
            return Err(Error::VerificationFailed(format!("table for `{name}` is not a polymorphism")));
        }
        interp.insert(name.clone(), f)?;
    }
    if !condition.satisfied_by(&interp)? {
        return Err(Error::VerificationFailed("interpretation violates an equation".into()));
    }
    Ok(Some(interp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{k_coloring, lin, one_in_three_vs_nae, two_sat};
    use crate::condition::{parse_condition, satisfies, tests::EX10, Condition};
    use crate::search::DEFAULT_NODE_BUDGET as B;

    fn minor(src: &str) -> MinorCondition {
        match parse_condition(src).unwrap() {
            Condition::Minor(m) => m,
            Condition::Strong(_) => panic!("not minor: {src}"),
        }
    }

    #[test]
    fn example_10_in_lin5() {
        let t = PcspTemplate::csp(lin(5).unwrap());
        let m = minor(EX10);
        let i = find_satisfying_interpretation(&m, &t, 3, B, 1).unwrap().unwrap();
        assert!(satisfies(&m.to_strong(), &i).unwrap());
        assert!(is_polymorphism(i.get("m").unwrap(), &t, B).unwrap());
    }

    #[test]
    fn no_symmetric_binary_polymorphism_of_k3() {
        let t = PcspTemplate::csp(k_coloring(3).unwrap());
        let m = minor("sym f 2; eq f(x,y) = f(y,x); eq f(x,x) = f(x,x)");
        assert_eq!(find_satisfying_interpretation(&m, &t, 3, B, 1).unwrap(), None);
        assert_eq!(find_satisfying_interpretation(&m, &t, 3, B, 3).unwrap(), None);
    }

    #[test]
    fn majority_friend_in_2sat() {
        let t = PcspTemplate::csp(two_sat());
        let m = minor("sym m 3; eq m(x,x,y)=m(x,x,x); eq m(x,y,x)=m(x,x,x); eq m(y,x,x)=m(x,x,x)");
        let i = find_satisfying_interpretation(&m, &t, 3, B, 1).unwrap().unwrap();
        assert!(m.satisfied_by(&i).unwrap());
    }

    #[test]
    fn trivial_conditions_hold_everywhere() {
        let m = minor("sym f 2; sym g 2; eq f(x,y) = g(y,x)");
        for t in [
            PcspTemplate::csp(k_coloring(3).unwrap()),
            PcspTemplate::csp(two_sat()),
            one_in_three_vs_nae(),
        ] {
            assert!(find_satisfying_interpretation(&m, &t, 2, B, 1).unwrap().is_some());
        }
    }

    #[test]
    fn threads_do_not_change_the_answer() {
        let t = PcspTemplate::csp(k_coloring(3).unwrap());
        let m = minor("sym f 2; sym g 2; eq f(x,y) = g(y,x)");
        let one = find_satisfying_interpretation(&m, &t, 2, B, 1).unwrap();
        let four = find_satisfying_interpretation(&m, &t, 2, B, 4).unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn arity_bound() {
        let t = PcspTemplate::csp(two_sat());
        let m = minor(EX10);
        assert!(matches!(
            find_satisfying_interpretation(&m, &t, 2, B, 1),
            Err(Error::ArityBound { arity: 3, bound: 2, .. })
        ));
    }

    #[test]
    fn budget() {
        let t = PcspTemplate::csp(lin(5).unwrap());
        let m = minor(EX10);
        assert!(matches!(
            find_satisfying_interpretation(&m, &t, 3, 1000, 1),
            Err(Error::ResourceLimit { .. })
        ));
    }
}
