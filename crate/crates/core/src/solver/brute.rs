//! Exhaustive backtracking over assignments.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::Result;
use crate::instance::PPInstance;
use crate::search::{ProblemBuilder, TupleSet};
use crate::structure::{PcspTemplate, RelationalStructure};

/// The lexicographically first satisfying assignment, or `None` once all
/// `|S|^vars` assignments are ruled out.
pub fn brute_force_decide(inst: &PPInstance, s: &RelationalStructure, budget: u64) -> Result<Option<Vec<usize>>> {
    brute_force_decide_threads(inst, s, budget, 1)
}

/// [`brute_force_decide`] with the first variable's values split across
/// `threads` threads. The answer is the same for every thread count.
pub fn brute_force_decide_threads(
    inst: &PPInstance,
    s: &RelationalStructure,
    budget: u64,
    threads: usize,
) -> Result<Option<Vec<usize>>> {
    inst.check_signature(&s.signature())?;
    let (normal, map) = inst.normalize_with_map();
    let mut builder = ProblemBuilder::new(normal.variables.len(), s.domain_size);
    let mut sets: HashMap<&str, u32> = HashMap::new();
    for c in &normal.conjuncts {
        let set = match sets.get(c.symbol.as_str()) {
            Some(&id) => id,
            None => {
                let rel = s.relation(&c.symbol).expect("signature checked");
                let id = builder.add_set(TupleSet::from_relation(s.domain_size, rel));
                sets.insert(&c.symbol, id);
                id
            }
        };
        builder.constrain(&c.args, set);
    }
    let problem = Arc::new(builder.build());
    Ok(problem
        .first_solution(budget, threads)?
        .map(|values| map.iter().map(|&m| values[m]).collect()))
}

/// Answer of a promise problem on one instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum PcspVerdict {
    /// True in `A`; carries an `A`-satisfying assignment.
    Yes(Vec<usize>),
    /// False in `B`.
    No,
    /// False in `A` but true in `B`: outside the promise. Carries a
    /// `B`-satisfying assignment.
    Indeterminate(Vec<usize>),
}

pub fn brute_force_pcsp(inst: &PPInstance, template: &PcspTemplate, budget: u64) -> Result<PcspVerdict> {
    brute_force_pcsp_threads(inst, template, budget, 1)
}

pub fn brute_force_pcsp_threads(
    inst: &PPInstance,
    template: &PcspTemplate,
    budget: u64,
    threads: usize,
) -> Result<PcspVerdict> {
    if let Some(a) = brute_force_decide_threads(inst, &template.yes, budget, threads)? {
        return Ok(PcspVerdict::Yes(a));
    }
    Ok(match brute_force_decide_threads(inst, &template.no, budget, threads)? {
        Some(b) => PcspVerdict::Indeterminate(b),
        None => PcspVerdict::No,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{k_coloring, one_in_three_vs_nae};
    use crate::error::Error;
    use crate::search::DEFAULT_NODE_BUDGET as B;

    #[test]
    fn two_triangles_are_3_colorable() {
        let k3 = k_coloring(3).unwrap();
        let inst = PPInstance::parse(
            "vars x1 x2 x3 x4 x5\nN(x1,x2) ∧ N(x1,x3) ∧ N(x1,x4) ∧ N(x2,x3) ∧ N(x2,x4)",
        )
        .unwrap();
        let s = brute_force_decide(&inst, &k3, B).unwrap().unwrap();
        assert!(inst.is_satisfied_by(&s, &k3));
        assert_eq!(s, vec![0, 1, 2, 2, 0]);
    }

    #[test]
    fn loops_and_empty() {
        let k3 = k_coloring(3).unwrap();
        assert_eq!(brute_force_decide(&PPInstance::parse("vars x\nN(x,x)").unwrap(), &k3, B).unwrap(), None);
        assert_eq!(brute_force_decide(&PPInstance::default(), &k3, B).unwrap(), Some(vec![]));
    }

    #[test]
    fn equalities_are_respected() {
        let k3 = k_coloring(3).unwrap();
        let inst = PPInstance::parse("vars a b c\nN(a,b) ∧ N(b,c)\neq a c").unwrap();
        let s = brute_force_decide(&inst, &k3, B).unwrap().unwrap();
        assert_eq!(s[0], s[2]);
        assert!(inst.is_satisfied_by(&s, &k3));
        let bad = PPInstance::parse("vars a b\nN(a,b)\neq a b").unwrap();
        assert_eq!(brute_force_decide(&bad, &k3, B).unwrap(), None);
    }

    #[test]
    fn matches_exhaustive_enumeration() {
        let k3 = k_coloring(3).unwrap();
        let inst = PPInstance::parse("vars a b c d e\nN(a,b) ∧ N(b,c) ∧ N(c,d) ∧ N(d,e) ∧ N(e,a) ∧ N(a,c)").unwrap();
        let first = (0..3usize.pow(5))
            .map(|code| crate::search::digits(3, 5, code))
            .find(|s| inst.is_satisfied_by(s, &k3));
        assert_eq!(brute_force_decide(&inst, &k3, B).unwrap(), first);
        assert_eq!(brute_force_decide_threads(&inst, &k3, B, 3).unwrap(), first);
    }

    #[test]
    fn pcsp_verdicts() {
        let t = one_in_three_vs_nae();
        let yes = PPInstance::parse("vars a b c d\nR(a,b,c) ∧ R(c,d,a)").unwrap();
        assert!(matches!(brute_force_pcsp(&yes, &t, B).unwrap(), PcspVerdict::Yes(_)));
        let no = PPInstance::parse("vars x\nR(x,x,x)").unwrap();
        assert_eq!(brute_force_pcsp(&no, &t, B).unwrap(), PcspVerdict::No);
        // R(x,y,x) forces y = 1, x = 0 in 1IN3; R(y,x,y) then needs x = 1.
        let mid = PPInstance::parse("vars x y\nR(x,y,x) ∧ R(y,x,y)").unwrap();
        let PcspVerdict::Indeterminate(b) = brute_force_pcsp(&mid, &t, B).unwrap() else { panic!() };
        assert!(mid.is_satisfied_by(&b, &t.no));
    }

    #[test]
    fn unknown_symbol() {
        let inst = PPInstance::parse("vars x\nQ(x)").unwrap();
        assert_eq!(
            brute_force_decide(&inst, &k_coloring(2).unwrap(), B).unwrap_err(),
            Error::UnknownSymbol("Q".into())
        );
    }
}
