//! Compatibility checks and polymorphism enumeration.
//!
//! A function `f: A^k -> B` is compatible with a pair `(R^A, R^B)` when
//! applying `f` row-wise to any `k` columns drawn from `R^A` lands in
//! `R^B`. Nullary functions are allowed: the only choice of zero columns
//! is the empty one, so a constant `c` is compatible iff `(c, ..., c)` is
//! in `R^B`.

use std::collections::HashSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::function::FunctionTable;
use crate::search::{checked_pow, radix, Budget, ProblemBuilder, Solutions, TupleSet};
use crate::structure::{PcspTemplate, Relation, RelationalStructure};

/// Checks `f` against one relation pair by trying every choice of `k`
/// columns from `ra`.
pub fn is_compatible(f: &FunctionTable, ra: &Relation, rb: &Relation, budget: u64) -> Result<bool> {
    if ra.arity != rb.arity {
        return Err(Error::ArityMismatch {
            symbol: rb.symbol.clone(),
            expected: ra.arity,
            found: rb.arity,
        });
    }
    let choices = checked_pow(ra.len(), f.arity).unwrap_or(usize::MAX);
    if choices as u64 > budget {
        return Err(Error::ResourceLimit { budget });
    }
    let target: HashSet<&[usize]> = rb.tuples.iter().map(Vec::as_slice).collect();
    let m = ra.arity;
    let mut pick = vec![0usize; f.arity];
    let mut image = vec![0usize; m];
    let mut args = vec![0usize; f.arity];
    for _ in 0..choices {
        for (p, slot) in image.iter_mut().enumerate() {
            for (i, &c) in pick.iter().enumerate() {
                args[i] = ra.tuples[c][p];
            }
            *slot = f.table[f.index_of(&args)];
        }
        if !target.contains(image.as_slice()) {
            return Ok(false);
        }
        // odometer step
        for digit in pick.iter_mut().rev() {
            *digit += 1;
            if *digit < ra.len() {
                break;
            }
            *digit = 0;
        }
    }
    Ok(true)
}

/// `f` is in `Pol(A, B)`. A plain structure is the template `(S, S)`; see
/// [`PcspTemplate::csp`].
pub fn is_polymorphism(f: &FunctionTable, template: &PcspTemplate, budget: u64) -> Result<bool> {
    check_domains(f, template)?;
    for (ra, rb) in template.yes.paired(&template.no)? {
        if !is_compatible(f, ra, rb, budget)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Shorthand for `is_polymorphism(f, &PcspTemplate::csp(s.clone()), budget)`.
pub fn is_polymorphism_of(f: &FunctionTable, s: &RelationalStructure, budget: u64) -> Result<bool> {
    is_polymorphism(f, &PcspTemplate::csp(s.clone()), budget)
}

fn check_domains(f: &FunctionTable, template: &PcspTemplate) -> Result<()> {
    if f.in_domain != template.yes.domain_size || f.out_domain != template.no.domain_size {
        return Err(Error::DomainMismatch(format!(
            "function maps {} -> {} elements but the template is {} -> {}",
            f.in_domain, f.out_domain, template.yes.domain_size, template.no.domain_size
        )));
    }
    Ok(())
}

/// Relation pairs of a template registered with a [`ProblemBuilder`].
pub(crate) struct CompiledTemplate<'t> {
    pairs: Vec<(&'t Relation, u32)>,
    in_domain: usize,
}

impl<'t> CompiledTemplate<'t> {
    pub fn new(template: &'t PcspTemplate, builder: &mut ProblemBuilder) -> Result<Self> {
        let mut pairs = Vec::new();
        for (ra, rb) in template.yes.paired(&template.no)? {
            // A full target relation constrains nothing.
            if rb.is_full(template.no.domain_size) {
                continue;
            }
            let set = builder.add_set(TupleSet::from_relation(template.no.domain_size, rb));
            pairs.push((ra, set));
        }
        Ok(CompiledTemplate {
            pairs,
            in_domain: template.yes.domain_size,
        })
    }

    /// Adds the compatibility constraints of one `arity`-ary symbol whose
    /// cell `i` (table index) lives in search variable `cell_var(i)`.
    pub fn constrain_symbol(
        &self,
        builder: &mut ProblemBuilder,
        arity: usize,
        cell_var: &dyn Fn(usize) -> usize,
        budget: &mut Budget,
    ) -> Result<()> {
        for &(ra, set) in &self.pairs {
            let choices = checked_pow(ra.len(), arity).unwrap_or(usize::MAX);
            budget.spend(choices as u64)?;
            let m = ra.arity;
            let mut pick = vec![0usize; arity];
            let mut scope = vec![0usize; m];
            for _ in 0..choices {
                for (p, slot) in scope.iter_mut().enumerate() {
                    let cell = radix(self.in_domain, pick.iter().map(|&c| ra.tuples[c][p]));
                    *slot = cell_var(cell);
                }
                builder.constrain(&scope, set);
                for digit in pick.iter_mut().rev() {
                    *digit += 1;
                    if *digit < ra.len() {
                        break;
                    }
                    *digit = 0;
                }
            }
        }
        Ok(())
    }
}

/// Lazy stream of the `k`-ary polymorphisms of a template, in lexicographic
/// table order. Each item is produced on demand; dropping the stream stops
/// the search.
pub struct Polymorphisms {
    solutions: Solutions,
    in_domain: usize,
    out_domain: usize,
    arity: usize,
}

impl Iterator for Polymorphisms {
    type Item = Result<FunctionTable>;

    fn next(&mut self) -> Option<Self::Item> {
        let table = match self.solutions.next()? {
            Ok(t) => t,
            Err(e) => return Some(Err(e)),
        };
        Some(Ok(FunctionTable {
            in_domain: self.in_domain,
            out_domain: self.out_domain,
            arity: self.arity,
            table,
        }))
    }
}

/// Enumerates `Pol^k(A, B)` by backtracking over table cells.
///
/// Building the constraints and every value trial during the search both
/// count against `budget`.
pub fn enumerate_polymorphisms(template: &PcspTemplate, arity: usize, budget: u64) -> Result<Polymorphisms> {
    let n = template.yes.domain_size;
    let cells = checked_pow(n, arity)
        .filter(|&c| c as u64 <= budget)
        .ok_or(Error::ResourceLimit { budget })?;
    let mut meter = Budget::new(budget);
    let mut builder = ProblemBuilder::new(cells, template.no.domain_size);
    let compiled = CompiledTemplate::new(template, &mut builder)?;
    compiled.constrain_symbol(&mut builder, arity, &|cell| cell, &mut meter)?;
    let problem = Arc::new(builder.build());
    Ok(Polymorphisms {
        solutions: problem.solutions(budget),
        in_domain: n,
        out_domain: template.no.domain_size,
        arity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{k_coloring, lin, one_in_three_vs_nae, three_nae, two_sat};
    use crate::function::{affine, majority2, projection, threshold13};
    use crate::search::DEFAULT_NODE_BUDGET as B;

    fn filter_oracle(t: &PcspTemplate, k: usize) -> Vec<FunctionTable> {
        FunctionTable::all(t.yes.domain_size, t.no.domain_size, k)
            .filter(|f| is_polymorphism(f, t, B).unwrap())
            .collect()
    }

    fn enumerate(t: &PcspTemplate, k: usize) -> Vec<FunctionTable> {
        enumerate_polymorphisms(t, k, B).unwrap().map(Result::unwrap).collect()
    }

    #[test]
    fn majority_preserves_r00() {
        let s = two_sat();
        let r = s.relation("R_00").unwrap();
        assert!(is_compatible(&majority2(), r, r, B).unwrap());
        assert!(is_polymorphism_of(&majority2(), &s, B).unwrap());
    }

    /// Four column pairs from N_2, checked by hand: (01,01)->00? no:
    /// rows are (0,0)->0 and (1,1)->0, i.e. (0,0) which is not in N_2.
    #[test]
    fn xor_on_k2() {
        let xor = FunctionTable::from_fn(2, 2, 2, |x| (x[0] + x[1]) % 2);
        let k2 = k_coloring(2).unwrap();
        let n2 = &k2.relations[0];
        let mut hand = true;
        for c1 in &n2.tuples {
            for c2 in &n2.tuples {
                let row: Vec<usize> = (0..2).map(|p| (c1[p] + c2[p]) % 2).collect();
                hand &= n2.contains(&row);
            }
        }
        assert_eq!(is_compatible(&xor, n2, n2, B).unwrap(), hand);
        assert!(!hand);
    }

    #[test]
    fn threshold_is_compatible_with_onein3_nae() {
        let t = one_in_three_vs_nae();
        let (ra, rb) = (&t.yes.relations[0], &t.no.relations[0]);
        // brute force over the 9 column pairs
        let f = threshold13(2).unwrap();
        let mut ok = true;
        for c1 in &ra.tuples {
            for c2 in &ra.tuples {
                let row: Vec<usize> = (0..3).map(|p| usize::from(3 * (c1[p] + c2[p]) > 2)).collect();
                ok &= rb.contains(&row);
            }
        }
        assert!(ok);
        assert!(is_compatible(&f, ra, rb, B).unwrap());
        for k in [1, 2, 4, 5, 7] {
            assert!(is_polymorphism(&threshold13(k).unwrap(), &t, B).unwrap(), "k = {k}");
        }
    }

    #[test]
    fn projections_are_polymorphisms_everywhere() {
        for s in [k_coloring(3).unwrap(), two_sat(), three_nae(2).unwrap(), crate::builtin::one_in_three()] {
            let n = s.domain_size;
            for k in 1..=3 {
                for i in 1..=k {
                    assert!(is_polymorphism_of(&projection(k, i, n).unwrap(), &s, B).unwrap());
                }
            }
        }
    }

    #[test]
    fn complement_preserves_nae() {
        let neg = FunctionTable::from_fn(2, 2, 1, |x| 1 - x[0]);
        assert!(is_polymorphism_of(&neg, &three_nae(2).unwrap(), B).unwrap());
    }

    #[test]
    fn affine_maps_on_lin5() {
        let s = lin(5).unwrap();
        // 2 + 4 = 6 = 1 (mod 5): affine, hence a polymorphism.
        assert!(is_polymorphism_of(&affine(5, &[2, 4]).unwrap(), &s, B).unwrap());
        // 2 + 2 = 4: not affine.
        let f = FunctionTable::from_fn(5, 5, 2, |x| (2 * x[0] + 2 * x[1]) % 5);
        assert!(!is_polymorphism_of(&f, &s, B).unwrap());
        // (1,0,0) and (0,1,0) satisfy x+y+z=1 but map to (2,2,0), which does not.
        let rel = s.relation("L_1111").unwrap();
        assert!(rel.contains(&[1, 0, 0]) && rel.contains(&[0, 1, 0]));
        assert!(!rel.contains(&[2, 2, 0]));
        assert!(!is_compatible(&f, rel, rel, B).unwrap());
    }

    #[test]
    fn domain_mismatch_is_an_error() {
        let t = PcspTemplate::csp(k_coloring(3).unwrap());
        assert!(matches!(
            is_polymorphism(&majority2(), &t, B),
            Err(Error::DomainMismatch(_))
        ));
    }

    #[test]
    fn compatibility_budget() {
        let s = lin(5).unwrap();
        let r = s.relation("L_1234").unwrap();
        let f = affine(5, &[1, 1, 1, 1, 1, 1]).unwrap();
        assert!(matches!(is_compatible(&f, r, r, 1000), Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn unary_polymorphisms_of_k3_are_permutations() {
        let t = PcspTemplate::csp(k_coloring(3).unwrap());
        let found = enumerate(&t, 1);
        assert_eq!(found.len(), 6);
        assert_eq!(found, filter_oracle(&t, 1));
        for f in &found {
            let mut v = f.table.clone();
            v.sort();
            assert_eq!(v, vec![0, 1, 2]);
        }
    }

    #[test]
    fn binary_polymorphisms_of_k3_are_essentially_unary() {
        let t = PcspTemplate::csp(k_coloring(3).unwrap());
        let found = enumerate(&t, 2);
        assert_eq!(found, filter_oracle(&t, 2));
        assert_eq!(found.len(), 12);
        for f in &found {
            let first = (0..3).all(|x| (0..3).all(|y| f.table[3 * x + y] == f.table[3 * x]));
            let second = (0..3).all(|x| (0..3).all(|y| f.table[3 * x + y] == f.table[y]));
            assert!(first ^ second);
        }
    }

    #[test]
    fn unary_polymorphisms_of_onein3_nae() {
        let t = one_in_three_vs_nae();
        let found = enumerate(&t, 1);
        assert_eq!(found, filter_oracle(&t, 1));
        let tables: Vec<_> = found.iter().map(|f| f.table.clone()).collect();
        assert_eq!(tables, vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn nullary_polymorphisms() {
        // (c,c,c) is never in NAE, so there are no constants.
        let t = one_in_three_vs_nae();
        assert!(enumerate(&t, 0).is_empty());
        assert!(filter_oracle(&t, 0).is_empty());
        let s = RelationalStructure::new(
            "S",
            2,
            vec![Relation::new("R", 2, vec![vec![0, 0], vec![0, 1]])],
        )
        .unwrap();
        let t = PcspTemplate::csp(s);
        let found = enumerate(&t, 0);
        assert_eq!(found, filter_oracle(&t, 0));
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].table, vec![0]);
    }

    #[test]
    fn enumeration_matches_filter_on_small_templates() {
        let templates = vec![
            PcspTemplate::csp(two_sat()),
            PcspTemplate::csp(k_coloring(2).unwrap()),
            PcspTemplate::csp(three_nae(2).unwrap()),
            one_in_three_vs_nae(),
            crate::builtin::builtin("coloring-pair", &[2, 3]).unwrap().into_template(),
        ];
        for t in &templates {
            for k in 0..=2 {
                let out = t.no.domain_size as f64;
                let cells = (t.yes.domain_size as f64).powi(k);
                if out.powf(cells) > 1e6 {
                    continue;
                }
                let found = enumerate(t, k as usize);
                assert_eq!(found, filter_oracle(t, k as usize), "{} arity {k}", t.yes.name);
                for i in 1..=k as usize {
                    if t.yes.domain_size == t.no.domain_size {
                        assert!(found.contains(&projection(k as usize, i, t.yes.domain_size).unwrap()));
                    }
                }
            }
        }
    }

    #[test]
    fn enumeration_on_lin5_binary() {
        let t = PcspTemplate::csp(lin(5).unwrap());
        let found = enumerate(&t, 2);
        let expected: Vec<_> = (0..5)
            .map(|a| affine(5, &[a, (6 - a) % 5]).unwrap())
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        assert_eq!(found, expected);
    }

    #[test]
    fn stream_can_stop_early() {
        let t = PcspTemplate::csp(k_coloring(3).unwrap());
        let mut stream = enumerate_polymorphisms(&t, 2, B).unwrap();
        let first = stream.next().unwrap().unwrap();
        assert_eq!(first.table, vec![0, 0, 0, 1, 1, 1, 2, 2, 2]);
    }

    #[test]
    fn enumeration_budget() {
        let t = PcspTemplate::csp(k_coloring(3).unwrap());
        let mut stream = enumerate_polymorphisms(&t, 2, 100).unwrap();
        assert!(stream.any(|r| matches!(r, Err(Error::ResourceLimit { .. }))));
    }

    #[test]
    fn composition_closure_on_2sat() {
        let s = two_sat();
        let t = PcspTemplate::csp(s.clone());
        let pol1 = enumerate(&t, 1);
        let pol2 = enumerate(&t, 2);
        for f in pol1.iter().chain(&pol2) {
            for m in [&pol1, &pol2] {
                for g1 in m.iter() {
                    for g2 in m.iter() {
                        let inner: Vec<FunctionTable> = if f.arity == 1 { vec![g1.clone()] } else { vec![g1.clone(), g2.clone()] };
                        let c = f.compose(&inner).unwrap();
                        assert!(is_polymorphism_of(&c, &s, B).unwrap());
                    }
                }
            }
        }
    }
}
