//! Seeded instance generators and the small exhaustive corpora used by
//! the self-test harness.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::condition::{MinorAtom, MinorCondition};
use crate::instance::{Conjunct, PPInstance};
use crate::solver::ModPSystem;

fn variables(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

/// A `1IN3` instance with a planted solution.
///
/// Each hyperedge takes one variable set to 1 and two (possibly equal)
/// variables set to 0, in random positions. Returns the instance and the
/// planted assignment.
pub fn planted_one_in_three(rng: &mut impl Rng, max_vars: usize, max_edges: usize) -> (PPInstance, Vec<usize>) {
    let n = rng.gen_range(2..=max_vars.max(2));
    let mut planted: Vec<usize> = (0..n).map(|_| usize::from(rng.gen_ratio(1, 3))).collect();
    // at least one of each value
    let i = rng.gen_range(0..n);
    let j = (i + rng.gen_range(1..n)) % n;
    planted[i] = 1;
    planted[j] = 0;
    let ones: Vec<usize> = (0..n).filter(|&v| planted[v] == 1).collect();
    let zeros: Vec<usize> = (0..n).filter(|&v| planted[v] == 0).collect();
    let m = rng.gen_range(1..=max_edges.max(1));
    let conjuncts = (0..m)
        .map(|_| {
            let mut args = vec![
                *ones.choose(rng).expect("a one"),
                *zeros.choose(rng).expect("a zero"),
                *zeros.choose(rng).expect("a zero"),
            ];
            args.shuffle(rng);
            Conjunct { symbol: "R".into(), args }
        })
        .collect();
    (
        PPInstance {
            variables: variables(n),
            conjuncts,
            equalities: Vec::new(),
        },
        planted,
    )
}

/// Random clauses `R_ab(x, y)` over at most `max_vars` variables.
pub fn random_2sat(rng: &mut impl Rng, max_vars: usize, max_clauses: usize) -> PPInstance {
    let n = rng.gen_range(1..=max_vars.max(1));
    let m = rng.gen_range(0..=max_clauses);
    let conjuncts = (0..m)
        .map(|_| Conjunct {
            symbol: format!("R_{}{}", rng.gen_range(0..2), rng.gen_range(0..2)),
            args: vec![rng.gen_range(0..n), rng.gen_range(0..n)],
        })
        .collect();
    PPInstance {
        variables: variables(n),
        conjuncts,
        equalities: Vec::new(),
    }
}

/// A random system over `Z_p` with up to `max_vars` unknowns and
/// `max_rows` rows.
pub fn random_mod_p(rng: &mut impl Rng, p: usize, max_vars: usize, max_rows: usize) -> ModPSystem {
    let n = rng.gen_range(1..=max_vars.max(1));
    let m = rng.gen_range(0..=max_rows);
    let rows = (0..m)
        .map(|_| ((0..n).map(|_| rng.gen_range(0..p)).collect(), rng.gen_range(0..p)))
        .collect();
    ModPSystem::new(p, n, rows).expect("entries reduced mod p")
}

/// A random minor condition over the variables `x, y, z`.
pub fn random_minor_condition(rng: &mut impl Rng, max_symbols: usize, max_arity: usize, max_equations: usize) -> MinorCondition {
    let mut c = MinorCondition::new();
    let k = rng.gen_range(1..=max_symbols.max(1));
    for name in ["f", "g", "h", "k"].into_iter().take(k) {
        c.add_symbol(name, rng.gen_range(1..=max_arity.max(1))).expect("distinct names");
    }
    let vars: Vec<usize> = ["x", "y", "z"].iter().map(|v| c.variable(v)).collect();
    let m = rng.gen_range(1..=max_equations.max(1));
    for _ in 0..m {
        let [l, r] = [(); 2].map(|_| {
            let symbol = rng.gen_range(0..k);
            let args = (0..c.symbols[symbol].1).map(|_| *vars.choose(rng).expect("vars")).collect();
            MinorAtom { symbol, args }
        });
        c.add_equation(l, r).expect("well-formed");
    }
    c
}

/// All permutations of `0..n` in lexicographic order.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

type Atoms = Vec<[usize; 3]>;

/// Every set of at most `max_conjuncts` atoms `R(a,b,c)` that uses exactly
/// the variables `0..n` for some `n <= max_vars`, one representative per
/// renaming class. The empty instance is included once.
pub fn small_ternary_instances(symbol: &str, max_vars: usize, max_conjuncts: usize) -> Vec<PPInstance> {
    let mut seen: BTreeSet<(usize, Atoms)> = BTreeSet::new();
    for n in 0..=max_vars {
        let atoms: Atoms = (0..n.pow(3)).map(|i| [i / (n * n), i / n % n, i % n]).collect();
        let perms = permutations(n);
        let mut chosen: Vec<usize> = Vec::new();
        collect_sets(&atoms, max_conjuncts, 0, &mut chosen, &mut |set| {
            let used: BTreeSet<usize> = set.iter().flatten().copied().collect();
            if used.len() != n {
                return;
            }
            let canonical = perms
                .iter()
                .map(|p| {
                    let mut renamed: Atoms = set.iter().map(|a| [p[a[0]], p[a[1]], p[a[2]]]).collect();
                    renamed.sort();
                    renamed
                })
                .min()
                .expect("at least one permutation");
            seen.insert((n, canonical));
        });
    }
    seen.into_iter()
        .map(|(n, atoms)| PPInstance {
            variables: variables(n),
            conjuncts: atoms
                .into_iter()
                .map(|a| Conjunct { symbol: symbol.to_string(), args: a.to_vec() })
                .collect(),
            equalities: Vec::new(),
        })
        .collect()
}

fn collect_sets<T: Clone>(items: &[T], max: usize, start: usize, chosen: &mut Vec<usize>, visit: &mut dyn FnMut(Vec<T>)) {
    visit(chosen.iter().map(|&i| items[i].clone()).collect());
    if chosen.len() == max {
        return;
    }
    for i in start..items.len() {
        chosen.push(i);
        collect_sets(items, max, i + 1, chosen, visit);
        chosen.pop();
    }
}

/// Every minor condition over the given symbols with at most
/// `max_equations` equations between distinct atoms over the variables
/// `x, y, z`, one representative per renaming of variables, sides, and
/// equation order.
pub fn small_minor_conditions(symbols: &[(&str, usize)], max_equations: usize) -> Vec<MinorCondition> {
    const VARS: usize = 3;
    let mut atoms: Vec<(usize, Vec<usize>)> = Vec::new();
    for (s, &(_, a)) in symbols.iter().enumerate() {
        for code in 0..VARS.pow(a as u32) {
            atoms.push((s, crate::search::digits(VARS, a, code)));
        }
    }
    let mut pairs = Vec::new();
    for i in 0..atoms.len() {
        for j in i + 1..atoms.len() {
            pairs.push((atoms[i].clone(), atoms[j].clone()));
        }
    }
    type Eq = ((usize, Vec<usize>), (usize, Vec<usize>));
    let perms = permutations(VARS);
    let mut seen: BTreeSet<Vec<Eq>> = BTreeSet::new();
    let mut chosen = Vec::new();
    collect_sets(&pairs, max_equations, 0, &mut chosen, &mut |set: Vec<Eq>| {
        let canonical = perms
            .iter()
            .map(|p| {
                let mut renamed: Vec<Eq> = set
                    .iter()
                    .map(|(l, r)| {
                        let l = (l.0, l.1.iter().map(|&v| p[v]).collect::<Vec<_>>());
                        let r = (r.0, r.1.iter().map(|&v| p[v]).collect::<Vec<_>>());
                        if l <= r { (l, r) } else { (r, l) }
                    })
                    .collect();
                renamed.sort();
                renamed
            })
            .min()
            .expect("at least one permutation");
        seen.insert(canonical);
    });
    seen.into_iter()
        .map(|eqs| {
            let mut c = MinorCondition::new();
            for &(name, arity) in symbols {
                c.add_symbol(name, arity).expect("distinct names");
            }
            for v in ["x", "y", "z"] {
                c.variable(v);
            }
            for ((ls, la), (rs, ra)) in eqs {
                c.add_equation(MinorAtom { symbol: ls, args: la }, MinorAtom { symbol: rs, args: ra })
                    .expect("well-formed");
            }
            c
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{one_in_three, two_sat};
    use rand::SeedableRng;

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(4).len(), 24);
        assert_eq!(permutations(0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn small_instance_corpus() {
        let corpus = small_ternary_instances("R", 4, 3);
        assert!(corpus.len() >= 500, "{}", corpus.len());
        assert_eq!(corpus.iter().filter(|i| i.conjuncts.is_empty()).count(), 1);
        // one variable: R(x,x,x) only
        assert_eq!(corpus.iter().filter(|i| i.variables.len() == 1).count(), 1);
        // two variables: 6 atoms use both; sets of 1..3 of the 8 atoms that use both vars
        assert!(corpus.iter().all(|i| i.conjuncts.len() <= 3 && i.variables.len() <= 4));
    }

    #[test]
    fn small_condition_corpus() {
        let one = small_minor_conditions(&[("f", 1)], 2);
        // atoms f(x), f(y), f(z): equations up to renaming are f(x)=f(y);
        // pairs of them: {xy,xz} ~ {xy,yz} ~ ..., {xy, xy} excluded.
        assert_eq!(one.len(), 3);
        let two = small_minor_conditions(&[("f", 2), ("g", 2)], 2);
        assert!(two.len() > 1000);
    }

    #[test]
    fn planted_instances_hold() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let s = one_in_three();
        for _ in 0..50 {
            let (inst, planted) = planted_one_in_three(&mut rng, 30, 60);
            assert!(inst.variables.len() <= 30 && inst.conjuncts.len() <= 60);
            assert!(inst.is_satisfied_by(&planted, &s));
        }
    }

    #[test]
    fn random_shapes() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let s = two_sat();
        for _ in 0..20 {
            let inst = random_2sat(&mut rng, 10, 20);
            inst.check_signature(&s.signature()).unwrap();
            let sys = random_mod_p(&mut rng, 5, 3, 3);
            assert!(sys.num_vars <= 3 && sys.rows.len() <= 3);
            let c = random_minor_condition(&mut rng, 2, 3, 3);
            assert!(c.symbols.len() <= 2 && c.max_arity() <= 3);
        }
    }
}
