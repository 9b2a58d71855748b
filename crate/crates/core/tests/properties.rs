use pcsp_lab::builtin::{k_coloring, lin, one_in_three_vs_nae, three_nae, two_sat};
use pcsp_lab::condition::{find_satisfying_interpretation, parse_condition, satisfies, Interpretation, MinorAtom, MinorCondition};
use pcsp_lab::function::{affine, FunctionTable};
use pcsp_lab::generate::random_minor_condition;
use pcsp_lab::instance::{Conjunct, PPInstance};
use pcsp_lab::polymorphism::is_polymorphism_of;
use pcsp_lab::solver::{
    avoid_third, brute_force_decide, eliminate_rational, Elimination, ModPSystem, Rational, RationalLinearSystem,
};
use pcsp_lab::structure::{PcspTemplate, RelationalStructure};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BUDGET: u64 = 10_000_000;

fn instance() -> impl Strategy<Value = PPInstance> {
    (1usize..6).prop_flat_map(|n| {
        let atom = (0usize..4, prop::collection::vec(0..n, 2)).prop_map(|(a, args)| Conjunct {
            symbol: format!("R_{}{}", a / 2, a % 2),
            args,
        });
        (
            prop::collection::vec(atom, 0..6),
            prop::collection::vec((0..n, 0..n), 0..3),
        )
            .prop_map(move |(conjuncts, equalities)| PPInstance {
                variables: (0..n).map(|i| format!("v{i}")).collect(),
                conjuncts,
                equalities,
            })
    })
}

proptest! {
    #[test]
    fn instance_text_roundtrip(inst in instance()) {
        prop_assert_eq!(PPInstance::parse(&inst.to_text()).unwrap(), inst);
    }

    #[test]
    fn normalize_is_idempotent(inst in instance()) {
        let once = inst.normalize();
        prop_assert!(once.is_normalized());
        prop_assert_eq!(once.normalize(), once.clone());
    }

    #[test]
    fn normalize_keeps_the_answer(inst in instance()) {
        let s = two_sat();
        let a = brute_force_decide(&inst, &s, BUDGET).unwrap().is_some();
        let b = brute_force_decide(&inst.normalize(), &s, BUDGET).unwrap().is_some();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn modp_text_roundtrip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for p in [2, 3, 5, 7] {
            let sys = pcsp_lab::generate::random_mod_p(&mut rng, p, 4, 4);
            prop_assert_eq!(ModPSystem::parse(&sys.to_text()).unwrap(), sys);
        }
    }

    #[test]
    fn elimination_and_third_avoidance(rows in prop::collection::vec(
        (prop::collection::vec(-3i64..4, 4), -3i64..4), 0..4)
    ) {
        let sys = RationalLinearSystem::new(
            4,
            rows.iter()
                .map(|(c, d)| (c.iter().map(|&x| Rational::integer(x)).collect(), Rational::integer(*d)))
                .collect(),
        ).unwrap();
        if let Elimination::Solved(ps) = eliminate_rational(&sys) {
            let zero = vec![Rational::zero(); ps.num_parameters()];
            prop_assert!(sys.is_solution(&ps.evaluate(&zero)));
            if let Some(point) = avoid_third(&ps) {
                prop_assert!(sys.is_solution(&point.values));
                prop_assert!(point.values.iter().all(|v| *v != Rational::third()));
            }
        }
    }
}

/// Every instance over `N` on at most three variables with at most two
/// conjuncts and at most one equality.
#[test]
fn normalize_exhaustive_on_k2() {
    let k2 = k_coloring(2).unwrap();
    let mut checked = 0;
    for n in 1..=3usize {
        let atoms: Vec<Vec<usize>> = (0..n * n).map(|i| vec![i / n, i % n]).collect();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
        for mask in 0u32..(1 << atoms.len()) {
            if mask.count_ones() > 2 {
                continue;
            }
            let conjuncts: Vec<Conjunct> = (0..atoms.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| Conjunct { symbol: "N".into(), args: atoms[i].clone() })
                .collect();
            for eq in std::iter::once(None).chain(pairs.iter().copied().map(Some)) {
                let inst = PPInstance {
                    variables: (0..n).map(|i| format!("v{i}")).collect(),
                    conjuncts: conjuncts.clone(),
                    equalities: eq.into_iter().collect(),
                };
                let a = brute_force_decide(&inst, &k2, BUDGET).unwrap();
                let b = brute_force_decide(&inst.normalize(), &k2, BUDGET).unwrap();
                assert_eq!(a.is_some(), b.is_some(), "{}", inst.to_text());
                if let Some(a) = a {
                    assert!(inst.is_satisfied_by(&a, &k2));
                }
                checked += 1;
            }
        }
    }
    assert!(checked > 100);
}

fn random_interpretation(rng: &mut ChaCha8Rng, c: &MinorCondition, n: usize) -> Interpretation {
    let mut i = Interpretation::new(n, n);
    for (name, arity) in &c.symbols {
        let cells = n.pow(*arity as u32);
        let table = (0..cells).map(|_| rng.gen_range(0..n)).collect();
        i.insert(name.clone(), FunctionTable::new(n, n, *arity, table).unwrap()).unwrap();
    }
    i
}

/// Renames every symbol and variable of a minor condition.
fn renamed(c: &MinorCondition) -> MinorCondition {
    let mut out = MinorCondition::new();
    for (name, arity) in &c.symbols {
        out.add_symbol(format!("{name}_renamed"), *arity).unwrap();
    }
    // Reverse the variable order so interned indices change too.
    let vars: Vec<usize> = c.variables.iter().rev().map(|v| out.variable(&format!("w_{v}"))).collect();
    let var = |v: usize| vars[c.variables.len() - 1 - v];
    for (l, r) in &c.equations {
        out.add_equation(
            MinorAtom { symbol: l.symbol, args: l.args.iter().map(|&v| var(v)).collect() },
            MinorAtom { symbol: r.symbol, args: r.args.iter().map(|&v| var(v)).collect() },
        )
        .unwrap();
    }
    out
}

#[test]
fn satisfaction_paths_agree_and_respect_renaming() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut hits = 0;
    for _ in 0..400 {
        let c = random_minor_condition(&mut rng, 2, 3, 2);
        let r = renamed(&c);
        assert_eq!(c.is_trivial(), r.is_trivial());
        for n in [2, 3] {
            let i = random_interpretation(&mut rng, &c, n);
            let mut j = Interpretation::new(n, n);
            for (name, t) in &i.tables {
                j.insert(format!("{name}_renamed"), t.clone()).unwrap();
            }
            let direct = c.satisfied_by(&i).unwrap();
            assert_eq!(direct, satisfies(&c.to_strong(), &i).unwrap(), "{}", c.to_text());
            assert_eq!(direct, r.satisfied_by(&j).unwrap());
            assert_eq!(direct, satisfies(&r.to_strong(), &j).unwrap());
            hits += usize::from(direct);
        }
    }
    assert!(hits > 0);
}

fn small_templates() -> Vec<PcspTemplate> {
    vec![
        PcspTemplate::csp(k_coloring(2).unwrap()),
        PcspTemplate::csp(k_coloring(3).unwrap()),
        PcspTemplate::csp(two_sat()),
        PcspTemplate::csp(three_nae(2).unwrap()),
        PcspTemplate::csp(lin(2).unwrap()),
        one_in_three_vs_nae(),
    ]
}

#[test]
fn trivial_conditions_are_satisfiable_everywhere() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut trivial = 0;
    for _ in 0..150 {
        let c = random_minor_condition(&mut rng, 2, 3, 3);
        if !c.is_trivial() {
            continue;
        }
        trivial += 1;
        for t in small_templates() {
            let found = find_satisfying_interpretation(&c, &t, 3, BUDGET, 1).unwrap();
            assert!(found.is_some(), "{} over {}", c.to_text(), t.yes.name);
        }
    }
    assert!(trivial >= 10);
}

#[test]
fn affine_maps_with_unit_sum_preserve_lin5() {
    let l5 = lin(5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let k = rng.gen_range(1..=3);
        let mut t: Vec<usize> = (0..k - 1).map(|_| rng.gen_range(0..5)).collect();
        let partial: usize = t.iter().sum();
        t.push((1 + 5 * k - partial % 5) % 5);
        let f = affine(5, &t).unwrap();
        assert!(is_polymorphism_of(&f, &l5, BUDGET).unwrap(), "{t:?}");
    }
}

#[test]
fn structure_and_condition_text_roundtrips() {
    let structures: Vec<RelationalStructure> =
        vec![k_coloring(4).unwrap(), two_sat(), three_nae(3).unwrap(), lin(3).unwrap()];
    for s in structures {
        assert_eq!(RelationalStructure::parse(&s.to_text()).unwrap(), s);
    }
    let t = one_in_three_vs_nae();
    assert_eq!(PcspTemplate::parse(&t.to_text()).unwrap(), t);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..50 {
        let c = random_minor_condition(&mut rng, 3, 3, 4);
        let back = parse_condition(&c.to_text()).unwrap();
        assert_eq!(back.to_text(), c.to_text());
        assert_eq!(back.as_minor().unwrap().equations.len(), c.equations.len());
        let i = random_interpretation(&mut rng, &c, 3);
        assert_eq!(Interpretation::parse(&i.to_text()).unwrap(), i);
    }
}
