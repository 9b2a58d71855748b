//! Instances to minor conditions and back.

use pcsp_lab::builtin::{k_coloring, one_in_three_vs_nae};
use pcsp_lab::condition::{find_satisfying_interpretation, parse_condition, Condition};
use pcsp_lab::instance::PPInstance;
use pcsp_lab::reduction::{certificate_to_assignment, condition_to_instance, instance_to_condition};
use pcsp_lab::solver::brute_force_decide;
use pcsp_lab::Result;

const BUDGET: u64 = 10_000_000;

fn main() -> Result<()> {
    let t = one_in_three_vs_nae();
    let inst = PPInstance::parse(include_str!("data/two_edges.pp"))?;
    let art = instance_to_condition(&inst, &t)?;
    print!("{}{}", art.condition.to_text(), art.variable_symbols.to_text());
    println!("trivial: {}", art.condition.is_trivial());

    // Solve the condition in Pol(1IN3, 3NAE_2) and read off a 3NAE_2 assignment.
    let interp = find_satisfying_interpretation(&art.condition, &t, 3, BUDGET, 1)?.expect("a yes-instance");
    let assignment = certificate_to_assignment(&interp, &art.variable_symbols, &inst, &t)?;
    println!("decoded: {assignment:?}");

    // Backwards: a condition over K3 becomes an instance whose solutions are the tables.
    let Condition::Minor(sym) = parse_condition("sym f 2; eq f(x,y) = f(y,x)")? else { unreachable!() };
    let k3 = k_coloring(3)?;
    let cells = condition_to_instance(&sym, &k3, BUDGET)?;
    print!("{}", cells.instance.to_text());
    match brute_force_decide(&cells.instance, &k3, BUDGET)? {
        Some(a) => print!("symmetric polymorphism:\n{}", cells.interpretation(&a, 3)?.to_text()),
        None => println!("K3 has no symmetric binary polymorphism"),
    }
    Ok(())
}
