//! Minor conditions: parsing, triviality, and satisfaction in polymorphism clones.

use pcsp_lab::builtin::{k_coloring, lin, two_sat};
use pcsp_lab::condition::{find_satisfying_interpretation, parse_condition, satisfies, Condition};
use pcsp_lab::structure::PcspTemplate;
use pcsp_lab::Result;

const BUDGET: u64 = 100_000_000;

fn main() -> Result<()> {
    let sources = [
        ("m(x,x,y)=m(y,y,y)", include_str!("data/ex10.cond")),
        ("swap", "sym f 2; sym g 2; eq f(x,y) = g(y,x)"),
        (
            "minor majority",
            "sym m 3; eq m(x,x,y)=m(x,x,x); eq m(x,y,x)=m(x,x,x); eq m(y,x,x)=m(x,x,x)",
        ),
    ];
    let templates = [
        ("2SAT", PcspTemplate::csp(two_sat())),
        ("K3", PcspTemplate::csp(k_coloring(3)?)),
        ("3LIN_5", PcspTemplate::csp(lin(5)?)),
    ];
    for (name, src) in sources {
        let Condition::Minor(m) = parse_condition(src)? else { unreachable!() };
        match m.projection_choice() {
            Some(p) => print!("{name}: trivial\n{}", p.to_text()),
            None => println!("{name}: nontrivial"),
        }
        for (tname, t) in &templates {
            let found = find_satisfying_interpretation(&m, t, 3, BUDGET, 1)?;
            println!("  in Pol({tname}): {}", if found.is_some() { "satisfied" } else { "not satisfied" });
        }
    }

    // Strong conditions with bare variables are checked by exhaustive projection search.
    let strong = parse_condition(include_str!("data/majority.cond"))?.to_strong();
    println!("majority identities trivial: {:?}", strong.triviality_witness(BUDGET)?.is_some());

    // Witness tables verify through the term evaluator too.
    let Condition::Minor(m) = parse_condition(include_str!("data/ex10.cond"))? else { unreachable!() };
    let lin5 = PcspTemplate::csp(lin(5)?);
    if let Some(i) = find_satisfying_interpretation(&m, &lin5, 3, BUDGET, 1)? {
        println!("3LIN_5 witness verifies: {}", satisfies(&m.to_strong(), &i)?);
    }
    Ok(())
}
