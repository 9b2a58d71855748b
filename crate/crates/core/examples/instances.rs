//! Parsing, normalizing, and brute-force solving primitive positive sentences.

use pcsp_lab::builtin::{k_coloring, one_in_three_vs_nae};
use pcsp_lab::instance::PPInstance;
use pcsp_lab::solver::{brute_force_decide, brute_force_pcsp};
use pcsp_lab::Result;

const BUDGET: u64 = 1_000_000;

fn main() -> Result<()> {
    // Two triangles sharing the edge x1 x2.
    let graph = PPInstance::parse("vars x1 x2 x3 x4 x5\nN(x1,x2) ∧ N(x1,x3) ∧ N(x1,x4) ∧ N(x2,x3) ∧ N(x2,x4)")?;
    let k3 = k_coloring(3)?;
    println!("3-coloring: {:?}", brute_force_decide(&graph, &k3, BUDGET)?);
    println!("2-coloring: {:?}", brute_force_decide(&graph, &k_coloring(2)?, BUDGET)?);

    // Equalities are merged away by normalization.
    let with_eq = PPInstance::parse("vars a b c\nN(a,b) ∧ N(b,c)\neq a c")?;
    let normal = with_eq.normalize();
    print!("normalized:\n{}", normal.to_text());

    // Promise verdicts: yes, no, or outside the promise.
    let t = one_in_three_vs_nae();
    for src in ["vars x y z\nR(x,y,z)", "vars x\nR(x,x,x)", "vars a b c d\nR(a,b,c) ∧ R(a,b,d) ∧ R(c,d,a)"] {
        let inst = PPInstance::parse(src)?;
        println!("{:?}", brute_force_pcsp(&inst, &t, BUDGET)?);
    }

    match PPInstance::parse("vars x\nN(x,y)") {
        Ok(_) => println!("unexpectedly parsed"),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
