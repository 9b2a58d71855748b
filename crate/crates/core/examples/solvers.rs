//! The polynomial-time solvers: 2SAT, linear equations mod p, and (1IN3, 3NAE_2).

use pcsp_lab::builtin::three_nae;
use pcsp_lab::generate::planted_one_in_three;
use pcsp_lab::instance::PPInstance;
use pcsp_lab::solver::{
    avoid_third, build_1in3_system, eliminate_rational, lin_instance_to_system, solve_1in3_nae, solve_2sat,
    solve_mod_p, Elimination, ModPSystem,
};
use pcsp_lab::Result;
use rand::SeedableRng;

fn main() -> Result<()> {
    // x -> y, y -> z, x: forces all three true.
    let sat = PPInstance::parse("vars x y z\nR_10(x,y) ∧ R_10(y,z) ∧ R_00(x,x)")?;
    println!("2SAT: {:?}", solve_2sat(&sat)?);

    let sys = ModPSystem::parse("modp 5\n1 1 0 | 3\n0 1 4 | 1\nend\n")?;
    println!("Z_5: {:?}", solve_mod_p(&sys)?);
    let lin = PPInstance::parse("vars a b c\nL_1110(a,b,c) ∧ L_1002(a,a,a)")?;
    println!("3LIN_3 as a system:\n{}", lin_instance_to_system(&lin, 3)?.to_text());

    // One hyperedge: the solution space is x + y + z = 1 with two parameters.
    let edge = PPInstance::parse("vars x y z\nR(x,y,z)")?;
    if let Elimination::Solved(ps) = eliminate_rational(&build_1in3_system(&edge)?) {
        let point = avoid_third(&ps).expect("not forced to 1/3");
        let shown: Vec<String> = point.values.iter().map(ToString::to_string).collect();
        println!("third-free point: {}", shown.join(" "));
    }

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    let (inst, _) = planted_one_in_three(&mut rng, 12, 16);
    let out = solve_1in3_nae(&inst)?;
    println!("planted instance: {} hyperedges", inst.conjuncts.len());
    println!("coloring {:?}", out.coloring);
    println!("valid 3NAE_2 coloring: {}", inst.is_satisfied_by(&out.coloring, &three_nae(2)?));
    Ok(())
}
