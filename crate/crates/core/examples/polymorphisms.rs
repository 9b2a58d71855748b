//! Enumerating and checking polymorphisms.

use pcsp_lab::builtin::{k_coloring, lin, one_in_three_vs_nae, two_sat};
use pcsp_lab::function::{affine, majority2, threshold13};
use pcsp_lab::polymorphism::{enumerate_polymorphisms, is_polymorphism, is_polymorphism_of};
use pcsp_lab::structure::PcspTemplate;
use pcsp_lab::Result;

const BUDGET: u64 = 10_000_000;

fn main() -> Result<()> {
    let k3 = PcspTemplate::csp(k_coloring(3)?);
    for k in 1..=2 {
        let count = enumerate_polymorphisms(&k3, k, BUDGET)?.count();
        println!("|Pol^{k}(K3)| = {count}");
    }

    // The stream is lazy: take only what you need.
    let t = one_in_three_vs_nae();
    for f in enumerate_polymorphisms(&t, 2, BUDGET)?.take(3) {
        print!("{}", f?.to_text());
    }

    println!("majority on 2SAT: {}", is_polymorphism_of(&majority2(), &two_sat(), BUDGET)?);
    let p = affine(5, &[1, 4, 1])?;
    println!("x+4y+z on 3LIN_5: {}", is_polymorphism_of(&p, &lin(5)?, BUDGET)?);
    for k in [1, 2, 3, 4, 5, 7] {
        // threshold13 is undefined for arities divisible by 3
        match threshold13(k) {
            Ok(f) => println!("threshold13({k}) on (1IN3, 3NAE_2): {}", is_polymorphism(&f, &t, BUDGET)?),
            Err(e) => println!("threshold13({k}): {e}"),
        }
    }
    Ok(())
}
