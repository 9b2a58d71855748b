//! Built-in templates, validation, homomorphisms, and the structure text format.

use pcsp_lab::builtin::{builtin_from_spec, k_coloring, one_in_three, three_nae, BUILTIN_NAMES};
use pcsp_lab::structure::{find_homomorphism, is_homomorphism, HomMap, RelationalStructure};
use pcsp_lab::Result;

fn main() -> Result<()> {
    println!("built-ins: {}", BUILTIN_NAMES.join(", "));

    let k3 = k_coloring(3)?;
    print!("{}", k3.to_text());
    assert!(k3.validate().is_empty());

    // 1IN3 maps into 3NAE_2 by the identity; K3 has no map into K2.
    let (a, b) = (one_in_three(), three_nae(2)?);
    println!("1IN3 -> 3NAE_2 via id: {}", is_homomorphism(&HomMap::identity(2), &a, &b)?);
    let k2 = k_coloring(2)?;
    println!("K3 -> K2: {:?}", find_homomorphism(&k3, &k2, 1_000_000)?);
    println!("K2 -> K3: {:?}", find_homomorphism(&k2, &k3, 1_000_000)?);

    // Invalid structures are reported, not constructed.
    let broken = "structure bad\ndomain 2\nrelation R 2\n0 2\nend\n";
    match RelationalStructure::parse(broken) {
        Ok(_) => println!("unexpectedly valid"),
        Err(e) => println!("rejected: {e}"),
    }

    let t = builtin_from_spec("onein3-vs-nae")?.into_template();
    println!("template witness: {:?}", t.witness.0);
    Ok(())
}
