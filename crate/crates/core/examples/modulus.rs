//! Extending a semivalue from a subgroup through a modulus triple.

use valued_groups::extension::extend_semivalue_modulus;
use valued_groups::gen::Gen;
use valued_groups::Cap;

fn main() -> valued_groups::Result<()> {
    // first seeded instance where D0 is a proper nontrivial subgroup
    let inst = (0..)
        .map(|i| Gen::stream(7, i).modulus_extension(8, 2, Cap::Infinite, 0))
        .find(|v| v.d0.order() > 1 && v.d0.order() < v.d.order())
        .expect("some instance qualifies");
    println!("omega: {:?}", inst.omega.pl().points());
    println!("rho:   {:?}", inst.rho.pl().points());
    println!("tau:   {:?}", inst.tau.pl().points());

    let ext = extend_semivalue_modulus(&inst.d, &inst.d0, &inst.lambda0, &inst.omega, Some((&inst.rho, &inst.tau)))?;
    let g = inst.d.group();
    for x in g.elements() {
        let mark = if inst.d0.contains(x) { "*" } else { " " };
        println!("{mark} {}  lambda {}  extension {}", g.coords(x), inst.d.value(x), ext.value(x));
    }
    Ok(())
}
