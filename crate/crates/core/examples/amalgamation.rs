//! The three amalgamation constructions on seeded instances.

use valued_groups::amalgam::{amalgamate, amalgamate_approx, amalgamate_mixed};
use valued_groups::gen::Gen;
use valued_groups::Cap;

fn main() -> valued_groups::Result<()> {
    let a1 = Gen::stream(1, 0).a1(16, 2, Cap::One, 2);
    let out = amalgamate(&a1.d0, &a1.d1, &a1.d2, &a1.phi1, &a1.phi2)?;
    println!(
        "exact: |D0| = {}, |D1| = {}, |D2| = {} -> |E| = {}",
        a1.d0.order(),
        a1.d1.order(),
        a1.d2.order(),
        out.result.order()
    );
    println!("  psi1 isometric: {}", a1.d1.is_isometric_embedding(&out.psi1, &out.result));

    let a2 = Gen::stream(1, 1).a2(16, 2, Cap::One, 2);
    let out = amalgamate_approx(&a2.d1, &a2.d0, &a2.d2, &a2.u, &a2.v, &a2.eps)?;
    println!(
        "approximate: eps {} sup distance {} bound {}",
        a2.eps, out.diagnostics.sup_distance, out.diagnostics.bound
    );

    let a3 = Gen::stream(1, 2).a3(16, 2, Cap::One, 2);
    let out = amalgamate_mixed(&a3.d1, &a3.d2, &a3.phi1, &a3.phi2, &a3.eps)?;
    println!("mixed: eps {} sup distance {}", a3.eps, out.diagnostics.sup_distance);
    Ok(())
}
