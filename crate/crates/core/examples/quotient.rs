//! Quotients in canonical form and counting homomorphisms.

use valued_groups::group::{count_homs, quotient, GroupElement};
use valued_groups::{FiniteAbelianGroup, Subgroup};

fn main() -> valued_groups::Result<()> {
    let g = FiniteAbelianGroup::new(vec![2, 4])?;
    let k = Subgroup::generated_by(&g, &[g.index(&GroupElement(vec![1, 2]))?]);
    let (q, pi) = quotient(&g, &k)?;
    println!("Z2 x Z4 / <(1,2)> = {:?}", q.factors());
    for x in g.elements() {
        println!("  {} -> {}", g.coords(x), q.coords(pi.apply(x)));
    }

    let z4 = FiniteAbelianGroup::cyclic(4);
    println!("|Hom(Z4, Z2 x Z4)| = {}", count_homs(&z4, &g));
    println!("|Hom(Z2 x Z4, Z4)| = {}", count_homs(&g, &z4));
    Ok(())
}
