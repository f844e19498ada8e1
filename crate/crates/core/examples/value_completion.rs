//! Completing a cost table on Z_6 to the largest value below it.
//!
//! ```text
//! cargo run --example value_completion
//! ```

use valued_groups::values::{cap_value_at, complete_cost, isometric_isomorphic, CostFunction};
use valued_groups::{Extended, FiniteAbelianGroup, Rational};

fn main() -> valued_groups::Result<()> {
    let g = FiniteAbelianGroup::cyclic(6);
    let mut cost = vec![Extended::Infinite; 6];
    cost[0] = Extended::zero();
    // generator 1 costs 1, the element 2 is cheap
    for (x, v) in [(1, Rational::one()), (5, Rational::one()), (2, Rational::new(1, 4)), (4, Rational::new(1, 4))] {
        cost[x] = Extended::Finite(v);
    }
    let done = complete_cost(&CostFunction::new(&g, cost)?);
    let v = done.into_semivalue()?.into_value(valued_groups::Cap::Infinite, 0)?;
    for x in g.elements() {
        println!("p({}) = {}", g.coords(x), v.value(x));
    }

    let capped = cap_value_at(&v, &Rational::new(1, 2))?;
    println!("diameter {} -> {} after capping", v.diameter(), capped.diameter());
    println!("capped is isometric to the original: {}", isometric_isomorphic(&v, &capped).is_some());
    Ok(())
}
