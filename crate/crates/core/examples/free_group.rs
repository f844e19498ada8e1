//! Free valued groups Z_N[X] over small metric spaces.

use valued_groups::free::{free_group, induced_map, odd_inclusion_space, pd_matching, FiniteMetricSpace};
use valued_groups::{Cap, Rational};

fn main() -> valued_groups::Result<()> {
    // two tight pairs far apart
    let d = |i: usize, j: usize| match (i.min(j), i.max(j)) {
        (0, 1) | (2, 3) => Rational::one(),
        _ => Rational::from(3),
    };
    let x = FiniteMetricSpace::from_fn(4, d)?;
    let fx = free_group(&x, 2, Cap::Infinite)?;
    let f = fx.from_coefficients(&[1, 1, 1, 1])?;
    println!("N=2: p_d = {}, matching = {}", fx.pd(f), pd_matching(&fx, f)?);

    // the inclusion of a subspace need not be isometric when N is odd
    let x = odd_inclusion_space(3)?;
    let a = x.subspace(&[1, 2, 3])?;
    let (fx, fa) = (free_group(&x, 3, Cap::Infinite)?, free_group(&a, 3, Cap::Infinite)?);
    let g = fa.from_coefficients(&[1, 1, 1])?;
    let inc = induced_map(&fa, &fx, &[1, 2, 3])?;
    println!("N=3: value in Z3[A] = {}, in Z3[X] = {}", fa.pd(g), fx.pd(inc.hom.apply(g)));
    Ok(())
}
