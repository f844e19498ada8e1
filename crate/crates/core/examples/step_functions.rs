//! Step functions with values in a valued group and their integral norm.

use std::sync::Arc;

use valued_groups::pv::{nabla_pl, norming_validate, StepFunction};
use valued_groups::{Cap, FiniteAbelianGroup, Rational, ValuedGroup};

fn main() -> valued_groups::Result<()> {
    let z3 = FiniteAbelianGroup::cyclic(3);
    let h = Arc::new(ValuedGroup::new(&z3, vec![0.into(), 1.into(), 1.into()], Cap::Infinite, 3)?);
    // u = 1 on [0, 1/2), 2 on [1/2, 2)
    let u = StepFunction::new(h.clone(), vec![(Rational::new(1, 2), 1), (Rational::from(2), 2)])?;
    println!("u = {u}");
    println!("|u| = {}", u.norm());
    let t = Rational::new(3, 2);
    println!("|{t} * u| = {}", u.act(&t).norm());
    let dec: Vec<String> = u.decomposition().iter().map(|(s, x)| format!("{s} * hat{}", z3.coords(*x))).collect();
    println!("u = {}", dec.join(" + "));

    let nabla = norming_validate(&nabla_pl(), None)?;
    println!("max(t, 1) is norming with L = {}", nabla.l());
    Ok(())
}
