//! One-point extensions of valued groups by Katetov maps.

use valued_groups::extension::{check_trv_n, extend_onegen, midpoint_extend};
use valued_groups::suites::constant_generator_map;
use valued_groups::{Cap, FiniteAbelianGroup, KatetovMap, Rational, ValuedGroup};

fn main() -> valued_groups::Result<()> {
    // a constant map on the generators of Z_3^3 that no exponent-3 group realizes
    let f = constant_generator_map(3)?;
    let g = f.base().group();
    if let Some(w) = check_trv_n(&f, 3) {
        let w: Vec<String> = w.iter().map(|&x| g.coords(x).to_string()).collect();
        println!("trv-3 fails at {}", w.join(" "));
    }
    println!("extension refused: {}", extend_onegen(&f, 3, Cap::Infinite).is_err());

    let z4 = FiniteAbelianGroup::cyclic(4);
    let p = ValuedGroup::new(&z4, vec![0.into(), 1.into(), Rational::new(3, 2), 1.into()], Cap::Infinite, 4)?;
    let f = KatetovMap::new(&p, vec![(0, Rational::new(1, 2)), (2, 1.into())], Cap::Infinite)?;
    let e = extend_onegen(&f, 4, Cap::Infinite)?;
    println!("extended Z4 to {:?}, new point {}", e.result.group().factors(), e.result.group().coords(e.witness));

    let m = midpoint_extend(&p, 0, 2)?;
    let (x, y) = (m.embedding.apply(0), m.embedding.apply(2));
    println!("midpoint: {} + {} = {}", m.result.dist(x, m.witness), m.result.dist(m.witness, y), m.result.dist(x, y));
    Ok(())
}
