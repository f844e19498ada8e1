//! Word values on Z_N^N for the generators e_j and the differences e_j - e_k.

use valued_groups::free::{word_metric, zn_generating_set};
use valued_groups::Rational;

fn main() -> valued_groups::Result<()> {
    for n in 3..=5u64 {
        let v = word_metric(&zn_generating_set(n)?, &Rational::one())?;
        let g = v.group();
        let all = (0..n as usize).fold(0, |s, j| g.add(s, g.generator(j)));
        println!(
            "N={n}: |G| = {}, diameter {}, |e1 - e2| = {}, |sum e_j| = {}",
            g.order(),
            v.diameter(),
            v.dist(g.generator(0), g.generator(1)),
            v.value(all)
        );
    }
    Ok(())
}
