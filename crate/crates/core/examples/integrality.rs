//! Slopes of the partial heights. Merged radii give fractional slopes for
//! `H_i`, `i < r`, which the proven form allows and the strict form does not.

use convindex::gen::merged_radii_instance;
use convindex::operator::profile_from_operators;
use convindex::radii::checks::check_integrality;
use convindex::radii::Equation;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (sk, op, fc) = merged_radii_instance(&mut rng);
    let prof = profile_from_operators(&sk, &[op], &fc).unwrap();
    let rep = check_integrality(&Equation::new(&sk, &prof).unwrap());
    println!("rank {}, p = {}", prof.rank, fc.p());
    println!("slopes in (1/r)Z, integral at polygon vertices: {}", rep.holds);
    println!("denominator at most i: {}", rep.strict_holds);
    for w in &rep.strict_failures {
        println!("  H_{} has slope {} on {}", w.index, w.slope, w.carrier);
    }
}
