//! Radii read off the Newton polygon of an operator, checked against the
//! valuations of its Taylor solutions.

use convindex::gen::young_operator;
use convindex::operator::{taylor_radius_oracle, young_polygon, young_radii};
use convindex::radii::FieldConfig;
use convindex::rational::qi;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for p in [2u64, 3, 5] {
        let (op, taylor) = young_operator(&mut rng, p);
        let fc = FieldConfig::new(p).unwrap();
        let radii = young_radii(&op, &fc, &qi(0), &qi(0)).unwrap();
        let est = taylor_radius_oracle(&taylor, 2000).unwrap();
        println!("p = {p}, rank {}, polygon {:?}", op.rank, young_polygon(&op, &qi(0)).unwrap());
        println!("  Young: {:?}", radii.iter().map(|r| r.log_r.clone()).collect::<Vec<_>>());
        println!("  Taylor: {:?} (band {:.4})", est.log_radius, est.band);
    }
}
