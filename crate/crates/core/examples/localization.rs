//! `dd^c H_r` localized to the canonical tube at each vertex.

use convindex::gen::disk_example;
use convindex::operator::profile_from_operators;
use convindex::radii::{Equation, FieldConfig};

fn main() {
    let (sk, ops) = disk_example();
    let prof = profile_from_operators(&sk, &ops, &FieldConfig::zero()).unwrap();
    let eq = Equation::new(&sk, &prof).unwrap();
    for v in &sk.vertices {
        let x = eq.vertex(&v.id).unwrap();
        let tube = eq.canonical_tube(&x);
        println!("{}: {:?} -> {}", v.id, tube.singular, eq.localize_tube_laplacian(&x, &tube).unwrap());
    }
}
