//! An order-two equation on an open disk whose radii bend at two points
//! and whose index vanishes.

use convindex::gen::disk_example;
use convindex::operator::profile_from_operators;
use convindex::radii::{Equation, FieldConfig};
use convindex::suites::disk_report;

fn main() {
    let (sk, ops) = disk_example();
    let prof = profile_from_operators(&sk, &ops, &FieldConfig::zero()).unwrap();
    let eq = Equation::new(&sk, &prof).unwrap();
    let rep = disk_report(&eq, "end@inf").unwrap();
    println!("chi = {}, h0 = {}, h1 = {}", rep.chi, rep.h0, rep.h1);
    println!("H_2 constant: {}", rep.h2_constant);
    println!("dd^c R_1 at the breaks: {:?}", rep.breaks);
    println!("bifurcations per radius: {:?}", rep.bifurcations);
}
