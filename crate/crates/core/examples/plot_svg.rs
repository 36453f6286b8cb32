//! Writes the radii of the disk example along one edge as SVG.

use convindex::gen::disk_example;
use convindex::operator::profile_from_operators;
use convindex::plot::plot;
use convindex::radii::{Equation, FieldConfig};

fn main() {
    let (sk, ops) = disk_example();
    let prof = profile_from_operators(&sk, &ops, &FieldConfig::zero()).unwrap();
    let eq = Equation::new(&sk, &prof).unwrap();
    let svg = plot(&eq, "b1b2", None).unwrap();
    let path = std::env::temp_dir().join("convindex-b1b2.svg");
    std::fs::write(&path, &svg).unwrap();
    println!("wrote {} ({} bytes)", path.display(), svg.len());
}
