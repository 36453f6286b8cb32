//! Disk, pseudo-disk, overconvergent and meromorphic indices.

use convindex::index::{
    disk_index, meromorphic_index_on, overconvergent_index, pseudodisk_index, EquationFlags, OutsideGerm, Puncture,
};
use convindex::plf::{Domain, PLFunction};
use convindex::radii::{Equation, MultiRadiusProfile};
use convindex::rational::qi;
use convindex::skeleton::{CurveSkeleton, Ray, Vertex};

fn main() {
    let all = EquationFlags::all_liouville();

    // a boundary point of S with one flat ray
    let mut x = Vertex::s_point("x");
    x.is_boundary = true;
    let sk = CurveSkeleton { vertices: vec![x], rays: vec![Ray::new("r", "x")], ..Default::default() };
    let mut p = MultiRadiusProfile { rank: 1, ..Default::default() };
    p.rays.insert("r".into(), vec![PLFunction::constant(&Domain::Ray, qi(-1))]);
    let eq = Equation::new(&sk, &p).unwrap();
    println!("pseudo-disk along r: {:?}", pseudodisk_index(&eq, "r", &all).unwrap());

    let mut f = all.clone();
    f.overconvergent_data.insert("x".into(), vec![OutsideGerm { degree: 1, irr: qi(1) }]);
    println!("overconvergent: {:?}", overconvergent_index(&eq, &f).unwrap().verdict);

    // a disk marker with constant radii
    let sk = CurveSkeleton { disk_components: 1, ..Default::default() };
    let mut p = MultiRadiusProfile { rank: 1, ..Default::default() };
    p.disks.push(vec![qi(-2)]);
    let eq = Equation::new(&sk, &p).unwrap();
    println!("disk: {:?}", disk_index(&eq, "disk:0", &all).unwrap());

    // a genus-one curve with two simple poles
    let mut y = Vertex::s_point("y");
    y.genus = 1;
    let sk = CurveSkeleton { vertices: vec![y], ..Default::default() };
    let mut p = MultiRadiusProfile { rank: 1, ..Default::default() };
    p.vertex_values.insert("y".into(), vec![qi(0)]);
    let eq = Equation::new(&sk, &p).unwrap();
    let pole = |id: &str| Puncture { id: id.into(), degree: 1, irr: Some(qi(0)) };
    println!("meromorphic: {:?}", meromorphic_index_on(&eq, &[pole("z1"), pole("z2")]));
}
