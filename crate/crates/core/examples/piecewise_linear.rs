//! Exact piecewise-linear functions and Newton polygons.

use convindex::plf::{combine, hull_vertices, newton_hull, plf_concavity_check, CombineOp, HullPoints, HullSide, PLFunction};
use convindex::rational::{q, qi};

fn main() {
    let f = PLFunction::segment(vec![(qi(0), qi(0)), (qi(1), qi(2)), (qi(3), qi(1))]).unwrap();
    let g = PLFunction::segment(vec![(qi(0), qi(1)), (qi(3), q(1, 2))]).unwrap();
    let lo = combine(&CombineOp::Min, &[f.clone(), g.clone()]).unwrap();
    println!("min(f, g) breakpoints: {:?}", lo.points());
    println!("f is {:?}", plf_concavity_check(&f).verdict);

    // log|a_j| for D^3 + a_1 D^2 + a_2 D + a_3
    let pts = HullPoints::dense(&[qi(0), qi(2), qi(1), qi(3)]);
    println!("upper hull vertices: {:?}", hull_vertices(&pts, HullSide::UpperConcave).unwrap());
    println!("slopes: {:?}", newton_hull(&pts, HullSide::UpperConcave).unwrap());
}
