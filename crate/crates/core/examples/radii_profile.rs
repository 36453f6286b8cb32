//! Radii along a skeleton: classification, heights, Laplacians and
//! controlling graphs.

use convindex::plf::{Domain, PLFunction};
use convindex::radii::{Equation, Func, MultiRadiusProfile};
use convindex::rational::qi;
use convindex::skeleton::{CurveSkeleton, Edge, Ray, Vertex};

fn main() {
    // a point of S with a ray, and a branch into a disk where R_1 grows
    let sk = CurveSkeleton {
        vertices: vec![Vertex::s_point("x"), Vertex::plain("y", qi(2))],
        edges: vec![Edge::new("b", "x", "y", qi(2), false)],
        rays: vec![Ray::new("r", "x")],
        disk_components: 0,
    };
    let seg = Domain::Segment { length: qi(2) };
    let mut p = MultiRadiusProfile { rank: 2, ..Default::default() };
    p.edges.insert("b".into(), vec![PLFunction::affine(&seg, qi(-4), qi(1)), PLFunction::constant(&seg, qi(-1))]);
    p.rays.insert("r".into(), vec![PLFunction::affine(&Domain::Ray, qi(-4), qi(-1)), PLFunction::constant(&Domain::Ray, qi(-1))]);
    let eq = Equation::new(&sk, &p).unwrap();

    for id in ["x", "y"] {
        let x = eq.vertex(id).unwrap();
        println!("{id}: values {:?} sigma {} {:?}", eq.values(&x), eq.sigma(&x), eq.classify(&x));
        for i in 1..=2 {
            println!("  dd^c H_{i} = {}", eq.laplacian(&x, Func::H(i)));
        }
    }
    println!("controlling graph of R_1: {:?}", eq.controlling_graph(Func::R(1)));
}
