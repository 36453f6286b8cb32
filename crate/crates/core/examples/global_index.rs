//! The global index from local terms, against the Grothendieck-Ogg-Shafarevich side.

use convindex::gen::{flow_instance, FlowParams};
use convindex::index::{global_index, global_irregularity};
use convindex::radii::Equation;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let inst = flow_instance(&mut rng, &FlowParams::default());
    let eq = Equation::new(&inst.skeleton, &inst.profile).unwrap();
    let rep = global_index(&eq, &inst.flags);
    println!("rank {}, chi_c = {}", rep.rank, rep.chi_c);
    for (x, c) in &rep.chi_x_s_f {
        println!("  chi({x}, S, F) = {c}");
    }
    println!("sum of local terms {} , r*chi_c - Irr {:?}, verdict {:?}", rep.chi_sum, rep.chi_gos, rep.verdict);
    if let Ok(irr) = global_irregularity(&eq) {
        println!("Irr(X) = {}", irr.irr);
    }
}
