//! Intrinsic Laplacians and the global irregularity do not depend on the
//! triangulation.

use convindex::gen::{flow_instance, FlowParams};
use convindex::suites::invariance_suite;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let inst = flow_instance(&mut rng, &FlowParams::default());
    let rep = invariance_suite(&mut rng, &inst.skeleton, &inst.profile, 3).unwrap();
    println!("vertex counts along the refinements: {:?}", rep.sizes);
    println!("Irr(X) = {:?}", rep.base.irr);
    println!("identical: {} {:?}", rep.holds, rep.mismatches);
}
