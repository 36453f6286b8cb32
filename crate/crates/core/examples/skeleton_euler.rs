//! Skeletons, compactly supported Euler characteristics and covers.

use convindex::gen::{flow_instance, random_cover, random_s_prime, FlowParams};
use convindex::skeleton::{chi_c, chi_c_cover, sum_chi_check};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let inst = flow_instance(&mut rng, &FlowParams { max_s: 4, ..Default::default() });
    let sk = &inst.skeleton;
    println!("{} vertices, {} edges, {} rays, chi_c = {}", sk.vertices.len(), sk.edges.len(), sk.rays.len(), chi_c(sk).unwrap());

    let (finer, s_prime) = random_s_prime(&mut rng, sk);
    println!("sum over S' = {:?}: {:?}", s_prime, sum_chi_check(&finer, &s_prime).unwrap());

    let (u, v) = random_cover(&mut rng, sk);
    println!("cover: {:?}", chi_c_cover(sk, &u, &v).unwrap());
}
