//! Weak super-harmonicity: generated instances pass, an injected bump is
//! reported at the vertex where it was put.

use convindex::gen::{flow_instance, inject_violation, pathology_mimic, FlowParams};
use convindex::radii::checks::{check_weak_superharmonicity, pathological_sets};
use convindex::radii::Equation;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut inst = flow_instance(&mut rng, &FlowParams::default());
    let rep = check_weak_superharmonicity(&Equation::new(&inst.skeleton, &inst.profile).unwrap());
    println!("holds: {} ({} inequalities, {} equalities)", rep.holds, rep.checked, rep.equalities);

    if let Some(x) = inject_violation(&mut rng, &mut inst) {
        let rep = check_weak_superharmonicity(&Equation::new(&inst.skeleton, &inst.profile).unwrap());
        println!("bump at {x}, failures: {:?}", rep.failures);
    }

    let (sk, p) = pathology_mimic();
    let eq = Equation::new(&sk, &p).unwrap();
    println!("pathological sets: {:?}", pathological_sets(&eq));
    println!("skipped: {:?}", check_weak_superharmonicity(&eq).skipped);
}
