//! The JSON instance format: write, read back, validate.

use convindex::gen::{flow_instance, FlowParams};
use convindex::instance::InstanceFile;
use convindex::radii::FieldConfig;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let inst = flow_instance(&mut rng, &FlowParams { max_s: 2, max_rank: 1, ..Default::default() });
    let mut file = InstanceFile::with_profile(FieldConfig::new(3).unwrap(), inst.skeleton, inst.profile);
    file.flags = inst.flags;
    let text = file.to_json();
    println!("{text}");
    let back = InstanceFile::parse(&text).unwrap();
    assert_eq!(back.to_json(), text);
    back.validate().unwrap();
}
