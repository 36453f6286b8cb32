use std::io::Cursor;

use convindex::cli::run;
use convindex::gen::{flow_instance, inject_violation, persistent_growth, settling_growth, FlowParams};
use convindex::index::EquationFlags;
use convindex::instance::InstanceFile;
use convindex::radii::{FieldConfig, MultiRadiusProfile};
use convindex::skeleton::CurveSkeleton;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

struct Outcome {
    code: i32,
    out: String,
    err: String,
}

fn cli(args: &[&str], input: &str) -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("convindex").chain(args.iter().copied());
    let code = run(argv, &mut Cursor::new(input.as_bytes().to_vec()), &mut out, &mut err);
    Outcome { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap_or_else(|e| panic!("{e}: {s}"))
}

fn disk_instance() -> String {
    let o = cli(&["example", "paper-3-4"], "");
    assert_eq!(o.code, 0, "{}", o.err);
    o.out
}

fn flow_file(seed: u64) -> (InstanceFile, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inst = flow_instance(&mut rng, &FlowParams::default());
    let mut f = InstanceFile::with_profile(FieldConfig::zero(), inst.skeleton, inst.profile);
    f.flags = inst.flags;
    (f, rng)
}

#[test]
fn example_feeds_index() {
    let o = cli(&["index", "-"], &disk_instance());
    assert_eq!(o.code, 0, "{}", o.err);
    let v = json(&o.out);
    assert_eq!(v["verdict"]["kind"], "finite");
    assert_eq!(v["verdict"]["chi"], 0);
    assert_eq!(v["chi_sum"], v["chi_gos"]);
    assert_eq!(v["h0"], 0);
}

#[test]
fn empty_skeleton_with_one_disk_validates() {
    let sk = CurveSkeleton { disk_components: 1, ..Default::default() };
    let mut p = MultiRadiusProfile { rank: 1, ..Default::default() };
    p.disks.push(vec![convindex::rational::qi(0)]);
    let f = InstanceFile::with_profile(FieldConfig::zero(), sk, p);
    let o = cli(&["validate", "-"], &f.to_json());
    assert_eq!(o.code, 0, "{}", o.err);
    assert_eq!(json(&o.out)["valid"], true);
}

#[test]
fn invariance_suite_reports_identical_invariants() {
    let (f, _) = flow_file(21);
    let o = cli(&["check", "-", "--suite", "invariance", "--seed", "9"], &f.to_json());
    assert_eq!(o.code, 0, "{}", o.err);
    let v = json(&o.out);
    let inv = &v["invariance"];
    assert_eq!(inv["holds"], true);
    assert_eq!(inv["refinements"], 3);
    assert!(inv["mismatches"].as_array().unwrap().is_empty());
    assert!(v.get("integrality").is_none());
}

#[test]
fn exit_codes() {
    // malformed input
    let o = cli(&["validate", "-"], "{ not json");
    assert_eq!(o.code, 1);
    assert_eq!(json(&o.err)["error"], "validation");
    // profile and operator together
    let mut v = json(&disk_instance());
    v["profile"] = serde_json::json!({ "rank": 2 });
    assert_eq!(cli(&["validate", "-"], &v.to_string()).code, 1);
    // refusals
    assert_eq!(cli(&["limit", "-"], &disk_instance()).code, 2);
    let (f, _) = flow_file(3);
    assert_eq!(cli(&["young", "-"], &f.to_json()).code, 2);
    // a broken identity
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut inst = flow_instance(&mut rng, &FlowParams::default());
    while inject_violation(&mut rng, &mut inst).is_none() {
        inst = flow_instance(&mut rng, &FlowParams::default());
    }
    let f = InstanceFile::with_profile(FieldConfig::zero(), inst.skeleton, inst.profile);
    let o = cli(&["check", "-", "--suite", "superharmonic"], &f.to_json());
    assert_eq!(o.code, 3);
    let e = json(&o.err);
    assert_eq!(e["error"], "assertion");
    assert!(!e["report"]["superharmonic"]["failures"].as_array().unwrap().is_empty());
    // usage
    assert_eq!(cli(&["frobnicate"], "").code, 1);
    assert_eq!(cli(&["example", "nope"], "").code, 1);
}

#[test]
fn young_at_a_point_and_along_carriers() {
    let o = cli(&["young", "-", "--at", "1/8"], &disk_instance());
    assert_eq!(o.code, 0, "{}", o.err);
    let v = json(&o.out);
    let first = &v.as_array().unwrap()[0];
    assert_eq!(first["carrier"], "b1b2");
    assert_eq!(first["radii"].as_array().unwrap().len(), 2);
    let o = cli(&["young", "-"], &disk_instance());
    assert_eq!(json(&o.out).as_array().unwrap().len(), 5);
}

#[test]
fn localize_and_irregularity() {
    let o = cli(&["localize", "-", "--vertex", "b1", "--tube", "canonical"], &disk_instance());
    assert_eq!(o.code, 0, "{}", o.err);
    assert_eq!(json(&o.out)["tube"]["singular"].as_array().unwrap().len(), 3);
    assert_eq!(cli(&["localize", "-", "--vertex", "b1", "--tube", "other"], &disk_instance()).code, 1);
    let o = cli(&["irregularity", "-"], &disk_instance());
    assert_eq!(json(&o.out)["irr"], "2");
}

#[test]
fn limits_from_growth_rules() {
    for (rule, kind) in [(settling_growth(2), "finite"), (persistent_growth(1), "infinite")] {
        let (sk, p) = rule.build(0).unwrap();
        let mut f = InstanceFile::with_profile(FieldConfig::zero(), sk, p);
        f.flags = EquationFlags::all_liouville();
        f.growth = Some(rule);
        let o = cli(&["limit", "-", "--steps", "30", "--window", "5"], &f.to_json());
        assert_eq!(o.code, 0, "{}", o.err);
        let v = json(&o.out);
        assert_eq!(v["verdict"]["kind"], kind);
        assert_eq!(v["telescoping"], true);
        assert_eq!(v["agree"], true);
    }
}

#[test]
fn plots_are_deterministic() {
    let a = cli(&["plot", "-", "--edge", "b1b2"], &disk_instance());
    let b = cli(&["plot", "-", "--edge", "b1b2"], &disk_instance());
    assert_eq!(a.code, 0, "{}", a.err);
    assert_eq!(a.out, b.out);
    assert!(a.out.starts_with("<?xml"));
    assert_eq!(a.out.matches("class=\"radius\"").count(), 2);
    let one = cli(&["plot", "-", "--edge", "b1b2", "--index", "2"], &disk_instance());
    assert_eq!(one.out.matches("class=\"radius\"").count(), 1);
    let path = std::env::temp_dir().join(format!("convindex-plot-{}.svg", std::process::id()));
    let o = cli(&["plot", "-", "--out", path.to_str().unwrap()], &disk_instance());
    assert_eq!(o.code, 0);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), a.out);
    let _ = std::fs::remove_file(path);
}

#[test]
fn reports_are_byte_identical() {
    let (f, _) = flow_file(8);
    let text = f.to_json();
    let a = cli(&["index", "-"], &text);
    let b = cli(&["index", "-"], &text);
    assert_eq!(a.out, b.out);
    assert_eq!(InstanceFile::parse(&text).unwrap().to_json(), text);
}
