//! Indices of growing domains: one that settles and one that loses one per step.

use convindex::gen::{persistent_growth, settling_growth};
use convindex::index::{limit_decide, EquationFlags};

fn main() {
    let flags = EquationFlags::all_liouville();
    for (name, rule) in [("settling", settling_growth(2)), ("persistent", persistent_growth(1))] {
        let rep = limit_decide(&rule, &flags, 20, 5).unwrap();
        println!("{name}: chi(X_n) = {:?}", rep.chis);
        println!("  telescoping {}, criteria {}, verdict {:?}", rep.telescoping, rep.criteria_hold, rep.verdict);
    }
}
