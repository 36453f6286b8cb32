//! Generalized indices on an annulus under repeated Frobenius push-forward.

use convindex::operator::{frobenius_height_slope, gen_index_ledger, pushforward_ledger};
use convindex::radii::FieldConfig;
use convindex::rational::q;

fn main() {
    let fc = FieldConfig::new(3).unwrap();
    let mut ledger = gen_index_ledger(2, 2, &fc);
    let mut slope = q(-1, 2);
    for k in 1..=5 {
        ledger = pushforward_ledger(&ledger).unwrap();
        slope = frobenius_height_slope(&slope, 2, 3).unwrap();
        println!(
            "k={k}: chi(D_0)={} chi(D_inf)={} slope={} consistent={}",
            ledger.chi_gen_d0,
            ledger.chi_gen_dinf,
            slope,
            ledger.consistent()
        );
    }
}
