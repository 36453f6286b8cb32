//! Check suites shared by the command line and the acceptance tests.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::gen::refine;
use crate::index::{disk_index, global_index, global_irregularity, EquationFlags};
use crate::radii::checks::{check_integrality, check_weak_superharmonicity, IntegralityReport, WshReport};
use crate::radii::{Equation, Func, MultiRadiusProfile, Point, ProfileError};
use crate::rational::Rational;
use crate::skeleton::CurveSkeleton;

/// Intrinsic Laplacians `Δ_i(x)` for `i ≤ i_sp(x)` at every vertex, and `Irr(X)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Invariants {
    pub delta: BTreeMap<String, Vec<Rational>>,
    /// `None` when the boundary is not spectral.
    pub irr: Option<Rational>,
}

pub fn invariants(eq: &Equation) -> Invariants {
    let delta = eq
        .points()
        .into_iter()
        .filter(|x| matches!(x, Point::Vertex(_)))
        .map(|x| {
            let i_sp = eq.classify(&x).i_sp;
            (eq.point_id(&x), (1..=i_sp).map(|i| eq.intrinsic_laplacian(&x, i)).collect())
        })
        .collect();
    Invariants { delta, irr: global_irregularity(eq).ok().map(|r| r.irr) }
}

/// Differences between a base triangulation and a finer one, at the base vertices.
pub fn compare_invariants(base: &Invariants, fine: &Invariants) -> Vec<String> {
    let mut out = Vec::new();
    for (id, d) in &base.delta {
        match fine.delta.get(id) {
            None => out.push(format!("{id} disappeared")),
            Some(e) if e.len() < d.len() || &e[..d.len()] != d.as_slice() => {
                out.push(format!("Δ at {id}: {d:?} vs {e:?}"))
            }
            _ => {}
        }
    }
    if base.irr != fine.irr {
        out.push(format!("Irr(X): {:?} vs {:?}", base.irr, fine.irr));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub holds: bool,
    pub refinements: usize,
    pub base: Invariants,
    /// Vertex counts along the refinement chain.
    pub sizes: Vec<usize>,
    pub mismatches: Vec<String>,
}

/// Compares the invariants of `sk` with those of `depth` nested random refinements.
pub fn invariance_suite<R: Rng>(
    rng: &mut R,
    sk: &CurveSkeleton,
    prof: &MultiRadiusProfile,
    depth: usize,
) -> Result<InvarianceReport, ProfileError> {
    let base = invariants(&Equation::new(sk, prof)?);
    let mut cur = (sk.clone(), prof.clone());
    let mut sizes = vec![sk.vertices.len()];
    let mut mismatches = Vec::new();
    for k in 0..depth {
        cur = refine(rng, &cur.0, &cur.1, k)?;
        sizes.push(cur.0.vertices.len());
        let fine = invariants(&Equation::new(&cur.0, &cur.1)?);
        mismatches.extend(compare_invariants(&base, &fine).into_iter().map(|m| format!("refinement {}: {m}", k + 1)));
    }
    Ok(InvarianceReport { holds: mismatches.is_empty(), refinements: depth, base, sizes, mismatches })
}

/// Reports of `check --suite …`; absent suites were not requested.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct CheckReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integrality: Option<IntegralityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub superharmonic: Option<WshReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invariance: Option<InvarianceReport>,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Integrality,
    Superharmonic,
    Invariance,
    All,
}

impl std::str::FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "integrality" => Ok(Suite::Integrality),
            "superharmonic" => Ok(Suite::Superharmonic),
            "invariance" => Ok(Suite::Invariance),
            "all" => Ok(Suite::All),
            _ => Err(format!("unknown suite {s}")),
        }
    }
}

/// Runs the requested suites. Integrality passes on the proven form; the
/// stricter per-index denominators are reported alongside.
pub fn run_checks<R: Rng>(
    rng: &mut R,
    sk: &CurveSkeleton,
    prof: &MultiRadiusProfile,
    suite: Suite,
) -> Result<CheckReport, ProfileError> {
    let eq = Equation::new(sk, prof)?;
    let want = |s: Suite| suite == s || suite == Suite::All;
    let mut rep = CheckReport::default();
    if want(Suite::Integrality) {
        rep.integrality = Some(check_integrality(&eq));
    }
    if want(Suite::Superharmonic) {
        rep.superharmonic = Some(check_weak_superharmonicity(&eq));
    }
    if want(Suite::Invariance) {
        rep.invariance = Some(invariance_suite(rng, sk, prof, 3)?);
    }
    rep.passed = rep.integrality.as_ref().is_none_or(|r| r.holds)
        && rep.superharmonic.as_ref().is_none_or(|r| r.holds)
        && rep.invariance.as_ref().is_none_or(|r| r.holds);
    Ok(rep)
}

/// Vertices where at least three carriers of the controlling graph of `f` meet.
pub fn bifurcations(eq: &Equation, f: Func) -> BTreeSet<String> {
    let graph = eq.controlling_graph(f);
    eq.points()
        .into_iter()
        .filter(|x| matches!(x, Point::Vertex(_)))
        .filter(|x| eq.germs_at(x).iter().filter(|g| graph.contains(eq.carrier_id(g.carrier))).count() >= 3)
        .map(|x| eq.point_id(&x))
        .collect()
}

/// Vertices where `f` is not affine through every pair of germs.
pub fn breaks(eq: &Equation, f: Func) -> BTreeSet<String> {
    eq.points()
        .into_iter()
        .filter(|x| matches!(x, Point::Vertex(_)))
        .filter(|x| {
            let s: Vec<Rational> = eq.germs_at(x).iter().map(|g| eq.slope(g, f)).collect();
            s.len() >= 2 && s.iter().enumerate().any(|(a, u)| s[a + 1..].iter().any(|v| !(u + v).is_zero()))
        })
        .map(|x| eq.point_id(&x))
        .collect()
}

/// Facts about a rank-2 equation on an open disk closed by one end.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiskReport {
    pub chi: Rational,
    pub h0: Rational,
    pub h1: Rational,
    pub global_chi: Option<i64>,
    pub h2_constant: bool,
    /// Breaks of `log R_1` with `dd^c log R_1` there.
    pub breaks: BTreeMap<String, Rational>,
    pub bifurcations: Vec<BTreeSet<String>>,
    pub same_bifurcations: bool,
    pub holds: bool,
}

/// Checks the worked disk example: vanishing index and cohomology, constant
/// `H_2`, harmonic `R_1` at its breaks and matching bifurcations.
pub fn disk_report(eq: &Equation, end: &str) -> Result<DiskReport, ProfileError> {
    let flags = EquationFlags::all_liouville();
    let d = disk_index(eq, end, &flags)?;
    let global_chi = global_index(eq, &flags).verdict.chi();
    let h2_constant = eq.carriers().into_iter().all(|c| eq.plf(c, Func::H(2)).is_constant());
    let breaks: BTreeMap<String, Rational> = breaks(eq, Func::R(1))
        .into_iter()
        .map(|id| {
            let x = eq.vertex(&id).unwrap();
            (id, eq.laplacian(&x, Func::R(1)))
        })
        .collect();
    let bifurcations: Vec<BTreeSet<String>> = (1..=eq.rank).map(|i| bifurcations(eq, Func::R(i))).collect();
    let same_bifurcations = bifurcations.windows(2).all(|w| w[0] == w[1]);
    let holds = d.chi.is_zero()
        && d.h0.is_zero()
        && d.h1.is_zero()
        && global_chi == Some(0)
        && h2_constant
        && !breaks.is_empty()
        && breaks.values().all(|v| v.is_zero())
        && same_bifurcations;
    Ok(DiskReport { chi: d.chi, h0: d.h0, h1: d.h1, global_chi, h2_constant, breaks, bifurcations, same_bifurcations, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{disk_example, flow_instance, pathology_mimic, FlowParams};
    use crate::operator::profile_from_operators;
    use crate::radii::FieldConfig;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn flow_instances_are_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for k in 0..150 {
            let inst = flow_instance(&mut rng, &FlowParams::default());
            let rep = invariance_suite(&mut rng, &inst.skeleton, &inst.profile, 3).unwrap();
            assert!(rep.holds, "#{k}: {:?}", rep.mismatches);
            assert!(rep.sizes.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn all_suites_on_the_mimic() {
        let (sk, p) = pathology_mimic();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rep = run_checks(&mut rng, &sk, &p, Suite::All).unwrap_or_else(|e| panic!("{e}"));
        assert!(rep.integrality.is_some() && rep.superharmonic.is_some() && rep.invariance.is_some());
        let wsh = rep.superharmonic.unwrap();
        assert!(wsh.skipped.iter().any(|s| s == "x#3"), "{:?}", wsh.skipped);
    }

    #[test]
    fn disk_example_report() {
        let (sk, ops) = disk_example();
        let p = profile_from_operators(&sk, &ops, &FieldConfig::zero()).unwrap();
        let eq = Equation::new(&sk, &p).unwrap();
        let rep = disk_report(&eq, "end@inf").unwrap();
        assert!(rep.holds, "{rep:?}");
        let both: BTreeSet<String> = ["b1".to_string(), "b2".to_string()].into();
        assert_eq!(rep.bifurcations[0], both);
        assert_eq!(rep.breaks.keys().cloned().collect::<BTreeSet<_>>(), both);
    }
}
