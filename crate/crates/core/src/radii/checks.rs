//! Super-harmonicity, pathological sets and integrality.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{Equation, Func, GermKind, Point, ProfileError, RadiusClass};
use crate::plf::Direction;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WshFailure {
    pub point: String,
    pub index: usize,
    /// `"inequality"` or `"equality"`.
    pub kind: String,
    pub laplacian: Rational,
    pub bound: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WshReport {
    pub holds: bool,
    pub checked: usize,
    pub equalities: usize,
    pub failures: Vec<WshFailure>,
    /// Points left out: boundary points, genus without (TR), and `𝒞` points.
    pub skipped: Vec<String>,
}

/// Whether `i` is a vertex of the convergence polygon at `x` free of solvability.
pub fn free_vertex(eq: &Equation, x: &Point, i: usize) -> bool {
    let vals = eq.values(x);
    let cls = eq.classify(x);
    let vertex = i == eq.rank || vals[i - 1] < vals[i];
    vertex && cls.classes[..i].iter().all(|c| *c != RadiusClass::Solvable)
}

/// Points `x ∉ Γ_S` of `𝒞_{S,i}` for `i = 1..r` and `ℰ_{S,i}` for every point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathologicalSets {
    pub c: Vec<BTreeSet<String>>,
    pub e: Vec<BTreeSet<String>>,
}

fn in_a(eq: &Equation, x: &Point, i: usize) -> bool {
    i >= 2
        && !eq.on_gamma_s(x)
        && eq.classify(x).classes[i - 1] == RadiusClass::Solvable
        && eq.is_endpoint(x, Func::R(i))
        && (1..i).any(|j| eq.in_controlling(x, Func::R(j)))
        && eq.in_controlling(x, Func::R(i))
        && eq.in_controlling(x, Func::H(i))
}

/// `𝒞_{S,i}` membership, computed pointwise.
pub fn in_c(eq: &Equation, x: &Point, i: usize) -> bool {
    (2..=i).any(|j| in_a(eq, x, j))
}

pub fn pathological_sets(eq: &Equation) -> PathologicalSets {
    let pts = eq.points();
    let mut c = vec![BTreeSet::new(); eq.rank];
    let mut e = vec![BTreeSet::new(); eq.rank];
    for x in &pts {
        let id = eq.point_id(x);
        let mut acc = false;
        for i in 1..=eq.rank {
            acc |= in_a(eq, x, i);
            if acc {
                c[i - 1].insert(id.clone());
            }
            if eq.laplacian(x, Func::H(i)).is_positive() {
                e[i - 1].insert(id.clone());
            }
        }
    }
    PathologicalSets { c, e }
}

pub fn check_weak_superharmonicity(eq: &Equation) -> WshReport {
    let mut rep = WshReport { holds: true, checked: 0, equalities: 0, failures: vec![], skipped: vec![] };
    for x in eq.points() {
        let id = eq.point_id(&x);
        if let Point::Vertex(v) = x {
            let vx = &eq.sk.vertices[v];
            if vx.is_boundary || (vx.genus > 0 && !vx.tr_ok) {
                rep.skipped.push(id);
                continue;
            }
        }
        let cls = eq.classify(&x);
        let on_s = eq.on_gamma_s(&x);
        for i in 1..=eq.rank {
            let bound = if on_s {
                Rational::int(-eq.chi_s(&x) * i.min(cls.i_sp) as i64)
            } else if in_c(eq, &x, i) {
                rep.skipped.push(format!("{id}#{i}"));
                continue;
            } else {
                Rational::zero()
            };
            rep.checked += 1;
            let dd = eq.laplacian(&x, Func::H(i));
            let fail = |kind: &str| WshFailure {
                point: id.clone(),
                index: i,
                kind: kind.into(),
                laplacian: dd.clone(),
                bound: bound.clone(),
            };
            if dd > bound {
                rep.failures.push(fail("inequality"));
            } else if free_vertex(eq, &x, i) {
                rep.equalities += 1;
                if dd != bound {
                    rep.failures.push(fail("equality"));
                }
            }
        }
    }
    rep.holds = rep.failures.is_empty();
    rep
}

/// Hypotheses of the super-harmonicity theorem at points of `𝒞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CFlags {
    #[serde(default)]
    pub h0_dagger_equality: bool,
    #[serde(default)]
    pub dual_compatible: bool,
    #[serde(default)]
    pub liouville_free: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CVerdict {
    Pass,
    /// Indices with `dd^c H_i(x) > 0`, with the offending value.
    Violation { indices: Vec<(usize, Rational)> },
    NoClaim,
}

pub fn check_superharmonicity_at_c(eq: &Equation, x: &Point, flags: CFlags) -> Result<CVerdict, ProfileError> {
    if eq.on_gamma_s(x) {
        return Err(ProfileError::Argument(format!("{} lies on the skeleton", eq.point_id(x))));
    }
    if !in_c(eq, x, eq.rank) {
        return Err(ProfileError::Precondition(format!("{} is not in C_(S,r)", eq.point_id(x))));
    }
    if !(flags.h0_dagger_equality && flags.dual_compatible && flags.liouville_free) {
        return Ok(CVerdict::NoClaim);
    }
    let bad: Vec<(usize, Rational)> = (1..=eq.rank)
        .map(|i| (i, eq.laplacian(x, Func::H(i))))
        .filter(|(_, d)| d.is_positive())
        .collect();
    Ok(if bad.is_empty() { CVerdict::Pass } else { CVerdict::Violation { indices: bad } })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlopeWitness {
    pub carrier: String,
    pub at: Rational,
    pub index: usize,
    pub slope: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegralityReport {
    /// Slopes in `ℤ ∪ ½ℤ ∪ … ∪ (1/r)ℤ`, integral where `i` is a polygon vertex.
    pub holds: bool,
    pub failures: Vec<SlopeWitness>,
    /// Stricter reading: every slope of `H_i` has denominator at most `i`.
    pub strict_holds: bool,
    pub strict_failures: Vec<SlopeWitness>,
    pub slopes_checked: usize,
}

pub fn check_integrality(eq: &Equation) -> IntegralityReport {
    let r = eq.rank as u64;
    let mut rep = IntegralityReport {
        holds: true,
        failures: vec![],
        strict_holds: true,
        strict_failures: vec![],
        slopes_checked: 0,
    };
    for c in eq.carriers() {
        let name = eq.carrier_id(c).to_string();
        let mut ts = BTreeSet::new();
        for f in eq.radii_on(c) {
            ts.extend(f.breakpoints());
        }
        let ts: Vec<Rational> = ts.into_iter().collect();
        let is_ray = eq.radii_on(c)[0].is_ray();
        let mut starts: Vec<(Rational, Rational)> =
            ts.windows(2).map(|w| (w[0].clone(), (&w[0] + &w[1]) / Rational::int(2))).collect();
        if is_ray {
            let last = ts.last().unwrap().clone();
            starts.push((last.clone(), last + Rational::one()));
        }
        for (a, mid) in starts {
            let vals: Vec<Rational> = eq.radii_on(c).iter().map(|f| f.eval(&mid).unwrap()).collect();
            for i in 1..=eq.rank {
                let s = eq.height_plf(c, i).slope(&a, Direction::Forward).unwrap();
                rep.slopes_checked += 1;
                let d = s.denom_u64();
                let witness = || SlopeWitness { carrier: name.clone(), at: a.clone(), index: i, slope: s.clone() };
                let vertex = i == eq.rank || vals[i - 1] < vals[i];
                if d > r || (vertex && d != 1) {
                    rep.failures.push(witness());
                }
                if d > i as u64 {
                    rep.strict_failures.push(witness());
                }
            }
        }
    }
    rep.holds = rep.failures.is_empty();
    rep.strict_holds = rep.strict_failures.is_empty();
    rep
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotonicityFailure {
    pub point: String,
    pub index: usize,
    pub slope: Rational,
}

/// Heights do not decrease into disks along stretches free of solvability.
pub fn check_monotone_heights(eq: &Equation) -> Vec<MonotonicityFailure> {
    let mut out = Vec::new();
    for x in eq.points() {
        let cls = eq.classify(&x);
        for g in eq.germs_at(&x) {
            if g.kind != GermKind::IntoDisk {
                continue;
            }
            // the next point along the germ decides freeness on the open piece
            let step = next_break(eq, &g.carrier, &g.t, g.dir);
            let mid = match g.dir {
                Direction::Forward => match &step {
                    Some(b) => (&g.t + b) / Rational::int(2),
                    None => &g.t + Rational::one(),
                },
                Direction::Backward => (&g.t + step.as_ref().unwrap()) / Rational::int(2),
            };
            let sg = eq.sigma_on(g.carrier).eval(&mid).unwrap();
            let vals: Vec<Rational> = eq.radii_on(g.carrier).iter().map(|f| f.eval(&mid).unwrap()).collect();
            for i in 1..=eq.rank {
                let free = vals[..i].iter().all(|v| v < &sg) && cls.classes[..i].iter().all(|c| *c != RadiusClass::Solvable);
                let s = eq.slope(&g, Func::H(i));
                if free && s.is_negative() {
                    out.push(MonotonicityFailure { point: eq.point_id(&x), index: i, slope: s });
                }
            }
        }
    }
    out
}

/// Next break point of any radius strictly beyond `t` in the given direction.
fn next_break(eq: &Equation, c: &super::Carrier, t: &Rational, dir: Direction) -> Option<Rational> {
    let mut ts = BTreeSet::new();
    for f in eq.radii_on(*c) {
        ts.extend(f.breakpoints());
    }
    if let Some(l) = eq.radii_on(*c)[0].length() {
        ts.insert(l.clone());
    }
    match dir {
        Direction::Forward => ts.into_iter().find(|s| s > t),
        Direction::Backward => ts.into_iter().rev().find(|s| s < t),
    }
}
