//! Local and global index formulas.
//!
//! Everything here is computed from a validated [`Equation`]. Two
//! independent routes to the global index are kept side by side: the sum of
//! local contributions `χ(x, S, ℱ)` over the triangulation, and the form
//! `r·χ_c(X) − Irr(X)` driven by boundary Laplacians and germs at infinity.
//! Their agreement is asserted by [`global_index`].

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::radii::{Equation, Func, GermKind, LocalGerm, Point, ProfileError};
use crate::rational::Rational;
use crate::skeleton::{chi_c_with, Germ};

mod limit;
mod variants;

pub use limit::*;
pub use variants::*;

/// Hypotheses that cannot be read off the radii.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EquationFlags {
    /// Germ ids on which the equation is free of Liouville numbers; `"*"` covers all.
    #[serde(default)]
    pub liouville_free_on: BTreeSet<String>,
    /// Germs outside `X` at each boundary point, for the overconvergent index.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub overconvergent_data: BTreeMap<String, Vec<OutsideGerm>>,
    /// Rays whose continuation beyond the stored graph is declared infinitely controlled.
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub infinite_tails: BTreeSet<String>,
}

impl EquationFlags {
    pub fn all_liouville() -> Self {
        EquationFlags { liouville_free_on: ["*".to_string()].into(), ..Default::default() }
    }

    pub fn liouville(&self, germ: &str) -> bool {
        self.liouville_free_on.contains("*") || self.liouville_free_on.contains(germ)
    }
}

/// A germ leaving `X` at a boundary point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutsideGerm {
    pub degree: u32,
    pub irr: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    Finite { chi: i64 },
    Infinite { reason: String },
    Undetermined { reason: String },
}

impl Verdict {
    pub fn chi(&self) -> Option<i64> {
        match self {
            Verdict::Finite { chi } => Some(*chi),
            _ => None,
        }
    }

    fn from_value(v: &Rational) -> Verdict {
        match v.to_i64() {
            Some(chi) if v.is_integer() => Verdict::Finite { chi },
            _ => Verdict::Undetermined { reason: format!("non-integral index {v}") },
        }
    }
}

/// `Irr_b = −deg(b)·∂_b H_{∅,r}`, with the slope localized according to the germ kind.
pub fn irr_germ(eq: &Equation, x: &Point, g: &LocalGerm) -> Rational {
    -(eq.localized_boundary_slope(x, g) * g.degree as i64)
}

/// `Irr` of a germ at infinity (ray end or disk marker), oriented inward.
pub fn irr_at_infinity(eq: &Equation, g: Germ) -> Rational {
    -(eq.localized_infinity_slope(g) * eq.sk.germ_degree(g) as i64)
}

pub fn skeleton_germs(eq: &Equation, x: &Point) -> Vec<LocalGerm> {
    eq.germs_at(x).into_iter().filter(|g| g.kind == GermKind::Skeleton).collect()
}

/// Germs of `Γ_S(ℱ) − Γ_S` out of `x`: directions into disks where some radius varies.
pub fn active_branches(eq: &Equation, x: &Point) -> Vec<LocalGerm> {
    eq.germs_at(x)
        .into_iter()
        .filter(|g| g.kind == GermKind::IntoDisk && (1..=eq.rank).any(|i| eq.direction_active(g, Func::R(i))))
        .collect()
}

/// `χ(x, S, ℱ) = r·χ(x, S) − Σ_{b ∈ Γ_S} Irr_b`.
pub fn chi_x_s_f(eq: &Equation, x: &Point) -> Rational {
    let r = eq.rank as i64;
    let irr: Rational = skeleton_germs(eq, x).iter().map(|g| irr_germ(eq, x, g)).sum();
    Rational::int(r * eq.chi_s(x)) - irr
}

/// The same count over `Γ_S(ℱ)`: active branches enter with their localized slopes.
pub fn chi_tot(eq: &Equation, x: &Point) -> Rational {
    let r = eq.rank as i64;
    let branches = active_branches(eq, x);
    let chi = eq.chi_s(x) - branches.iter().map(|g| g.degree as i64).sum::<i64>();
    let irr: Rational = skeleton_germs(eq, x).iter().chain(&branches).map(|g| irr_germ(eq, x, g)).sum();
    Rational::int(r * chi) - irr
}

/// `Δ_r(x) = dd^c H_r(x) + r·χ(x, S)` at a point of `S`.
pub fn delta_r(eq: &Equation, x: &Point) -> Rational {
    eq.intrinsic_laplacian(x, eq.rank)
}

/// `χ(x, S, ℱ) = A + B + C` split at the spectral index `i_sp`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub i_sp: usize,
    /// `(r − i_sp)·χ(x, S)`.
    pub a: Rational,
    /// `−Σ deg ∂H_{i_sp}` over the active branches; never positive.
    pub b: Rational,
    /// `Σ deg Σ_{j > i_sp} ∂R_j` over `Γ_S` germs; never positive.
    pub c: Rational,
    pub holds: bool,
}

pub fn decompose(eq: &Equation, x: &Point) -> Decomposition {
    let i_sp = eq.classify(x).i_sp;
    let chi = eq.chi_s(x);
    let a = Rational::int((eq.rank - i_sp) as i64 * chi);
    let b: Rational = if i_sp == 0 {
        Rational::zero()
    } else {
        -active_branches(eq, x)
            .iter()
            .map(|g| eq.slope(g, Func::H(i_sp)) * g.degree as i64)
            .sum::<Rational>()
    };
    let c: Rational = skeleton_germs(eq, x)
        .iter()
        .map(|g| (i_sp + 1..=eq.rank).map(|j| eq.slope(g, Func::R(j))).sum::<Rational>() * g.degree as i64)
        .sum();
    let holds = !b.is_positive() && !c.is_positive() && &(&a + &b) + &c == chi_x_s_f(eq, x);
    Decomposition { i_sp, a, b, c, holds }
}

/// Radii must be log-affine along the skeleton of every pseudo-annulus.
pub fn adapted_failures(eq: &Equation) -> Vec<String> {
    let mut out = Vec::new();
    for c in eq.carriers() {
        if !eq.carrier_in_gamma_s(c) {
            continue;
        }
        for (i, f) in eq.radii_on(c).iter().enumerate() {
            if let Some(t) = f.breaks().first() {
                out.push(format!("log R_{} breaks on {} at {t}", i + 1, eq.carrier_id(c)));
            }
        }
    }
    for (v, x) in eq.sk.vertices.iter().enumerate() {
        let p = Point::Vertex(v);
        if x.in_s || !eq.on_gamma_s(&p) {
            continue;
        }
        let gs = skeleton_germs(eq, &p);
        for i in 1..=eq.rank {
            let s: Rational = gs.iter().map(|g| eq.slope(g, Func::R(i))).sum();
            if !s.is_zero() {
                out.push(format!("log R_{i} bends at {} outside S", x.id));
            }
        }
    }
    out
}

fn s_points(eq: &Equation) -> Vec<Point> {
    (0..eq.sk.vertices.len()).filter(|&v| eq.sk.vertices[v].in_s).map(Point::Vertex).collect()
}

fn is_boundary(eq: &Equation, x: &Point) -> bool {
    matches!(x, Point::Vertex(v) if eq.sk.vertices[*v].is_boundary)
}

/// Reasons the global index formula does not apply; empty when it does.
pub fn index_preconditions(eq: &Equation, flags: &EquationFlags, spectral_boundary: bool) -> Vec<String> {
    let mut out = adapted_failures(eq);
    for x in s_points(eq) {
        let id = eq.point_id(&x);
        let v = &eq.sk.vertices[match x {
            Point::Vertex(v) => v,
            _ => unreachable!(),
        }];
        if is_boundary(eq, &x) {
            if spectral_boundary && eq.classify(&x).i_sp < eq.rank {
                out.push(format!("boundary point {id} is not spectral non-solvable"));
            }
        } else if v.genus > 0 && !v.tr_ok {
            out.push(format!("{id} has positive genus without (TR)"));
        }
        for g in skeleton_germs(eq, &x).iter().chain(&active_branches(eq, &x)) {
            let gid = eq.sk.germ_id(g.germ.unwrap());
            if !flags.liouville(&gid) {
                out.push(format!("germ {gid} is not declared Liouville-free"));
            }
        }
    }
    for g in disk_ends(eq) {
        let gid = eq.sk.germ_id(g);
        if !flags.liouville(&gid) {
            out.push(format!("germ {gid} is not declared Liouville-free"));
        }
    }
    out
}

/// Open ends of disk components and disk markers.
pub fn disk_ends(eq: &Equation) -> Vec<Germ> {
    let mut out: Vec<Germ> = (0..eq.topo.comps.len())
        .filter_map(|c| eq.topo.disk_ray(eq.sk, c))
        .map(Germ::RayEnd)
        .collect();
    out.extend((0..eq.sk.disk_components as usize).map(Germ::Disk));
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrregularityReport {
    /// `Δ_r(x)` at each boundary point.
    pub boundary: BTreeMap<String, Rational>,
    /// `Irr_b` at each germ at infinity.
    pub open: BTreeMap<String, Rational>,
    pub irr: Rational,
}

/// `Irr(X) = Σ_{∂X} Δ_r(x) − Σ_{∂°X} Irr_b`; refuses unless every radius is
/// spectral non-solvable at the boundary.
pub fn global_irregularity(eq: &Equation) -> Result<IrregularityReport, ProfileError> {
    let mut boundary = BTreeMap::new();
    for x in s_points(eq).into_iter().filter(|x| is_boundary(eq, x)) {
        if eq.classify(&x).i_sp < eq.rank {
            return Err(ProfileError::Refusal(format!(
                "boundary point {} is not spectral non-solvable",
                eq.point_id(&x)
            )));
        }
        boundary.insert(eq.point_id(&x), delta_r(eq, &x));
    }
    let open: BTreeMap<String, Rational> =
        eq.sk.open_boundary().into_iter().map(|g| (eq.sk.germ_id(g), irr_at_infinity(eq, g))).collect();
    let irr = boundary.values().sum::<Rational>() - open.values().sum::<Rational>();
    Ok(IrregularityReport { boundary, open, irr })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexReport {
    pub rank: usize,
    pub chi_c: i64,
    /// `χ(x, S, ℱ)` at interior points of `S`.
    pub chi_x_s_f: BTreeMap<String, Rational>,
    pub chi_tot: BTreeMap<String, Rational>,
    pub decomposition: BTreeMap<String, Decomposition>,
    /// `r·deg + Irr_b` for active branches at boundary points.
    pub boundary_branches: BTreeMap<String, Rational>,
    /// `r·deg + Irr` for disk components and disk markers.
    pub disk_terms: BTreeMap<String, Rational>,
    pub irregularity: Option<IrregularityReport>,
    pub chi_sum: Rational,
    pub chi_gos: Option<Rational>,
    pub agree: Option<bool>,
    /// `#{i : log R_i ≡ 0}` summed over components.
    pub h0: usize,
    pub verdict: Verdict,
}

/// Contribution of a disk end: `r·deg + Irr`.
fn disk_term(eq: &Equation, g: Germ) -> Rational {
    Rational::int(eq.rank as i64 * eq.sk.germ_degree(g) as i64) + irr_at_infinity(eq, g)
}

/// `Σ_{S−∂X} χ(x,S,ℱ) + Σ_{∂X} Σ_{branches} (r·deg + Irr_b) + Σ_{disks} (r·deg + Irr)`.
fn local_sum(eq: &Equation, rep: &mut IndexReport) -> Rational {
    let r = eq.rank as i64;
    let mut sum = Rational::zero();
    for x in s_points(eq) {
        let id = eq.point_id(&x);
        if is_boundary(eq, &x) {
            for g in active_branches(eq, &x) {
                let term = Rational::int(r * g.degree as i64) + irr_germ(eq, &x, &g);
                sum += &term;
                rep.boundary_branches.insert(eq.sk.germ_id(g.germ.unwrap()), term);
            }
        } else {
            let c = chi_x_s_f(eq, &x);
            sum += &c;
            rep.chi_x_s_f.insert(id.clone(), c);
            rep.chi_tot.insert(id.clone(), chi_tot(eq, &x));
            rep.decomposition.insert(id, decompose(eq, &x));
        }
    }
    for g in disk_ends(eq) {
        let term = disk_term(eq, g);
        sum += &term;
        rep.disk_terms.insert(eq.sk.germ_id(g), term);
    }
    sum
}

/// `h⁰`: radii identically 0 on a whole component, summed over components.
pub fn h0_global(eq: &Equation) -> usize {
    let zero_on = |cs: &[crate::radii::Carrier], vs: &[usize], i: usize| {
        cs.iter().all(|&c| {
            let f = eq.plf(c, Func::R(i));
            f.is_constant() && f.value_at_start().is_zero()
        }) && vs.iter().all(|&v| eq.value(&Point::Vertex(v), Func::R(i)).is_zero())
    };
    let mut n = 0;
    for comp in &eq.topo.comps {
        let mut cs: Vec<crate::radii::Carrier> = comp.edges.iter().map(|&e| crate::radii::Carrier::Edge(e)).collect();
        cs.extend(comp.rays.iter().map(|&r| crate::radii::Carrier::Ray(r)));
        n += (1..=eq.rank).filter(|&i| zero_on(&cs, &comp.vertices, i)).count();
    }
    n + eq.profile.disks.iter().map(|d| d.iter().filter(|c| c.is_zero()).count()).sum::<usize>()
}

/// Global index by both routes, with the verdict.
pub fn global_index(eq: &Equation, flags: &EquationFlags) -> IndexReport {
    let r = eq.rank as i64;
    let chi_c = chi_c_with(eq.sk, &eq.topo);
    let mut rep = IndexReport {
        rank: eq.rank,
        chi_c,
        chi_x_s_f: BTreeMap::new(),
        chi_tot: BTreeMap::new(),
        decomposition: BTreeMap::new(),
        boundary_branches: BTreeMap::new(),
        disk_terms: BTreeMap::new(),
        irregularity: None,
        chi_sum: Rational::zero(),
        chi_gos: None,
        agree: None,
        h0: h0_global(eq),
        verdict: Verdict::Undetermined { reason: String::new() },
    };
    rep.chi_sum = local_sum(eq, &mut rep);
    let irr = global_irregularity(eq);
    if let Ok(irr) = &irr {
        let gos = Rational::int(r * chi_c) - &irr.irr;
        rep.agree = Some(gos == rep.chi_sum);
        rep.chi_gos = Some(gos);
    }
    rep.irregularity = irr.ok();
    let reasons = index_preconditions(eq, flags, true);
    let tails: Vec<&String> = flags.infinite_tails.iter().filter(|t| eq.topo.rindex.contains_key(*t)).collect();
    rep.verdict = if !tails.is_empty() {
        Verdict::Infinite { reason: format!("declared infinite tail on {}", tails[0]) }
    } else if !reasons.is_empty() {
        Verdict::Undetermined { reason: reasons.join("; ") }
    } else if rep.agree != Some(true) {
        Verdict::Undetermined {
            reason: format!("index formulas disagree: {} against {:?}", rep.chi_sum, rep.chi_gos.as_ref().map(|g| g.to_string())),
        }
    } else {
        Verdict::from_value(&rep.chi_sum)
    };
    rep
}
