//! Disk, pseudo-disk, overconvergent and meromorphic variants, vanishing
//! and finite control, and additivity of the irregularity over covers.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{
    chi_tot, chi_x_s_f, delta_r, disk_ends, disk_term, index_preconditions, irr_at_infinity, irr_germ, s_points,
    skeleton_germs, EquationFlags, Verdict,
};
use crate::plf::Direction;
use crate::radii::{Carrier, Equation, Func, GermKind, Point, ProfileError};
use crate::rational::Rational;
use crate::skeleton::{chi_c_with, Germ, SubDomain};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiskIndex {
    pub germ: String,
    pub chi: Rational,
    pub h0: Rational,
    pub h1: Rational,
    /// With every radius spectral non-solvable on the germ: `χ ≤ 0`, and `χ = 0`
    /// exactly when the height is flat there.
    pub spectral_check: Option<bool>,
}

/// Index of the disk behind a germ: a branch out of a vertex into a disk,
/// the open end of a disk component, or a disk marker.
pub fn disk_index(eq: &Equation, germ: &str, flags: &EquationFlags) -> Result<DiskIndex, ProfileError> {
    let g = eq.sk.parse_germ(germ)?;
    if !flags.liouville(germ) {
        return Err(ProfileError::Refusal(format!("germ {germ} is not declared Liouville-free")));
    }
    let r = eq.rank as i64;
    let deg = eq.sk.germ_degree(g) as i64;
    let (chi, slope, spectral) = match g {
        Germ::Disk(_) | Germ::RayEnd(_) => {
            if !eq.is_disk_end(g) {
                return Err(ProfileError::Argument(format!("{germ} does not close a disk")));
            }
            (
                Rational::int(r * deg) + irr_at_infinity(eq, g),
                eq.inward_height_slope(g),
                eq.spectral_at_infinity(g),
            )
        }
        _ => {
            let x = Point::Vertex(eq.topo.base(g).unwrap());
            let lg = eq.germs_at(&x).into_iter().find(|h| h.germ == Some(g)).unwrap();
            if lg.kind != GermKind::IntoDisk {
                return Err(ProfileError::Argument(format!("{germ} does not point into a disk")));
            }
            (
                Rational::int(r * deg) + irr_germ(eq, &x, &lg),
                eq.slope(&lg, Func::H(eq.rank)),
                eq.classify(&x).i_sp == eq.rank,
            )
        }
    };
    let h1 = &slope * deg;
    let spectral_check = spectral.then(|| !chi.is_positive() && chi.is_zero() == slope.is_zero());
    Ok(DiskIndex { germ: germ.to_string(), h0: &chi + &h1, chi, h1, spectral_check })
}

/// Index of a disk exhausted along a ray: finite unless the tail is declared
/// infinite, in which case `h¹` has infinite dimension.
pub fn pseudodisk_index(eq: &Equation, ray: &str, flags: &EquationFlags) -> Result<Verdict, ProfileError> {
    let &ri = eq.topo.rindex.get(ray).ok_or_else(|| ProfileError::Argument(format!("unknown ray {ray}")))?;
    if flags.infinite_tails.contains(ray) {
        return Ok(Verdict::Infinite { reason: format!("declared infinite tail on {ray}") });
    }
    let g = Germ::RayEnd(ri);
    let gid = eq.sk.germ_id(g);
    if !flags.liouville(&gid) {
        return Err(ProfileError::Refusal(format!("germ {gid} is not declared Liouville-free")));
    }
    let fs = eq.radii_on(Carrier::Ray(ri));
    let h0 = match fs[0].length() {
        Some(_) => eq.h0_at_infinity(g),
        None => fs
            .iter()
            .filter(|f| f.tail_slope().is_zero() && f.points().last().unwrap().1.is_zero())
            .count(),
    };
    let deg = eq.sk.germ_degree(g) as i64;
    let chi = (Rational::int(h0 as i64) - eq.inward_height_slope(g)) * deg;
    Ok(Verdict::from_value(&chi))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverconvergentReport {
    /// `χ†(x) = χ(x,S,ℱ) − r·t_x − Σ Irr_j` at boundary points.
    pub boundary: BTreeMap<String, Rational>,
    pub chi_sum: Rational,
    pub chi_gos: Rational,
    pub agree: bool,
    pub verdict: Verdict,
}

/// Index of the overconvergent equation on `X†`: boundary points become
/// interior, with the outside germs given in the flags.
pub fn overconvergent_index(eq: &Equation, flags: &EquationFlags) -> Result<OverconvergentReport, ProfileError> {
    let r = eq.rank as i64;
    let mut boundary = BTreeMap::new();
    let mut sum = Rational::zero();
    let mut outside_deg = 0i64;
    let mut outside_irr = Rational::zero();
    for x in s_points(eq) {
        let id = eq.point_id(&x);
        let Point::Vertex(v) = x else { unreachable!() };
        let vx = &eq.sk.vertices[v];
        if !vx.is_boundary {
            sum += chi_x_s_f(eq, &x);
            continue;
        }
        let data = flags
            .overconvergent_data
            .get(&id)
            .ok_or_else(|| ProfileError::Precondition(format!("no outside germs given at {id}")))?;
        let deg: u32 = data.iter().map(|o| o.degree).sum();
        if deg != vx.t {
            return Err(ProfileError::Precondition(format!(
                "outside germs at {id} have total degree {deg}, expected {}",
                vx.t
            )));
        }
        let irr: Rational = data.iter().map(|o| o.irr.clone()).sum();
        let c = chi_x_s_f(eq, &x) - Rational::int(r * vx.t as i64) - &irr;
        sum += &c;
        boundary.insert(id, c);
        outside_deg += deg as i64;
        outside_irr += irr;
    }
    for g in disk_ends(eq) {
        sum += disk_term(eq, g);
    }
    let open: Rational = eq.sk.open_boundary().into_iter().map(|g| irr_at_infinity(eq, g)).sum();
    let chi_c = chi_c_with(eq.sk, &eq.topo) - outside_deg;
    let gos = Rational::int(r * chi_c) - (outside_irr - open);
    let agree = gos == sum;
    let reasons = index_preconditions(eq, flags, false);
    let verdict = if !reasons.is_empty() {
        Verdict::Undetermined { reason: reasons.join("; ") }
    } else if !agree {
        Verdict::Undetermined { reason: format!("index formulas disagree: {sum} against {gos}") }
    } else {
        Verdict::from_value(&sum)
    };
    Ok(OverconvergentReport { boundary, chi_sum: sum, chi_gos: gos, agree, verdict })
}

/// A pole of a meromorphic equation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Puncture {
    pub id: String,
    #[serde(default = "one")]
    pub degree: u32,
    /// Irregularity at the pole; unknown values leave the index undetermined.
    pub irr: Option<Rational>,
}

fn one() -> u32 {
    1
}

/// `r·(χ_c(Y) − Σ deg z) − Σ_{∂X} χ_tot(x) + Σ_{∂°Y} Irr_b + Σ_z Irr_z`.
pub fn meromorphic_index(
    r: usize,
    chi_c_y: i64,
    punctures: &[Puncture],
    boundary_chi_tot: &Rational,
    open_irr: &Rational,
) -> Verdict {
    let mut irr = Rational::zero();
    for z in punctures {
        match &z.irr {
            Some(i) => irr += i,
            None => return Verdict::Undetermined { reason: format!("irregularity at {} is unknown", z.id) },
        }
    }
    let deg: i64 = punctures.iter().map(|z| z.degree as i64).sum();
    let chi = Rational::int(r as i64 * (chi_c_y - deg)) - boundary_chi_tot + open_irr + irr;
    Verdict::from_value(&chi)
}

/// [`meromorphic_index`] with the curve and its boundary read from an equation.
pub fn meromorphic_index_on(eq: &Equation, punctures: &[Puncture]) -> Verdict {
    let bd: Rational = s_points(eq)
        .iter()
        .filter(|x| matches!(x, Point::Vertex(v) if eq.sk.vertices[*v].is_boundary))
        .map(|x| chi_tot(eq, x))
        .sum();
    let open: Rational = eq.sk.open_boundary().into_iter().map(|g| irr_at_infinity(eq, g)).sum();
    meromorphic_index(eq.rank, chi_c_with(eq.sk, &eq.topo), punctures, &bd, &open)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteControl {
    pub finite: bool,
    /// Points where the radii are not controlled by the skeleton alone.
    pub points: Vec<String>,
}

/// Boundary, genus, bifurcations of `Γ_S` and break points of the radii on it.
pub fn finitely_controlled(eq: &Equation, flags: &EquationFlags) -> FiniteControl {
    let mut points = Vec::new();
    for x in eq.points() {
        if !eq.on_gamma_s(&x) {
            continue;
        }
        let id = eq.point_id(&x);
        match x {
            Point::Vertex(v) => {
                let vx = &eq.sk.vertices[v];
                let gs = skeleton_germs(eq, &x);
                let bends = (1..=eq.rank)
                    .any(|i| !gs.iter().map(|g| eq.slope(g, Func::R(i))).sum::<Rational>().is_zero());
                if vx.is_boundary || vx.genus > 0 || gs.len() > 2 || (gs.len() == 2 && bends) {
                    points.push(id);
                }
            }
            Point::Inner { .. } => points.push(id),
        }
    }
    let tails: Vec<String> = flags.infinite_tails.iter().filter(|t| eq.topo.rindex.contains_key(*t)).cloned().collect();
    let finite = tails.is_empty();
    points.extend(tails.into_iter().map(|t| format!("{t}@inf")));
    FiniteControl { finite, points }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Vanishing {
    /// Every cohomology group vanishes.
    Zero,
    NoClaim { reason: String },
}

/// Vanishing criterion: on components with triangulation points, the
/// controlling graph is `Γ_S` and the radii are spectral non-solvable along
/// it; disks carry constant spectral non-solvable radii.
pub fn vanishing_verdict(eq: &Equation) -> Vanishing {
    let no = |reason: String| Vanishing::NoClaim { reason };
    for c in eq.carriers() {
        let id = eq.carrier_id(c).to_string();
        if eq.carrier_in_gamma_s(c) {
            let top = eq.plf(c, Func::R(eq.rank));
            let max_val = top.points().iter().map(|p| p.1.clone()).max().unwrap();
            if !max_val.is_negative() || top.is_ray() && top.tail_slope().is_positive() {
                return no(format!("a radius reaches the solvable threshold on {id}"));
            }
        } else {
            let comp = eq.topo.comps[eq.topo.comp_of[match c {
                Carrier::Edge(e) => eq.topo.edge_ends[e].0,
                Carrier::Ray(r) => eq.topo.ray_anchor[r],
            }]]
            .has_s;
            if comp && (1..=eq.rank).any(|i| !eq.plf(c, Func::R(i)).is_constant()) {
                return no(format!("the controlling graph leaves the skeleton along {id}"));
            }
        }
    }
    for (v, x) in eq.sk.vertices.iter().enumerate() {
        let p = Point::Vertex(v);
        if eq.on_gamma_s(&p) && eq.classify(&p).i_sp < eq.rank {
            return no(format!("a radius reaches the solvable threshold at {}", x.id));
        }
    }
    for (ci, comp) in eq.topo.comps.iter().enumerate() {
        if comp.has_s {
            continue;
        }
        let Some(r) = eq.topo.disk_ray(eq.sk, ci) else { continue };
        let flat = comp.edges.iter().map(|&e| Carrier::Edge(e)).chain(comp.rays.iter().map(|&r| Carrier::Ray(r)));
        let flat = flat.collect::<Vec<_>>();
        if flat.iter().any(|&c| (1..=eq.rank).any(|i| !eq.plf(c, Func::R(i)).is_constant())) {
            return no(format!("radii vary on the disk closed by {}", eq.sk.rays[r].id));
        }
        if !eq.spectral_at_infinity(Germ::RayEnd(r)) {
            return no(format!("radii are not spectral non-solvable at {}@inf", eq.sk.rays[r].id));
        }
    }
    for k in 0..eq.profile.disks.len() {
        if !eq.spectral_at_infinity(Germ::Disk(k)) {
            return no(format!("radii are not spectral non-solvable on disk:{k}"));
        }
    }
    if eq.sk.vertices.iter().all(|v| !v.in_s) && eq.profile.disks.is_empty() && eq.topo.comps.is_empty() {
        return no("empty curve".into());
    }
    Vanishing::Zero
}

/// Irregularity of an open sub-domain: `Σ_{∂U} Δ_r − Σ_{∂°U} Irr_b`.
/// Seams are open annuli, so their germs enter without localization shift.
pub fn irr_sub(eq: &Equation, u: &SubDomain) -> Result<Rational, ProfileError> {
    u.check(eq.sk, &eq.topo)?;
    let mut irr = Rational::zero();
    for id in &u.vertices {
        let x = eq.vertex(id)?;
        if eq.sk.vertices[eq.topo.vindex[id]].is_boundary {
            if eq.classify(&x).i_sp < eq.rank {
                return Err(ProfileError::Refusal(format!("boundary point {id} is not spectral non-solvable")));
            }
            irr += delta_r(eq, &x);
        }
    }
    for g in u.open_boundary(eq.sk, &eq.topo) {
        irr -= match g {
            Germ::RayEnd(_) | Germ::Disk(_) => irr_at_infinity(eq, g),
            Germ::EdgeEnd { edge, at_to } => {
                let h = eq.plf(Carrier::Edge(edge), Func::H(eq.rank));
                let s = if at_to {
                    h.slope(h.length().unwrap(), Direction::Backward).unwrap()
                } else {
                    h.slope(&Rational::zero(), Direction::Forward).unwrap()
                };
                -(s * eq.sk.edges[edge].germ_degree as i64)
            }
            Germ::RayAnchor(ri) => {
                let h = eq.plf(Carrier::Ray(ri), Func::H(eq.rank));
                -(h.slope(&Rational::zero(), Direction::Forward).unwrap() * eq.sk.rays[ri].germ_degree as i64)
            }
        };
    }
    Ok(irr)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrrCover {
    pub irr_u: Rational,
    pub irr_v: Rational,
    pub irr_uv: Rational,
    pub irr_x: Rational,
    pub equal: bool,
}

/// `Irr(U) + Irr(V) − Irr(U∩V)` against `Irr(X)` for an open cover.
pub fn irr_cover_check(eq: &Equation, u: &SubDomain, v: &SubDomain) -> Result<IrrCover, ProfileError> {
    if u.union(v) != SubDomain::whole(eq.sk) {
        return Err(ProfileError::Precondition("U and V do not cover X".into()));
    }
    let irr_u = irr_sub(eq, u)?;
    let irr_v = irr_sub(eq, v)?;
    let irr_uv = irr_sub(eq, &u.intersection(v))?;
    let irr_x = irr_sub(eq, &SubDomain::whole(eq.sk))?;
    let equal = &(&irr_u + &irr_v) - &irr_uv == irr_x;
    Ok(IrrCover { irr_u, irr_v, irr_uv, irr_x, equal })
}
