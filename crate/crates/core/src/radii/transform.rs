//! Changes of triangulation, subdivision and splitting by index.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{clipped_sum, sigma_plfs, Carrier, Equation, Func, MultiRadiusProfile, ProfileError};
use crate::plf::{combine, CombineOp, Direction, PLFunction};
use crate::rational::Rational;
use crate::skeleton::{CurveSkeleton, Edge, Germ, Ray, SkeletonError, Vertex};

fn same_graph(a: &CurveSkeleton, b: &CurveSkeleton) -> Result<(), String> {
    let key_v = |s: &CurveSkeleton| -> Vec<(String, u32, u32)> {
        s.vertices.iter().map(|v| (v.id.clone(), v.genus, v.t)).collect()
    };
    let key_e = |s: &CurveSkeleton| -> Vec<(String, String, String, Rational, u32)> {
        s.edges
            .iter()
            .map(|e| (e.id.clone(), e.from.clone(), e.to.clone(), e.length.clone(), e.germ_degree))
            .collect()
    };
    let key_r = |s: &CurveSkeleton| -> Vec<(String, String, u32, Option<Rational>)> {
        s.rays.iter().map(|r| (r.id.clone(), r.anchor.clone(), r.germ_degree, r.length.clone())).collect()
    };
    if key_v(a) != key_v(b) || key_e(a) != key_e(b) || key_r(a) != key_r(b) || a.disk_components != b.disk_components {
        return Err("the new triangulation must live on the same stored graph".into());
    }
    Ok(())
}

/// Radii with respect to a finer triangulation `S' ⊇ S` on the same graph:
/// `log R' = min(0, log R + dist(−,Γ_S) − dist(−,Γ_{S'}))`.
pub fn change_triangulation(eq: &Equation, new_sk: &CurveSkeleton) -> Result<MultiRadiusProfile, ProfileError> {
    let topo = new_sk.validated()?;
    same_graph(eq.sk, new_sk).map_err(ProfileError::Precondition)?;
    for (v, w) in eq.sk.vertices.iter().zip(&new_sk.vertices) {
        if v.in_s && !w.in_s {
            return Err(ProfileError::Precondition(format!("{} leaves S", v.id)));
        }
    }
    for (e, f) in eq.sk.edges.iter().zip(&new_sk.edges) {
        if e.in_gamma_s && !f.in_gamma_s {
            return Err(ProfileError::Precondition(format!("{} leaves the skeleton", e.id)));
        }
    }
    let old_sigma = sigma_plfs(eq.sk, &eq.topo);
    let new_sigma = sigma_plfs(new_sk, &topo);
    let mut out = MultiRadiusProfile { rank: eq.rank, disks: eq.profile.disks.clone(), ..Default::default() };
    for c in eq.carriers() {
        let ci = eq.carrier_index(c);
        let log_f = combine(&CombineOp::Sum, &[new_sigma[ci].clone(), combine(&CombineOp::Scale(-Rational::one()), &[old_sigma[ci].clone()]).unwrap()])
            .unwrap();
        let fs: Vec<PLFunction> = eq.radii_on(c).iter().map(|f| clipped_sum(f, &log_f).simplified()).collect();
        let id = eq.carrier_id(c).to_string();
        match c {
            Carrier::Edge(_) => out.edges.insert(id, fs),
            Carrier::Ray(_) => out.rays.insert(id, fs),
        };
    }
    for (id, vals) in &eq.profile.vertex_values {
        let v = eq.topo.vindex[id];
        let shift = &eq.sk.vertices[v].dist - &new_sk.vertices[v].dist;
        out.vertex_values
            .insert(id.clone(), vals.iter().map(|x| (x + &shift).min(Rational::zero())).collect());
    }
    Ok(out)
}

/// Puts the given vertices into `S`, together with their paths down to the
/// skeleton, and recomputes distances.
pub fn promote(sk: &CurveSkeleton, ids: &[String]) -> Result<CurveSkeleton, ProfileError> {
    let topo = sk.validated()?;
    let mut out = sk.clone();
    for id in ids {
        let mut v = *topo.vindex.get(id).ok_or_else(|| ProfileError::Argument(format!("unknown vertex {id}")))?;
        if !topo.comps[topo.comp_of[v]].has_s {
            return Err(ProfileError::Precondition(format!("{id} lies in a component without S")));
        }
        loop {
            let x = &mut out.vertices[v];
            x.in_s = true;
            x.dist = Rational::zero();
            match topo.parent[v] {
                Some(Germ::EdgeEnd { edge, .. }) if !sk.edges[edge].in_gamma_s => {
                    out.edges[edge].in_gamma_s = true;
                    v = topo.far_end(topo.parent[v].unwrap()).unwrap();
                }
                _ => break,
            }
        }
    }
    let t2 = out.topology()?;
    for (v, d) in t2.computed_dist.iter().enumerate() {
        if let Some(d) = d {
            out.vertices[v].dist = d.clone();
        }
    }
    Ok(out)
}

/// Inserts a vertex at `t` on an edge or ray; the profile is cut accordingly.
pub fn subdivide(
    sk: &CurveSkeleton,
    profile: &MultiRadiusProfile,
    carrier: &str,
    t: &Rational,
    new_id: &str,
) -> Result<(CurveSkeleton, MultiRadiusProfile), ProfileError> {
    let eq = Equation::new(sk, profile)?;
    if eq.topo.vindex.contains_key(new_id) {
        return Err(ProfileError::Argument(format!("vertex {new_id} already exists")));
    }
    let c = if let Some(&e) = eq.topo.eindex.get(carrier) {
        Carrier::Edge(e)
    } else if let Some(&r) = eq.topo.rindex.get(carrier) {
        Carrier::Ray(r)
    } else {
        return Err(ProfileError::Argument(format!("unknown carrier {carrier}")));
    };
    let fs = eq.radii_on(c);
    let inside = t.is_positive() && fs[0].length().is_none_or(|l| t < l);
    if !inside {
        return Err(ProfileError::Argument(format!("{t} is not interior to {carrier}")));
    }
    let mut nsk = sk.clone();
    let mut np = profile.clone();
    let dist = -eq.sigma_on(c).eval(t).unwrap();
    let mut nv = Vertex::plain(new_id, dist);
    nv.t = eq.carrier_degree(c);
    nsk.vertices.push(nv);
    let first: Vec<PLFunction> = fs.iter().map(|f| f.restrict(&Rational::zero(), t).unwrap()).collect();
    match c {
        Carrier::Edge(e) => {
            let old = sk.edges[e].clone();
            let second: Vec<PLFunction> = fs.iter().map(|f| f.restrict(t, &old.length).unwrap()).collect();
            let a = Edge { id: format!("{}.1", old.id), to: new_id.into(), length: t.clone(), ..old.clone() };
            let b = Edge { id: format!("{}.2", old.id), from: new_id.into(), length: &old.length - t, ..old.clone() };
            np.edges.remove(&old.id);
            np.edges.insert(a.id.clone(), first);
            np.edges.insert(b.id.clone(), second);
            nsk.edges.splice(e..=e, [a, b]);
        }
        Carrier::Ray(r) => {
            let old = sk.rays[r].clone();
            let second: Vec<PLFunction> = fs
                .iter()
                .map(|f| match f.length() {
                    Some(l) => f.restrict(t, l).unwrap(),
                    None => f.restrict_tail(t).unwrap(),
                })
                .collect();
            let in_gs = sk.germ_in_gamma_s(&eq.topo, Germ::RayAnchor(r));
            let mut eid = format!("{}.0", old.id);
            while eq.topo.eindex.contains_key(&eid) {
                eid.push('\'');
            }
            let mut a = Edge::new(&eid, &old.anchor, new_id, t.clone(), in_gs);
            a.germ_degree = old.germ_degree;
            let b = Ray { anchor: new_id.into(), length: old.length.as_ref().map(|l| l - t), ..old.clone() };
            np.edges.insert(a.id.clone(), first);
            np.rays.insert(b.id.clone(), second);
            nsk.edges.push(a);
            nsk.rays[r] = b;
        }
    }
    nsk.validated().map_err(|e| match e {
        SkeletonError::Invalid(v) => ProfileError::Precondition(format!("subdivision breaks the skeleton: {v:?}")),
        other => other.into(),
    })?;
    Ok((nsk, np))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitProfile {
    /// Radii `i..r`.
    pub geq: MultiRadiusProfile,
    /// Radii `1..i−1`, absent for `i = 1`.
    pub lt: Option<MultiRadiusProfile>,
    /// `Γ_{S,1} ∪ … ∪ Γ_{S,i−1} ⊆ Γ_{S,i}`.
    pub direct_summand: bool,
}

fn sub_rank(p: &MultiRadiusProfile, lo: usize, hi: usize) -> MultiRadiusProfile {
    let cut = |m: &BTreeMap<String, Vec<PLFunction>>| m.iter().map(|(k, v)| (k.clone(), v[lo..hi].to_vec())).collect();
    MultiRadiusProfile {
        rank: hi - lo,
        edges: cut(&p.edges),
        rays: cut(&p.rays),
        disks: p.disks.iter().map(|d| d[lo..hi].to_vec()).collect(),
        vertex_values: p.vertex_values.iter().map(|(k, v)| (k.clone(), v[lo..hi].to_vec())).collect(),
    }
}

/// Separates the radii `≥ i` from the smaller ones when `R_{i−1} < R_i` everywhere.
pub fn split_profile(eq: &Equation, i: usize) -> Result<SplitProfile, ProfileError> {
    if i == 0 || i > eq.rank {
        return Err(ProfileError::Argument(format!("index {i} outside 1..={}", eq.rank)));
    }
    if i == 1 {
        return Ok(SplitProfile { geq: eq.profile.clone(), lt: None, direct_summand: true });
    }
    for c in eq.carriers() {
        let lo = eq.plf(c, Func::R(i - 1));
        let hi = eq.plf(c, Func::R(i));
        let gap = combine(&CombineOp::Sum, &[hi.clone(), combine(&CombineOp::Scale(-Rational::one()), std::slice::from_ref(lo)).unwrap()])
            .unwrap();
        let mut ts: BTreeSet<Rational> = gap.breakpoints().into_iter().collect();
        if gap.is_ray() && gap.tail_slope().is_negative() {
            let (t0, v0) = gap.points().last().unwrap().clone();
            ts.insert(t0 - v0 / gap.tail_slope());
        }
        if let Some(t) = ts.into_iter().find(|t| !gap.eval(t).unwrap().is_positive()) {
            return Err(ProfileError::Refusal(format!(
                "radii {} and {i} meet at {}:{t}",
                i - 1,
                eq.carrier_id(c)
            )));
        }
    }
    for (k, d) in eq.profile.disks.iter().enumerate() {
        if d[i - 2] >= d[i - 1] {
            return Err(ProfileError::Refusal(format!("radii {} and {i} meet on disk:{k}", i - 1)));
        }
    }
    for (id, d) in &eq.profile.vertex_values {
        if d[i - 2] >= d[i - 1] {
            return Err(ProfileError::Refusal(format!("radii {} and {i} meet at {id}", i - 1)));
        }
    }
    let top = eq.controlling_graph(Func::R(i));
    let direct_summand = (1..i).all(|j| eq.controlling_graph(Func::R(j)).is_subset(&top));
    Ok(SplitProfile {
        geq: sub_rank(eq.profile, i - 1, eq.rank),
        lt: Some(sub_rank(eq.profile, 0, i - 1)),
        direct_summand,
    })
}

/// Slope of `H_i` along every stored germ out of `x`, keyed by germ id.
pub fn height_slopes(eq: &Equation, x: &super::Point, i: usize) -> BTreeMap<String, Rational> {
    eq.germs_at(x)
        .iter()
        .map(|g| {
            let id = match g.germ {
                Some(gm) => eq.sk.germ_id(gm),
                None => format!("{}{}", eq.carrier_id(g.carrier), if g.dir == Direction::Forward { "+" } else { "-" }),
            };
            (id, eq.slope(g, Func::H(i)))
        })
        .collect()
}
