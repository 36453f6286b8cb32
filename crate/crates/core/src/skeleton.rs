//! Finite metric-graph model of a curve with a pseudo-triangulation.
//!
//! Vertices carry genus, degree `t`, boundary and triangulation marks and the
//! declared distance to the skeleton `Γ_S`. Edges and rays carry germ degrees.
//! Rays are unbounded unless they carry a `length`; a bounded ray is an open
//! end at finite distance (an annulus of finite modulus, or the open end of a
//! disk component that has no triangulation point).

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rational::Rational;

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: String,
    #[serde(default)]
    pub genus: u32,
    #[serde(default = "one")]
    pub t: u32,
    #[serde(default)]
    pub is_boundary: bool,
    #[serde(rename = "in_S", default)]
    pub in_s: bool,
    #[serde(default)]
    pub tr_ok: bool,
    #[serde(rename = "dist_to_GammaS", default)]
    pub dist: Rational,
}

impl Vertex {
    /// Genus-0, degree-1 point of `S`.
    pub fn s_point(id: &str) -> Self {
        Vertex {
            id: id.into(),
            genus: 0,
            t: 1,
            is_boundary: false,
            in_s: true,
            tr_ok: true,
            dist: Rational::zero(),
        }
    }

    /// Genus-0, degree-1 point outside `S` at the given depth.
    pub fn plain(id: &str, dist: Rational) -> Self {
        Vertex { in_s: false, dist, ..Vertex::s_point(id) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    pub from: String,
    pub to: String,
    pub length: Rational,
    #[serde(default = "one")]
    pub germ_degree: u32,
    #[serde(rename = "in_GammaS", default)]
    pub in_gamma_s: bool,
}

impl Edge {
    pub fn new(id: &str, from: &str, to: &str, length: Rational, in_gamma_s: bool) -> Self {
        Edge { id: id.into(), from: from.into(), to: to.into(), length, germ_degree: 1, in_gamma_s }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ray {
    pub id: String,
    pub anchor: String,
    #[serde(default = "one")]
    pub germ_degree: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<Rational>,
}

impl Ray {
    pub fn new(id: &str, anchor: &str) -> Self {
        Ray { id: id.into(), anchor: anchor.into(), germ_degree: 1, length: None }
    }

    pub fn bounded(id: &str, anchor: &str, length: Rational) -> Self {
        Ray { length: Some(length), ..Ray::new(id, anchor) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CurveSkeleton {
    #[serde(default)]
    pub vertices: Vec<Vertex>,
    #[serde(default)]
    pub edges: Vec<Edge>,
    #[serde(default)]
    pub rays: Vec<Ray>,
    #[serde(default)]
    pub disk_components: u32,
}

/// A germ of segment. Germs out of vertices point away from the vertex;
/// `RayEnd` and `Disk` are germs at infinity and point inward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Germ {
    /// Germ of an edge at its `from` end (`at_to = false`) or its `to` end.
    EdgeEnd { edge: usize, at_to: bool },
    RayAnchor(usize),
    RayEnd(usize),
    Disk(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub subject: String,
    pub rule: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]: {}", self.subject, self.rule, self.message)
    }
}

fn violation(subject: &str, rule: &str, message: impl Into<String>) -> Violation {
    Violation { subject: subject.into(), rule: rule.into(), message: message.into() }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SkeletonError {
    #[error("invalid skeleton: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("unknown germ or id {0:?}")]
    Unknown(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    pub rays: Vec<usize>,
    pub has_s: bool,
}

/// Adjacency and derived structure of a skeleton whose references resolve.
#[derive(Debug, Clone)]
pub struct Topology {
    pub vindex: HashMap<String, usize>,
    pub eindex: HashMap<String, usize>,
    pub rindex: HashMap<String, usize>,
    pub edge_ends: Vec<(usize, usize)>,
    pub ray_anchor: Vec<usize>,
    /// Germs out of each vertex, edges first then rays, in input order.
    pub incident: Vec<Vec<Germ>>,
    pub comp_of: Vec<usize>,
    pub comps: Vec<Component>,
    /// Germ out of a vertex pointing toward `Γ_S`, or toward the open end
    /// in a component without triangulation points.
    pub parent: Vec<Option<Germ>>,
    /// Distances recomputed from the graph.
    pub computed_dist: Vec<Option<Rational>>,
}

impl CurveSkeleton {
    pub fn vertex(&self, id: &str) -> Option<&Vertex> {
        self.vertices.iter().find(|v| v.id == id)
    }

    /// Structural checks that must pass before a [`Topology`] exists.
    fn structural(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        let ids = self
            .vertices
            .iter()
            .map(|v| &v.id)
            .chain(self.edges.iter().map(|e| &e.id))
            .chain(self.rays.iter().map(|r| &r.id));
        for id in ids {
            if !seen.insert(id.clone()) {
                out.push(violation(id, "unique_ids", "id used twice"));
            }
            if id.contains('@') || id.starts_with("disk:") || id == "*" {
                out.push(violation(id, "id_syntax", "ids may not contain '@', start with 'disk:' or be '*'"));
            }
        }
        let vids: BTreeSet<&str> = self.vertices.iter().map(|v| v.id.as_str()).collect();
        for v in &self.vertices {
            if v.t == 0 {
                out.push(violation(&v.id, "degree", "degree t must be at least 1"));
            }
            if v.dist.is_negative() {
                out.push(violation(&v.id, "dist", "negative distance"));
            }
        }
        for e in &self.edges {
            for end in [&e.from, &e.to] {
                if !vids.contains(end.as_str()) {
                    out.push(violation(&e.id, "reference", format!("unknown vertex {end}")));
                }
            }
            if e.from == e.to {
                out.push(violation(&e.id, "no_self_loop", "edge joins a vertex to itself"));
            }
            if !e.length.is_positive() {
                out.push(violation(&e.id, "length", "length must be positive"));
            }
            if e.germ_degree == 0 {
                out.push(violation(&e.id, "degree", "germ degree must be at least 1"));
            }
        }
        for r in &self.rays {
            if !vids.contains(r.anchor.as_str()) {
                out.push(violation(&r.id, "reference", format!("unknown vertex {}", r.anchor)));
            }
            if r.germ_degree == 0 {
                out.push(violation(&r.id, "degree", "germ degree must be at least 1"));
            }
            if let Some(l) = &r.length {
                if !l.is_positive() {
                    out.push(violation(&r.id, "length", "length must be positive"));
                }
            }
        }
        out
    }

    pub fn topology(&self) -> Result<Topology, SkeletonError> {
        let s = self.structural();
        if !s.is_empty() {
            return Err(SkeletonError::Invalid(s));
        }
        Ok(Topology::build(self))
    }

    /// Every violated invariant; empty iff the skeleton is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let s = self.structural();
        if !s.is_empty() {
            return s;
        }
        let topo = Topology::build(self);
        topo.violations(self)
    }

    pub fn validated(&self) -> Result<Topology, SkeletonError> {
        let v = self.validate();
        if v.is_empty() {
            Ok(Topology::build(self))
        } else {
            Err(SkeletonError::Invalid(v))
        }
    }

    pub fn germ_degree(&self, g: Germ) -> u32 {
        match g {
            Germ::EdgeEnd { edge, .. } => self.edges[edge].germ_degree,
            Germ::RayAnchor(r) | Germ::RayEnd(r) => self.rays[r].germ_degree,
            Germ::Disk(_) => 1,
        }
    }

    pub fn germ_id(&self, g: Germ) -> String {
        match g {
            Germ::EdgeEnd { edge, at_to } => {
                let e = &self.edges[edge];
                format!("{}@{}", e.id, if at_to { &e.to } else { &e.from })
            }
            Germ::RayAnchor(r) => self.rays[r].id.clone(),
            Germ::RayEnd(r) => format!("{}@inf", self.rays[r].id),
            Germ::Disk(k) => format!("disk:{k}"),
        }
    }

    pub fn parse_germ(&self, s: &str) -> Result<Germ, SkeletonError> {
        let unknown = || SkeletonError::Unknown(s.to_string());
        if let Some(k) = s.strip_prefix("disk:") {
            let k: usize = k.parse().map_err(|_| unknown())?;
            return if k < self.disk_components as usize { Ok(Germ::Disk(k)) } else { Err(unknown()) };
        }
        match s.split_once('@') {
            None => self.rays.iter().position(|r| r.id == s).map(Germ::RayAnchor).ok_or_else(unknown),
            Some((a, "inf")) => self.rays.iter().position(|r| r.id == a).map(Germ::RayEnd).ok_or_else(unknown),
            Some((a, v)) => {
                let edge = self.edges.iter().position(|e| e.id == a).ok_or_else(unknown)?;
                let e = &self.edges[edge];
                if e.from == v {
                    Ok(Germ::EdgeEnd { edge, at_to: false })
                } else if e.to == v {
                    Ok(Germ::EdgeEnd { edge, at_to: true })
                } else {
                    Err(unknown())
                }
            }
        }
    }

    /// Whether a germ lies on `Γ_S`.
    pub fn germ_in_gamma_s(&self, topo: &Topology, g: Germ) -> bool {
        match g {
            Germ::EdgeEnd { edge, .. } => self.edges[edge].in_gamma_s,
            Germ::RayAnchor(r) | Germ::RayEnd(r) => topo.comps[topo.comp_of[topo.ray_anchor[r]]].has_s,
            Germ::Disk(_) => false,
        }
    }

    /// Germs at infinity: ray ends and disk markers.
    pub fn open_boundary(&self) -> Vec<Germ> {
        (0..self.rays.len())
            .map(Germ::RayEnd)
            .chain((0..self.disk_components as usize).map(Germ::Disk))
            .collect()
    }
}

impl Topology {
    fn build(sk: &CurveSkeleton) -> Topology {
        let vindex: HashMap<String, usize> =
            sk.vertices.iter().enumerate().map(|(i, v)| (v.id.clone(), i)).collect();
        let eindex = sk.edges.iter().enumerate().map(|(i, e)| (e.id.clone(), i)).collect();
        let rindex = sk.rays.iter().enumerate().map(|(i, r)| (r.id.clone(), i)).collect();
        let n = sk.vertices.len();
        let edge_ends: Vec<(usize, usize)> =
            sk.edges.iter().map(|e| (vindex[&e.from], vindex[&e.to])).collect();
        let ray_anchor: Vec<usize> = sk.rays.iter().map(|r| vindex[&r.anchor]).collect();
        let mut incident = vec![Vec::new(); n];
        for (i, &(a, b)) in edge_ends.iter().enumerate() {
            incident[a].push(Germ::EdgeEnd { edge: i, at_to: false });
            incident[b].push(Germ::EdgeEnd { edge: i, at_to: true });
        }
        for (i, &a) in ray_anchor.iter().enumerate() {
            incident[a].push(Germ::RayAnchor(i));
        }

        let mut comp_of = vec![usize::MAX; n];
        let mut comps = Vec::new();
        for start in 0..n {
            if comp_of[start] != usize::MAX {
                continue;
            }
            let c = comps.len();
            let mut verts = vec![start];
            comp_of[start] = c;
            let mut k = 0;
            while k < verts.len() {
                let v = verts[k];
                k += 1;
                for g in &incident[v] {
                    if let Germ::EdgeEnd { edge, at_to } = *g {
                        let w = if at_to { edge_ends[edge].0 } else { edge_ends[edge].1 };
                        if comp_of[w] == usize::MAX {
                            comp_of[w] = c;
                            verts.push(w);
                        }
                    }
                }
            }
            verts.sort();
            comps.push(Component { vertices: verts, edges: vec![], rays: vec![], has_s: false });
        }
        for (i, &(a, _)) in edge_ends.iter().enumerate() {
            comps[comp_of[a]].edges.push(i);
        }
        for (i, &a) in ray_anchor.iter().enumerate() {
            comps[comp_of[a]].rays.push(i);
        }
        for c in comps.iter_mut() {
            c.has_s = c.vertices.iter().any(|&v| sk.vertices[v].in_s);
        }

        let mut topo = Topology {
            vindex,
            eindex,
            rindex,
            edge_ends,
            ray_anchor,
            incident,
            comp_of,
            comps,
            parent: vec![None; n],
            computed_dist: vec![None; n],
        };
        topo.compute_parents(sk);
        topo.compute_dist(sk);
        topo
    }

    /// The vertex at the other end of an edge germ.
    pub fn far_end(&self, g: Germ) -> Option<usize> {
        match g {
            Germ::EdgeEnd { edge, at_to } => {
                Some(if at_to { self.edge_ends[edge].0 } else { self.edge_ends[edge].1 })
            }
            _ => None,
        }
    }

    /// The vertex a germ emanates from.
    pub fn base(&self, g: Germ) -> Option<usize> {
        match g {
            Germ::EdgeEnd { edge, at_to } => {
                Some(if at_to { self.edge_ends[edge].1 } else { self.edge_ends[edge].0 })
            }
            Germ::RayAnchor(r) => Some(self.ray_anchor[r]),
            _ => None,
        }
    }

    /// The bounded ray of a component without triangulation points, if any.
    pub fn disk_ray(&self, sk: &CurveSkeleton, comp: usize) -> Option<usize> {
        let c = &self.comps[comp];
        if c.has_s || c.rays.len() != 1 {
            return None;
        }
        let r = c.rays[0];
        sk.rays[r].length.as_ref().map(|_| r)
    }

    fn compute_parents(&mut self, sk: &CurveSkeleton) {
        let mut queue = VecDeque::new();
        let mut seen = vec![false; sk.vertices.len()];
        for (ci, c) in self.comps.iter().enumerate() {
            if c.has_s {
                for &v in &c.vertices {
                    if sk.vertices[v].dist.is_zero() {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            } else if let Some(r) = self.disk_ray(sk, ci) {
                let a = self.ray_anchor[r];
                seen[a] = true;
                self.parent[a] = Some(Germ::RayAnchor(r));
                queue.push_back(a);
            }
        }
        while let Some(v) = queue.pop_front() {
            let in_s_comp = self.comps[self.comp_of[v]].has_s;
            for g in self.incident[v].clone() {
                if let Germ::EdgeEnd { edge, at_to } = g {
                    if in_s_comp && sk.edges[edge].in_gamma_s {
                        continue;
                    }
                    let w = self.far_end(g).unwrap();
                    if !seen[w] {
                        seen[w] = true;
                        self.parent[w] = Some(Germ::EdgeEnd { edge, at_to: !at_to });
                        queue.push_back(w);
                    }
                }
            }
        }
    }

    fn compute_dist(&mut self, sk: &CurveSkeleton) {
        let n = sk.vertices.len();
        let mut dist: Vec<Option<Rational>> = vec![None; n];
        for (ci, c) in self.comps.iter().enumerate() {
            if c.has_s {
                for &v in &c.vertices {
                    if sk.vertices[v].dist.is_zero() {
                        dist[v] = Some(Rational::zero());
                    }
                }
            } else if let Some(r) = self.disk_ray(sk, ci) {
                dist[self.ray_anchor[r]] = sk.rays[r].length.clone();
            }
        }
        let mut done = vec![false; n];
        loop {
            let next = (0..n)
                .filter(|&v| !done[v] && dist[v].is_some())
                .min_by(|&a, &b| dist[a].cmp(&dist[b]));
            let Some(v) = next else { break };
            done[v] = true;
            let dv = dist[v].clone().unwrap();
            for g in &self.incident[v] {
                if let Some(w) = self.far_end(*g) {
                    let Germ::EdgeEnd { edge, .. } = *g else { unreachable!() };
                    let cand = &dv + &sk.edges[edge].length;
                    if dist[w].as_ref().is_none_or(|d| &cand < d) {
                        dist[w] = Some(cand);
                    }
                }
            }
        }
        self.computed_dist = dist;
    }

    /// Germs of `Γ_S` at a vertex.
    pub fn gamma_s_germs(&self, sk: &CurveSkeleton, v: usize) -> Vec<Germ> {
        self.incident[v].iter().copied().filter(|g| sk.germ_in_gamma_s(self, *g)).collect()
    }

    pub fn on_gamma_s(&self, sk: &CurveSkeleton, v: usize) -> bool {
        self.comps[self.comp_of[v]].has_s && sk.vertices[v].dist.is_zero()
    }

    fn violations(&self, sk: &CurveSkeleton) -> Vec<Violation> {
        let mut out = Vec::new();
        for (ci, c) in self.comps.iter().enumerate() {
            if !c.has_s {
                let disk_form = self.disk_ray(sk, ci).is_some() && c.edges.len() + 1 == c.vertices.len();
                if !disk_form {
                    let v = &sk.vertices[c.vertices[0]].id;
                    out.push(violation(
                        v,
                        "component_has_s",
                        "component without S points must be a disk: a tree with one bounded ray",
                    ));
                }
                continue;
            }
            self.check_s_component(sk, c, &mut out);
        }
        for (i, v) in sk.vertices.iter().enumerate() {
            if v.in_s && !v.dist.is_zero() {
                out.push(violation(&v.id, "s_on_skeleton", "S point with positive distance"));
            }
            if v.genus > 0 && !v.dist.is_zero() {
                out.push(violation(&v.id, "genus_on_skeleton", "positive genus off Γ_S"));
            }
            if v.is_boundary && !v.dist.is_zero() {
                out.push(violation(&v.id, "boundary_on_skeleton", "boundary point off Γ_S"));
            }
            let c = &self.comps[self.comp_of[i]];
            if c.has_s || self.disk_ray(sk, self.comp_of[i]).is_some() {
                match &self.computed_dist[i] {
                    Some(d) if d == &v.dist => {}
                    Some(d) => out.push(violation(
                        &v.id,
                        "dist",
                        format!("declared distance {} but graph distance {}", v.dist, d),
                    )),
                    None => out.push(violation(&v.id, "dist", "not connected to Γ_S")),
                }
            }
            for g in &self.incident[i] {
                if !sk.germ_degree(*g).is_multiple_of(v.t) {
                    out.push(violation(
                        &v.id,
                        "degree_divides",
                        format!("t = {} does not divide the degree of {}", v.t, sk.germ_id(*g)),
                    ));
                }
            }
            if let Some(p) = self.parent[i] {
                if sk.germ_degree(p) != v.t {
                    out.push(violation(
                        &v.id,
                        "parent_degree",
                        format!("germ {} toward Γ_S must have degree t = {}", sk.germ_id(p), v.t),
                    ));
                }
            }
        }
        for e in &sk.edges {
            if e.in_gamma_s {
                let bad = [&e.from, &e.to]
                    .into_iter()
                    .any(|id| !sk.vertices[self.vindex[id]].dist.is_zero());
                if bad {
                    out.push(violation(&e.id, "gamma_s_edge", "Γ_S edge with an endpoint off Γ_S"));
                }
            }
        }
        out
    }

    fn check_s_component(&self, sk: &CurveSkeleton, c: &Component, out: &mut Vec<Violation>) {
        for &r in &c.rays {
            let a = &sk.vertices[self.ray_anchor[r]];
            if !a.dist.is_zero() {
                out.push(violation(&sk.rays[r].id, "ray_on_skeleton", "ray anchored off Γ_S"));
            }
        }
        for &v in &c.vertices {
            let x = &sk.vertices[v];
            if !x.dist.is_zero() || x.in_s {
                continue;
            }
            let germs = self.gamma_s_germs(sk, v);
            let ok = x.genus == 0
                && !x.is_boundary
                && germs.len() == 2
                && germs.iter().all(|g| sk.germ_degree(*g) == x.t);
            if !ok {
                out.push(violation(
                    &x.id,
                    "annulus_interior",
                    "a Γ_S point outside S must be a genus-0 interior point with two Γ_S germs of degree t",
                ));
            }
        }
        // off-Γ_S edges: trees hanging at exactly one Γ_S point
        let off: Vec<usize> = c.edges.iter().copied().filter(|&e| !sk.edges[e].in_gamma_s).collect();
        let mut uf: BTreeMap<usize, usize> = BTreeMap::new();
        fn find(uf: &mut BTreeMap<usize, usize>, x: usize) -> usize {
            let p = *uf.entry(x).or_insert(x);
            if p == x {
                x
            } else {
                let r = find(uf, p);
                uf.insert(x, r);
                r
            }
        }
        for &e in &off {
            let (a, b) = self.edge_ends[e];
            let (ra, rb) = (find(&mut uf, a), find(&mut uf, b));
            uf.insert(ra, rb);
        }
        let mut groups: BTreeMap<usize, (BTreeSet<usize>, usize)> = BTreeMap::new();
        for &e in &off {
            let (a, b) = self.edge_ends[e];
            let root = find(&mut uf, a);
            let g = groups.entry(root).or_default();
            g.0.insert(a);
            g.0.insert(b);
            g.1 += 1;
        }
        for (verts, n_edges) in groups.values() {
            let roots = verts.iter().filter(|&&v| sk.vertices[v].dist.is_zero()).count();
            if roots != 1 || *n_edges + 1 != verts.len() {
                let first = &sk.vertices[*verts.iter().next().unwrap()].id;
                out.push(violation(
                    first,
                    "off_skeleton_tree",
                    "edges off Γ_S must form trees attached to Γ_S at exactly one point",
                ));
            }
        }
    }
}

/// `2t − 2g(x) − N`, with `N` the total degree of the selected germs at `x`.
pub fn chi_x(sk: &CurveSkeleton, v: usize, germs: &[Germ]) -> i64 {
    let x = &sk.vertices[v];
    let n: i64 = germs.iter().map(|g| sk.germ_degree(*g) as i64).sum();
    2 * x.t as i64 - 2 * x.genus as i64 - n
}

/// `χ(x, Γ_S)` at a vertex.
pub fn chi_x_s(sk: &CurveSkeleton, topo: &Topology, v: usize) -> i64 {
    chi_x(sk, v, &topo.gamma_s_germs(sk, v))
}

/// `χ(x, Γ)` with all stored germs at `x`.
pub fn chi_x_all(sk: &CurveSkeleton, topo: &Topology, v: usize) -> i64 {
    chi_x(sk, v, &topo.incident[v])
}

/// Compactly supported Euler characteristic of one component.
///
/// Degree-weighted: `2(Σ t − Σ deg e) − 2 Σ g − Σ deg(rays)`, which is
/// `2 − 2g − N` when every degree is 1.
pub fn chi_c_component(sk: &CurveSkeleton, topo: &Topology, comp: usize) -> i64 {
    topo.comps[comp].vertices.iter().map(|&v| chi_x_all(sk, topo, v)).sum()
}

pub fn chi_c(sk: &CurveSkeleton) -> Result<i64, SkeletonError> {
    let topo = sk.validated()?;
    Ok(chi_c_with(sk, &topo))
}

pub fn chi_c_with(sk: &CurveSkeleton, topo: &Topology) -> i64 {
    (0..topo.comps.len()).map(|c| chi_c_component(sk, topo, c)).sum::<i64>() + sk.disk_components as i64
}

/// The minimal triangulation core: positive genus, boundary, and every
/// `Γ_S` point that is not the interior of a pseudo-annulus.
pub fn core_points(sk: &CurveSkeleton, topo: &Topology) -> Vec<usize> {
    (0..sk.vertices.len())
        .filter(|&v| {
            if !topo.on_gamma_s(sk, v) {
                return false;
            }
            let x = &sk.vertices[v];
            let germs = topo.gamma_s_germs(sk, v);
            x.genus > 0
                || x.is_boundary
                || germs.len() != 2
                || germs.iter().any(|g| sk.germ_degree(*g) != x.t)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumChi {
    pub lhs: i64,
    pub rhs: i64,
    pub equal: bool,
}

/// `Σ_{x∈S'} χ(x, Γ_{S'})` against `χ_c`, over the components that carry
/// triangulation points (disk components have empty `S'`).
pub fn sum_chi_check(sk: &CurveSkeleton, s_prime: &[String]) -> Result<SumChi, SkeletonError> {
    let topo = sk.validated()?;
    let mut chosen = BTreeSet::new();
    for id in s_prime {
        let v = *topo.vindex.get(id).ok_or_else(|| SkeletonError::Unknown(id.clone()))?;
        if !topo.on_gamma_s(sk, v) {
            return Err(SkeletonError::Precondition(format!("{id} is not a point of Γ_S")));
        }
        chosen.insert(v);
    }
    for v in core_points(sk, &topo) {
        if !chosen.contains(&v) {
            return Err(SkeletonError::Precondition(format!(
                "S' misses the core point {}",
                sk.vertices[v].id
            )));
        }
    }
    let lhs = chosen.iter().map(|&v| chi_x_s(sk, &topo, v)).sum();
    let rhs = (0..topo.comps.len())
        .filter(|&c| topo.comps[c].has_s)
        .map(|c| chi_c_component(sk, &topo, c))
        .sum();
    Ok(SumChi { lhs, rhs, equal: lhs == rhs })
}

/// An open sub-domain: a set of vertices, open edges, rays and disk markers,
/// containing every stored germ at each of its vertices.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SubDomain {
    #[serde(default)]
    pub vertices: BTreeSet<String>,
    #[serde(default)]
    pub edges: BTreeSet<String>,
    #[serde(default)]
    pub rays: BTreeSet<String>,
    #[serde(default)]
    pub disks: BTreeSet<u32>,
}

impl SubDomain {
    pub fn whole(sk: &CurveSkeleton) -> Self {
        SubDomain {
            vertices: sk.vertices.iter().map(|v| v.id.clone()).collect(),
            edges: sk.edges.iter().map(|e| e.id.clone()).collect(),
            rays: sk.rays.iter().map(|r| r.id.clone()).collect(),
            disks: (0..sk.disk_components).collect(),
        }
    }

    pub fn intersection(&self, o: &SubDomain) -> SubDomain {
        SubDomain {
            vertices: self.vertices.intersection(&o.vertices).cloned().collect(),
            edges: self.edges.intersection(&o.edges).cloned().collect(),
            rays: self.rays.intersection(&o.rays).cloned().collect(),
            disks: self.disks.intersection(&o.disks).cloned().collect(),
        }
    }

    pub fn union(&self, o: &SubDomain) -> SubDomain {
        SubDomain {
            vertices: self.vertices.union(&o.vertices).cloned().collect(),
            edges: self.edges.union(&o.edges).cloned().collect(),
            rays: self.rays.union(&o.rays).cloned().collect(),
            disks: self.disks.union(&o.disks).cloned().collect(),
        }
    }

    /// Checks references and openness.
    pub fn check(&self, sk: &CurveSkeleton, topo: &Topology) -> Result<(), SkeletonError> {
        for id in &self.vertices {
            let v = *topo.vindex.get(id).ok_or_else(|| SkeletonError::Unknown(id.clone()))?;
            for g in &topo.incident[v] {
                let inside = match *g {
                    Germ::EdgeEnd { edge, .. } => self.edges.contains(&sk.edges[edge].id),
                    Germ::RayAnchor(r) => self.rays.contains(&sk.rays[r].id),
                    _ => true,
                };
                if !inside {
                    return Err(SkeletonError::Precondition(format!(
                        "sub-domain is not open at {id}: germ {} missing",
                        sk.germ_id(*g)
                    )));
                }
            }
        }
        for id in &self.edges {
            if !topo.eindex.contains_key(id) {
                return Err(SkeletonError::Unknown(id.clone()));
            }
        }
        for id in &self.rays {
            if !topo.rindex.contains_key(id) {
                return Err(SkeletonError::Unknown(id.clone()));
            }
        }
        if let Some(k) = self.disks.iter().find(|&&k| k >= sk.disk_components) {
            return Err(SkeletonError::Unknown(format!("disk:{k}")));
        }
        Ok(())
    }

    /// Germs at infinity of the sub-domain, oriented inward: ends of edges
    /// whose endpoint is missing, ray ends, and disk markers.
    pub fn open_boundary(&self, sk: &CurveSkeleton, topo: &Topology) -> Vec<Germ> {
        let mut out = Vec::new();
        for id in &self.edges {
            let edge = topo.eindex[id];
            let e = &sk.edges[edge];
            if !self.vertices.contains(&e.from) {
                out.push(Germ::EdgeEnd { edge, at_to: false });
            }
            if !self.vertices.contains(&e.to) {
                out.push(Germ::EdgeEnd { edge, at_to: true });
            }
        }
        for id in &self.rays {
            let r = topo.rindex[id];
            out.push(Germ::RayEnd(r));
            if !self.vertices.contains(&sk.rays[r].anchor) {
                out.push(Germ::RayAnchor(r));
            }
        }
        out.extend(self.disks.iter().map(|&k| Germ::Disk(k as usize)));
        out
    }

    pub fn vertex_indices(&self, topo: &Topology) -> Vec<usize> {
        self.vertices.iter().map(|id| topo.vindex[id]).collect()
    }
}

/// `χ_c` of an open sub-domain: each vertex contributes `χ(x, Γ)` with all
/// its germs, open segments contribute 0, disk markers 1.
pub fn chi_c_sub(sk: &CurveSkeleton, topo: &Topology, u: &SubDomain) -> Result<i64, SkeletonError> {
    u.check(sk, topo)?;
    let v: i64 = u.vertex_indices(topo).into_iter().map(|v| chi_x_all(sk, topo, v)).sum();
    Ok(v + u.disks.len() as i64)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverCheck {
    pub lhs: i64,
    pub rhs: i64,
    pub equal: bool,
}

/// `χ_c(U) + χ_c(V) − χ_c(U∩V)` against `χ_c(X)`.
pub fn chi_c_cover(sk: &CurveSkeleton, u: &SubDomain, v: &SubDomain) -> Result<CoverCheck, SkeletonError> {
    let topo = sk.validated()?;
    if u.union(v) != SubDomain::whole(sk) {
        return Err(SkeletonError::Precondition("U and V do not cover X".into()));
    }
    let w = u.intersection(v);
    let lhs = chi_c_sub(sk, &topo, u)? + chi_c_sub(sk, &topo, v)? - chi_c_sub(sk, &topo, &w)?;
    let rhs = chi_c_with(sk, &topo);
    Ok(CoverCheck { lhs, rhs, equal: lhs == rhs })
}

/// `χ_c(V†) = 2t − 2g(x) − N_V(x)` for an elementary tube whose singular
/// directions have the given degrees.
pub fn tube_chi(genus: u32, t: u32, singular_degrees: &[u32]) -> i64 {
    2 * t as i64 - 2 * genus as i64 - singular_degrees.iter().map(|&d| d as i64).sum::<i64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qi;

    fn one_vertex(rays: usize, genus: u32) -> CurveSkeleton {
        let mut v = Vertex::s_point("x");
        v.genus = genus;
        CurveSkeleton {
            vertices: vec![v],
            rays: (0..rays).map(|k| Ray::new(&format!("r{k}"), "x")).collect(),
            ..Default::default()
        }
    }

    #[test]
    fn validate_examples() {
        assert!(one_vertex(1, 0).validate().is_empty());
        let sk = CurveSkeleton {
            vertices: vec![Vertex::s_point("a"), Vertex::plain("b", qi(1))],
            edges: vec![Edge::new("e", "a", "b", qi(1), true)],
            ..Default::default()
        };
        let v = sk.validate();
        assert_eq!(v.len(), 1, "{v:?}");
        assert_eq!(v[0].rule, "gamma_s_edge");
        let mut ann = one_vertex(2, 0);
        ann.vertices[0].in_s = false;
        let v = ann.validate();
        assert_eq!(v.len(), 1, "{v:?}");
        assert_eq!(v[0].rule, "component_has_s");
    }

    #[test]
    fn chi_c_examples() {
        let disk = CurveSkeleton { disk_components: 1, ..Default::default() };
        assert_eq!(chi_c(&disk).unwrap(), 1);
        assert_eq!(chi_c(&one_vertex(2, 0)).unwrap(), 0);
        assert_eq!(chi_c(&one_vertex(1, 1)).unwrap(), -1);
    }

    #[test]
    fn chi_x_examples() {
        let sk = one_vertex(2, 0);
        let t = sk.topology().unwrap();
        assert_eq!(chi_x_s(&sk, &t, 0), 0);
        let sk = one_vertex(1, 1);
        let t = sk.topology().unwrap();
        assert_eq!(chi_x_s(&sk, &t, 0), -1);
        let mut sk = one_vertex(2, 0);
        sk.vertices[0].t = 2;
        for r in &mut sk.rays {
            r.germ_degree = 2;
        }
        let t = sk.topology().unwrap();
        assert_eq!(chi_x_s(&sk, &t, 0), 0);
    }

    #[test]
    fn sum_chi_examples() {
        let r = sum_chi_check(&one_vertex(1, 0), &["x".into()]).unwrap();
        assert_eq!((r.lhs, r.rhs), (1, 1));
        let path = CurveSkeleton {
            vertices: vec![Vertex::s_point("a"), Vertex::s_point("b"), Vertex::s_point("c")],
            edges: vec![Edge::new("ab", "a", "b", qi(1), true), Edge::new("bc", "b", "c", qi(1), true)],
            rays: vec![Ray::new("ra", "a"), Ray::new("rc", "c")],
            disk_components: 0,
        };
        let ids: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let r = sum_chi_check(&path, &ids).unwrap();
        assert_eq!((r.lhs, r.rhs, r.equal), (0, 0, true));
        // b is not a core point, so it may be dropped
        let r = sum_chi_check(&path, &["a".into(), "c".into()]).unwrap();
        assert!(r.equal);
        let mut bumpy = path.clone();
        bumpy.vertices[1].genus = 1;
        assert!(matches!(sum_chi_check(&bumpy, &["a".into()]), Err(SkeletonError::Precondition(_))));
        let r = sum_chi_check(&one_vertex(0, 2), &["x".into()]).unwrap();
        assert_eq!((r.lhs, r.rhs), (-2, -2));
    }

    #[test]
    fn cover_examples() {
        // genus-1 cycle on two vertices with one ray at each
        let sk = CurveSkeleton {
            vertices: vec![Vertex::s_point("a"), Vertex::s_point("b")],
            edges: vec![Edge::new("e1", "a", "b", qi(1), true), Edge::new("e2", "b", "a", qi(2), true)],
            rays: vec![Ray::new("ra", "a"), Ray::new("rb", "b")],
            disk_components: 0,
        };
        let set = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
        let u = SubDomain { vertices: set(&["a"]), edges: set(&["e1", "e2"]), rays: set(&["ra"]), disks: BTreeSet::new() };
        let v = SubDomain { vertices: set(&["b"]), edges: set(&["e1", "e2"]), rays: set(&["rb"]), disks: BTreeSet::new() };
        let c = chi_c_cover(&sk, &u, &v).unwrap();
        assert_eq!((c.lhs, c.rhs), (-2, -2));
        let bad = SubDomain { vertices: set(&["a"]), ..Default::default() };
        assert!(chi_c_cover(&sk, &bad, &v).is_err());
    }

    #[test]
    fn tube_examples() {
        assert_eq!(tube_chi(0, 1, &[1]), 1);
        assert_eq!(tube_chi(0, 1, &[1, 1, 1]), -1);
        assert_eq!(tube_chi(1, 1, &[1, 1]), -2);
    }

    #[test]
    fn germ_ids_round_trip() {
        let sk = CurveSkeleton {
            vertices: vec![Vertex::s_point("a"), Vertex::plain("b", qi(1))],
            edges: vec![Edge::new("e", "a", "b", qi(1), false)],
            rays: vec![Ray::new("r", "a")],
            disk_components: 1,
        };
        assert!(sk.validate().is_empty(), "{:?}", sk.validate());
        for g in [
            Germ::EdgeEnd { edge: 0, at_to: false },
            Germ::EdgeEnd { edge: 0, at_to: true },
            Germ::RayAnchor(0),
            Germ::RayEnd(0),
            Germ::Disk(0),
        ] {
            assert_eq!(sk.parse_germ(&sk.germ_id(g)).unwrap(), g);
        }
    }
}
