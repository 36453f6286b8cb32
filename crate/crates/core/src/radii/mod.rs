//! Multiradius profiles on a skeleton.
//!
//! A profile stores, for every edge and ray, one [`PLFunction`] per index
//! giving `log R_i` along the carrier (edges run `from → to`, rays run away
//! from their anchor). [`Equation`] pairs a validated profile with its
//! skeleton and answers every local question: values, one-sided slopes,
//! Laplacians, classification against the solvability threshold
//! `σ(x) = −dist(x, Γ_S)`, controlling graphs and localized slopes.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::plf::{combine, sum_on, CombineOp, Direction, Domain, PLFunction};
use crate::rational::Rational;
use crate::skeleton::{chi_x_s, tube_chi, CurveSkeleton, Germ, SkeletonError, Topology};

pub mod checks;
pub mod transform;

/// Residue characteristic and the matching `log ω`, in units with `log|p| = −1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FieldRepr", into = "FieldRepr")]
pub struct FieldConfig {
    p: u64,
}

#[derive(Serialize, Deserialize)]
struct FieldRepr {
    residue_char: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    log_omega: Option<Rational>,
}

impl TryFrom<FieldRepr> for FieldConfig {
    type Error = String;
    fn try_from(r: FieldRepr) -> Result<Self, String> {
        let fc = FieldConfig::new(r.residue_char)?;
        match r.log_omega {
            Some(w) if w != fc.log_omega() => Err(format!("log_omega {w} does not match p = {}", fc.p)),
            _ => Ok(fc),
        }
    }
}

impl From<FieldConfig> for FieldRepr {
    fn from(f: FieldConfig) -> Self {
        FieldRepr { residue_char: f.p, log_omega: Some(f.log_omega()) }
    }
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

impl FieldConfig {
    /// `p = 0` (or 1) means residue characteristic zero.
    pub fn new(p: u64) -> Result<Self, String> {
        if p > 1 && !is_prime(p) {
            return Err(format!("residue characteristic {p} is not prime"));
        }
        Ok(FieldConfig { p: if p == 1 { 0 } else { p } })
    }

    pub fn zero() -> Self {
        FieldConfig { p: 0 }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn log_omega(&self) -> Rational {
        if self.p == 0 {
            Rational::zero()
        } else {
            Rational::new(-1, self.p as i64 - 1)
        }
    }
}

impl Default for FieldConfig {
    fn default() -> Self {
        FieldConfig::zero()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MultiRadiusProfile {
    pub rank: usize,
    #[serde(default)]
    pub edges: BTreeMap<String, Vec<PLFunction>>,
    #[serde(default)]
    pub rays: BTreeMap<String, Vec<PLFunction>>,
    /// Constant `log R_i` on each disk marker.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub disks: Vec<Vec<Rational>>,
    /// Values at vertices without incident edges or rays.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub vertex_values: BTreeMap<String, Vec<Rational>>,
}

impl MultiRadiusProfile {
    /// Every radius identically 0, the profile of the trivial equation.
    pub fn trivial(sk: &CurveSkeleton, rank: usize) -> Self {
        let zero = |d: &Domain| vec![PLFunction::constant(d, Rational::zero()); rank];
        MultiRadiusProfile {
            rank,
            edges: sk
                .edges
                .iter()
                .map(|e| (e.id.clone(), zero(&Domain::Segment { length: e.length.clone() })))
                .collect(),
            rays: sk.rays.iter().map(|r| (r.id.clone(), zero(&ray_domain(r.length.as_ref())))).collect(),
            disks: vec![vec![Rational::zero(); rank]; sk.disk_components as usize],
            vertex_values: BTreeMap::new(),
        }
    }
}

pub fn ray_domain(length: Option<&Rational>) -> Domain {
    match length {
        Some(l) => Domain::Segment { length: l.clone() },
        None => Domain::Ray,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProfileError {
    #[error(transparent)]
    Skeleton(#[from] SkeletonError),
    #[error("profile does not fit the skeleton: {0}")]
    Shape(String),
    #[error("profile invariants violated: {}", .0.join("; "))]
    Invariant(Vec<String>),
    #[error("argument error: {0}")]
    Argument(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("refused: {0}")]
    Refusal(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Carrier {
    Edge(usize),
    Ray(usize),
}

/// A point of the stored graph: a vertex or an interior point of a carrier.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point {
    Vertex(usize),
    Inner { carrier: Carrier, t: Rational },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GermKind {
    /// Lies on `Γ_S`.
    Skeleton,
    /// Points toward `Γ_S` (the germ `b_∞` of the disk around the point).
    Toward,
    /// Points into a disk away from `Γ_S`.
    IntoDisk,
}

/// A germ out of a point, located on a carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalGerm {
    pub carrier: Carrier,
    pub t: Rational,
    pub dir: Direction,
    pub degree: u32,
    pub kind: GermKind,
    /// The stored germ when the point is a vertex.
    pub germ: Option<Germ>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusClass {
    SpectralNonsolvable,
    Solvable,
    Oversolvable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexClassification {
    pub classes: Vec<RadiusClass>,
    pub i_sp: usize,
    pub i_sol: usize,
}

/// Threshold classification of `log R_1..log R_r` against `σ`.
pub fn classify_values(values: &[Rational], sigma: &Rational) -> VertexClassification {
    let classes: Vec<RadiusClass> = values
        .iter()
        .map(|v| match v.cmp(sigma) {
            std::cmp::Ordering::Less => RadiusClass::SpectralNonsolvable,
            std::cmp::Ordering::Equal => RadiusClass::Solvable,
            std::cmp::Ordering::Greater => RadiusClass::Oversolvable,
        })
        .collect();
    let i_sp = classes.iter().take_while(|c| **c == RadiusClass::SpectralNonsolvable).count();
    let i_sol = classes.iter().rposition(|c| *c != RadiusClass::Oversolvable).map_or(0, |k| k + 1);
    VertexClassification { classes, i_sp, i_sol }
}

/// A function on the graph whose controlling graph or Laplacian is wanted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    /// `log R_i`, 1-based.
    R(usize),
    /// `log H_i`, 1-based.
    H(usize),
}

/// A validated skeleton and profile.
#[derive(Debug, Clone)]
pub struct Equation<'a> {
    pub sk: &'a CurveSkeleton,
    pub topo: Topology,
    pub profile: &'a MultiRadiusProfile,
    pub rank: usize,
    radii: Vec<Vec<PLFunction>>,
    heights: Vec<Vec<PLFunction>>,
    sigma: Vec<PLFunction>,
    vvalues: Vec<Vec<Rational>>,
}

impl<'a> Equation<'a> {
    pub fn new(sk: &'a CurveSkeleton, profile: &'a MultiRadiusProfile) -> Result<Self, ProfileError> {
        let topo = sk.validated()?;
        let r = profile.rank;
        if r == 0 {
            return Err(ProfileError::Shape("rank must be at least 1".into()));
        }
        for k in profile.edges.keys() {
            if !topo.eindex.contains_key(k) {
                return Err(ProfileError::Shape(format!("unknown edge {k}")));
            }
        }
        for k in profile.rays.keys() {
            if !topo.rindex.contains_key(k) {
                return Err(ProfileError::Shape(format!("unknown ray {k}")));
            }
        }
        let mut radii = Vec::new();
        for e in &sk.edges {
            let fs = profile.edges.get(&e.id).ok_or_else(|| ProfileError::Shape(format!("edge {} has no radii", e.id)))?;
            let dom = Domain::Segment { length: e.length.clone() };
            check_carrier(&e.id, fs, r, &dom)?;
            radii.push(fs.clone());
        }
        for ray in &sk.rays {
            let fs = profile.rays.get(&ray.id).ok_or_else(|| ProfileError::Shape(format!("ray {} has no radii", ray.id)))?;
            let dom = ray_domain(ray.length.as_ref());
            check_carrier(&ray.id, fs, r, &dom)?;
            radii.push(fs.clone());
        }
        let sigma = sigma_plfs(sk, &topo);
        if profile.disks.len() != sk.disk_components as usize || profile.disks.iter().any(|d| d.len() != r) {
            return Err(ProfileError::Shape("one constant per index is needed on each disk marker".into()));
        }
        let heights = radii
            .iter()
            .map(|fs| (1..=r).map(|i| sum_on(fs[0].domain(), &fs[..i])).collect())
            .collect();
        let mut eq = Equation { sk, topo, profile, rank: r, radii, heights, sigma, vvalues: vec![] };
        eq.vvalues = eq.collect_vertex_values()?;
        let bad = eq.invariant_violations();
        if !bad.is_empty() {
            return Err(ProfileError::Invariant(bad));
        }
        Ok(eq)
    }

    fn collect_vertex_values(&self) -> Result<Vec<Vec<Rational>>, ProfileError> {
        let mut out = Vec::new();
        let mut bad = Vec::new();
        for (v, x) in self.sk.vertices.iter().enumerate() {
            let mut vals: Option<Vec<Rational>> = self.profile.vertex_values.get(&x.id).cloned();
            if let Some(vs) = &vals {
                if vs.len() != self.rank {
                    return Err(ProfileError::Shape(format!("vertex {} needs {} values", x.id, self.rank)));
                }
            }
            for g in self.germs_at(&Point::Vertex(v)) {
                let here: Vec<Rational> =
                    (1..=self.rank).map(|i| self.plf(g.carrier, Func::R(i)).eval(&g.t).unwrap()).collect();
                match &vals {
                    None => vals = Some(here),
                    Some(vs) if vs != &here => {
                        bad.push(format!("radii are discontinuous at {}", x.id));
                        break;
                    }
                    _ => {}
                }
            }
            match vals {
                Some(vs) => out.push(vs),
                None => return Err(ProfileError::Shape(format!("isolated vertex {} needs vertex_values", x.id))),
            }
        }
        if bad.is_empty() {
            Ok(out)
        } else {
            Err(ProfileError::Invariant(bad))
        }
    }

    /// Ordering, non-positivity and constancy of oversolvable radii.
    fn invariant_violations(&self) -> Vec<String> {
        let mut bad = Vec::new();
        for (ci, fs) in self.radii.iter().enumerate() {
            let c = self.carrier_at(ci);
            let name = self.carrier_id(c);
            let mut ts: BTreeSet<Rational> = BTreeSet::new();
            for f in fs {
                ts.extend(f.breakpoints());
            }
            ts.extend(self.sigma[ci].breakpoints());
            let ts: Vec<Rational> = ts.into_iter().collect();
            for t in &ts {
                let vals: Vec<Rational> = fs.iter().map(|f| f.eval(t).unwrap()).collect();
                if vals.last().unwrap().is_positive() {
                    bad.push(format!("log R_r > 0 on {name} at {t}"));
                }
                if vals.windows(2).any(|w| w[0] > w[1]) {
                    bad.push(format!("radii out of order on {name} at {t}"));
                }
            }
            if fs[0].is_ray() {
                let tails: Vec<&Rational> = fs.iter().map(|f| f.tail_slope()).collect();
                if tails.last().unwrap().is_positive() || tails.windows(2).any(|w| w[0] > w[1]) {
                    bad.push(format!("tail slopes on {name} break ordering or sign"));
                }
            }
            // pieces where a radius exceeds σ must be flat
            let sg = &self.sigma[ci];
            let mut bounds = ts.clone();
            if fs[0].is_ray() {
                let last = bounds.last().unwrap().clone();
                bounds.push(last + Rational::one());
            }
            for (i, f) in fs.iter().enumerate() {
                for w in bounds.windows(2) {
                    let over = |t: &Rational| f.eval(t).unwrap() > sg.eval(t).unwrap();
                    let s = f.slope(&w[0], Direction::Forward).unwrap();
                    if (over(&w[0]) || over(&w[1])) && !s.is_zero() {
                        bad.push(format!("oversolvable R_{} not constant on {name} near {}", i + 1, w[0]));
                        break;
                    }
                }
            }
        }
        for (k, d) in self.profile.disks.iter().enumerate() {
            if d.last().is_some_and(|x| x.is_positive()) || d.windows(2).any(|w| w[0] > w[1]) {
                bad.push(format!("disk:{k} radii out of order or positive"));
            }
        }
        for (v, vals) in self.vvalues.iter().enumerate() {
            if vals.last().is_some_and(|x| x.is_positive()) || vals.windows(2).any(|w| w[0] > w[1]) {
                bad.push(format!("radii out of order at {}", self.sk.vertices[v].id));
            }
        }
        bad
    }

    pub fn carrier_index(&self, c: Carrier) -> usize {
        match c {
            Carrier::Edge(e) => e,
            Carrier::Ray(r) => self.sk.edges.len() + r,
        }
    }

    fn carrier_at(&self, ci: usize) -> Carrier {
        let ne = self.sk.edges.len();
        if ci < ne {
            Carrier::Edge(ci)
        } else {
            Carrier::Ray(ci - ne)
        }
    }

    pub fn carriers(&self) -> Vec<Carrier> {
        (0..self.radii.len()).map(|ci| self.carrier_at(ci)).collect()
    }

    pub fn carrier_id(&self, c: Carrier) -> &str {
        match c {
            Carrier::Edge(e) => &self.sk.edges[e].id,
            Carrier::Ray(r) => &self.sk.rays[r].id,
        }
    }

    pub fn carrier_degree(&self, c: Carrier) -> u32 {
        match c {
            Carrier::Edge(e) => self.sk.edges[e].germ_degree,
            Carrier::Ray(r) => self.sk.rays[r].germ_degree,
        }
    }

    pub fn carrier_in_gamma_s(&self, c: Carrier) -> bool {
        match c {
            Carrier::Edge(e) => self.sk.edges[e].in_gamma_s,
            Carrier::Ray(r) => self.sk.germ_in_gamma_s(&self.topo, Germ::RayAnchor(r)),
        }
    }

    pub fn plf(&self, c: Carrier, f: Func) -> &PLFunction {
        let ci = self.carrier_index(c);
        match f {
            Func::R(i) => &self.radii[ci][i - 1],
            Func::H(i) => &self.heights[ci][i - 1],
        }
    }

    pub fn radii_on(&self, c: Carrier) -> &[PLFunction] {
        &self.radii[self.carrier_index(c)]
    }

    pub fn height_plf(&self, c: Carrier, i: usize) -> &PLFunction {
        self.plf(c, Func::H(i))
    }

    pub fn sigma_on(&self, c: Carrier) -> &PLFunction {
        &self.sigma[self.carrier_index(c)]
    }

    pub fn point_id(&self, x: &Point) -> String {
        match x {
            Point::Vertex(v) => self.sk.vertices[*v].id.clone(),
            Point::Inner { carrier, t } => format!("{}:{}", self.carrier_id(*carrier), t),
        }
    }

    pub fn vertex(&self, id: &str) -> Result<Point, ProfileError> {
        self.topo
            .vindex
            .get(id)
            .map(|&v| Point::Vertex(v))
            .ok_or_else(|| ProfileError::Argument(format!("unknown vertex {id}")))
    }

    pub fn on_gamma_s(&self, x: &Point) -> bool {
        match x {
            Point::Vertex(v) => self.topo.on_gamma_s(self.sk, *v),
            Point::Inner { carrier, .. } => self.carrier_in_gamma_s(*carrier),
        }
    }

    pub fn in_s(&self, x: &Point) -> bool {
        matches!(x, Point::Vertex(v) if self.sk.vertices[*v].in_s)
    }

    /// `t_x`: degree of the point.
    pub fn point_degree(&self, x: &Point) -> u32 {
        match x {
            Point::Vertex(v) => self.sk.vertices[*v].t,
            Point::Inner { carrier, .. } => self.carrier_degree(*carrier),
        }
    }

    /// `χ(x, S)`; interior points of carriers have two germs of degree `t`.
    pub fn chi_s(&self, x: &Point) -> i64 {
        match x {
            Point::Vertex(v) => chi_x_s(self.sk, &self.topo, *v),
            Point::Inner { carrier, .. } => {
                if self.carrier_in_gamma_s(*carrier) {
                    0
                } else {
                    2 * self.carrier_degree(*carrier) as i64
                }
            }
        }
    }

    /// Vertices plus interior break points of any radius.
    pub fn points(&self) -> Vec<Point> {
        let mut out: Vec<Point> = (0..self.sk.vertices.len()).map(Point::Vertex).collect();
        for c in self.carriers() {
            let mut ts = BTreeSet::new();
            for f in self.radii_on(c) {
                ts.extend(f.breaks());
            }
            let end = self.radii_on(c)[0].length().cloned();
            for t in ts {
                if Some(&t) != end.as_ref() {
                    out.push(Point::Inner { carrier: c, t });
                }
            }
        }
        out
    }

    pub fn values(&self, x: &Point) -> Vec<Rational> {
        match x {
            Point::Vertex(v) => self.vvalues[*v].clone(),
            Point::Inner { carrier, t } => self.radii_on(*carrier).iter().map(|f| f.eval(t).unwrap()).collect(),
        }
    }

    pub fn value(&self, x: &Point, f: Func) -> Rational {
        let vals = self.values(x);
        match f {
            Func::R(i) => vals[i - 1].clone(),
            Func::H(i) => vals[..i].iter().sum(),
        }
    }

    /// `σ(x) = −dist(x, Γ_S)`.
    pub fn sigma(&self, x: &Point) -> Rational {
        match x {
            Point::Vertex(v) => -&self.sk.vertices[*v].dist,
            Point::Inner { carrier, t } => self.sigma_on(*carrier).eval(t).unwrap(),
        }
    }

    pub fn classify(&self, x: &Point) -> VertexClassification {
        classify_values(&self.values(x), &self.sigma(x))
    }

    fn vertex_germ(&self, v: usize, g: Germ) -> LocalGerm {
        let (carrier, t, dir) = match g {
            Germ::EdgeEnd { edge, at_to } => {
                if at_to {
                    (Carrier::Edge(edge), self.sk.edges[edge].length.clone(), Direction::Backward)
                } else {
                    (Carrier::Edge(edge), Rational::zero(), Direction::Forward)
                }
            }
            Germ::RayAnchor(r) => (Carrier::Ray(r), Rational::zero(), Direction::Forward),
            _ => unreachable!("germs at infinity have no base vertex"),
        };
        let kind = if self.sk.germ_in_gamma_s(&self.topo, g) {
            GermKind::Skeleton
        } else if self.topo.parent[v] == Some(g) {
            GermKind::Toward
        } else {
            GermKind::IntoDisk
        };
        LocalGerm { carrier, t, dir, degree: self.sk.germ_degree(g), kind, germ: Some(g) }
    }

    /// Stored germs out of a point, oriented away from it.
    pub fn germs_at(&self, x: &Point) -> Vec<LocalGerm> {
        match x {
            Point::Vertex(v) => self.topo.incident[*v].iter().map(|g| self.vertex_germ(*v, *g)).collect(),
            Point::Inner { carrier, t } => {
                let degree = self.carrier_degree(*carrier);
                let toward_forward = match carrier {
                    Carrier::Edge(e) => {
                        let (a, b) = self.topo.edge_ends[*e];
                        self.sk.vertices[b].dist < self.sk.vertices[a].dist
                    }
                    Carrier::Ray(_) => true,
                };
                let on_s = self.carrier_in_gamma_s(*carrier);
                [Direction::Forward, Direction::Backward]
                    .into_iter()
                    .map(|dir| {
                        let kind = if on_s {
                            GermKind::Skeleton
                        } else if (dir == Direction::Forward) == toward_forward {
                            GermKind::Toward
                        } else {
                            GermKind::IntoDisk
                        };
                        LocalGerm { carrier: *carrier, t: t.clone(), dir, degree, kind, germ: None }
                    })
                    .collect()
            }
        }
    }

    /// Outward slope of `f` along a germ.
    pub fn slope(&self, g: &LocalGerm, f: Func) -> Rational {
        self.plf(g.carrier, f).slope(&g.t, g.dir).unwrap()
    }

    /// `dd^c F(x) = Σ deg(b) ∂_b F` over stored germs.
    pub fn laplacian(&self, x: &Point, f: Func) -> Rational {
        self.germs_at(x).iter().map(|g| self.slope(g, f) * g.degree as i64).sum()
    }

    /// Laplacian of an arbitrary family of functions on the carriers.
    pub fn laplacian_of(&self, x: &Point, f: &dyn Fn(Carrier) -> PLFunction) -> Rational {
        self.germs_at(x)
            .iter()
            .map(|g| f(g.carrier).slope(&g.t, g.dir).unwrap() * g.degree as i64)
            .sum()
    }

    /// Intrinsic Laplacian `Δ_i = dd^c H_i + [x∈S]·i·χ(x,S)`.
    pub fn intrinsic_laplacian(&self, x: &Point, i: usize) -> Rational {
        let mut d = self.laplacian(x, Func::H(i));
        if self.in_s(x) {
            d += Rational::int(i as i64 * self.chi_s(x));
        }
        d
    }

    /// Whether `f` varies anywhere in the direction of a germ, the germ
    /// itself included.
    pub fn direction_active(&self, g: &LocalGerm, f: Func) -> bool {
        let plf = self.plf(g.carrier, f);
        let fwd = g.dir == Direction::Forward;
        let beyond_break = plf
            .slopes()
            .iter()
            .zip(piece_starts(plf))
            .any(|(s, (a, b))| {
                let inside = if fwd { b.as_ref().is_none_or(|b| b > &g.t) } else { a < g.t };
                inside && !s.is_zero()
            });
        if beyond_break {
            return true;
        }
        let far = match (g.carrier, fwd) {
            (Carrier::Edge(e), true) => Some(self.topo.edge_ends[e].1),
            (Carrier::Edge(e), false) => Some(self.topo.edge_ends[e].0),
            (Carrier::Ray(r), false) => Some(self.topo.ray_anchor[r]),
            (Carrier::Ray(_), true) => None,
        };
        let Some(w) = far else { return false };
        if self.topo.on_gamma_s(self.sk, w) {
            return false;
        }
        self.germs_at(&Point::Vertex(w))
            .iter()
            .filter(|h| h.kind == GermKind::IntoDisk && !(h.carrier == g.carrier))
            .any(|h| self.direction_active(h, f))
    }

    /// Membership of an off-skeleton point in the controlling graph of `f`.
    pub fn in_controlling(&self, x: &Point, f: Func) -> bool {
        if self.on_gamma_s(x) {
            return true;
        }
        self.germs_at(x).iter().any(|g| match g.kind {
            GermKind::IntoDisk => self.direction_active(g, f),
            _ => !self.slope(g, f).is_zero(),
        })
    }

    /// End point of the controlling graph of `f`: inside it, with no
    /// active direction pointing away from `Γ_S`.
    pub fn is_endpoint(&self, x: &Point, f: Func) -> bool {
        !self.on_gamma_s(x)
            && self.in_controlling(x, f)
            && !self.germs_at(x).iter().any(|g| g.kind == GermKind::IntoDisk && self.direction_active(g, f))
    }

    /// Carriers meeting the controlling graph `Γ_{S}(f)`.
    pub fn controlling_graph(&self, f: Func) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for c in self.carriers() {
            let plf = self.plf(c, f);
            let member = self.carrier_in_gamma_s(c)
                || !plf.is_constant()
                || self.germs_at(&self.carrier_start(c)).iter().any(|g| {
                    g.carrier == c && g.kind == GermKind::IntoDisk && self.direction_active(g, f)
                })
                || self.carrier_end(c).is_some_and(|end| {
                    self.germs_at(&end)
                        .iter()
                        .any(|g| g.carrier == c && g.kind == GermKind::IntoDisk && self.direction_active(g, f))
                });
            if member {
                out.insert(self.carrier_id(c).to_string());
            }
        }
        out
    }

    fn carrier_start(&self, c: Carrier) -> Point {
        match c {
            Carrier::Edge(e) => Point::Vertex(self.topo.edge_ends[e].0),
            Carrier::Ray(r) => Point::Vertex(self.topo.ray_anchor[r]),
        }
    }

    fn carrier_end(&self, c: Carrier) -> Option<Point> {
        match c {
            Carrier::Edge(e) => Some(Point::Vertex(self.topo.edge_ends[e].1)),
            Carrier::Ray(_) => None,
        }
    }

    /// `h⁰(D_b)`: indices flat along `b` and not spectral at the base.
    pub fn h0_disk(&self, x: &Point, g: &LocalGerm) -> usize {
        let vals = self.values(x);
        let s = self.sigma(x);
        (1..=self.rank).filter(|&i| self.slope(g, Func::R(i)).is_zero() && vals[i - 1] >= s).count()
    }

    /// `h⁰(D_x†)`: oversolvable indices at `x`.
    pub fn h0_dagger(&self, x: &Point) -> usize {
        let s = self.sigma(x);
        self.values(x).iter().filter(|v| *v > &s).count()
    }

    /// `∂_b H_{∅,r}` after localization to an annulus representing `b`.
    pub fn localized_boundary_slope(&self, x: &Point, g: &LocalGerm) -> Rational {
        let r = self.rank as i64;
        let d = self.slope(g, Func::H(self.rank));
        match g.kind {
            GermKind::Skeleton => d,
            GermKind::IntoDisk => d - Rational::int(self.h0_disk(x, g) as i64) + Rational::int(r),
            GermKind::Toward => d + Rational::int(self.h0_dagger(x) as i64) - Rational::int(r),
        }
    }

    /// Per-index form of the localization: every spectral slope moves by one.
    pub fn localized_slopes_per_index(&self, x: &Point, g: &LocalGerm) -> Vec<Rational> {
        let vals = self.values(x);
        let s = self.sigma(x);
        (1..=self.rank)
            .map(|i| {
                let d = self.slope(g, Func::R(i));
                match g.kind {
                    GermKind::Skeleton => d,
                    GermKind::IntoDisk => {
                        let flat_solvable = d.is_zero() && vals[i - 1] >= s;
                        if flat_solvable { d } else { d + Rational::one() }
                    }
                    GermKind::Toward => {
                        if vals[i - 1] > s { d } else { d - Rational::one() }
                    }
                }
            })
            .collect()
    }

    /// Inward slope of `H_r` at a germ at infinity, before localization.
    pub fn inward_height_slope(&self, g: Germ) -> Rational {
        match g {
            Germ::RayEnd(r) => {
                let h = self.plf(Carrier::Ray(r), Func::H(self.rank));
                match h.length() {
                    Some(l) => h.slope(l, Direction::Backward).unwrap(),
                    None => -h.tail_slope(),
                }
            }
            Germ::Disk(_) => Rational::zero(),
            _ => panic!("not a germ at infinity"),
        }
    }

    /// Whether a germ at infinity closes a disk without triangulation points.
    pub fn is_disk_end(&self, g: Germ) -> bool {
        match g {
            Germ::Disk(_) => true,
            Germ::RayEnd(r) => !self.topo.comps[self.topo.comp_of[self.topo.ray_anchor[r]]].has_s,
            _ => false,
        }
    }

    /// Radii values approaching a germ at infinity.
    pub fn values_at_infinity(&self, g: Germ) -> Option<Vec<Rational>> {
        match g {
            Germ::Disk(k) => Some(self.profile.disks[k].clone()),
            Germ::RayEnd(r) => {
                let fs = self.radii_on(Carrier::Ray(r));
                let l = fs[0].length()?;
                Some(fs.iter().map(|f| f.eval(l).unwrap()).collect())
            }
            _ => None,
        }
    }

    /// `h⁰` of the disk closed by a germ at infinity: radii reaching 0.
    pub fn h0_at_infinity(&self, g: Germ) -> usize {
        self.values_at_infinity(g).map_or(0, |vs| vs.iter().filter(|v| v.is_zero()).count())
    }

    /// Localized inward slope at a germ at infinity.
    pub fn localized_infinity_slope(&self, g: Germ) -> Rational {
        let d = self.inward_height_slope(g);
        if self.is_disk_end(g) {
            d - Rational::int(self.h0_at_infinity(g) as i64) + Rational::int(self.rank as i64)
        } else {
            d
        }
    }

    /// Whether every radius is spectral non-solvable along the germ.
    pub fn spectral_at_infinity(&self, g: Germ) -> bool {
        match g {
            Germ::Disk(k) => self.profile.disks[k].iter().all(|c| c.is_negative()),
            Germ::RayEnd(r) => {
                let c = Carrier::Ray(r);
                let fs = self.radii_on(c);
                match fs[0].length() {
                    Some(l) => {
                        let s = self.sigma_on(c).eval(l).unwrap();
                        fs.iter().all(|f| f.eval(l).unwrap() < s)
                    }
                    None => fs.iter().all(|f| {
                        let last = f.points().last().unwrap();
                        last.1.is_negative() && !f.tail_slope().is_positive()
                    }),
                }
            }
            _ => false,
        }
    }

    /// Localization of `dd^c H_r` to an elementary tube centred at a vertex.
    pub fn localize_tube_laplacian(&self, x: &Point, tube: &TubeSpec) -> Result<Rational, ProfileError> {
        let Point::Vertex(v) = x else {
            return Err(ProfileError::Argument("tubes are centred at vertices".into()));
        };
        let germs = self.germs_at(x);
        let singular: BTreeSet<Germ> = tube
            .singular
            .iter()
            .map(|s| self.sk.parse_germ(s))
            .collect::<Result<_, _>>()?;
        for g in &singular {
            if !germs.iter().any(|h| h.germ == Some(*g)) {
                return Err(ProfileError::Argument(format!("{} is not a germ at the centre", self.sk.germ_id(*g))));
            }
        }
        for g in &germs {
            let cut = singular.contains(&g.germ.unwrap());
            let must = g.kind != GermKind::IntoDisk || (1..=self.rank).any(|i| self.direction_active(g, Func::R(i)));
            if must && !cut {
                return Err(ProfileError::Precondition(format!(
                    "tube is not adapted: {} must be a singular direction",
                    self.sk.germ_id(g.germ.unwrap())
                )));
            }
        }
        let r = self.rank as i64;
        let dd = self.laplacian(x, Func::H(self.rank));
        let vals = self.values(x);
        let s = self.sigma(x);
        let h0_extra = vals.iter().filter(|c| *c >= &s).count() as i64;
        let sing_disks: i64 = germs
            .iter()
            .filter(|g| g.kind == GermKind::IntoDisk && singular.contains(&g.germ.unwrap()))
            .map(|g| self.h0_disk(x, g) as i64)
            .sum::<i64>()
            + h0_extra * tube.extra_degrees.len() as i64;
        let n_v: Vec<u32> = germs
            .iter()
            .filter(|g| singular.contains(&g.germ.unwrap()))
            .map(|g| g.degree)
            .chain(tube.extra_degrees.iter().copied())
            .collect();
        let xv = &self.sk.vertices[*v];
        if self.on_gamma_s(x) {
            let n_s: u32 = self.topo.gamma_s_germs(self.sk, *v).iter().map(|g| self.sk.germ_degree(*g)).sum();
            Ok(tube_formula_on_skeleton(&dd, r, n_v.iter().sum::<u32>() as i64, n_s as i64, sing_disks))
        } else {
            let chi_v = tube_chi(xv.genus, xv.t, &n_v);
            Ok(tube_formula_off_skeleton(&dd, r, chi_v, self.h0_dagger(x) as i64, sing_disks))
        }
    }

    /// The canonical tube: every stored germ at the vertex is singular.
    pub fn canonical_tube(&self, x: &Point) -> TubeSpec {
        TubeSpec {
            singular: self.germs_at(x).iter().map(|g| self.sk.germ_id(g.germ.unwrap())).collect(),
            extra_degrees: vec![],
        }
    }
}

/// `σ = −dist(−, Γ_S)` on every carrier, edges first.
pub fn sigma_plfs(sk: &CurveSkeleton, topo: &Topology) -> Vec<PLFunction> {
    let mut out = Vec::new();
    for (e, edge) in sk.edges.iter().enumerate() {
        let (a, b) = topo.edge_ends[e];
        let (da, db) = (&sk.vertices[a].dist, &sk.vertices[b].dist);
        out.push(PLFunction::segment(vec![(Rational::zero(), -da), (edge.length.clone(), -db)]).unwrap());
    }
    for (ri, ray) in sk.rays.iter().enumerate() {
        let a = &sk.vertices[topo.ray_anchor[ri]].dist;
        let dom = ray_domain(ray.length.as_ref());
        out.push(PLFunction::affine(&dom, -a, if a.is_zero() { Rational::zero() } else { Rational::one() }));
    }
    out
}

/// Pieces `[a, b]` of a PL function in order (`b = None` for a ray tail).
fn piece_starts(f: &PLFunction) -> Vec<(Rational, Option<Rational>)> {
    let pts = f.points();
    let mut out: Vec<(Rational, Option<Rational>)> =
        pts.windows(2).map(|w| (w[0].0.clone(), Some(w[1].0.clone()))).collect();
    if f.is_ray() {
        out.push((pts.last().unwrap().0.clone(), None));
    }
    out
}

fn check_carrier(id: &str, fs: &[PLFunction], r: usize, dom: &Domain) -> Result<(), ProfileError> {
    if fs.len() != r {
        return Err(ProfileError::Shape(format!("{id} carries {} radii, rank is {r}", fs.len())));
    }
    if fs.iter().any(|f| f.domain() != dom) {
        return Err(ProfileError::Shape(format!("radii on {id} live on the wrong domain")));
    }
    Ok(())
}

/// An elementary tube given by its singular directions at the centre.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TubeSpec {
    /// Stored germ ids cut out of the tube.
    pub singular: Vec<String>,
    /// Degrees of additional singular directions off the stored graph.
    #[serde(default)]
    pub extra_degrees: Vec<u32>,
}

/// Tube localization at `x ∉ Γ_S`: `dd^c H_r − r·χ_c(V†) + h⁰(D_x†) − Σ h⁰(D_b)`.
pub fn tube_formula_off_skeleton(dd: &Rational, r: i64, chi_v: i64, h0_dagger: i64, sing_h0: i64) -> Rational {
    dd + Rational::int(-r * chi_v + h0_dagger - sing_h0)
}

/// Tube localization at `x ∈ Γ_S`: `dd^c H_r + r·(N_V − N_S) − Σ h⁰(D_b)`.
pub fn tube_formula_on_skeleton(dd: &Rational, r: i64, n_v: i64, n_s: i64, sing_h0: i64) -> Rational {
    dd + Rational::int(r * (n_v - n_s) - sing_h0)
}

/// `log H_i = Σ_{j≤i} log R_j` at a point.
pub fn height(eq: &Equation, x: &Point, i: usize) -> Rational {
    eq.value(x, Func::H(i))
}

/// Pointwise minimum of `0` and `f + g`, used by triangulation changes.
pub fn clipped_sum(f: &PLFunction, g: &PLFunction) -> PLFunction {
    let s = combine(&CombineOp::Sum, &[f.clone(), g.clone()]).unwrap();
    let zero = PLFunction::constant(f.domain(), Rational::zero());
    combine(&CombineOp::Min, &[s, zero]).unwrap()
}
