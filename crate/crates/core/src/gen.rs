//! Seeded instance generators.
//!
//! The main family is built from one integer function `f ≤ 0` on `Γ_S`:
//! radii are `log R_i = f − c_i` there, and branches into disks carry `f`
//! upward until each radius meets the solvability line, after which it
//! stays constant. Rays and branch slopes are chosen so that
//! `dd^c f = −χ(x, S)` at interior points of `S`, which makes every
//! super-harmonicity equality tight and keeps the instances inside the
//! hypotheses of the global index formula.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::index::{EquationFlags, GrowthRule, GrowthStep};
use crate::operator::{CyclicOperator, TaylorOperator};
use crate::plf::{Domain, PLFunction};
use crate::radii::transform::{change_triangulation, promote, subdivide};
use crate::radii::{Equation, FieldConfig, MultiRadiusProfile, ProfileError};
use crate::rational::{q, qi, Rational};
use crate::skeleton::{CurveSkeleton, Edge, Ray, SubDomain, Vertex};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowParams {
    pub max_s: usize,
    pub max_rank: usize,
    pub max_vertices: usize,
    pub boundary_prob: f64,
    pub genus_prob: f64,
    pub disk_prob: f64,
}

impl Default for FlowParams {
    fn default() -> Self {
        FlowParams { max_s: 8, max_rank: 4, max_vertices: 50, boundary_prob: 0.15, genus_prob: 0.15, disk_prob: 0.3 }
    }
}

/// A generated instance together with the data it was built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowInstance {
    pub skeleton: CurveSkeleton,
    pub profile: MultiRadiusProfile,
    pub flags: EquationFlags,
    /// `f` at the points of `S`.
    pub f: BTreeMap<String, i64>,
    /// `c_1 > … > c_r`.
    pub offsets: Vec<i64>,
}

struct Builder<'a, R: Rng> {
    rng: &'a mut R,
    sk: CurveSkeleton,
    prof: MultiRadiusProfile,
    c: Vec<i64>,
    budget: usize,
}

fn seg(points: Vec<(Rational, Rational)>) -> PLFunction {
    PLFunction::segment(points).unwrap()
}

impl<R: Rng> Builder<'_, R> {
    fn radii_affine(&self, dom: &Domain, f0: &Rational, slope: &Rational) -> Vec<PLFunction> {
        self.c.iter().map(|c| PLFunction::affine(dom, f0 - qi(*c), slope.clone())).collect()
    }

    /// A branch leaving `from` (at depth `d`, where `f = fv`) with slope `a ≥ 0`.
    fn branch(&mut self, from: &str, d: &Rational, fv: &Rational, a: i64, tag: &str) {
        let id = format!("{from}.{tag}");
        let split = a >= 2 && self.budget >= 3 && self.rng.gen_bool(0.3);
        let gaps: Vec<Rational> = self.c.iter().map(|c| -d - fv + qi(*c)).collect();
        let freeze: Vec<Rational> = gaps.iter().map(|g| g / qi(a + 1)).collect();
        let first = freeze.iter().min().unwrap().clone();
        let len = if split {
            &first / qi(2)
        } else if a == 0 {
            [q(1, 2), qi(1), qi(2)].choose(self.rng).unwrap().clone()
        } else {
            freeze.iter().max().unwrap() + [qi(0), q(1, 2), qi(1)].choose(self.rng).unwrap()
        };
        let mut leaf = Vertex::plain(&id, d + &len);
        leaf.t = 1;
        self.sk.vertices.push(leaf);
        self.budget = self.budget.saturating_sub(1);
        self.sk.edges.push(Edge::new(&format!("{id}.e"), from, &id, len.clone(), false));
        let fs: Vec<PLFunction> = self
            .c
            .iter()
            .zip(&freeze)
            .map(|(c, s)| {
                let r0 = fv - qi(*c);
                if a == 0 || s >= &len {
                    PLFunction::affine(&Domain::Segment { length: len.clone() }, r0, qi(a))
                } else {
                    let top = &r0 + &(s * qi(a));
                    seg(vec![(qi(0), r0), (s.clone(), top.clone()), (len.clone(), top)])
                }
            })
            .collect();
        self.prof.edges.insert(format!("{id}.e"), fs);
        if split {
            let a1 = self.rng.gen_range(1..a);
            let fw = fv + &(&len * qi(a));
            let dw = d + &len;
            self.branch(&id, &dw, &fw, a1, "u");
            self.branch(&id, &dw, &fw, a - a1, "v");
        }
    }

    fn ray(&mut self, at: &str, fv: i64, slope: i64, k: usize) {
        let id = format!("{at}.r{k}");
        self.sk.rays.push(Ray::new(&id, at));
        let fs = self.radii_affine(&Domain::Ray, &qi(fv), &qi(slope));
        self.prof.rays.insert(id, fs);
    }
}

fn offsets<R: Rng>(rng: &mut R, r: usize) -> Vec<i64> {
    let mut c = vec![rng.gen_range(1..=2)];
    for _ in 1..r {
        let last = *c.last().unwrap();
        c.push(last + rng.gen_range(1..=2));
    }
    c.reverse();
    c
}

/// A random valid instance satisfying the hypotheses of the global index formula.
pub fn flow_instance<R: Rng>(rng: &mut R, params: &FlowParams) -> FlowInstance {
    let n = rng.gen_range(1..=params.max_s.max(1));
    let r = rng.gen_range(1..=params.max_rank.max(1));
    let c = offsets(rng, r);
    let mut b = Builder {
        sk: CurveSkeleton::default(),
        prof: MultiRadiusProfile { rank: r, ..Default::default() },
        c,
        budget: params.max_vertices.saturating_sub(n + 2),
        rng,
    };
    let fvals: Vec<i64> = (0..n).map(|_| b.rng.gen_range(-3..=0)).collect();
    for k in 0..n {
        let mut v = Vertex::s_point(&format!("s{k}"));
        if b.rng.gen_bool(params.genus_prob) {
            v.genus = 1;
        }
        v.is_boundary = b.rng.gen_bool(params.boundary_prob);
        b.sk.vertices.push(v);
    }
    // Γ_S: a random spanning tree plus a few chords, with integer slopes of f
    let mut pairs: Vec<(usize, usize)> = (1..n).map(|k| (b.rng.gen_range(0..k), k)).collect();
    for _ in 0..b.rng.gen_range(0..=n / 3) {
        let (x, y) = (b.rng.gen_range(0..n), b.rng.gen_range(0..n));
        if x != y && !pairs.contains(&(x.min(y), x.max(y))) {
            pairs.push((x.min(y), x.max(y)));
        }
    }
    let mut dd = vec![0i64; n];
    for (j, &(x, y)) in pairs.iter().enumerate() {
        let df = fvals[y] - fvals[x];
        let (len, slope) = if df == 0 {
            ([q(1, 2), qi(1), q(3, 2), qi(2)].choose(b.rng).unwrap().clone(), 0)
        } else {
            let k = b.rng.gen_range(1..=2 * df.abs());
            (q(df.abs(), k), df.signum() * k)
        };
        let id = format!("g{j}");
        b.sk.edges.push(Edge::new(&id, &format!("s{x}"), &format!("s{y}"), len.clone(), true));
        let fs = b.radii_affine(&Domain::Segment { length: len }, &qi(fvals[x]), &qi(slope));
        b.prof.edges.insert(id, fs);
        dd[x] += slope;
        dd[y] -= slope;
    }
    let mut valence = vec![0i64; n];
    for &(x, y) in &pairs {
        valence[x] += 1;
        valence[y] += 1;
    }
    for k in 0..n {
        let id = format!("s{k}");
        let fv = fvals[k];
        let mut rays = 0;
        if b.sk.vertices[k].is_boundary {
            for _ in 0..b.rng.gen_range(0..=1) {
                let s = -b.rng.gen_range(0..=1);
                b.ray(&id, fv, s, rays);
                rays += 1;
            }
            for j in 0..b.rng.gen_range(0..=1) {
                if b.budget > 0 {
                    let a = b.rng.gen_range(0..=2);
                    b.branch(&id, &qi(0), &qi(fv), a, &format!("b{j}"));
                }
            }
            continue;
        }
        let chi = 2 - 2 * b.sk.vertices[k].genus as i64 - valence[k];
        let mut def = -chi - dd[k];
        if def < 0 {
            b.ray(&id, fv, def + 1, rays);
            def = 0;
        } else if b.rng.gen_bool(0.3) {
            b.ray(&id, fv, 0, rays);
            def += 1;
        }
        // split the remaining deficit into branch slopes
        let mut j = 0;
        while def > 0 {
            let a = if b.budget < 2 { def } else { b.rng.gen_range(1..=def) };
            b.branch(&id, &qi(0), &qi(fv), a, &format!("b{j}"));
            def -= a;
            j += 1;
        }
        if b.budget > 0 && b.rng.gen_bool(0.2) {
            b.branch(&id, &qi(0), &qi(fv), 0, &format!("b{j}"));
        }
    }
    // disks without triangulation points, with constant radii
    if b.rng.gen_bool(params.disk_prob) {
        let len = [q(1, 2), qi(1), qi(2)].choose(b.rng).unwrap().clone();
        b.sk.vertices.push(Vertex::plain("d0", len.clone()));
        b.sk.rays.push(Ray::bounded("d0.end", "d0", len.clone()));
        let vals = disk_constants(b.rng, r);
        let dom = Domain::Segment { length: len };
        b.prof.rays.insert("d0.end".into(), vals.iter().map(|v| PLFunction::constant(&dom, v.clone())).collect());
    }
    if b.rng.gen_bool(params.disk_prob) {
        b.sk.disk_components = 1;
        let vals = disk_constants(b.rng, r);
        b.prof.disks.push(vals);
    }
    for k in 0..n {
        let id = format!("s{k}");
        let touched = b.sk.edges.iter().any(|e| e.from == id || e.to == id) || b.sk.rays.iter().any(|r| r.anchor == id);
        if !touched {
            b.prof.vertex_values.insert(id, b.c.iter().map(|c| qi(fvals[k] - c)).collect());
        }
    }
    let f = (0..n).map(|k| (format!("s{k}"), fvals[k])).collect();
    FlowInstance { skeleton: b.sk, profile: b.prof, flags: EquationFlags::all_liouville(), f, offsets: b.c }
}

fn disk_constants<R: Rng>(rng: &mut R, r: usize) -> Vec<Rational> {
    let mut v: Vec<Rational> = (0..r).map(|_| qi(-rng.gen_range(0..=2))).collect();
    v.sort();
    v
}

/// Adds a short steep ray at an interior point of `S`, breaking
/// super-harmonicity there and nowhere else. Returns the point.
pub fn inject_violation<R: Rng>(rng: &mut R, inst: &mut FlowInstance) -> Option<String> {
    let cands: Vec<String> = inst
        .skeleton
        .vertices
        .iter()
        .filter(|v| v.in_s && !v.is_boundary && (v.genus == 0 || v.tr_ok))
        .map(|v| v.id.clone())
        .collect();
    let x = cands.choose(rng)?.clone();
    let fv = inst.f[&x];
    let id = format!("{x}.bad");
    let len = q(1, 4);
    inst.skeleton.rays.push(Ray::bounded(&id, &x, len.clone()));
    let dom = Domain::Segment { length: len };
    let fs = inst.offsets.iter().map(|c| PLFunction::affine(&dom, qi(fv - c), qi(2))).collect();
    inst.profile.rays.insert(id, fs);
    Some(x)
}

/// A random open cover `U ∪ V = X`: every vertex goes to `U`, `V` or both,
/// together with all its germs.
pub fn random_cover<R: Rng>(rng: &mut R, sk: &CurveSkeleton) -> (SubDomain, SubDomain) {
    let mut u = SubDomain::default();
    let mut v = SubDomain::default();
    let place = |side: u8, id: &str, u: &mut SubDomain, v: &mut SubDomain| {
        if side != 1 {
            u.vertices.insert(id.to_string());
        }
        if side != 0 {
            v.vertices.insert(id.to_string());
        }
    };
    for x in &sk.vertices {
        place(rng.gen_range(0..3), &x.id, &mut u, &mut v);
    }
    for e in &sk.edges {
        for d in [&mut u, &mut v] {
            if d.vertices.contains(&e.from) || d.vertices.contains(&e.to) {
                d.edges.insert(e.id.clone());
            }
        }
    }
    for r in &sk.rays {
        for d in [&mut u, &mut v] {
            if d.vertices.contains(&r.anchor) {
                d.rays.insert(r.id.clone());
            }
        }
    }
    for k in 0..sk.disk_components {
        match rng.gen_range(0..3) {
            0 => u.disks.insert(k),
            1 => v.disks.insert(k),
            _ => u.disks.insert(k) | v.disks.insert(k),
        };
    }
    (u, v)
}

/// A random finer triangulation: subdivide a carrier, or promote an
/// off-skeleton vertex into `S`. Radii follow the new distances.
pub fn refine<R: Rng>(
    rng: &mut R,
    sk: &CurveSkeleton,
    prof: &MultiRadiusProfile,
    step: usize,
) -> Result<(CurveSkeleton, MultiRadiusProfile), ProfileError> {
    let eq = Equation::new(sk, prof)?;
    let off: Vec<String> = sk
        .vertices
        .iter()
        .enumerate()
        .filter(|(v, x)| !x.in_s && !eq.topo.on_gamma_s(sk, *v) && eq.topo.comps[eq.topo.comp_of[*v]].has_s)
        .map(|(_, x)| x.id.clone())
        .collect();
    if !off.is_empty() && rng.gen_bool(0.5) {
        let w = off.choose(rng).unwrap().clone();
        let nsk = promote(sk, &[w])?;
        let np = change_triangulation(&eq, &nsk)?;
        return Ok((nsk, np));
    }
    let carriers: Vec<(String, Option<Rational>)> = sk
        .edges
        .iter()
        .map(|e| (e.id.clone(), Some(e.length.clone())))
        .chain(sk.rays.iter().map(|r| (r.id.clone(), r.length.clone())))
        .collect();
    // a lone vertex has no finer triangulation
    let Some((id, len)) = carriers.choose(rng).cloned() else {
        return Ok((sk.clone(), prof.clone()));
    };
    let t = match len {
        Some(l) => l * q(rng.gen_range(1..4), 4),
        None => q(rng.gen_range(1..8), 2),
    };
    subdivide(sk, prof, &id, &t, &format!("n{step}"))
}

/// A constant-coefficient operator `D^r + g_1 D^{r−1} + … + g_r` over `ℚ`
/// with `g_j = u_j·p^{−e_j}`, in the regime where Young's rule applies at the
/// Gauss point. Returned in both the log-absolute and the Taylor form.
pub fn young_operator<R: Rng>(rng: &mut R, p: u64) -> (CyclicOperator, TaylorOperator) {
    let r = rng.gen_range(1..=3usize);
    let dom = Domain::Segment { length: qi(1) };
    loop {
        let mut logs = Vec::new();
        let mut coeffs = vec![vec![qi(1)]];
        for j in 1..=r {
            if j < r && rng.gen_bool(0.25) {
                logs.push(None);
                coeffs.push(vec![]);
                continue;
            }
            let e = rng.gen_range(1..=2 * j as i64 + 1);
            let unit = loop {
                let u = rng.gen_range(1..=(p as i64 * 3));
                if u % p as i64 != 0 {
                    break if rng.gen_bool(0.5) { u } else { -u };
                }
            };
            logs.push(Some(e));
            coeffs.push(vec![Rational::new(unit, (p as i64).pow(e as u32))]);
        }
        // the largest hull slope is the first segment of the concave hull
        let steepest = logs
            .iter()
            .enumerate()
            .filter_map(|(j, e)| e.map(|e| q(e, j as i64 + 1)))
            .max()
            .unwrap();
        if steepest.is_positive() {
            let op = CyclicOperator {
                carrier: None,
                rank: r,
                domain: dom.clone(),
                coeffs: logs.iter().map(|e| e.map(|e| PLFunction::constant(&dom, qi(e)))).collect(),
            };
            return (op, TaylorOperator { p, coeffs });
        }
    }
}

/// Three radii on a path `s – x – y` leaving a point of `S` with four ends;
/// `x` lies in `𝒞_{S,3}` and `dd^c H_3(x) = +1` there.
pub fn pathology_mimic() -> (CurveSkeleton, MultiRadiusProfile) {
    let vals = [[-6i64, 0, 0], [-4, -1, -1], [-2, -2, -1]];
    let sk = CurveSkeleton {
        vertices: vec![Vertex::s_point("s"), Vertex::plain("x", qi(1)), Vertex::plain("y", qi(2))],
        edges: vec![Edge::new("sx", "s", "x", qi(1), false), Edge::new("xy", "x", "y", qi(1), false)],
        rays: (0..4).map(|j| Ray::new(&format!("r{j}"), "s")).collect(),
        disk_components: 0,
    };
    let mut p = MultiRadiusProfile { rank: 3, ..Default::default() };
    let on = |a: &[i64; 3], b: &[i64; 3]| (0..3).map(|i| seg(vec![(qi(0), qi(a[i])), (qi(1), qi(b[i]))])).collect();
    p.edges.insert("sx".into(), on(&vals[0], &vals[1]));
    p.edges.insert("xy".into(), on(&vals[1], &vals[2]));
    for j in 0..4 {
        p.rays.insert(format!("r{j}"), vals[0].iter().map(|c| PLFunction::constant(&Domain::Ray, qi(*c))).collect());
    }
    (sk, p)
}

/// The worked open-disk instance: `(d/dT)² + f_1 d/dT + f_2` with
/// `log|f_2| = 3` and `log|f_1|` bending at two branch points, over a
/// residue field of characteristic 0.
pub fn disk_example() -> (CurveSkeleton, Vec<CyclicOperator>) {
    let sk = CurveSkeleton {
        vertices: vec![
            Vertex::plain("b1", q(1, 8)),
            Vertex::plain("b2", q(3, 8)),
            Vertex::plain("c", q(3, 4)),
            Vertex::plain("z1", qi(1)),
            Vertex::plain("z2", q(3, 4)),
        ],
        edges: vec![
            Edge::new("b1b2", "b1", "b2", q(1, 4), false),
            Edge::new("b2c", "b2", "c", q(3, 8), false),
            Edge::new("b1z1", "b1", "z1", q(7, 8), false),
            Edge::new("b2z2", "b2", "z2", q(3, 8), false),
        ],
        rays: vec![Ray::bounded("end", "b1", q(1, 8))],
        disk_components: 0,
    };
    // log|f_1| along each carrier, from its start
    let l1 = [
        ("b1b2", q(1, 4), q(19, 8), -2),
        ("b2c", q(3, 8), q(15, 8), -1),
        ("b1z1", q(7, 8), q(19, 8), -1),
        ("b2z2", q(3, 8), q(15, 8), -1),
        ("end", q(1, 8), q(19, 8), 3),
    ];
    let ops = l1
        .iter()
        .map(|(id, len, v0, s)| {
            let dom = Domain::Segment { length: len.clone() };
            CyclicOperator {
                carrier: Some(id.to_string()),
                rank: 2,
                domain: dom.clone(),
                coeffs: vec![
                    Some(PLFunction::affine(&dom, v0.clone(), qi(*s))),
                    Some(PLFunction::constant(&dom, qi(3))),
                ],
            }
        })
        .collect();
    (sk, ops)
}

/// Subdivides some `Γ_S` edges at their midpoints, then picks
/// `S' = core points ∪` a random set of `Γ_S` vertices.
pub fn random_s_prime<R: Rng>(rng: &mut R, sk: &CurveSkeleton) -> (CurveSkeleton, Vec<String>) {
    let mut out = sk.clone();
    let mut k = 0;
    for e in 0..sk.edges.len() {
        if !sk.edges[e].in_gamma_s || !rng.gen_bool(0.4) {
            continue;
        }
        let old = out.edges[e].clone();
        let id = format!("m{k}");
        k += 1;
        let half = &old.length / qi(2);
        let mut v = Vertex::plain(&id, qi(0));
        v.t = old.germ_degree;
        out.vertices.push(v);
        out.edges[e] = Edge { id: format!("{}.1", old.id), to: id.clone(), length: half.clone(), ..old.clone() };
        out.edges.push(Edge { id: format!("{}.2", old.id), from: id, length: half, ..old });
    }
    let topo = out.validated().expect("subdivision keeps the skeleton valid");
    let core: BTreeSet<usize> = crate::skeleton::core_points(&out, &topo).into_iter().collect();
    let chosen = (0..out.vertices.len())
        .filter(|&v| core.contains(&v) || (topo.on_gamma_s(&out, v) && rng.gen_bool(0.5)))
        .map(|v| out.vertices[v].id.clone())
        .collect();
    (out, chosen)
}

/// Rank-`r` operator `D^r + p^{−e}·T^k` on an unbounded ray out of a point
/// of `S`: all radii coincide and decrease with slope `−k/r`.
pub fn merged_radii_instance<R: Rng>(rng: &mut R) -> (CurveSkeleton, CyclicOperator, FieldConfig) {
    let p = *[2u64, 3, 5].choose(rng).unwrap();
    let r = rng.gen_range(2..=4usize);
    let e = rng.gen_range(1..=3i64);
    let k = rng.gen_range(1..=3i64);
    let sk = CurveSkeleton {
        vertices: vec![Vertex::s_point("a")],
        rays: vec![Ray::new("r", "a")],
        ..Default::default()
    };
    let mut coeffs = vec![None; r];
    coeffs[r - 1] = Some(PLFunction::affine(&Domain::Ray, qi(e), qi(k)));
    let op = CyclicOperator { carrier: Some("r".into()), rank: r, domain: Domain::Ray, coeffs };
    (sk, op, FieldConfig::new(p).unwrap())
}

/// Growth that settles: the chain keeps growing with flat `f` and no new ends.
pub fn settling_growth(rank: usize) -> GrowthRule {
    GrowthRule {
        rank,
        offsets: (1..=rank as i64).rev().collect::<Vec<_>>().into_iter().map(qi).collect(),
        f0: qi(0),
        left_slope: qi(0),
        initial_slope: qi(0),
        step: qi(1),
        prefix: vec![GrowthStep { delta: qi(0), extra_rays: 1 }],
        period: vec![GrowthStep { delta: qi(0), extra_rays: 0 }],
    }
}

/// Growth where every new point contributes `−rank`: one extra flat end per step.
pub fn persistent_growth(rank: usize) -> GrowthRule {
    GrowthRule { prefix: vec![], period: vec![GrowthStep { delta: qi(0), extra_rays: 1 }], ..settling_growth(rank) }
}

/// Ids of all points of `S`.
pub fn s_ids(sk: &CurveSkeleton) -> BTreeSet<String> {
    sk.vertices.iter().filter(|v| v.in_s).map(|v| v.id.clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::{global_index, Verdict};
    use crate::operator::{profile_from_operators, young_radii, taylor_radius_oracle};
    use crate::radii::checks::{check_integrality, check_monotone_heights, check_weak_superharmonicity};
    use crate::radii::Func;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn flow_instances_are_valid_and_tight() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in 0..200 {
            let inst = flow_instance(&mut rng, &FlowParams::default());
            let eq = Equation::new(&inst.skeleton, &inst.profile).unwrap_or_else(|e| panic!("#{k}: {e}"));
            assert!(inst.skeleton.vertices.len() <= 50);
            let rep = global_index(&eq, &inst.flags);
            assert!(matches!(rep.verdict, Verdict::Finite { .. }), "#{k}: {:?}", rep.verdict);
            let wsh = check_weak_superharmonicity(&eq);
            assert!(wsh.holds, "#{k}: {:?}", wsh.failures);
            assert!(check_integrality(&eq).strict_holds);
            assert!(check_monotone_heights(&eq).is_empty());
        }
    }

    #[test]
    fn injected_violations_are_located() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut hits = 0;
        for _ in 0..50 {
            let mut inst = flow_instance(&mut rng, &FlowParams::default());
            let Some(x) = inject_violation(&mut rng, &mut inst) else { continue };
            let eq = Equation::new(&inst.skeleton, &inst.profile).unwrap();
            let wsh = check_weak_superharmonicity(&eq);
            let pts: BTreeSet<&str> = wsh.failures.iter().map(|f| f.point.as_str()).collect();
            assert_eq!(pts, [x.as_str()].into());
            hits += 1;
        }
        assert!(hits > 20);
    }

    #[test]
    fn disk_example_profile() {
        let (sk, ops) = disk_example();
        let prof = profile_from_operators(&sk, &ops, &FieldConfig::zero()).unwrap();
        let eq = Equation::new(&sk, &prof).unwrap();
        for c in eq.carriers() {
            assert!(eq.plf(c, Func::H(2)).is_constant());
        }
        for b in ["b1", "b2"] {
            assert!(eq.laplacian(&eq.vertex(b).unwrap(), Func::R(1)).is_zero());
        }
        let rep = global_index(&eq, &EquationFlags::all_liouville());
        assert_eq!(rep.verdict, Verdict::Finite { chi: 0 });
        assert_eq!(rep.h0, 0);
        assert!(check_weak_superharmonicity(&eq).holds);
    }

    #[test]
    fn young_operators_agree_with_taylor() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for p in [2u64, 3, 5] {
            for _ in 0..3 {
                let (op, t) = young_operator(&mut rng, p);
                let fc = FieldConfig::new(p).unwrap();
                let y = young_radii(&op, &fc, &qi(0), &qi(0)).unwrap();
                let est = taylor_radius_oracle(&t, 600).unwrap();
                let lr = est.log_radius.unwrap().to_f64();
                let yr = y[0].log_r.clone().unwrap().to_f64();
                assert!((lr - yr).abs() <= est.band + 1e-9, "p={p} {op:?}: {lr} vs {yr}");
            }
        }
    }

    #[test]
    fn s_prime_supersets_satisfy_euler() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let inst = flow_instance(&mut rng, &FlowParams::default());
            let (sk, sp) = random_s_prime(&mut rng, &inst.skeleton);
            let r = crate::skeleton::sum_chi_check(&sk, &sp).unwrap();
            assert!(r.equal, "{r:?}");
        }
    }

    #[test]
    fn merged_radii_have_half_integral_heights() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (sk, op, fc) = merged_radii_instance(&mut rng);
        let prof = profile_from_operators(&sk, &[op], &fc).unwrap();
        let eq = Equation::new(&sk, &prof).unwrap();
        let rep = check_integrality(&eq);
        assert!(rep.holds);
        assert!(!rep.strict_holds);
    }
}
