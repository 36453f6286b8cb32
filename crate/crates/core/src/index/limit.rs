//! Indices of exhaustions `X_0 ⊂ X_1 ⊂ …` by a periodic growth rule.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{chi_x_s_f, global_index, EquationFlags, Verdict};
use crate::plf::{Domain, PLFunction};
use crate::radii::{Equation, MultiRadiusProfile, ProfileError};
use crate::rational::Rational;
use crate::skeleton::{CurveSkeleton, Edge, Ray, Vertex};

/// One growth step: the slope of `f` changes by `delta` at the new point,
/// which also receives `extra_rays` ends on which `f` is constant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthStep {
    pub delta: Rational,
    #[serde(default)]
    pub extra_rays: u32,
}

/// A chain `x_0 – x_1 – … – x_n` of triangulation points, a ray on the left
/// of `x_0` and an end of modulus `step` after `x_n`. Radii are
/// `log R_i = f − c_i` for a single piecewise affine `f`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthRule {
    pub rank: usize,
    /// The offsets `c_i`, sorted decreasingly so that the radii increase.
    pub offsets: Vec<Rational>,
    pub f0: Rational,
    /// Slope of `f` along the left ray, away from `x_0`.
    pub left_slope: Rational,
    /// Slope of `f` leaving `x_0` along the chain.
    pub initial_slope: Rational,
    pub step: Rational,
    #[serde(default)]
    pub prefix: Vec<GrowthStep>,
    /// Repeated forever after the prefix; empty means the growth stops.
    #[serde(default)]
    pub period: Vec<GrowthStep>,
}

impl GrowthRule {
    /// The step creating `x_n`, for `n ≥ 1`.
    pub fn step_at(&self, n: usize) -> Option<&GrowthStep> {
        if n == 0 {
            return None;
        }
        if n <= self.prefix.len() {
            return self.prefix.get(n - 1);
        }
        if self.period.is_empty() {
            return None;
        }
        self.period.get((n - 1 - self.prefix.len()) % self.period.len())
    }

    /// Number of chain points after `x_0` in `X_n`.
    pub fn length_at(&self, n: usize) -> usize {
        if self.period.is_empty() {
            n.min(self.prefix.len())
        } else {
            n
        }
    }

    pub fn build(&self, n: usize) -> Result<(CurveSkeleton, MultiRadiusProfile), ProfileError> {
        if self.offsets.len() != self.rank || self.rank == 0 {
            return Err(ProfileError::Shape(format!("{} offsets for rank {}", self.offsets.len(), self.rank)));
        }
        if !self.step.is_positive() {
            return Err(ProfileError::Argument("step length must be positive".into()));
        }
        let mut offsets = self.offsets.clone();
        offsets.sort_by(|a, b| b.cmp(a));
        let radii = |f: &PLFunction| -> Vec<PLFunction> {
            offsets.iter().map(|c| crate::plf::combine(&crate::plf::CombineOp::Shift(-c), std::slice::from_ref(f)).unwrap()).collect()
        };
        let m = self.length_at(n);
        let mut sk = CurveSkeleton::default();
        let mut prof = MultiRadiusProfile { rank: self.rank, ..Default::default() };
        let name = |j: usize| format!("x{j}");
        sk.vertices.push(Vertex::s_point(&name(0)));
        sk.rays.push(Ray::new("left", &name(0)));
        prof.rays.insert("left".into(), radii(&PLFunction::affine(&Domain::Ray, self.f0.clone(), self.left_slope.clone())));
        let mut f = self.f0.clone();
        let mut slope = self.initial_slope.clone();
        for j in 1..=m {
            let st = self.step_at(j).unwrap();
            let id = format!("e{j}");
            sk.vertices.push(Vertex::s_point(&name(j)));
            sk.edges.push(Edge::new(&id, &name(j - 1), &name(j), self.step.clone(), true));
            let seg = PLFunction::affine(&Domain::Segment { length: self.step.clone() }, f.clone(), slope.clone());
            f = &f + &(&slope * &self.step);
            prof.edges.insert(id, radii(&seg));
            for k in 0..st.extra_rays {
                let rid = format!("x{j}.r{k}");
                sk.rays.push(Ray::new(&rid, &name(j)));
                prof.rays.insert(rid, radii(&PLFunction::constant(&Domain::Ray, f.clone())));
            }
            slope = &slope + &st.delta;
        }
        sk.rays.push(Ray::bounded("tip", &name(m), self.step.clone()));
        let tip = PLFunction::affine(&Domain::Segment { length: self.step.clone() }, f, slope);
        prof.rays.insert("tip".into(), radii(&tip));
        Ok((sk, prof))
    }
}

impl GrowthRule {
    /// The union of all `X_n`, when the periodic part adds nothing but flat
    /// segments: the last prefix domain with its tip opened into a ray.
    /// `None` when the steady regime still bends `f` or adds ends.
    pub fn limit_domain(&self) -> Option<Result<(CurveSkeleton, MultiRadiusProfile), ProfileError>> {
        if !self.period.iter().all(|s| s.delta.is_zero() && s.extra_rays == 0) {
            return None;
        }
        let m = self.prefix.len();
        Some(self.build(m).map(|(mut sk, mut prof)| {
            if !self.period.is_empty() {
                let tip = sk.rays.iter_mut().find(|r| r.id == "tip").unwrap();
                tip.length = None;
                let fs = prof.rays.get_mut("tip").unwrap();
                for f in fs.iter_mut() {
                    *f = PLFunction::affine(&Domain::Ray, f.value_at_start().clone(), f.start_slope());
                }
            }
            (sk, prof)
        }))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitReport {
    /// `χ(X_n)` for `n = 0..=steps`.
    pub chis: Vec<i64>,
    pub increments: Vec<i64>,
    /// Each increment equals the local contributions of the points it adds.
    pub telescoping: bool,
    /// All but finitely many points contribute 0 and the new disk ends are flat.
    pub criteria_hold: bool,
    pub agree: Option<bool>,
    pub verdict: Verdict,
}

/// Streams `X_0, …, X_steps`, checks telescoping at each step and decides the
/// limit: finite once the last `window` increments vanish, infinite when the
/// periodic regime keeps a non-zero increment.
pub fn limit_decide(
    rule: &GrowthRule,
    flags: &EquationFlags,
    steps: usize,
    window: usize,
) -> Result<LimitReport, ProfileError> {
    let mut chis = Vec::new();
    let mut locals: Vec<i64> = Vec::new();
    let mut telescoping = true;
    let mut flat_ends = true;
    let mut prev_s: BTreeSet<String> = BTreeSet::new();
    for n in 0..=steps {
        let (sk, prof) = rule.build(n)?;
        let eq = Equation::new(&sk, &prof)?;
        let rep = global_index(&eq, flags);
        let Some(chi) = rep.verdict.chi() else {
            return Ok(LimitReport {
                chis,
                increments: vec![],
                telescoping,
                criteria_hold: false,
                agree: None,
                verdict: Verdict::Undetermined { reason: format!("X_{n}: {:?}", rep.verdict) },
            });
        };
        let s: BTreeSet<String> = sk.vertices.iter().filter(|v| v.in_s).map(|v| v.id.clone()).collect();
        if n > 0 {
            let fresh: Rational = s
                .difference(&prev_s)
                .map(|id| chi_x_s_f(&eq, &eq.vertex(id).unwrap()))
                .sum();
            let fresh = fresh.to_i64().unwrap_or(i64::MIN);
            telescoping &= chi - chis[n - 1] == fresh;
            locals.push(fresh);
            // extra ends carry constant radii, so their heights are flat
            flat_ends &= sk.rays.iter().filter(|r| r.id.contains(".r")).all(|r| {
                prof.rays[&r.id].iter().all(|f| f.is_constant())
            });
        }
        prev_s = s;
        chis.push(chi);
    }
    let increments: Vec<i64> = chis.windows(2).map(|w| w[1] - w[0]).collect();
    let p = rule.period.len();
    let pre = rule.prefix.len();
    // local contributions in the periodic regime
    let steady: Vec<i64> = locals.iter().skip(pre).copied().collect();
    let criteria_hold = flat_ends && (p == 0 || (steady.len() >= p && steady.iter().all(|c| *c == 0)));
    let tail_zero = increments.len() >= window && increments[increments.len() - window..].iter().all(|d| *d == 0);
    let periodic_nonzero = p > 0
        && steady.len() >= 2 * p
        && steady.windows(p + 1).all(|w| w[0] == w[p])
        && steady[steady.len() - p..].iter().any(|d| *d != 0);
    let verdict = if window > 0 && tail_zero {
        Verdict::Finite { chi: *chis.last().unwrap() }
    } else if periodic_nonzero {
        Verdict::Infinite { reason: "periodic non-zero increments".into() }
    } else {
        Verdict::Undetermined { reason: format!("no decision after {steps} steps") }
    };
    let agree = match &verdict {
        Verdict::Finite { .. } => Some(criteria_hold),
        Verdict::Infinite { .. } => Some(!criteria_hold),
        Verdict::Undetermined { .. } => None,
    };
    Ok(LimitReport { chis, increments, telescoping, criteria_hold, agree, verdict })
}
