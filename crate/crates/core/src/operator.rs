//! Radii of cyclic differential operators.
//!
//! In the small-radius regime the radii of `D^r + g_1 D^{r−1} + … + g_r`
//! are read off the upper concave hull of `(j, log|g_j|)` (Young's rule).
//! This module turns operators given along a carrier into profiles, keeps
//! the generalized-index ledger under Frobenius push-forward, and provides
//! an independent Taylor-series oracle over `ℚ` with a `p`-adic valuation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::plf::{combine, hull_vertices, newton_hull, CombineOp, Domain, HullPoints, HullSide, PLFunction};
use crate::radii::{sigma_plfs, FieldConfig, MultiRadiusProfile};
use crate::rational::{valuation_int, Rational};
use crate::skeleton::{CurveSkeleton, SkeletonError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OperatorError {
    #[error("refused: {0}")]
    Refusal(String),
    #[error("not applicable: {0}")]
    Inapplicable(String),
    #[error("malformed operator: {0}")]
    Malformed(String),
    #[error(transparent)]
    Skeleton(#[from] SkeletonError),
}

/// `D^r + g_1 D^{r−1} + … + g_r` along one carrier, stored as `log|g_j|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicOperator {
    /// Edge or ray of the skeleton the operator lives on.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub carrier: Option<String>,
    pub rank: usize,
    pub domain: Domain,
    /// `log|g_j|` for `j = 1..r`; `null` marks a zero coefficient.
    pub coeffs: Vec<Option<PLFunction>>,
}

impl CyclicOperator {
    pub fn check(&self) -> Result<(), OperatorError> {
        if self.rank == 0 || self.coeffs.len() != self.rank {
            return Err(OperatorError::Malformed(format!(
                "rank {} with {} coefficients",
                self.rank,
                self.coeffs.len()
            )));
        }
        if self.coeffs.iter().flatten().any(|f| f.domain() != &self.domain) {
            return Err(OperatorError::Malformed("coefficients must live on the operator's domain".into()));
        }
        if self.is_trivial() {
            return Err(OperatorError::Refusal("radii all maximal, Young inapplicable".into()));
        }
        Ok(())
    }

    pub fn is_trivial(&self) -> bool {
        self.coeffs.iter().all(Option::is_none)
    }

    /// Index of the last present coefficient.
    fn top(&self) -> usize {
        self.coeffs.iter().rposition(Option::is_some).map_or(0, |k| k + 1)
    }

    fn hull_points(&self, t: &Rational) -> Result<HullPoints, OperatorError> {
        let mut pts = vec![(0u32, Some(Rational::zero()))];
        for (j, c) in self.coeffs.iter().enumerate() {
            let v = match c {
                Some(f) => Some(f.eval(t).map_err(|e| OperatorError::Malformed(e.to_string()))?),
                None => None,
            };
            pts.push((j as u32 + 1, v));
        }
        Ok(HullPoints::new(pts))
    }
}

/// One Young candidate: `None` when the hull stops before this index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct YoungRadius {
    pub log_r: Option<Rational>,
    pub valid: bool,
}

/// Young radii at `t`; valid entries satisfy `log R < log ω + σ(t)`.
pub fn young_radii(
    op: &CyclicOperator,
    fc: &FieldConfig,
    t: &Rational,
    sigma_t: &Rational,
) -> Result<Vec<YoungRadius>, OperatorError> {
    op.check()?;
    let pts = op.hull_points(t)?;
    let slopes = newton_hull(&pts, HullSide::UpperConcave).map_err(|e| OperatorError::Malformed(e.to_string()))?;
    let w = fc.log_omega();
    let bound = &w + sigma_t;
    let mut out: Vec<YoungRadius> = slopes
        .iter()
        .map(|s| {
            let r = &w - s;
            YoungRadius { valid: r < bound, log_r: Some(r) }
        })
        .collect();
    out.resize(op.rank, YoungRadius { log_r: None, valid: false });
    Ok(out)
}

/// Value of the upper concave hull at index `k` as a function of `t`:
/// the maximum over chords `(j, l)` with `j ≤ k ≤ l`.
fn hull_height(vals: &[Option<PLFunction>], k: usize, dom: &Domain) -> PLFunction {
    let mut cands = Vec::new();
    for (j, vj) in vals.iter().enumerate().take(k + 1) {
        let Some(vj) = vj else { continue };
        for (l, vl) in vals.iter().enumerate().skip(k) {
            let Some(vl) = vl else { continue };
            if j == l {
                cands.push(vj.clone());
                continue;
            }
            let a = Rational::new((l - k) as i64, (l - j) as i64);
            let b = Rational::new((k - j) as i64, (l - j) as i64);
            let sa = combine(&CombineOp::Scale(a), std::slice::from_ref(vj)).unwrap();
            let sb = combine(&CombineOp::Scale(b), std::slice::from_ref(vl)).unwrap();
            cands.push(combine(&CombineOp::Sum, &[sa, sb]).unwrap());
        }
    }
    debug_assert!(!cands.is_empty(), "index {k} not covered on {dom:?}");
    combine(&CombineOp::Max, &cands).unwrap()
}

/// Profile of one operator along its carrier: `log R_i = log ω − s_i`.
///
/// Every radius must stay in the Young regime on the whole domain.
pub fn young_profile(op: &CyclicOperator, fc: &FieldConfig, sigma: &PLFunction) -> Result<Vec<PLFunction>, OperatorError> {
    op.check()?;
    if sigma.domain() != &op.domain {
        return Err(OperatorError::Malformed("σ lives on another domain".into()));
    }
    let top = op.top();
    if top < op.rank {
        return Err(OperatorError::Refusal(format!(
            "coefficients beyond g_{top} vanish, radii {}..{} are not in the Young regime",
            top + 1,
            op.rank
        )));
    }
    let mut vals = vec![Some(PLFunction::constant(&op.domain, Rational::zero()))];
    vals.extend(op.coeffs.iter().cloned());
    let heights: Vec<PLFunction> = (0..=op.rank).map(|k| hull_height(&vals, k, &op.domain)).collect();
    let w = fc.log_omega();
    let mut out = Vec::new();
    for i in 1..=op.rank {
        // log R_i = log ω − (h_i − h_{i−1})
        let neg = combine(&CombineOp::Scale(-Rational::one()), &[heights[i].clone()]).unwrap();
        let s = combine(&CombineOp::Sum, &[neg, heights[i - 1].clone()]).unwrap();
        let r = combine(&CombineOp::Shift(w.clone()), &[s]).unwrap().simplified();
        // gap = log ω + σ − log R must stay positive
        let neg_r = combine(&CombineOp::Scale(-Rational::one()), std::slice::from_ref(&r)).unwrap();
        let gap = combine(&CombineOp::Shift(w.clone()), &[combine(&CombineOp::Sum, &[sigma.clone(), neg_r]).unwrap()])
            .unwrap();
        if let Some((a, b)) = nonpositive_range(&gap) {
            return Err(OperatorError::Refusal(format!(
                "radius {i} leaves the Young regime on [{a}, {b}]"
            )));
        }
        out.push(r);
    }
    Ok(out)
}

/// Hull of `f ≤ 0` as a parameter range, `"∞"` for an unbounded end.
fn nonpositive_range(f: &PLFunction) -> Option<(Rational, String)> {
    let zero = PLFunction::constant(f.domain(), Rational::zero());
    let g = combine(&CombineOp::Min, &[f.clone(), zero]).unwrap();
    let bad: Vec<Rational> = g
        .points()
        .iter()
        .filter(|(t, _)| !f.eval(t).unwrap().is_positive())
        .map(|(t, _)| t.clone())
        .collect();
    let tail_bad = f.is_ray() && {
        let v = &f.points().last().unwrap().1;
        f.tail_slope().is_negative() || (f.tail_slope().is_zero() && !v.is_positive())
    };
    if tail_bad {
        let start = bad.first().cloned().unwrap_or_else(|| {
            let (t0, v0) = f.points().last().unwrap();
            t0 - v0 / f.tail_slope()
        });
        return Some((start, "∞".into()));
    }
    match (bad.first(), bad.last()) {
        (Some(a), Some(b)) => Some((a.clone(), b.to_string())),
        _ => None,
    }
}

/// One operator per carrier, assembled into a profile on the skeleton.
pub fn profile_from_operators(
    sk: &CurveSkeleton,
    ops: &[CyclicOperator],
    fc: &FieldConfig,
) -> Result<MultiRadiusProfile, OperatorError> {
    let topo = sk.validated()?;
    if sk.disk_components > 0 {
        return Err(OperatorError::Refusal("disk markers carry no operator".into()));
    }
    let rank = ops.first().map(|o| o.rank).ok_or_else(|| OperatorError::Malformed("no operator given".into()))?;
    let sig = sigma_plfs(sk, &topo);
    let mut prof = MultiRadiusProfile { rank, ..Default::default() };
    for op in ops {
        if op.rank != rank {
            return Err(OperatorError::Malformed("operators of different ranks".into()));
        }
        let c = op
            .carrier
            .as_deref()
            .ok_or_else(|| OperatorError::Malformed("operator without carrier".into()))?;
        let (ci, is_edge) = if let Some(&e) = topo.eindex.get(c) {
            (e, true)
        } else if let Some(&r) = topo.rindex.get(c) {
            (sk.edges.len() + r, false)
        } else {
            return Err(OperatorError::Malformed(format!("unknown carrier {c}")));
        };
        let fs = young_profile(op, fc, &sig[ci]).map_err(|e| match e {
            OperatorError::Refusal(m) => OperatorError::Refusal(format!("{c}: {m}")),
            other => other,
        })?;
        let slot = if is_edge { &mut prof.edges } else { &mut prof.rays };
        if slot.insert(c.to_string(), fs).is_some() {
            return Err(OperatorError::Malformed(format!("two operators on {c}")));
        }
    }
    for e in &sk.edges {
        if !prof.edges.contains_key(&e.id) {
            return Err(OperatorError::Malformed(format!("no operator on {}", e.id)));
        }
    }
    for r in &sk.rays {
        if !prof.rays.contains_key(&r.id) {
            return Err(OperatorError::Malformed(format!("no operator on {}", r.id)));
        }
    }
    Ok(prof)
}

/// Hull vertices of the operator at `t`, for reports.
pub fn young_polygon(op: &CyclicOperator, t: &Rational) -> Result<Vec<(i64, Rational)>, OperatorError> {
    op.check()?;
    hull_vertices(&op.hull_points(t)?, HullSide::UpperConcave).map_err(|e| OperatorError::Malformed(e.to_string()))
}

/// Slope of `H_r` along a germ after Frobenius push-forward: `slope − r(p−1)`.
pub fn frobenius_height_slope(slope: &Rational, r: u64, p: u64) -> Result<Rational, OperatorError> {
    if p <= 1 {
        return Err(OperatorError::Inapplicable("Frobenius needs a positive residue characteristic".into()));
    }
    Ok(slope - Rational::int((r * (p - 1)) as i64))
}

/// Generalized indexes of a differential module over an annulus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenIndexLedger {
    pub irr: i64,
    /// `χ^gen(O(D_0), T·∇)`.
    pub chi_gen_d0: i64,
    /// `χ^gen(O(D_∞), T·∇)`.
    pub chi_gen_dinf: i64,
    /// `χ^gen(H†, T·∇)`.
    pub chi_gen_h_dagger: i64,
    pub chi_annulus: i64,
    /// `χ^gen(O(D_0), ∇)`: the `T`-twist adds the rank.
    pub chi_gen_d0_nabla: i64,
    pub rank: i64,
    pub residue_char: u64,
}

pub fn gen_index_ledger(irr: i64, r: i64, fc: &FieldConfig) -> GenIndexLedger {
    GenIndexLedger {
        irr,
        chi_gen_d0: irr,
        chi_gen_dinf: -irr,
        chi_gen_h_dagger: -irr,
        chi_annulus: 0,
        chi_gen_d0_nabla: irr + r,
        rank: r,
        residue_char: fc.p(),
    }
}

/// Shifts of the disk entries under push-forward by Frobenius.
pub fn pushforward_ledger(l: &GenIndexLedger) -> Result<GenIndexLedger, OperatorError> {
    if l.residue_char <= 1 {
        return Err(OperatorError::Inapplicable("Frobenius needs a positive residue characteristic".into()));
    }
    let s = l.rank * (l.residue_char as i64 - 1);
    Ok(GenIndexLedger {
        chi_gen_d0: l.chi_gen_d0 + s,
        chi_gen_dinf: l.chi_gen_dinf - s,
        chi_gen_h_dagger: l.chi_gen_h_dagger - s,
        chi_gen_d0_nabla: l.chi_gen_d0_nabla + s,
        ..l.clone()
    })
}

impl GenIndexLedger {
    /// Relations every ledger must keep.
    pub fn consistent(&self) -> bool {
        self.chi_gen_d0 + self.chi_gen_dinf == self.chi_annulus
            && self.chi_gen_d0 == -self.chi_gen_h_dagger
            && self.chi_gen_d0_nabla == self.chi_gen_d0 + self.rank
    }
}

/// `Σ_j g_j(T) (d/dT)^{r−j}` over `ℚ`, with `g_0(0) ≠ 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaylorOperator {
    pub p: u64,
    /// Polynomial coefficients in ascending powers; `coeffs[0]` leads.
    pub coeffs: Vec<Vec<Rational>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaylorEstimate {
    /// `min v(a_n)/n` over the tail window, `None` if every tail term vanishes.
    pub log_radius: Option<Rational>,
    pub band: f64,
    /// Solutions are polynomials: the radius is maximal.
    pub maximal: bool,
    pub terms: usize,
}

/// Number of times `p` divides `n`, dividing by word-sized powers of `p`.
fn val_fast(n: &BigInt, p: u64) -> u64 {
    let mut pe: u64 = p;
    let mut e = 1u64;
    while let Some(next) = pe.checked_mul(p) {
        pe = next;
        e += 1;
    }
    let big_pe = BigInt::from(pe);
    let mut m = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&big_pe);
        if r.is_zero() {
            m = q;
            v += e;
        } else {
            return v + valuation_int(&r, p);
        }
    }
}

/// Estimate of `log R` of the generic solution at 0 from `N` Taylor terms.
pub fn taylor_radius_oracle(op: &TaylorOperator, n_terms: usize) -> Result<TaylorEstimate, OperatorError> {
    let p = op.p;
    if p < 2 {
        return Err(OperatorError::Inapplicable("the oracle needs a prime p".into()));
    }
    let r = op.coeffs.len().checked_sub(1).filter(|&r| r > 0).ok_or_else(|| OperatorError::Malformed("rank 0".into()))?;
    let lead = op.coeffs[0].first().cloned().unwrap_or_else(Rational::zero);
    if lead.is_zero() {
        return Err(OperatorError::Inapplicable("0 is a singular point".into()));
    }
    // normalized coefficients h_{j,m} = g_{j,m} / g_{0,0}, skipping (0,0)
    let mut terms: Vec<(usize, usize, Rational)> = Vec::new();
    for (j, poly) in op.coeffs.iter().enumerate() {
        for (m, c) in poly.iter().enumerate() {
            if (j, m) != (0, 0) && !c.is_zero() {
                terms.push((j, m, c / &lead));
            }
        }
    }
    let d: BigInt = terms.iter().fold(BigInt::one(), |acc, (_, _, c)| acc.lcm(c.denom()));
    let v_d = if d.is_one() { 0 } else { val_fast(&d, p) as i64 };
    // integer weights h_{j,m} D^{j+m}
    let weights: Vec<(usize, BigInt)> = terms
        .iter()
        .map(|(j, m, c)| {
            let w = c.numer() * num_traits::pow(d.clone(), j + m) / c.denom();
            (j + m, w)
        })
        .collect();
    let ms: Vec<usize> = terms.iter().map(|t| t.1).collect();
    let n = n_terms.max(2 * r + 2);
    let lo = n / 2;
    let mut best: Option<Rational> = None;
    // v(n!) by Legendre
    let vfact = |k: usize| -> i64 {
        let (mut s, mut q) = (0i64, k as u64);
        while q > 0 {
            q /= p;
            s += q as i64;
        }
        s
    };
    for k in 0..r {
        // c_i = D^i i! a_i with a_i = δ_{ik} for i < r
        let mut c: Vec<BigInt> = vec![BigInt::zero(); n + 1];
        let mut kf = BigInt::one();
        for i in 1..=k {
            kf *= i;
        }
        c[k] = num_traits::pow(d.clone(), k) * kf;
        for big_n in 0..=(n - r) {
            let mut acc = BigInt::zero();
            for ((shift, w), &m) in weights.iter().zip(&ms) {
                if m > big_n {
                    continue;
                }
                let idx = big_n + r - shift;
                if c[idx].is_zero() {
                    continue;
                }
                let mut fall = BigInt::one();
                for f in 0..m {
                    fall *= big_n - f;
                }
                acc += w * fall * &c[idx];
            }
            c[big_n + r] = -acc;
        }
        for (i, ci) in c.iter().enumerate().skip(lo.max(1)) {
            if ci.is_zero() {
                continue;
            }
            let v = val_fast(ci, p) as i64 - i as i64 * v_d - vfact(i);
            let est = Rational::new(v, i as i64);
            best = Some(match best {
                Some(b) => b.min(est),
                None => est,
            });
        }
    }
    Ok(TaylorEstimate {
        maximal: best.is_none(),
        log_radius: best,
        band: 1.0 / (n as f64).sqrt(),
        terms: n,
    })
}

/// `f64` view used when comparing with Young radii.
pub fn estimate_f64(e: &TaylorEstimate) -> Option<f64> {
    e.log_radius.as_ref().map(|r| r.to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn konst(dom: &Domain, c: i64) -> Option<PLFunction> {
        Some(PLFunction::constant(dom, qi(c)))
    }

    #[test]
    fn young_examples() {
        let dom = Domain::Segment { length: qi(1) };
        let op = CyclicOperator { carrier: None, rank: 2, domain: dom.clone(), coeffs: vec![konst(&dom, 2), konst(&dom, 3)] };
        let fc = FieldConfig::zero();
        let ys = young_radii(&op, &fc, &q(1, 2), &q(-1, 2)).unwrap();
        assert_eq!(ys.iter().map(|y| y.log_r.clone().unwrap()).collect::<Vec<_>>(), vec![qi(-2), qi(-1)]);
        assert!(ys.iter().all(|y| y.valid));

        let op1 = CyclicOperator { carrier: None, rank: 1, domain: dom.clone(), coeffs: vec![konst(&dom, 5)] };
        let fc3 = FieldConfig::new(3).unwrap();
        let ys = young_radii(&op1, &fc3, &qi(0), &qi(-1)).unwrap();
        assert_eq!(ys[0].log_r, Some(q(-11, 2)));
        assert!(ys[0].valid);

        let op3 = CyclicOperator {
            carrier: None,
            rank: 3,
            domain: dom.clone(),
            coeffs: vec![konst(&dom, 1), konst(&dom, 4), konst(&dom, 4)],
        };
        let ys = young_radii(&op3, &fc3, &qi(0), &q(-1, 4)).unwrap();
        let w = fc3.log_omega();
        assert_eq!(
            ys.iter().map(|y| y.log_r.clone().unwrap()).collect::<Vec<_>>(),
            vec![&w - qi(2), &w - qi(2), w.clone()]
        );
        assert_eq!(ys.iter().map(|y| y.valid).collect::<Vec<_>>(), vec![true, true, false]);

        let trivial = CyclicOperator { carrier: None, rank: 2, domain: dom, coeffs: vec![None, None] };
        assert!(matches!(young_radii(&trivial, &fc, &qi(0), &qi(0)), Err(OperatorError::Refusal(_))));
    }

    #[test]
    fn young_profile_height_is_constant() {
        // log|f_1| breaks with slope change 2 at 1/2; log|f_2| = 3
        let dom = Domain::Segment { length: qi(1) };
        let f1 = PLFunction::segment(vec![(qi(0), q(11, 4)), (q(1, 2), q(9, 4)), (qi(1), q(11, 4))]).unwrap();
        let op = CyclicOperator { carrier: None, rank: 2, domain: dom.clone(), coeffs: vec![Some(f1.clone()), konst(&dom, 3)] };
        let sigma = PLFunction::constant(&dom, qi(0));
        let fs = young_profile(&op, &FieldConfig::zero(), &sigma).unwrap();
        let h = combine(&CombineOp::Sum, &fs).unwrap();
        assert!(h.is_constant());
        assert_eq!(h.value_at_start(), &qi(-3));
        assert_eq!(fs[0].breaks(), vec![q(1, 2)]);
        assert_eq!(fs[1].breaks(), vec![q(1, 2)]);
        for t in [q(1, 4), q(3, 4)] {
            let ys = young_radii(&op, &FieldConfig::zero(), &t, &sigma.eval(&t).unwrap()).unwrap();
            assert_eq!(ys[0].log_r.as_ref().unwrap(), &fs[0].eval(&t).unwrap());
            assert_eq!(ys[1].log_r.as_ref().unwrap(), &fs[1].eval(&t).unwrap());
        }
        // constant coefficients give constant radii
        let op = CyclicOperator { carrier: None, rank: 2, domain: dom.clone(), coeffs: vec![konst(&dom, 2), konst(&dom, 3)] };
        assert!(young_profile(&op, &FieldConfig::zero(), &sigma).unwrap().iter().all(|f| f.is_constant()));
        // too close to the threshold
        let near = PLFunction::constant(&dom, qi(-1));
        assert!(matches!(young_profile(&op, &FieldConfig::zero(), &near), Err(OperatorError::Refusal(_))));
    }

    #[test]
    fn hull_crossings_become_breakpoints() {
        // log|g_1| = t, log|g_2| = 3/2: the hull splits into two edges past t = 3/4
        let dom = Domain::Segment { length: qi(1) };
        let g1 = PLFunction::affine(&dom, qi(0), qi(1));
        let op = CyclicOperator {
            carrier: None,
            rank: 2,
            domain: dom.clone(),
            coeffs: vec![Some(g1), Some(PLFunction::constant(&dom, q(3, 2)))],
        };
        let sigma = PLFunction::constant(&dom, qi(0));
        let fs = young_profile(&op, &FieldConfig::new(2).unwrap(), &sigma).unwrap();
        assert_eq!(fs[0].breaks(), vec![q(3, 4)]);
        assert_eq!(fs[0].eval(&q(1, 4)).unwrap(), q(-7, 4));
        assert_eq!(fs[0].eval(&qi(1)).unwrap(), qi(-2));
        assert_eq!(fs[1].eval(&qi(1)).unwrap(), q(-3, 2));
    }

    #[test]
    fn frobenius() {
        assert_eq!(frobenius_height_slope(&qi(0), 1, 5).unwrap(), qi(-4));
        assert_eq!(frobenius_height_slope(&qi(3), 2, 3).unwrap(), qi(-1));
        assert_eq!(frobenius_height_slope(&qi(8), 2, 5).unwrap(), qi(0));
        assert!(frobenius_height_slope(&qi(0), 2, 0).is_err());

        let l = gen_index_ledger(0, 1, &FieldConfig::zero());
        assert_eq!(l.chi_gen_d0_nabla, 1);
        let l = gen_index_ledger(2, 2, &FieldConfig::new(3).unwrap());
        assert_eq!((l.chi_gen_d0_nabla, l.chi_gen_h_dagger), (4, -2));
        let pf = pushforward_ledger(&l).unwrap();
        assert_eq!((pf.chi_gen_d0 - l.chi_gen_d0, pf.chi_gen_dinf - l.chi_gen_dinf), (4, -4));
        assert_eq!(pf.chi_gen_d0 + pf.chi_gen_dinf, l.chi_gen_d0 + l.chi_gen_dinf);
        assert!(pf.consistent() && l.consistent());
        assert!(pushforward_ledger(&gen_index_ledger(1, 1, &FieldConfig::zero())).is_err());
    }

    #[test]
    fn taylor_trivial_and_exponential() {
        let triv = TaylorOperator { p: 3, coeffs: vec![vec![qi(1)], vec![]] };
        let e = taylor_radius_oracle(&triv, 200).unwrap();
        assert!(e.maximal);

        for p in [2u64, 3, 5] {
            let exp = TaylorOperator { p, coeffs: vec![vec![qi(1)], vec![qi(-1)]] };
            let e = taylor_radius_oracle(&exp, 1000).unwrap();
            let w = FieldConfig::new(p).unwrap().log_omega().to_f64();
            assert!((e.log_radius.unwrap().to_f64() - w).abs() <= e.band, "p = {p}");
        }
        let sing = TaylorOperator { p: 3, coeffs: vec![vec![qi(0), qi(1)], vec![qi(1)]] };
        assert!(matches!(taylor_radius_oracle(&sing, 10), Err(OperatorError::Inapplicable(_))));
    }

    #[test]
    fn taylor_matches_young_for_constant_coefficients() {
        // D² + f_1 D + f_2 over p = 3 with v(f_1) = −2, v(f_2) = −3: log|f_1| = 2, log|f_2| = 3
        let op = TaylorOperator { p: 3, coeffs: vec![vec![qi(1)], vec![q(2, 9)], vec![q(1, 27)]] };
        let e = taylor_radius_oracle(&op, 1000).unwrap();
        let young = FieldConfig::new(3).unwrap().log_omega() - qi(2);
        assert!((e.log_radius.unwrap().to_f64() - young.to_f64()).abs() <= e.band);
    }

    #[test]
    fn fast_valuation() {
        let n = BigInt::from(3u64).pow(50) * BigInt::from(7);
        assert_eq!(val_fast(&n, 3), 50);
        assert_eq!(val_fast(&BigInt::from(-12), 2), 2);
    }
}
