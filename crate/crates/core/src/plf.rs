//! Exact piecewise-linear functions of one rational parameter.
//!
//! A [`PLFunction`] lives either on a closed segment `[0, L]` or on a ray
//! `[0, ∞)`. Between breakpoints it is the affine interpolation of the stored
//! values; on a ray it continues past the last breakpoint with `tail_slope`.
//!
//! ```
//! use convindex::plf::{PLFunction, Direction};
//! use convindex::rational::{q, qi};
//!
//! let f = PLFunction::segment(vec![(qi(0), qi(0)), (qi(1), qi(2)), (qi(3), qi(0))]).unwrap();
//! assert_eq!(f.eval(&qi(2)).unwrap(), qi(1));
//! assert_eq!(f.slope(&qi(1), Direction::Forward).unwrap(), qi(-1));
//! assert_eq!(f.slope(&qi(1), Direction::Backward).unwrap(), qi(-2));
//! # let _ = q(1, 2);
//! ```

use serde::{Deserialize, Serialize};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlfError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("argument error: {0}")]
    Argument(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("malformed function: {0}")]
    Malformed(String),
}

/// Where a function is defined.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    Segment { length: Rational },
    Ray,
}

/// Which side of a point a one-sided slope is taken on.
///
/// `Backward` returns the slope of the germ pointing toward smaller
/// parameters, so it is the negative of the left derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PlfRepr", into = "PlfRepr")]
pub struct PLFunction {
    domain: Domain,
    points: Vec<(Rational, Rational)>,
    tail_slope: Rational,
}

#[derive(Serialize, Deserialize)]
struct PlfRepr {
    #[serde(flatten)]
    domain: Domain,
    points: Vec<(Rational, Rational)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail_slope: Option<Rational>,
}

impl TryFrom<PlfRepr> for PLFunction {
    type Error = PlfError;
    fn try_from(r: PlfRepr) -> Result<Self, PlfError> {
        match r.domain {
            Domain::Segment { length } => {
                if r.tail_slope.is_some() {
                    return Err(PlfError::Malformed("segments carry no tail slope".into()));
                }
                let f = PLFunction::segment(r.points)?;
                if f.length() != Some(&length) {
                    return Err(PlfError::Malformed(format!(
                        "last breakpoint does not match length {length}"
                    )));
                }
                Ok(f)
            }
            Domain::Ray => {
                let tail = r
                    .tail_slope
                    .ok_or_else(|| PlfError::Malformed("ray without tail_slope".into()))?;
                PLFunction::ray(r.points, tail)
            }
        }
    }
}

impl From<PLFunction> for PlfRepr {
    fn from(f: PLFunction) -> Self {
        let tail = match f.domain {
            Domain::Ray => Some(f.tail_slope),
            Domain::Segment { .. } => None,
        };
        PlfRepr { domain: f.domain, points: f.points, tail_slope: tail }
    }
}

fn check_points(points: &[(Rational, Rational)]) -> Result<(), PlfError> {
    if points.is_empty() {
        return Err(PlfError::Malformed("no breakpoints".into()));
    }
    if !points[0].0.is_zero() {
        return Err(PlfError::Malformed("first breakpoint must sit at 0".into()));
    }
    for w in points.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(PlfError::Malformed("breakpoints must strictly increase".into()));
        }
    }
    Ok(())
}

impl PLFunction {
    /// Segment `[0, L]` with `L` the last breakpoint parameter.
    pub fn segment(points: Vec<(Rational, Rational)>) -> Result<Self, PlfError> {
        check_points(&points)?;
        if points.len() < 2 {
            return Err(PlfError::Malformed("a segment needs positive length".into()));
        }
        let length = points.last().unwrap().0.clone();
        Ok(PLFunction { domain: Domain::Segment { length }, points, tail_slope: Rational::zero() })
    }

    pub fn ray(points: Vec<(Rational, Rational)>, tail_slope: Rational) -> Result<Self, PlfError> {
        check_points(&points)?;
        Ok(PLFunction { domain: Domain::Ray, points, tail_slope })
    }

    pub fn constant(domain: &Domain, c: Rational) -> Self {
        Self::affine(domain, c, Rational::zero())
    }

    /// `t ↦ v0 + slope·t` on the given domain.
    pub fn affine(domain: &Domain, v0: Rational, slope: Rational) -> Self {
        match domain {
            Domain::Segment { length } => {
                let v1 = &v0 + &slope * length;
                PLFunction {
                    domain: domain.clone(),
                    points: vec![(Rational::zero(), v0), (length.clone(), v1)],
                    tail_slope: Rational::zero(),
                }
            }
            Domain::Ray => PLFunction {
                domain: Domain::Ray,
                points: vec![(Rational::zero(), v0)],
                tail_slope: slope,
            },
        }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn length(&self) -> Option<&Rational> {
        match &self.domain {
            Domain::Segment { length } => Some(length),
            Domain::Ray => None,
        }
    }

    pub fn is_ray(&self) -> bool {
        matches!(self.domain, Domain::Ray)
    }

    pub fn points(&self) -> &[(Rational, Rational)] {
        &self.points
    }

    /// Tail slope on rays; zero on segments.
    pub fn tail_slope(&self) -> &Rational {
        &self.tail_slope
    }

    pub fn breakpoints(&self) -> Vec<Rational> {
        self.points.iter().map(|p| p.0.clone()).collect()
    }

    pub fn value_at_start(&self) -> &Rational {
        &self.points[0].1
    }

    /// Value at the far end of a segment.
    pub fn value_at_end(&self) -> Option<&Rational> {
        match self.domain {
            Domain::Segment { .. } => Some(&self.points.last().unwrap().1),
            Domain::Ray => None,
        }
    }

    pub fn contains(&self, t: &Rational) -> bool {
        if t.is_negative() {
            return false;
        }
        match &self.domain {
            Domain::Segment { length } => t <= length,
            Domain::Ray => true,
        }
    }

    pub fn eval(&self, t: &Rational) -> Result<Rational, PlfError> {
        if !self.contains(t) {
            return Err(PlfError::Domain(format!("t = {t} outside the domain")));
        }
        let pts = &self.points;
        let last = pts.last().unwrap();
        if t >= &last.0 {
            return Ok(&last.1 + &self.tail_slope * (t - &last.0));
        }
        // pts[k].0 <= t < pts[k+1].0
        let k = match pts.binary_search_by(|p| p.0.cmp(t)) {
            Ok(k) => return Ok(pts[k].1.clone()),
            Err(k) => k - 1,
        };
        let (t0, v0) = &pts[k];
        let (t1, v1) = &pts[k + 1];
        Ok(v0 + (v1 - v0) * (t - t0) / (t1 - t0))
    }

    /// Slope of the `k`-th piece `[t_k, t_{k+1}]`; the index one past the
    /// last breakpoint denotes the tail of a ray.
    fn piece_slope(&self, k: usize) -> Rational {
        if k + 1 >= self.points.len() {
            return self.tail_slope.clone();
        }
        let (t0, v0) = &self.points[k];
        let (t1, v1) = &self.points[k + 1];
        (v1 - v0) / (t1 - t0)
    }

    /// Slopes of all pieces in order, ending with the tail on rays.
    pub fn slopes(&self) -> Vec<Rational> {
        let n = self.points.len();
        let mut out: Vec<Rational> = (0..n.saturating_sub(1)).map(|k| self.piece_slope(k)).collect();
        if self.is_ray() {
            out.push(self.tail_slope.clone());
        }
        out
    }

    pub fn slope(&self, t: &Rational, dir: Direction) -> Result<Rational, PlfError> {
        if !self.contains(t) {
            return Err(PlfError::Domain(format!("t = {t} outside the domain")));
        }
        let pts = &self.points;
        match dir {
            Direction::Forward => {
                if let Domain::Segment { length } = &self.domain {
                    if t >= length {
                        return Err(PlfError::Domain("forward slope at the segment end".into()));
                    }
                }
                let k = match pts.binary_search_by(|p| p.0.cmp(t)) {
                    Ok(k) => k,
                    Err(k) => k - 1,
                };
                Ok(self.piece_slope(k))
            }
            Direction::Backward => {
                if t.is_zero() {
                    return Err(PlfError::Domain("backward slope at 0".into()));
                }
                // piece with t_k < t <= t_{k+1}
                let k = match pts.binary_search_by(|p| p.0.cmp(t)) {
                    Ok(k) => k - 1,
                    Err(k) => k - 1,
                };
                Ok(-self.piece_slope(k))
            }
        }
    }

    /// Outward slope at the start of the domain.
    pub fn start_slope(&self) -> Rational {
        self.piece_slope(0)
    }

    /// Outward slope at the far end of a segment (pointing back toward 0).
    pub fn end_slope(&self) -> Option<Rational> {
        match &self.domain {
            Domain::Segment { .. } => Some(-self.piece_slope(self.points.len() - 2)),
            Domain::Ray => None,
        }
    }

    pub fn is_affine(&self) -> bool {
        let s = self.slopes();
        s.windows(2).all(|w| w[0] == w[1])
    }

    pub fn is_constant(&self) -> bool {
        self.slopes().iter().all(|s| s.is_zero())
    }

    /// Same function with collinear interior breakpoints removed.
    pub fn simplified(&self) -> Self {
        let mut pts: Vec<(Rational, Rational)> = Vec::with_capacity(self.points.len());
        for p in &self.points {
            if pts.len() >= 2 {
                let (ta, va) = &pts[pts.len() - 2];
                let (tb, vb) = &pts[pts.len() - 1];
                let s1 = (vb - va) / (tb - ta);
                let s2 = (&p.1 - vb) / (&p.0 - tb);
                if s1 == s2 {
                    pts.pop();
                }
            }
            pts.push(p.clone());
        }
        if self.is_ray() && pts.len() >= 2 {
            let n = pts.len();
            let s = (&pts[n - 1].1 - &pts[n - 2].1) / (&pts[n - 1].0 - &pts[n - 2].0);
            if s == self.tail_slope {
                pts.pop();
            }
        }
        PLFunction { domain: self.domain.clone(), points: pts, tail_slope: self.tail_slope.clone() }
    }

    /// Pointwise equality as functions.
    pub fn same_function(&self, other: &PLFunction) -> bool {
        self.simplified() == other.simplified()
    }

    /// Value and slope sequence; [`PLFunction::from_slopes`] inverts it.
    pub fn to_slopes(&self) -> (Rational, Vec<(Rational, Rational)>) {
        let n = self.points.len();
        let mut pieces = Vec::new();
        for k in 0..n - 1 {
            pieces.push((&self.points[k + 1].0 - &self.points[k].0, self.piece_slope(k)));
        }
        (self.points[0].1.clone(), pieces)
    }

    /// Rebuild a segment or ray from a start value and `(width, slope)` pieces.
    pub fn from_slopes(
        v0: Rational,
        pieces: &[(Rational, Rational)],
        tail: Option<Rational>,
    ) -> Result<Self, PlfError> {
        let mut pts = vec![(Rational::zero(), v0)];
        for (w, s) in pieces {
            let (t, v) = pts.last().unwrap().clone();
            pts.push((&t + w, v + s * w));
        }
        match tail {
            Some(ts) => PLFunction::ray(pts, ts),
            None => PLFunction::segment(pts),
        }
    }

    /// Segment function read in the opposite direction, `t ↦ f(L − t)`.
    pub fn reversed(&self) -> Result<Self, PlfError> {
        let length = self
            .length()
            .ok_or_else(|| PlfError::Argument("only segments can be reversed".into()))?
            .clone();
        let pts = self.points.iter().rev().map(|(t, v)| (&length - t, v.clone())).collect();
        PLFunction::segment(pts)
    }

    /// Insert extra breakpoints (values are interpolated).
    pub fn refined(&self, ts: &[Rational]) -> Self {
        let mut all: Vec<Rational> = self.breakpoints();
        for t in ts {
            if self.contains(t) {
                all.push(t.clone());
            }
        }
        all.sort();
        all.dedup();
        let pts = all.into_iter().map(|t| {
            let v = self.eval(&t).unwrap();
            (t, v)
        });
        PLFunction { domain: self.domain.clone(), points: pts.collect(), tail_slope: self.tail_slope.clone() }
    }

    /// Restriction of the function to `[a, b]`, re-parametrised from 0.
    pub fn restrict(&self, a: &Rational, b: &Rational) -> Result<Self, PlfError> {
        if !(self.contains(a) && self.contains(b)) || a >= b {
            return Err(PlfError::Domain(format!("[{a}, {b}] is not a sub-interval")));
        }
        let mut pts = vec![(Rational::zero(), self.eval(a)?)];
        for (t, v) in &self.points {
            if t > a && t < b {
                pts.push((t - a, v.clone()));
            }
        }
        pts.push((b - a, self.eval(b)?));
        PLFunction::segment(pts)
    }

    /// Restriction to `[a, ∞)` of a ray, re-parametrised from 0.
    pub fn restrict_tail(&self, a: &Rational) -> Result<Self, PlfError> {
        if !self.is_ray() {
            return Err(PlfError::Argument("restrict_tail needs a ray".into()));
        }
        let mut pts = vec![(Rational::zero(), self.eval(a)?)];
        for (t, v) in &self.points {
            if t > a {
                pts.push((t - a, v.clone()));
            }
        }
        PLFunction::ray(pts, self.tail_slope.clone())
    }

    /// Breakpoints where the slope actually changes (excluding the domain ends).
    pub fn breaks(&self) -> Vec<Rational> {
        let s = self.simplified();
        let n = s.points.len();
        let upto = if s.is_ray() { n } else { n - 1 };
        (1..upto).map(|k| s.points[k].0.clone()).collect()
    }

    /// Largest value on a segment (minimum with `min = true`).
    pub fn extremum(&self, min: bool) -> Result<Rational, PlfError> {
        if self.is_ray() {
            let unbounded = if min { self.tail_slope.is_negative() } else { self.tail_slope.is_positive() };
            if unbounded {
                return Err(PlfError::Domain("unbounded on the ray".into()));
            }
        }
        let it = self.points.iter().map(|p| p.1.clone());
        Ok(if min { it.min().unwrap() } else { it.max().unwrap() })
    }
}

/// A pointwise operation for [`combine`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CombineOp {
    Min,
    Max,
    Sum,
    Scale(Rational),
    Shift(Rational),
}

fn union_breaks(a: &PLFunction, b: &PLFunction) -> Vec<Rational> {
    let mut ts = a.breakpoints();
    ts.extend(b.breakpoints());
    ts.sort();
    ts.dedup();
    ts
}

fn pair_sum(a: &PLFunction, b: &PLFunction) -> PLFunction {
    let ts = union_breaks(a, b);
    let pts = ts
        .into_iter()
        .map(|t| {
            let v = a.eval(&t).unwrap() + b.eval(&t).unwrap();
            (t, v)
        })
        .collect();
    PLFunction { domain: a.domain.clone(), points: pts, tail_slope: &a.tail_slope + &b.tail_slope }
}

fn pair_extreme(a: &PLFunction, b: &PLFunction, take_min: bool) -> PLFunction {
    let mut ts = union_breaks(a, b);
    let pick = |x: Rational, y: Rational| if take_min { x.min(y) } else { x.max(y) };
    // crossings strictly inside each interval
    let mut extra = Vec::new();
    for w in ts.windows(2) {
        let da = a.eval(&w[0]).unwrap() - b.eval(&w[0]).unwrap();
        let db = a.eval(&w[1]).unwrap() - b.eval(&w[1]).unwrap();
        if da.signum() * db.signum() < 0 {
            let t = &w[0] + (&w[1] - &w[0]) * &da / (&da - &db);
            extra.push(t);
        }
    }
    if a.is_ray() {
        let t_last = ts.last().unwrap().clone();
        let d0 = a.eval(&t_last).unwrap() - b.eval(&t_last).unwrap();
        let ds = &a.tail_slope - &b.tail_slope;
        if !ds.is_zero() {
            let t = &t_last - &d0 / &ds;
            if t > t_last {
                extra.push(t);
            }
        }
    }
    ts.extend(extra);
    ts.sort();
    ts.dedup();
    let pts: Vec<(Rational, Rational)> = ts
        .iter()
        .map(|t| (t.clone(), pick(a.eval(t).unwrap(), b.eval(t).unwrap())))
        .collect();
    let tail = if a.is_ray() {
        let t_last = &ts.last().unwrap().clone();
        let probe = t_last + Rational::one();
        let va = a.eval(&probe).unwrap();
        let vb = b.eval(&probe).unwrap();
        let a_wins = if take_min { va <= vb } else { va >= vb };
        if a_wins { a.tail_slope.clone() } else { b.tail_slope.clone() }
    } else {
        Rational::zero()
    };
    PLFunction { domain: a.domain.clone(), points: pts, tail_slope: tail }
}

/// Pointwise combination of functions sharing one domain.
///
/// Min and max insert every crossing at its exact rational parameter; the
/// result carries a minimal breakpoint set.
pub fn combine(op: &CombineOp, fs: &[PLFunction]) -> Result<PLFunction, PlfError> {
    let first = fs.first().ok_or_else(|| PlfError::Argument("empty function list".into()))?;
    if fs.iter().any(|f| f.domain != first.domain) {
        return Err(PlfError::Argument("functions live on different domains".into()));
    }
    let out = match op {
        CombineOp::Sum => fs[1..].iter().fold(first.clone(), |acc, f| pair_sum(&acc, f)),
        CombineOp::Min => fs[1..].iter().fold(first.clone(), |acc, f| pair_extreme(&acc, f, true)),
        CombineOp::Max => fs[1..].iter().fold(first.clone(), |acc, f| pair_extreme(&acc, f, false)),
        CombineOp::Scale(c) | CombineOp::Shift(c) => {
            if fs.len() != 1 {
                return Err(PlfError::Argument("scale and shift take exactly one function".into()));
            }
            let scale = matches!(op, CombineOp::Scale(_));
            let pts = first
                .points
                .iter()
                .map(|(t, v)| (t.clone(), if scale { v * c } else { v + c }))
                .collect();
            let tail = if scale { &first.tail_slope * c } else { first.tail_slope.clone() };
            PLFunction { domain: first.domain.clone(), points: pts, tail_slope: tail }
        }
    };
    Ok(out.simplified())
}

/// Sum of functions, `0` for an empty list on the given domain.
pub fn sum_on(domain: &Domain, fs: &[PLFunction]) -> PLFunction {
    if fs.is_empty() {
        return PLFunction::constant(domain, Rational::zero());
    }
    combine(&CombineOp::Sum, fs).expect("same domain")
}

/// One abscissa of a Newton polygon; `value = None` marks a zero coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HullPoint {
    pub index: u32,
    pub value: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HullPoints {
    pub points: Vec<HullPoint>,
}

impl HullPoints {
    pub fn new(points: Vec<(u32, Option<Rational>)>) -> Self {
        HullPoints { points: points.into_iter().map(|(index, value)| HullPoint { index, value }).collect() }
    }

    /// All indices present with the given values.
    pub fn dense(values: &[Rational]) -> Self {
        Self::new(values.iter().enumerate().map(|(j, v)| (j as u32, Some(v.clone()))).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HullSide {
    UpperConcave,
    LowerConvex,
}

/// Vertices of the requested hull as `(index, value)` pairs.
pub fn hull_vertices(pts: &HullPoints, side: HullSide) -> Result<Vec<(i64, Rational)>, PlfError> {
    let mut present: Vec<(i64, Rational)> = pts
        .points
        .iter()
        .filter_map(|p| p.value.clone().map(|v| (p.index as i64, v)))
        .collect();
    present.sort_by_key(|p| p.0);
    if present.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(PlfError::Argument("repeated hull index".into()));
    }
    if present.len() < 2 {
        return Err(PlfError::Degenerate("fewer than two present points".into()));
    }
    let mut hull: Vec<(i64, Rational)> = Vec::new();
    for p in present {
        while hull.len() >= 2 {
            let (i0, v0) = &hull[hull.len() - 2];
            let (i1, v1) = &hull[hull.len() - 1];
            // cross product sign of (p1 - p0) x (p - p0)
            let cross = (v1 - v0) * (p.0 - i0) - (&p.1 - v0) * (i1 - i0);
            let drop = match side {
                HullSide::UpperConcave => !cross.is_positive(),
                HullSide::LowerConvex => !cross.is_negative(),
            };
            if drop {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    Ok(hull)
}

/// Hull slopes read left to right, one per unit of index span.
pub fn newton_hull(pts: &HullPoints, side: HullSide) -> Result<Vec<Rational>, PlfError> {
    let hull = hull_vertices(pts, side)?;
    let mut out = Vec::new();
    for w in hull.windows(2) {
        let span = w[1].0 - w[0].0;
        let s = (&w[1].1 - &w[0].1) / Rational::int(span);
        for _ in 0..span {
            out.push(s.clone());
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Concavity {
    Concave,
    Convex,
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConcavityReport {
    pub verdict: Concavity,
    pub affine: bool,
}

/// Concavity read off the slope sequence; affine functions report concave.
pub fn plf_concavity_check(f: &PLFunction) -> ConcavityReport {
    let s = f.slopes();
    let nonincr = s.windows(2).all(|w| w[1] <= w[0]);
    let nondecr = s.windows(2).all(|w| w[1] >= w[0]);
    let verdict = if nonincr {
        Concavity::Concave
    } else if nondecr {
        Concavity::Convex
    } else {
        Concavity::Neither
    };
    ConcavityReport { verdict, affine: nonincr && nondecr }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn tent() -> PLFunction {
        PLFunction::segment(vec![(qi(0), qi(0)), (qi(1), qi(2)), (qi(3), qi(0))]).unwrap()
    }

    fn seg(pts: &[(i64, i64)]) -> PLFunction {
        PLFunction::segment(pts.iter().map(|&(t, v)| (qi(t), qi(v))).collect()).unwrap()
    }

    #[test]
    fn eval_examples() {
        let c = PLFunction::constant(&Domain::Segment { length: qi(4) }, qi(3));
        assert_eq!(c.eval(&q(7, 2)).unwrap(), qi(3));
        assert_eq!(tent().eval(&qi(2)).unwrap(), qi(1));
        let r = PLFunction::ray(vec![(qi(0), qi(0))], qi(-1)).unwrap();
        assert_eq!(r.eval(&qi(5)).unwrap(), qi(-5));
        assert!(matches!(tent().eval(&qi(4)), Err(PlfError::Domain(_))));
        assert!(matches!(r.eval(&qi(-1)), Err(PlfError::Domain(_))));
    }

    #[test]
    fn slope_examples() {
        let f = tent();
        assert_eq!(f.slope(&qi(1), Direction::Forward).unwrap(), qi(-1));
        assert_eq!(f.slope(&qi(1), Direction::Backward).unwrap(), qi(-2));
        let c = PLFunction::constant(&Domain::Ray, qi(5));
        assert_eq!(c.slope(&qi(3), Direction::Forward).unwrap(), qi(0));
        assert_eq!(c.slope(&qi(3), Direction::Backward).unwrap(), qi(0));
        assert!(f.slope(&qi(0), Direction::Backward).is_err());
        assert!(f.slope(&qi(3), Direction::Forward).is_err());
        assert_eq!(f.slope(&qi(3), Direction::Backward).unwrap(), qi(1));
    }

    #[test]
    fn combine_examples() {
        let a = seg(&[(0, 0), (1, 1)]);
        let b = seg(&[(0, 1), (1, 0)]);
        let s = combine(&CombineOp::Sum, &[a.clone(), b.clone()]).unwrap();
        assert_eq!(s, seg(&[(0, 1), (1, 1)]));
        let m = combine(&CombineOp::Min, &[a, b]).unwrap();
        assert_eq!(m.points(), &[(qi(0), qi(0)), (q(1, 2), q(1, 2)), (qi(1), qi(0))]);
        let sc = combine(&CombineOp::Scale(qi(2)), &[seg(&[(0, 0), (1, -3)])]).unwrap();
        assert_eq!(sc, seg(&[(0, 0), (1, -6)]));
        assert!(matches!(combine(&CombineOp::Sum, &[]), Err(PlfError::Argument(_))));
    }

    #[test]
    fn min_on_rays_finds_tail_crossing() {
        let a = PLFunction::ray(vec![(qi(0), qi(0))], qi(-1)).unwrap();
        let b = PLFunction::ray(vec![(qi(0), qi(-3))], qi(0)).unwrap();
        let m = combine(&CombineOp::Min, &[a.clone(), b.clone()]).unwrap();
        assert_eq!(m.points(), &[(qi(0), qi(-3)), (qi(3), qi(-3))]);
        assert_eq!(m.tail_slope(), &qi(-1));
        let mx = combine(&CombineOp::Max, &[a, b]).unwrap();
        assert_eq!(mx.points(), &[(qi(0), qi(0)), (qi(3), qi(-3))]);
        assert_eq!(mx.tail_slope(), &qi(0));
    }

    #[test]
    fn hull_examples() {
        let lc = HullSide::LowerConvex;
        let p = HullPoints::dense(&[qi(0), qi(-4)]);
        let p = HullPoints::new(vec![(0, Some(qi(0))), (2, p.points[1].value.clone())]);
        assert_eq!(newton_hull(&p, lc).unwrap(), vec![qi(-2), qi(-2)]);
        let p = HullPoints::dense(&[qi(0), qi(-3), qi(-4)]);
        assert_eq!(newton_hull(&p, lc).unwrap(), vec![qi(-3), qi(-1)]);
        let p = HullPoints::dense(&[qi(0), qi(2), qi(3)]);
        assert_eq!(newton_hull(&p, HullSide::UpperConcave).unwrap(), vec![qi(2), qi(1)]);
        let p = HullPoints::new(vec![(0, Some(qi(0))), (1, None)]);
        assert!(matches!(newton_hull(&p, lc), Err(PlfError::Degenerate(_))));
    }

    #[test]
    fn hull_skips_absent_points() {
        let p = HullPoints::new(vec![(0, Some(qi(0))), (1, None), (2, Some(qi(4)))]);
        assert_eq!(newton_hull(&p, HullSide::UpperConcave).unwrap(), vec![qi(2), qi(2)]);
    }

    #[test]
    fn concavity_examples() {
        assert_eq!(plf_concavity_check(&tent()).verdict, Concavity::Concave);
        let v = plf_concavity_check(&seg(&[(0, 0), (1, -1), (2, 1)]));
        assert_eq!(v.verdict, Concavity::Convex);
        let a = plf_concavity_check(&seg(&[(0, 0), (2, 4)]));
        assert_eq!(a, ConcavityReport { verdict: Concavity::Concave, affine: true });
    }

    #[test]
    fn json_shape() {
        let r = PLFunction::ray(vec![(qi(0), q(-1, 2))], qi(-1)).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"kind":"ray","points":[["0","-1/2"]],"tail_slope":"-1"}"#);
        let back: PLFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        let bad = r#"{"kind":"segment","length":"2","points":[["0","0"],["1","0"]]}"#;
        assert!(serde_json::from_str::<PLFunction>(bad).is_err());
    }

    #[test]
    fn reverse_and_restrict() {
        let f = tent();
        let g = f.reversed().unwrap();
        assert_eq!(g.eval(&qi(2)).unwrap(), qi(2));
        let h = f.restrict(&q(1, 2), &qi(2)).unwrap();
        assert_eq!(h.eval(&qi(0)).unwrap(), qi(1));
        assert_eq!(h.eval(&q(3, 2)).unwrap(), qi(1));
        assert_eq!(f.breaks(), vec![qi(1)]);
    }
}
