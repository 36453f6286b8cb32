//! SVG rendering of the radii along one carrier.
//!
//! Output is a pure function of the input: coordinates are scaled exactly
//! and printed with three decimals.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::plf::PLFunction;
use crate::radii::{Carrier, Equation, ProfileError};
use crate::rational::{qi, Rational};

const W: i64 = 640;
const H: i64 = 400;
const PAD: i64 = 48;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn find(eq: &Equation, id: &str) -> Option<Carrier> {
    eq.carriers().into_iter().find(|c| eq.carrier_id(*c) == id)
}

fn sample(f: &PLFunction, ts: &[Rational]) -> Vec<(Rational, Rational)> {
    ts.iter().map(|t| (t.clone(), f.eval(t).unwrap())).collect()
}

fn fmt(x: &Rational) -> String {
    format!("{:.3}", x.to_f64())
}

/// Plots `log R_i` for the chosen index (all when `None`) against the
/// position along `carrier`, with the solvability line dashed.
pub fn plot(eq: &Equation, carrier: &str, index: Option<usize>) -> Result<String, ProfileError> {
    let c = find(eq, carrier).ok_or_else(|| ProfileError::Argument(format!("unknown carrier {carrier}")))?;
    let indices: Vec<usize> = match index {
        Some(i) if i == 0 || i > eq.rank => {
            return Err(ProfileError::Argument(format!("index {i} outside 1..={}", eq.rank)))
        }
        Some(i) => vec![i],
        None => (1..=eq.rank).collect(),
    };
    let fs = eq.radii_on(c);
    let sigma = eq.sigma_on(c);
    let mut ts: BTreeSet<Rational> = sigma.breakpoints().into_iter().collect();
    for f in fs {
        ts.extend(f.breakpoints());
    }
    // rays are drawn one unit past their last break
    let end = match fs[0].length() {
        Some(l) => l.clone(),
        None => ts.iter().next_back().cloned().unwrap_or_else(Rational::zero) + qi(1),
    };
    ts.insert(end.clone());
    let ts: Vec<Rational> = ts.into_iter().collect();
    let lines: Vec<(usize, Vec<(Rational, Rational)>)> = indices.iter().map(|&i| (i, sample(&fs[i - 1], &ts))).collect();
    let sig = sample(sigma, &ts);
    let ys: Vec<&Rational> = lines.iter().flat_map(|(_, l)| l.iter().map(|p| &p.1)).chain(sig.iter().map(|p| &p.1)).collect();
    let mut lo = ys.iter().map(|y| (*y).clone()).min().unwrap();
    let mut hi = ys.iter().map(|y| (*y).clone()).max().unwrap();
    if lo == hi {
        lo -= qi(1);
        hi += qi(1);
    }
    let sx = Rational::int(W - 2 * PAD) / &end;
    let sy = Rational::int(H - 2 * PAD) / &(&hi - &lo);
    let px = |t: &Rational| &(t * &sx) + &qi(PAD);
    let py = |y: &Rational| &qi(H - PAD) - &(&(y - &lo) * &sy);
    let path = |pts: &[(Rational, Rational)]| {
        pts.iter().map(|(t, y)| format!("{},{}", fmt(&px(t)), fmt(&py(y)))).collect::<Vec<_>>().join(" ")
    };

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<title>log R along {carrier}</title>"#);
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{PAD},{PAD} L{PAD},{} L{},{}" fill="none" stroke="black" stroke-width="1"/>"#,
        H - PAD,
        W - PAD,
        H - PAD
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="12" text-anchor="end">log ρ</text>"#, W - PAD, H - PAD / 3);
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="12">log R</text>"#, PAD / 4, PAD / 2);
    let _ = writeln!(s, r#"<text x="{PAD}" y="{}" font-size="10" text-anchor="middle">0</text>"#, H - PAD + 14);
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="10" text-anchor="middle">{end}</text>"#, W - PAD, H - PAD + 14);
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="10" text-anchor="end">{hi}</text>"#, PAD - 4, PAD + 4);
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="10" text-anchor="end">{lo}</text>"#, PAD - 4, H - PAD + 4);
    let _ = writeln!(
        s,
        r#"<polyline class="solvability" points="{}" fill="none" stroke="gray" stroke-width="1.5" stroke-dasharray="6,4"/>"#,
        path(&sig)
    );
    for (i, pts) in &lines {
        let _ = writeln!(
            s,
            r#"<polyline class="radius" data-index="{i}" points="{}" fill="none" stroke="{}" stroke-width="2"/>"#,
            path(pts),
            COLORS[(i - 1) % COLORS.len()]
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::disk_example;
    use crate::operator::profile_from_operators;
    use crate::radii::{FieldConfig, MultiRadiusProfile};
    use crate::skeleton::{CurveSkeleton, Ray, Vertex};

    fn polylines(svg: &str) -> Vec<Vec<(f64, f64)>> {
        svg.lines()
            .filter(|l| l.contains("class=\"radius\""))
            .map(|l| {
                let pts = l.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
                pts.split(' ')
                    .map(|p| {
                        let (x, y) = p.split_once(',').unwrap();
                        (x.parse().unwrap(), y.parse().unwrap())
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn constant_profile_is_flat_and_filter_selects() {
        let sk = CurveSkeleton {
            vertices: vec![Vertex::s_point("a")],
            rays: vec![Ray::new("r", "a")],
            ..Default::default()
        };
        let p = MultiRadiusProfile::trivial(&sk, 3);
        let eq = Equation::new(&sk, &p).unwrap();
        let all = plot(&eq, "r", None).unwrap();
        let ls = polylines(&all);
        assert_eq!(ls.len(), 3);
        assert!(ls.iter().all(|l| l.iter().all(|p| p.1 == l[0].1)));
        assert_eq!(polylines(&plot(&eq, "r", Some(2)).unwrap()).len(), 1);
        assert!(all.contains("stroke-dasharray"));
        assert!(plot(&eq, "nope", None).is_err());
        assert!(plot(&eq, "r", Some(4)).is_err());
    }

    #[test]
    fn disk_example_mirrors_below_solvability() {
        let (sk, ops) = disk_example();
        let p = profile_from_operators(&sk, &ops, &FieldConfig::zero()).unwrap();
        let eq = Equation::new(&sk, &p).unwrap();
        let svg = plot(&eq, "b1b2", None).unwrap();
        assert_eq!(svg, plot(&eq, "b1b2", None).unwrap());
        let ls = polylines(&svg);
        // R_1 rises and R_2 falls by the same amount, so their sum is flat
        let sums: Vec<f64> = ls[0].iter().zip(&ls[1]).map(|(a, b)| a.1 + b.1).collect();
        assert!(sums.iter().all(|s| (s - sums[0]).abs() < 2e-3));
        assert!(ls[0].first().unwrap().1 != ls[0].last().unwrap().1);
    }
}
