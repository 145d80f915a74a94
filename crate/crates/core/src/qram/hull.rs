use super::MajorantPoint;

const COLLINEAR_RTOL: f64 = 1e-12;

/// Indices of the upper-left hull of `pts` given as `(resource, utility)`.
/// With `origin`, a virtual point at `(0, 0)` anchors the hull and is left out
/// of the result.
fn hull_indices(pts: &[(f64, f64)], origin: bool) -> Vec<usize> {
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| {
        pts[a]
            .0
            .total_cmp(&pts[b].0)
            .then(pts[b].1.total_cmp(&pts[a].1))
            .then(a.cmp(&b))
    });

    // Pareto filter: strictly increasing resource and utility.
    let mut front: Vec<Option<usize>> = Vec::new();
    let (mut best_u, mut last_g) = if origin { (0.0, 0.0) } else { (f64::NEG_INFINITY, f64::NEG_INFINITY) };
    if origin {
        front.push(None);
    }
    for i in order {
        let (g, u) = pts[i];
        if u > best_u && (g > last_g || front.is_empty()) {
            front.push(Some(i));
            best_u = u;
            last_g = g;
        }
    }

    let at = |p: Option<usize>| p.map_or((0.0, 0.0), |i| pts[i]);
    let mut hull: Vec<Option<usize>> = Vec::new();
    for p in front {
        while hull.len() >= 2 {
            let (a, b) = (at(hull[hull.len() - 2]), at(hull[hull.len() - 1]));
            let c = at(p);
            let (l, r) = ((b.0 - a.0) * (c.1 - a.1), (b.1 - a.1) * (c.0 - a.0));
            // b is not strictly above the chord a–c, up to rounding
            if l - r >= -COLLINEAR_RTOL * l.abs().max(r.abs()) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull.into_iter().flatten().collect()
}

fn select(points: &[MajorantPoint], origin: bool) -> Vec<MajorantPoint> {
    let pts: Vec<(f64, f64)> = points.iter().map(|p| (p.resource, p.utility)).collect();
    hull_indices(&pts, origin).into_iter().map(|i| points[i].clone()).collect()
}

/// Upper-left convex hull in the (resource, utility) plane: resource and
/// utility strictly increase and segment slopes strictly decrease. Interior
/// collinear points are dropped.
pub fn concave_majorant(points: &[MajorantPoint]) -> Vec<MajorantPoint> {
    select(points, false)
}

/// Hull of `points` together with the zero point `(0, 0)`, which is not
/// returned. The first returned point is the one with the best
/// utility-to-resource ratio.
pub fn concave_majorant_from_origin(points: &[MajorantPoint]) -> Vec<MajorantPoint> {
    select(points, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qram::IndexVector;
    use proptest::prelude::*;

    fn pts(v: &[(f64, f64)]) -> Vec<MajorantPoint> {
        v.iter()
            .enumerate()
            .map(|(i, &(g, u))| MajorantPoint {
                indices: IndexVector::new(vec![i as u16]),
                utility: u,
                resource: g,
                evals: 0,
            })
            .collect()
    }

    fn gu(h: &[MajorantPoint]) -> Vec<(f64, f64)> {
        h.iter().map(|p| (p.resource, p.utility)).collect()
    }

    #[test]
    fn middle_below_chord_is_removed() {
        let h = concave_majorant(&pts(&[(1.0, 0.1), (2.0, 0.15), (3.0, 0.9)]));
        assert_eq!(gu(&h), vec![(1.0, 0.1), (3.0, 0.9)]);
    }

    #[test]
    fn collinear_interior_is_dropped() {
        let h = concave_majorant(&pts(&[(1.0, 0.1), (2.0, 0.2), (3.0, 0.3)]));
        assert_eq!(gu(&h), vec![(1.0, 0.1), (3.0, 0.3)]);
    }

    #[test]
    fn dominated_points_are_dropped() {
        let h = concave_majorant(&pts(&[(1.0, 0.5), (2.0, 0.4), (1.0, 0.2), (3.0, 0.5), (4.0, 0.6)]));
        assert_eq!(gu(&h), vec![(1.0, 0.5), (4.0, 0.6)]);
    }

    #[test]
    fn origin_anchor_skips_poor_cheap_points() {
        let p = pts(&[(1.0, 0.05), (2.0, 0.4), (4.0, 0.5)]);
        assert_eq!(gu(&concave_majorant(&p)), vec![(1.0, 0.05), (2.0, 0.4), (4.0, 0.5)]);
        assert_eq!(gu(&concave_majorant_from_origin(&p)), vec![(2.0, 0.4), (4.0, 0.5)]);
        assert!(concave_majorant_from_origin(&pts(&[(1.0, 0.0)])).is_empty());
    }

    /// Cubic reference: a Pareto point is on the hull unless it lies on or
    /// below the chord of some pair of Pareto points around it.
    fn reference(v: &[(f64, f64)]) -> Vec<(f64, f64)> {
        let pareto: Vec<(f64, f64)> = v
            .iter()
            .copied()
            .filter(|&(g, u)| !v.iter().any(|&(g2, u2)| (g2 <= g && u2 > u) || (g2 < g && u2 >= u)))
            .collect();
        let mut uniq: Vec<(f64, f64)> = Vec::new();
        for p in pareto {
            if !uniq.contains(&p) {
                uniq.push(p);
            }
        }
        let mut out: Vec<(f64, f64)> = uniq
            .iter()
            .copied()
            .filter(|&(g, u)| {
                !uniq.iter().any(|&a| {
                    uniq.iter().any(|&b| {
                        // exact for integer-valued inputs
                        a.0 < g && g < b.0 && u * (b.0 - a.0) <= a.1 * (b.0 - a.0) + (b.1 - a.1) * (g - a.0)
                    })
                })
            })
            .collect();
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        out
    }

    proptest! {
        #[test]
        fn matches_cubic_reference(raw in prop::collection::vec((0u32..1000, 0u32..1000), 1..100)) {
            let v: Vec<(f64, f64)> = raw.iter().map(|&(g, u)| (1.0 + g as f64, u as f64)).collect();
            let h = concave_majorant(&pts(&v));
            prop_assert_eq!(gu(&h), reference(&v));
        }

        #[test]
        fn hull_is_sound(raw in prop::collection::vec((0.01f64..1.0, 0.0f64..1.0), 1..100)) {
            let p = pts(&raw);
            let h = concave_majorant(&p);
            prop_assert!(!h.is_empty());
            for w in h.windows(2) {
                prop_assert!(w[1].resource > w[0].resource && w[1].utility > w[0].utility);
            }
            for w in h.windows(3) {
                let s1 = (w[1].utility - w[0].utility) / (w[1].resource - w[0].resource);
                let s2 = (w[2].utility - w[1].utility) / (w[2].resource - w[1].resource);
                prop_assert!(s2 < s1);
            }
            for q in &h {
                prop_assert!(p.contains(q));
            }
            // no input lies strictly above a hull segment
            for x in &p {
                for w in h.windows(2) {
                    if w[0].resource <= x.resource && x.resource <= w[1].resource {
                        let t = (x.resource - w[0].resource) / (w[1].resource - w[0].resource);
                        let chord = w[0].utility + t * (w[1].utility - w[0].utility);
                        prop_assert!(x.utility <= chord + 1e-12);
                    }
                }
            }
        }
    }
}
