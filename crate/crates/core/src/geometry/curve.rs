use serde::{Deserialize, Serialize};

use super::orient2;
use crate::{Error, Result};

/// Closed simple planar polygon with counter-clockwise orientation.
///
/// The closing edge from the last point back to the first is implicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct Curve2D {
    points: Vec<[f64; 2]>,
}

impl Curve2D {
    /// Validates `points` into a curve.
    ///
    /// Consecutive duplicates (including a repeated closing point) are
    /// collapsed and clockwise input is reversed.
    pub fn new(points: Vec<[f64; 2]>) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(Error::Parse(format!("non-finite curve point {p:?}")));
        }
        let mut pts: Vec<[f64; 2]> = Vec::with_capacity(points.len());
        for p in points {
            if pts.last() != Some(&p) {
                pts.push(p);
            }
        }
        while pts.len() > 1 && pts.first() == pts.last() {
            pts.pop();
        }
        if pts.len() < 3 {
            return Err(Error::DegenerateCurve(format!(
                "{} distinct points, need at least 3",
                pts.len()
            )));
        }
        let (o, d) = (pts[0], [pts[1][0] - pts[0][0], pts[1][1] - pts[0][1]]);
        if pts.iter().all(|p| d[0] * (p[1] - o[1]) - d[1] * (p[0] - o[0]) == 0.0) {
            return Err(Error::DegenerateCurve("all points collinear".into()));
        }
        if let Some((a, b)) = find_self_intersection(&pts) {
            return Err(Error::SelfIntersecting(a, b));
        }
        let area = signed_area(&pts);
        if area == 0.0 {
            return Err(Error::DegenerateCurve("zero enclosed area".into()));
        }
        if area < 0.0 {
            pts.reverse();
        }
        Ok(Curve2D { points: pts })
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> [f64; 2] {
        self.points[i % self.points.len()]
    }

    /// Enclosed area (positive: the curve is CCW).
    pub fn area(&self) -> f64 {
        signed_area(&self.points)
    }

    /// Length of the segment from point `i` to point `i + 1` (mod m).
    pub fn segment_length(&self, i: usize) -> f64 {
        let a = self.point(i);
        let b = self.point(i + 1);
        (b[0] - a[0]).hypot(b[1] - a[1])
    }

    pub fn perimeter(&self) -> f64 {
        (0..self.len()).map(|i| self.segment_length(i)).sum()
    }

    /// Uniformly scaled copy.
    pub fn scaled(&self, s: f64) -> Curve2D {
        Curve2D {
            points: self.points.iter().map(|p| [p[0] * s, p[1] * s]).collect(),
        }
    }

    /// Cyclic relabeling so that point `k` becomes point 0.
    pub fn rotated(&self, k: usize) -> Curve2D {
        let mut points = self.points.clone();
        points.rotate_left(k % self.len());
        Curve2D { points }
    }

    /// Even-odd point-in-polygon test.
    pub fn contains(&self, q: [f64; 2]) -> bool {
        let mut inside = false;
        let m = self.len();
        for i in 0..m {
            let a = self.points[i];
            let b = self.points[(i + 1) % m];
            if (a[1] > q[1]) != (b[1] > q[1]) {
                let x = a[0] + (q[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
                if q[0] < x {
                    inside = !inside;
                }
            }
        }
        inside
    }
}

impl TryFrom<Vec<[f64; 2]>> for Curve2D {
    type Error = Error;

    fn try_from(points: Vec<[f64; 2]>) -> Result<Self> {
        Curve2D::new(points)
    }
}

impl From<Curve2D> for Vec<[f64; 2]> {
    fn from(c: Curve2D) -> Self {
        c.points
    }
}

fn signed_area(pts: &[[f64; 2]]) -> f64 {
    let m = pts.len();
    let twice: f64 = (0..m)
        .map(|i| {
            let a = pts[i];
            let b = pts[(i + 1) % m];
            a[0] * b[1] - b[0] * a[1]
        })
        .sum();
    0.5 * twice
}

fn on_segment(a: [f64; 2], b: [f64; 2], q: [f64; 2]) -> bool {
    q[0] >= a[0].min(b[0]) && q[0] <= a[0].max(b[0]) && q[1] >= a[1].min(b[1]) && q[1] <= a[1].max(b[1])
}

/// Closed-segment intersection test, including touching and collinear overlap.
pub(crate) fn segments_intersect(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> bool {
    let d1 = orient2(q1, q2, p1);
    let d2 = orient2(q1, q2, p2);
    let d3 = orient2(p1, p2, q1);
    let d4 = orient2(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

/// O(m²) brute force over segment pairs. Adjacent segments only conflict when
/// they fold back onto each other.
fn find_self_intersection(pts: &[[f64; 2]]) -> Option<(usize, usize)> {
    let m = pts.len();
    for i in 0..m {
        let (a, b) = (pts[i], pts[(i + 1) % m]);
        for j in (i + 1)..m {
            let (c, d) = (pts[j], pts[(j + 1) % m]);
            let adjacent_after = j == i + 1;
            let adjacent_before = (j + 1) % m == i;
            if adjacent_after || adjacent_before {
                // Shared vertex: b == c (after) or d == a (before).
                let (shared, u, v) = if adjacent_after { (b, a, d) } else { (a, b, c) };
                if orient2(u, shared, v) == 0.0 {
                    let du = [u[0] - shared[0], u[1] - shared[1]];
                    let dv = [v[0] - shared[0], v[1] - shared[1]];
                    if du[0] * dv[0] + du[1] * dv[1] > 0.0 {
                        return Some((i, j));
                    }
                }
                continue;
            }
            if segments_intersect(a, b, c, d) {
                return Some((i, j));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<[f64; 2]> {
        vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]
    }

    #[test]
    fn ccw_square_is_kept() {
        let c = Curve2D::new(square()).unwrap();
        assert_eq!(c.len(), 4);
        assert_eq!(c.points(), square().as_slice());
        assert_eq!(c.area(), 1.0);
    }

    #[test]
    fn cw_square_is_reversed() {
        let mut cw = square();
        cw.reverse();
        let c = Curve2D::new(cw.clone()).unwrap();
        assert!(c.area() > 0.0);
        let mut expected = cw;
        expected.reverse();
        assert_eq!(c.points(), expected.as_slice());
    }

    #[test]
    fn duplicates_collapse() {
        let pts = vec![
            [0.0, 0.0],
            [0.0, 0.0],
            [1.0, 0.0],
            [1.0, 1.0],
            [1.0, 1.0],
            [0.0, 1.0],
            [0.0, 0.0],
        ];
        assert_eq!(Curve2D::new(pts).unwrap().len(), 4);
    }

    #[test]
    fn too_few_points() {
        let err = Curve2D::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]]).unwrap_err();
        assert!(matches!(err, Error::DegenerateCurve(_)));
    }

    #[test]
    fn collinear_is_degenerate() {
        let err = Curve2D::new(vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]).unwrap_err();
        assert!(matches!(err, Error::DegenerateCurve(_)));
    }

    /// Brute-force oracle: does any pair of non-adjacent closed segments share a point?
    fn crosses_by_sampling(pts: &[[f64; 2]]) -> bool {
        let m = pts.len();
        for i in 0..m {
            for j in (i + 2)..m {
                if (j + 1) % m == i {
                    continue;
                }
                let (a, b) = (pts[i], pts[(i + 1) % m]);
                let (c, d) = (pts[j], pts[(j + 1) % m]);
                // Solve a + s(b-a) = c + t(d-c).
                let r = [b[0] - a[0], b[1] - a[1]];
                let q = [d[0] - c[0], d[1] - c[1]];
                let den = r[0] * q[1] - r[1] * q[0];
                if den != 0.0 {
                    let w = [c[0] - a[0], c[1] - a[1]];
                    let s = (w[0] * q[1] - w[1] * q[0]) / den;
                    let t = (w[0] * r[1] - w[1] * r[0]) / den;
                    if (0.0..=1.0).contains(&s) && (0.0..=1.0).contains(&t) {
                        return true;
                    }
                }
            }
        }
        false
    }

    #[test]
    fn figure_eight_is_rejected() {
        let eight = vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]];
        assert!(crosses_by_sampling(&eight));
        let err = Curve2D::new(eight).unwrap_err();
        assert!(matches!(err, Error::SelfIntersecting(_, _)));
    }

    #[test]
    fn folded_spike_is_rejected() {
        let pts = vec![[0.0, 0.0], [2.0, 0.0], [1.0, 0.0], [1.0, 1.0]];
        assert!(Curve2D::new(pts).is_err());
    }

    #[test]
    fn contains_and_rotation() {
        let c = Curve2D::new(square()).unwrap();
        assert!(c.contains([0.5, 0.5]));
        assert!(!c.contains([1.5, 0.5]));
        let r = c.rotated(1);
        assert_eq!(r.points()[0], [1.0, 0.0]);
        assert_eq!(r.area(), c.area());
        assert_eq!(c.perimeter(), 4.0);
    }
}
