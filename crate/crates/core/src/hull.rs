//! Convex geometry of rotation-set estimates: hulls, supporting lines,
//! boundary classification, interior margins, Hausdorff distances, and
//! half-plane intersection.
//!
//! All predicates are tolerance-explicit. The three tolerances below are
//! stated once and used everywhere; data is O(1) in scale (displacement
//! averages), so absolute tolerances are appropriate.

use crate::error::{Error, Result};
use crate::geom::{LatticeVec, Vec2};
use serde::Serialize;

/// Cross-product tolerance for collinearity: points forming a turn with
/// |cross| ≤ τ are treated as collinear and the middle one is dropped.
pub const TOL_COLLINEAR: f64 = 1e-12;

/// Two vertices within this distance are duplicates.
pub const TOL_DUPLICATE: f64 = 1e-12;

/// Support slack: every polygon vertex must lie within τ of the inner side
/// of a supporting line, and on-edge tests use the same slack.
pub const TOL_SUPPORT: f64 = 1e-9;

/// Counter-clockwise convex polygon. Degenerate cases are allowed and
/// carry one vertex (a point) or two (a segment).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvexPolygon {
    vertices: Vec<Vec2>,
}

/// A supporting line at boundary point `omega`: direction `v`, unit outward
/// normal `v_perp`, with every polygon point on the non-positive side of
/// `v_perp` relative to `omega`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SupportLine {
    pub omega: Vec2,
    pub v: Vec2,
    pub v_perp: Vec2,
}

/// Classification of a query point against the polygon boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BoundaryClass {
    Vertex,
    EdgeInterior,
    NotBoundary,
}

impl ConvexPolygon {
    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_point(&self) -> bool {
        self.vertices.len() == 1
    }

    pub fn is_segment(&self) -> bool {
        self.vertices.len() == 2
    }

    /// Point or segment (no interior).
    pub fn is_degenerate(&self) -> bool {
        self.vertices.len() < 3
    }

    /// Shoelace area; 0 for degenerate polygons.
    pub fn area(&self) -> f64 {
        if self.is_degenerate() {
            return 0.0;
        }
        let n = self.vertices.len();
        let mut twice = 0.0;
        for i in 0..n {
            twice += self.vertices[i].cross(self.vertices[(i + 1) % n]);
        }
        twice / 2.0
    }

    /// Signed distance from `p` to the polygon with the inner side positive:
    /// the minimum over edges of the inward edge distance. Degenerate
    /// polygons have no interior, so the value is −distance to the carrier
    /// (0 exactly on it).
    pub fn signed_inner_distance(&self, p: Vec2) -> f64 {
        match self.vertices.len() {
            0 => f64::NEG_INFINITY,
            1 => -(p - self.vertices[0]).norm(),
            2 => -segment_distance(p, self.vertices[0], self.vertices[1]),
            n => {
                let mut best = f64::INFINITY;
                for i in 0..n {
                    let q0 = self.vertices[i];
                    let q1 = self.vertices[(i + 1) % n];
                    let edge = q1 - q0;
                    let inward = edge.perp(); // CCW ⇒ perp points inside
                    let len = inward.norm();
                    best = best.min((p - q0).dot(inward) / len);
                }
                best
            }
        }
    }

    /// Euclidean distance from `p` to the polygon as a set (0 inside).
    pub fn distance_to(&self, p: Vec2) -> f64 {
        match self.vertices.len() {
            0 => f64::INFINITY,
            1 => (p - self.vertices[0]).norm(),
            2 => segment_distance(p, self.vertices[0], self.vertices[1]),
            n => {
                let signed = self.signed_inner_distance(p);
                if signed >= 0.0 {
                    return 0.0;
                }
                let mut best = f64::INFINITY;
                for i in 0..n {
                    best = best.min(segment_distance(
                        p,
                        self.vertices[i],
                        self.vertices[(i + 1) % n],
                    ));
                }
                best
            }
        }
    }

    pub fn contains(&self, p: Vec2) -> bool {
        self.signed_inner_distance(p) >= -TOL_SUPPORT
    }
}

fn segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let denom = ab.norm_sq();
    if denom <= TOL_DUPLICATE * TOL_DUPLICATE {
        return (p - a).norm();
    }
    let t = ((p - a).dot(ab) / denom).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Minimal counter-clockwise convex hull of a point set (monotone chain).
/// Duplicate points within [`TOL_DUPLICATE`] collapse; collinear interior
/// points are dropped using the cross-product tolerance [`TOL_COLLINEAR`].
pub fn convex_hull(points: &[Vec2]) -> Result<ConvexPolygon> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("convex hull of an empty set".into()));
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidArgument(
            "convex hull input must be finite".into(),
        ));
    }
    let mut pts: Vec<Vec2> = points.to_vec();
    pts.sort_by(|a, b| (a.x, a.y).partial_cmp(&(b.x, b.y)).unwrap());
    pts.dedup_by(|a, b| (*a - *b).norm() <= TOL_DUPLICATE);
    if pts.len() == 1 {
        return Ok(ConvexPolygon { vertices: pts });
    }

    let mut lower: Vec<Vec2> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while lower.len() >= 2 {
            let a = lower[lower.len() - 2];
            let b = lower[lower.len() - 1];
            if (b - a).cross(p - a) <= TOL_COLLINEAR {
                lower.pop();
            } else {
                break;
            }
        }
        lower.push(p);
    }
    let mut upper: Vec<Vec2> = Vec::with_capacity(pts.len());
    for &p in pts.iter().rev() {
        while upper.len() >= 2 {
            let a = upper[upper.len() - 2];
            let b = upper[upper.len() - 1];
            if (b - a).cross(p - a) <= TOL_COLLINEAR {
                upper.pop();
            } else {
                break;
            }
        }
        upper.push(p);
    }
    // all input collinear ⇒ hull degenerates to the extreme segment
    if lower.len() == 2 && upper.len() == 2 {
        return Ok(ConvexPolygon { vertices: lower });
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    Ok(ConvexPolygon { vertices: lower })
}

/// Supporting line of `poly` with outward normal direction θ:
/// v⊥ = (cos θ, sin θ), ω = the vertex maximizing ⟨p, v⊥⟩, v = v⊥ rotated
/// by −π/2. Vertices whose support values agree within [`TOL_SUPPORT`]
/// count as tied, and ties resolve to the lexicographically smallest
/// vertex for determinism.
pub fn supporting_line(poly: &ConvexPolygon, theta: f64) -> SupportLine {
    assert!(!poly.is_empty(), "supporting line of an empty polygon");
    let v_perp = Vec2::new(theta.cos(), theta.sin());
    let v = Vec2::new(v_perp.y, -v_perp.x);
    let best = poly
        .vertices()
        .iter()
        .map(|p| p.dot(v_perp))
        .fold(f64::NEG_INFINITY, f64::max);
    let omega = poly
        .vertices()
        .iter()
        .copied()
        .filter(|p| p.dot(v_perp) >= best - TOL_SUPPORT)
        .reduce(|acc, p| if p.lex_le(acc) { p } else { acc })
        .unwrap();
    SupportLine { omega, v, v_perp }
}

/// Classify `p` against the polygon boundary: a vertex match within
/// [`TOL_DUPLICATE`], a point on an edge within [`TOL_SUPPORT`], or neither.
pub fn classify_boundary_point(poly: &ConvexPolygon, p: Vec2) -> BoundaryClass {
    for &v in poly.vertices() {
        if (p - v).norm() <= TOL_DUPLICATE {
            return BoundaryClass::Vertex;
        }
    }
    let n = poly.len();
    if n >= 2 {
        for i in 0..n {
            let a = poly.vertices()[i];
            let b = poly.vertices()[(i + 1) % n];
            if n == 2 && i == 1 {
                break; // a segment has one edge
            }
            if segment_distance(p, a, b) <= TOL_SUPPORT {
                return BoundaryClass::EdgeInterior;
            }
        }
    }
    BoundaryClass::NotBoundary
}

/// True iff `p` lies at signed inner distance ≥ `margin` from every edge.
/// At margin 0 the closed polygon counts its boundary; degenerate polygons
/// (no interior) are always false for margin > 0.
pub fn contains_with_margin(poly: &ConvexPolygon, p: Vec2, margin: f64) -> bool {
    debug_assert!(margin >= 0.0, "margin must be nonnegative");
    poly.signed_inner_distance(p) >= margin
}

/// Affine rescaling v ↦ q·v − t of every vertex. Convexity and orientation
/// are preserved for q ≥ 1.
pub fn scale_translate(poly: &ConvexPolygon, q: u32, t: LatticeVec) -> Result<ConvexPolygon> {
    if q < 1 {
        return Err(Error::InvalidArgument("scale factor q must be ≥ 1".into()));
    }
    let qf = q as f64;
    let tv = t.as_vec2();
    Ok(ConvexPolygon {
        vertices: poly.vertices.iter().map(|&v| v * qf - tv).collect(),
    })
}

/// Hausdorff distance between two convex polygons. For convex sets the
/// distance-to-the-other function is convex, so the supremum over each
/// boundary is attained at a vertex.
pub fn hausdorff_distance(p: &ConvexPolygon, q: &ConvexPolygon) -> f64 {
    let one = p
        .vertices()
        .iter()
        .map(|&v| q.distance_to(v))
        .fold(0.0f64, f64::max);
    let two = q
        .vertices()
        .iter()
        .map(|&v| p.distance_to(v))
        .fold(0.0f64, f64::max);
    one.max(two)
}

/// A closed half-plane ⟨p, normal⟩ ≤ offset with unit outward normal.
#[derive(Clone, Copy, Debug)]
pub struct HalfPlane {
    pub normal: Vec2,
    pub offset: f64,
}

/// Intersection of half-planes, clipped Sutherland–Hodgman style from a
/// bounding box large enough to contain any bounded result. Errors when the
/// intersection is empty (inconsistent supports) or unbounded (the normals
/// do not positively span the plane).
pub fn halfplane_intersection(planes: &[HalfPlane]) -> Result<ConvexPolygon> {
    if planes.is_empty() {
        return Err(Error::UnboundedIntersection("no half-planes given".into()));
    }
    for hp in planes {
        if (hp.normal.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(
                "half-plane normals must be unit length".into(),
            ));
        }
    }
    let bound = 10.0 * (1.0 + planes.iter().map(|h| h.offset.abs()).fold(0.0f64, f64::max));
    let mut poly: Vec<Vec2> = vec![
        Vec2::new(-bound, -bound),
        Vec2::new(bound, -bound),
        Vec2::new(bound, bound),
        Vec2::new(-bound, bound),
    ];
    for hp in planes {
        poly = clip(&poly, hp);
        if poly.is_empty() {
            return Err(Error::EmptyIntersection(
                "support values admit no common point".into(),
            ));
        }
    }
    if poly
        .iter()
        .any(|p| p.x.abs().max(p.y.abs()) >= bound * (1.0 - 1e-9))
    {
        return Err(Error::UnboundedIntersection(
            "directions do not bound the intersection".into(),
        ));
    }
    convex_hull(&poly)
}

/// Clip a convex polygon against one half-plane (keep side ≤ offset + slack).
fn clip(poly: &[Vec2], hp: &HalfPlane) -> Vec<Vec2> {
    let inside = |p: Vec2| p.dot(hp.normal) <= hp.offset + TOL_SUPPORT;
    let mut out = Vec::with_capacity(poly.len() + 1);
    let n = poly.len();
    for i in 0..n {
        let cur = poly[i];
        let nxt = poly[(i + 1) % n];
        let cur_in = inside(cur);
        let nxt_in = inside(nxt);
        if cur_in {
            out.push(cur);
        }
        if cur_in != nxt_in {
            let da = cur.dot(hp.normal) - hp.offset;
            let db = nxt.dot(hp.normal) - hp.offset;
            let t = da / (da - db);
            out.push(cur + (nxt - cur) * t);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> ConvexPolygon {
        convex_hull(&[
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
        ])
        .unwrap()
    }

    #[test]
    fn point_hull() {
        let h = convex_hull(&[Vec2::new(0.3, 0.4)]).unwrap();
        assert!(h.is_point());
        assert_eq!(h.vertices()[0], Vec2::new(0.3, 0.4));
    }

    #[test]
    fn interior_point_dropped() {
        let h = convex_hull(&[
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 1.0),
            Vec2::new(0.25, 0.25),
        ])
        .unwrap();
        assert_eq!(h.len(), 3);
        assert!(!h.vertices().contains(&Vec2::new(0.25, 0.25)));
    }

    #[test]
    fn collinear_input_gives_segment() {
        let h = convex_hull(&[
            Vec2::new(0.0, 0.0),
            Vec2::new(0.5, 0.5),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.25, 0.25),
        ])
        .unwrap();
        assert!(h.is_segment());
        assert_eq!(h.vertices()[0], Vec2::new(0.0, 0.0));
        assert_eq!(h.vertices()[1], Vec2::new(1.0, 1.0));
    }

    #[test]
    fn hull_is_ccw() {
        let h = square();
        assert!(h.area() > 0.0, "CCW hull has positive shoelace area");
        assert_eq!(h.area(), 1.0);
    }

    #[test]
    fn empty_input_errors() {
        assert!(convex_hull(&[]).is_err());
    }

    #[test]
    fn supporting_line_square_top() {
        let sl = supporting_line(&square(), std::f64::consts::FRAC_PI_2);
        assert!((sl.v_perp - Vec2::new(0.0, 1.0)).norm() < 1e-15);
        assert_eq!(sl.omega.y, 1.0);
        // all vertices on the non-positive side
        for &v in square().vertices() {
            assert!((v - sl.omega).dot(sl.v_perp) <= TOL_SUPPORT);
        }
    }

    #[test]
    fn supporting_line_point_polygon() {
        let p = convex_hull(&[Vec2::new(0.2, 0.9)]).unwrap();
        let sl = supporting_line(&p, 1.234);
        assert_eq!(sl.omega, Vec2::new(0.2, 0.9));
    }

    #[test]
    fn supporting_line_tie_lexicographic() {
        let tri = convex_hull(&[
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 1.0),
        ])
        .unwrap();
        let sl = supporting_line(&tri, std::f64::consts::FRAC_PI_4);
        // (1,0) and (0,1) tie on ⟨p, v⊥⟩; lexicographic smallest wins
        assert_eq!(sl.omega, Vec2::new(0.0, 1.0));
    }

    #[test]
    fn support_line_orthogonality() {
        let sl = supporting_line(&square(), 0.77);
        assert!(sl.v.dot(sl.v_perp).abs() <= 1e-12);
        assert!((sl.v.norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn classify_square_points() {
        let sq = square();
        assert_eq!(
            classify_boundary_point(&sq, Vec2::new(0.0, 0.0)),
            BoundaryClass::Vertex
        );
        assert_eq!(
            classify_boundary_point(&sq, Vec2::new(0.5, 0.0)),
            BoundaryClass::EdgeInterior
        );
        assert_eq!(
            classify_boundary_point(&sq, Vec2::new(0.5, 0.5)),
            BoundaryClass::NotBoundary
        );
    }

    #[test]
    fn margin_tests() {
        let sq = square();
        let c = Vec2::new(0.5, 0.5);
        assert!(contains_with_margin(&sq, c, 0.4));
        assert!(!contains_with_margin(&sq, c, 0.6));
        let tri = convex_hull(&[
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 1.0),
        ])
        .unwrap();
        assert!(contains_with_margin(&tri, Vec2::new(0.0, 0.0), 0.0));
    }

    #[test]
    fn degenerate_margin_always_false() {
        let seg = convex_hull(&[Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0)]).unwrap();
        assert!(!contains_with_margin(&seg, Vec2::new(0.5, 0.5), 0.1));
        assert!(contains_with_margin(&seg, Vec2::new(0.5, 0.5), 0.0));
    }

    #[test]
    fn scale_translate_identity() {
        let sq = square();
        let out = scale_translate(&sq, 1, LatticeVec::ZERO).unwrap();
        assert_eq!(out, sq);
    }

    #[test]
    fn scale_translate_rational_point_exact() {
        let p = convex_hull(&[Vec2::new(1.0 / 3.0, 2.0 / 3.0)]).unwrap();
        let out = scale_translate(&p, 30, LatticeVec::new(10, 20)).unwrap();
        assert_eq!(out.vertices()[0], Vec2::ZERO);
    }

    #[test]
    fn scale_translate_square() {
        let sq = square();
        let out = scale_translate(&sq, 2, LatticeVec::new(1, 1)).unwrap();
        assert_eq!(out.signed_inner_distance(Vec2::ZERO), 1.0);
        assert!(out.contains(Vec2::new(-1.0, -1.0)));
        assert!(out.contains(Vec2::new(1.0, 1.0)));
    }

    #[test]
    fn hausdorff_simple() {
        let sq = square();
        let grown = scale_translate(&sq, 2, LatticeVec::ZERO).unwrap();
        // [0,2]² vs [0,1]²: farthest point (2,2) at distance √2 from [0,1]²
        assert!((hausdorff_distance(&sq, &grown) - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(hausdorff_distance(&sq, &sq), 0.0);
    }

    #[test]
    fn distance_to_degenerate() {
        let pt = convex_hull(&[Vec2::new(1.0, 1.0)]).unwrap();
        assert!((pt.distance_to(Vec2::ZERO) - 2f64.sqrt()).abs() < 1e-15);
        let seg = convex_hull(&[Vec2::new(0.0, 0.0), Vec2::new(2.0, 0.0)]).unwrap();
        assert_eq!(seg.distance_to(Vec2::new(1.0, 1.0)), 1.0);
        assert_eq!(seg.distance_to(Vec2::new(1.0, 0.0)), 0.0);
    }

    #[test]
    fn halfplane_intersection_square() {
        let planes = [
            HalfPlane {
                normal: Vec2::new(1.0, 0.0),
                offset: 1.0,
            },
            HalfPlane {
                normal: Vec2::new(-1.0, 0.0),
                offset: 0.0,
            },
            HalfPlane {
                normal: Vec2::new(0.0, 1.0),
                offset: 1.0,
            },
            HalfPlane {
                normal: Vec2::new(0.0, -1.0),
                offset: 0.0,
            },
        ];
        let poly = halfplane_intersection(&planes).unwrap();
        assert_eq!(poly.len(), 4);
        assert!((poly.area() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn halfplane_intersection_collapses_to_point() {
        // 8 directions all supporting the single point (0.25, 0.75)
        let p = Vec2::new(0.25, 0.75);
        let planes: Vec<HalfPlane> = (0..8)
            .map(|k| {
                let th = k as f64 * std::f64::consts::TAU / 8.0;
                let normal = Vec2::new(th.cos(), th.sin());
                HalfPlane {
                    normal,
                    offset: p.dot(normal),
                }
            })
            .collect();
        let poly = halfplane_intersection(&planes).unwrap();
        assert!(
            poly.len() <= 2,
            "near-degenerate output, got {}",
            poly.len()
        );
        assert!(poly.distance_to(p) < 1e-6);
    }

    #[test]
    fn halfplane_intersection_empty_errors() {
        let planes = [
            HalfPlane {
                normal: Vec2::new(1.0, 0.0),
                offset: 0.0,
            },
            HalfPlane {
                normal: Vec2::new(-1.0, 0.0),
                offset: -1.0,
            },
        ];
        assert!(matches!(
            halfplane_intersection(&planes),
            Err(Error::EmptyIntersection(_))
        ));
    }

    #[test]
    fn halfplane_intersection_unbounded_errors() {
        let planes = [
            HalfPlane {
                normal: Vec2::new(1.0, 0.0),
                offset: 1.0,
            },
            HalfPlane {
                normal: Vec2::new(0.0, 1.0),
                offset: 1.0,
            },
        ];
        assert!(matches!(
            halfplane_intersection(&planes),
            Err(Error::UnboundedIntersection(_))
        ));
    }

    #[test]
    fn hull_idempotent() {
        let pts = [
            Vec2::new(0.1, 0.2),
            Vec2::new(0.9, 0.1),
            Vec2::new(0.7, 0.8),
            Vec2::new(0.2, 0.9),
            Vec2::new(0.5, 0.5),
        ];
        let h1 = convex_hull(&pts).unwrap();
        let h2 = convex_hull(h1.vertices()).unwrap();
        assert_eq!(h1, h2);
    }
}
