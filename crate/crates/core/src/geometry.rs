//! Planar polygon geometry: simple polygons with holes, point containment,
//! and quality triangulation (constrained Delaunay + Ruppert-style refinement).
//!
//! Coordinates are double-precision meters. Domains are treated as open sets:
//! points exactly on a boundary test as *outside*, which keeps rejection
//! sampling and grid masking unambiguous.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

/// Default minimum-angle constraint for refinement (radians), the classical
/// termination-safe bound for Ruppert-style algorithms.
pub const DEFAULT_MIN_ANGLE: f64 = 20.0 * std::f64::consts::PI / 180.0;

/// Vertex-insertion cap that converts non-terminating refinement into a
/// diagnosable error.
pub const REFINEMENT_VERTEX_CAP: usize = 10_000_000;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("degenerate triangle (area {area})")]
    DegenerateTriangle { area: f64 },
    #[error("refinement did not terminate within {cap} inserted vertices")]
    NonTerminatingRefinement { cap: usize },
}

/// 2-D point / vector, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the cross product `self × other`.
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    /// Counter-clockwise perpendicular: `(x, y) -> (-y, x)`.
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

impl Rect {
    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    fn from_points<'a>(points: impl Iterator<Item = &'a Point>) -> Rect {
        let mut min = Point::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        Rect { min, max }
    }
}

/// Simple closed polygon with counter-clockwise orientation.
///
/// Construction validates the boundary chain and normalizes orientation;
/// clockwise input is silently reversed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl TryFrom<Vec<[f64; 2]>> for Polygon {
    type Error = GeometryError;
    fn try_from(raw: Vec<[f64; 2]>) -> Result<Self, GeometryError> {
        Polygon::new(raw.into_iter().map(|[x, y]| Point::new(x, y)).collect())
    }
}

impl From<Polygon> for Vec<[f64; 2]> {
    fn from(p: Polygon) -> Self {
        p.vertices.iter().map(|v| [v.x, v.y]).collect()
    }
}

impl Polygon {
    pub fn new(mut vertices: Vec<Point>) -> Result<Self, GeometryError> {
        if vertices.len() < 3 {
            return Err(GeometryError::InvalidPolygon(format!(
                "need at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        for v in &vertices {
            if !v.is_finite() {
                return Err(GeometryError::InvalidPolygon("non-finite vertex".into()));
            }
        }
        let n = vertices.len();
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            if a == b {
                return Err(GeometryError::InvalidPolygon(format!(
                    "consecutive duplicate vertex at index {i}"
                )));
            }
        }
        let signed = signed_area(&vertices);
        if signed == 0.0 {
            return Err(GeometryError::InvalidPolygon("zero signed area".into()));
        }
        if signed < 0.0 {
            vertices.reverse();
        }
        let poly = Polygon { vertices };
        if !poly.is_simple() {
            return Err(GeometryError::InvalidPolygon(
                "boundary chain self-intersects".into(),
            ));
        }
        Ok(poly)
    }

    /// Convenience constructor from `(x, y)` pairs.
    pub fn from_coords(coords: &[(f64, f64)]) -> Result<Self, GeometryError> {
        Polygon::new(coords.iter().map(|&(x, y)| Point::new(x, y)).collect())
    }

    /// Axis-aligned rectangle `[x0, x1] x [y0, y1]` as a polygon.
    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self, GeometryError> {
        Polygon::from_coords(&[(x0, y0), (x1, y0), (x1, y1), (x0, y1)])
    }

    pub fn unit_square() -> Self {
        Polygon::rectangle(0.0, 0.0, 1.0, 1.0).expect("unit square is valid")
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn centroid(&self) -> Point {
        let mut cx = 0.0;
        let mut cy = 0.0;
        let mut a = 0.0;
        for (p, q) in self.edges() {
            let w = p.cross(q);
            cx += (p.x + q.x) * w;
            cy += (p.y + q.y) * w;
            a += w;
        }
        Point::new(cx / (3.0 * a), cy / (3.0 * a))
    }

    pub fn bounding_rect(&self) -> Rect {
        Rect::from_points(self.vertices.iter())
    }

    /// Even-odd ray-crossing containment. Boundary points report `false`.
    pub fn contains(&self, p: Point) -> bool {
        if self.on_boundary(p) {
            return false;
        }
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.y > p.y) != (b.y > p.y) {
                let t = (p.y - a.y) / (b.y - a.y);
                let x_cross = a.x + t * (b.x - a.x);
                if p.x < x_cross {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// True if `p` lies exactly on some boundary edge.
    pub fn on_boundary(&self, p: Point) -> bool {
        self.edges().any(|(a, b)| on_segment(a, b, p))
    }

    /// Minimum distance from `p` to the boundary chain.
    pub fn boundary_distance(&self, p: Point) -> f64 {
        self.edges()
            .map(|(a, b)| point_segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Smallest interior angle over all boundary vertices (radians).
    pub fn min_vertex_angle(&self) -> f64 {
        let n = self.vertices.len();
        let mut min = f64::INFINITY;
        for i in 0..n {
            let prev = self.vertices[(i + n - 1) % n];
            let v = self.vertices[i];
            let next = self.vertices[(i + 1) % n];
            let u = prev - v;
            let w = next - v;
            let mut angle = w.cross(u).atan2(w.dot(u));
            if angle < 0.0 {
                angle += 2.0 * std::f64::consts::PI;
            }
            min = min.min(angle);
        }
        min
    }

    /// Uniformly scale vertices toward `center`.
    pub fn scaled_about(&self, center: Point, factor: f64) -> Result<Polygon, GeometryError> {
        Polygon::new(
            self.vertices
                .iter()
                .map(|&v| center + (v - center) * factor)
                .collect(),
        )
    }

    fn is_simple(&self) -> bool {
        let n = self.vertices.len();
        for i in 0..n {
            let (a1, a2) = (self.vertices[i], self.vertices[(i + 1) % n]);
            for j in (i + 1)..n {
                // Skip edges sharing a vertex with edge i.
                if j == i || (j + 1) % n == i || j == (i + 1) % n {
                    continue;
                }
                let (b1, b2) = (self.vertices[j], self.vertices[(j + 1) % n]);
                if segments_intersect(a1, a2, b1, b2) {
                    return false;
                }
            }
        }
        true
    }
}

/// Open polygonal domain: outer boundary minus holes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonalDomain {
    pub outer: Polygon,
    #[serde(default)]
    pub holes: Vec<Polygon>,
}

impl PolygonalDomain {
    pub fn new(outer: Polygon, holes: Vec<Polygon>) -> Result<Self, GeometryError> {
        for (i, hole) in holes.iter().enumerate() {
            for &v in hole.vertices() {
                if !outer.contains(v) {
                    return Err(GeometryError::InvalidRegion(format!(
                        "hole {i} has a vertex outside the outer polygon"
                    )));
                }
            }
            if chains_intersect(hole, &outer) {
                return Err(GeometryError::InvalidRegion(format!(
                    "hole {i} boundary touches the outer boundary"
                )));
            }
            for (j, other) in holes.iter().enumerate().skip(i + 1) {
                if chains_intersect(hole, other)
                    || other.vertices().iter().any(|&v| hole.contains(v))
                    || hole.vertices().iter().any(|&v| other.contains(v))
                {
                    return Err(GeometryError::InvalidRegion(format!(
                        "holes {i} and {j} are not disjoint"
                    )));
                }
            }
        }
        let domain = PolygonalDomain { outer, holes };
        if domain.area() <= 0.0 {
            return Err(GeometryError::InvalidRegion(
                "holes exhaust the outer polygon area".into(),
            ));
        }
        Ok(domain)
    }

    pub fn from_polygon(outer: Polygon) -> Self {
        PolygonalDomain {
            outer,
            holes: Vec::new(),
        }
    }

    pub fn unit_square() -> Self {
        PolygonalDomain::from_polygon(Polygon::unit_square())
    }

    pub fn area(&self) -> f64 {
        self.outer.area() - self.holes.iter().map(Polygon::area).sum::<f64>()
    }

    /// Tight axis-aligned bounding rectangle of the outer polygon.
    pub fn bounding_rectangle(&self) -> Rect {
        self.outer.bounding_rect()
    }

    /// True iff `p` is inside the outer polygon and in no hole.
    /// Boundary points report `false` (the domain is open).
    pub fn contains(&self, p: Point) -> bool {
        self.outer.contains(p) && !self.holes.iter().any(|h| h.contains(p) || h.on_boundary(p))
    }

    /// Minimum distance from `p` to any boundary chain.
    pub fn boundary_distance(&self, p: Point) -> f64 {
        self.holes
            .iter()
            .map(|h| h.boundary_distance(p))
            .fold(self.outer.boundary_distance(p), f64::min)
    }

    /// Smallest boundary vertex angle over the outer chain and all holes.
    pub fn min_boundary_angle(&self) -> f64 {
        // Hole chains bound the domain from outside; their interior angles
        // relative to the domain are the reflex complements, which only
        // matter through the same vertex-angle bound.
        self.holes
            .iter()
            .map(Polygon::min_vertex_angle)
            .fold(self.outer.min_vertex_angle(), f64::min)
    }
}

/// Positively oriented triangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triangle {
    pub a: Point,
    pub b: Point,
    pub c: Point,
}

/// Per-triangle quantities entering the quadrature error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleMetrics {
    pub area: f64,
    pub diameter: f64,
    pub min_angle: f64,
}

impl Triangle {
    pub fn new(a: Point, b: Point, c: Point) -> Result<Self, GeometryError> {
        let area = 0.5 * (b - a).cross(c - a);
        if area == 0.0 || !area.is_finite() {
            return Err(GeometryError::DegenerateTriangle { area });
        }
        if area < 0.0 {
            Ok(Triangle { a, b: c, c: b })
        } else {
            Ok(Triangle { a, b, c })
        }
    }

    pub fn area(&self) -> f64 {
        0.5 * (self.b - self.a).cross(self.c - self.a)
    }

    pub fn centroid(&self) -> Point {
        Point::new(
            (self.a.x + self.b.x + self.c.x) / 3.0,
            (self.a.y + self.b.y + self.c.y) / 3.0,
        )
    }

    pub fn edge_lengths(&self) -> [f64; 3] {
        [
            self.a.dist(self.b),
            self.b.dist(self.c),
            self.c.dist(self.a),
        ]
    }

    /// Longest edge length.
    pub fn diameter(&self) -> f64 {
        let [ab, bc, ca] = self.edge_lengths();
        ab.max(bc).max(ca)
    }

    pub fn min_angle(&self) -> f64 {
        let [ab, bc, ca] = self.edge_lengths();
        // Law of sines: the smallest angle is opposite the shortest edge.
        let shortest = ab.min(bc).min(ca);
        let area = self.area();
        // area = (product of the two other edges) * sin(angle) / 2
        let other = ab * bc * ca / shortest;
        (2.0 * area / other).clamp(-1.0, 1.0).asin()
    }

    pub fn metrics(&self) -> Result<TriangleMetrics, GeometryError> {
        let area = self.area();
        if area <= 0.0 {
            return Err(GeometryError::DegenerateTriangle { area });
        }
        Ok(TriangleMetrics {
            area,
            diameter: self.diameter(),
            min_angle: self.min_angle(),
        })
    }

    pub fn contains(&self, p: Point) -> bool {
        let s1 = (self.b - self.a).cross(p - self.a);
        let s2 = (self.c - self.b).cross(p - self.b);
        let s3 = (self.a - self.c).cross(p - self.c);
        s1 > 0.0 && s2 > 0.0 && s3 > 0.0
    }
}

/// Quality triangulation of a polygonal region.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Triangulation {
    pub triangles: Vec<Triangle>,
    /// Minimum-angle constraint the triangulation was built with (radians).
    pub min_angle: f64,
    /// Maximum-area constraint the triangulation was built with.
    pub max_area: f64,
}

impl Triangulation {
    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn total_area(&self) -> f64 {
        self.triangles.iter().map(Triangle::area).sum()
    }
}

/// Triangulate `region` under minimum-angle and maximum-area constraints.
///
/// Constrained Delaunay triangulation of the boundary chains followed by
/// Ruppert-style refinement (encroached-segment splitting plus circumcenter
/// insertion for skinny or oversized triangles). Hole interiors are excluded
/// by winding number.
pub fn triangulate(
    region: &PolygonalDomain,
    max_area: f64,
    min_angle: f64,
) -> Result<Triangulation, GeometryError> {
    use spade::{AngleLimit, ConstrainedDelaunayTriangulation, RefinementParameters, Triangulation as _};

    if !(max_area > 0.0) {
        return Err(GeometryError::InvalidRegion(format!(
            "max_area must be positive, got {max_area}"
        )));
    }
    let min_angle_deg = min_angle.to_degrees();
    if !(0.0..=33.0).contains(&min_angle_deg) {
        return Err(GeometryError::InvalidRegion(format!(
            "min_angle {min_angle_deg:.2} deg outside the terminating range [0, 33]"
        )));
    }

    let mut cdt: ConstrainedDelaunayTriangulation<spade::Point2<f64>> =
        ConstrainedDelaunayTriangulation::new();
    let chains = std::iter::once(&region.outer).chain(region.holes.iter());
    for chain in chains {
        let verts: Vec<_> = chain
            .vertices()
            .iter()
            .map(|p| spade::Point2::new(p.x, p.y))
            .collect();
        cdt.add_constraint_edges(verts, true)
            .map_err(|e| GeometryError::InvalidRegion(format!("constraint insertion: {e:?}")))?;
    }

    let params = RefinementParameters::<f64>::new()
        .with_angle_limit(AngleLimit::from_deg(min_angle_deg))
        .with_max_allowed_area(max_area)
        .with_max_additional_vertices(REFINEMENT_VERTEX_CAP)
        .exclude_outer_faces(true);
    let result = cdt.refine(params);
    if !result.refinement_complete {
        return Err(GeometryError::NonTerminatingRefinement {
            cap: REFINEMENT_VERTEX_CAP,
        });
    }
    let excluded: HashSet<_> = result.excluded_faces.into_iter().collect();

    let mut triangles = Vec::with_capacity(cdt.num_inner_faces());
    for face in cdt.inner_faces() {
        if excluded.contains(&face.fix()) {
            continue;
        }
        let [a, b, c] = face.positions();
        triangles.push(Triangle::new(
            Point::new(a.x, a.y),
            Point::new(b.x, b.y),
            Point::new(c.x, c.y),
        )?);
    }

    let tri = Triangulation {
        triangles,
        min_angle,
        max_area,
    };
    let region_area = region.area();
    let defect = (tri.total_area() - region_area).abs() / region_area;
    if defect > 1e-9 {
        return Err(GeometryError::InvalidRegion(format!(
            "triangulated area differs from region area by relative {defect:.3e}"
        )));
    }
    Ok(tri)
}

/// Triangulate a single polygon (no holes).
pub fn triangulate_polygon(
    polygon: &Polygon,
    max_area: f64,
    min_angle: f64,
) -> Result<Triangulation, GeometryError> {
    triangulate(
        &PolygonalDomain::from_polygon(polygon.clone()),
        max_area,
        min_angle,
    )
}

fn signed_area(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    let mut acc = 0.0;
    for i in 0..n {
        acc += vertices[i].cross(vertices[(i + 1) % n]);
    }
    0.5 * acc
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    let d = b - a;
    let r = p - a;
    if d.cross(r) != 0.0 {
        return false;
    }
    let t = r.dot(d);
    t >= 0.0 && t <= d.norm_sq()
}

fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = b - a;
    let t = ((p - a).dot(d) / d.norm_sq()).clamp(0.0, 1.0);
    (p - (a + d * t)).norm()
}

/// Proper or improper intersection of segments `a1a2` and `b1b2`.
fn segments_intersect(a1: Point, a2: Point, b1: Point, b2: Point) -> bool {
    let d1 = (a2 - a1).cross(b1 - a1);
    let d2 = (a2 - a1).cross(b2 - a1);
    let d3 = (b2 - b1).cross(a1 - b1);
    let d4 = (b2 - b1).cross(a2 - b1);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(a1, a2, b1))
        || (d2 == 0.0 && on_segment(a1, a2, b2))
        || (d3 == 0.0 && on_segment(b1, b2, a1))
        || (d4 == 0.0 && on_segment(b1, b2, a2))
}

fn chains_intersect(a: &Polygon, b: &Polygon) -> bool {
    a.edges()
        .any(|(a1, a2)| b.edges().any(|(b1, b2)| segments_intersect(a1, a2, b1, b2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn l_shape() -> Polygon {
        // Unit square minus the top-right quarter.
        Polygon::from_coords(&[
            (0.0, 0.0),
            (1.0, 0.0),
            (1.0, 0.5),
            (0.5, 0.5),
            (0.5, 1.0),
            (0.0, 1.0),
        ])
        .unwrap()
    }

    fn square_with_hole() -> PolygonalDomain {
        PolygonalDomain::new(
            Polygon::unit_square(),
            vec![Polygon::rectangle(0.4, 0.4, 0.6, 0.6).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn polygon_rejects_degenerate_input() {
        assert!(Polygon::from_coords(&[(0.0, 0.0), (1.0, 0.0)]).is_err());
        assert!(Polygon::from_coords(&[(0.0, 0.0), (0.0, 0.0), (1.0, 1.0)]).is_err());
        assert!(Polygon::from_coords(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]).is_err());
        // Bow-tie self-intersection.
        assert!(
            Polygon::from_coords(&[(0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (0.0, 1.0)]).is_err()
        );
    }

    #[test]
    fn orientation_is_normalized() {
        let cw = Polygon::from_coords(&[(0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 0.0)]).unwrap();
        assert!(cw.area() > 0.0);
    }

    #[test]
    fn contains_unit_square() {
        let sq = PolygonalDomain::unit_square();
        assert!(sq.contains(Point::new(0.5, 0.5)));
        assert!(!sq.contains(Point::new(2.0, 0.0)));
        // Boundary points are outside (open domain convention).
        assert!(!sq.contains(Point::new(0.0, 0.5)));
        assert!(!sq.contains(Point::new(1.0, 1.0)));
    }

    #[test]
    fn contains_respects_holes() {
        let dom = square_with_hole();
        assert!(!dom.contains(Point::new(0.5, 0.5)));
        assert!(dom.contains(Point::new(0.2, 0.2)));
        assert_relative_eq!(dom.area(), 1.0 - 0.04, max_relative = 1e-12);
    }

    #[test]
    fn domain_rejects_bad_holes() {
        let outside = Polygon::rectangle(0.8, 0.8, 1.2, 1.2).unwrap();
        assert!(PolygonalDomain::new(Polygon::unit_square(), vec![outside]).is_err());
        let h1 = Polygon::rectangle(0.2, 0.2, 0.6, 0.6).unwrap();
        let h2 = Polygon::rectangle(0.4, 0.4, 0.8, 0.8).unwrap();
        assert!(PolygonalDomain::new(Polygon::unit_square(), vec![h1, h2]).is_err());
    }

    #[test]
    fn triangle_metrics_match_hand_values() {
        let t = Triangle::new(
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
        )
        .unwrap();
        let m = t.metrics().unwrap();
        assert_relative_eq!(m.area, 0.5);
        assert_relative_eq!(m.diameter, 2f64.sqrt());

        let t2 = Triangle::new(
            Point::new(0.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(0.0, 2.0),
        )
        .unwrap();
        assert_relative_eq!(t2.area(), 2.0);
        assert_relative_eq!(t2.diameter(), 2.0 * 2f64.sqrt());

        let h = 3f64.sqrt() / 2.0;
        let eq = Triangle::new(
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.5, h),
        )
        .unwrap();
        let m = eq.metrics().unwrap();
        assert_relative_eq!(m.area, 3f64.sqrt() / 4.0, max_relative = 1e-12);
        assert_relative_eq!(m.min_angle, std::f64::consts::PI / 3.0, max_relative = 1e-9);
    }

    #[test]
    fn triangle_metrics_satisfy_angle_area_bound() {
        // area >= c_alpha * diam^2 with c_alpha = sin(min_angle)/2 * min_edge/diam.
        let t = Triangle::new(
            Point::new(0.0, 0.0),
            Point::new(3.0, 0.2),
            Point::new(1.0, 1.7),
        )
        .unwrap();
        let m = t.metrics().unwrap();
        let [ab, bc, ca] = t.edge_lengths();
        let min_edge = ab.min(bc).min(ca);
        let c_alpha = m.min_angle.sin() / 2.0 * (min_edge / m.diameter);
        assert!(m.area >= c_alpha * m.diameter * m.diameter * (1.0 - 1e-12));
    }

    #[test]
    fn degenerate_triangle_is_rejected() {
        assert!(Triangle::new(
            Point::new(0.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(2.0, 2.0)
        )
        .is_err());
    }

    #[test]
    fn bounding_rectangle_examples() {
        let sq = PolygonalDomain::unit_square();
        let r = sq.bounding_rectangle();
        assert_eq!(r.min, Point::new(0.0, 0.0));
        assert_eq!(r.max, Point::new(1.0, 1.0));

        let tri = PolygonalDomain::from_polygon(
            Polygon::from_coords(&[(0.0, 0.0), (4.0, 0.0), (1.0, 3.0)]).unwrap(),
        );
        let r = tri.bounding_rectangle();
        assert_eq!(r.min, Point::new(0.0, 0.0));
        assert_eq!(r.max, Point::new(4.0, 3.0));

        // Holes do not affect the bounding rectangle.
        assert_eq!(square_with_hole().bounding_rectangle(), sq.bounding_rectangle());
    }

    #[test]
    fn triangulate_unit_square_conserves_area() {
        let sq = PolygonalDomain::unit_square();
        let tri = triangulate(&sq, 0.5, DEFAULT_MIN_ANGLE).unwrap();
        assert_relative_eq!(tri.total_area(), 1.0, max_relative = 1e-9);

        let fine = triangulate(&sq, 0.01, DEFAULT_MIN_ANGLE).unwrap();
        for t in &fine.triangles {
            assert!(t.area() <= 0.01 * (1.0 + 1e-12));
            assert!(t.min_angle() >= DEFAULT_MIN_ANGLE - 1e-9);
        }
        assert_relative_eq!(fine.total_area(), 1.0, max_relative = 1e-9);
    }

    #[test]
    fn triangulate_l_shape() {
        let dom = PolygonalDomain::from_polygon(l_shape());
        let tri = triangulate(&dom, 0.02, DEFAULT_MIN_ANGLE).unwrap();
        // Oracle: shoelace area of the input polygon.
        assert_relative_eq!(tri.total_area(), 0.75, max_relative = 1e-9);
        for t in &tri.triangles {
            assert!(t.min_angle() >= DEFAULT_MIN_ANGLE - 1e-9);
        }
    }

    #[test]
    fn triangulate_with_hole() {
        let dom = square_with_hole();
        let tri = triangulate(&dom, 0.01, DEFAULT_MIN_ANGLE).unwrap();
        assert_relative_eq!(tri.total_area(), dom.area(), max_relative = 1e-9);
        // No triangle centroid may fall in the hole.
        for t in &tri.triangles {
            assert!(dom.contains(t.centroid()));
        }
    }

    #[test]
    fn refinement_count_grows_linearly() {
        let sq = PolygonalDomain::unit_square();
        let base = triangulate(&sq, 0.02, DEFAULT_MIN_ANGLE).unwrap().len();
        for k in [2usize, 4, 8] {
            let refined = triangulate(&sq, 0.02 / k as f64, DEFAULT_MIN_ANGLE)
                .unwrap()
                .len();
            assert!(refined >= base);
            assert!(
                refined <= 4 * k * base,
                "k={k}: {refined} > 4*{k}*{base}"
            );
        }
    }

    #[test]
    fn contains_consistent_with_triangulation() {
        let dom = PolygonalDomain::from_polygon(l_shape());
        let tri = triangulate(&dom, 0.05, DEFAULT_MIN_ANGLE).unwrap();
        for t in &tri.triangles {
            assert!(dom.contains(t.centroid()));
        }
    }

    #[test]
    fn rejects_unsafe_min_angle() {
        let sq = PolygonalDomain::unit_square();
        assert!(triangulate(&sq, 0.1, 0.7).is_err()); // ~40 deg
        assert!(triangulate(&sq, -1.0, DEFAULT_MIN_ANGLE).is_err());
    }
}
