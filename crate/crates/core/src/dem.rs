//! Floe-snapshot ingestion and piecewise field construction: per-floe mass
//! density, rigid-body velocity, and symmetrized contact-stress resultants,
//! plus a seeded synthetic floe generator for desk-scale tests.
//!
//! Snapshot files are JSON Lines: a units header line followed by one
//! snapshot object per line (schema in [`load_snapshots`]). Round-trips are
//! bit-exact.

use crate::geometry::{GeometryError, Point, Polygon, PolygonalDomain};
use crate::operators::{Components, OperatorError, PiecewiseField};
use crate::quadrature::{QuadratureError, QuadratureRule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DemError {
    #[error("snapshot schema error at line {line}: {message}")]
    Schema { line: usize, message: String },
    #[error("floe {floe} at line {line}: {message}")]
    InvariantViolation {
        line: usize,
        floe: usize,
        message: String,
    },
    #[error("snapshot i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Contact points may sit this fraction of the floe diameter away from the
/// polygon boundary (contact resolution and shrinking both displace them).
pub const CONTACT_BOUNDARY_TOL_REL: f64 = 0.1;

/// One boundary contact: application point (m) and force (N).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contact {
    pub point: Point,
    pub force: Point,
}

/// A rigid polygonal ice floe.
#[derive(Debug, Clone, PartialEq)]
pub struct Floe {
    pub polygon: Polygon,
    /// Ice thickness (m), strictly positive.
    pub thickness: f64,
    /// Center of mass (m); consistency-checked against the area centroid.
    pub center_of_mass: Point,
    /// Center-of-mass velocity (m/s).
    pub com_velocity: Point,
    /// Angular velocity (rad/s), positive counter-clockwise.
    pub angular_velocity: f64,
    pub contacts: Vec<Contact>,
}

impl Floe {
    pub fn new(
        polygon: Polygon,
        thickness: f64,
        center_of_mass: Point,
        com_velocity: Point,
        angular_velocity: f64,
        contacts: Vec<Contact>,
    ) -> Result<Self, String> {
        if !(thickness > 0.0 && thickness.is_finite()) {
            return Err(format!("thickness must be positive, got {thickness}"));
        }
        let diameter = {
            let r = polygon.bounding_rect();
            r.width().hypot(r.height())
        };
        for (i, c) in contacts.iter().enumerate() {
            let dist = polygon.boundary_distance(c.point);
            if dist > CONTACT_BOUNDARY_TOL_REL * diameter {
                return Err(format!(
                    "contact {i} at ({}, {}) is {dist:.3e} m from the boundary \
                     (tolerance {:.3e})",
                    c.point.x,
                    c.point.y,
                    CONTACT_BOUNDARY_TOL_REL * diameter
                ));
            }
        }
        let centroid = polygon.centroid();
        if (center_of_mass - centroid).norm() > 0.01 * diameter {
            log::warn!(
                "floe center of mass ({}, {}) deviates from the area centroid ({}, {}) \
                 by more than 1% of the diameter",
                center_of_mass.x,
                center_of_mass.y,
                centroid.x,
                centroid.y
            );
        }
        Ok(Floe {
            polygon,
            thickness,
            center_of_mass,
            com_velocity,
            angular_velocity,
            contacts,
        })
    }

    /// Rigid-body velocity at a point: `u + omega * perp(y - xi)`.
    pub fn velocity_at(&self, y: Point) -> Point {
        self.com_velocity + (y - self.center_of_mass).perp() * self.angular_velocity
    }

    /// Symmetrized contact-stress resultant `sum_i (r_i f_i^T + f_i r_i^T)`
    /// with `r_i` the contact point relative to the center of mass; stored
    /// as `(s11, s12, s22)` (N/m scale; symmetric by construction).
    pub fn stress_resultant(&self) -> [f64; 3] {
        let mut s = [0.0; 3];
        for c in &self.contacts {
            let r = c.point - self.center_of_mass;
            s[0] += 2.0 * r.x * c.force.x;
            s[1] += r.x * c.force.y + r.y * c.force.x;
            s[2] += 2.0 * r.y * c.force.y;
        }
        s
    }
}

/// One DEM time slice.
#[derive(Debug, Clone, PartialEq)]
pub struct FloeSnapshot {
    /// Time (s).
    pub time: f64,
    pub floes: Vec<Floe>,
}

impl FloeSnapshot {
    /// Warn (and count) floes whose vertices leave the domain closure;
    /// small excursions from contact resolution are expected upstream.
    pub fn warn_floes_outside(&self, domain: &PolygonalDomain) -> usize {
        let mut outside = 0;
        for (i, floe) in self.floes.iter().enumerate() {
            let escaped = floe.polygon.vertices().iter().any(|&v| {
                !domain.contains(v) && domain.outer.boundary_distance(v) > 1e-9
            });
            if escaped {
                log::warn!("floe {i} extends outside the domain closure");
                outside += 1;
            }
        }
        outside
    }

    /// Sum of all contact forces over all floes (third-law residual).
    /// Net contact force over all floes, with compensated (Neumaier)
    /// summation so pairwise-cancelling forces of large magnitude do not
    /// leave spurious rounding residue.
    pub fn total_contact_force(&self) -> Point {
        let mut sum = [0.0f64; 2];
        let mut comp = [0.0f64; 2];
        for floe in &self.floes {
            for c in &floe.contacts {
                for (k, v) in [c.force.x, c.force.y].into_iter().enumerate() {
                    let t = sum[k] + v;
                    comp[k] += if sum[k].abs() >= v.abs() {
                        (sum[k] - t) + v
                    } else {
                        (v - t) + sum[k]
                    };
                    sum[k] = t;
                }
            }
        }
        Point::new(sum[0] + comp[0], sum[1] + comp[1])
    }
}

/// How to build the per-floe quadrature backing each field piece.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldQuadrature {
    Triangulation { max_area: f64, min_angle: f64 },
    MonteCarlo { nodes: usize, seed: u64 },
}

impl FieldQuadrature {
    fn rule_for(&self, polygon: &Polygon, floe_index: usize) -> Result<QuadratureRule, DemError> {
        match *self {
            FieldQuadrature::Triangulation {
                max_area,
                min_angle,
            } => {
                let t = crate::geometry::triangulate_polygon(polygon, max_area, min_angle)?;
                Ok(QuadratureRule::from_triangulation(&t))
            }
            FieldQuadrature::MonteCarlo { nodes, seed } => {
                let region = PolygonalDomain::new(polygon.clone(), Vec::new())?;
                Ok(QuadratureRule::monte_carlo(
                    &region,
                    nodes,
                    seed.wrapping_add(floe_index as u64),
                )?)
            }
        }
    }
}

/// Mass density field (kg/m^2): one constant piece `rho * a` per floe.
pub fn mass_density_field(
    snapshot: &FloeSnapshot,
    rho_ice: f64,
    quadrature: &FieldQuadrature,
) -> Result<PiecewiseField, DemError> {
    assert!(rho_ice > 0.0, "ice density must be positive");
    let mut field = PiecewiseField::new(1);
    for (i, floe) in snapshot.floes.iter().enumerate() {
        let rule = quadrature.rule_for(&floe.polygon, i)?;
        field.add_constant_piece(floe.polygon.clone(), rule, &[rho_ice * floe.thickness])?;
    }
    Ok(field)
}

/// Rigid-body velocity field (m/s, 2 components) sampled per floe.
pub fn velocity_field(
    snapshot: &FloeSnapshot,
    quadrature: &FieldQuadrature,
) -> Result<PiecewiseField, DemError> {
    let mut field = PiecewiseField::new(2);
    for (i, floe) in snapshot.floes.iter().enumerate() {
        let rule = quadrature.rule_for(&floe.polygon, i)?;
        field.add_sampled_piece(floe.polygon.clone(), rule, |y| {
            let v = floe.velocity_at(y);
            Components::from_slice(&[v.x, v.y])
        })?;
    }
    Ok(field)
}

/// Contact-stress resultant field (N/m, stored `(s11, s12, s22)`), constant
/// per floe. `normalize_by_area` divides each floe's resultant by its
/// polygon area (off by default; the resultant itself is the reference
/// definition).
pub fn stress_field(
    snapshot: &FloeSnapshot,
    quadrature: &FieldQuadrature,
    normalize_by_area: bool,
) -> Result<PiecewiseField, DemError> {
    let mut field = PiecewiseField::new(3);
    for (i, floe) in snapshot.floes.iter().enumerate() {
        let rule = quadrature.rule_for(&floe.polygon, i)?;
        let mut s = floe.stress_resultant();
        if normalize_by_area {
            let area = floe.polygon.area();
            for v in &mut s {
                *v /= area;
            }
        }
        field.add_constant_piece(floe.polygon.clone(), rule, &s)?;
    }
    Ok(field)
}

// ---------------------------------------------------------------------------
// JSON Lines snapshot files
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct UnitsHeader {
    units: Units,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Units {
    length: String,
    time: String,
    mass: String,
    force: String,
}

fn expected_units() -> Units {
    Units {
        length: "m".into(),
        time: "s".into(),
        mass: "kg".into(),
        force: "N".into(),
    }
}

#[derive(Serialize, Deserialize)]
struct SnapshotDto {
    t: f64,
    floes: Vec<FloeDto>,
}

#[derive(Serialize, Deserialize)]
struct FloeDto {
    poly: Vec<[f64; 2]>,
    a: f64,
    xi: [f64; 2],
    u: [f64; 2],
    omega: f64,
    #[serde(default)]
    contacts: Vec<ContactDto>,
}

#[derive(Serialize, Deserialize)]
struct ContactDto {
    z: [f64; 2],
    f: [f64; 2],
}

fn floe_from_dto(dto: FloeDto, line: usize, index: usize) -> Result<Floe, DemError> {
    let polygon = Polygon::new(dto.poly.iter().map(|&[x, y]| Point::new(x, y)).collect())
        .map_err(|e| DemError::Schema {
            line,
            message: format!("floe {index} field `poly`: {e}"),
        })?;
    let contacts = dto
        .contacts
        .iter()
        .map(|c| Contact {
            point: Point::new(c.z[0], c.z[1]),
            force: Point::new(c.f[0], c.f[1]),
        })
        .collect();
    Floe::new(
        polygon,
        dto.a,
        Point::new(dto.xi[0], dto.xi[1]),
        Point::new(dto.u[0], dto.u[1]),
        dto.omega,
        contacts,
    )
    .map_err(|message| DemError::InvariantViolation {
        line,
        floe: index,
        message,
    })
}

fn floe_to_dto(floe: &Floe) -> FloeDto {
    FloeDto {
        poly: floe
            .polygon
            .vertices()
            .iter()
            .map(|v| [v.x, v.y])
            .collect(),
        a: floe.thickness,
        xi: [floe.center_of_mass.x, floe.center_of_mass.y],
        u: [floe.com_velocity.x, floe.com_velocity.y],
        omega: floe.angular_velocity,
        contacts: floe
            .contacts
            .iter()
            .map(|c| ContactDto {
                z: [c.point.x, c.point.y],
                f: [c.force.x, c.force.y],
            })
            .collect(),
    }
}

/// Read snapshots from a JSON Lines file: a units header line
/// `{"units": {"length": "m", "time": "s", "mass": "kg", "force": "N"}}`
/// followed by one snapshot per line:
/// `{"t": .., "floes": [{"poly": [[x,y],..], "a": .., "xi": [x,y],
/// "u": [ux,uy], "omega": .., "contacts": [{"z": [x,y], "f": [fx,fy]}]}]}`.
///
/// Snapshots must be in non-decreasing time order.
pub fn load_snapshots(path: impl AsRef<Path>) -> Result<Vec<FloeSnapshot>, DemError> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    read_snapshots(reader)
}

pub fn read_snapshots(reader: impl BufRead) -> Result<Vec<FloeSnapshot>, DemError> {
    let mut snapshots = Vec::new();
    let mut saw_header = false;
    for (line_idx, line) in reader.lines().enumerate() {
        let line_no = line_idx + 1;
        let text = line?;
        if text.trim().is_empty() {
            continue;
        }
        if !saw_header {
            let header: UnitsHeader =
                serde_json::from_str(&text).map_err(|e| DemError::Schema {
                    line: line_no,
                    message: format!("expected units header: {e}"),
                })?;
            if header.units != expected_units() {
                return Err(DemError::Schema {
                    line: line_no,
                    message: format!(
                        "unit mismatch: expected m/s/kg/N, got {}/{}/{}/{}",
                        header.units.length,
                        header.units.time,
                        header.units.mass,
                        header.units.force
                    ),
                });
            }
            saw_header = true;
            continue;
        }
        let dto: SnapshotDto = serde_json::from_str(&text).map_err(|e| DemError::Schema {
            line: line_no,
            message: e.to_string(),
        })?;
        let floes = dto
            .floes
            .into_iter()
            .enumerate()
            .map(|(i, f)| floe_from_dto(f, line_no, i))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(prev) = snapshots.last() {
            let prev: &FloeSnapshot = prev;
            if dto.t < prev.time {
                return Err(DemError::Schema {
                    line: line_no,
                    message: format!(
                        "snapshots out of time order: t={} after t={}",
                        dto.t, prev.time
                    ),
                });
            }
        }
        snapshots.push(FloeSnapshot { time: dto.t, floes });
    }
    if !saw_header {
        return Err(DemError::Schema {
            line: 1,
            message: "missing units header".into(),
        });
    }
    Ok(snapshots)
}

/// Write snapshots in the format read by [`load_snapshots`]; round-trips
/// are bit-exact.
pub fn save_snapshots(
    path: impl AsRef<Path>,
    snapshots: &[FloeSnapshot],
) -> Result<(), DemError> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_snapshots(&mut file, snapshots)?;
    file.flush()?;
    Ok(())
}

pub fn write_snapshots(
    mut writer: impl Write,
    snapshots: &[FloeSnapshot],
) -> Result<(), DemError> {
    let header = serde_json::to_string(&UnitsHeader {
        units: expected_units(),
    })
    .expect("static header serializes");
    writeln!(writer, "{header}")?;
    for snap in snapshots {
        let dto = SnapshotDto {
            t: snap.time,
            floes: snap.floes.iter().map(floe_to_dto).collect(),
        };
        writeln!(
            writer,
            "{}",
            serde_json::to_string(&dto).expect("snapshot serializes")
        )?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Synthetic floe generation
// ---------------------------------------------------------------------------

/// Packing regime for [`synthesize_floes`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Packing {
    /// Cells shrunk by 3%: floes nearly tile the domain and carry pairwise
    /// third-law contact forces at shared-edge midpoints.
    Dense,
    /// Cells shrunk to 55%: well-separated floes, no contacts.
    Sparse,
}

/// Generate a synthetic snapshot: seeded random sites, Voronoi cells
/// clipped to the domain's bounding rectangle, shrunk about their
/// centroids. Deterministic for a fixed seed.
pub fn synthesize_floes(
    domain: &PolygonalDomain,
    count: usize,
    seed: u64,
    packing: Packing,
) -> FloeSnapshot {
    assert!(count >= 1, "need at least one floe");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rect = domain.bounding_rectangle();
    let scale = rect.width().max(rect.height());

    // Rejection-sample sites inside the domain.
    let mut sites = Vec::with_capacity(count);
    let mut attempts = 0u64;
    while sites.len() < count && attempts < 10_000_000 {
        attempts += 1;
        let p = Point::new(
            rect.min.x + rng.gen::<f64>() * rect.width(),
            rect.min.y + rng.gen::<f64>() * rect.height(),
        );
        if domain.contains(p) {
            sites.push(p);
        }
    }

    // Voronoi cell of each site by half-plane clipping of the rectangle.
    let mut cells: Vec<Option<Vec<Point>>> = Vec::with_capacity(sites.len());
    for (i, &s) in sites.iter().enumerate() {
        let mut cell = vec![
            rect.min,
            Point::new(rect.max.x, rect.min.y),
            rect.max,
            Point::new(rect.min.x, rect.max.y),
        ];
        for (j, &t) in sites.iter().enumerate() {
            if i == j {
                continue;
            }
            // Keep the side of the perpendicular bisector containing s.
            let n = t - s;
            let c = 0.5 * (n.dot(s) + n.dot(t));
            cell = clip_half_plane(&cell, n, c);
            if cell.len() < 3 {
                break;
            }
        }
        cells.push(if cell.len() >= 3 { Some(cell) } else { None });
    }

    // Contacts at shared-edge midpoints (dense packing only), Newton pairs.
    let mut contact_map: HashMap<(usize, usize), (Point, Point)> = HashMap::new();
    if packing == Packing::Dense {
        for (i, cell) in cells.iter().enumerate() {
            let Some(cell) = cell else { continue };
            let n = cell.len();
            for e in 0..n {
                let mid = (cell[e] + cell[(e + 1) % n]) * 0.5;
                let di = (mid - sites[i]).norm();
                let mut best = None;
                for (j, &t) in sites.iter().enumerate() {
                    if j == i || cells[j].is_none() {
                        continue;
                    }
                    let dj = (mid - t).norm();
                    if best.map_or(true, |(_, d)| dj < d) {
                        best = Some((j, dj));
                    }
                }
                if let Some((j, dj)) = best {
                    if (dj - di).abs() <= 1e-9 * scale {
                        let key = (i.min(j), i.max(j));
                        contact_map.entry(key).or_insert_with(|| {
                            let f = Point::new(
                                (rng.gen::<f64>() - 0.5) * 2e5,
                                (rng.gen::<f64>() - 0.5) * 2e5,
                            );
                            (mid, f)
                        });
                    }
                }
            }
        }
    }

    let shrink = match packing {
        Packing::Dense => 0.97,
        Packing::Sparse => 0.55,
    };
    let mut floes = Vec::new();
    for (i, cell) in cells.iter().enumerate() {
        let Some(cell) = cell else { continue };
        let Ok(full) = Polygon::new(cell.clone()) else {
            continue;
        };
        let Ok(polygon) = full.scaled_about(full.centroid(), shrink) else {
            continue;
        };
        let thickness = 0.5 + 2.5 * rng.gen::<f64>();
        let u = Point::new(
            (rng.gen::<f64>() - 0.5) * 2.0,
            (rng.gen::<f64>() - 0.5) * 2.0,
        );
        let omega = (rng.gen::<f64>() - 0.5) * 0.2;
        let contacts: Vec<Contact> = contact_map
            .iter()
            .filter(|&(&(a, b), _)| a == i || b == i)
            .map(|(&(a, _), &(point, force))| Contact {
                point,
                force: if a == i { force } else { -force },
            })
            .collect();
        match Floe::new(polygon, thickness, full.centroid(), u, omega, contacts) {
            Ok(f) => floes.push(f),
            Err(e) => log::warn!("skipping degenerate synthetic floe {i}: {e}"),
        }
    }
    // Contact iteration above reads from a HashMap; order the contacts per
    // floe deterministically.
    for floe in &mut floes {
        floe.contacts.sort_by(|a, b| {
            (a.point.x, a.point.y)
                .partial_cmp(&(b.point.x, b.point.y))
                .unwrap()
        });
    }
    FloeSnapshot { time: 0.0, floes }
}

/// Sutherland-Hodgman clip of a convex polygon against `n . x <= c`.
fn clip_half_plane(poly: &[Point], n: Point, c: f64) -> Vec<Point> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    let len = poly.len();
    for i in 0..len {
        let a = poly[i];
        let b = poly[(i + 1) % len];
        let da = n.dot(a) - c;
        let db = n.dot(b) - c;
        if da <= 0.0 {
            out.push(a);
        }
        if (da < 0.0) != (db < 0.0) && da != db {
            let t = da / (da - db);
            out.push(a + (b - a) * t);
        }
    }
    // Drop near-duplicate consecutive vertices introduced by clipping.
    let mut dedup: Vec<Point> = Vec::with_capacity(out.len());
    for p in out {
        if dedup
            .last()
            .map_or(true, |&q| (p - q).norm() > 1e-12)
        {
            dedup.push(p);
        }
    }
    if dedup.len() >= 2 {
        let first = dedup[0];
        if (first - *dedup.last().unwrap()).norm() <= 1e-12 {
            dedup.pop();
        }
    }
    dedup
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{self, DEFAULT_MIN_ANGLE};
    use crate::kernels::{ScaledKernel, ShapeFunction};
    use crate::operators::{OperatorKind, SmoothingContext};
    use approx::assert_relative_eq;

    fn unit_floe(a: f64) -> Floe {
        Floe::new(
            Polygon::unit_square(),
            a,
            Point::new(0.5, 0.5),
            Point::new(0.0, 0.0),
            0.0,
            vec![],
        )
        .unwrap()
    }

    fn tri_quad() -> FieldQuadrature {
        FieldQuadrature::Triangulation {
            max_area: 5e-3,
            min_angle: DEFAULT_MIN_ANGLE,
        }
    }

    #[test]
    fn floe_validation() {
        assert!(Floe::new(
            Polygon::unit_square(),
            0.0,
            Point::new(0.5, 0.5),
            Point::new(0.0, 0.0),
            0.0,
            vec![]
        )
        .is_err());
        // Contact far from the boundary is rejected.
        let far = Contact {
            point: Point::new(10.0, 10.0),
            force: Point::new(1.0, 0.0),
        };
        assert!(Floe::new(
            Polygon::unit_square(),
            1.0,
            Point::new(0.5, 0.5),
            Point::new(0.0, 0.0),
            0.0,
            vec![far]
        )
        .is_err());
        // Contact on the boundary is fine.
        let on = Contact {
            point: Point::new(1.0, 0.5),
            force: Point::new(1.0, 0.0),
        };
        assert!(Floe::new(
            Polygon::unit_square(),
            1.0,
            Point::new(0.5, 0.5),
            Point::new(0.0, 0.0),
            0.0,
            vec![on]
        )
        .is_ok());
    }

    #[test]
    fn velocity_examples() {
        let xi = Point::new(0.5, 0.5);
        let mk = |u: Point, omega: f64| {
            Floe::new(Polygon::unit_square(), 1.0, xi, u, omega, vec![]).unwrap()
        };
        let f = mk(Point::new(0.0, 0.0), 1.0);
        let v = f.velocity_at(xi + Point::new(1.0, 0.0));
        assert_relative_eq!(v.x, 0.0);
        assert_relative_eq!(v.y, 1.0);

        let f = mk(Point::new(2.0, -1.0), 0.0);
        for y in [Point::new(0.1, 0.9), Point::new(0.7, 0.2)] {
            assert_eq!(f.velocity_at(y), Point::new(2.0, -1.0));
        }

        let f = mk(Point::new(3.0, 0.0), 2.0);
        let v = f.velocity_at(xi + Point::new(0.0, 1.0));
        assert_relative_eq!(v.x, 1.0);
        assert_relative_eq!(v.y, 0.0);
    }

    #[test]
    fn velocity_rigid_body_consistency() {
        let f = Floe::new(
            Polygon::unit_square(),
            1.0,
            Point::new(0.5, 0.5),
            Point::new(1.3, -0.4),
            0.7,
            vec![],
        )
        .unwrap();
        let pts = [
            Point::new(0.1, 0.2),
            Point::new(0.9, 0.8),
            Point::new(0.4, 0.6),
        ];
        for &a in &pts {
            for &b in &pts {
                let rel = (f.velocity_at(a) - f.velocity_at(b)).dot(a - b);
                assert!(rel.abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn stress_examples() {
        let xi = Point::new(0.0, 0.0);
        let square = Polygon::rectangle(-1.0, -1.0, 1.0, 1.0).unwrap();
        let mk = |contacts: Vec<Contact>| {
            Floe::new(square.clone(), 1.0, xi, Point::new(0.0, 0.0), 0.0, contacts).unwrap()
        };
        let s = mk(vec![Contact {
            point: Point::new(0.0, 1.0),
            force: Point::new(1.0, 0.0),
        }])
        .stress_resultant();
        assert_eq!(s, [0.0, 1.0, 0.0]);

        let s = mk(vec![Contact {
            point: Point::new(1.0, 0.0),
            force: Point::new(2.0, 0.0),
        }])
        .stress_resultant();
        assert_eq!(s, [4.0, 0.0, 0.0]);

        assert_eq!(mk(vec![]).stress_resultant(), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn mass_density_piece_values() {
        let snap = FloeSnapshot {
            time: 0.0,
            floes: vec![unit_floe(2.0)],
        };
        let field = mass_density_field(&snap, 900.0, &tri_quad()).unwrap();
        assert_eq!(field.pieces().len(), 1);
        assert!(field.pieces()[0]
            .values
            .iter()
            .all(|&v| (v - 1800.0).abs() < 1e-12));
    }

    #[test]
    fn overlapping_floes_density_sums() {
        // Two unit-thickness floes overlapping on [0.5, 1.5] x [0, 1]; deep
        // in the overlap the smoothed density approaches 2 * rho * a.
        // Reference value from a fine-quadrature evaluation of the same
        // operator.
        let floes = vec![
            Floe::new(
                Polygon::rectangle(0.0, 0.0, 1.5, 1.0).unwrap(),
                1.0,
                Point::new(0.75, 0.5),
                Point::new(0.0, 0.0),
                0.0,
                vec![],
            )
            .unwrap(),
            Floe::new(
                Polygon::rectangle(0.5, 0.0, 2.0, 1.0).unwrap(),
                1.0,
                Point::new(1.25, 0.5),
                Point::new(0.0, 0.0),
                0.0,
                vec![],
            )
            .unwrap(),
        ];
        let snap = FloeSnapshot { time: 0.0, floes };
        let domain = PolygonalDomain::new(
            Polygon::rectangle(-0.5, -0.5, 2.5, 1.5).unwrap(),
            vec![],
        )
        .unwrap();
        let tri = geometry::triangulate(&domain, 1e-3, DEFAULT_MIN_ANGLE).unwrap();
        let ctx = SmoothingContext::new(
            domain,
            QuadratureRule::from_triangulation(&tri),
            ScaledKernel::new(ShapeFunction::gaussian(2).unwrap(), 0.1).unwrap(),
            SmoothingContext::DEFAULT_DEGREE_FLOOR,
        )
        .unwrap();
        let quad = FieldQuadrature::Triangulation {
            max_area: 5e-4,
            min_angle: DEFAULT_MIN_ANGLE,
        };
        let field = mass_density_field(&snap, 900.0, &quad).unwrap();
        let v = ctx
            .markov_smooth(&field, Point::new(1.0, 0.5))
            .unwrap();
        assert_relative_eq!(v[0], 1800.0, max_relative = 2e-3);
    }

    #[test]
    fn snapshot_roundtrip_bit_exact() {
        let contacts = vec![Contact {
            point: Point::new(1.0, 0.333_333_333_333_333_3),
            force: Point::new(0.1, -2.7e5),
        }];
        let floe = Floe::new(
            Polygon::unit_square(),
            1.234_567_890_123_456_7,
            Point::new(0.5, 0.5),
            Point::new(1e-17, -3.0),
            0.123,
            contacts,
        )
        .unwrap();
        let snaps = vec![
            FloeSnapshot {
                time: 0.0,
                floes: vec![],
            },
            FloeSnapshot {
                time: 0.1,
                floes: vec![floe],
            },
        ];
        let mut buf = Vec::new();
        write_snapshots(&mut buf, &snaps).unwrap();
        let back = read_snapshots(&buf[..]).unwrap();
        assert_eq!(back, snaps);
        // And the re-serialization is byte-identical.
        let mut buf2 = Vec::new();
        write_snapshots(&mut buf2, &back).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn schema_errors_are_diagnosed() {
        // Missing header.
        let no_header = r#"{"t": 0.0, "floes": []}"#;
        assert!(matches!(
            read_snapshots(no_header.as_bytes()),
            Err(DemError::Schema { line: 1, .. })
        ));
        // Wrong units.
        let bad_units = "{\"units\":{\"length\":\"km\",\"time\":\"s\",\"mass\":\"kg\",\"force\":\"N\"}}\n";
        assert!(matches!(
            read_snapshots(bad_units.as_bytes()),
            Err(DemError::Schema { line: 1, .. })
        ));
        // Two-vertex polygon.
        let header = "{\"units\":{\"length\":\"m\",\"time\":\"s\",\"mass\":\"kg\",\"force\":\"N\"}}\n";
        let bad_poly = format!(
            "{header}{}\n",
            r#"{"t": 0.0, "floes": [{"poly": [[0,0],[1,0]], "a": 1.0, "xi": [0.5,0.5], "u": [0,0], "omega": 0}]}"#
        );
        match read_snapshots(bad_poly.as_bytes()) {
            Err(DemError::Schema { line: 2, message }) => {
                assert!(message.contains("poly"), "message: {message}")
            }
            other => panic!("expected schema error, got {other:?}"),
        }
        // Zero thickness is an invariant violation.
        let zero_a = format!(
            "{header}{}\n",
            r#"{"t": 0.0, "floes": [{"poly": [[0,0],[1,0],[1,1],[0,1]], "a": 0.0, "xi": [0.5,0.5], "u": [0,0], "omega": 0}]}"#
        );
        assert!(matches!(
            read_snapshots(zero_a.as_bytes()),
            Err(DemError::InvariantViolation { line: 2, floe: 0, .. })
        ));
        // Out-of-order times.
        let unordered = format!(
            "{header}{}\n{}\n",
            r#"{"t": 1.0, "floes": []}"#, r#"{"t": 0.5, "floes": []}"#
        );
        assert!(matches!(
            read_snapshots(unordered.as_bytes()),
            Err(DemError::Schema { line: 3, .. })
        ));
        // Empty floe list is valid.
        let empty = format!("{header}{}\n", r#"{"t": 0.0, "floes": []}"#);
        let snaps = read_snapshots(empty.as_bytes()).unwrap();
        assert_eq!(snaps.len(), 1);
        assert!(snaps[0].floes.is_empty());
    }

    #[test]
    fn synthesize_dense_covers_domain() {
        let domain = PolygonalDomain::unit_square();
        let snap = synthesize_floes(&domain, 200, 42, Packing::Dense);
        assert!(snap.floes.len() >= 150);
        let covered: f64 = snap.floes.iter().map(|f| f.polygon.area()).sum();
        assert!(
            covered >= 0.8 * domain.area(),
            "coverage {covered:.3} below 80%"
        );
    }

    #[test]
    fn synthesize_is_deterministic() {
        let domain = PolygonalDomain::unit_square();
        let a = synthesize_floes(&domain, 50, 7, Packing::Dense);
        let b = synthesize_floes(&domain, 50, 7, Packing::Dense);
        assert_eq!(a, b);
        let c = synthesize_floes(&domain, 50, 8, Packing::Dense);
        assert_ne!(a, c);
    }

    #[test]
    fn synthesize_forces_obey_third_law() {
        let domain = PolygonalDomain::unit_square();
        let snap = synthesize_floes(&domain, 80, 3, Packing::Dense);
        assert!(
            snap.floes.iter().any(|f| !f.contacts.is_empty()),
            "dense packing should produce contacts"
        );
        let total = snap.total_contact_force();
        assert!(total.norm() <= 1e-9, "residual force {}", total.norm());
    }

    #[test]
    fn synthesize_sparse_is_separated() {
        let domain = PolygonalDomain::unit_square();
        let snap = synthesize_floes(&domain, 30, 5, Packing::Sparse);
        let covered: f64 = snap.floes.iter().map(|f| f.polygon.area()).sum();
        assert!(covered <= 0.5 * domain.area());
        assert!(snap.floes.iter().all(|f| f.contacts.is_empty()));
    }

    #[test]
    fn smoothing_is_linear_over_snapshots() {
        let domain = PolygonalDomain::unit_square();
        let a = synthesize_floes(&domain, 12, 1, Packing::Sparse);
        let b = synthesize_floes(&domain, 12, 2, Packing::Sparse);
        let quad = FieldQuadrature::Triangulation {
            max_area: 2e-3,
            min_angle: DEFAULT_MIN_ANGLE,
        };
        let fa = mass_density_field(&a, 900.0, &quad).unwrap();
        let fb = mass_density_field(&b, 900.0, &quad).unwrap();
        let mut combined = FloeSnapshot {
            time: 0.0,
            floes: a.floes.clone(),
        };
        combined.floes.extend(b.floes.clone());
        let fc = mass_density_field(&combined, 900.0, &quad).unwrap();

        let tri = geometry::triangulate(&domain, 2e-3, DEFAULT_MIN_ANGLE).unwrap();
        let ctx = SmoothingContext::new(
            domain,
            QuadratureRule::from_triangulation(&tri),
            ScaledKernel::new(ShapeFunction::gaussian(2).unwrap(), 0.08).unwrap(),
            SmoothingContext::DEFAULT_DEGREE_FLOOR,
        )
        .unwrap();
        let grid = crate::operators::EvaluationGrid::over_domain(ctx.domain(), 8, 8);
        let ga = ctx.evaluate_grid(&fa, &grid, OperatorKind::Markov).unwrap();
        let gb = ctx.evaluate_grid(&fb, &grid, OperatorKind::Markov).unwrap();
        let gc = ctx.evaluate_grid(&fc, &grid, OperatorKind::Markov).unwrap();
        for i in 0..grid.len() {
            if gc.values[i].is_finite() {
                let sum = ga.values[i] + gb.values[i];
                assert!(
                    (gc.values[i] - sum).abs() <= 1e-12 * sum.abs().max(1.0),
                    "linearity violated at cell {i}"
                );
            }
        }
    }

    #[test]
    fn monte_carlo_field_quadrature_is_seeded() {
        let snap = FloeSnapshot {
            time: 0.0,
            floes: vec![unit_floe(1.0)],
        };
        let quad = FieldQuadrature::MonteCarlo { nodes: 500, seed: 9 };
        let f1 = mass_density_field(&snap, 900.0, &quad).unwrap();
        let f2 = mass_density_field(&snap, 900.0, &quad).unwrap();
        assert_eq!(f1.pieces()[0].rule.nodes(), f2.pieces()[0].rule.nodes());
    }
}
