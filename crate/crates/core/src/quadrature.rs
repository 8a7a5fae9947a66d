//! Quadrature rules over polygonal regions: triangulation-centroid and
//! rejection-sampled Monte Carlo, with the a-priori error bounds attached
//! to each scheme, plus a bucket-grid index for kernel-truncation culling.

use crate::geometry::{Point, PolygonalDomain, Triangulation};
use crate::kernels::{KernelError, ScaledKernel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use thiserror::Error;

/// RNG identifier recorded in Monte Carlo provenance; rules are
/// bit-reproducible across platforms for a fixed seed.
pub const MC_RNG_ALGORITHM: &str = "chacha8";

const SIDECAR_MAGIC: &[u8; 4] = b"PSQR";
const SIDECAR_VERSION: u8 = 1;

#[derive(Debug, Error)]
pub enum QuadratureError {
    #[error("integrand evaluated to a non-finite value at ({x}, {y})", x = at.x, y = at.y)]
    NonFiniteIntegrand { at: Point },
    #[error("rejection sampling stalled: {accepted} acceptances in {trials} trials")]
    RejectionStall { accepted: u64, trials: u64 },
    #[error("Monte Carlo error estimate needs at least 2 samples, got {0}")]
    InsufficientSamples(usize),
    #[error("operation requires a {expected} rule")]
    WrongProvenance { expected: &'static str },
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("sidecar i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed rule sidecar: {0}")]
    Format(String),
}

/// How a rule was built; serialized with the rule so runs are reproducible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Provenance {
    TriangulationCentroid {
        min_angle: f64,
        max_area: f64,
    },
    MonteCarlo {
        seed: u64,
        /// Total trials drawn in the bounding rectangle (accepted + rejected).
        trials: u64,
        algorithm: String,
    },
}

/// Nodes and positive weights approximating integration over a region.
///
/// Triangulation rules satisfy `sum(weights) == region_area` to 1e-9
/// relative; Monte Carlo weights sum to the unbiased area estimate
/// `N |R| / M` instead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    nodes: Vec<Point>,
    weights: Vec<f64>,
    provenance: Provenance,
    region_area: f64,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn region_area(&self) -> f64 {
        self.region_area
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Weighted sum `sum_j w_j f(y_j)`.
    pub fn integrate(&self, f: impl Fn(Point) -> f64) -> Result<f64, QuadratureError> {
        let mut acc = 0.0;
        for (&node, &w) in self.nodes.iter().zip(&self.weights) {
            let v = f(node);
            if !v.is_finite() {
                return Err(QuadratureError::NonFiniteIntegrand { at: node });
            }
            acc += w * v;
        }
        Ok(acc)
    }

    /// One node per triangle at its centroid, weighted by triangle area.
    pub fn from_triangulation(t: &Triangulation) -> Self {
        let mut nodes = Vec::with_capacity(t.len());
        let mut weights = Vec::with_capacity(t.len());
        for tri in &t.triangles {
            nodes.push(tri.centroid());
            weights.push(tri.area());
        }
        let region_area = weights.iter().sum();
        QuadratureRule {
            nodes,
            weights,
            provenance: Provenance::TriangulationCentroid {
                min_angle: t.min_angle,
                max_area: t.max_area,
            },
            region_area,
        }
    }

    /// Rejection-sample uniform points in the bounding rectangle until `n`
    /// fall inside `region`; every kept node gets weight `|R| / M` where
    /// `M` is the realized trial count. Deterministic for a fixed seed.
    pub fn monte_carlo(
        region: &PolygonalDomain,
        n: usize,
        seed: u64,
    ) -> Result<Self, QuadratureError> {
        assert!(n >= 1, "need at least one node");
        let rect = region.bounding_rectangle();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut nodes = Vec::with_capacity(n);
        let mut trials: u64 = 0;
        while nodes.len() < n {
            trials += 1;
            let p = Point::new(
                rect.min.x + rng.gen::<f64>() * rect.width(),
                rect.min.y + rng.gen::<f64>() * rect.height(),
            );
            if region.contains(p) {
                nodes.push(p);
            }
            if trials >= 1_000_000 && (nodes.len() as f64) < 1e-4 * trials as f64 {
                return Err(QuadratureError::RejectionStall {
                    accepted: nodes.len() as u64,
                    trials,
                });
            }
        }
        let w = rect.area() / trials as f64;
        let weights = vec![w; nodes.len()];
        Ok(QuadratureRule {
            nodes,
            weights,
            provenance: Provenance::MonteCarlo {
                seed,
                trials,
                algorithm: MC_RNG_ALGORITHM.to_owned(),
            },
            region_area: region.area(),
        })
    }

    /// Classical Monte Carlo error estimate `s |R| / |Y| N^{-1/2}`, with the
    /// integrand standard deviation `s` estimated over the accepted nodes
    /// and `|Y|` estimated by the weight sum.
    pub fn monte_carlo_error_estimate(
        &self,
        f: impl Fn(Point) -> f64,
    ) -> Result<f64, QuadratureError> {
        let Provenance::MonteCarlo { trials, .. } = self.provenance else {
            return Err(QuadratureError::WrongProvenance {
                expected: "Monte Carlo",
            });
        };
        let n = self.nodes.len();
        if n < 2 {
            return Err(QuadratureError::InsufficientSamples(n));
        }
        let values: Vec<f64> = self.nodes.iter().map(|&p| f(p)).collect();
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(QuadratureError::NonFiniteIntegrand { at: self.nodes[i] });
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        let rect_area = self.weights[0] * trials as f64;
        let region_est = self.total_weight();
        Ok(var.sqrt() * rect_area / region_est / (n as f64).sqrt())
    }

    /// Serialize to the compact binary sidecar (nodes, weights, provenance).
    pub fn write_binary(&self, mut w: impl Write) -> Result<(), QuadratureError> {
        w.write_all(SIDECAR_MAGIC)?;
        w.write_all(&[SIDECAR_VERSION])?;
        let prov = serde_json::to_vec(&self.provenance)
            .map_err(|e| QuadratureError::Format(e.to_string()))?;
        w.write_all(&(prov.len() as u32).to_le_bytes())?;
        w.write_all(&prov)?;
        w.write_all(&self.region_area.to_le_bytes())?;
        w.write_all(&(self.nodes.len() as u64).to_le_bytes())?;
        for (node, weight) in self.nodes.iter().zip(&self.weights) {
            w.write_all(&node.x.to_le_bytes())?;
            w.write_all(&node.y.to_le_bytes())?;
            w.write_all(&weight.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary(mut r: impl Read) -> Result<Self, QuadratureError> {
        let mut magic = [0u8; 5];
        r.read_exact(&mut magic)?;
        if &magic[..4] != SIDECAR_MAGIC {
            return Err(QuadratureError::Format("bad magic".into()));
        }
        if magic[4] != SIDECAR_VERSION {
            return Err(QuadratureError::Format(format!(
                "unsupported version {}",
                magic[4]
            )));
        }
        let mut len4 = [0u8; 4];
        r.read_exact(&mut len4)?;
        let mut prov = vec![0u8; u32::from_le_bytes(len4) as usize];
        r.read_exact(&mut prov)?;
        let provenance: Provenance =
            serde_json::from_slice(&prov).map_err(|e| QuadratureError::Format(e.to_string()))?;
        let mut f8 = [0u8; 8];
        r.read_exact(&mut f8)?;
        let region_area = f64::from_le_bytes(f8);
        r.read_exact(&mut f8)?;
        let n = u64::from_le_bytes(f8) as usize;
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for _ in 0..n {
            r.read_exact(&mut f8)?;
            let x = f64::from_le_bytes(f8);
            r.read_exact(&mut f8)?;
            let y = f64::from_le_bytes(f8);
            r.read_exact(&mut f8)?;
            nodes.push(Point::new(x, y));
            weights.push(f64::from_le_bytes(f8));
        }
        Ok(QuadratureRule {
            nodes,
            weights,
            provenance,
            region_area,
        })
    }
}

/// A-priori bound on the centroid-rule error for a kernel section:
/// `delta_eps * sum_j area(T_j) diam(T_j)` with `delta_eps` the supremum
/// of the kernel's radial derivative. Gaussian kernels only.
pub fn triangulation_error_bound(
    t: &Triangulation,
    kernel: &ScaledKernel,
) -> Result<f64, QuadratureError> {
    let delta = kernel.radial_derivative_sup()?;
    Ok(delta
        * t.triangles
            .iter()
            .map(|tri| tri.area() * tri.diameter())
            .sum::<f64>())
}

/// Uniform bucket grid over a point set; `for_each_within` visits every
/// point within `radius` of a query center (plus near misses in the same
/// cells, which callers discard via kernel truncation).
#[derive(Debug, Clone)]
pub struct SpatialIndex {
    origin: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl SpatialIndex {
    pub fn new(points: &[Point], cell_size: f64) -> Self {
        assert!(cell_size > 0.0 && cell_size.is_finite());
        let mut min = Point::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        if points.is_empty() {
            min = Point::new(0.0, 0.0);
            max = Point::new(0.0, 0.0);
        }
        let nx = (((max.x - min.x) / cell_size).floor() as usize + 1).max(1);
        let ny = (((max.y - min.y) / cell_size).floor() as usize + 1).max(1);
        let mut buckets = vec![Vec::new(); nx * ny];
        for (i, p) in points.iter().enumerate() {
            let cx = (((p.x - min.x) / cell_size) as usize).min(nx - 1);
            let cy = (((p.y - min.y) / cell_size) as usize).min(ny - 1);
            buckets[cy * nx + cx].push(i as u32);
        }
        SpatialIndex {
            origin: min,
            cell: cell_size,
            nx,
            ny,
            buckets,
        }
    }

    pub fn for_each_within(&self, center: Point, radius: f64, mut f: impl FnMut(usize)) {
        let lo_x = ((center.x - radius - self.origin.x) / self.cell).floor().max(0.0) as usize;
        let lo_y = ((center.y - radius - self.origin.y) / self.cell).floor().max(0.0) as usize;
        let hi_x = (((center.x + radius - self.origin.x) / self.cell).floor() as isize)
            .clamp(0, self.nx as isize - 1) as usize;
        let hi_y = (((center.y + radius - self.origin.y) / self.cell).floor() as isize)
            .clamp(0, self.ny as isize - 1) as usize;
        if lo_x >= self.nx || lo_y >= self.ny {
            return;
        }
        for cy in lo_y..=hi_y {
            for cx in lo_x..=hi_x {
                for &i in &self.buckets[cy * self.nx + cx] {
                    f(i as usize);
                }
            }
        }
    }
}
