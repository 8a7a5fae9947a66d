//! Smoothing operators on a polygonal domain: the degree function, the
//! Markov-normalized operator, its bistochastic variant, grid evaluation,
//! and discrete L^p norms for convergence studies.
//!
//! Grid evaluation is embarrassingly parallel over grid points; results are
//! independent of evaluation order. The `parallel` feature switches the
//! default implementation to rayon, `evaluate_grid_serial` is always
//! available.

use crate::geometry::{Point, PolygonalDomain, Rect};
use crate::kernels::ScaledKernel;
use crate::quadrature::{QuadratureError, QuadratureRule, SpatialIndex};
use std::sync::OnceLock;
use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Largest supported component count (scalar, velocity, symmetric stress).
pub const MAX_COMPONENTS: usize = 4;

#[derive(Debug, Error)]
pub enum OperatorError {
    #[error(
        "degree {value:.6} below floor {floor} at ({x}, {y}): domain is effectively \
         non-thick at this point for the chosen epsilon",
        x = at.x, y = at.y
    )]
    DegreeBelowFloor { at: Point, value: f64, floor: f64 },
    #[error("invalid smoothing context: {0}")]
    InvalidContext(String),
    #[error("field has {field} components, expected {expected}")]
    DimensionMismatch { field: usize, expected: usize },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error(
        "quadrature error {quadrature_error:.3e} dominates the measured smoothing error \
         {smoothing_error:.3e} at epsilon {epsilon}"
    )]
    QuadratureDominates {
        epsilon: f64,
        quadrature_error: f64,
        smoothing_error: f64,
    },
    #[error("non-finite field value at node ({x}, {y})", x = at.x, y = at.y)]
    NonFinite { at: Point },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Small fixed-capacity component vector carried through smoothing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Components {
    dim: usize,
    data: [f64; MAX_COMPONENTS],
}

impl Components {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1 && dim <= MAX_COMPONENTS);
        Components {
            dim,
            data: [0.0; MAX_COMPONENTS],
        }
    }

    pub fn from_slice(values: &[f64]) -> Self {
        let mut c = Components::zeros(values.len());
        c.data[..values.len()].copy_from_slice(values);
        c
    }

    pub fn scalar(v: f64) -> Self {
        Components::from_slice(&[v])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data[..self.dim]
    }

    fn add_scaled(&mut self, values: &[f64], s: f64) {
        for (acc, v) in self.data[..self.dim].iter_mut().zip(values) {
            *acc += s * v;
        }
    }

    fn scale(&mut self, s: f64) {
        for v in &mut self.data[..self.dim] {
            *v *= s;
        }
    }
}

impl std::ops::Index<usize> for Components {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.as_slice()[i]
    }
}

/// One polygon of a piecewise field with its quadrature rule and
/// pre-sampled component values (row-major, `dim` per node).
#[derive(Debug, Clone)]
pub struct FieldPiece {
    pub polygon: crate::geometry::Polygon,
    pub rule: QuadratureRule,
    pub values: Vec<f64>,
}

/// A finite sum of compactly supported pieces, `f = sum_l f_l`.
/// Pieces may overlap; overlapping contributions add.
#[derive(Debug, Clone)]
pub struct PiecewiseField {
    dim: usize,
    pieces: Vec<FieldPiece>,
    flat_nodes: Vec<Point>,
    flat_weights: Vec<f64>,
    flat_values: Vec<f64>,
}

impl PiecewiseField {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1 && dim <= MAX_COMPONENTS);
        PiecewiseField {
            dim,
            pieces: Vec::new(),
            flat_nodes: Vec::new(),
            flat_weights: Vec::new(),
            flat_values: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[FieldPiece] {
        &self.pieces
    }

    pub fn node_count(&self) -> usize {
        self.flat_nodes.len()
    }

    pub fn add_piece(
        &mut self,
        polygon: crate::geometry::Polygon,
        rule: QuadratureRule,
        values: Vec<f64>,
    ) -> Result<(), OperatorError> {
        if values.len() != rule.len() * self.dim {
            return Err(OperatorError::DimensionMismatch {
                field: values.len(),
                expected: rule.len() * self.dim,
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(OperatorError::NonFinite {
                at: rule.nodes()[i / self.dim],
            });
        }
        self.flat_nodes.extend_from_slice(rule.nodes());
        self.flat_weights.extend_from_slice(rule.weights());
        self.flat_values.extend_from_slice(&values);
        self.pieces.push(FieldPiece {
            polygon,
            rule,
            values,
        });
        Ok(())
    }

    /// Add a piece by sampling `f` at the rule nodes.
    pub fn add_sampled_piece(
        &mut self,
        polygon: crate::geometry::Polygon,
        rule: QuadratureRule,
        f: impl Fn(Point) -> Components,
    ) -> Result<(), OperatorError> {
        let mut values = Vec::with_capacity(rule.len() * self.dim);
        for &node in rule.nodes() {
            let c = f(node);
            assert_eq!(c.dim(), self.dim);
            values.extend_from_slice(c.as_slice());
        }
        self.add_piece(polygon, rule, values)
    }

    /// Add a piece carrying a constant component vector.
    pub fn add_constant_piece(
        &mut self,
        polygon: crate::geometry::Polygon,
        rule: QuadratureRule,
        value: &[f64],
    ) -> Result<(), OperatorError> {
        let c = Components::from_slice(value);
        self.add_sampled_piece(polygon, rule, |_| c)
    }

    /// Discrete integral of the field, `sum_k w_k f(y_k)` componentwise.
    pub fn integral(&self) -> Components {
        let mut acc = Components::zeros(self.dim);
        for (k, &w) in self.flat_weights.iter().enumerate() {
            acc.add_scaled(&self.flat_values[k * self.dim..(k + 1) * self.dim], w);
        }
        acc
    }

    fn index(&self, cell: f64) -> SpatialIndex {
        SpatialIndex::new(&self.flat_nodes, cell)
    }
}

/// Which smoothing operator to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    Markov,
    Bistochastic,
}

/// Domain, domain quadrature rule, kernel, and the degree floor converting
/// the thickness hypothesis into a runtime guard.
pub struct SmoothingContext {
    domain: PolygonalDomain,
    rule: QuadratureRule,
    kernel: ScaledKernel,
    degree_floor: f64,
    index: SpatialIndex,
    node_degrees: OnceLock<Vec<f64>>,
    node_q: OnceLock<Vec<f64>>,
}

impl SmoothingContext {
    pub fn new(
        domain: PolygonalDomain,
        rule: QuadratureRule,
        kernel: ScaledKernel,
        degree_floor: f64,
    ) -> Result<Self, OperatorError> {
        if !(degree_floor > 0.0 && degree_floor < 1.0) {
            return Err(OperatorError::InvalidContext(format!(
                "degree floor must lie in (0, 1), got {degree_floor}"
            )));
        }
        let outside = rule
            .nodes()
            .iter()
            .filter(|&&p| !domain.contains(p))
            .count();
        if outside > 0 {
            return Err(OperatorError::InvalidContext(format!(
                "{outside} quadrature nodes fall outside the domain"
            )));
        }
        let index = SpatialIndex::new(rule.nodes(), kernel.truncation_radius());
        Ok(SmoothingContext {
            domain,
            rule,
            kernel,
            degree_floor,
            index,
            node_degrees: OnceLock::new(),
            node_q: OnceLock::new(),
        })
    }

    /// Default degree floor (see the thickness guard).
    pub const DEFAULT_DEGREE_FLOOR: f64 = 0.05;

    pub fn domain(&self) -> &PolygonalDomain {
        &self.domain
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn kernel(&self) -> &ScaledKernel {
        &self.kernel
    }

    pub fn degree_floor(&self) -> f64 {
        self.degree_floor
    }

    fn degree_unchecked(&self, x: Point) -> f64 {
        let nodes = self.rule.nodes();
        let weights = self.rule.weights();
        let mut acc = 0.0;
        self.index
            .for_each_within(x, self.kernel.truncation_radius(), |j| {
                acc += weights[j] * self.kernel.eval(x, nodes[j]);
            });
        acc
    }

    /// Discretized degree function `d_eps(x) = sum_j w_j k_eps(x, y_j)`.
    ///
    /// Fails with `DegreeBelowFloor` when the value drops under the floor,
    /// signaling that the domain is effectively non-thick at `x` for this
    /// kernel scale.
    pub fn degree(&self, x: Point) -> Result<f64, OperatorError> {
        let d = self.degree_unchecked(x);
        if d < self.degree_floor {
            return Err(OperatorError::DegreeBelowFloor {
                at: x,
                value: d,
                floor: self.degree_floor,
            });
        }
        Ok(d)
    }

    /// Degree values at the domain-rule nodes (cached).
    pub fn node_degrees(&self) -> &[f64] {
        self.node_degrees.get_or_init(|| {
            let nodes = self.rule.nodes();
            #[cfg(feature = "parallel")]
            {
                nodes
                    .par_iter()
                    .map(|&p| self.degree_unchecked(p))
                    .collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                nodes.iter().map(|&p| self.degree_unchecked(p)).collect()
            }
        })
    }

    /// `q` values at the domain-rule nodes (cached).
    fn node_q_values(&self) -> &[f64] {
        self.node_q.get_or_init(|| {
            let nodes = self.rule.nodes();
            let degrees = self.node_degrees();
            let eval = |&p: &Point| {
                let mut acc = 0.0;
                self.index
                    .for_each_within(p, self.kernel.truncation_radius(), |j| {
                        acc += self.rule.weights()[j] * self.kernel.eval(p, nodes[j]) / degrees[j];
                    });
                acc
            };
            #[cfg(feature = "parallel")]
            {
                nodes.par_iter().map(eval).collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                nodes.iter().map(eval).collect()
            }
        })
    }

    /// Right-normalization function `q_eps(x) = sum_j w_j k_eps(x, y_j) / d_eps(y_j)`.
    pub fn q_function(&self, x: Point) -> Result<f64, OperatorError> {
        let nodes = self.rule.nodes();
        let weights = self.rule.weights();
        let degrees = self.node_degrees();
        let mut acc = 0.0;
        let mut below: Option<usize> = None;
        self.index
            .for_each_within(x, self.kernel.truncation_radius(), |j| {
                let k = self.kernel.eval(x, nodes[j]);
                if k > 0.0 && degrees[j] < self.degree_floor && below.is_none() {
                    below = Some(j);
                }
                acc += weights[j] * k / degrees[j];
            });
        if let Some(j) = below {
            return Err(OperatorError::DegreeBelowFloor {
                at: nodes[j],
                value: degrees[j],
                floor: self.degree_floor,
            });
        }
        Ok(acc)
    }

    /// Markov-smoothed field value at `x`:
    /// `(1 / d_eps(x)) * sum_pieces sum_nodes w k_eps(x, y) f(y)`.
    pub fn markov_smooth(
        &self,
        field: &PiecewiseField,
        x: Point,
    ) -> Result<Components, OperatorError> {
        let field_index = field.index(self.kernel.truncation_radius());
        self.markov_with_index(field, &field_index, x).map(|r| r.0)
    }

    fn markov_with_index(
        &self,
        field: &PiecewiseField,
        field_index: &SpatialIndex,
        x: Point,
    ) -> Result<(Components, f64), OperatorError> {
        let d = self.degree(x)?;
        let dim = field.dim;
        let mut acc = Components::zeros(dim);
        field_index.for_each_within(x, self.kernel.truncation_radius(), |k| {
            let w = field.flat_weights[k] * self.kernel.eval(x, field.flat_nodes[k]);
            acc.add_scaled(&field.flat_values[k * dim..(k + 1) * dim], w);
        });
        acc.scale(d.recip());
        Ok((acc, d))
    }

    /// Bistochastic-smoothed value at `x`. Convenience wrapper that builds
    /// the node plan on every call; use [`SmoothingContext::bistochastic_plan`]
    /// when evaluating at many points.
    pub fn bistochastic_smooth(
        &self,
        field: &PiecewiseField,
        x: Point,
    ) -> Result<Components, OperatorError> {
        self.bistochastic_plan(field)?.eval(x).map(|r| r.0)
    }

    /// Precompute the inner two factors of the bistochastic operator at the
    /// domain-rule nodes. The outer Markov application is then `O(local
    /// nodes)` per evaluation point.
    ///
    /// The kernel applied is the symmetric bistochastic kernel
    /// `p~(x,y) = int k(x,z) k(z,y) / (d(x) q(z) d(y)) dz`; discretely this
    /// preserves the constant function exactly and preserves field integrals
    /// up to kernel truncation.
    pub fn bistochastic_plan(
        &self,
        field: &PiecewiseField,
    ) -> Result<BistochasticPlan<'_>, OperatorError> {
        let dim = field.dim;
        let radius = self.kernel.truncation_radius();
        let field_index = field.index(radius);
        let degrees = self.node_degrees();
        let q_values = self.node_q_values();

        // Degree at the field nodes, with the floor guard.
        let field_degrees: Vec<f64> = {
            #[cfg(feature = "parallel")]
            let iter = field.flat_nodes.par_iter();
            #[cfg(not(feature = "parallel"))]
            let iter = field.flat_nodes.iter();
            iter.map(|&p| self.degree(p)).collect::<Result<_, _>>()?
        };

        // At each domain node z_i: b_i = sum_k w_k k(z_i, y_k) f(y_k) / d(y_k),
        // then scale by 1/q(z_i). No left normalization here: the middle
        // factor of the bistochastic kernel is the raw convolution.
        let nodes = self.rule.nodes();
        let eval_node = |i: usize| -> Vec<f64> {
            let z = nodes[i];
            let mut acc = Components::zeros(dim);
            field_index.for_each_within(z, radius, |k| {
                let w = field.flat_weights[k] * self.kernel.eval(z, field.flat_nodes[k])
                    / field_degrees[k];
                acc.add_scaled(&field.flat_values[k * dim..(k + 1) * dim], w);
            });
            acc.scale(q_values[i].recip());
            acc.as_slice().to_vec()
        };
        let node_values: Vec<f64> = {
            #[cfg(feature = "parallel")]
            {
                (0..nodes.len())
                    .into_par_iter()
                    .flat_map_iter(eval_node)
                    .collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                (0..nodes.len()).flat_map(eval_node).collect()
            }
        };
        let _ = degrees;
        Ok(BistochasticPlan {
            ctx: self,
            dim,
            node_values,
        })
    }

    /// Evaluate the chosen operator at every masked-in grid point.
    /// Per-point degree failures are collected, not fatal; failed points
    /// carry NaN sentinels.
    pub fn evaluate_grid(
        &self,
        field: &PiecewiseField,
        grid: &EvaluationGrid,
        operator: OperatorKind,
    ) -> Result<GridField, OperatorError> {
        self.evaluate_grid_impl(field, grid, operator, true)
    }

    /// Sequential variant of [`SmoothingContext::evaluate_grid`]; same
    /// results, used as the baseline in benchmarks.
    pub fn evaluate_grid_serial(
        &self,
        field: &PiecewiseField,
        grid: &EvaluationGrid,
        operator: OperatorKind,
    ) -> Result<GridField, OperatorError> {
        self.evaluate_grid_impl(field, grid, operator, false)
    }

    fn evaluate_grid_impl(
        &self,
        field: &PiecewiseField,
        grid: &EvaluationGrid,
        operator: OperatorKind,
        parallel: bool,
    ) -> Result<GridField, OperatorError> {
        let dim = field.dim;
        let plan = match operator {
            OperatorKind::Markov => None,
            OperatorKind::Bistochastic => Some(self.bistochastic_plan(field)?),
        };
        let field_index = field.index(self.kernel.truncation_radius());
        let eval_point = |i: usize| -> Option<Result<(Components, f64), OperatorError>> {
            if !grid.mask[i] {
                return None;
            }
            let x = grid.point(i);
            let r = match &plan {
                None => self.markov_with_index(field, &field_index, x),
                Some(plan) => plan.eval(x),
            };
            Some(r)
        };

        let results: Vec<Option<Result<(Components, f64), OperatorError>>> = {
            #[cfg(feature = "parallel")]
            {
                if parallel {
                    (0..grid.len()).into_par_iter().map(eval_point).collect()
                } else {
                    (0..grid.len()).map(eval_point).collect()
                }
            }
            #[cfg(not(feature = "parallel"))]
            {
                let _ = parallel;
                (0..grid.len()).map(eval_point).collect()
            }
        };

        let mut values = vec![f64::NAN; grid.len() * dim];
        let mut failures = Vec::new();
        let mut min_degree = f64::INFINITY;
        for (i, r) in results.into_iter().enumerate() {
            match r {
                None => {}
                Some(Ok((c, d))) => {
                    values[i * dim..(i + 1) * dim].copy_from_slice(c.as_slice());
                    min_degree = min_degree.min(d);
                }
                Some(Err(OperatorError::DegreeBelowFloor { at, value, .. })) => {
                    failures.push((at, value));
                    min_degree = min_degree.min(value);
                }
                Some(Err(e)) => return Err(e),
            }
        }
        Ok(GridField {
            nx: grid.nx,
            ny: grid.ny,
            dim,
            values,
            min_degree,
            degree_failures: failures,
        })
    }
}

/// Prepared bistochastic evaluation: inner factors collapsed onto the
/// domain-rule nodes.
pub struct BistochasticPlan<'a> {
    ctx: &'a SmoothingContext,
    dim: usize,
    /// `b_i / q_i` at domain node `i`, row-major with `dim` stride.
    node_values: Vec<f64>,
}

impl BistochasticPlan<'_> {
    pub fn eval(&self, x: Point) -> Result<(Components, f64), OperatorError> {
        let ctx = self.ctx;
        let d = ctx.degree(x)?;
        let nodes = ctx.rule.nodes();
        let weights = ctx.rule.weights();
        let mut acc = Components::zeros(self.dim);
        ctx.index
            .for_each_within(x, ctx.kernel.truncation_radius(), |i| {
                let w = weights[i] * ctx.kernel.eval(x, nodes[i]);
                acc.add_scaled(&self.node_values[i * self.dim..(i + 1) * self.dim], w);
            });
        acc.scale(d.recip());
        Ok((acc, d))
    }
}

/// Uniform evaluation grid over a rectangle with an inside-domain mask.
/// Points sit at cell centers.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationGrid {
    pub rect: Rect,
    pub nx: usize,
    pub ny: usize,
    mask: Vec<bool>,
}

impl EvaluationGrid {
    pub fn new(domain: &PolygonalDomain, rect: Rect, nx: usize, ny: usize) -> Self {
        assert!(nx >= 2 && ny >= 2, "grid resolution must be at least 2");
        let mut grid = EvaluationGrid {
            rect,
            nx,
            ny,
            mask: Vec::new(),
        };
        let mask = (0..nx * ny).map(|i| domain.contains(grid.point(i))).collect();
        grid.mask = mask;
        grid
    }

    /// Grid over the domain's bounding rectangle.
    pub fn over_domain(domain: &PolygonalDomain, nx: usize, ny: usize) -> Self {
        EvaluationGrid::new(domain, domain.bounding_rectangle(), nx, ny)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, i: usize) -> Point {
        let (ix, iy) = (i % self.nx, i / self.nx);
        Point::new(
            self.rect.min.x + (ix as f64 + 0.5) * self.cell_width(),
            self.rect.min.y + (iy as f64 + 0.5) * self.cell_height(),
        )
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn cell_width(&self) -> f64 {
        self.rect.width() / self.nx as f64
    }

    pub fn cell_height(&self) -> f64 {
        self.rect.height() / self.ny as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.cell_width() * self.cell_height()
    }

    pub fn masked_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }
}

/// Field values on an evaluation grid. Masked-out or failed points carry
/// NaN sentinels.
#[derive(Debug, Clone)]
pub struct GridField {
    pub nx: usize,
    pub ny: usize,
    pub dim: usize,
    pub values: Vec<f64>,
    /// Minimum degree observed over evaluated points.
    pub min_degree: f64,
    /// Points whose degree fell below the floor, with the offending value.
    pub degree_failures: Vec<(Point, f64)>,
}

impl GridField {
    /// Sample an exact field on the grid (for convergence references).
    pub fn sample(grid: &EvaluationGrid, dim: usize, f: impl Fn(Point) -> Components) -> Self {
        let mut values = vec![f64::NAN; grid.len() * dim];
        for i in 0..grid.len() {
            if grid.mask[i] {
                let c = f(grid.point(i));
                assert_eq!(c.dim(), dim);
                values[i * dim..(i + 1) * dim].copy_from_slice(c.as_slice());
            }
        }
        GridField {
            nx: grid.nx,
            ny: grid.ny,
            dim,
            values,
            min_degree: f64::INFINITY,
            degree_failures: Vec::new(),
        }
    }

    pub fn value(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    /// Discrete integral over the grid (Riemann sum of the first component).
    pub fn integral(&self, cell_area: f64) -> f64 {
        self.values
            .chunks(self.dim)
            .filter(|c| c[0].is_finite())
            .map(|c| c[0] * cell_area)
            .sum()
    }

    pub fn all_finite_where_masked(&self, grid: &EvaluationGrid) -> bool {
        (0..self.nx * self.ny).all(|i| {
            !grid.mask()[i] || self.value(i).iter().all(|v| v.is_finite())
        })
    }
}

/// Which discrete L^p norm to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpNorm {
    L1,
    L2,
    LInf,
}

/// Discrete L^p norm of the difference of two grid fields over cells where
/// both are finite (Riemann-sum weighting; max norm for `LInf`).
/// Componentwise differences enter through the Euclidean norm per cell.
pub fn lp_error(
    a: &GridField,
    b: &GridField,
    p: LpNorm,
    cell_area: f64,
) -> Result<f64, OperatorError> {
    if a.nx != b.nx || a.ny != b.ny || a.dim != b.dim {
        return Err(OperatorError::GridMismatch(format!(
            "{}x{}x{} vs {}x{}x{}",
            a.nx, a.ny, a.dim, b.nx, b.ny, b.dim
        )));
    }
    let mut acc = 0.0f64;
    for (ca, cb) in a.values.chunks(a.dim).zip(b.values.chunks(b.dim)) {
        if !ca[0].is_finite() || !cb[0].is_finite() {
            continue;
        }
        let diff = ca
            .iter()
            .zip(cb)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt();
        match p {
            LpNorm::L1 => acc += diff * cell_area,
            LpNorm::L2 => acc += diff * diff * cell_area,
            LpNorm::LInf => acc = acc.max(diff),
        }
    }
    Ok(match p {
        LpNorm::L2 => acc.sqrt(),
        _ => acc,
    })
}

/// One row of a convergence study.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct ConvergenceRow {
    pub epsilon: f64,
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

/// Errors of the Markov-smoothed field against an exact reference over a
/// decreasing epsilon list, with fitted log-log slopes.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub slope_l1: f64,
    pub slope_l2: f64,
    pub slope_linf: f64,
}

impl ConvergenceReport {
    pub fn error(&self, p: LpNorm) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| match p {
                LpNorm::L1 => r.l1,
                LpNorm::L2 => r.l2,
                LpNorm::LInf => r.linf,
            })
            .collect()
    }

    pub fn slope(&self, p: LpNorm) -> f64 {
        match p {
            LpNorm::L1 => self.slope_l1,
            LpNorm::L2 => self.slope_l2,
            LpNorm::LInf => self.slope_linf,
        }
    }

    /// Errors decrease between consecutive epsilons up to `tol` relative
    /// slack (e.g. 0.1 allows a 10% uptick).
    pub fn monotone_decreasing(&self, p: LpNorm, tol: f64) -> bool {
        self.error(p).windows(2).all(|w| w[1] <= w[0] * (1.0 + tol))
    }
}

/// Run a convergence study of the Markov operator over a family of contexts
/// with strictly decreasing epsilon.
///
/// When `quadrature_probe` contexts (same epsilons, finer quadrature) are
/// supplied, the measured smoothing error at each level is checked against
/// an empirical quadrature-error estimate at probe points; if quadrature
/// error exceeds half the smoothing error the study aborts with
/// `QuadratureDominates`.
pub fn convergence_study(
    contexts: &[SmoothingContext],
    quadrature_probe: Option<&[SmoothingContext]>,
    field: &PiecewiseField,
    exact: &GridField,
    grid: &EvaluationGrid,
) -> Result<ConvergenceReport, OperatorError> {
    assert!(
        contexts
            .windows(2)
            .all(|w| w[1].kernel().epsilon() < w[0].kernel().epsilon()),
        "epsilon list must be strictly decreasing"
    );
    let cell_area = grid.cell_area();
    let mut rows = Vec::with_capacity(contexts.len());
    for (level, ctx) in contexts.iter().enumerate() {
        let smoothed = ctx.evaluate_grid(field, grid, OperatorKind::Markov)?;
        let row = ConvergenceRow {
            epsilon: ctx.kernel().epsilon(),
            l1: lp_error(&smoothed, exact, LpNorm::L1, cell_area)?,
            l2: lp_error(&smoothed, exact, LpNorm::L2, cell_area)?,
            linf: lp_error(&smoothed, exact, LpNorm::LInf, cell_area)?,
        };
        if let Some(probes) = quadrature_probe {
            let fine = &probes[level];
            let quad_err = quadrature_probe_error(ctx, fine, field, grid)?;
            if quad_err > 0.5 * row.l1.max(f64::MIN_POSITIVE) {
                return Err(OperatorError::QuadratureDominates {
                    epsilon: row.epsilon,
                    quadrature_error: quad_err,
                    smoothing_error: row.l1,
                });
            }
        }
        rows.push(row);
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.epsilon.ln()).collect();
    let slope = |get: fn(&ConvergenceRow) -> f64| {
        let ys: Vec<f64> = rows.iter().map(|r| get(r).max(1e-300).ln()).collect();
        fit_slope(&xs, &ys)
    };
    Ok(ConvergenceReport {
        slope_l1: slope(|r| r.l1),
        slope_l2: slope(|r| r.l2),
        slope_linf: slope(|r| r.linf),
        rows,
    })
}

/// Empirical quadrature-error estimate: L1-weighted discrepancy of the
/// Markov-smoothed value between a rule and a finer rule at a deterministic
/// subset of masked-in grid points.
fn quadrature_probe_error(
    coarse: &SmoothingContext,
    fine: &SmoothingContext,
    field: &PiecewiseField,
    grid: &EvaluationGrid,
) -> Result<f64, OperatorError> {
    let masked: Vec<usize> = (0..grid.len()).filter(|&i| grid.mask()[i]).collect();
    let stride = (masked.len() / 32).max(1);
    let mut max_diff = 0.0f64;
    for &i in masked.iter().step_by(stride) {
        let x = grid.point(i);
        let a = coarse.markov_smooth(field, x)?;
        let b = fine.markov_smooth(field, x)?;
        let diff = a
            .as_slice()
            .iter()
            .zip(b.as_slice())
            .map(|(u, v)| (u - v) * (u - v))
            .sum::<f64>()
            .sqrt();
        max_diff = max_diff.max(diff);
    }
    // Scale the pointwise discrepancy to an L1-equivalent over the domain.
    Ok(max_diff * grid.masked_count() as f64 * grid.cell_area())
}

fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}
