//! Smoothing of piecewise-continuous fields on polygonal domains by
//! Markov-normalized and bistochastic radial-kernel integral operators.
//!
//! The pipeline: triangulate a polygonal domain (optionally with holes) or
//! sample it by rejection Monte Carlo, build a quadrature rule, attach
//! per-polygon field values (mass density, velocity, stress resultants from
//! floe snapshots), and evaluate the smoothed field on a grid. Diagnostics
//! cover domain thickness, Lebesgue densities, doubling ratios, and a-priori
//! quadrature error bounds.

pub mod dem;
pub mod geometry;
pub mod kernels;
pub mod operators;
pub mod quadrature;
pub mod thickness;

pub use geometry::{Point, Polygon, PolygonalDomain, Rect, Triangle, Triangulation};
pub use kernels::{ScaledKernel, ShapeFunction, ShapeKind};
pub use operators::{EvaluationGrid, GridField, PiecewiseField, SmoothingContext};
pub use quadrature::QuadratureRule;
