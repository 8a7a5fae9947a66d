//! Radial shape functions and the epsilon-scaled kernel family
//! `k_eps(x, y) = eps^{-n} h((y - x)/eps)`.

use crate::geometry::Point;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("shape function {0:?} is not supported for this operation")]
    UnsupportedShape(ShapeKind),
    #[error("epsilon must be positive, got {0}")]
    InvalidEpsilon(f64),
    #[error("dimension {0} is not supported (only 1 and 2)")]
    UnsupportedDimension(u32),
    #[error("shape function failed normalization check: integral = {0}")]
    NotNormalized(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeKind {
    Gaussian,
    Tophat,
}

/// Which of the shape-function axioms a profile satisfies:
/// nonnegativity, radial symmetry, unit L1 norm, radial monotonicity,
/// continuity, strict positivity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomFlags {
    pub nonneg: bool,
    pub radial: bool,
    pub normalized: bool,
    pub decreasing: bool,
    pub continuous: bool,
    pub strictly_positive: bool,
}

/// A radial profile `h` in dimension `n`, carrying its axiom flags.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeFunction {
    kind: ShapeKind,
    dim: u32,
    axioms: AxiomFlags,
}

impl ShapeFunction {
    pub fn new(kind: ShapeKind, dim: u32) -> Result<Self, KernelError> {
        if dim != 1 && dim != 2 {
            return Err(KernelError::UnsupportedDimension(dim));
        }
        let axioms = match kind {
            ShapeKind::Gaussian => AxiomFlags {
                nonneg: true,
                radial: true,
                normalized: true,
                decreasing: true,
                continuous: true,
                strictly_positive: true,
            },
            // The tophat is discontinuous at radius 1 and vanishes outside
            // the unit ball.
            ShapeKind::Tophat => AxiomFlags {
                nonneg: true,
                radial: true,
                normalized: true,
                decreasing: true,
                continuous: false,
                strictly_positive: false,
            },
        };
        let shape = ShapeFunction { kind, dim, axioms };
        let mass = shape.radial_mass();
        if (mass - 1.0).abs() > 1e-6 {
            return Err(KernelError::NotNormalized(mass));
        }
        Ok(shape)
    }

    pub fn gaussian(dim: u32) -> Result<Self, KernelError> {
        ShapeFunction::new(ShapeKind::Gaussian, dim)
    }

    pub fn tophat(dim: u32) -> Result<Self, KernelError> {
        ShapeFunction::new(ShapeKind::Tophat, dim)
    }

    pub fn kind(&self) -> ShapeKind {
        self.kind
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn axioms(&self) -> AxiomFlags {
        self.axioms
    }

    /// Profile value at radius `r >= 0`.
    pub fn eval_radial(&self, r: f64) -> f64 {
        match (self.kind, self.dim) {
            (ShapeKind::Gaussian, 1) => (-0.5 * r * r).exp() / (2.0 * std::f64::consts::PI).sqrt(),
            (ShapeKind::Gaussian, 2) => (-0.5 * r * r).exp() / (2.0 * std::f64::consts::PI),
            (ShapeKind::Tophat, 1) => {
                if r < 1.0 {
                    0.5
                } else {
                    0.0
                }
            }
            (ShapeKind::Tophat, 2) => {
                if r < 1.0 {
                    1.0 / std::f64::consts::PI
                } else {
                    0.0
                }
            }
            _ => unreachable!("dimension validated at construction"),
        }
    }

    /// Value at a planar point (requires `dim == 2`).
    pub fn eval(&self, x: Point) -> f64 {
        debug_assert_eq!(self.dim, 2);
        self.eval_radial(x.norm())
    }

    /// Numerical L1 mass by adaptive radial quadrature.
    fn radial_mass(&self) -> f64 {
        let upper = match self.kind {
            ShapeKind::Gaussian => 12.0,
            ShapeKind::Tophat => 1.0,
        };
        match self.dim {
            1 => 2.0 * adaptive_simpson(|r| self.eval_radial(r), 0.0, upper, 1e-10),
            2 => {
                2.0 * std::f64::consts::PI
                    * adaptive_simpson(|r| r * self.eval_radial(r), 0.0, upper, 1e-10)
            }
            _ => unreachable!(),
        }
    }
}

/// The scaled kernel `h_eps(x) = eps^{-n} h(x/eps)`, truncated for
/// spatial culling. The Gaussian cutoff at `8 eps` loses relative mass
/// `exp(-32) ~ 1.3e-14`; the tophat is exactly supported on radius `eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledKernel {
    shape: ShapeFunction,
    epsilon: f64,
    truncation_radius: f64,
}

impl ScaledKernel {
    pub fn new(shape: ShapeFunction, epsilon: f64) -> Result<Self, KernelError> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(KernelError::InvalidEpsilon(epsilon));
        }
        let truncation_radius = match shape.kind() {
            ShapeKind::Gaussian => 8.0 * epsilon,
            ShapeKind::Tophat => epsilon,
        };
        Ok(ScaledKernel {
            shape,
            epsilon,
            truncation_radius,
        })
    }

    pub fn shape(&self) -> &ShapeFunction {
        &self.shape
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn truncation_radius(&self) -> f64 {
        self.truncation_radius
    }

    /// `h_eps` at radial distance `r`, zero beyond the truncation radius.
    pub fn eval_radial(&self, r: f64) -> f64 {
        if r > self.truncation_radius {
            return 0.0;
        }
        let scale = match self.shape.dim() {
            1 => self.epsilon.recip(),
            _ => self.epsilon.powi(-2),
        };
        scale * self.shape.eval_radial(r / self.epsilon)
    }

    /// Kernel section `k_eps(x, y) = h_eps(y - x)`.
    pub fn eval(&self, x: Point, y: Point) -> f64 {
        self.eval_radial(x.dist(y))
    }

    /// Supremum of the absolute radial derivative of the planar scaled
    /// Gaussian: `eps^{-3} (2 pi)^{-1} e^{-1/2}`, attained at `r = eps`.
    pub fn radial_derivative_sup(&self) -> Result<f64, KernelError> {
        match self.shape.kind() {
            ShapeKind::Gaussian => {
                debug_assert_eq!(self.shape.dim(), 2);
                Ok((-0.5f64).exp() / (2.0 * std::f64::consts::PI) * self.epsilon.powi(-3))
            }
            kind => Err(KernelError::UnsupportedShape(kind)),
        }
    }

    /// Kernel mass outside the truncation radius (closed form, Gaussian
    /// 2-D tail `exp(-R^2 / 2 eps^2)`; zero for the tophat).
    pub fn truncated_mass(&self) -> f64 {
        match self.shape.kind() {
            ShapeKind::Gaussian => {
                let s = self.truncation_radius / self.epsilon;
                (-0.5 * s * s).exp()
            }
            ShapeKind::Tophat => 0.0,
        }
    }
}

/// Adaptive Simpson quadrature on `[a, b]`.
fn adaptive_simpson(f: impl Fn(f64) -> f64 + Copy, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
    }
    fn recurse(
        f: impl Fn(f64) -> f64 + Copy,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let left = simpson(f, a, m);
        let right = simpson(f, m, b);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            recurse(f, a, m, left, tol / 2.0, depth - 1)
                + recurse(f, m, b, right, tol / 2.0, depth - 1)
        }
    }
    recurse(f, a, b, simpson(f, a, b), tol, 40)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn shape_eval_reference_values() {
        let g2 = ShapeFunction::gaussian(2).unwrap();
        assert_relative_eq!(
            g2.eval(Point::new(0.0, 0.0)),
            1.0 / (2.0 * std::f64::consts::PI),
            max_relative = 1e-12
        );
        let t2 = ShapeFunction::tophat(2).unwrap();
        assert_relative_eq!(
            t2.eval(Point::new(0.5, 0.0)),
            1.0 / std::f64::consts::PI,
            max_relative = 1e-12
        );
        assert_eq!(t2.eval(Point::new(1.5, 0.0)), 0.0);
    }

    #[test]
    fn axiom_flags_reflect_tophat_failures() {
        let t = ShapeFunction::tophat(2).unwrap();
        let a = t.axioms();
        assert!(a.nonneg && a.radial && a.normalized && a.decreasing);
        assert!(!a.continuous && !a.strictly_positive);
        let g = ShapeFunction::gaussian(2).unwrap();
        let a = g.axioms();
        assert!(a.continuous && a.strictly_positive);
    }

    #[test]
    fn kernel_eval_scaling() {
        let g = ShapeFunction::gaussian(2).unwrap();
        let k1 = ScaledKernel::new(g, 1.0).unwrap();
        let p = Point::new(0.3, -0.4);
        assert_relative_eq!(
            k1.eval(p, p),
            1.0 / (2.0 * std::f64::consts::PI),
            max_relative = 1e-12
        );
        let k2 = ScaledKernel::new(g, 2.0).unwrap();
        assert_relative_eq!(
            k2.eval(p, p),
            1.0 / (8.0 * std::f64::consts::PI),
            max_relative = 1e-12
        );
    }

    #[test]
    fn radial_derivative_sup_values() {
        let g = ShapeFunction::gaussian(2).unwrap();
        let k1 = ScaledKernel::new(g, 1.0).unwrap();
        let sup1 = k1.radial_derivative_sup().unwrap();
        // Oracle: numerically maximize |r h_eps(r) / eps^2| over r.
        let mut best = 0.0f64;
        let mut r = 0.0;
        while r < 8.0 {
            best = best.max(r * k1.eval_radial(r));
            r += 1e-4;
        }
        assert_relative_eq!(sup1, best, max_relative = 1e-6);

        let k2 = ScaledKernel::new(g, 2.0).unwrap();
        assert_relative_eq!(k2.radial_derivative_sup().unwrap(), sup1 / 8.0);
        let k_half = ScaledKernel::new(g, 0.5).unwrap();
        assert_relative_eq!(k_half.radial_derivative_sup().unwrap(), sup1 * 8.0);
    }

    #[test]
    fn tophat_has_no_radial_derivative_bound() {
        let t = ShapeFunction::tophat(2).unwrap();
        let k = ScaledKernel::new(t, 1.0).unwrap();
        assert!(matches!(
            k.radial_derivative_sup(),
            Err(KernelError::UnsupportedShape(ShapeKind::Tophat))
        ));
    }

    #[test]
    fn truncation_mass_is_negligible() {
        for eps in [0.01, 1.0, 1700.0] {
            let k = ScaledKernel::new(ShapeFunction::gaussian(2).unwrap(), eps).unwrap();
            assert!(k.truncated_mass() <= 1e-12);
        }
    }

    #[test]
    fn normalization_all_shapes_and_dims() {
        for dim in [1, 2] {
            for kind in [ShapeKind::Gaussian, ShapeKind::Tophat] {
                // Construction itself enforces the 1e-6 normalization check.
                ShapeFunction::new(kind, dim).unwrap();
            }
        }
    }

    #[test]
    fn gaussian_decay_bound() {
        // |h(x)| <= C (1 + |x|)^{-(n+delta)} with C = 1, delta = 1, n = 2.
        let g = ShapeFunction::gaussian(2).unwrap();
        let mut r = 0.0;
        while r <= 50.0 {
            assert!(g.eval_radial(r) <= (1.0 + r).powi(-3));
            r += 0.25;
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ShapeFunction::gaussian(3).is_err());
        let g = ShapeFunction::gaussian(2).unwrap();
        assert!(ScaledKernel::new(g, 0.0).is_err());
        assert!(ScaledKernel::new(g, -1.0).is_err());
        assert!(ScaledKernel::new(g, f64::NAN).is_err());
    }

    proptest! {
        #[test]
        fn kernel_symmetry_and_translation_invariance(
            x in (-10.0f64..10.0, -10.0f64..10.0),
            y in (-10.0f64..10.0, -10.0f64..10.0),
            z in (-5.0f64..5.0, -5.0f64..5.0),
            eps in 0.1f64..4.0,
        ) {
            let k = ScaledKernel::new(ShapeFunction::gaussian(2).unwrap(), eps).unwrap();
            let (x, y, z) = (
                Point::new(x.0, x.1),
                Point::new(y.0, y.1),
                Point::new(z.0, z.1),
            );
            prop_assert_eq!(k.eval(x, y), k.eval(y, x));
            let shifted = k.eval(x + z, y + z);
            prop_assert!((shifted - k.eval(x, y)).abs() <= 1e-12 * k.eval(x, y).max(1e-300));
        }

        #[test]
        fn radial_monotonicity(r1 in 0.0f64..5.0, r2 in 0.0f64..5.0) {
            let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
            for kind in [ShapeKind::Gaussian, ShapeKind::Tophat] {
                let h = ShapeFunction::new(kind, 2).unwrap();
                prop_assert!(h.eval_radial(lo) >= h.eval_radial(hi));
            }
        }
    }
}
