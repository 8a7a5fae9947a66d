//! Grid-evaluation throughput: rayon-parallel vs sequential smoothing of a
//! piecewise field over an evaluation grid.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use polysmooth::geometry::{self, Polygon, PolygonalDomain, DEFAULT_MIN_ANGLE};
use polysmooth::kernels::{ScaledKernel, ShapeFunction};
use polysmooth::operators::{
    Components, EvaluationGrid, OperatorKind, PiecewiseField, SmoothingContext,
};
use polysmooth::quadrature::QuadratureRule;

fn setup(max_area: f64, eps: f64) -> (SmoothingContext, PiecewiseField, EvaluationGrid) {
    let domain = PolygonalDomain::unit_square();
    let tri = geometry::triangulate(&domain, max_area, DEFAULT_MIN_ANGLE).unwrap();
    let rule = QuadratureRule::from_triangulation(&tri);
    let kernel = ScaledKernel::new(ShapeFunction::gaussian(2).unwrap(), eps).unwrap();
    let ctx = SmoothingContext::new(
        domain,
        rule.clone(),
        kernel,
        SmoothingContext::DEFAULT_DEGREE_FLOOR,
    )
    .unwrap();
    let mut field = PiecewiseField::new(1);
    field
        .add_sampled_piece(Polygon::unit_square(), rule, |p| {
            Components::scalar((3.0 * p.x).sin() + p.y)
        })
        .unwrap();
    let grid = EvaluationGrid::over_domain(ctx.domain(), 48, 48);
    (ctx, field, grid)
}

fn bench_grid_eval(c: &mut Criterion) {
    let mut group = c.benchmark_group("grid_eval_markov");
    group.sample_size(10);
    for &(max_area, eps) in &[(2e-3, 0.05), (5e-4, 0.02)] {
        let (ctx, field, grid) = setup(max_area, eps);
        let id = format!("area={max_area:.0e}_eps={eps}");
        group.bench_with_input(BenchmarkId::new("parallel", &id), &(), |b, _| {
            b.iter(|| {
                ctx.evaluate_grid(&field, &grid, OperatorKind::Markov)
                    .unwrap()
            })
        });
        group.bench_with_input(BenchmarkId::new("serial", &id), &(), |b, _| {
            b.iter(|| {
                ctx.evaluate_grid_serial(&field, &grid, OperatorKind::Markov)
                    .unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_grid_eval);
criterion_main!(benches);
