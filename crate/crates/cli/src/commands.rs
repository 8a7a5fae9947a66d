//! Subcommand implementations.

use crate::config::{pick, require, FileConfig};
use crate::output::{
    atomic_write, grid_to_binary, grid_to_csv, sha256_file, sha256_hex, write_json,
};
use crate::{AppError, Cli, Command};
use clap::Args;
use polysmooth::dem::{self, FieldQuadrature, Packing};
use polysmooth::geometry::{self, Polygon, PolygonalDomain, Triangulation};
use polysmooth::kernels::{ScaledKernel, ShapeFunction};
use polysmooth::operators::{
    convergence_study, Components, EvaluationGrid, GridField, OperatorKind, PiecewiseField,
    SmoothingContext,
};
use polysmooth::quadrature::{triangulation_error_bound, QuadratureRule};
use polysmooth::thickness::{thickness_scan, ProbeStrategy};
use serde_json::json;
use std::path::{Path, PathBuf};

pub fn run(cli: &Cli) -> Result<(), AppError> {
    let file = FileConfig::load(cli.config.as_deref())?;
    let out = pick(cli.out.clone(), file.out.clone(), PathBuf::from("out"));
    std::fs::create_dir_all(&out)?;
    let seed = pick(cli.seed, file.seed, 0);
    match &cli.command {
        Command::Triangulate(args) => cmd_triangulate(args, &file, &out, seed),
        Command::Smooth(args) => cmd_smooth(args, &file, &out, seed),
        Command::Fields(args) => cmd_fields(args, &file, &out, seed),
        Command::Convergence(args) => cmd_convergence(args, &file, &out),
        Command::Thickness(args) => cmd_thickness(args, &file, &out, seed),
    }
}

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

fn load_domain(path: &Path) -> Result<PolygonalDomain, AppError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::validation(format!("domain {}: {e}", path.display())))?;
    let raw: PolygonalDomain = serde_json::from_str(&text)
        .map_err(|e| AppError::validation(format!("domain {}: {e}", path.display())))?;
    // Deserialization validates each ring; re-run the cross-ring checks.
    Ok(PolygonalDomain::new(raw.outer, raw.holes)?)
}

fn parse_kernel(kind: &str, epsilon: f64) -> Result<ScaledKernel, AppError> {
    let shape = match kind {
        "gaussian" => ShapeFunction::gaussian(2)?,
        "tophat" => ShapeFunction::tophat(2)?,
        other => {
            return Err(AppError::validation(format!(
                "unknown kernel `{other}` (expected gaussian | tophat)"
            )))
        }
    };
    Ok(ScaledKernel::new(shape, epsilon)?)
}

#[derive(Debug, Clone, Copy)]
struct QuadratureSettings {
    tri_backend: bool,
    max_area: f64,
    min_angle: f64,
    mc_n: usize,
}

impl QuadratureSettings {
    fn resolve(
        backend: Option<String>,
        file: &crate::config::QuadratureConfig,
        max_area: Option<f64>,
        min_angle_deg: Option<f64>,
        mc_n: Option<usize>,
    ) -> Result<Self, AppError> {
        let backend = pick(backend, file.backend.clone(), "tri".into());
        let tri_backend = match backend.as_str() {
            "tri" => true,
            "mc" => false,
            other => {
                return Err(AppError::validation(format!(
                    "unknown quadrature backend `{other}` (expected tri | mc)"
                )))
            }
        };
        let min_angle_deg = pick(min_angle_deg, file.min_angle_deg, 20.0);
        Ok(QuadratureSettings {
            tri_backend,
            max_area: pick(max_area, file.max_area, 1e-3),
            min_angle: min_angle_deg.to_radians(),
            mc_n: pick(mc_n, file.mc_n, 10_000),
        })
    }

    fn domain_rule(
        &self,
        domain: &PolygonalDomain,
        seed: u64,
    ) -> Result<(QuadratureRule, Option<Triangulation>), AppError> {
        if self.tri_backend {
            let tri = geometry::triangulate(domain, self.max_area, self.min_angle)?;
            Ok((QuadratureRule::from_triangulation(&tri), Some(tri)))
        } else {
            Ok((QuadratureRule::monte_carlo(domain, self.mc_n, seed)?, None))
        }
    }

    fn field_quadrature(&self, piece_max_area: Option<f64>, seed: u64) -> FieldQuadrature {
        if self.tri_backend {
            FieldQuadrature::Triangulation {
                max_area: piece_max_area.unwrap_or(self.max_area),
                min_angle: self.min_angle,
            }
        } else {
            FieldQuadrature::MonteCarlo {
                nodes: self.mc_n,
                seed,
            }
        }
    }
}

/// Numeric hard-fail: any non-finite value at a masked-in cell, including
/// degree-floor casualties, aborts with its location.
fn check_grid(
    grid: &EvaluationGrid,
    field: &GridField,
    label: &str,
    floor: f64,
) -> Result<(), AppError> {
    if let Some(&(at, value)) = field.degree_failures.first() {
        return Err(AppError::numeric(format!(
            "degree {value:.6} below floor {floor} at ({}, {}) while smoothing {label}",
            at.x, at.y
        )));
    }
    for i in 0..grid.len() {
        if grid.mask()[i] && field.value(i).iter().any(|v| !v.is_finite()) {
            let p = grid.point(i);
            return Err(AppError::numeric(format!(
                "non-finite {label} value at grid point ({}, {})",
                p.x, p.y
            )));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// triangulate
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct TriangulateArgs {
    #[arg(long)]
    pub domain: Option<PathBuf>,
    /// Quadrature backend: tri | mc.
    #[arg(long)]
    pub quadrature: Option<String>,
    /// Maximum triangle area (m^2).
    #[arg(long)]
    pub max_area: Option<f64>,
    /// Minimum triangle angle (degrees).
    #[arg(long)]
    pub min_angle_deg: Option<f64>,
    /// Monte Carlo node count (mc backend).
    #[arg(long)]
    pub mc_n: Option<usize>,
}

fn cmd_triangulate(
    args: &TriangulateArgs,
    file: &FileConfig,
    out: &Path,
    seed: u64,
) -> Result<(), AppError> {
    let domain_path = require(args.domain.clone(), file.domain.clone(), "domain")?;
    let domain = load_domain(&domain_path)?;
    let quad = QuadratureSettings::resolve(
        args.quadrature.clone(),
        &file.quadrature,
        args.max_area,
        args.min_angle_deg,
        args.mc_n,
    )?;
    let (rule, tri) = quad.domain_rule(&domain, seed)?;

    let mut sidecar = Vec::new();
    rule.write_binary(&mut sidecar)?;
    atomic_write(&out.join("quadrature.qbin"), &sidecar)?;

    let stats = if let Some(tri) = &tri {
        let mut csv = String::from("x1,y1,x2,y2,x3,y3,area\n");
        let mut min_angle = f64::INFINITY;
        for t in &tri.triangles {
            let (a, b, c) = (t.a, t.b, t.c);
            csv.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                a.x,
                a.y,
                b.x,
                b.y,
                c.x,
                c.y,
                t.area()
            ));
            min_angle = min_angle.min(t.min_angle());
        }
        atomic_write(&out.join("mesh.csv"), csv.as_bytes())?;
        json!({
            "backend": "tri",
            "triangles": tri.len(),
            "min_angle_deg": min_angle.to_degrees(),
            "max_area": quad.max_area,
            "area_sum": tri.total_area(),
            "domain_area": domain.area(),
        })
    } else {
        json!({
            "backend": "mc",
            "nodes": rule.len(),
            "area_estimate": rule.total_weight(),
            "domain_area": domain.area(),
            "seed": seed,
        })
    };
    write_json(&out.join("stats.json"), &stats)
}

// ---------------------------------------------------------------------------
// smooth
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct SmoothArgs {
    #[arg(long)]
    pub domain: Option<PathBuf>,
    /// Snapshot JSONL path; omit together with --synthesize for synthetic input.
    #[arg(long)]
    pub snapshots: Option<PathBuf>,
    /// Synthesize this many floes instead of reading snapshots.
    #[arg(long)]
    pub synthesize: Option<usize>,
    /// Packing for synthesis: dense | sparse.
    #[arg(long)]
    pub packing: Option<String>,
    /// Ice density (kg/m^3). Required; there is no universal default.
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Kernel: gaussian | tophat.
    #[arg(long)]
    pub kernel: Option<String>,
    /// Operator: markov | bistochastic.
    #[arg(long)]
    pub operator: Option<String>,
    /// Grid resolution (cells per side).
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub quadrature: Option<String>,
    #[arg(long)]
    pub max_area: Option<f64>,
    #[arg(long)]
    pub min_angle_deg: Option<f64>,
    #[arg(long)]
    pub mc_n: Option<usize>,
    /// Max triangle area for per-floe field quadrature.
    #[arg(long)]
    pub piece_max_area: Option<f64>,
    #[arg(long)]
    pub degree_floor: Option<f64>,
}

fn cmd_smooth(
    args: &SmoothArgs,
    file: &FileConfig,
    out: &Path,
    seed: u64,
) -> Result<(), AppError> {
    let domain_path = require(args.domain.clone(), file.domain.clone(), "domain")?;
    let domain = load_domain(&domain_path)?;
    let epsilon = require(args.epsilon, file.epsilon, "epsilon")?;
    if !(epsilon > 0.0) {
        return Err(AppError::validation("epsilon must be positive"));
    }
    let kernel_kind = pick(args.kernel.clone(), file.kernel.clone(), "gaussian".into());
    let kernel = parse_kernel(&kernel_kind, epsilon)?;
    let operator = match pick(args.operator.clone(), file.operator.clone(), "markov".into()).as_str()
    {
        "markov" => OperatorKind::Markov,
        "bistochastic" => OperatorKind::Bistochastic,
        other => {
            return Err(AppError::validation(format!(
                "unknown operator `{other}` (expected markov | bistochastic)"
            )))
        }
    };
    let resolution = pick(args.grid, file.grid, 100);
    if resolution < 2 {
        return Err(AppError::validation("grid resolution must be at least 2"));
    }
    let floor = pick(args.degree_floor, file.degree_floor, SmoothingContext::DEFAULT_DEGREE_FLOOR);
    let rho = require(args.rho, file.smooth.rho, "rho")?;
    if !(rho > 0.0) {
        return Err(AppError::validation("rho must be positive"));
    }
    let quad = QuadratureSettings::resolve(
        args.quadrature.clone(),
        &file.quadrature,
        args.max_area,
        args.min_angle_deg,
        args.mc_n,
    )?;

    // Input snapshots: file or deterministic synthesis.
    let synthesize = args.synthesize.or(file.smooth.synthesize);
    let (snapshots, snapshots_hash) = match (&args.snapshots, synthesize) {
        (Some(_), Some(_)) => {
            return Err(AppError::validation(
                "--snapshots and --synthesize are mutually exclusive",
            ))
        }
        (Some(path), None) => (dem::load_snapshots(path)?, Some(sha256_file(path)?)),
        (None, Some(count)) => {
            let packing = match pick(args.packing.clone(), file.smooth.packing.clone(), "dense".into())
                .as_str()
            {
                "dense" => Packing::Dense,
                "sparse" => Packing::Sparse,
                other => {
                    return Err(AppError::validation(format!(
                        "unknown packing `{other}` (expected dense | sparse)"
                    )))
                }
            };
            (vec![dem::synthesize_floes(&domain, count, seed, packing)], None)
        }
        (None, None) => match &file.smooth.snapshots {
            Some(path) => (dem::load_snapshots(path)?, Some(sha256_file(path)?)),
            None => {
                return Err(AppError::validation(
                    "missing snapshots: pass --snapshots or --synthesize",
                ))
            }
        },
    };

    let (rule, tri) = quad.domain_rule(&domain, seed)?;
    let quadrature_bound = match (&tri, kernel.shape().kind()) {
        (Some(tri), polysmooth::kernels::ShapeKind::Gaussian) => {
            Some(triangulation_error_bound(tri, &kernel)?)
        }
        _ => None,
    };
    let ctx = SmoothingContext::new(domain.clone(), rule, kernel, floor)?;
    let grid = EvaluationGrid::over_domain(&domain, resolution, resolution);
    let piece_quad = quad.field_quadrature(
        args.piece_max_area.or(file.smooth.piece_max_area),
        seed.wrapping_add(1),
    );

    let mut min_degree = f64::INFINITY;
    let mut mass_residual: Option<f64> = None;
    for (idx, snap) in snapshots.iter().enumerate() {
        snap.warn_floes_outside(&domain);
        let mass = dem::mass_density_field(snap, rho, &piece_quad)?;
        let velocity = dem::velocity_field(snap, &piece_quad)?;
        let stress = dem::stress_field(snap, &piece_quad, false)?;
        for (label, field) in [("mass", &mass), ("velocity", &velocity), ("stress", &stress)]
        {
            let smoothed = ctx.evaluate_grid(field, &grid, operator)?;
            check_grid(&grid, &smoothed, label, floor)?;
            min_degree = min_degree.min(smoothed.min_degree);
            atomic_write(
                &out.join(format!("{label}_{idx:03}.csv")),
                grid_to_csv(&grid, &smoothed).as_bytes(),
            )?;
            atomic_write(
                &out.join(format!("{label}_{idx:03}.bin")),
                &grid_to_binary(&grid, &smoothed),
            )?;
        }
        if operator == OperatorKind::Bistochastic && mass.node_count() > 0 {
            // Mass-preservation residual, measured with the domain rule.
            let plan = ctx.bistochastic_plan(&mass)?;
            let mut smoothed_mass = 0.0;
            for (&node, &w) in ctx.rule().nodes().iter().zip(ctx.rule().weights()) {
                smoothed_mass += w * plan.eval(node)?.0[0];
            }
            let exact = mass.integral()[0];
            let residual = (smoothed_mass - exact).abs() / exact.abs().max(f64::MIN_POSITIVE);
            mass_residual = Some(mass_residual.map_or(residual, |r: f64| r.max(residual)));
        }
    }

    let resolved = json!({
        "command": "smooth",
        "domain": domain_path,
        "epsilon": epsilon,
        "kernel": kernel_kind,
        "operator": if operator == OperatorKind::Markov { "markov" } else { "bistochastic" },
        "grid": resolution,
        "degree_floor": floor,
        "rho": rho,
        "seed": seed,
        "quadrature": {
            "backend": if quad.tri_backend { "tri" } else { "mc" },
            "max_area": quad.max_area,
            "min_angle_deg": quad.min_angle.to_degrees(),
            "mc_n": quad.mc_n,
        },
        "piece_quadrature": piece_quad,
        "synthesize": synthesize,
    });
    let domain_hash = sha256_file(&domain_path)?;
    let config_hash = sha256_hex(
        format!(
            "{resolved}|domain:{domain_hash}|snapshots:{}",
            snapshots_hash.as_deref().unwrap_or("synthetic")
        )
        .as_bytes(),
    );
    write_json(
        &out.join("manifest.json"),
        &json!({
            "config": resolved,
            "config_hash": config_hash,
            "inputs": { "domain_sha256": domain_hash, "snapshots_sha256": snapshots_hash },
            "snapshots": snapshots.len(),
            "min_degree": min_degree,
            "quadrature_bound": quadrature_bound,
            "mass_residual": mass_residual,
        }),
    )
}

// ---------------------------------------------------------------------------
// fields
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct FieldsArgs {
    #[arg(long)]
    pub snapshots: Option<PathBuf>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub quadrature: Option<String>,
    #[arg(long)]
    pub max_area: Option<f64>,
    #[arg(long)]
    pub min_angle_deg: Option<f64>,
    #[arg(long)]
    pub mc_n: Option<usize>,
}

fn field_bundle(field: &PiecewiseField) -> serde_json::Value {
    json!({
        "dim": field.dim(),
        "pieces": field
            .pieces()
            .iter()
            .map(|p| {
                json!({
                    "poly": p.polygon.vertices().iter().map(|v| [v.x, v.y]).collect::<Vec<_>>(),
                    "nodes": p.rule.nodes().iter().map(|n| [n.x, n.y]).collect::<Vec<_>>(),
                    "weights": p.rule.weights(),
                    "values": p.values,
                })
            })
            .collect::<Vec<_>>(),
    })
}

fn cmd_fields(
    args: &FieldsArgs,
    file: &FileConfig,
    out: &Path,
    seed: u64,
) -> Result<(), AppError> {
    let path = require(
        args.snapshots.clone(),
        file.smooth.snapshots.clone(),
        "snapshots",
    )?;
    let rho = require(args.rho, file.smooth.rho, "rho")?;
    if !(rho > 0.0) {
        return Err(AppError::validation("rho must be positive"));
    }
    let quad = QuadratureSettings::resolve(
        args.quadrature.clone(),
        &file.quadrature,
        args.max_area,
        args.min_angle_deg,
        args.mc_n,
    )?;
    let piece_quad = quad.field_quadrature(None, seed);
    let snapshots = dem::load_snapshots(&path)?;
    for (idx, snap) in snapshots.iter().enumerate() {
        let bundle = json!({
            "t": snap.time,
            "mass": field_bundle(&dem::mass_density_field(snap, rho, &piece_quad)?),
            "velocity": field_bundle(&dem::velocity_field(snap, &piece_quad)?),
            "stress": field_bundle(&dem::stress_field(snap, &piece_quad, false)?),
        });
        write_json(&out.join(format!("fields_{idx:03}.json")), &bundle)?;
    }
    write_json(
        &out.join("manifest.json"),
        &json!({
            "command": "fields",
            "snapshots": snapshots.len(),
            "rho": rho,
            "inputs": { "snapshots_sha256": sha256_file(&path)? },
            "piece_quadrature": piece_quad,
        }),
    )
}

// ---------------------------------------------------------------------------
// convergence
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    #[arg(long)]
    pub domain: Option<PathBuf>,
    /// Strictly decreasing epsilon list, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    /// Test field: step | constant.
    #[arg(long)]
    pub field: Option<String>,
    #[arg(long)]
    pub grid: Option<usize>,
    /// Max triangle area at the largest epsilon; refined as (eps/eps_max)^2.
    #[arg(long)]
    pub max_area: Option<f64>,
    #[arg(long)]
    pub min_angle_deg: Option<f64>,
    /// Skip the empirical quadrature-dominance guard.
    #[arg(long)]
    pub skip_quadrature_check: bool,
}

fn cmd_convergence(
    args: &ConvergenceArgs,
    file: &FileConfig,
    out: &Path,
) -> Result<(), AppError> {
    let domain_path = require(args.domain.clone(), file.domain.clone(), "domain")?;
    let domain = load_domain(&domain_path)?;
    let eps = require(
        args.eps.clone(),
        file.convergence.eps_list.clone(),
        "eps list",
    )?;
    if eps.is_empty() || eps.windows(2).any(|w| w[1] >= w[0]) || eps.iter().any(|&e| e <= 0.0) {
        return Err(AppError::validation(
            "eps list must be positive and strictly decreasing",
        ));
    }
    let field_kind = pick(args.field.clone(), file.convergence.field.clone(), "step".into());
    let resolution = pick(args.grid, file.grid, 100);
    let base_area = pick(args.max_area, file.quadrature.max_area, 2e-3);
    let min_angle = pick(args.min_angle_deg, file.quadrature.min_angle_deg, 20.0).to_radians();

    let rect = domain.bounding_rectangle();
    let xc = 0.5 * (rect.min.x + rect.max.x);
    let grid = EvaluationGrid::over_domain(&domain, resolution, resolution);

    let eps_max = eps[0];
    let mut contexts = Vec::new();
    let mut probes = Vec::new();
    for &e in &eps {
        let area = base_area * (e / eps_max).powi(2);
        let kernel = parse_kernel("gaussian", e)?;
        let mk = |a: f64| -> Result<SmoothingContext, AppError> {
            let tri = geometry::triangulate(&domain, a, min_angle)?;
            Ok(SmoothingContext::new(
                domain.clone(),
                QuadratureRule::from_triangulation(&tri),
                kernel.clone(),
                SmoothingContext::DEFAULT_DEGREE_FLOOR,
            )?)
        };
        contexts.push(mk(area)?);
        if !args.skip_quadrature_check {
            probes.push(mk(area / 9.0)?);
        }
    }

    // The shared field is quadratured at the finest level so its own error
    // never dominates the study.
    let finest_area = base_area * (eps[eps.len() - 1] / eps_max).powi(2);
    let (field, exact) = match field_kind.as_str() {
        "step" => {
            let left = Polygon::new(vec![
                rect.min,
                polysmooth::Point::new(xc, rect.min.y),
                polysmooth::Point::new(xc, rect.max.y),
                polysmooth::Point::new(rect.min.x, rect.max.y),
            ])
            .map_err(|e| AppError::validation(e.to_string()))?;
            let tri = geometry::triangulate_polygon(&left, finest_area, min_angle)?;
            let mut f = PiecewiseField::new(1);
            f.add_constant_piece(left, QuadratureRule::from_triangulation(&tri), &[1.0])?;
            let exact = GridField::sample(&grid, 1, |p| {
                Components::scalar(if p.x < xc { 1.0 } else { 0.0 })
            });
            (f, exact)
        }
        "constant" => {
            let tri = geometry::triangulate_polygon(&domain.outer, finest_area, min_angle)?;
            let mut f = PiecewiseField::new(1);
            f.add_constant_piece(
                domain.outer.clone(),
                QuadratureRule::from_triangulation(&tri),
                &[1.0],
            )?;
            let exact = GridField::sample(&grid, 1, |_| Components::scalar(1.0));
            (f, exact)
        }
        other => {
            return Err(AppError::validation(format!(
                "unknown field `{other}` (expected step | constant)"
            )))
        }
    };

    let report = convergence_study(
        &contexts,
        (!args.skip_quadrature_check).then_some(probes.as_slice()),
        &field,
        &exact,
        &grid,
    )?;

    let mut csv = String::from("epsilon,l1,l2,linf\n");
    for row in &report.rows {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            row.epsilon, row.l1, row.l2, row.linf
        ));
    }
    atomic_write(&out.join("convergence.csv"), csv.as_bytes())?;
    write_json(
        &out.join("convergence.json"),
        &json!({
            "field": field_kind,
            "rows": report.rows,
            "slope_l1": report.slope_l1,
            "slope_l2": report.slope_l2,
            "slope_linf": report.slope_linf,
        }),
    )
}

// ---------------------------------------------------------------------------
// thickness
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct ThicknessArgs {
    #[arg(long)]
    pub domain: Option<PathBuf>,
    /// Strictly decreasing epsilon list, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    /// Random probe count (interior and boundary-adjacent each).
    #[arg(long)]
    pub probes: Option<usize>,
    /// Monte Carlo samples per density evaluation.
    #[arg(long)]
    pub samples: Option<usize>,
}

fn cmd_thickness(
    args: &ThicknessArgs,
    file: &FileConfig,
    out: &Path,
    seed: u64,
) -> Result<(), AppError> {
    let domain_path = require(args.domain.clone(), file.domain.clone(), "domain")?;
    let domain = load_domain(&domain_path)?;
    let eps = require(args.eps.clone(), file.thickness.eps_list.clone(), "eps list")?;
    if eps.is_empty() || eps.windows(2).any(|w| w[1] >= w[0]) || eps.iter().any(|&e| e <= 0.0) {
        return Err(AppError::validation(
            "eps list must be positive and strictly decreasing",
        ));
    }
    let probes = pick(args.probes, file.thickness.probes, 8);
    let samples = pick(args.samples, file.thickness.samples, 100_000);
    let report = thickness_scan(
        &domain,
        &eps,
        ProbeStrategy {
            interior: probes,
            boundary_adjacent: probes,
            seed,
        },
        samples,
    );
    write_json(&out.join("thickness.json"), &report)
}
