//! Oracle suites shared by the acceptance tests and the command line.

use std::f64::consts::PI;

use serde_json::json;

use crate::boundary::BoundaryFunction;
use crate::bvp::BvpProblem;
use crate::disk::mean_value_check;
use crate::error::Result;
use crate::exec::Execution;
use crate::fd::{assemble_and_solve, FdProblem};
use crate::general::EllipticCoefficients;
use crate::halfplane::{self, identity_gradshteyn_3914, HalfPlaneKernelPoint};
use crate::kernel::KernelSpec;
use crate::report::OracleReport;
use crate::strip::{self, StripKernelPoint};

pub const STRIP_XS: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];
pub const STRIP_YS: [f64; 5] = [0.3, 1.0, PI / 2.0, 2.0, 2.8];
pub const STRIP_RS: [f64; 4] = [0.0, 0.5, 1.0, 3.0];
pub const HALFPLANE_XS: [f64; 4] = [0.0, 0.5, 1.0, 2.0];
pub const HALFPLANE_YS: [f64; 3] = [0.2, 1.0, 3.0];
pub const HALFPLANE_RS: [f64; 3] = [0.1, 1.0, 3.0];
pub const MASS_RS: [f64; 3] = [0.5, 1.0, 3.0];
pub const MASS_YS: [f64; 3] = [0.5, PI / 2.0, 2.5];
pub const GRADSHTEYN_TRIPLES: [(f64, f64, f64); 6] = [
    (1.0, 1.0, 1.0),
    (2.0, 0.5, 1.0),
    (0.5, 2.0, 0.3),
    (3.0, 1.0, 2.0),
    (1.0, 0.2, 0.5),
    (0.3, 1.5, 4.0),
];

/// Series, integral and J1 forms of the strip kernel, pairwise, evaluated at
/// `eval_tol` on the sample grid restricted to `rs`.
pub fn strip_representations(rs: &[f64], eval_tol: f64, tol: f64) -> Result<OracleReport> {
    let mut pairs = Vec::new();
    for &r in rs {
        for &x in &STRIP_XS {
            for &y in &STRIP_YS {
                let p = StripKernelPoint::new(x, y, r)?;
                let s = strip::green_strip_series(p, eval_tol)?;
                let i = strip::green_strip_integral(p, eval_tol)?;
                let j = strip::green_strip_via_j1(p, eval_tol)?;
                pairs.extend([(s, i), (s, j), (i, j)]);
            }
        }
    }
    Ok(OracleReport::from_pairs("strip series/integral/J1", pairs, tol)
        .with_meta("r", rs.to_vec())
        .with_meta("x", STRIP_XS.to_vec())
        .with_meta("y", STRIP_YS.to_vec())
        .with_meta("eval_tol", eval_tol))
}

/// Strip series at `r = 0` against `sin y / (2π(cosh x - cos y))`.
pub fn laplace_reduction(eval_tol: f64, tol: f64) -> Result<OracleReport> {
    let mut pairs = Vec::new();
    for &x in STRIP_XS.iter().chain(&[-0.25, -1.0, 6.0]) {
        for &y in &STRIP_YS {
            let s = strip::green_strip_series(StripKernelPoint::new(x, y, 0.0)?, eval_tol)?;
            pairs.push((s, strip::green_strip_laplace(x, y)?));
        }
    }
    Ok(OracleReport::from_pairs("strip series at r=0 vs closed form", pairs, tol).with_meta("eval_tol", eval_tol))
}

/// Half-plane sine integral against the K1 closed form on the sample grid
/// restricted to `rs`. Points on `x = 0` are skipped at `r = 0`, where the
/// integral only converges in the Abel sense.
pub fn halfplane_representations(rs: &[f64], eval_tol: f64, tol: f64) -> Result<OracleReport> {
    let mut pairs = Vec::new();
    for &r in rs {
        for &x in &HALFPLANE_XS {
            if x == 0.0 && r == 0.0 {
                continue;
            }
            for &y in &HALFPLANE_YS {
                let p = HalfPlaneKernelPoint::new(x, y, r)?;
                pairs.push((halfplane::green_halfplane_integral(p, eval_tol)?, halfplane::green_halfplane_closed(p)?));
            }
        }
    }
    Ok(OracleReport::from_pairs("half-plane integral vs closed form", pairs, tol)
        .with_meta("r", rs.to_vec())
        .with_meta("x", HALFPLANE_XS.to_vec())
        .with_meta("y", HALFPLANE_YS.to_vec()))
}

pub fn gradshteyn_suite(tol: f64) -> Result<OracleReport> {
    let mut pairs = Vec::new();
    let mut triples = Vec::new();
    for &(a, b, g) in &GRADSHTEYN_TRIPLES {
        let rep = identity_gradshteyn_3914(a, b, g, tol)?;
        pairs.push((rep.max_abs, 0.0));
        triples.push(json!({ "a": a, "beta": b, "gamma": g, "deviation": rep.max_abs, "passed": rep.passed }));
    }
    Ok(OracleReport::from_pairs("sine transform identity", pairs, tol).with_meta("triples", triples))
}

/// Quadrature masses of both kernels against the closed forms.
pub fn mass_suite(tol: f64) -> Result<OracleReport> {
    let mut pairs = Vec::new();
    for &r in &MASS_RS {
        for &y in &MASS_YS {
            let (m, _) = KernelSpec::strip(r, 1e-3 * tol).slice(y)?.numeric_mass(0.1 * tol)?;
            pairs.push((m, strip::strip_mass(y, r)));
            let (m, _) = KernelSpec::halfplane(r, 1e-3 * tol).slice(y)?.numeric_mass(0.1 * tol)?;
            pairs.push((m, halfplane::halfplane_mass(y, r)));
        }
    }
    Ok(OracleReport::from_pairs("kernel masses", pairs, tol)
        .with_meta("r", MASS_RS.to_vec())
        .with_meta("y", MASS_YS.to_vec()))
}

/// Named canonical problems whose interiors satisfy `(Δ - r²)V = 0`.
pub fn mean_value_fields() -> Result<Vec<(String, BvpProblem)>> {
    let gauss = BoundaryFunction::gaussian(0.0, 0.5)?;
    Ok(vec![
        (
            "strip cosine r=1".into(),
            BvpProblem::Strip { bottom: BoundaryFunction::cosine(1.0)?, top: BoundaryFunction::zero(), r: 1.0 },
        ),
        (
            "strip gaussian r=1".into(),
            BvpProblem::Strip { bottom: gauss.clone(), top: BoundaryFunction::zero(), r: 1.0 },
        ),
        (
            "strip step/gaussian r=0.5".into(),
            BvpProblem::Strip { bottom: BoundaryFunction::step(0.0), top: gauss.shifted(1.0), r: 0.5 },
        ),
        ("half-plane cosine r=1".into(), BvpProblem::HalfPlane { phi: BoundaryFunction::cosine(1.0)?, r: 1.0 }),
        ("half-plane gaussian r=0.5".into(), BvpProblem::HalfPlane { phi: gauss, r: 0.5 }),
    ])
}

pub const MEAN_VALUE_CENTERS: [(f64, f64); 5] = [(0.0, PI / 2.0), (0.7, 1.0), (-1.3, 2.0), (2.5, 0.6), (0.0, 2.6)];
pub const MEAN_VALUE_RADII: [f64; 2] = [0.1, 0.3];

/// Screened mean-value identity on every field of [`mean_value_fields`],
/// one report per field.
pub fn mean_value_suite(tol: f64, exec: Execution) -> Result<Vec<OracleReport>> {
    let eval_tol = 1e-3 * tol;
    let mut out = Vec::new();
    for (name, problem) in mean_value_fields()? {
        let r = match &problem {
            BvpProblem::Strip { r, .. } | BvpProblem::HalfPlane { r, .. } => *r,
            _ => unreachable!("only canonical fields"),
        };
        let cases: Vec<((f64, f64), f64)> = MEAN_VALUE_CENTERS
            .iter()
            .flat_map(|&c| MEAN_VALUE_RADII.iter().map(move |&rad| (c, rad)))
            .collect();
        let reports = exec.map(cases.len(), |i| {
            let (center, radius) = cases[i];
            mean_value_check(
                |x, y| problem.value_at(x, y, eval_tol).map(|(v, _)| v),
                problem.domain(),
                problem.height(),
                center,
                radius,
                r,
                tol,
            )
        });
        let devs = reports.into_iter().map(|r| r.map(|r| r.max_abs)).collect::<Result<Vec<_>>>()?;
        out.push(
            OracleReport::from_pairs(format!("mean value: {name}"), devs.iter().map(|&d| (d, 0.0)), tol)
                .with_meta("centers", MEAN_VALUE_CENTERS.iter().map(|&(x, y)| vec![x, y]).collect::<Vec<_>>())
                .with_meta("radii", MEAN_VALUE_RADII.to_vec()),
        );
    }
    Ok(out)
}

/// Coefficient sets of the finite-difference comparison, all on strips of width 1.
pub fn fd_coefficient_sets() -> Vec<(&'static str, EllipticCoefficients)> {
    let base = EllipticCoefficients::canonical(1.0).with_width(1.0);
    vec![
        ("canonical", base),
        ("anisotropic", EllipticCoefficients { sigma1: 1.5, sigma2: 0.8, ..base }),
        ("correlated", EllipticCoefficients { rho: 0.6, ..base }),
        ("drift x", EllipticCoefficients { alpha1: 0.5, ..base }),
        ("drift y", EllipticCoefficients { alpha2: 0.5, ..base }),
        (
            "mixed",
            EllipticCoefficients { sigma1: 1.2, sigma2: 0.9, rho: -0.4, alpha1: 0.4, alpha2: -0.3, ..base },
        ),
    ]
}

/// Settings of [`fd_oracle`].
#[derive(Debug, Clone)]
pub struct FdOracleConfig {
    /// The rectangle is `[-x_half, x_half] × [0, l]`.
    pub x_half: f64,
    pub spacings: Vec<f64>,
    /// Comparison nodes are spaced `compare_dx × compare_dy`.
    pub compare_dx: f64,
    pub compare_dy: f64,
    pub lin_tol: f64,
    pub analytic_tol: f64,
    pub tol: f64,
    pub min_order: f64,
}

impl Default for FdOracleConfig {
    fn default() -> Self {
        Self {
            x_half: 5.0,
            spacings: vec![1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0],
            compare_dx: 0.25,
            compare_dy: 0.125,
            lin_tol: 1e-12,
            analytic_tol: 1e-11,
            tol: 5e-3,
            min_order: 1.8,
        }
    }
}

fn nodes(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|i| lo + step * i as f64).collect()
}

/// Convolution solution of the strip problem against the finite-difference
/// solution at each spacing. Sides of the rectangle carry the convolution
/// values. Passes iff the error at the finest spacing is within `cfg.tol` and
/// every observed order is at least `cfg.min_order`.
pub fn fd_oracle(
    c: &EllipticCoefficients,
    phi: &BoundaryFunction,
    cfg: &FdOracleConfig,
    exec: Execution,
) -> Result<OracleReport> {
    let problem = BvpProblem::StripGeneral { phi: phi.clone(), coefficients: *c };
    problem.validate()?;
    let l = c.width_l;
    let xs = nodes(-cfg.x_half, cfg.x_half, cfg.compare_dx);
    let ys = nodes(0.0, l, cfg.compare_dy);
    let nx = xs.len();
    let exact = exec
        .map(xs.len() * ys.len(), |i| problem.value_at(xs[i % nx], ys[i / nx], cfg.analytic_tol).map(|v| v.0))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut errors = Vec::new();
    let mut last = Vec::new();
    let mut iterations = Vec::new();
    for &h in &cfg.spacings {
        let sides = |x: f64, y: f64| problem.value_at(x, y, cfg.analytic_tol).map(|v| v.0).unwrap_or(f64::NAN);
        let p = FdProblem::from_edge_fn(*c, (-cfg.x_half, cfg.x_half), (0.0, l), h, sides)?;
        let sol = assemble_and_solve(&p, cfg.lin_tol, exec)?;
        let coarse = crate::fd::restrict_to(&sol.field, &xs, &ys)?;
        last = coarse.values.iter().copied().zip(exact.iter().copied()).collect::<Vec<_>>();
        errors.push(last.iter().map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        iterations.push(sol.iterations);
    }
    let orders: Vec<f64> = errors
        .windows(2)
        .zip(cfg.spacings.windows(2))
        .map(|(e, h)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
        .collect();
    let rep = OracleReport::from_pairs("finite-difference oracle", last, cfg.tol)
        .with_meta("coefficients", serde_json::to_value(c).unwrap_or_default())
        .with_meta("boundary", phi.name.clone())
        .with_meta("spacings", cfg.spacings.clone())
        .with_meta("errors", errors)
        .with_meta("orders", orders.clone())
        .with_meta("iterations", iterations)
        .with_meta("min_order", cfg.min_order);
    if orders.iter().any(|&q| !(q >= cfg.min_order)) {
        Ok(rep.fail("observed order below the required minimum"))
    } else {
        Ok(rep)
    }
}
