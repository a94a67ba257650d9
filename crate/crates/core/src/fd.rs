//! Second-order finite-difference oracle for the Dirichlet problem of the
//! general operator on a rectangle.

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::field::FieldGrid;
use crate::general::EllipticCoefficients;
use crate::report::OracleReport;

/// Dirichlet problem on `[x_lo, x_hi] × [y_lo, y_hi]` with spacing `h`.
///
/// Edge vectors run in increasing coordinate: `bottom`/`top` have `nx + 1`
/// entries, `left`/`right` have `ny + 1`; corners must agree.
#[derive(Debug, Clone)]
pub struct FdProblem {
    pub coefficients: EllipticCoefficients,
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
    pub h: f64,
    pub bottom: Vec<f64>,
    pub top: Vec<f64>,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

fn steps(lo: f64, hi: f64, h: f64) -> Result<usize> {
    let n = ((hi - lo) / h).round();
    if !(n >= 2.0) || ((hi - lo) - n * h).abs() > 1e-9 * (hi - lo).abs().max(1.0) {
        return Err(Error::Config(format!(
            "spacing {h} does not divide [{lo}, {hi}] into at least two cells"
        )));
    }
    Ok(n as usize)
}

impl FdProblem {
    /// Problem whose edge values are `g(x, y)` sampled on the boundary nodes.
    pub fn from_edge_fn<G: Fn(f64, f64) -> f64>(
        coefficients: EllipticCoefficients,
        (x_lo, x_hi): (f64, f64),
        (y_lo, y_hi): (f64, f64),
        h: f64,
        g: G,
    ) -> Result<Self> {
        let nx = steps(x_lo, x_hi, h)?;
        let ny = steps(y_lo, y_hi, h)?;
        let x = |i: usize| x_lo + i as f64 * h;
        let y = |j: usize| y_lo + j as f64 * h;
        Ok(Self {
            coefficients,
            x_lo,
            x_hi,
            y_lo,
            y_hi,
            h,
            bottom: (0..=nx).map(|i| g(x(i), y_lo)).collect(),
            top: (0..=nx).map(|i| g(x(i), y_hi)).collect(),
            left: (0..=ny).map(|j| g(x_lo, y(j))).collect(),
            right: (0..=ny).map(|j| g(x_hi, y(j))).collect(),
        })
    }

    pub fn dims(&self) -> Result<(usize, usize)> {
        Ok((steps(self.x_lo, self.x_hi, self.h)?, steps(self.y_lo, self.y_hi, self.h)?))
    }

    pub fn validate(&self) -> Result<(usize, usize)> {
        let c = &self.coefficients;
        c.validate()?;
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::Config(format!("spacing must be positive, got {}", self.h)));
        }
        let (nx, ny) = self.dims()?;
        if self.bottom.len() != nx + 1 || self.top.len() != nx + 1 || self.left.len() != ny + 1 || self.right.len() != ny + 1 {
            return Err(Error::Shape("edge vectors do not match the grid".into()));
        }
        if self.h * c.alpha1.abs() > 2.0 * c.sigma1 * c.sigma1 || self.h * c.alpha2.abs() > 2.0 * c.sigma2 * c.sigma2 {
            return Err(Error::Stability(format!(
                "h = {} too large for drift ({}, {})",
                self.h, c.alpha1, c.alpha2
            )));
        }
        Ok((nx, ny))
    }
}

/// Nine-point stencil `A u = D u_c - Σ w_k u_k`, weights already scaled by `h²`.
#[derive(Debug, Clone, Copy)]
struct Stencil {
    diag: f64,
    e: f64,
    w: f64,
    n: f64,
    s: f64,
    ne: f64,
    nw: f64,
    se: f64,
    sw: f64,
}

impl Stencil {
    fn new(c: &EllipticCoefficients, h: f64) -> Self {
        let s1 = c.sigma1 * c.sigma1;
        let s2 = c.sigma2 * c.sigma2;
        let cross = 0.5 * c.rho * c.sigma1 * c.sigma2;
        Self {
            diag: 2.0 * s1 + 2.0 * s2 + c.r * c.r * h * h,
            e: s1 + 0.5 * h * c.alpha1,
            w: s1 - 0.5 * h * c.alpha1,
            n: s2 + 0.5 * h * c.alpha2,
            s: s2 - 0.5 * h * c.alpha2,
            ne: cross,
            sw: cross,
            nw: -cross,
            se: -cross,
        }
    }

    /// `A u` at node `(i, j)` of a full `(nx+1) × (ny+1)` array with row stride `stride`.
    #[inline]
    fn apply(&self, u: &[f64], k: usize, stride: usize) -> f64 {
        self.diag * u[k]
            - self.e * u[k + 1]
            - self.w * u[k - 1]
            - self.n * u[k + stride]
            - self.s * u[k - stride]
            - self.ne * u[k + stride + 1]
            - self.nw * u[k + stride - 1]
            - self.se * u[k - stride + 1]
            - self.sw * u[k - stride - 1]
    }
}

/// Iteration cap of the Krylov solve.
pub const MAX_ITERATIONS: usize = 50_000;

struct Operator {
    stencil: Stencil,
    nx: usize,
    ny: usize,
    exec: Execution,
}

impl Operator {
    fn stride(&self) -> usize {
        self.nx + 1
    }

    /// `A u` on interior nodes; `u` is a full array with zero boundary.
    fn apply(&self, u: &[f64], out: &mut [f64]) {
        let stride = self.stride();
        let rows = self.exec.map(self.ny - 1, |jj| {
            let j = jj + 1;
            (1..self.nx).map(|i| self.stencil.apply(u, j * stride + i, stride)).collect::<Vec<f64>>()
        });
        for (jj, row) in rows.into_iter().enumerate() {
            let base = (jj + 1) * stride;
            out[base + 1..base + self.nx].copy_from_slice(&row);
        }
    }

    fn dot(&self, a: &[f64], b: &[f64]) -> f64 {
        let stride = self.stride();
        let nx = self.nx;
        self.exec.sum(self.ny - 1, |jj| {
            let base = (jj + 1) * stride;
            (1..nx).map(|i| a[base + i] * b[base + i]).sum::<f64>()
        })
    }
}

/// Result of [`assemble_and_solve`].
#[derive(Debug, Clone)]
pub struct FdSolution {
    pub field: FieldGrid,
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Solves the discretised problem by Jacobi-preconditioned BiCGSTAB until the
/// residual is at most `lin_tol · ‖rhs‖`.
pub fn assemble_and_solve(p: &FdProblem, lin_tol: f64, exec: Execution) -> Result<FdSolution> {
    let (nx, ny) = p.validate()?;
    if !(lin_tol > 0.0) {
        return Err(Error::Config(format!("linear tolerance must be positive, got {lin_tol}")));
    }
    let op = Operator {
        stencil: Stencil::new(&p.coefficients, p.h),
        nx,
        ny,
        exec,
    };
    let stride = nx + 1;
    let total = stride * (ny + 1);
    // boundary values in a full array, zero interior
    let mut g = vec![0.0; total];
    for i in 0..=nx {
        g[i] = p.bottom[i];
        g[ny * stride + i] = p.top[i];
    }
    for j in 0..=ny {
        g[j * stride] = p.left[j];
        g[j * stride + nx] = p.right[j];
    }
    let mut b = vec![0.0; total];
    op.apply(&g, &mut b);
    for v in b.iter_mut() {
        *v = -*v;
    }
    let interior_mask = |k: usize| {
        let (i, j) = (k % stride, k / stride);
        i > 0 && i < nx && j > 0 && j < ny
    };
    for (k, v) in b.iter_mut().enumerate() {
        if !interior_mask(k) {
            *v = 0.0;
        }
    }
    let inv_diag = 1.0 / op.stencil.diag;
    let b_norm = op.dot(&b, &b).sqrt();
    let mut x = vec![0.0; total];
    let (iterations, rel) = if b_norm == 0.0 {
        (0, 0.0)
    } else {
        bicgstab(&op, &b, &mut x, inv_diag, lin_tol * b_norm, b_norm)?
    };
    for (k, v) in x.iter_mut().enumerate() {
        if !interior_mask(k) {
            *v = g[k];
        }
    }
    let xs: Vec<f64> = (0..=nx).map(|i| p.x_lo + i as f64 * p.h).collect();
    let ys: Vec<f64> = (0..=ny).map(|j| p.y_lo + j as f64 * p.h).collect();
    let mut field = FieldGrid::zeros(xs, ys);
    field.values = x;
    Ok(FdSolution {
        field,
        iterations,
        relative_residual: rel,
    })
}

fn bicgstab(op: &Operator, b: &[f64], x: &mut [f64], inv_diag: f64, abs_tol: f64, b_norm: f64) -> Result<(usize, f64)> {
    let n = b.len();
    let mut r = b.to_vec();
    let r_hat = r.clone();
    let mut p = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut t = vec![0.0; n];
    let mut ph = vec![0.0; n];
    let mut sh = vec![0.0; n];
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut res = b_norm;
    for it in 1..=MAX_ITERATIONS {
        let rho_new = op.dot(&r_hat, &r);
        if rho_new == 0.0 {
            return Err(Error::Solver {
                iterations: it,
                residual: res / b_norm,
            });
        }
        if it == 1 {
            p.copy_from_slice(&r);
        } else {
            let beta = (rho_new / rho) * (alpha / omega);
            for k in 0..n {
                p[k] = r[k] + beta * (p[k] - omega * v[k]);
            }
        }
        rho = rho_new;
        for k in 0..n {
            ph[k] = inv_diag * p[k];
        }
        op.apply(&ph, &mut v);
        alpha = rho / op.dot(&r_hat, &v);
        for k in 0..n {
            s[k] = r[k] - alpha * v[k];
        }
        let s_norm = op.dot(&s, &s).sqrt();
        if s_norm <= abs_tol {
            for k in 0..n {
                x[k] += alpha * ph[k];
            }
            return Ok((it, s_norm / b_norm));
        }
        for k in 0..n {
            sh[k] = inv_diag * s[k];
        }
        op.apply(&sh, &mut t);
        let tt = op.dot(&t, &t);
        omega = if tt == 0.0 { 0.0 } else { op.dot(&t, &s) / tt };
        for k in 0..n {
            x[k] += alpha * ph[k] + omega * sh[k];
            r[k] = s[k] - omega * t[k];
        }
        res = op.dot(&r, &r).sqrt();
        if res <= abs_tol {
            return Ok((it, res / b_norm));
        }
        if omega == 0.0 {
            return Err(Error::Solver {
                iterations: it,
                residual: res / b_norm,
            });
        }
    }
    Err(Error::Solver {
        iterations: MAX_ITERATIONS,
        residual: res / b_norm,
    })
}

fn same_axis(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(p, q)| (p - q).abs() <= 1e-12 * p.abs().max(1.0))
}

/// Deviation report between two fields on the same grid.
pub fn compare_fields(a: &FieldGrid, b: &FieldGrid, tol: f64) -> Result<OracleReport> {
    a.check_shape()?;
    b.check_shape()?;
    if !same_axis(&a.xs, &b.xs) || !same_axis(&a.ys, &b.ys) {
        return Err(Error::Shape(format!(
            "{}x{} grid compared with {}x{} grid",
            a.nx(),
            a.ny(),
            b.nx(),
            b.ny()
        )));
    }
    Ok(OracleReport::from_pairs("field comparison", a.values.iter().copied().zip(b.values.iter().copied()), tol)
        .with_meta("nx", a.nx())
        .with_meta("ny", a.ny())
        .with_meta("x_range", vec![a.xs[0], *a.xs.last().unwrap()])
        .with_meta("y_range", vec![a.ys[0], *a.ys.last().unwrap()]))
}

/// Restriction of a fine FD field to the nodes of a coarser grid whose nodes
/// it contains.
pub fn restrict_to(fine: &FieldGrid, xs: &[f64], ys: &[f64]) -> Result<FieldGrid> {
    let locate = |axis: &[f64], v: f64| -> Result<usize> {
        axis.iter()
            .position(|&a| (a - v).abs() <= 1e-9 * v.abs().max(1.0))
            .ok_or_else(|| Error::Shape(format!("coordinate {v} is not a node of the fine grid")))
    };
    let ix = xs.iter().map(|&x| locate(&fine.xs, x)).collect::<Result<Vec<_>>>()?;
    let iy = ys.iter().map(|&y| locate(&fine.ys, y)).collect::<Result<Vec<_>>>()?;
    let mut out = FieldGrid::zeros(xs.to_vec(), ys.to_vec());
    for (b, &j) in iy.iter().enumerate() {
        for (a, &i) in ix.iter().enumerate() {
            let k = out.index(a, b);
            out.values[k] = fine.get(i, j);
        }
    }
    Ok(out)
}
