//! Dirichlet problems solved by convolving boundary data with the kernels.

use std::f64::consts::PI;

use crate::boundary::BoundaryFunction;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::field::{FieldGrid, GridSpec};
use crate::general::EllipticCoefficients;
use crate::kernel::{Domain, KernelSlice, KernelSpec};
use crate::quadrature::graded_breaks;

/// Largest convolution window accepted for data without constant tails.
const MAX_WINDOW: f64 = 1e4;

/// Convolution `V(x, y) = ∫ φ(u) K(x - u, y) du` with its error estimate.
///
/// For data with constant tails the far field is folded into closed-form
/// terms: `V = c_L·M + (c_R - c_L)·∫_{u>R} K + ∫_{-R}^{R} (φ - c_L) K`.
pub fn convolve_slice(slice: &KernelSlice, phi: &BoundaryFunction, x: f64, tol: f64) -> Result<(f64, f64)> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
    }
    let tails = phi.has_constant_tails();
    let lc = if tails { phi.left_constant } else { 0.0 };
    let jump = if tails { phi.right_constant - lc } else { 0.0 };
    let sup = phi.sup_bound + lc.abs();
    let center = slice.center();
    let peak = x - center;

    let mut value = lc * slice.mass();
    let mut err = 0.0;

    if jump != 0.0 {
        let (cum, e) = slice.cumulative(x - phi.compact_radius, 0.25 * tol / jump.abs())?;
        value += jump * cum;
        err += jump.abs() * e;
    }

    if sup == 0.0 {
        return Ok((value, err));
    }
    let (lo, hi) = match slice.cutoff(0.25 * tol / sup) {
        Ok(cut) if tails => {
            let (lo, hi) = (peak - cut, peak + cut);
            if lo > -phi.compact_radius || hi < phi.compact_radius {
                err += sup * slice.tail(cut);
            }
            (lo.max(-phi.compact_radius), hi.min(phi.compact_radius))
        }
        // slowly decaying kernel: integrate over the whole data support
        Err(_) if tails => (-phi.compact_radius, phi.compact_radius),
        Ok(cut) if 2.0 * cut <= MAX_WINDOW => {
            err += sup * slice.tail(cut);
            (peak - cut, peak + cut)
        }
        _ => {
            return Err(Error::Config(
                "kernel decays too slowly for boundary data without constant tails".into(),
            ))
        }
    };
    if hi <= lo {
        return Ok((value, err));
    }

    let first = 0.125 * slice.scale();
    let max_width = 0.5;
    let mut breaks = if peak <= lo {
        graded_breaks(lo, hi, first, max_width)
    } else if peak >= hi {
        graded_breaks(hi, lo, first, max_width)
    } else {
        let mut b = graded_breaks(peak, lo, first, max_width);
        b.extend(graded_breaks(peak, hi, first, max_width).into_iter().skip(1));
        b
    };
    breaks.extend(phi.kinks.iter().copied().filter(|&k| k > lo && k < hi));
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    // integrate in v = x - u so the kernel sees its own variable
    let vbreaks: Vec<f64> = breaks.iter().rev().map(|&u| x - u).collect();
    let l1 = sup * (hi - lo);
    let ktol = 0.25 * tol / l1.max(1e-300);
    let (q, qe) = slice.integrate_kernel(|v| phi.eval(x - v) - lc, &vbreaks, 0.25 * tol, ktol)?;
    value += q;
    err += qe + ktol * l1;
    Ok((value, err))
}

/// [`convolve_slice`] at a single point, building the slice from `kernel`.
pub fn convolve_kernel(kernel: &KernelSpec, phi: &BoundaryFunction, x: f64, y: f64, tol: f64) -> Result<f64> {
    let slice = kernel.slice(y)?;
    convolve_slice(&slice, phi, x, tol).map(|(v, _)| v)
}

/// A Dirichlet problem together with its data.
#[derive(Debug, Clone)]
pub enum BvpProblem {
    /// `(Δ - r²)V = 0` on `0 < y < π`.
    Strip {
        bottom: BoundaryFunction,
        top: BoundaryFunction,
        r: f64,
    },
    /// `(Δ - r²)V = 0` on `y > 0`, bounded as `y → ∞`.
    HalfPlane { phi: BoundaryFunction, r: f64 },
    /// General operator on `0 < y < l`, zero data on `y = l`.
    StripGeneral {
        phi: BoundaryFunction,
        coefficients: EllipticCoefficients,
    },
    /// General operator on `y > 0`.
    HalfPlaneGeneral {
        phi: BoundaryFunction,
        coefficients: EllipticCoefficients,
    },
}

fn is_zero(f: &BoundaryFunction) -> bool {
    f.sup_bound == 0.0
}

impl BvpProblem {
    pub fn domain(&self) -> Domain {
        match self {
            BvpProblem::Strip { .. } | BvpProblem::StripGeneral { .. } => Domain::Strip,
            _ => Domain::HalfPlane,
        }
    }

    /// Strip width, or infinity.
    pub fn height(&self) -> f64 {
        match self {
            BvpProblem::Strip { .. } => PI,
            BvpProblem::StripGeneral { coefficients, .. } => coefficients.width_l,
            _ => f64::INFINITY,
        }
    }

    pub fn kernel(&self, tol: f64) -> KernelSpec {
        match self {
            BvpProblem::Strip { r, .. } => KernelSpec::strip(*r, tol),
            BvpProblem::HalfPlane { r, .. } => KernelSpec::halfplane(*r, tol),
            BvpProblem::StripGeneral { coefficients, .. } => KernelSpec::general(Domain::Strip, *coefficients, tol),
            BvpProblem::HalfPlaneGeneral { coefficients, .. } => {
                KernelSpec::general(Domain::HalfPlane, *coefficients, tol)
            }
        }
    }

    fn bottom(&self) -> &BoundaryFunction {
        match self {
            BvpProblem::Strip { bottom, .. } => bottom,
            BvpProblem::HalfPlane { phi, .. }
            | BvpProblem::StripGeneral { phi, .. }
            | BvpProblem::HalfPlaneGeneral { phi, .. } => phi,
        }
    }

    /// Largest `|φ|` over all boundary pieces.
    pub fn data_sup(&self) -> f64 {
        match self {
            BvpProblem::Strip { bottom, top, .. } => bottom.sup_bound.max(top.sup_bound),
            _ => self.bottom().sup_bound,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.kernel(1.0).validate()
    }

    /// Solution value and error estimate at `(x, y)`. Boundary rows come from the data.
    pub fn value_at(&self, x: f64, y: f64, tol: f64) -> Result<(f64, f64)> {
        let h = self.height();
        if !x.is_finite() || !(y >= 0.0 && y <= h) {
            return Err(Error::Domain(format!("({x}, {y}) lies outside the domain")));
        }
        if y == 0.0 {
            return Ok((self.bottom().eval(x), 0.0));
        }
        if let BvpProblem::Strip { top, r, bottom } = self {
            if y == h {
                return Ok((top.eval(x), 0.0));
            }
            let kernel = KernelSpec::strip(*r, tol);
            let mut value = 0.0;
            let mut err = 0.0;
            let split = if is_zero(bottom) || is_zero(top) { 1.0 } else { 0.5 };
            if !is_zero(bottom) {
                let (v, e) = convolve_slice(&kernel.slice(y)?, bottom, x, split * tol)?;
                value += v;
                err += e;
            }
            if !is_zero(top) {
                // reflected problem: y ↦ π - y
                let (v, e) = convolve_slice(&kernel.slice(PI - y)?, top, x, split * tol)?;
                value += v;
                err += e;
            }
            return Ok((value, err));
        }
        if y == h {
            return Ok((0.0, 0.0));
        }
        let phi = self.bottom();
        if is_zero(phi) {
            return Ok((0.0, 0.0));
        }
        convolve_slice(&self.kernel(tol).slice(y)?, phi, x, tol)
    }

    /// Evaluates the solution on `grid`. Cells that miss `tol` keep their best
    /// estimate and are flagged in [`FieldGrid::failed`].
    pub fn solve(&self, grid: &GridSpec, tol: f64, exec: Execution) -> Result<FieldGrid> {
        grid.validate()?;
        self.validate()?;
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
        }
        let h = self.height();
        if grid.y_min < 0.0 || grid.y_max > h {
            return Err(Error::Domain(format!(
                "grid rows [{}, {}] leave the domain [0, {h}]",
                grid.y_min, grid.y_max
            )));
        }
        let xs = grid.xs();
        let ys = grid.ys();
        let nx = xs.len();
        let cells = exec.map(xs.len() * ys.len(), |i| self.value_at(xs[i % nx], ys[i / nx], tol));
        let mut field = FieldGrid::zeros(xs, ys);
        for (i, cell) in cells.into_iter().enumerate() {
            match cell {
                Ok((v, e)) => {
                    field.values[i] = v;
                    field.err_estimates[i] = e;
                }
                Err(Error::Accuracy { best, achieved }) => {
                    field.values[i] = best;
                    field.err_estimates[i] = achieved;
                    field.failed[i] = true;
                }
                Err(e) => return Err(e),
            }
        }
        Ok(field)
    }
}

pub fn solve_strip(
    phi_bottom: &BoundaryFunction,
    phi_top: &BoundaryFunction,
    grid: &GridSpec,
    r: f64,
    tol: f64,
) -> Result<FieldGrid> {
    BvpProblem::Strip {
        bottom: phi_bottom.clone(),
        top: phi_top.clone(),
        r,
    }
    .solve(grid, tol, Execution::default())
}

pub fn solve_halfplane(phi: &BoundaryFunction, grid: &GridSpec, r: f64, tol: f64) -> Result<FieldGrid> {
    BvpProblem::HalfPlane { phi: phi.clone(), r }.solve(grid, tol, Execution::default())
}

pub fn solve_strip_general(
    phi: &BoundaryFunction,
    grid: &GridSpec,
    c: &EllipticCoefficients,
    tol: f64,
) -> Result<FieldGrid> {
    BvpProblem::StripGeneral {
        phi: phi.clone(),
        coefficients: *c,
    }
    .solve(grid, tol, Execution::default())
}

pub fn solve_halfplane_general(
    phi: &BoundaryFunction,
    grid: &GridSpec,
    c: &EllipticCoefficients,
    tol: f64,
) -> Result<FieldGrid> {
    BvpProblem::HalfPlaneGeneral {
        phi: phi.clone(),
        coefficients: *c,
    }
    .solve(grid, tol, Execution::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strip(bottom: BoundaryFunction, r: f64) -> BvpProblem {
        BvpProblem::Strip {
            bottom,
            top: BoundaryFunction::zero(),
            r,
        }
    }

    #[test]
    fn constant_data_reproduces_mass() {
        let p = strip(BoundaryFunction::constant(1.0).unwrap(), 1.0);
        for y in [0.2, 1.0, 2.5] {
            let (v, _) = p.value_at(0.7, y, 1e-10).unwrap();
            let exact = (PI - y).sinh() / PI.sinh();
            assert!((v - exact).abs() < 1e-10);
        }
    }

    #[test]
    fn step_at_origin_gives_half_mass() {
        let p = strip(BoundaryFunction::step(0.0), 1.0);
        for y in [0.3, 1.0, 2.0] {
            let (v, _) = p.value_at(0.0, y, 1e-9).unwrap();
            let exact = 0.5 * (PI - y).sinh() / PI.sinh();
            assert!((v - exact).abs() < 1e-9, "y={y}: {v} vs {exact}");
        }
    }

    #[test]
    fn cosine_strip_separable_value() {
        let p = strip(BoundaryFunction::cosine(1.0).unwrap(), 1.0);
        let (v, _) = p.value_at(0.0, PI / 2.0, 1e-8).unwrap();
        let q = 2f64.sqrt();
        let exact = (PI / 2.0 * q).sinh() / (PI * q).sinh();
        assert!((v - exact).abs() < 1e-7, "{v} vs {exact}");
    }

    #[test]
    fn halfplane_step_poisson() {
        let p = BvpProblem::HalfPlane {
            phi: BoundaryFunction::step(0.0),
            r: 0.0,
        };
        for (x, y) in [(0.5, 0.3), (-1.0, 2.0)] {
            let (v, _) = p.value_at(x, y, 1e-10).unwrap();
            let exact = 0.5 + (x / y).atan() / PI;
            assert!((v - exact).abs() < 1e-10);
        }
    }

    #[test]
    fn boundary_rows_are_copied() {
        let p = BvpProblem::Strip {
            bottom: BoundaryFunction::gaussian(0.0, 0.5).unwrap(),
            top: BoundaryFunction::constant(2.0).unwrap(),
            r: 1.0,
        };
        assert_eq!(p.value_at(0.0, 0.0, 1e-8).unwrap().0, 1.0);
        assert_eq!(p.value_at(3.0, PI, 1e-8).unwrap().0, 2.0);
        assert!(p.value_at(0.0, 4.0, 1e-8).is_err());
    }
}
