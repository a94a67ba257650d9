//! Fourier-Bessel solution of `(Δ - r²)V = 0` on a disk and the screened
//! mean-value identity `V(c)·I0(r·ρ) = (1/2π) ∮ V` derived from it.
//!
//! The series is `a0/2 · I0(rρ)/I0(rρ̃) + Σ_{n≥1} In(rρ)/In(rρ̃) (an cos nθ + bn sin nθ)`
//! with the usual Fourier normalisation of `(an, bn)`.

use std::f64::consts::PI;

use crate::error::{ensure_finite, Error, Result};
use crate::kernel::Domain;
use crate::report::OracleReport;
use crate::specfun;

/// Dirichlet data on the circle of radius `radius_tilde` around `center`,
/// sampled at `θ_j = 2πj/M`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskProblem {
    pub center: (f64, f64),
    pub radius_tilde: f64,
    pub r: f64,
    pub boundary_samples: Vec<f64>,
}

impl DiskProblem {
    pub fn from_fn<F: Fn(f64) -> f64>(center: (f64, f64), radius_tilde: f64, r: f64, m: usize, psi: F) -> Result<Self> {
        let samples = (0..m).map(|j| psi(2.0 * PI * j as f64 / m as f64)).collect();
        let p = Self {
            center,
            radius_tilde,
            r,
            boundary_samples: samples,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("radius", self.radius_tilde)?;
        ensure_finite("r", self.r)?;
        if self.radius_tilde <= 0.0 || self.r < 0.0 {
            return Err(Error::Domain("disk radius must be positive and r >= 0".into()));
        }
        let m = self.boundary_samples.len();
        if m < 64 || !m.is_multiple_of(2) {
            return Err(Error::Config(format!("need an even number >= 64 of boundary samples, got {m}")));
        }
        Ok(())
    }

    /// Trapezoid-rule Fourier coefficients `(a_n, b_n)` for `n = 0..=M/2`.
    pub fn fourier_coefficients(&self) -> Vec<(f64, f64)> {
        let m = self.boundary_samples.len();
        let scale = 2.0 / m as f64;
        (0..=m / 2)
            .map(|n| {
                let (mut a, mut b) = (0.0, 0.0);
                for (j, &v) in self.boundary_samples.iter().enumerate() {
                    let t = 2.0 * PI * ((n * j) % m) as f64 / m as f64;
                    a += v * t.cos();
                    b += v * t.sin();
                }
                (scale * a, scale * b)
            })
            .collect()
    }
}

fn radial_ratio(n: u32, r: f64, rho: f64, rho_tilde: f64) -> Result<f64> {
    if r == 0.0 {
        return Ok((rho / rho_tilde).powi(n as i32));
    }
    if rho == 0.0 {
        return Ok(if n == 0 { 1.0 / specfun::bessel_i(0, r * rho_tilde)? } else { 0.0 });
    }
    specfun::bessel_i_ratio(n, r * rho, r * rho_tilde)
}

/// Value of the disk solution at polar coordinates `(rho, theta)` about the centre.
pub fn disk_solution(p: &DiskProblem, rho: f64, theta: f64) -> Result<f64> {
    p.validate()?;
    ensure_finite("rho", rho)?;
    ensure_finite("theta", theta)?;
    if !(rho >= 0.0 && rho < p.radius_tilde) {
        return Err(Error::Domain(format!("rho must lie in [0, {}), got {rho}", p.radius_tilde)));
    }
    let coeffs = p.fourier_coefficients();
    let m = p.boundary_samples.len();
    let nyquist = m / 2;
    let q = rho / p.radius_tilde;
    // suffix sums of |a_n| + |b_n| for the truncation bound In(z)/In(z̃) <= (z/z̃)^n
    let mut suffix = vec![0.0; coeffs.len() + 1];
    for n in (0..coeffs.len()).rev() {
        suffix[n] = suffix[n + 1] + coeffs[n].0.abs() + coeffs[n].1.abs();
    }
    let mut value = 0.5 * coeffs[0].0 * radial_ratio(0, p.r, rho, p.radius_tilde)?;
    for (n, &(a, b)) in coeffs.iter().enumerate().skip(1) {
        if q.powi(n as i32) * suffix[n] <= 1e-16 * value.abs().max(1e-300) {
            break;
        }
        let weight = if n == nyquist { 0.5 } else { 1.0 };
        let nt = n as f64 * theta;
        value += weight * radial_ratio(n as u32, p.r, rho, p.radius_tilde)? * (a * nt.cos() + b * nt.sin());
    }
    Ok(value)
}

/// Number of points of the trapezoid rule on the circle.
pub const CIRCLE_POINTS: usize = 256;

/// Checks `V(center)·I0(r·radius) = (1/2π)∮V` for an off-grid evaluator `eval(x, y)`.
///
/// `height` is the strip width (ignored on the half-plane).
pub fn mean_value_check<F>(
    eval: F,
    domain: Domain,
    height: f64,
    center: (f64, f64),
    radius: f64,
    r: f64,
    tol: f64,
) -> Result<OracleReport>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let (cx, cy) = center;
    ensure_finite("center x", cx)?;
    ensure_finite("center y", cy)?;
    if !(radius > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {radius}")));
    }
    let top = match domain {
        Domain::Strip => height,
        Domain::HalfPlane => f64::INFINITY,
    };
    if cy - radius <= 0.0 || cy + radius >= top {
        return Err(Error::Domain(format!(
            "circle of radius {radius} around ({cx}, {cy}) leaves the domain"
        )));
    }
    let mut sum = 0.0;
    for k in 0..CIRCLE_POINTS {
        let t = 2.0 * PI * k as f64 / CIRCLE_POINTS as f64;
        sum += eval(cx + radius * t.cos(), cy + radius * t.sin())?;
    }
    let average = sum / CIRCLE_POINTS as f64;
    let centre_value = eval(cx, cy)?;
    let i0 = specfun::bessel_i(0, r * radius)?;
    Ok(OracleReport::from_pairs("screened mean value", [(centre_value * i0, average)], tol)
        .with_meta("center", vec![cx, cy])
        .with_meta("radius", radius)
        .with_meta("r", r)
        .with_meta("points", CIRCLE_POINTS))
}
