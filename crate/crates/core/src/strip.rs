//! Regular part of the Green function of `(Δ - r²)V = 0` on the strip `0 < y < π`
//! with data on `y = 0` and zero data on `y = π`.
//!
//! Four equivalent representations are provided:
//!
//! * the eigenfunction series `(1/π) Σ_k k sin(ky)/√(k²+r²) · e^{-|x|√(k²+r²)}`,
//! * the closed Laplace (`r = 0`) kernel `sin y / (2π (cosh x - cos y))`,
//! * the integral `(sin y/2π) ∫_{|x|}^∞ J0(r√(s²-x²)) sinh s / (cosh s - cos y)² ds`,
//! * the Laplace kernel minus a `J1` correction, `G_Δ - r ∫_0^∞ G_Δ(√(x²+w²), y) J1(rw) dw`.
//!
//! [`green_strip`] picks among them. The distributional `δ(x)Θ(-y)` term of
//! the full Green function is never evaluated here; boundary rows of solved
//! fields are copied from the data instead.

use std::f64::consts::PI;

use crate::error::{ensure_finite, Error, Result};
use crate::quadrature::{graded_breaks, integrate, MAX_PANELS};
use crate::specfun;

/// Below this `|x|` the dispatcher uses the integral representation instead of the series.
pub const X_SWITCH: f64 = 0.25;

/// Hard cap on series length; reached only for `|x|` of order `1e-6`.
const MAX_SERIES_TERMS: usize = 10_000_000;

/// Evaluation point of the strip kernel: offset `x = x_obs - u`, height `y`, mass `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripKernelPoint {
    pub x: f64,
    pub y: f64,
    pub r: f64,
}

impl StripKernelPoint {
    pub fn new(x: f64, y: f64, r: f64) -> Result<Self> {
        ensure_finite("x", x)?;
        ensure_finite("y", y)?;
        ensure_finite("r", r)?;
        if !(0.0..=PI).contains(&y) {
            return Err(Error::Domain(format!("strip height y must lie in [0, π], got {y}")));
        }
        if r < 0.0 {
            return Err(Error::Domain(format!("mass parameter r must be >= 0, got {r}")));
        }
        Ok(Self { x, y, r })
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("tolerance must be positive, got {tol}")))
    }
}

/// `cosh s - cos y`, written to avoid cancellation for small `s` and `y`.
#[inline]
pub(crate) fn cosh_minus_cos(s: f64, y: f64) -> f64 {
    let a = (0.5 * s).sinh();
    let b = (0.5 * y).sin();
    2.0 * (a * a + b * b)
}

/// Eigenfunction series, truncated by the geometric tail bound
/// `Σ_{k>K} e^{-|x|k} = e^{-|x|(K+1)} / (1 - e^{-|x|}) <= tol`.
pub fn green_strip_series(p: StripKernelPoint, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    let ax = p.x.abs();
    if ax == 0.0 {
        return Err(Error::SeriesDivergent);
    }
    if p.y == 0.0 || p.y == PI {
        return Ok(0.0);
    }
    let decay = (-ax).exp();
    let denom = -(-ax).exp_m1();
    let r2 = p.r * p.r;
    let (sin_y, cos_y) = p.y.sin_cos();
    // (cos ky, sin ky) by rotation
    let (mut c, mut s) = (cos_y, sin_y);
    let mut sum = 0.0;
    let mut tail_head = decay; // e^{-|x| k}
    for k in 1..=MAX_SERIES_TERMS {
        let kf = k as f64;
        let root = (kf * kf + r2).sqrt();
        sum += kf * s / root * (-ax * root).exp();
        tail_head *= decay;
        if tail_head / denom <= tol {
            return Ok(sum / PI);
        }
        let c_next = c * cos_y - s * sin_y;
        s = s * cos_y + c * sin_y;
        c = c_next;
    }
    Err(Error::Accuracy {
        best: sum / PI,
        achieved: tail_head / denom,
    })
}

/// Laplace (`r = 0`) kernel in closed form.
pub fn green_strip_laplace(x: f64, y: f64) -> Result<f64> {
    ensure_finite("x", x)?;
    ensure_finite("y", y)?;
    if x == 0.0 && y == 0.0 {
        return Err(Error::Singularity { x, y });
    }
    if y == PI {
        return Ok(0.0);
    }
    Ok(laplace_unchecked(x, y))
}

#[inline]
pub(crate) fn laplace_unchecked(x: f64, y: f64) -> f64 {
    y.sin() / (2.0 * PI * cosh_minus_cos(x, y))
}

/// `∫_{-∞}^{a} G_Δ(ξ, y) dξ = ((π - y) + 2 atan(tanh(a/2) cot(y/2))) / (2π)` for `0 < y < π`.
pub(crate) fn laplace_cumulative(a: f64, y: f64) -> f64 {
    let t = (0.5 * a).tanh() / (0.5 * y).tan();
    ((PI - y) + 2.0 * t.atan()) / (2.0 * PI)
}

/// Integral representation after the substitution `s = |x| t`.
pub fn green_strip_integral(p: StripKernelPoint, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    if p.x == 0.0 {
        return Err(Error::Singularity { x: p.x, y: p.y });
    }
    if p.y == 0.0 || p.y == PI {
        return Ok(0.0);
    }
    integral_unchecked(p, tol)
}

/// Integral representation; also valid at `x = 0` for interior `y`, where the
/// integrand is continuous.
pub(crate) fn integral_unchecked(p: StripKernelPoint, tol: f64) -> Result<f64> {
    let ax = p.x.abs();
    let (y, r) = (p.y, p.r);
    let sin_y = y.sin();
    let pref = sin_y / (2.0 * PI);
    // tail: ∫_S^∞ sinh s / (cosh s - cos y)² ds = 1 / (cosh S - cos y), |J0| <= 1
    let tail_budget = 0.25 * tol;
    let target = pref / tail_budget;
    let mut upper = (target + 2.0).ln().max(ax + 1.0);
    while pref / cosh_minus_cos(upper, y) > tail_budget {
        upper += 1.0;
    }
    let tail = pref / cosh_minus_cos(upper, y);
    let integrand = |s: f64| {
        let d = cosh_minus_cos(s, y);
        let bessel = if r == 0.0 {
            1.0
        } else {
            specfun::j0(r * ((s - ax) * (s + ax)).max(0.0).sqrt())
        };
        bessel * s.sinh() / (d * d)
    };
    let width = ax.max(y.min(PI - y));
    let max_width = if r > 0.0 { (4.0 / r).min(4.0) } else { 4.0 };
    let breaks = graded_breaks(ax, upper, 0.25 * width, max_width);
    let inner_tol = 0.5 * tol / pref;
    let res = integrate(integrand, &breaks, inner_tol, MAX_PANELS);
    let value = pref * res.value;
    let achieved = pref * res.abs_error + tail;
    if res.converged {
        Ok(value)
    } else {
        Err(Error::Accuracy { best: value, achieved })
    }
}

/// Laplace kernel minus the `J1` correction, with `t = √(x² + w²)`.
pub fn green_strip_via_j1(p: StripKernelPoint, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    if p.x == 0.0 {
        return Err(Error::Singularity { x: p.x, y: p.y });
    }
    if p.y == 0.0 || p.y == PI {
        return Ok(0.0);
    }
    j1_unchecked(p, tol)
}

pub(crate) fn j1_unchecked(p: StripKernelPoint, tol: f64) -> Result<f64> {
    let (x, y, r) = (p.x, p.y, p.r);
    let base = laplace_unchecked(x, y);
    if r == 0.0 {
        return Ok(base);
    }
    let sin_y = y.sin();
    // G_Δ(√(x²+w²), y) <= sin y / (2π (cosh w - 1)); ∫_W^∞ dw/(cosh w - 1) = 2/(e^W - 1)
    let tail_budget = 0.25 * tol;
    let upper = (1.0 + r * sin_y / (PI * tail_budget)).ln().max(1.0);
    let tail = r * sin_y / PI / upper.exp_m1();
    let x2 = x * x;
    let integrand = |w: f64| laplace_unchecked((x2 + w * w).sqrt(), y) * specfun::j1(r * w);
    let width = x.abs().max(y.min(PI - y));
    let max_width = (4.0 / r).min(4.0);
    let breaks = graded_breaks(0.0, upper, 0.25 * width, max_width);
    let inner_tol = 0.5 * tol / r;
    let res = integrate(integrand, &breaks, inner_tol, MAX_PANELS);
    let value = base - r * res.value;
    if res.converged {
        Ok(value)
    } else {
        Err(Error::Accuracy {
            best: value,
            achieved: r * res.abs_error + tail,
        })
    }
}

/// Representation selector for strip kernel evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StripRepresentation {
    Series,
    Integral,
    J1,
    Laplace,
    #[default]
    Auto,
}

/// Evaluate the regular part with the requested representation.
pub fn green_strip_with(p: StripKernelPoint, rep: StripRepresentation, tol: f64) -> Result<f64> {
    match rep {
        StripRepresentation::Series => green_strip_series(p, tol),
        StripRepresentation::Integral => green_strip_integral(p, tol),
        StripRepresentation::J1 => green_strip_via_j1(p, tol),
        StripRepresentation::Laplace => {
            if p.r != 0.0 {
                return Err(Error::Config(format!(
                    "closed Laplace kernel requires r = 0, got r = {}",
                    p.r
                )));
            }
            green_strip_laplace(p.x, p.y)
        }
        StripRepresentation::Auto => green_strip(p, tol),
    }
}

/// Dispatching evaluator of the regular part.
///
/// `y ∈ {0, π}` gives 0; `r = 0` uses the closed form; otherwise the series
/// for `|x| >= X_SWITCH` and the integral representation below it.
pub fn green_strip(p: StripKernelPoint, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    if p.x == 0.0 && p.y == 0.0 {
        return Err(Error::Singularity { x: p.x, y: p.y });
    }
    if p.y == 0.0 || p.y == PI {
        return Ok(0.0);
    }
    if p.r == 0.0 {
        return Ok(laplace_unchecked(p.x, p.y));
    }
    if p.x.abs() >= X_SWITCH {
        green_strip_series(p, tol)
    } else {
        integral_unchecked(p, tol)
    }
}

/// `∫_ℝ G(x, y) dx`: `sinh((π-y)r)/sinh(πr)`, or `(π-y)/π` at `r = 0`.
pub fn strip_mass(y: f64, r: f64) -> f64 {
    if r == 0.0 {
        (PI - y) / PI
    } else if r * PI > 30.0 {
        // ratio of sinh's without overflow
        let num = (-r * y).exp() * (1.0 - (-2.0 * r * (PI - y)).exp());
        num / (1.0 - (-2.0 * r * PI).exp())
    } else {
        ((PI - y) * r).sinh() / (PI * r).sinh()
    }
}
