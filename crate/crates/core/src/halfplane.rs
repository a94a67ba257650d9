//! Regular part of the half-plane Green function of `(Δ - r²)V = 0`, `y > 0`.
//!
//! The production path is the closed form `r y K1(r ρ) / (π ρ)`, `ρ = √(x²+y²)`,
//! which degenerates to the Poisson kernel `y / (π ρ²)` at `r = 0`. The sine
//! integral `(1/π) ∫_0^∞ ξ sin(ξy) e^{-|x|√(ξ²+r²)} / √(ξ²+r²) dξ` is kept for
//! verification.

use std::f64::consts::PI;

use crate::error::{ensure_finite, Error, Result};
use crate::quadrature::{graded_breaks, integrate, wynn_epsilon, MAX_PANELS};
use crate::report::OracleReport;
use crate::specfun;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlaneKernelPoint {
    pub x: f64,
    pub y: f64,
    pub r: f64,
}

impl HalfPlaneKernelPoint {
    pub fn new(x: f64, y: f64, r: f64) -> Result<Self> {
        ensure_finite("x", x)?;
        ensure_finite("y", y)?;
        ensure_finite("r", r)?;
        if y < 0.0 {
            return Err(Error::Domain(format!("half-plane height must be >= 0, got {y}")));
        }
        if r < 0.0 {
            return Err(Error::Domain(format!("mass parameter r must be >= 0, got {r}")));
        }
        Ok(Self { x, y, r })
    }
}

/// Closed form of the regular part.
pub fn green_halfplane_closed(p: HalfPlaneKernelPoint) -> Result<f64> {
    if p.x == 0.0 && p.y == 0.0 {
        return Err(Error::Singularity { x: p.x, y: p.y });
    }
    Ok(closed_unchecked(p.x, p.y, p.r))
}

#[inline]
pub(crate) fn closed_unchecked(x: f64, y: f64, r: f64) -> f64 {
    if y == 0.0 {
        return 0.0;
    }
    let rho2 = x * x + y * y;
    let poisson = y / (PI * rho2);
    if r == 0.0 {
        return poisson;
    }
    let z = r * rho2.sqrt();
    poisson * z * specfun::k1(z)
}

/// `∫_{-∞}^{a} y / (π (ξ² + y²)) dξ`.
pub(crate) fn poisson_cumulative(a: f64, y: f64) -> f64 {
    0.5 + (a / y).atan() / PI
}

/// `∫_ℝ G(x, y) dx = e^{-ry}`.
pub fn halfplane_mass(y: f64, r: f64) -> f64 {
    (-r * y).exp()
}

/// Integral representation, verification path.
pub fn green_halfplane_integral(p: HalfPlaneKernelPoint, tol: f64) -> Result<f64> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
    }
    if p.x == 0.0 && p.y == 0.0 {
        return Err(Error::Singularity { x: p.x, y: p.y });
    }
    if p.y == 0.0 {
        return Ok(0.0);
    }
    let ax = p.x.abs();
    let r = p.r;
    let (value, _) = exp_sine_transform(ax, r, p.y, PI * tol)?;
    Ok(value / PI)
}

/// `∫_0^∞ ξ sin(ξa) e^{-β√(ξ²+γ²)} / √(ξ²+γ²) dξ` for `β >= 0`, `γ >= 0`, `a > 0`.
///
/// At `β = 0` the integral only exists in the Abel sense; it is summed panel by
/// panel between zeros of `sin(ξa)` with epsilon extrapolation.
pub(crate) fn exp_sine_transform(beta: f64, gamma: f64, a: f64, tol: f64) -> Result<(f64, f64)> {
    let g2 = gamma * gamma;
    let amp = move |xi: f64| {
        let root = (xi * xi + g2).sqrt();
        if root == 0.0 {
            0.0
        } else {
            xi / root * (-beta * root).exp()
        }
    };
    // tail: ∫_Ξ^∞ e^{-βξ} dξ = e^{-βΞ} / β
    let tail = move |cut: f64| {
        if beta > 0.0 {
            (-beta * cut).exp() / beta
        } else {
            f64::INFINITY
        }
    };
    let feature = if beta > 0.0 { (1.0 / beta).min(gamma.max(1.0)) } else { gamma.max(1.0) };
    sine_transform(amp, a, tail, feature, tol)
}

/// Most half-periods summed directly before switching to epsilon extrapolation.
const MAX_DIRECT_HALF_PERIODS: f64 = 400.0;
const MAX_EXTRAPOLATED_PANELS: usize = 600;

/// `∫_0^∞ f(ξ) sin(ξa) dξ` for an amplitude `f` whose tail beyond `Ξ` is
/// bounded by `tail(Ξ)` in absolute value (`tail` may return infinity).
///
/// `feature` is the length scale over which `f` varies near the origin.
pub(crate) fn sine_transform<F, T>(amp: F, a: f64, tail: T, feature: f64, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
    T: Fn(f64) -> f64,
{
    let half_period = PI / a;
    let integrand = |xi: f64| amp(xi) * (xi * a).sin();
    let budget = 0.25 * tol;
    let max_cut = MAX_DIRECT_HALF_PERIODS * half_period;
    if tail(max_cut) <= budget {
        let mut lo = 0.0;
        let mut hi = max_cut;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if tail(mid) <= budget {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let cut = hi.max(half_period.min(max_cut));
        let mut breaks = graded_breaks(0.0, cut, 0.25 * feature.min(half_period), half_period.min(4.0 * feature.max(half_period / 8.0)));
        for k in 1.. {
            let z = k as f64 * half_period;
            if z >= cut {
                break;
            }
            breaks.push(z);
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let res = integrate(integrand, &breaks, 0.5 * tol, 20 * MAX_PANELS);
        let err = res.abs_error + tail(cut);
        return if res.converged {
            Ok((res.value, err))
        } else {
            Err(Error::Accuracy {
                best: res.value,
                achieved: err,
            })
        };
    }

    // panel sums between consecutive zeros, extrapolated
    let panel_tol = 1e-3 * tol;
    let mut sums = Vec::with_capacity(64);
    let mut total = 0.0;
    let mut last_est = f64::NAN;
    let mut stable = 0;
    for k in 0..MAX_EXTRAPOLATED_PANELS {
        let a0 = k as f64 * half_period;
        let a1 = a0 + half_period;
        let breaks = if k == 0 {
            graded_breaks(0.0, a1, 0.25 * feature.min(half_period), half_period)
        } else {
            vec![a0, a1]
        };
        let res = integrate(integrand, &breaks, panel_tol, MAX_PANELS);
        total += res.value;
        sums.push(total);
        if sums.len() >= 8 && sums.len() % 2 == 0 {
            let (est, err) = wynn_epsilon(&sums);
            if (est - last_est).abs() <= budget && err <= tol {
                stable += 1;
                if stable >= 2 {
                    return Ok((est, (est - last_est).abs().max(err)));
                }
            } else {
                stable = 0;
            }
            last_est = est;
        }
    }
    let (est, err) = wynn_epsilon(&sums);
    Err(Error::Accuracy {
        best: est,
        achieved: err.max((est - last_est).abs()),
    })
}

/// Numerical check of
/// `∫_0^∞ x sin(ax) e^{-β√(γ²+x²)} / √(γ²+x²) dx = aγ/√(a²+β²) · K1(γ√(a²+β²))`.
pub fn identity_gradshteyn_3914(a: f64, beta: f64, gamma: f64, tol: f64) -> Result<OracleReport> {
    for (name, v) in [("a", a), ("beta", beta), ("gamma", gamma)] {
        ensure_finite(name, v)?;
        if v <= 0.0 {
            return Err(Error::Domain(format!("{name} must be positive, got {v}")));
        }
    }
    let (lhs, err) = exp_sine_transform(beta, gamma, a, 0.1 * tol)?;
    let norm = a.hypot(beta);
    let rhs = a * gamma / norm * specfun::bessel_k(1, gamma * norm)?;
    Ok(OracleReport::from_pairs("gradshteyn_3.914", [(lhs, rhs)], tol)
        .with_meta("a", a)
        .with_meta("beta", beta)
        .with_meta("gamma", gamma)
        .with_meta("lhs", lhs)
        .with_meta("rhs", rhs)
        .with_meta("quadrature_error", err))
}
