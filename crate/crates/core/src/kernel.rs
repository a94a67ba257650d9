//! Kernel selection and the horizontal slices `v ↦ K(v, y)` used by the
//! convolution solvers.
//!
//! Every kernel handled here has the form
//! `K(v, y) = J e^{βs - b y} G_c(J s, Y; r_c)` with `s = c·y - v`, where `G_c`
//! is the canonical strip or half-plane kernel. The canonical kernels have
//! `J = 1`, `c = β = b = 0`.

use std::cell::Cell;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::general::{self, derive_change_of_variables, EllipticCoefficients};
use crate::halfplane::{self, HalfPlaneKernelPoint};
use crate::quadrature::{graded_breaks, integrate, MAX_PANELS};
use crate::strip::{self, StripKernelPoint, StripRepresentation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    #[default]
    Strip,
    HalfPlane,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Series,
    Integral,
    Closed,
    J1,
    #[default]
    Auto,
}

/// Which kernel to evaluate and to what accuracy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub domain: Domain,
    pub representation: Representation,
    pub r: f64,
    /// General operator; `None` means `Δ - r²` (strip width `π`).
    pub coefficients: Option<EllipticCoefficients>,
    pub tol: f64,
}

impl KernelSpec {
    pub fn strip(r: f64, tol: f64) -> Self {
        Self {
            domain: Domain::Strip,
            representation: Representation::Auto,
            r,
            coefficients: None,
            tol,
        }
    }

    pub fn halfplane(r: f64, tol: f64) -> Self {
        Self {
            domain: Domain::HalfPlane,
            ..Self::strip(r, tol)
        }
    }

    pub fn general(domain: Domain, c: EllipticCoefficients, tol: f64) -> Self {
        Self {
            domain,
            representation: Representation::Auto,
            r: c.r,
            coefficients: Some(c),
            tol,
        }
    }

    pub fn with_representation(mut self, rep: Representation) -> Self {
        self.representation = rep;
        self
    }

    /// Strip width, or infinity on the half-plane.
    pub fn height(&self) -> f64 {
        match self.domain {
            Domain::Strip => self.coefficients.map_or(PI, |c| c.width_l),
            Domain::HalfPlane => f64::INFINITY,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Config(format!("tolerance must be positive, got {}", self.tol)));
        }
        if !(self.r >= 0.0 && self.r.is_finite()) {
            return Err(Error::Domain(format!("r must be finite and >= 0, got {}", self.r)));
        }
        if let Some(c) = self.coefficients {
            c.validate()?;
            if c.r != self.r {
                return Err(Error::Config("kernel r differs from the coefficient set".into()));
            }
        }
        Ok(())
    }

    /// Regular part of the kernel at offset `x` and height `y`.
    pub fn evaluate(&self, x: f64, y: f64) -> Result<f64> {
        self.validate()?;
        let tol = self.tol;
        match (self.domain, self.coefficients) {
            (Domain::Strip, None) => {
                let rep = match self.representation {
                    Representation::Series => StripRepresentation::Series,
                    Representation::Integral => StripRepresentation::Integral,
                    Representation::J1 => StripRepresentation::J1,
                    Representation::Closed => StripRepresentation::Laplace,
                    Representation::Auto => StripRepresentation::Auto,
                };
                strip::green_strip_with(StripKernelPoint::new(x, y, self.r)?, rep, tol)
            }
            (Domain::HalfPlane, None) => {
                let p = HalfPlaneKernelPoint::new(x, y, self.r)?;
                match self.representation {
                    Representation::Integral => halfplane::green_halfplane_integral(p, tol),
                    Representation::Closed | Representation::Auto => halfplane::green_halfplane_closed(p),
                    rep => Err(Error::Config(format!("representation {rep:?} is not available on the half-plane"))),
                }
            }
            (Domain::Strip, Some(c)) => match self.representation {
                Representation::Series => general::green_strip_general(x, y, &c, tol),
                Representation::Auto => general::green_strip_general_mapped(x, y, &c, tol),
                rep => Err(Error::Config(format!("representation {rep:?} is not available for general strip kernels"))),
            },
            (Domain::HalfPlane, Some(c)) => match self.representation {
                Representation::Integral => general::green_halfplane_general(x, y, &c, tol),
                Representation::Closed | Representation::Auto => general::green_halfplane_general_closed(x, y, &c),
                rep => Err(Error::Config(format!("representation {rep:?} is not available for general half-plane kernels"))),
            },
        }
    }

    /// Horizontal slice at interior height `y`.
    pub fn slice(&self, y: f64) -> Result<KernelSlice> {
        self.validate()?;
        let h = self.height();
        if !(y > 0.0 && y < h) {
            return Err(Error::Domain(format!("slice height must be interior, got {y}")));
        }
        let c = self.coefficients.unwrap_or(EllipticCoefficients::canonical(self.r));
        let d = derive_change_of_variables(&c)?;
        let (stretch, y_canon, r_canon, mass) = match self.domain {
            Domain::Strip => {
                let y_canon = (PI * y / h).min(PI);
                if self.coefficients.is_none() {
                    (1.0, y, self.r, strip::strip_mass(y, self.r))
                } else {
                    (d.strip_stretch(), y_canon, d.canonical_strip_mass(), general::strip_mass_general(y, &d))
                }
            }
            Domain::HalfPlane => {
                if self.coefficients.is_none() {
                    (1.0, y, self.r, halfplane::halfplane_mass(y, self.r))
                } else {
                    (d.halfplane_stretch(), y / d.sigma2, d.mass, general::halfplane_mass_general(y, &d))
                }
            }
        };
        let slope = if self.coefficients.is_some() { d.s_slope } else { 0.0 };
        let beta = if self.coefficients.is_some() { d.beta } else { 0.0 };
        let vertical = if self.coefficients.is_some() { (-d.vertical_rate * y).exp() } else { 1.0 };
        Ok(KernelSlice {
            domain: self.domain,
            representation: self.representation,
            y,
            stretch,
            slope,
            beta,
            vertical,
            y_canon,
            r_canon,
            mass,
        })
    }
}

/// `v ↦ K(v, y)` at a fixed interior height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSlice {
    domain: Domain,
    representation: Representation,
    y: f64,
    stretch: f64,
    slope: f64,
    beta: f64,
    vertical: f64,
    y_canon: f64,
    r_canon: f64,
    mass: f64,
}

/// Distance cutoffs are searched up to this value.
const MAX_CUTOFF: f64 = 1e7;

impl KernelSlice {
    pub fn height(&self) -> f64 {
        self.y
    }

    /// Abscissa `v = c·y` where `s = 0` and the kernel peaks.
    pub fn center(&self) -> f64 {
        self.slope * self.y
    }

    /// Width of the peak around [`center`](Self::center).
    pub fn scale(&self) -> f64 {
        let canon = match self.domain {
            Domain::Strip => self.y_canon.min(PI - self.y_canon),
            Domain::HalfPlane => self.y_canon,
        };
        canon / self.stretch
    }

    /// `∫_ℝ K(v) dv` in closed form.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    fn canonical(&self, xc: f64, tol: f64) -> Result<f64> {
        let (yc, rc) = (self.y_canon, self.r_canon);
        match self.domain {
            Domain::Strip => {
                let rep = match self.representation {
                    Representation::Series => StripRepresentation::Series,
                    Representation::Integral => StripRepresentation::Integral,
                    Representation::J1 => StripRepresentation::J1,
                    Representation::Closed if rc == 0.0 => StripRepresentation::Laplace,
                    _ => StripRepresentation::Auto,
                };
                strip::green_strip_with(StripKernelPoint { x: xc, y: yc, r: rc }, rep, tol)
            }
            Domain::HalfPlane => match self.representation {
                Representation::Integral => {
                    halfplane::green_halfplane_integral(HalfPlaneKernelPoint { x: xc, y: yc, r: rc }, tol)
                }
                _ => Ok(halfplane::closed_unchecked(xc, yc, rc)),
            },
        }
    }

    /// `K(v)` with absolute accuracy `tol`.
    pub fn value(&self, v: f64, tol: f64) -> Result<f64> {
        let s = self.slope * self.y - v;
        let factor = self.stretch * self.vertical * (self.beta * s).exp();
        if factor == 0.0 {
            return Ok(0.0);
        }
        Ok(factor * self.canonical(self.stretch * s, tol / factor)?)
    }

    /// Upper bound on `∫_{|v - center| > d} |K(v)| dv`.
    pub fn tail(&self, d: f64) -> f64 {
        if d <= 0.0 {
            return f64::INFINITY;
        }
        let j = self.stretch;
        let e = self.vertical;
        let b = self.beta;
        match self.domain {
            Domain::Strip => {
                // |G_c(X)| <= (1/π) e^{-q|X|} / (1 - e^{-|X|/q}), q = √(1 + r_c²)
                let q = (1.0 + self.r_canon * self.r_canon).sqrt();
                let g_plus = q * j - b;
                let g_minus = q * j + b;
                let denom = PI * (-(j * d / q)).exp_m1().abs();
                j * e * ((-g_plus * d).exp() / g_plus + (-g_minus * d).exp() / g_minus) / denom
            }
            Domain::HalfPlane => {
                // G∞(S, T) <= T/(π S²) · (1 + √(π m |S|/2)) e^{-m|S|}
                let m = self.r_canon;
                let c = e * self.y_canon / (PI * j);
                let a = PI * m * j / 2.0;
                let side = |g: f64| {
                    let algebraic = 1.0 / d + 2.0 * (a / d).sqrt();
                    if g > 0.0 {
                        let expo = (1.0 + (a * d).sqrt()) * (-g * d).exp() / (g * d * d);
                        algebraic.min(expo)
                    } else {
                        algebraic
                    }
                };
                c * (side(m * j - b) + side(m * j + b))
            }
        }
    }

    /// Smallest distance `d` (up to a bisection tolerance) with `tail(d) <= budget`.
    pub fn cutoff(&self, budget: f64) -> Result<f64> {
        let mut hi = self.scale().max(1e-3);
        while self.tail(hi) > budget {
            hi *= 2.0;
            if hi > MAX_CUTOFF {
                return Err(Error::Accuracy {
                    best: f64::NAN,
                    achieved: self.tail(MAX_CUTOFF),
                });
            }
        }
        let mut lo = 0.5 * hi;
        if self.tail(lo) <= budget {
            return Ok(lo);
        }
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if self.tail(mid) <= budget {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    /// Closed-form cumulative integral when the kernel is an untilted Laplace kernel.
    fn closed_cumulative(&self, a: f64) -> Option<f64> {
        if self.r_canon != 0.0 || self.beta != 0.0 || self.vertical != 1.0 {
            return None;
        }
        let xc = self.stretch * (a - self.center());
        Some(match self.domain {
            Domain::Strip => strip::laplace_cumulative(xc, self.y_canon),
            Domain::HalfPlane => halfplane::poisson_cumulative(xc, self.y_canon),
        })
    }

    /// `∫_{-∞}^{a} K(v) dv` with its error estimate.
    pub fn cumulative(&self, a: f64, tol: f64) -> Result<(f64, f64)> {
        if let Some(v) = self.closed_cumulative(a) {
            return Ok((v, 4.0 * f64::EPSILON));
        }
        let center = self.center();
        let cut = self.cutoff(0.25 * tol)?;
        let tail = self.tail(cut);
        let d = a - center;
        let (lo, hi, sign, base) = if d <= 0.0 {
            (center - cut, a, 1.0, 0.0)
        } else {
            (a, center + cut, -1.0, self.mass)
        };
        if hi <= lo {
            return Ok((base, tail));
        }
        let first = 0.125 * self.scale().max(d.abs()).min(1.0);
        let max_width = 0.5;
        let mut breaks = if d <= 0.0 {
            graded_breaks(hi, lo, first, max_width)
        } else {
            graded_breaks(lo, hi, first, max_width)
        };
        breaks.sort_by(f64::total_cmp);
        let length = hi - lo;
        let ktol = 0.25 * tol / length.max(1.0);
        let (value, err) = self.integrate_kernel(|_| 1.0, &breaks, 0.5 * tol, ktol)?;
        Ok((base + sign * value, err + tail + ktol * length))
    }

    /// `∫ w(v) K(v) dv` over the partition `breaks` (in `v`).
    pub(crate) fn integrate_kernel<W: Fn(f64) -> f64>(
        &self,
        weight: W,
        breaks: &[f64],
        quad_tol: f64,
        kernel_tol: f64,
    ) -> Result<(f64, f64)> {
        let failure: Cell<Option<Error>> = Cell::new(None);
        let f = |v: f64| {
            let w = weight(v);
            if w == 0.0 {
                return 0.0;
            }
            match self.value(v, kernel_tol) {
                Ok(k) => w * k,
                Err(e) => {
                    let best = match &e {
                        Error::Accuracy { best, .. } => *best,
                        _ => f64::NAN,
                    };
                    failure.set(Some(e));
                    w * best
                }
            }
        };
        let res = integrate(f, breaks, quad_tol, 5 * MAX_PANELS);
        if let Some(e) = failure.take() {
            return match e {
                Error::Accuracy { .. } => Err(Error::Accuracy {
                    best: res.value,
                    achieved: res.abs_error.max(quad_tol) + kernel_tol,
                }),
                other => Err(other),
            };
        }
        if !res.converged {
            return Err(Error::Accuracy {
                best: res.value,
                achieved: res.abs_error,
            });
        }
        Ok((res.value, res.abs_error))
    }

    /// `∫_ℝ K(v) dv` by quadrature, independently of [`mass`](Self::mass).
    pub fn numeric_mass(&self, tol: f64) -> Result<(f64, f64)> {
        let center = self.center();
        let cut = self.cutoff(0.25 * tol)?;
        let tail = self.tail(cut);
        let first = 0.125 * self.scale();
        let mut breaks = graded_breaks(center, center - cut, first, 0.5);
        breaks.extend(graded_breaks(center, center + cut, first, 0.5).into_iter().skip(1));
        breaks.sort_by(f64::total_cmp);
        let ktol = 0.25 * tol / (2.0 * cut).max(1.0);
        let (v, e) = self.integrate_kernel(|_| 1.0, &breaks, 0.5 * tol, ktol)?;
        Ok((v, e + tail + ktol * 2.0 * cut))
    }
}
