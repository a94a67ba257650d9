//! Boundary data for the Dirichlet problems.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type Eval = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Bounded boundary function with declared regularity and far-field constants.
///
/// `eval(u)` equals `left_constant` for `u < -compact_radius` and
/// `right_constant` for `u > compact_radius`. An infinite `compact_radius`
/// means the function has no constant tails (e.g. `cos(au)`).
#[derive(Clone)]
pub struct BoundaryFunction {
    pub name: String,
    eval: Eval,
    pub holder_lambda: f64,
    pub holder_constant: f64,
    pub sup_bound: f64,
    pub left_constant: f64,
    pub right_constant: f64,
    pub compact_radius: f64,
    /// Points where the function is not smooth; used as quadrature breakpoints.
    pub kinks: Vec<f64>,
    /// Points where the function is discontinuous.
    pub jumps: Vec<f64>,
}

impl fmt::Debug for BoundaryFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundaryFunction")
            .field("name", &self.name)
            .field("holder_lambda", &self.holder_lambda)
            .field("sup_bound", &self.sup_bound)
            .field("left_constant", &self.left_constant)
            .field("right_constant", &self.right_constant)
            .field("compact_radius", &self.compact_radius)
            .finish()
    }
}

impl BoundaryFunction {
    /// Custom function. The caller vouches for the declared bounds.
    #[allow(clippy::too_many_arguments)]
    pub fn new<F>(
        name: impl Into<String>,
        f: F,
        holder_lambda: f64,
        holder_constant: f64,
        sup_bound: f64,
        left_constant: f64,
        right_constant: f64,
        compact_radius: f64,
    ) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(holder_lambda > 0.0 && holder_lambda <= 1.0) {
            return Err(Error::Config(format!("Hölder exponent must lie in (0, 1], got {holder_lambda}")));
        }
        if !(sup_bound >= 0.0) || !(compact_radius >= 0.0) {
            return Err(Error::Config("sup bound and compact radius must be >= 0".into()));
        }
        if compact_radius.is_finite() && (left_constant.abs() > sup_bound || right_constant.abs() > sup_bound) {
            return Err(Error::Config("far-field constants exceed the sup bound".into()));
        }
        Ok(Self {
            name: name.into(),
            eval: Arc::new(f),
            holder_lambda,
            holder_constant,
            sup_bound,
            left_constant,
            right_constant,
            compact_radius,
            kinks: Vec::new(),
            jumps: Vec::new(),
        })
    }

    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        (self.eval)(u)
    }

    pub fn has_constant_tails(&self) -> bool {
        self.compact_radius.is_finite()
    }

    pub fn is_continuous_at(&self, u: f64) -> bool {
        !self.jumps.contains(&u)
    }

    fn with_kinks(mut self, kinks: Vec<f64>, jumps: Vec<f64>) -> Self {
        self.kinks = kinks;
        self.jumps = jumps;
        self
    }

    /// `Θ(u - shift)`.
    pub fn step(shift: f64) -> Self {
        Self::new("step", move |u| if u > shift { 1.0 } else { 0.0 }, 1.0, 1.0, 1.0, 0.0, 1.0, shift.abs())
            .expect("valid step")
            .with_kinks(vec![shift], vec![shift])
    }

    /// `e^{-εu} Θ(u)`. The tail below `1e-17` is cut to keep compact support.
    pub fn exp_step(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Config(format!("exp_step needs eps > 0, got {eps}")));
        }
        let cut = 40.0 / eps;
        Ok(Self::new(
            format!("exp_step({eps})"),
            move |u| if u > 0.0 && u <= cut { (-eps * u).exp() } else { 0.0 },
            1.0,
            eps.max(1.0),
            1.0,
            0.0,
            0.0,
            cut,
        )?
        .with_kinks(vec![0.0, cut], vec![0.0]))
    }

    /// `e^{-(u-μ)²/(2σ²)}`, set to zero once below `e^{-45}`.
    pub fn gaussian(mu: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite() && mu.is_finite()) {
            return Err(Error::Config(format!("gaussian needs finite mu and sigma > 0, got ({mu}, {sigma})")));
        }
        let width = sigma * 90f64.sqrt();
        Self::new(
            format!("gaussian({mu},{sigma})"),
            move |u| {
                let z = (u - mu) / sigma;
                if (u - mu).abs() > width {
                    0.0
                } else {
                    (-0.5 * z * z).exp()
                }
            },
            1.0,
            1.0 / sigma,
            1.0,
            0.0,
            0.0,
            mu.abs() + width,
        )
    }

    /// `cos(au)`.
    pub fn cosine(a: f64) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::Config(format!("cosine needs a finite frequency, got {a}")));
        }
        Self::new(format!("cosine({a})"), move |u| (a * u).cos(), 1.0, a.abs(), 1.0, 0.0, 0.0, f64::INFINITY)
    }

    /// `max(0, 1 - |u|^λ)`.
    pub fn holder_cusp(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(Error::Config(format!("holder_cusp needs λ in (0, 1], got {lambda}")));
        }
        Ok(Self::new(
            format!("holder_cusp({lambda})"),
            move |u| (1.0 - u.abs().powf(lambda)).max(0.0),
            lambda,
            1.0,
            1.0,
            0.0,
            0.0,
            1.0,
        )?
        .with_kinks(vec![-1.0, 0.0, 1.0], Vec::new()))
    }

    pub fn constant(c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::Config(format!("constant must be finite, got {c}")));
        }
        Self::new(format!("constant({c})"), move |_| c, 1.0, 0.0, c.abs(), c, c, 0.0)
    }

    pub fn zero() -> Self {
        Self::constant(0.0).expect("finite")
    }

    /// `u ↦ self(u - c)`.
    pub fn shifted(&self, c: f64) -> Self {
        let inner = self.eval.clone();
        let mut out = self.clone();
        out.name = format!("{}(· - {c})", self.name);
        out.eval = Arc::new(move |u| inner(u - c));
        out.compact_radius = self.compact_radius + c.abs();
        out.kinks = self.kinks.iter().map(|k| k + c).collect();
        out.jumps = self.jumps.iter().map(|k| k + c).collect();
        out
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        let f = self.eval.clone();
        let g = other.eval.clone();
        let mut kinks: Vec<f64> = self.kinks.iter().chain(&other.kinks).copied().collect();
        kinks.sort_by(f64::total_cmp);
        kinks.dedup();
        let mut jumps: Vec<f64> = self.jumps.iter().chain(&other.jumps).copied().collect();
        jumps.sort_by(f64::total_cmp);
        jumps.dedup();
        Self {
            name: format!("{a}*{} + {b}*{}", self.name, other.name),
            eval: Arc::new(move |u| a * f(u) + b * g(u)),
            holder_lambda: self.holder_lambda.min(other.holder_lambda),
            holder_constant: a.abs() * self.holder_constant + b.abs() * other.holder_constant,
            sup_bound: a.abs() * self.sup_bound + b.abs() * other.sup_bound,
            left_constant: a * self.left_constant + b * other.left_constant,
            right_constant: a * self.right_constant + b * other.right_constant,
            compact_radius: self.compact_radius.max(other.compact_radius),
            kinks,
            jumps,
        }
    }

    /// Spot check of the declared sup bound and Hölder constant on `samples`
    /// equispaced points of `[-span, span]`.
    pub fn check_declared_bounds(&self, span: f64, samples: usize) -> bool {
        let n = samples.max(2);
        let pts: Vec<f64> = (0..n).map(|i| -span + 2.0 * span * i as f64 / (n - 1) as f64).collect();
        let vals: Vec<f64> = pts.iter().map(|&u| self.eval(u)).collect();
        if vals.iter().any(|v| v.abs() > self.sup_bound * (1.0 + 1e-12)) {
            return false;
        }
        pts.windows(2).zip(vals.windows(2)).all(|(p, v)| {
            let jump = p.iter().any(|&a| self.jumps.contains(&a))
                || self.jumps.iter().any(|&j| p[0] < j && j <= p[1]);
            jump || (v[1] - v[0]).abs() <= self.holder_constant * (p[1] - p[0]).powf(self.holder_lambda) * (1.0 + 1e-9) + 1e-14
        })
    }
}

/// Names accepted by [`from_spec`].
pub const REGISTRY: &[&str] = &["step", "exp_step", "gaussian", "cosine", "holder_cusp", "constant"];

/// Builds a registered boundary function from `name` and its parameters:
/// `step`, `exp_step(eps)`, `gaussian(mu, sigma)`, `cosine(a)`, `holder_cusp(lambda)`, `constant(c)`.
pub fn from_spec(name: &str, params: &[f64]) -> Result<BoundaryFunction> {
    let want = |n: usize| -> Result<()> {
        if params.len() == n {
            Ok(())
        } else {
            Err(Error::Config(format!("boundary function {name} takes {n} parameter(s), got {}", params.len())))
        }
    };
    match name {
        "step" => {
            if params.len() > 1 {
                return Err(Error::Config("step takes at most one parameter (shift)".into()));
            }
            Ok(BoundaryFunction::step(params.first().copied().unwrap_or(0.0)))
        }
        "exp_step" => {
            want(1)?;
            BoundaryFunction::exp_step(params[0])
        }
        "gaussian" => {
            want(2)?;
            BoundaryFunction::gaussian(params[0], params[1])
        }
        "cosine" => {
            want(1)?;
            BoundaryFunction::cosine(params[0])
        }
        "holder_cusp" => {
            want(1)?;
            BoundaryFunction::holder_cusp(params[0])
        }
        "constant" => {
            want(1)?;
            BoundaryFunction::constant(params[0])
        }
        _ => Err(Error::Config(format!("unknown boundary function '{name}' (known: {})", REGISTRY.join(", ")))),
    }
}

/// Parses `name` or `name(p1,p2,...)`.
pub fn parse(spec: &str) -> Result<BoundaryFunction> {
    let spec = spec.trim();
    let (name, params) = match spec.find('(') {
        Some(open) => {
            let close = spec
                .rfind(')')
                .filter(|&c| c == spec.len() - 1)
                .ok_or_else(|| Error::Config(format!("malformed boundary spec '{spec}'")))?;
            let inner = &spec[open + 1..close];
            let params = inner
                .split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Config(format!("bad parameter '{t}': {e}"))))
                .collect::<Result<Vec<_>>>()?;
            (spec[..open].trim(), params)
        }
        None => (spec, Vec::new()),
    };
    from_spec(name, &params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tails_match_declared_constants() {
        for f in [
            BoundaryFunction::step(0.5),
            BoundaryFunction::exp_step(0.5).unwrap(),
            BoundaryFunction::gaussian(0.3, 0.5).unwrap(),
            BoundaryFunction::holder_cusp(0.5).unwrap(),
            BoundaryFunction::constant(-2.0).unwrap(),
        ] {
            let r = f.compact_radius;
            for d in [1e-9, 1.0, 100.0] {
                assert_eq!(f.eval(-r - d), f.left_constant, "{}", f.name);
                assert_eq!(f.eval(r + d), f.right_constant, "{}", f.name);
            }
        }
    }

    #[test]
    fn declared_bounds_hold_on_samples() {
        for f in [
            BoundaryFunction::step(0.0),
            BoundaryFunction::gaussian(0.0, 0.5).unwrap(),
            BoundaryFunction::cosine(2.0).unwrap(),
            BoundaryFunction::holder_cusp(0.5).unwrap(),
        ] {
            assert!(f.check_declared_bounds(5.0, 2001), "{}", f.name);
        }
    }

    #[test]
    fn parse_registry_names() {
        assert_eq!(parse("gaussian(0, 0.5)").unwrap().eval(0.0), 1.0);
        assert_eq!(parse("step").unwrap().eval(1.0), 1.0);
        assert!(parse("nonsense(1)").is_err());
        assert!(parse("cosine").is_err());
        assert!(parse("cosine(1").is_err());
    }

    #[test]
    fn combine_and_shift() {
        let g = BoundaryFunction::gaussian(0.0, 1.0).unwrap();
        let s = BoundaryFunction::step(0.0);
        let c = g.combine(2.0, &s, -1.0);
        assert!((c.eval(0.5) - (2.0 * (-0.125f64).exp() - 1.0)).abs() < 1e-15);
        assert_eq!(c.right_constant, -1.0);
        let sh = g.shifted(2.0);
        assert_eq!(sh.eval(2.0), 1.0);
    }
}
