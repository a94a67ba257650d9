//! Rectangular evaluation grids and the fields computed on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `nx × ny` equispaced points on `[x_min, x_max] × [y_min, y_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub ny: usize,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (n - 1) as f64;
    let mut v: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
    v[n - 1] = hi;
    v
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, nx: usize, y_min: f64, y_max: f64, ny: usize) -> Result<Self> {
        let g = Self {
            x_min,
            x_max,
            nx,
            y_min,
            y_max,
            ny,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::Config("grid counts must be positive".into()));
        }
        let finite = [self.x_min, self.x_max, self.y_min, self.y_max].iter().all(|v| v.is_finite());
        if !finite || self.x_max < self.x_min || self.y_max < self.y_min {
            return Err(Error::Config("grid bounds must be finite and ordered".into()));
        }
        if (self.nx > 1 && self.x_max == self.x_min) || (self.ny > 1 && self.y_max == self.y_min) {
            return Err(Error::Config("repeated grid coordinates".into()));
        }
        Ok(())
    }

    pub fn xs(&self) -> Vec<f64> {
        linspace(self.x_min, self.x_max, self.nx)
    }

    pub fn ys(&self) -> Vec<f64> {
        linspace(self.y_min, self.y_max, self.ny)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Values and per-point error estimates on a tensor grid, stored row by row
/// (`y` outer, `x` inner).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldGrid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub values: Vec<f64>,
    pub err_estimates: Vec<f64>,
    /// Cells whose evaluation missed the requested accuracy; their value is
    /// the best available estimate.
    pub failed: Vec<bool>,
}

impl FieldGrid {
    pub fn from_fn<F>(xs: Vec<f64>, ys: Vec<f64>, mut f: F) -> Self
    where
        F: FnMut(f64, f64) -> (f64, f64, bool),
    {
        let n = xs.len() * ys.len();
        let mut values = Vec::with_capacity(n);
        let mut err_estimates = Vec::with_capacity(n);
        let mut failed = Vec::with_capacity(n);
        for &y in &ys {
            for &x in &xs {
                let (v, e, bad) = f(x, y);
                values.push(v);
                err_estimates.push(e);
                failed.push(bad);
            }
        }
        Self {
            xs,
            ys,
            values,
            err_estimates,
            failed,
        }
    }

    pub fn zeros(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        Self::from_fn(xs, ys, |_, _| (0.0, 0.0, false))
    }

    pub fn nx(&self) -> usize {
        self.xs.len()
    }

    pub fn ny(&self) -> usize {
        self.ys.len()
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.xs.len() + ix
    }

    #[inline]
    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[self.index(ix, iy)]
    }

    pub fn is_partial(&self) -> bool {
        self.failed.iter().any(|&b| b)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn check_shape(&self) -> Result<()> {
        let n = self.xs.len() * self.ys.len();
        if self.values.len() != n || self.err_estimates.len() != n || self.failed.len() != n {
            return Err(Error::Shape(format!(
                "{}x{} grid with {} values, {} error estimates, {} flags",
                self.xs.len(),
                self.ys.len(),
                self.values.len(),
                self.err_estimates.len(),
                self.failed.len()
            )));
        }
        Ok(())
    }

    /// Sub-grid keeping every `stride`-th point in each direction.
    pub fn subsample(&self, stride_x: usize, stride_y: usize) -> Self {
        let ix: Vec<usize> = (0..self.nx()).step_by(stride_x.max(1)).collect();
        let iy: Vec<usize> = (0..self.ny()).step_by(stride_y.max(1)).collect();
        let mut out = Self::zeros(ix.iter().map(|&i| self.xs[i]).collect(), iy.iter().map(|&j| self.ys[j]).collect());
        for (b, &j) in iy.iter().enumerate() {
            for (a, &i) in ix.iter().enumerate() {
                let src = self.index(i, j);
                let dst = out.index(a, b);
                out.values[dst] = self.values[src];
                out.err_estimates[dst] = self.err_estimates[src];
                out.failed[dst] = self.failed[src];
            }
        }
        out
    }
}
