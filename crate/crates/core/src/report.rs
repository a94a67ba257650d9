use serde::Serialize;
use serde_json::{Map, Value};

/// Comparison record between two evaluations of the same quantity.
#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub name: String,
    pub max_abs: f64,
    pub mean_abs: f64,
    pub max_rel: f64,
    pub mean_rel: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub points: usize,
    pub metadata: Map<String, Value>,
}

impl OracleReport {
    /// Builds a report from `(computed, reference)` pairs. Passes iff every
    /// absolute deviation is finite and at most `tolerance`.
    pub fn from_pairs<I>(name: impl Into<String>, pairs: I, tolerance: f64) -> Self
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut max_abs: f64 = 0.0;
        let mut max_rel: f64 = 0.0;
        let mut sum_abs = 0.0;
        let mut sum_rel = 0.0;
        let mut points = 0;
        let mut finite = true;
        for (a, b) in pairs {
            let d = (a - b).abs();
            if !d.is_finite() {
                finite = false;
            }
            let scale = a.abs().max(b.abs());
            let rel = if scale > 0.0 { d / scale } else { 0.0 };
            max_abs = max_abs.max(d);
            max_rel = max_rel.max(rel);
            sum_abs += d;
            sum_rel += rel;
            points += 1;
        }
        let n = points.max(1) as f64;
        let mut report = Self {
            name: name.into(),
            max_abs: if finite { max_abs } else { f64::NAN },
            mean_abs: sum_abs / n,
            max_rel,
            mean_rel: sum_rel / n,
            tolerance,
            passed: finite && max_abs <= tolerance,
            points,
            metadata: Map::new(),
        };
        if !finite {
            report.metadata.insert("non_finite".into(), Value::Bool(true));
        }
        report
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.metadata.insert(key.to_string(), value.into());
        self
    }

    /// Marks the report failed without touching the deviation statistics.
    pub fn fail(mut self, reason: &str) -> Self {
        self.passed = false;
        self.metadata.insert("failure".into(), Value::String(reason.to_string()));
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_pairs_pass_with_zero_deviation() {
        let r = OracleReport::from_pairs("same", [(1.0, 1.0), (2.0, 2.0)], 0.0);
        assert!(r.passed);
        assert_eq!(r.max_abs, 0.0);
        assert_eq!(r.points, 2);
    }

    #[test]
    fn nan_fails() {
        let r = OracleReport::from_pairs("nan", [(f64::NAN, 1.0)], 1.0);
        assert!(!r.passed);
    }
}
