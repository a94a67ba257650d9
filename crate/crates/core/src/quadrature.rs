//! Adaptive Gauss-Kronrod quadrature and Wynn's epsilon extrapolation.

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_000_016,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// One 21-point Kronrod panel on `[a, b]`: returns (integral, error estimate).
pub fn gauss_kronrod21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = WGK[10] * fc;
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let err = rescale_error((res_k - res_g) * half, res_abs * half.abs(), res_asc * half.abs());
    (value, err)
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * res_abs;
        if min_err > scaled {
            scaled = min_err;
        }
    }
    scaled
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

/// Default cap on the number of panels in [`integrate`].
pub const MAX_PANELS: usize = 2000;

/// Globally adaptive integration over the partition given by `breaks`.
///
/// `breaks` must be sorted; consecutive equal points are skipped. The panel
/// with the largest error estimate is bisected until the summed estimate is
/// below `abs_tol` or `max_panels` is reached.
pub fn integrate<F: Fn(f64) -> f64>(f: F, breaks: &[f64], abs_tol: f64, max_panels: usize) -> QuadResult {
    let mut panels: Vec<Panel> = Vec::with_capacity(breaks.len() + 16);
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b > a {
            let (value, err) = gauss_kronrod21(&f, a, b);
            panels.push(Panel { a, b, value, err });
        }
    }
    let mut evaluations = 21 * panels.len();
    if panels.is_empty() {
        return QuadResult {
            value: 0.0,
            abs_error: 0.0,
            evaluations,
            converged: true,
        };
    }
    let mut total_err: f64 = panels.iter().map(|p| p.err).sum();
    while total_err > abs_tol && panels.len() < max_panels {
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.err.total_cmp(&b.1.err))
            .unwrap();
        let p = panels[worst];
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a && mid < p.b) || (p.b - p.a) < 1e3 * f64::EPSILON * p.a.abs().max(p.b.abs()) {
            // panel cannot be split further in floating point
            break;
        }
        let (v1, e1) = gauss_kronrod21(&f, p.a, mid);
        let (v2, e2) = gauss_kronrod21(&f, mid, p.b);
        evaluations += 42;
        panels[worst] = Panel {
            a: p.a,
            b: mid,
            value: v1,
            err: e1,
        };
        panels.push(Panel {
            a: mid,
            b: p.b,
            value: v2,
            err: e2,
        });
        total_err = panels.iter().map(|p| p.err).sum();
    }
    let value = panels.iter().map(|p| p.value).sum();
    QuadResult {
        value,
        abs_error: total_err,
        evaluations,
        converged: total_err <= abs_tol,
    }
}

/// Break points from `start` to `end` (either direction): widths start at
/// `first` and double up to `max_width`, then stay at `max_width`.
pub fn graded_breaks(start: f64, end: f64, first: f64, max_width: f64) -> Vec<f64> {
    let mut out = vec![start];
    let dir = if end >= start { 1.0 } else { -1.0 };
    let len = (end - start).abs();
    if len == 0.0 {
        return out;
    }
    let mut w = first.max(len * 1e-14).min(max_width);
    let mut pos = 0.0;
    while pos + w < len {
        pos += w;
        out.push(start + dir * pos);
        w = (2.0 * w).min(max_width);
    }
    out.push(end);
    out
}

/// Wynn's epsilon algorithm applied to a sequence of partial sums.
///
/// Returns the extrapolated limit and a crude error estimate (the change
/// between the two most recent even-column estimates).
pub fn wynn_epsilon(partial_sums: &[f64]) -> (f64, f64) {
    let n = partial_sums.len();
    if n == 0 {
        return (0.0, f64::INFINITY);
    }
    if n < 3 {
        let last = partial_sums[n - 1];
        let prev = if n > 1 { partial_sums[n - 2] } else { 0.0 };
        return (last, (last - prev).abs());
    }
    // eps_{-1}^{(k)} = 0, eps_0^{(k)} = S_k; columns advance in place.
    let mut prev_col = vec![0.0; n + 1];
    let mut col: Vec<f64> = partial_sums.to_vec();
    let mut best = partial_sums[n - 1];
    let mut best_err = (partial_sums[n - 1] - partial_sums[n - 2]).abs();
    let mut column = 0;
    while col.len() > 1 {
        let mut next = Vec::with_capacity(col.len() - 1);
        let mut broke = false;
        for k in 0..col.len() - 1 {
            let diff = col[k + 1] - col[k];
            if diff == 0.0 || !diff.is_finite() {
                broke = true;
                break;
            }
            next.push(prev_col[k + 1] + 1.0 / diff);
        }
        if broke {
            break;
        }
        column += 1;
        prev_col = col;
        col = next;
        if column % 2 == 0 && !col.is_empty() {
            let m = col.len();
            let est = col[m - 1];
            let err = if m > 1 {
                (col[m - 1] - col[m - 2]).abs()
            } else {
                (est - best).abs()
            };
            if err.is_finite() && err <= best_err {
                best = est;
                best_err = err;
            }
        }
    }
    (best, best_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_is_exact_for_polynomials() {
        let (v, _) = gauss_kronrod21(&|x: f64| x.powi(20) * 21.0, 0.0, 1.0);
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        let eps = 1e-3;
        let f = |x: f64| eps / std::f64::consts::PI / (x * x + eps * eps);
        let breaks = graded_breaks(0.0, 10.0, eps / 8.0, 1.0);
        let res = integrate(f, &breaks, 1e-12, MAX_PANELS);
        let exact = (10.0f64 / eps).atan() / std::f64::consts::PI;
        assert!(res.converged);
        assert!((res.value - exact).abs() < 1e-11);
    }

    #[test]
    fn graded_breaks_reach_both_directions() {
        let up = graded_breaks(1.0, 5.0, 0.1, 1.0);
        assert_eq!(*up.first().unwrap(), 1.0);
        assert_eq!(*up.last().unwrap(), 5.0);
        assert!(up.windows(2).all(|w| w[1] > w[0]));
        let down = graded_breaks(1.0, -5.0, 0.1, 1.0);
        assert_eq!(*down.last().unwrap(), -5.0);
        assert!(down.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn wynn_sums_alternating_harmonic() {
        let mut s = 0.0;
        let sums: Vec<f64> = (1..=20)
            .map(|k| {
                s += if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
                s
            })
            .collect();
        let (v, _) = wynn_epsilon(&sums);
        assert!((v - std::f64::consts::LN_2).abs() < 1e-12, "{v}");
    }

    #[test]
    fn wynn_assigns_abel_value_to_grandi_series() {
        let sums: Vec<f64> = (0..10).map(|k| if k % 2 == 0 { 1.0 } else { 0.0 }).collect();
        let (v, _) = wynn_epsilon(&sums);
        assert!((v - 0.5).abs() < 1e-12);
    }
}
