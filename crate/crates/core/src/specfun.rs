//! Bessel functions J0, J1, I_n and K_n of real argument.
//!
//! Each function is available as a checked `bessel_*` entry point returning
//! `Result<f64>`, as an `*_eval` variant that also reports an upper bound on
//! the truncation error of the branch that produced it, and (crate-internal)
//! as an unchecked fast path used inside quadrature loops.
//!
//! Branches:
//!
//! | function | small argument        | middle                 | large argument        |
//! |----------|-----------------------|------------------------|-----------------------|
//! | J0, J1   | power series, `|z|<=8` | Miller recurrence `<=25` | Hankel expansion      |
//! | I_n      | ascending series everywhere (`n <= 200`, `z <= 700`)                    |
//! | K0, K1   | log series, `z <= 2`  | Steed continued fraction `<= 30` | exponential expansion |
//!
//! K_n for n >= 2 comes from upward recurrence, which is stable for K.

use serde::Serialize;

use crate::error::{Error, Result};

const EPS: f64 = f64::EPSILON;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Upper end of the J power-series branch.
pub const J_SERIES_MAX: f64 = 8.0;
/// Upper end of the J backward-recurrence branch; beyond it the Hankel expansion is used.
pub const J_MILLER_MAX: f64 = 25.0;
/// Upper end of the K log-series branch.
pub const K_SERIES_MAX: f64 = 2.0;
/// Above this argument K uses its exponential asymptotic expansion.
pub const K_ASYMPTOTIC_MIN: f64 = 30.0;

/// Largest order accepted by [`bessel_i`].
pub const I_MAX_ORDER: u32 = 200;
/// Largest argument accepted by [`bessel_i`]; `I_0(700)` is about `1.5e302`.
pub const I_MAX_ARG: f64 = 700.0;

/// A function value together with a bound on its truncation error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpecFunResult {
    pub value: f64,
    pub abs_error_estimate: f64,
}

impl SpecFunResult {
    fn new(value: f64, abs_error_estimate: f64) -> Self {
        Self {
            value,
            abs_error_estimate: abs_error_estimate.abs(),
        }
    }
}

fn check_finite(z: f64) -> Result<()> {
    if z.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("Bessel argument must be finite, got {z}")))
    }
}

// ---------------------------------------------------------------------------
// J0, J1

/// Bessel function of the first kind of order zero.
pub fn bessel_j0(z: f64) -> Result<f64> {
    Ok(j0_eval(z)?.value)
}

/// Bessel function of the first kind of order one.
pub fn bessel_j1(z: f64) -> Result<f64> {
    Ok(j1_eval(z)?.value)
}

pub fn j0_eval(z: f64) -> Result<SpecFunResult> {
    check_finite(z)?;
    Ok(j_branch(0, z.abs()))
}

pub fn j1_eval(z: f64) -> Result<SpecFunResult> {
    check_finite(z)?;
    let res = j_branch(1, z.abs());
    Ok(if z < 0.0 {
        SpecFunResult::new(-res.value, res.abs_error_estimate)
    } else {
        res
    })
}

#[inline]
pub(crate) fn j0(z: f64) -> f64 {
    j_branch(0, z.abs()).value
}

#[inline]
pub(crate) fn j1(z: f64) -> f64 {
    let v = j_branch(1, z.abs()).value;
    if z < 0.0 {
        -v
    } else {
        v
    }
}

fn j_branch(order: u32, a: f64) -> SpecFunResult {
    if a <= J_SERIES_MAX {
        j_series(order, a)
    } else if a <= J_MILLER_MAX {
        let (j0, j1, err) = j01_miller(a);
        SpecFunResult::new(if order == 0 { j0 } else { j1 }, err)
    } else {
        j_hankel(order, a)
    }
}

/// `J_n(z) = sum_k (-1)^k (z/2)^(2k+n) / (k! (k+n)!)` for n in {0, 1}.
pub(crate) fn j_series(order: u32, z: f64) -> SpecFunResult {
    let hz = 0.5 * z;
    let q = hz * hz;
    let mut term = if order == 0 { 1.0 } else { hz };
    let mut sum = term;
    let mut abs_sum = term.abs();
    let n = order as f64;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= -q / (k * (k + n));
        sum += term;
        abs_sum += term.abs();
        if k > hz && term.abs() <= 0.1 * EPS * sum.abs().max(EPS) {
            break;
        }
        if k > 200.0 {
            break;
        }
    }
    let next = term.abs() * q / ((k + 1.0) * (k + 1.0 + n));
    SpecFunResult::new(sum, next + 2.0 * EPS * abs_sum)
}

/// Miller backward recurrence normalised by `J0 + 2 sum_k J_2k = 1`.
pub(crate) fn j01_miller(z: f64) -> (f64, f64, f64) {
    let start = 2 * ((z as usize + 40) / 2);
    let mut upper = 0.0; // J_{k+1}
    let mut cur = 1e-30; // J_k, k = start (even)
    let mut norm = 2.0 * cur;
    let mut j1 = 0.0;
    for k in (1..=start).rev() {
        let lower = 2.0 * k as f64 / z * cur - upper;
        upper = cur;
        cur = lower;
        let idx = k - 1;
        if idx == 1 {
            j1 = cur;
        }
        if idx > 0 && idx % 2 == 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > 1e200 {
            cur *= 1e-200;
            upper *= 1e-200;
            norm *= 1e-200;
            j1 *= 1e-200;
        }
    }
    norm += cur;
    let err = 4.0 * start as f64 * EPS;
    (cur / norm, j1 / norm, err)
}

/// Hankel expansion `J_n(z) = sqrt(2/(pi z)) (P cos chi - Q sin chi)`.
pub(crate) fn j_hankel(order: u32, z: f64) -> SpecFunResult {
    let (p, q, tail) = hankel_pq(order, z);
    let (s, c) = z.sin_cos();
    let r2 = std::f64::consts::FRAC_1_SQRT_2;
    // chi = z - pi/4 (n = 0) or z - 3 pi/4 (n = 1)
    let (cos_chi, sin_chi) = if order == 0 {
        ((c + s) * r2, (s - c) * r2)
    } else {
        ((s - c) * r2, -(s + c) * r2)
    };
    let amp = (2.0 / (std::f64::consts::PI * z)).sqrt();
    let value = amp * (p * cos_chi - q * sin_chi);
    let err = amp * (tail + 4.0 * EPS * (p.abs() + q.abs())) + EPS * z * amp;
    SpecFunResult::new(value, err)
}

fn hankel_pq(order: u32, z: f64) -> (f64, f64, f64) {
    let mu = 4.0 * (order * order) as f64;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term: f64 = 1.0;
    let mut tail = 0.0;
    for k in 1..200u32 {
        let odd = (2 * k - 1) as f64;
        let next = term * (mu - odd * odd) / (k as f64 * 8.0 * z);
        if next.abs() >= term.abs() && k > 1 {
            tail = term.abs();
            break;
        }
        term = next;
        let j = k / 2;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            q += sign * term;
        } else {
            p += sign * term;
        }
        tail = term.abs();
        if term.abs() < 0.01 * EPS {
            break;
        }
    }
    (p, q, tail)
}

// ---------------------------------------------------------------------------
// I_n

/// Modified Bessel function of the first kind, `I_n(z)`, `z >= 0`.
pub fn bessel_i(n: u32, z: f64) -> Result<f64> {
    Ok(bessel_i_eval(n, z)?.value)
}

pub fn bessel_i_eval(n: u32, z: f64) -> Result<SpecFunResult> {
    check_finite(z)?;
    if z < 0.0 {
        return Err(Error::Domain(format!("I_n requires z >= 0, got {z}")));
    }
    if n > I_MAX_ORDER || z > I_MAX_ARG {
        return Err(Error::Range(format!(
            "I_n(z) outside the supported range n <= {I_MAX_ORDER}, z <= {I_MAX_ARG}: n = {n}, z = {z}"
        )));
    }
    if z == 0.0 {
        return Ok(SpecFunResult::new(if n == 0 { 1.0 } else { 0.0 }, 0.0));
    }
    let (s, rel) = i_scaled_series(n, z);
    let log_lead = n as f64 * (0.5 * z).ln() - ln_factorial(n);
    let value = log_lead.exp() * s;
    Ok(SpecFunResult::new(value, value * rel))
}

/// `I_n(z) * n! / (z/2)^n`, the ascending series with its leading power removed.
///
/// Equals 1 at `z = 0`. Returns the sum and a bound on its relative error.
pub(crate) fn i_scaled_series(n: u32, z: f64) -> (f64, f64) {
    let q = 0.25 * z * z;
    let nf = n as f64;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        let ratio = q / ((k + 1.0) * (nf + k + 1.0));
        let next = term * ratio;
        // remaining ratios are all below `ratio`, so the tail is geometric once ratio < 1
        if ratio < 1.0 {
            let tail = next / (1.0 - ratio);
            if tail <= 1e-17 * sum {
                return (sum, tail / sum + (k + 2.0) * EPS);
            }
        }
        term = next;
        sum += term;
        k += 1.0;
    }
}

/// `I_n(z) / I_n(z_ref)` for `0 <= z`, `0 < z_ref`, without under- or overflow.
pub fn bessel_i_ratio(n: u32, z: f64, z_ref: f64) -> Result<f64> {
    check_finite(z)?;
    check_finite(z_ref)?;
    if z < 0.0 || z_ref <= 0.0 {
        return Err(Error::Domain(format!(
            "I_n ratio requires z >= 0 and z_ref > 0, got {z}, {z_ref}"
        )));
    }
    if n > I_MAX_ORDER || z.max(z_ref) > I_MAX_ARG {
        return Err(Error::Range(format!("I_n ratio out of range: n = {n}")));
    }
    let lead = if n == 0 { 1.0 } else { (z / z_ref).powi(n as i32) };
    if lead == 0.0 {
        return Ok(0.0);
    }
    let (num, _) = i_scaled_series(n, z);
    let (den, _) = i_scaled_series(n, z_ref);
    Ok(lead * num / den)
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

// ---------------------------------------------------------------------------
// K_n

/// Modified Bessel function of the second kind, `K_n(z)`, `z > 0`.
pub fn bessel_k(n: u32, z: f64) -> Result<f64> {
    Ok(bessel_k_eval(n, z)?.value)
}

pub fn bessel_k_eval(n: u32, z: f64) -> Result<SpecFunResult> {
    check_finite(z)?;
    if z <= 0.0 {
        return Err(Error::Domain(format!("K_n requires z > 0, got {z}")));
    }
    let (k0, k1, rel) = k01(z);
    if n == 0 {
        return Ok(SpecFunResult::new(k0, k0 * rel));
    }
    let mut lower = k0;
    let mut cur = k1;
    for m in 1..n {
        let next = lower + 2.0 * m as f64 / z * cur;
        lower = cur;
        cur = next;
    }
    let rel_n = rel + n as f64 * EPS;
    Ok(SpecFunResult::new(cur, cur * rel_n))
}

/// `K_1(z)`, unchecked. `z` must be positive.
#[inline]
pub(crate) fn k1(z: f64) -> f64 {
    k01(z).1
}

/// Returns `(K0, K1, relative error bound)`.
pub(crate) fn k01(z: f64) -> (f64, f64, f64) {
    if z <= K_SERIES_MAX {
        k01_series(z)
    } else if z <= K_ASYMPTOTIC_MIN {
        k01_steed(z)
    } else {
        let (k0, e0) = k_asymptotic(0, z);
        let (k1, e1) = k_asymptotic(1, z);
        (k0, k1, (e0 / k0).max(e1 / k1) + 4.0 * EPS)
    }
}

pub(crate) fn k01_series(z: f64) -> (f64, f64, f64) {
    let hz = 0.5 * z;
    let q = hz * hz;
    let mut t0 = 1.0;
    let mut t1 = 1.0;
    let (mut i0, mut i1, mut s0, mut s1) = (0.0, 0.0, 0.0, 0.0);
    let mut harmonic = 0.0;
    for k in 0..60 {
        if k > 0 {
            let kf = k as f64;
            t0 *= q / (kf * kf);
            t1 *= q / (kf * (kf + 1.0));
        }
        let h_next = harmonic + 1.0 / (k as f64 + 1.0);
        i0 += t0;
        i1 += t1;
        s0 += t0 * harmonic;
        s1 += t1 * (harmonic + h_next);
        harmonic = h_next;
        if t0 < 1e-18 * i0 && k > 2 {
            break;
        }
    }
    i1 *= hz;
    let lg = hz.ln() + EULER_GAMMA;
    let k0 = -lg * i0 + s0;
    let k1 = 1.0 / z + lg * i1 - 0.5 * hz * s1;
    // cancellation against I grows like e^(2z)
    let rel = 16.0 * EPS * (2.0 * z).exp() * (1.0 + lg.abs());
    (k0, k1, rel)
}

/// Steed's continued-fraction evaluation of K0 and K1 for moderate z.
pub(crate) fn k01_steed(x: f64) -> (f64, f64, f64) {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    let mut iterations = 0;
    for i in 2..100_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        iterations = i;
        if (dels / s).abs() < 0.5 * EPS {
            break;
        }
    }
    h *= a1;
    let k0 = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1, 2.0 * iterations as f64 * EPS)
}

/// `K_n(z) ~ sqrt(pi/(2z)) e^-z sum_k a_k(n) / z^k`; returns value and truncation bound.
pub(crate) fn k_asymptotic(order: u32, z: f64) -> (f64, f64) {
    let mu = 4.0 * (order * order) as f64;
    let mut term: f64 = 1.0;
    let mut sum = 1.0;
    let mut tail = 0.0;
    for k in 1..200u32 {
        let odd = (2 * k - 1) as f64;
        let next = term * (mu - odd * odd) / (k as f64 * 8.0 * z);
        if next.abs() >= term.abs() {
            tail = term.abs();
            break;
        }
        term = next;
        sum += term;
        tail = term.abs();
        if term.abs() < 0.01 * EPS {
            break;
        }
    }
    let lead = (std::f64::consts::PI / (2.0 * z)).sqrt() * (-z).exp();
    (lead * sum, lead * tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn special_values() {
        assert_eq!(bessel_j0(0.0).unwrap(), 1.0);
        assert_eq!(bessel_j1(0.0).unwrap(), 0.0);
        assert_eq!(bessel_i(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_i(3, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_j1(-1.0).unwrap(), -bessel_j1(1.0).unwrap());
    }

    #[test]
    fn domain_and_range_errors() {
        assert!(matches!(bessel_j0(f64::NAN), Err(Error::Domain(_))));
        assert!(matches!(bessel_j1(f64::INFINITY), Err(Error::Domain(_))));
        assert!(matches!(bessel_k(1, 0.0), Err(Error::Domain(_))));
        assert!(matches!(bessel_k(0, -1.0), Err(Error::Domain(_))));
        assert!(matches!(bessel_i(201, 1.0), Err(Error::Range(_))));
        assert!(matches!(bessel_i(0, 701.0), Err(Error::Range(_))));
        assert!(matches!(bessel_i(0, -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn small_argument_k1_limit() {
        let z = 1e-3;
        assert!((z * bessel_k(1, z).unwrap() - 1.0).abs() <= 0.01);
    }

    #[test]
    fn j_branches_agree_in_overlap_windows() {
        for i in 0..=40 {
            let z = 7.0 + 2.0 * i as f64 / 40.0;
            let (m0, m1, _) = j01_miller(z);
            assert!((j_series(0, z).value - m0).abs() < 1e-10, "J0 at {z}");
            assert!((j_series(1, z).value - m1).abs() < 1e-10, "J1 at {z}");
        }
        for i in 0..=40 {
            let z = 24.0 + 2.0 * i as f64 / 40.0;
            let (m0, m1, _) = j01_miller(z);
            assert!((j_hankel(0, z).value - m0).abs() < 1e-10, "J0 at {z}");
            assert!((j_hankel(1, z).value - m1).abs() < 1e-10, "J1 at {z}");
        }
    }

    #[test]
    fn k_branches_agree_in_overlap_windows() {
        for i in 0..=20 {
            let z = 1.5 + i as f64 / 20.0;
            let (a0, a1, _) = k01_series(z);
            let (b0, b1, _) = k01_steed(z);
            assert_relative_eq!(a0, b0, max_relative = 1e-10);
            assert_relative_eq!(a1, b1, max_relative = 1e-10);
        }
        for i in 0..=20 {
            let z = 28.0 + 4.0 * i as f64 / 20.0;
            let (b0, b1, _) = k01_steed(z);
            assert_relative_eq!(k_asymptotic(0, z).0, b0, max_relative = 1e-10);
            assert_relative_eq!(k_asymptotic(1, z).0, b1, max_relative = 1e-10);
        }
    }

    #[test]
    fn error_estimates_are_small_and_nonnegative() {
        for &z in &[0.5, 3.0, 9.0, 20.0, 40.0, 5000.0] {
            let e = j0_eval(z).unwrap().abs_error_estimate;
            assert!((0.0..1e-12).contains(&e), "J0 err {e} at {z}");
        }
        for &z in &[0.5, 3.0, 40.0] {
            let r = bessel_k_eval(1, z).unwrap();
            assert!(r.abs_error_estimate >= 0.0 && r.abs_error_estimate <= 1e-10 * r.value);
        }
    }

    #[test]
    fn i_ratio_handles_underflowing_orders() {
        let r = bessel_i_ratio(150, 1e-3, 2e-3).unwrap();
        let expected = 0.5f64.powi(150);
        assert_relative_eq!(r, expected, max_relative = 1e-6);
    }
}
