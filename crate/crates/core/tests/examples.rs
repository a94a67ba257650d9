use std::f64::consts::PI;

use kg_green::disk::{disk_solution, mean_value_check, DiskProblem};
use kg_green::fd::{assemble_and_solve, compare_fields, FdProblem};
use kg_green::general::{green_halfplane_general, green_strip_general, r_k_from_coefficients};
use kg_green::halfplane::{green_halfplane_closed, green_halfplane_integral, HalfPlaneKernelPoint};
use kg_green::specfun::{bessel_i, bessel_j0, bessel_j1, bessel_k};
use kg_green::strip::{green_strip, green_strip_integral, green_strip_laplace, green_strip_series, green_strip_via_j1, StripKernelPoint};
use kg_green::*;

fn sp(x: f64, y: f64, r: f64) -> StripKernelPoint {
    StripKernelPoint::new(x, y, r).unwrap()
}

fn hp(x: f64, y: f64, r: f64) -> HalfPlaneKernelPoint {
    HalfPlaneKernelPoint::new(x, y, r).unwrap()
}

/// `Σ_k (-1)^k (z/2)^{2k} / (k!)²`.
fn j0_series(z: f64) -> f64 {
    let (mut t, mut s) = (1.0, 1.0);
    for k in 1..40 {
        t *= -0.25 * z * z / (k * k) as f64;
        s += t;
    }
    s
}

#[test]
fn bessel_reference_values() {
    assert_eq!(bessel_j0(0.0).unwrap(), 1.0);
    assert_eq!(bessel_j1(0.0).unwrap(), 0.0);
    assert!((bessel_j0(1.0).unwrap() - 0.765197686557967).abs() < 1e-14);
    assert!((bessel_j1(1.0).unwrap() - 0.440050585744934).abs() < 1e-14);
    assert_eq!(bessel_j1(-1.0).unwrap(), -bessel_j1(1.0).unwrap());
    assert_eq!(bessel_i(0, 0.0).unwrap(), 1.0);
    assert_eq!(bessel_i(3, 0.0).unwrap(), 0.0);
    assert!((bessel_i(1, 2.0).unwrap() - 1.590636854637329).abs() < 1e-14);
    assert!((bessel_k(1, 1.0).unwrap() - 0.601907230197235).abs() < 1e-13);
    assert!((1e-3 * bessel_k(1, 1e-3).unwrap() - 1.0).abs() <= 0.01);
    assert!((bessel_k(0, 5.0).unwrap() * 5f64.exp() - 0.547807).abs() < 1e-5);
    assert!(bessel_k(1, 0.0).is_err());
    assert!(bessel_j0(f64::NAN).is_err());
}

#[test]
fn first_zero_of_j0() {
    let (mut a, mut b) = (2.0, 3.0);
    for _ in 0..60 {
        let m = 0.5 * (a + b);
        if j0_series(a) * j0_series(m) <= 0.0 {
            b = m;
        } else {
            a = m;
        }
    }
    assert!((a - 2.404825557695773).abs() < 1e-12);
    assert!(bessel_j0(2.404825557695773).unwrap().abs() < 1e-10);
}

#[test]
fn strip_kernel_examples() {
    assert_eq!(green_strip_series(sp(1.0, PI, 2.0), 1e-10).unwrap().abs(), 0.0);
    let exact = 1.0 / (2.0 * PI * 1f64.cosh());
    assert!((green_strip_series(sp(1.0, PI / 2.0, 0.0), 1e-12).unwrap() - exact).abs() < 1e-12);
    assert_eq!(
        green_strip_series(sp(-1.0, 1.0, 1.0), 1e-10).unwrap(),
        green_strip_series(sp(1.0, 1.0, 1.0), 1e-10).unwrap()
    );
    assert!(green_strip_series(sp(0.0, 1.0, 1.0), 1e-10).is_err());

    assert!((green_strip_laplace(0.0, PI / 2.0).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-16);
    assert_eq!(green_strip_laplace(2.0, PI).unwrap().abs(), 0.0);
    let direct = 1f64.sin() / (2.0 * PI * (3f64.cosh() - 1f64.cos()));
    assert!((green_strip_laplace(3.0, 1.0).unwrap() - direct).abs() < 1e-16);
    assert!((green_strip_laplace(3.0, 1.0).unwrap() - 0.0140568081).abs() < 1e-10);
    assert!(green_strip_laplace(0.0, 0.0).is_err());

    let lap = green_strip_laplace(1.0, PI / 2.0).unwrap();
    assert!((green_strip_integral(sp(1.0, PI / 2.0, 0.0), 1e-10).unwrap() - lap).abs() < 1e-9);
    let s = green_strip_series(sp(2.0, 1.0, 1.0), 1e-10).unwrap();
    assert!((green_strip_integral(sp(2.0, 1.0, 1.0), 1e-10).unwrap() - s).abs() < 2e-10);
    assert!(green_strip_integral(sp(1.0, PI - 1e-9, 1.0), 1e-10).unwrap().abs() < 1e-8);
    assert!(green_strip_integral(sp(0.0, 1.0, 1.0), 1e-10).is_err());

    assert_eq!(
        green_strip_via_j1(sp(0.7, 1.3, 0.0), 1e-9).unwrap(),
        green_strip_laplace(0.7, 1.3).unwrap()
    );
    let s = green_strip_series(sp(1.0, 1.0, 1.0), 1e-9).unwrap();
    assert!((green_strip_via_j1(sp(1.0, 1.0, 1.0), 1e-9).unwrap() - s).abs() < 2e-9);
    assert!(green_strip_via_j1(sp(1.0, PI, 2.0), 1e-9).unwrap().abs() < 1e-9);

    assert_eq!(green_strip(sp(1.0, 0.0, 1.0), 1e-9).unwrap(), 0.0);
    assert_eq!(green_strip(sp(-2.0, 2.0, 0.5), 1e-9).unwrap(), green_strip(sp(2.0, 2.0, 0.5), 1e-9).unwrap());
    assert!(green_strip(sp(0.0, 0.0, 1.0), 1e-9).is_err());
    // below the switch the dispatcher agrees with the series
    let s = green_strip_series(sp(0.05, 1.0, 1.0), 1e-11).unwrap();
    assert!((green_strip(sp(0.05, 1.0, 1.0), 1e-11).unwrap() - s).abs() < 1e-9);
}

#[test]
fn halfplane_kernel_examples() {
    let k1 = bessel_k(1, 1.0).unwrap();
    assert!((green_halfplane_integral(hp(0.0, 1.0, 1.0), 1e-8).unwrap() - k1 / PI).abs() < 1e-8);
    let closed = green_halfplane_closed(hp(1.0, 1.0, 1.0)).unwrap();
    assert!((green_halfplane_integral(hp(1.0, 1.0, 1.0), 1e-10).unwrap() - closed).abs() < 2e-10);
    assert_eq!(green_halfplane_integral(hp(1.0, 0.0, 1.0), 1e-10).unwrap(), 0.0);

    assert!((green_halfplane_closed(hp(0.0, 1.0, 0.0)).unwrap() - 1.0 / PI).abs() < 1e-16);
    let expected = 4.0 / (5.0 * PI) * bessel_k(1, 5.0).unwrap();
    assert!((green_halfplane_closed(hp(3.0, 4.0, 1.0)).unwrap() - expected).abs() < 1e-18);
    assert!((green_halfplane_closed(hp(3.0, 4.0, 1.0)).unwrap() - 1.030e-3).abs() < 1e-6);
    assert_eq!(green_halfplane_closed(hp(2.0, 0.0, 1.0)).unwrap(), 0.0);
    assert!(green_halfplane_closed(hp(0.0, 0.0, 1.0)).is_err());

    // integral at tiny r against the Poisson kernel
    let poisson = 1.0 / (PI * (0.25 + 1.0));
    assert!((green_halfplane_integral(hp(0.5, 1.0, 1e-6), 1e-9).unwrap() - poisson).abs() < 1e-4);
}

#[test]
fn sine_transform_identity_examples() {
    use kg_green::halfplane::identity_gradshteyn_3914;
    let rep = identity_gradshteyn_3914(1.0, 1.0, 1.0, 1e-8).unwrap();
    assert!(rep.passed, "{rep:?}");
    let rhs = bessel_k(1, 2f64.sqrt()).unwrap() / 2f64.sqrt();
    assert!((rhs - 0.2221712618).abs() < 1e-9);
    assert!(identity_gradshteyn_3914(2.0, 0.5, 1.0, 1e-8).unwrap().passed);
    let tiny = identity_gradshteyn_3914(1e-6, 1.0, 1.0, 1e-8).unwrap();
    assert!(tiny.passed && tiny.max_abs < 1e-8);
}

#[test]
fn change_of_variables_examples() {
    let d = derive_change_of_variables(&EllipticCoefficients::canonical(1.0)).unwrap();
    assert_eq!((d.s_slope, d.beta), (0.0, 0.0));
    for k in 1..6 {
        let k = k as f64;
        assert!((d.r_k(k) - (1.0 + k * k).sqrt()).abs() < 1e-14);
    }
    let c = EllipticCoefficients { sigma1: 2.0, sigma2: 1.0, rho: 0.5, alpha1: 0.0, alpha2: 0.0, r: 1.0, width_l: PI };
    assert_eq!(derive_change_of_variables(&c).unwrap().s_slope, 1.0);
    let c = EllipticCoefficients { alpha1: 0.3, alpha2: -0.7, rho: 0.4, ..c };
    let d = derive_change_of_variables(&c).unwrap();
    for k in 1..10 {
        let k = k as f64;
        assert!(d.r_k(k + 1.0) > d.r_k(k));
        assert!((d.r_k(k) - r_k_from_coefficients(&c, k)).abs() < 1e-12 * d.r_k(k));
    }
    assert!(matches!(
        derive_change_of_variables(&EllipticCoefficients { rho: 1.0, ..c }),
        Err(Error::Ellipticity(_))
    ));
}

#[test]
fn general_kernel_examples() {
    let c = EllipticCoefficients::canonical(1.0);
    for &(x, y) in &[(0.5, 1.0), (-1.5, 2.5), (3.0, 0.4)] {
        let a = green_strip_general(x, y, &c, 1e-11).unwrap();
        assert!((a - green_strip(sp(x, y, 1.0), 1e-11).unwrap()).abs() < 2e-11);
        let b = green_halfplane_general(x, y, &c, 1e-11).unwrap();
        assert!((b - green_halfplane_closed(hp(x, y, 1.0)).unwrap()).abs() < 2e-11);
    }
    let c = EllipticCoefficients { sigma2: 2.0, ..c };
    assert_eq!(green_strip_general(0.4, PI, &c, 1e-10).unwrap().abs(), 0.0);
    assert_eq!(green_halfplane_general(0.4, 0.0, &c, 1e-10).unwrap(), 0.0);
    assert!(matches!(green_strip_general(0.0, 1.0, &c, 1e-10), Err(Error::Singularity { .. })));
}

#[test]
fn convolution_examples() {
    let one = BoundaryFunction::constant(1.0).unwrap();
    let strip = KernelSpec::strip(1.0, 1e-10);
    for &(x, y) in &[(0.0, 0.5), (3.0, 2.0)] {
        let v = convolve_kernel(&strip, &one, x, y, 1e-8).unwrap();
        assert!((v - (PI - y).sinh() / PI.sinh()).abs() < 1e-8);
    }
    let cosine = BoundaryFunction::cosine(1.0).unwrap();
    let v = convolve_kernel(&strip, &cosine, 0.0, PI / 2.0, 1e-8).unwrap();
    let q = 2f64.sqrt();
    assert!((v - (PI / 2.0 * q).sinh() / (PI * q).sinh()).abs() < 1e-8);
    assert!((v - 0.1072).abs() < 1e-4);
    let step = BoundaryFunction::step(0.0);
    for y in [0.3, 1.0, 2.5] {
        let v = convolve_kernel(&strip, &step, 0.0, y, 1e-8).unwrap();
        assert!((v - (PI - y).sinh() / (2.0 * PI.sinh())).abs() < 1e-8);
    }

    let half = KernelSpec::halfplane(1.0, 1e-10);
    assert!((convolve_kernel(&half, &one, 0.7, 1.3, 1e-8).unwrap() - (-1.3f64).exp()).abs() < 1e-8);
    assert!((convolve_kernel(&half, &cosine, 0.0, 1.0, 1e-8).unwrap() - (-q).exp()).abs() < 1e-8);
    let poisson = KernelSpec::halfplane(0.0, 1e-10);
    for &(x, y) in &[(0.5, 0.5), (-2.0, 1.0), (0.0, 3.0)] {
        let v = convolve_kernel(&poisson, &step, x, y, 1e-8).unwrap();
        assert!((v - (0.5 + (x / y).atan() / PI)).abs() < 1e-8);
    }
}

#[test]
fn solver_examples() {
    let zero = BoundaryFunction::zero();
    let g = BoundaryFunction::gaussian(0.3, 0.7).unwrap();
    let grid = GridSpec::new(-2.0, 2.0, 9, 0.0, PI, 7).unwrap();
    assert_eq!(solve_strip(&zero, &zero, &grid, 1.0, 1e-8).unwrap().max_abs(), 0.0);

    let bottom = solve_strip(&g, &zero, &grid, 1.0, 1e-9).unwrap();
    let top = solve_strip(&zero, &g, &grid, 1.0, 1e-9).unwrap();
    let ny = grid.ny;
    for j in 0..ny {
        for i in 0..grid.nx {
            assert!((top.get(i, j) - bottom.get(i, ny - 1 - j)).abs() < 2e-9);
        }
    }
    for (i, &x) in bottom.xs.iter().enumerate() {
        assert_eq!(bottom.get(i, 0), g.eval(x));
        assert_eq!(bottom.get(i, ny - 1), 0.0);
    }

    let grid = GridSpec::new(-1.0, 1.0, 5, 0.0, 3.0, 7).unwrap();
    let f = solve_halfplane(&BoundaryFunction::constant(1.0).unwrap(), &grid, 1.0, 1e-9).unwrap();
    for (j, &y) in f.ys.iter().enumerate() {
        for i in 0..f.nx() {
            assert!((f.get(i, j) - (-y).exp()).abs() < 1e-9);
        }
    }

    let c = EllipticCoefficients { sigma1: 1.3, rho: 0.3, alpha1: 0.4, ..EllipticCoefficients::canonical(1.0) };
    assert_eq!(solve_strip_general(&zero, &GridSpec::new(-1.0, 1.0, 3, 0.0, PI, 3).unwrap(), &c, 1e-8).unwrap().max_abs(), 0.0);
    assert_eq!(solve_halfplane_general(&zero, &grid, &c, 1e-8).unwrap().max_abs(), 0.0);
}

#[test]
fn finite_difference_examples() {
    // constant data: sides from the one-dimensional solution
    let c = EllipticCoefficients::canonical(1.0);
    let exact = |_: f64, y: f64| (PI - y).sinh() / PI.sinh();
    let h = 1.0 / 64.0;
    let p = FdProblem::from_edge_fn(c.with_width(1.0), (-1.0, 1.0), (0.0, 1.0), h, |x, y| exact(x, y + PI - 1.0)).unwrap();
    let sol = assemble_and_solve(&p, 1e-12, Execution::Sequential).unwrap();
    for (j, &y) in sol.field.ys.iter().enumerate() {
        for i in 0..sol.field.nx() {
            assert!((sol.field.get(i, j) - exact(0.0, y + PI - 1.0)).abs() < 1e-3);
        }
    }

    // cosine data: error ratio about 4 per halving
    let q = 2f64.sqrt();
    let sep = |x: f64, y: f64| x.cos() * ((1.0 - y) * q).sinh() / q.sinh();
    let errs: Vec<f64> = [1.0 / 16.0, 1.0 / 32.0]
        .iter()
        .map(|&h| {
            let p = FdProblem::from_edge_fn(c.with_width(1.0), (-2.0, 2.0), (0.0, 1.0), h, sep).unwrap();
            let f = assemble_and_solve(&p, 1e-13, Execution::Parallel).unwrap().field;
            let exact = FieldGrid::from_fn(f.xs.clone(), f.ys.clone(), |x, y| (sep(x, y), 0.0, false));
            compare_fields(&f, &exact, 1.0).unwrap().max_abs
        })
        .collect();
    let ratio = errs[0] / errs[1];
    assert!((ratio - 4.0).abs() < 0.3, "ratio {ratio}");

    // nonnegative data give a nonnegative discrete solution
    let cc = EllipticCoefficients { rho: 0.6, alpha1: 1.0, ..c.with_width(1.0) };
    let p = FdProblem::from_edge_fn(cc, (-1.0, 1.0), (0.0, 1.0), 1.0 / 16.0, |x, y| if y == 0.0 { (-x * x).exp() } else { 0.0 }).unwrap();
    assert!(assemble_and_solve(&p, 1e-12, Execution::Sequential).unwrap().field.values.iter().all(|&v| v >= 0.0));

    let bad = EllipticCoefficients { alpha1: 100.0, ..c.with_width(1.0) };
    let p = FdProblem::from_edge_fn(bad, (-1.0, 1.0), (0.0, 1.0), 0.125, |_, _| 0.0).unwrap();
    assert!(matches!(assemble_and_solve(&p, 1e-12, Execution::Sequential), Err(Error::Stability(_))));
}

#[test]
fn field_comparison_examples() {
    let xs = vec![0.0, 0.5, 1.0];
    let ys = vec![0.0, 1.0];
    let a = FieldGrid::from_fn(xs.clone(), ys.clone(), |x, y| (x + y, 0.0, false));
    let rep = compare_fields(&a, &a, 0.0).unwrap();
    assert!(rep.passed && rep.max_abs == 0.0);
    let mut b = a.clone();
    b.values[3] += 1e-2;
    let rep = compare_fields(&a, &b, 5e-3).unwrap();
    assert!(!rep.passed);
    assert!((rep.max_abs - 1e-2).abs() < 1e-15);
    let c = FieldGrid::from_fn(xs, vec![0.0], |x, y| (x + y, 0.0, false));
    assert!(matches!(compare_fields(&a, &c, 1.0), Err(Error::Shape(_))));
}

#[test]
fn disk_examples() {
    let p = DiskProblem::from_fn((0.0, 0.0), 0.5, 1.0, 64, |_| 1.0).unwrap();
    assert!((disk_solution(&p, 0.0, 0.0).unwrap() - 1.0 / bessel_i(0, 0.5).unwrap()).abs() < 1e-14);
    let p = DiskProblem::from_fn((0.0, 0.0), 1.0, 0.0, 64, f64::cos).unwrap();
    assert!((disk_solution(&p, 0.4, 0.9).unwrap() - 0.4 * 0.9f64.cos()).abs() < 1e-13);
    // centre value is the boundary mean over I0(r ρ̃)
    let psi = |t: f64| 1.0 + 0.3 * (2.0 * t).sin() + 0.1 * t.cos();
    let p = DiskProblem::from_fn((0.0, 0.0), 0.8, 2.0, 128, psi).unwrap();
    let mean = p.boundary_samples.iter().sum::<f64>() / 128.0;
    assert!((disk_solution(&p, 0.0, 0.0).unwrap() - mean / bessel_i(0, 1.6).unwrap()).abs() < 1e-14);
    assert!(matches!(disk_solution(&p, 0.8, 0.0), Err(Error::Domain(_))));
}

#[test]
fn disk_resolves_strip_field() {
    let problem = BvpProblem::Strip {
        bottom: BoundaryFunction::gaussian(0.0, 0.5).unwrap(),
        top: BoundaryFunction::zero(),
        r: 1.0,
    };
    let (cx, cy, rad) = (0.3, 1.2, 0.4);
    let v = |x: f64, y: f64| problem.value_at(x, y, 1e-10).unwrap().0;
    let p = DiskProblem::from_fn((cx, cy), rad, 1.0, 64, |t| v(cx + rad * t.cos(), cy + rad * t.sin())).unwrap();
    for &(rho, th) in &[(0.0, 0.0), (0.2, 1.0), (0.3, -2.0), (0.35, 3.0)] {
        let d = disk_solution(&p, rho, th).unwrap();
        assert!((d - v(cx + rho * th.cos(), cy + rho * th.sin())).abs() < 1e-5);
    }
}

#[test]
fn mean_value_examples() {
    let strip = BvpProblem::Strip {
        bottom: BoundaryFunction::gaussian(0.0, 0.5).unwrap(),
        top: BoundaryFunction::zero(),
        r: 1.0,
    };
    let rep = mean_value_check(
        |x, y| strip.value_at(x, y, 1e-9).map(|v| v.0),
        Domain::Strip,
        PI,
        (0.0, PI / 2.0),
        0.3,
        1.0,
        1e-6,
    )
    .unwrap();
    assert!(rep.passed, "{rep:?}");

    // finite-difference field, interpolated bilinearly, at the coarser tolerance
    let c = EllipticCoefficients::canonical(1.0).with_width(1.0);
    let problem = BvpProblem::StripGeneral { phi: BoundaryFunction::gaussian(0.0, 0.5).unwrap(), coefficients: c };
    let h = 1.0 / 64.0;
    let p = FdProblem::from_edge_fn(c, (-4.0, 4.0), (0.0, 1.0), h, |x, y| problem.value_at(x, y, 1e-10).unwrap().0).unwrap();
    let f = assemble_and_solve(&p, 1e-12, Execution::default()).unwrap().field;
    let interp = |x: f64, y: f64| -> Result<f64> {
        let (i, j) = (((x + 4.0) / h).floor() as usize, (y / h).floor() as usize);
        let (tx, ty) = ((x + 4.0) / h - i as f64, y / h - j as f64);
        Ok((1.0 - tx) * (1.0 - ty) * f.get(i, j)
            + tx * (1.0 - ty) * f.get(i + 1, j)
            + (1.0 - tx) * ty * f.get(i, j + 1)
            + tx * ty * f.get(i + 1, j + 1))
    };
    let rep = mean_value_check(interp, Domain::Strip, 1.0, (0.0, 0.5), 0.3, 1.0, 1e-3).unwrap();
    assert!(rep.passed, "{rep:?}");
    assert!(mean_value_check(interp, Domain::Strip, 1.0, (0.0, 0.9), 0.3, 1.0, 1e-3).is_err());
}
