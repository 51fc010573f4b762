//! Independent reference computations for the Floquet pipeline.

use std::f64::consts::PI;

use floquet_thermo::bath::BathModel;
use floquet_thermo::hill::{integrate_basis, SpringParams};
use floquet_thermo::modes::{analyze, periodic_part, FloquetAnalysis, ModeOptions};
use floquet_thermo::thermo::{distribution, rate_ladder, rate_ratio, stationary_solver};
use num_complex::Complex64;

const T: f64 = 2.0 * PI;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Classical RK4 for `ξ'' = −k(t) ξ` on complex `(ξ, ξ̇)`.
fn rk4(a: f64, q: f64, y0: [Complex64; 2], t0: f64, t1: f64, steps: usize) -> [Complex64; 2] {
    let k = |t: f64| a / 4.0 - q / 2.0 * t.cos();
    let f = |t: f64, y: [Complex64; 2]| [y[1], -k(t) * y[0]];
    let h = (t1 - t0) / steps as f64;
    let mut y = y0;
    for i in 0..steps {
        let t = t0 + h * i as f64;
        let k1 = f(t, y);
        let k2 = f(t + h / 2.0, [y[0] + k1[0] * (h / 2.0), y[1] + k1[1] * (h / 2.0)]);
        let k3 = f(t + h / 2.0, [y[0] + k2[0] * (h / 2.0), y[1] + k2[1] * (h / 2.0)]);
        let k4 = f(t + h, [y[0] + k3[0] * h, y[1] + k3[1] * h]);
        for j in 0..2 {
            y[j] += (k1[j] + k2[j] * 2.0 + k3[j] * 2.0 + k4[j]) * (h / 6.0);
        }
    }
    y
}

/// RK4 at `steps` and `2·steps`, Richardson-extrapolated (global order 4).
fn rk4_richardson(
    a: f64,
    q: f64,
    y0: [Complex64; 2],
    t0: f64,
    t1: f64,
    steps: usize,
) -> [Complex64; 2] {
    let coarse = rk4(a, q, y0, t0, t1, steps);
    let fine = rk4(a, q, y0, t0, t1, 2 * steps);
    [
        (fine[0] * 16.0 - coarse[0]) / 15.0,
        (fine[1] * 16.0 - coarse[1]) / 15.0,
    ]
}

fn oracle_monodromy(a: f64, q: f64) -> [[f64; 2]; 2] {
    let c1 = rk4_richardson(a, q, [c(1.0), c(0.0)], 0.0, T, 20_000);
    let c2 = rk4_richardson(a, q, [c(0.0), c(1.0)], 0.0, T, 20_000);
    [[c1[0].re, c2[0].re], [c1[1].re, c2[1].re]]
}

/// Floquet solution with `ξ(0) = 1` and positive Wronskian, sampled on
/// `n + 1` points of `[0, T]`.
fn oracle_solution(a: f64, q: f64, n: usize) -> Vec<Complex64> {
    let m = oracle_monodromy(a, q);
    let theta = ((m[0][0] + m[1][1]) / 2.0).acos();
    let mut y2 = (Complex64::from_polar(1.0, theta) - m[0][0]) / m[0][1];
    if y2.im < 0.0 {
        y2 = y2.conj();
    }
    let mut y = [c(1.0), y2];
    let mut out = vec![y[0]];
    for k in 0..n {
        let (t0, t1) = (T * k as f64 / n as f64, T * (k + 1) as f64 / n as f64);
        y = rk4_richardson(a, q, y, t0, t1, 16);
        out.push(y[0]);
    }
    out
}

/// `ν` from the unwrapped phase of sampled `ξ`, no quadrature of `Ω/|ξ|²`.
fn unwrapped_exponent(xi: &[Complex64]) -> f64 {
    xi.windows(2).map(|w| (w[1] / w[0]).arg()).sum::<f64>() / T
}

/// Composite Simpson for `(1/T)∫ v(t) e^{−iℓt} dt` on `n + 1` samples.
fn simpson_coefficient(v: &[Complex64], ell: i64) -> Complex64 {
    let n = v.len() - 1;
    assert!(n % 2 == 0);
    let h = T / n as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, &vk) in v.iter().enumerate() {
        let w = if k == 0 || k == n {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += vk * Complex64::from_polar(w, -(ell as f64) * h * k as f64);
    }
    acc * (h / 3.0) / T
}

fn analysis(a: f64, q: f64) -> FloquetAnalysis<f64> {
    analyze(&SpringParams::new(a, q).unwrap(), &ModeOptions::default()).unwrap()
}

fn border_below(a: f64, mut lo: f64, mut hi: f64) -> f64 {
    let stable = |q: f64| {
        integrate_basis(&SpringParams::new(a, q).unwrap(), 1e-12)
            .unwrap()
            .is_stable()
    };
    assert!(stable(lo) && !stable(hi));
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if stable(mid) {
            lo = mid
        } else {
            hi = mid
        }
    }
    lo
}

#[test]
fn trace_matches_fixed_step_richardson() {
    const TRACE_A8_Q3: f64 = -1.174290007952;
    let m = oracle_monodromy(8.0, 3.0);
    assert!((m[0][0] + m[1][1] - TRACE_A8_Q3).abs() < 1e-11);
    let lib = integrate_basis(&SpringParams::new(8.0, 3.0).unwrap(), 1e-12).unwrap();
    assert!(lib.is_stable());
    assert!(
        (lib.trace - TRACE_A8_Q3).abs() < 1e-9,
        "trace {} vs {TRACE_A8_Q3}",
        lib.trace
    );
    for i in 0..2 {
        for j in 0..2 {
            assert!((lib.m[i][j] - m[i][j]).abs() < 1e-9);
        }
    }
}

#[test]
fn modulus_repeats_over_five_periods() {
    let an = analysis(8.2, 5.0);
    let traj = &an.trajectory;
    let r0 = traj.xi[0].norm();
    let mut y = [traj.xi[0], traj.xi_dot[0]];
    for k in 1..=5 {
        y = rk4_richardson(8.2, 5.0, y, T * (k - 1) as f64, T * k as f64, 20_000);
        assert!((y[0].norm() - r0).abs() < 1e-8, "period {k}: |xi| = {}", y[0].norm());
    }
    assert!((traj.xi_end.norm() - r0).abs() < 1e-8);
}

#[test]
fn fourier_coefficients_match_simpson() {
    // Values of the q = 1 mode from the oracle above.
    const NU_A8_Q1: f64 = 1.407_741_046_083;
    let n = 512;
    let xi = oracle_solution(8.0, 1.0, n);
    let nu = unwrapped_exponent(&xi);
    assert!((nu - NU_A8_Q1).abs() < 1e-10, "oracle nu = {nu}");

    let an = analysis(8.0, 1.0);
    let mode = &an.mode;
    assert!((mode.nu - nu).abs() < 1e-10);

    let v: Vec<Complex64> = xi
        .iter()
        .enumerate()
        .map(|(k, &x)| x * Complex64::from_polar(1.0, -nu * T * k as f64 / n as f64))
        .collect();
    let l = mode.max_order as i64;
    for ell in -l..=l {
        let oracle = simpson_coefficient(&v, ell);
        let diff = (mode.coefficient(ell) - oracle).norm();
        assert!(diff < 1e-10, "l = {ell}: {} vs {oracle}", mode.coefficient(ell));
    }
    // Dropped orders are bounded by the reported tail mass.
    let bound = mode.tail_mass * mode.total_weight() + 1e-20;
    for ell in (l + 1..=l + 4).flat_map(|e| [e, -e]) {
        assert!(simpson_coefficient(&v, ell).norm_sqr() <= bound, "l = {ell}");
    }
}

#[test]
fn periodic_part_does_not_wind() {
    let an = analysis(8.0, 3.0);
    let traj = &an.trajectory;
    let v = periodic_part(traj, an.mode.nu).unwrap();
    let v_end = traj.xi_end * Complex64::from_polar(1.0, -an.mode.nu * T);
    let winding: f64 = v
        .iter()
        .chain(std::iter::once(&v_end))
        .collect::<Vec<_>>()
        .windows(2)
        .map(|w| (w[1] / w[0]).arg())
        .sum::<f64>()
        / T;
    assert!(winding.abs() < 1e-9, "residual winding {winding}");
    // The unwrapped phase of ξ itself gives the same exponent.
    let mut xi = traj.xi.clone();
    xi.push(traj.xi_end);
    assert!((unwrapped_exponent(&xi) - an.mode.nu).abs() < 1e-9);
}

#[test]
fn exponent_matches_multiplier_phase() {
    for (a, q) in [(8.0, 0.0), (8.0, 1.0), (8.0, 3.0), (8.0, 6.0), (8.0, 9.3), (8.2, 9.0), (3.0, 0.7)] {
        let an = analysis(a, q);
        let mode = &an.mode;
        assert!(mode.multiplier_mismatch() < 1e-8, "({a}, {q}): {}", mode.multiplier_mismatch());
        let (l1, l2) = an.monodromy.multipliers();
        let e = Complex64::from_polar(1.0, mode.nu * T);
        assert!((e - l1).norm().min((e - l2).norm()) < 1e-8);
    }
}

#[test]
fn master_equation_fixed_point_is_geometric() {
    let mode = analysis(8.0, 2.0).mode;
    for bath in [
        BathModel::power_law(1.0, 1.0, 1.0).unwrap(),
        BathModel::power_law(0.7, 0.5, 1.0).unwrap(),
        BathModel::gaussian(1.0, 3.2, 0.1).unwrap(),
    ] {
        let r = rate_ratio(&mode, &bath).unwrap();
        assert!(r < 0.9);
        let n_max = 200;
        let (up, down) = rate_ladder(&mode, &bath, n_max).unwrap();
        let p = stationary_solver(&up, &down).unwrap();
        let geo = distribution(r, n_max).unwrap();
        for n in 0..=n_max / 2 {
            assert!((p[n] - geo[n]).abs() < 1e-10, "n = {n}: {} vs {}", p[n], geo[n]);
        }
    }
}

#[test]
fn coefficients_turn_symmetric_at_integer_border() {
    let qb = border_below(8.0, 6.4, 6.6);
    assert!((qb - 6.49).abs() < 0.02);
    let asymmetry = |d: f64| {
        let mode = analysis(8.0, qb - d).mode;
        let total = mode.total_weight();
        (1..=mode.max_order as i64 + 1)
            .map(|l| {
                (mode.coefficient(l - 1).norm_sqr() - mode.coefficient(-l - 1).norm_sqr()).abs()
                    / total
            })
            .fold(0.0, f64::max)
    };
    let far = asymmetry(1e-3);
    let near = asymmetry(1e-5);
    assert!(far < 1e-2 && near < 1e-3, "{far:e} {near:e}");
    // Square-root approach to the border.
    assert!((far / near - 10.0).abs() < 1.0, "{}", far / near);
}
