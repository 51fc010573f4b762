use std::fmt;
use std::time::Instant;

use floquet_thermo::bath::{occupation, spectral_density};
use floquet_thermo::hill::integrate_basis;
use floquet_thermo::modes::{analyze, periodic_part};
use floquet_thermo::thermo::{
    dipole_coefficient, dissipation, distribution, master_residuals, rate_ladder, rate_matrix,
    rate_ratio, stationary_solver, transition_rates,
};
use floquet_thermo::{BathModel, FloquetAnalysis, FloquetMode, ModeOptions, QuasiSteadyState, SpringParams};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
    pub seconds: f64,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Largest deviation against its limit.
fn bounded(name: &'static str, worst: f64, limit: f64) -> Check {
    Check {
        name,
        passed: worst <= limit,
        detail: format!("max {worst:.3e} (limit {limit:.0e})"),
    }
}

fn failed(name: &'static str, detail: impl ToString) -> Check {
    Check {
        name,
        passed: false,
        detail: detail.to_string(),
    }
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs().max(f64::MIN_POSITIVE)
}

fn ohmic() -> BathModel {
    BathModel::power_law(1.0, 1.0, 1.0).expect("valid bath")
}

fn baths() -> Vec<BathModel> {
    vec![
        BathModel::power_law(1.0, 0.5, 1.0).expect("valid bath"),
        ohmic(),
        BathModel::power_law(1.0, 2.0, 1.0).expect("valid bath"),
        BathModel::gaussian(1.0, 3.2, 0.1).expect("valid bath"),
        BathModel::gaussian(1.0, 3.0, 0.1).expect("valid bath"),
    ]
}

/// Stable sample points kept away from the borders.
fn sample_points() -> Vec<(f64, FloquetAnalysis)> {
    let mut out = Vec::new();
    for a in [0.6, 3.0, 8.0, 8.2, 12.0] {
        for k in 0..=20 {
            let q = 0.5 * k as f64;
            let params = SpringParams::new(a, q).expect("valid point");
            let Ok(m) = integrate_basis(&params, 1e-12) else { continue };
            if m.is_stable() && 2.0 - m.trace.abs() > 1e-3 {
                if let Ok(an) = floquet_thermo::modes::analyze_monodromy(&params, m, &ModeOptions::default()) {
                    out.push((a, an));
                }
            }
        }
    }
    out
}

fn analysis(a: f64, q: f64) -> floquet_thermo::Result<FloquetAnalysis> {
    analyze(&SpringParams::new(a, q)?, &ModeOptions::default())
}

/// Energy flow into the bath summed transition by transition over `n ≤ 200`,
/// using the dipole matrix elements instead of the closed form.
pub fn dissipation_direct_sum(mode: &FloquetMode, bath: &BathModel, r: f64) -> floquet_thermo::Result<f64> {
    let p = distribution(r, 200)?;
    let mut total = 0.0;
    for (n, &p_n) in p.iter().enumerate() {
        let targets = [Some(n + 1), n.checked_sub(1)];
        for m in targets.into_iter().flatten() {
            let shift = if m > n { mode.nu } else { -mode.nu };
            for ell in mode.orders() {
                let x = dipole_coefficient(mode, m, n, ell);
                let f = shift + ell as f64;
                let j = spectral_density(f.abs(), bath) / bath.j0;
                if x.norm_sqr() == 0.0 || j == 0.0 {
                    continue;
                }
                total -= f * x.norm_sqr() * occupation(f, bath.beta)? * j * p_n;
            }
        }
    }
    Ok(total / mode.total_weight())
}

pub fn run_validation() -> Report {
    let start = Instant::now();
    let points = sample_points();
    let mut checks = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);

    let worst = |f: &dyn Fn(&FloquetAnalysis) -> f64| {
        points.iter().map(|(_, an)| f(an)).fold(0.0, f64::max)
    };
    checks.push(bounded(
        "monodromy determinant |det M - 1|",
        worst(&|an| (an.monodromy.det() - 1.0).abs()),
        1e-9,
    ));
    checks.push(bounded(
        "wronskian drift",
        worst(&|an| an.trajectory.wronskian_drift()),
        1e-9,
    ));
    checks.push(bounded(
        "exponent vs multiplier phase",
        worst(&|an| an.mode.multiplier_mismatch()),
        1e-8,
    ));
    checks.push(bounded(
        "parseval",
        worst(&|an| {
            let v = periodic_part(&an.trajectory, an.mode.nu).expect("mode was built from it");
            let mass = v.iter().map(|z| z.norm_sqr()).sum::<f64>() / v.len() as f64;
            rel(an.mode.total_weight(), mass)
        }),
        1e-10,
    ));
    checks.push(bounded(
        "fft vs direct quadrature",
        worst(&|an| {
            let v = periodic_part(&an.trajectory, an.mode.nu).expect("mode was built from it");
            let n = v.len() as f64;
            an.mode
                .iter()
                .map(|(ell, c)| {
                    let direct: Complex64 = v
                        .iter()
                        .zip(&an.trajectory.times)
                        .map(|(x, &t)| x * Complex64::from_polar(1.0, -(ell as f64) * t))
                        .sum::<Complex64>()
                        / n;
                    (direct - c).norm()
                })
                .fold(0.0, f64::max)
        }),
        1e-10,
    ));

    let mut scale_worst = 0.0f64;
    for (a, an) in &points {
        let c = Complex64::from_polar(rng.gen_range(0.01..100.0), rng.gen_range(-3.0..3.0));
        let scaled = an.mode.scaled(c);
        for bath in baths() {
            let (Ok(x), Ok(y)) = (
                QuasiSteadyState::evaluate(&an.mode, &bath, *a),
                QuasiSteadyState::evaluate(&scaled, &bath, *a),
            ) else {
                continue;
            };
            scale_worst = scale_worst.max(rel(y.r, x.r));
            scale_worst = scale_worst.max((y.inv_quasitemp - x.inv_quasitemp).abs());
            if let (Some(u), Some(v)) = (x.p0_ratio, y.p0_ratio) {
                scale_worst = scale_worst.max(rel(v, u));
            }
            if let (Some(u), Some(v)) = (x.dissipation, y.dissipation) {
                // R₁ and R₂ cancel at q = 0, so compare against the terms.
                let scale = u.r1.abs().max(u.r2.abs());
                scale_worst = scale_worst.max((v.total - u.total).abs() / scale);
            }
        }
    }
    checks.push(bounded("normalization invariance", scale_worst, 1e-10));

    let mut occ_worst = 0.0f64;
    for beta in [0.01, 0.3, 1.0, 4.0, 30.0] {
        for k in 0..60 {
            let w = 10f64.powf(-8.0 + 0.15 * k as f64);
            let (up, down) = (occupation(w, beta), occupation(-w, beta));
            match (up, down) {
                (Ok(u), Ok(d)) => occ_worst = occ_worst.max((d - u - 1.0).abs() / d.max(1.0)),
                _ => occ_worst = f64::INFINITY,
            }
        }
    }
    checks.push(bounded("N(-w) - N(w) = 1", occ_worst, 1e-12));

    let density_ok = baths().iter().all(|b| {
        (0..400).all(|k| {
            let w = 0.025 * k as f64;
            let j = b.spectral_density(w);
            let peak = match b.density {
                floquet_thermo::SpectralDensity::Gaussian { omega0, .. } => b.spectral_density(omega0),
                _ => f64::INFINITY,
            };
            j >= 0.0 && j <= peak
        })
    });
    checks.push(Check {
        name: "spectral density J >= 0, Gaussian peak at w0",
        passed: density_ok,
        detail: format!("{} densities on [0, 10)", baths().len()),
    });

    checks.push(tridiagonality());
    checks.push(equilibrium());
    checks.push(positivity(&mut rng, 200));
    checks.push(master_equation());
    checks.push(direct_dissipation());
    checks.push(border_symmetry());

    Report {
        checks,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn tridiagonality() -> Check {
    const NAME: &str = "rate matrix tridiagonal, ratio n-independent";
    let mut worst = 0.0f64;
    for (a, q) in [(8.0, 1.0), (8.0, 3.0), (8.2, 5.0)] {
        let Ok(an) = analysis(a, q) else { return failed(NAME, format!("analysis failed at ({a}, {q})")) };
        for bath in baths() {
            let Ok(gamma) = rate_matrix(&an.mode, &bath, 12) else { continue };
            for (m, row) in gamma.iter().enumerate() {
                for (n, &g) in row.iter().enumerate() {
                    if m.abs_diff(n) != 1 && g != 0.0 {
                        return failed(NAME, format!("Gamma[{m}][{n}] = {g:e}"));
                    }
                }
            }
            let Ok(r) = rate_ratio(&an.mode, &bath) else { continue };
            for n in [0, 5, 50] {
                let (up, down) = transition_rates(&an.mode, &bath, n).expect("ratio was finite");
                worst = worst.max(rel(up / down, r));
                if n < 12 {
                    worst = worst.max(rel(gamma[n + 1][n], up)).max(rel(gamma[n][n + 1], down));
                }
            }
        }
    }
    bounded(NAME, worst, 1e-12)
}

fn equilibrium() -> Check {
    const NAME: &str = "undriven limit q = 0";
    let Ok(an) = analysis(8.0, 0.0) else { return failed(NAME, "analysis failed") };
    let omega0 = 2f64.sqrt();
    let mut worst = (an.mode.nu - omega0).abs();
    for bath in baths() {
        match QuasiSteadyState::evaluate(&an.mode, &bath, 8.0) {
            Ok(s) => {
                let r_eq = (-bath.beta * omega0).exp();
                worst = worst
                    .max((s.r - r_eq).abs())
                    .max((s.inv_quasitemp - bath.beta).abs())
                    .max((s.p0_ratio.unwrap_or(f64::NAN) - 1.0).abs())
                    .max(s.dissipation.map_or(f64::NAN, |d| d.total.abs()));
            }
            Err(e) => return failed(NAME, e),
        }
    }
    if worst.is_nan() {
        return failed(NAME, "missing observable");
    }
    bounded(NAME, worst, 1e-8)
}

/// Random stable `(a, q, β, density)` with `r < 1`; counts `R ≤ 0`.
pub fn positivity(rng: &mut ChaCha8Rng, samples: usize) -> Check {
    const NAME: &str = "dissipation positive";
    let mut found = 0;
    let mut violations = Vec::new();
    let mut attempts = 0;
    while found < samples && attempts < 50 * samples {
        attempts += 1;
        let a = rng.gen_range(0.3..12.0);
        let q = rng.gen_range(0.0..10.0);
        let beta = rng.gen_range(0.1..5.0);
        let bath = if rng.gen_bool(0.5) {
            BathModel::power_law(beta, rng.gen_range(0.2..3.0), rng.gen_range(0.2..4.0))
        } else {
            BathModel::gaussian(beta, rng.gen_range(0.0..5.0), rng.gen_range(0.02..2.0))
        }
        .expect("ranges are valid");
        let Ok(an) = analysis(a, q) else { continue };
        let Ok(state) = QuasiSteadyState::evaluate(&an.mode, &bath, a) else { continue };
        let Some(d) = state.dissipation else { continue };
        found += 1;
        if !(d.total > 0.0) {
            violations.push(format!("(a={a:.4}, q={q:.4}, R={:e})", d.total));
        }
    }
    Check {
        name: NAME,
        passed: found == samples && violations.is_empty(),
        detail: format!(
            "{found} configurations, {} violations {}",
            violations.len(),
            violations.join(" ")
        ),
    }
}

fn master_equation() -> Check {
    const NAME: &str = "geometric distribution vs master equation";
    let mut worst = 0.0f64;
    let mut residual = 0.0f64;
    for (a, q) in [(8.0, 1.0), (8.0, 2.0), (3.0, 1.0)] {
        let Ok(an) = analysis(a, q) else { return failed(NAME, "analysis failed") };
        for bath in baths() {
            let Ok(r) = rate_ratio(&an.mode, &bath) else { continue };
            if !(r < 0.9) {
                continue;
            }
            let (up, down) = rate_ladder(&an.mode, &bath, 200).expect("ratio was finite");
            let p = match stationary_solver(&up, &down) {
                Ok(p) => p,
                Err(e) => return failed(NAME, e),
            };
            let geo = distribution(r, 200).expect("r < 1");
            for n in 0..=100 {
                worst = worst.max((p[n] - geo[n]).abs());
            }
            let scale = up.iter().chain(&down).fold(0.0f64, |m, &x| m.max(x));
            for res in master_residuals(&up, &down, &p) {
                residual = residual.max(res.abs() / scale);
            }
        }
    }
    let mut c = bounded(NAME, worst, 1e-10);
    c.passed &= residual <= 1e-12;
    c.detail = format!("{}; row residual {residual:.3e} (limit 1e-12)", c.detail);
    c
}

fn direct_dissipation() -> Check {
    const NAME: &str = "closed-form dissipation vs direct sum";
    let mut worst = 0.0f64;
    let mut used = 0;
    for (a, q) in [(8.0, 3.0), (8.0, 1.0), (8.2, 5.0), (3.0, 2.0)] {
        let Ok(an) = analysis(a, q) else { return failed(NAME, "analysis failed") };
        for bath in baths() {
            let Ok(r) = rate_ratio(&an.mode, &bath) else { continue };
            // 200 levels leave a relative tail below 1e-12 only for r ≲ 0.8.
            if !(r < 0.8) {
                continue;
            }
            let closed = dissipation(&an.mode, &bath, r).expect("r < 1");
            match dissipation_direct_sum(&an.mode, &bath, r) {
                Ok(direct) => worst = worst.max(rel(closed.total, direct)),
                Err(e) => return failed(NAME, e),
            }
            used += 1;
        }
    }
    if used == 0 {
        return failed(NAME, "no configuration with r < 0.8");
    }
    bounded(NAME, worst, 1e-8)
}

/// `|r − 1| < 0.05` where `2 − |tr M| < 1e-6`, just inside the first border of
/// `a = 8`.
fn border_symmetry() -> Check {
    const NAME: &str = "border symmetry r -> 1";
    let a = 8.0;
    let stable = |q: f64| {
        integrate_basis(&SpringParams::new(a, q).expect("valid"), 1e-12).map(|m| (m.is_stable(), m.trace))
    };
    let (mut lo, mut hi) = (6.4, 6.6);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        match stable(mid) {
            Ok((true, _)) => lo = mid,
            Ok((false, _)) => hi = mid,
            Err(e) => return failed(NAME, e),
        }
    }
    let q = lo - 8e-7;
    let gap = match stable(q) {
        Ok((true, tr)) => 2.0 - tr.abs(),
        _ => return failed(NAME, format!("q = {q} is not stable")),
    };
    if gap >= 1e-6 {
        return failed(NAME, format!("2 - |tr| = {gap:e} at q = {q}"));
    }
    let an = match analysis(a, q) {
        Ok(an) => an,
        Err(e) => return failed(NAME, e),
    };
    let mut worst = 0.0f64;
    for bath in baths() {
        match rate_ratio(&an.mode, &bath) {
            Ok(r) => worst = worst.max((r - 1.0).abs()),
            Err(e) => return failed(NAME, e),
        }
    }
    let mut c = bounded(NAME, worst, 0.05);
    c.detail = format!("{} at 2 - |tr| = {gap:.2e}", c.detail);
    c
}
