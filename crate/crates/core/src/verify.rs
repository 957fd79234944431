//! Self-check suite run by `fbcmc verify`.
//!
//! Each check reproduces a reference value or an identity along the
//! Delaunay family and reports its worst residual against a fixed
//! tolerance. The checks take the quadrature and root tolerances from the
//! supplied configuration, so loosening them makes the suite fail.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::curvature::analyze_point;
use crate::delaunay::{eval_state, z_of, DelaunayParams, GeneratrixState};
use crate::error::Result;
use crate::freeboundary::{
    build_portion, check_profile_conditions, classify, find_n0, g_at, nodoid_find_rbar,
    nodoid_r0, s0, scale_to_unit_ball, violation_points, z0, AnalysisConfig, Verdict,
};
use crate::mesh::{export_obj, parse_obj, revolve};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: &'static str,
    pub name: &'static str,
    pub passed: bool,
    /// Largest residual observed, in the units of `tolerance`.
    pub worst: f64,
    pub tolerance: f64,
    pub detail: String,
}

type Check = fn(&AnalysisConfig) -> Result<CheckResult>;

const CHECKS: &[(&str, &str, Check)] = &[
    ("AC1", "s0 of the worked example", ac1),
    ("AC2", "z0 of the worked example", ac2),
    ("AC3", "z(s0) of the worked example", ac3),
    ("AC4", "worked example is a pinched free boundary portion", ac4),
    ("AC5", "gap equals 2 λ1 λ2", ac5),
    ("AC6", "constant mean curvature", ac6),
    ("AC7", "arc-length parametrization", ac7),
    ("AC8", "closed-form derivatives vs finite differences", ac8),
    ("AC9", "gap vanishes at unduloid necks", ac9),
    ("AC10", "cylinder is borderline", ac10),
    ("AC11", "violation sequence", ac11),
    ("AC12", "dilation invariance", ac12),
    ("AC13", "nodoid portion", ac13),
    ("AC14", "quadrature vs composite Simpson", ac14),
    ("AC15", "boundary geodesic curvature", ac15),
    ("AC16", "mesh export", ac16),
];

/// Deterministic sample set of `(H, B, s)` triples spread over cylinders,
/// unduloids and nodoids.
pub fn family_samples(count: usize, seed: u64) -> Vec<(f64, f64, f64)> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let h = rng.gen_range(0.1..2.0);
            let b = match i % 3 {
                0 => 0.0,
                1 => rng.gen_range(0.05..0.95),
                _ => rng.gen_range(1.05..3.0),
            };
            let s = rng.gen_range(-2.0..2.0) * std::f64::consts::PI / h;
            (h, b, s)
        })
        .collect()
}

pub const SAMPLE_SEED: u64 = 0x5eed_cafe;

/// Composite Simpson rule with `panels` (even) uniform panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let n = panels + panels % 2;
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + h * k as f64);
    }
    sum * h / 3.0
}

pub fn run_all(cfg: &AnalysisConfig) -> Vec<CheckResult> {
    CHECKS
        .iter()
        .map(|&(id, name, check)| {
            check(cfg).unwrap_or_else(|e| CheckResult {
                id,
                name,
                passed: false,
                worst: f64::INFINITY,
                tolerance: 0.0,
                detail: format!("error: {e}"),
            })
        })
        .collect()
}

fn result(id: &'static str, worst: f64, tolerance: f64, detail: String) -> CheckResult {
    let name = CHECKS
        .iter()
        .find(|c| c.0 == id)
        .map(|c| c.1)
        .unwrap_or_default();
    CheckResult {
        id,
        name,
        passed: worst <= tolerance,
        worst,
        tolerance,
        detail,
    }
}

fn example() -> DelaunayParams {
    DelaunayParams::new(0.1, 0.9).expect("valid example parameters")
}

fn nodoid_example() -> DelaunayParams {
    DelaunayParams::new(1.0, 1.5).expect("valid nodoid parameters")
}

fn ac1(_: &AnalysisConfig) -> Result<CheckResult> {
    let v = s0(&example())?;
    Ok(result("AC1", (v - 4.51026).abs(), 1e-4, format!("s0 = {v}")))
}

fn ac2(_: &AnalysisConfig) -> Result<CheckResult> {
    let v = z0(&example())?;
    Ok(result("AC2", (v - 19.0 / 9.0).abs(), 1e-12, format!("z0 = {v}")))
}

fn ac3(cfg: &AnalysisConfig) -> Result<CheckResult> {
    let p = example();
    let v = z_of(&p, s0(&p)?, &cfg.quad)?;
    Ok(result("AC3", (v - 2.71697).abs(), 1e-4, format!("z(s0) = {v}")))
}

fn ac4(cfg: &AnalysisConfig) -> Result<CheckResult> {
    let p = example();
    let report = classify(&p, cfg)?;
    let Some(portion) = report.portion else {
        return Ok(result("AC4", f64::INFINITY, 0.0, format!("verdict {:?}", report.verdict)));
    };
    let gap_at = |s| eval_state(&p, s, &cfg.quad).map(|st| analyze_point(&st).gap);
    let mut worst: f64 = 0.0;
    worst = worst.max(portion.orthogonality_residual / 1e-8);
    worst = worst.max(-portion.min_gap / 1e-8);
    worst = worst.max((gap_at(portion.s_bar)? - 2.0).abs() / 1e-6);
    worst = worst.max((gap_at(-portion.s_bar)? - 2.0).abs() / 1e-6);
    worst = worst.max(gap_at(0.0)?.abs() / 1e-10);
    if report.verdict != Verdict::PinchedFreeBoundaryPortion {
        worst = f64::INFINITY;
    }
    Ok(result(
        "AC4",
        worst,
        1.0,
        format!(
            "s̄ = {}, |u(s̄)| = {:e}, min gap = {:e} (residuals scaled by their tolerances)",
            portion.s_bar, portion.orthogonality_residual, portion.min_gap
        ),
    ))
}

fn sample_states(
    cfg: &AnalysisConfig,
) -> Result<Vec<(DelaunayParams, GeneratrixState)>> {
    family_samples(1000, SAMPLE_SEED)
        .into_iter()
        .map(|(h, b, s)| {
            let p = DelaunayParams::new(h, b)?;
            Ok((p, eval_state(&p, s, &cfg.quad)?))
        })
        .collect()
}

fn ac5(cfg: &AnalysisConfig) -> Result<CheckResult> {
    let worst = sample_states(cfg)?
        .iter()
        .map(|(_, st)| {
            let a = analyze_point(st);
            (a.gap - 2.0 * a.lambda1 * a.lambda2).abs()
        })
        .fold(0.0, f64::max);
    Ok(result("AC5", worst, 1e-10, "1000 samples".into()))
}

fn ac6(cfg: &AnalysisConfig) -> Result<CheckResult> {
    let worst = sample_states(cfg)?
        .iter()
        .map(|(p, st)| (analyze_point(st).mean_curv - p.h()).abs())
        .fold(0.0, f64::max);
    Ok(result("AC6", worst, 1e-8, "1000 samples".into()))
}

fn ac7(cfg: &AnalysisConfig) -> Result<CheckResult> {
    let worst = sample_states(cfg)?
        .iter()
        .map(|(_, st)| (st.dx * st.dx + st.dz * st.dz - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(result("AC7", worst, 1e-12, "1000 samples".into()))
}

/// Relative error with a unit floor, so derivatives near zero are compared
/// absolutely.
fn rel_err(approx: f64, exact: f64) -> f64 {
    (approx - exact).abs() / exact.abs().max(1.0)
}

fn ac8(cfg: &AnalysisConfig) -> Result<CheckResult> {
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for (hh, b, s) in family_samples(300, SAMPLE_SEED ^ 1) {
        let p = DelaunayParams::new(hh, b)?;
        let fd = |f: &dyn Fn(f64) -> f64| (f(s + h) - f(s - h)) / (2.0 * h);
        worst = worst.max(rel_err(fd(&|t| p.x(t)), p.dx(s)));
        worst = worst.max(rel_err(fd(&|t| p.dx(t)), p.ddx(s)));
        worst = worst.max(rel_err(fd(&|t| p.dz(t)), p.ddz(s)));
        let zp = z_of(&p, s + h, &cfg.quad)?;
        let zm = z_of(&p, s - h, &cfg.quad)?;
        worst = worst.max(rel_err((zp - zm) / (2.0 * h), p.dz(s)));
    }
    Ok(result("AC8", worst, 1e-6, "300 samples, h = 1e-5".into()))
}

fn ac9(cfg: &AnalysisConfig) -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    for h in [0.1, 1.0] {
        for k in 0..10 {
            let b = 0.05 + 0.1 * k as f64;
            let p = DelaunayParams::new(h, b)?;
            worst = worst.max(analyze_point(&eval_state(&p, 0.0, &cfg.quad)?).gap.abs());
        }
    }
    Ok(result("AC9", worst, 1e-12, "20 unduloid necks".into()))
}

fn ac10(cfg: &AnalysisConfig) -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    for h in [0.5, 1.0, 3.0] {
        let p = DelaunayParams::new(h, 0.0)?;
        for k in 0..100 {
            let s = -10.0 + 0.2 * k as f64;
            let a = analyze_point(&eval_state(&p, s, &cfg.quad)?);
            worst = worst.max(a.gap.abs()).max(a.lambda2.abs());
        }
    }
    Ok(result("AC10", worst, 1e-12, "100 values of s per cylinder".into()))
}

fn ac11(cfg: &AnalysisConfig) -> Result<CheckResult> {
    let p = example();
    let threshold = p.b() / p.h();
    let n0 = find_n0(&p, &cfg.quad)?;
    let points = violation_points(&p, n0 + 3, &cfg.quad)?;
    let mut detail = format!("n0 = {n0}");
    let mut worst: f64 = 0.0;
    for v in &points {
        worst = worst.max((v.lambda1 - 1.0).abs() / 1e-10);
    }
    let at_n0 = &points[n0 - 1];
    let below = points[..n0 - 1].iter().all(|v| v.z <= threshold);
    if !(at_n0.z > threshold && at_n0.gap < 0.0 && below) {
        worst = f64::INFINITY;
        detail.push_str(", n0 is not the first crossing of B/H or gap(t_n0) >= 0");
    }
    detail.push_str(&format!(", z(t_n0) = {}, gap(t_n0) = {}", at_n0.z, at_n0.gap));
    Ok(result("AC11", worst, 1.0, detail))
}

fn ac12(cfg: &AnalysisConfig) -> Result<CheckResult> {
    let p = example();
    let portion = build_portion(&p, &cfg.root, &cfg.quad, cfg.n_samples)?;
    let (scaled, s_bar_scaled) = scale_to_unit_ball(&portion, &p)?;
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let s = -portion.s_bar + 2.0 * portion.s_bar * k as f64 / 99.0;
        let g = analyze_point(&eval_state(&p, s, &cfg.quad)?).gap;
        let gs = analyze_point(&eval_state(&scaled, s / portion.r0, &cfg.quad)?).gap;
        worst = worst.max((g - gs).abs() / 1e-9);
    }
    let again = build_portion(&scaled, &cfg.root, &cfg.quad, cfg.n_samples)?;
    worst = worst.max((again.r0 - 1.0).abs() / 1e-10);
    Ok(result(
        "AC12",
        worst,
        1.0,
        format!(
            "scaled H = {}, s̄/R0 = {s_bar_scaled}, re-analysed R0 = {}",
            scaled.h(),
            again.r0
        ),
    ))
}

fn ac13(cfg: &AnalysisConfig) -> Result<CheckResult> {
    let p = nodoid_example();
    let r0 = nodoid_r0(&p)?;
    let rbar = nodoid_find_rbar(&p, &cfg.root, &cfg.quad)?;
    let g = g_at(&p, rbar, &cfg.quad)?;
    let mut worst = g.abs() / 1e-10;
    let mut failures = 0;
    for k in 0..1000 {
        let s = -rbar + 2.0 * rbar * k as f64 / 999.0;
        let st = eval_state(&p, s, &cfg.quad)?;
        let gap = analyze_point(&st).gap;
        worst = worst.max(-gap / 1e-8);
        if !(st.ddx > 0.0 && st.dx * st.z <= 0.0 && check_profile_conditions(&st).hold()) {
            failures += 1;
        }
    }
    if !(rbar > 0.0 && rbar < r0) || failures > 0 {
        worst = f64::INFINITY;
    }
    Ok(result(
        "AC13",
        worst,
        1.0,
        format!("r̄ = {rbar}, r0 = {r0}, g(r̄) = {g:e}, sign failures = {failures}"),
    ))
}

fn ac14(cfg: &AnalysisConfig) -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    for h in [0.1, 1.0] {
        for b in [0.3, 0.9, 1.5] {
            let p = DelaunayParams::new(h, b)?;
            let end = std::f64::consts::PI / h;
            let adaptive = z_of(&p, end, &cfg.quad)?;
            let reference = simpson(|u| p.dz(u), 0.0, end, 1_000_000);
            worst = worst.max((adaptive - reference).abs());
        }
    }
    Ok(result("AC14", worst, 1e-9, "z(π/H), six (H, B) pairs".into()))
}

fn ac15(cfg: &AnalysisConfig) -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    let mut detail = Vec::new();
    for p in [example(), nodoid_example()] {
        let portion = build_portion(&p, &cfg.root, &cfg.quad, cfg.n_samples)?;
        let st = eval_state(&p, portion.s_bar, &cfg.quad)?;
        let kg = portion.r0 * st.dx.abs() / st.x;
        worst = worst.max((kg - 1.0).abs());
        detail.push(format!("{}: {kg}", p.family()));
    }
    Ok(result("AC15", worst, 1e-6, detail.join(", ")))
}

fn ac16(cfg: &AnalysisConfig) -> Result<CheckResult> {
    let p = example();
    let portion = build_portion(&p, &cfg.root, &cfg.quad, cfg.n_samples)?;
    let (nm, np) = (65, 48);
    let mesh = revolve(&p, -portion.s_bar, portion.s_bar, nm, np, &cfg.quad)?;
    let mut buf = Vec::new();
    export_obj(&mesh, &mut buf).expect("writing to memory");
    let text = String::from_utf8(buf).expect("OBJ output is ASCII");
    let parsed = match parse_obj(&text) {
        Ok(m) => m,
        Err(e) => return Ok(result("AC16", f64::INFINITY, 1.0, format!("re-parse failed: {e}"))),
    };
    let norm = |v: &[f64; 3]| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let mut worst: f64 = 0.0;
    for (i, v) in parsed.vertices.iter().enumerate() {
        let r = norm(v);
        let ring = i / np;
        if ring == 0 || ring == nm - 1 {
            worst = worst.max((r - portion.r0).abs() / 1e-6);
        }
        worst = worst.max((r - portion.r0 * (1.0 + 1e-6)).max(0.0) / 1e-12);
    }
    let chi = parsed.euler_characteristic();
    if parsed.vertices.len() != mesh.vertices.len() || chi != 0 {
        worst = f64::INFINITY;
    }
    Ok(result(
        "AC16",
        worst,
        1.0,
        format!("{} vertices, Euler characteristic {chi}", parsed.vertices.len()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::support_function;

    #[test]
    fn simpson_is_exact_on_cubics() {
        let v = simpson(|x| x * x * x - x, 0.0, 2.0, 4);
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn samples_cover_all_families() {
        let s = family_samples(30, 1);
        assert!(s.iter().any(|t| t.1 == 0.0));
        assert!(s.iter().any(|t| t.1 > 0.0 && t.1 < 1.0));
        assert!(s.iter().any(|t| t.1 > 1.0));
        assert_eq!(s, family_samples(30, 1));
    }

    #[test]
    fn support_of_rescaled_point_scales() {
        let p = example();
        let q = p.scaled(2.0).unwrap();
        let cfg = crate::numerics::QuadratureConfig::default();
        let u = support_function(&eval_state(&p, 1.0, &cfg).unwrap());
        let uq = support_function(&eval_state(&q, 0.5, &cfg).unwrap());
        assert!((u / 2.0 - uq).abs() < 1e-12);
    }
}
