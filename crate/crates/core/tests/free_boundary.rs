use fbcmc::curvature::{analyze_point, support_function};
use fbcmc::delaunay::{eval_state, z_of, DelaunayParams};
use fbcmc::freeboundary::*;
use fbcmc::numerics::{QuadratureConfig, RootConfig};

// Reference values from a 30-digit mpmath computation (plain bisection on g
// with mpmath quadrature for z, split into 64 subintervals).
const SBAR_EXAMPLE: f64 = 1.757_605_677_027_689_3;
const R0_EXAMPLE: f64 = 2.397_584_069_144_8;
const RBAR_NODOID: f64 = 0.478_998_336_006_322_43;
const R0_NODOID: f64 = 0.849_990_700_359_196_07;
const Z_T: [f64; 3] = [44.150_911_583_448_424, 91.018_793_694_712_99, 137.886_675_805_977_56];

fn quad() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn root() -> RootConfig {
    RootConfig::default()
}

fn example() -> DelaunayParams {
    DelaunayParams::new(0.1, 0.9).unwrap()
}

fn nodoid() -> DelaunayParams {
    DelaunayParams::new(1.0, 1.5).unwrap()
}

/// Plain bisection on g, independent of the accelerated root finder.
fn bisect_g(p: &DelaunayParams, mut lo: f64, mut hi: f64) -> f64 {
    let g = |s| g_at(p, s, &quad()).unwrap();
    let g_lo = g(lo);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0) == (g_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn example_constants() {
    let p = example();
    assert!((s0(&p).unwrap() - 4.51026).abs() < 1e-5);
    assert!((z0(&p).unwrap() - 19.0 / 9.0).abs() < 1e-12);
    let st = eval_state(&p, s0(&p).unwrap(), &quad()).unwrap();
    assert!(st.ddx.abs() < 1e-10);
    // z(s0) > z0 forces g(s0) < 0.
    assert!(g_function(&st).unwrap() < 0.0);
}

#[test]
fn s0_is_first_inflection() {
    for (h, b) in [(0.1, 0.9), (1.0, 0.5), (2.0, 0.1), (0.3, 0.99)] {
        let p = DelaunayParams::new(h, b).unwrap();
        let s0 = s0(&p).unwrap();
        assert!(p.ddx(s0).abs() < 1e-10, "{h} {b}");
        for k in 1..1000 {
            let s = s0 * k as f64 / 1000.0;
            assert!(p.ddx(s) > 0.0 && p.dz(s) > 0.0, "{h} {b} {s}");
        }
    }
}

#[test]
fn nodoid_r0_is_first_vertical_tangent() {
    let p = nodoid();
    let r0 = nodoid_r0(&p).unwrap();
    assert!(p.dz(r0).abs() < 1e-12);
    for k in 1..1000 {
        let s = r0 * k as f64 / 1000.0;
        assert!(p.dz(s) < 0.0 && p.ddx(s) > 0.0);
    }
}

#[test]
fn dichotomy_matches_sign_of_g_at_s0() {
    for h in [0.1, 0.5, 1.0, 3.0] {
        for k in 1..20 {
            let b = 0.05 * k as f64;
            let p = DelaunayParams::new(h, b).unwrap();
            let s0 = s0(&p).unwrap();
            let above = z_of(&p, s0, &quad()).unwrap() >= z0(&p).unwrap();
            let g_nonpos = g_at(&p, s0, &quad()).unwrap() <= 0.0;
            assert_eq!(above, g_nonpos, "H={h} B={b}");
        }
    }
}

#[test]
fn sbar_matches_bisection_oracle() {
    let p = example();
    let sbar = find_sbar(&p, &root(), &quad()).unwrap();
    let oracle = bisect_g(&p, 0.0, s0(&p).unwrap());
    assert!((sbar - oracle).abs() < 1e-10);
    assert!((sbar - SBAR_EXAMPLE).abs() < 1e-10);
    assert!(g_at(&p, sbar, &quad()).unwrap().abs() <= root().f_tol);
    assert!(g_at(&p, -sbar, &quad()).unwrap().abs() <= root().f_tol);
    let st = eval_state(&p, sbar, &quad()).unwrap();
    assert!(support_function(&st).abs() < 1e-8);
    let s0 = s0(&p).unwrap();
    assert!(g_at(&p, s0 / 2.0, &quad()).unwrap() > g_at(&p, s0, &quad()).unwrap());
}

#[test]
fn rbar_matches_bisection_oracle() {
    let p = nodoid();
    let r0 = nodoid_r0(&p).unwrap();
    let rbar = nodoid_find_rbar(&p, &root(), &quad()).unwrap();
    assert!(rbar > 0.0 && rbar < r0);
    let oracle = bisect_g(&p, 0.0, r0 * (1.0 - 1e-6));
    assert!((rbar - oracle).abs() < 1e-10);
    assert!((rbar - RBAR_NODOID).abs() < 1e-10);
    assert!(rbar < (2.0f64 / 3.0).acos());
    let st0 = eval_state(&p, 0.0, &quad()).unwrap();
    assert!((g_function(&st0).unwrap() - 0.5).abs() < 1e-15);
    for k in 0..=1000 {
        let s = -rbar + 2.0 * rbar * k as f64 / 1000.0;
        let st = eval_state(&p, s, &quad()).unwrap();
        assert!(g_function(&st).unwrap() >= -1e-10);
        assert!(st.ddx > 0.0);
        assert!(st.dx * st.z <= 0.0);
        assert!(analyze_point(&st).gap >= -1e-8);
        assert!(check_profile_conditions(&st).hold(), "s={s}");
    }
}

#[test]
fn g_derivative_matches_finite_differences() {
    let h = 1e-5;
    for p in [example(), nodoid(), DelaunayParams::new(1.0, 0.6).unwrap()] {
        for k in 0..40 {
            let s = -2.0 + 0.1 * k as f64;
            if p.dz(s).abs() < 0.05 {
                continue;
            }
            let fd = (g_at(&p, s + h, &quad()).unwrap() - g_at(&p, s - h, &quad()).unwrap()) / (2.0 * h);
            let exact = g_derivative(&eval_state(&p, s, &quad()).unwrap()).unwrap();
            assert!((fd - exact).abs() < 1e-6 * exact.abs().max(1.0), "{s}: {fd} vs {exact}");
            let even = g_at(&p, -s, &quad()).unwrap() - g_at(&p, s, &quad()).unwrap();
            assert!(even.abs() < 1e-12);
        }
    }
}

#[test]
fn example_portion() {
    let p = example();
    let portion = build_portion(&p, &root(), &quad(), 2048).unwrap();
    assert!((portion.r0 - R0_EXAMPLE).abs() < 1e-9);
    assert!(portion.orthogonality_residual <= 1e-8);
    assert!(portion.min_gap >= -1e-8);
    assert!(portion.min_gap_at.abs() < 1e-3, "minimum sits at the neck");
    let end = eval_state(&p, portion.s_bar, &quad()).unwrap();
    assert!(portion.r0 > end.x);
    for s in [portion.s_bar, -portion.s_bar] {
        let gap = analyze_point(&eval_state(&p, s, &quad()).unwrap()).gap;
        assert!((gap - 2.0).abs() < 1e-6);
    }
    let neck = analyze_point(&eval_state(&p, 0.0, &quad()).unwrap());
    assert!(neck.gap.abs() < 1e-10);
    // Boundary circle has geodesic curvature 1 in the unit ball.
    assert!((portion.r0 * end.dx.abs() / end.x - 1.0).abs() < 1e-6);

    for k in 0..=1000 {
        let s = -portion.s_bar + 2.0 * portion.s_bar * k as f64 / 1000.0;
        let st = eval_state(&p, s, &quad()).unwrap();
        assert!(check_profile_conditions(&st).hold(), "s={s}");
        assert!(st.norm_sq() <= portion.r0 * portion.r0 * (1.0 + 1e-9));
    }
}

#[test]
fn nodoid_portion() {
    let p = nodoid();
    let portion = build_portion(&p, &root(), &quad(), 2048).unwrap();
    assert!((portion.r0 - R0_NODOID).abs() < 1e-9);
    let end = eval_state(&p, portion.s_bar, &quad()).unwrap();
    assert!((portion.r0 * end.dx.abs() / end.x - 1.0).abs() < 1e-6);
    assert!(portion.min_gap >= -1e-8);
}

#[test]
fn unit_ball_rescaling() {
    let p = example();
    let portion = build_portion(&p, &root(), &quad(), 512).unwrap();
    let (scaled, sbar_scaled) = scale_to_unit_ball(&portion, &p).unwrap();
    assert_eq!(scaled, portion.scaled_params);
    assert_eq!(scaled.b(), p.b());
    assert!((scaled.h() - p.h() * portion.r0).abs() < 1e-15);
    for k in 0..100 {
        let s = -portion.s_bar + 2.0 * portion.s_bar * k as f64 / 99.0;
        let a = eval_state(&p, s, &quad()).unwrap();
        let b = eval_state(&scaled, s / portion.r0, &quad()).unwrap();
        assert!((a.x / portion.r0 - b.x).abs() < 1e-12);
        assert!((a.z / portion.r0 - b.z).abs() < 1e-10);
        assert!((analyze_point(&a).gap - analyze_point(&b).gap).abs() < 1e-9);
    }
    let again = build_portion(&scaled, &root(), &quad(), 512).unwrap();
    assert!((again.r0 - 1.0).abs() < 1e-10);
    assert!((again.s_bar - sbar_scaled).abs() < 1e-10);
    let verdict = classify(&scaled, &AnalysisConfig::default()).unwrap().verdict;
    assert_eq!(verdict, classify(&p, &AnalysisConfig::default()).unwrap().verdict);

    let cyl = DelaunayParams::new(0.7, 0.0).unwrap();
    let fake = FreeBoundaryPortion { r0: 3.0, s_bar: 1.0, ..portion };
    let (c, _) = scale_to_unit_ball(&fake, &cyl).unwrap();
    assert_eq!((c.h(), c.b()), (0.7 * 3.0, 0.0));
}

#[test]
fn violation_sequence() {
    let p = example();
    let n0 = find_n0(&p, &quad()).unwrap();
    let threshold = p.b() / p.h();
    let points = violation_points(&p, n0 + 3, &quad()).unwrap();
    assert_eq!(points.len(), n0 + 3);
    for (v, z_ref) in points.iter().zip(Z_T) {
        assert!((v.z - z_ref).abs() < 1e-8, "n={}: {} vs {z_ref}", v.n, v.z);
    }
    // Smallest n with z(t_n) > B/H, using direct quadrature for each z.
    let direct: Vec<f64> = (1..=n0 + 3)
        .map(|n| z_of(&p, violation_t(&p, n), &quad()).unwrap())
        .collect();
    let expected = direct.iter().position(|&z| z > threshold).unwrap() + 1;
    assert_eq!(n0, expected);
    let root_b = (1.0 - p.b() * p.b()).sqrt();
    for (v, z) in points.iter().zip(&direct) {
        assert!((v.z - z).abs() < 1e-8);
        let st = p.state_with_z(v.t, v.z);
        assert!((st.x - root_b / p.h()).abs() < 1e-10);
        assert!((st.dx + p.b()).abs() < 1e-12);
        assert!((st.dz - root_b).abs() < 1e-12);
        assert!(st.ddx.abs() < 1e-10);
        assert!((v.lambda1 - 1.0).abs() < 1e-10);
        let lambda2 = p.b() * p.h() * (threshold - v.z);
        assert!((v.lambda2 - lambda2).abs() < 1e-9 * lambda2.abs().max(1.0));
        assert!((v.gap - 2.0 * v.lambda1 * v.lambda2).abs() < 1e-9);
        if v.n >= n0 {
            assert!(v.lambda2 < 0.0 && v.gap < 0.0);
        }
    }
    assert!(points.windows(2).all(|w| w[1].z > w[0].z));
}

#[test]
fn violation_threshold_is_first_crossing_for_slow_unduloids() {
    // Fat unduloids climb slowly, so n0 > 1 and the crossing is non-trivial.
    let p = DelaunayParams::new(1.0, 0.95).unwrap();
    let n0 = find_n0(&p, &quad()).unwrap();
    let pts = violation_points(&p, n0 + 3, &quad()).unwrap();
    let threshold = p.b() / p.h();
    assert!(pts[n0 - 1].z > threshold && pts[n0 - 1].gap < 0.0);
    if n0 > 1 {
        assert!(pts[n0 - 2].z <= threshold && pts[n0 - 2].lambda2 >= 0.0);
    }
    for v in &pts {
        assert_eq!(v.lambda2 < 0.0, v.z > threshold);
    }
}

#[test]
fn classification_over_b() {
    let cfg = AnalysisConfig {
        n_samples: 128,
        ..Default::default()
    };
    let mut signs = Vec::new();
    for k in 1..20 {
        let b = 0.05 * k as f64;
        let p = DelaunayParams::new(1.0, b).unwrap();
        let r = classify(&p, &cfg).unwrap();
        let diff = r.z_at_s0.unwrap() - r.z0.unwrap();
        signs.push(diff >= 0.0);
        match r.verdict {
            Verdict::PinchedFreeBoundaryPortion => assert!(diff >= 0.0 && r.portion.is_some()),
            Verdict::NoOrthogonalIntersection => assert!(diff < 0.0 && r.portion.is_none()),
            v => panic!("unexpected {v:?}"),
        }
    }
    assert!(signs.contains(&false) && signs.contains(&true));
    assert_eq!(signs.windows(2).filter(|w| w[0] != w[1]).count(), 1);

    let example = classify(&example(), &AnalysisConfig::default()).unwrap();
    assert_eq!(example.verdict, Verdict::PinchedFreeBoundaryPortion);
    assert_eq!(example.violations.len(), example.n0.unwrap() + 3);
    let nod = classify(&nodoid(), &cfg).unwrap();
    assert_eq!(nod.verdict, Verdict::PinchedFreeBoundaryPortion);
    assert!(nod.r0.is_some() && nod.s0.is_none());
}
