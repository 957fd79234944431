//! Free boundary portions of Delaunay surfaces inside a ball.
//!
//! A portion `[-s̄, s̄]` of the generatrix revolves to a free boundary surface
//! in the ball of radius `R0 = |β(s̄)|` when the position vector is parallel
//! to the tangent at `±s̄` and the arc stays inside the ball. Parallelism is
//! the vanishing of
//!
//! ```text
//! g(s) = x(s) - (x'(s) / z'(s)) z(s)
//! ```
//!
//! For unduloids `g` is searched on `(0, s0]`, where `s0` is the first
//! inflection of `x`; a root exists exactly when `z(s0) >= z0 = (1-B^2)/(HB)`.
//! For nodoids it is searched on `(0, r0)`, where `r0` is the first zero of
//! `z'`, and always exists.
//!
//! Unduloids also carry a divergent sequence `t_n` of inflection points at
//! which the pinching inequality eventually fails.

use std::cell::RefCell;

use serde::Serialize;

use crate::curvature::{analyze_point, support_function, PointAnalysis};
use crate::delaunay::{eval_state, z_at_knots, z_of, DelaunayParams, Family, GeneratrixState};
use crate::error::{Error, Result};
use crate::numerics::{find_root, golden_min, QuadratureConfig, RootConfig};

/// `|z'|` below this is treated as `z' = 0`: `g` is reported undefined and
/// the profile conditions switch to their vertical-tangent form.
pub const DZ_ZERO_THRESHOLD: f64 = 1e-12;

/// Relative offset of the nodoid bracket endpoint below `r0`.
pub const NODOID_BRACKET_OFFSET: f64 = 1e-6;

/// Largest `n` tried by [`find_n0`].
pub const VIOLATION_SEARCH_CAP: usize = 1_000_000;

/// A portion whose minimum gap is above this is reported as pinched.
pub const PINCHED_GAP_FLOOR: f64 = -1e-8;

/// Collects the first error raised inside a closure that must return `f64`.
struct ErrorSlot(RefCell<Option<Error>>);

impl ErrorSlot {
    fn new() -> Self {
        Self(RefCell::new(None))
    }

    fn eval(&self, r: Result<f64>) -> f64 {
        r.unwrap_or_else(|e| {
            self.0.borrow_mut().get_or_insert(e);
            f64::NAN
        })
    }

    /// Prefer the captured error over whatever the caller saw.
    fn finish<T>(self, r: Result<T>) -> Result<T> {
        match self.0.into_inner() {
            Some(e) => Err(e),
            None => r,
        }
    }
}

fn require(params: &DelaunayParams, expected: Family) -> Result<()> {
    if params.family() != expected {
        return Err(Error::WrongFamily {
            expected: match expected {
                Family::Cylinder => "cylinder",
                Family::Unduloid => "unduloid",
                Family::Nodoid => "nodoid",
            },
            actual: params.family(),
        });
    }
    Ok(())
}

/// `g = x - (x'/z') z`. Zero exactly where the surface meets the sphere
/// `|p| = |β(s)|` orthogonally.
pub fn g_function(st: &GeneratrixState) -> Result<f64> {
    if st.dz.abs() < DZ_ZERO_THRESHOLD {
        return Err(Error::DzZero { s: st.s });
    }
    Ok(st.x - st.dx / st.dz * st.z)
}

/// `g'(s) = -(x'' / z'^3) z`, valid for arc-length parametrized curves.
pub fn g_derivative(st: &GeneratrixState) -> Result<f64> {
    if st.dz.abs() < DZ_ZERO_THRESHOLD {
        return Err(Error::DzZero { s: st.s });
    }
    Ok(-st.ddx / st.dz.powi(3) * st.z)
}

pub fn g_at(params: &DelaunayParams, s: f64, quad: &QuadratureConfig) -> Result<f64> {
    g_function(&eval_state(params, s, quad)?)
}

/// First positive zero of `x''` for an unduloid: `arccos(B) / H`.
pub fn s0(params: &DelaunayParams) -> Result<f64> {
    require(params, Family::Unduloid)?;
    Ok(params.b().acos() / params.h())
}

/// `z0 = (1 - B^2) / (H B)`, the height threshold at `s0`.
pub fn z0(params: &DelaunayParams) -> Result<f64> {
    if params.family() == Family::Cylinder {
        return Err(Error::ZeroNeck);
    }
    require(params, Family::Unduloid)?;
    let b = params.b();
    Ok((1.0 - b * b) / (params.h() * b))
}

/// Root of `g` in `(0, s0]` for an unduloid with `z(s0) >= z0`.
pub fn find_sbar(
    params: &DelaunayParams,
    root: &RootConfig,
    quad: &QuadratureConfig,
) -> Result<f64> {
    let s0 = s0(params)?;
    let z0 = z0(params)?;
    let z_at_s0 = z_of(params, s0, quad)?;
    if z_at_s0 < z0 {
        return Err(Error::NoRoot { z_at_s0, z0 });
    }
    let slot = ErrorSlot::new();
    let r = find_root(|s| slot.eval(g_at(params, s, quad)), 0.0, s0, root);
    slot.finish(r)
}

/// First positive zero of `z'` for a nodoid: `arccos(1/B) / H`.
pub fn nodoid_r0(params: &DelaunayParams) -> Result<f64> {
    require(params, Family::Nodoid)?;
    Ok((1.0 / params.b()).acos() / params.h())
}

/// Root of `g` in `(0, r0)` for a nodoid.
///
/// `g(0) = (B-1)/H > 0` and `g -> -∞` as `s -> r0`, so the bracket
/// `[0, r0 (1 - 1e-6)]` is used, pulled further in if `g` is not finite
/// at its upper end.
pub fn nodoid_find_rbar(
    params: &DelaunayParams,
    root: &RootConfig,
    quad: &QuadratureConfig,
) -> Result<f64> {
    let r0 = nodoid_r0(params)?;
    let mut offset = NODOID_BRACKET_OFFSET;
    let hi = loop {
        let hi = r0 * (1.0 - offset);
        match g_at(params, hi, quad) {
            Ok(g) if g.is_finite() && g < 0.0 => break hi,
            Ok(g) if g.is_finite() => return Err(Error::BracketFailure { r0 }),
            Err(Error::SubdivisionLimit { .. }) | Err(Error::DzZero { .. }) | Ok(_) => {
                offset *= 10.0;
                if offset >= 0.5 {
                    return Err(Error::BracketFailure { r0 });
                }
            }
            Err(e) => return Err(e),
        }
    };
    let slot = ErrorSlot::new();
    let r = find_root(|s| slot.eval(g_at(params, s, quad)), 0.0, hi, root);
    slot.finish(r)
}

/// Sufficient conditions on the profile for the pinching inequality at one
/// point: `(c1 || c2) && c3` implies `λ1 >= 0` and `λ2 >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ProfileConditions {
    /// `z' ≠ 0` and `-1 <= x'' g`.
    pub c1: bool,
    /// `z' = 0` and `-1 <= z z''`.
    pub c2: bool,
    /// `-x x'^2 <= z' x' z`.
    pub c3: bool,
}

impl ProfileConditions {
    pub fn hold(&self) -> bool {
        (self.c1 || self.c2) && self.c3
    }
}

pub fn check_profile_conditions(st: &GeneratrixState) -> ProfileConditions {
    let dz_zero = st.dz.abs() < DZ_ZERO_THRESHOLD;
    let c1 = !dz_zero && -1.0 <= st.ddx * (st.x - st.dx / st.dz * st.z);
    let c2 = dz_zero && -1.0 <= st.z * st.ddz;
    let c3 = -st.x * st.dx * st.dx <= st.dz * st.dx * st.z;
    ProfileConditions { c1, c2, c3 }
}

/// A free boundary portion `[-s̄, s̄]` and its ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FreeBoundaryPortion {
    /// Half-width in arc length; `r̄` for nodoids.
    pub s_bar: f64,
    #[serde(rename = "R0")]
    pub r0: f64,
    /// Parameters of the same portion dilated into the unit ball.
    pub scaled_params: DelaunayParams,
    pub min_gap: f64,
    pub min_gap_at: f64,
    /// `|u(s̄)|`.
    pub orthogonality_residual: f64,
}

/// Locate the orthogonal intersection, the ball, and the minimum pinching
/// gap over the portion.
pub fn build_portion(
    params: &DelaunayParams,
    root: &RootConfig,
    quad: &QuadratureConfig,
    n_samples: usize,
) -> Result<FreeBoundaryPortion> {
    if n_samples < 3 {
        return Err(Error::InvalidConfig("at least 3 samples are needed"));
    }
    let s_bar = match params.family() {
        Family::Unduloid => find_sbar(params, root, quad)?,
        Family::Nodoid => nodoid_find_rbar(params, root, quad)?,
        Family::Cylinder => {
            return Err(Error::WrongFamily {
                expected: "unduloid or nodoid",
                actual: Family::Cylinder,
            })
        }
    };
    let end = eval_state(params, s_bar, quad)?;
    let r0_sq = end.norm_sq();
    let r0 = r0_sq.sqrt();

    let step = 2.0 * s_bar / (n_samples - 1) as f64;
    let sample_at = |i: usize| {
        if i == n_samples - 1 {
            s_bar
        } else {
            -s_bar + step * i as f64
        }
    };

    let mut min_idx = 0;
    let mut min_gap = f64::INFINITY;
    for i in 0..n_samples {
        let s = sample_at(i);
        let st = eval_state(params, s, quad)?;
        if st.norm_sq() > r0_sq * (1.0 + 1e-9) {
            return Err(Error::EnclosureViolation {
                s,
                norm_sq: st.norm_sq(),
                r0_sq,
            });
        }
        let gap = analyze_point(&st).gap;
        if gap < min_gap {
            min_gap = gap;
            min_idx = i;
        }
    }

    let lo = sample_at(min_idx.saturating_sub(1));
    let hi = sample_at((min_idx + 1).min(n_samples - 1));
    let slot = ErrorSlot::new();
    let (s_ref, g_ref) = golden_min(
        |s| slot.eval(eval_state(params, s, quad).map(|st| analyze_point(&st).gap)),
        lo,
        hi,
        1e-10 * s_bar.max(1.0),
        200,
    );
    slot.finish(Ok(()))?;
    let mut min_gap_at = sample_at(min_idx);
    if g_ref < min_gap {
        min_gap = g_ref;
        min_gap_at = s_ref;
    }

    Ok(FreeBoundaryPortion {
        s_bar,
        r0,
        scaled_params: params.scaled(r0)?,
        min_gap,
        min_gap_at,
        orthogonality_residual: support_function(&end).abs(),
    })
}

/// Parameters and half-width of the portion dilated into the unit ball.
pub fn scale_to_unit_ball(
    portion: &FreeBoundaryPortion,
    params: &DelaunayParams,
) -> Result<(DelaunayParams, f64)> {
    Ok((params.scaled(portion.r0)?, portion.s_bar / portion.r0))
}

/// An inflection point `t_n` of an unduloid with its Hessian eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ViolationPoint {
    pub n: usize,
    pub t: f64,
    pub z: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub gap: f64,
}

/// `t_n = (2nπ - arccos B) / H`, where `cos(H t_n) = B` and `x'(t_n) = -B`.
pub fn violation_t(params: &DelaunayParams, n: usize) -> f64 {
    (2.0 * n as f64 * std::f64::consts::PI - params.b().acos()) / params.h()
}

fn violation_point(params: &DelaunayParams, n: usize, t: f64, z: f64) -> ViolationPoint {
    let a: PointAnalysis = analyze_point(&params.state_with_z(t, z));
    ViolationPoint {
        n,
        t,
        z,
        lambda1: a.lambda1,
        lambda2: a.lambda2,
        gap: a.gap,
    }
}

/// The first `count` points of the sequence `t_n`, `n = 1..=count`.
pub fn violation_points(
    params: &DelaunayParams,
    count: usize,
    quad: &QuadratureConfig,
) -> Result<Vec<ViolationPoint>> {
    require(params, Family::Unduloid)?;
    let ts: Vec<f64> = (1..=count).map(|n| violation_t(params, n)).collect();
    let zs = z_at_knots(params, &ts, quad)?;
    Ok(ts
        .iter()
        .zip(zs)
        .enumerate()
        .map(|(i, (&t, z))| violation_point(params, i + 1, t, z))
        .collect())
}

/// Smallest `n >= 1` with `z(t_n) > B/H`; from there on `λ2(t_n) < 0`.
pub fn find_n0(params: &DelaunayParams, quad: &QuadratureConfig) -> Result<usize> {
    require(params, Family::Unduloid)?;
    let threshold = params.b() / params.h();
    let mut t = violation_t(params, 1);
    let mut z = z_of(params, t, quad)?;
    for n in 1..=VIOLATION_SEARCH_CAP {
        if z > threshold {
            return Ok(n);
        }
        let next = violation_t(params, n + 1);
        z += z_at_segment(params, t, next, quad)?;
        t = next;
    }
    Err(Error::ViolationSearchCap {
        cap: VIOLATION_SEARCH_CAP,
    })
}

fn z_at_segment(params: &DelaunayParams, a: f64, b: f64, quad: &QuadratureConfig) -> Result<f64> {
    crate::numerics::integrate(|u| params.dz(u), a, b, quad)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    PinchedFreeBoundaryPortion,
    NoOrthogonalIntersection,
    Cylinder,
    Invalid,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisConfig {
    pub quad: QuadratureConfig,
    pub root: RootConfig,
    /// Uniform samples over the portion for the gap and enclosure checks.
    pub n_samples: usize,
    /// Violation points listed beyond `n0`.
    pub extra_violations: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            quad: QuadratureConfig::default(),
            root: RootConfig::default(),
            n_samples: 2048,
            extra_violations: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AnalysisReport {
    pub params: DelaunayParams,
    pub s0: Option<f64>,
    pub r0: Option<f64>,
    pub z0: Option<f64>,
    pub z_at_s0: Option<f64>,
    pub verdict: Verdict,
    pub portion: Option<FreeBoundaryPortion>,
    pub n0: Option<usize>,
    pub violations: Vec<ViolationPoint>,
}

pub fn classify(params: &DelaunayParams, cfg: &AnalysisConfig) -> Result<AnalysisReport> {
    let mut report = AnalysisReport {
        params: *params,
        s0: None,
        r0: None,
        z0: None,
        z_at_s0: None,
        verdict: Verdict::Cylinder,
        portion: None,
        n0: None,
        violations: Vec::new(),
    };
    match params.family() {
        Family::Cylinder => {}
        Family::Unduloid => {
            let s0 = s0(params)?;
            let z0 = z0(params)?;
            let z_at_s0 = z_of(params, s0, &cfg.quad)?;
            report.s0 = Some(s0);
            report.z0 = Some(z0);
            report.z_at_s0 = Some(z_at_s0);
            if z_at_s0 >= z0 {
                report.portion = Some(pinched_portion(params, cfg)?);
                report.verdict = Verdict::PinchedFreeBoundaryPortion;
            } else {
                report.verdict = Verdict::NoOrthogonalIntersection;
            }
            let n0 = find_n0(params, &cfg.quad)?;
            report.n0 = Some(n0);
            report.violations = violation_points(params, n0 + cfg.extra_violations, &cfg.quad)?;
        }
        Family::Nodoid => {
            report.r0 = Some(nodoid_r0(params)?);
            report.portion = Some(pinched_portion(params, cfg)?);
            report.verdict = Verdict::PinchedFreeBoundaryPortion;
        }
    }
    Ok(report)
}

fn pinched_portion(params: &DelaunayParams, cfg: &AnalysisConfig) -> Result<FreeBoundaryPortion> {
    let portion = build_portion(params, &cfg.root, &cfg.quad, cfg.n_samples)?;
    if portion.min_gap < PINCHED_GAP_FLOOR {
        return Err(Error::PinchingViolated {
            s: portion.min_gap_at,
            min_gap: portion.min_gap,
        });
    }
    Ok(portion)
}
