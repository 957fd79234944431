//! Pointwise geometry of the revolved surface.
//!
//! Normal convention: `N = (-z' cos θ, -z' sin θ, x')`. With it the support
//! function is `u = <x, N> = x' z - x z'`, the parallel curvature is
//! `k2 = z' / x`, and `H = k1 + k2` is the unnormalized trace.
//!
//! The pinching gap is `½(2 + H u)^2 - |Φ|^2 u^2`; it is non-negative
//! exactly where the pinching inequality holds and equals `2 λ1 λ2`, where
//! `λi = 1 + ki u` are the eigenvalues of the surface Hessian of `|x|^2 / 2`.

use serde::Serialize;

use crate::delaunay::GeneratrixState;

/// Meridian and parallel principal curvatures `(k1, k2)`.
pub fn principal_curvatures(st: &GeneratrixState) -> (f64, f64) {
    let k1 = st.dx * st.ddz - st.ddx * st.dz;
    let k2 = st.dz / st.x;
    (k1, k2)
}

/// `u = <x, N>`, the signed distance from the origin to the tangent plane.
pub fn support_function(st: &GeneratrixState) -> f64 {
    st.dx * st.z - st.x * st.dz
}

pub fn hessian_eigenvalues(st: &GeneratrixState) -> (f64, f64) {
    let (k1, k2) = principal_curvatures(st);
    let u = support_function(st);
    (1.0 + k1 * u, 1.0 + k2 * u)
}

/// `|Φ|^2 = (k1 - k2)^2 / 2`, the squared norm of the traceless second
/// fundamental form of a surface.
pub fn traceless_norm_sq(k1: f64, k2: f64) -> f64 {
    0.5 * (k1 - k2) * (k1 - k2)
}

/// `½(2 + H u)^2 - |Φ|^2 u^2` from the raw curvature data.
pub fn pinching_gap(k1: f64, k2: f64, u: f64) -> f64 {
    let trace = 2.0 + (k1 + k2) * u;
    0.5 * trace * trace - traceless_norm_sq(k1, k2) * u * u
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointAnalysis {
    pub s: f64,
    pub k1: f64,
    pub k2: f64,
    /// `k1 + k2`.
    pub mean_curv: f64,
    pub support: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    /// `λ1 + λ2 = 2 + H u`.
    pub trace_sum: f64,
    pub phi_sq: f64,
    pub gap: f64,
}

impl PointAnalysis {
    /// Whether the pinching inequality holds at this point.
    pub fn is_pinched(&self) -> bool {
        self.gap >= 0.0
    }
}

pub fn analyze_point(st: &GeneratrixState) -> PointAnalysis {
    let (k1, k2) = principal_curvatures(st);
    let u = support_function(st);
    from_curvatures(st.s, k1, k2, u)
}

/// Point analysis from curvatures and support value supplied directly.
/// Used for configurations outside the Delaunay parametrization, such as
/// spherical caps.
pub fn from_curvatures(s: f64, k1: f64, k2: f64, u: f64) -> PointAnalysis {
    let mean_curv = k1 + k2;
    let lambda1 = 1.0 + k1 * u;
    let lambda2 = 1.0 + k2 * u;
    PointAnalysis {
        s,
        k1,
        k2,
        mean_curv,
        support: u,
        lambda1,
        lambda2,
        trace_sum: 2.0 + mean_curv * u,
        phi_sq: traceless_norm_sq(k1, k2),
        gap: pinching_gap(k1, k2, u),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delaunay::{eval_state, DelaunayParams};
    use crate::numerics::QuadratureConfig;

    fn state(h: f64, b: f64, s: f64) -> GeneratrixState {
        let p = DelaunayParams::new(h, b).unwrap();
        eval_state(&p, s, &QuadratureConfig::default()).unwrap()
    }

    #[test]
    fn cylinder_is_borderline() {
        for s in [0.0, 1.3, -7.0] {
            let a = analyze_point(&state(1.0, 0.0, s));
            assert_eq!((a.k1, a.k2), (0.0, 1.0));
            assert_eq!(a.support, -1.0);
            assert_eq!((a.lambda1, a.lambda2), (1.0, 0.0));
            assert_eq!(a.gap, 0.0);
        }
    }

    #[test]
    fn unduloid_neck() {
        let (h, b) = (0.1, 0.9);
        let a = analyze_point(&state(h, b, 0.0));
        assert!((a.k1 + b * h / (1.0 - b)).abs() < 1e-12);
        assert!((a.k2 - h / (1.0 - b)).abs() < 1e-12);
        assert!((a.mean_curv - h).abs() < 1e-12);
        assert!((a.support + (1.0 - b) / h).abs() < 1e-12);
        assert!((a.lambda1 - (1.0 + b)).abs() < 1e-12);
        assert!(a.lambda2.abs() < 1e-12);
        assert!(a.gap.abs() < 1e-12);
    }

    #[test]
    fn sphere_fixture_is_umbilic() {
        // Unit sphere through the origin's antipode: k1 = k2 = 1/ρ, u = -ρ.
        let rho = 2.5;
        let a = from_curvatures(0.0, 1.0 / rho, 1.0 / rho, -rho);
        assert_eq!(a.phi_sq, 0.0);
        assert_eq!((a.lambda1, a.lambda2), (0.0, 0.0));
        assert_eq!(a.trace_sum, 0.0);
        assert_eq!(a.gap, 0.0);
    }

    #[test]
    fn gap_identity_on_arbitrary_inputs() {
        for &(k1, k2, u) in &[(0.3, -1.2, 2.0), (5.0, 5.0, -0.1), (-0.7, 0.2, 0.0)] {
            let a = from_curvatures(0.0, k1, k2, u);
            assert!((a.gap - 2.0 * a.lambda1 * a.lambda2).abs() < 1e-12);
            assert!((a.trace_sum - (a.lambda1 + a.lambda2)).abs() < 1e-15);
        }
    }
}
