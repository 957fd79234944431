//! Delaunay surfaces as free boundary CMC surfaces in a Euclidean ball.
//!
//! The crate evaluates the Delaunay generatrix, computes curvatures and the
//! pinching gap `½(2 + H u)^2 - |Φ|^2 u^2` along it, locates portions that
//! meet a sphere orthogonally, and exports them as triangle meshes.
//!
//! ```
//! use fbcmc::{classify, AnalysisConfig, DelaunayParams, Verdict};
//!
//! let params = DelaunayParams::new(0.1, 0.9).unwrap();
//! let report = classify(&params, &AnalysisConfig::default()).unwrap();
//! assert_eq!(report.verdict, Verdict::PinchedFreeBoundaryPortion);
//! assert!((report.z_at_s0.unwrap() - 2.71697).abs() < 1e-4);
//! ```

pub mod curvature;
pub mod delaunay;
pub mod error;
pub mod freeboundary;
pub mod mesh;
pub mod numerics;
pub mod verify;

pub use curvature::{analyze_point, PointAnalysis};
pub use delaunay::{eval_state, z_of, DelaunayParams, Family, GeneratrixState};
pub use error::{Error, Result};
pub use freeboundary::{
    build_portion, classify, AnalysisConfig, AnalysisReport, FreeBoundaryPortion, Verdict,
    ViolationPoint,
};
pub use mesh::TriangleMesh;
pub use numerics::{find_root, integrate, QuadratureConfig, RootConfig};
