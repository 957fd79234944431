//! The Delaunay generatrix `s -> (x(s), 0, z(s))`.
//!
//! With `Q(s) = 1 + B^2 - 2B cos(Hs)` the profile is
//!
//! ```text
//! x(s)  = sqrt(Q) / H
//! x'(s) = B sin(Hs) / sqrt(Q)
//! z'(s) = (1 - B cos(Hs)) / sqrt(Q)
//! z(s)  = integral of z' from 0 to s
//! ```
//!
//! The curve is parametrized by arc length and the neck (or, for nodoids,
//! the inner loop apex) sits at `s = 0` on the plane `z = 0`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{integrate, QuadratureConfig};

/// Which member of the Delaunay family a parameter pair describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Cylinder,
    Unduloid,
    Nodoid,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Cylinder => "cylinder",
            Family::Unduloid => "unduloid",
            Family::Nodoid => "nodoid",
        })
    }
}

/// Mean curvature `H = k1 + k2` (unnormalized) and neck parameter `B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DelaunayParams {
    #[serde(rename = "H")]
    h: f64,
    #[serde(rename = "B")]
    b: f64,
    family: Family,
}

impl DelaunayParams {
    pub fn new(h: f64, b: f64) -> Result<Self> {
        let invalid = |reason| Error::InvalidParams { h, b, reason };
        if !h.is_finite() || h <= 0.0 {
            return Err(invalid("H must be positive and finite"));
        }
        if !b.is_finite() || b < 0.0 {
            return Err(invalid("B must be non-negative and finite"));
        }
        if b == 1.0 {
            return Err(invalid("B = 1 is the degenerate chain of spheres"));
        }
        let family = if b == 0.0 {
            Family::Cylinder
        } else if b < 1.0 {
            Family::Unduloid
        } else {
            Family::Nodoid
        };
        Ok(Self { h, b, family })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Same `B`, mean curvature multiplied by `factor`. This is the surface
    /// dilated by `1 / factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.h * factor, self.b)
    }

    /// `Q(s) = 1 + B^2 - 2B cos(Hs)`, evaluated as `(1-B)^2 + 4B sin^2(Hs/2)`
    /// to keep full relative accuracy near the neck.
    pub fn q(&self, s: f64) -> f64 {
        let half = (0.5 * self.h * s).sin();
        (1.0 - self.b).powi(2) + 4.0 * self.b * half * half
    }

    pub fn x(&self, s: f64) -> f64 {
        self.q(s).sqrt() / self.h
    }

    pub fn dx(&self, s: f64) -> f64 {
        self.b * (self.h * s).sin() / self.q(s).sqrt()
    }

    /// `z'(s)`, which is also the integrand defining `z`.
    pub fn dz(&self, s: f64) -> f64 {
        (1.0 - self.b * (self.h * s).cos()) / self.q(s).sqrt()
    }

    pub fn ddx(&self, s: f64) -> f64 {
        let (b, h) = (self.b, self.h);
        let c = (h * s).cos();
        let q = self.q(s);
        -b * h * (b * c - 1.0) * (c - b) / (q * q.sqrt())
    }

    pub fn ddz(&self, s: f64) -> f64 {
        let (b, h) = (self.b, self.h);
        let (sn, c) = (h * s).sin_cos();
        let q = self.q(s);
        b * b * h * sn * (b - c) / (q * q.sqrt())
    }

    /// Everything at `s` except the height, which the caller supplies.
    pub fn state_with_z(&self, s: f64, z: f64) -> GeneratrixState {
        GeneratrixState {
            s,
            x: self.x(s),
            z,
            dx: self.dx(s),
            dz: self.dz(s),
            ddx: self.ddx(s),
            ddz: self.ddz(s),
        }
    }
}

/// Position and first two derivatives of the generatrix at one arc length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneratrixState {
    pub s: f64,
    pub x: f64,
    pub z: f64,
    pub dx: f64,
    pub dz: f64,
    pub ddx: f64,
    pub ddz: f64,
}

impl GeneratrixState {
    /// Squared distance of `beta(s)` from the origin.
    pub fn norm_sq(&self) -> f64 {
        self.x * self.x + self.z * self.z
    }
}

/// Height of the generatrix, `z(s) = ∫_0^s z'(u) du`. Odd in `s`.
pub fn z_of(params: &DelaunayParams, s: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if params.family() == Family::Cylinder {
        cfg.validate()?;
        return Ok(s);
    }
    if s < 0.0 {
        return z_of(params, -s, cfg).map(|z| -z);
    }
    integrate(|u| params.dz(u), 0.0, s, cfg)
}

pub fn eval_state(
    params: &DelaunayParams,
    s: f64,
    cfg: &QuadratureConfig,
) -> Result<GeneratrixState> {
    let z = z_of(params, s, cfg)?;
    Ok(params.state_with_z(s, z))
}

/// Heights at an ascending knot sequence, accumulated segment by segment.
///
/// Useful when the knots run over many periods: each segment is a short
/// integral, so the subdivision budget applies per segment.
pub fn z_at_knots(
    params: &DelaunayParams,
    knots: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(knots.len());
    let mut prev_s = 0.0;
    let mut prev_z = 0.0;
    for &s in knots {
        if s < prev_s && !out.is_empty() {
            return Err(Error::InvalidRange { lo: prev_s, hi: s });
        }
        let z = if out.is_empty() {
            z_of(params, s, cfg)?
        } else {
            prev_z + integrate(|u| params.dz(u), prev_s, s, cfg)?
        };
        out.push(z);
        prev_s = s;
        prev_z = z;
    }
    Ok(out)
}
