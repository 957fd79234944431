//! One-dimensional quadrature and bracketed root finding.
//!
//! Both kernels are pure and allocation-light so they can be called from
//! parallel scans without coordination.

use crate::error::{Error, Result};

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 1000,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) {
            return Err(Error::InvalidConfig("absolute quadrature tolerance must be > 0"));
        }
        if !(self.rel_tol >= 0.0) {
            return Err(Error::InvalidConfig("relative quadrature tolerance must be >= 0"));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::InvalidConfig("max_subdivisions must be >= 1"));
        }
        Ok(())
    }
}

/// Tolerances for [`find_root`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootConfig {
    pub x_tol: f64,
    pub f_tol: f64,
    pub max_iterations: usize,
}

impl Default for RootConfig {
    fn default() -> Self {
        Self {
            x_tol: 1e-12,
            f_tol: 1e-10,
            max_iterations: 200,
        }
    }
}

impl RootConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.x_tol > 0.0) {
            return Err(Error::InvalidConfig("abscissa tolerance must be > 0"));
        }
        if !(self.f_tol >= 0.0) {
            return Err(Error::InvalidConfig("residual tolerance must be >= 0"));
        }
        if self.max_iterations < 1 {
            return Err(Error::InvalidConfig("max_iterations must be >= 1"));
        }
        Ok(())
    }
}

// 15-point Kronrod extension of the 7-point Gauss-Legendre rule.
// Abscissae are listed from the outside in; odd indices are the Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = kronrod * half;
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();

    // QUADPACK error rescaling: the raw |K - G| difference is the error of
    // the Gauss rule, far larger than that of the Kronrod result.
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }

    Panel { a, b, value, error }
}

/// Adaptive Gauss-Kronrod (7/15) integration of `f` over `[a, b]`.
///
/// The interval with the largest error estimate is bisected until the summed
/// estimate drops below `max(abs_tol, rel_tol * |I|)`. Reversed bounds negate
/// the result, and `integrate(f, a, a)` is exactly zero.
pub fn integrate<F>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return integrate(f, b, a, cfg).map(|v| -v);
    }

    let mut panels = vec![kronrod15(&f, a, b)];
    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if !total.is_finite() {
            return Err(Error::NonFinite { x: 0.5 * (a + b) });
        }
        if error <= cfg.abs_tol.max(cfg.rel_tol * total.abs()) {
            return Ok(total);
        }
        if panels.len() >= cfg.max_subdivisions {
            return Err(Error::SubdivisionLimit {
                a,
                b,
                limit: cfg.max_subdivisions,
                estimate: error,
            });
        }

        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|l, r| l.1.error.total_cmp(&r.1.error))
            .expect("at least one panel");
        let Panel { a: lo, b: hi, .. } = panels[worst];
        let mid = 0.5 * (lo + hi);
        if !(lo < mid && mid < hi) {
            // Panel cannot be split further in double precision.
            return Err(Error::SubdivisionLimit {
                a,
                b,
                limit: panels.len(),
                estimate: error,
            });
        }
        panels[worst] = kronrod15(&f, lo, mid);
        panels.push(kronrod15(&f, mid, hi));
    }
}

/// Bracketed root of `f` in `[a, b]` by bisection with secant acceleration.
///
/// A secant step is accepted only when it lands strictly inside the current
/// bracket and the previous step at least halved the bracket; otherwise the
/// midpoint is used. The returned point always lies in the initial bracket.
pub fn find_root<F>(f: F, a: f64, b: f64, cfg: &RootConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    if !f_lo.is_finite() {
        return Err(Error::NonFinite { x: lo });
    }
    if !f_hi.is_finite() {
        return Err(Error::NonFinite { x: hi });
    }
    if f_lo.abs() <= cfg.f_tol || f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi.abs() <= cfg.f_tol || f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoSignChange {
            a: lo,
            b: hi,
            fa: f_lo,
            fb: f_hi,
        });
    }

    let mut last_width = f64::INFINITY;
    for _ in 0..cfg.max_iterations {
        let width = hi - lo;
        let secant = hi - f_hi * (hi - lo) / (f_hi - f_lo);
        let candidate = if width <= 0.5 * last_width && secant > lo && secant < hi {
            secant
        } else {
            0.5 * (lo + hi)
        };
        last_width = width;

        let fc = f(candidate);
        if !fc.is_finite() {
            return Err(Error::NonFinite { x: candidate });
        }
        if fc.abs() <= cfg.f_tol || fc == 0.0 {
            return Ok(candidate);
        }
        if fc.signum() == f_lo.signum() {
            lo = candidate;
            f_lo = fc;
        } else {
            hi = candidate;
            f_hi = fc;
        }
        if hi - lo <= cfg.x_tol {
            return Ok(if f_lo.abs() <= f_hi.abs() { lo } else { hi });
        }
    }
    Err(Error::IterationLimit {
        limit: cfg.max_iterations,
        lo,
        hi,
    })
}

/// Golden-section search for a minimiser of a unimodal `f` on `[a, b]`.
/// Returns `(argmin, min)`.
pub fn golden_min<F>(f: F, a: f64, b: f64, tol: f64, max_iterations: usize) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..max_iterations {
        if hi - lo <= tol {
            break;
        }
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
