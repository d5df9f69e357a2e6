//! Adaptive Simpson quadrature for the potential integrals.

use crate::error::Error;
use crate::Result;

/// Absolute tolerance used for all potential quadratures.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Refinement depth cap.
pub const MAX_DEPTH: u32 = 40;

fn simpson(fa: f64, fm: f64, fb: f64, width: f64) -> f64 {
    width / 6.0 * (fa + 4.0 * fm + fb)
}

/// Integrate `f` over `[a, b]` to absolute tolerance `tol`.
///
/// ```
/// let q = evans_core::quadrature::integrate(&|x: f64| x * x, 0.0, 1.0, 1e-12).unwrap();
/// assert!((q - 1.0 / 3.0).abs() < 1e-11);
/// ```
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    refine(f, a, m, b, fa, fm, fb, whole, tol, 0)
}

/// Integrate over `[a, b]` after splitting into panels no wider than
/// `max_panel_width`. Localized integrands over long domains need the
/// forced subdivision: plain adaptive Simpson can sample straight past a
/// feature whose support is far narrower than the interval.
pub fn integrate_paneled<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    max_panel_width: f64,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let width = libm::fabs(b - a);
    let panels = (libm::ceil(width / max_panel_width) as usize).clamp(1, 8192);
    let panel_tol = (tol / panels as f64).max(1e-15);
    let step = (b - a) / panels as f64;
    let mut total = 0.0;
    for i in 0..panels {
        let lo = a + i as f64 * step;
        let hi = if i + 1 == panels { b } else { a + (i + 1) as f64 * step };
        total += integrate(f, lo, hi, panel_tol)?;
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    m: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if libm::fabs(delta) <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::QuadratureDepth { depth });
    }
    let half_tol = 0.5 * tol;
    Ok(refine(f, a, lm, m, fa, flm, fm, left, half_tol, depth + 1)?
        + refine(f, m, rm, b, fm, frm, fb, right, half_tol, depth + 1)?)
}
