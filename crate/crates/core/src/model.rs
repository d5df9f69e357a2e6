//! Travelling-wave problem data: the nonlinearity derivative along the wave,
//! asymptotic states, wave speed, and the potential integrals consumed by the
//! transformed equations and the error formulas.
//!
//! The potentials are
//! `phi_-(xi) = f'(u_hat(xi)) - f'(u_hat_-)` and
//! `phi_+(xi) = f'(u_hat(xi)) - f'(u_hat_+)`, with
//! `Phi_-(xi)` the integral of `phi_-` from the left end and `Phi_+(xi)` the
//! integral of `phi_+` to the right end.

use alloc::vec::Vec;

use crate::error::Error;
use crate::quadrature;
use crate::Result;

const SQRT_2: f64 = core::f64::consts::SQRT_2;

/// Pointwise tail threshold used to truncate the infinite potential
/// integrals.
const TAIL_EPS: f64 = 1e-15;

/// Tabulated samples of `f'(u_hat(xi))` with cubic Hermite interpolation.
///
/// Slopes come from local cubic fits (third-order accurate on smooth data)
/// and are limited to the monotone box wherever the data is locally
/// monotone, so the tails of a decaying profile cannot pick up spurious
/// oscillation. At a genuine interior extremum the fitted slope is kept.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedProfile {
    nodes: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl TabulatedProfile {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let n = nodes.len().min(values.len());
        if n < 4 {
            return Err(Error::TooFewNodes { min: 4, got: n });
        }
        for i in 1..nodes.len() {
            if !(nodes[i] > nodes[i - 1]) {
                return Err(Error::NonMonotonicNodes { index: i });
            }
        }
        let slopes = fitted_slopes(&nodes, &values);
        Ok(Self { nodes, values, slopes })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn cell_of(&self, xi: f64) -> usize {
        let mut lo = 0usize;
        let mut hi = self.nodes.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.nodes[mid] <= xi {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Interpolated value; clamps to the end samples outside the node range.
    pub fn value(&self, xi: f64) -> f64 {
        let n = self.nodes.len();
        if xi <= self.nodes[0] {
            return self.values[0];
        }
        if xi >= self.nodes[n - 1] {
            return self.values[n - 1];
        }
        let i = self.cell_of(xi);
        let width = self.nodes[i + 1] - self.nodes[i];
        let s = (xi - self.nodes[i]) / width;
        let (f0, f1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i] * width, self.slopes[i + 1] * width);
        let s2 = s * s;
        let s3 = s2 * s;
        f0 * (2.0 * s3 - 3.0 * s2 + 1.0)
            + m0 * (s3 - 2.0 * s2 + s)
            + f1 * (-2.0 * s3 + 3.0 * s2)
            + m1 * (s3 - s2)
    }

    /// Interpolant derivative; zero outside the node range.
    pub fn derivative(&self, xi: f64) -> f64 {
        let n = self.nodes.len();
        if xi <= self.nodes[0] || xi >= self.nodes[n - 1] {
            return 0.0;
        }
        let i = self.cell_of(xi);
        let width = self.nodes[i + 1] - self.nodes[i];
        let s = (xi - self.nodes[i]) / width;
        let (f0, f1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i] * width, self.slopes[i + 1] * width);
        let s2 = s * s;
        (f0 * (6.0 * s2 - 6.0 * s)
            + m0 * (3.0 * s2 - 4.0 * s + 1.0)
            + f1 * (6.0 * s - 6.0 * s2)
            + m1 * (3.0 * s2 - 2.0 * s))
            / width
    }
}

/// Derivative at `t` of the Newton cubic through four points.
fn cubic_derivative_at(x: &[f64; 4], f: &[f64; 4], t: f64) -> f64 {
    let d01 = (f[1] - f[0]) / (x[1] - x[0]);
    let d12 = (f[2] - f[1]) / (x[2] - x[1]);
    let d23 = (f[3] - f[2]) / (x[3] - x[2]);
    let d012 = (d12 - d01) / (x[2] - x[0]);
    let d123 = (d23 - d12) / (x[3] - x[1]);
    let d0123 = (d123 - d012) / (x[3] - x[0]);
    let (t0, t1, t2) = (t - x[0], t - x[1], t - x[2]);
    d01 + d012 * (t0 + t1) + d0123 * (t1 * t2 + t0 * t2 + t0 * t1)
}

fn fitted_slopes(nodes: &[f64], values: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut slopes = Vec::with_capacity(n);
    for i in 0..n {
        let start = i.saturating_sub(1).min(n - 4);
        let x = [nodes[start], nodes[start + 1], nodes[start + 2], nodes[start + 3]];
        let f = [
            values[start],
            values[start + 1],
            values[start + 2],
            values[start + 3],
        ];
        slopes.push(cubic_derivative_at(&x, &f, nodes[i]));
    }
    // Monotone limiting where the data is locally monotone. Nodes within
    // two cells of a secant sign change are exempt: a genuine smooth
    // extremum would otherwise be flattened to second-order accuracy.
    let secants: Vec<f64> = (0..n - 1)
        .map(|i| (values[i + 1] - values[i]) / (nodes[i + 1] - nodes[i]))
        .collect();
    for i in 0..n {
        let lo = i.saturating_sub(2);
        let hi = (i + 1).min(n - 2);
        let window = &secants[lo..=hi];
        let monotone_up = window.iter().all(|&d| d >= 0.0);
        let monotone_down = window.iter().all(|&d| d <= 0.0);
        if !monotone_up && !monotone_down {
            continue;
        }
        let mut adjacent_min = f64::INFINITY;
        let mut direction = 0.0;
        if i > 0 {
            adjacent_min = adjacent_min.min(libm::fabs(secants[i - 1]));
            direction = secants[i - 1];
        }
        if i < n - 1 {
            adjacent_min = adjacent_min.min(libm::fabs(secants[i]));
            if direction == 0.0 {
                direction = secants[i];
            }
        }
        let limit = 3.0 * adjacent_min * sign_of(direction);
        slopes[i] = clamp_to_box(slopes[i], limit);
    }
    slopes
}

fn sign_of(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

fn clamp_to_box(m: f64, limit: f64) -> f64 {
    if limit == 0.0 {
        return 0.0;
    }
    if m * limit < 0.0 {
        return 0.0;
    }
    if libm::fabs(m) > libm::fabs(limit) {
        limit
    } else {
        m
    }
}

#[derive(Debug, Clone, PartialEq)]
enum WaveProfile {
    Constant { q: f64 },
    Nagumo { a: f64 },
    Bump { q: f64, amplitude: f64, width: f64 },
    Tabulated(TabulatedProfile),
}

/// Travelling-wave data: `f'(u_hat(xi))` along the wave, the asymptotic
/// states, the wave speed, and a decay rate for tail truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct ReactionModel {
    profile: WaveProfile,
    fprime_minus: f64,
    fprime_plus: f64,
    speed_c: f64,
    decay_scale: f64,
}

fn nagumo_wave(xi: f64) -> f64 {
    1.0 / (1.0 + libm::exp(-xi / SQRT_2))
}

impl ReactionModel {
    /// Constant-coefficient model: `f'(u_hat) = q` everywhere, potentials
    /// identically zero. Exactness baseline for the integrators.
    pub fn constant(q: f64, c: f64) -> Self {
        Self {
            profile: WaveProfile::Constant { q },
            fprime_minus: q,
            fprime_plus: q,
            speed_c: c,
            decay_scale: 1.0,
        }
    }

    /// Nagumo front: `f(u) = u(1-u)(u-a)`, wave `u_hat(xi) = (1+e^{-xi/sqrt2})^{-1}`
    /// running at the speed for which the profile equation
    /// `u_hat'' + c u_hat' + f(u_hat) = 0` holds identically.
    pub fn nagumo(a: f64) -> Result<Self> {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::InvalidParameter {
                name: "a",
                value: a,
                range: "(0, 1)",
            });
        }
        Ok(Self {
            profile: WaveProfile::Nagumo { a },
            fprime_minus: -a,
            fprime_plus: a - 1.0,
            speed_c: (2.0 * a - 1.0) / SQRT_2,
            decay_scale: 1.0 / SQRT_2,
        })
    }

    /// Synthetic model with a Gaussian potential
    /// `phi(xi) = amplitude * exp(-(xi/width)^2)` on a constant background,
    /// so `Phi` and the squared-slope integral have closed forms.
    pub fn bump(q: f64, c: f64, amplitude: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::InvalidParameter {
                name: "width",
                value: width,
                range: "(0, inf)",
            });
        }
        Ok(Self {
            profile: WaveProfile::Bump { q, amplitude, width },
            fprime_minus: q,
            fprime_plus: q,
            speed_c: c,
            decay_scale: 1.0 / (width * width),
        })
    }

    /// Model backed by tabulated `f'(u_hat)` samples; the asymptotic states
    /// are the first and last samples.
    pub fn from_profile(profile: TabulatedProfile, c: f64) -> Self {
        let fprime_minus = profile.values[0];
        let fprime_plus = profile.values[profile.values.len() - 1];
        Self {
            profile: WaveProfile::Tabulated(profile),
            fprime_minus,
            fprime_plus,
            speed_c: c,
            decay_scale: 1.0,
        }
    }

    pub fn fprime_along_wave(&self, xi: f64) -> f64 {
        match &self.profile {
            WaveProfile::Constant { q } => *q,
            WaveProfile::Nagumo { a } => {
                let u = nagumo_wave(xi);
                -3.0 * u * u + 2.0 * (1.0 + a) * u - a
            }
            WaveProfile::Bump { q, amplitude, width } => {
                let t = xi / width;
                q + amplitude * libm::exp(-t * t)
            }
            WaveProfile::Tabulated(p) => p.value(xi),
        }
    }

    /// Derivative of `f'(u_hat(xi))` with respect to `xi` (the potentials
    /// differ from it by constants, so they share this derivative).
    pub fn phi_derivative(&self, xi: f64) -> f64 {
        match &self.profile {
            WaveProfile::Constant { .. } => 0.0,
            WaveProfile::Nagumo { a } => {
                let u = nagumo_wave(xi);
                let du = u * (1.0 - u) / SQRT_2;
                (2.0 * (1.0 + a) - 6.0 * u) * du
            }
            WaveProfile::Bump { amplitude, width, .. } => {
                let t = xi / width;
                -2.0 * xi / (width * width) * amplitude * libm::exp(-t * t)
            }
            WaveProfile::Tabulated(p) => p.derivative(xi),
        }
    }

    pub fn fprime_minus(&self) -> f64 {
        self.fprime_minus
    }

    pub fn fprime_plus(&self) -> f64 {
        self.fprime_plus
    }

    pub fn speed(&self) -> f64 {
        self.speed_c
    }

    pub fn decay_scale(&self) -> f64 {
        self.decay_scale
    }

    pub fn phi_minus(&self, xi: f64) -> f64 {
        self.fprime_along_wave(xi) - self.fprime_minus
    }

    pub fn phi_plus(&self, xi: f64) -> f64 {
        self.fprime_along_wave(xi) - self.fprime_plus
    }

    /// Leftmost xi needed for integrals of `phi_-`: beyond it `|phi_-|`
    /// stays below the tail threshold.
    fn left_tail(&self) -> f64 {
        if let WaveProfile::Tabulated(p) = &self.profile {
            return p.nodes[0];
        }
        let mut r = (34.6 / self.decay_scale).max(5.0);
        for _ in 0..60 {
            if libm::fabs(self.phi_minus(-r)) < TAIL_EPS {
                break;
            }
            r *= 2.0;
        }
        -r
    }

    fn right_tail(&self) -> f64 {
        if let WaveProfile::Tabulated(p) = &self.profile {
            return p.nodes[p.nodes.len() - 1];
        }
        let mut r = (34.6 / self.decay_scale).max(5.0);
        for _ in 0..60 {
            if libm::fabs(self.phi_plus(r)) < TAIL_EPS {
                break;
            }
            r *= 2.0;
        }
        r
    }

    /// Width below which the potentials cannot hide a feature from the
    /// quadrature panels.
    pub(crate) fn feature_scale(&self) -> f64 {
        match &self.profile {
            WaveProfile::Tabulated(p) => {
                let span = p.nodes[p.nodes.len() - 1] - p.nodes[0];
                (8.0 * span / p.nodes.len() as f64).max(1e-6)
            }
            _ => {
                let d = self.decay_scale;
                (1.0 / d).min(1.0 / libm::sqrt(d))
            }
        }
    }

    /// `Phi_-(xi)`: integral of `phi_-` from the left end up to `xi`.
    pub fn phi_minus_integral(&self, xi: f64) -> Result<f64> {
        if matches!(self.profile, WaveProfile::Constant { .. }) {
            return Ok(0.0);
        }
        let lo = self.left_tail().min(xi);
        quadrature::integrate_paneled(
            &|x| self.phi_minus(x),
            lo,
            xi,
            quadrature::DEFAULT_TOL,
            self.feature_scale(),
        )
    }

    /// `Phi_+(xi)`: integral of `phi_+` from `xi` to the right end.
    pub fn phi_plus_integral(&self, xi: f64) -> Result<f64> {
        if matches!(self.profile, WaveProfile::Constant { .. }) {
            return Ok(0.0);
        }
        let hi = self.right_tail().max(xi);
        quadrature::integrate_paneled(
            &|x| self.phi_plus(x),
            xi,
            hi,
            quadrature::DEFAULT_TOL,
            self.feature_scale(),
        )
    }

    /// `Phi = Phi_-(0) + Phi_+(0)`.
    pub fn phi_total(&self) -> Result<f64> {
        Ok(self.phi_minus_integral(0.0)? + self.phi_plus_integral(0.0)?)
    }

    /// Full-line integral of the squared potential slope.
    pub fn phi_prime_sq_total(&self) -> Result<f64> {
        if matches!(self.profile, WaveProfile::Constant { .. }) {
            return Ok(0.0);
        }
        let lo = self.left_tail();
        let hi = self.right_tail();
        let f = |x: f64| {
            let d = self.phi_derivative(x);
            d * d
        };
        let scale = self.feature_scale();
        Ok(quadrature::integrate_paneled(&f, lo, 0.0, quadrature::DEFAULT_TOL, scale)?
            + quadrature::integrate_paneled(&f, 0.0, hi, quadrature::DEFAULT_TOL, scale)?)
    }

    /// Truncation half-length at which both potentials have decayed below
    /// 1e-12 in magnitude.
    pub fn recommended_half_length(&self) -> f64 {
        if let WaveProfile::Tabulated(p) = &self.profile {
            let lo = p.nodes[0];
            let hi = p.nodes[p.nodes.len() - 1];
            return libm::fabs(lo).max(libm::fabs(hi));
        }
        let mut r = (27.7 / self.decay_scale).max(5.0);
        for _ in 0..60 {
            if libm::fabs(self.phi_minus(-r)) < 1e-12 && libm::fabs(self.phi_plus(r)) < 1e-12 {
                break;
            }
            r *= 2.0;
        }
        r
    }
}

/// Potential quadrature selector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialKind {
    PhiMinusAt(f64),
    PhiPlusAt(f64),
    PhiTotal,
    PhiPrimeSqTotal,
}

/// Adaptive-quadrature value of the selected potential integral.
pub fn quad_potential(model: &ReactionModel, kind: PotentialKind) -> Result<f64> {
    match kind {
        PotentialKind::PhiMinusAt(xi) => model.phi_minus_integral(xi),
        PotentialKind::PhiPlusAt(xi) => model.phi_plus_integral(xi),
        PotentialKind::PhiTotal => model.phi_total(),
        PotentialKind::PhiPrimeSqTotal => model.phi_prime_sq_total(),
    }
}
