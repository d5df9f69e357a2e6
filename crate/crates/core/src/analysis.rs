//! Evans-function error measurement against self-convergent references,
//! the closed-form leading-order error predictions, per-cell local error
//! coefficients, per-node predicted global errors, Euler-Maclaurin sum
//! residuals, and log-log order fitting.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::evans::evaluate_evans;
use crate::integrate::{propagate, Coordinates, GridSpec, MethodKind};
use crate::linalg::C2Vector;
use crate::model::ReactionModel;
use crate::quadrature;
use crate::spectral::{build_frame, Side, SpectralFrame, STIFF_SECTOR_MIN};
use crate::Error;
use crate::Result;

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Tolerance for the per-cell potential integrals entering the local and
/// global error formulas.
const CELL_TOL: f64 = 1e-13;

/// Relative agreement between successive grid doublings at which the
/// reference value is accepted.
const REFERENCE_TOL: f64 = 1e-11;

/// Measured vs predicted Evans-function error for one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub method: MethodKind,
    pub lambda: Complex64,
    pub grid: GridSpec,
    /// `D_method - D_reference` at the same truncation half-length.
    pub measured: Complex64,
    pub predicted: Option<Complex64>,
    /// `Re(measured / predicted)`, present when a nonzero prediction exists.
    pub ratio: Option<f64>,
}

/// Self-convergent reference value for `D(lambda)`: fourth-order Magnus
/// evaluations at N, 2N, 4N, ... until two successive values agree to
/// `1e-11 * max(1, |D|)`. Truncation error in `L` is shared with any run at
/// the same half-length, so differences against this reference isolate the
/// discretization error.
pub fn reference_evans(model: &ReactionModel, lambda: Complex64, half_length: f64) -> Result<Complex64> {
    let base = libm::ceil(8.0 * half_length) as usize;
    let mut n = base.max(256);
    let grid = GridSpec::new(half_length, n)?;
    let mut prev = evaluate_evans(model, lambda, &grid, MethodKind::Magnus4)?.value;
    for _ in 0..8u32 {
        n *= 2;
        let grid = GridSpec::new(half_length, n)?;
        let cur = evaluate_evans(model, lambda, &grid, MethodKind::Magnus4)?.value;
        if (cur - prev).norm() < REFERENCE_TOL * cur.norm().max(1.0) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::ReferenceNotConverged { doublings: 8 })
}

/// Leading-order prediction of the Evans-function error `D_num - D`.
///
/// Midpoint: the midpoint-rule quadrature defect of the potential over
/// `[-L, L]` (superalgebraically small for smooth decaying potentials; the
/// `O(lambda^{-1/2} h^2)` term has no printed constant). Fourth-order
/// Magnus: `-h^4/144` times the full-line integral of the squared potential
/// slope. Gauss-Legendre: no closed form, only order bounds.
pub fn predict_evans_error(
    model: &ReactionModel,
    lambda: Complex64,
    grid: &GridSpec,
    method: MethodKind,
) -> Result<Option<Complex64>> {
    build_frame(model, lambda).require_admissible()?;
    match method {
        MethodKind::Midpoint => {
            let defect = midpoint_sum(model, grid) - domain_integral(model, grid)?;
            Ok(Some(Complex64::new(defect, 0.0)))
        }
        MethodKind::Magnus4 => {
            let slope_sq = model.phi_prime_sq_total()?;
            let h = grid.step_size();
            let h2 = h * h;
            Ok(Some(Complex64::new(-h2 * h2 / 144.0 * slope_sq, 0.0)))
        }
        MethodKind::GaussLegendre4 => Ok(None),
    }
}

/// Measure `D_method - D_reference` and attach the method's prediction.
pub fn measure_evans_error(
    model: &ReactionModel,
    lambda: Complex64,
    grid: &GridSpec,
    method: MethodKind,
) -> Result<ErrorReport> {
    let reference = reference_evans(model, lambda, grid.half_length())?;
    let value = evaluate_evans(model, lambda, grid, method)?.value;
    let measured = value - reference;
    let predicted = predict_evans_error(model, lambda, grid, method)?;
    let ratio = predicted.and_then(|p| {
        if p.norm() > 0.0 {
            Some((measured / p).re)
        } else {
            None
        }
    });
    Ok(ErrorReport {
        method,
        lambda,
        grid: *grid,
        measured,
        predicted,
        ratio,
    })
}

/// Per-cell local error coefficients of the minus-side sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LocalErrorTerms {
    /// `gamma = int phi - h phi(mid)`, `delta = phi(mid) - phi(end)`.
    Midpoint { gamma: f64, delta: f64 },
    /// `alpha, beta` from the Gauss-Legendre samples, `chi = alpha - beta^2`,
    /// `gamma = int phi - h chi`.
    Magnus4 { gamma: f64, beta: f64, alpha: f64, chi: f64 },
    /// The three stage-expansion coefficients of the Gauss-Legendre step.
    GaussLegendre4 { l_a: f64, l_b: f64, l_c: f64 },
}

fn cell_integral(model: &ReactionModel, side: Side, lo: f64, hi: f64) -> Result<f64> {
    let f = |x: f64| match side {
        Side::Minus => model.phi_minus(x),
        Side::Plus => model.phi_plus(x),
    };
    quadrature::integrate(&f, lo, hi, CELL_TOL)
}

/// Evaluate the defining local-error formulas on the cell
/// `[xi_k, xi_k + h]` with the minus-side potential.
pub fn local_error_terms(
    model: &ReactionModel,
    frame: &SpectralFrame,
    method: MethodKind,
    xi_k: f64,
    h: f64,
) -> Result<LocalErrorTerms> {
    frame.require_admissible()?;
    let phi = |x: f64| model.phi_minus(x);
    let cell = cell_integral(model, Side::Minus, xi_k, xi_k + h)?;
    match method {
        MethodKind::Midpoint => Ok(LocalErrorTerms::Midpoint {
            gamma: cell - h * phi(xi_k + 0.5 * h),
            delta: phi(xi_k + 0.5 * h) - phi(xi_k + h),
        }),
        MethodKind::Magnus4 => {
            let phi1 = phi(xi_k + (0.5 - SQRT_3 / 6.0) * h);
            let phi2 = phi(xi_k + (0.5 + SQRT_3 / 6.0) * h);
            let alpha = 0.5 * (phi1 + phi2);
            let beta = -(SQRT_3 / 12.0) * h * (phi1 - phi2);
            let chi = alpha - beta * beta;
            Ok(LocalErrorTerms::Magnus4 {
                gamma: cell - h * chi,
                beta,
                alpha,
                chi,
            })
        }
        MethodKind::GaussLegendre4 => {
            let phi1 = phi(xi_k + (0.5 - SQRT_3 / 6.0) * h);
            let phi2 = phi(xi_k + (0.5 + SQRT_3 / 6.0) * h);
            let alpha = 0.5 * (phi1 + phi2);
            let beta = -(SQRT_3 / 12.0) * h * (phi1 - phi2);
            let l_a = cell - h * alpha;
            let big_phi = model.phi_minus_integral(xi_k)?;
            let l_b = -l_a * (0.5 * l_a + big_phi + h * alpha);
            // l_c = phi(xi_k) + 12 beta / h - phi(xi_{k+1})
            let l_c = phi(xi_k) - phi(xi_k + h) + 12.0 * beta / h;
            Ok(LocalErrorTerms::GaussLegendre4 { l_a, l_b, l_c })
        }
    }
}

struct SideCells<'a> {
    model: &'a ReactionModel,
    side: Side,
    start: f64,
    signed_h: f64,
}

impl<'a> SideCells<'a> {
    fn new(model: &'a ReactionModel, grid: &GridSpec, side: Side) -> Self {
        let h = grid.step_size();
        match side {
            Side::Minus => Self { model, side, start: -grid.half_length(), signed_h: h },
            Side::Plus => Self { model, side, start: grid.half_length(), signed_h: -h },
        }
    }

    fn node(&self, j: usize) -> f64 {
        self.start + j as f64 * self.signed_h
    }

    fn phi(&self, x: f64) -> f64 {
        match self.side {
            Side::Minus => self.model.phi_minus(x),
            Side::Plus => self.model.phi_plus(x),
        }
    }

    fn phi_at_gauss(&self, j: usize) -> (f64, f64) {
        let xi = self.node(j);
        (
            self.phi(xi + (0.5 - SQRT_3 / 6.0) * self.signed_h),
            self.phi(xi + (0.5 + SQRT_3 / 6.0) * self.signed_h),
        )
    }

    /// Integral of the side potential over cell j, oriented along the sweep.
    fn cell(&self, j: usize) -> Result<f64> {
        let a = self.node(j);
        let b = self.node(j + 1);
        if self.signed_h > 0.0 {
            cell_integral(self.model, self.side, a, b)
        } else {
            cell_integral(self.model, self.side, b, a)
        }
    }

    fn big_phi(&self, x: f64) -> Result<f64> {
        match self.side {
            Side::Minus => self.model.phi_minus_integral(x),
            Side::Plus => self.model.phi_plus_integral(x),
        }
    }
}

/// Leading-order predicted global error of the transformed sweep at node
/// `k`, per method and side. The slowly varying component carries the
/// accumulated quadrature defects; the damped component carries the most
/// recent cell's coefficient.
pub fn predicted_global_error(
    model: &ReactionModel,
    frame: &SpectralFrame,
    grid: &GridSpec,
    method: MethodKind,
    side: Side,
    node: usize,
) -> Result<C2Vector> {
    frame.require_admissible()?;
    if node > grid.steps() {
        return Err(Error::InvalidParameter {
            name: "node",
            value: node as f64,
            range: "[0, N]",
        });
    }
    let kappa = frame.kappa(side);
    let h = grid.step_size();
    let sector = (h * kappa).re;
    if sector < STIFF_SECTOR_MIN {
        return Err(Error::SectorViolation {
            value: sector,
            required: STIFF_SECTOR_MIN,
        });
    }
    if node == 0 {
        return Ok(C2Vector::zero());
    }
    let cells = SideCells::new(model, grid, side);
    let inv = Complex64::ONE / kappa;
    let inv2 = inv * inv;
    let abs_h = h;
    let (slow, fast) = match method {
        MethodKind::Midpoint => {
            let mut gamma_sum = 0.0;
            for j in 0..node {
                let mid = cells.phi(cells.node(j) + 0.5 * cells.signed_h);
                gamma_sum += cells.cell(j)? - abs_h * mid;
            }
            let last = node - 1;
            let delta = cells.phi(cells.node(last) + 0.5 * cells.signed_h) - cells.phi(cells.node(node));
            (gamma_sum * inv, delta * inv2)
        }
        MethodKind::Magnus4 => {
            // beta carries the unsigned step on both sides; only the
            // abscissae mirror.
            let mut gamma_sum = 0.0;
            let mut beta_last = 0.0;
            for j in 0..node {
                let (phi1, phi2) = cells.phi_at_gauss(j);
                let alpha = 0.5 * (phi1 + phi2);
                let beta = -(SQRT_3 / 12.0) * abs_h * (phi1 - phi2);
                gamma_sum += cells.cell(j)? - abs_h * (alpha - beta * beta);
                beta_last = beta;
            }
            (gamma_sum * inv, beta_last * inv)
        }
        MethodKind::GaussLegendre4 => {
            let mut l_a = Vec::with_capacity(node);
            let mut alpha = Vec::with_capacity(node);
            let mut l_c_sum = 0.0;
            for j in 0..node {
                let (phi1, phi2) = cells.phi_at_gauss(j);
                let a = 0.5 * (phi1 + phi2);
                alpha.push(a);
                l_a.push(cells.cell(j)? - abs_h * a);
                l_c_sum += cells.phi(cells.node(j)) - cells.phi(cells.node(j + 1))
                    - SQRT_3 * (phi1 - phi2);
            }
            let mut l_a_sum = 0.0;
            let mut second_order = 0.0;
            for j in 0..node {
                let big_phi = cells.big_phi(cells.node(j))?;
                let l_b = -l_a[j] * (0.5 * l_a[j] + big_phi + abs_h * alpha[j]);
                second_order += l_b - abs_h * alpha[j] * l_a_sum;
                l_a_sum += l_a[j];
            }
            (
                l_a_sum * inv + second_order * inv2,
                l_c_sum * inv2,
            )
        }
    };
    // The slowly varying component sits first on the minus side and second
    // on the plus side.
    Ok(match side {
        Side::Minus => C2Vector::new(slow, fast),
        Side::Plus => C2Vector::new(fast, slow),
    })
}

/// Fine-grid node values used as the per-node reference: the fourth-order
/// Magnus sweep with `refine` substeps per cell, sampled at the coarse
/// nodes.
pub fn reference_nodes(
    model: &ReactionModel,
    frame: &SpectralFrame,
    grid: &GridSpec,
    side: Side,
    refine: usize,
) -> Result<Vec<C2Vector>> {
    let fine = GridSpec::new(grid.half_length(), grid.steps() * refine)?;
    let run = propagate(model, frame, &fine, MethodKind::Magnus4, side, Coordinates::Transformed)?;
    Ok(run
        .trajectory
        .iter()
        .step_by(refine)
        .copied()
        .collect())
}

/// Measured global error of a transformed sweep at every node:
/// the method's trajectory minus the fine reference trajectory.
pub fn measured_global_error(
    model: &ReactionModel,
    frame: &SpectralFrame,
    grid: &GridSpec,
    method: MethodKind,
    side: Side,
    refine: usize,
) -> Result<Vec<C2Vector>> {
    let coarse = propagate(model, frame, grid, method, side, Coordinates::Transformed)?;
    let reference = reference_nodes(model, frame, grid, side, refine)?;
    Ok(coarse
        .trajectory
        .iter()
        .zip(reference.iter())
        .map(|(a, b)| *a - *b)
        .collect())
}

/// Which composite sum to compare against the integral of the potential
/// over `[-L, L]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumRule {
    /// `h sum phi(j h + h/2)`
    MidpointSum,
    /// `h/2 sum [phi at both Gauss points of each cell]`
    GaussPairSum,
}

fn midpoint_sum(model: &ReactionModel, grid: &GridSpec) -> f64 {
    let h = grid.step_size();
    let n = grid.steps() as i64;
    let mut sum = 0.0;
    for j in -n..n {
        sum += model.fprime_along_wave(j as f64 * h + 0.5 * h);
    }
    h * sum
}

fn gauss_pair_sum(model: &ReactionModel, grid: &GridSpec) -> f64 {
    let h = grid.step_size();
    let n = grid.steps() as i64;
    let (o1, o2) = grid.gauss_offsets();
    let mut sum = 0.0;
    for j in -n..n {
        let base = j as f64 * h;
        sum += model.fprime_along_wave(base + o1) + model.fprime_along_wave(base + o2);
    }
    0.5 * h * sum
}

fn domain_integral(model: &ReactionModel, grid: &GridSpec) -> Result<f64> {
    let l = grid.half_length();
    let f = |x: f64| model.fprime_along_wave(x);
    Ok(quadrature::integrate(&f, -l, 0.0, quadrature::DEFAULT_TOL)?
        + quadrature::integrate(&f, 0.0, l, quadrature::DEFAULT_TOL)?)
}

/// Absolute defect of the composite sum against the integral over
/// `[-L, L]`. Superalgebraically small for smooth potentials once `L` is
/// past the decay region, which is what makes the quadrature-defect terms
/// of the global error negligible.
pub fn euler_maclaurin_residual(model: &ReactionModel, grid: &GridSpec, rule: SumRule) -> Result<f64> {
    let sum = match rule {
        SumRule::MidpointSum => midpoint_sum(model, grid),
        SumRule::GaussPairSum => gauss_pair_sum(model, grid),
    };
    Ok(libm::fabs(sum - domain_integral(model, grid)?))
}

/// Least-squares power-law fit in log-log coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderFit {
    pub samples: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute log-residual of the fit.
    pub residual: f64,
}

/// Fit `log(error) ~ slope * log(abscissa) + intercept`.
pub fn fit_order(samples: &[(f64, f64)]) -> Result<OrderFit> {
    if samples.len() < 3 {
        return Err(Error::DegenerateFit);
    }
    let mut logs = Vec::with_capacity(samples.len());
    for &(x, y) in samples {
        if !(x > 0.0) || !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::DegenerateFit);
        }
        logs.push((libm::log(x), libm::log(y)));
    }
    let n = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(x, y) in &logs {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    if sxx <= 1e-24 {
        return Err(Error::DegenerateFit);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let residual = logs
        .iter()
        .map(|&(x, y)| libm::fabs(y - (slope * x + intercept)))
        .fold(0.0f64, f64::max);
    Ok(OrderFit {
        samples: samples.to_vec(),
        slope,
        intercept,
        residual,
    })
}
