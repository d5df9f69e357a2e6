//! Assembly of the Evans function from two-sided propagation, and its
//! large-lambda asymptotic series.

use num_complex::Complex64;

use crate::integrate::{propagate, Coordinates, GridSpec, MethodKind};
use crate::linalg::C2Vector;
use crate::model::ReactionModel;
use crate::spectral::{build_frame, principal_sqrt, ExpansionOrder, Side, SpectralFrame};
use crate::Error;
use crate::Result;

/// One Evans-function evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvansResult {
    pub lambda: Complex64,
    pub value: Complex64,
    /// Transformed `y_bar_-(0)`.
    pub minus_final: C2Vector,
    /// Transformed `y_bar_+(0)`.
    pub plus_final: C2Vector,
    pub grid: GridSpec,
    pub method: MethodKind,
}

/// Combine the transformed matching values into `D(lambda)`:
///
/// `D = (kappa_- - kappa_+)/2 (v_- v_+ - u_- u_+) + (kappa_- + kappa_+)/2 (v_- u_+ - u_- v_+)`
///
/// which equals the wedge product of `B_- y_bar_-(0)` and `B_+ y_bar_+(0)`;
/// the wave speed cancels.
pub fn combine(frame: &SpectralFrame, minus_final: C2Vector, plus_final: C2Vector) -> Result<Complex64> {
    frame.require_admissible()?;
    let diff = 0.5 * (frame.kappa_minus - frame.kappa_plus);
    let sum = 0.5 * (frame.kappa_minus + frame.kappa_plus);
    let (u_m, v_m) = (minus_final.u, minus_final.v);
    let (u_p, v_p) = (plus_final.u, plus_final.v);
    Ok(diff * (v_m * v_p - u_m * u_p) + sum * (v_m * u_p - u_m * v_p))
}

/// Evaluate `D(lambda)` by propagating both sides in transformed
/// coordinates and combining the matching values.
pub fn evaluate_evans(
    model: &ReactionModel,
    lambda: Complex64,
    grid: &GridSpec,
    method: MethodKind,
) -> Result<EvansResult> {
    let frame = build_frame(model, lambda);
    frame.require_admissible()?;
    let minus = propagate(model, &frame, grid, method, Side::Minus, Coordinates::Transformed)?;
    let plus = propagate(model, &frame, grid, method, Side::Plus, Coordinates::Transformed)?;
    let minus_final = minus.final_value();
    let plus_final = plus.final_value();
    let value = combine(&frame, minus_final, plus_final)?;
    Ok(EvansResult {
        lambda,
        value,
        minus_final,
        plus_final,
        grid: *grid,
        method,
    })
}

/// Coefficients of the large-lambda series for `D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticSeries {
    pub phi_total: f64,
    pub speed_c: f64,
    pub fprime_minus: f64,
    pub fprime_plus: f64,
    pub order: ExpansionOrder,
}

impl AsymptoticSeries {
    pub fn for_model(model: &ReactionModel, order: ExpansionOrder) -> Result<Self> {
        Ok(Self {
            phi_total: model.phi_total()?,
            speed_c: model.speed(),
            fprime_minus: model.fprime_minus(),
            fprime_plus: model.fprime_plus(),
            order,
        })
    }
}

/// Large-lambda series
/// `D = -2 lambda^{1/2} + Phi - (Phi^2 - 2 f'_- - 2 f'_+ + c^2) / (4 lambda^{1/2})`,
/// truncated at the requested order; the remainder is `O(1/lambda)`.
pub fn asymptotic_evans(series: &AsymptoticSeries, lambda: Complex64) -> Result<Complex64> {
    if lambda == Complex64::ZERO {
        return Err(Error::ZeroLambda);
    }
    let root = principal_sqrt(lambda);
    let mut value = -2.0 * root;
    if series.order.terms() >= 1 {
        value += Complex64::new(series.phi_total, 0.0);
    }
    if series.order.terms() >= 2 {
        let coeff = series.phi_total * series.phi_total
            - 2.0 * series.fprime_minus
            - 2.0 * series.fprime_plus
            + series.speed_c * series.speed_c;
        value -= 0.25 * Complex64::new(coeff, 0.0) / root;
    }
    Ok(value)
}
