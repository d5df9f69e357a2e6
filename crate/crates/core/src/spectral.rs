//! Per-lambda spectral data and the kappa-power expansions used as
//! stiff-regime oracles.
//!
//! For a spectral parameter `lambda` the two ends of the wave carry
//! `kappa_pm = sqrt(c^2 + 4(lambda - f'(u_hat_pm)))` on the principal
//! branch, asymptotic eigenvalues `mu_pm = (-c +/- kappa_pm)/2`, and the
//! eigenbases `B_pm` whose columns are `(1, mu)`. Transforming the shooting
//! system into these bases removes the dominant exponential factor and
//! exposes everything as a series in `1/kappa`.

use num_complex::Complex64;

use crate::integrate::MethodKind;
use crate::linalg::C2Matrix;
use crate::linalg::C2Vector;
use crate::model::ReactionModel;
use crate::Error;
use crate::Result;

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Minimum `Re(h kappa)` for the stiff one-step expansions; below it the
/// dropped exponentially small terms are not negligible.
pub const STIFF_SECTOR_MIN: f64 = 5.0;

/// Principal square root: `Re >= 0`, ties on the imaginary axis resolved to
/// `Im >= 0`. Every kappa and `lambda^{1/2}` in the crate goes through this
/// one routine so branches stay consistent.
pub fn principal_sqrt(z: Complex64) -> Complex64 {
    z.sqrt()
}

/// Which end of the wave a solution decays towards.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Minus,
    Plus,
}

/// Per-lambda spectral quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralFrame {
    pub lambda: Complex64,
    pub kappa_minus: Complex64,
    pub kappa_plus: Complex64,
    /// `[mu_-^1, mu_-^2]`
    pub mu_minus: [Complex64; 2],
    /// `[mu_+^1, mu_+^2]`
    pub mu_plus: [Complex64; 2],
    pub b_minus: C2Matrix,
    pub b_plus: C2Matrix,
    pub admissible: bool,
}

impl SpectralFrame {
    pub fn kappa(&self, side: Side) -> Complex64 {
        match side {
            Side::Minus => self.kappa_minus,
            Side::Plus => self.kappa_plus,
        }
    }

    pub fn basis(&self, side: Side) -> C2Matrix {
        match side {
            Side::Minus => self.b_minus,
            Side::Plus => self.b_plus,
        }
    }

    pub fn require_admissible(&self) -> Result<()> {
        if self.admissible {
            Ok(())
        } else {
            Err(Error::InadmissibleLambda { lambda: self.lambda })
        }
    }
}

/// Build the spectral frame for `lambda`. Inadmissible values are returned
/// flagged, not rejected.
pub fn build_frame(model: &ReactionModel, lambda: Complex64) -> SpectralFrame {
    let c = model.speed();
    let basis_for = |fprime: f64| {
        let kappa = principal_sqrt(Complex64::new(c * c - 4.0 * fprime, 0.0) + 4.0 * lambda);
        let mu1 = 0.5 * (-c + kappa);
        let mu2 = 0.5 * (-c - kappa);
        let b = C2Matrix::new(Complex64::ONE, Complex64::ONE, mu1, mu2);
        (kappa, [mu1, mu2], b)
    };
    let (kappa_minus, mu_minus, b_minus) = basis_for(model.fprime_minus());
    let (kappa_plus, mu_plus, b_plus) = basis_for(model.fprime_plus());
    let admissible = kappa_minus.re > 0.0 && kappa_plus.re > 0.0;
    SpectralFrame {
        lambda,
        kappa_minus,
        kappa_plus,
        mu_minus,
        mu_plus,
        b_minus,
        b_plus,
        admissible,
    }
}

/// Coefficient matrix `A(xi; lambda)` of the untransformed system.
pub fn raw_coefficient(model: &ReactionModel, lambda: Complex64, xi: f64) -> C2Matrix {
    C2Matrix::new(
        Complex64::ZERO,
        Complex64::ONE,
        lambda - model.fprime_along_wave(xi),
        Complex64::new(-model.speed(), 0.0),
    )
}

/// Transformed coefficient matrix without the admissibility gate; used by
/// the propagation loop after it has checked the frame once.
pub(crate) fn transformed_coefficient(
    model: &ReactionModel,
    frame: &SpectralFrame,
    side: Side,
    xi: f64,
) -> C2Matrix {
    match side {
        Side::Minus => {
            let kappa = frame.kappa_minus;
            let p = model.phi_minus(xi) / kappa;
            C2Matrix::new(-p, -p, p, -kappa + p)
        }
        Side::Plus => {
            let kappa = frame.kappa_plus;
            let p = model.phi_plus(xi) / kappa;
            C2Matrix::new(kappa - p, -p, p, p)
        }
    }
}

/// Transformed coefficient matrix `B^{-1} A B - mu I` for the given side:
/// `mu_-^1` on the minus side, `mu_+^2` on the plus side.
pub fn transformed_generator(
    model: &ReactionModel,
    frame: &SpectralFrame,
    side: Side,
    xi: f64,
) -> Result<C2Matrix> {
    frame.require_admissible()?;
    Ok(transformed_coefficient(model, frame, side, xi))
}

/// Truncation order of the boundary-layer and asymptotic series: number of
/// `1/kappa` powers kept beyond the leading term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpansionOrder {
    Leading,
    First,
    Second,
}

impl ExpansionOrder {
    pub fn terms(self) -> u8 {
        match self {
            ExpansionOrder::Leading => 0,
            ExpansionOrder::First => 1,
            ExpansionOrder::Second => 2,
        }
    }
}

/// Series value of the transformed decaying solution at `xi`.
///
/// Minus side: `(1 - Phi_-/kappa + Phi_-^2/(2 kappa^2), phi_-/kappa^2)`,
/// truncated at the requested order; plus side mirrors it in the second
/// component.
pub fn boundary_layer_solution(
    model: &ReactionModel,
    frame: &SpectralFrame,
    side: Side,
    xi: f64,
    order: ExpansionOrder,
) -> Result<C2Vector> {
    frame.require_admissible()?;
    let kappa = frame.kappa(side);
    let inv = Complex64::ONE / kappa;
    let (big_phi, small_phi) = match side {
        Side::Minus => (model.phi_minus_integral(xi)?, model.phi_minus(xi)),
        Side::Plus => (model.phi_plus_integral(xi)?, model.phi_plus(xi)),
    };
    let mut slow = Complex64::ONE;
    let mut fast = Complex64::ZERO;
    if order.terms() >= 1 {
        slow -= big_phi * inv;
    }
    if order.terms() >= 2 {
        slow += 0.5 * big_phi * big_phi * inv * inv;
        fast = small_phi * inv * inv;
    }
    Ok(match side {
        Side::Minus => C2Vector::new(slow, fast),
        Side::Plus => C2Vector::new(fast, slow),
    })
}

/// Entrywise kappa-power expansion of the minus-side one-step matrix in the
/// stiff sector: `exp(h A_bar_-(xi_k + h/2))` for the midpoint rule, or
/// `exp(Omega_bar_k)` for the fourth-order Magnus method. All four entries
/// carry their coefficients through `1/kappa^2`, so the difference from the
/// true exponential is `O(kappa^{-3})` entrywise plus exponentially small
/// terms.
pub fn onestep_stiff_expansion(
    model: &ReactionModel,
    frame: &SpectralFrame,
    method: MethodKind,
    xi_k: f64,
    h: f64,
) -> Result<C2Matrix> {
    frame.require_admissible()?;
    let kappa = frame.kappa_minus;
    let sector = (h * kappa).re;
    if sector < STIFF_SECTOR_MIN {
        return Err(Error::SectorViolation {
            value: sector,
            required: STIFF_SECTOR_MIN,
        });
    }
    let inv = Complex64::ONE / kappa;
    let inv2 = inv * inv;
    match method {
        MethodKind::Midpoint => {
            let phi = model.phi_minus(xi_k + 0.5 * h);
            let a11 = Complex64::ONE - h * phi * inv + 0.5 * h * h * phi * phi * inv2;
            let off = phi * inv2;
            let a22 = -phi * phi * inv2 * inv2;
            Ok(C2Matrix::new(a11, -off, off, a22))
        }
        MethodKind::Magnus4 => {
            let phi1 = model.phi_minus(xi_k + (0.5 - SQRT_3 / 6.0) * h);
            let phi2 = model.phi_minus(xi_k + (0.5 + SQRT_3 / 6.0) * h);
            let alpha = 0.5 * (phi1 + phi2);
            let beta = -(SQRT_3 / 12.0) * h * (phi1 - phi2);
            let chi = alpha - beta * beta;
            let a11 = Complex64::ONE - h * chi * inv
                + 0.5 * (h * h * chi * chi - 2.0 * beta * beta) * inv2;
            let a12 = beta * inv - (alpha + h * chi * beta) * inv2;
            let a21 = beta * inv + (alpha - h * chi * beta) * inv2;
            let a22 = beta * beta * inv2;
            Ok(C2Matrix::new(a11, a12, a21, a22))
        }
        MethodKind::GaussLegendre4 => Err(Error::NoClosedForm {
            what: "stiff one-step expansion",
        }),
    }
}
