//! One-step maps and two-sided propagation.
//!
//! All three methods are realized as a single signed-step code path: a
//! backward sweep is the same scheme with step `-h`, which automatically
//! mirrors the quadrature abscissae inside each cell.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::linalg::{commutator, expm2, solve4, C2Matrix, C2Vector};
use crate::model::ReactionModel;
use crate::spectral::{raw_coefficient, transformed_coefficient, Side, SpectralFrame};
use crate::Error;
use crate::Result;

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Component magnitude beyond which raw-coordinate propagation aborts.
const RAW_OVERFLOW_LIMIT: f64 = 1e300;

/// Truncated domain `[-L, 0] u [0, L]` with `N` cells per side.
///
/// The step is always derived as `L / N`, never stored independently.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    half_length: f64,
    steps: usize,
}

impl GridSpec {
    pub fn new(half_length: f64, steps: usize) -> Result<Self> {
        if !(half_length > 0.0) || !half_length.is_finite() {
            return Err(Error::InvalidParameter {
                name: "L",
                value: half_length,
                range: "(0, inf)",
            });
        }
        if steps == 0 {
            return Err(Error::InvalidParameter {
                name: "N",
                value: 0.0,
                range: "[1, inf)",
            });
        }
        Ok(Self { half_length, steps })
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn step_size(&self) -> f64 {
        self.half_length / self.steps as f64
    }

    /// The two Gauss-Legendre abscissa offsets `(1/2 -/+ sqrt3/6) h`.
    pub fn gauss_offsets(&self) -> (f64, f64) {
        let h = self.step_size();
        ((0.5 - SQRT_3 / 6.0) * h, (0.5 + SQRT_3 / 6.0) * h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodKind {
    Midpoint,
    Magnus4,
    GaussLegendre4,
}

impl MethodKind {
    pub const ALL: [MethodKind; 3] = [
        MethodKind::Midpoint,
        MethodKind::Magnus4,
        MethodKind::GaussLegendre4,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            MethodKind::Midpoint => "midpoint",
            MethodKind::Magnus4 => "magnus4",
            MethodKind::GaussLegendre4 => "gl4",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coordinates {
    Raw,
    Transformed,
}

/// Trajectory of one shooting sweep, recorded at every node from the
/// starting end towards the matching point `xi = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagationResult {
    pub side: Side,
    pub coordinates: Coordinates,
    pub trajectory: Vec<C2Vector>,
}

impl PropagationResult {
    /// Value at the matching point.
    pub fn final_value(&self) -> C2Vector {
        self.trajectory[self.trajectory.len() - 1]
    }
}

/// Exponential midpoint rule: `y -> exp(h G(xi_k + h/2)) y`. Negative `h`
/// steps backward.
pub fn step_midpoint<G: Fn(f64) -> C2Matrix>(
    generator: &G,
    xi_k: f64,
    h: f64,
    y: C2Vector,
) -> Result<C2Vector> {
    let mid = generator(xi_k + 0.5 * h).scale(Complex64::new(h, 0.0));
    Ok(expm2(&mid)? * y)
}

/// Fourth-order Magnus step with two Gauss-Legendre samples and the
/// commutator correction. On a constant generator the commutator vanishes
/// and the step coincides with the midpoint rule.
pub fn step_magnus4<G: Fn(f64) -> C2Matrix>(
    generator: &G,
    xi_k: f64,
    h: f64,
    y: C2Vector,
) -> Result<C2Vector> {
    let a1 = generator(xi_k + (0.5 - SQRT_3 / 6.0) * h);
    let a2 = generator(xi_k + (0.5 + SQRT_3 / 6.0) * h);
    let omega = (a1 + a2).scale(Complex64::new(0.5 * h, 0.0))
        - commutator(a1, a2).scale(Complex64::new(SQRT_3 / 12.0 * h * h, 0.0));
    Ok(expm2(&omega)? * y)
}

/// Two-stage Gauss-Legendre step. The ODE is linear, so the stage system is
/// a 4-by-4 linear solve rather than a fixed-point iteration.
pub fn step_gl4<G: Fn(f64) -> C2Matrix>(
    generator: &G,
    xi_k: f64,
    h: f64,
    y: C2Vector,
) -> Result<C2Vector> {
    let g1 = generator(xi_k + (0.5 - SQRT_3 / 6.0) * h);
    let g2 = generator(xi_k + (0.5 + SQRT_3 / 6.0) * h);
    // Butcher coefficients of the 2-stage Gauss-Legendre tableau.
    let a11 = 0.25;
    let a12 = 0.25 - SQRT_3 / 6.0;
    let a21 = 0.25 + SQRT_3 / 6.0;
    let a22 = 0.25;
    let zero = Complex64::ZERO;
    let h_c = Complex64::new(h, 0.0);
    // Unknowns ordered (s1.u, s1.v, s2.u, s2.v):
    //   s1 - h a11 G1 s1 - h a12 G1 s2 = G1 y
    //   s2 - h a21 G2 s1 - h a22 G2 s2 = G2 y
    let mut m = [[zero; 4]; 4];
    for (row, col, g, coeff) in [
        (0, 0, &g1, a11),
        (0, 2, &g1, a12),
        (2, 0, &g2, a21),
        (2, 2, &g2, a22),
    ] {
        let s = h_c * Complex64::new(coeff, 0.0);
        m[row][col] -= s * g.a11;
        m[row][col + 1] -= s * g.a12;
        m[row + 1][col] -= s * g.a21;
        m[row + 1][col + 1] -= s * g.a22;
    }
    for i in 0..4 {
        m[i][i] += Complex64::ONE;
    }
    let r1 = g1 * y;
    let r2 = g2 * y;
    let rhs = [r1.u, r1.v, r2.u, r2.v];
    let s = solve4(&m, &rhs)?;
    let sum = C2Vector::new(s[0] + s[2], s[1] + s[3]);
    Ok(y + sum.scale(Complex64::new(0.5 * h, 0.0)))
}

/// Dispatch a single step of the chosen method.
pub fn one_step<G: Fn(f64) -> C2Matrix>(
    method: MethodKind,
    generator: &G,
    xi_k: f64,
    h: f64,
    y: C2Vector,
) -> Result<C2Vector> {
    match method {
        MethodKind::Midpoint => step_midpoint(generator, xi_k, h, y),
        MethodKind::Magnus4 => step_magnus4(generator, xi_k, h, y),
        MethodKind::GaussLegendre4 => step_gl4(generator, xi_k, h, y),
    }
}

/// Shoot one side of the domain towards `xi = 0`.
///
/// Minus side: start at `xi = -L` with transformed value `(1, 0)` (raw:
/// `e^{mu_-^1 xi_0} (1, mu_-^1)`) and take `N` forward steps. Plus side:
/// start at `xi = +L` with `(0, 1)` (raw: `e^{mu_+^2 xi_0} (1, mu_+^2)`)
/// and take `N` backward steps.
pub fn propagate(
    model: &ReactionModel,
    frame: &SpectralFrame,
    grid: &GridSpec,
    method: MethodKind,
    side: Side,
    coordinates: Coordinates,
) -> Result<PropagationResult> {
    frame.require_admissible()?;
    let h = grid.step_size();
    let (xi_0, signed_h) = match side {
        Side::Minus => (-grid.half_length(), h),
        Side::Plus => (grid.half_length(), -h),
    };
    let y_0 = match coordinates {
        Coordinates::Transformed => match side {
            Side::Minus => C2Vector::from_re(1.0, 0.0),
            Side::Plus => C2Vector::from_re(0.0, 1.0),
        },
        Coordinates::Raw => {
            let mu = match side {
                Side::Minus => frame.mu_minus[0],
                Side::Plus => frame.mu_plus[1],
            };
            let factor = (mu * Complex64::new(xi_0, 0.0)).exp();
            let y = C2Vector::new(factor, mu * factor);
            // e^{mu xi_0} underflows once Re(kappa) L / 2 passes ~745; the
            // run would silently propagate zeros.
            if y.max_norm() == 0.0 {
                return Err(Error::RawOverflow { xi: xi_0 });
            }
            y
        }
    };
    let mut trajectory = Vec::with_capacity(grid.steps() + 1);
    trajectory.push(y_0);
    let mut y = y_0;
    for k in 0..grid.steps() {
        let xi_k = xi_0 + k as f64 * signed_h;
        y = match coordinates {
            Coordinates::Raw => {
                let gen = |xi: f64| raw_coefficient(model, frame.lambda, xi);
                one_step(method, &gen, xi_k, signed_h, y)
            }
            Coordinates::Transformed => {
                let gen = |xi: f64| transformed_coefficient(model, frame, side, xi);
                one_step(method, &gen, xi_k, signed_h, y)
            }
        }
        .map_err(|e| attach_context(e, xi_k, signed_h, frame.lambda, coordinates))?;
        if coordinates == Coordinates::Raw && y.max_norm() > RAW_OVERFLOW_LIMIT {
            return Err(Error::RawOverflow { xi: xi_k + signed_h });
        }
        trajectory.push(y);
    }
    Ok(PropagationResult {
        side,
        coordinates,
        trajectory,
    })
}

fn attach_context(e: Error, xi_k: f64, h: f64, lambda: Complex64, coordinates: Coordinates) -> Error {
    match e {
        Error::SingularSystem { .. } => Error::SingularStage { xi_k, h, lambda },
        Error::NonFiniteEntries if coordinates == Coordinates::Raw => Error::RawOverflow { xi: xi_k },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::build_frame;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    // Classical RK4 with many substeps; the fine-step reference for the
    // one-step maps.
    fn rk4_reference<G: Fn(f64) -> C2Matrix>(
        generator: &G,
        xi_0: f64,
        h: f64,
        y_0: C2Vector,
        substeps: usize,
    ) -> C2Vector {
        let dt = h / substeps as f64;
        let mut y = y_0;
        let mut t = xi_0;
        for _ in 0..substeps {
            let k1 = generator(t) * y;
            let k2 = generator(t + 0.5 * dt) * (y + k1.scale(c(0.5 * dt, 0.0)));
            let k3 = generator(t + 0.5 * dt) * (y + k2.scale(c(0.5 * dt, 0.0)));
            let k4 = generator(t + dt) * (y + k3.scale(c(dt, 0.0)));
            let incr = k1 + k2.scale(c(2.0, 0.0)) + k3.scale(c(2.0, 0.0)) + k4;
            y = y + incr.scale(c(dt / 6.0, 0.0));
            t += dt;
        }
        y
    }

    #[test]
    fn midpoint_exact_on_autonomous_generator() {
        let g = |_: f64| C2Matrix::diagonal(c(0.0, 0.0), c(-1.0, 0.0));
        let y = C2Vector::from_re(1.0, 1.0);
        let stepped = step_midpoint(&g, 0.0, 1.0, y).unwrap();
        assert!((stepped.u - c(1.0, 0.0)).norm() < 1e-15);
        assert!((stepped.v - c((-1.0f64).exp(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_generator_leaves_state() {
        let g = |_: f64| C2Matrix::zero();
        let y = C2Vector::new(c(0.3, -0.4), c(1.0, 2.0));
        for method in MethodKind::ALL {
            let stepped = one_step(method, &g, 0.3, 0.05, y).unwrap();
            assert!((stepped - y).max_norm() < 1e-15);
        }
    }

    #[test]
    fn midpoint_matches_fine_rk4_on_raw_system() {
        let m = ReactionModel::nagumo(0.3).unwrap();
        let g = |xi: f64| raw_coefficient(&m, c(1.0, 0.0), xi);
        let y = C2Vector::from_re(1.0, 1.0);
        let stepped = step_midpoint(&g, -1.0, 0.01, y).unwrap();
        let reference = rk4_reference(&g, -1.0, 0.01, y, 1000);
        assert!((stepped - reference).max_norm() < 1e-8);
    }

    #[test]
    fn magnus4_equals_midpoint_on_constant_generator() {
        let g = |_: f64| C2Matrix::new(c(0.1, 0.2), c(-0.4, 0.0), c(0.3, -0.3), c(-0.2, 0.1));
        let y = C2Vector::from_re(0.7, -0.2);
        let a = step_magnus4(&g, 0.5, 0.2, y).unwrap();
        let b = step_midpoint(&g, 0.5, 0.2, y).unwrap();
        assert!((a - b).max_norm() < 1e-14);
    }

    #[test]
    fn magnus4_matches_fine_rk4_on_transformed_system() {
        let m = ReactionModel::bump(0.0, 0.0, 1.0, 1.0).unwrap();
        let f = build_frame(&m, c(100.0, 0.0));
        let g = |xi: f64| transformed_coefficient(&m, &f, Side::Minus, xi);
        let y = C2Vector::from_re(1.0, 0.0);
        let defect = |h: f64, sub: usize| {
            let stepped = step_magnus4(&g, -2.0, h, y).unwrap();
            (stepped - rk4_reference(&g, -2.0, h, y, sub)).max_norm()
        };
        // Fifth-order one-step defect: the oracle pins both the absolute
        // size at small h and the decay rate from h = 0.1.
        assert!(defect(0.025, 4000) < 1e-9);
        let ratio = defect(0.1, 8000) / defect(0.025, 4000);
        assert!(ratio > 300.0, "expected ~(0.1/0.025)^5 decay, got {ratio}");
    }

    #[test]
    fn gl4_zero_step_is_identity() {
        let g = |_: f64| C2Matrix::diagonal(c(1.0, 0.0), c(0.0, 0.0));
        let y = C2Vector::from_re(1.0, 0.0);
        let stepped = step_gl4(&g, 0.0, 0.0, y).unwrap();
        assert_eq!(stepped, y);
    }

    #[test]
    fn gl4_order_against_constant_exponential() {
        // One gl4 step vs expm2 on a constant generator: the defect is
        // O(h^5), so halving h divides it by about 32.
        let g_mat = C2Matrix::new(c(0.4, 0.1), c(0.9, -0.2), c(-0.6, 0.3), c(-0.1, -0.4));
        let g = |_: f64| g_mat;
        let y = C2Vector::from_re(1.0, -1.0);
        let defect = |h: f64| {
            let stepped = step_gl4(&g, 0.0, h, y).unwrap();
            let exact = expm2(&g_mat.scale(c(h, 0.0))).unwrap() * y;
            (stepped - exact).max_norm()
        };
        let d1 = defect(0.2);
        let d2 = defect(0.1);
        let ratio = d1 / d2;
        assert!(
            (16.0..64.0).contains(&ratio),
            "expected ~32x per halving, got {ratio}"
        );
    }

    #[test]
    fn gl4_matches_fine_rk4() {
        let m = ReactionModel::nagumo(0.3).unwrap();
        let g = |xi: f64| raw_coefficient(&m, c(1.0, 0.0), xi);
        let y = C2Vector::from_re(1.0, 1.0);
        let stepped = step_gl4(&g, -1.0, 0.01, y).unwrap();
        let reference = rk4_reference(&g, -1.0, 0.01, y, 1000);
        assert!((stepped - reference).max_norm() < 1e-8);
    }

    #[test]
    fn step_maps_are_linear() {
        let m = ReactionModel::nagumo(0.3).unwrap();
        let f = build_frame(&m, c(4.0, 1.0));
        let g = |xi: f64| transformed_coefficient(&m, &f, Side::Minus, xi);
        let y1 = C2Vector::new(c(0.4, -0.1), c(0.2, 0.9));
        let y2 = C2Vector::new(c(-1.1, 0.3), c(0.5, -0.7));
        for method in MethodKind::ALL {
            let sum = one_step(method, &g, -0.4, 0.07, y1 + y2).unwrap();
            let split = one_step(method, &g, -0.4, 0.07, y1).unwrap()
                + one_step(method, &g, -0.4, 0.07, y2).unwrap();
            assert!((sum - split).max_norm() < 1e-13);
        }
    }

    #[test]
    fn midpoint_backward_step_inverts_forward() {
        // Stepping from xi_k with +h and then from xi_k + h with -h hits the
        // same midpoint matrix, so the exponentials cancel exactly.
        let m = ReactionModel::nagumo(0.3).unwrap();
        let f = build_frame(&m, c(3.0, 0.5));
        let g = |xi: f64| transformed_coefficient(&m, &f, Side::Minus, xi);
        let y = C2Vector::new(c(0.9, 0.1), c(-0.3, 0.2));
        let fwd = step_midpoint(&g, 0.2, 0.05, y).unwrap();
        let back = step_midpoint(&g, 0.25, -0.05, fwd).unwrap();
        assert!((back - y).max_norm() < 1e-12);
    }

    #[test]
    fn propagate_constant_model_transformed_fixed_points() {
        let m = ReactionModel::constant(0.0, 0.0);
        let f = build_frame(&m, c(4.0, 0.0));
        let grid = GridSpec::new(10.0, 100).unwrap();
        for method in [MethodKind::Midpoint, MethodKind::Magnus4] {
            let minus =
                propagate(&m, &f, &grid, method, Side::Minus, Coordinates::Transformed).unwrap();
            assert!((minus.final_value() - C2Vector::from_re(1.0, 0.0)).max_norm() < 1e-12);
            let plus =
                propagate(&m, &f, &grid, method, Side::Plus, Coordinates::Transformed).unwrap();
            assert!((plus.final_value() - C2Vector::from_re(0.0, 1.0)).max_norm() < 1e-12);
        }
    }

    #[test]
    fn propagate_self_convergence_magnus() {
        let m = ReactionModel::nagumo(0.3).unwrap();
        let f = build_frame(&m, c(1.0, 0.0));
        let coarse = propagate(
            &m,
            &f,
            &GridSpec::new(25.0, 2500).unwrap(),
            MethodKind::Magnus4,
            Side::Minus,
            Coordinates::Transformed,
        )
        .unwrap();
        let fine = propagate(
            &m,
            &f,
            &GridSpec::new(25.0, 5000).unwrap(),
            MethodKind::Magnus4,
            Side::Minus,
            Coordinates::Transformed,
        )
        .unwrap();
        assert!((coarse.final_value() - fine.final_value()).max_norm() <= 1e-9);
    }

    #[test]
    fn propagate_trajectory_shape() {
        let m = ReactionModel::nagumo(0.3).unwrap();
        let f = build_frame(&m, c(1.0, 0.0));
        let grid = GridSpec::new(5.0, 50).unwrap();
        let r = propagate(
            &m,
            &f,
            &grid,
            MethodKind::Midpoint,
            Side::Plus,
            Coordinates::Transformed,
        )
        .unwrap();
        assert_eq!(r.trajectory.len(), 51);
        assert_eq!(r.trajectory[0], C2Vector::from_re(0.0, 1.0));
    }

    #[test]
    fn propagate_raw_range_guard() {
        // Re(kappa) L / 2 far past the exponent range: the raw starting
        // value is not representable and the run must refuse.
        let m = ReactionModel::constant(0.0, 0.0);
        let f = build_frame(&m, c(1e8, 0.0));
        let grid = GridSpec::new(10.0, 50).unwrap();
        for side in [Side::Minus, Side::Plus] {
            let err =
                propagate(&m, &f, &grid, MethodKind::Midpoint, side, Coordinates::Raw).unwrap_err();
            assert!(matches!(err, Error::RawOverflow { .. }));
        }
    }

    #[test]
    fn grid_invariants() {
        assert!(GridSpec::new(0.0, 10).is_err());
        assert!(GridSpec::new(10.0, 0).is_err());
        let g = GridSpec::new(25.0, 250).unwrap();
        assert_eq!(g.step_size(), 0.1);
        let (o1, o2) = g.gauss_offsets();
        assert!((o1 - (0.5 - SQRT_3 / 6.0) * 0.1).abs() < 1e-15);
        assert!((o2 - (0.5 + SQRT_3 / 6.0) * 0.1).abs() < 1e-15);
    }
}
