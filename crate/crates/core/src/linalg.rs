//! Complex 2-vectors, 2-by-2 matrices, the wedge product, a closed-form
//! 2-by-2 matrix exponential that stays robust near eigenvalue coalescence,
//! and a pivoted 4-by-4 complex solve for implicit stage systems.

use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::Error;
use crate::Result;

/// Relative eigenvalue gap below which `expm2` switches from the
/// eigen-decomposition form to scaling-and-squaring of a truncated series.
pub const DEGENERACY_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct C2Vector {
    pub u: Complex64,
    pub v: Complex64,
}

impl C2Vector {
    pub const fn new(u: Complex64, v: Complex64) -> Self {
        Self { u, v }
    }

    pub fn zero() -> Self {
        Self::new(Complex64::ZERO, Complex64::ZERO)
    }

    pub fn from_re(u: f64, v: f64) -> Self {
        Self::new(Complex64::new(u, 0.0), Complex64::new(v, 0.0))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.u * s, self.v * s)
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite()
    }

    /// Largest component modulus.
    pub fn max_norm(&self) -> f64 {
        let a = self.u.norm();
        let b = self.v.norm();
        if a > b {
            a
        } else {
            b
        }
    }
}

impl Add for C2Vector {
    type Output = C2Vector;
    fn add(self, rhs: C2Vector) -> C2Vector {
        C2Vector::new(self.u + rhs.u, self.v + rhs.v)
    }
}

impl Sub for C2Vector {
    type Output = C2Vector;
    fn sub(self, rhs: C2Vector) -> C2Vector {
        C2Vector::new(self.u - rhs.u, self.v - rhs.v)
    }
}

impl Neg for C2Vector {
    type Output = C2Vector;
    fn neg(self) -> C2Vector {
        C2Vector::new(-self.u, -self.v)
    }
}

/// Row-major complex 2-by-2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct C2Matrix {
    pub a11: Complex64,
    pub a12: Complex64,
    pub a21: Complex64,
    pub a22: Complex64,
}

impl C2Matrix {
    pub const fn new(a11: Complex64, a12: Complex64, a21: Complex64, a22: Complex64) -> Self {
        Self { a11, a12, a21, a22 }
    }

    pub fn zero() -> Self {
        Self::new(
            Complex64::ZERO,
            Complex64::ZERO,
            Complex64::ZERO,
            Complex64::ZERO,
        )
    }

    pub fn identity() -> Self {
        Self::diagonal(Complex64::ONE, Complex64::ONE)
    }

    pub fn diagonal(d1: Complex64, d2: Complex64) -> Self {
        Self::new(d1, Complex64::ZERO, Complex64::ZERO, d2)
    }

    pub fn from_re(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Self::new(
            Complex64::new(a11, 0.0),
            Complex64::new(a12, 0.0),
            Complex64::new(a21, 0.0),
            Complex64::new(a22, 0.0),
        )
    }

    pub fn trace(&self) -> Complex64 {
        self.a11 + self.a22
    }

    pub fn det(&self) -> Complex64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.a11 * s, self.a12 * s, self.a21 * s, self.a22 * s)
    }

    pub fn is_finite(&self) -> bool {
        self.a11.is_finite() && self.a12.is_finite() && self.a21.is_finite() && self.a22.is_finite()
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        let mut m = self.a11.norm();
        for e in [self.a12, self.a21, self.a22] {
            let n = e.norm();
            if n > m {
                m = n;
            }
        }
        m
    }

    pub fn inverse(&self) -> Result<C2Matrix> {
        let d = self.det();
        if d.norm() <= 1e-14 * self.max_norm() * self.max_norm() {
            return Err(Error::SingularSystem { pivot: d.norm() });
        }
        Ok(C2Matrix::new(self.a22 / d, -self.a12 / d, -self.a21 / d, self.a11 / d))
    }
}

impl Add for C2Matrix {
    type Output = C2Matrix;
    fn add(self, rhs: C2Matrix) -> C2Matrix {
        C2Matrix::new(
            self.a11 + rhs.a11,
            self.a12 + rhs.a12,
            self.a21 + rhs.a21,
            self.a22 + rhs.a22,
        )
    }
}

impl Sub for C2Matrix {
    type Output = C2Matrix;
    fn sub(self, rhs: C2Matrix) -> C2Matrix {
        C2Matrix::new(
            self.a11 - rhs.a11,
            self.a12 - rhs.a12,
            self.a21 - rhs.a21,
            self.a22 - rhs.a22,
        )
    }
}

impl Mul for C2Matrix {
    type Output = C2Matrix;
    fn mul(self, rhs: C2Matrix) -> C2Matrix {
        C2Matrix::new(
            self.a11 * rhs.a11 + self.a12 * rhs.a21,
            self.a11 * rhs.a12 + self.a12 * rhs.a22,
            self.a21 * rhs.a11 + self.a22 * rhs.a21,
            self.a21 * rhs.a12 + self.a22 * rhs.a22,
        )
    }
}

impl Mul<C2Vector> for C2Matrix {
    type Output = C2Vector;
    fn mul(self, rhs: C2Vector) -> C2Vector {
        C2Vector::new(
            self.a11 * rhs.u + self.a12 * rhs.v,
            self.a21 * rhs.u + self.a22 * rhs.v,
        )
    }
}

/// Matrix commutator `[x, y] = xy - yx`.
pub fn commutator(x: C2Matrix, y: C2Matrix) -> C2Matrix {
    x * y - y * x
}

/// Wedge product of two 2-vectors, `a.u b.v - a.v b.u`; equals the
/// determinant of the 2-by-2 matrix with `a` and `b` as columns.
pub fn wedge(a: C2Vector, b: C2Vector) -> Complex64 {
    a.u * b.v - a.v * b.u
}

/// Eigen-decomposition of a 2-by-2 matrix in unit-first-row form: the
/// eigenvector matrix has columns `(1, v1)` and `(1, v2)`.
#[derive(Debug, Clone, Copy)]
pub struct Eigen2 {
    pub lambda1: Complex64,
    pub lambda2: Complex64,
    /// Columns are the eigenvectors, first row is (1, 1).
    pub vectors: C2Matrix,
    /// `(a11 - a22)^2 + 4 a12 a21`; its square root separates the eigenvalues.
    pub discriminant: Complex64,
}

fn eigenvalues(m: &C2Matrix) -> (Complex64, Complex64, Complex64) {
    let disc = (m.a11 - m.a22) * (m.a11 - m.a22) + 4.0 * m.a12 * m.a21;
    let root = disc.sqrt();
    let half_tr = 0.5 * m.trace();
    (half_tr + 0.5 * root, half_tr - 0.5 * root, disc)
}

/// Unit-first-row eigen-decomposition. Fails when an eigenvector has a
/// vanishing first component (e.g. diagonal matrices), which this
/// normalization cannot represent.
pub fn eigen2(m: &C2Matrix) -> Result<Eigen2> {
    if !m.is_finite() {
        return Err(Error::NonFiniteEntries);
    }
    let (l1, l2, disc) = eigenvalues(m);
    let tiny = 1e-14 * m.max_norm();
    let (v1, v2) = if m.a12.norm() > tiny {
        ((l1 - m.a11) / m.a12, (l2 - m.a11) / m.a12)
    } else if m.a21.norm() > tiny {
        // second row: a21 + (a22 - l) v = 0
        if (l1 - m.a22).norm() <= tiny || (l2 - m.a22).norm() <= tiny {
            return Err(Error::DegenerateEigenvectors);
        }
        (m.a21 / (l1 - m.a22), m.a21 / (l2 - m.a22))
    } else {
        return Err(Error::DegenerateEigenvectors);
    };
    Ok(Eigen2 {
        lambda1: l1,
        lambda2: l2,
        vectors: C2Matrix::new(Complex64::ONE, Complex64::ONE, v1, v2),
        discriminant: disc,
    })
}

/// Matrix exponential of a 2-by-2 complex matrix.
///
/// Uses the eigen-decomposition closed form when the eigenvalue gap exceeds
/// [`DEGENERACY_THRESHOLD`] relative to the max-entry norm, and
/// scaling-and-squaring of a degree-12 Taylor series otherwise.
pub fn expm2(m: &C2Matrix) -> Result<C2Matrix> {
    if !m.is_finite() {
        return Err(Error::NonFiniteEntries);
    }
    let norm = m.max_norm();
    if norm == 0.0 {
        return Ok(C2Matrix::identity());
    }
    let (l1, l2, _) = eigenvalues(m);
    let gap = l1 - l2;
    let result = if gap.norm() > DEGENERACY_THRESHOLD * norm {
        // exp(M) = e^{l1} (M - l2 I)/(l1 - l2) + e^{l2} (M - l1 I)/(l2 - l1),
        // the closed form of V diag(e^{l1}, e^{l2}) V^{-1}.
        let id = C2Matrix::identity();
        let p1 = (*m - id.scale(l2)).scale(l1.exp() / gap);
        let p2 = (*m - id.scale(l1)).scale(l2.exp() / -gap);
        p1 + p2
    } else {
        expm2_series(m, norm)?
    };
    if !result.is_finite() {
        return Err(Error::NonFiniteEntries);
    }
    Ok(result)
}

fn expm2_series(m: &C2Matrix, norm: f64) -> Result<C2Matrix> {
    // Scale so the max-entry norm is at most 0.25, run the degree-12
    // series, square back.
    let squarings = if norm > 0.25 {
        libm::ceil(libm::log2(norm / 0.25)) as u32
    } else {
        0
    };
    let scaled = m.scale(Complex64::new(libm::exp2(-(squarings as f64)), 0.0));
    let mut term = C2Matrix::identity();
    let mut sum = C2Matrix::identity();
    for k in 1..=12u32 {
        term = (term * scaled).scale(Complex64::new(1.0 / k as f64, 0.0));
        sum = sum + term;
    }
    if term.max_norm() > 1e-11 * sum.max_norm() {
        return Err(Error::ExpSeriesDiverged);
    }
    let mut result = sum;
    for _ in 0..squarings {
        result = result * result;
    }
    Ok(result)
}

/// Solve a 4-by-4 complex linear system by Gaussian elimination with
/// partial pivoting. Used for the Gauss-Legendre stage equations.
pub fn solve4(a: &[[Complex64; 4]; 4], b: &[Complex64; 4]) -> Result<[Complex64; 4]> {
    let mut m = *a;
    let mut rhs = *b;
    let mut scale = 0.0f64;
    for row in &m {
        for e in row {
            let n = e.norm();
            if n > scale {
                scale = n;
            }
        }
    }
    let threshold = 1e-14 * scale;
    for col in 0..4 {
        let mut pivot_row = col;
        let mut pivot_mag = m[col][col].norm();
        for r in col + 1..4 {
            let mag = m[r][col].norm();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = r;
            }
        }
        if pivot_mag <= threshold {
            return Err(Error::SingularSystem { pivot: pivot_mag });
        }
        if pivot_row != col {
            m.swap(col, pivot_row);
            rhs.swap(col, pivot_row);
        }
        let pivot = m[col][col];
        for r in col + 1..4 {
            let factor = m[r][col] / pivot;
            if factor == Complex64::ZERO {
                continue;
            }
            for c in col..4 {
                let sub = factor * m[col][c];
                m[r][c] -= sub;
            }
            rhs[r] -= factor * rhs[col];
        }
    }
    let mut x = [Complex64::ZERO; 4];
    for col in (0..4).rev() {
        let mut acc = rhs[col];
        for c in col + 1..4 {
            acc -= m[col][c] * x[c];
        }
        x[col] = acc / m[col][col];
    }
    Ok(x)
}
