//! Closed-form linear algebra for symmetric 2x2 matrices.
//!
//! Everything here is exact in the sense that eigendecompositions, matrix
//! exponentials and logarithms are evaluated through the closed-form 2x2
//! eigensolve rather than iterative methods.

use std::f64::consts::FRAC_PI_2;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

/// Absolute tolerance used downstream when deciding whether two eigenvalues tie.
pub const EIGEN_TIE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum Sym2Error {
    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue})")]
    NotPositiveDefinite { min_eigenvalue: f64 },
}

/// A symmetric 2x2 real matrix `[[a11, a12], [a12, a22]]`.
///
/// Symmetry is structural: the off-diagonal entry is stored once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sym2 {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
}

impl Sym2 {
    pub const ZERO: Sym2 = Sym2 {
        a11: 0.0,
        a12: 0.0,
        a22: 0.0,
    };

    pub fn new(a11: f64, a12: f64, a22: f64) -> Self {
        Sym2 { a11, a12, a22 }
    }

    pub fn diag(a: f64, b: f64) -> Self {
        Sym2::new(a, 0.0, b)
    }

    pub fn identity() -> Self {
        Sym2::diag(1.0, 1.0)
    }

    pub fn scaled_identity(c: f64) -> Self {
        Sym2::diag(c, c)
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a12
    }

    pub fn frobenius_norm(&self) -> f64 {
        (self.a11 * self.a11 + 2.0 * self.a12 * self.a12 + self.a22 * self.a22).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.a11.is_finite() && self.a12.is_finite() && self.a22.is_finite()
    }

    /// Eigenvalues as `(lambda, mu)` with `lambda >= mu`.
    pub fn eigenvalues(&self) -> (f64, f64) {
        if self.a12 == 0.0 {
            // Diagonal case kept bit-exact: mean +- radius would round the
            // entries themselves.
            return if self.a11 >= self.a22 {
                (self.a11, self.a22)
            } else {
                (self.a22, self.a11)
            };
        }
        let mean = 0.5 * (self.a11 + self.a22);
        let r = (0.5 * (self.a11 - self.a22)).hypot(self.a12);
        (mean + r, mean - r)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().1
    }

    /// Largest absolute entry difference to `other`.
    pub fn max_entry_distance(&self, other: &Sym2) -> f64 {
        (self.a11 - other.a11)
            .abs()
            .max((self.a12 - other.a12).abs())
            .max((self.a22 - other.a22).abs())
    }

    /// Matrix product with another symmetric matrix; the result is only
    /// symmetric when the factors commute, so the full 2x2 product is
    /// returned row-major.
    pub fn product(&self, other: &Sym2) -> [f64; 4] {
        [
            self.a11 * other.a11 + self.a12 * other.a12,
            self.a11 * other.a12 + self.a12 * other.a22,
            self.a12 * other.a11 + self.a22 * other.a12,
            self.a12 * other.a12 + self.a22 * other.a22,
        ]
    }
}

impl Add for Sym2 {
    type Output = Sym2;
    fn add(self, rhs: Sym2) -> Sym2 {
        Sym2::new(self.a11 + rhs.a11, self.a12 + rhs.a12, self.a22 + rhs.a22)
    }
}

impl Sub for Sym2 {
    type Output = Sym2;
    fn sub(self, rhs: Sym2) -> Sym2 {
        Sym2::new(self.a11 - rhs.a11, self.a12 - rhs.a12, self.a22 - rhs.a22)
    }
}

impl Neg for Sym2 {
    type Output = Sym2;
    fn neg(self) -> Sym2 {
        Sym2::new(-self.a11, -self.a12, -self.a22)
    }
}

impl Mul<Sym2> for f64 {
    type Output = Sym2;
    fn mul(self, rhs: Sym2) -> Sym2 {
        Sym2::new(self * rhs.a11, self * rhs.a12, self * rhs.a22)
    }
}

/// Eigenpair representation of a [`Sym2`]: eigenvalues `lambda >= mu` and the
/// rotation angle `phi` of the eigenvector belonging to `lambda`.
///
/// The eigenvectors are `u = (cos phi, sin phi)` and `v = (-sin phi, cos phi)`,
/// orthonormal by construction, with `phi` in `[-pi/2, pi/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralDecomp {
    pub lambda: f64,
    pub mu: f64,
    pub phi: f64,
}

impl SpectralDecomp {
    pub fn new(lambda: f64, mu: f64, phi: f64) -> Self {
        SpectralDecomp { lambda, mu, phi }
    }
}

/// Closed-form eigendecomposition of a symmetric 2x2 matrix.
///
/// Uses the half-angle form `phi = atan2(2 a12, a11 - a22) / 2`, which is
/// well conditioned near isotropy and yields `phi = 0` for isotropic input.
pub fn eigendecompose(m: Sym2) -> SpectralDecomp {
    let (lambda, mu) = m.eigenvalues();
    let phi = 0.5 * (2.0 * m.a12).atan2(m.a11 - m.a22);
    SpectralDecomp::new(lambda, mu, phi)
}

/// Rebuilds `lambda * u u^T + mu * v v^T` from a spectral decomposition.
pub fn compose(d: SpectralDecomp) -> Sym2 {
    // sin_cos at exactly +-pi/2 leaves a ~6e-17 residue in the cosine, which
    // would break bit-exact reconstruction of diagonal matrices whose large
    // eigenvalue sits on the second axis.
    let (s, c) = if d.phi == FRAC_PI_2 {
        (1.0, 0.0)
    } else if d.phi == -FRAC_PI_2 {
        (-1.0, 0.0)
    } else {
        d.phi.sin_cos()
    };
    Sym2::new(
        d.lambda * c * c + d.mu * s * s,
        (d.lambda - d.mu) * c * s,
        d.lambda * s * s + d.mu * c * c,
    )
}

/// Matrix exponential of `t * m`, computed in the eigenbasis of `m`.
///
/// The result is symmetric positive definite. For large `t * lambda` the
/// entries overflow to infinity; callers needing large scales must pre-shift
/// the spectrum (see the suprema module).
pub fn exp_scaled(m: Sym2, t: f64) -> Sym2 {
    let d = eigendecompose(m);
    compose(SpectralDecomp::new((t * d.lambda).exp(), (t * d.mu).exp(), d.phi))
}

/// Matrix logarithm of a symmetric positive definite matrix.
pub fn log_spd(m: Sym2) -> Result<Sym2, Sym2Error> {
    let d = eigendecompose(m);
    if d.mu <= 1e-300 {
        return Err(Sym2Error::NotPositiveDefinite {
            min_eigenvalue: d.mu,
        });
    }
    Ok(compose(SpectralDecomp::new(d.lambda.ln(), d.mu.ln(), d.phi)))
}

/// Loewner comparison: true iff `b - a` is positive semidefinite up to `tol`,
/// i.e. the smaller eigenvalue of the difference is at least `-tol`.
pub fn loewner_leq(a: Sym2, b: Sym2, tol: f64) -> bool {
    (b - a).min_eigenvalue() >= -tol
}

/// Integer matrix power via the eigendecomposition.
pub fn int_power(m: Sym2, p: u32) -> Sym2 {
    let d = eigendecompose(m);
    compose(SpectralDecomp::new(
        d.lambda.powi(p as i32),
        d.mu.powi(p as i32),
        d.phi,
    ))
}

/// Angle `phi + pi/2` of the eigenvector belonging to the smaller eigenvalue.
pub fn perpendicular(phi: f64) -> f64 {
    phi + FRAC_PI_2
}
