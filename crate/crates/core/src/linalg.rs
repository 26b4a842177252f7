//! Thin wrappers over `faer` eigensolvers plus a few scalar helpers.

use faer::{Mat, Side};
use num_complex::Complex64;

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &Mat<Complex64>) -> (Vec<f64>, Mat<Complex64>) {
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .expect("self-adjoint eigendecomposition does not fail on finite input");
    let s = evd.S().column_vector();
    let values = (0..m.nrows()).map(|i| s[i].re).collect();
    (values, evd.U().to_owned())
}

/// Eigen-decomposition of a real symmetric matrix, eigenvalues ascending.
pub fn symmetric_eigen(m: &Mat<f64>) -> (Vec<f64>, Mat<f64>) {
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .expect("self-adjoint eigendecomposition does not fail on finite input");
    let s = evd.S().column_vector();
    let values = (0..m.nrows()).map(|i| s[i]).collect();
    (values, evd.U().to_owned())
}

pub fn symmetric_eigenvalues(m: &Mat<f64>) -> Vec<f64> {
    m.self_adjoint_eigenvalues(Side::Lower)
        .expect("self-adjoint eigenvalues do not fail on finite input")
}

pub fn hermitian_eigenvalues(m: &Mat<Complex64>) -> Vec<f64> {
    m.self_adjoint_eigenvalues(Side::Lower)
        .expect("self-adjoint eigenvalues do not fail on finite input")
}

/// Largest eigenvalue of a real symmetric matrix.
pub fn lambda_max(m: &Mat<f64>) -> f64 {
    symmetric_eigenvalues(m)
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `base^exp` for large integer exponents.
///
/// Small exponents use repeated multiplication; above 64 the power goes
/// through `exp(exp * ln|base|)` with the sign restored from the parity.
pub fn signed_pow(base: f64, exp: u64) -> f64 {
    if exp == 0 {
        return 1.0;
    }
    if exp < 64 {
        return base.powi(exp as i32);
    }
    if base == 0.0 {
        return 0.0;
    }
    let magnitude = (exp as f64 * base.abs().ln()).exp();
    if base < 0.0 && exp % 2 == 1 {
        -magnitude
    } else {
        magnitude
    }
}

/// `c * m` entry-wise.
pub fn scaled(m: &Mat<Complex64>, c: Complex64) -> Mat<Complex64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * c)
}

/// Integer power of a complex number by binary exponentiation.
pub fn complex_pow(base: Complex64, exp: u64) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    let mut b = base;
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc *= b;
        }
        b *= b;
        e >>= 1;
    }
    acc
}

/// Closed-form eigenproblem of the symmetric 2x2 matrix `[[a, b], [b, c]]`.
///
/// Returns `(lambda_min, lambda_max, angle)` where `angle` in `[-pi/2, pi/2)`
/// minimizes `cos^2 a - 2 sin cos b + sin^2 c`, i.e. the variance of
/// `cos(angle) P - sin(angle) Q` for covariance entries `a = Var P`,
/// `c = Var Q`, `b = Cov(P, Q)`. The flag reports an isotropic matrix, in
/// which case the angle is 0.
pub fn min_quadrature(a: f64, b: f64, c: f64, isotropy: f64) -> (f64, f64, f64, bool) {
    let mean = 0.5 * (a + c);
    let half_diff = 0.5 * (a - c);
    let radius = half_diff.hypot(b);
    let lmin = mean - radius;
    let lmax = mean + radius;
    if radius <= isotropy * mean.abs().max(1.0) {
        return (lmin, lmax, 0.0, true);
    }
    // f(angle) = mean + half_diff cos(2 angle) - b sin(2 angle)
    let mut angle = 0.5 * (b).atan2(-half_diff);
    if angle >= std::f64::consts::FRAC_PI_2 {
        angle -= std::f64::consts::PI;
    }
    (lmin, lmax, angle, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn signed_pow_matches_powi() {
        for &b in &[0.3f64, -0.7, 0.999, -0.9999] {
            for &e in &[0u64, 1, 2, 63, 64, 65, 200, 1001] {
                let want = b.powi(e as i32);
                let got = signed_pow(b, e);
                assert!((got - want).abs() <= 1e-12 * want.abs().max(1e-300), "{b}^{e}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn min_quadrature_agrees_with_grid() {
        let (a, b, c) = (2.0, 0.7, 0.5);
        let (lmin, _, angle, degenerate) = min_quadrature(a, b, c, 1e-12);
        assert!(!degenerate);
        let f = |t: f64| t.cos().powi(2) * a - 2.0 * t.sin() * t.cos() * b + t.sin().powi(2) * c;
        let best = (0..100_000)
            .map(|k| -PI / 2.0 + PI * k as f64 / 100_000.0)
            .fold((f64::INFINITY, 0.0), |acc, t| if f(t) < acc.0 { (f(t), t) } else { acc });
        assert!((f(angle) - lmin).abs() < 1e-12);
        assert!((best.0 - lmin).abs() < 1e-8);
        assert!((best.1 - angle).abs() < 1e-4);
    }

    #[test]
    fn complex_pow_matches_powc() {
        let z = Complex64::new(0.6, -0.7);
        let want = z.powf(13.0);
        assert!((complex_pow(z, 13) - want).norm() < 1e-12);
    }
}
