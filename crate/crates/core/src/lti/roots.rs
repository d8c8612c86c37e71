//! Root finding for delay polynomials via companion-matrix eigenvalues.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Roots (in the z plane) of a polynomial given in ascending powers of q^-1.
///
/// A coefficient vector `[c0, c1, ..., cm]` denotes c0 + c1 q^-1 + ... + cm q^-m,
/// which in z reads z^-m (c0 z^m + c1 z^(m-1) + ... + cm). Leading zero
/// coefficients are pure delay factors and contribute no finite roots.
///
/// Companion eigenvalues are Newton-polished against the original polynomial:
/// eigenvalue scatter on clustered roots of composed polynomials is large
/// enough to flip unit-circle classifications otherwise.
pub(crate) fn delay_poly_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let first = coeffs.iter().position(|c| *c != 0.0);
    let coeffs = match first {
        Some(i) => &coeffs[i..],
        None => return Vec::new(),
    };
    let m = coeffs.len() - 1;
    if m == 0 {
        return Vec::new();
    }
    let c0 = coeffs[0];
    // Row companion matrix of the monic polynomial z^m + d1 z^(m-1) + ... + dm.
    let companion = DMatrix::from_fn(m, m, |i, j| {
        if i == 0 {
            -coeffs[j + 1] / c0
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    companion
        .complex_eigenvalues()
        .iter()
        .map(|&r| polish_root(coeffs, r))
        .collect()
}

/// Horner evaluation of the descending-power polynomial and its derivative.
fn eval_with_derivative(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(coeffs[0], 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in &coeffs[1..] {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn polish_root(coeffs: &[f64], start: Complex64) -> Complex64 {
    let mut z = start;
    let (mut best, mut best_val) = (start, eval_with_derivative(coeffs, start).0.norm());
    for _ in 0..30 {
        let (p, dp) = eval_with_derivative(coeffs, z);
        if p.norm() < best_val {
            best = z;
            best_val = p.norm();
        }
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        z -= step;
        if step.norm() <= 1e-14 * z.norm().max(1.0) {
            break;
        }
    }
    let final_val = eval_with_derivative(coeffs, z).0.norm();
    if final_val <= best_val {
        z
    } else {
        best
    }
}

/// Largest root magnitude, or 0 when the polynomial has no finite roots.
pub(crate) fn max_root_magnitude(coeffs: &[f64]) -> f64 {
    delay_poly_roots(coeffs)
        .iter()
        .fold(0.0, |m, r| m.max(r.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_order_root() {
        // 1 - 0.5 q^-1 has a single root at z = 0.5.
        let roots = delay_poly_roots(&[1.0, -0.5]);
        assert_eq!(roots.len(), 1);
        assert!((roots[0].re - 0.5).abs() < 1e-12);
        assert!(roots[0].im.abs() < 1e-12);
    }

    #[test]
    fn quadratic_complex_pair() {
        // Poles at 0.9 e^(+-j pi/4): 1 - 2*0.9cos(pi/4) q^-1 + 0.81 q^-2.
        let c = 2.0 * 0.9 * (std::f64::consts::FRAC_PI_4).cos();
        let roots = delay_poly_roots(&[1.0, -c, 0.81]);
        assert_eq!(roots.len(), 2);
        for r in roots {
            assert!((r.norm() - 0.9).abs() < 1e-10);
        }
    }

    #[test]
    fn leading_delay_ignored() {
        // q^-1 (1 - 0.5 q^-1): the pure delay adds no finite root.
        let roots = delay_poly_roots(&[0.0, 1.0, -0.5]);
        assert_eq!(roots.len(), 1);
        assert!((roots[0].re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn constant_has_no_roots() {
        assert!(delay_poly_roots(&[3.0]).is_empty());
        assert!(delay_poly_roots(&[0.0]).is_empty());
    }
}
