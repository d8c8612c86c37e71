//! Polynomial arithmetic on coefficient vectors in ascending powers of the
//! unit delay q^-1.

use num_complex::Complex64;

/// Coefficients with absolute value below this are trimmed after arithmetic
/// so repeated interconnections do not inflate polynomial degrees.
pub(crate) const COEFF_TRIM: f64 = 1e-12;

pub(crate) fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return vec![0.0];
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

pub(crate) fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, &ai) in a.iter().enumerate() {
        out[i] += ai;
    }
    for (i, &bi) in b.iter().enumerate() {
        out[i] += bi;
    }
    out
}

pub(crate) fn scale(a: &[f64], k: f64) -> Vec<f64> {
    a.iter().map(|&c| c * k).collect()
}

/// Drop trailing coefficients below `COEFF_TRIM` in absolute value,
/// keeping at least one coefficient.
pub(crate) fn trim_trailing(mut v: Vec<f64>) -> Vec<f64> {
    while v.len() > 1 && v.last().map_or(false, |c| c.abs() < COEFF_TRIM) {
        v.pop();
    }
    if v.is_empty() {
        v.push(0.0);
    }
    v
}

/// Evaluate the polynomial at a complex unit-delay argument `w` (Horner).
pub(crate) fn eval(coeffs: &[f64], w: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * w + c;
    }
    acc
}

pub(crate) fn max_abs(coeffs: &[f64]) -> f64 {
    coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mul_expands_products() {
        // (1 + 2q^-1)(1 + 3q^-1) = 1 + 5q^-1 + 6q^-2
        assert_eq!(mul(&[1.0, 2.0], &[1.0, 3.0]), vec![1.0, 5.0, 6.0]);
    }

    #[test]
    fn add_pads_shorter_operand() {
        assert_eq!(add(&[1.0], &[1.0, 3.0]), vec![2.0, 3.0]);
    }

    #[test]
    fn trim_keeps_one_coefficient() {
        assert_eq!(trim_trailing(vec![0.0, 1e-15]), vec![0.0]);
        assert_eq!(trim_trailing(vec![1.0, 2.0, 1e-13]), vec![1.0, 2.0]);
    }

    #[test]
    fn eval_at_one_sums_coefficients() {
        let v = eval(&[1.0, 2.0, 3.0], Complex64::new(1.0, 0.0));
        assert!((v.re - 6.0).abs() < 1e-14 && v.im.abs() < 1e-14);
    }
}
