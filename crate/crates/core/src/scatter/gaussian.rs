use std::f64::consts::PI;

use crate::error::{invalid, Result};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Normalized Gaussian density with standard deviation `beta`.
pub fn gaussian(beta: f64, x: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(invalid(format!("gaussian width must be positive, got {beta}")));
    }
    Ok(g(beta, x))
}

#[inline]
pub(crate) fn g(beta: f64, x: f64) -> f64 {
    INV_SQRT_2PI / beta * (-x * x / (2.0 * beta * beta)).exp()
}

/// Width of a Gaussian whose variance grows by `extra_var`. Returns `beta`
/// unchanged when nothing is added, so the unwidened case stays bit-exact.
#[inline]
pub(crate) fn widen(beta: f64, extra_var: f64) -> f64 {
    if extra_var == 0.0 {
        beta
    } else {
        (beta * beta + extra_var).sqrt()
    }
}

/// Mass of a zero-mean Gaussian inside [-a, a].
pub(crate) fn central_mass(beta: f64, a: f64) -> f64 {
    erf(a / (std::f64::consts::SQRT_2 * beta))
}

/// Error function: Maclaurin series near zero, continued fraction for the
/// complement further out.
pub(crate) fn erf(x: f64) -> f64 {
    if x < 0.0 {
        return -erf(-x);
    }
    if x < 2.5 {
        // Maclaurin series
        let mut sum = x;
        let mut term = x;
        let x2 = x * x;
        let mut k = 0.0;
        loop {
            k += 1.0;
            term *= -x2 / k;
            let add = term / (2.0 * k + 1.0);
            sum += add;
            if add.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        2.0 / PI.sqrt() * sum
    } else if x > 6.0 {
        1.0
    } else {
        // continued fraction for erfc, evaluated bottom-up
        let mut f = 0.0;
        for k in (1..60).rev() {
            f = k as f64 / 2.0 / (x + f);
        }
        1.0 - (-x * x).exp() / PI.sqrt() / (x + f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert!((gaussian(1.0, 0.0).unwrap() - 0.3989423).abs() < 1e-7);
        assert!((gaussian(0.5, 0.0).unwrap() - 0.7978846).abs() < 1e-7);
        assert!((gaussian(1.0, 2.0).unwrap() - 0.0539910).abs() < 1e-7);
        assert!(gaussian(0.0, 1.0).is_err());
        assert!(gaussian(-1.0, 1.0).is_err());
    }

    #[test]
    fn erf_matches_reference_points() {
        let refs = [
            (0.1, 0.1124629160182849),
            (0.5, 0.5204998778130465),
            (1.0, 0.8427007929497149),
            (2.0, 0.9953222650189527),
            (2.6, 0.9997639655834707),
            (3.5, 0.9999992569016276),
        ];
        for (x, e) in refs {
            assert!((erf(x) - e).abs() < 1e-14, "erf({x}) = {} vs {e}", erf(x));
        }
    }

    #[test]
    fn widen_identity() {
        for b in [0.01, 0.1, 0.37, 1.3] {
            assert_eq!(widen(b, 0.0), b);
            assert!(widen(b, 0.2) > b);
        }
    }
}
