//! The normalized second-order logistic mother wavelet and its children,
//! with quadrature self-checks of the wavelet axioms (zero mean, unit norm).
//!
//! The mother wavelet is sqrt(30) times the second derivative of the basic
//! logistic function 1/(1+e^(-t)): an antisymmetric pair of bumps with a
//! zero crossing at the origin. Children are generated by dilation and
//! translation, `psi^{a,b}(t) = psi((t-b)/a) / sqrt(a)`, which preserves the
//! L2 norm.

use crate::error::{Error, Result};
use crate::numeric::{exp, positive, sqrt, trapezoid};

/// sqrt(30), the normalization constant of the mother wavelet.
pub const SQRT_30: f64 = 5.477225575051661;

/// Dilation beyond which the mother wavelet is below 1e-16 in magnitude;
/// quadrature and inner products treat [-40, 40] as the effective support.
pub const SUPPORT_RADIUS: f64 = 40.0;

// Tail magnitude (~sqrt(30)*e^(-hw)) must stay below this for a quadrature
// window to count as covering the support.
const TAIL_TOLERANCE: f64 = 1e-12;

/// Mother wavelet `sqrt(30) * (e^(-2t) - e^(-t)) / (1 + e^(-t))^3`.
///
/// Evaluated through its antisymmetry for t < 0, so the exponentials never
/// overflow and `mother_psi2(-t) == -mother_psi2(t)` holds exactly.
pub fn mother_psi2(t: f64) -> f64 {
    if t < 0.0 {
        -psi2_nonneg(-t)
    } else {
        psi2_nonneg(t)
    }
}

fn psi2_nonneg(t: f64) -> f64 {
    let e1 = exp(-t);
    let e2 = exp(-2.0 * t);
    let d = 1.0 + e1;
    SQRT_30 * (e2 - e1) / (d * d * d)
}

/// Dilation and translation of a child wavelet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChildWaveletParams {
    /// Dilation, > 0.
    pub a: f64,
    /// Translation.
    pub b: f64,
}

impl ChildWaveletParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !positive(a) {
            return Err(Error::InvalidParameter("wavelet dilation a must be finite and > 0"));
        }
        if !b.is_finite() {
            return Err(Error::InvalidParameter("wavelet translation b must be finite"));
        }
        Ok(Self { a, b })
    }
}

/// Child wavelet `psi((t-b)/a) / sqrt(a)`.
pub fn child_psi2(p: ChildWaveletParams, t: f64) -> f64 {
    child_psi2_raw(p.a, p.b, t)
}

/// Same arithmetic as [`child_psi2`] without the params struct; the hot
/// paths (scalogram sums) call this directly.
#[inline]
pub(crate) fn child_psi2_raw(a: f64, b: f64, t: f64) -> f64 {
    (1.0 / sqrt(a)) * mother_psi2((t - b) / a)
}

fn check_window(half_width: f64, step: f64) -> Result<()> {
    if !positive(step) {
        return Err(Error::NonpositiveStep);
    }
    if !(half_width.is_finite()) || SQRT_30 * exp(-half_width) > TAIL_TOLERANCE {
        return Err(Error::InsufficientHalfWidth { half_width });
    }
    Ok(())
}

/// Numerical integral of psi^2 over [-half_width, half_width] by composite
/// trapezoid; converges to 1 (the wavelet is L2-normalized).
pub fn psi2_l2_norm(quadrature_step: f64, half_width: f64) -> Result<f64> {
    check_window(half_width, quadrature_step)?;
    Ok(trapezoid(
        |t| {
            let v = mother_psi2(t);
            v * v
        },
        0.0,
        half_width,
        quadrature_step,
    ))
}

/// Numerical integral of psi over [-half_width, half_width]; vanishes by
/// antisymmetry (zero-mean wavelet axiom).
pub fn psi2_zero_mean(quadrature_step: f64, half_width: f64) -> Result<f64> {
    check_window(half_width, quadrature_step)?;
    Ok(trapezoid(mother_psi2, 0.0, half_width, quadrature_step))
}

/// L2 norm integral for a child wavelet, over `b +- a*half_width` (the
/// support scales with the dilation). Converges to 1 for every child.
pub fn child_l2_norm(p: ChildWaveletParams, quadrature_step: f64, half_width: f64) -> Result<f64> {
    check_window(half_width, quadrature_step)?;
    Ok(trapezoid(
        |t| {
            let v = child_psi2(p, t);
            v * v
        },
        p.b,
        p.a * half_width,
        p.a * quadrature_step,
    ))
}

/// Zero-mean integral for a child wavelet over `b +- a*half_width`.
pub fn child_zero_mean(
    p: ChildWaveletParams,
    quadrature_step: f64,
    half_width: f64,
) -> Result<f64> {
    check_window(half_width, quadrature_step)?;
    Ok(trapezoid(
        |t| child_psi2(p, t),
        p.b,
        p.a * half_width,
        p.a * quadrature_step,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_30_constant_is_exact() {
        assert_eq!(SQRT_30, 30.0_f64.sqrt());
    }

    #[test]
    fn zero_at_origin() {
        assert_eq!(mother_psi2(0.0), 0.0);
    }

    #[test]
    fn value_at_one_matches_high_precision() {
        // sqrt(30)*(e^-2 - e^-1)/(1+e^-1)^3 from 40-digit arithmetic
        let expected = -0.4976483792458636;
        assert!((mother_psi2(1.0) - expected).abs() < 1e-15);
    }

    #[test]
    fn antisymmetry_is_exact() {
        for i in 0..2000 {
            let t = (i as f64) * 0.037 + 0.001;
            assert_eq!(mother_psi2(-t), -mother_psi2(t));
        }
    }

    #[test]
    fn far_tails_vanish() {
        assert!(mother_psi2(SUPPORT_RADIUS).abs() < 1e-16);
        assert!(mother_psi2(-SUPPORT_RADIUS).abs() < 1e-16);
        assert_eq!(mother_psi2(800.0), 0.0);
        assert_eq!(mother_psi2(-800.0), 0.0);
    }

    #[test]
    fn identity_child_is_mother() {
        let p = ChildWaveletParams::new(1.0, 0.0).unwrap();
        for i in -50..50 {
            let t = i as f64 * 0.3;
            assert_eq!(child_psi2(p, t), mother_psi2(t));
        }
    }

    #[test]
    fn child_zero_at_center_and_scaled_value() {
        let p = ChildWaveletParams::new(4.0, 10.0).unwrap();
        assert_eq!(child_psi2(p, 10.0), 0.0);
        // (t-b)/a = 1 and 1/sqrt(4) = 1/2
        assert_eq!(child_psi2(p, 14.0), 0.5 * mother_psi2(1.0));
    }

    #[test]
    fn child_rejects_nonpositive_dilation() {
        assert!(ChildWaveletParams::new(0.0, 1.0).is_err());
        assert!(ChildWaveletParams::new(-2.0, 1.0).is_err());
    }

    #[test]
    fn scaling_identity_exact() {
        let p = ChildWaveletParams::new(3.7, -2.5).unwrap();
        for i in -40..40 {
            let t = i as f64 * 0.7;
            let direct = (1.0 / 3.7_f64.sqrt()) * mother_psi2((t - p.b) / p.a);
            assert_eq!(child_psi2(p, t), direct);
        }
    }

    #[test]
    fn l2_norm_is_one() {
        let n = psi2_l2_norm(1e-3, 40.0).unwrap();
        assert!((n - 1.0).abs() < 1e-6, "norm {n}");
    }

    #[test]
    fn l2_norm_step_refinement() {
        let a = psi2_l2_norm(1e-3, 40.0).unwrap();
        let b = psi2_l2_norm(5e-4, 40.0).unwrap();
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn zero_mean_vanishes() {
        let m = psi2_zero_mean(1e-3, 40.0).unwrap();
        assert!(m.abs() < 1e-10, "mean {m}");
    }

    #[test]
    fn child_norm_and_mean_match_mother() {
        let p = ChildWaveletParams::new(3.0, 7.0).unwrap();
        let n = child_l2_norm(p, 1e-3, 40.0).unwrap();
        assert!((n - 1.0).abs() < 1e-6, "child norm {n}");
        let m = child_zero_mean(p, 1e-3, 40.0).unwrap();
        assert!(m.abs() < 1e-10, "child mean {m}");
    }

    #[test]
    fn insufficient_half_width_flagged() {
        assert!(matches!(
            psi2_l2_norm(1e-3, 20.0),
            Err(Error::InsufficientHalfWidth { .. })
        ));
        assert!(matches!(
            psi2_zero_mean(1e-3, 5.0),
            Err(Error::InsufficientHalfWidth { .. })
        ));
    }

    #[test]
    fn matches_second_difference_of_logistic() {
        // psi2 = sqrt(30) * sigma''; compare against centered second
        // differences of the logistic with h = 1e-4
        let sigma = |t: f64| 1.0 / (1.0 + (-t).exp());
        let h = 1e-4;
        for i in -30..30 {
            let t = i as f64 * 0.25;
            let d2 = (sigma(t + h) - 2.0 * sigma(t) + sigma(t - h)) / (h * h);
            assert!((mother_psi2(t) - SQRT_30 * d2).abs() < 1e-6);
        }
    }
}
