//! Central finite-difference gradient checker.

use crate::error::{Error, Result};

/// Outcome of comparing an analytic gradient against central differences.
#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    /// Coordinates actually compared.
    pub checked: usize,
    /// Coordinates skipped because the perturbation crossed a non-smooth
    /// point (relu kink or pooling tie), detected via a change in the
    /// function's discrete signature.
    pub excluded: usize,
    pub max_rel_err: f64,
    /// Index of the coordinate with the largest relative error.
    pub worst_param: Option<usize>,
    pub tol: f64,
}

impl GradCheckReport {
    pub fn passed(&self) -> bool {
        self.max_rel_err <= self.tol
    }
}

/// Checks `analytic` against `(f(p+eps) - f(p-eps)) / 2eps` per coordinate.
///
/// Relative error per coordinate is `|a - n| / max(|a|, |n|, 1e-8)`, except
/// that coordinates with `|a - n| <= eps * tol` can never fail: at that
/// scale the difference quotient itself carries rounding noise of order
/// `machine_eps / eps`, so the relative error measures noise rather than the
/// gradient whenever the true gradient is small. `f` must be deterministic
/// given `params`; a non-finite value aborts the check.
pub fn grad_check<F>(
    mut f: F,
    params: &mut [f64],
    analytic: &[f64],
    eps: f64,
    tol: f64,
) -> Result<GradCheckReport>
where
    F: FnMut(&[f64]) -> f64,
{
    grad_check_guarded(|p| (f(p), ()), params, analytic, eps, tol)
}

/// Like [`grad_check`], but `f` also returns a discrete signature of its
/// evaluation (e.g. relu activity pattern plus pooling argmax indices). A
/// coordinate whose two perturbed evaluations disagree on the signature sits
/// across a kink or tie where central differences are meaningless; it is
/// excluded and counted in the report.
pub fn grad_check_guarded<F, S>(
    mut f: F,
    params: &mut [f64],
    analytic: &[f64],
    eps: f64,
    tol: f64,
) -> Result<GradCheckReport>
where
    F: FnMut(&[f64]) -> (f64, S),
    S: PartialEq,
{
    if params.len() != analytic.len() {
        return Err(Error::shape(
            "grad_check",
            format!("{} analytic entries", params.len()),
            format!("{} analytic entries", analytic.len()),
        ));
    }

    let mut report = GradCheckReport {
        checked: 0,
        excluded: 0,
        max_rel_err: 0.0,
        worst_param: None,
        tol,
    };

    for i in 0..params.len() {
        let orig = params[i];
        params[i] = orig + eps;
        let (loss_plus, sig_plus) = f(params);
        params[i] = orig - eps;
        let (loss_minus, sig_minus) = f(params);
        params[i] = orig;

        if !loss_plus.is_finite() || !loss_minus.is_finite() {
            return Err(Error::NonFinite(format!(
                "grad_check objective at coordinate {i}"
            )));
        }
        if sig_plus != sig_minus {
            report.excluded += 1;
            continue;
        }

        let numeric = (loss_plus - loss_minus) / (2.0 * eps);
        let a = analytic[i];
        let abs_err = (a - numeric).abs();
        report.checked += 1;
        // Noise floor: below eps * tol the disagreement is indistinguishable
        // from the rounding error of the difference quotient.
        if abs_err <= eps * tol {
            continue;
        }
        let rel = abs_err / a.abs().max(numeric.abs()).max(1e-8);
        if rel > report.max_rel_err {
            report.max_rel_err = rel;
            report.worst_param = Some(i);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic(p: &[f64]) -> f64 {
        p.iter().map(|v| v * v).sum()
    }

    #[test]
    fn quadratic_is_exact() {
        let mut params = vec![0.3, -0.7, 1.1, 0.0];
        let analytic: Vec<f64> = params.iter().map(|v| 2.0 * v).collect();
        let report = grad_check(quadratic, &mut params, &analytic, 1e-5, 1e-10).unwrap();
        assert_eq!(report.checked, 4);
        assert_eq!(report.excluded, 0);
        assert!(report.passed(), "max_rel_err {}", report.max_rel_err);
        // Parameters restored after the sweep.
        assert_eq!(params, vec![0.3, -0.7, 1.1, 0.0]);
    }

    #[test]
    fn corrupted_gradient_is_flagged() {
        let mut params = vec![0.5, -0.25, 0.75];
        let mut analytic: Vec<f64> = params.iter().map(|v| 2.0 * v).collect();
        analytic[1] *= 2.0;
        let report = grad_check(quadratic, &mut params, &analytic, 1e-5, 1e-6).unwrap();
        assert!(!report.passed());
        assert_eq!(report.worst_param, Some(1));
    }

    #[test]
    fn tiny_absolute_disagreement_cannot_fail() {
        // Gradient 1e-7: an analytic error of 4e-10 sits below the
        // eps*tol = 1e-9 noise floor and passes despite a relative error of
        // 4e-3, while 2e-8 is above the floor and fails as it should.
        let f = |p: &[f64]| 1e-7 * p[0];
        let mut params = vec![0.5];

        let within_noise = grad_check(f, &mut params, &[1e-7 + 4e-10], 1e-5, 1e-4).unwrap();
        assert!(within_noise.passed(), "max_rel_err {}", within_noise.max_rel_err);
        assert_eq!(within_noise.checked, 1);

        let genuine_error = grad_check(f, &mut params, &[1.2e-7], 1e-5, 1e-4).unwrap();
        assert!(!genuine_error.passed(), "max_rel_err {}", genuine_error.max_rel_err);
    }

    #[test]
    fn non_finite_objective_is_an_error() {
        let mut params = vec![1.0];
        let analytic = vec![0.0];
        let err = grad_check(|_| f64::NAN, &mut params, &analytic, 1e-5, 1e-4).unwrap_err();
        assert!(matches!(err, Error::NonFinite(_)));
    }

    #[test]
    fn signature_change_excludes_coordinate() {
        // f(p) = relu(p[0]): near the kink the signature (activity bit) flips.
        let f = |p: &[f64]| (p[0].max(0.0), p[0] > 0.0);
        let mut params = vec![1e-7];
        let analytic = vec![1.0];
        let report = grad_check_guarded(f, &mut params, &analytic, 1e-5, 1e-4).unwrap();
        assert_eq!(report.excluded, 1);
        assert_eq!(report.checked, 0);
    }

    #[test]
    fn mismatched_lengths_rejected() {
        let mut params = vec![1.0, 2.0];
        assert!(grad_check(quadratic, &mut params, &[1.0], 1e-5, 1e-4).is_err());
    }
}
