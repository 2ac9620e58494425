//! Moment-matrix nonclassicality criteria.
//!
//! A classical field gives a nonnegative matrix of normally ordered click
//! moments; a negative minor or eigenvalue certifies quantum light.

use nalgebra::DMatrix;
use serde_json::json;

use crate::engine::{pi_moment, ArmDescriptor};
use crate::error::{Error, Result};
use crate::homodyne::{cross_pair_moment, difference_moment, sum_moment, QuadraturePair, SchemeArms};
use crate::math::{choose, KahanSum};
use crate::states::NormalOrderState;

/// Verdict tolerance on criterion negativity; raw values are always reported.
pub const VERDICT_TOL: f64 = 1e-12;
/// Eigenvalue tolerance for PSD checks.
pub const PSD_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Nonclassical,
    Inconclusive,
}

impl Verdict {
    pub fn from_value(value: f64) -> Self {
        if value < -VERDICT_TOL {
            Verdict::Nonclassical
        } else {
            Verdict::Inconclusive
        }
    }
}

/// Outcome of one criterion evaluation.
#[derive(Clone, Debug, serde::Serialize)]
pub struct CriterionResult {
    pub id: String,
    pub value: f64,
    pub verdict: Verdict,
    pub params: serde_json::Value,
}

impl CriterionResult {
    pub fn new(id: impl Into<String>, value: f64, params: serde_json::Value) -> Self {
        Self {
            id: id.into(),
            value,
            verdict: Verdict::from_value(value),
            params,
        }
    }
}

/// Matrix of normally ordered click moments `<:(x 1 + y pi)^(m+m'):>` for
/// `m, m' = 0..=K/2`.
#[derive(Clone, Debug)]
pub struct MomentMatrix {
    pub order: usize,
    pub x: f64,
    pub y: f64,
    pub entries: DMatrix<f64>,
}

impl MomentMatrix {
    /// Assembles the matrix from raw moments `mu_k = <:pi^k:>`, `k = 0..=K`.
    pub fn from_raw_moments(raw: &[f64], order: usize, x: f64, y: f64) -> Result<Self> {
        if !order.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "moment-matrix order must be even, got {order}"
            )));
        }
        if y == 0.0 {
            return Err(Error::InvalidParameter("variant parameter y must be nonzero".into()));
        }
        if raw.len() < order + 1 {
            return Err(Error::InvalidParameter(format!(
                "need {} raw moments, got {}",
                order + 1,
                raw.len()
            )));
        }
        let half = order / 2;
        // transformed powers <:(x + y pi)^p:> for p = 0..=K
        let powers: Vec<f64> = (0..=order)
            .map(|p| {
                let mut acc = KahanSum::new();
                for (k, mu) in raw.iter().take(p + 1).enumerate() {
                    acc.add(choose(p, k) * x.powi((p - k) as i32) * y.powi(k as i32) * mu);
                }
                acc.value()
            })
            .collect();
        let entries = DMatrix::from_fn(half + 1, half + 1, |m, mp| powers[m + mp]);
        Ok(Self { order, x, y, entries })
    }

    pub fn determinant(&self) -> f64 {
        self.entries.clone().lu().determinant()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.entries
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |a, &b| a.min(b))
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }
}

/// Raw single-arm pi moments `<:pi^k:>` for `k = 0..=max_order`.
pub fn pi_moment_sequence<S: NormalOrderState>(
    state: &S,
    arm: &ArmDescriptor,
    max_order: usize,
) -> Result<Vec<f64>> {
    (0..=max_order)
        .map(|m| pi_moment(state, std::slice::from_ref(arm), &[m]))
        .collect()
}

/// Builds `M^(K)` in variant `(x, y)` from a raw-moment provider; `K` must be
/// even and satisfy `K <= N`.
pub fn moment_matrix<S: NormalOrderState>(
    state: &S,
    arm: &ArmDescriptor,
    order: usize,
    x: f64,
    y: f64,
) -> Result<MomentMatrix> {
    if order > arm.detector.apd_count {
        return Err(Error::InvalidParameter(format!(
            "moment-matrix order {order} exceeds APD count {}",
            arm.detector.apd_count
        )));
    }
    let raw = pi_moment_sequence(state, arm, order)?;
    MomentMatrix::from_raw_moments(&raw, order, x, y)
}

/// Lower-triangular congruence `T(x, y)` with `t_{m,k} = C(m,k) x^{m-k} y^k`,
/// satisfying `M(x, y) = T M(0, 1) T^T`.
pub fn congruence_transform(x: f64, y: f64, size: usize) -> Result<DMatrix<f64>> {
    if y == 0.0 {
        return Err(Error::InvalidParameter("congruence requires y != 0".into()));
    }
    Ok(DMatrix::from_fn(size, size, |m, k| {
        if k > m {
            0.0
        } else {
            choose(m, k) * x.powi((m - k) as i32) * y.powi(k as i32)
        }
    }))
}

/// Second-order criterion `<:[Delta pi(phi)]^2:>`; negative means nonclassical.
pub fn variance_criterion<S: NormalOrderState>(
    state: &S,
    arm: &ArmDescriptor,
    phi: f64,
) -> Result<CriterionResult> {
    let arm = arm.at_phase(phi);
    let m1 = pi_moment(state, std::slice::from_ref(&arm), &[1])?;
    let m2 = pi_moment(state, std::slice::from_ref(&arm), &[2])?;
    Ok(CriterionResult::new(
        "variance",
        m2 - m1 * m1,
        json!({ "phi": phi }),
    ))
}

/// Fourth-order criterion `det M^(4)(phi)`; negative means nonclassical.
pub fn fourth_order_criterion<S: NormalOrderState>(
    state: &S,
    arm: &ArmDescriptor,
    phi: f64,
) -> Result<CriterionResult> {
    if arm.detector.apd_count < 4 {
        return Err(Error::InvalidParameter(
            "fourth-order criterion requires N >= 4".into(),
        ));
    }
    let arm = arm.at_phase(phi);
    let matrix = moment_matrix(state, &arm, 4, 0.0, 1.0)?;
    Ok(CriterionResult::new(
        "fourth_order",
        matrix.determinant(),
        json!({ "phi": phi }),
    ))
}

/// Cross-correlation minor of two arms:
/// `<:[Dpi_1]^2:><:[Dpi_2]^2:> - <:Dpi_1 Dpi_2:>^2`.
pub fn cross_correlation_criterion<S: NormalOrderState>(
    state: &S,
    arm1: &ArmDescriptor,
    arm2: &ArmDescriptor,
) -> Result<CriterionResult> {
    let a = [*arm1];
    let b = [*arm2];
    let both = [*arm1, *arm2];
    let m1a = pi_moment(state, &a, &[1])?;
    let m2a = pi_moment(state, &a, &[2])?;
    let m1b = pi_moment(state, &b, &[1])?;
    let m2b = pi_moment(state, &b, &[2])?;
    let mab = pi_moment(state, &both, &[1, 1])?;
    let var_a = m2a - m1a * m1a;
    let var_b = m2b - m1b * m1b;
    let cov = mab - m1a * m1b;
    Ok(CriterionResult::new(
        "cross_correlation",
        var_a * var_b - cov * cov,
        serde_json::Value::Null,
    ))
}

/// Nonlinear squeezing `<:[Delta X(phi)]^2:>` of a balanced pair.
pub fn nonlinear_squeezing<S: NormalOrderState>(
    state: &S,
    scheme: &SchemeArms,
    phi: f64,
) -> Result<CriterionResult> {
    let scheme = scheme.at_phase(phi);
    let m1 = difference_moment(state, &scheme, QuadraturePair::X, 1)?;
    let m2 = difference_moment(state, &scheme, QuadraturePair::X, 2)?;
    Ok(CriterionResult::new(
        "nonlinear_squeezing",
        m2 - m1 * m1,
        json!({ "phi": phi }),
    ))
}

/// Variance of the sum of clicks `<:[Delta (pi_1 + pi_2)]^2:>`.
pub fn sum_variance<S: NormalOrderState>(
    state: &S,
    scheme: &SchemeArms,
    phi: f64,
) -> Result<CriterionResult> {
    let scheme = scheme.at_phase(phi);
    let m1 = sum_moment(state, &scheme, QuadraturePair::X, 1)?;
    let m2 = sum_moment(state, &scheme, QuadraturePair::X, 2)?;
    Ok(CriterionResult::new(
        "sum_variance",
        m2 - m1 * m1,
        json!({ "phi": phi }),
    ))
}

/// Normally ordered variance of one tagged pair of a scheme at phase `phi`.
pub fn pair_variance<S: NormalOrderState>(
    state: &S,
    scheme: &SchemeArms,
    pair: QuadraturePair,
) -> Result<f64> {
    let m1 = difference_moment(state, scheme, pair, 1)?;
    let m2 = difference_moment(state, scheme, pair, 2)?;
    Ok(m2 - m1 * m1)
}

/// X-P covariance criterion of the eight-port scheme:
/// `<:[DX]^2:><:[DP]^2:> - <:DX DP:>^2` (normally ordered
/// Schroedinger-Robertson violation when negative).
pub fn xp_covariance_criterion<S: NormalOrderState>(
    state: &S,
    scheme: &SchemeArms,
    phi: f64,
) -> Result<CriterionResult> {
    let scheme = scheme.at_phase(phi);
    let var_x = pair_variance(state, &scheme, QuadraturePair::X)?;
    let var_p = pair_variance(state, &scheme, QuadraturePair::P)?;
    let x1 = difference_moment(state, &scheme, QuadraturePair::X, 1)?;
    let p1 = difference_moment(state, &scheme, QuadraturePair::P, 1)?;
    let xp = cross_pair_moment(state, &scheme, QuadraturePair::X, QuadraturePair::P)?;
    let cov = xp - x1 * p1;
    Ok(CriterionResult::new(
        "xp_covariance",
        var_x * var_p - cov * cov,
        json!({ "phi": phi }),
    ))
}

/// Two-mode criteria: variances of `X_1` and `X_2` plus the covariance minor.
pub fn two_mode_criteria<S: NormalOrderState>(
    state: &S,
    scheme: &SchemeArms,
    phi1: f64,
    phi2: f64,
) -> Result<(CriterionResult, CriterionResult, CriterionResult)> {
    let scheme = scheme.at_mode_phases(&[phi1, phi2])?;
    let var1 = pair_variance(state, &scheme, QuadraturePair::X)?;
    let var2 = pair_variance(state, &scheme, QuadraturePair::P)?;
    let x1 = difference_moment(state, &scheme, QuadraturePair::X, 1)?;
    let x2 = difference_moment(state, &scheme, QuadraturePair::P, 1)?;
    let x1x2 = cross_pair_moment(state, &scheme, QuadraturePair::X, QuadraturePair::P)?;
    let cov = x1x2 - x1 * x2;
    let params = json!({ "phi1": phi1, "phi2": phi2 });
    Ok((
        CriterionResult::new("two_mode_variance_1", var1, params.clone()),
        CriterionResult::new("two_mode_variance_2", var2, params.clone()),
        CriterionResult::new("two_mode_covariance", var1 * var2 - cov * cov, params),
    ))
}
