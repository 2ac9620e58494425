//! Detector and local-oscillator imperfection models: dark counts, efficiency
//! sweeps, thermal LO fluctuations, spectral mode mismatch, and saturation.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{
    click_statistics, deficit_moment, moments_from_statistics, pi_moments_from_deficit,
    ArmDescriptor,
};
use crate::error::{Error, Result};
use crate::math::{gauss_hermite, trapezoid};
use crate::states::{CoherentSuperposition, FactorProduct, NormalOrderState};
use crate::witnesses::{variance_criterion, MomentMatrix};

/// Gauss-Hermite order of the thermal-LO numerical oracle (per real dimension).
pub const GH_ORDER: usize = 64;

/// A displaced thermal local oscillator: mean displacement `gamma` and
/// thermal occupation `n_bar`. `n_bar = 0` reduces to a deterministic LO.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThermalLo {
    pub gamma: Complex64,
    pub n_bar: f64,
}

impl ThermalLo {
    pub fn new(gamma: Complex64, n_bar: f64) -> Result<Self> {
        if !n_bar.is_finite() || n_bar < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "thermal occupation must be nonnegative, got {n_bar}"
            )));
        }
        Ok(Self { gamma, n_bar })
    }
}

/// Closed-form thermal-LO convolution:
/// `(1 / (1 + lambda n_bar)) <: exp(-[lambda / (1 + n_bar lambda)] n(gamma)) :>`.
pub fn thermal_lo_expectation<S: NormalOrderState>(
    state: &S,
    lambda: f64,
    gamma: Complex64,
    n_bar: f64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!(
            "lambda must lie in [0, 1], got {lambda}"
        )));
    }
    if n_bar < 0.0 {
        return Err(Error::InvalidParameter(format!("n_bar {n_bar}")));
    }
    let eff = lambda / (1.0 + n_bar * lambda);
    let product = FactorProduct::single(0, eff, gamma)?;
    Ok(state.expect_product(&product)? / (1.0 + lambda * n_bar))
}

/// Numerical oracle for the thermal convolution: 2-D Gauss-Hermite
/// integration of the Gaussian LO distribution against the displaced
/// exponential. Independent of the closed form above.
pub fn thermal_lo_expectation_numeric<S: NormalOrderState>(
    state: &S,
    lambda: f64,
    gamma: Complex64,
    n_bar: f64,
    order: usize,
) -> Result<f64> {
    if n_bar == 0.0 {
        return state.expect_product(&FactorProduct::single(0, lambda, gamma)?);
    }
    let (nodes, weights) = gauss_hermite(order);
    let scale = n_bar.sqrt();
    let mut acc = 0.0;
    for (&x, &wx) in nodes.iter().zip(&weights) {
        for (&y, &wy) in nodes.iter().zip(&weights) {
            let shifted = gamma + scale * Complex64::new(x, y);
            let product = FactorProduct::single(0, lambda, shifted)?;
            acc += wx * wy * state.expect_product(&product)?;
        }
    }
    Ok(acc / std::f64::consts::PI)
}

/// Pi moments of a single arm under thermal LO fluctuations, via the
/// deficit-moment route (the convolution acts per moment order).
pub fn thermal_pi_moments<S: NormalOrderState>(
    state: &S,
    arm: &ArmDescriptor,
    n_bar: f64,
    max_order: usize,
) -> Result<Vec<f64>> {
    let n = arm.detector.apd_count as f64;
    let nu = arm.detector.dark_rate;
    let deficits: Vec<f64> = (0..=max_order)
        .map(|m| {
            let lambda = m as f64 * arm.lambda_unit();
            Ok((n * (-nu).exp()).powi(m as i32)
                * thermal_lo_expectation(state, lambda, arm.displacement, n_bar)?)
        })
        .collect::<Result<_>>()?;
    Ok(pi_moments_from_deficit(&deficits, arm.detector.apd_count))
}

/// Variance criterion of an unbalanced arm with a thermal LO.
pub fn thermal_variance_criterion<S: NormalOrderState>(
    state: &S,
    arm: &ArmDescriptor,
    phi: f64,
    n_bar: f64,
) -> Result<f64> {
    let arm = arm.at_phase(phi);
    let mus = thermal_pi_moments(state, &arm, n_bar, 2)?;
    Ok(mus[2] - mus[1] * mus[1])
}

/// Report of the dark-count decomposition check.
#[derive(Clone, Debug, Serialize)]
pub struct DarkCountReport {
    pub max_entry_deviation: f64,
    pub variance_scaling_deviation: f64,
    pub passed: bool,
}

/// Verifies `M|_{nu>0} = T_nu M|_{nu=0} T_nu` with
/// `T_nu = diag(e^{0}, e^{-nu}, ...)` on deficit-moment matrices recomputed
/// through the full click-statistics pipeline, plus the variance scaling
/// `<:[Dpi]^2:>|_nu = e^{-2 nu} <:[Dpi]^2:>|_0`.
pub fn dark_count_decomposition_check<S: NormalOrderState>(
    state: &S,
    arm: &ArmDescriptor,
    nu: f64,
    order: usize,
) -> Result<DarkCountReport> {
    if nu < 0.0 {
        return Err(Error::InvalidParameter(format!("dark rate {nu}")));
    }
    let mut dark_arm = *arm;
    dark_arm.detector.dark_rate = nu;
    let mut clean_arm = *arm;
    clean_arm.detector.dark_rate = 0.0;

    let half = order / 2;
    let deficit_matrix = |arm: &ArmDescriptor| -> Result<Vec<Vec<f64>>> {
        // deficit moments recovered from the measured-statistics route:
        // <:(N - pi)^p:> expanded through pi moments of the distribution
        let n = arm.detector.apd_count as f64;
        let dist = click_statistics(state, arm)?;
        let pis: Vec<f64> = (0..=order)
            .map(|p| moments_from_statistics(&dist, &[p]))
            .collect::<Result<_>>()?;
        let deficit: Vec<f64> = (0..=order)
            .map(|p| {
                (0..=p)
                    .map(|k| {
                        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                        sign * crate::math::choose(p, k) * n.powi((p - k) as i32) * pis[k]
                    })
                    .sum()
            })
            .collect();
        Ok((0..=half)
            .map(|m| (0..=half).map(|mp| deficit[m + mp]).collect())
            .collect())
    };

    let with_dark = deficit_matrix(&dark_arm)?;
    let without = deficit_matrix(&clean_arm)?;
    let mut max_dev = 0.0f64;
    for m in 0..=half {
        for mp in 0..=half {
            let scaled = (-((m + mp) as f64) * nu).exp() * without[m][mp];
            max_dev = max_dev.max((with_dark[m][mp] - scaled).abs());
        }
    }

    let var_at = |arm: &ArmDescriptor| -> Result<f64> {
        let d: Vec<f64> = (0..=2)
            .map(|p| deficit_moment(state, arm, p))
            .collect::<Result<_>>()?;
        let mus = pi_moments_from_deficit(&d, arm.detector.apd_count);
        Ok(mus[2] - mus[1] * mus[1])
    };
    let var_dark = var_at(&dark_arm)?;
    let var_clean = var_at(&clean_arm)?;
    let var_dev = (var_dark - (-2.0 * nu).exp() * var_clean).abs();

    Ok(DarkCountReport {
        max_entry_deviation: max_dev,
        variance_scaling_deviation: var_dev,
        passed: max_dev < 1e-10 && var_dev < 1e-10,
    })
}

fn parse_complex_grid(values: &[ComplexOrReal]) -> Vec<Complex64> {
    values.iter().map(ComplexOrReal::to_complex).collect()
}

/// JSON-friendly scalar that is either a real number or an `[re, im]` pair.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexOrReal {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexOrReal {
    pub fn to_complex(&self) -> Complex64 {
        match self {
            ComplexOrReal::Real(re) => Complex64::new(*re, 0.0),
            ComplexOrReal::Pair([re, im]) => Complex64::new(*re, *im),
        }
    }
}

/// Serialized spectral setup (Appendix-style broadband description).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectralSetupFile {
    pub omega: Vec<f64>,
    #[serde(rename = "G")]
    pub response: Vec<f64>,
    pub f_si: Vec<ComplexOrReal>,
    pub f_lo: Vec<ComplexOrReal>,
    pub t: Vec<ComplexOrReal>,
    pub r: Vec<ComplexOrReal>,
    pub beta: ComplexOrReal,
}

/// Spectral response setup for the mode-mismatch reduction.
#[derive(Clone, Debug)]
pub struct SpectralSetup {
    pub omega: Vec<f64>,
    pub response: Vec<f64>,
    pub f_si: Vec<Complex64>,
    pub f_lo: Vec<Complex64>,
    pub t: Vec<Complex64>,
    pub r: Vec<Complex64>,
    pub beta: Complex64,
}

impl SpectralSetup {
    pub fn new(
        omega: Vec<f64>,
        response: Vec<f64>,
        f_si: Vec<Complex64>,
        f_lo: Vec<Complex64>,
        t: Vec<Complex64>,
        r: Vec<Complex64>,
        beta: Complex64,
    ) -> Result<Self> {
        let n = omega.len();
        if n < 2 {
            return Err(Error::Validation("frequency grid needs at least 2 points".into()));
        }
        for arr in [response.len(), f_si.len(), f_lo.len(), t.len(), r.len()] {
            if arr != n {
                return Err(Error::Validation(
                    "all spectral arrays must match the frequency grid length".into(),
                ));
            }
        }
        let step = omega[1] - omega[0];
        if step <= 0.0 {
            return Err(Error::Validation("frequency grid must be increasing".into()));
        }
        for w in omega.windows(2) {
            if ((w[1] - w[0]) - step).abs() > 1e-9 * step.abs() {
                return Err(Error::Validation("frequency grid must be uniform".into()));
            }
        }
        if response.iter().any(|g| *g < 0.0) {
            return Err(Error::Validation("spectral response G must be nonnegative".into()));
        }
        for (ti, ri) in t.iter().zip(&r) {
            let total = ti.norm_sqr() + ri.norm_sqr();
            if (total - 1.0).abs() > 1e-10 {
                return Err(Error::Validation(format!(
                    "|t|^2 + |r|^2 = {total} violates pointwise unitarity"
                )));
            }
        }
        let setup = Self {
            omega,
            response,
            f_si,
            f_lo,
            t,
            r,
            beta,
        };
        for (name, profile) in [("f_si", &setup.f_si), ("f_lo", &setup.f_lo)] {
            let norm = setup.profile_norm(profile);
            if (norm - 1.0).abs() > 1e-8 {
                return Err(Error::Validation(format!(
                    "profile {name} has norm {norm}, expected 1 within 1e-8"
                )));
            }
        }
        Ok(setup)
    }

    pub fn from_file(file: &SpectralSetupFile) -> Result<Self> {
        Self::new(
            file.omega.clone(),
            file.response.clone(),
            parse_complex_grid(&file.f_si),
            parse_complex_grid(&file.f_lo),
            parse_complex_grid(&file.t),
            parse_complex_grid(&file.r),
            file.beta.to_complex(),
        )
    }

    fn step(&self) -> f64 {
        self.omega[1] - self.omega[0]
    }

    fn profile_norm(&self, profile: &[Complex64]) -> f64 {
        let vals: Vec<f64> = profile.iter().map(|f| f.norm_sqr()).collect();
        trapezoid(&vals, self.step())
    }

    /// Response-weighted inner product `(a, b) = int dw G(w) a^*(w) b(w)`.
    pub fn inner(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        let re: Vec<f64> = self
            .response
            .iter()
            .zip(a.iter().zip(b))
            .map(|(g, (ai, bi))| g * (ai.conj() * bi).re)
            .collect();
        let im: Vec<f64> = self
            .response
            .iter()
            .zip(a.iter().zip(b))
            .map(|(g, (ai, bi))| g * (ai.conj() * bi).im)
            .collect();
        Complex64::new(trapezoid(&re, self.step()), trapezoid(&im, self.step()))
    }
}

/// Effective parameters of a mismatched broadband measurement.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MismatchParameters {
    pub eta_t: f64,
    pub gamma: Complex64,
    pub nu_tilde: f64,
}

/// Reduces a spectral setup to `(eta_t, gamma, nu_tilde)`; downstream moments
/// use `nu -> nu + nu_tilde`.
pub fn mode_mismatch_parameters(setup: &SpectralSetup) -> Result<MismatchParameters> {
    let tf_si: Vec<Complex64> = setup.t.iter().zip(&setup.f_si).map(|(t, f)| t * f).collect();
    let rf_lo: Vec<Complex64> = setup.r.iter().zip(&setup.f_lo).map(|(r, f)| r * f).collect();
    let ss = setup.inner(&tf_si, &tf_si).re;
    if ss <= 1e-14 {
        return Err(Error::Validation(
            "signal profile has no overlap with the detector response".into(),
        ));
    }
    let sl = setup.inner(&tf_si, &rf_lo);
    let ll = setup.inner(&rf_lo, &rf_lo).re;
    let gamma = -(sl / ss) * setup.beta;
    let nu_tilde = ((ss * ll - sl.norm_sqr()) / ss * setup.beta.norm_sqr()).max(0.0);
    Ok(MismatchParameters {
        eta_t: ss,
        gamma,
        nu_tilde,
    })
}

/// One point of a saturation sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SaturationPoint {
    pub scale: f64,
    /// Total-variation distance of `c_k` to `delta_{k,N}`.
    pub tv_to_saturation: f64,
    pub min_moment_eigenvalue: f64,
    pub variance_value: f64,
}

/// Sweeps an overall intensity scale applied to both the state and LO
/// amplitudes, reporting how the statistics approach `c_k -> delta_{k,N}` and
/// that moment matrices stay well behaved.
pub fn saturation_probe(
    state: &CoherentSuperposition,
    arm: &ArmDescriptor,
    scales: &[f64],
    order: usize,
) -> Result<Vec<SaturationPoint>> {
    scales
        .iter()
        .map(|&s| {
            let scaled_state = state.scaled(s)?;
            let scaled_arm = arm.with_displacement_scaled(Complex64::new(s, 0.0));
            let dist = click_statistics(&scaled_state, &scaled_arm)?;
            let n = scaled_arm.detector.apd_count;
            let tv: f64 = dist
                .iter()
                .map(|(ks, p)| {
                    let target = if ks[0] == n { 1.0 } else { 0.0 };
                    (p - target).abs()
                })
                .sum::<f64>()
                / 2.0;
            let matrix = crate::witnesses::moment_matrix(&scaled_state, &scaled_arm, order, 0.0, 1.0)?;
            let var = variance_criterion(&scaled_state, &scaled_arm, scaled_arm.displacement.arg())?;
            Ok(SaturationPoint {
                scale: s,
                tv_to_saturation: tv,
                min_moment_eigenvalue: matrix.min_eigenvalue(),
                variance_value: var.value,
            })
        })
        .collect()
}

/// Variance-criterion surface over an `(eta, phi)` grid; rows follow the
/// efficiency grid.
pub fn efficiency_sweep<S: NormalOrderState>(
    state: &S,
    arm_template: &ArmDescriptor,
    etas: &[f64],
    phis: &[f64],
) -> Result<Vec<Vec<f64>>> {
    etas.par_iter()
        .map(|&eta| {
            let mut arm = *arm_template;
            arm.detector.efficiency = eta;
            phis.iter()
                .map(|&phi| Ok(variance_criterion(state, &arm, phi)?.value))
                .collect::<Result<Vec<f64>>>()
        })
        .collect()
}

/// PSD helper re-exported for saturation/no-fake-nonclassicality suites.
pub fn moment_matrix_is_psd(matrix: &MomentMatrix, tol: f64) -> bool {
    matrix.is_psd(tol)
}
