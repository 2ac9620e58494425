//! Truncated-Fock-space oracle.
//!
//! Everything here is an independent evaluation route used to cross-check the
//! closed-form coherent-state algebra. A [`FactorProduct`] aggregates, per
//! mode, to the unique normally ordered operator
//! `exp(-w) exp(v a^dag) (1 - Lambda)^n exp(u a)` which is built as a dense
//! matrix in the truncated number basis.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::states::{clamp_real, CoherentSuperposition, FactorProduct, NormalOrderState};

/// Boundary amplitude above which a truncation warning is logged.
pub const BOUNDARY_WARN: f64 = 1e-8;

/// Dense state vector over `truncation + 1` number states per mode.
#[derive(Clone, Debug)]
pub struct FockVector {
    modes: usize,
    truncation: usize,
    amps: Vec<Complex64>,
}

impl FockVector {
    /// Builds a normalized Fock vector from raw amplitudes in row-major order
    /// (the last mode varies fastest).
    pub fn new(modes: usize, truncation: usize, amps: Vec<Complex64>) -> Result<Self> {
        let dim = truncation + 1;
        if modes == 0 {
            return Err(Error::InvalidParameter("mode count must be positive".into()));
        }
        if amps.len() != dim.pow(modes as u32) {
            return Err(Error::InvalidParameter(format!(
                "expected {} amplitudes, got {}",
                dim.pow(modes as u32),
                amps.len()
            )));
        }
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if norm_sq < 1e-280 {
            return Err(Error::DegenerateState("Fock vector norm vanishes".into()));
        }
        let scale = norm_sq.sqrt().recip();
        Ok(Self {
            modes,
            truncation,
            amps: amps.into_iter().map(|a| a * scale).collect(),
        })
    }

    /// Expands a coherent superposition in the truncated number basis.
    pub fn from_superposition(state: &CoherentSuperposition, truncation: usize) -> Result<Self> {
        let modes = state.modes();
        let dim = truncation + 1;
        let total = dim.pow(modes as u32);
        let mut amps = vec![Complex64::new(0.0, 0.0); total];
        // per-term, per-mode number-basis coefficients e^{-|a|^2/2} a^n / sqrt(n!)
        for term in state.terms() {
            let per_mode: Vec<Vec<Complex64>> = term
                .amplitudes
                .iter()
                .map(|&alpha| coherent_column(alpha, truncation))
                .collect();
            for (idx, amp) in amps.iter_mut().enumerate() {
                let mut v = term.coeff;
                let mut rem = idx;
                for m in (0..modes).rev() {
                    let n = rem % dim;
                    rem /= dim;
                    v *= per_mode[m][n];
                }
                *amp += v;
            }
        }
        Self::new(modes, truncation, amps)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    fn dim(&self) -> usize {
        self.truncation + 1
    }

    /// Largest amplitude magnitude on the truncation boundary.
    pub fn boundary_amplitude(&self) -> f64 {
        let dim = self.dim();
        let mut max = 0.0f64;
        for (idx, amp) in self.amps.iter().enumerate() {
            let mut rem = idx;
            let mut on_boundary = false;
            for _ in 0..self.modes {
                if rem % dim == self.truncation {
                    on_boundary = true;
                    break;
                }
                rem /= dim;
            }
            if on_boundary {
                max = max.max(amp.norm());
            }
        }
        max
    }

    /// `<psi| prod_m O_m |psi>` with the per-mode normally ordered operator of
    /// the aggregated factor product.
    pub fn fock_expectation(&self, product: &FactorProduct) -> Result<f64> {
        for f in &product.factors {
            if f.mode >= self.modes {
                return Err(Error::InvalidParameter(format!(
                    "factor mode {} out of range for {}-mode state",
                    f.mode, self.modes
                )));
            }
        }
        let boundary = self.boundary_amplitude();
        if boundary > BOUNDARY_WARN {
            log::warn!("Fock truncation may be insufficient: boundary amplitude {boundary:.3e}");
        }
        let mut work = self.amps.clone();
        for mode in 0..self.modes {
            let factors: Vec<_> = product.factors.iter().filter(|f| f.mode == mode).collect();
            if factors.is_empty() {
                continue;
            }
            let total_lambda: f64 = factors.iter().map(|f| f.lambda).sum();
            if total_lambda > 1.0 {
                log::warn!("aggregate Lambda = {total_lambda} > 1 on mode {mode}");
            }
            let v: Complex64 = factors.iter().map(|f| f.lambda * f.gamma).sum();
            let u: Complex64 = factors.iter().map(|f| f.lambda * f.gamma.conj()).sum();
            let w: f64 = factors.iter().map(|f| f.lambda * f.gamma.norm_sqr()).sum();
            let op = normal_ordered_operator(self.truncation, total_lambda, v, u, w);
            apply_mode_operator(&mut work, &op, self.modes, mode, self.dim());
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b) in self.amps.iter().zip(&work) {
            acc += a.conj() * b;
        }
        clamp_real(acc * product.prefactor)
    }

    /// Photon-number distribution of a single-mode vector.
    pub fn photon_number_distribution(&self) -> Result<Vec<f64>> {
        if self.modes != 1 {
            return Err(Error::InvalidParameter(
                "photon-number distribution requires a single-mode vector".into(),
            ));
        }
        Ok(self.amps.iter().map(|a| a.norm_sqr()).collect())
    }

    /// Purity of the reduced state of one mode of a two-mode vector.
    pub fn reduced_purity(&self, mode: usize) -> Result<f64> {
        if self.modes != 2 || mode > 1 {
            return Err(Error::InvalidParameter(
                "reduced purity is implemented for two-mode vectors".into(),
            ));
        }
        let dim = self.dim();
        let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..dim {
                    let (a, b) = if mode == 0 {
                        (self.amps[i * dim + k], self.amps[j * dim + k])
                    } else {
                        (self.amps[k * dim + i], self.amps[k * dim + j])
                    };
                    acc += a * b.conj();
                }
                rho[(i, j)] = acc;
            }
        }
        Ok(rho.iter().map(|z| z.norm_sqr()).sum())
    }
}

impl NormalOrderState for FockVector {
    fn modes(&self) -> usize {
        self.modes
    }

    fn expect_product(&self, product: &FactorProduct) -> Result<f64> {
        self.fock_expectation(product)
    }
}

fn coherent_column(alpha: Complex64, truncation: usize) -> Vec<Complex64> {
    let mut col = Vec::with_capacity(truncation + 1);
    let mut v = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    col.push(v);
    for n in 1..=truncation {
        v *= alpha / (n as f64).sqrt();
        col.push(v);
    }
    col
}

/// Matrix of `exp(-w) exp(v a^dag) (1 - Lambda)^n exp(u a)` in the truncated
/// number basis.
fn normal_ordered_operator(
    truncation: usize,
    lambda_total: f64,
    v: Complex64,
    u: Complex64,
    w: f64,
) -> DMatrix<Complex64> {
    let dim = truncation + 1;
    let zero = Complex64::new(0.0, 0.0);
    // A = exp(u a): A[n-k][n] = u^k / k! * sqrt(n!/(n-k)!)
    let mut a_mat = DMatrix::<Complex64>::from_element(dim, dim, zero);
    for n in 0..dim {
        let mut entry = Complex64::new(1.0, 0.0);
        a_mat[(n, n)] = entry;
        for k in 1..=n {
            entry *= u / (k as f64) * ((n - k + 1) as f64).sqrt();
            a_mat[(n - k, n)] = entry;
        }
    }
    // B = exp(v a^dag): B[n+k][n] = v^k / k! * sqrt((n+k)!/n!)
    let mut b_mat = DMatrix::<Complex64>::from_element(dim, dim, zero);
    for n in 0..dim {
        let mut entry = Complex64::new(1.0, 0.0);
        b_mat[(n, n)] = entry;
        for k in 1..dim - n {
            entry *= v / (k as f64) * ((n + k) as f64).sqrt();
            b_mat[(n + k, n)] = entry;
        }
    }
    let base = 1.0 - lambda_total;
    let mut diag = DMatrix::<Complex64>::from_element(dim, dim, zero);
    let mut p = (-w).exp();
    for n in 0..dim {
        diag[(n, n)] = Complex64::new(p, 0.0);
        p *= base;
    }
    b_mat * diag * a_mat
}

fn apply_mode_operator(
    amps: &mut [Complex64],
    op: &DMatrix<Complex64>,
    modes: usize,
    mode: usize,
    dim: usize,
) {
    // stride of the target mode in row-major layout (last mode fastest)
    let stride = dim.pow((modes - 1 - mode) as u32);
    let block = stride * dim;
    let mut scratch = vec![Complex64::new(0.0, 0.0); dim];
    let total = amps.len();
    let mut base = 0;
    while base < total {
        for offset in 0..stride {
            let start = base + offset;
            for (np, s) in scratch.iter_mut().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for n in 0..dim {
                    acc += op[(np, n)] * amps[start + n * stride];
                }
                *s = acc;
            }
            for (n, s) in scratch.iter().enumerate() {
                amps[start + n * stride] = *s;
            }
        }
        base += block;
    }
}

/// Photoelectric statistics on a Fock vector: binomial loss at efficiency
/// `eta` convolved with Poisson dark counts at rate `nu`. Independent of the
/// coherent-state closed form.
pub fn photoelectric_from_fock(state: &FockVector, eta: f64, nu: f64, n_max: usize) -> Result<Vec<f64>> {
    let photon = state.photon_number_distribution()?;
    let mut out = vec![0.0; n_max + 1];
    for (m, pm) in photon.iter().enumerate() {
        if *pm == 0.0 {
            continue;
        }
        for (n, slot) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in 0..=n.min(m) {
                let bin = crate::math::choose(m, k) * eta.powi(k as i32) * (1.0 - eta).powi((m - k) as i32);
                let dark = if nu == 0.0 {
                    if n == k {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    nu.powi((n - k) as i32) / crate::math::ln_factorial(n - k).exp()
                };
                acc += bin * dark;
            }
            *slot += pm * acc * (-nu).exp();
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{make_cat, make_two_mode_cat, ExpFactor, Parity};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn vacuum_single_factor() {
        let vac = FockVector::from_superposition(
            &CoherentSuperposition::vacuum(1).unwrap(),
            10,
        )
        .unwrap();
        let gamma = c(0.8, -0.3);
        let lambda = 0.6;
        let p = FactorProduct::single(0, lambda, gamma).unwrap();
        let expected = (-lambda * gamma.norm_sqr()).exp();
        assert_relative_eq!(vac.fock_expectation(&p).unwrap(), expected, max_relative = 1e-12);
    }

    #[test]
    fn one_photon_zero_displacement() {
        let mut amps = vec![c(0.0, 0.0); 11];
        amps[1] = c(1.0, 0.0);
        let fock1 = FockVector::new(1, 10, amps).unwrap();
        let p = FactorProduct::single(0, 0.35, c(0.0, 0.0)).unwrap();
        assert_relative_eq!(fock1.fock_expectation(&p).unwrap(), 1.0 - 0.35, max_relative = 1e-12);
    }

    #[test]
    fn cross_oracle_on_cat_state() {
        let cat = make_cat(c(1.0, 0.0), Parity::Even).unwrap();
        let fock = FockVector::from_superposition(&cat, 40).unwrap();
        let p = FactorProduct::single(0, 0.4, c(0.5, 0.2)).unwrap();
        let exact = cat.expectation(&p).unwrap();
        let oracle = fock.fock_expectation(&p).unwrap();
        assert!((exact - oracle).abs() < 1e-9, "exact={exact} oracle={oracle}");
    }

    #[test]
    fn two_mode_odd_cat_is_entangled() {
        let cat = make_two_mode_cat(c(1.0, 0.0), Parity::Odd).unwrap();
        let fock = FockVector::from_superposition(&cat, 20).unwrap();
        let purity = fock.reduced_purity(0).unwrap();
        assert!(purity < 1.0 - 1e-3, "purity = {purity}");
        // product coherent state stays pure under reduction
        let prod = CoherentSuperposition::product_coherent(&[c(0.7, 0.0), c(-0.2, 0.4)]).unwrap();
        let fock_prod = FockVector::from_superposition(&prod, 20).unwrap();
        assert_relative_eq!(fock_prod.reduced_purity(1).unwrap(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn multi_factor_aggregation_matches_closed_form() {
        let alpha = c(0.9, -0.5);
        let state = CoherentSuperposition::coherent(alpha);
        let fock = FockVector::from_superposition(&state, 40).unwrap();
        let mut p = FactorProduct::identity();
        p.push(ExpFactor::new(0, 0.3, c(0.4, 0.1)).unwrap());
        p.push(ExpFactor::new(0, 0.25, c(-0.6, 0.8)).unwrap());
        let exact = state.expectation(&p).unwrap();
        let oracle = fock.fock_expectation(&p).unwrap();
        assert!((exact - oracle).abs() < 1e-9);
    }
}
