//! Click statistics, photoelectric statistics, and normally ordered click
//! moments for on-off detector arrays.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math::{choose, ln_choose, mixed_radix_tuples, KahanSum};
use crate::states::{CoherentSuperposition, ExpFactor, FactorProduct, NormalOrderState};

/// Probabilities more negative than this are a hard evaluation error; values
/// in `[-NEGATIVE_PROB_TOL, 0)` are clamped to zero and renormalized.
pub const NEGATIVE_PROB_TOL: f64 = 1e-9;
/// Normalization tolerance for exact distributions.
pub const NORMALIZATION_TOL: f64 = 1e-9;
/// Arrays larger than this are refused outright; the inclusion-exclusion
/// expansion is O(N^2) expectation calls per arm.
pub const MAX_APD_COUNT: usize = 256;

/// One click detector array: `N` APDs, quantum efficiency `eta`, dark count
/// rate `nu`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DetectorConfig {
    #[serde(rename = "N")]
    pub apd_count: usize,
    #[serde(rename = "eta")]
    pub efficiency: f64,
    #[serde(rename = "nu", default)]
    pub dark_rate: f64,
}

impl DetectorConfig {
    pub fn new(apd_count: usize, efficiency: f64, dark_rate: f64) -> Result<Self> {
        let cfg = Self {
            apd_count,
            efficiency,
            dark_rate,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.apd_count < 1 {
            return Err(Error::InvalidParameter("APD count must be at least 1".into()));
        }
        if self.apd_count > MAX_APD_COUNT {
            return Err(Error::InvalidParameter(format!(
                "APD count {} exceeds the supported maximum {}",
                self.apd_count, MAX_APD_COUNT
            )));
        }
        if !(0.0..=1.0).contains(&self.efficiency) {
            return Err(Error::InvalidParameter(format!(
                "efficiency must lie in [0, 1], got {}",
                self.efficiency
            )));
        }
        if !self.dark_rate.is_finite() || self.dark_rate < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "dark rate must be nonnegative, got {}",
                self.dark_rate
            )));
        }
        Ok(())
    }
}

/// What one detector sees after the port network: a signal mode, an intensity
/// fraction `kappa`, and a coherent displacement `gamma`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArmDescriptor {
    pub mode: usize,
    pub scale: f64,
    pub displacement: Complex64,
    pub detector: DetectorConfig,
}

impl ArmDescriptor {
    pub fn new(
        mode: usize,
        scale: f64,
        displacement: Complex64,
        detector: DetectorConfig,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&scale) {
            return Err(Error::InvalidParameter(format!(
                "intensity scale must lie in [0, 1], got {scale}"
            )));
        }
        detector.validate()?;
        Ok(Self {
            mode,
            scale,
            displacement,
            detector,
        })
    }

    /// Exponent per click factor and unit power: `kappa eta / N`.
    pub fn lambda_unit(&self) -> f64 {
        self.scale * self.detector.efficiency / self.detector.apd_count as f64
    }

    /// Same arm with the displacement rotated to phase `phi` (LO rotation).
    pub fn at_phase(&self, phi: f64) -> Self {
        let mut arm = *self;
        arm.displacement = Complex64::from_polar(self.displacement.norm(), phi);
        arm
    }

    /// Same arm with the displacement multiplied by `z`.
    pub fn with_displacement_scaled(&self, z: Complex64) -> Self {
        let mut arm = *self;
        arm.displacement *= z;
        arm
    }
}

/// Exact joint click-count distribution over `k_i in 0..=N_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClickDistribution {
    sizes: Vec<usize>,
    probs: Vec<f64>,
}

impl ClickDistribution {
    pub fn new(sizes: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        let expected: usize = sizes.iter().map(|n| n + 1).product();
        if probs.len() != expected {
            return Err(Error::InvalidParameter(format!(
                "expected {} probabilities, got {}",
                expected,
                probs.len()
            )));
        }
        let dist = Self { sizes, probs };
        dist.validated()
    }

    fn validated(mut self) -> Result<Self> {
        for (idx, p) in self.probs.iter_mut().enumerate() {
            if *p < -NEGATIVE_PROB_TOL {
                return Err(Error::NegativeProbability {
                    value: *p,
                    index: index_to_tuple(idx, &self.sizes),
                });
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let total: f64 = self.probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized(total));
        }
        for p in &mut self.probs {
            *p /= total;
        }
        Ok(self)
    }

    /// Detector sizes `(N_1, N_2, ...)`.
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Flattened probabilities; the last detector index varies fastest.
    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, ks: &[usize]) -> f64 {
        self.probs[tuple_to_index(ks, &self.sizes)]
    }

    /// Marginal distribution of one detector.
    pub fn marginal(&self, arm: usize) -> Result<ClickDistribution> {
        if arm >= self.sizes.len() {
            return Err(Error::InvalidParameter(format!("no arm {arm}")));
        }
        let n = self.sizes[arm];
        let mut probs = vec![0.0; n + 1];
        for (idx, p) in self.probs.iter().enumerate() {
            let tuple = index_to_tuple(idx, &self.sizes);
            probs[tuple[arm]] += p;
        }
        ClickDistribution::new(vec![n], probs)
    }

    /// Iterate `(index tuple, probability)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(|(idx, p)| (index_to_tuple(idx, &self.sizes), *p))
    }
}

pub(crate) fn tuple_to_index(ks: &[usize], sizes: &[usize]) -> usize {
    let mut idx = 0;
    for (k, n) in ks.iter().zip(sizes) {
        idx = idx * (n + 1) + k;
    }
    idx
}

pub(crate) fn index_to_tuple(mut idx: usize, sizes: &[usize]) -> Vec<usize> {
    let mut tuple = vec![0; sizes.len()];
    for (pos, n) in sizes.iter().enumerate().rev() {
        tuple[pos] = idx % (n + 1);
        idx /= n + 1;
    }
    tuple
}

/// Single-arm click statistics via the inclusion-exclusion expansion of
/// `(1 - e^{-x})^k` inside normal ordering.
pub fn click_statistics<S: NormalOrderState>(
    state: &S,
    arm: &ArmDescriptor,
) -> Result<ClickDistribution> {
    joint_click_statistics(state, std::slice::from_ref(arm))
}

/// Joint click statistics of several arms; marginals equal the single-arm
/// distributions.
pub fn joint_click_statistics<S: NormalOrderState>(
    state: &S,
    arms: &[ArmDescriptor],
) -> Result<ClickDistribution> {
    if arms.is_empty() {
        return Err(Error::InvalidParameter("at least one arm required".into()));
    }
    for arm in arms {
        arm.detector.validate()?;
        if arm.mode >= state.modes() {
            return Err(Error::InvalidParameter(format!(
                "arm references mode {} of a {}-mode state",
                arm.mode,
                state.modes()
            )));
        }
    }
    let sizes: Vec<usize> = arms.iter().map(|a| a.detector.apd_count).collect();

    // Pairwise-coherent states get the direct binomial form per pair,
    // C(N,k) w^{N-k} (1 - w)^k with a complex no-click amplitude w. It has no
    // alternating sum and stays accurate at large N, where inclusion-exclusion
    // cancels catastrophically.
    if let Some(pairs) = state.coherent_pairs() {
        let total: usize = sizes.iter().map(|n| n + 1).product();
        let mut acc = vec![Complex64::new(0.0, 0.0); total];
        for pair in &pairs {
            // Per-arm power tables w^p and (1 - w)^p for p = 0..=N.
            let tables: Vec<(Vec<Complex64>, Vec<Complex64>)> = arms
                .iter()
                .map(|arm| {
                    let v = (pair.bra[arm.mode].conj() - arm.displacement.conj())
                        * (pair.ket[arm.mode] - arm.displacement);
                    let w = (-arm.lambda_unit() * v
                        - Complex64::new(arm.detector.dark_rate, 0.0))
                    .exp();
                    let q = Complex64::new(1.0, 0.0) - w;
                    let n = arm.detector.apd_count;
                    let mut wp = Vec::with_capacity(n + 1);
                    let mut qp = Vec::with_capacity(n + 1);
                    wp.push(Complex64::new(1.0, 0.0));
                    qp.push(Complex64::new(1.0, 0.0));
                    for p in 0..n {
                        wp.push(wp[p] * w);
                        qp.push(qp[p] * q);
                    }
                    (wp, qp)
                })
                .collect();
            for (idx, slot) in acc.iter_mut().enumerate() {
                let ks = index_to_tuple(idx, &sizes);
                let mut z = pair.weight;
                for (i, &k) in ks.iter().enumerate() {
                    let (wp, qp) = &tables[i];
                    z *= choose(sizes[i], k) * wp[sizes[i] - k] * qp[k];
                }
                *slot += z;
            }
        }
        let probs = acc
            .into_iter()
            .map(crate::states::clamp_real)
            .collect::<Result<Vec<f64>>>()?;
        return ClickDistribution::new(sizes, probs);
    }

    // The expectation depends on arms only through s_i = N_i - k_i + j_i,
    // so cache it over s tuples.
    let mut cache: HashMap<Vec<usize>, f64> = HashMap::new();
    let mut expect_for = |s: &[usize]| -> Result<f64> {
        if let Some(v) = cache.get(s) {
            return Ok(*v);
        }
        let mut product = FactorProduct::identity();
        for (arm, &si) in arms.iter().zip(s) {
            if si > 0 {
                product.push(ExpFactor::new(
                    arm.mode,
                    si as f64 * arm.lambda_unit(),
                    arm.displacement,
                )?);
            }
        }
        let v = state.expect_product(&product)?;
        cache.insert(s.to_vec(), v);
        Ok(v)
    };

    let total: usize = sizes.iter().map(|n| n + 1).product();
    let mut probs = vec![0.0; total];
    for (idx, slot) in probs.iter_mut().enumerate() {
        let ks = index_to_tuple(idx, &sizes);
        let mut acc = KahanSum::new();
        for js in mixed_radix_tuples(&ks) {
            let mut log_coeff = 0.0;
            let mut sign = 1.0;
            let mut s = Vec::with_capacity(arms.len());
            for i in 0..arms.len() {
                let (n, k, j) = (sizes[i], ks[i], js[i]);
                log_coeff += ln_choose(n, k) + ln_choose(k, j);
                log_coeff -= (n - k + j) as f64 * arms[i].detector.dark_rate;
                if j % 2 == 1 {
                    sign = -sign;
                }
                s.push(n - k + j);
            }
            acc.add(sign * log_coeff.exp() * expect_for(&s)?);
        }
        *slot = acc.value();
    }
    ClickDistribution::new(sizes, probs)
}

/// Photoelectric counting statistics `p_n = <:(eta n + nu)^n e^{-(eta n + nu)} / n!:>`
/// in closed form for a single-mode coherent superposition.
pub fn photoelectric_statistics(
    state: &CoherentSuperposition,
    eta: f64,
    nu: f64,
    n_max: usize,
) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidParameter(format!("efficiency {eta}")));
    }
    if nu < 0.0 {
        return Err(Error::InvalidParameter(format!("dark rate {nu}")));
    }
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let p = state.expect_normal_fn(|z| {
            let arg = eta * z + nu;
            // (arg)^n / n! * e^{-arg}, built iteratively to avoid overflow
            let mut term = (-arg).exp();
            for k in 1..=n {
                term *= arg / k as f64;
            }
            term
        })?;
        out.push(p);
    }
    let tail = 1.0 - out.iter().sum::<f64>();
    if tail.abs() > 1e-10 {
        log::warn!("photoelectric tail mass {tail:.3e}; increase n_max");
    }
    Ok(out)
}

/// Joint normally ordered click moments `<: prod_i pi_i^{m_i} :>` with
/// `pi_i = N_i (1 - e^{-nu_i} : e^{-kappa_i eta_i n(gamma_i) / N_i} :)`,
/// by binomial expansion into factor-product expectations.
pub fn pi_moment<S: NormalOrderState>(
    state: &S,
    arms: &[ArmDescriptor],
    powers: &[usize],
) -> Result<f64> {
    if arms.len() != powers.len() {
        return Err(Error::InvalidParameter(
            "one power per arm is required".into(),
        ));
    }
    let mut acc = KahanSum::new();
    for js in mixed_radix_tuples(powers) {
        let mut log_coeff = 0.0;
        let mut sign = 1.0;
        let mut product = FactorProduct::identity();
        for (i, arm) in arms.iter().enumerate() {
            let (m, j) = (powers[i], js[i]);
            log_coeff += ln_choose(m, j) - j as f64 * arm.detector.dark_rate;
            if j % 2 == 1 {
                sign = -sign;
            }
            if j > 0 {
                product.push(ExpFactor::new(
                    arm.mode,
                    j as f64 * arm.lambda_unit(),
                    arm.displacement,
                )?);
            }
        }
        acc.add(sign * log_coeff.exp() * state.expect_product(&product)?);
    }
    let scale: f64 = arms
        .iter()
        .zip(powers)
        .map(|(a, m)| (a.detector.apd_count as f64).powi(*m as i32))
        .product();
    Ok(scale * acc.value())
}

/// Deficit moments `<:(N - pi)^m:> = (N e^{-nu})^m <: e^{-m kappa eta n(gamma)/N} :>`
/// of a single arm.
pub fn deficit_moment<S: NormalOrderState>(
    state: &S,
    arm: &ArmDescriptor,
    power: usize,
) -> Result<f64> {
    let n = arm.detector.apd_count as f64;
    let mut product = FactorProduct::identity();
    if power > 0 {
        product.push(ExpFactor::new(
            arm.mode,
            power as f64 * arm.lambda_unit(),
            arm.displacement,
        )?);
    }
    let scale = (n * (-arm.detector.dark_rate).exp()).powi(power as i32);
    Ok(scale * state.expect_product(&product)?)
}

/// Converts deficit moments `d_m = <:(N - pi)^m:>` for `m = 0..=K` into plain
/// pi moments `<:pi^m:>`.
pub fn pi_moments_from_deficit(deficit: &[f64], apd_count: usize) -> Vec<f64> {
    let n = apd_count as f64;
    (0..deficit.len())
        .map(|m| {
            let mut acc = KahanSum::new();
            for (k, d) in deficit.iter().take(m + 1).enumerate() {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                acc.add(sign * choose(m, k) * n.powi((m - k) as i32) * d);
            }
            acc.value()
        })
        .collect()
}

/// Moments recovered from a (measured or exact) click distribution, Eq.-(10)
/// style: `prod_i N_i^{m_i} sum_k prod_i [C(k_i, m_i)/C(N_i, m_i)] c_k`.
pub fn moments_from_statistics(dist: &ClickDistribution, powers: &[usize]) -> Result<f64> {
    if powers.len() != dist.sizes().len() {
        return Err(Error::InvalidParameter(
            "one power per detector is required".into(),
        ));
    }
    for (m, n) in powers.iter().zip(dist.sizes()) {
        if m > n {
            return Err(Error::InvalidParameter(format!(
                "moment order {m} exceeds APD count {n}"
            )));
        }
    }
    let mut acc = KahanSum::new();
    for (ks, p) in dist.iter() {
        if p == 0.0 {
            continue;
        }
        let mut weight = 1.0;
        let mut skip = false;
        for i in 0..powers.len() {
            let (k, m, n) = (ks[i], powers[i], dist.sizes()[i]);
            if k < m {
                skip = true;
                break;
            }
            weight *= (ln_choose(k, m) - ln_choose(n, m)).exp();
        }
        if !skip {
            acc.add(weight * p);
        }
    }
    let scale: f64 = dist
        .sizes()
        .iter()
        .zip(powers)
        .map(|(n, m)| (*n as f64).powi(*m as i32))
        .product();
    Ok(scale * acc.value())
}
