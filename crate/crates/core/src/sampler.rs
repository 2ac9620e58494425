//! Monte Carlo simulation of click records and estimation of normally
//! ordered moments from finite samples.

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::ClickDistribution;
use crate::error::{Error, Result};
use crate::math::{choose, KahanSum};

/// Default number of bootstrap resamples for standard errors.
pub const BOOTSTRAP_RESAMPLES: usize = 200;

/// Empirical counts of joint click outcomes on one or more detector arrays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClickHistogram {
    /// APD counts `N_i` per array; each array has `N_i + 1` outcomes.
    pub sizes: Vec<usize>,
    /// Flat counts, same ordering as [`ClickDistribution`] (last array fastest).
    pub counts: Vec<u64>,
}

impl ClickHistogram {
    pub fn empty(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() || sizes.iter().any(|&s| s < 1) {
            return Err(Error::Validation(
                "histogram needs at least one array with N >= 1".into(),
            ));
        }
        let len = sizes.iter().map(|n| n + 1).product();
        Ok(Self {
            sizes,
            counts: vec![0; len],
        })
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn record(&mut self, outcome: &[usize]) -> Result<()> {
        if outcome.len() != self.sizes.len()
            || outcome.iter().zip(&self.sizes).any(|(k, n)| k > n)
        {
            return Err(Error::Validation(format!(
                "outcome {outcome:?} does not fit arrays {:?}",
                self.sizes
            )));
        }
        let idx = crate::engine::tuple_to_index(outcome, &self.sizes);
        self.counts[idx] += 1;
        Ok(())
    }

    /// Relative frequencies as a click distribution.
    pub fn frequencies(&self) -> Result<ClickDistribution> {
        let total = self.total();
        if total == 0 {
            return Err(Error::Validation("histogram is empty".into()));
        }
        let probs = self
            .counts
            .iter()
            .map(|&c| c as f64 / total as f64)
            .collect();
        ClickDistribution::new(self.sizes.clone(), probs)
    }
}

/// Draws `samples` joint click outcomes by inverse-CDF sampling of the exact
/// distribution. Deterministic for a fixed `seed`.
pub fn sample(dist: &ClickDistribution, samples: u64, seed: u64) -> Result<ClickHistogram> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<f64> = dist.probabilities().to_vec();
    let index = WeightedIndex::new(&weights)
        .map_err(|e| Error::Validation(format!("cannot sample distribution: {e}")))?;
    let mut hist = ClickHistogram::empty(dist.sizes().to_vec())?;
    for _ in 0..samples {
        hist.counts[index.sample(&mut rng)] += 1;
    }
    Ok(hist)
}

/// Plug-in estimator of a joint factorial click moment from frequencies:
/// replaces the exact `c_k` by empirical frequencies in the moment formula.
pub fn moment_from_histogram(hist: &ClickHistogram, powers: &[usize]) -> Result<f64> {
    moment_from_counts(&hist.sizes, &hist.counts, hist.total(), powers)
}

fn moment_from_counts(
    sizes: &[usize],
    counts: &[u64],
    total: u64,
    powers: &[usize],
) -> Result<f64> {
    if powers.len() != sizes.len() {
        return Err(Error::Validation(format!(
            "got {} powers for {} arrays",
            powers.len(),
            sizes.len()
        )));
    }
    if total == 0 {
        return Err(Error::Validation("histogram is empty".into()));
    }
    for (m, n) in powers.iter().zip(sizes) {
        if m > n {
            return Err(Error::Validation(format!(
                "moment order {m} exceeds array size {n}"
            )));
        }
    }
    let mut acc = KahanSum::default();
    for (idx, &count) in counts.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let ks = crate::engine::index_to_tuple(idx, sizes);
        let mut weight = count as f64 / total as f64;
        let mut skip = false;
        for ((&k, &m), &n) in ks.iter().zip(powers).zip(sizes) {
            if k < m {
                skip = true;
                break;
            }
            weight *= choose(k, m) / choose(n, m);
        }
        if skip {
            continue;
        }
        acc.add(weight);
    }
    // Apply the N_i^{m_i} prefactors once.
    let prefactor: f64 = sizes
        .iter()
        .zip(powers)
        .map(|(&n, &m)| (n as f64).powi(m as i32))
        .product();
    Ok(acc.value() * prefactor)
}

/// A moment estimate with a bootstrap standard error.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MomentEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
}

/// Plug-in moment estimate plus a seeded multinomial bootstrap standard
/// error (`resamples` redraws of the empirical distribution).
pub fn estimate_moment(
    hist: &ClickHistogram,
    powers: &[usize],
    resamples: usize,
    seed: u64,
) -> Result<MomentEstimate> {
    let value = moment_from_histogram(hist, powers)?;
    let total = hist.total();
    let replicates = bootstrap_replicates(hist, resamples, seed, |counts| {
        moment_from_counts(&hist.sizes, counts, total, powers)
    })?;
    Ok(MomentEstimate {
        value,
        std_error: std_dev(&replicates),
        samples: total,
    })
}

/// Bootstrap estimate of an arbitrary statistic of the histogram, returning
/// the point estimate on the data and the resampled standard error.
pub fn bootstrap_criterion<F>(
    hist: &ClickHistogram,
    resamples: usize,
    seed: u64,
    statistic: F,
) -> Result<MomentEstimate>
where
    F: Fn(&[u64]) -> Result<f64>,
{
    let value = statistic(&hist.counts)?;
    let replicates = bootstrap_replicates(hist, resamples, seed, statistic)?;
    Ok(MomentEstimate {
        value,
        std_error: std_dev(&replicates),
        samples: hist.total(),
    })
}

fn bootstrap_replicates<F>(
    hist: &ClickHistogram,
    resamples: usize,
    seed: u64,
    statistic: F,
) -> Result<Vec<f64>>
where
    F: Fn(&[u64]) -> Result<f64>,
{
    if resamples < 2 {
        return Err(Error::Validation("bootstrap needs at least 2 resamples".into()));
    }
    let total = hist.total();
    if total == 0 {
        return Err(Error::Validation("histogram is empty".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut replicates = Vec::with_capacity(resamples);
    let mut resampled = vec![0u64; hist.counts.len()];
    for _ in 0..resamples {
        multinomial_draw(&mut rng, &hist.counts, total, &mut resampled);
        replicates.push(statistic(&resampled)?);
    }
    Ok(replicates)
}

/// Draws a multinomial sample with probabilities `counts / total` using
/// sequential conditional binomials.
fn multinomial_draw(rng: &mut ChaCha8Rng, counts: &[u64], total: u64, out: &mut [u64]) {
    use rand_distr::Binomial;
    let mut remaining_trials = total;
    let mut remaining_mass = total as f64;
    for (slot, &c) in out.iter_mut().zip(counts) {
        if remaining_trials == 0 || remaining_mass <= 0.0 {
            *slot = 0;
            continue;
        }
        let p = (c as f64 / remaining_mass).clamp(0.0, 1.0);
        let draw = if p >= 1.0 {
            remaining_trials
        } else {
            Binomial::new(remaining_trials, p)
                .expect("valid binomial parameters")
                .sample(rng)
        };
        *slot = draw;
        remaining_trials -= draw;
        remaining_mass -= c as f64;
    }
    if remaining_trials > 0 {
        if let Some(last) = out.last_mut() {
            *last += remaining_trials;
        }
    }
}

fn std_dev(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    var.sqrt()
}
