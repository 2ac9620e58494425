//! Quantum states as finite coherent-state superpositions.
//!
//! Every observable in this crate reduces to normally ordered products of
//! displaced exponentials `exp(-lambda (a - gamma)^dag (a - gamma))`, which
//! evaluate in closed form on coherent states through the substitution rule
//! `<a_i| :F(a^dag, a): |a_j> = F(a_i^*, a_j) <a_i|a_j>`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Norm tolerance enforced after construction.
pub const NORM_TOL: f64 = 1e-12;
/// Coherent overlaps below this magnitude are treated as exactly zero.
pub const OVERLAP_UNDERFLOW: f64 = 1e-300;
/// Imaginary residues below this are discarded; larger ones are an error.
pub const IM_RESIDUE_TOL: f64 = 1e-10;

/// One term `c |alpha_1, ..., alpha_M>` of a superposition.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coeff: Complex64,
    pub amplitudes: Vec<Complex64>,
}

/// A normalized finite superposition of multimode coherent states.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherentSuperposition {
    modes: usize,
    terms: Vec<Term>,
}

/// Cat-state parity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

/// Overlap `<a|b> = exp(-|a|^2/2 - |b|^2/2 + a^* b)`.
pub fn overlap(a: Complex64, b: Complex64) -> Complex64 {
    let z = -0.5 * a.norm_sqr() - 0.5 * b.norm_sqr() + (a.conj() * b).re;
    let phase = (a.conj() * b).im;
    let mag = z.exp();
    if mag < OVERLAP_UNDERFLOW {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::from_polar(mag, phase)
}

impl CoherentSuperposition {
    /// Builds and normalizes a superposition. Fails if the term list is
    /// empty, an amplitude is not finite, or the norm vanishes.
    pub fn new(modes: usize, terms: Vec<Term>) -> Result<Self> {
        if modes == 0 {
            return Err(Error::InvalidParameter("mode count must be positive".into()));
        }
        if terms.is_empty() {
            return Err(Error::InvalidParameter("term list must be non-empty".into()));
        }
        for term in &terms {
            if term.amplitudes.len() != modes {
                return Err(Error::InvalidParameter(format!(
                    "term has {} amplitudes, expected {}",
                    term.amplitudes.len(),
                    modes
                )));
            }
            if !term.coeff.re.is_finite() || !term.coeff.im.is_finite() {
                return Err(Error::InvalidParameter("non-finite coefficient".into()));
            }
            for a in &term.amplitudes {
                if !a.re.is_finite() || !a.im.is_finite() {
                    return Err(Error::InvalidParameter("non-finite amplitude".into()));
                }
            }
        }
        let mut state = Self { modes, terms };
        let norm_sq = state.norm_sqr();
        if !(norm_sq.is_finite()) || norm_sq < 1e-280 {
            return Err(Error::DegenerateState(format!(
                "superposition norm^2 = {norm_sq:.3e}"
            )));
        }
        let scale = norm_sq.sqrt().recip();
        for term in &mut state.terms {
            term.coeff *= scale;
        }
        debug_assert!((state.norm_sqr() - 1.0).abs() < NORM_TOL * 10.0);
        Ok(state)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// `<psi|psi>` via the pairwise overlap sum.
    pub fn norm_sqr(&self) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for ti in &self.terms {
            for tj in &self.terms {
                let mut z = ti.coeff.conj() * tj.coeff;
                for m in 0..self.modes {
                    z *= overlap(ti.amplitudes[m], tj.amplitudes[m]);
                }
                acc += z;
            }
        }
        acc.re
    }

    /// Single-mode coherent state `|alpha>`.
    pub fn coherent(alpha: Complex64) -> Self {
        Self {
            modes: 1,
            terms: vec![Term {
                coeff: Complex64::new(1.0, 0.0),
                amplitudes: vec![alpha],
            }],
        }
    }

    /// Multimode vacuum.
    pub fn vacuum(modes: usize) -> Result<Self> {
        Self::new(
            modes,
            vec![Term {
                coeff: Complex64::new(1.0, 0.0),
                amplitudes: vec![Complex64::new(0.0, 0.0); modes],
            }],
        )
    }

    /// Product of single-mode coherent states `|alpha_1, ..., alpha_M>`.
    pub fn product_coherent(alphas: &[Complex64]) -> Result<Self> {
        Self::new(
            alphas.len(),
            vec![Term {
                coeff: Complex64::new(1.0, 0.0),
                amplitudes: alphas.to_vec(),
            }],
        )
    }

    /// Rescales all coherent amplitudes by `s` and renormalizes.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                coeff: t.coeff,
                amplitudes: t.amplitudes.iter().map(|a| a * s).collect(),
            })
            .collect();
        Self::new(self.modes, terms)
    }

    /// Evaluates `<: prod_f exp(-lambda_f (a_m - gamma_f)^dag (a_m - gamma_f)) :>`
    /// exactly by substituting coherent amplitudes for the mode operators.
    pub fn expectation(&self, product: &FactorProduct) -> Result<f64> {
        for f in &product.factors {
            if f.mode >= self.modes {
                return Err(Error::InvalidParameter(format!(
                    "factor mode {} out of range for {}-mode state",
                    f.mode, self.modes
                )));
            }
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for ti in &self.terms {
            for tj in &self.terms {
                let mut z = ti.coeff.conj() * tj.coeff;
                for m in 0..self.modes {
                    z *= overlap(ti.amplitudes[m], tj.amplitudes[m]);
                }
                if z.norm_sqr() == 0.0 {
                    continue;
                }
                let mut exponent = Complex64::new(0.0, 0.0);
                for f in &product.factors {
                    let left = ti.amplitudes[f.mode].conj() - f.gamma.conj();
                    let right = tj.amplitudes[f.mode] - f.gamma;
                    exponent -= f.lambda * left * right;
                }
                acc += z * exponent.exp();
            }
        }
        acc *= product.prefactor;
        clamp_real(acc)
    }

    /// Evaluates `<: g(n_hat) :>` for a single-mode state, substituting the
    /// complex product `a_i^* a_j` for the number operator.
    pub fn expect_normal_fn<F>(&self, g: F) -> Result<f64>
    where
        F: Fn(Complex64) -> Complex64,
    {
        if self.modes != 1 {
            return Err(Error::InvalidParameter(
                "normally ordered number-operator functions require a single-mode state".into(),
            ));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for ti in &self.terms {
            for tj in &self.terms {
                let ov = overlap(ti.amplitudes[0], tj.amplitudes[0]);
                let z = ti.coeff.conj() * tj.coeff * ov;
                if z.norm_sqr() == 0.0 {
                    continue;
                }
                acc += z * g(ti.amplitudes[0].conj() * tj.amplitudes[0]);
            }
        }
        clamp_real(acc)
    }
}

pub(crate) fn clamp_real(z: Complex64) -> Result<f64> {
    let tol = IM_RESIDUE_TOL * (1.0 + z.re.abs());
    if z.im.abs() > tol {
        return Err(Error::ImaginaryResidue {
            residue: z.im.abs(),
            tol,
        });
    }
    Ok(z.re)
}

/// Even or odd coherent state `(|alpha> +/- |-alpha>) / sqrt(2[1 +/- exp(-2|alpha|^2)])`.
pub fn make_cat(alpha: Complex64, parity: Parity) -> Result<CoherentSuperposition> {
    if parity == Parity::Odd && alpha.norm_sqr() == 0.0 {
        return Err(Error::DegenerateState(
            "odd cat state at alpha = 0 has vanishing norm".into(),
        ));
    }
    CoherentSuperposition::new(
        1,
        vec![
            Term {
                coeff: Complex64::new(1.0, 0.0),
                amplitudes: vec![alpha],
            },
            Term {
                coeff: Complex64::new(parity.sign(), 0.0),
                amplitudes: vec![-alpha],
            },
        ],
    )
}

/// Two-mode cat state `(|alpha,alpha> +/- |-alpha,-alpha>) / sqrt(2[1 +/- exp(-4|alpha|^2)])`.
pub fn make_two_mode_cat(alpha: Complex64, parity: Parity) -> Result<CoherentSuperposition> {
    if parity == Parity::Odd && alpha.norm_sqr() == 0.0 {
        return Err(Error::DegenerateState(
            "odd two-mode cat state at alpha = 0 has vanishing norm".into(),
        ));
    }
    CoherentSuperposition::new(
        2,
        vec![
            Term {
                coeff: Complex64::new(1.0, 0.0),
                amplitudes: vec![alpha, alpha],
            },
            Term {
                coeff: Complex64::new(parity.sign(), 0.0),
                amplitudes: vec![-alpha, -alpha],
            },
        ],
    )
}

/// One normally ordered factor `exp(-lambda (a_m - gamma)^dag (a_m - gamma))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpFactor {
    pub mode: usize,
    pub lambda: f64,
    pub gamma: Complex64,
}

impl ExpFactor {
    pub fn new(mode: usize, lambda: f64, gamma: Complex64) -> Result<Self> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "lambda must be finite and nonnegative, got {lambda}"
            )));
        }
        Ok(Self { mode, lambda, gamma })
    }
}

/// Product of displaced-exponential factors with a real prefactor; the
/// universal currency for click statistics and moment expansions.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FactorProduct {
    pub factors: Vec<ExpFactor>,
    pub prefactor: f64,
}

impl FactorProduct {
    /// The identity (empty product).
    pub fn identity() -> Self {
        Self {
            factors: Vec::new(),
            prefactor: 1.0,
        }
    }

    pub fn single(mode: usize, lambda: f64, gamma: Complex64) -> Result<Self> {
        Ok(Self {
            factors: vec![ExpFactor::new(mode, lambda, gamma)?],
            prefactor: 1.0,
        })
    }

    pub fn push(&mut self, factor: ExpFactor) {
        self.factors.push(factor);
    }

    /// Aggregate exponent `Lambda_m = sum of lambda_f` on mode `m`.
    pub fn total_lambda(&self, mode: usize) -> f64 {
        self.factors
            .iter()
            .filter(|f| f.mode == mode)
            .map(|f| f.lambda)
            .sum()
    }
}

/// A classical mixture (weight list) over coherent superpositions.
/// Normally ordered moments are linear in the state, so mixtures only need
/// weighted expectation values.
#[derive(Clone, Debug)]
pub struct CoherentMixture {
    components: Vec<(f64, CoherentSuperposition)>,
}

impl CoherentMixture {
    pub fn new(components: Vec<(f64, CoherentSuperposition)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidParameter("mixture must be non-empty".into()));
        }
        let modes = components[0].1.modes();
        let mut total = 0.0;
        for (w, state) in &components {
            if !w.is_finite() || *w < 0.0 {
                return Err(Error::InvalidParameter(format!("mixture weight {w}")));
            }
            if state.modes() != modes {
                return Err(Error::InvalidParameter(
                    "mixture components must share the mode count".into(),
                ));
            }
            total += w;
        }
        if total <= 0.0 {
            return Err(Error::InvalidParameter("mixture weights sum to zero".into()));
        }
        Ok(Self {
            components: components
                .into_iter()
                .map(|(w, s)| (w / total, s))
                .collect(),
        })
    }

    pub fn components(&self) -> &[(f64, CoherentSuperposition)] {
        &self.components
    }
}

/// One cross term `weight |ket><bra|` of a pairwise-coherent decomposition.
/// The vacuum overlap `<bra|ket>` is already folded into `weight`, so a
/// normally ordered expectation is the weighted sum of plain substitutions
/// `a_m^dag -> bra_m^*`, `a_m -> ket_m`.
#[derive(Clone, Debug)]
pub struct CoherentPair {
    pub weight: Complex64,
    pub bra: Vec<Complex64>,
    pub ket: Vec<Complex64>,
}

/// Anything that can evaluate normally ordered displaced-exponential products.
pub trait NormalOrderState: Sync {
    fn modes(&self) -> usize;
    fn expect_product(&self, product: &FactorProduct) -> Result<f64>;

    /// Pairwise-coherent decomposition of the state, if one is available.
    /// States that provide it let click statistics use the direct binomial
    /// form `C(N,k) w^{N-k} (1 - w)^k` per pair, which stays accurate at
    /// large `N` where the alternating inclusion-exclusion sum cancels
    /// catastrophically.
    fn coherent_pairs(&self) -> Option<Vec<CoherentPair>> {
        None
    }
}

impl NormalOrderState for CoherentSuperposition {
    fn modes(&self) -> usize {
        self.modes
    }

    fn expect_product(&self, product: &FactorProduct) -> Result<f64> {
        self.expectation(product)
    }

    fn coherent_pairs(&self) -> Option<Vec<CoherentPair>> {
        let mut pairs = Vec::with_capacity(self.terms.len() * self.terms.len());
        for ti in &self.terms {
            for tj in &self.terms {
                let mut weight = ti.coeff.conj() * tj.coeff;
                for m in 0..self.modes {
                    weight *= overlap(ti.amplitudes[m], tj.amplitudes[m]);
                }
                if weight.norm_sqr() == 0.0 {
                    continue;
                }
                pairs.push(CoherentPair {
                    weight,
                    bra: ti.amplitudes.clone(),
                    ket: tj.amplitudes.clone(),
                });
            }
        }
        Some(pairs)
    }
}

impl NormalOrderState for CoherentMixture {
    fn modes(&self) -> usize {
        self.components[0].1.modes()
    }

    fn expect_product(&self, product: &FactorProduct) -> Result<f64> {
        let mut acc = 0.0;
        for (w, state) in &self.components {
            acc += w * state.expectation(product)?;
        }
        Ok(acc)
    }

    fn coherent_pairs(&self) -> Option<Vec<CoherentPair>> {
        let mut pairs = Vec::new();
        for (w, state) in &self.components {
            for mut pair in state.coherent_pairs()? {
                pair.weight *= w;
                pairs.push(pair);
            }
        }
        Some(pairs)
    }
}

impl<T: NormalOrderState + ?Sized> NormalOrderState for &T {
    fn modes(&self) -> usize {
        (**self).modes()
    }

    fn expect_product(&self, product: &FactorProduct) -> Result<f64> {
        (**self).expect_product(product)
    }

    fn coherent_pairs(&self) -> Option<Vec<CoherentPair>> {
        (**self).coherent_pairs()
    }
}
