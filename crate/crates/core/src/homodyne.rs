//! Port networks: map (signal, local oscillator, beam splitters) to the arm
//! descriptors consumed by the click engine.
//!
//! Vacuum input ports are eliminated analytically: normally ordered
//! expressions are insensitive to vacuum contributions, so no vacuum mode is
//! ever simulated.

use num_complex::Complex64;

use crate::engine::{pi_moment, ArmDescriptor, DetectorConfig};
use crate::error::{Error, Result};
use crate::math::{choose, KahanSum};
use crate::states::NormalOrderState;

const UNITARITY_TOL: f64 = 1e-10;

/// Beam splitter with `|t|^2 + |r|^2 = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BeamSplitter {
    t: Complex64,
    r: Complex64,
}

impl BeamSplitter {
    pub fn new(t: Complex64, r: Complex64) -> Result<Self> {
        let total = t.norm_sqr() + r.norm_sqr();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "|t|^2 + |r|^2 = {total}, expected 1"
            )));
        }
        Ok(Self { t, r })
    }

    pub fn balanced() -> Self {
        let v = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            t: Complex64::new(v, 0.0),
            r: Complex64::new(v, 0.0),
        }
    }

    /// Real-coefficient splitter from the transmittance `|t|^2`.
    pub fn from_transmittance(t_sq: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t_sq) {
            return Err(Error::InvalidParameter(format!("transmittance {t_sq}")));
        }
        Ok(Self {
            t: Complex64::new(t_sq.sqrt(), 0.0),
            r: Complex64::new((1.0 - t_sq).sqrt(), 0.0),
        })
    }

    pub fn t(&self) -> Complex64 {
        self.t
    }

    pub fn r(&self) -> Complex64 {
        self.r
    }
}

/// The coherent reference beam `|beta>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalOscillator {
    pub amplitude: Complex64,
}

impl LocalOscillator {
    pub fn new(amplitude: Complex64) -> Self {
        Self { amplitude }
    }

    pub fn with_phase(magnitude: f64, phase: f64) -> Self {
        Self {
            amplitude: Complex64::from_polar(magnitude, phase),
        }
    }
}

/// Role of an arm inside a scheme. The difference observable of a pair is
/// always `pi_plus - pi_minus` (resp. `pi_p_plus - pi_p_minus`), chosen so
/// the conjugate-pair identity `P(phi) = X(phi + pi/2)` holds exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArmRole {
    Plus,
    Minus,
    PPlus,
    PMinus,
}

/// Arms of a named scheme plus their role tags.
#[derive(Clone, Debug)]
pub struct SchemeArms {
    arms: Vec<(ArmRole, ArmDescriptor)>,
}

impl SchemeArms {
    pub(crate) fn new(arms: Vec<(ArmRole, ArmDescriptor)>) -> Result<Self> {
        // per-mode energy bookkeeping: sum of kappa <= 1
        let mut per_mode: std::collections::HashMap<usize, f64> = Default::default();
        for (_, arm) in &arms {
            *per_mode.entry(arm.mode).or_default() += arm.scale;
        }
        for (mode, kappa) in per_mode {
            if kappa > 1.0 + 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "arms on mode {mode} claim total intensity {kappa} > 1"
                )));
            }
        }
        Ok(Self { arms })
    }

    pub fn arms(&self) -> &[(ArmRole, ArmDescriptor)] {
        &self.arms
    }

    pub fn descriptors(&self) -> Vec<ArmDescriptor> {
        self.arms.iter().map(|(_, a)| *a).collect()
    }

    pub fn arm(&self, role: ArmRole) -> Result<ArmDescriptor> {
        self.arms
            .iter()
            .find(|(r, _)| *r == role)
            .map(|(_, a)| *a)
            .ok_or_else(|| Error::InvalidParameter(format!("scheme has no {role:?} arm")))
    }

    /// Rotates every displacement by `e^{i phi}` (sweeping the LO phase).
    pub fn at_phase(&self, phi: f64) -> Self {
        let rot = Complex64::from_polar(1.0, phi);
        Self {
            arms: self
                .arms
                .iter()
                .map(|(role, arm)| (*role, arm.with_displacement_scaled(rot)))
                .collect(),
        }
    }

    /// Per-mode LO phases; arms on mode `m` are rotated by `phases[m]`.
    pub fn at_mode_phases(&self, phases: &[f64]) -> Result<Self> {
        let arms = self
            .arms
            .iter()
            .map(|(role, arm)| {
                let phi = *phases.get(arm.mode).ok_or_else(|| {
                    Error::InvalidParameter(format!("no phase for mode {}", arm.mode))
                })?;
                Ok((*role, arm.with_displacement_scaled(Complex64::from_polar(1.0, phi))))
            })
            .collect::<Result<_>>()?;
        Self::new(arms)
    }

    /// Scales every displacement by a real factor (intensity sweeps).
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            arms: self
                .arms
                .iter()
                .map(|(role, arm)| {
                    (*role, arm.with_displacement_scaled(Complex64::new(s, 0.0)))
                })
                .collect(),
        }
    }
}

/// Both output arms of the general four-port scheme:
/// `n_1 = |t|^2 n(-r beta / t)`, `n_2 = |r|^2 n(t^* beta / r^*)`.
pub fn four_port_arms(
    bs: &BeamSplitter,
    lo: &LocalOscillator,
    d1: DetectorConfig,
    d2: DetectorConfig,
) -> Result<SchemeArms> {
    if bs.t.norm_sqr() < 1e-30 || bs.r.norm_sqr() < 1e-30 {
        return Err(Error::InvalidParameter(
            "four-port scheme requires t != 0 and r != 0; use unbalanced_arm for the degenerate split".into(),
        ));
    }
    let beta = lo.amplitude;
    let gamma1 = -bs.r * beta / bs.t;
    let gamma2 = bs.t.conj() * beta / bs.r.conj();
    let arm1 = ArmDescriptor::new(0, bs.t.norm_sqr(), gamma1, d1)?;
    let arm2 = ArmDescriptor::new(0, bs.r.norm_sqr(), gamma2, d2)?;
    // arm 1 carries gamma = -beta in the balanced case; tagging it Plus makes
    // X = pi_1 - pi_2 the sinh-quadrature with phi = arg beta.
    SchemeArms::new(vec![(ArmRole::Plus, arm1), (ArmRole::Minus, arm2)])
}

/// Single monitored output of the unbalanced four-port scheme:
/// `eta_t = |t|^2 eta`, `gamma = -r beta / t`.
pub fn unbalanced_arm(
    bs: &BeamSplitter,
    lo: &LocalOscillator,
    d: DetectorConfig,
) -> Result<ArmDescriptor> {
    if bs.t.norm_sqr() < 1e-30 {
        return Err(Error::InvalidParameter(
            "unbalanced arm requires t != 0".into(),
        ));
    }
    let gamma = -bs.r * lo.amplitude / bs.t;
    ArmDescriptor::new(0, bs.t.norm_sqr(), gamma, d)
}

/// The four arms of the balanced eight-port scheme, each with `kappa = 1/4`
/// and displacements `{-beta, +beta, -i beta, +i beta}`, tagged so that
/// `X = pi_plus - pi_minus` and `P = pi_p_plus - pi_p_minus` satisfy
/// `P(phi) = X(phi + pi/2)`.
pub fn eight_port_arms(lo: &LocalOscillator, d: DetectorConfig) -> Result<SchemeArms> {
    let beta = lo.amplitude;
    let i = Complex64::new(0.0, 1.0);
    let make = |gamma: Complex64| ArmDescriptor::new(0, 0.25, gamma, d);
    SchemeArms::new(vec![
        (ArmRole::Plus, make(-beta)?),
        (ArmRole::Minus, make(beta)?),
        (ArmRole::PPlus, make(-i * beta)?),
        (ArmRole::PMinus, make(i * beta)?),
    ])
}

/// Two balanced four-port schemes, one per signal mode.
pub fn two_mode_arms(
    lo1: &LocalOscillator,
    lo2: &LocalOscillator,
    d: DetectorConfig,
) -> Result<SchemeArms> {
    let b1 = lo1.amplitude;
    let b2 = lo2.amplitude;
    let make = |mode, gamma| ArmDescriptor::new(mode, 0.5, gamma, d);
    SchemeArms::new(vec![
        (ArmRole::Plus, make(0, -b1)?),
        (ArmRole::Minus, make(0, b1)?),
        (ArmRole::PPlus, make(1, -b2)?),
        (ArmRole::PMinus, make(1, b2)?),
    ])
}

/// Input port of a generic linear network.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PortInput {
    /// Signal mode `m` of the state.
    Signal(usize),
    /// Coherent local oscillator with the given amplitude.
    Lo(Complex64),
    /// Unused vacuum port.
    Vacuum,
}

/// Arms of an arbitrary unitary port network. Each output must couple to at
/// most one signal mode; six-port variants are expressible this way.
pub fn port_network_arms(
    unitary: &[Vec<Complex64>],
    inputs: &[PortInput],
    detectors: &[DetectorConfig],
) -> Result<Vec<ArmDescriptor>> {
    let n = unitary.len();
    if n == 0 || unitary.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidParameter("network matrix must be square".into()));
    }
    if inputs.len() != n || detectors.len() != n {
        return Err(Error::InvalidParameter(
            "one input label and one detector per port are required".into(),
        ));
    }
    // U^dag U = 1 within tolerance
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for row in unitary.iter().take(n) {
                acc += row[i].conj() * row[j];
            }
            let expected = if i == j { 1.0 } else { 0.0 };
            if (acc - expected).norm() > UNITARITY_TOL {
                return Err(Error::InvalidParameter(format!(
                    "network matrix is not unitary at ({i}, {j})"
                )));
            }
        }
    }
    let mut arms = Vec::with_capacity(n);
    for (row, det) in unitary.iter().zip(detectors) {
        let mut signal: Option<(usize, Complex64)> = None;
        let mut displacement = Complex64::new(0.0, 0.0);
        for (coeff, input) in row.iter().zip(inputs) {
            match input {
                PortInput::Signal(mode) => {
                    if coeff.norm_sqr() > 1e-30 {
                        if signal.is_some() {
                            return Err(Error::InvalidParameter(
                                "output port couples to more than one signal mode".into(),
                            ));
                        }
                        signal = Some((*mode, *coeff));
                    }
                }
                PortInput::Lo(beta) => displacement += coeff * beta,
                PortInput::Vacuum => {}
            }
        }
        let (mode, coeff) = signal.ok_or_else(|| {
            Error::InvalidParameter("output port is decoupled from every signal mode".into())
        })?;
        arms.push(ArmDescriptor::new(
            mode,
            coeff.norm_sqr(),
            -displacement / coeff,
            *det,
        )?);
    }
    Ok(arms)
}

/// Which tagged pair a difference observable is built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadraturePair {
    /// `X = pi_plus - pi_minus`
    X,
    /// `P = pi_p_plus - pi_p_minus`
    P,
}

impl QuadraturePair {
    pub fn roles(self) -> (ArmRole, ArmRole) {
        match self {
            QuadraturePair::X => (ArmRole::Plus, ArmRole::Minus),
            QuadraturePair::P => (ArmRole::PPlus, ArmRole::PMinus),
        }
    }
}

/// `<: (pi_plus - pi_minus)^m :>` by binomial expansion into joint moments.
pub fn difference_moment<S: NormalOrderState>(
    state: &S,
    scheme: &SchemeArms,
    pair: QuadraturePair,
    order: usize,
) -> Result<f64> {
    signed_pair_moment(state, scheme, pair, order, true)
}

/// `<: (pi_plus + pi_minus)^m :>`.
pub fn sum_moment<S: NormalOrderState>(
    state: &S,
    scheme: &SchemeArms,
    pair: QuadraturePair,
    order: usize,
) -> Result<f64> {
    signed_pair_moment(state, scheme, pair, order, false)
}

fn signed_pair_moment<S: NormalOrderState>(
    state: &S,
    scheme: &SchemeArms,
    pair: QuadraturePair,
    order: usize,
    difference: bool,
) -> Result<f64> {
    let (plus_role, minus_role) = pair.roles();
    let plus = scheme.arm(plus_role)?;
    let minus = scheme.arm(minus_role)?;
    let mut acc = KahanSum::new();
    for j in 0..=order {
        let sign = if difference && (order - j) % 2 == 1 {
            -1.0
        } else {
            1.0
        };
        let joint = pi_moment(state, &[plus, minus], &[j, order - j])?;
        acc.add(sign * choose(order, j) * joint);
    }
    Ok(acc.value())
}

/// `<: X P :>`-type mixed moment of two tagged pairs (first order each).
pub fn cross_pair_moment<S: NormalOrderState>(
    state: &S,
    scheme: &SchemeArms,
    first: QuadraturePair,
    second: QuadraturePair,
) -> Result<f64> {
    let (ap, am) = first.roles();
    let (bp, bm) = second.roles();
    let ap = scheme.arm(ap)?;
    let am = scheme.arm(am)?;
    let bp = scheme.arm(bp)?;
    let bm = scheme.arm(bm)?;
    Ok(pi_moment(state, &[ap, bp], &[1, 1])?
        - pi_moment(state, &[ap, bm], &[1, 1])?
        - pi_moment(state, &[am, bp], &[1, 1])?
        + pi_moment(state, &[am, bm], &[1, 1])?)
}
