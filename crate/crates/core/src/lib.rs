//! Simulation and analysis of homodyne detection performed with arrays of
//! on-off avalanche photodiodes.
//!
//! The crate models states as finite superpositions (or mixtures) of
//! multimode coherent states, computes exact click-counting statistics and
//! normally ordered moments of the click observable, derives
//! nonclassicality criteria from moment matrices, folds in detector and
//! local-oscillator imperfections, and simulates finite measurement records
//! with bootstrap errors. An independent truncated number-basis oracle
//! cross-checks every expectation path.

pub mod engine;
pub mod error;
pub mod fock;
pub mod homodyne;
pub mod imperfections;
pub mod io;
pub mod math;
pub mod sampler;
pub mod states;
pub mod witnesses;

pub use engine::{
    click_statistics, deficit_moment, joint_click_statistics, moments_from_statistics,
    photoelectric_statistics, pi_moment, pi_moments_from_deficit, ArmDescriptor,
    ClickDistribution, DetectorConfig, MAX_APD_COUNT,
};
pub use error::{Error, Result};
pub use fock::{photoelectric_from_fock, FockVector};
pub use homodyne::{
    cross_pair_moment, difference_moment, eight_port_arms, four_port_arms, port_network_arms,
    sum_moment, two_mode_arms, unbalanced_arm, ArmRole, BeamSplitter, LocalOscillator, PortInput,
    QuadraturePair, SchemeArms,
};
pub use imperfections::{
    dark_count_decomposition_check, efficiency_sweep, mode_mismatch_parameters, saturation_probe,
    thermal_lo_expectation, thermal_pi_moments, thermal_variance_criterion, DarkCountReport,
    MismatchParameters, SaturationPoint, SpectralSetup, SpectralSetupFile, ThermalLo,
};
pub use io::{
    distribution_from_csv, distribution_to_csv, histogram_from_csv, histogram_to_csv,
    scheme_from_json, state_from_json, SchemeFile, StateFile,
};
pub use sampler::{
    bootstrap_criterion, estimate_moment, moment_from_histogram, sample, ClickHistogram,
    MomentEstimate, BOOTSTRAP_RESAMPLES,
};
pub use states::{
    make_cat, make_two_mode_cat, CoherentMixture, CoherentSuperposition, ExpFactor, FactorProduct,
    NormalOrderState, Parity, Term,
};
pub use witnesses::{
    cross_correlation_criterion, fourth_order_criterion, moment_matrix, nonlinear_squeezing,
    sum_variance, two_mode_criteria, variance_criterion, xp_covariance_criterion, CriterionResult,
    MomentMatrix, Verdict,
};
