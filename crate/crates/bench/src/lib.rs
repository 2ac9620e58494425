//! Shared fixtures for the benchmark targets.

use clickhd_core::*;
use num_complex::Complex64;

pub fn even_cat() -> CoherentSuperposition {
    make_cat(Complex64::new(1.0, 0.0), Parity::Even).unwrap()
}

pub fn fig4_arm(n: usize) -> ArmDescriptor {
    let bs = BeamSplitter::new(Complex64::new(0.8, 0.0), Complex64::new(0.6, 0.0)).unwrap();
    let lo = LocalOscillator::new(Complex64::new(4.0, 0.0));
    unbalanced_arm(&bs, &lo, DetectorConfig::new(n, 0.5, 0.0).unwrap()).unwrap()
}

pub fn eight_port() -> SchemeArms {
    let lo = LocalOscillator::new(Complex64::new(4.0, 0.0));
    eight_port_arms(&lo, DetectorConfig::new(8, 0.5, 0.0).unwrap()).unwrap()
}
