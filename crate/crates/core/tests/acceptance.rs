//! Acceptance suite: sign-level reproduction of every published figure plus
//! oracle-equivalence and robustness property checks. Each test prints one
//! pass/fail line.

// Negated comparisons such as `!(v < tol)` are deliberate: they also fail
// when `v` is NaN, which a flipped `>=` would silently accept.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use clickhd_core::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn report(id: &str, body: impl FnOnce() -> std::result::Result<(), String>) {
    match body() {
        Ok(()) => println!("acceptance {id}: PASS"),
        Err(msg) => {
            println!("acceptance {id}: FAIL ({msg})");
            panic!("acceptance {id} failed: {msg}");
        }
    }
}

macro_rules! check {
    ($cond:expr, $($arg:tt)*) => {
        if !$cond {
            return Err(format!($($arg)*));
        }
    };
}

fn fig4_arm(eta: f64) -> ArmDescriptor {
    let bs = BeamSplitter::new(c(0.8, 0.0), c(0.6, 0.0)).unwrap();
    let lo = LocalOscillator::new(c(4.0, 0.0));
    unbalanced_arm(&bs, &lo, DetectorConfig::new(8, eta, 0.0).unwrap()).unwrap()
}

fn grid(points: usize) -> impl Iterator<Item = f64> {
    (0..points).map(move |i| 2.0 * PI * i as f64 / points as f64)
}

/// Degree-normalized negativity of the order-4 determinant: `det M^(4)` has
/// total pi-degree 6, so its cube root carries the same pi^2 units as the
/// variance and the two are comparable.
fn normalized_det4(value: f64) -> f64 {
    -(-value).max(0.0).powf(1.0 / 3.0)
}

#[test]
fn criterion_01_direct_statistics() {
    report("01 direct-statistics", || {
        // Coherent alpha = 2, N = 8, eta = 1, nu = 0: click statistics is the
        // binomial with p = 1 - e^{-1/2}.
        let state = CoherentSuperposition::coherent(c(2.0, 0.0));
        let det = DetectorConfig::new(8, 1.0, 0.0).unwrap();
        let arm = ArmDescriptor::new(0, 1.0, c(0.0, 0.0), det).unwrap();
        let dist = click_statistics(&state, &arm).map_err(|e| e.to_string())?;
        let p = 1.0 - (-0.5f64).exp();
        for k in 0..=8usize {
            let expected = math::choose(8, k) * p.powi(k as i32) * (1.0 - p).powi(8 - k as i32);
            let got = dist.prob(&[k]);
            check!(
                (got - expected).abs() < 1e-12,
                "binomial mismatch at k={k}: {got} vs {expected}"
            );
        }

        // Even (odd) cat photoelectric statistics vanish on odd (even) n.
        for (parity, bad) in [(Parity::Even, 1usize), (Parity::Odd, 0usize)] {
            let cat = make_cat(c(2.0, 0.0), parity).map_err(|e| e.to_string())?;
            let pe = photoelectric_statistics(&cat, 1.0, 0.0, 40).map_err(|e| e.to_string())?;
            for (n, prob) in pe.iter().enumerate() {
                if n % 2 == bad {
                    check!(prob.abs() < 1e-12, "{parity:?} cat has p_{n} = {prob}");
                }
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_02_variance_phase_scan() {
    report("02 variance-phase-scan", || {
        let arm = fig4_arm(0.5);
        let even = make_cat(c(1.0, 0.0), Parity::Even).unwrap();
        let odd = make_cat(c(1.0, 0.0), Parity::Odd).unwrap();
        for phi in [PI / 2.0, 3.0 * PI / 2.0] {
            let v = variance_criterion(&even, &arm, phi)
                .map_err(|e| e.to_string())?
                .value;
            check!(v < -1e-6, "even cat at phi={phi}: {v}");
        }
        for phi in grid(256) {
            let v = variance_criterion(&odd, &arm, phi)
                .map_err(|e| e.to_string())?
                .value;
            check!(v >= -1e-9, "odd cat at phi={phi}: {v}");
        }
        Ok(())
    });
}

#[test]
fn criterion_03_order_and_apd_scaling() {
    report("03 order-and-apd-scaling", || {
        let even = make_cat(c(1.0, 0.0), Parity::Even).unwrap();
        let bs = BeamSplitter::new(c(0.8, 0.0), c(0.6, 0.0)).unwrap();
        let lo = LocalOscillator::new(c(4.0, 0.0));
        let ns = [4usize, 8, 16, 32, 64, 128];
        let mut v2 = Vec::new();
        let mut d4 = Vec::new();
        for &n in &ns {
            let det = DetectorConfig::new(n, 0.5, 0.0).unwrap();
            let arm = unbalanced_arm(&bs, &lo, det).unwrap();
            v2.push(
                variance_criterion(&even, &arm, PI / 2.0)
                    .map_err(|e| e.to_string())?
                    .value,
            );
            d4.push(
                fourth_order_criterion(&even, &arm, PI / 2.0)
                    .map_err(|e| e.to_string())?
                    .value,
            );
        }
        // Comparison at N = 8 in matched pi^2 units.
        check!(d4[1] < 0.0, "fourth-order determinant positive at N=8");
        check!(
            normalized_det4(d4[1]).abs() > v2[1].abs(),
            "fourth order not more pronounced at N=8: {} vs {}",
            normalized_det4(d4[1]),
            v2[1]
        );
        // Monotone trend in N for both negativities.
        for w in v2.windows(2) {
            check!(w[1] < w[0], "variance trend broken: {w:?}");
        }
        for w in d4.windows(2) {
            check!(
                normalized_det4(w[1]) < normalized_det4(w[0]),
                "fourth-order trend broken: {w:?}"
            );
        }
        // Convergence toward the photoelectric limit: N=128 within 10% of N=64.
        let rel2 = ((v2[5] - v2[4]) / v2[5]).abs();
        let rel4 = ((normalized_det4(d4[5]) - normalized_det4(d4[4])) / normalized_det4(d4[5])).abs();
        check!(rel2 < 0.10, "variance not converged: {rel2}");
        check!(rel4 < 0.10, "fourth order not converged: {rel4}");
        Ok(())
    });
}

#[test]
fn criterion_04_balanced_difference_and_sum() {
    report("04 balanced-difference-and-sum", || {
        let det = DetectorConfig::new(8, 0.5, 0.0).unwrap();
        let lo = LocalOscillator::new(c(4.0, 0.0));
        let scheme = four_port_arms(&BeamSplitter::balanced(), &lo, det, det).unwrap();
        let even = make_cat(c(1.0, 0.0), Parity::Even).unwrap();
        let odd = make_cat(c(1.0, 0.0), Parity::Odd).unwrap();
        let coherent = CoherentSuperposition::coherent(c(1.0, 0.0));

        let mut nl_min = f64::INFINITY;
        let mut sum_min = f64::INFINITY;
        for phi in grid(256) {
            nl_min = nl_min.min(
                nonlinear_squeezing(&even, &scheme, phi)
                    .map_err(|e| e.to_string())?
                    .value,
            );
            sum_min = sum_min.min(
                sum_variance(&odd, &scheme, phi)
                    .map_err(|e| e.to_string())?
                    .value,
            );
            let nl_c = nonlinear_squeezing(&coherent, &scheme, phi)
                .map_err(|e| e.to_string())?
                .value;
            let sv_c = sum_variance(&coherent, &scheme, phi)
                .map_err(|e| e.to_string())?
                .value;
            check!(nl_c >= -1e-9, "coherent squeezing {nl_c} at phi={phi}");
            check!(sv_c >= -1e-9, "coherent sum variance {sv_c} at phi={phi}");
        }
        check!(nl_min < 0.0, "no nonlinear squeezing for even cat: {nl_min}");
        check!(sum_min < 0.0, "no sub-shot sum variance for odd cat: {sum_min}");
        Ok(())
    });
}

#[test]
fn criterion_05_thermal_lo() {
    report("05 thermal-lo", || {
        let arm = fig4_arm(1.0);
        let even = make_cat(c(1.0, 0.0), Parity::Even).unwrap();
        let mut negativities = Vec::new();
        for i in 0..=10 {
            let n_bar = 0.05 * i as f64;
            let v = imperfections::thermal_variance_criterion(&even, &arm, PI / 2.0, n_bar)
                .map_err(|e| e.to_string())?;
            negativities.push((n_bar, (-v).max(0.0)));
        }
        let base = negativities[0].1;
        check!(base > 0.0, "no negativity at n_bar = 0");
        // Negativity magnitude decreases monotonically while present.
        let mut last_neg = 0usize;
        for (i, w) in negativities.windows(2).enumerate() {
            if w[1].1 > 0.0 {
                check!(w[1].1 < w[0].1, "negativity grew at {:?}", w[1]);
                last_neg = i + 1;
            }
        }
        check!(last_neg > 0, "negativity vanished immediately");
        let (n_last, mag_last) = negativities[last_neg];
        check!(
            mag_last < 0.1 * base,
            "residual negativity at n_bar={n_last}: {mag_last} vs base {base}"
        );

        // Closed form against Gauss-Hermite on the exponents actually used.
        for m in 1..=2usize {
            let lambda = m as f64 * arm.lambda_unit();
            for n_bar in [0.1, 0.3, 0.5] {
                let arm_rot = arm.at_phase(PI / 2.0);
                let closed =
                    thermal_lo_expectation(&even, lambda, arm_rot.displacement, n_bar)
                        .map_err(|e| e.to_string())?;
                let numeric = imperfections::thermal_lo_expectation_numeric(
                    &even,
                    lambda,
                    arm_rot.displacement,
                    n_bar,
                    imperfections::GH_ORDER,
                )
                .map_err(|e| e.to_string())?;
                check!(
                    (closed - numeric).abs() < 1e-7,
                    "m={m}, n_bar={n_bar}: closed {closed} vs quadrature {numeric}"
                );
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_06_eight_port() {
    report("06 eight-port", || {
        let det = DetectorConfig::new(8, 0.5, 0.0).unwrap();
        let lo = LocalOscillator::new(c(4.0, 0.0));
        let scheme = eight_port_arms(&lo, det).unwrap();
        let even = make_cat(c(1.0, 0.0), Parity::Even).unwrap();

        let mut x_neg = 0usize;
        let mut p_neg = 0usize;
        for phi in grid(64) {
            let xp = xp_covariance_criterion(&even, &scheme, phi)
                .map_err(|e| e.to_string())?
                .value;
            check!(xp < 0.0, "covariance criterion nonnegative at phi={phi}: {xp}");
            let rotated = scheme.at_phase(phi);
            let vx = witnesses::pair_variance(&even, &rotated, QuadraturePair::X)
                .map_err(|e| e.to_string())?;
            let vp = witnesses::pair_variance(&even, &rotated, QuadraturePair::P)
                .map_err(|e| e.to_string())?;
            if vx < 0.0 {
                x_neg += 1;
            }
            if vp < 0.0 {
                p_neg += 1;
            }
        }
        check!(
            x_neg > 0 && x_neg < 64,
            "X variance negative on {x_neg}/64 points, expected proper subset"
        );
        check!(
            p_neg > 0 && p_neg < 64,
            "P variance negative on {p_neg}/64 points, expected proper subset"
        );

        // Conjugate-pair identity: P moments at phi equal X moments at phi + pi/2.
        for phi in grid(16) {
            for m in 1..=2usize {
                let p_m = difference_moment(&even, &scheme.at_phase(phi), QuadraturePair::P, m)
                    .map_err(|e| e.to_string())?;
                let x_m = difference_moment(
                    &even,
                    &scheme.at_phase(phi + PI / 2.0),
                    QuadraturePair::X,
                    m,
                )
                .map_err(|e| e.to_string())?;
                check!(
                    (p_m - x_m).abs() < 1e-10,
                    "conjugate identity broken at phi={phi}, m={m}: {p_m} vs {x_m}"
                );
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_07_two_mode() {
    report("07 two-mode", || {
        let det = DetectorConfig::new(8, 0.5, 0.0).unwrap();
        let lo = LocalOscillator::new(c(4.0, 0.0));
        let scheme = two_mode_arms(&lo, &lo, det).unwrap();
        let cat = make_two_mode_cat(c(1.0, 0.0), Parity::Even).unwrap();

        let n = 64usize;
        let mut minor_neg = 0usize;
        for i in 0..n {
            let p1 = 2.0 * PI * i as f64 / n as f64;
            for j in 0..n {
                let p2 = 2.0 * PI * j as f64 / n as f64;
                let (_, _, minor) =
                    two_mode_criteria(&cat, &scheme, p1, p2).map_err(|e| e.to_string())?;
                if minor.value < 0.0 {
                    minor_neg += 1;
                }
            }
        }
        let frac = minor_neg as f64 / (n * n) as f64;
        check!(frac >= 0.90, "covariance minor negative on only {frac:.3} of grid");

        // Single-mode variances negative only near pi/2 and 3pi/2 (+- 4 grid
        // steps around indices 16 and 48 on the 64-point grid).
        let mut neg_indices = Vec::new();
        for i in 0..n {
            let p1 = 2.0 * PI * i as f64 / n as f64;
            let (v1, _, _) = two_mode_criteria(&cat, &scheme, p1, 0.0).map_err(|e| e.to_string())?;
            if v1.value < 0.0 {
                neg_indices.push(i);
            }
        }
        check!(neg_indices.contains(&16), "no negativity at phi = pi/2");
        check!(neg_indices.contains(&48), "no negativity at phi = 3pi/2");
        for &i in &neg_indices {
            let near = (i as i64 - 16).abs() <= 4 || (i as i64 - 48).abs() <= 4;
            check!(near, "variance negative away from pi/2, 3pi/2 at index {i}");
        }
        Ok(())
    });
}

#[test]
fn criterion_08_congruence_suite() {
    report("08 congruence-suite", || {
        let mut rng = ChaCha8Rng::seed_from_u64(80);
        for case in 0..50 {
            // Random classical mixture of up to 3 coherent states.
            let n_parts = rng.gen_range(1..=3);
            let components: Vec<(f64, CoherentSuperposition)> = (0..n_parts)
                .map(|_| {
                    let a = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                    (rng.gen_range(0.1..1.0), CoherentSuperposition::coherent(a))
                })
                .collect();
            let mixture = CoherentMixture::new(components).map_err(|e| e.to_string())?;
            let det = DetectorConfig::new(8, rng.gen_range(0.3..1.0), rng.gen_range(0.0..0.2))
                .map_err(|e| e.to_string())?;
            let gamma = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let arm = ArmDescriptor::new(0, 1.0, gamma, det).map_err(|e| e.to_string())?;

            let canonical = moment_matrix(&mixture, &arm, 4, 0.0, 1.0).map_err(|e| e.to_string())?;
            let m1 = canonical.entries[(0, 1)];
            let n = det.apd_count as f64;
            let variants = [
                (n, -1.0),
                (-m1, 1.0),
                (rng.gen_range(-4.0..4.0), rng.gen_range(0.2..2.0)),
            ];
            for (x, y) in variants {
                let variant = moment_matrix(&mixture, &arm, 4, x, y).map_err(|e| e.to_string())?;
                let t = witnesses::congruence_transform(x, y, 3).map_err(|e| e.to_string())?;
                let rebuilt = &t * &canonical.entries * t.transpose();
                for i in 0..3 {
                    for j in 0..3 {
                        let dev = (variant.entries[(i, j)] - rebuilt[(i, j)]).abs();
                        check!(
                            dev < 1e-9,
                            "case {case} variant ({x},{y}) entry ({i},{j}) off by {dev}"
                        );
                    }
                }
                check!(
                    variant.is_psd(1e-9) == canonical.is_psd(1e-9),
                    "case {case}: PSD status differs for variant ({x},{y})"
                );
            }
        }
        Ok(())
    });
}

fn random_spectral_setup(rng: &mut ChaCha8Rng, matched: bool) -> SpectralSetup {
    let n = 201;
    let omega: Vec<f64> = (0..n).map(|i| -10.0 + 20.0 * i as f64 / (n - 1) as f64).collect();
    let step = omega[1] - omega[0];
    let response: Vec<f64> = omega
        .iter()
        .map(|w| 1.0 + 0.5 * (rng.gen_range(0.1..1.0) * w).cos().powi(2))
        .collect();
    let profile = |center: f64, width: f64, response: &[f64], omega: &[f64]| {
        // normalized in the plain L2 sense required by SpectralSetup
        let raw: Vec<f64> = omega
            .iter()
            .map(|w| (-(w - center).powi(2) / (2.0 * width * width)).exp())
            .collect();
        let _ = response;
        let norm: f64 = math::trapezoid(&raw.iter().map(|v| v * v).collect::<Vec<_>>(), step);
        raw.into_iter()
            .map(|v| Complex64::new(v / norm.sqrt(), 0.0))
            .collect::<Vec<_>>()
    };
    let f_si = profile(rng.gen_range(-1.0..1.0), rng.gen_range(0.5..2.0), &response, &omega);
    let f_lo = if matched {
        f_si.clone()
    } else {
        profile(rng.gen_range(-2.0..2.0), rng.gen_range(0.5..2.0), &response, &omega)
    };
    let theta: f64 = rng.gen_range(0.2..1.4);
    let t = vec![Complex64::new(theta.cos(), 0.0); n];
    let r = vec![Complex64::new(theta.sin(), 0.0); n];
    let beta = c(rng.gen_range(1.0..5.0), rng.gen_range(-2.0..2.0));
    SpectralSetup::new(omega, response, f_si, f_lo, t, r, beta).unwrap()
}

#[test]
fn criterion_09_mode_mismatch_suite() {
    report("09 mode-mismatch-suite", || {
        let mut rng = ChaCha8Rng::seed_from_u64(90);
        for case in 0..100 {
            let setup = random_spectral_setup(&mut rng, false);
            let params = mode_mismatch_parameters(&setup).map_err(|e| e.to_string())?;
            check!(params.nu_tilde >= 0.0, "case {case}: nu_tilde {}", params.nu_tilde);
            check!(params.eta_t > 0.0, "case {case}: eta_t {}", params.eta_t);

            // nu_tilde is quadratic in |beta|: doubling beta quadruples it.
            let mut doubled = setup.clone();
            doubled.beta *= 2.0;
            let params2 = mode_mismatch_parameters(&doubled).map_err(|e| e.to_string())?;
            if params.nu_tilde > 1e-30 {
                let ratio = params2.nu_tilde / params.nu_tilde;
                check!(
                    (ratio - 4.0).abs() < 1e-10,
                    "case {case}: scaling ratio {ratio}"
                );
            } else {
                check!(params2.nu_tilde < 1e-28, "case {case}: zero did not stay zero");
            }
        }
        // Perfectly matched profiles: no mismatch rate.
        for case in 0..10 {
            let setup = random_spectral_setup(&mut rng, true);
            let params = mode_mismatch_parameters(&setup).map_err(|e| e.to_string())?;
            check!(
                params.nu_tilde < 1e-12,
                "matched case {case}: nu_tilde {}",
                params.nu_tilde
            );
        }
        Ok(())
    });
}

#[test]
fn criterion_10_no_fake_nonclassicality() {
    report("10 no-fake-nonclassicality", || {
        let mut rng = ChaCha8Rng::seed_from_u64(100);
        let det = DetectorConfig::new(8, 0.5, 0.0).unwrap();
        for case in 0..100 {
            // Random classical input: coherent state or mixture, amplitudes up
            // to saturation (mean photon number up to 10 N = 80).
            let radius = (rng.gen_range(0.0..80.0f64)).sqrt();
            let n_parts = rng.gen_range(1..=3);
            let components: Vec<(f64, CoherentSuperposition)> = (0..n_parts)
                .map(|_| {
                    let phase = rng.gen_range(0.0..2.0 * PI);
                    let a = Complex64::from_polar(radius * rng.gen_range(0.1..1.0), phase);
                    (rng.gen_range(0.1..1.0), CoherentSuperposition::coherent(a))
                })
                .collect();
            let state = CoherentMixture::new(components).map_err(|e| e.to_string())?;
            let phi = rng.gen_range(0.0..2.0 * PI);

            // Unbalanced arm.
            let arm = fig4_arm(0.5);
            let v = variance_criterion(&state, &arm, phi).map_err(|e| e.to_string())?;
            check!(v.value >= -1e-9, "case {case}: unbalanced variance {}", v.value);
            let d4 = fourth_order_criterion(&state, &arm, phi).map_err(|e| e.to_string())?;
            check!(d4.value >= -1e-9, "case {case}: fourth order {}", d4.value);
            let matrix =
                moment_matrix(&state, &arm.at_phase(phi), 4, 0.0, 1.0).map_err(|e| e.to_string())?;
            check!(
                matrix.is_psd(1e-9),
                "case {case}: moment matrix min eig {}",
                matrix.min_eigenvalue()
            );

            // Balanced four-port.
            let lo = LocalOscillator::new(c(4.0, 0.0));
            let four = four_port_arms(&BeamSplitter::balanced(), &lo, det, det).unwrap();
            let nl = nonlinear_squeezing(&state, &four, phi).map_err(|e| e.to_string())?;
            check!(nl.value >= -1e-9, "case {case}: squeezing {}", nl.value);
            let sv = sum_variance(&state, &four, phi).map_err(|e| e.to_string())?;
            check!(sv.value >= -1e-9, "case {case}: sum variance {}", sv.value);
            let arms = four.at_phase(phi).descriptors();
            let cc = cross_correlation_criterion(&state, &arms[0], &arms[1])
                .map_err(|e| e.to_string())?;
            check!(cc.value >= -1e-9, "case {case}: cross correlation {}", cc.value);

            // Eight-port.
            let eight = eight_port_arms(&lo, det).unwrap();
            let xp = xp_covariance_criterion(&state, &eight, phi).map_err(|e| e.to_string())?;
            check!(xp.value >= -1e-9, "case {case}: xp covariance {}", xp.value);
        }

        // Two-mode scheme on classical two-mode products.
        let lo = LocalOscillator::new(c(4.0, 0.0));
        let two = two_mode_arms(&lo, &lo, det).unwrap();
        for case in 0..20 {
            let a1 = Complex64::from_polar(rng.gen_range(0.0..6.0), rng.gen_range(0.0..2.0 * PI));
            let a2 = Complex64::from_polar(rng.gen_range(0.0..6.0), rng.gen_range(0.0..2.0 * PI));
            let state = CoherentSuperposition::product_coherent(&[a1, a2]).unwrap();
            let (v1, v2, minor) = two_mode_criteria(
                &state,
                &two,
                rng.gen_range(0.0..2.0 * PI),
                rng.gen_range(0.0..2.0 * PI),
            )
            .map_err(|e| e.to_string())?;
            check!(v1.value >= -1e-9, "two-mode case {case}: v1 {}", v1.value);
            check!(v2.value >= -1e-9, "two-mode case {case}: v2 {}", v2.value);
            check!(minor.value >= -1e-9, "two-mode case {case}: minor {}", minor.value);
        }
        Ok(())
    });
}

#[test]
fn criterion_11_cross_oracle() {
    report("11 cross-oracle", || {
        let mut rng = ChaCha8Rng::seed_from_u64(110);
        // Closed form vs truncated number basis on random superpositions.
        for case in 0..100 {
            let n_terms = rng.gen_range(1..=2);
            let terms: Vec<Term> = (0..n_terms)
                .map(|_| Term {
                    coeff: c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    amplitudes: vec![c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))],
                })
                .collect();
            let state = match CoherentSuperposition::new(1, terms) {
                Ok(s) => s,
                Err(_) => continue,
            };
            let lambda = rng.gen_range(0.0..1.0);
            let gamma = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let product = FactorProduct::single(0, lambda, gamma).unwrap();
            let closed = state.expect_product(&product).map_err(|e| e.to_string())?;
            let fock = FockVector::from_superposition(&state, 40).map_err(|e| e.to_string())?;
            let numeric = fock.fock_expectation(&product).map_err(|e| e.to_string())?;
            check!(
                (closed - numeric).abs() < 1e-8,
                "case {case}: closed {closed} vs oracle {numeric}"
            );
        }

        // Moments reconstructed from statistics vs direct moments.
        for case in 0..50 {
            let alpha = c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
            let state = match rng.gen_range(0..3) {
                0 => CoherentSuperposition::coherent(alpha),
                1 => make_cat(alpha, Parity::Even).unwrap_or_else(|_| {
                    CoherentSuperposition::coherent(alpha)
                }),
                _ => make_cat(alpha, Parity::Odd)
                    .unwrap_or_else(|_| CoherentSuperposition::coherent(alpha)),
            };
            let det = DetectorConfig::new(
                rng.gen_range(4..=8),
                rng.gen_range(0.2..1.0),
                rng.gen_range(0.0..0.3),
            )
            .unwrap();
            let gamma = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let kappa = rng.gen_range(0.2..1.0);
            let arm = ArmDescriptor::new(0, kappa, gamma, det).unwrap();
            let dist = click_statistics(&state, &arm).map_err(|e| e.to_string())?;
            for m in 0..=2usize {
                let direct = pi_moment(&state, &[arm], &[m]).map_err(|e| e.to_string())?;
                let recon = moments_from_statistics(&dist, &[m]).map_err(|e| e.to_string())?;
                check!(
                    (direct - recon).abs() < 1e-8,
                    "case {case} m={m}: {direct} vs {recon}"
                );
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_12_sampling() {
    report("12 sampling", || {
        let arm = fig4_arm(0.5).at_phase(PI / 2.0);
        let even = make_cat(c(1.0, 0.0), Parity::Even).unwrap();
        let dist = click_statistics(&even, &arm).map_err(|e| e.to_string())?;
        let exact_m1 = moments_from_statistics(&dist, &[1]).map_err(|e| e.to_string())?;
        let exact_m2 = moments_from_statistics(&dist, &[2]).map_err(|e| e.to_string())?;
        let exact = exact_m2 - exact_m1 * exact_m1;

        let shots = 1_000_000;
        let hist = sample(&dist, shots, 1234).map_err(|e| e.to_string())?;
        let sizes = hist.sizes.clone();
        let est = bootstrap_criterion(&hist, BOOTSTRAP_RESAMPLES, 77, |counts| {
            let tmp = ClickHistogram {
                sizes: sizes.clone(),
                counts: counts.to_vec(),
            };
            let m1 = moment_from_histogram(&tmp, &[1])?;
            let m2 = moment_from_histogram(&tmp, &[2])?;
            Ok(m2 - m1 * m1)
        })
        .map_err(|e| e.to_string())?;
        check!(
            (est.value - exact).abs() <= 5.0 * est.std_error,
            "empirical {} vs exact {exact}, se {}",
            est.value,
            est.std_error
        );
        check!(est.value < 0.0, "empirical criterion lost the negativity");

        // Seed determinism, byte for byte through the CSV serialization.
        let again = sample(&dist, shots, 1234).map_err(|e| e.to_string())?;
        check!(
            histogram_to_csv(&hist) == histogram_to_csv(&again),
            "same seed produced different histograms"
        );
        let other = sample(&dist, shots, 1235).map_err(|e| e.to_string())?;
        check!(hist != other, "different seeds produced identical histograms");
        Ok(())
    });
}
