//! Command implementations: each returns a result table.

use anyhow::{bail, Context, Result};
use clickhd_core::{
    click_statistics, fourth_order_criterion, imperfections, joint_click_statistics,
    mode_mismatch_parameters, nonlinear_squeezing, photoelectric_statistics, sample, sum_variance,
    two_mode_criteria, variance_criterion, xp_covariance_criterion, ArmDescriptor,
    CoherentMixture, CriterionResult, DetectorConfig, SchemeArms, SpectralSetup, Verdict,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{require_scheme, require_state, RunConfig};
use crate::output::Table;

fn state_of(config: &RunConfig) -> Result<CoherentMixture> {
    Ok(require_state(config)?.to_mixture()?)
}

fn arms_of(config: &RunConfig) -> Result<SchemeArms> {
    Ok(require_scheme(config)?.to_arms()?)
}

fn first_arm(scheme: &SchemeArms) -> Result<ArmDescriptor> {
    scheme
        .descriptors()
        .first()
        .copied()
        .context("scheme has no arms")
}

fn verdict_cell(value: f64) -> Value {
    match Verdict::from_value(value) {
        Verdict::Nonclassical => json!("nonclassical"),
        Verdict::Inconclusive => json!("inconclusive"),
    }
}

fn criterion_row(phi: f64, result: &CriterionResult) -> Vec<Value> {
    vec![
        json!(phi),
        json!(result.id),
        json!(result.value),
        verdict_cell(result.value),
    ]
}

/// Click and photoelectric statistics of the configured state, side by side.
pub fn cmd_stats(config: &RunConfig) -> Result<Table> {
    let state_file = require_state(config)?;
    let scheme = arms_of(config)?;
    let arm = first_arm(&scheme)?;
    let mixture = state_of(config)?;
    let dist = click_statistics(&mixture, &arm)?;

    let n_max = config.n_max.unwrap_or(4 * arm.detector.apd_count);
    let pure = state_file.to_superposition().ok();
    let photoelectric = match &pure {
        Some(state) if state.modes() == 1 => Some(photoelectric_statistics(
            state,
            arm.scale * arm.detector.efficiency,
            arm.detector.dark_rate,
            n_max,
        )?),
        _ => None,
    };

    let mut table = Table::new(&["n", "click_prob", "photoelectric_prob"]);
    let rows = n_max.max(arm.detector.apd_count);
    for n in 0..=rows {
        let click = if n <= arm.detector.apd_count {
            json!(dist.prob(&[n]))
        } else {
            Value::Null
        };
        let pe = photoelectric
            .as_ref()
            .and_then(|p| p.get(n))
            .map(|v| json!(v))
            .unwrap_or(Value::Null);
        table.push(vec![json!(n), click, pe]);
    }
    Ok(table)
}

/// Criterion sweep over a phase grid (or the APD-count grid for `apd_count`).
pub fn cmd_sweep(config: &RunConfig) -> Result<Table> {
    let sweep = config
        .sweep
        .as_ref()
        .context("config needs a \"sweep\" entry")?;
    let state = state_of(config)?;
    let scheme = arms_of(config)?;

    match sweep.criterion.as_str() {
        "variance" | "fourth_order" => {
            let arm = first_arm(&scheme)?;
            let fourth = sweep.criterion == "fourth_order";
            let results: Vec<(f64, CriterionResult)> = sweep
                .grid()
                .into_par_iter()
                .map(|phi| {
                    let r = if fourth {
                        fourth_order_criterion(&state, &arm, phi)
                    } else {
                        variance_criterion(&state, &arm, phi)
                    }?;
                    Ok((phi, r))
                })
                .collect::<clickhd_core::Result<_>>()?;
            let mut table = Table::new(&["phi", "criterion", "value", "verdict"]);
            for (phi, r) in results {
                table.push(criterion_row(phi, &r));
            }
            Ok(table)
        }
        "nonlinear_squeezing" | "sum_variance" | "xp_covariance" => {
            let kind = sweep.criterion.clone();
            let results: Vec<(f64, CriterionResult)> = sweep
                .grid()
                .into_par_iter()
                .map(|phi| {
                    let r = match kind.as_str() {
                        "nonlinear_squeezing" => nonlinear_squeezing(&state, &scheme, phi),
                        "sum_variance" => sum_variance(&state, &scheme, phi),
                        _ => xp_covariance_criterion(&state, &scheme, phi),
                    }?;
                    Ok((phi, r))
                })
                .collect::<clickhd_core::Result<_>>()?;
            let mut table = Table::new(&["phi", "criterion", "value", "verdict"]);
            for (phi, r) in results {
                table.push(criterion_row(phi, &r));
            }
            Ok(table)
        }
        "two_mode_minor" => {
            let grid = sweep.grid();
            let results: Vec<(f64, f64, CriterionResult)> = grid
                .par_iter()
                .flat_map(|&p1| {
                    let state = &state;
                    let scheme = &scheme;
                    grid.par_iter().map(move |&p2| {
                        let (_, _, minor) = two_mode_criteria(state, scheme, p1, p2)?;
                        Ok((p1, p2, minor))
                    })
                })
                .collect::<clickhd_core::Result<_>>()?;
            let mut table = Table::new(&["phi1", "phi2", "criterion", "value", "verdict"]);
            for (p1, p2, r) in results {
                table.push(vec![
                    json!(p1),
                    json!(p2),
                    json!(r.id),
                    json!(r.value),
                    verdict_cell(r.value),
                ]);
            }
            Ok(table)
        }
        "apd_count" => cmd_apd_sweep(config),
        other => bail!(
            "unknown criterion {other:?}; expected variance, fourth_order, \
             nonlinear_squeezing, sum_variance, xp_covariance, two_mode_minor, or apd_count"
        ),
    }
}

/// Second- and fourth-order negativities against the number of APDs.
fn cmd_apd_sweep(config: &RunConfig) -> Result<Table> {
    let sweep = config.sweep.as_ref().context("needs sweep")?;
    let state = state_of(config)?;
    let scheme_file = require_scheme(config)?;
    if scheme_file.scheme != "unbalanced4" {
        bail!("the apd_count sweep is defined for the unbalanced4 scheme");
    }
    let template = first_arm(&arms_of(config)?)?;
    let phi = std::f64::consts::FRAC_PI_2;

    let ns: Vec<usize> = (0..sweep.points.max(1)).map(|i| 4usize << i).collect();
    let results: Vec<(usize, f64, f64)> = ns
        .par_iter()
        .map(|&n| {
            let det = DetectorConfig::new(
                n,
                template.detector.efficiency,
                template.detector.dark_rate,
            )?;
            let arm = ArmDescriptor::new(template.mode, template.scale, template.displacement, det)?;
            let v2 = variance_criterion(&state, &arm, phi)?.value;
            let d4 = fourth_order_criterion(&state, &arm, phi)?.value;
            Ok((n, v2, d4))
        })
        .collect::<clickhd_core::Result<_>>()?;

    let mut table = Table::new(&["N", "variance", "fourth_order"]);
    for (n, v2, d4) in results {
        table.push(vec![json!(n), json!(v2), json!(d4)]);
    }
    Ok(table)
}

/// Draws click records and tabulates the histogram plus moment estimates.
pub fn cmd_sample(config: &RunConfig, seed: u64) -> Result<Table> {
    let state = state_of(config)?;
    let scheme = arms_of(config)?;
    let arms = scheme.descriptors();
    let shots = config.samples.unwrap_or(100_000);
    let dist = joint_click_statistics(&state, &arms)?;
    let hist = sample(&dist, shots, seed)?;

    let mut columns: Vec<String> = (1..=hist.sizes.len()).map(|i| format!("k{i}")).collect();
    columns.push("count".into());
    let mut table = Table {
        columns,
        rows: Vec::new(),
    };
    // the distribution iterates in flat order, matching the histogram layout
    for ((ks, _), count) in dist.iter().zip(&hist.counts) {
        let mut row: Vec<Value> = ks.iter().map(|k| json!(k)).collect();
        row.push(json!(count));
        table.push(row);
    }
    Ok(table)
}

/// Effective parameters of a spectral mode-mismatch setup.
pub fn cmd_mismatch(config: &RunConfig) -> Result<Table> {
    let file = config
        .spectral
        .as_ref()
        .context("config needs a \"spectral\" entry")?;
    let setup = SpectralSetup::from_file(file)?;
    let params = mode_mismatch_parameters(&setup)?;
    let mut table = Table::new(&["eta_t", "gamma_re", "gamma_im", "nu_tilde"]);
    table.push(vec![
        json!(params.eta_t),
        json!(params.gamma.re),
        json!(params.gamma.im),
        json!(params.nu_tilde),
    ]);
    Ok(table)
}

/// Variance criterion under thermal LO fluctuations over an occupation grid.
pub fn cmd_thermal_lo(config: &RunConfig) -> Result<Table> {
    let thermal = config
        .thermal
        .as_ref()
        .context("config needs a \"thermal\" entry")?;
    let state = state_of(config)?;
    let arm = first_arm(&arms_of(config)?)?;
    let phi = thermal.phi;

    let results: Vec<(f64, f64)> = thermal
        .grid()
        .into_par_iter()
        .map(|n_bar| {
            Ok((
                n_bar,
                imperfections::thermal_variance_criterion(&state, &arm, phi, n_bar)?,
            ))
        })
        .collect::<clickhd_core::Result<_>>()?;
    let mut table = Table::new(&["n_bar", "value", "verdict"]);
    for (n_bar, value) in results {
        table.push(vec![json!(n_bar), json!(value), verdict_cell(value)]);
    }
    Ok(table)
}

/// Figure-specific emitters with the captioned parameter sets.
pub fn cmd_figure(figure: u8, config: &RunConfig, seed: u64) -> Result<Table> {
    let _ = seed;
    match figure {
        2 => cmd_stats(config),
        4 => cmd_sweep(config),
        5 => cmd_sweep(config),
        6 => {
            // Both balanced quantities on one grid.
            let sweep = config.sweep.as_ref().context("needs sweep")?;
            let state = state_of(config)?;
            let scheme = arms_of(config)?;
            let results: Vec<(f64, f64, f64)> = sweep
                .grid()
                .into_par_iter()
                .map(|phi| {
                    Ok((
                        phi,
                        nonlinear_squeezing(&state, &scheme, phi)?.value,
                        sum_variance(&state, &scheme, phi)?.value,
                    ))
                })
                .collect::<clickhd_core::Result<_>>()?;
            let mut table = Table::new(&["phi", "nonlinear_squeezing", "sum_variance"]);
            for (phi, nl, sv) in results {
                table.push(vec![json!(phi), json!(nl), json!(sv)]);
            }
            Ok(table)
        }
        7 => cmd_thermal_lo(config),
        8 => {
            let sweep = config.sweep.as_ref().context("needs sweep")?;
            let state = state_of(config)?;
            let scheme = arms_of(config)?;
            let results: Vec<(f64, f64, f64, f64)> = sweep
                .grid()
                .into_par_iter()
                .map(|phi| {
                    let rotated = scheme.at_phase(phi);
                    let vx = clickhd_core::witnesses::pair_variance(
                        &state,
                        &rotated,
                        clickhd_core::QuadraturePair::X,
                    )?;
                    let vp = clickhd_core::witnesses::pair_variance(
                        &state,
                        &rotated,
                        clickhd_core::QuadraturePair::P,
                    )?;
                    let xp = xp_covariance_criterion(&state, &scheme, phi)?.value;
                    Ok((phi, vx, vp, xp))
                })
                .collect::<clickhd_core::Result<_>>()?;
            let mut table = Table::new(&["phi", "x_variance", "p_variance", "xp_covariance"]);
            for (phi, vx, vp, xp) in results {
                table.push(vec![json!(phi), json!(vx), json!(vp), json!(xp)]);
            }
            Ok(table)
        }
        9 => cmd_sweep(config),
        other => bail!("no figure runner for {other}"),
    }
}
