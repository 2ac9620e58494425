//! Hard-coded figure presets; any field can be overridden by `--config`.

use anyhow::{bail, Result};
use serde_json::json;

use crate::config::RunConfig;

pub fn figure_preset(figure: u8) -> Result<RunConfig> {
    let value = match figure {
        // Click vs photoelectric statistics of a cat state, direct detection.
        2 => json!({
            "state": {"cat": {"alpha": 2.0, "parity": "even"}},
            "scheme": {"scheme": "unbalanced4", "t": 1.0, "r": 0.0, "beta": 0.0,
                       "detector": {"N": 8, "eta": 1.0, "nu": 0.0}},
            "n_max": 20
        }),
        // Phase scan of the second-order criterion, unbalanced four-port.
        4 => json!({
            "state": {"cat": {"alpha": 1.0, "parity": "even"}},
            "scheme": {"scheme": "unbalanced4", "t": 0.8, "r": 0.6, "beta": 4.0,
                       "detector": {"N": 8, "eta": 0.5, "nu": 0.0}},
            "sweep": {"criterion": "variance", "points": 256}
        }),
        // Criterion magnitudes against the number of APDs.
        5 => json!({
            "state": {"cat": {"alpha": 1.0, "parity": "even"}},
            "scheme": {"scheme": "unbalanced4", "t": 0.8, "r": 0.6, "beta": 4.0,
                       "detector": {"N": 8, "eta": 0.5, "nu": 0.0}},
            "sweep": {"criterion": "apd_count", "points": 6}
        }),
        // Balanced four-port: difference squeezing and sum variance.
        6 => json!({
            "state": {"cat": {"alpha": 1.0, "parity": "even"}},
            "scheme": {"scheme": "balanced4", "beta": 4.0,
                       "detector": {"N": 8, "eta": 0.5, "nu": 0.0}},
            "sweep": {"criterion": "nonlinear_squeezing", "points": 256}
        }),
        // Thermal LO fluctuations, unbalanced four-port at full efficiency.
        7 => json!({
            "state": {"cat": {"alpha": 1.0, "parity": "even"}},
            "scheme": {"scheme": "unbalanced4", "t": 0.8, "r": 0.6, "beta": 4.0,
                       "detector": {"N": 8, "eta": 1.0, "nu": 0.0}},
            "thermal": {"start": 0.0, "stop": 0.5, "points": 11}
        }),
        // Eight-port: X/P variances and the covariance criterion.
        8 => json!({
            "state": {"cat": {"alpha": 1.0, "parity": "even"}},
            "scheme": {"scheme": "eight", "beta": 4.0,
                       "detector": {"N": 8, "eta": 0.5, "nu": 0.0}},
            "sweep": {"criterion": "xp_covariance", "points": 64}
        }),
        // Two-mode entangled cat over the (phi1, phi2) grid.
        9 => json!({
            "state": {"two_mode_cat": {"alpha": 1.0, "parity": "even"}},
            "scheme": {"scheme": "two_mode", "beta": 4.0,
                       "detector": {"N": 8, "eta": 0.5, "nu": 0.0}},
            "sweep": {"criterion": "two_mode_minor", "points": 64}
        }),
        other => bail!("no preset for figure {other}; available: 2, 4, 5, 6, 7, 8, 9"),
    };
    Ok(serde_json::from_value(value)?)
}
