//! Serialized descriptions of states, detection schemes, and measurement
//! records (JSON configs, CSV distributions and histograms).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::engine::{ClickDistribution, DetectorConfig};
use crate::error::{Error, Result};
use crate::homodyne::{
    eight_port_arms, four_port_arms, two_mode_arms, unbalanced_arm, BeamSplitter, LocalOscillator,
    SchemeArms,
};
use crate::imperfections::ComplexOrReal;
use crate::sampler::ClickHistogram;
use crate::states::{make_cat, make_two_mode_cat, CoherentMixture, CoherentSuperposition, Parity, Term};

fn parse_parity(s: &str) -> Result<Parity> {
    match s {
        "even" | "+" => Ok(Parity::Even),
        "odd" | "-" => Ok(Parity::Odd),
        other => Err(Error::Parse(format!(
            "unknown parity {other:?}, expected \"even\" or \"odd\""
        ))),
    }
}

/// One raw superposition term: coefficient and per-mode amplitudes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermFile {
    pub c: [f64; 2],
    pub alphas: Vec<[f64; 2]>,
}

/// JSON description of a pure state or mixture. Raw terms or a named
/// constructor; exactly one variant per file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateFile {
    Raw { modes: usize, terms: Vec<TermFile> },
    Named(NamedState),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum NamedState {
    #[serde(rename = "coherent")]
    Coherent { alpha: ComplexOrReal },
    #[serde(rename = "vacuum")]
    Vacuum { modes: usize },
    #[serde(rename = "cat")]
    Cat { alpha: ComplexOrReal, parity: String },
    #[serde(rename = "two_mode_cat")]
    TwoModeCat { alpha: ComplexOrReal, parity: String },
    #[serde(rename = "mixture")]
    Mixture(Vec<MixtureComponent>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub state: StateFile,
}

impl StateFile {
    /// Builds the pure state; errors on mixtures (use [`to_mixture`]).
    ///
    /// [`to_mixture`]: StateFile::to_mixture
    pub fn to_superposition(&self) -> Result<CoherentSuperposition> {
        match self {
            StateFile::Raw { modes, terms } => {
                let terms = terms
                    .iter()
                    .map(|t| Term {
                        coeff: Complex64::new(t.c[0], t.c[1]),
                        amplitudes: t
                            .alphas
                            .iter()
                            .map(|a| Complex64::new(a[0], a[1]))
                            .collect(),
                    })
                    .collect();
                CoherentSuperposition::new(*modes, terms)
            }
            StateFile::Named(named) => match named {
                NamedState::Coherent { alpha } => {
                    Ok(CoherentSuperposition::coherent(alpha.to_complex()))
                }
                NamedState::Vacuum { modes } => CoherentSuperposition::vacuum(*modes),
                NamedState::Cat { alpha, parity } => {
                    make_cat(alpha.to_complex(), parse_parity(parity)?)
                }
                NamedState::TwoModeCat { alpha, parity } => {
                    make_two_mode_cat(alpha.to_complex(), parse_parity(parity)?)
                }
                NamedState::Mixture(_) => Err(Error::Parse(
                    "mixture given where a pure state was expected".into(),
                )),
            },
        }
    }

    /// Builds a mixture; a pure state becomes a single-component mixture.
    pub fn to_mixture(&self) -> Result<CoherentMixture> {
        if let StateFile::Named(NamedState::Mixture(components)) = self {
            let parts = components
                .iter()
                .map(|c| Ok((c.weight, c.state.to_superposition()?)))
                .collect::<Result<Vec<_>>>()?;
            CoherentMixture::new(parts)
        } else {
            CoherentMixture::new(vec![(1.0, self.to_superposition()?)])
        }
    }
}

/// JSON description of a detection scheme.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SchemeFile {
    pub scheme: String,
    #[serde(default)]
    pub t: Option<ComplexOrReal>,
    #[serde(default)]
    pub r: Option<ComplexOrReal>,
    pub beta: ComplexOrReal,
    /// Second LO amplitude; only the two-mode scheme reads it (defaults to `beta`).
    #[serde(default)]
    pub beta2: Option<ComplexOrReal>,
    pub detector: DetectorConfig,
}

impl SchemeFile {
    pub fn to_arms(&self) -> Result<SchemeArms> {
        self.detector.validate()?;
        let lo = LocalOscillator::new(self.beta.to_complex());
        match self.scheme.as_str() {
            "unbalanced4" => {
                let bs = self.beam_splitter()?;
                let arm = unbalanced_arm(&bs, &lo, self.detector)?;
                SchemeArms::new(vec![(crate::homodyne::ArmRole::Plus, arm)])
            }
            "balanced4" => {
                four_port_arms(&BeamSplitter::balanced(), &lo, self.detector, self.detector)
            }
            "four" => {
                four_port_arms(&self.beam_splitter()?, &lo, self.detector, self.detector)
            }
            "eight" => eight_port_arms(&lo, self.detector),
            "two_mode" => {
                let lo2 = LocalOscillator::new(
                    self.beta2.map(|b| b.to_complex()).unwrap_or(lo.amplitude),
                );
                two_mode_arms(&lo, &lo2, self.detector)
            }
            other => Err(Error::Parse(format!(
                "unknown scheme {other:?}; expected unbalanced4, balanced4, four, eight, or two_mode"
            ))),
        }
    }

    fn beam_splitter(&self) -> Result<BeamSplitter> {
        match (self.t, self.r) {
            (Some(t), Some(r)) => BeamSplitter::new(t.to_complex(), r.to_complex()),
            (Some(t), None) => {
                let t = t.to_complex();
                if t.im != 0.0 {
                    return Err(Error::Parse(
                        "complex t needs an explicit r to fix phases".into(),
                    ));
                }
                BeamSplitter::from_transmittance(t.re * t.re)
            }
            _ => Err(Error::Parse(
                "scheme requires beam splitter amplitudes t (and optionally r)".into(),
            )),
        }
    }
}

pub fn state_from_json(text: &str) -> Result<StateFile> {
    serde_json::from_str(text).map_err(Error::from)
}

pub fn scheme_from_json(text: &str) -> Result<SchemeFile> {
    serde_json::from_str(text).map_err(Error::from)
}

fn csv_header(arms: usize, value: &str) -> String {
    let mut cols: Vec<String> = (1..=arms).map(|i| format!("k{i}")).collect();
    cols.push(value.to_string());
    cols.join(",")
}

/// Writes a distribution as CSV with header `k1,...,prob`.
pub fn distribution_to_csv(dist: &ClickDistribution) -> String {
    let mut out = csv_header(dist.sizes().len(), "prob");
    out.push('\n');
    for (ks, p) in dist.iter() {
        for k in &ks {
            out.push_str(&format!("{k},"));
        }
        out.push_str(&format!("{p:.17e}\n"));
    }
    out
}

/// Writes a histogram as CSV with header `k1,...,count`.
pub fn histogram_to_csv(hist: &ClickHistogram) -> String {
    let mut out = csv_header(hist.sizes.len(), "count");
    out.push('\n');
    for (idx, count) in hist.counts.iter().enumerate() {
        let ks = crate::engine::index_to_tuple(idx, &hist.sizes);
        for k in &ks {
            out.push_str(&format!("{k},"));
        }
        out.push_str(&format!("{count}\n"));
    }
    out
}

/// Arm count plus `(click tuple, value)` rows parsed from a CSV body.
type ParsedRows = (usize, Vec<(Vec<usize>, f64)>);

fn parse_csv_rows(text: &str, value_col: &str) -> Result<ParsedRows> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty CSV".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.last() != Some(&value_col) {
        return Err(Error::Parse(format!(
            "expected last column {value_col:?}, got header {header:?}"
        )));
    }
    let arms = cols.len() - 1;
    if arms == 0 {
        return Err(Error::Parse("CSV needs at least one index column".into()));
    }
    let mut rows = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != cols.len() {
            return Err(Error::Parse(format!("ragged CSV row {line:?}")));
        }
        let ks = fields[..arms]
            .iter()
            .map(|f| f.parse::<usize>().map_err(|e| Error::Parse(format!("{line:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let value = fields[arms]
            .parse::<f64>()
            .map_err(|e| Error::Parse(format!("{line:?}: {e}")))?;
        rows.push((ks, value));
    }
    if rows.is_empty() {
        return Err(Error::Parse("CSV has no data rows".into()));
    }
    Ok((arms, rows))
}

fn sizes_from_rows(arms: usize, rows: &[(Vec<usize>, f64)]) -> Vec<usize> {
    let mut sizes = vec![0usize; arms];
    for (ks, _) in rows {
        for (s, k) in sizes.iter_mut().zip(ks) {
            *s = (*s).max(*k);
        }
    }
    sizes
}

/// Reads a `k1,...,prob` CSV back into a distribution. Missing tuples are
/// treated as zero probability; sizes are inferred from the largest indices.
pub fn distribution_from_csv(text: &str) -> Result<ClickDistribution> {
    let (arms, rows) = parse_csv_rows(text, "prob")?;
    let sizes = sizes_from_rows(arms, &rows);
    let len = sizes.iter().map(|n| n + 1).product();
    let mut probs = vec![0.0; len];
    for (ks, p) in &rows {
        probs[crate::engine::tuple_to_index(ks, &sizes)] = *p;
    }
    ClickDistribution::new(sizes, probs)
}

/// Reads a `k1,...,count` CSV back into a histogram.
pub fn histogram_from_csv(text: &str) -> Result<ClickHistogram> {
    let (arms, rows) = parse_csv_rows(text, "count")?;
    let sizes = sizes_from_rows(arms, &rows);
    let mut hist = ClickHistogram::empty(sizes)?;
    for (ks, value) in &rows {
        if *value < 0.0 || value.fract() != 0.0 {
            return Err(Error::Parse(format!(
                "count column must hold nonnegative integers, got {value}"
            )));
        }
        hist.counts[crate::engine::tuple_to_index(ks, &hist.sizes)] = *value as u64;
    }
    Ok(hist)
}
