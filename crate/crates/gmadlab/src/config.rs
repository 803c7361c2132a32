//! Config-file schema and channel construction.
//!
//! A channel config is a single JSON object:
//!
//! ```json
//! {
//!   "spectrum": [0.0, 0.8, 1.0],
//!   "beta": 1.0,                     // or "inf"
//!   "parametrization": { "type": "qutrit", "s1": 0.5, "sbar": 0.745, "alpha0": 0.745 },
//!   "seed": 42,                      // optional, GMADLAB_SEED overrides
//!   "grid": 201,                     // optional sweep resolution
//!   "n_starts": 64,                  // optional optimizer restarts
//!   "max_iters": 2000                // optional optimizer iteration cap
//! }
//! ```
//!
//! Alternative parametrizations: `{"type": "couplings", "g10": …, "g21": …,
//! "g20": …, "t": 1.0}` for the microscopic qutrit model, and
//! `{"type": "general", "unitaries": [block…]}` with each block an
//! (m+1)×(m+1) matrix of `[re, im]` pairs for arbitrary dimension.

use gmad_core::gmad::qutrit_blocks_from_couplings;
use gmad_core::{
    build_gmad, build_qutrit_gmad, Beta, ComplexMatrix, DensityMatrix, GmadSpec, Hamiltonian,
    KrausChannel, QutritGmadParams, UnitaryBlocks,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BetaSpec {
    Finite(f64),
    Named(String),
}

impl BetaSpec {
    pub fn to_beta(&self) -> Result<Beta, CliError> {
        match self {
            BetaSpec::Finite(v) => {
                Beta::finite(*v).map_err(|e| CliError::Config(format!("bad beta: {e}")))
            }
            BetaSpec::Named(s) if s == "inf" => Ok(Beta::Infinite),
            BetaSpec::Named(s) => Err(CliError::Config(format!(
                "beta must be a number or \"inf\", got \"{s}\""
            ))),
        }
    }

    pub fn parse(text: &str) -> Result<BetaSpec, CliError> {
        if text == "inf" {
            return Ok(BetaSpec::Named("inf".into()));
        }
        text.parse::<f64>()
            .map(BetaSpec::Finite)
            .map_err(|_| CliError::Config(format!("bad beta value \"{text}\"")))
    }
}

impl std::fmt::Display for BetaSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BetaSpec::Finite(v) => write!(f, "{v}"),
            BetaSpec::Named(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Parametrization {
    Qutrit {
        s1: f64,
        sbar: f64,
        alpha0: f64,
    },
    Couplings {
        g10: f64,
        g21: f64,
        g20: f64,
        #[serde(default = "default_time")]
        t: f64,
    },
    General {
        /// One (m+1)×(m+1) block per m = 1..d−1, entries as [re, im].
        unitaries: Vec<Vec<Vec<[f64; 2]>>>,
    },
}

fn default_time() -> f64 {
    1.0
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub spectrum: Vec<f64>,
    pub beta: BetaSpec,
    pub parametrization: Parametrization,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_starts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
}

impl ChannelConfig {
    pub fn load(path: &std::path::Path) -> Result<ChannelConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("malformed config {}: {e}", path.display())))
    }

    pub fn hamiltonian(&self) -> Result<Hamiltonian, CliError> {
        Hamiltonian::new(self.spectrum.clone())
            .map_err(|e| CliError::Config(format!("bad spectrum: {e}")))
    }

    /// Build the channel.  Unitarity failures of supplied blocks are
    /// reported as property errors (the config parsed fine; the channel it
    /// describes is not a channel); everything else is a config error.
    pub fn build_channel(&self) -> Result<KrausChannel, CliError> {
        let h = self.hamiltonian()?;
        let beta = self.beta.to_beta()?;
        match &self.parametrization {
            Parametrization::Qutrit { s1, sbar, alpha0 } => build_qutrit_gmad(&QutritGmadParams {
                hamiltonian: h,
                beta,
                s1: *s1,
                sbar: *sbar,
                alpha0: *alpha0,
            })
            .map_err(|e| CliError::Config(format!("qutrit parametrization: {e}"))),
            Parametrization::Couplings { g10, g21, g20, t } => {
                let blocks = qutrit_blocks_from_couplings(*g10, *g21, *g20, *t)
                    .map_err(|e| CliError::Config(format!("couplings parametrization: {e}")))?;
                if h.dim() != 3 {
                    return Err(CliError::Config(format!(
                        "couplings parametrization needs a 3-level spectrum, got {} levels",
                        h.dim()
                    )));
                }
                let spec = GmadSpec::new(h, beta, blocks)
                    .map_err(|e| CliError::Config(format!("couplings parametrization: {e}")))?;
                build_gmad(&spec).map_err(|e| CliError::Config(e.to_string()))
            }
            Parametrization::General { unitaries } => {
                let blocks = parse_blocks(unitaries)?;
                let blocks = UnitaryBlocks::new(blocks).map_err(|e| match e {
                    gmad_core::Error::NotUnitary { .. } => CliError::Property(e.to_string()),
                    other => CliError::Config(format!("general parametrization: {other}")),
                })?;
                let spec = GmadSpec::new(h, beta, blocks)
                    .map_err(|e| CliError::Config(format!("general parametrization: {e}")))?;
                build_gmad(&spec).map_err(|e| CliError::Config(e.to_string()))
            }
        }
    }
}

fn parse_blocks(raw: &[Vec<Vec<[f64; 2]>>]) -> Result<Vec<ComplexMatrix>, CliError> {
    raw.iter()
        .enumerate()
        .map(|(i, rows)| {
            let complex_rows: Vec<Vec<Complex64>> = rows
                .iter()
                .map(|row| row.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
                .collect();
            ComplexMatrix::from_rows(&complex_rows)
                .map_err(|e| CliError::Config(format!("unitary block {}: {e}", i + 1)))
        })
        .collect()
}

/// Input-state file for the mpemba command: two density matrices sharing a
/// dephased part, entries as [re, im].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatePair {
    pub rho: Vec<Vec<[f64; 2]>>,
    pub sigma: Vec<Vec<[f64; 2]>>,
}

impl StatePair {
    pub fn load(path: &std::path::Path) -> Result<StatePair, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("malformed state file {}: {e}", path.display())))
    }

    pub fn states(&self) -> Result<(DensityMatrix, DensityMatrix), CliError> {
        Ok((
            parse_state(&self.rho, "rho")?,
            parse_state(&self.sigma, "sigma")?,
        ))
    }
}

fn parse_state(raw: &[Vec<[f64; 2]>], name: &str) -> Result<DensityMatrix, CliError> {
    let rows: Vec<Vec<Complex64>> = raw
        .iter()
        .map(|row| row.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
        .collect();
    let m = ComplexMatrix::from_rows(&rows)
        .map_err(|e| CliError::Config(format!("state {name}: {e}")))?;
    DensityMatrix::new(m).map_err(|e| CliError::Config(format!("state {name}: {e}")))
}

/// Everything that determines a command's output, serialized canonically and
/// hashed into the CSV/JSON headers so identical runs are provably identical.
#[derive(Serialize)]
pub struct ResolvedRun<'a> {
    pub command: &'a str,
    pub channel: &'a ChannelConfig,
    pub seed: u64,
    pub grid: usize,
    pub n_starts: usize,
    pub max_iters: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constraint: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub betas: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub states: Option<&'a StatePair>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iters: Option<usize>,
}

impl ResolvedRun<'_> {
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        let mut hex = String::with_capacity(64);
        for byte in digest {
            use std::fmt::Write;
            write!(hex, "{byte:02x}").expect("writing to a string");
        }
        hex
    }
}
