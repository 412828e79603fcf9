//! Serialization schemas and file emission.
//!
//! Complex scalars are serialized as `[re, im]` pairs of decimal numbers.
//! User indices are 1-based in every external file (configs and CSV outputs)
//! and 0-based inside the library. Numeric CSV fields use Rust's shortest
//! round-trip decimal formatting, so identical inputs produce byte-identical
//! outputs.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::downlink::RateReport;
use crate::error::{NgmaError, Result};
use crate::model::{ComplexVec, Scenario};
use crate::regions::RegionBoundary;
use crate::search::{BestConfig, SearchResult};
use crate::uplink::LayerPartition;

// ---------------------------------------------------------------------------
// Scenario schema
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub n_antennas: usize,
    pub n_users: usize,
    /// One channel per user; each entry is an `[re, im]` pair.
    pub channels: Vec<Vec<[f64; 2]>>,
    pub noise_powers: Vec<f64>,
    pub power_budget: f64,
}

impl ScenarioFile {
    pub fn from_scenario(s: &Scenario) -> Self {
        Self {
            n_antennas: s.n_antennas(),
            n_users: s.n_users(),
            channels: s
                .channels()
                .iter()
                .map(|h| h.entries().iter().map(|z| [z.re, z.im]).collect())
                .collect(),
            noise_powers: s.noise_powers().to_vec(),
            power_budget: s.power_budget(),
        }
    }

    pub fn into_scenario(self) -> Result<Scenario> {
        if self.channels.len() != self.n_users {
            return Err(NgmaError::InvalidConfig(
                "channels length must equal n_users".into(),
            ));
        }
        let channels = self
            .channels
            .iter()
            .map(|h| ComplexVec::new(h.iter().map(|&[re, im]| Complex64::new(re, im)).collect()))
            .collect::<Result<Vec<_>>>()?;
        Scenario::new(
            self.n_antennas,
            channels,
            self.noise_powers,
            self.power_budget,
        )
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path)?;
    let file: ScenarioFile = serde_json::from_str(&text)?;
    file.into_scenario()
}

// ---------------------------------------------------------------------------
// Downlink / uplink evaluation configs
// ---------------------------------------------------------------------------

/// How beam or detector directions are obtained.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DirectionsSpec {
    /// `"zf"`, `"cluster_zf"`, `"matched"`, `"mrc"`, or `"mmse"`.
    Named(String),
    /// Explicit unit vectors, one per user (or per cluster for cluster-based
    /// evaluation), entries as `[re, im]` pairs.
    Explicit(Vec<Vec<[f64; 2]>>),
}

impl DirectionsSpec {
    pub fn explicit_vectors(&self) -> Result<Vec<ComplexVec>> {
        match self {
            DirectionsSpec::Named(name) => Err(NgmaError::InvalidConfig(format!(
                "expected explicit direction vectors, got \"{}\"",
                name
            ))),
            DirectionsSpec::Explicit(vs) => vs
                .iter()
                .map(|v| {
                    ComplexVec::new(v.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
                })
                .collect(),
        }
    }
}

/// Downlink evaluation config: clusters and decode sequences use 1-based user
/// ids; `order[m]` lists cluster `m`'s signals from first-decoded to last.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DlConfigFile {
    pub clusters: Vec<Vec<usize>>,
    pub order: Vec<Vec<usize>>,
    pub directions: DirectionsSpec,
    pub powers: Vec<f64>,
}

/// Uplink evaluation config: layers use 1-based user ids, listed from first
/// detected to last.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UlConfigFile {
    pub layers: Vec<Vec<usize>>,
    pub detector: DirectionsSpec,
    pub powers: Vec<f64>,
}

pub fn to_zero_based(groups: &[Vec<usize>]) -> Result<Vec<Vec<usize>>> {
    groups
        .iter()
        .map(|g| {
            g.iter()
                .map(|&u| {
                    u.checked_sub(1)
                        .ok_or_else(|| NgmaError::InvalidConfig("user ids are 1-based".into()))
                })
                .collect()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// CSV emission
// ---------------------------------------------------------------------------

pub fn region_csv(rows: &[(&str, &RegionBoundary)]) -> String {
    let mut out = String::from("scheme,R1,R2\n");
    for (scheme, boundary) in rows {
        for &(r1, r2) in &boundary.points {
            out.push_str(&format!("{},{},{}\n", scheme, r1, r2));
        }
    }
    out
}

pub fn dl_rates_csv(report: &RateReport, cluster_of: &[usize]) -> String {
    let mut out = String::from("user,cluster,rate,feasible\n");
    for (k, &rate) in report.per_user_rate.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            k + 1,
            cluster_of[k] + 1,
            rate,
            report.sic_feasible
        ));
    }
    out
}

pub fn ul_rates_csv(rates: &[f64], layers: &LayerPartition) -> String {
    let mut out = String::from("user,layer,rate\n");
    for (k, &rate) in rates.iter().enumerate() {
        out.push_str(&format!("{},{},{}\n", k + 1, layers.layer_of(k) + 1, rate));
    }
    out
}

// ---------------------------------------------------------------------------
// Search result export
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct SearchResultFile {
    pub direction: String,
    pub best_value: f64,
    pub feasible: bool,
    pub evaluations: u64,
    /// 1-based clusters (downlink) or layers (uplink) of the winner.
    pub groups: Vec<Vec<usize>>,
    /// 1-based per-cluster decode sequences (downlink only).
    pub order: Option<Vec<Vec<usize>>>,
    pub directions: Vec<Vec<[f64; 2]>>,
    pub powers: Vec<f64>,
    /// Best value per layer count (uplink only).
    pub layer_tradeoff: Vec<(usize, f64)>,
}

fn one_based(groups: &[Vec<usize>]) -> Vec<Vec<usize>> {
    groups
        .iter()
        .map(|g| g.iter().map(|&u| u + 1).collect())
        .collect()
}

fn vectors_out(vs: &[ComplexVec]) -> Vec<Vec<[f64; 2]>> {
    vs.iter()
        .map(|v| v.entries().iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

impl SearchResultFile {
    pub fn from_result(r: &SearchResult) -> Self {
        match &r.best_config {
            BestConfig::Downlink(c) => Self {
                direction: "downlink".into(),
                best_value: r.best_value,
                feasible: r.feasible,
                evaluations: r.evaluations,
                groups: one_based(c.grouping.clusters()),
                order: Some(one_based(c.order.sequences())),
                directions: vectors_out(c.beams.directions()),
                powers: c.beams.powers().to_vec(),
                layer_tradeoff: vec![],
            },
            BestConfig::Uplink(c) => Self {
                direction: "uplink".into(),
                best_value: r.best_value,
                feasible: r.feasible,
                evaluations: r.evaluations,
                groups: one_based(c.layers.layers()),
                order: None,
                directions: vectors_out(c.detectors.vectors()),
                powers: c.detectors.powers().to_vec(),
                layer_tradeoff: r.layer_tradeoff.clone(),
            },
        }
    }
}

// ---------------------------------------------------------------------------
// Atomic file output
// ---------------------------------------------------------------------------

/// Writes via a sibling temp file plus rename, so a crash never leaves a
/// half-written output.
pub fn atomic_write(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let file_name = path
        .file_name()
        .ok_or_else(|| NgmaError::InvalidConfig("output path has no file name".into()))?;
    let tmp = dir.join(format!(".{}.tmp", file_name.to_string_lossy()));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}
