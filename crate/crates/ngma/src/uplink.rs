//! Uplink layered-detection rates.
//!
//! The `K` transmitted streams are split into ordered layers: streams inside a
//! layer are detected in parallel (and interfere with each other), streams in
//! earlier layers are already cancelled, streams in later layers interfere.
//! `L = 1` is plain SDMA, `L = K` is fully serial NOMA.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{NgmaError, Result};
use crate::model::{cross_gain, ComplexVec, Scenario};

const EPS_NORM: f64 = 1e-12;

/// Ordered partition of the stream set into detection layers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerPartition {
    layers: Vec<Vec<usize>>,
    layer_of: Vec<usize>,
}

impl LayerPartition {
    pub fn new(layers: Vec<Vec<usize>>, n_users: usize) -> Result<Self> {
        if layers.is_empty() || layers.len() > n_users {
            return Err(NgmaError::InvalidConfig(format!(
                "need between 1 and {} layers",
                n_users
            )));
        }
        let mut layer_of = vec![usize::MAX; n_users];
        for (l, layer) in layers.iter().enumerate() {
            if layer.is_empty() {
                return Err(NgmaError::InvalidConfig("empty layer".into()));
            }
            for &k in layer {
                if k >= n_users {
                    return Err(NgmaError::InvalidUser(k, n_users));
                }
                if layer_of[k] != usize::MAX {
                    return Err(NgmaError::InvalidConfig(format!(
                        "stream {} appears in more than one layer",
                        k
                    )));
                }
                layer_of[k] = l;
            }
        }
        if layer_of.iter().any(|&l| l == usize::MAX) {
            return Err(NgmaError::InvalidConfig(
                "layers do not cover every stream".into(),
            ));
        }
        Ok(Self { layers, layer_of })
    }

    /// All streams in one layer (SDMA).
    pub fn single_layer(n_users: usize) -> Self {
        Self::new(vec![(0..n_users).collect()], n_users).unwrap()
    }

    /// One stream per layer following `order` (fully serial NOMA).
    pub fn serial(order: &PermutationOrder) -> Self {
        let n = order.positions.len();
        let mut layers = vec![vec![]; n];
        for k in 0..n {
            layers[order.positions[k]].push(k);
        }
        Self::new(layers, n).unwrap()
    }

    pub fn n_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn n_users(&self) -> usize {
        self.layer_of.len()
    }

    pub fn layers(&self) -> &[Vec<usize>] {
        &self.layers
    }

    pub fn layer_of(&self, k: usize) -> usize {
        self.layer_of[k]
    }

    /// True iff stream `j` interferes with the detection of stream `k`:
    /// same layer or a later layer.
    pub fn interferes(&self, k: usize, j: usize) -> bool {
        j != k && self.layer_of[j] >= self.layer_of[k]
    }
}

/// Bijective decoding order: `positions[k]` is the 0-based decoding position
/// of stream `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationOrder {
    positions: Vec<usize>,
}

impl PermutationOrder {
    pub fn new(positions: Vec<usize>) -> Result<Self> {
        let n = positions.len();
        let mut seen = vec![false; n];
        for &p in &positions {
            if p >= n || seen[p] {
                return Err(NgmaError::InvalidConfig(
                    "decoding order must be a bijection".into(),
                ));
            }
            seen[p] = true;
        }
        Ok(Self { positions })
    }

    /// Order built from a decode sequence (first-decoded stream first).
    pub fn from_sequence(sequence: &[usize]) -> Result<Self> {
        let n = sequence.len();
        let mut positions = vec![usize::MAX; n];
        for (pos, &k) in sequence.iter().enumerate() {
            if k >= n || positions[k] != usize::MAX {
                return Err(NgmaError::InvalidConfig(
                    "decode sequence must be a permutation".into(),
                ));
            }
            positions[k] = pos;
        }
        Ok(Self { positions })
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }
}

/// Per-stream unit-norm receive vectors and transmit powers. Uplink powers are
/// individually capped by the scenario budget.
#[derive(Debug, Clone)]
pub struct DetectorSet {
    vectors: Vec<ComplexVec>,
    powers: Vec<f64>,
}

impl DetectorSet {
    pub fn new(vectors: Vec<ComplexVec>, powers: Vec<f64>, power_cap: f64) -> Result<Self> {
        if vectors.len() != powers.len() {
            return Err(NgmaError::DimensionError(
                "one power per detector required".into(),
            ));
        }
        for v in &vectors {
            if (v.norm() - 1.0).abs() > EPS_NORM {
                return Err(NgmaError::InvalidConfig(format!(
                    "detector norm {} is not unit",
                    v.norm()
                )));
            }
        }
        for &p in &powers {
            if !(p >= 0.0) || !p.is_finite() || p > power_cap + EPS_NORM {
                return Err(NgmaError::InvalidConfig(format!(
                    "uplink power {} outside [0, {}]",
                    p, power_cap
                )));
            }
        }
        Ok(Self { vectors, powers })
    }

    pub fn vectors(&self) -> &[ComplexVec] {
        &self.vectors
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }
}

/// Achievable rate of stream `k` under layer partition `lp`: interference from
/// same-layer and later-layer streams only.
pub fn ul_ngma_rate(s: &Scenario, lp: &LayerPartition, d: &DetectorSet, k: usize) -> Result<f64> {
    if k >= s.n_users() || k >= lp.n_users() {
        return Err(NgmaError::InvalidUser(k, s.n_users()));
    }
    let sigma2 = s.uplink_noise_power()?;
    let v_k = &d.vectors()[k];
    let signal = d.powers()[k] * cross_gain(v_k, s.channel(k))?;
    let mut interference = 0.0;
    for j in 0..s.n_users() {
        if lp.interferes(k, j) {
            interference += d.powers()[j] * cross_gain(v_k, s.channel(j))?;
        }
    }
    Ok((1.0 + signal / (interference + sigma2)).log2())
}

/// SDMA rates: parallel detection, every other stream interferes.
pub fn ul_sdma_rates(s: &Scenario, d: &DetectorSet) -> Result<Vec<f64>> {
    let lp = LayerPartition::single_layer(s.n_users());
    (0..s.n_users())
        .map(|k| ul_ngma_rate(s, &lp, d, k))
        .collect()
}

/// Fully serial NOMA rates under the given decoding order.
pub fn ul_noma_rates(s: &Scenario, order: &PermutationOrder, d: &DetectorSet) -> Result<Vec<f64>> {
    let lp = LayerPartition::serial(order);
    (0..s.n_users())
        .map(|k| ul_ngma_rate(s, &lp, d, k))
        .collect()
}

/// Matched-filter (MRC) detectors: `v_k = h_k / ||h_k||`.
pub fn mrc_detectors(s: &Scenario) -> Result<Vec<ComplexVec>> {
    (0..s.n_users())
        .map(|k| {
            s.channel(k)
                .normalized()
                .map_err(|_| NgmaError::ZeroChannel(k))
        })
        .collect()
}

/// Which interference set the MMSE detectors are matched against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmseMode {
    /// Residual interference under the layer partition (earlier layers are
    /// already cancelled when a stream is detected).
    LayerAware,
    /// All other streams, regardless of layering.
    Static,
}

/// Linear MMSE detectors, `v_k` proportional to
/// `(sum_j p_j h_j h_j^H + sigma^2 I)^{-1} h_k` over the interfering set,
/// normalized to unit norm.
pub fn mmse_detectors(
    s: &Scenario,
    lp: &LayerPartition,
    powers: &[f64],
    mode: MmseMode,
) -> Result<Vec<ComplexVec>> {
    if powers.len() != s.n_users() {
        return Err(NgmaError::DimensionError(
            "one power per stream required".into(),
        ));
    }
    let sigma2 = s.uplink_noise_power()?;
    let n = s.n_antennas();
    let mut out = Vec::with_capacity(s.n_users());
    for k in 0..s.n_users() {
        let mut a = DMatrix::from_diagonal_element(n, n, Complex64::new(sigma2, 0.0));
        for j in 0..s.n_users() {
            let interferes = match mode {
                MmseMode::LayerAware => lp.interferes(k, j),
                MmseMode::Static => j != k,
            };
            if !interferes {
                continue;
            }
            let h_j = DVector::from_iterator(n, s.channel(j).entries().iter().copied());
            let scaled = &h_j * Complex64::new(powers[j], 0.0);
            a += scaled * h_j.adjoint();
        }
        let h_k = DVector::from_iterator(n, s.channel(k).entries().iter().copied());
        let v = a
            .lu()
            .solve(&h_k)
            .ok_or_else(|| NgmaError::InvalidSpec("singular MMSE matrix".into()))?;
        out.push(ComplexVec::new(v.iter().copied().collect())?.normalized()?);
    }
    Ok(out)
}
