//! Downlink per-user achievable rates under the unified grouped-SIC
//! framework.
//!
//! Users are partitioned into clusters; inside a cluster a total decoding
//! order fixes which user cancels which signal, while every inter-cluster
//! signal is always treated as interference. SIC feasibility requires that a
//! cancelling user can decode the cancelled signal at least as fast as its
//! intended receiver can.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{NgmaError, Result};
use crate::model::{cross_gain, ComplexVec, Scenario};

/// Absolute slack on the SIC decoding-rate condition, in bit/s/Hz. Strict
/// floating-point `>=` is brittle at exact equality (symmetric channels).
pub const EPS_SIC: f64 = 1e-9;

/// Relative rank threshold for ZF feasibility: smallest singular value must
/// exceed `TAU_RANK` times the largest.
pub const TAU_RANK: f64 = 1e-10;

/// Tolerance on beamformer norm and power-budget invariants.
const EPS_NORM: f64 = 1e-12;

/// Partition of the user set into `M` non-empty clusters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grouping {
    clusters: Vec<Vec<usize>>,
    cluster_of: Vec<usize>,
}

impl Grouping {
    /// Clusters must be non-empty, pairwise disjoint, and cover `0..n_users`.
    pub fn new(clusters: Vec<Vec<usize>>, n_users: usize) -> Result<Self> {
        if clusters.is_empty() || clusters.len() > n_users {
            return Err(NgmaError::InvalidConfig(format!(
                "need between 1 and {} clusters",
                n_users
            )));
        }
        let mut cluster_of = vec![usize::MAX; n_users];
        for (m, cluster) in clusters.iter().enumerate() {
            if cluster.is_empty() {
                return Err(NgmaError::InvalidConfig("empty cluster".into()));
            }
            for &k in cluster {
                if k >= n_users {
                    return Err(NgmaError::InvalidUser(k, n_users));
                }
                if cluster_of[k] != usize::MAX {
                    return Err(NgmaError::InvalidConfig(format!(
                        "user {} appears in more than one cluster",
                        k
                    )));
                }
                cluster_of[k] = m;
            }
        }
        if cluster_of.iter().any(|&m| m == usize::MAX) {
            return Err(NgmaError::InvalidConfig(
                "clusters do not cover every user".into(),
            ));
        }
        Ok(Self {
            clusters,
            cluster_of,
        })
    }

    /// One singleton cluster per user (the SDMA structure).
    pub fn singletons(n_users: usize) -> Self {
        Self::new((0..n_users).map(|k| vec![k]).collect(), n_users).unwrap()
    }

    /// All users in one cluster (the beamformer-based NOMA structure).
    pub fn single_cluster(n_users: usize) -> Self {
        Self::new(vec![(0..n_users).collect()], n_users).unwrap()
    }

    pub fn n_clusters(&self) -> usize {
        self.clusters.len()
    }

    pub fn n_users(&self) -> usize {
        self.cluster_of.len()
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    pub fn cluster_of(&self, k: usize) -> usize {
        self.cluster_of[k]
    }

    /// Canonical form: each cluster sorted, clusters ordered by smallest
    /// member. Used for deterministic tie-breaking.
    pub fn canonical(&self) -> Vec<Vec<usize>> {
        let mut cs: Vec<Vec<usize>> = self
            .clusters
            .iter()
            .map(|c| {
                let mut c = c.clone();
                c.sort_unstable();
                c
            })
            .collect();
        cs.sort();
        cs
    }
}

/// Total intra-cluster SIC decoding order, stored as one decode sequence per
/// cluster (first-decoded signal first). The pairwise order bits are derived
/// from the sequences, which guarantees antisymmetry and transitivity by
/// construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntraClusterOrder {
    sequences: Vec<Vec<usize>>,
    // position[k] = index of user k's signal within its cluster sequence
    position: Vec<usize>,
}

impl IntraClusterOrder {
    /// `sequences[m]` must be a permutation of cluster `m` of `g`.
    pub fn new(g: &Grouping, sequences: Vec<Vec<usize>>) -> Result<Self> {
        if sequences.len() != g.n_clusters() {
            return Err(NgmaError::InvalidConfig(
                "one decode sequence per cluster required".into(),
            ));
        }
        let mut position = vec![usize::MAX; g.n_users()];
        for (m, seq) in sequences.iter().enumerate() {
            let mut sorted = seq.clone();
            sorted.sort_unstable();
            let mut cluster = g.clusters()[m].clone();
            cluster.sort_unstable();
            if sorted != cluster {
                return Err(NgmaError::InvalidConfig(format!(
                    "sequence for cluster {} is not a permutation of the cluster",
                    m
                )));
            }
            for (pos, &k) in seq.iter().enumerate() {
                position[k] = pos;
            }
        }
        Ok(Self {
            sequences,
            position,
        })
    }

    /// Decode each cluster in ascending user index.
    pub fn ascending(g: &Grouping) -> Self {
        let sequences = g
            .clusters()
            .iter()
            .map(|c| {
                let mut c = c.clone();
                c.sort_unstable();
                c
            })
            .collect();
        Self::new(g, sequences).unwrap()
    }

    pub fn sequences(&self) -> &[Vec<usize>] {
        &self.sequences
    }

    /// True iff user `k` carries out SIC to decode and remove user `i`'s
    /// signal before decoding its own (the paper's `alpha_{k,i} = 0`). Both
    /// users must be co-clustered; distinct co-clustered pairs always have
    /// exactly one of `decodes(k,i)` / `decodes(i,k)` true.
    pub fn decodes(&self, k: usize, i: usize) -> bool {
        self.position[i] < self.position[k]
    }

    /// The pairwise bit `alpha_{k,i}`: 0 when `k` cancels `i`, 1 otherwise.
    pub fn alpha(&self, k: usize, i: usize) -> u8 {
        if self.decodes(k, i) {
            0
        } else {
            1
        }
    }
}

/// Per-user unit-norm transmit directions and powers, `w_k = sqrt(p_k) * dir_k`.
#[derive(Debug, Clone)]
pub struct BeamformerSet {
    directions: Vec<ComplexVec>,
    powers: Vec<f64>,
}

impl BeamformerSet {
    pub fn new(directions: Vec<ComplexVec>, powers: Vec<f64>, power_budget: f64) -> Result<Self> {
        if directions.len() != powers.len() {
            return Err(NgmaError::DimensionError(
                "one power per beam direction required".into(),
            ));
        }
        for d in &directions {
            if (d.norm() - 1.0).abs() > EPS_NORM {
                return Err(NgmaError::InvalidConfig(format!(
                    "beam direction norm {} is not unit",
                    d.norm()
                )));
            }
        }
        if powers.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(NgmaError::InvalidConfig(
                "beam powers must be non-negative and finite".into(),
            ));
        }
        let total: f64 = powers.iter().sum();
        if total > power_budget + EPS_NORM {
            return Err(NgmaError::InvalidConfig(format!(
                "total power {} exceeds budget {}",
                total, power_budget
            )));
        }
        Ok(Self { directions, powers })
    }

    pub fn directions(&self) -> &[ComplexVec] {
        &self.directions
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }
}

/// How the weak user's rate and the SIC condition are accounted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SicMode {
    /// Decoding-rate condition enforced as a feasibility check; rates are the
    /// plain per-user rates.
    Strict,
    /// A cancelled user's rate is capped by the decoding rates at every user
    /// that cancels it; no feasibility verdict is needed.
    Relaxed,
}

/// Per-user rates plus the SIC feasibility verdict. `violated_pairs` holds
/// `(decoder, target, cluster)` triples failing the decoding-rate condition.
#[derive(Debug, Clone)]
pub struct RateReport {
    pub per_user_rate: Vec<f64>,
    pub sic_feasible: bool,
    pub violated_pairs: Vec<(usize, usize, usize)>,
}

fn check_user(s: &Scenario, k: usize) -> Result<()> {
    if k >= s.n_users() {
        return Err(NgmaError::InvalidUser(k, s.n_users()));
    }
    Ok(())
}

/// Achievable rate of user `k` under grouping `g`, intra-cluster order `o`,
/// and beamformers `b`: cancelled intra-cluster signals are excluded from the
/// interference, every inter-cluster signal is included.
pub fn dl_user_rate(
    s: &Scenario,
    g: &Grouping,
    o: &IntraClusterOrder,
    b: &BeamformerSet,
    k: usize,
) -> Result<f64> {
    check_user(s, k)?;
    let m = g.cluster_of(k);
    let h_k = s.channel(k);
    let signal = b.powers()[k] * cross_gain(h_k, &b.directions()[k])?;
    let mut interference = 0.0;
    for j in 0..s.n_users() {
        if j == k {
            continue;
        }
        let in_cluster = g.cluster_of(j) == m;
        if in_cluster && o.decodes(k, j) {
            continue; // SIC-removed
        }
        interference += b.powers()[j] * cross_gain(h_k, &b.directions()[j])?;
    }
    Ok((1.0 + signal / (interference + s.noise_power(k))).log2())
}

/// Rate at which user `decoder` can decode the signal intended for `target`
/// (both in the same cluster). The interference set is gated by the target's
/// cancellation state: a co-clustered signal interferes iff it is decoded
/// after the target's, so `dl_cross_decoding_rate(i, i)` coincides with
/// `dl_user_rate(i)`.
pub fn dl_cross_decoding_rate(
    s: &Scenario,
    g: &Grouping,
    o: &IntraClusterOrder,
    b: &BeamformerSet,
    decoder: usize,
    target: usize,
) -> Result<f64> {
    check_user(s, decoder)?;
    check_user(s, target)?;
    let m = g.cluster_of(target);
    if g.cluster_of(decoder) != m {
        return Err(NgmaError::NotCoClustered(decoder, target));
    }
    let h = s.channel(decoder);
    let signal = b.powers()[target] * cross_gain(h, &b.directions()[target])?;
    let mut interference = 0.0;
    for j in 0..s.n_users() {
        if j == target {
            continue;
        }
        if g.cluster_of(j) == m && o.decodes(target, j) {
            // already removed before the target's signal is decoded
            continue;
        }
        interference += b.powers()[j] * cross_gain(h, &b.directions()[j])?;
    }
    Ok((1.0 + signal / (interference + s.noise_power(decoder))).log2())
}

/// Rates plus SIC verdict under the chosen accounting mode.
pub fn dl_rate_report(
    s: &Scenario,
    g: &Grouping,
    o: &IntraClusterOrder,
    b: &BeamformerSet,
    mode: SicMode,
) -> Result<RateReport> {
    let mut per_user_rate: Vec<f64> = (0..s.n_users())
        .map(|k| dl_user_rate(s, g, o, b, k))
        .collect::<Result<_>>()?;
    let mut violated_pairs = Vec::new();
    for (m, cluster) in g.clusters().iter().enumerate() {
        for &k in cluster {
            for &i in cluster {
                if k == i || !o.decodes(k, i) {
                    continue;
                }
                let at_decoder = dl_cross_decoding_rate(s, g, o, b, k, i)?;
                let at_target = dl_cross_decoding_rate(s, g, o, b, i, i)?;
                match mode {
                    SicMode::Strict => {
                        if at_decoder < at_target - EPS_SIC {
                            violated_pairs.push((k, i, m));
                        }
                    }
                    SicMode::Relaxed => {
                        if at_decoder < per_user_rate[i] {
                            per_user_rate[i] = at_decoder;
                        }
                    }
                }
            }
        }
    }
    Ok(RateReport {
        per_user_rate,
        sic_feasible: violated_pairs.is_empty(),
        violated_pairs,
    })
}

/// Strict-mode SIC feasibility check.
pub fn dl_sic_check(
    s: &Scenario,
    g: &Grouping,
    o: &IntraClusterOrder,
    b: &BeamformerSet,
) -> Result<RateReport> {
    dl_rate_report(s, g, o, b, SicMode::Strict)
}

/// SDMA rates: every signal of every other user interferes.
pub fn dl_sdma_rates(s: &Scenario, b: &BeamformerSet) -> Result<Vec<f64>> {
    let g = Grouping::singletons(s.n_users());
    let o = IntraClusterOrder::ascending(&g);
    (0..s.n_users())
        .map(|k| dl_user_rate(s, &g, &o, b, k))
        .collect()
}

/// Beamformer-based NOMA rates: all users form one SIC cluster.
pub fn dl_bb_noma_rates(s: &Scenario, sequence: &[usize], b: &BeamformerSet) -> Result<Vec<f64>> {
    let g = Grouping::single_cluster(s.n_users());
    let o = IntraClusterOrder::new(&g, vec![sequence.to_vec()])?;
    (0..s.n_users())
        .map(|k| dl_user_rate(s, &g, &o, b, k))
        .collect()
}

/// Cluster-based NOMA rates: every user of cluster `m` transmits through the
/// shared unit direction `cluster_directions[m]`. Requires `1 < M < K` and at
/// least two users per cluster.
pub fn dl_cb_noma_rates(
    s: &Scenario,
    g: &Grouping,
    o: &IntraClusterOrder,
    cluster_directions: &[ComplexVec],
    powers: &[f64],
) -> Result<Vec<f64>> {
    let m_count = g.n_clusters();
    if m_count <= 1 || m_count >= s.n_users() {
        return Err(NgmaError::InvalidConfig(
            "cluster-based NOMA requires 1 < M < K".into(),
        ));
    }
    for (m, cluster) in g.clusters().iter().enumerate() {
        if cluster.len() < 2 {
            return Err(NgmaError::InvalidClusterSize(m));
        }
    }
    if cluster_directions.len() != m_count {
        return Err(NgmaError::DimensionError(
            "one shared direction per cluster required".into(),
        ));
    }
    let directions: Vec<ComplexVec> = (0..s.n_users())
        .map(|k| cluster_directions[g.cluster_of(k)].clone())
        .collect();
    let b = BeamformerSet::new(directions, powers.to_vec(), s.power_budget())?;
    (0..s.n_users())
        .map(|k| dl_user_rate(s, g, o, &b, k))
        .collect()
}

fn channel_matrix(s: &Scenario, users: &[usize]) -> DMatrix<Complex64> {
    // Row j holds h_{users[j]}^H.
    DMatrix::from_fn(users.len(), s.n_antennas(), |r, c| {
        s.channel(users[r]).entries()[c].conj()
    })
}

/// Per-user zero-forcing directions: `direction_k` is orthogonal to every
/// other user's channel. Requires `K <= N` and a full-row-rank channel matrix.
pub fn zf_directions(s: &Scenario) -> Result<Vec<ComplexVec>> {
    let (k_users, n) = (s.n_users(), s.n_antennas());
    if k_users > n {
        return Err(NgmaError::Overloaded(format!(
            "zero forcing needs K <= N, got K = {}, N = {}",
            k_users, n
        )));
    }
    let all: Vec<usize> = (0..k_users).collect();
    let h = channel_matrix(s, &all);
    let svals = h.clone().svd(false, false).singular_values;
    let sigma_max = svals.max();
    let sigma_min = svals.min();
    if sigma_min <= TAU_RANK * sigma_max {
        return Err(NgmaError::RankDeficient {
            sigma_min,
            threshold: TAU_RANK * sigma_max,
        });
    }
    // W = H^H (H H^H)^{-1}: column k satisfies h_j^H w_k = delta_{jk}.
    let gram = &h * h.adjoint();
    let gram_inv = gram.try_inverse().ok_or(NgmaError::RankDeficient {
        sigma_min,
        threshold: TAU_RANK * sigma_max,
    })?;
    let w = h.adjoint() * gram_inv;
    (0..k_users)
        .map(|k| {
            let col: Vec<Complex64> = w.column(k).iter().copied().collect();
            ComplexVec::new(col)?.normalized()
        })
        .collect()
}

/// Per-cluster shared directions orthogonal to every channel outside the
/// cluster. Feasible whenever the out-of-cluster channels do not span the
/// whole antenna space (the overloaded pairwise-parallel construction).
pub fn cluster_zf_directions(s: &Scenario, g: &Grouping) -> Result<Vec<ComplexVec>> {
    let n = s.n_antennas();
    let mut out = Vec::with_capacity(g.n_clusters());
    for (m, cluster) in g.clusters().iter().enumerate() {
        let others: Vec<usize> = (0..s.n_users()).filter(|k| g.cluster_of(*k) != m).collect();
        if others.is_empty() {
            // no out-of-cluster users: any unit vector qualifies; point at the
            // cluster's first channel
            out.push(s.channel(cluster[0]).normalized()?);
            continue;
        }
        let b = channel_matrix(s, &others);
        // Nullspace of B from the Hermitian eigendecomposition of B^H B.
        let bhb = b.adjoint() * &b;
        let eig = nalgebra::SymmetricEigen::new(bhb);
        let lambda_max = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
        let tol = (TAU_RANK * TAU_RANK) * lambda_max.max(1e-300);
        let null_cols: Vec<usize> = (0..n).filter(|&c| eig.eigenvalues[c] <= tol).collect();
        if null_cols.is_empty() {
            return Err(NgmaError::Overloaded(format!(
                "out-of-cluster channels of cluster {} span the full antenna space",
                m
            )));
        }
        // Project the cluster's strongest channel onto the nullspace; fall
        // back to a basis vector if the projection vanishes.
        let strongest = cluster
            .iter()
            .copied()
            .max_by(|&a, &b| {
                s.channel(a)
                    .norm_sqr()
                    .partial_cmp(&s.channel(b).norm_sqr())
                    .unwrap()
            })
            .unwrap();
        let h_vec =
            nalgebra::DVector::from_iterator(n, s.channel(strongest).entries().iter().copied());
        let mut proj = nalgebra::DVector::from_element(n, Complex64::new(0.0, 0.0));
        for &c in &null_cols {
            let basis = eig.eigenvectors.column(c);
            let coeff: Complex64 = basis
                .iter()
                .zip(h_vec.iter())
                .map(|(b, h)| b.conj() * h)
                .sum();
            proj += basis * coeff;
        }
        let dir_vec = if proj.norm() > 1e-12 * h_vec.norm().max(1.0) {
            proj
        } else {
            eig.eigenvectors.column(null_cols[0]).into_owned()
        };
        let dir = ComplexVec::new(dir_vec.iter().copied().collect())?.normalized()?;
        out.push(dir);
    }
    Ok(out)
}
