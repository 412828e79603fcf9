//! Desk-scale exhaustive search over groupings, decoding orders, layer
//! partitions, direction families, and power grids.
//!
//! Every search space is finite and declared up front; the enumeration is a
//! deterministic sequence and results are reproducible across runs and thread
//! counts. Ties are broken lexicographically on a canonical configuration
//! encoding, so parallel reduction returns the same winner as a serial scan.

use rayon::prelude::*;

use crate::downlink::{
    cluster_zf_directions, dl_sic_check, zf_directions, BeamformerSet, Grouping, IntraClusterOrder,
};
use crate::error::{NgmaError, Result};
use crate::model::{ComplexVec, Scenario};
use crate::uplink::{
    mmse_detectors, mrc_detectors, ul_ngma_rate, DetectorSet, LayerPartition, MmseMode,
};

/// Hard cap on enumerated configurations; exceeding it refuses the search
/// instead of silently truncating.
pub const DEFAULT_SEARCH_CAP: u64 = 10_000_000;

/// Which groupings (downlink) or layer structures (uplink) are enumerated.
#[derive(Debug, Clone)]
pub enum GroupingMode {
    /// Downlink: every set partition of the users. Uplink: every ordered set
    /// partition into layers.
    AllPartitions,
    /// A single fixed grouping / layer partition.
    Fixed(Vec<Vec<usize>>),
    /// Downlink SDMA structure (`M = K`); uplink fully serial structures
    /// (`L = K`, all decoding orders).
    Singletons,
    /// Downlink one-cluster structure (`M = 1`); uplink single layer
    /// (`L = 1`).
    SingleCluster,
    /// Downlink cluster-based structures only: `1 < M < K`, every cluster
    /// with at least two users.
    ProperClusters,
}

#[derive(Debug, Clone)]
pub enum OrderMode {
    AllPermutations,
    /// Per-cluster decode sequences for a fixed grouping.
    Fixed(Vec<Vec<usize>>),
}

/// Finite family of candidate beam/detector directions.
#[derive(Debug, Clone)]
pub enum DirectionFamily {
    /// Per-user zero-forcing directions (downlink) / ZF-style detectors
    /// (uplink). Requires `K <= N` and full rank.
    Zf,
    /// Per-cluster shared ZF directions, orthogonal to out-of-cluster
    /// channels. Downlink only; groupings with infeasible geometry are
    /// skipped.
    ClusterZf,
    /// Matched filter: each user's own normalized channel.
    Matched,
    /// Layer-aware linear MMSE detectors, recomputed per layer structure and
    /// power vector. Uplink only.
    Mmse,
    /// Each user independently picks any direction from the list (shared per
    /// cluster when `shared_cluster_directions` is set).
    Explicit(Vec<ComplexVec>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    SumRate,
    MinRate,
}

#[derive(Debug, Clone)]
pub struct SearchSpace {
    pub grouping_mode: GroupingMode,
    pub order_mode: OrderMode,
    pub direction_family: DirectionFamily,
    /// All users of a cluster share one direction choice (the cluster-based
    /// NOMA restriction). Only meaningful with `Explicit` or `ClusterZf`.
    pub shared_cluster_directions: bool,
    /// Uniform power steps per user, endpoints 0 and the cap included.
    pub power_grid: usize,
    pub objective: Objective,
    pub cap: u64,
}

impl SearchSpace {
    pub fn new(
        grouping_mode: GroupingMode,
        order_mode: OrderMode,
        direction_family: DirectionFamily,
        power_grid: usize,
        objective: Objective,
    ) -> Self {
        Self {
            grouping_mode,
            order_mode,
            direction_family,
            shared_cluster_directions: false,
            power_grid,
            objective,
            cap: DEFAULT_SEARCH_CAP,
        }
    }
}

/// The winning downlink configuration.
#[derive(Debug, Clone)]
pub struct DlConfig {
    pub grouping: Grouping,
    pub order: IntraClusterOrder,
    pub beams: BeamformerSet,
}

/// The winning uplink configuration.
#[derive(Debug, Clone)]
pub struct UlConfig {
    pub layers: LayerPartition,
    pub detectors: DetectorSet,
}

#[derive(Debug, Clone)]
pub enum BestConfig {
    Downlink(DlConfig),
    Uplink(UlConfig),
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub best_config: BestConfig,
    pub best_value: f64,
    pub feasible: bool,
    /// Number of configurations actually evaluated through the rate modules.
    pub evaluations: u64,
    /// Uplink only: best objective value per layer count `L`, exposing the
    /// rate-versus-latency tradeoff as a Pareto list.
    pub layer_tradeoff: Vec<(usize, f64)>,
}

fn objective_value(objective: Objective, rates: &[f64]) -> f64 {
    match objective {
        Objective::SumRate => rates.iter().sum(),
        Objective::MinRate => rates.iter().cloned().fold(f64::INFINITY, f64::min),
    }
}

// ---------------------------------------------------------------------------
// Combinatorial enumeration
// ---------------------------------------------------------------------------

/// All set partitions of `{0..n}` into unordered blocks. Blocks are listed by
/// first element; members ascend, so every partition is in canonical form.
pub fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut current: Vec<Vec<usize>> = Vec::new();
    fn recurse(
        next: usize,
        n: usize,
        current: &mut Vec<Vec<usize>>,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        if next == n {
            out.push(current.clone());
            return;
        }
        for b in 0..current.len() {
            current[b].push(next);
            recurse(next + 1, n, current, out);
            current[b].pop();
        }
        current.push(vec![next]);
        recurse(next + 1, n, current, out);
        current.pop();
    }
    recurse(0, n, &mut current, &mut out);
    out
}

/// All permutations of `items` in lexicographic order of position indices.
pub fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut tail in permutations(&rest) {
            let mut perm = vec![x];
            perm.append(&mut tail);
            out.push(perm);
        }
    }
    out
}

/// Every ordered set partition of `{0..k}` exactly once; the count is the
/// ordered Bell (Fubini) number.
pub fn enumerate_ordered_partitions(k: usize) -> Vec<LayerPartition> {
    let mut out = Vec::new();
    for partition in set_partitions(k) {
        let block_ids: Vec<usize> = (0..partition.len()).collect();
        for block_order in permutations(&block_ids) {
            let layers: Vec<Vec<usize>> =
                block_order.iter().map(|&b| partition[b].clone()).collect();
            out.push(LayerPartition::new(layers, k).unwrap());
        }
    }
    out
}

/// Cartesian product of per-cluster decode-sequence permutations.
fn order_choices(g: &Grouping, mode: &OrderMode) -> Result<Vec<IntraClusterOrder>> {
    match mode {
        OrderMode::Fixed(sequences) => Ok(vec![IntraClusterOrder::new(g, sequences.clone())?]),
        OrderMode::AllPermutations => {
            let per_cluster: Vec<Vec<Vec<usize>>> =
                g.clusters().iter().map(|c| permutations(c)).collect();
            let mut combos: Vec<Vec<Vec<usize>>> = vec![vec![]];
            for cluster_perms in &per_cluster {
                let mut next = Vec::with_capacity(combos.len() * cluster_perms.len());
                for combo in &combos {
                    for perm in cluster_perms {
                        let mut c = combo.clone();
                        c.push(perm.clone());
                        next.push(c);
                    }
                }
                combos = next;
            }
            combos
                .into_iter()
                .map(|seqs| IntraClusterOrder::new(g, seqs))
                .collect()
        }
    }
}

/// Uniform power levels `0..=cap` with `steps` points.
fn power_levels(steps: usize, cap: f64) -> Vec<f64> {
    (0..steps)
        .map(|i| cap * i as f64 / (steps - 1) as f64)
        .collect()
}

/// All index vectors in `{0..base}^len` in odometer order.
fn index_vectors(base: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(base.pow(len as u32));
    let mut idx = vec![0usize; len];
    loop {
        out.push(idx.clone());
        let mut pos = len;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < base {
                break;
            }
            idx[pos] = 0;
        }
    }
}

// ---------------------------------------------------------------------------
// Candidate tracking with deterministic tie-breaks
// ---------------------------------------------------------------------------

#[derive(Clone)]
struct Candidate<C> {
    value: f64,
    encoding: Vec<usize>,
    config: C,
}

impl<C: Clone> Candidate<C> {
    fn better_than(&self, other: &Option<Candidate<C>>) -> bool {
        match other {
            None => true,
            Some(o) => {
                self.value > o.value || (self.value == o.value && self.encoding < o.encoding)
            }
        }
    }
}

fn merge<C: Clone>(a: Option<Candidate<C>>, b: Option<Candidate<C>>) -> Option<Candidate<C>> {
    match (a, b) {
        (Some(x), y) => {
            if x.better_than(&y) {
                Some(x)
            } else {
                y
            }
        }
        (None, y) => y,
    }
}

fn encode_grouping(g: &Grouping, seqs: &[Vec<usize>]) -> Vec<usize> {
    let mut enc = Vec::new();
    for c in g.canonical() {
        enc.extend(c);
        enc.push(usize::MAX);
    }
    for s in seqs {
        enc.extend(s.iter().copied());
        enc.push(usize::MAX);
    }
    enc
}

// ---------------------------------------------------------------------------
// Downlink search
// ---------------------------------------------------------------------------

fn dl_groupings(s: &Scenario, mode: &GroupingMode) -> Result<Vec<Grouping>> {
    let k = s.n_users();
    Ok(match mode {
        GroupingMode::AllPartitions => set_partitions(k)
            .into_iter()
            .map(|cs| Grouping::new(cs, k).unwrap())
            .collect(),
        GroupingMode::Fixed(cs) => vec![Grouping::new(cs.clone(), k)?],
        GroupingMode::Singletons => vec![Grouping::singletons(k)],
        GroupingMode::SingleCluster => vec![Grouping::single_cluster(k)],
        GroupingMode::ProperClusters => set_partitions(k)
            .into_iter()
            .filter(|cs| cs.len() > 1 && cs.len() < k && cs.iter().all(|c| c.len() >= 2))
            .map(|cs| Grouping::new(cs, k).unwrap())
            .collect(),
    })
}

/// Candidate per-user direction assignments for one grouping, each paired
/// with its tie-break encoding. An empty list means the family has no
/// feasible member for this grouping (cluster-ZF with bad geometry).
fn dl_direction_candidates(
    s: &Scenario,
    g: &Grouping,
    space: &SearchSpace,
) -> Result<Vec<(Vec<ComplexVec>, Vec<usize>)>> {
    match &space.direction_family {
        DirectionFamily::Zf => Ok(vec![(zf_directions(s)?, vec![0])]),
        DirectionFamily::Matched => Ok(vec![(mrc_detectors(s)?, vec![0])]),
        DirectionFamily::ClusterZf => match cluster_zf_directions(s, g) {
            Ok(cluster_dirs) => {
                let dirs = (0..s.n_users())
                    .map(|k| cluster_dirs[g.cluster_of(k)].clone())
                    .collect();
                Ok(vec![(dirs, vec![0])])
            }
            Err(NgmaError::Overloaded(_)) => Ok(vec![]),
            Err(e) => Err(e),
        },
        DirectionFamily::Mmse => Err(NgmaError::InvalidConfig(
            "MMSE detectors are an uplink family".into(),
        )),
        DirectionFamily::Explicit(list) => {
            if list.is_empty() {
                return Err(NgmaError::InvalidConfig("empty direction list".into()));
            }
            for d in list {
                if (d.norm() - 1.0).abs() > 1e-12 {
                    return Err(NgmaError::InvalidConfig(
                        "explicit directions must be unit norm".into(),
                    ));
                }
            }
            let slots = if space.shared_cluster_directions {
                g.n_clusters()
            } else {
                s.n_users()
            };
            Ok(index_vectors(list.len(), slots)
                .into_iter()
                .map(|idx| {
                    let dirs = (0..s.n_users())
                        .map(|k| {
                            let slot = if space.shared_cluster_directions {
                                g.cluster_of(k)
                            } else {
                                k
                            };
                            list[idx[slot]].clone()
                        })
                        .collect();
                    (dirs, idx)
                })
                .collect())
        }
    }
}

fn count_dl_space(s: &Scenario, space: &SearchSpace, groupings: &[Grouping]) -> Result<u64> {
    if space.power_grid < 2 {
        return Err(NgmaError::InvalidConfig("power_grid must be >= 2".into()));
    }
    let k = s.n_users() as u32;
    let powers = (space.power_grid as u64).checked_pow(k).unwrap_or(u64::MAX);
    let mut total: u64 = 0;
    for g in groupings {
        let orders: u64 = match &space.order_mode {
            OrderMode::Fixed(_) => 1,
            OrderMode::AllPermutations => g
                .clusters()
                .iter()
                .map(|c| (1..=c.len() as u64).product::<u64>())
                .product(),
        };
        let dirs: u64 = match &space.direction_family {
            DirectionFamily::Explicit(list) => {
                let slots = if space.shared_cluster_directions {
                    g.n_clusters() as u32
                } else {
                    k
                };
                (list.len() as u64).checked_pow(slots).unwrap_or(u64::MAX)
            }
            _ => 1,
        };
        total = total.saturating_add(orders.saturating_mul(dirs).saturating_mul(powers));
    }
    if total > space.cap {
        return Err(NgmaError::SearchTooLarge(total, space.cap));
    }
    Ok(total)
}

struct InfeasibleBest {
    value: f64,
    slack: f64,
}

/// Brute-force downlink search. Only SIC-feasible configurations are
/// eligible; if none exists the least-violating value and slack are reported
/// through the error.
pub fn dl_exhaustive_search(s: &Scenario, space: &SearchSpace) -> Result<SearchResult> {
    let groupings = dl_groupings(s, &space.grouping_mode)?;
    count_dl_space(s, space, &groupings)?;

    let budget = s.power_budget();
    let levels = power_levels(space.power_grid, budget);
    let power_idx = index_vectors(space.power_grid, s.n_users());

    // (grouping, order) pairs form the parallel work list
    let mut work: Vec<(Grouping, IntraClusterOrder)> = Vec::new();
    for g in &groupings {
        for o in order_choices(g, &space.order_mode)? {
            work.push((g.clone(), o));
        }
    }

    type DlCand = Option<Candidate<DlConfig>>;
    let result = work
        .par_iter()
        .map(|(g, o)| -> Result<(DlCand, Option<InfeasibleBest>, u64)> {
            let mut best: DlCand = None;
            let mut best_inf: Option<InfeasibleBest> = None;
            let mut evals: u64 = 0;
            let base_enc = encode_grouping(g, o.sequences());
            for (dirs, dir_enc) in dl_direction_candidates(s, g, space)? {
                for pidx in &power_idx {
                    let powers: Vec<f64> = pidx.iter().map(|&i| levels[i]).collect();
                    let total: f64 = powers.iter().sum();
                    if total > budget + 1e-12 {
                        continue;
                    }
                    let beams = BeamformerSet::new(dirs.clone(), powers, budget)?;
                    let report = dl_sic_check(s, g, o, &beams)?;
                    evals += 1;
                    let value = objective_value(space.objective, &report.per_user_rate);
                    if report.sic_feasible {
                        let mut encoding = base_enc.clone();
                        encoding.extend(&dir_enc);
                        encoding.push(usize::MAX);
                        encoding.extend(pidx);
                        let cand = Candidate {
                            value,
                            encoding,
                            config: DlConfig {
                                grouping: g.clone(),
                                order: o.clone(),
                                beams,
                            },
                        };
                        if cand.better_than(&best) {
                            best = Some(cand);
                        }
                    } else {
                        let slack = report
                            .violated_pairs
                            .iter()
                            .map(|&(k, i, _)| {
                                let need =
                                    crate::downlink::dl_cross_decoding_rate(s, g, o, &beams, i, i)
                                        .unwrap();
                                let have =
                                    crate::downlink::dl_cross_decoding_rate(s, g, o, &beams, k, i)
                                        .unwrap();
                                need - have
                            })
                            .fold(0.0_f64, f64::max);
                        let replace = match &best_inf {
                            None => true,
                            Some(b) => slack < b.slack,
                        };
                        if replace {
                            best_inf = Some(InfeasibleBest { value, slack });
                        }
                    }
                }
            }
            Ok((best, best_inf, evals))
        })
        .try_reduce(
            || (None, None, 0),
            |a, b| {
                let inf = match (a.1, b.1) {
                    (Some(x), Some(y)) => Some(if x.slack <= y.slack { x } else { y }),
                    (x, None) => x,
                    (None, y) => y,
                };
                Ok((merge(a.0, b.0), inf, a.2 + b.2))
            },
        )?;

    let (best, best_inf, evaluations) = result;
    match best {
        Some(c) => Ok(SearchResult {
            best_config: BestConfig::Downlink(c.config),
            best_value: c.value,
            feasible: true,
            evaluations,
            layer_tradeoff: vec![],
        }),
        None => {
            let inf = best_inf.ok_or_else(|| {
                NgmaError::InvalidConfig("search space contained no configuration".into())
            })?;
            Err(NgmaError::Infeasible {
                best_value: inf.value,
                max_slack: inf.slack,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// Uplink search
// ---------------------------------------------------------------------------

fn ul_layer_structures(s: &Scenario, mode: &GroupingMode) -> Result<Vec<LayerPartition>> {
    let k = s.n_users();
    Ok(match mode {
        GroupingMode::AllPartitions => enumerate_ordered_partitions(k),
        GroupingMode::Fixed(layers) => vec![LayerPartition::new(layers.clone(), k)?],
        GroupingMode::SingleCluster => vec![LayerPartition::single_layer(k)],
        GroupingMode::Singletons => {
            let all: Vec<usize> = (0..k).collect();
            permutations(&all)
                .into_iter()
                .map(|seq| {
                    LayerPartition::new(seq.into_iter().map(|u| vec![u]).collect(), k).unwrap()
                })
                .collect()
        }
        GroupingMode::ProperClusters => {
            return Err(NgmaError::InvalidConfig(
                "proper-cluster restriction is a downlink notion".into(),
            ))
        }
    })
}

fn encode_layers(lp: &LayerPartition) -> Vec<usize> {
    let mut enc = Vec::new();
    for layer in lp.layers() {
        let mut l = layer.clone();
        l.sort_unstable();
        enc.extend(l);
        enc.push(usize::MAX);
    }
    enc
}

fn count_ul_space(s: &Scenario, space: &SearchSpace, structures: &[LayerPartition]) -> Result<u64> {
    if space.power_grid < 2 {
        return Err(NgmaError::InvalidConfig("power_grid must be >= 2".into()));
    }
    let k = s.n_users() as u32;
    let powers = (space.power_grid as u64).checked_pow(k).unwrap_or(u64::MAX);
    let dirs: u64 = match &space.direction_family {
        DirectionFamily::Explicit(list) => (list.len() as u64).checked_pow(k).unwrap_or(u64::MAX),
        _ => 1,
    };
    let total = (structures.len() as u64)
        .saturating_mul(dirs)
        .saturating_mul(powers);
    if total > space.cap {
        return Err(NgmaError::SearchTooLarge(total, space.cap));
    }
    Ok(total)
}

/// Brute-force uplink search over layer structures, detector family, and
/// per-user power grids. The result carries the best value per layer count so
/// the rate-versus-latency tradeoff stays visible.
pub fn ul_exhaustive_search(s: &Scenario, space: &SearchSpace) -> Result<SearchResult> {
    let structures = ul_layer_structures(s, &space.grouping_mode)?;
    count_ul_space(s, space, &structures)?;

    let cap = s.power_budget();
    let levels = power_levels(space.power_grid, cap);
    let power_idx = index_vectors(space.power_grid, s.n_users());
    let k_users = s.n_users();

    // fixed detector vectors when the family does not depend on layering
    let fixed_vectors: Option<Vec<ComplexVec>> = match &space.direction_family {
        DirectionFamily::Matched => Some(mrc_detectors(s)?),
        DirectionFamily::Zf => Some(zf_directions(s)?),
        DirectionFamily::Mmse => None,
        DirectionFamily::Explicit(_) => None,
        DirectionFamily::ClusterZf => {
            return Err(NgmaError::InvalidConfig(
                "cluster-ZF directions are a downlink family".into(),
            ))
        }
    };

    type UlCand = Option<Candidate<UlConfig>>;
    type PerLayer = Vec<Option<f64>>;
    let result = structures
        .par_iter()
        .map(|lp| -> Result<(UlCand, PerLayer, u64)> {
            let mut best: UlCand = None;
            let mut per_layer: PerLayer = vec![None; k_users + 1];
            let mut evals: u64 = 0;
            let base_enc = encode_layers(lp);

            let dir_choices: Vec<(Option<Vec<ComplexVec>>, Vec<usize>)> =
                match &space.direction_family {
                    DirectionFamily::Explicit(list) => index_vectors(list.len(), k_users)
                        .into_iter()
                        .map(|idx| {
                            let dirs = idx.iter().map(|&i| list[i].clone()).collect();
                            (Some(dirs), idx)
                        })
                        .collect(),
                    _ => vec![(fixed_vectors.clone(), vec![0])],
                };

            for (dirs, dir_enc) in dir_choices {
                for pidx in &power_idx {
                    let powers: Vec<f64> = pidx.iter().map(|&i| levels[i]).collect();
                    let vectors = match &dirs {
                        Some(v) => v.clone(),
                        // layer-aware MMSE depends on layers and powers
                        None => mmse_detectors(s, lp, &powers, MmseMode::LayerAware)?,
                    };
                    let d = DetectorSet::new(vectors, powers, cap)?;
                    let rates: Vec<f64> = (0..k_users)
                        .map(|k| ul_ngma_rate(s, lp, &d, k))
                        .collect::<Result<_>>()?;
                    evals += 1;
                    let value = objective_value(space.objective, &rates);
                    let l = lp.n_layers();
                    if per_layer[l].map_or(true, |v| value > v) {
                        per_layer[l] = Some(value);
                    }
                    let mut encoding = base_enc.clone();
                    encoding.extend(&dir_enc);
                    encoding.push(usize::MAX);
                    encoding.extend(pidx);
                    let cand = Candidate {
                        value,
                        encoding,
                        config: UlConfig {
                            layers: lp.clone(),
                            detectors: d,
                        },
                    };
                    if cand.better_than(&best) {
                        best = Some(cand);
                    }
                }
            }
            Ok((best, per_layer, evals))
        })
        .try_reduce(
            || (None, vec![None; k_users + 1], 0),
            |a, b| {
                let mut per_layer = a.1;
                for (slot, v) in per_layer.iter_mut().zip(b.1) {
                    if let Some(v) = v {
                        if slot.map_or(true, |s| v > s) {
                            *slot = Some(v);
                        }
                    }
                }
                Ok((merge(a.0, b.0), per_layer, a.2 + b.2))
            },
        )?;

    let (best, per_layer, evaluations) = result;
    let best = best.ok_or_else(|| {
        NgmaError::InvalidConfig("search space contained no configuration".into())
    })?;
    let layer_tradeoff = per_layer
        .into_iter()
        .enumerate()
        .filter_map(|(l, v)| v.map(|v| (l, v)))
        .collect();
    Ok(SearchResult {
        best_config: BestConfig::Uplink(best.config),
        best_value: best.value,
        feasible: true,
        evaluations,
        layer_tradeoff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_scenario, ChannelSpec};
    use approx::assert_abs_diff_eq;

    fn cv(reals: &[f64]) -> ComplexVec {
        ComplexVec::from_reals(reals).unwrap()
    }

    #[test]
    fn ordered_partition_counts_are_fubini() {
        assert_eq!(enumerate_ordered_partitions(1).len(), 1);
        assert_eq!(enumerate_ordered_partitions(2).len(), 3);
        assert_eq!(enumerate_ordered_partitions(3).len(), 13);
        assert_eq!(enumerate_ordered_partitions(4).len(), 75);
    }

    #[test]
    fn ordered_partitions_are_distinct() {
        let parts = enumerate_ordered_partitions(3);
        let mut keys: Vec<Vec<usize>> = parts.iter().map(encode_layers).collect();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), 13);
    }

    #[test]
    fn set_partition_counts_are_bell() {
        assert_eq!(set_partitions(3).len(), 5);
        assert_eq!(set_partitions(4).len(), 15);
        assert_eq!(set_partitions(5).len(), 52);
    }

    #[test]
    fn orthogonal_two_user_search_picks_sdma() {
        let spec = ChannelSpec::explicit(vec![cv(&[1.0, 0.0]), cv(&[0.0, 1.0])]);
        let s = generate_scenario(&spec, 2, 2, vec![1.0, 1.0], 1.0).unwrap();
        let space = SearchSpace::new(
            GroupingMode::AllPartitions,
            OrderMode::AllPermutations,
            DirectionFamily::Zf,
            5,
            Objective::SumRate,
        );
        let result = dl_exhaustive_search(&s, &space).unwrap();
        match result.best_config {
            BestConfig::Downlink(c) => assert_eq!(c.grouping.n_clusters(), 2),
            _ => unreachable!(),
        }
    }

    #[test]
    fn parallel_two_user_search_picks_noma() {
        let spec = ChannelSpec::explicit(vec![cv(&[3.0, 0.0]), cv(&[1.0, 0.0])]);
        let s = generate_scenario(&spec, 2, 2, vec![1.0, 1.0], 1.0).unwrap();
        let space = SearchSpace::new(
            GroupingMode::AllPartitions,
            OrderMode::AllPermutations,
            DirectionFamily::Matched,
            11,
            Objective::SumRate,
        );
        let result = dl_exhaustive_search(&s, &space).unwrap();
        match result.best_config {
            BestConfig::Downlink(c) => {
                assert_eq!(c.grouping.n_clusters(), 1);
                // the strong user (index 0) cancels the weak user's signal
                assert!(c.order.decodes(0, 1));
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn single_user_search_hits_single_user_bound() {
        let spec = ChannelSpec::explicit(vec![cv(&[1.0, 0.0])]);
        let s = generate_scenario(&spec, 2, 1, vec![1.0], 1.0).unwrap();
        let space = SearchSpace::new(
            GroupingMode::AllPartitions,
            OrderMode::AllPermutations,
            DirectionFamily::Matched,
            3,
            Objective::SumRate,
        );
        let result = dl_exhaustive_search(&s, &space).unwrap();
        assert_abs_diff_eq!(result.best_value, 2f64.log2(), epsilon = 1e-12);
    }

    #[test]
    fn uplink_scalar_search_tradeoff() {
        let spec = ChannelSpec::explicit(vec![cv(&[10f64.sqrt()]), cv(&[1.0])]);
        let s = generate_scenario(&spec, 1, 2, vec![1.0, 1.0], 1.0).unwrap();
        let space = SearchSpace::new(
            GroupingMode::AllPartitions,
            OrderMode::AllPermutations,
            DirectionFamily::Matched,
            2,
            Objective::SumRate,
        );
        let result = ul_exhaustive_search(&s, &space).unwrap();
        assert_abs_diff_eq!(result.best_value, 12f64.log2(), epsilon = 1e-12);
        let l1 = result
            .layer_tradeoff
            .iter()
            .find(|&&(l, _)| l == 1)
            .unwrap()
            .1;
        let l2 = result
            .layer_tradeoff
            .iter()
            .find(|&&(l, _)| l == 2)
            .unwrap()
            .1;
        assert_abs_diff_eq!(l2, 12f64.log2(), epsilon = 1e-12);
        assert!(l1 < l2);
        // best single-layer config silences the weak stream entirely
        assert_abs_diff_eq!(l1, 11f64.log2(), epsilon = 1e-12);
    }

    #[test]
    fn uplink_min_rate_prefers_decoding_strong_first() {
        let spec = ChannelSpec::explicit(vec![cv(&[10f64.sqrt()]), cv(&[1.0])]);
        let s = generate_scenario(&spec, 1, 2, vec![1.0, 1.0], 1.0).unwrap();
        let space = SearchSpace::new(
            GroupingMode::Singletons,
            OrderMode::AllPermutations,
            DirectionFamily::Matched,
            2,
            Objective::MinRate,
        );
        let result = ul_exhaustive_search(&s, &space).unwrap();
        assert_abs_diff_eq!(result.best_value, 1.0, epsilon = 1e-12);
        match result.best_config {
            BestConfig::Uplink(c) => {
                // stream 0 decoded first, stream 1 last and clean
                assert_eq!(c.layers.layer_of(0), 0);
                assert_eq!(c.layers.layer_of(1), 1);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn uplink_single_user_forces_one_layer() {
        let spec = ChannelSpec::explicit(vec![cv(&[1.0])]);
        let s = generate_scenario(&spec, 1, 1, vec![1.0], 1.0).unwrap();
        let space = SearchSpace::new(
            GroupingMode::AllPartitions,
            OrderMode::AllPermutations,
            DirectionFamily::Matched,
            2,
            Objective::SumRate,
        );
        let result = ul_exhaustive_search(&s, &space).unwrap();
        assert_eq!(result.layer_tradeoff, vec![(1, 1.0)]);
    }

    #[test]
    fn cap_is_enforced() {
        let spec = ChannelSpec::iid(1);
        let s = generate_scenario(&spec, 4, 4, vec![1.0; 4], 1.0).unwrap();
        let mut space = SearchSpace::new(
            GroupingMode::AllPartitions,
            OrderMode::AllPermutations,
            DirectionFamily::Matched,
            10,
            Objective::SumRate,
        );
        space.cap = 100;
        assert!(matches!(
            dl_exhaustive_search(&s, &space),
            Err(NgmaError::SearchTooLarge(_, _))
        ));
    }

    #[test]
    fn search_is_deterministic() {
        let spec = ChannelSpec::iid(21);
        let s = generate_scenario(&spec, 3, 3, vec![1.0; 3], 1.0).unwrap();
        let space = SearchSpace::new(
            GroupingMode::AllPartitions,
            OrderMode::AllPermutations,
            DirectionFamily::Matched,
            4,
            Objective::SumRate,
        );
        let a = dl_exhaustive_search(&s, &space).unwrap();
        let b = dl_exhaustive_search(&s, &space).unwrap();
        assert_eq!(a.best_value, b.best_value);
        assert_eq!(a.evaluations, b.evaluations);
        match (a.best_config, b.best_config) {
            (BestConfig::Downlink(x), BestConfig::Downlink(y)) => {
                assert_eq!(x.grouping.canonical(), y.grouping.canonical());
                assert_eq!(x.order.sequences(), y.order.sequences());
                assert_eq!(x.beams.powers(), y.beams.powers());
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn best_value_reproduces_through_rate_modules() {
        let spec = ChannelSpec::iid(33);
        let s = generate_scenario(&spec, 3, 3, vec![1.0; 3], 1.0).unwrap();
        let space = SearchSpace::new(
            GroupingMode::AllPartitions,
            OrderMode::AllPermutations,
            DirectionFamily::Matched,
            4,
            Objective::SumRate,
        );
        let result = dl_exhaustive_search(&s, &space).unwrap();
        match result.best_config {
            BestConfig::Downlink(c) => {
                let report = dl_sic_check(&s, &c.grouping, &c.order, &c.beams).unwrap();
                assert!(report.sic_feasible);
                let value: f64 = report.per_user_rate.iter().sum();
                assert_abs_diff_eq!(value, result.best_value, epsilon = 1e-12);
            }
            _ => unreachable!(),
        }
    }
}
